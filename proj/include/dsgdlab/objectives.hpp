#ifndef DSGDLAB_OBJECTIVES_HPP
#define DSGDLAB_OBJECTIVES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dsgdlab {

// Explicit quadratic instance: f_i(x) = 0.5 (x - b_i)' A_i (x - b_i).
struct QuadraticSpec {
  std::vector<Eigen::MatrixXd> A;  // one SPD matrix per user
  std::vector<Eigen::VectorXd> b;  // one center per user
  double mu = 0.0;                 // certified strong convexity (min eigenvalue bound)
  double L = 0.0;                  // certified smoothness (max eigenvalue bound)
};

// Finite-sum objective f = (1/n) sum_i f_i with certified constants.
// Two families:
//   quadratic:  f_i(x) = 0.5 (x - b_i)' A_i (x - b_i), spectra in [mu, L]
//   nonconvex:  f_i(x) = sum_j x_j^2/(1 + x_j^2) + <h_i, x>, sum_i h_i = 0
struct Objective {
  enum class Family { quadratic, nonconvex };

  Family family = Family::quadratic;
  int n = 0;
  int d = 0;

  // quadratic data (empty for nonconvex)
  std::vector<Eigen::MatrixXd> A;
  std::vector<Eigen::VectorXd> b;
  std::vector<Eigen::VectorXd> Ab;  // cached A_i b_i

  // nonconvex data (empty for quadratic)
  std::vector<Eigen::VectorXd> h;

  // certified constants
  double L = 0.0;                  // gradient Lipschitz constant of every f_i
  std::optional<double> mu;        // strong convexity (quadratic only)
  std::optional<double> A_het;     // gradient-diversity constants:
  std::optional<double> B_het;     //   max_i ||grad f_i||^2 <= A^2 + B^2 ||grad f||^2

  // optimum data (quadratic only)
  std::optional<Eigen::VectorXd> x_star;
  std::optional<double> f_star;
  // sum_i ||grad f_i(x_star)||^2, i.e. the squared stacked gradient at the
  // optimum (0 for homogeneous instances)
  std::optional<double> grad_sq_at_opt;

  // cached global-gradient form: grad f(x) = Hbar x - cbar (quadratic);
  // equals the mean of the local gradients exactly in exact arithmetic
  Eigen::MatrixXd Hbar;
  Eigen::VectorXd cbar;

  // x arguments bind to matrix columns without copying; out must be sized d
  double value(int i, Eigen::Ref<const Eigen::VectorXd> x) const;
  void grad(int i, Eigen::Ref<const Eigen::VectorXd> x,
            Eigen::Ref<Eigen::VectorXd> out) const;

  // f(x) as the average of the local values
  double value_global(Eigen::Ref<const Eigen::VectorXd> x) const;
  // grad f(x) via the cached aggregate form (one matvec / O(d))
  void grad_global(Eigen::Ref<const Eigen::VectorXd> x,
                   Eigen::Ref<Eigen::VectorXd> out) const;
  Eigen::VectorXd grad_global(Eigen::Ref<const Eigen::VectorXd> x) const;
  // grad f(x) as the literal average of local gradients (slow reference route)
  Eigen::VectorXd grad_global_by_average(Eigen::Ref<const Eigen::VectorXd> x) const;
};

// Random quadratic family. Per user: A_i = Q_i diag(spectrum) Q_i' with a
// random orthogonal Q_i; spectrum endpoints pinned to {mu, L} for d >= 2 and
// interior eigenvalues log-uniform in [mu, L]; centers b_i ~ c0 +
// N(0, center_spread^2 I) with a common random center c0. Solves for the
// global optimum directly: (sum A_i) x* = sum A_i b_i.
Objective make_quadratic(int n, int d, double mu, double L,
                         double center_spread, std::uint64_t seed);

// Objective from an explicit QuadraticSpec (for hand-constructed instances).
Objective make_quadratic(const QuadraticSpec& spec);

// Nonconvex family with controlled gradient heterogeneity: tilts h_i are
// centered (sum_i h_i = 0) and scaled so max_i ||h_i|| = hetero_scale.
// Certified: L = 2 (max |d^2/du^2 u^2/(1+u^2)| = 2), B_het^2 = 2,
// A_het^2 = 2 max_i ||h_i||^2. No optimum data (mu, x_star, f_star unset).
Objective make_nonconvex(int n, int d, double hetero_scale, std::uint64_t seed);

// Empirical smoothness probe: max over users and sampled pairs of
// ||grad f_i(x) - grad f_i(y)|| / ||x - y|| inside a box of the given radius.
struct SmoothnessReport {
  double max_ratio = 0.0;
  int pairs = 0;
  bool within(double L, double slack = 1e-9) const {
    return max_ratio <= L * (1.0 + slack);
  }
};

SmoothnessReport check_smoothness(const Objective& obj, int pairs,
                                  double radius, std::uint64_t seed);

}  // namespace dsgdlab

#endif  // DSGDLAB_OBJECTIVES_HPP
