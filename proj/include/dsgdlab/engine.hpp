#ifndef DSGDLAB_ENGINE_HPP
#define DSGDLAB_ENGINE_HPP

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "dsgdlab/noise.hpp"
#include "dsgdlab/objectives.hpp"
#include "dsgdlab/topology.hpp"

namespace dsgdlab {

// Step-size schedules (t is 1-based):
//   constant:  alpha_t = alpha
//   inv_sqrt:  alpha_t = c_prime / sqrt(t + 1)
//   harmonic:  alpha_t = a / (t + t0)
struct Schedule {
  enum class Kind { constant, inv_sqrt, harmonic };
  Kind kind = Kind::constant;
  double alpha = 0.0;    // constant
  double c_prime = 0.0;  // inv_sqrt
  double a = 0.0;        // harmonic
  double t0 = 0.0;       // harmonic

  double at(long t) const;
};

// Fixed step size for a known horizon T:
//   alpha = min{C, sqrt(n) / (sigma sqrt(d T))},
//   C = min{ 1/(2L), n/(9 sigma^2), (1-lambda)/(lambda L B sqrt(48)),
//            sqrt(n)/(6 sigma sqrt(10 d L)), mix_cap },
// where the mixing cap is computed in both published variants
//   stated:  n^{1/3} (1-lambda)^{2/3} / (sigma_bar^{2/3} lambda^2   L^{2/3} 9^{1/3})
//   derived: n^{1/3} (1-lambda)^{2/3} / (sigma_bar^{2/3} lambda^{2/3} L^{2/3} 9^{1/3})
// and the smaller of the two is used (both are reported). Terms whose
// parameters vanish (lambda = 0, B = 0/absent, sigma = 0) are +infinity.
struct Theorem1Stepsize {
  double smooth_cap = 0.0;        // 1/(2L)
  double variance_cap = 0.0;      // n/(9 sigma^2)
  double hetero_cap = 0.0;        // (1-lambda)/(lambda L B sqrt(48))
  double dim_cap = 0.0;           // sqrt(n)/(6 sigma sqrt(10 d L))
  double mix_cap_stated = 0.0;    // lambda^2 variant
  double mix_cap_derived = 0.0;   // lambda^{2/3} variant
  double C = 0.0;                 // min of the caps above
  double horizon_cap = 0.0;       // sqrt(n)/(sigma sqrt(d T))
  double alpha = 0.0;             // min{C, horizon_cap}
  Schedule schedule() const;      // constant schedule at alpha
  // unknown-horizon companion: alpha_t = sqrt(2) C / sqrt(t + 1)
  Schedule unknown_horizon_schedule() const;
};

Theorem1Stepsize theorem1_constant_stepsize(double L, int n, int d, long T,
                                            double sigma_sq_avg,
                                            double sigma_bar, double lambda,
                                            std::optional<double> B);

// Decreasing schedule alpha_t = a/(t + t0) with a = 6/mu. In theory mode t0 is
// the published floor
//   max{6, 17280 d sigma^2 kappa / mu, 432 sigma_bar^2 kappa^2 / mu,
//       12 kappa lambda sqrt(10) / (1-lambda),
//       5184 sigma_bar^2 lambda^2 kappa^2 / (mu (1-lambda)), (3+lambda)/(1-lambda)}
// (kappa = L/mu); in practical mode the caller supplies t0 >= 6. Either way
// nu = min{1, mu/(432 sigma^2 kappa^2), mu/(72 kappa)} is reported.
struct Theorem2Schedule {
  Schedule schedule;        // harmonic, a = 6/mu
  double nu = 1.0;
  double t0 = 0.0;
  double t0_floor_theory = 0.0;
  std::array<double, 6> t0_terms{};  // the individual floor terms
  bool theory_mode = false;
};

Theorem2Schedule theorem2_schedule(double mu, double L, int d,
                                   double sigma_sq_avg, double sigma_bar,
                                   double lambda, bool theory_mode,
                                   double practical_t0 = 0.0);

// Per-user iterates, one column per user (d x n).
struct State {
  Eigen::MatrixXd X;
  long t = 1;
  int n() const { return static_cast<int>(X.cols()); }
  int d() const { return static_cast<int>(X.rows()); }
};

// One ATC iteration in per-node form:
//   y_j   = x_j - alpha (grad f_j(x_j) + z_j)
//   x_i'  = sum_j w_ij y_j    (sum over the sparsity pattern of W)
// Z holds one noise column per user; scratch must be d x n.
void step(State& state, const MixingMatrix& mix, const Objective& obj,
          const Eigen::MatrixXd& Z, double alpha, Eigen::MatrixXd& scratch);

// Same update through the stacked form: vec(X') = (W kron I_d) vec(Y).
// Independent implementation kept for cross-validation; agrees with step()
// to tight floating-point tolerance.
void step_stacked(State& state, const MixingMatrix& mix, const Objective& obj,
                  const Eigen::MatrixXd& Z, double alpha);

// Deterministic initial placement of the users.
struct InitSpec {
  enum class Kind { zeros, constant, matrix };
  Kind kind = Kind::zeros;
  double value = 0.0;      // constant: every coordinate of every user
  Eigen::MatrixXd X0;      // matrix: explicit d x n
  bool equal_across_users() const { return kind != Kind::matrix; }
};

// Materialize the d x n initial iterate matrix an InitSpec describes.
Eigen::MatrixXd initial_matrix(const InitSpec& init, int d, int n);

struct RunSpec {
  const MixingMatrix* mix = nullptr;
  const Objective* obj = nullptr;
  const NoiseModel* noise = nullptr;
  Schedule schedule;
  long T = 1;                     // number of recorded states x^1..x^T
  InitSpec init;
  std::uint64_t master_seed = 0;
  std::uint64_t run_index = 0;
  bool record_arrays = true;      // per-iteration metric arrays
  bool record_trajectory = false; // full X^t, Z^t capture (validation runs)
  // gradient norms need one global-gradient eval per user per state; ensembles
  // that only read final_user_gap can switch this off
  bool track_grad_metric = true;
  double divergence_threshold = 1e12;  // on the stacked iterate norm
};

// Trajectory record. Per-iteration arrays have length T (entry t-1 describes
// the state x^t); updates use alpha_1..alpha_{T-1}. Gap metrics are present
// only when the objective carries optimum data.
struct RunRecord {
  int n = 0, d = 0;
  long T = 0;
  std::vector<double> consensus_gap;  // (1/n) sum_i ||x_i^t - xbar^t||^2
  std::vector<double> f_xbar;         // f(xbar^t)
  std::vector<double> grad_sq_avg;    // (1/n) sum_i ||grad f(x_i^t)||^2
  std::vector<double> alphas;         // alpha_t applied leaving state t (T-1 entries)

  std::vector<Eigen::MatrixXd> X_hist;  // with record_trajectory: states x^1..x^T
  std::vector<Eigen::MatrixXd> Z_hist;  // noise applied at steps 1..T-1

  Eigen::MatrixXd X_final;            // last reached state
  double delta_x = 0.0;               // (1/n) sum_i ||x_i^1 - xbar^1||^2
  std::optional<double> delta_f;      // f(xbar^1) - f*
  std::optional<double> final_user_gap;  // (1/n) sum_i (f(x_i^T) - f*)
  double final_avg_sq_grad = 0.0;     // (1/(n T)) sum_t sum_i ||grad f(x_i^t)||^2
  double final_consensus_gap = 0.0;
  double final_f_xbar = 0.0;

  bool diverged = false;
  long diverged_at = -1;  // iteration index where divergence was detected
};

RunRecord run(const RunSpec& spec);

}  // namespace dsgdlab

#endif  // DSGDLAB_ENGINE_HPP
