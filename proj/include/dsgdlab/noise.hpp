#ifndef DSGDLAB_NOISE_HPP
#define DSGDLAB_NOISE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

namespace dsgdlab {

// Gradient-noise models, all sub-Gaussian in the sense
//   E[exp(||z_i||^2 / sigma_i^2)] <= e,  E[z_i] = 0,
// independent across users and iterations.
//
//   zero:                 z = 0 (sigma treated as 0)
//   gaussian_calibrated:  z ~ N(0, s_i^2 I_d) with per-coordinate variance
//                         s_i^2 = sigma_i^2 (1 - exp(-2/d)) / 2, which makes
//                         E[exp(||z||^2/sigma_i^2)] = (1 - 2 s_i^2/sigma_i^2)^{-d/2}
//                         equal to e exactly
//   sphere_bounded:       z uniform on the radius-sigma_i sphere, so the
//                         integrand exp(||z||^2/sigma_i^2) = e deterministically
struct NoiseModel {
  enum class Kind { zero, gaussian_calibrated, sphere_bounded };

  Kind kind = Kind::zero;
  int n = 0;
  int d = 0;
  std::vector<double> sigma;  // per-user sub-Gaussian parameter

  double sigma_sq_avg() const;          // sigma^2 = (1/n) sum_i sigma_i^2
  double sigma_bar() const;             // max_i sigma_i
  double coord_std(int user) const;     // s_i for gaussian_calibrated, else 0
};

NoiseModel make_noise(NoiseModel::Kind kind, int n, int d, double sigma);
NoiseModel make_noise(NoiseModel::Kind kind, int n, int d,
                      std::vector<double> sigmas);
NoiseModel::Kind noise_kind_from_string(const std::string& s);

// Draws one noise vector for the given user into out, which must already be
// sized d (it binds to matrix columns without copying).
void sample_noise(const NoiseModel& model, int user, std::mt19937_64& rng,
                  Eigen::Ref<Eigen::VectorXd> out);

struct MgfEstimate {
  double mean = 0.0;
  double se = 0.0;  // sample standard error of the mean
  std::size_t samples = 0;
};

// Monte Carlo estimate of E[exp(||z_user||^2 / sigma_user^2)].
// Degenerate user (sigma = 0 or zero model): integrand is 1 by convention.
MgfEstimate estimate_mgf_norm(const NoiseModel& model, int user,
                              std::size_t samples, std::mt19937_64& rng);

// Joint Monte Carlo estimate of the linear-form MGFs: per user
// E[exp(<v, z_i>)] and, for the same draws, E[exp(<v, zbar>)] with
// zbar = (1/n) sum_i z_i.
struct InnerMgfResult {
  std::vector<MgfEstimate> per_user;
  MgfEstimate averaged;
};

InnerMgfResult estimate_mgf_inner(const NoiseModel& model,
                                  const Eigen::VectorXd& v,
                                  std::size_t samples, std::mt19937_64& rng);

// Monte Carlo estimate of E[exp(n ||zbar||^2 / (120 d sigma^2))].
MgfEstimate estimate_mgf_avg_norm(const NoiseModel& model, std::size_t samples,
                                  std::mt19937_64& rng);

}  // namespace dsgdlab

#endif  // DSGDLAB_NOISE_HPP
