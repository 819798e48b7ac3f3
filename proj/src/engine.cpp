#include "dsgdlab/engine.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dsgdlab/rng.hpp"

namespace dsgdlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double Schedule::at(long t) const {
  if (t < 1) throw std::invalid_argument("Schedule::at: t must be >= 1");
  switch (kind) {
    case Kind::constant:
      return alpha;
    case Kind::inv_sqrt:
      return c_prime / std::sqrt(static_cast<double>(t) + 1.0);
    case Kind::harmonic:
      return a / (static_cast<double>(t) + t0);
  }
  throw std::logic_error("Schedule::at: bad kind");
}

Schedule Theorem1Stepsize::schedule() const {
  Schedule s;
  s.kind = Schedule::Kind::constant;
  s.alpha = alpha;
  return s;
}

Schedule Theorem1Stepsize::unknown_horizon_schedule() const {
  Schedule s;
  s.kind = Schedule::Kind::inv_sqrt;
  s.c_prime = std::sqrt(2.0) * C;
  return s;
}

Theorem1Stepsize theorem1_constant_stepsize(double L, int n, int d, long T,
                                            double sigma_sq_avg,
                                            double sigma_bar, double lambda,
                                            std::optional<double> B) {
  if (L <= 0.0) throw std::invalid_argument("theorem1: L must be positive");
  if (n < 1 || d < 1 || T < 1)
    throw std::invalid_argument("theorem1: n, d, T must be positive");
  if (sigma_sq_avg < 0.0 || sigma_bar < 0.0)
    throw std::invalid_argument("theorem1: noise parameters must be >= 0");
  if (lambda < 0.0 || lambda >= 1.0)
    throw std::invalid_argument("theorem1: lambda must lie in [0, 1)");

  const double nn = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  Theorem1Stepsize r;
  r.smooth_cap = 1.0 / (2.0 * L);
  r.variance_cap = sigma_sq_avg > 0.0 ? nn / (9.0 * sigma_sq_avg) : kInf;
  const bool hetero_active = B.has_value() && *B > 0.0 && lambda > 0.0;
  r.hetero_cap = hetero_active
                     ? (1.0 - lambda) / (lambda * L * (*B) * std::sqrt(48.0))
                     : kInf;
  const double sigma = std::sqrt(sigma_sq_avg);
  r.dim_cap =
      sigma > 0.0 ? std::sqrt(nn) / (6.0 * sigma * std::sqrt(10.0 * dd * L))
                  : kInf;
  if (sigma_bar > 0.0 && lambda > 0.0) {
    const double common = std::cbrt(nn) * std::pow(1.0 - lambda, 2.0 / 3.0) /
                          (std::pow(sigma_bar, 2.0 / 3.0) *
                           std::pow(L, 2.0 / 3.0) * std::cbrt(9.0));
    r.mix_cap_stated = common / (lambda * lambda);
    r.mix_cap_derived = common / std::pow(lambda, 2.0 / 3.0);
  } else {
    r.mix_cap_stated = kInf;
    r.mix_cap_derived = kInf;
  }
  r.C = std::min({r.smooth_cap, r.variance_cap, r.hetero_cap, r.dim_cap,
                  r.mix_cap_stated, r.mix_cap_derived});
  r.horizon_cap = sigma > 0.0
                      ? std::sqrt(nn) / (sigma * std::sqrt(dd * static_cast<double>(T)))
                      : kInf;
  r.alpha = std::min(r.C, r.horizon_cap);
  if (!std::isfinite(r.alpha))
    throw std::invalid_argument("theorem1: every cap is infinite (L = 0?)");
  return r;
}

Theorem2Schedule theorem2_schedule(double mu, double L, int d,
                                   double sigma_sq_avg, double sigma_bar,
                                   double lambda, bool theory_mode,
                                   double practical_t0) {
  if (mu <= 0.0 || L < mu)
    throw std::invalid_argument("theorem2: need 0 < mu <= L");
  if (d < 1) throw std::invalid_argument("theorem2: d must be positive");
  if (sigma_sq_avg < 0.0 || sigma_bar < 0.0)
    throw std::invalid_argument("theorem2: noise parameters must be >= 0");
  if (lambda < 0.0 || lambda >= 1.0)
    throw std::invalid_argument("theorem2: lambda must lie in [0, 1)");

  const double kappa = L / mu;
  const double dd = static_cast<double>(d);
  Theorem2Schedule r;
  r.theory_mode = theory_mode;
  r.t0_terms = {6.0,
                17280.0 * dd * sigma_sq_avg * kappa / mu,
                432.0 * sigma_bar * sigma_bar * kappa * kappa / mu,
                12.0 * kappa * lambda * std::sqrt(10.0) / (1.0 - lambda),
                5184.0 * sigma_bar * sigma_bar * lambda * lambda * kappa *
                    kappa / (mu * (1.0 - lambda)),
                (3.0 + lambda) / (1.0 - lambda)};
  r.t0_floor_theory = 0.0;
  for (double v : r.t0_terms) r.t0_floor_theory = std::max(r.t0_floor_theory, v);

  if (theory_mode) {
    r.t0 = r.t0_floor_theory;
  } else {
    if (practical_t0 < 6.0)
      throw std::invalid_argument("theorem2: practical t0 must be >= 6");
    r.t0 = practical_t0;
  }
  r.nu = 1.0;
  if (sigma_sq_avg > 0.0)
    r.nu = std::min(r.nu, mu / (432.0 * sigma_sq_avg * kappa * kappa));
  r.nu = std::min(r.nu, mu / (72.0 * kappa));

  r.schedule.kind = Schedule::Kind::harmonic;
  r.schedule.a = 6.0 / mu;
  r.schedule.t0 = r.t0;
  return r;
}

void step(State& state, const MixingMatrix& mix, const Objective& obj,
          const Eigen::MatrixXd& Z, double alpha, Eigen::MatrixXd& scratch) {
  const int n = state.n();
  const int d = state.d();
  if (mix.n() != n || obj.n != n || obj.d != d)
    throw std::invalid_argument("step: mismatched instance dimensions");
  const bool noisy = Z.size() != 0;
  if (noisy && (Z.rows() != d || Z.cols() != n))
    throw std::invalid_argument("step: Z has wrong shape");
  if (scratch.rows() != d || scratch.cols() != n) scratch.resize(d, n);

  // local half-step: y_j = x_j - alpha (grad f_j(x_j) + z_j)
  for (int j = 0; j < n; ++j) {
    obj.grad(j, state.X.col(j), scratch.col(j));
    if (noisy) scratch.col(j) += Z.col(j);
  }
  scratch *= -alpha;
  scratch += state.X;

  // gossip: x_i' = sum_j w_ij y_j; only scratch is read, so X can be
  // overwritten in place
  const Eigen::MatrixXd& W = mix.W;
  for (int i = 0; i < n; ++i) {
    auto xi = state.X.col(i);
    xi.setZero();
    for (int j = 0; j < n; ++j) {
      const double w = W(i, j);
      if (w != 0.0) xi += w * scratch.col(j);
    }
  }
  ++state.t;
}

void step_stacked(State& state, const MixingMatrix& mix, const Objective& obj,
                  const Eigen::MatrixXd& Z, double alpha) {
  const int n = state.n();
  const int d = state.d();
  if (mix.n() != n || obj.n != n || obj.d != d)
    throw std::invalid_argument("step_stacked: mismatched instance dimensions");
  const bool noisy = Z.size() != 0;

  Eigen::MatrixXd Y(d, n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd g(d);
    obj.grad(j, state.X.col(j), g);
    if (noisy) g += Z.col(j);
    Y.col(j) = state.X.col(j) - alpha * g;
  }

  // vec(X') = (W kron I_d) vec(Y), with vec stacking user blocks
  Eigen::MatrixXd WI = Eigen::MatrixXd::Zero(n * d, n * d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      WI.block(i * d, j * d, d, d) =
          mix.W(i, j) * Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd y(n * d);
  for (int j = 0; j < n; ++j) y.segment(j * d, d) = Y.col(j);
  Eigen::VectorXd x = WI * y;
  for (int j = 0; j < n; ++j) state.X.col(j) = x.segment(j * d, d);
  ++state.t;
}

Eigen::MatrixXd initial_matrix(const InitSpec& init, int d, int n) {
  switch (init.kind) {
    case InitSpec::Kind::zeros:
      return Eigen::MatrixXd::Zero(d, n);
    case InitSpec::Kind::constant:
      return Eigen::MatrixXd::Constant(d, n, init.value);
    case InitSpec::Kind::matrix:
      if (init.X0.rows() != d || init.X0.cols() != n)
        throw std::invalid_argument("init: X0 has wrong shape");
      return init.X0;
  }
  throw std::logic_error("init: bad kind");
}

RunRecord run(const RunSpec& spec) {
  if (!spec.mix || !spec.obj || !spec.noise)
    throw std::invalid_argument("run: mix, obj and noise must be set");
  const Objective& obj = *spec.obj;
  const MixingMatrix& mix = *spec.mix;
  const NoiseModel& noise = *spec.noise;
  const int n = obj.n;
  const int d = obj.d;
  if (mix.n() != n || noise.n != n || noise.d != d)
    throw std::invalid_argument("run: mismatched instance dimensions");
  if (spec.T < 1) throw std::invalid_argument("run: T must be >= 1");

  State st;
  st.X = initial_matrix(spec.init, d, n);
  st.t = 1;

  RunRecord rec;
  rec.n = n;
  rec.d = d;
  rec.T = spec.T;

  const bool noisy = noise.kind != NoiseModel::Kind::zero;
  std::vector<std::mt19937_64> engines;
  if (noisy) {
    engines.reserve(n);
    for (int i = 0; i < n; ++i)
      engines.push_back(make_engine(
          spec.master_seed, {spec.run_index, static_cast<std::uint64_t>(i)}));
  }

  const bool track_grad = spec.track_grad_metric || spec.record_arrays;
  if (spec.record_arrays) {
    rec.consensus_gap.reserve(spec.T);
    rec.f_xbar.reserve(spec.T);
    rec.grad_sq_avg.reserve(spec.T);
    rec.alphas.reserve(spec.T - 1);
  }
  if (spec.record_trajectory) {
    rec.X_hist.reserve(spec.T);
    rec.Z_hist.reserve(spec.T - 1);
  }

  Eigen::MatrixXd Z;  // stays empty for noiseless runs
  if (noisy) Z.resize(d, n);
  Eigen::MatrixXd scratch(d, n);
  Eigen::VectorXd xbar(d), g(d);

  double grad_sq_sum = 0.0;
  long states_seen = 0;

  auto consensus_of = [&](const Eigen::MatrixXd& X) {
    xbar.noalias() = X.rowwise().mean();
    return (X.colwise() - xbar).squaredNorm() / n;  // xbar left filled
  };
  auto observe_state = [&](const Eigen::MatrixXd& X) {
    ++states_seen;
    double gsq = 0.0;
    if (track_grad) {
      for (int i = 0; i < n; ++i) {
        obj.grad_global(X.col(i), g);
        gsq += g.squaredNorm();
      }
      gsq /= n;
      grad_sq_sum += gsq;
    }
    if (spec.record_arrays) {
      const double gap = consensus_of(X);
      rec.consensus_gap.push_back(gap);
      rec.f_xbar.push_back(obj.value_global(xbar));
      rec.grad_sq_avg.push_back(gsq);
    }
    if (spec.record_trajectory) rec.X_hist.push_back(X);
  };

  // state x^1
  rec.delta_x = consensus_of(st.X);
  if (obj.f_star) rec.delta_f = obj.value_global(xbar) - *obj.f_star;
  observe_state(st.X);

  const double thr_sq = spec.divergence_threshold * spec.divergence_threshold;
  for (long t = 1; t < spec.T; ++t) {
    const double alpha = spec.schedule.at(t);
    if (spec.record_arrays || spec.record_trajectory)
      rec.alphas.push_back(alpha);
    if (noisy)
      for (int i = 0; i < n; ++i) sample_noise(noise, i, engines[i], Z.col(i));
    if (spec.record_trajectory)
      rec.Z_hist.push_back(noisy ? Z : Eigen::MatrixXd::Zero(d, n));

    step(st, mix, obj, Z, alpha, scratch);

    if (!st.X.allFinite() || st.X.squaredNorm() > thr_sq) {
      rec.diverged = true;
      rec.diverged_at = t + 1;
      break;
    }
    observe_state(st.X);
  }

  rec.X_final = st.X;
  if (!rec.diverged) {
    rec.final_consensus_gap = consensus_of(st.X);
    rec.final_f_xbar = obj.value_global(xbar);
    if (obj.f_star) {
      double gap = 0.0;
      for (int i = 0; i < n; ++i)
        gap += obj.value_global(st.X.col(i)) - *obj.f_star;
      rec.final_user_gap = gap / n;
    }
    if (track_grad && states_seen > 0)
      rec.final_avg_sq_grad = grad_sq_sum / static_cast<double>(states_seen);
  }
  return rec;
}

}  // namespace dsgdlab
