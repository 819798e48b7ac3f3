#include "dsgdlab/validation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "dsgdlab/noise.hpp"
#include "dsgdlab/rng.hpp"

namespace dsgdlab {

namespace {

void record_case(CheckReport& rep, double margin, const std::string& what) {
  ++rep.cases_checked;
  rep.worst_margin = std::min(rep.worst_margin, margin);
  if (margin < -rep.tolerance) {
    ++rep.violations;
    if (rep.first_violation.empty()) {
      std::ostringstream os;
      os << what << " (margin " << margin << ")";
      rep.first_violation = os.str();
    }
  }
}

void merge_into(CheckReport& dst, const CheckReport& src) {
  dst.cases_checked += src.cases_checked;
  dst.violations += src.violations;
  dst.cases_skipped += src.cases_skipped;
  dst.worst_margin = std::min(dst.worst_margin, src.worst_margin);
  if (dst.first_violation.empty()) dst.first_violation = src.first_violation;
  if (dst.note.empty()) dst.note = src.note;
}

void require_trajectory(const RunRecord& rec, const char* who) {
  if (rec.X_hist.size() != static_cast<std::size_t>(rec.T) ||
      rec.Z_hist.size() + 1 != static_cast<std::size_t>(rec.T) ||
      rec.alphas.size() + 1 != static_cast<std::size_t>(rec.T))
    throw std::invalid_argument(std::string(who) +
                                ": trajectory recording required");
}

// mean/variance accumulator for the MC estimators
struct MeanVar {
  long k = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x) {
    ++k;
    const double d1 = x - mean;
    mean += d1 / static_cast<double>(k);
    m2 += d1 * (x - mean);
  }
  double se() const {
    return k > 1 ? std::sqrt(m2 / static_cast<double>(k - 1) /
                             static_cast<double>(k))
                 : 0.0;
  }
};

}  // namespace

CheckReport check_lemma1(const RunRecord& rec, const Objective& obj,
                         double tol) {
  require_trajectory(rec, "check_lemma1");
  const double cap = 1.0 / (2.0 * obj.L);
  for (double a : rec.alphas)
    if (a > cap * (1.0 + 1e-12))
      throw std::invalid_argument(
          "check_lemma1: step-size exceeds 1/(2L) somewhere");

  CheckReport rep;
  rep.name = "lemma1";
  rep.tolerance = tol;
  const int n = rec.n;
  Eigen::VectorXd xbar(rec.d), xbar_next(rec.d), zbar(rec.d), g(rec.d);
  for (long t = 1; t < rec.T; ++t) {
    const Eigen::MatrixXd& X = rec.X_hist[t - 1];
    const Eigen::MatrixXd& Xn = rec.X_hist[t];
    const Eigen::MatrixXd& Z = rec.Z_hist[t - 1];
    const double a = rec.alphas[t - 1];
    xbar.noalias() = X.rowwise().mean();
    xbar_next.noalias() = Xn.rowwise().mean();
    zbar.noalias() = Z.rowwise().mean();
    obj.grad_global(xbar, g);
    const double cons = (X.colwise() - xbar).squaredNorm();
    const double lhs = obj.value_global(xbar_next);
    const double rhs = obj.value_global(xbar) - 0.5 * a * g.squaredNorm() -
                       a * g.dot(zbar) + a * a * obj.L * zbar.squaredNorm() +
                       a * obj.L * obj.L / (2.0 * n) * cons;
    std::ostringstream what;
    what << "t=" << t;
    record_case(rep, rhs - lhs, what.str());
  }
  return rep;
}

CheckReport check_lemma3(const RunRecord& rec, const Objective& obj,
                         const MixingMatrix& mix, double tol) {
  require_trajectory(rec, "check_lemma3");
  if (!obj.A_het || !obj.B_het)
    throw std::invalid_argument(
        "check_lemma3: objective lacks heterogeneity constants");
  const double lam = mix.lambda;
  if (lam >= 1.0)
    throw std::invalid_argument("check_lemma3: lambda must be < 1");

  CheckReport rep;
  rep.name = "lemma3";
  rep.tolerance = tol;
  const int n = rec.n;
  const double A2 = (*obj.A_het) * (*obj.A_het);
  const double B2 = (*obj.B_het) * (*obj.B_het);
  const double lam2 = lam * lam;

  Eigen::VectorXd xbar(rec.d), g(rec.d);
  xbar.noalias() = rec.X_hist[0].rowwise().mean();
  const double dx =
      (rec.X_hist[0].colwise() - xbar).squaredNorm() / static_cast<double>(n);

  double noise_sum = 0.0;  // sum_k a_k^2 lam^{t-k} sum_i ||z_i^k||^2
  double plain_sum = 0.0;  // sum_k a_k^2 lam^{t-k}
  double grad_sum = 0.0;   // sum_k a_k^2 lam^{t-k} sum_i ||grad f(x_i^k)||^2
  double lam_2t = 1.0;
  for (long t = 1; t < rec.T; ++t) {
    const Eigen::MatrixXd& X = rec.X_hist[t - 1];
    const double a = rec.alphas[t - 1];
    double sg = 0.0;
    for (int i = 0; i < n; ++i) {
      obj.grad_global(X.col(i), g);
      sg += g.squaredNorm();
    }
    const double sz = rec.Z_hist[t - 1].squaredNorm();
    noise_sum = lam * noise_sum + a * a * sz;
    plain_sum = lam * plain_sum + a * a;
    grad_sum = lam * grad_sum + a * a * sg;
    lam_2t *= lam2;

    xbar.noalias() = rec.X_hist[t].rowwise().mean();
    const double lhs = (rec.X_hist[t].colwise() - xbar).squaredNorm() /
                       static_cast<double>(n);
    const double rhs = 2.0 * lam_2t * dx +
                       4.0 * lam2 / (n * (1.0 - lam)) * noise_sum +
                       4.0 * lam2 * A2 / (1.0 - lam) * plain_sum +
                       4.0 * lam2 * B2 / (n * (1.0 - lam)) * grad_sum;
    std::ostringstream what;
    what << "t=" << t;
    record_case(rep, rhs - lhs, what.str());
  }
  return rep;
}

CheckReport check_lemma6(double lambda, double a, double t0, double c,
                         long t_max) {
  if (lambda < 0.0 || lambda >= 1.0)
    throw std::invalid_argument("check_lemma6: lambda must lie in [0, 1)");
  if (c < 0.5) throw std::invalid_argument("check_lemma6: need c >= 1/2");
  if (a <= 0.0 || t0 <= 0.0)
    throw std::invalid_argument("check_lemma6: need a, t0 > 0");
  const double floor = (2.0 * c - 1.0 + lambda) / (1.0 - lambda);
  if (t0 < floor * (1.0 - 1e-12))
    throw std::invalid_argument("check_lemma6: t0 below (2c-1+lambda)/(1-lambda)");

  CheckReport rep;
  rep.name = "lemma6";
  rep.tolerance = 1e-12;
  double s = 0.0;
  for (long t = 1; t <= t_max; ++t) {
    const double at = a / std::pow(static_cast<double>(t) + t0, c);
    s = lambda * s + at;
    std::ostringstream what;
    what << "lambda=" << lambda << " c=" << c << " a=" << a << " t=" << t;
    record_case(rep, 3.0 * at / (1.0 - lambda) - s, what.str());
  }
  return rep;
}

CheckReport check_prop_ran(double c, double t0, long a_lo, long b_hi) {
  if (c <= 0.0 || t0 <= 0.0)
    throw std::invalid_argument("check_prop_ran: need c, t0 > 0");
  if (a_lo < 0 || a_lo > b_hi)
    throw std::invalid_argument("check_prop_ran: need 0 <= a_lo <= b_hi");

  CheckReport rep;
  rep.name = "prop_ran";
  rep.tolerance = 1e-12;
  double prod = 1.0;
  bool dead = false;  // a non-positive factor poisons every larger b
  const double num = std::pow(static_cast<double>(a_lo) + t0, c);
  for (long k = a_lo; k <= b_hi; ++k) {
    const double factor = 1.0 - c / (static_cast<double>(k) + t0);
    if (factor <= 0.0) dead = true;
    if (dead) {
      ++rep.cases_skipped;
      continue;
    }
    prod *= factor;
    const double bound = num / std::pow(static_cast<double>(k) + 1.0 + t0, c);
    std::ostringstream what;
    what << "c=" << c << " t0=" << t0 << " a=" << a_lo << " b=" << k;
    record_case(rep, bound - prod, what.str());
  }
  if (dead) rep.note = "non-positive factors encountered; those cases skipped";
  return rep;
}

CheckReport check_lemma5_synthetic(double a, double t0,
                                   const std::vector<double>& coeffs,
                                   double x1, long t_max) {
  if (a <= 1.0 || a > 2.0)
    throw std::invalid_argument("check_lemma5: need a in (1, 2]");
  if (t0 < a) throw std::invalid_argument("check_lemma5: need t0 >= a");
  if (x1 <= 0.0) throw std::invalid_argument("check_lemma5: need X1 > 0");
  for (double ci : coeffs)
    if (ci < 0.0)
      throw std::invalid_argument("check_lemma5: coefficients must be >= 0");

  CheckReport rep;
  rep.name = "lemma5";
  rep.tolerance = 1e-9;
  const auto m = coeffs.size();
  const double p2a = std::pow(2.0, a);
  const double c1 = m >= 1 ? coeffs[0] : 0.0;
  const double c2 = m >= 2 ? coeffs[1] : 0.0;
  const double c3 = m >= 3 ? coeffs[2] : 0.0;

  double x = x1;
  for (long t = 1; t <= t_max; ++t) {
    const double tt = static_cast<double>(t) + t0;
    double drift = 0.0;
    double denom = tt;
    for (std::size_t i = 0; i < m; ++i) {
      drift += coeffs[i] / denom;
      denom *= tt;
    }
    x = (1.0 - a / tt) * x + drift;  // X^{t+1}

    const double u = static_cast<double>(t) + 1.0 + t0;
    const double ua = std::pow(u, a);
    double bound = std::pow(t0 + 1.0, a) * x1 / ua + p2a * c1 / a +
                   p2a * c2 / ((a - 1.0) * u) + p2a * c3 * std::log(u) / ua;
    for (std::size_t j = 4; j <= m; ++j)
      bound += p2a * std::pow(t0, 3.0 - static_cast<double>(j)) *
               coeffs[j - 1] / ((static_cast<double>(j) - 3.0) * ua);
    std::ostringstream what;
    what << "a=" << a << " t0=" << t0 << " t=" << t;
    record_case(rep, bound - x, what.str());
  }
  return rep;
}

CheckReport check_strcvx_props(const Objective& obj, int trials,
                               std::uint64_t seed, double tol) {
  if (!obj.mu || !obj.x_star || !obj.f_star)
    throw std::invalid_argument(
        "check_strcvx_props: objective lacks mu/x*/f*");
  CheckReport rep;
  rep.name = "strcvx_props";
  rep.tolerance = tol;
  const double mu = *obj.mu;
  const double fs = *obj.f_star;
  auto rng = make_engine(seed, {0x73747263ULL});
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double scales[] = {0.0, 0.1, 1.0, 10.0};
  Eigen::VectorXd x(obj.d), g(obj.d);
  for (int trial = 0; trial < trials; ++trial) {
    const double scale = scales[trial % 4];
    for (int j = 0; j < obj.d; ++j) x(j) = gauss(rng) * scale;
    x += *obj.x_star;
    const double gap = obj.value_global(x) - fs;
    obj.grad_global(x, g);
    std::ostringstream what;
    what << "trial=" << trial << " scale=" << scale;
    record_case(rep, g.squaredNorm() - 2.0 * mu * gap,
                "grad-dominance " + what.str());
    record_case(rep, gap - 0.5 * mu * (x - *obj.x_star).squaredNorm(),
                "quadratic-growth " + what.str());
  }
  return rep;
}

namespace {

struct MgfPremises {
  double mu, L, lam, sig_sq, sig_bar, a, t0, x1_dist_sq, grad_star_sq;
  int n;
};

MgfPremises common_mgf_premises(const RunSpec& base, const char* who) {
  if (!base.mix || !base.obj || !base.noise)
    throw std::invalid_argument(std::string(who) + ": incomplete RunSpec");
  const Objective& obj = *base.obj;
  if (!obj.mu || !obj.x_star || !obj.grad_sq_at_opt)
    throw std::invalid_argument(std::string(who) +
                                ": objective lacks mu/x*/grad at optimum");
  if (base.schedule.kind != Schedule::Kind::harmonic)
    throw std::invalid_argument(std::string(who) +
                                ": harmonic schedule required");
  MgfPremises p;
  p.mu = *obj.mu;
  p.L = obj.L;
  p.lam = base.mix->lambda;
  p.sig_sq = base.noise->sigma_sq_avg();
  p.sig_bar = base.noise->sigma_bar();
  p.a = base.schedule.a;
  p.t0 = base.schedule.t0;
  p.n = obj.n;
  const Eigen::MatrixXd x0 = initial_matrix(base.init, obj.d, obj.n);
  p.x1_dist_sq = (x0.colwise() - *obj.x_star).squaredNorm();
  p.grad_star_sq = *obj.grad_sq_at_opt;
  return p;
}

// One-sided MC comparison shared by the two MGF checks. exponent_of(rec, t)
// returns the realized LHS exponent at state t+1; log_bound_of(t) the exact
// RHS exponent.
template <typename ExpFn, typename BoundFn>
CheckReport mc_compare(const RunSpec& base, const MgfCheckSpec& spec,
                       const char* name, bool need_trajectory, ExpFn exponent_of,
                       BoundFn log_bound_of) {
  if (spec.samples < 2)
    throw std::invalid_argument("mgf check: need at least 2 samples");
  if (spec.t_max < 1)
    throw std::invalid_argument("mgf check: need t_max >= 1");

  std::vector<MeanVar> acc(static_cast<std::size_t>(spec.t_max));
  RunSpec rs = base;
  rs.T = spec.t_max + 1;
  rs.record_arrays = true;
  rs.record_trajectory = need_trajectory;
  rs.track_grad_metric = false;
  for (long r = 0; r < spec.samples; ++r) {
    rs.run_index = static_cast<std::uint64_t>(r);
    RunRecord rec = run(rs);
    if (rec.diverged)
      throw std::runtime_error(std::string(name) +
                               ": trajectory diverged; config unsuitable");
    for (long t = 1; t <= spec.t_max; ++t)
      acc[static_cast<std::size_t>(t - 1)].add(std::exp(exponent_of(rec, t)));
  }

  CheckReport rep;
  rep.name = name;
  rep.tolerance = 0.0;
  for (long t = 1; t <= spec.t_max; ++t) {
    const MeanVar& mv = acc[static_cast<std::size_t>(t - 1)];
    const double se = mv.se();
    if (!std::isfinite(mv.mean) || !std::isfinite(se) ||
        se > spec.rel_se_cap * mv.mean) {
      rep.cases_skipped += spec.t_max - t + 1;
      std::ostringstream os;
      os << "stopped at t=" << t << ": estimator relative SE above "
         << spec.rel_se_cap;
      rep.note = os.str();
      break;
    }
    const double lb = log_bound_of(t);
    const double bound = lb > 700.0 ? std::numeric_limits<double>::infinity()
                                    : std::exp(lb);
    std::ostringstream what;
    what << "t=" << t << " mc=" << mv.mean << " se=" << se
         << " bound=" << bound;
    record_case(rep, bound + 3.0 * se - mv.mean, what.str());
  }
  return rep;
}

}  // namespace

CheckReport mc_check_lemma4(const RunSpec& base, const MgfCheckSpec& spec) {
  const MgfPremises p = common_mgf_premises(base, "mc_check_lemma4");
  if (std::abs(p.a - 6.0 / p.mu) > 1e-9 * (6.0 / p.mu))
    throw std::invalid_argument("mc_check_lemma4: requires a = 6/mu");
  const double floor =
      std::max({6.0, 288.0 * p.sig_bar * p.sig_bar * spec.K / (p.mu * p.mu),
                3456.0 * p.sig_bar * p.sig_bar * p.lam * p.lam * spec.K /
                    (p.mu * p.mu * (1.0 - p.lam)),
                12.0 * p.lam * p.L * std::sqrt(10.0) / (p.mu * (1.0 - p.lam))});
  if (p.t0 < floor * (1.0 - 1e-12))
    throw std::invalid_argument("mc_check_lemma4: t0 below the documented floor");
  if (spec.nu > 1.0 ||
      (p.sig_sq > 0.0 &&
       spec.nu > p.mu * p.mu / (144.0 * p.sig_sq * spec.K) * (1.0 + 1e-12)))
    throw std::invalid_argument("mc_check_lemma4: nu too large");
  if (!base.init.equal_across_users()) {
    const Eigen::MatrixXd x0 =
        initial_matrix(base.init, base.obj->d, base.obj->n);
    for (int i = 1; i < base.obj->n; ++i)
      if ((x0.col(i) - x0.col(0)).norm() != 0.0)
        throw std::invalid_argument("mc_check_lemma4: equal init required");
  }

  const double lam = p.lam, lam2 = lam * lam;
  const Schedule sched = base.schedule;
  const double s_const = p.n * p.sig_sq +
                         5.0 * p.grad_star_sq / (1.0 - lam);
  const double d_lead = 5.0 * lam2 * p.L * p.L / (1.0 - lam);
  const double d_mid = 9.0 * p.grad_star_sq / (p.mu * p.mu);

  // sum_{k in [t]} lam^{t-k} (S_k + D_k), extended incrementally in t
  std::vector<double> wsum(static_cast<std::size_t>(spec.t_max) + 1, 0.0);
  double w = 0.0;
  for (long k = 1; k <= spec.t_max; ++k) {
    const double ak = sched.at(k);
    const double sk = ak * ak * lam2 * s_const;
    const double dk =
        d_lead * ak * ak *
        (4.0 * p.a * p.n * p.sig_sq * ak / 5.0 + d_mid +
         std::pow((1.0 + p.t0) / (static_cast<double>(k) + p.t0), 6.0) *
             p.x1_dist_sq);
    w = lam * w + sk + dk;
    wsum[static_cast<std::size_t>(k)] = w;
  }

  const double nu = spec.nu, K = spec.K, t0 = p.t0, n = p.n;
  return mc_compare(
      base, spec, "lemma4_mc", /*need_trajectory=*/false,
      [nu, K, t0, n](const RunRecord& rec, long t) {
        const double kt1 = (static_cast<double>(t) + t0 + 2.0) * K;
        return nu * kt1 * n * rec.consensus_gap[static_cast<std::size_t>(t)];
      },
      [nu, K, t0, &wsum](long t) {
        const double kt1 = (static_cast<double>(t) + t0 + 2.0) * K;
        return nu * kt1 * wsum[static_cast<std::size_t>(t)];
      });
}

CheckReport mc_check_lemma7(const RunSpec& base, const MgfCheckSpec& spec) {
  const MgfPremises p = common_mgf_premises(base, "mc_check_lemma7");
  if (p.a * p.mu <= 1.0)
    throw std::invalid_argument("mc_check_lemma7: requires a mu > 1");
  if (spec.nu <= 0.0 || spec.nu > 1.0 ||
      (p.sig_bar > 0.0 &&
       spec.nu >
           p.mu / (24.0 * p.a * p.sig_bar * p.sig_bar * spec.K) * (1.0 + 1e-12)))
    throw std::invalid_argument("mc_check_lemma7: nu too large");
  for (long t = 1; t <= spec.t_max + 1; ++t) {
    const double cap_noise =
        p.sig_bar > 0.0
            ? 1.0 / (p.sig_bar *
                     std::sqrt(2.0 * (static_cast<double>(t) + p.t0 + 2.0) *
                               spec.K))
            : std::numeric_limits<double>::infinity();
    if (base.schedule.at(t) >
        std::min(cap_noise, 1.0 / p.mu) * (1.0 + 1e-12))
      throw std::invalid_argument(
          "mc_check_lemma7: step-size violates its cap");
  }

  const Objective& obj = *base.obj;
  const Eigen::VectorXd xstar = *obj.x_star;
  const double nu = spec.nu, K = spec.K, t0 = p.t0, a = p.a, mu = p.mu;
  const double amu = a * mu;
  const double lead = 4.0 * a * p.n * p.sig_sq / (amu - 1.0);
  const double mid = 9.0 * p.grad_star_sq / (mu * mu);
  const double x1d = p.x1_dist_sq;
  const Schedule sched = base.schedule;
  return mc_compare(
      base, spec, "lemma7_mc", /*need_trajectory=*/true,
      [nu, K, t0, &xstar](const RunRecord& rec, long t) {
        const double kt1 = (static_cast<double>(t) + t0 + 2.0) * K;
        const double dist =
            (rec.X_hist[static_cast<std::size_t>(t)].colwise() - xstar)
                .squaredNorm();
        return nu * kt1 * dist;
      },
      [nu, K, t0, amu, lead, mid, x1d, &sched](long t) {
        const double kt1 = (static_cast<double>(t) + t0 + 2.0) * K;
        const double u = static_cast<double>(t) + 1.0 + t0;
        return nu * kt1 *
               (lead * sched.at(t + 1) + mid +
                std::pow((1.0 + t0) / u, amu) * x1d);
      });
}

std::vector<CheckReport> lemma1_lemma3_suite(std::uint64_t seed) {
  CheckReport l1;
  l1.name = "lemma1";
  l1.tolerance = 1e-9;
  CheckReport l3;
  l3.name = "lemma3";
  l3.tolerance = 1e-8;

  const long T = 200;

  // strongly convex half: harmonic schedule kept under 1/(2L) via t0
  {
    Graph gr = build_graph("ring", 8);
    MixingMatrix mix = metropolis_weights(gr);
    Objective obj = make_quadratic(8, 5, 1.0, 10.0, 1.0, derive_seed(seed, {1}));
    NoiseModel noise =
        make_noise(NoiseModel::Kind::gaussian_calibrated, 8, 5, 1.0);
    Schedule sched;
    sched.kind = Schedule::Kind::harmonic;
    sched.a = 6.0;
    sched.t0 = 120.0;  // alpha_1 = 6/121 <= 1/(2L) = 0.05
    RunSpec rs;
    rs.mix = &mix;
    rs.obj = &obj;
    rs.noise = &noise;
    rs.schedule = sched;
    rs.T = T;
    rs.master_seed = derive_seed(seed, {2});
    rs.record_trajectory = true;
    for (int r = 0; r < 50; ++r) {
      rs.run_index = static_cast<std::uint64_t>(r);
      RunRecord rec = run(rs);
      merge_into(l1, check_lemma1(rec, obj));
    }
  }

  // nonconvex half: Theorem-1 constant step (also under 1/(2L)); these runs
  // carry heterogeneity constants, so the consensus bound applies too
  {
    Graph gr = build_graph("ring", 8);
    MixingMatrix mix = metropolis_weights(gr);
    Objective obj = make_nonconvex(8, 5, 0.5, derive_seed(seed, {3}));
    NoiseModel noise =
        make_noise(NoiseModel::Kind::gaussian_calibrated, 8, 5, 1.0);
    Theorem1Stepsize t1 = theorem1_constant_stepsize(
        obj.L, 8, 5, T, noise.sigma_sq_avg(), noise.sigma_bar(), mix.lambda,
        obj.B_het);
    RunSpec rs;
    rs.mix = &mix;
    rs.obj = &obj;
    rs.noise = &noise;
    rs.schedule = t1.schedule();
    rs.T = T;
    rs.master_seed = derive_seed(seed, {4});
    rs.record_trajectory = true;
    for (int r = 0; r < 50; ++r) {
      rs.run_index = static_cast<std::uint64_t>(r);
      RunRecord rec = run(rs);
      merge_into(l1, check_lemma1(rec, obj));
      merge_into(l3, check_lemma3(rec, obj, mix));
    }
  }
  return {l1, l3};
}

CheckReport lemma6_grid_suite(long t_max) {
  CheckReport rep;
  rep.name = "lemma6";
  rep.tolerance = 1e-12;
  for (double lambda : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9})
    for (double c : {0.5, 1.0})
      for (double a : {0.5, 6.0}) {
        const double t0 = (2.0 * c - 1.0 + lambda) / (1.0 - lambda);
        merge_into(rep, check_lemma6(lambda, a, t0, c, t_max));
      }
  return rep;
}

CheckReport prop_ran_grid_suite(long b_hi) {
  CheckReport rep;
  rep.name = "prop_ran";
  rep.tolerance = 1e-12;
  for (double c : {0.5, 1.0, 2.0, 6.0})
    for (double t0 : {6.0, 100.0})
      for (long a : {0L, 1L, 5L, 100L})
        merge_into(rep, check_prop_ran(c, t0, a, b_hi));
  return rep;
}

CheckReport lemma5_suite(long t_max) {
  CheckReport rep;
  rep.name = "lemma5";
  rep.tolerance = 1e-9;
  // the schedule pattern the strongly convex analysis produces: first three
  // orders plus one high-order coefficient
  merge_into(rep, check_lemma5_synthetic(
                      2.0, 6.0, {0.3, 0.7, 0.2, 0.0, 0.0, 0.0, 0.0, 0.4}, 1.5,
                      t_max));
  merge_into(rep, check_lemma5_synthetic(2.0, 6.0, {0.8}, 2.0, t_max));
  merge_into(rep, check_lemma5_synthetic(1.5, 6.0, {}, 1.0, t_max));
  return rep;
}

CheckReport strcvx_props_suite(std::uint64_t seed) {
  Objective obj = make_quadratic(4, 3, 1.0, 10.0, 1.0, derive_seed(seed, {5}));
  return check_strcvx_props(obj, 1000, derive_seed(seed, {6}));
}

CheckReport mixing_suite() {
  CheckReport rep;
  rep.name = "mixing";
  rep.tolerance = 1e-10;
  const char* kinds[] = {"ring", "complete", "star", "torus2d",
                         "erdos_renyi"};
  for (const char* kind : kinds)
    for (int n : {4, 9, 16}) {
      Graph gr = build_graph(kind, n, 0.5, 7151u + static_cast<unsigned>(n));
      MixingMatrix mix = metropolis_weights(gr);
      MixingCheckReport mc = check_mixing_properties(mix);
      const double residual =
          std::max({mc.row_residual, mc.col_residual, mc.wj_residual,
                    mc.jw_residual, mc.norm_gap_residual,
                    mc.min_entry < 0.0 ? -mc.min_entry : 0.0});
      std::ostringstream what;
      what << kind << " n=" << n;
      record_case(rep, mc.lambda_lt_one ? -residual : -1.0, what.str());
    }
  return rep;
}

std::vector<CheckReport> mgf_mc_suite(std::uint64_t seed, long samples) {
  Graph gr = build_graph("ring", 4);
  MixingMatrix mix = metropolis_weights(gr);
  Objective obj = make_quadratic(4, 2, 1.0, 2.0, 1.0, derive_seed(seed, {7}));
  NoiseModel noise =
      make_noise(NoiseModel::Kind::gaussian_calibrated, 4, 2, 0.5);
  Schedule sched;
  sched.kind = Schedule::Kind::harmonic;
  sched.a = 6.0;
  sched.t0 = 40.0;
  RunSpec rs;
  rs.mix = &mix;
  rs.obj = &obj;
  rs.noise = &noise;
  rs.schedule = sched;
  rs.init.kind = InitSpec::Kind::constant;
  rs.init.value = 2.0;
  rs.master_seed = derive_seed(seed, {8});

  MgfCheckSpec spec;
  spec.K = 1e-3;
  spec.nu = 1.0;
  spec.t_max = 10;
  spec.samples = samples;
  return {mc_check_lemma4(rs, spec), mc_check_lemma7(rs, spec)};
}

std::vector<CheckReport> run_all_checks(std::uint64_t seed, long mc_samples) {
  std::vector<CheckReport> out = lemma1_lemma3_suite(seed);
  out.push_back(lemma5_suite());
  out.push_back(lemma6_grid_suite());
  out.push_back(prop_ran_grid_suite());
  out.push_back(strcvx_props_suite(seed));
  out.push_back(mixing_suite());
  for (auto& r : mgf_mc_suite(seed, mc_samples)) out.push_back(std::move(r));
  return out;
}

}  // namespace dsgdlab
