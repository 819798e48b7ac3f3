#ifndef DSGDLAB_VALIDATION_HPP
#define DSGDLAB_VALIDATION_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dsgdlab/engine.hpp"
#include "dsgdlab/objectives.hpp"
#include "dsgdlab/topology.hpp"

namespace dsgdlab {

// Outcome of one executable inequality check. A case "violates" when
// bound - value < -tolerance; worst_margin is the minimum of bound - value
// over all cases, so violations == 0 iff worst_margin >= -tolerance.
struct CheckReport {
  std::string name;
  long cases_checked = 0;
  long violations = 0;
  long cases_skipped = 0;  // outside the regime the claim covers
  double worst_margin = std::numeric_limits<double>::infinity();
  double tolerance = 0.0;
  std::string first_violation;  // description of the first violating case
  std::string note;             // skip reasons, caps hit, etc.
  bool ok() const { return violations == 0; }
};

// Per-step descent inequality along a recorded trajectory:
//   f(xbar^{t+1}) <= f(xbar^t) - (a_t/2)||grad f(xbar^t)||^2
//                    - a_t <grad f(xbar^t), zbar^t> + a_t^2 L ||zbar^t||^2
//                    + (a_t L^2 / 2n) sum_i ||x_i^t - xbar^t||^2
// Needs record_trajectory and alpha_t <= 1/(2L) throughout.
CheckReport check_lemma1(const RunRecord& rec, const Objective& obj,
                         double tol = 1e-9);

// Consensus-gap bound along a recorded trajectory (needs the objective's
// heterogeneity constants and per-user noise):
//   (1/n) sum_i ||x_i^{t+1} - xbar^{t+1}||^2
//     <= 2 lam^{2t} Dx + (4 lam^2 / (n(1-lam))) sum_k a_k^2 lam^{t-k} sum_i ||z_i^k||^2
//      + (4 lam^2 A^2 / (1-lam)) sum_k a_k^2 lam^{t-k}
//      + (4 lam^2 B^2 / (n(1-lam))) sum_k a_k^2 lam^{t-k} sum_i ||grad f(x_i^k)||^2
CheckReport check_lemma3(const RunRecord& rec, const Objective& obj,
                         const MixingMatrix& mix, double tol = 1e-8);

// Geometric-weighted step-size sums: for alpha_t = a/(t+t0)^c with c >= 1/2
// and t0 >= (2c-1+lambda)/(1-lambda),
//   sum_{k in [t]} alpha_k lambda^{t-k} <= 3 alpha_t / (1-lambda).
CheckReport check_lemma6(double lambda, double a, double t0, double c,
                         long t_max);

// Product bound prod_{k=a}^{b} (1 - c/(k+t0)) <= (a+t0)^c / (b+1+t0)^c,
// checked for every b in [a_lo, b_hi]; cases with a non-positive factor are
// outside the regime and get skipped (and counted).
CheckReport check_prop_ran(double c, double t0, long a_lo, long b_hi);

// Almost-decreasing recursion bound, run on the deterministic process that
// meets the premise with equality:
//   X^{t+1} = (1 - a/(t+t0)) X^t + sum_i C_i/(t+t0)^i
// against
//   X^{t+1} <= (t0+1)^a X1/(t+1+t0)^a + 2^a C1/a + 2^a C2/((a-1)(t+1+t0))
//            + 2^a C3 log(t+1+t0)/(t+1+t0)^a
//            + sum_{j>=4} 2^a t0^{3-j} C_j/((j-3)(t+1+t0)^a).
// Requires a in (1,2], t0 >= a, X1 > 0.
CheckReport check_lemma5_synthetic(double a, double t0,
                                   const std::vector<double>& coeffs,
                                   double x1, long t_max);

// Strong-convexity consequences at random points:
//   ||grad f(x)||^2 >= 2 mu (f(x) - f*)   and   f(x) - f* >= (mu/2)||x - x*||^2
CheckReport check_strcvx_props(const Objective& obj, int trials,
                               std::uint64_t seed, double tol = 1e-9);

// Monte-Carlo budget and the (nu, K) pair entering K_{t+1} = (t+t0+2)K.
struct MgfCheckSpec {
  double nu = 1.0;
  double K = 1.0;
  long t_max = 10;
  long samples = 10000;
  // stop extending t once the estimator's relative standard error passes this
  double rel_se_cap = 0.10;
};

// MGF of the consensus gap under the harmonic schedule (a = 6/mu, equal
// init, t0 over the documented floor, nu <= min{1, mu^2/(144 sigma^2 K)}):
// one-sided Monte-Carlo test of
//   E[exp(nu K_{t+1} sum_i ||x_i^{t+1}-xbar^{t+1}||^2)]
//     <= exp(nu K_{t+1} sum_k lam^{t-k} (S_k + D_k)) + 3 SE
// with S_k, D_k evaluated exactly from the instance constants.
CheckReport mc_check_lemma4(const RunSpec& base, const MgfCheckSpec& spec);

// MGF of the stacked distance to the optimum: one-sided Monte-Carlo test of
//   E[exp(nu K_{t+1} ||x^{t+1}-x*||^2)]
//     <= exp(nu K_{t+1} (4 a n sig^2 alpha_{t+1}/(a mu - 1)
//            + 9 ||grad f*||^2/mu^2
//            + (1+t0)^{a mu} ||x^1-x*||^2/(t+1+t0)^{a mu})) + 3 SE
// under alpha_t <= min{1/(sigbar sqrt(2(t+t0+2)K)), 1/mu} and
// nu <= min{1, mu/(24 a sigbar^2 K)}.
CheckReport mc_check_lemma7(const RunSpec& base, const MgfCheckSpec& spec);

// Canned suites backing the validate subcommand and the acceptance gate.
// Names: "lemma1", "lemma3", "lemma5", "lemma6", "prop_ran", "strcvx_props",
// "mixing", "lemma4_mc", "lemma7_mc".
std::vector<CheckReport> lemma1_lemma3_suite(std::uint64_t seed);
CheckReport lemma6_grid_suite(long t_max = 10000);
CheckReport prop_ran_grid_suite(long b_hi = 10000);
CheckReport lemma5_suite(long t_max = 10000);
CheckReport strcvx_props_suite(std::uint64_t seed);
CheckReport mixing_suite();
std::vector<CheckReport> mgf_mc_suite(std::uint64_t seed, long samples = 10000);

// Everything above in one list (the validate subcommand's payload).
std::vector<CheckReport> run_all_checks(std::uint64_t seed, long mc_samples = 10000);

}  // namespace dsgdlab

#endif  // DSGDLAB_VALIDATION_HPP
