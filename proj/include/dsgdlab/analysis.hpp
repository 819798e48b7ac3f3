#ifndef DSGDLAB_ANALYSIS_HPP
#define DSGDLAB_ANALYSIS_HPP

#include <cstddef>
#include <vector>

namespace dsgdlab {

struct SummaryStats {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample (n-1) standard deviation
  double min = 0.0;
  double max = 0.0;
};

SummaryStats summarize(const std::vector<double>& xs);

// One point of a confidence/quantile curve. q is the empirical (1-delta)
// quantile; [q_lo, q_hi] is the order-statistic bracket obtained by shifting
// the rank by round(sqrt(R delta (1-delta))) positions either way.
struct QuantilePoint {
  double delta = 0.0;
  double q = 0.0;
  double q_lo = 0.0;
  double q_hi = 0.0;
  std::size_t rank = 0;  // 1-based rank actually used
};

// Empirical exceedance probability with its binomial standard error.
struct TailProbability {
  double p_hat = 0.0;
  double se = 0.0;
  std::size_t count = 0;
};

// Sorted ensemble sample. The empirical (1-delta) quantile is the order
// statistic of 1-based rank ceil((1-delta) R), clamped to [1, R].
class SortedSamples {
 public:
  explicit SortedSamples(std::vector<double> xs);

  std::size_t size() const { return xs_.size(); }
  const std::vector<double>& values() const { return xs_; }

  double quantile(double delta) const;
  QuantilePoint quantile_point(double delta) const;
  std::vector<QuantilePoint> tail_curve(const std::vector<double>& deltas) const;

  // fraction of samples strictly above the threshold
  TailProbability exceedance(double threshold) const;

 private:
  std::size_t rank_for(double delta) const;
  std::vector<double> xs_;
};

// One point of the exceedance curve P(X > epsilon).
struct TailPoint {
  double epsilon = 0.0;
  double p_hat = 0.0;
  double se = 0.0;
};

// Exceedance probabilities over an ascending threshold grid.
std::vector<TailPoint> tail_curve_probs(const SortedSamples& samples,
                                        const std::vector<double>& epsilons);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

// Ordinary least squares of y against x. Needs >= 2 points and non-constant
// x. Constant y is degenerate: slope 0 and r2 = 0 (no variance explained).
LinearFit least_squares(const std::vector<double>& x,
                        const std::vector<double>& y);

// Fit of the quantile curve against log(1/delta); a roughly linear curve is
// the signature of sub-Gaussian (exponential, not polynomial) tails. Needs
// at least 4 distinct deltas.
LinearFit fit_log_inverse_delta(const std::vector<QuantilePoint>& curve);

// Log-log rate fit: metric ~ c * x^slope. Needs at least 3 scales; rejects
// non-positive inputs.
LinearFit fit_rate(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace dsgdlab

#endif  // DSGDLAB_ANALYSIS_HPP
