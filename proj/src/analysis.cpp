#include "dsgdlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dsgdlab {

SummaryStats summarize(const std::vector<double>& xs) {
  if (xs.empty()) throw std::invalid_argument("summarize: empty sample");
  SummaryStats s;
  s.count = xs.size();
  s.min = xs.front();
  s.max = xs.front();
  double mean = 0.0, m2 = 0.0;  // Welford
  std::size_t k = 0;
  for (double x : xs) {
    ++k;
    const double d1 = x - mean;
    mean += d1 / static_cast<double>(k);
    m2 += d1 * (x - mean);
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  s.mean = mean;
  s.stddev = xs.size() > 1
                 ? std::sqrt(m2 / static_cast<double>(xs.size() - 1))
                 : 0.0;
  return s;
}

SortedSamples::SortedSamples(std::vector<double> xs) : xs_(std::move(xs)) {
  if (xs_.empty()) throw std::invalid_argument("SortedSamples: empty sample");
  std::sort(xs_.begin(), xs_.end());
}

std::size_t SortedSamples::rank_for(double delta) const {
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::invalid_argument("quantile: delta must lie in (0, 1)");
  const double r = static_cast<double>(xs_.size());
  auto rank = static_cast<long>(std::ceil((1.0 - delta) * r));
  rank = std::clamp<long>(rank, 1, static_cast<long>(xs_.size()));
  return static_cast<std::size_t>(rank);
}

double SortedSamples::quantile(double delta) const {
  return xs_[rank_for(delta) - 1];
}

QuantilePoint SortedSamples::quantile_point(double delta) const {
  QuantilePoint p;
  p.delta = delta;
  p.rank = rank_for(delta);
  p.q = xs_[p.rank - 1];
  const double r = static_cast<double>(xs_.size());
  const auto half =
      static_cast<long>(std::llround(std::sqrt(r * delta * (1.0 - delta))));
  const long lo = std::clamp<long>(static_cast<long>(p.rank) - half, 1,
                                   static_cast<long>(xs_.size()));
  const long hi = std::clamp<long>(static_cast<long>(p.rank) + half, 1,
                                   static_cast<long>(xs_.size()));
  p.q_lo = xs_[static_cast<std::size_t>(lo) - 1];
  p.q_hi = xs_[static_cast<std::size_t>(hi) - 1];
  return p;
}

std::vector<QuantilePoint> SortedSamples::tail_curve(
    const std::vector<double>& deltas) const {
  std::vector<QuantilePoint> curve;
  curve.reserve(deltas.size());
  for (double d : deltas) curve.push_back(quantile_point(d));
  return curve;
}

TailProbability SortedSamples::exceedance(double threshold) const {
  TailProbability t;
  t.count = xs_.size();
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), threshold);
  const auto above = static_cast<double>(std::distance(it, xs_.end()));
  const double r = static_cast<double>(xs_.size());
  t.p_hat = above / r;
  t.se = std::sqrt(t.p_hat * (1.0 - t.p_hat) / r);
  return t;
}

LinearFit least_squares(const std::vector<double>& x,
                        const std::vector<double>& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("least_squares: size mismatch");
  if (x.size() < 2)
    throw std::invalid_argument("least_squares: need at least two points");
  const auto m = static_cast<double>(x.size());
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= m;
  ym /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
    syy += (y[i] - ym) * (y[i] - ym);
  }
  if (sxx <= 0.0)
    throw std::invalid_argument("least_squares: x values are constant");
  LinearFit f;
  f.points = x.size();
  f.slope = sxy / sxx;
  f.intercept = ym - f.slope * xm;
  if (syy > 0.0) {
    double ssres = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - (f.intercept + f.slope * x[i]);
      ssres += e * e;
    }
    f.r2 = 1.0 - ssres / syy;
  } else {
    f.r2 = 0.0;  // constant y: nothing to explain
  }
  return f;
}

std::vector<TailPoint> tail_curve_probs(const SortedSamples& samples,
                                        const std::vector<double>& epsilons) {
  for (std::size_t i = 1; i < epsilons.size(); ++i)
    if (epsilons[i] < epsilons[i - 1])
      throw std::invalid_argument("tail_curve: epsilons must be ascending");
  std::vector<TailPoint> out;
  out.reserve(epsilons.size());
  for (double e : epsilons) {
    const TailProbability p = samples.exceedance(e);
    out.push_back({e, p.p_hat, p.se});
  }
  return out;
}

LinearFit fit_log_inverse_delta(const std::vector<QuantilePoint>& curve) {
  std::vector<double> x, y;
  x.reserve(curve.size());
  y.reserve(curve.size());
  for (const auto& p : curve) {
    x.push_back(std::log(1.0 / p.delta));
    y.push_back(p.q);
  }
  std::vector<double> distinct = x;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());
  if (distinct.size() < 4)
    throw std::invalid_argument(
        "fit_log_inverse_delta: need at least 4 distinct deltas");
  return least_squares(x, y);
}

LinearFit fit_rate(const std::vector<double>& xs,
                   const std::vector<double>& ys) {
  if (xs.size() != ys.size())
    throw std::invalid_argument("fit_rate: size mismatch");
  if (xs.size() < 3)
    throw std::invalid_argument("fit_rate: need at least 3 scales");
  std::vector<double> lx, ly;
  lx.reserve(xs.size());
  ly.reserve(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
      throw std::invalid_argument("fit_rate: inputs must be positive");
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  return least_squares(lx, ly);
}

}  // namespace dsgdlab
