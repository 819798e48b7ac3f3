#include "dsgdlab/noise.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dsgdlab {

namespace {

// Welford accumulator for mean and standard error.
struct MeanVar {
  double mean = 0.0, m2 = 0.0;
  std::size_t count = 0;
  void add(double x) {
    ++count;
    double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }
  MgfEstimate estimate() const {
    MgfEstimate e;
    e.mean = mean;
    e.samples = count;
    if (count > 1)
      e.se = std::sqrt(m2 / (static_cast<double>(count) - 1.0) /
                       static_cast<double>(count));
    return e;
  }
};

void require_user(const NoiseModel& m, int user) {
  if (user < 0 || user >= m.n)
    throw std::invalid_argument("noise: user index out of range");
}

}  // namespace

double NoiseModel::sigma_sq_avg() const {
  if (n == 0) return 0.0;
  double s = 0.0;
  for (double v : sigma) s += v * v;
  return s / n;
}

double NoiseModel::sigma_bar() const {
  double m = 0.0;
  for (double v : sigma) m = std::max(m, v);
  return m;
}

double NoiseModel::coord_std(int user) const {
  require_user(*this, user);
  if (kind != Kind::gaussian_calibrated) return 0.0;
  // s^2 = sigma^2 (1 - e^{-2/d}) / 2 solves (1 - 2 s^2/sigma^2)^{-d/2} = e
  return sigma[user] * std::sqrt(0.5 * (1.0 - std::exp(-2.0 / d)));
}

NoiseModel make_noise(NoiseModel::Kind kind, int n, int d, double sigma) {
  return make_noise(kind, n, d, std::vector<double>(n, sigma));
}

NoiseModel make_noise(NoiseModel::Kind kind, int n, int d,
                      std::vector<double> sigmas) {
  if (n < 1 || d < 1) throw std::invalid_argument("make_noise: n, d >= 1");
  if (static_cast<int>(sigmas.size()) != n)
    throw std::invalid_argument("make_noise: need one sigma per user");
  for (double s : sigmas)
    if (s < 0.0) throw std::invalid_argument("make_noise: sigma >= 0");
  NoiseModel m;
  m.kind = kind;
  m.n = n;
  m.d = d;
  m.sigma = std::move(sigmas);
  if (m.kind == NoiseModel::Kind::zero)
    m.sigma.assign(n, 0.0);
  return m;
}

NoiseModel::Kind noise_kind_from_string(const std::string& s) {
  if (s == "zero") return NoiseModel::Kind::zero;
  if (s == "gaussian_calibrated") return NoiseModel::Kind::gaussian_calibrated;
  if (s == "sphere_bounded") return NoiseModel::Kind::sphere_bounded;
  throw std::invalid_argument("unknown noise kind '" + s + "'");
}

void sample_noise(const NoiseModel& model, int user, std::mt19937_64& rng,
                  Eigen::Ref<Eigen::VectorXd> out) {
  require_user(model, user);
  if (out.size() != model.d)
    throw std::invalid_argument("sample_noise: out has wrong size");
  const double sig = model.sigma[user];
  if (model.kind == NoiseModel::Kind::zero || sig == 0.0) {
    out.setZero();
    return;
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  switch (model.kind) {
    case NoiseModel::Kind::gaussian_calibrated: {
      const double s = model.coord_std(user);
      for (int j = 0; j < model.d; ++j) out(j) = s * gauss(rng);
      return;
    }
    case NoiseModel::Kind::sphere_bounded: {
      double norm = 0.0;
      do {
        for (int j = 0; j < model.d; ++j) out(j) = gauss(rng);
        norm = out.norm();
      } while (norm == 0.0);
      out *= sig / norm;
      return;
    }
    case NoiseModel::Kind::zero:
      return;  // unreachable
  }
}

MgfEstimate estimate_mgf_norm(const NoiseModel& model, int user,
                              std::size_t samples, std::mt19937_64& rng) {
  require_user(model, user);
  if (samples == 0) throw std::invalid_argument("estimate_mgf_norm: samples >= 1");
  const double sig = model.sigma[user];
  MeanVar acc;
  Eigen::VectorXd z(model.d);
  for (std::size_t s = 0; s < samples; ++s) {
    sample_noise(model, user, rng, z);
    acc.add(sig == 0.0 ? 1.0 : std::exp(z.squaredNorm() / (sig * sig)));
  }
  return acc.estimate();
}

InnerMgfResult estimate_mgf_inner(const NoiseModel& model,
                                  const Eigen::VectorXd& v,
                                  std::size_t samples, std::mt19937_64& rng) {
  if (v.size() != model.d)
    throw std::invalid_argument("estimate_mgf_inner: v has wrong dimension");
  if (samples == 0)
    throw std::invalid_argument("estimate_mgf_inner: samples >= 1");
  std::vector<MeanVar> per_user(model.n);
  MeanVar avg;
  Eigen::VectorXd z(model.d), zbar(model.d);
  for (std::size_t s = 0; s < samples; ++s) {
    zbar.setZero();
    for (int i = 0; i < model.n; ++i) {
      sample_noise(model, i, rng, z);
      per_user[i].add(std::exp(v.dot(z)));
      zbar += z;
    }
    zbar /= model.n;
    avg.add(std::exp(v.dot(zbar)));
  }
  InnerMgfResult res;
  res.per_user.reserve(model.n);
  for (const auto& acc : per_user) res.per_user.push_back(acc.estimate());
  res.averaged = avg.estimate();
  return res;
}

MgfEstimate estimate_mgf_avg_norm(const NoiseModel& model, std::size_t samples,
                                  std::mt19937_64& rng) {
  if (samples == 0)
    throw std::invalid_argument("estimate_mgf_avg_norm: samples >= 1");
  const double sig_sq = model.sigma_sq_avg();
  MeanVar acc;
  Eigen::VectorXd z(model.d), zbar(model.d);
  const double scale =
      sig_sq == 0.0 ? 0.0
                    : static_cast<double>(model.n) / (120.0 * model.d * sig_sq);
  for (std::size_t s = 0; s < samples; ++s) {
    zbar.setZero();
    for (int i = 0; i < model.n; ++i) {
      sample_noise(model, i, rng, z);
      zbar += z;
    }
    zbar /= model.n;
    acc.add(std::exp(scale * zbar.squaredNorm()));
  }
  return acc.estimate();
}

}  // namespace dsgdlab
