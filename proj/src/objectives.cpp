#include "dsgdlab/objectives.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "dsgdlab/rng.hpp"

namespace dsgdlab {

namespace {

void require_dim(const Objective& obj, Eigen::Index size) {
  if (size != obj.d)
    throw std::invalid_argument("objective: dimension mismatch");
}

// out parameters bind caller storage (often matrix columns); they are never
// resized here, so reject wrong sizes instead of silently writing past them
void require_out(const Objective& obj, Eigen::Index size) {
  if (size != obj.d)
    throw std::invalid_argument("objective: output buffer must be sized d");
}

void require_user(const Objective& obj, int i) {
  if (i < 0 || i >= obj.n)
    throw std::invalid_argument("objective: user index out of range");
}

// scalar pieces of the nonconvex base term g(u) = u^2/(1+u^2)
inline double ridge(double u) { return u * u / (1.0 + u * u); }
inline double ridge_d1(double u) {
  double s = 1.0 + u * u;
  return 2.0 * u / (s * s);
}

void finalize_quadratic(Objective& obj) {
  const int n = obj.n, d = obj.d;
  obj.Ab.resize(n);
  obj.Hbar = Eigen::MatrixXd::Zero(d, d);
  obj.cbar = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < n; ++i) {
    obj.Ab[i] = obj.A[i] * obj.b[i];
    obj.Hbar += obj.A[i];
    obj.cbar += obj.Ab[i];
  }
  obj.Hbar /= n;
  obj.cbar /= n;
  // (sum A_i) x* = sum A_i b_i; Hbar is SPD so LDLT is safe
  Eigen::VectorXd xs = obj.Hbar.ldlt().solve(obj.cbar);
  obj.x_star = xs;
  obj.f_star = obj.value_global(xs);
  double gsq = 0.0;
  Eigen::VectorXd g(d);
  for (int i = 0; i < n; ++i) {
    obj.grad(i, xs, g);
    gsq += g.squaredNorm();
  }
  obj.grad_sq_at_opt = gsq;
}

}  // namespace

double Objective::value(int i, Eigen::Ref<const Eigen::VectorXd> x) const {
  require_user(*this, i);
  require_dim(*this, x.size());
  if (family == Family::quadratic) {
    Eigen::VectorXd r = x - b[i];
    return 0.5 * r.dot(A[i] * r);
  }
  double v = 0.0;
  for (int j = 0; j < d; ++j) v += ridge(x(j));
  return v + h[i].dot(x);
}

void Objective::grad(int i, Eigen::Ref<const Eigen::VectorXd> x,
                     Eigen::Ref<Eigen::VectorXd> out) const {
  require_user(*this, i);
  require_dim(*this, x.size());
  require_out(*this, out.size());
  if (family == Family::quadratic) {
    out.noalias() = A[i] * x;
    out -= Ab[i];
    return;
  }
  for (int j = 0; j < d; ++j) out(j) = ridge_d1(x(j));
  out += h[i];
}

double Objective::value_global(Eigen::Ref<const Eigen::VectorXd> x) const {
  require_dim(*this, x.size());
  double v = 0.0;
  for (int i = 0; i < n; ++i) v += value(i, x);
  return v / n;
}

void Objective::grad_global(Eigen::Ref<const Eigen::VectorXd> x,
                            Eigen::Ref<Eigen::VectorXd> out) const {
  require_dim(*this, x.size());
  require_out(*this, out.size());
  if (family == Family::quadratic) {
    out.noalias() = Hbar * x;
    out -= cbar;
    return;
  }
  // tilts cancel: sum_i h_i = 0
  for (int j = 0; j < d; ++j) out(j) = ridge_d1(x(j));
}

Eigen::VectorXd Objective::grad_global(Eigen::Ref<const Eigen::VectorXd> x) const {
  Eigen::VectorXd g(d);
  grad_global(x, g);
  return g;
}

Eigen::VectorXd Objective::grad_global_by_average(Eigen::Ref<const Eigen::VectorXd> x) const {
  require_dim(*this, x.size());
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd g(d);
  for (int i = 0; i < n; ++i) {
    grad(i, x, g);
    acc += g;
  }
  return acc / n;
}

Objective make_quadratic(int n, int d, double mu, double L,
                         double center_spread, std::uint64_t seed) {
  if (n < 1 || d < 1) throw std::invalid_argument("make_quadratic: n, d >= 1");
  if (!(mu > 0.0) || !(L >= mu))
    throw std::invalid_argument("make_quadratic: need 0 < mu <= L");
  if (center_spread < 0.0)
    throw std::invalid_argument("make_quadratic: center_spread >= 0");

  std::mt19937_64 rng = make_engine(seed, {0x6f626a71ULL});  // instance stream
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  QuadraticSpec spec;
  spec.mu = mu;
  spec.L = L;
  spec.A.resize(n);
  spec.b.resize(n);

  Eigen::VectorXd c0(d);
  for (int j = 0; j < d; ++j) c0(j) = gauss(rng);

  const double lmu = std::log(mu), lL = std::log(L);
  for (int i = 0; i < n; ++i) {
    // random orthogonal basis from QR of a Gaussian matrix
    Eigen::MatrixXd G(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) G(r, c) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd Q = qr.householderQ();

    Eigen::VectorXd eig(d);
    if (d == 1) {
      eig(0) = std::exp(lmu + (lL - lmu) * unif(rng));
    } else {
      eig(0) = mu;
      eig(d - 1) = L;
      for (int j = 1; j < d - 1; ++j)
        eig(j) = std::exp(lmu + (lL - lmu) * unif(rng));
    }
    spec.A[i] = Q * eig.asDiagonal() * Q.transpose();
    // exact symmetry guards downstream eigensolvers against fp drift
    spec.A[i] = 0.5 * (spec.A[i] + spec.A[i].transpose()).eval();

    spec.b[i] = c0;
    for (int j = 0; j < d; ++j) spec.b[i](j) += center_spread * gauss(rng);
  }
  return make_quadratic(spec);
}

Objective make_quadratic(const QuadraticSpec& spec) {
  const int n = static_cast<int>(spec.A.size());
  if (n < 1 || spec.b.size() != spec.A.size())
    throw std::invalid_argument("make_quadratic: spec needs matching A, b");
  const int d = static_cast<int>(spec.A[0].rows());
  for (int i = 0; i < n; ++i) {
    if (spec.A[i].rows() != d || spec.A[i].cols() != d ||
        spec.b[i].size() != d)
      throw std::invalid_argument("make_quadratic: inconsistent dimensions");
  }
  if (!(spec.mu > 0.0) || !(spec.L >= spec.mu))
    throw std::invalid_argument("make_quadratic: need 0 < mu <= L");

  Objective obj;
  obj.family = Objective::Family::quadratic;
  obj.n = n;
  obj.d = d;
  obj.A = spec.A;
  obj.b = spec.b;
  obj.L = spec.L;
  obj.mu = spec.mu;
  finalize_quadratic(obj);
  return obj;
}

Objective make_nonconvex(int n, int d, double hetero_scale, std::uint64_t seed) {
  if (n < 1 || d < 1) throw std::invalid_argument("make_nonconvex: n, d >= 1");
  if (hetero_scale < 0.0)
    throw std::invalid_argument("make_nonconvex: hetero_scale >= 0");

  Objective obj;
  obj.family = Objective::Family::nonconvex;
  obj.n = n;
  obj.d = d;
  obj.h.assign(n, Eigen::VectorXd::Zero(d));

  if (hetero_scale > 0.0 && n > 1) {
    std::mt19937_64 rng = make_engine(seed, {0x6f626a6eULL});
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) obj.h[i](j) = gauss(rng);
      mean += obj.h[i];
    }
    mean /= n;
    double max_norm = 0.0;
    for (int i = 0; i < n; ++i) {
      obj.h[i] -= mean;
      max_norm = std::max(max_norm, obj.h[i].norm());
    }
    if (max_norm > 0.0)
      for (int i = 0; i < n; ++i) obj.h[i] *= hetero_scale / max_norm;
  }

  double max_h_sq = 0.0;
  for (int i = 0; i < n; ++i) max_h_sq = std::max(max_h_sq, obj.h[i].squaredNorm());

  obj.L = 2.0;  // max |g''(u)| of u^2/(1+u^2) is attained at u = 0
  obj.A_het = std::sqrt(2.0 * max_h_sq);
  obj.B_het = std::sqrt(2.0);
  return obj;
}

SmoothnessReport check_smoothness(const Objective& obj, int pairs,
                                  double radius, std::uint64_t seed) {
  if (pairs < 1) throw std::invalid_argument("check_smoothness: pairs >= 1");
  std::mt19937_64 rng = make_engine(seed, {0x736d7468ULL});
  std::uniform_real_distribution<double> unif(-radius, radius);
  SmoothnessReport rep;
  rep.pairs = pairs;
  Eigen::VectorXd x(obj.d), y(obj.d), gx(obj.d), gy(obj.d);
  for (int k = 0; k < pairs; ++k) {
    for (int j = 0; j < obj.d; ++j) {
      x(j) = unif(rng);
      y(j) = unif(rng);
    }
    double dist = (x - y).norm();
    if (dist < 1e-12) continue;
    for (int i = 0; i < obj.n; ++i) {
      obj.grad(i, x, gx);
      obj.grad(i, y, gy);
      rep.max_ratio = std::max(rep.max_ratio, (gx - gy).norm() / dist);
    }
  }
  return rep;
}

}  // namespace dsgdlab
