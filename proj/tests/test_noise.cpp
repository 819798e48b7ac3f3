#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "dsgdlab/noise.hpp"
#include "dsgdlab/rng.hpp"

using namespace dsgdlab;

TEST_SUITE_BEGIN("noise");

TEST_CASE("calibrated gaussian per-coordinate scale") {
  // s^2 = sigma^2 (1 - exp(-2/d)) / 2; for d=3, sigma=2 this is
  // 0.9864916431145354^2, and the closed-form MGF
  // (1 - 2 s^2/sigma^2)^{-d/2} collapses to e exactly.
  const NoiseModel m =
      make_noise(NoiseModel::Kind::gaussian_calibrated, 1, 3, 2.0);
  CHECK(m.coord_std(0) == doctest::Approx(0.9864916431145354).epsilon(1e-13));
  const double ratio = 2.0 * m.coord_std(0) * m.coord_std(0) / 4.0;
  CHECK(std::pow(1.0 - ratio, -1.5) ==
        doctest::Approx(std::exp(1.0)).epsilon(1e-13));
}

TEST_CASE("norm MGF estimate sits on e for the calibrated gaussian") {
  const NoiseModel m =
      make_noise(NoiseModel::Kind::gaussian_calibrated, 2, 6, 1.5);
  std::mt19937_64 rng = make_engine(101, {1});
  const MgfEstimate est = estimate_mgf_norm(m, 1, 200000, rng);
  CHECK(std::abs(est.mean - std::exp(1.0)) <= 3.0 * est.se);
  CHECK(est.se > 0.0);
  CHECK(est.samples == 200000);
}

TEST_CASE("sphere noise has deterministic norm and exact MGF") {
  const NoiseModel m =
      make_noise(NoiseModel::Kind::sphere_bounded, 3, 5, 2.5);
  std::mt19937_64 rng = make_engine(7, {2});
  Eigen::VectorXd z(5);
  for (int rep = 0; rep < 100; ++rep) {
    sample_noise(m, 2, rng, z);
    CHECK(z.norm() == doctest::Approx(2.5).epsilon(1e-12));
  }
  const MgfEstimate est = estimate_mgf_norm(m, 0, 1000, rng);
  CHECK(est.mean == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
  CHECK(est.se <= 1e-12);
}

TEST_CASE("zero model draws zeros and a unit MGF") {
  const NoiseModel m = make_noise(NoiseModel::Kind::zero, 2, 4, 0.0);
  std::mt19937_64 rng = make_engine(1, {3});
  Eigen::VectorXd z(4);
  sample_noise(m, 0, rng, z);
  CHECK(z.norm() == 0.0);
  CHECK(estimate_mgf_norm(m, 0, 10, rng).mean == 1.0);
  CHECK(m.sigma_sq_avg() == 0.0);
  CHECK(m.sigma_bar() == 0.0);
}

TEST_CASE("draws are mean zero") {
  const NoiseModel m =
      make_noise(NoiseModel::Kind::gaussian_calibrated, 1, 3, 2.0);
  std::mt19937_64 rng = make_engine(55, {4});
  Eigen::VectorXd z(3), acc = Eigen::VectorXd::Zero(3);
  const int N = 100000;
  for (int s = 0; s < N; ++s) {
    sample_noise(m, 0, rng, z);
    acc += z;
  }
  acc /= N;
  // each coordinate has std s/sqrt(N)
  CHECK(acc.norm() <= 5.0 * m.coord_std(0) / std::sqrt(double(N)));
}

TEST_CASE("per-user scales and the averaged statistics") {
  const NoiseModel m = make_noise(NoiseModel::Kind::gaussian_calibrated, 3, 2,
                                  std::vector<double>{1.0, 2.0, 3.0});
  CHECK(m.sigma_sq_avg() == doctest::Approx((1.0 + 4.0 + 9.0) / 3.0));
  CHECK(m.sigma_bar() == 3.0);
  CHECK_THROWS_AS(make_noise(NoiseModel::Kind::gaussian_calibrated, 3, 2,
                             std::vector<double>{1.0, 2.0}),
                  std::invalid_argument);
}

TEST_CASE("linear-form MGF estimates respect the sub-gaussian bounds") {
  // E[exp(<v, z_i>)] <= exp(3 sigma_i^2 |v|^2 / 4) per user and
  // E[exp(<v, zbar>)] <= exp(3 sigma^2 |v|^2 / (4n)) for the average.
  const NoiseModel m =
      make_noise(NoiseModel::Kind::gaussian_calibrated, 4, 3, 1.2);
  std::mt19937_64 rng = make_engine(202, {5});
  Eigen::VectorXd v(3);
  v << 0.8, -0.5, 0.3;
  const InnerMgfResult r = estimate_mgf_inner(m, v, 50000, rng);
  REQUIRE(r.per_user.size() == 4);
  const double v2 = v.squaredNorm();
  for (int i = 0; i < 4; ++i) {
    const double bound = std::exp(0.75 * m.sigma[i] * m.sigma[i] * v2);
    CHECK(r.per_user[i].mean - 3.0 * r.per_user[i].se <= bound);
  }
  const double avg_bound = std::exp(0.75 * m.sigma_sq_avg() * v2 / m.n);
  CHECK(r.averaged.mean - 3.0 * r.averaged.se <= avg_bound);
}

TEST_CASE("averaged-norm MGF estimate respects its bound") {
  for (auto kind : {NoiseModel::Kind::gaussian_calibrated,
                    NoiseModel::Kind::sphere_bounded}) {
    const NoiseModel m = make_noise(kind, 8, 8, 1.0);
    std::mt19937_64 rng = make_engine(303, {6});
    const MgfEstimate est = estimate_mgf_avg_norm(m, 50000, rng);
    CHECK(est.mean - 3.0 * est.se <= std::exp(1.0));
  }
}

TEST_CASE("sampling is reproducible from the engine seed") {
  const NoiseModel m =
      make_noise(NoiseModel::Kind::gaussian_calibrated, 2, 4, 1.0);
  std::mt19937_64 r1 = make_engine(9, {1, 2});
  std::mt19937_64 r2 = make_engine(9, {1, 2});
  std::mt19937_64 r3 = make_engine(9, {1, 3});
  Eigen::VectorXd a(4), b(4), c(4);
  sample_noise(m, 0, r1, a);
  sample_noise(m, 0, r2, b);
  sample_noise(m, 0, r3, c);
  CHECK((a - b).norm() == 0.0);
  CHECK((a - c).norm() > 0.0);
}

TEST_CASE("output buffer must be presized") {
  const NoiseModel m =
      make_noise(NoiseModel::Kind::gaussian_calibrated, 1, 4, 1.0);
  std::mt19937_64 rng = make_engine(1, {1});
  Eigen::VectorXd bad(3);
  CHECK_THROWS_AS(sample_noise(m, 0, rng, bad), std::invalid_argument);
  Eigen::VectorXd good(4);
  CHECK_THROWS_AS(sample_noise(m, 1, rng, good), std::invalid_argument);
}

TEST_SUITE_END();
