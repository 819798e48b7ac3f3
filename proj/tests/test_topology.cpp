#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <set>

#include "dsgdlab/topology.hpp"

using namespace dsgdlab;

TEST_SUITE_BEGIN("topology");

TEST_CASE("ring graph structure") {
  const Graph g = build_graph("ring", 8);
  CHECK(g.n == 8);
  CHECK(g.edges.size() == 8);
  for (int i = 0; i < 8; ++i) CHECK(g.degree(i) == 2);
  CHECK(g.connected());
}

TEST_CASE("metropolis weights on the 4-ring are exactly 1/3") {
  // Every node has degree 2, so each edge weight is 1/(1+2) = 1/3 and the
  // self weight is the complement 1/3.
  const MixingMatrix mix = metropolis_weights(build_graph("ring", 4));
  for (int i = 0; i < 4; ++i) {
    CHECK(mix.W(i, i) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(mix.W(i, (i + 1) % 4) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(mix.W(i, (i + 3) % 4) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(mix.W(i, (i + 2) % 4) == 0.0);
  }
}

TEST_CASE("ring contraction factors match the circulant eigenvalues") {
  // W is circulant with symbol 1/3 + (2/3) cos(2 pi k / n); lambda is the
  // largest |value| over k != 0. Two independent routes (closed form here,
  // dense SVD inside metropolis_weights) must agree.
  struct Expected {
    int n;
    double lambda;
  };
  // max_{k != 0} |1/3 + (2/3) cos(2 pi k/n)|
  const Expected cases[] = {
      {4, 1.0 / 3.0}, {8, 0.80473785412436505}, {16, 0.94925302167419101}};
  for (const auto& c : cases) {
    const MixingMatrix mix = metropolis_weights(build_graph("ring", c.n));
    CHECK(mix.lambda == doctest::Approx(c.lambda).epsilon(1e-12));
  }
}

TEST_CASE("complete graph mixes in one round") {
  const MixingMatrix mix = metropolis_weights(build_graph("complete", 6));
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      CHECK(mix.W(i, j) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(mix.lambda <= 1e-12);
}

TEST_CASE("star and torus contraction factors") {
  const MixingMatrix star = metropolis_weights(build_graph("star", 4));
  CHECK(star.lambda == doctest::Approx(0.75).epsilon(1e-12));

  // 3x3 torus: degree 4 everywhere, lambda = 0.4 exactly.
  const MixingMatrix torus = metropolis_weights(build_graph("torus2d", 9));
  CHECK(torus.lambda == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("erdos-renyi graphs are seeded and connected") {
  const Graph a = build_graph("erdos_renyi", 12, 0.3, 42);
  const Graph b = build_graph("erdos_renyi", 12, 0.3, 42);
  CHECK(a.edges == b.edges);
  CHECK(a.connected());

  const Graph c = build_graph("erdos_renyi", 12, 0.3, 43);
  CHECK(a.edges != c.edges);  // same size, different draw

  // p = 1 degenerates to the complete graph
  const Graph full = build_graph("erdos_renyi", 5, 1.0, 7);
  CHECK(full.edges.size() == 10);
}

TEST_CASE("mixing property report is clean on every builtin") {
  for (const char* kind : {"ring", "complete", "star", "torus2d"}) {
    for (int n : {4, 9, 16}) {
      const MixingMatrix mix = metropolis_weights(build_graph(kind, n));
      const MixingCheckReport rep = check_mixing_properties(mix);
      INFO(kind, " n=", n);
      CHECK(rep.ok(1e-10));
      CHECK(rep.lambda < 1.0);
    }
  }
  const MixingMatrix er =
      metropolis_weights(build_graph("erdos_renyi", 16, 0.4, 3));
  CHECK(check_mixing_properties(er).ok(1e-10));
}

TEST_CASE("invalid graph requests are rejected") {
  CHECK_THROWS_AS(build_graph("moebius", 8), std::invalid_argument);
  CHECK_THROWS_AS(build_graph("torus2d", 8), std::invalid_argument);  // not square
  CHECK_THROWS_AS(build_graph("erdos_renyi", 8, 0.0, 1), std::invalid_argument);
}

TEST_CASE("two-node ring degenerates to the complete graph") {
  const Graph g = build_graph("ring", 2);
  REQUIRE(g.edges.size() == 1);  // the duplicate 0-1 edge collapses
  const MixingMatrix mix = metropolis_weights(g);
  CHECK(mix.W(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mix.lambda <= 1e-12);
}

TEST_CASE("second_singular_value matches an explicit small case") {
  // Doubly stochastic 2x2: W = [[1-w, w], [w, 1-w]] has singular values
  // {1, |1-2w|}.
  Eigen::MatrixXd W(2, 2);
  const double w = 0.3;
  W << 1 - w, w, w, 1 - w;
  CHECK(second_singular_value(W) == doctest::Approx(0.4).epsilon(1e-13));
  CHECK_THROWS_AS(second_singular_value(Eigen::MatrixXd::Identity(513, 513)),
                  std::invalid_argument);
}

TEST_SUITE_END();
