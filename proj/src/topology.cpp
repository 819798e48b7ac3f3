#include "dsgdlab/topology.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "dsgdlab/rng.hpp"

namespace dsgdlab {

namespace {

void add_edge(std::set<std::pair<int, int>>& edges, int i, int j) {
  if (i == j) return;
  if (i > j) std::swap(i, j);
  edges.insert({i, j});
}

Graph finalize(int n, const std::string& kind,
               const std::set<std::pair<int, int>>& edges) {
  Graph g;
  g.n = n;
  g.kind = kind;
  g.edges.assign(edges.begin(), edges.end());
  g.adjacency.assign(n, {});
  for (auto [i, j] : g.edges) {
    g.adjacency[i].push_back(j);
    g.adjacency[j].push_back(i);
  }
  for (auto& nb : g.adjacency) std::sort(nb.begin(), nb.end());
  return g;
}

}  // namespace

bool Graph::connected() const {
  if (n <= 0) return false;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int u : adjacency[v]) {
      if (!seen[u]) {
        seen[u] = 1;
        ++count;
        stack.push_back(u);
      }
    }
  }
  return count == n;
}

Graph build_graph(const std::string& kind, int n, double p, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("build_graph: n must be >= 1");
  std::set<std::pair<int, int>> edges;

  if (kind == "ring") {
    for (int i = 0; i < n; ++i) add_edge(edges, i, (i + 1) % n);
    return finalize(n, kind, edges);
  }
  if (kind == "complete") {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) add_edge(edges, i, j);
    return finalize(n, kind, edges);
  }
  if (kind == "star") {
    for (int i = 1; i < n; ++i) add_edge(edges, 0, i);
    return finalize(n, kind, edges);
  }
  if (kind == "torus2d") {
    int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    if (k * k != n)
      throw std::invalid_argument("build_graph: torus2d needs a square n");
    auto id = [k](int r, int c) { return ((r % k + k) % k) * k + ((c % k + k) % k); };
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) {
        add_edge(edges, id(r, c), id(r, c + 1));
        add_edge(edges, id(r, c), id(r + 1, c));
      }
    return finalize(n, kind, edges);
  }
  if (kind == "erdos_renyi") {
    if (!(p > 0.0 && p <= 1.0))
      throw std::invalid_argument("build_graph: erdos_renyi needs p in (0,1]");
    std::mt19937_64 rng = make_engine(seed, {0x6772617068ULL});
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int attempt = 0; attempt < 1000; ++attempt) {
      edges.clear();
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (unif(rng) < p) add_edge(edges, i, j);
      Graph g = finalize(n, kind, edges);
      if (n == 1 || g.connected()) return g;
    }
    throw std::runtime_error(
        "build_graph: erdos_renyi failed to produce a connected graph in 1000 "
        "attempts");
  }
  throw std::invalid_argument("build_graph: unknown kind '" + kind + "'");
}

MixingMatrix metropolis_weights(const Graph& g) {
  if (g.n < 1) throw std::invalid_argument("metropolis_weights: empty graph");
  if (g.n > 1 && !g.connected())
    throw std::invalid_argument("metropolis_weights: graph must be connected");
  const int n = g.n;
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j : g.adjacency[i]) {
      double w = 1.0 / (1.0 + std::max(g.degree(i), g.degree(j)));
      W(i, j) = w;
      off += w;
    }
    W(i, i) = 1.0 - off;
  }
  MixingMatrix mix;
  mix.W = std::move(W);
  mix.lambda = second_singular_value(mix.W);
  return mix;
}

double second_singular_value(const Eigen::MatrixXd& W) {
  if (W.rows() != W.cols() || W.rows() < 1)
    throw std::invalid_argument("second_singular_value: W must be square");
  if (W.rows() > 512)
    throw std::invalid_argument(
        "second_singular_value: dense SVD is pinned to n <= 512");
  if (W.rows() == 1) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(W);
  return svd.singularValues()(1);  // singular values sorted descending
}

MixingCheckReport check_mixing_properties(const MixingMatrix& mix) {
  const auto& W = mix.W;
  const int n = mix.n();
  MixingCheckReport rep;
  rep.lambda = mix.lambda;
  rep.lambda_lt_one = mix.lambda < 1.0;
  rep.min_entry = W.minCoeff();
  rep.row_residual = (W.rowwise().sum().array() - 1.0).abs().maxCoeff();
  rep.col_residual = (W.colwise().sum().array() - 1.0).abs().maxCoeff();
  Eigen::MatrixXd J = Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  rep.wj_residual = (W * J - J).norm();
  rep.jw_residual = (J * W - J).norm();
  // Independent route for ||W - J||: largest singular value of the deviation
  // matrix, compared against the cached second singular value of W itself.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(W - J);
  rep.norm_gap_residual = std::abs(svd.singularValues()(0) - mix.lambda);
  return rep;
}

}  // namespace dsgdlab
