#ifndef DSGDLAB_TOPOLOGY_HPP
#define DSGDLAB_TOPOLOGY_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace dsgdlab {

// Undirected simple graph on n nodes. Directed topologies are not supported;
// all built-in constructions produce symmetric mixing matrices.
struct Graph {
  int n = 0;
  std::string kind;
  std::vector<std::pair<int, int>> edges;   // i < j, deduplicated
  std::vector<std::vector<int>> adjacency;  // neighbor lists, no self loops

  int degree(int i) const { return static_cast<int>(adjacency.at(i).size()); }
  bool connected() const;
};

// Supported kinds: "ring", "complete", "star", "torus2d" (n must be a perfect
// square), "erdos_renyi" (edge probability p, resampled until connected, at
// most 1000 attempts). p and seed are only consulted for erdos_renyi.
Graph build_graph(const std::string& kind, int n, double p = 0.5,
                  std::uint64_t seed = 0);

// Doubly stochastic gossip matrix plus its contraction factor
// lambda = ||W - J|| = second largest singular value of W.
struct MixingMatrix {
  Eigen::MatrixXd W;
  double lambda = 0.0;
  int n() const { return static_cast<int>(W.rows()); }
};

// Metropolis-Hastings weights: w_ij = 1/(1 + max(deg_i, deg_j)) on edges,
// w_ii = 1 - sum_{j != i} w_ij. Symmetric, doubly stochastic, positive
// diagonal, hence primitive on connected graphs.
MixingMatrix metropolis_weights(const Graph& g);

// Second largest singular value of W, by dense SVD. Pinned to dense
// computation for n <= 512; larger matrices are rejected.
double second_singular_value(const Eigen::MatrixXd& W);

// Residual report for the doubly-stochastic / spectral properties:
//   row_residual  = max_i |sum_j w_ij - 1|
//   col_residual  = max_j |sum_i w_ij - 1|
//   wj_residual   = ||W J - J||_F,  jw_residual = ||J W - J||_F
//   norm_gap_residual = | ||W - J||_2 - lambda |, where ||W - J||_2 is
//                       recomputed independently (SVD of W - J) and lambda is
//                       the value carried by the MixingMatrix (SVD of W).
struct MixingCheckReport {
  double row_residual = 0.0;
  double col_residual = 0.0;
  double wj_residual = 0.0;
  double jw_residual = 0.0;
  double norm_gap_residual = 0.0;
  double min_entry = 0.0;  // most negative entry of W (>= 0 for valid W)
  double lambda = 0.0;
  bool lambda_lt_one = false;
  bool ok(double tol = 1e-10) const {
    return row_residual <= tol && col_residual <= tol && wj_residual <= tol &&
           jw_residual <= tol && norm_gap_residual <= tol &&
           min_entry >= -tol && lambda_lt_one;
  }
};

MixingCheckReport check_mixing_properties(const MixingMatrix& mix);

}  // namespace dsgdlab

#endif  // DSGDLAB_TOPOLOGY_HPP
