#pragma once

#include <string>
#include <vector>

#include "dsgdlab/analysis.hpp"
#include "dsgdlab/config.hpp"
#include "dsgdlab/engine.hpp"

namespace dsgdlab {

// Immutable problem instance a cell's runs share. Workers only ever read it.
struct ProblemSetup {
  Graph graph;
  MixingMatrix mix;
  Objective objective;
  NoiseModel noise;
};

// Build graph/mixing/objective/noise for the given network size (the size is
// a parameter so an n sweep can rebuild the same family at each scale).
ProblemSetup build_setup(const ExperimentConfig& cfg, int n);

// Resolve the schedule spec against a concrete instance. Throws when a
// theorem-derived schedule needs a constant the objective does not define
// (e.g. B_het on the quadratic family, mu on the nonconvex one).
Schedule resolve_schedule(const ExperimentConfig& cfg, const ProblemSetup& s,
                          long T);

InitSpec make_init(const ExperimentConfig& cfg);

// Scalar metric of one finished run; +infinity for diverged runs.
double metric_of(const RunRecord& rec, const Objective& obj,
                 const std::string& metric);

// Metric samples of one cell, indexed by run index (so the result is a pure
// function of (config, master_seed), whatever the worker count).
struct Ensemble {
  std::vector<double> samples;
  std::size_t diverged = 0;
  RunRecord trace;  // run 0 with per-iteration arrays, when requested
  bool has_trace = false;
};

Ensemble run_ensemble(const ExperimentConfig& cfg, const ProblemSetup& setup,
                      const Schedule& schedule, long T, int workers,
                      bool want_trace);

// Quantile/tail summary of an ensemble over a delta grid.
struct TailEstimate {
  SummaryStats stats;
  std::vector<QuantilePoint> quantiles;  // one per delta, same order
  std::vector<TailPoint> tail;           // exceedance at the quantile levels
  LinearFit log_delta_fit;               // q(delta) vs log(1/delta)
  bool has_log_delta_fit = false;        // needs >= 4 distinct finite deltas
};

TailEstimate estimate_tails(const std::vector<double>& samples,
                            const std::vector<double>& deltas);

struct SweepCell {
  double axis_value = 0.0;  // T, n or 0 for a single-cell result
  long T = 0;
  int n = 0;
  double lambda = 0.0;
  double alpha_first = 0.0;  // alpha_1 of the resolved schedule
  Ensemble ensemble;
  TailEstimate tails;
};

struct RateFit {
  double delta = 0.0;
  LinearFit fit;
  bool ok = false;  // false when the fit was impossible (< 3 cells,
                    // non-finite or non-positive quantiles)
};

struct SweepResult {
  std::string axis;  // "T" | "n" | "delta" | "none"
  std::vector<double> deltas;
  std::vector<SweepCell> cells;
  std::vector<RateFit> rate_fits;  // per delta; only for T / n sweeps
  std::string hash;
};

// Run the whole experiment the config describes: one cell per sweep value
// (or a single cell without a sweep), tails per cell, and log-log rate fits
// across cells for T / n sweeps.
SweepResult run_sweep(const ExperimentConfig& cfg, int workers);

}  // namespace dsgdlab
