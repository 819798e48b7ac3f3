#include "dsgdlab/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace dsgdlab {

ProblemSetup build_setup(const ExperimentConfig& cfg, int n) {
  ProblemSetup s;
  s.graph = build_graph(cfg.topology.kind, n, cfg.topology.p, cfg.topology.seed);
  s.mix = metropolis_weights(s.graph);
  if (cfg.objective.family == "quadratic") {
    s.objective = make_quadratic(n, cfg.objective.d, cfg.objective.mu,
                                 cfg.objective.L, cfg.objective.center_spread,
                                 cfg.objective.seed);
  } else {
    s.objective = make_nonconvex(n, cfg.objective.d, cfg.objective.hetero_scale,
                                 cfg.objective.seed);
  }
  if (cfg.noise.sigmas.empty()) {
    s.noise = make_noise(noise_kind_from_string(cfg.noise.kind), n, cfg.objective.d,
                         cfg.noise.sigma);
  } else {
    s.noise = make_noise(noise_kind_from_string(cfg.noise.kind), n, cfg.objective.d,
                         cfg.noise.sigmas);
  }
  return s;
}

Schedule resolve_schedule(const ExperimentConfig& cfg, const ProblemSetup& s,
                          long T) {
  const ScheduleConfig& sc = cfg.schedule;
  const Objective& obj = s.objective;
  const NoiseModel& nm = s.noise;
  if (sc.kind == "theorem1" || sc.kind == "theorem1_anytime") {
    if (!obj.B_het)
      throw std::invalid_argument(
          "schedule '" + sc.kind +
          "' needs the gradient-diversity constant B_het, which objective "
          "family '" + cfg.objective.family + "' does not define");
    const Theorem1Stepsize ts = theorem1_constant_stepsize(
        obj.L, obj.n, obj.d, T, nm.sigma_sq_avg(), nm.sigma_bar(),
        s.mix.lambda, obj.B_het);
    return sc.kind == "theorem1" ? ts.schedule()
                                 : ts.unknown_horizon_schedule();
  }
  if (sc.kind == "theorem2") {
    if (!obj.mu)
      throw std::invalid_argument(
          "schedule 'theorem2' needs strong convexity mu, which objective "
          "family '" + cfg.objective.family + "' does not define");
    const Theorem2Schedule ts = theorem2_schedule(
        *obj.mu, obj.L, obj.d, nm.sigma_sq_avg(), nm.sigma_bar(),
        s.mix.lambda, sc.mode == "theory", sc.t0);
    return ts.schedule;
  }
  Schedule sched;
  if (sc.kind == "constant") {
    sched.kind = Schedule::Kind::constant;
    sched.alpha = sc.alpha;
  } else if (sc.kind == "inv_sqrt") {
    sched.kind = Schedule::Kind::inv_sqrt;
    sched.c_prime = sc.c_prime;
  } else if (sc.kind == "harmonic") {
    sched.kind = Schedule::Kind::harmonic;
    sched.a = sc.a;
    sched.t0 = sc.t0;
  } else {
    throw std::logic_error("unmapped schedule kind: " + sc.kind);
  }
  return sched;
}

InitSpec make_init(const ExperimentConfig& cfg) {
  InitSpec init;
  if (cfg.init.kind == "constant") {
    init.kind = InitSpec::Kind::constant;
    init.value = cfg.init.value;
  }
  return init;
}

double metric_of(const RunRecord& rec, const Objective& obj,
                 const std::string& metric) {
  if (rec.diverged) return std::numeric_limits<double>::infinity();
  if (metric == "final_user_gap") {
    if (!rec.final_user_gap)
      throw std::logic_error("final_user_gap not recorded (no optimum data)");
    return *rec.final_user_gap;
  }
  if (metric == "avg_sq_grad") return rec.final_avg_sq_grad;
  if (metric == "final_consensus_gap") return rec.final_consensus_gap;
  if (metric == "final_f_gap") {
    if (!obj.f_star)
      throw std::logic_error("final_f_gap needs optimum data");
    return rec.final_f_xbar - *obj.f_star;
  }
  throw std::logic_error("unmapped metric: " + metric);
}

Ensemble run_ensemble(const ExperimentConfig& cfg, const ProblemSetup& setup,
                      const Schedule& schedule, long T, int workers,
                      bool want_trace) {
  if (cfg.runs < 1) throw std::invalid_argument("run_ensemble: need runs >= 1");
  const int R = cfg.runs;

  RunSpec base;
  base.mix = &setup.mix;
  base.obj = &setup.objective;
  base.noise = &setup.noise;
  base.schedule = schedule;
  base.T = T;
  base.init = make_init(cfg);
  base.master_seed = cfg.master_seed;
  base.record_arrays = false;
  base.record_trajectory = false;
  base.track_grad_metric = (cfg.metric == "avg_sq_grad");
  base.divergence_threshold = cfg.divergence_threshold;

  Ensemble ens;
  ens.samples.assign(static_cast<std::size_t>(R), 0.0);
  std::vector<unsigned char> diverged(static_cast<std::size_t>(R), 0);

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto work = [&]() {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const int r = next.fetch_add(1, std::memory_order_relaxed);
      if (r >= R) return;
      try {
        RunSpec spec = base;
        spec.run_index = static_cast<std::uint64_t>(r);
        const bool trace_run = want_trace && r == 0;
        if (trace_run) spec.record_arrays = true;
        RunRecord rec = run(spec);
        ens.samples[static_cast<std::size_t>(r)] =
            metric_of(rec, setup.objective, cfg.metric);
        diverged[static_cast<std::size_t>(r)] = rec.diverged ? 1 : 0;
        if (trace_run) {
          ens.trace = std::move(rec);  // only the worker owning run 0 writes
          ens.has_trace = true;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  const int nthreads = std::max(1, std::min(workers, R));
  if (nthreads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  for (unsigned char f : diverged) ens.diverged += f;
  return ens;
}

TailEstimate estimate_tails(const std::vector<double>& samples,
                            const std::vector<double>& deltas) {
  TailEstimate est;
  est.stats = summarize(samples);
  const SortedSamples sorted(samples);
  est.quantiles.reserve(deltas.size());
  for (double d : deltas) est.quantiles.push_back(sorted.quantile_point(d));

  std::vector<double> levels;
  levels.reserve(est.quantiles.size());
  for (const auto& q : est.quantiles)
    if (std::isfinite(q.q)) levels.push_back(q.q);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  est.tail = tail_curve_probs(sorted, levels);

  std::vector<double> distinct = deltas;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()),
                 distinct.end());
  bool finite = true;
  for (const auto& q : est.quantiles)
    if (!std::isfinite(q.q)) finite = false;
  if (distinct.size() >= 4 && finite) {
    est.log_delta_fit = fit_log_inverse_delta(est.quantiles);
    est.has_log_delta_fit = true;
  }
  return est;
}

SweepResult run_sweep(const ExperimentConfig& cfg, int workers) {
  SweepResult result;
  result.hash = config_hash(cfg);
  result.axis = cfg.sweep ? cfg.sweep->axis : "none";
  result.deltas = (result.axis == "delta") ? cfg.sweep->values : cfg.deltas;

  auto make_cell = [&](double axis_value, int n, long T,
                       const ProblemSetup& setup) {
    SweepCell cell;
    cell.axis_value = axis_value;
    cell.T = T;
    cell.n = n;
    cell.lambda = setup.mix.lambda;
    const Schedule sched = resolve_schedule(cfg, setup, T);
    cell.alpha_first = sched.at(1);
    cell.ensemble =
        run_ensemble(cfg, setup, sched, T, workers, cfg.record.trace);
    cell.tails = estimate_tails(cell.ensemble.samples, result.deltas);
    return cell;
  };

  if (result.axis == "T") {
    const ProblemSetup setup = build_setup(cfg, cfg.topology.n);
    for (double v : cfg.sweep->values)
      result.cells.push_back(
          make_cell(v, cfg.topology.n, static_cast<long>(v), setup));
  } else if (result.axis == "n") {
    for (double v : cfg.sweep->values) {
      const int n = static_cast<int>(v);
      const ProblemSetup setup = build_setup(cfg, n);
      result.cells.push_back(make_cell(v, n, cfg.T, setup));
    }
  } else {
    const ProblemSetup setup = build_setup(cfg, cfg.topology.n);
    result.cells.push_back(make_cell(0.0, cfg.topology.n, cfg.T, setup));
  }

  if ((result.axis == "T" || result.axis == "n") && result.cells.size() >= 3) {
    std::vector<double> xs;
    xs.reserve(result.cells.size());
    for (const auto& c : result.cells) xs.push_back(c.axis_value);
    for (std::size_t i = 0; i < result.deltas.size(); ++i) {
      RateFit rf;
      rf.delta = result.deltas[i];
      std::vector<double> ys;
      ys.reserve(result.cells.size());
      bool usable = true;
      for (const auto& c : result.cells) {
        const double q = c.tails.quantiles[i].q;
        if (!(std::isfinite(q) && q > 0.0)) usable = false;
        ys.push_back(q);
      }
      if (usable) {
        rf.fit = fit_rate(xs, ys);
        rf.ok = true;
      }
      result.rate_fits.push_back(rf);
    }
  }
  return result;
}

}  // namespace dsgdlab
