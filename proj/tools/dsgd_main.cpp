// Command-line front end: simulate / sweep / validate / noise-check /
// dump-instance. Every experiment artifact carries the config hash so runs
// from different configs can never be mixed up downstream.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dsgdlab/config.hpp"
#include "dsgdlab/engine.hpp"
#include "dsgdlab/io.hpp"
#include "dsgdlab/rng.hpp"
#include "dsgdlab/runner.hpp"
#include "dsgdlab/validation.hpp"

namespace {

using namespace dsgdlab;
using nlohmann::json;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int workers = 0;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* workers_opt = nullptr;
};

void add_common(CLI::App* sub, CommonArgs& args, bool wants_out) {
  sub->add_option("--config", args.config_path, "experiment description (JSON)")
      ->required();
  args.seed_opt =
      sub->add_option("--seed", args.seed, "override master_seed from the file");
  args.workers_opt =
      sub->add_option("--workers", args.workers, "worker thread count")
          ->check(CLI::PositiveNumber);
  if (wants_out)
    sub->add_option("--out", args.out_dir, "output directory (default: out)");
}

ExperimentConfig load_with_overrides(const CommonArgs& args) {
  ExperimentConfig cfg = load_config_file(args.config_path);
  if (args.seed_opt && args.seed_opt->count() > 0) {
    cfg.master_seed = args.seed;
    cfg.canonical["master_seed"] = args.seed;
  }
  if (args.workers_opt && args.workers_opt->count() > 0)
    cfg.workers = args.workers;
  return cfg;
}

int run_experiment(const CommonArgs& args, bool want_sweep) {
  ExperimentConfig cfg = load_with_overrides(args);
  if (want_sweep && !cfg.sweep)
    throw std::invalid_argument(
        "config has no sweep block; use the simulate subcommand");
  if (!want_sweep && cfg.sweep)
    throw std::invalid_argument(
        "config has a sweep block; use the sweep subcommand");

  const SweepResult result = run_sweep(cfg, cfg.workers);
  const std::vector<std::string> files =
      write_outputs(args.out_dir, cfg, result);

  std::printf("config hash %s\n", result.hash.c_str());
  for (const auto& cell : result.cells) {
    std::printf("cell %s=%g  n=%d  T=%ld  lambda=%.6g  diverged=%zu\n",
                result.axis.c_str(), cell.axis_value, cell.n, cell.T,
                cell.lambda, cell.ensemble.diverged);
    for (const auto& q : cell.tails.quantiles)
      std::printf("  delta=%-6g quantile=%.10g  [%.10g, %.10g]\n", q.delta,
                  q.q, q.q_lo, q.q_hi);
  }
  for (const auto& rf : result.rate_fits) {
    if (rf.ok)
      std::printf("rate fit delta=%-6g slope=%.6g  r2=%.6g\n", rf.delta,
                  rf.fit.slope, rf.fit.r2);
    else
      std::printf("rate fit delta=%-6g unavailable\n", rf.delta);
  }
  for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
  return 0;
}

int run_validate(std::uint64_t seed, long mc_samples,
                 const std::string& json_path) {
  const std::vector<CheckReport> reports = run_all_checks(seed, mc_samples);
  const bool ok = print_check_table(reports);
  if (!json_path.empty()) {
    std::ofstream out(json_path, std::ios::binary | std::ios::trunc);
    if (out) out << check_reports_json(reports).dump(2) << "\n";
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + json_path);
    std::printf("wrote %s\n", json_path.c_str());
  }
  return ok ? 0 : 1;
}

struct BoundCheck {
  std::string name;
  double estimate;
  double se;
  double bound;
  bool two_sided;  // calibration checks compare |estimate - bound| to 3 SE
};

int run_noise_check(const CommonArgs& args, std::size_t samples) {
  const ExperimentConfig cfg = load_with_overrides(args);
  const ProblemSetup setup = build_setup(cfg, cfg.topology.n);
  const NoiseModel& nm = setup.noise;
  std::mt19937_64 rng = make_engine(cfg.master_seed, {0x6e6f6973u});

  std::vector<BoundCheck> checks;
  for (int i = 0; i < nm.n; ++i) {
    const MgfEstimate e = estimate_mgf_norm(nm, i, samples, rng);
    const bool degenerate =
        nm.kind == NoiseModel::Kind::zero || nm.sigma[i] == 0.0;
    checks.push_back({"norm_mgf[user " + std::to_string(i) + "]", e.mean, e.se,
                      degenerate ? 1.0 : std::exp(1.0), true});
  }

  // Linear-form MGF bounds at a few deterministic directions and scales.
  for (double scale : {0.5, 1.0, 2.0}) {
    Eigen::VectorXd v(nm.d);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int k = 0; k < nm.d; ++k) v[k] = normal(rng);
    if (v.norm() == 0.0) v.setOnes();
    v *= scale / v.norm();
    const InnerMgfResult r = estimate_mgf_inner(nm, v, samples, rng);
    const double v2 = v.squaredNorm();
    for (int i = 0; i < nm.n; ++i)
      checks.push_back({"inner_mgf[user " + std::to_string(i) + ", |v|=" +
                            std::to_string(scale) + "]",
                        r.per_user[i].mean, r.per_user[i].se,
                        std::exp(0.75 * nm.sigma[i] * nm.sigma[i] * v2),
                        false});
    checks.push_back({"inner_mgf[avg, |v|=" + std::to_string(scale) + "]",
                      r.averaged.mean, r.averaged.se,
                      std::exp(0.75 * nm.sigma_sq_avg() * v2 / nm.n), false});
  }

  const MgfEstimate avg = estimate_mgf_avg_norm(nm, samples, rng);
  checks.push_back({"avg_norm_mgf", avg.mean, avg.se,
                    nm.sigma_sq_avg() == 0.0 ? 1.0 : std::exp(1.0), false});

  bool all_ok = true;
  std::printf("%-28s %-14s %-12s %-14s %s\n", "check", "estimate", "se",
              "bound", "status");
  for (const auto& c : checks) {
    const bool pass = c.two_sided ? std::abs(c.estimate - c.bound) <= 3.0 * c.se
                                  : c.estimate - 3.0 * c.se <= c.bound;
    all_ok = all_ok && pass;
    std::printf("%-28s %-14.8g %-12.3g %-14.8g %s\n", c.name.c_str(),
                c.estimate, c.se, c.bound, pass ? "ok" : "FAIL");
  }
  std::printf("samples per estimate: %zu (3 SE criterion)\n", samples);
  return all_ok ? 0 : 1;
}

int run_dump_instance(const CommonArgs& args) {
  const ExperimentConfig cfg = load_with_overrides(args);
  const ProblemSetup setup = build_setup(cfg, cfg.topology.n);
  const std::string hash = config_hash(cfg);

  std::error_code ec;
  std::filesystem::create_directories(args.out_dir, ec);
  if (ec)
    throw std::runtime_error("cannot create output directory '" +
                             args.out_dir + "': " + ec.message());

  const std::string wpath = args.out_dir + "/W.csv";
  {
    std::ofstream out(wpath, std::ios::binary | std::ios::trunc);
    out << "# config_hash=" << hash << "\n";
    const Eigen::MatrixXd& W = setup.mix.W;
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
      for (Eigen::Index j = 0; j < W.cols(); ++j)
        out << (j ? "," : "") << format_double(W(i, j));
      out << "\n";
    }
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + wpath);
  }

  json j;
  j["config_hash"] = hash;
  const MixingCheckReport mix_report = check_mixing_properties(setup.mix);
  j["topology"] = {{"kind", cfg.topology.kind},
                   {"n", setup.graph.n},
                   {"edges", setup.graph.edges.size()},
                   {"connected", setup.graph.connected()}};
  j["mixing"] = {{"lambda", setup.mix.lambda},
                 {"row_residual", mix_report.row_residual},
                 {"col_residual", mix_report.col_residual},
                 {"wj_residual", mix_report.wj_residual},
                 {"jw_residual", mix_report.jw_residual},
                 {"norm_gap_residual", mix_report.norm_gap_residual},
                 {"min_entry", mix_report.min_entry},
                 {"ok", mix_report.ok()}};

  const Objective& obj = setup.objective;
  json o = {{"family", cfg.objective.family},
            {"d", obj.d},
            {"L", obj.L}};
  if (obj.mu) o["mu"] = *obj.mu;
  if (obj.A_het) o["A_het"] = *obj.A_het;
  if (obj.B_het) o["B_het"] = *obj.B_het;
  if (obj.f_star) o["f_star"] = *obj.f_star;
  if (obj.grad_sq_at_opt) o["grad_sq_at_opt"] = *obj.grad_sq_at_opt;
  if (obj.x_star) {
    json xs = json::array();
    for (Eigen::Index k = 0; k < obj.x_star->size(); ++k)
      xs.push_back((*obj.x_star)[k]);
    o["x_star"] = xs;
  }
  j["objective"] = o;

  j["noise"] = {{"kind", cfg.noise.kind},
                {"sigma_sq_avg", setup.noise.sigma_sq_avg()},
                {"sigma_bar", setup.noise.sigma_bar()},
                {"sigmas", setup.noise.sigma}};

  // Both theorem-derived step-size resolutions, wherever the instance's
  // constants allow them, so the caps can be inspected without running.
  if (obj.B_het) {
    const Theorem1Stepsize ts = theorem1_constant_stepsize(
        obj.L, obj.n, obj.d, cfg.T, setup.noise.sigma_sq_avg(),
        setup.noise.sigma_bar(), setup.mix.lambda, obj.B_het);
    auto cap = [](double v) {
      return std::isfinite(v) ? json(v) : json("inf");
    };
    j["theorem1"] = {{"smooth_cap", cap(ts.smooth_cap)},
                     {"variance_cap", cap(ts.variance_cap)},
                     {"hetero_cap", cap(ts.hetero_cap)},
                     {"dim_cap", cap(ts.dim_cap)},
                     {"mix_cap_stated", cap(ts.mix_cap_stated)},
                     {"mix_cap_derived", cap(ts.mix_cap_derived)},
                     {"C", cap(ts.C)},
                     {"horizon_cap", cap(ts.horizon_cap)},
                     {"alpha", ts.alpha},
                     {"T", cfg.T}};
  }
  if (obj.mu) {
    const bool theory =
        cfg.schedule.kind == "theorem2" && cfg.schedule.mode == "theory";
    const double practical_t0 =
        cfg.schedule.kind == "theorem2" && !theory ? cfg.schedule.t0 : 6.0;
    const Theorem2Schedule ts = theorem2_schedule(
        *obj.mu, obj.L, obj.d, setup.noise.sigma_sq_avg(),
        setup.noise.sigma_bar(), setup.mix.lambda, theory, practical_t0);
    j["theorem2"] = {{"a", ts.schedule.a},
                     {"t0", ts.t0},
                     {"t0_floor_theory", ts.t0_floor_theory},
                     {"t0_terms", ts.t0_terms},
                     {"nu", ts.nu},
                     {"theory_mode", ts.theory_mode}};
  }

  const std::string jpath = args.out_dir + "/instance.json";
  {
    std::ofstream out(jpath, std::ios::binary | std::ios::trunc);
    if (out) out << j.dump(2) << "\n";
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + jpath);
  }
  std::printf("wrote %s\nwrote %s\n", wpath.c_str(), jpath.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decentralized SGD simulation and verification lab"};
  app.require_subcommand(1);

  CommonArgs sim_args;
  CLI::App* sim = app.add_subcommand("simulate", "run one ensemble");
  add_common(sim, sim_args, true);

  CommonArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "run a T / n / delta sweep");
  add_common(sweep, sweep_args, true);

  std::uint64_t validate_seed = 1;
  long mc_samples = 10000;
  std::string validate_json;
  CLI::App* validate =
      app.add_subcommand("validate", "run the lemma and property check suites");
  validate->add_option("--seed", validate_seed, "suite seed");
  validate->add_option("--mc-samples", mc_samples,
                       "runs per Monte Carlo MGF check")
      ->check(CLI::PositiveNumber);
  validate->add_option("--json", validate_json, "also write a JSON report");

  CommonArgs noise_args;
  std::size_t noise_samples = 100000;
  CLI::App* noise =
      app.add_subcommand("noise-check", "estimate noise MGFs against bounds");
  add_common(noise, noise_args, false);
  noise->add_option("--samples", noise_samples, "Monte Carlo samples")
      ->check(CLI::PositiveNumber);

  CommonArgs dump_args;
  CLI::App* dump = app.add_subcommand(
      "dump-instance", "write the mixing matrix and instance constants");
  add_common(dump, dump_args, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return run_experiment(sim_args, false);
    if (sweep->parsed()) return run_experiment(sweep_args, true);
    if (validate->parsed())
      return run_validate(validate_seed, mc_samples, validate_json);
    if (noise->parsed()) return run_noise_check(noise_args, noise_samples);
    if (dump->parsed()) return run_dump_instance(dump_args);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
