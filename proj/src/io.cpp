#include "dsgdlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace dsgdlab {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// JSON has no infinity; keep such values readable instead of nlohmann's null.
json json_num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json fit_json(const LinearFit& f) {
  return {{"slope", json_num(f.slope)},
          {"intercept", json_num(f.intercept)},
          {"r2", json_num(f.r2)},
          {"points", f.points}};
}

class OutputSet {
 public:
  explicit OutputSet(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec)
      throw std::runtime_error("cannot create output directory '" + dir +
                               "': " + ec.message());
  }

  // Removes everything written so far; used when a later write fails.
  void discard() {
    for (const auto& p : written_) {
      std::error_code ec;
      fs::remove(p, ec);  // best effort; the rethrown error wins
    }
    written_.clear();
  }

  void write_file(const std::string& name, const std::string& body) {
    const fs::path path = fs::path(dir_) / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (out) out << body;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(path, ec);
      throw std::runtime_error("failed writing " + path.string());
    }
    out.close();
    written_.push_back(path.string());
  }

  const std::vector<std::string>& written() const { return written_; }

 private:
  std::string dir_;
  std::vector<std::string> written_;
};

std::string runs_csv(const SweepResult& r) {
  std::string s = "# config_hash=" + r.hash + "\n";
  s += "axis,axis_value,run_index,metric,diverged\n";
  for (const auto& cell : r.cells) {
    for (std::size_t i = 0; i < cell.ensemble.samples.size(); ++i) {
      s += r.axis + "," + format_double(cell.axis_value) + "," +
           std::to_string(i) + "," + format_double(cell.ensemble.samples[i]) +
           "," +
           (std::isfinite(cell.ensemble.samples[i]) ? "0" : "1") + "\n";
    }
  }
  return s;
}

std::string tails_csv(const SweepResult& r) {
  std::string s = "# config_hash=" + r.hash + "\n";
  s += "axis,axis_value,delta,quantile,se,q_lo,q_hi,rank\n";
  for (const auto& cell : r.cells) {
    for (const auto& q : cell.tails.quantiles) {
      const double se = 0.5 * (q.q_hi - q.q_lo);
      s += r.axis + "," + format_double(cell.axis_value) + "," +
           format_double(q.delta) + "," + format_double(q.q) + "," +
           format_double(se) + "," + format_double(q.q_lo) + "," +
           format_double(q.q_hi) + "," + std::to_string(q.rank) + "\n";
    }
  }
  return s;
}

std::string trace_csv(const SweepResult& r) {
  std::string s = "# config_hash=" + r.hash + "\n";
  s += "axis,axis_value,t,consensus_gap,f_xbar,grad_sq_avg,alpha\n";
  for (const auto& cell : r.cells) {
    if (!cell.ensemble.has_trace) continue;
    const RunRecord& rec = cell.ensemble.trace;
    for (std::size_t j = 0; j < rec.consensus_gap.size(); ++j) {
      s += r.axis + "," + format_double(cell.axis_value) + "," +
           std::to_string(j + 1) + "," + format_double(rec.consensus_gap[j]) +
           "," + format_double(rec.f_xbar[j]) + "," +
           (j < rec.grad_sq_avg.size() ? format_double(rec.grad_sq_avg[j])
                                       : std::string()) +
           "," +
           (j < rec.alphas.size() ? format_double(rec.alphas[j])
                                  : std::string()) +
           "\n";
    }
  }
  return s;
}

json cell_json(const SweepResult& r, const SweepCell& cell) {
  json c;
  c["axis"] = r.axis;
  c["axis_value"] = json_num(cell.axis_value);
  c["T"] = cell.T;
  c["n"] = cell.n;
  c["lambda"] = json_num(cell.lambda);
  c["alpha_first"] = json_num(cell.alpha_first);
  c["runs"] = cell.ensemble.samples.size();
  c["diverged"] = cell.ensemble.diverged;
  c["stats"] = {{"mean", json_num(cell.tails.stats.mean)},
                {"stddev", json_num(cell.tails.stats.stddev)},
                {"min", json_num(cell.tails.stats.min)},
                {"max", json_num(cell.tails.stats.max)}};
  json qs = json::array();
  for (const auto& q : cell.tails.quantiles)
    qs.push_back({{"delta", json_num(q.delta)},
                  {"q", json_num(q.q)},
                  {"q_lo", json_num(q.q_lo)},
                  {"q_hi", json_num(q.q_hi)},
                  {"rank", q.rank}});
  c["quantiles"] = qs;
  json tail = json::array();
  for (const auto& p : cell.tails.tail)
    tail.push_back({{"epsilon", json_num(p.epsilon)},
                    {"p_hat", json_num(p.p_hat)},
                    {"se", json_num(p.se)}});
  c["tail"] = tail;
  c["log_delta_fit"] =
      cell.tails.has_log_delta_fit ? fit_json(cell.tails.log_delta_fit)
                                   : json(nullptr);
  return c;
}

std::string fits_json_text(const ExperimentConfig& cfg, const SweepResult& r) {
  json j;
  j["config_hash"] = r.hash;
  j["config"] = cfg.canonical;
  j["axis"] = r.axis;
  j["metric"] = cfg.metric;
  j["deltas"] = r.deltas;
  json cells = json::array();
  for (const auto& cell : r.cells) cells.push_back(cell_json(r, cell));
  j["cells"] = cells;
  json fits = json::array();
  for (const auto& rf : r.rate_fits) {
    json f;
    f["delta"] = json_num(rf.delta);
    f["ok"] = rf.ok;
    if (rf.ok) f["fit"] = fit_json(rf.fit);
    fits.push_back(f);
  }
  j["rate_fits"] = fits;
  return j.dump(2) + "\n";
}

std::string report_text(const ExperimentConfig& cfg, const SweepResult& r) {
  std::string s;
  s += "experiment report\n";
  s += "config hash: " + r.hash + "\n";
  s += "axis: " + r.axis + "   metric: " + cfg.metric +
       "   runs per cell: " + std::to_string(cfg.runs) + "\n\n";
  for (const auto& cell : r.cells) {
    s += "cell " + r.axis + "=" + format_double(cell.axis_value) +
         "  T=" + std::to_string(cell.T) + "  n=" + std::to_string(cell.n) +
         "  lambda=" + format_double(cell.lambda) +
         "  alpha_1=" + format_double(cell.alpha_first) +
         "  diverged=" + std::to_string(cell.ensemble.diverged) + "\n";
    s += "  mean=" + format_double(cell.tails.stats.mean) +
         "  stddev=" + format_double(cell.tails.stats.stddev) + "\n";
    for (const auto& q : cell.tails.quantiles)
      s += "  delta=" + format_double(q.delta) +
           "  quantile=" + format_double(q.q) + "  bracket=[" +
           format_double(q.q_lo) + ", " + format_double(q.q_hi) + "]\n";
    if (cell.tails.has_log_delta_fit) {
      const LinearFit& f = cell.tails.log_delta_fit;
      s += "  q vs log(1/delta): slope=" + format_double(f.slope) +
           "  intercept=" + format_double(f.intercept) +
           "  r2=" + format_double(f.r2) + "\n";
    }
    s += "\n";
  }
  if (!r.rate_fits.empty()) {
    s += "log-log rate fits (quantile vs " + r.axis + "):\n";
    for (const auto& rf : r.rate_fits) {
      s += "  delta=" + format_double(rf.delta);
      if (rf.ok)
        s += "  slope=" + format_double(rf.fit.slope) +
             "  r2=" + format_double(rf.fit.r2) + "\n";
      else
        s += "  (fit not available)\n";
    }
  }
  return s;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

std::vector<std::string> write_outputs(const std::string& out_dir,
                                       const ExperimentConfig& cfg,
                                       const SweepResult& result) {
  OutputSet out(out_dir);
  try {
    out.write_file("runs.csv", runs_csv(result));
    out.write_file("tails.csv", tails_csv(result));
    out.write_file("fits.json", fits_json_text(cfg, result));
    out.write_file("report.txt", report_text(cfg, result));
    bool any_trace = false;
    for (const auto& cell : result.cells)
      if (cell.ensemble.has_trace) any_trace = true;
    if (any_trace) out.write_file("trace.csv", trace_csv(result));
  } catch (...) {
    out.discard();
    throw;
  }
  return out.written();
}

nlohmann::json check_report_json(const CheckReport& r) {
  json j;
  j["name"] = r.name;
  j["ok"] = r.ok();
  j["cases_checked"] = r.cases_checked;
  j["violations"] = r.violations;
  j["cases_skipped"] = r.cases_skipped;
  j["worst_margin"] = json_num(r.worst_margin);
  j["tolerance"] = json_num(r.tolerance);
  if (!r.first_violation.empty()) j["first_violation"] = r.first_violation;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

nlohmann::json check_reports_json(const std::vector<CheckReport>& reports) {
  json j;
  json arr = json::array();
  bool all_ok = true;
  for (const auto& r : reports) {
    arr.push_back(check_report_json(r));
    all_ok = all_ok && r.ok();
  }
  j["checks"] = arr;
  j["all_ok"] = all_ok;
  return j;
}

bool print_check_table(const std::vector<CheckReport>& reports) {
  bool all_ok = true;
  std::printf("%-14s %-6s %10s %10s %8s  %-13s %s\n", "check", "status",
              "cases", "violations", "skipped", "worst_margin", "note");
  for (const auto& r : reports) {
    all_ok = all_ok && r.ok();
    char margin[32];
    if (std::isfinite(r.worst_margin))
      std::snprintf(margin, sizeof(margin), "%.3e", r.worst_margin);
    else
      std::snprintf(margin, sizeof(margin), "%s",
                    r.worst_margin > 0 ? "inf" : "-inf");
    std::printf("%-14s %-6s %10zu %10zu %8zu  %-13s %s\n", r.name.c_str(),
                r.ok() ? "ok" : "FAIL", r.cases_checked, r.violations,
                r.cases_skipped, margin,
                (!r.ok() && !r.first_violation.empty()) ? r.first_violation.c_str()
                                                        : r.note.c_str());
  }
  return all_ok;
}

}  // namespace dsgdlab
