#include "dsgdlab/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>

namespace dsgdlab {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config error at " + path + ": " + what);
}

void require_object(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object");
}

// Unknown keys are hard errors: a typo in a constant name must never
// silently fall back to a default.
void reject_unknown(const json& o, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  for (auto it = o.begin(); it != o.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) fail(path + "." + it.key(), "unknown key");
  }
}

const json& need(const json& o, const std::string& path, const char* key) {
  auto it = o.find(key);
  if (it == o.end())
    fail(path, std::string("missing required key '") + key + "'");
  return *it;
}

bool has(const json& o, const char* key) { return o.find(key) != o.end(); }

double get_num(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

long get_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<long>();
}

std::uint64_t get_u64(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    const long long s = v.get<long long>();
    if (s < 0) fail(path, "expected a non-negative integer");
    return static_cast<std::uint64_t>(s);
  }
  fail(path, "expected a non-negative integer");
}

std::string get_str(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

bool get_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected a boolean");
  return v.get<bool>();
}

std::vector<double> get_num_array(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(get_num(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

bool one_of(const std::string& s, std::initializer_list<const char*> set) {
  for (const char* k : set)
    if (s == k) return true;
  return false;
}

TopologyConfig parse_topology(const json& o) {
  const std::string path = "topology";
  require_object(o, path);
  reject_unknown(o, path, {"kind", "n", "p", "seed"});
  TopologyConfig t;
  t.kind = get_str(need(o, path, "kind"), path + ".kind");
  if (!one_of(t.kind, {"ring", "complete", "star", "torus2d", "erdos_renyi"}))
    fail(path + ".kind", "unknown topology '" + t.kind + "'");
  const long n = get_int(need(o, path, "n"), path + ".n");
  if (n < 2) fail(path + ".n", "need at least 2 users");
  t.n = static_cast<int>(n);
  if (t.kind == "erdos_renyi") {
    if (has(o, "p")) t.p = get_num(o.at("p"), path + ".p");
    if (!(t.p > 0.0 && t.p <= 1.0)) fail(path + ".p", "must lie in (0, 1]");
    if (has(o, "seed")) t.seed = get_u64(o.at("seed"), path + ".seed");
  } else {
    if (has(o, "p")) fail(path + ".p", "only meaningful for erdos_renyi");
    if (has(o, "seed")) fail(path + ".seed", "only meaningful for erdos_renyi");
  }
  return t;
}

ObjectiveConfig parse_objective(const json& o) {
  const std::string path = "objective";
  require_object(o, path);
  ObjectiveConfig c;
  c.family = get_str(need(o, path, "family"), path + ".family");
  if (c.family == "quadratic") {
    reject_unknown(o, path, {"family", "d", "mu", "L", "center_spread", "seed"});
    if (has(o, "mu")) c.mu = get_num(o.at("mu"), path + ".mu");
    if (has(o, "L")) c.L = get_num(o.at("L"), path + ".L");
    if (has(o, "center_spread"))
      c.center_spread = get_num(o.at("center_spread"), path + ".center_spread");
    if (!(c.mu > 0.0)) fail(path + ".mu", "must be positive");
    if (!(c.L >= c.mu)) fail(path + ".L", "must satisfy L >= mu");
    if (c.center_spread < 0.0) fail(path + ".center_spread", "must be >= 0");
  } else if (c.family == "nonconvex") {
    reject_unknown(o, path, {"family", "d", "hetero_scale", "seed"});
    if (has(o, "hetero_scale"))
      c.hetero_scale = get_num(o.at("hetero_scale"), path + ".hetero_scale");
    if (c.hetero_scale < 0.0) fail(path + ".hetero_scale", "must be >= 0");
  } else {
    fail(path + ".family", "unknown family '" + c.family + "'");
  }
  const long d = get_int(need(o, path, "d"), path + ".d");
  if (d < 1) fail(path + ".d", "need dimension >= 1");
  c.d = static_cast<int>(d);
  if (has(o, "seed")) c.seed = get_u64(o.at("seed"), path + ".seed");
  return c;
}

NoiseConfig parse_noise(const json& o, int n, bool n_sweep) {
  const std::string path = "noise";
  require_object(o, path);
  reject_unknown(o, path, {"kind", "sigma", "sigmas"});
  NoiseConfig c;
  c.kind = get_str(need(o, path, "kind"), path + ".kind");
  if (!one_of(c.kind, {"zero", "gaussian_calibrated", "sphere_bounded"}))
    fail(path + ".kind", "unknown noise kind '" + c.kind + "'");
  if (c.kind == "zero") {
    if (has(o, "sigma") || has(o, "sigmas"))
      fail(path, "zero noise takes no scale");
    return c;
  }
  if (has(o, "sigma") == has(o, "sigmas"))
    fail(path, "need exactly one of 'sigma' and 'sigmas'");
  if (has(o, "sigma")) {
    c.sigma = get_num(o.at("sigma"), path + ".sigma");
    if (c.sigma < 0.0) fail(path + ".sigma", "must be >= 0");
  } else {
    c.sigmas = get_num_array(o.at("sigmas"), path + ".sigmas");
    if (c.sigmas.empty()) fail(path + ".sigmas", "must not be empty");
    for (double s : c.sigmas)
      if (s < 0.0) fail(path + ".sigmas", "entries must be >= 0");
    if (n_sweep)
      fail(path + ".sigmas", "per-user scales are incompatible with an n sweep");
    if (static_cast<int>(c.sigmas.size()) != n)
      fail(path + ".sigmas", "need exactly one entry per user (n = " +
                                 std::to_string(n) + ")");
  }
  return c;
}

ScheduleConfig parse_schedule(const json& o) {
  const std::string path = "schedule";
  require_object(o, path);
  ScheduleConfig c;
  c.kind = get_str(need(o, path, "kind"), path + ".kind");
  if (c.kind == "theorem1" || c.kind == "theorem1_anytime") {
    reject_unknown(o, path, {"kind"});
  } else if (c.kind == "theorem2") {
    reject_unknown(o, path, {"kind", "mode", "t0"});
    if (has(o, "mode")) c.mode = get_str(o.at("mode"), path + ".mode");
    if (!one_of(c.mode, {"practical", "theory"}))
      fail(path + ".mode", "expected 'practical' or 'theory'");
    if (c.mode == "practical") {
      c.t0 = get_num(need(o, path, "t0"), path + ".t0");
      if (!(c.t0 >= 6.0)) fail(path + ".t0", "practical t0 must be >= 6");
    } else if (has(o, "t0")) {
      fail(path + ".t0", "t0 is derived in theory mode");
    }
  } else if (c.kind == "constant") {
    reject_unknown(o, path, {"kind", "alpha"});
    c.alpha = get_num(need(o, path, "alpha"), path + ".alpha");
    if (!(c.alpha > 0.0)) fail(path + ".alpha", "must be positive");
  } else if (c.kind == "inv_sqrt") {
    reject_unknown(o, path, {"kind", "c_prime"});
    c.c_prime = get_num(need(o, path, "c_prime"), path + ".c_prime");
    if (!(c.c_prime > 0.0)) fail(path + ".c_prime", "must be positive");
  } else if (c.kind == "harmonic") {
    reject_unknown(o, path, {"kind", "a", "t0"});
    c.a = get_num(need(o, path, "a"), path + ".a");
    c.t0 = get_num(need(o, path, "t0"), path + ".t0");
    if (!(c.a > 0.0)) fail(path + ".a", "must be positive");
    if (!(c.t0 > 0.0)) fail(path + ".t0", "must be positive");
  } else {
    fail(path + ".kind", "unknown schedule '" + c.kind + "'");
  }
  return c;
}

InitConfig parse_init(const json& o) {
  const std::string path = "init";
  require_object(o, path);
  reject_unknown(o, path, {"kind", "value"});
  InitConfig c;
  c.kind = get_str(need(o, path, "kind"), path + ".kind");
  if (c.kind == "zeros") {
    if (has(o, "value")) fail(path + ".value", "zeros init takes no value");
  } else if (c.kind == "constant") {
    c.value = get_num(need(o, path, "value"), path + ".value");
  } else {
    fail(path + ".kind", "unknown init '" + c.kind + "'");
  }
  return c;
}

SweepConfig parse_sweep(const json& o) {
  const std::string path = "sweep";
  require_object(o, path);
  reject_unknown(o, path, {"axis", "values"});
  SweepConfig c;
  c.axis = get_str(need(o, path, "axis"), path + ".axis");
  if (!one_of(c.axis, {"T", "n", "delta"}))
    fail(path + ".axis", "expected 'T', 'n' or 'delta'");
  c.values = get_num_array(need(o, path, "values"), path + ".values");
  if (c.values.empty()) fail(path + ".values", "must not be empty");
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    const std::string vp = path + ".values[" + std::to_string(i) + "]";
    const double v = c.values[i];
    if (c.axis == "delta") {
      if (!(v > 0.0 && v < 1.0)) fail(vp, "delta must lie in (0, 1)");
    } else {
      if (!(v >= (c.axis == "n" ? 2.0 : 1.0)) || v != std::floor(v))
        fail(vp, "expected a positive integer");
    }
  }
  return c;
}

json normalize(const ExperimentConfig& c) {
  json j;
  j["topology"] = {{"kind", c.topology.kind}, {"n", c.topology.n}};
  if (c.topology.kind == "erdos_renyi") {
    j["topology"]["p"] = c.topology.p;
    j["topology"]["seed"] = c.topology.seed;
  }
  json obj = {{"family", c.objective.family},
              {"d", c.objective.d},
              {"seed", c.objective.seed}};
  if (c.objective.family == "quadratic") {
    obj["mu"] = c.objective.mu;
    obj["L"] = c.objective.L;
    obj["center_spread"] = c.objective.center_spread;
  } else {
    obj["hetero_scale"] = c.objective.hetero_scale;
  }
  j["objective"] = obj;
  json noise = {{"kind", c.noise.kind}};
  if (c.noise.kind != "zero") {
    if (c.noise.sigmas.empty())
      noise["sigma"] = c.noise.sigma;
    else
      noise["sigmas"] = c.noise.sigmas;
  }
  j["noise"] = noise;
  json sched = {{"kind", c.schedule.kind}};
  if (c.schedule.kind == "theorem2") {
    sched["mode"] = c.schedule.mode;
    if (c.schedule.mode == "practical") sched["t0"] = c.schedule.t0;
  } else if (c.schedule.kind == "constant") {
    sched["alpha"] = c.schedule.alpha;
  } else if (c.schedule.kind == "inv_sqrt") {
    sched["c_prime"] = c.schedule.c_prime;
  } else if (c.schedule.kind == "harmonic") {
    sched["a"] = c.schedule.a;
    sched["t0"] = c.schedule.t0;
  }
  j["schedule"] = sched;
  j["init"] = {{"kind", c.init.kind}};
  if (c.init.kind == "constant") j["init"]["value"] = c.init.value;
  j["T"] = c.T;
  j["runs"] = c.runs;
  j["master_seed"] = c.master_seed;
  j["metric"] = c.metric;
  j["deltas"] = c.deltas;
  j["record"] = {{"trace", c.record.trace}};
  j["divergence_threshold"] = c.divergence_threshold;
  if (c.sweep)
    j["sweep"] = {{"axis", c.sweep->axis}, {"values", c.sweep->values}};
  // workers deliberately left out: parallelism degree must not change the
  // experiment's identity (outputs are identical for any worker count).
  return j;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") +
                                e.what());
  }
  require_object(doc, "(root)");
  reject_unknown(doc, "(root)",
                 {"topology", "objective", "noise", "schedule", "init", "T",
                  "runs", "master_seed", "metric", "deltas", "record",
                  "divergence_threshold", "sweep", "workers"});

  ExperimentConfig c;
  if (has(doc, "sweep")) c.sweep = parse_sweep(doc.at("sweep"));
  const bool n_sweep = c.sweep && c.sweep->axis == "n";

  c.topology = parse_topology(need(doc, "(root)", "topology"));
  c.objective = parse_objective(need(doc, "(root)", "objective"));
  c.noise = parse_noise(need(doc, "(root)", "noise"), c.topology.n, n_sweep);
  c.schedule = parse_schedule(need(doc, "(root)", "schedule"));
  c.init = has(doc, "init") ? parse_init(doc.at("init")) : InitConfig{};

  c.T = get_int(need(doc, "(root)", "T"), "T");
  if (c.T < 1) fail("T", "need at least one recorded state");
  const long runs = get_int(need(doc, "(root)", "runs"), "runs");
  if (runs < 1) fail("runs", "need at least one run");
  c.runs = static_cast<int>(runs);
  c.master_seed = get_u64(need(doc, "(root)", "master_seed"), "master_seed");

  if (has(doc, "metric")) c.metric = get_str(doc.at("metric"), "metric");
  if (!one_of(c.metric, {"final_user_gap", "avg_sq_grad",
                         "final_consensus_gap", "final_f_gap"}))
    fail("metric", "unknown metric '" + c.metric + "'");
  if ((c.metric == "final_user_gap" || c.metric == "final_f_gap") &&
      c.objective.family != "quadratic")
    fail("metric", "'" + c.metric +
                       "' needs an objective with a computable optimum "
                       "(family 'quadratic')");

  c.deltas = {0.5, 0.2, 0.1, 0.05, 0.02, 0.01};
  if (has(doc, "deltas")) {
    c.deltas = get_num_array(doc.at("deltas"), "deltas");
    if (c.deltas.empty()) fail("deltas", "must not be empty");
    for (double d : c.deltas)
      if (!(d > 0.0 && d < 1.0)) fail("deltas", "entries must lie in (0, 1)");
  }

  if (has(doc, "record")) {
    const json& r = doc.at("record");
    require_object(r, "record");
    reject_unknown(r, "record", {"trace"});
    if (has(r, "trace")) c.record.trace = get_bool(r.at("trace"), "record.trace");
  }

  if (has(doc, "divergence_threshold")) {
    c.divergence_threshold =
        get_num(doc.at("divergence_threshold"), "divergence_threshold");
    if (!(c.divergence_threshold > 0.0))
      fail("divergence_threshold", "must be positive");
  }

  if (has(doc, "workers")) {
    const long w = get_int(doc.at("workers"), "workers");
    if (w < 1) fail("workers", "need at least one worker");
    c.workers = static_cast<int>(w);
  }

  c.canonical = normalize(c);
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string dump = cfg.canonical.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace dsgdlab
