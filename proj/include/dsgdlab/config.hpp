#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace dsgdlab {

// Parsed experiment description. Parsing fills defaults and validates every
// key; anything unknown is a hard error so typos cannot silently change an
// experiment. The normalized document (defaults included, keys sorted) is
// kept alongside so the hash is stable under key reordering in the source
// file.

struct TopologyConfig {
  std::string kind;  // ring | complete | star | torus2d | erdos_renyi
  int n = 0;
  double p = 0.5;         // edge probability, erdos_renyi only
  std::uint64_t seed = 0; // graph seed, erdos_renyi only
};

struct ObjectiveConfig {
  std::string family;  // quadratic | nonconvex
  int d = 0;
  double mu = 1.0;             // quadratic
  double L = 10.0;             // quadratic
  double center_spread = 1.0;  // quadratic
  double hetero_scale = 0.5;   // nonconvex
  std::uint64_t seed = 1;
};

struct NoiseConfig {
  std::string kind;  // zero | gaussian_calibrated | sphere_bounded
  double sigma = 0.0;          // shared scale; ignored when sigmas given
  std::vector<double> sigmas;  // optional per-user scales (size n)
};

struct ScheduleConfig {
  // theorem1 | theorem1_anytime | theorem2 | constant | inv_sqrt | harmonic
  std::string kind;
  std::string mode = "practical";  // theorem2: practical | theory
  double t0 = 0.0;                 // theorem2 practical / harmonic
  double alpha = 0.0;              // constant
  double c_prime = 0.0;            // inv_sqrt
  double a = 0.0;                  // harmonic
};

struct InitConfig {
  std::string kind = "zeros";  // zeros | constant
  double value = 0.0;
};

struct SweepConfig {
  std::string axis;  // T | n | delta
  std::vector<double> values;
};

struct RecordConfig {
  bool trace = false;  // per-iteration trace of run 0 in each cell
};

struct ExperimentConfig {
  TopologyConfig topology;
  ObjectiveConfig objective;
  NoiseConfig noise;
  ScheduleConfig schedule;
  InitConfig init;
  long T = 0;
  int runs = 0;
  std::uint64_t master_seed = 0;
  // final_user_gap | avg_sq_grad | final_consensus_gap | final_f_gap
  std::string metric = "final_user_gap";
  std::vector<double> deltas;
  RecordConfig record;
  double divergence_threshold = 1e12;
  std::optional<SweepConfig> sweep;
  int workers = 1;

  nlohmann::json canonical;  // normalized form, basis of the hash
};

// Parse a JSON experiment description. Throws std::invalid_argument with the
// offending key path on unknown keys, missing required keys, type mismatches
// and out-of-range values.
ExperimentConfig parse_config(const std::string& text);

// Read a file and parse it. Throws std::runtime_error when unreadable.
ExperimentConfig load_config_file(const std::string& path);

// FNV-1a (64-bit) over the canonical serialization, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace dsgdlab
