#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "las/ddpg.hpp"
#include "las/params.hpp"
#include "las/rng.hpp"
#include "las/topology.hpp"
#include "las/visitors.hpp"

namespace las {

struct SlotSpec {
  std::string mode;      // "PB" or "PLA"
  double minutes = 60.0;
};

// Everything a run needs, loadable from one JSON file. Durations carry
// explicit units in their key names; unknown keys are rejected.
struct RunConfig {
  std::string run_id = "run";
  int days = 1;
  std::vector<SlotSpec> slots_per_day;
  std::uint64_t sim_seed = 1;
  std::uint64_t agent_seed = 2;
  std::uint64_t visitor_seed = 3;

  int grid_rows = 4;
  int grid_cols = 6;
  double grid_spacing_m = 1.0;
  std::string topology_file;  // overrides the grid when set

  std::string scenario_file;  // explicit visitor schedule; else generated
  double visitor_arrivals_per_min = 1.5;
  double visitor_mean_dwell_s = 90.0;

  ParamVector pb_params;  // defaults plus overrides
  DdpgConfig agent;       // obs/act dims are derived from the topology
  std::string resume_checkpoint;  // continue a previous lineage when set

  std::string out_dir = "run_out";

  std::string raw_bytes;  // original config text, hashed into the manifest

  static RunConfig from_json_file(const std::string& path);
};

struct SlotRecord {
  int day = 0;
  int slot = 0;
  std::string mode;
  double start_s = 0.0;
  double end_s = 0.0;
  std::string frames_log;
  std::string activations_log;
  std::string transitions_log;  // PLA only
  std::string noise_log;        // PLA only
  std::string checkpoint;       // PLA only
  bool ok = false;
};

struct CheckpointRef {
  std::string path;
  std::string hash;
};

struct RunManifest {
  std::string run_id;
  std::string config_hash;
  std::string code_version;
  int node_count = 0;
  std::string topology_fingerprint;
  std::vector<SlotRecord> slots;
  std::vector<CheckpointRef> checkpoint_lineage;

  void save(const std::string& path) const;
  static RunManifest load(const std::string& path);
};

// Seeded permutation of the day's slot list: every listed mode appears
// exactly once per day, in a random order.
std::vector<SlotSpec> schedule_slots(const std::vector<SlotSpec>& slots, Rng& rng);

// Executes the whole schedule in simulated time and writes logs, checkpoints
// and the manifest under config.out_dir. A failing slot is recorded as
// failed and ends the run; earlier slots and their logs survive.
RunManifest run(const RunConfig& config);

struct ReportOptions {
  std::string out_dir;
  double sample_rate_hz = 1.0 / kTickSeconds;
  std::optional<std::pair<double, double>> calibration_window;
};

// Per-minute metrics, per-mode summaries, Q-Q tables, the Mann-Whitney
// comparison, and daily trajectories, emitted as CSV files.
void report(const std::vector<RunManifest>& manifests, const ReportOptions& options);

// FNV-1a 64 of a byte string, hex-encoded; used for config and checkpoint
// identity in manifests.
std::string fnv1a_hex(const std::string& bytes);
std::string file_hash_hex(const std::string& path);

}  // namespace las
