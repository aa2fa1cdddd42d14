// Command-line front end: simulate pre-scripted rollouts, run learning
// schedules, benchmark the learner on the line world, and turn logs into
// reports.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "las/analysis.hpp"
#include "las/bench.hpp"
#include "las/harness.hpp"
#include "las/jsonl.hpp"
#include "las/params.hpp"
#include "las/version.hpp"

namespace fs = std::filesystem;

namespace {

struct RunArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

las::RunConfig load_run_config(const RunArgs& args) {
  las::RunConfig cfg = las::RunConfig::from_json_file(args.config_path);
  if (args.seed) {
    cfg.sim_seed = *args.seed;
    cfg.agent_seed = *args.seed + 1;
    cfg.visitor_seed = *args.seed + 2;
  }
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  return cfg;
}

int cmd_simulate(const RunArgs& args) {
  las::RunConfig cfg = load_run_config(args);
  for (const auto& slot : cfg.slots_per_day)
    if (slot.mode != "PB")
      throw std::invalid_argument("simulate: config must contain PB slots only");
  const auto manifest = las::run(cfg);
  std::cout << "simulate: " << manifest.slots.size() << " slot(s) done, manifest at "
            << cfg.out_dir << "/manifest.json\n";
  return 0;
}

int cmd_train(const RunArgs& args) {
  las::RunConfig cfg = load_run_config(args);
  const auto manifest = las::run(cfg);
  int pla_slots = 0;
  for (const auto& slot : manifest.slots)
    if (slot.mode == "PLA") ++pla_slots;
  std::cout << "train: " << manifest.slots.size() << " slot(s) done (" << pla_slots
            << " learning), manifest at " << cfg.out_dir << "/manifest.json\n";
  return 0;
}

int cmd_bench(const las::BenchOptions& options, const std::string& out_path) {
  las::BenchOptions opts = options;
  opts.progress = &std::cout;
  const las::BenchResult result = las::bench_simplified(opts);

  std::cout << "oracle per-step reward: " << result.oracle << " (target "
            << result.target << ")\n";
  for (const auto& s : result.seeds) {
    if (!s.ran)
      std::cout << "seed " << s.seed << ": skipped (outcome already decided)\n";
    else if (s.converged)
      std::cout << "seed " << s.seed << ": converged at episode " << s.converged_at << "\n";
    else
      std::cout << "seed " << s.seed << ": no convergence in " << s.episodes_run
                << " episodes (trailing avg " << s.final_window_avg << ")\n";
  }
  std::cout << (result.pass ? "PASS" : "FAIL") << ": " << result.converged_count
            << " seed(s) converged, " << opts.required << " required\n";

  if (!out_path.empty()) {
    nlohmann::json j;
    j["oracle"] = result.oracle;
    j["target"] = result.target;
    j["pass"] = result.pass;
    j["seeds"] = nlohmann::json::array();
    for (const auto& s : result.seeds)
      j["seeds"].push_back({{"seed", s.seed},
                            {"ran", s.ran},
                            {"converged", s.converged},
                            {"episodes_run", s.episodes_run},
                            {"converged_at", s.converged_at},
                            {"final_window_avg", s.final_window_avg}});
    std::ofstream out(out_path, std::ios::trunc);
    out << j.dump(2) << '\n';
  }
  return result.pass ? 0 : 1;
}

int cmd_analyze(const std::vector<std::string>& run_dirs, const std::string& out_dir,
                std::optional<double> calib_start, std::optional<double> calib_end) {
  std::vector<las::RunManifest> manifests;
  for (const auto& dir : run_dirs) {
    const fs::path p(dir);
    const fs::path manifest_path = fs::is_directory(p) ? p / "manifest.json" : p;
    manifests.push_back(las::RunManifest::load(manifest_path.string()));
  }
  las::ReportOptions options;
  options.out_dir = out_dir;
  if (calib_start && calib_end)
    options.calibration_window = std::make_pair(*calib_start, *calib_end);
  las::report(manifests, options);
  std::cout << "analyze: report written to " << out_dir << "\n";
  return 0;
}

int cmd_cluster(const std::vector<std::string>& transition_logs, int k,
                std::uint64_t seed, const std::string& out_dir) {
  std::vector<std::vector<double>> actions;
  std::vector<double> times;
  for (const auto& path : transition_logs) {
    for (const auto& rec : las::read_jsonl(path)) {
      actions.push_back(rec.at("action").get<std::vector<double>>());
      times.push_back(rec.at("t").get<double>());
    }
  }
  if (actions.empty()) throw std::runtime_error("cluster: no actions found");

  Eigen::MatrixXd data(static_cast<Eigen::Index>(actions.size()), las::kActionDim);
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (static_cast<int>(actions[i].size()) != las::kActionDim)
      throw std::runtime_error("cluster: action dimension mismatch in log");
    for (int j = 0; j < las::kActionDim; ++j)
      data(static_cast<Eigen::Index>(i), j) = actions[i][static_cast<std::size_t>(j)];
  }

  const las::Clustering clustering = las::kmeans(data, k, seed);
  const Eigen::MatrixXd diffs = las::centroid_vs_pb(clustering);
  const Eigen::MatrixXd plane = las::principal_plane_projection(data);

  fs::create_directories(out_dir);
  auto fmt = [](double v) { return nlohmann::json(v).dump(); };

  {
    std::ofstream out(out_dir + "/assignments.csv", std::ios::trunc);
    out << "row,t,cluster,proj_x,proj_y\n";
    for (std::size_t i = 0; i < actions.size(); ++i)
      out << i << ',' << fmt(times[i]) << ',' << clustering.assignments[i] << ','
          << fmt(plane(static_cast<Eigen::Index>(i), 0)) << ','
          << fmt(plane(static_cast<Eigen::Index>(i), 1)) << '\n';
  }

  const auto& ranges = las::action_ranges();
  const auto& indices = las::action_param_indices();
  const auto& names = las::param_names();
  {
    std::ofstream out(out_dir + "/centroids.csv", std::ios::trunc);
    out << "cluster,dimension,normalized,physical\n";
    for (int c = 0; c < clustering.k; ++c)
      for (int j = 0; j < las::kActionDim; ++j) {
        const double norm = clustering.centroids(c, j);
        const auto [lo, hi] = ranges[static_cast<std::size_t>(j)];
        out << c << ',' << names[static_cast<std::size_t>(indices[static_cast<std::size_t>(j)])]
            << ',' << fmt(norm) << ',' << fmt(lo + (norm + 1.0) * (hi - lo) * 0.5) << '\n';
      }
  }
  {
    std::ofstream out(out_dir + "/centroid_vs_pb.csv", std::ios::trunc);
    out << "cluster,dimension,difference\n";
    for (int c = 0; c < clustering.k; ++c)
      for (int j = 0; j < las::kActionDim; ++j)
        out << c << ','
            << names[static_cast<std::size_t>(indices[static_cast<std::size_t>(j)])] << ','
            << fmt(diffs(c, j)) << '\n';
  }

  std::cout << "cluster: " << actions.size() << " actions into " << clustering.k
            << " clusters (inertia " << clustering.inertia << "), output in " << out_dir
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive-sculpture simulator and learning harness"};
  app.set_version_flag("--version", las::kCodeVersion);
  app.require_subcommand(1);

  RunArgs run_args;
  std::uint64_t seed_flag = 0;
  CLI::Option* simulate_seed = nullptr;
  CLI::Option* train_seed = nullptr;

  auto* simulate = app.add_subcommand("simulate", "Run pre-scripted behaviour slots");
  simulate->add_option("--config", run_args.config_path, "Run configuration JSON")->required();
  simulate_seed = simulate->add_option("--seed", seed_flag, "Override all seeds");
  simulate->add_option("--out", run_args.out_dir, "Override the output directory");

  auto* train = app.add_subcommand("train", "Run the scheduled PB/PLA slots with learning");
  train->add_option("--config", run_args.config_path, "Run configuration JSON")->required();
  train_seed = train->add_option("--seed", seed_flag, "Override all seeds");
  train->add_option("--out", run_args.out_dir, "Override the output directory");

  las::BenchOptions bench;
  std::string bench_out;
  int bench_seed_count = 5;
  bool bench_run_all = false;
  auto* bench_cmd =
      app.add_subcommand("bench-simplified", "Convergence benchmark on the line world");
  bench_cmd->add_option("--cells", bench.cells, "LED cells (<= 24)");
  bench_cmd->add_option("--visitors", bench.visitors, "Simulated visitors (<= 4)");
  bench_cmd->add_option("--episodes", bench.max_episodes, "Episode budget per seed");
  bench_cmd->add_option("--steps", bench.episode_steps, "Steps per episode");
  bench_cmd->add_option("--seeds", bench_seed_count, "Number of seeds");
  bench_cmd->add_option("--required", bench.required, "Seeds that must converge");
  bench_cmd->add_flag("--run-all", bench_run_all,
                      "Run every seed even after the outcome is decided");
  bench_cmd->add_option("--out", bench_out, "Write a JSON result file");

  std::vector<std::string> analyze_runs;
  std::string analyze_out = "report";
  double cs = 0.0, ce = 0.0;
  auto* analyze = app.add_subcommand("analyze", "Metrics and comparison report from runs");
  analyze->add_option("--run", analyze_runs, "Run directory or manifest path")->required();
  analyze->add_option("--out", analyze_out, "Report output directory");
  auto* cs_opt = analyze->add_option("--calib-start", cs, "No-visitor window start (s)");
  auto* ce_opt = analyze->add_option("--calib-end", ce, "No-visitor window end (s)");

  std::vector<std::string> cluster_logs;
  int cluster_k = 6;
  std::uint64_t cluster_seed = 0;
  std::string cluster_out = "clusters";
  auto* cluster = app.add_subcommand("cluster", "K-means analysis of logged actions");
  cluster->add_option("--transitions", cluster_logs, "Transition log(s)")->required();
  cluster->add_option("--k", cluster_k, "Cluster count");
  cluster->add_option("--seed", cluster_seed, "Clustering seed");
  cluster->add_option("--out", cluster_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      if (simulate_seed->count()) run_args.seed = seed_flag;
      return cmd_simulate(run_args);
    }
    if (train->parsed()) {
      if (train_seed->count()) run_args.seed = seed_flag;
      return cmd_train(run_args);
    }
    if (bench_cmd->parsed()) {
      bench.stop_when_decided = !bench_run_all;
      bench.seeds.clear();
      for (int i = 1; i <= bench_seed_count; ++i)
        bench.seeds.push_back(static_cast<std::uint64_t>(i));
      return cmd_bench(bench, bench_out);
    }
    if (analyze->parsed()) {
      std::optional<double> calib_start, calib_end;
      if (cs_opt->count()) calib_start = cs;
      if (ce_opt->count()) calib_end = ce;
      return cmd_analyze(analyze_runs, analyze_out, calib_start, calib_end);
    }
    if (cluster->parsed())
      return cmd_cluster(cluster_logs, cluster_k, cluster_seed, cluster_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
