#include "las/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "las/analysis.hpp"
#include "las/checkpoint.hpp"
#include "las/jsonl.hpp"
#include "las/metrics.hpp"
#include "las/pb_engine.hpp"
#include "las/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace las {

namespace {

void require_keys(const json& object, const std::set<std::string>& allowed,
                  const std::string& where) {
  for (const auto& [key, value] : object.items())
    if (!allowed.contains(key))
      throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
}

void require_file(const std::string& path, const std::string& what) {
  if (!fs::exists(path))
    throw std::invalid_argument("config: " + what + " does not exist: " + path);
}

std::string resolve(const fs::path& base, const std::string& maybe_relative) {
  fs::path p(maybe_relative);
  return p.is_absolute() ? p.string() : (base / p).string();
}

// Shortest round-trip decimal form, same as the JSON logs use.
std::string fmt_double(double v) { return json(v).dump(); }

const char* actuator_name(Channel channel) {
  switch (channel.kind) {
    case ActuatorKind::Moth: return "moth";
    case ActuatorKind::Led: return "led";
    case ActuatorKind::Sma: {
      static const char* names[kSmaPerNode] = {"sma0", "sma1", "sma2",
                                               "sma3", "sma4", "sma5"};
      return names[channel.sma_index];
    }
  }
  return "?";
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

std::string file_hash_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("hash: cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a_hex(bytes);
}

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const fs::path base = fs::path(path).parent_path();

  json j = json::parse(bytes);
  require_keys(j,
               {"run_id", "days", "slots_per_day", "seeds", "topology", "visitors",
                "pb_params", "agent", "resume_checkpoint", "out_dir"},
               "root");

  RunConfig cfg;
  cfg.raw_bytes = bytes;
  cfg.run_id = j.value("run_id", cfg.run_id);
  cfg.days = j.value("days", cfg.days);
  if (cfg.days < 1) throw std::invalid_argument("config: days must be >= 1");

  if (!j.contains("slots_per_day") || j["slots_per_day"].empty())
    throw std::invalid_argument("config: slots_per_day is required");
  for (const auto& s : j["slots_per_day"]) {
    require_keys(s, {"mode", "minutes"}, "slots_per_day[]");
    SlotSpec slot;
    slot.mode = s.at("mode").get<std::string>();
    if (slot.mode != "PB" && slot.mode != "PLA")
      throw std::invalid_argument("config: slot mode must be PB or PLA");
    slot.minutes = s.at("minutes").get<double>();
    if (!(slot.minutes > 0.0)) throw std::invalid_argument("config: slot minutes must be > 0");
    cfg.slots_per_day.push_back(slot);
  }

  if (j.contains("seeds")) {
    const auto& seeds = j["seeds"];
    require_keys(seeds, {"sim", "agent", "visitors"}, "seeds");
    cfg.sim_seed = seeds.value("sim", cfg.sim_seed);
    cfg.agent_seed = seeds.value("agent", cfg.agent_seed);
    cfg.visitor_seed = seeds.value("visitors", cfg.visitor_seed);
  }

  if (j.contains("topology")) {
    const auto& topo = j["topology"];
    require_keys(topo, {"rows", "cols", "spacing_m", "file"}, "topology");
    if (topo.contains("file")) {
      cfg.topology_file = resolve(base, topo["file"].get<std::string>());
      require_file(cfg.topology_file, "topology file");
    } else {
      cfg.grid_rows = topo.value("rows", cfg.grid_rows);
      cfg.grid_cols = topo.value("cols", cfg.grid_cols);
      cfg.grid_spacing_m = topo.value("spacing_m", cfg.grid_spacing_m);
    }
  }

  if (j.contains("visitors")) {
    const auto& vis = j["visitors"];
    require_keys(vis, {"scenario_file", "arrivals_per_min", "mean_dwell_s"}, "visitors");
    if (vis.contains("scenario_file")) {
      cfg.scenario_file = resolve(base, vis["scenario_file"].get<std::string>());
      require_file(cfg.scenario_file, "scenario file");
    }
    cfg.visitor_arrivals_per_min = vis.value("arrivals_per_min", cfg.visitor_arrivals_per_min);
    cfg.visitor_mean_dwell_s = vis.value("mean_dwell_s", cfg.visitor_mean_dwell_s);
  }

  if (j.contains("pb_params")) {
    const auto& overrides = j["pb_params"];
    const auto& names = param_names();
    std::set<std::string> allowed(names.begin(), names.end());
    require_keys(overrides, allowed, "pb_params");
    for (int i = 0; i < kParamCount; ++i)
      if (overrides.contains(names[static_cast<std::size_t>(i)]))
        cfg.pb_params[i] = overrides[names[static_cast<std::size_t>(i)]].get<double>();
    cfg.pb_params.validate();
  }

  if (j.contains("agent")) {
    const auto& agent = j["agent"];
    require_keys(agent,
                 {"hidden", "actor_lr", "critic_lr", "gamma", "batch_size",
                  "buffer_capacity", "train_interval", "train_times", "episode_length",
                  "tau", "noise_sigma_init", "noise_alpha", "noise_delta"},
                 "agent");
    auto& a = cfg.agent;
    a.hidden = agent.value("hidden", a.hidden);
    a.actor_lr = agent.value("actor_lr", a.actor_lr);
    a.critic_lr = agent.value("critic_lr", a.critic_lr);
    a.gamma = agent.value("gamma", a.gamma);
    a.batch_size = agent.value("batch_size", a.batch_size);
    a.buffer_capacity = agent.value("buffer_capacity", a.buffer_capacity);
    a.train_interval = agent.value("train_interval", a.train_interval);
    a.train_times = agent.value("train_times", a.train_times);
    a.episode_length = agent.value("episode_length", a.episode_length);
    a.tau = agent.value("tau", a.tau);
    a.noise_sigma_init = agent.value("noise_sigma_init", a.noise_sigma_init);
    a.noise_alpha = agent.value("noise_alpha", a.noise_alpha);
    a.noise_delta = agent.value("noise_delta", a.noise_delta);
  }

  if (j.contains("resume_checkpoint")) {
    cfg.resume_checkpoint = resolve(base, j["resume_checkpoint"].get<std::string>());
    require_file(cfg.resume_checkpoint, "resume checkpoint");
  }
  cfg.out_dir = resolve(base, j.value("out_dir", cfg.out_dir));
  return cfg;
}

void RunManifest::save(const std::string& path) const {
  json j;
  j["run_id"] = run_id;
  j["config_hash"] = config_hash;
  j["code_version"] = code_version;
  j["node_count"] = node_count;
  j["topology_fingerprint"] = topology_fingerprint;
  j["slots"] = json::array();
  for (const auto& s : slots) {
    j["slots"].push_back({{"day", s.day},
                          {"slot", s.slot},
                          {"mode", s.mode},
                          {"start_s", s.start_s},
                          {"end_s", s.end_s},
                          {"frames_log", s.frames_log},
                          {"activations_log", s.activations_log},
                          {"transitions_log", s.transitions_log},
                          {"noise_log", s.noise_log},
                          {"checkpoint", s.checkpoint},
                          {"ok", s.ok}});
  }
  j["checkpoint_lineage"] = json::array();
  for (const auto& c : checkpoint_lineage)
    j["checkpoint_lineage"].push_back({{"path", c.path}, {"hash", c.hash}});

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("manifest: cannot write " + path);
  out << j.dump(2) << '\n';
}

RunManifest RunManifest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("manifest: cannot open " + path);
  json j;
  in >> j;
  RunManifest m;
  m.run_id = j.at("run_id").get<std::string>();
  m.config_hash = j.at("config_hash").get<std::string>();
  m.code_version = j.at("code_version").get<std::string>();
  m.node_count = j.at("node_count").get<int>();
  m.topology_fingerprint = j.at("topology_fingerprint").get<std::string>();
  for (const auto& s : j.at("slots")) {
    SlotRecord r;
    r.day = s.at("day").get<int>();
    r.slot = s.at("slot").get<int>();
    r.mode = s.at("mode").get<std::string>();
    r.start_s = s.at("start_s").get<double>();
    r.end_s = s.at("end_s").get<double>();
    r.frames_log = s.at("frames_log").get<std::string>();
    r.activations_log = s.at("activations_log").get<std::string>();
    r.transitions_log = s.at("transitions_log").get<std::string>();
    r.noise_log = s.at("noise_log").get<std::string>();
    r.checkpoint = s.at("checkpoint").get<std::string>();
    r.ok = s.at("ok").get<bool>();
    m.slots.push_back(r);
  }
  for (const auto& c : j.at("checkpoint_lineage"))
    m.checkpoint_lineage.push_back({c.at("path").get<std::string>(),
                                    c.at("hash").get<std::string>()});
  return m;
}

std::vector<SlotSpec> schedule_slots(const std::vector<SlotSpec>& slots, Rng& rng) {
  if (slots.empty()) throw std::invalid_argument("schedule: empty slot list");
  std::vector<SlotSpec> out = slots;
  for (std::size_t i = out.size(); i > 1; --i)
    std::swap(out[i - 1], out[rng.uniform_index(i)]);
  return out;
}

namespace {

// The shared simulated world: sculpture, behaviour engine, visitors, logs.
class World {
 public:
  World(const RunConfig& cfg, const NodeTopology* topology)
      : sculpture_(*topology),
        engine_(topology, Rng(cfg.sim_seed).split({1}).next_u64()),
        crowd_(topology, load_scenario(cfg, topology)),
        params_(cfg.pb_params) {
    engine_.reset(params_, 0.0);
  }

  double now() const { return static_cast<double>(tick_index_) * kTickSeconds; }

  void set_params(const ParamVector& params) { params_ = params; }
  const ParamVector& params() const { return params_; }

  void attach_logs(JsonlWriter* frames, JsonlWriter* activations) {
    frames_log_ = frames;
    activations_log_ = activations;
  }

  // One 0.1s step: move time, move visitors, read sensors, run the
  // behaviour engine, apply its commands.
  IrFrame tick() {
    ++tick_index_;
    const double now_s = now();
    sculpture_.step(kTickSeconds);
    crowd_.step(sculpture_, now_s, kTickSeconds);
    IrFrame frame = sculpture_.read_ir_frame();
    // Stamp with the tick-exact clock; the sculpture's accumulated time
    // drifts by ulps and can smear a frame across a minute boundary.
    frame.timestamp = now_s;

    if (frames_log_)
      frames_log_->write({{"t", frame.timestamp}, {"ir", frame.readings}});

    auto out = engine_.tick(params_, frame, now_s);
    for (const auto& marker : out.markers)
      if (activations_log_)
        activations_log_->write({{"t", marker.time},
                                 {"node", marker.node},
                                 {"actuator", "-"},
                                 {"event", marker.event}});
    for (const auto& act : out.activations) {
      const ApplyResult result = sculpture_.activate(act.node, act.channel, act.envelope);
      if (activations_log_) {
        const char* event = result == ApplyResult::Applied          ? "start"
                            : result == ApplyResult::SkippedCooldown ? "skip_cooldown"
                                                                     : "skip_busy";
        activations_log_->write({{"t", now_s},
                                 {"t_sched", act.time},
                                 {"node", act.node},
                                 {"actuator", actuator_name(act.channel)},
                                 {"event", event},
                                 {"cause", to_string(act.cause)},
                                 {"cascade", act.cascade_id}});
      }
    }
    return frame;
  }

  Sculpture& sculpture() { return sculpture_; }

 private:
  static VisitorScenario load_scenario(const RunConfig& cfg, const NodeTopology* topology) {
    (void)topology;
    if (!cfg.scenario_file.empty()) return VisitorScenario::from_json_file(cfg.scenario_file);
    double total_minutes = 0.0;
    for (const auto& s : cfg.slots_per_day) total_minutes += s.minutes;
    const double duration_s = cfg.days * total_minutes * 60.0;
    return VisitorScenario::generate(
        cfg.visitor_seed, duration_s, cfg.visitor_arrivals_per_min, cfg.visitor_mean_dwell_s,
        {VisitorBehaviour::Wanderer, VisitorBehaviour::HandRaiser,
         VisitorBehaviour::BrightestLedSeeker});
  }

  Sculpture sculpture_;
  PbEngine engine_;
  VisitorCrowd crowd_;
  ParamVector params_;
  std::int64_t tick_index_ = 0;
  JsonlWriter* frames_log_ = nullptr;
  JsonlWriter* activations_log_ = nullptr;
};

// Env adapter: one agent interaction = 20 world ticks; the action retunes
// the behaviour parameters, which take hold at the next trigger or
// background event.
class SculptureEnv : public Env {
 public:
  SculptureEnv(World& world, const ParamVector& pb_defaults, int node_count)
      : world_(world), pb_defaults_(pb_defaults), node_count_(node_count) {}

  int obs_dim() const override { return node_count_; }
  int act_dim() const override { return kActionDim; }
  double time() const override { return world_.now(); }

  Eigen::VectorXd reset() override { return advance_window(); }

  StepResult step(const Eigen::VectorXd& action) override {
    std::array<double, kActionDim> a{};
    for (int j = 0; j < kActionDim; ++j) a[static_cast<std::size_t>(j)] = action[j];
    world_.set_params(scale_action_to_params(a));
    StepResult out;
    out.next_obs = advance_window();
    out.reward = engagement_reward(out.next_obs);
    return out;
  }

  // Restores the pre-scripted defaults (end of a learning slot).
  void restore_defaults() { world_.set_params(pb_defaults_); }

 private:
  Eigen::VectorXd advance_window() {
    std::vector<IrFrame> window;
    window.reserve(kObservationFrames);
    for (int i = 0; i < kObservationFrames; ++i) window.push_back(world_.tick());
    return build_observation(window).values;
  }

  World& world_;
  ParamVector pb_defaults_;
  int node_count_;
};

}  // namespace

RunManifest run(const RunConfig& config) {
  if (config.slots_per_day.empty())
    throw std::invalid_argument("run: config has no slots");

  const NodeTopology topology =
      config.topology_file.empty()
          ? NodeTopology::grid(config.grid_rows, config.grid_cols, config.grid_spacing_m)
          : NodeTopology::from_json_file(config.topology_file);

  fs::create_directories(config.out_dir);

  RunManifest manifest;
  manifest.run_id = config.run_id;
  manifest.config_hash = fnv1a_hex(config.raw_bytes.empty()
                                       ? std::string("<in-memory>") + config.run_id
                                       : config.raw_bytes);
  manifest.code_version = kCodeVersion;
  manifest.node_count = topology.node_count();
  {
    std::ostringstream fp;
    fp << std::hex << topology.fingerprint();
    manifest.topology_fingerprint = fp.str();
  }

  World world(config, &topology);
  Rng schedule_rng = Rng(config.sim_seed).split({2});

  DdpgConfig agent_cfg = config.agent;
  agent_cfg.obs_dim = topology.node_count();
  agent_cfg.act_dim = kActionDim;
  DdpgAgent agent(agent_cfg, config.agent_seed);
  if (!config.resume_checkpoint.empty()) {
    load_checkpoint(agent, config.resume_checkpoint);
    manifest.checkpoint_lineage.push_back(
        {config.resume_checkpoint, file_hash_hex(config.resume_checkpoint)});
  }
  int pla_slot_ordinal = static_cast<int>(manifest.checkpoint_lineage.size());

  bool failed = false;
  for (int day = 0; day < config.days && !failed; ++day) {
    Rng day_rng = schedule_rng.split({static_cast<std::uint64_t>(day)});
    const auto todays = schedule_slots(config.slots_per_day, day_rng);
    bool sigma_reset_done = false;

    for (int slot_index = 0; slot_index < static_cast<int>(todays.size()); ++slot_index) {
      const auto& slot = todays[static_cast<std::size_t>(slot_index)];
      SlotRecord record;
      record.day = day;
      record.slot = slot_index;
      record.mode = slot.mode;
      record.start_s = world.now();

      const std::string stem = config.out_dir + "/day" + std::to_string(day) + "_slot" +
                               std::to_string(slot_index) + "_" + slot.mode;
      record.frames_log = stem + ".frames.jsonl";
      record.activations_log = stem + ".activations.jsonl";

      try {
        JsonlWriter frames(record.frames_log);
        JsonlWriter activations(record.activations_log);
        world.attach_logs(&frames, &activations);

        const std::int64_t slot_ticks =
            static_cast<std::int64_t>(std::llround(slot.minutes * 60.0 / kTickSeconds));

        if (slot.mode == "PB") {
          for (std::int64_t i = 0; i < slot_ticks; ++i) world.tick();
        } else {
          record.transitions_log = stem + ".transitions.jsonl";
          record.noise_log = stem + ".noise.jsonl";
          JsonlWriter transitions(record.transitions_log);
          JsonlWriter noise(record.noise_log);

          if (!sigma_reset_done) {
            agent.reset_noise_sigma();  // day start
            sigma_reset_done = true;
          }

          SculptureEnv env(world, config.pb_params, topology.node_count());
          Eigen::VectorXd obs = env.reset();
          std::int64_t interactions_left = slot_ticks / kObservationFrames - 1;
          while (interactions_left > 0) {
            const int steps = static_cast<int>(std::min<std::int64_t>(
                interactions_left, agent.config().episode_length));
            const EpisodeLog log = run_episode(env, agent, obs, steps);
            for (const auto& step : log.steps) {
              std::vector<double> obs_v(step.obs.data(), step.obs.data() + step.obs.size());
              std::vector<double> act_v(step.action.data(),
                                        step.action.data() + step.action.size());
              transitions.write({{"t", step.time},
                                 {"obs", obs_v},
                                 {"action", act_v},
                                 {"reward", step.reward},
                                 {"sigma", step.sigma}});
            }
            for (const auto& ev : log.noise_events)
              noise.write({{"step", ev.step},
                           {"d", ev.distance},
                           {"sigma_before", ev.sigma_before},
                           {"sigma_after", ev.sigma_after}});
            obs = log.final_obs;
            interactions_left -= steps;
          }
          env.restore_defaults();

          record.checkpoint =
              config.out_dir + "/day_" + std::to_string(pla_slot_ordinal) + ".ckpt";
          save_checkpoint(agent, record.checkpoint);
          manifest.checkpoint_lineage.push_back(
              {record.checkpoint, file_hash_hex(record.checkpoint)});
          ++pla_slot_ordinal;
        }

        world.attach_logs(nullptr, nullptr);
        record.end_s = world.now();
        record.ok = true;
      } catch (const std::exception&) {
        world.attach_logs(nullptr, nullptr);
        record.end_s = world.now();
        record.ok = false;
        failed = true;
      }
      manifest.slots.push_back(record);
      if (failed) break;
    }
  }

  manifest.save(config.out_dir + "/manifest.json");
  if (failed) throw std::runtime_error("run: a slot failed; see manifest in " + config.out_dir);
  return manifest;
}

namespace {

struct MinuteRow {
  long long minute = 0;
  int day = 0;
  std::string mode;
  double engagement_raw = 0.0;
  double active_raw = 0.0;
  std::optional<double> engagement_cal;
  std::optional<double> active_cal;
};

std::vector<IrFrame> frames_from_log(const std::string& path) {
  std::vector<IrFrame> frames;
  for (const auto& rec : read_jsonl(path)) {
    IrFrame f;
    f.timestamp = rec.at("t").get<double>();
    f.readings = rec.at("ir").get<std::vector<double>>();
    frames.push_back(std::move(f));
  }
  return frames;
}

double sample_se(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

}  // namespace

void report(const std::vector<RunManifest>& manifests, const ReportOptions& options) {
  if (manifests.empty()) throw std::invalid_argument("report: no manifests");
  for (const auto& m : manifests) {
    if (m.node_count != manifests.front().node_count ||
        m.topology_fingerprint != manifests.front().topology_fingerprint)
      throw std::invalid_argument("report: manifests use incompatible topologies");
  }
  fs::create_directories(options.out_dir);

  // Optional calibration profile from the pooled no-visitor window.
  std::optional<CalibrationProfile> profile;
  if (options.calibration_window) {
    std::vector<IrFrame> pool;
    for (const auto& m : manifests)
      for (const auto& slot : m.slots) {
        if (!slot.ok) continue;
        for (auto& f : frames_from_log(slot.frames_log))
          if (f.timestamp >= options.calibration_window->first &&
              f.timestamp <= options.calibration_window->second)
            pool.push_back(std::move(f));
      }
    profile = CalibrationProfile::from_frames(pool, options.calibration_window->first,
                                              options.calibration_window->second);
  }

  std::vector<MinuteRow> rows;
  for (const auto& m : manifests) {
    for (const auto& slot : m.slots) {
      if (!slot.ok) continue;
      const auto frames = frames_from_log(slot.frames_log);
      const auto buckets = bucket_by_minute(frames, options.sample_rate_hz);
      std::map<long long, MinuteWindow> calibrated;
      if (profile) {
        const auto cal = calibrate(frames, *profile);
        calibrated = bucket_by_minute(cal.frames, options.sample_rate_hz);
      }
      for (const auto& [minute, window] : buckets) {
        MinuteRow row;
        row.minute = minute;
        row.day = slot.day;
        row.mode = slot.mode;
        row.engagement_raw = engagement(window);
        row.active_raw = active_count(window);
        if (profile) {
          const auto it = calibrated.find(minute);
          if (it != calibrated.end()) {
            row.engagement_cal = engagement(it->second);
            row.active_cal = active_count(it->second);
          }
        }
        rows.push_back(std::move(row));
      }
    }
  }

  {
    std::ofstream out(options.out_dir + "/per_minute.csv", std::ios::trunc);
    out << "minute_start_s,day,mode,engagement,active_count";
    if (profile) out << ",engagement_calibrated,active_count_calibrated";
    out << '\n';
    for (const auto& r : rows) {
      out << r.minute * 60 << ',' << r.day << ',' << r.mode << ','
          << fmt_double(r.engagement_raw) << ',' << fmt_double(r.active_raw);
      if (profile)
        out << ',' << (r.engagement_cal ? fmt_double(*r.engagement_cal) : "")
            << ',' << (r.active_cal ? fmt_double(*r.active_cal) : "");
      out << '\n';
    }
  }

  std::map<std::string, std::vector<double>> eng_by_mode, act_by_mode;
  for (const auto& r : rows) {
    eng_by_mode[r.mode].push_back(r.engagement_raw);
    act_by_mode[r.mode].push_back(r.active_raw);
  }

  {
    std::ofstream out(options.out_dir + "/summary.csv", std::ios::trunc);
    out << "mode,minutes,engagement_mean,engagement_se,active_mean,active_se\n";
    for (const auto& [mode, eng] : eng_by_mode) {
      const auto& act = act_by_mode[mode];
      out << mode << ',' << eng.size() << ',' << fmt_double(mean_of(eng)) << ','
          << fmt_double(sample_se(eng)) << ',' << fmt_double(mean_of(act)) << ','
          << fmt_double(sample_se(act)) << '\n';
    }
  }

  const bool comparable = eng_by_mode.contains("PB") && eng_by_mode.contains("PLA");
  if (comparable) {
    auto write_qq = [&](const std::string& name, const std::vector<double>& pb,
                        const std::vector<double>& pla) {
      std::ofstream out(options.out_dir + "/" + name, std::ios::trunc);
      out << "q,pb,pla\n";
      int q = 0;
      for (const auto& [x, y] : qq_table(pb, pla))
        out << q++ << ',' << fmt_double(x) << ',' << fmt_double(y) << '\n';
    };
    write_qq("qq_engagement.csv", eng_by_mode["PB"], eng_by_mode["PLA"]);
    write_qq("qq_active.csv", act_by_mode["PB"], act_by_mode["PLA"]);

    std::ofstream out(options.out_dir + "/mann_whitney.csv", std::ios::trunc);
    out << "metric,u,p_two_sided,exact\n";
    const auto mw_e = mann_whitney_u(eng_by_mode["PB"], eng_by_mode["PLA"]);
    out << "engagement," << fmt_double(mw_e.u_a) << ',' << fmt_double(mw_e.p_two_sided)
        << ',' << (mw_e.exact ? "true" : "false") << '\n';
    const auto mw_a = mann_whitney_u(act_by_mode["PB"], act_by_mode["PLA"]);
    out << "active_count," << fmt_double(mw_a.u_a) << ',' << fmt_double(mw_a.p_two_sided)
        << ',' << (mw_a.exact ? "true" : "false") << '\n';
  }

  {
    std::map<std::pair<int, std::string>, std::vector<double>> eng_daily, act_daily;
    for (const auto& r : rows) {
      eng_daily[{r.day, r.mode}].push_back(r.engagement_raw);
      act_daily[{r.day, r.mode}].push_back(r.active_raw);
    }
    std::ofstream out(options.out_dir + "/daily.csv", std::ios::trunc);
    out << "day,mode,engagement_mean,active_mean\n";
    for (const auto& [key, eng] : eng_daily)
      out << key.first << ',' << key.second << ',' << fmt_double(mean_of(eng)) << ','
          << fmt_double(mean_of(act_daily[key])) << '\n';
  }
}

}  // namespace las
