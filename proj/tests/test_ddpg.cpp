#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "las/checkpoint.hpp"
#include "las/ddpg.hpp"
#include "las/simplified_env.hpp"

using namespace las;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::vector<IrFrame> constant_frames(int n, double value, int count) {
  std::vector<IrFrame> frames;
  for (int i = 0; i < count; ++i) {
    IrFrame f;
    f.timestamp = 0.1 * (i + 1);
    f.readings.assign(static_cast<std::size_t>(n), value);
    frames.push_back(std::move(f));
  }
  return frames;
}

DdpgConfig small_config() {
  DdpgConfig cfg;
  cfg.obs_dim = 6;
  cfg.act_dim = 6;
  cfg.hidden = {16, 16};
  cfg.batch_size = 8;
  cfg.train_interval = 10;
  cfg.train_times = 2;
  cfg.episode_length = 25;
  cfg.buffer_capacity = 1000;
  return cfg;
}

}  // namespace

TEST_CASE("observation building") {
  auto frames = constant_frames(24, 0.0, 20);
  const Observation zero = build_observation(frames);
  CHECK(zero.values.size() == 24);
  CHECK(zero.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.window_end == doctest::Approx(2.0));

  // Half zeros, half ones: mean 0.5 per sensor.
  for (int i = 10; i < 20; ++i)
    frames[static_cast<std::size_t>(i)].readings.assign(24, 1.0);
  const Observation half = build_observation(frames);
  for (int j = 0; j < 24; ++j) CHECK(half.values[j] == doctest::Approx(0.5).epsilon(1e-15));

  // Twenty identical frames pass through.
  auto same = constant_frames(24, 0.37, 20);
  const Observation identical = build_observation(same);
  for (int j = 0; j < 24; ++j) CHECK(identical.values[j] == doctest::Approx(0.37).epsilon(1e-15));

  frames.pop_back();
  CHECK_THROWS_AS(build_observation(frames), std::invalid_argument);
}

TEST_CASE("engagement reward is the component sum") {
  CHECK(engagement_reward(VectorXd::Zero(24)) == 0.0);
  CHECK(engagement_reward(VectorXd::Ones(24)) == 24.0);
  VectorXd one(24);
  one.setZero();
  one[7] = 0.5;
  CHECK(engagement_reward(one) == 0.5);
}

TEST_CASE("fresh parameter-noise actions") {
  Rng rng(1);
  DenseNet actor(actor_spec(6, 4, {8}));
  actor.init_random(rng);
  VectorXd obs = VectorXd::Constant(6, 0.4);

  Rng a(7), b(7), c(9);
  CHECK(act_with_parameter_noise(actor, obs, 0.0, a) == actor.forward_batch(obs).col(0));
  const VectorXd first = act_with_parameter_noise(actor, obs, 0.3, b);
  Rng b2(7);
  b2.uniform();  // offset b2? no - rebuild identical stream
  Rng b3(7);
  const VectorXd again = act_with_parameter_noise(actor, obs, 0.3, b3);
  CHECK(first == again);
  const VectorXd wild = act_with_parameter_noise(actor, obs, 50.0, c);
  for (int i = 0; i < wild.size(); ++i) {
    CHECK(wild[i] >= -1.0);
    CHECK(wild[i] <= 1.0);
  }
}

TEST_CASE("action scaling endpoints, midpoints and round trip") {
  std::array<double, kActionDim> a{};
  a.fill(-1.0);
  ParamVector lo = scale_action_to_params(a);
  CHECK(lo.t_ru_m == 0.0);
  CHECK(lo.t_sma == 1.0);
  CHECK(lo.i_max == 0.0);
  // Excluded dimensions stay at the defaults.
  CHECK(lo.t_bg_min == 45.0);
  CHECK(lo.t_bg_max == 90.0);
  CHECK(lo.t_w == 5.0);
  CHECK(lo.p == 0.4);
  CHECK(lo.t_sw_min == 120.0);
  CHECK(lo.t_sw_max == 240.0);

  a.fill(1.0);
  ParamVector hi = scale_action_to_params(a);
  CHECK(hi.t_ru_m == 5.0);
  CHECK(hi.t_sma == 5.0);
  CHECK(hi.i_max == 100.0);

  a.fill(0.0);
  ParamVector mid = scale_action_to_params(a);
  CHECK(mid.i_max == 50.0);
  CHECK(mid.t_ru_m == 2.5);

  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    std::array<double, kActionDim> x{};
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    const auto back = normalize_params(scale_action_to_params(x));
    for (int j = 0; j < kActionDim; ++j)
      CHECK(std::abs(back[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(j)]) <= 1e-9);
  }
}

TEST_CASE("noise adaptation follows the threshold rule") {
  Rng rng(3);
  DenseNet actor(actor_spec(4, 3, {8}));
  actor.init_random(rng);
  MatrixXd obs(4, 16);
  for (int i = 0; i < obs.size(); ++i) obs.data()[i] = rng.uniform(0.0, 1.0);

  SUBCASE("identical policies grow sigma by alpha") {
    NoiseState noise{0.1, 1.01, 0.1};
    const double d = adapt_noise(noise, actor, actor, obs);
    CHECK(d == 0.0);
    CHECK(noise.sigma == 0.1 * 1.01);
  }

  SUBCASE("a far-off perturbation shrinks sigma") {
    DenseNet far = actor;
    for (auto& p : far.params()) p += 3.0;
    NoiseState noise{0.101, 1.01, 0.1};
    const double d = adapt_noise(noise, actor, far, obs);
    CHECK(d > 0.1);
    CHECK(noise.sigma == doctest::Approx(0.1).epsilon(1e-12));
  }

  SUBCASE("distance is the root mean square over batch and dims") {
    DenseNet shifted = actor;
    // Shift only the output bias of the final tanh layer: hard to predict
    // exactly, so check against a direct recomputation instead.
    for (auto& p : shifted.params()) p += 0.01;
    NoiseState noise{0.1, 1.01, 0.1};
    const double d = adapt_noise(noise, actor, shifted, obs);
    const MatrixXd pa = actor.forward_batch(obs);
    const MatrixXd pb = shifted.forward_batch(obs);
    const double expect = std::sqrt((pa - pb).squaredNorm() / static_cast<double>(pa.size()));
    CHECK(d == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("training is a no-op until the buffer holds a batch") {
  DdpgConfig cfg = small_config();
  cfg.batch_size = 64;
  DdpgAgent agent(cfg, 11);
  const auto actor_before = agent.actor().params();
  const auto critic_before = agent.critic().params();
  const double sigma_before = agent.noise().sigma;

  VectorXd obs = VectorXd::Constant(6, 0.2);
  VectorXd act = VectorXd::Constant(6, 0.1);
  for (int i = 0; i < 10; ++i) agent.record(obs, act, 1.0, obs);
  CHECK_FALSE(agent.train_iteration());
  CHECK(agent.actor().params() == actor_before);
  CHECK(agent.critic().params() == critic_before);
  CHECK(agent.noise().sigma == sigma_before);
}

TEST_CASE("gamma 0 with constant reward regresses the critic to 1") {
  DdpgConfig cfg = small_config();
  cfg.gamma = 0.0;
  cfg.batch_size = 8;
  DdpgAgent agent(cfg, 17);

  VectorXd obs = VectorXd::Constant(6, 0.3);
  VectorXd act = VectorXd::Constant(6, -0.2);
  for (int i = 0; i < 16; ++i) agent.record(obs, act, 1.0, obs);

  for (int i = 0; i < 4000; ++i) agent.train_iteration();

  Eigen::VectorXd joined(12);
  joined.topRows(6) = obs;
  joined.bottomRows(6) = act;
  const double q = agent.critic().forward_batch(joined)(0, 0);
  CHECK(std::abs(q - 1.0) <= 1e-2);

  for (double p : agent.actor().params()) CHECK(std::isfinite(p));
  for (double p : agent.critic().params()) CHECK(std::isfinite(p));
}

TEST_CASE("TD targets come from the target networks only") {
  DdpgConfig cfg = small_config();
  DdpgAgent agent(cfg, 19);
  VectorXd obs = VectorXd::Constant(6, 0.3);
  VectorXd act = VectorXd::Constant(6, -0.2);
  for (int i = 0; i < 16; ++i) agent.record(obs, act, 1.0, obs);

  agent.actor().reset_forward_count();
  agent.critic().reset_forward_count();
  agent.actor_target().reset_forward_count();
  agent.critic_target().reset_forward_count();

  REQUIRE(agent.train_iteration());

  // Target nets: exactly one batch evaluation each, for the TD target.
  CHECK(agent.actor_target().forward_count() == 1);
  CHECK(agent.critic_target().forward_count() == 1);
  // Live actor: distance measurement + policy-gradient forward.
  CHECK(agent.actor().forward_count() == 2);
  // Live critic: TD loss forward + policy-gradient forward.
  CHECK(agent.critic().forward_count() == 2);
}

TEST_CASE("episodes append transitions and train on schedule") {
  DdpgConfig cfg = small_config();
  SimplifiedLine env(6, 1, 23);
  DdpgAgent agent(cfg, 29);

  // Pre-fill so every burst actually trains.
  VectorXd obs = VectorXd::Constant(6, 0.1);
  for (int i = 0; i < cfg.batch_size; ++i) agent.record(obs, obs, 0.0, obs);
  const auto pre = agent.buffer().push_count();

  const EpisodeLog log = run_episode(env, agent, env.reset());
  CHECK(log.steps.size() == 25);
  CHECK(agent.buffer().push_count() == pre + 25);
  // 25 steps / interval 10 -> bursts at steps 10 and 20, each train_times=2.
  CHECK(log.noise_events.size() == 4);

  // Noise log semantics: every transition is exactly *alpha or /alpha and
  // matches the measured distance.
  for (const auto& ev : log.noise_events) {
    const bool grew = ev.sigma_after == ev.sigma_before * cfg.noise_alpha;
    const bool shrank = ev.sigma_after == ev.sigma_before / cfg.noise_alpha;
    CHECK((grew || shrank));
    CHECK(grew == (ev.distance <= cfg.noise_delta));
  }

  // Chained episodes start from the previous final observation.
  const EpisodeLog next = run_episode(env, agent, log.final_obs);
  CHECK(next.steps.front().obs == log.final_obs);
}

TEST_CASE("full-length episode matches the published cadence") {
  DdpgConfig cfg;
  cfg.obs_dim = 6;
  cfg.act_dim = 6;
  cfg.hidden = {8, 8};
  cfg.batch_size = 4;
  SimplifiedLine env(6, 1, 31);
  DdpgAgent agent(cfg, 37);

  VectorXd obs = VectorXd::Constant(6, 0.1);
  for (int i = 0; i < cfg.batch_size; ++i) agent.record(obs, obs, 0.0, obs);
  const auto pre = agent.buffer().push_count();

  const EpisodeLog log = run_episode(env, agent, env.reset());
  CHECK(log.steps.size() == 100);
  CHECK(agent.buffer().push_count() == pre + 100);
  CHECK(log.noise_events.size() == 200);  // 10 bursts x 20 iterations
}

TEST_CASE("replay buffer ring semantics") {
  ReplayBuffer buffer(3, 2, 5);
  Rng rng(41);
  for (int i = 0; i < 8; ++i) {
    VectorXd obs = VectorXd::Constant(3, static_cast<double>(i));
    VectorXd act = VectorXd::Constant(2, 0.0);
    buffer.push(obs, act, static_cast<double>(i), obs);
  }
  CHECK(buffer.size() == 5);
  CHECK(buffer.push_count() == 8);
  // Oldest three evicted: samples only ever come from values 3..7.
  for (int trial = 0; trial < 100; ++trial) {
    const auto batch = buffer.sample(4, rng);
    for (int j = 0; j < 4; ++j) {
      CHECK(batch.rewards[j] >= 3.0);
      CHECK(batch.rewards[j] <= 7.0);
    }
  }
  CHECK_THROWS_AS(ReplayBuffer(0, 1, 4), std::invalid_argument);
}

TEST_CASE("checkpoint round trip is bit exact and guarded") {
  namespace fs = std::filesystem;
  const std::string dir = (fs::temp_directory_path() / "las_ckpt_test").string();
  fs::create_directories(dir);
  const std::string path = dir + "/agent.ckpt";

  DdpgConfig cfg = small_config();
  DdpgAgent agent(cfg, 43);
  // Make the state non-trivial first.
  VectorXd obs = VectorXd::Constant(6, 0.4);
  for (int i = 0; i < 32; ++i) agent.record(obs, obs, 0.5, obs);
  for (int i = 0; i < 10; ++i) agent.train_iteration();
  save_checkpoint(agent, path);

  DdpgAgent restored(cfg, 999);  // different seed, then overwritten by load
  load_checkpoint(restored, path);
  CHECK(restored.actor().params() == agent.actor().params());
  CHECK(restored.critic().params() == agent.critic().params());
  CHECK(restored.actor_target().params() == agent.actor_target().params());
  CHECK(restored.critic_target().params() == agent.critic_target().params());
  CHECK(restored.actor_adam().m == agent.actor_adam().m);
  CHECK(restored.actor_adam().v == agent.actor_adam().v);
  CHECK(restored.actor_adam().step == agent.actor_adam().step);
  CHECK(restored.critic_adam().step == agent.critic_adam().step);
  CHECK(restored.noise().sigma == agent.noise().sigma);

  Rng rng(47);
  for (int i = 0; i < 100; ++i) {
    VectorXd x(6);
    for (int j = 0; j < 6; ++j) x[j] = rng.uniform(0.0, 1.0);
    CHECK(agent.act_greedy(x) == restored.act_greedy(x));
  }

  SUBCASE("architecture mismatch fails cleanly") {
    DdpgConfig other = cfg;
    other.hidden = {16, 8};
    DdpgAgent wrong(other, 1);
    const auto before = wrong.actor().params();
    CHECK_THROWS_AS(load_checkpoint(wrong, path), std::runtime_error);
    CHECK(wrong.actor().params() == before);  // untouched on failure
  }

  SUBCASE("corrupt header fails cleanly") {
    std::string bytes;
    {
      std::ifstream in(path, std::ios::binary);
      bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    bytes[3] = 'X';  // clobber the magic
    const std::string bad = dir + "/bad.ckpt";
    std::ofstream(bad, std::ios::binary) << bytes;
    DdpgAgent victim(cfg, 2);
    CHECK_THROWS_AS(load_checkpoint(victim, bad), std::runtime_error);
  }

  SUBCASE("truncated payload fails cleanly") {
    std::string bytes;
    {
      std::ifstream in(path, std::ios::binary);
      bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    bytes.resize(bytes.size() / 2);
    const std::string cut = dir + "/cut.ckpt";
    std::ofstream(cut, std::ios::binary) << bytes;
    DdpgAgent victim(cfg, 2);
    const auto before = victim.actor().params();
    CHECK_THROWS_AS(load_checkpoint(victim, cut), std::runtime_error);
    CHECK(victim.actor().params() == before);
  }
}

TEST_CASE("identical seeds give identical training trajectories") {
  auto run = [] {
    DdpgConfig cfg = small_config();
    SimplifiedLine env(6, 1, 5);
    DdpgAgent agent(cfg, 71);
    Eigen::VectorXd obs = env.reset();
    for (int e = 0; e < 3; ++e) {
      const EpisodeLog log = run_episode(env, agent, obs);
      obs = log.final_obs;
    }
    return agent.actor().params();
  };
  CHECK(run() == run());
}
