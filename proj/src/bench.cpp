#include "las/bench.hpp"

#include <numeric>
#include <ostream>

#include "las/simplified_env.hpp"

namespace las {

namespace {

BenchSeedResult run_seed(const BenchOptions& options, std::uint64_t seed, double target) {
  BenchSeedResult result;
  result.seed = seed;
  result.ran = true;

  const Rng root(seed);
  SimplifiedLine env(options.cells, options.visitors,
                     root.split({0}).next_u64());

  DdpgConfig cfg;
  cfg.obs_dim = options.cells;
  cfg.act_dim = options.cells;
  cfg.episode_length = options.episode_steps;
  DdpgAgent agent(cfg, root.split({1}).next_u64());

  std::vector<double> episode_avgs;
  for (int e = 0; e < options.max_episodes; ++e) {
    const Eigen::VectorXd obs = env.reset();
    const EpisodeLog log = run_episode(env, agent, obs);
    episode_avgs.push_back(log.total_reward / static_cast<double>(log.steps.size()));
    result.episodes_run = e + 1;

    if (static_cast<int>(episode_avgs.size()) >= options.window) {
      const double window_avg =
          std::accumulate(episode_avgs.end() - options.window, episode_avgs.end(), 0.0) /
          static_cast<double>(options.window);
      result.final_window_avg = window_avg;
      if (window_avg >= target) {
        result.converged = true;
        result.converged_at = e + 1;
        break;
      }
    }
    if (options.progress && (e + 1) % 10 == 0)
      *options.progress << "  seed " << seed << ": episode " << e + 1
                        << " avg/step " << episode_avgs.back() << "\n";
  }
  return result;
}

}  // namespace

BenchResult bench_simplified(const BenchOptions& options) {
  BenchResult result;
  result.oracle = oracle_reward(options.cells, options.visitors);
  result.target = options.fraction * result.oracle;

  const int total = static_cast<int>(options.seeds.size());
  for (std::uint64_t seed : options.seeds) {
    BenchSeedResult sr;
    sr.seed = seed;

    const int remaining = total - static_cast<int>(result.seeds.size());
    const bool decided =
        options.stop_when_decided &&
        (result.converged_count >= options.required ||
         result.converged_count + remaining < options.required);
    if (!decided) {
      if (options.progress) *options.progress << "seed " << seed << "...\n";
      sr = run_seed(options, seed, result.target);
      if (sr.converged) ++result.converged_count;
      if (options.progress) {
        *options.progress << "seed " << seed << ": "
                          << (sr.converged ? "converged at episode " : "not converged after ")
                          << (sr.converged ? sr.converged_at : sr.episodes_run)
                          << " (trailing avg " << sr.final_window_avg << ", target "
                          << result.target << ")\n";
      }
    }
    result.seeds.push_back(sr);
  }
  result.pass = result.converged_count >= options.required;
  return result;
}

}  // namespace las
