#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "las/ddpg.hpp"

namespace las {

struct BenchSeedResult {
  std::uint64_t seed = 0;
  bool ran = false;
  bool converged = false;
  int episodes_run = 0;
  int converged_at = -1;       // episode index (1-based) where the window passed
  double final_window_avg = 0.0;  // mean per-step reward over the last 10 episodes
};

struct BenchResult {
  double oracle = 0.0;
  double target = 0.0;  // fraction * oracle
  std::vector<BenchSeedResult> seeds;
  int converged_count = 0;
  bool pass = false;
};

struct BenchOptions {
  int cells = 24;
  int visitors = 2;
  int max_episodes = 100;
  int episode_steps = 1000;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  int required = 3;         // seeds that must converge
  double fraction = 0.9;    // of the oracle reward
  int window = 10;          // trailing episodes averaged
  bool stop_when_decided = true;
  std::ostream* progress = nullptr;
};

// Learning smoke test on the line world: a seed converges when its trailing
// 10-episode average per-step reward reaches 90% of the brute-force oracle
// within the episode budget.
BenchResult bench_simplified(const BenchOptions& options);

}  // namespace las
