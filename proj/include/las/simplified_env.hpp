#pragma once

#include <vector>

#include <Eigen/Core>

#include "las/ddpg.hpp"
#include "las/rng.hpp"
#include "las/sculpture.hpp"

namespace las {

// Sanity-check world: K LED cells in a line, visitors chase the brightest
// LED one cell per step, IR readings fall off triangularly with distance
// (1 at the visitor's cell, 0.5 one cell away, 0 beyond). Reward is the sum
// of readings, so parking spread-out visitors is optimal.
struct SimplifiedEnvState {
  int cell_count = 24;
  std::vector<int> visitor_cells;
  std::vector<double> led_intensity;  // [0,1] per cell
  double sim_time = 0.0;
};

// Triangular proximity response by cell distance.
double proximity_kernel(int cell_distance);

SimplifiedEnvState make_simplified_env(int cell_count, int visitor_count, Rng& rng);

struct SimplifiedStep {
  IrFrame frame;
  double reward = 0.0;
};

// Applies the raw LED action (one [-1,1] component per cell), moves each
// visitor one cell toward its nearest brightest LED (ties break to the lower
// cell index), then reads the sensors.
SimplifiedStep step_simplified(SimplifiedEnvState& env, const std::vector<double>& raw_action);

// Highest per-step reward any visitor arrangement can produce; brute-forced
// over all multisets of visitor positions. Bounded to K <= 24, V <= 4.
double oracle_reward(int cell_count, int visitor_count);

// Gym-style adapter: observation is the current IR frame, action drives the
// K LEDs, reward is the frame sum. Visitors re-spawn on reset at seeded
// random cells at least 3 apart (co-located visitors can never separate
// under the movement rule, so such starts are not sampled).
class SimplifiedLine : public Env {
 public:
  SimplifiedLine(int cell_count, int visitor_count, std::uint64_t seed);

  int obs_dim() const override { return state_.cell_count; }
  int act_dim() const override { return state_.cell_count; }
  Eigen::VectorXd reset() override;
  StepResult step(const Eigen::VectorXd& action) override;
  double time() const override { return state_.sim_time; }

  const SimplifiedEnvState& state() const { return state_; }

 private:
  Eigen::VectorXd frame_vector() const;

  SimplifiedEnvState state_;
  int visitor_count_;
  Rng rng_;
};

}  // namespace las
