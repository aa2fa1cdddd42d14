#include "las/simplified_env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace las {

double proximity_kernel(int cell_distance) {
  const int d = std::abs(cell_distance);
  if (d == 0) return 1.0;
  if (d == 1) return 0.5;
  return 0.0;
}

SimplifiedEnvState make_simplified_env(int cell_count, int visitor_count, Rng& rng) {
  if (cell_count < 1) throw std::invalid_argument("simplified: cell_count must be >= 1");
  if (visitor_count < 0) throw std::invalid_argument("simplified: negative visitor count");
  SimplifiedEnvState env;
  env.cell_count = cell_count;
  env.led_intensity.assign(static_cast<std::size_t>(cell_count), 0.0);

  const bool spreadable = 3 * visitor_count - 2 <= cell_count;
  while (static_cast<int>(env.visitor_cells.size()) < visitor_count) {
    const int cell = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(cell_count)));
    bool ok = true;
    if (spreadable)
      for (int other : env.visitor_cells)
        if (std::abs(other - cell) < 3) ok = false;
    if (ok) env.visitor_cells.push_back(cell);
  }
  return env;
}

namespace {

int brightest_target(const SimplifiedEnvState& env, int from) {
  const double peak =
      *std::max_element(env.led_intensity.begin(), env.led_intensity.end());
  int best = -1;
  int best_dist = env.cell_count + 1;
  for (int c = 0; c < env.cell_count; ++c) {
    if (env.led_intensity[static_cast<std::size_t>(c)] != peak) continue;
    const int dist = std::abs(c - from);
    if (dist < best_dist) {
      best_dist = dist;
      best = c;
    }
  }
  return best;
}

IrFrame read_line_frame(const SimplifiedEnvState& env) {
  IrFrame frame;
  frame.timestamp = env.sim_time;
  frame.readings.assign(static_cast<std::size_t>(env.cell_count), 0.0);
  for (int c = 0; c < env.cell_count; ++c) {
    double best = 0.0;
    for (int v : env.visitor_cells) best = std::max(best, proximity_kernel(c - v));
    frame.readings[static_cast<std::size_t>(c)] = best;
  }
  return frame;
}

}  // namespace

SimplifiedStep step_simplified(SimplifiedEnvState& env, const std::vector<double>& raw_action) {
  if (static_cast<int>(raw_action.size()) != env.cell_count)
    throw std::invalid_argument("simplified: action length mismatch");
  for (int c = 0; c < env.cell_count; ++c)
    env.led_intensity[static_cast<std::size_t>(c)] =
        raw_to_intensity_fraction(raw_action[static_cast<std::size_t>(c)]);

  for (int& pos : env.visitor_cells) {
    const int target = brightest_target(env, pos);
    if (target > pos) ++pos;
    else if (target < pos) --pos;
  }
  env.sim_time += kTickSeconds;

  SimplifiedStep out;
  out.frame = read_line_frame(env);
  for (double r : out.frame.readings) out.reward += r;
  return out;
}

double oracle_reward(int cell_count, int visitor_count) {
  if (cell_count < 1 || cell_count > 24)
    throw std::invalid_argument("oracle: cell_count outside brute-force bound");
  if (visitor_count < 0 || visitor_count > 4)
    throw std::invalid_argument("oracle: visitor_count outside brute-force bound");
  if (visitor_count == 0) return 0.0;

  std::vector<int> positions(static_cast<std::size_t>(visitor_count), 0);
  double best = 0.0;
  while (true) {
    double reward = 0.0;
    for (int c = 0; c < cell_count; ++c) {
      double r = 0.0;
      for (int v : positions) r = std::max(r, proximity_kernel(c - v));
      reward += r;
    }
    best = std::max(best, reward);

    // Next non-decreasing position tuple.
    int i = visitor_count - 1;
    while (i >= 0 && positions[static_cast<std::size_t>(i)] == cell_count - 1) --i;
    if (i < 0) break;
    const int next = positions[static_cast<std::size_t>(i)] + 1;
    for (int j = i; j < visitor_count; ++j) positions[static_cast<std::size_t>(j)] = next;
  }
  return best;
}

SimplifiedLine::SimplifiedLine(int cell_count, int visitor_count, std::uint64_t seed)
    : visitor_count_(visitor_count), rng_(seed) {
  state_ = make_simplified_env(cell_count, visitor_count, rng_);
}

Eigen::VectorXd SimplifiedLine::frame_vector() const {
  const IrFrame frame = read_line_frame(state_);
  return Eigen::Map<const Eigen::VectorXd>(frame.readings.data(),
                                           static_cast<Eigen::Index>(frame.readings.size()));
}

Eigen::VectorXd SimplifiedLine::reset() {
  const double t = state_.sim_time;
  state_ = make_simplified_env(state_.cell_count, visitor_count_, rng_);
  state_.sim_time = t;
  return frame_vector();
}

Env::StepResult SimplifiedLine::step(const Eigen::VectorXd& action) {
  std::vector<double> raw(action.data(), action.data() + action.size());
  const SimplifiedStep result = step_simplified(state_, raw);
  StepResult out;
  out.next_obs = Eigen::Map<const Eigen::VectorXd>(
      result.frame.readings.data(), static_cast<Eigen::Index>(result.frame.readings.size()));
  out.reward = result.reward;
  return out;
}

}  // namespace las
