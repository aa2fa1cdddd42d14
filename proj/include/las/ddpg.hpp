#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "las/nn.hpp"
#include "las/params.hpp"
#include "las/replay_buffer.hpp"
#include "las/rng.hpp"
#include "las/sculpture.hpp"

namespace las {

// Mean of a 2-second window of IR frames (20 ticks at 10Hz).
struct Observation {
  Eigen::VectorXd values;
  double window_end = 0.0;
};

inline constexpr int kObservationFrames = 20;

// Component-wise mean over exactly kObservationFrames consecutive frames.
Observation build_observation(const std::vector<IrFrame>& frames);

// Engagement reward: sum of the next observation's components.
double engagement_reward(const Eigen::VectorXd& next_obs);

// Adaptive parameter-space exploration noise.
struct NoiseState {
  double sigma = 0.1;
  double alpha = 1.01;
  double delta = 0.1;
};

// Action-space distance between the plain and perturbed policies over a
// batch of observations: sqrt of the mean squared componentwise difference.
double policy_distance(const DenseNet& actor, const DenseNet& perturbed,
                       const Eigen::MatrixXd& obs);

// One noise-scale adaptation: grow sigma by alpha while the perturbed policy
// stays within delta of the plain one, shrink otherwise. Returns the
// measured distance.
double adapt_noise(NoiseState& noise, const DenseNet& actor, const DenseNet& perturbed,
                   const Eigen::MatrixXd& obs);

// Evaluates a freshly perturbed copy of the actor (parameters jittered by
// N(0, sigma)); the actor itself is untouched.
Eigen::VectorXd act_with_parameter_noise(const DenseNet& actor, const Eigen::VectorXd& obs,
                                         double sigma, Rng& rng);

struct DdpgConfig {
  int obs_dim = 24;
  int act_dim = kActionDim;
  std::vector<int> hidden = {64, 64};
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  double gamma = 0.99;
  int batch_size = 64;
  std::size_t buffer_capacity = 1000000;
  int train_interval = 10;
  int train_times = 20;
  int episode_length = 100;
  double tau = 0.001;
  double noise_sigma_init = 0.1;
  double noise_alpha = 1.01;
  double noise_delta = 0.1;
};

// One sigma transition, kept for the run log.
struct NoiseEvent {
  std::uint64_t step = 0;  // global interaction count when it happened
  double distance = 0.0;
  double sigma_before = 0.0;
  double sigma_after = 0.0;
};

// Actor-critic learner with target networks, replay, and adaptive
// parameter-space noise. The behaviour policy is a perturbed copy of the
// actor, re-sampled at episode starts and after every sigma update.
class DdpgAgent {
 public:
  DdpgAgent(DdpgConfig config, std::uint64_t seed);

  const DdpgConfig& config() const { return config_; }

  // Draws a fresh parameter perturbation; call when an episode begins.
  void begin_episode();

  // Exploratory action from the perturbed actor, clipped to [-1,1].
  Eigen::VectorXd act(const Eigen::VectorXd& obs);

  // Greedy action from the unperturbed actor (no exploration).
  Eigen::VectorXd act_greedy(const Eigen::VectorXd& obs);

  void record(const Eigen::VectorXd& obs, const Eigen::VectorXd& action, double reward,
              const Eigen::VectorXd& next_obs);

  // One Alg-style training iteration: adapt sigma on a sampled minibatch,
  // regress the critic on target-network TD values, ascend the actor along
  // dQ/da, then soft-update both targets. No-op while the buffer holds
  // fewer than batch_size transitions.
  bool train_iteration();

  // train_times iterations back to back.
  void train_burst();

  std::uint64_t interaction_count() const { return interactions_; }
  const NoiseState& noise() const { return noise_; }
  void reset_noise_sigma() { noise_.sigma = config_.noise_sigma_init; }

  std::vector<NoiseEvent> drain_noise_events();

  ReplayBuffer& buffer() { return buffer_; }
  const ReplayBuffer& buffer() const { return buffer_; }

  DenseNet& actor() { return actor_; }
  DenseNet& critic() { return critic_; }
  DenseNet& actor_target() { return actor_target_; }
  DenseNet& critic_target() { return critic_target_; }
  const DenseNet& actor() const { return actor_; }
  const DenseNet& critic() const { return critic_; }
  const DenseNet& actor_target() const { return actor_target_; }
  const DenseNet& critic_target() const { return critic_target_; }
  const AdamState& actor_adam() const { return actor_adam_; }
  const AdamState& critic_adam() const { return critic_adam_; }

  // Checkpoint payload access (see checkpoint.hpp).
  AdamState& actor_adam() { return actor_adam_; }
  AdamState& critic_adam() { return critic_adam_; }
  NoiseState& noise_state() { return noise_; }

 private:
  Eigen::MatrixXd concat_obs_action(const Eigen::MatrixXd& obs,
                                    const Eigen::MatrixXd& actions) const;
  void resample_perturbation();

  DdpgConfig config_;
  Rng rng_;
  DenseNet actor_;
  DenseNet critic_;
  DenseNet actor_target_;
  DenseNet critic_target_;
  DenseNet perturbed_actor_;
  AdamState actor_adam_;
  AdamState critic_adam_;
  ReplayBuffer buffer_;
  NoiseState noise_;
  std::uint64_t interactions_ = 0;
  std::vector<NoiseEvent> noise_events_;
};

// Minimal episodic environment surface for the training loops.
class Env {
 public:
  virtual ~Env() = default;
  virtual int obs_dim() const = 0;
  virtual int act_dim() const = 0;
  virtual Eigen::VectorXd reset() = 0;

  struct StepResult {
    Eigen::VectorXd next_obs;
    double reward = 0.0;
  };
  virtual StepResult step(const Eigen::VectorXd& action) = 0;

  // Simulated clock, if the environment keeps one.
  virtual double time() const { return 0.0; }
};

struct EpisodeStep {
  std::uint64_t step = 0;  // global interaction index
  double time = 0.0;       // environment clock after the step
  Eigen::VectorXd obs;
  Eigen::VectorXd action;
  double reward = 0.0;
  double sigma = 0.0;  // sigma in effect when the action was taken
};

struct EpisodeLog {
  std::vector<EpisodeStep> steps;
  std::vector<NoiseEvent> noise_events;
  Eigen::VectorXd final_obs;
  double total_reward = 0.0;
};

// Runs one episode of config().episode_length steps (or `max_steps` when
// nonnegative — slots can end mid-episode) starting from `start_obs`,
// training every train_interval interactions. The caller chains episodes by
// passing the returned final_obs into the next call.
EpisodeLog run_episode(Env& env, DdpgAgent& agent, const Eigen::VectorXd& start_obs,
                       int max_steps = -1);

}  // namespace las
