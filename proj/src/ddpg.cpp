#include "las/ddpg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace las {

Observation build_observation(const std::vector<IrFrame>& frames) {
  if (static_cast<int>(frames.size()) != kObservationFrames)
    throw std::invalid_argument("observation: need exactly 20 frames");
  const std::size_t n = frames.front().readings.size();
  Observation obs;
  obs.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (const auto& frame : frames) {
    if (frame.readings.size() != n)
      throw std::invalid_argument("observation: frame width mismatch");
    obs.values += Eigen::Map<const Eigen::VectorXd>(frame.readings.data(),
                                                    static_cast<Eigen::Index>(n));
  }
  obs.values /= static_cast<double>(kObservationFrames);
  obs.window_end = frames.back().timestamp;
  return obs;
}

double engagement_reward(const Eigen::VectorXd& next_obs) { return next_obs.sum(); }

double policy_distance(const DenseNet& actor, const DenseNet& perturbed,
                       const Eigen::MatrixXd& obs) {
  const Eigen::MatrixXd plain = actor.forward_batch(obs);
  const Eigen::MatrixXd noisy = perturbed.forward_batch(obs);
  const double mean_sq =
      (plain - noisy).squaredNorm() / static_cast<double>(plain.size());
  return std::sqrt(mean_sq);
}

double adapt_noise(NoiseState& noise, const DenseNet& actor, const DenseNet& perturbed,
                   const Eigen::MatrixXd& obs) {
  const double d = policy_distance(actor, perturbed, obs);
  if (d <= noise.delta)
    noise.sigma *= noise.alpha;
  else
    noise.sigma /= noise.alpha;
  return d;
}

Eigen::VectorXd act_with_parameter_noise(const DenseNet& actor, const Eigen::VectorXd& obs,
                                         double sigma, Rng& rng) {
  DenseNet noisy = perturbed_copy(actor, sigma, rng);
  return noisy.forward_batch(obs).col(0);
}

DdpgAgent::DdpgAgent(DdpgConfig config, std::uint64_t seed)
    : config_(config),
      rng_(seed),
      actor_(actor_spec(config.obs_dim, config.act_dim, config.hidden)),
      critic_(critic_spec(config.obs_dim, config.act_dim, config.hidden)),
      actor_target_(actor_.spec()),
      critic_target_(critic_.spec()),
      perturbed_actor_(actor_.spec()),
      actor_adam_(actor_.params().size(), config.actor_lr),
      critic_adam_(critic_.params().size(), config.critic_lr),
      buffer_(config.obs_dim, config.act_dim, config.buffer_capacity),
      noise_{config.noise_sigma_init, config.noise_alpha, config.noise_delta} {
  actor_.init_random(rng_);
  critic_.init_random(rng_);
  actor_target_ = actor_;
  critic_target_ = critic_;
  resample_perturbation();
}

void DdpgAgent::resample_perturbation() {
  perturbed_actor_ = perturbed_copy(actor_, noise_.sigma, rng_);
}

void DdpgAgent::begin_episode() { resample_perturbation(); }

Eigen::VectorXd DdpgAgent::act(const Eigen::VectorXd& obs) {
  Eigen::VectorXd a = perturbed_actor_.forward_batch(obs).col(0);
  return a.cwiseMax(-1.0).cwiseMin(1.0);
}

Eigen::VectorXd DdpgAgent::act_greedy(const Eigen::VectorXd& obs) {
  Eigen::VectorXd a = actor_.forward_batch(obs).col(0);
  return a.cwiseMax(-1.0).cwiseMin(1.0);
}

void DdpgAgent::record(const Eigen::VectorXd& obs, const Eigen::VectorXd& action,
                       double reward, const Eigen::VectorXd& next_obs) {
  buffer_.push(obs, action, reward, next_obs);
  ++interactions_;
}

Eigen::MatrixXd DdpgAgent::concat_obs_action(const Eigen::MatrixXd& obs,
                                             const Eigen::MatrixXd& actions) const {
  Eigen::MatrixXd joined(obs.rows() + actions.rows(), obs.cols());
  joined.topRows(obs.rows()) = obs;
  joined.bottomRows(actions.rows()) = actions;
  return joined;
}

bool DdpgAgent::train_iteration() {
  const std::size_t n = static_cast<std::size_t>(config_.batch_size);
  if (buffer_.size() < n) return false;

  const auto batch = buffer_.sample(n, rng_);
  const double inv_n = 1.0 / static_cast<double>(n);

  // Adapt the exploration scale on this minibatch, then re-perturb.
  NoiseEvent event;
  event.step = interactions_;
  event.sigma_before = noise_.sigma;
  event.distance = adapt_noise(noise_, actor_, perturbed_actor_, batch.obs);
  event.sigma_after = noise_.sigma;
  noise_events_.push_back(event);
  resample_perturbation();

  // TD targets from the target networks only.
  const Eigen::MatrixXd next_actions = actor_target_.forward_batch(batch.next_obs);
  const Eigen::MatrixXd next_q =
      critic_target_.forward_batch(concat_obs_action(batch.next_obs, next_actions));
  const Eigen::RowVectorXd y =
      batch.rewards.transpose() + config_.gamma * next_q.row(0);

  // Critic: minimize mean squared TD error.
  ForwardTrace critic_trace;
  const Eigen::MatrixXd q =
      critic_.forward_batch(concat_obs_action(batch.obs, batch.actions), &critic_trace);
  const Eigen::MatrixXd dq = (q.row(0) - y) * (2.0 * inv_n);
  const Gradients critic_grads = critic_.backward_batch(critic_trace, dq);
  adam_step(critic_, critic_grads.flat, critic_adam_);

  // Actor: ascend the sampled policy gradient through the updated critic.
  ForwardTrace actor_trace;
  const Eigen::MatrixXd actions = actor_.forward_batch(batch.obs, &actor_trace);
  ForwardTrace q_trace;
  critic_.forward_batch(concat_obs_action(batch.obs, actions), &q_trace);
  const Eigen::MatrixXd dq_ascent =
      Eigen::MatrixXd::Constant(1, static_cast<Eigen::Index>(n), -inv_n);
  const Gradients q_grads = critic_.backward_batch(q_trace, dq_ascent);
  const Eigen::MatrixXd dactions = q_grads.input.bottomRows(config_.act_dim);
  const Gradients actor_grads = actor_.backward_batch(actor_trace, dactions);
  adam_step(actor_, actor_grads.flat, actor_adam_);

  soft_update(critic_target_, critic_, config_.tau);
  soft_update(actor_target_, actor_, config_.tau);
  return true;
}

void DdpgAgent::train_burst() {
  for (int j = 0; j < config_.train_times; ++j)
    if (!train_iteration()) return;
}

std::vector<NoiseEvent> DdpgAgent::drain_noise_events() {
  std::vector<NoiseEvent> out;
  out.swap(noise_events_);
  return out;
}

EpisodeLog run_episode(Env& env, DdpgAgent& agent, const Eigen::VectorXd& start_obs,
                       int max_steps) {
  if (start_obs.size() != agent.config().obs_dim)
    throw std::invalid_argument("episode: start observation dimension mismatch");
  const int steps = max_steps >= 0 ? std::min(max_steps, agent.config().episode_length)
                                   : agent.config().episode_length;
  EpisodeLog log;
  agent.begin_episode();
  Eigen::VectorXd obs = start_obs;
  for (int t = 0; t < steps; ++t) {
    const double sigma = agent.noise().sigma;
    const Eigen::VectorXd action = agent.act(obs);
    const auto result = env.step(action);
    agent.record(obs, action, result.reward, result.next_obs);
    log.steps.push_back(
        {agent.interaction_count(), env.time(), obs, action, result.reward, sigma});
    log.total_reward += result.reward;
    if ((t + 1) % agent.config().train_interval == 0) agent.train_burst();
    obs = result.next_obs;
  }
  log.final_obs = obs;
  log.noise_events = agent.drain_noise_events();
  return log;
}

}  // namespace las
