#include "las/replay_buffer.hpp"

#include <cstring>
#include <stdexcept>

namespace las {

ReplayBuffer::ReplayBuffer(int obs_dim, int act_dim, std::size_t capacity)
    : obs_dim_(obs_dim), act_dim_(act_dim), capacity_(capacity) {
  if (obs_dim <= 0 || act_dim <= 0 || capacity == 0)
    throw std::invalid_argument("replay: bad dimensions");
}

void ReplayBuffer::push(const Eigen::VectorXd& obs, const Eigen::VectorXd& action,
                        double reward, const Eigen::VectorXd& next_obs) {
  if (obs.size() != obs_dim_ || next_obs.size() != obs_dim_ || action.size() != act_dim_)
    throw std::invalid_argument("replay: transition shape mismatch");

  const std::size_t od = static_cast<std::size_t>(obs_dim_);
  const std::size_t ad = static_cast<std::size_t>(act_dim_);
  if (size_ < capacity_) {
    obs_.resize((size_ + 1) * od);
    actions_.resize((size_ + 1) * ad);
    rewards_.resize(size_ + 1);
    next_obs_.resize((size_ + 1) * od);
  }
  std::memcpy(obs_.data() + cursor_ * od, obs.data(), od * sizeof(double));
  std::memcpy(actions_.data() + cursor_ * ad, action.data(), ad * sizeof(double));
  rewards_[cursor_] = reward;
  std::memcpy(next_obs_.data() + cursor_ * od, next_obs.data(), od * sizeof(double));

  cursor_ = (cursor_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
  ++pushes_;
}

ReplayBuffer::Batch ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  if (size_ == 0) throw std::runtime_error("replay: sampling from empty buffer");
  Batch batch;
  batch.obs.resize(obs_dim_, static_cast<Eigen::Index>(n));
  batch.actions.resize(act_dim_, static_cast<Eigen::Index>(n));
  batch.rewards.resize(static_cast<Eigen::Index>(n));
  batch.next_obs.resize(obs_dim_, static_cast<Eigen::Index>(n));
  const std::size_t od = static_cast<std::size_t>(obs_dim_);
  const std::size_t ad = static_cast<std::size_t>(act_dim_);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i = rng.uniform_index(size_);
    batch.obs.col(static_cast<Eigen::Index>(j)) =
        Eigen::Map<const Eigen::VectorXd>(obs_.data() + i * od, obs_dim_);
    batch.actions.col(static_cast<Eigen::Index>(j)) =
        Eigen::Map<const Eigen::VectorXd>(actions_.data() + i * ad, act_dim_);
    batch.rewards[static_cast<Eigen::Index>(j)] = rewards_[i];
    batch.next_obs.col(static_cast<Eigen::Index>(j)) =
        Eigen::Map<const Eigen::VectorXd>(next_obs_.data() + i * od, obs_dim_);
  }
  return batch;
}

}  // namespace las
