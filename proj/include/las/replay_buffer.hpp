#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "las/rng.hpp"

namespace las {

// FIFO transition store with uniform random sampling. Storage is flat and
// grows on demand up to `capacity`, after which the oldest rows are
// overwritten.
class ReplayBuffer {
 public:
  ReplayBuffer(int obs_dim, int act_dim, std::size_t capacity);

  void push(const Eigen::VectorXd& obs, const Eigen::VectorXd& action, double reward,
            const Eigen::VectorXd& next_obs);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t push_count() const { return pushes_; }
  int obs_dim() const { return obs_dim_; }
  int act_dim() const { return act_dim_; }

  struct Batch {
    Eigen::MatrixXd obs;       // obs_dim x n
    Eigen::MatrixXd actions;   // act_dim x n
    Eigen::VectorXd rewards;   // n
    Eigen::MatrixXd next_obs;  // obs_dim x n
  };

  // n transitions drawn uniformly with replacement.
  Batch sample(std::size_t n, Rng& rng) const;

 private:
  int obs_dim_;
  int act_dim_;
  std::size_t capacity_;
  std::size_t size_ = 0;
  std::size_t cursor_ = 0;
  std::size_t pushes_ = 0;
  std::vector<double> obs_;
  std::vector<double> actions_;
  std::vector<double> rewards_;
  std::vector<double> next_obs_;
};

}  // namespace las
