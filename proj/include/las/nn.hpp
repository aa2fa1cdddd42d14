#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "las/rng.hpp"

namespace las {

// 64-byte-aligned storage for anything Eigen's vectorized kernels touch.
// Alignment fixes the SIMD peeling pattern, which keeps reductions
// bit-identical across allocations and therefore across replays.
using AlignedVec = std::vector<double, Eigen::aligned_allocator<double>>;

enum class Nonlinearity { Relu, Tanh, Identity };

struct LayerSpec {
  int units = 0;
  Nonlinearity act = Nonlinearity::Relu;
  bool layer_norm = false;

  bool operator==(const LayerSpec&) const = default;
};

struct NetSpec {
  int input_dim = 0;
  std::vector<LayerSpec> layers;

  int output_dim() const { return layers.empty() ? 0 : layers.back().units; }
  std::size_t param_count() const;

  bool operator==(const NetSpec&) const = default;
};

// Hidden layers: dense + layer-norm + relu. Actor output squashes through
// tanh; critic output is a raw scalar with the action concatenated onto the
// observation at the input.
NetSpec actor_spec(int obs_dim, int act_dim, const std::vector<int>& hidden);
NetSpec critic_spec(int obs_dim, int act_dim, const std::vector<int>& hidden);

// Per-sample activations captured by a forward pass; consumed by backward.
struct ForwardTrace {
  Eigen::MatrixXd input;
  std::vector<Eigen::MatrixXd> normalized;      // post layer-norm, pre affine
  std::vector<Eigen::RowVectorXd> inv_std;      // per sample
  std::vector<Eigen::MatrixXd> pre_activation;  // post affine, pre nonlinearity
  std::vector<Eigen::MatrixXd> output;          // post nonlinearity
  bool valid = false;
};

struct Gradients {
  AlignedVec flat;            // same layout as DenseNet::params()
  Eigen::MatrixXd input;      // dLoss/dInput per sample (column-wise)
};

// Feed-forward net with layer normalization. Parameters live in one flat
// vector (per layer: W column-major, b, then gain and offset when the layer
// is normalized), which is also the checkpoint and optimizer layout.
class DenseNet {
 public:
  DenseNet() = default;
  explicit DenseNet(NetSpec spec);

  // Fan-in scaled uniform init for hidden layers; the final layer is drawn
  // from [-3e-3, 3e-3]. Gains start at 1, offsets at 0.
  void init_random(Rng& rng);

  const NetSpec& spec() const { return spec_; }
  int input_dim() const { return spec_.input_dim; }
  int output_dim() const { return spec_.output_dim(); }

  AlignedVec& params() { return params_; }
  const AlignedVec& params() const { return params_; }

  // Single-sample forward; records the trace used by backward().
  Eigen::VectorXd forward(const Eigen::VectorXd& input);

  // Batch forward over column-wise samples. Does not disturb the cached
  // single-sample trace.
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs,
                                ForwardTrace* trace = nullptr) const;

  // Backward through the most recent forward(); throws if none is cached.
  Gradients backward(const Eigen::VectorXd& dloss_doutput);
  Gradients backward_batch(const ForwardTrace& trace,
                           const Eigen::MatrixXd& dloss_doutput) const;

  // How many forward passes this net has served (batch counts once); lets
  // tests pin down exactly which networks an update evaluated.
  std::uint64_t forward_count() const { return forward_count_; }
  void reset_forward_count() { forward_count_ = 0; }

  // Human-readable location of a flat parameter index, for error reports.
  std::string param_path(std::size_t flat_index) const;

  static constexpr double kLayerNormEpsilon = 1e-12;

 private:
  struct Offsets {
    std::size_t w = 0, b = 0, gain = 0, offset = 0, end = 0;
    int in = 0, out = 0;
  };

  void build_offsets();

  NetSpec spec_;
  std::vector<Offsets> offsets_;
  AlignedVec params_;
  ForwardTrace cache_;
  mutable std::uint64_t forward_count_ = 0;
};

struct AdamState {
  explicit AdamState(std::size_t size, double learning_rate)
      : m(size, 0.0), v(size, 0.0), lr(learning_rate) {}

  AlignedVec m;
  AlignedVec v;
  std::int64_t step = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// In-place Adam update; throws std::runtime_error naming the parameter path
// on a non-finite gradient.
void adam_step(DenseNet& net, const AlignedVec& grads, AdamState& state);

// target <- tau * source + (1 - tau) * target, elementwise.
void soft_update(DenseNet& target, const DenseNet& source, double tau);

// Copy of `base` with every parameter jittered by N(0, sigma).
DenseNet perturbed_copy(const DenseNet& base, double sigma, Rng& rng);

}  // namespace las
