#pragma once

// Finite-difference oracle for network gradients: central differences on a
// scalar loss L(params) = w . f(x), checked against the analytic backward
// pass. Kept independent of the backward implementation on purpose.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "las/nn.hpp"
#include "las/rng.hpp"

namespace las::testing {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
};

inline double rel_error(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-5});
  return std::abs(a - b) / scale;
}

inline GradCheckResult gradient_check(DenseNet& net, const Eigen::VectorXd& input,
                                      const Eigen::VectorXd& loss_weights,
                                      double h = 1e-5) {
  ForwardTrace trace;
  net.forward_batch(input, &trace);
  const Gradients grads = net.backward_batch(trace, loss_weights);

  auto loss = [&](const Eigen::VectorXd& x) {
    return loss_weights.dot(net.forward_batch(x).col(0));
  };

  GradCheckResult result;
  auto& params = net.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + h;
    const double up = loss(input);
    params[i] = saved - h;
    const double down = loss(input);
    params[i] = saved;
    const double fd = (up - down) / (2.0 * h);
    const double err = rel_error(grads.flat[i], fd);
    if (err > result.max_rel_error) {
      result.max_rel_error = err;
      result.worst_index = i;
    }
  }

  // Input gradient against the same oracle.
  Eigen::VectorXd x = input;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double up = loss(x);
    x[i] = saved - h;
    const double down = loss(x);
    x[i] = saved;
    const double fd = (up - down) / (2.0 * h);
    result.max_rel_error = std::max(result.max_rel_error, rel_error(grads.input(i, 0), fd));
  }
  return result;
}

// Random small architecture mixing relu, tanh, identity and layer-norm.
// Normalization only appears on hidden layers, as in the real nets.
inline NetSpec random_spec(Rng& rng) {
  NetSpec spec;
  spec.input_dim = 2 + static_cast<int>(rng.uniform_index(5));
  const int depth = 1 + static_cast<int>(rng.uniform_index(3));
  for (int l = 0; l < depth; ++l) {
    LayerSpec layer;
    layer.units = 2 + static_cast<int>(rng.uniform_index(6));
    const auto pick = rng.uniform_index(3);
    layer.act = pick == 0 ? Nonlinearity::Relu
                : pick == 1 ? Nonlinearity::Tanh
                            : Nonlinearity::Identity;
    layer.layer_norm = l + 1 < depth && layer.units >= 2 && rng.bernoulli(0.7);
    spec.layers.push_back(layer);
  }
  return spec;
}

}  // namespace las::testing
