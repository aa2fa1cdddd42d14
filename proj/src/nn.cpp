#include "las/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace las {

namespace {

using Eigen::Index;
using Eigen::Map;
using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

MatrixXd apply_nonlinearity(const MatrixXd& y, Nonlinearity act) {
  switch (act) {
    case Nonlinearity::Relu: return y.cwiseMax(0.0);
    case Nonlinearity::Tanh: return y.array().tanh().matrix();
    case Nonlinearity::Identity: return y;
  }
  return y;
}

// Derivative expressed from pre-activation y and output a.
MatrixXd nonlinearity_grad(const MatrixXd& y, const MatrixXd& a, Nonlinearity act) {
  switch (act) {
    case Nonlinearity::Relu:
      return (y.array() > 0.0).cast<double>().matrix();
    case Nonlinearity::Tanh:
      return (1.0 - a.array().square()).matrix();
    case Nonlinearity::Identity:
      return MatrixXd::Ones(y.rows(), y.cols());
  }
  return MatrixXd::Ones(y.rows(), y.cols());
}

}  // namespace

std::size_t NetSpec::param_count() const {
  std::size_t total = 0;
  int in = input_dim;
  for (const auto& layer : layers) {
    total += static_cast<std::size_t>(layer.units) * static_cast<std::size_t>(in) +
             static_cast<std::size_t>(layer.units);
    if (layer.layer_norm) total += 2 * static_cast<std::size_t>(layer.units);
    in = layer.units;
  }
  return total;
}

NetSpec actor_spec(int obs_dim, int act_dim, const std::vector<int>& hidden) {
  NetSpec spec;
  spec.input_dim = obs_dim;
  for (int h : hidden) spec.layers.push_back({h, Nonlinearity::Relu, true});
  spec.layers.push_back({act_dim, Nonlinearity::Tanh, false});
  return spec;
}

NetSpec critic_spec(int obs_dim, int act_dim, const std::vector<int>& hidden) {
  NetSpec spec;
  spec.input_dim = obs_dim + act_dim;
  for (int h : hidden) spec.layers.push_back({h, Nonlinearity::Relu, true});
  spec.layers.push_back({1, Nonlinearity::Identity, false});
  return spec;
}

DenseNet::DenseNet(NetSpec spec) : spec_(std::move(spec)) {
  if (spec_.input_dim <= 0 || spec_.layers.empty())
    throw std::invalid_argument("net: empty spec");
  for (const auto& layer : spec_.layers)
    if (layer.units <= 0) throw std::invalid_argument("net: layer with no units");
  build_offsets();
  params_.assign(spec_.param_count(), 0.0);
}

void DenseNet::build_offsets() {
  offsets_.clear();
  std::size_t at = 0;
  int in = spec_.input_dim;
  for (const auto& layer : spec_.layers) {
    Offsets o;
    o.in = in;
    o.out = layer.units;
    o.w = at;
    at += static_cast<std::size_t>(layer.units) * static_cast<std::size_t>(in);
    o.b = at;
    at += static_cast<std::size_t>(layer.units);
    if (layer.layer_norm) {
      o.gain = at;
      at += static_cast<std::size_t>(layer.units);
      o.offset = at;
      at += static_cast<std::size_t>(layer.units);
    }
    o.end = at;
    offsets_.push_back(o);
    in = layer.units;
  }
}

void DenseNet::init_random(Rng& rng) {
  const std::size_t last = offsets_.size() - 1;
  for (std::size_t l = 0; l < offsets_.size(); ++l) {
    const auto& o = offsets_[l];
    const double bound = l == last ? 3e-3 : 1.0 / std::sqrt(static_cast<double>(o.in));
    const std::size_t wb_end = o.b + static_cast<std::size_t>(o.out);
    for (std::size_t i = o.w; i < wb_end; ++i) params_[i] = rng.uniform(-bound, bound);
    if (spec_.layers[l].layer_norm) {
      for (int i = 0; i < o.out; ++i) {
        params_[o.gain + static_cast<std::size_t>(i)] = 1.0;
        params_[o.offset + static_cast<std::size_t>(i)] = 0.0;
      }
    }
  }
  cache_.valid = false;
}

Eigen::MatrixXd DenseNet::forward_batch(const MatrixXd& inputs, ForwardTrace* trace) const {
  if (inputs.rows() != spec_.input_dim)
    throw std::invalid_argument("net: input dimension mismatch");
  if (!inputs.allFinite()) throw std::invalid_argument("net: non-finite input");
  ++forward_count_;

  const std::size_t depth = offsets_.size();
  if (trace) {
    trace->input = inputs;
    trace->normalized.assign(depth, {});
    trace->inv_std.assign(depth, {});
    trace->pre_activation.assign(depth, {});
    trace->output.assign(depth, {});
    trace->valid = true;
  }

  MatrixXd x = inputs;
  for (std::size_t l = 0; l < depth; ++l) {
    const auto& o = offsets_[l];
    const auto& layer = spec_.layers[l];
    Map<const MatrixXd> w(params_.data() + o.w, o.out, o.in);
    Map<const VectorXd> b(params_.data() + o.b, o.out);

    MatrixXd z = (w * x).colwise() + b;
    MatrixXd y;
    if (layer.layer_norm) {
      Map<const VectorXd> gain(params_.data() + o.gain, o.out);
      Map<const VectorXd> offset(params_.data() + o.offset, o.out);
      const double h = static_cast<double>(o.out);
      RowVectorXd mean = z.colwise().mean();
      MatrixXd centered = z.rowwise() - mean;
      RowVectorXd var = centered.array().square().colwise().sum() / h;
      RowVectorXd istd = (var.array() + kLayerNormEpsilon).sqrt().inverse();
      MatrixXd normalized = centered.array().rowwise() * istd.array();
      y = ((normalized.array().colwise() * gain.array()).colwise() + offset.array())
              .matrix();
      if (trace) {
        trace->normalized[l] = normalized;
        trace->inv_std[l] = istd;
      }
    } else {
      y = std::move(z);
    }
    MatrixXd a = apply_nonlinearity(y, layer.act);
    if (trace) {
      trace->pre_activation[l] = y;
      trace->output[l] = a;
    }
    x = std::move(a);
  }
  return x;
}

Eigen::VectorXd DenseNet::forward(const VectorXd& input) {
  MatrixXd out = forward_batch(input, &cache_);
  return out.col(0);
}

Gradients DenseNet::backward_batch(const ForwardTrace& trace,
                                   const MatrixXd& dloss_doutput) const {
  if (!trace.valid) throw std::runtime_error("net: backward without a cached forward");
  if (dloss_doutput.rows() != output_dim() || dloss_doutput.cols() != trace.input.cols())
    throw std::invalid_argument("net: output gradient shape mismatch");

  Gradients grads;
  grads.flat.assign(params_.size(), 0.0);

  MatrixXd da = dloss_doutput;
  for (std::size_t l = offsets_.size(); l-- > 0;) {
    const auto& o = offsets_[l];
    const auto& layer = spec_.layers[l];
    const MatrixXd& below = l == 0 ? trace.input : trace.output[l - 1];
    const MatrixXd dy =
        da.cwiseProduct(nonlinearity_grad(trace.pre_activation[l], trace.output[l], layer.act));

    MatrixXd dz;
    if (layer.layer_norm) {
      Map<const VectorXd> gain(params_.data() + o.gain, o.out);
      const MatrixXd& normalized = trace.normalized[l];
      const RowVectorXd& istd = trace.inv_std[l];
      const double h = static_cast<double>(o.out);

      Map<VectorXd>(grads.flat.data() + o.gain, o.out) =
          dy.cwiseProduct(normalized).rowwise().sum();
      Map<VectorXd>(grads.flat.data() + o.offset, o.out) = dy.rowwise().sum();

      MatrixXd dnorm = dy.array().colwise() * gain.array();
      RowVectorXd sum_dnorm = dnorm.colwise().sum();
      RowVectorXd sum_dnorm_norm = dnorm.cwiseProduct(normalized).colwise().sum();
      dz = ((dnorm * h).rowwise() - sum_dnorm -
            (normalized.array().rowwise() * sum_dnorm_norm.array()).matrix())
               .array()
               .rowwise() *
           (istd.array() / h);
    } else {
      dz = dy;
    }

    Map<MatrixXd>(grads.flat.data() + o.w, o.out, o.in).noalias() = dz * below.transpose();
    Map<VectorXd>(grads.flat.data() + o.b, o.out) = dz.rowwise().sum();

    Map<const MatrixXd> w(params_.data() + o.w, o.out, o.in);
    da.noalias() = w.transpose() * dz;
  }
  grads.input = std::move(da);
  return grads;
}

Gradients DenseNet::backward(const VectorXd& dloss_doutput) {
  Gradients g = backward_batch(cache_, dloss_doutput);
  return g;
}

std::string DenseNet::param_path(std::size_t flat_index) const {
  for (std::size_t l = 0; l < offsets_.size(); ++l) {
    const auto& o = offsets_[l];
    if (flat_index >= o.end) continue;
    const std::string prefix = "layer" + std::to_string(l);
    if (flat_index < o.b) {
      const std::size_t k = flat_index - o.w;
      const std::size_t row = k % static_cast<std::size_t>(o.out);
      const std::size_t col = k / static_cast<std::size_t>(o.out);
      return prefix + ".W[" + std::to_string(row) + "," + std::to_string(col) + "]";
    }
    if (!spec_.layers[l].layer_norm || flat_index < o.gain)
      return prefix + ".b[" + std::to_string(flat_index - o.b) + "]";
    if (flat_index < o.offset)
      return prefix + ".gain[" + std::to_string(flat_index - o.gain) + "]";
    return prefix + ".offset[" + std::to_string(flat_index - o.offset) + "]";
  }
  return "param[" + std::to_string(flat_index) + "]";
}

void adam_step(DenseNet& net, const AlignedVec& grads, AdamState& state) {
  auto& params = net.params();
  if (grads.size() != params.size() || state.m.size() != params.size())
    throw std::invalid_argument("adam: size mismatch");
  for (std::size_t i = 0; i < grads.size(); ++i)
    if (!std::isfinite(grads[i]))
      throw std::runtime_error("adam: non-finite gradient at " + net.param_path(i));

  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
  }
}

void soft_update(DenseNet& target, const DenseNet& source, double tau) {
  if (!(target.spec() == source.spec()))
    throw std::invalid_argument("soft_update: architecture mismatch");
  auto& t = target.params();
  const auto& s = source.params();
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = tau * s[i] + (1.0 - tau) * t[i];
}

DenseNet perturbed_copy(const DenseNet& base, double sigma, Rng& rng) {
  DenseNet out = base;
  for (auto& p : out.params()) p += sigma * rng.normal();
  return out;
}

}  // namespace las
