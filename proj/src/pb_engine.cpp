#include "las/pb_engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace las {

namespace {
constexpr double kFireEps = 1e-9;

ActuatorEnvelope moth_envelope(const ParamVector& p, double start) {
  ActuatorEnvelope e;
  e.kind = ActuatorKind::Moth;
  e.t_ramp_up = p.t_ru_m;
  e.t_hold = p.t_ho_m;
  e.t_ramp_down = p.t_rd_m;
  e.peak = p.i_max / 100.0;
  e.start_time = start;
  return e;
}

ActuatorEnvelope led_envelope(const ParamVector& p, double start) {
  ActuatorEnvelope e;
  e.kind = ActuatorKind::Led;
  e.t_ramp_up = p.t_ru_l;
  e.t_hold = p.t_ho_l;
  e.t_ramp_down = p.t_rd_l;
  e.peak = p.i_max / 100.0;
  e.start_time = start;
  return e;
}

ActuatorEnvelope sma_request(double start) {
  ActuatorEnvelope e;
  e.kind = ActuatorKind::Sma;
  e.start_time = start;
  return e;
}
}  // namespace

const char* to_string(Activation::Cause cause) {
  switch (cause) {
    case Activation::Cause::Reflex: return "reflex";
    case Activation::Cause::Cascade: return "cascade";
    case Activation::Cause::Background: return "background";
    case Activation::Cause::Sweep: return "sweep";
  }
  return "?";
}

std::vector<Activation> local_reflex(const ParamVector& params, int node, double start) {
  std::vector<Activation> out;
  out.reserve(2 + kSmaPerNode);
  out.push_back({start, node, Channel::moth(), moth_envelope(params, start),
                 Activation::Cause::Reflex, 0});
  const double led_start = start + params.t_gap_m;
  out.push_back({led_start, node, Channel::led(), led_envelope(params, led_start),
                 Activation::Cause::Reflex, 0});
  for (int k = 0; k < kSmaPerNode; ++k) {
    const double t = start + k * params.t_gap_sma;
    out.push_back({t, node, Channel::sma(k), sma_request(t),
                   Activation::Cause::Reflex, 0});
  }
  return out;
}

std::vector<Activation> sweep(const NodeTopology& topology, const ParamVector& params,
                              SweepDirection direction, double start) {
  const auto& columns = topology.columns();
  std::vector<Activation> out;
  const int ncols = static_cast<int>(columns.size());
  for (int c = 0; c < ncols; ++c) {
    const int col = direction == SweepDirection::LeftToRight ? c : ncols - 1 - c;
    const double t = start + c * params.t_gap_n;
    for (int node : columns[static_cast<std::size_t>(col)]) {
      out.push_back({t, node, Channel::led(), led_envelope(params, t),
                     Activation::Cause::Sweep, 0});
    }
  }
  return out;
}

PbEngine::PbEngine(const NodeTopology* topology, std::uint64_t seed, PbConfig config)
    : topology_(topology), config_(config), rng_(seed) {
  if (!topology_) throw std::invalid_argument("pb: null topology");
  prev_reading_.assign(static_cast<std::size_t>(topology_->node_count()), 0.0);
  refractory_until_.assign(static_cast<std::size_t>(topology_->node_count()), 0.0);
}

void PbEngine::reset(const ParamVector& params, double now) {
  background_ = false;
  background_deadline_ = now + rng_.uniform(params.t_bg_min, params.t_bg_max);
  sweep_deadline_ = now + rng_.uniform(params.t_sw_min, params.t_sw_max);
  std::fill(prev_reading_.begin(), prev_reading_.end(), 0.0);
  std::fill(refractory_until_.begin(), refractory_until_.end(), 0.0);
  pending_ = {};
}

void PbEngine::enqueue(Activation activation) {
  pending_.push({std::move(activation), seq_++});
}

void PbEngine::on_ir_trigger(const ParamVector& params, int node, double now,
                             TickOutput& out) {
  if (node < 0 || node >= topology_->node_count())
    throw std::out_of_range("pb: trigger node out of range");
  background_ = false;
  background_deadline_ = now + rng_.uniform(params.t_bg_min, params.t_bg_max);
  const std::uint64_t cascade = ++cascade_counter_;
  out.markers.push_back({now, node, "ir_trigger"});
  const auto dist = topology_->distances_from(node);
  for (int u = 0; u < topology_->node_count(); ++u) {
    const double anchor = now + dist[static_cast<std::size_t>(u)] * params.t_gap_n;
    for (auto& act : local_reflex(params, u, anchor)) {
      act.cause = Activation::Cause::Cascade;
      act.cascade_id = cascade;
      enqueue(std::move(act));
    }
  }
}

void PbEngine::run_background_draws(const ParamVector& params, double now,
                                    TickOutput& out) {
  const double w_period = std::max(params.t_w, config_.min_period_s);
  while (next_bg_actuator_draw_ <= now + kFireEps) {
    const double t = next_bg_actuator_draw_;
    for (int u = 0; u < topology_->node_count(); ++u) {
      if (rng_.bernoulli(params.p))
        enqueue({t, u, Channel::moth(), moth_envelope(params, t),
                 Activation::Cause::Background, 0});
      if (rng_.bernoulli(params.p))
        enqueue({t, u, Channel::led(), led_envelope(params, t),
                 Activation::Cause::Background, 0});
    }
    next_bg_actuator_draw_ += w_period;
  }
  const double sma_period = std::max(params.t_sma, config_.min_period_s);
  while (next_bg_sma_draw_ <= now + kFireEps) {
    const double t = next_bg_sma_draw_;
    for (int u = 0; u < topology_->node_count(); ++u)
      for (int k = 0; k < kSmaPerNode; ++k)
        if (rng_.bernoulli(params.p))
          enqueue({t, u, Channel::sma(k), sma_request(t),
                   Activation::Cause::Background, 0});
    next_bg_sma_draw_ += sma_period;
  }
  (void)out;
}

void PbEngine::drain_due(double now, TickOutput& out) {
  while (!pending_.empty() && pending_.top().activation.time <= now + kFireEps) {
    out.activations.push_back(pending_.top().activation);
    pending_.pop();
  }
}

PbEngine::TickOutput PbEngine::tick(const ParamVector& params, const IrFrame& frame,
                                    double now) {
  if (static_cast<int>(frame.readings.size()) != topology_->node_count())
    throw std::invalid_argument("pb: frame size mismatch");
  TickOutput out;

  // Rising-edge trigger detection with a per-sensor refractory window.
  for (int i = 0; i < topology_->node_count(); ++i) {
    const double r = frame.readings[static_cast<std::size_t>(i)];
    const bool rising = r >= config_.trigger_threshold &&
                        prev_reading_[static_cast<std::size_t>(i)] < config_.trigger_threshold;
    if (rising && now >= refractory_until_[static_cast<std::size_t>(i)]) {
      refractory_until_[static_cast<std::size_t>(i)] = now + config_.refractory_s;
      on_ir_trigger(params, i, now, out);
    }
    prev_reading_[static_cast<std::size_t>(i)] = r;
  }

  if (!background_ && now + kFireEps >= background_deadline_) {
    background_ = true;
    next_bg_actuator_draw_ = now + std::max(params.t_w, config_.min_period_s);
    next_bg_sma_draw_ = now + std::max(params.t_sma, config_.min_period_s);
    out.markers.push_back({now, -1, "enter_background"});
  }
  if (background_) run_background_draws(params, now, out);

  if (now + kFireEps >= sweep_deadline_) {
    const SweepDirection dir = rng_.bernoulli(0.5) ? SweepDirection::LeftToRight
                                                   : SweepDirection::RightToLeft;
    out.markers.push_back(
        {now, -1, dir == SweepDirection::LeftToRight ? "sweep_lr" : "sweep_rl"});
    for (auto& act : sweep(*topology_, params, dir, now)) enqueue(std::move(act));
    sweep_deadline_ = now + rng_.uniform(params.t_sw_min, params.t_sw_max);
  }

  drain_due(now, out);
  return out;
}

}  // namespace las
