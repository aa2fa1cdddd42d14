#include "las/sculpture.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace las {

double scale_distance_to_reading(double distance_cm) {
  if (!(distance_cm > 0.0))
    throw std::domain_error("scale_distance_to_reading: distance must be positive");
  if (distance_cm >= 80.0) return 0.0;
  if (distance_cm <= 10.0) return 1.0;
  return (80.0 - distance_cm) / 70.0;
}

double raw_to_intensity_fraction(double raw, bool* clipped) {
  if (raw < -1.0 || raw > 1.0) {
    if (clipped) *clipped = true;
    raw = std::clamp(raw, -1.0, 1.0);
  }
  return (raw + 1.0) * 0.5;
}

Sculpture::Sculpture(NodeTopology topology, SculptureConfig config)
    : topology_(std::move(topology)),
      config_(config),
      nodes_(static_cast<std::size_t>(topology_.node_count())) {}

void Sculpture::check_node(int node) const {
  if (node < 0 || node >= topology_.node_count())
    throw std::out_of_range("sculpture: node id out of range");
}

void Sculpture::step(double dt) {
  if (dt < 0.0) throw std::invalid_argument("sculpture: negative dt");
  sim_time_ += dt;
  const double now = sim_time_;
  auto prune = [now](std::vector<ActuatorEnvelope>& envs) {
    std::erase_if(envs, [now](const ActuatorEnvelope& e) { return e.end_time() <= now; });
  };
  for (auto& node : nodes_) {
    prune(node.moth_envelopes);
    prune(node.led_envelopes);
    for (auto& sma : node.sma_envelopes) prune(sma);
  }
}

ApplyResult Sculpture::activate(int node, Channel channel, const ActuatorEnvelope& envelope) {
  check_node(node);
  envelope.validate();
  auto& st = nodes_[static_cast<std::size_t>(node)];
  if (channel.kind == ActuatorKind::Sma) {
    if (channel.sma_index < 0 || channel.sma_index >= kSmaPerNode)
      throw std::out_of_range("sculpture: sma index out of range");
    auto& until = st.sma_cooldown_until[channel.sma_index];
    if (envelope.start_time < until) return ApplyResult::SkippedCooldown;
    ActuatorEnvelope pulse = sma_pulse(envelope.start_time, config_.sma_cooldown_s);
    st.sma_envelopes[channel.sma_index].push_back(pulse);
    until = pulse.end_time() + pulse.cooldown;
    return ApplyResult::Applied;
  }
  auto& envs = channel.kind == ActuatorKind::Moth ? st.moth_envelopes : st.led_envelopes;
  for (const auto& e : envs)
    if (e.active_at(envelope.start_time)) return ApplyResult::SkippedBusy;
  envs.push_back(envelope);
  return ApplyResult::Applied;
}

double Sculpture::intensity(int node, Channel channel) const {
  check_node(node);
  const auto& st = nodes_[static_cast<std::size_t>(node)];
  auto max_env = [this](const std::vector<ActuatorEnvelope>& envs) {
    double v = 0.0;
    for (const auto& e : envs) v = std::max(v, e.intensity_at(sim_time_));
    return v;
  };
  switch (channel.kind) {
    case ActuatorKind::Moth:
      return std::max(st.moth_direct, max_env(st.moth_envelopes));
    case ActuatorKind::Led:
      return std::max(st.led_direct, max_env(st.led_envelopes));
    case ActuatorKind::Sma:
      if (channel.sma_index < 0 || channel.sma_index >= kSmaPerNode)
        throw std::out_of_range("sculpture: sma index out of range");
      return max_env(st.sma_envelopes[channel.sma_index]);
  }
  return 0.0;
}

IrFrame Sculpture::read_ir_frame() const {
  IrFrame frame;
  frame.timestamp = sim_time_;
  frame.readings.assign(static_cast<std::size_t>(topology_.node_count()), 0.0);
  const double tan_half =
      std::tan(config_.cone_half_angle_deg * 3.14159265358979323846 / 180.0);
  for (int i = 0; i < topology_.node_count(); ++i) {
    const Vec2 p = topology_.positions()[static_cast<std::size_t>(i)];
    double best = 0.0;
    for (const auto& v : visitors_) {
      const double planar = std::hypot(v.x - p.x, v.y - p.y);
      const double vertical = std::max(config_.sensor_height_m - v.extremity_height_m, 0.0);
      if (planar > tan_half * vertical + 1e-12) continue;  // outside the sensor cone
      const double dist_cm = 100.0 * std::max(std::hypot(planar, vertical), 1e-6);
      best = std::max(best, scale_distance_to_reading(dist_cm));
    }
    frame.readings[static_cast<std::size_t>(i)] = best;
  }
  return frame;
}

void Sculpture::apply_raw_action(const std::vector<double>& raw) {
  if (static_cast<int>(raw.size()) != raw_action_size())
    throw std::invalid_argument("sculpture: raw action length mismatch");
  for (int node = 0; node < topology_.node_count(); ++node) {
    auto& st = nodes_[static_cast<std::size_t>(node)];
    const std::size_t base = static_cast<std::size_t>(node) * kRawChannelsPerNode;
    bool clipped = false;
    st.moth_direct = raw_to_intensity_fraction(raw[base + 0], &clipped);
    if (clipped) ++clip_warnings_;
    clipped = false;
    st.led_direct = raw_to_intensity_fraction(raw[base + 1], &clipped);
    if (clipped) ++clip_warnings_;
    for (int k = 0; k < kSmaPerNode; ++k) {
      double v = raw[base + 2 + static_cast<std::size_t>(k)];
      if (v < -1.0 || v > 1.0) {
        ++clip_warnings_;
        v = std::clamp(v, -1.0, 1.0);
      }
      if (v >= 0.0) {
        ActuatorEnvelope req;
        req.kind = ActuatorKind::Sma;
        req.start_time = sim_time_;
        activate(node, Channel::sma(k), req);
      }
    }
  }
}

double Sculpture::sma_cooldown_until(int node, int sma_index) const {
  check_node(node);
  if (sma_index < 0 || sma_index >= kSmaPerNode)
    throw std::out_of_range("sculpture: sma index out of range");
  return nodes_[static_cast<std::size_t>(node)].sma_cooldown_until[sma_index];
}

}  // namespace las
