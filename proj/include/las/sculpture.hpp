#pragma once

#include <cstdint>
#include <vector>

#include "las/envelope.hpp"
#include "las/topology.hpp"

namespace las {

// One tick of scaled IR readings, each in [0,1].
struct IrFrame {
  double timestamp = 0.0;
  std::vector<double> readings;
};

// Nearest body point of one visitor, as seen by the overhead sensors.
struct VisitorMark {
  double x = 0.0;
  double y = 0.0;
  double extremity_height_m = 0.0;
};

// Addresses one actuator on a node: the moth, the LED, or one of six SMAs.
struct Channel {
  ActuatorKind kind = ActuatorKind::Led;
  int sma_index = 0;  // 0..5, SMA only

  static Channel moth() { return {ActuatorKind::Moth, 0}; }
  static Channel led() { return {ActuatorKind::Led, 0}; }
  static Channel sma(int index) { return {ActuatorKind::Sma, index}; }
};

enum class ApplyResult { Applied, SkippedCooldown, SkippedBusy };

inline constexpr int kSmaPerNode = 6;
inline constexpr int kRawChannelsPerNode = 2 + kSmaPerNode;  // moth, led, sma0..5
inline constexpr double kTickSeconds = 0.1;

// IR scaling convention: 0 at >= 80cm, 1 at <= 10cm, linear in between.
// Throws std::domain_error for non-positive distances.
double scale_distance_to_reading(double distance_cm);

struct SculptureConfig {
  double sensor_height_m = 2.4;
  double cone_half_angle_deg = 30.0;
  double sma_cooldown_s = 10.0;
};

// Discrete-time state of the whole sculpture. Value type: copy it to fork a
// simulation; mutate from one stepping loop at a time.
class Sculpture {
 public:
  explicit Sculpture(NodeTopology topology, SculptureConfig config = {});

  const NodeTopology& topology() const { return topology_; }
  const SculptureConfig& config() const { return config_; }
  double sim_time() const { return sim_time_; }

  // Advances time, drops finished envelopes.
  void step(double dt);

  // Registers an envelope on a channel. SMAs in cooldown and moths/LEDs
  // already mid-envelope refuse the activation (reported, not thrown).
  ApplyResult activate(int node, Channel channel, const ActuatorEnvelope& envelope);

  // Effective drive level of a channel right now: max of envelope profile
  // and the raw direct level.
  double intensity(int node, Channel channel) const;

  // All 24 sensors sampled at the current time.
  IrFrame read_ir_frame() const;

  // Raw actuator vector in [-1,1], node-major (moth, led, sma0..5 per node).
  // Out-of-range components are clipped and counted.
  void apply_raw_action(const std::vector<double>& raw);

  void set_visitors(std::vector<VisitorMark> visitors) { visitors_ = std::move(visitors); }
  const std::vector<VisitorMark>& visitors() const { return visitors_; }

  std::uint64_t clip_warning_count() const { return clip_warnings_; }
  double sma_cooldown_until(int node, int sma_index) const;

  int raw_action_size() const { return topology_.node_count() * kRawChannelsPerNode; }

 private:
  struct NodeState {
    std::vector<ActuatorEnvelope> moth_envelopes;
    std::vector<ActuatorEnvelope> led_envelopes;
    std::vector<ActuatorEnvelope> sma_envelopes[kSmaPerNode];
    double sma_cooldown_until[kSmaPerNode] = {};
    double moth_direct = 0.0;
    double led_direct = 0.0;
  };

  void check_node(int node) const;

  NodeTopology topology_;
  SculptureConfig config_;
  double sim_time_ = 0.0;
  std::vector<NodeState> nodes_;
  std::vector<VisitorMark> visitors_;
  std::uint64_t clip_warnings_ = 0;
};

// Maps one raw moth/LED component from [-1,1] onto a [0,1] intensity
// fraction (the 0..255 drive range). Clips out-of-range input.
double raw_to_intensity_fraction(double raw, bool* clipped = nullptr);

}  // namespace las
