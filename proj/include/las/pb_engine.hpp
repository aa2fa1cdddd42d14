#pragma once

#include <cstdint>
#include <queue>
#include <string>
#include <vector>

#include "las/params.hpp"
#include "las/rng.hpp"
#include "las/sculpture.hpp"
#include "las/topology.hpp"

namespace las {

// One actuator command produced by the behaviour engine. `time` is the
// scheduled start; the stepping loop applies commands as their time comes
// due.
struct Activation {
  enum class Cause { Reflex, Cascade, Background, Sweep };

  double time = 0.0;
  int node = 0;
  Channel channel;
  ActuatorEnvelope envelope;
  Cause cause = Cause::Reflex;
  std::uint64_t cascade_id = 0;
};

const char* to_string(Activation::Cause cause);

// Non-actuator happenings worth logging: triggers, mode switches, sweeps.
struct PbMarker {
  double time = 0.0;
  int node = -1;
  std::string event;
};

enum class SweepDirection { LeftToRight, RightToLeft };

struct PbConfig {
  double trigger_threshold = 0.0625;  // scaled reading, ~75cm
  double refractory_s = 2.0;          // per-sensor re-trigger lockout
  double min_period_s = kTickSeconds; // clamp for degenerate t_w / t_sma
};

// Moth/LED/SMA schedule of one node's reflex, anchored at `start`.
std::vector<Activation> local_reflex(const ParamVector& params,
                                     int node,
                                     double start);

// Column-by-column LED schedule across the long axis.
std::vector<Activation> sweep(const NodeTopology& topology,
                              const ParamVector& params,
                              SweepDirection direction,
                              double start);

// The two-state behaviour machine. Feed it one IR frame per tick; it returns
// the actuator commands that came due plus log markers. All randomness comes
// from the seed, so identical IR streams replay identically.
class PbEngine {
 public:
  struct TickOutput {
    std::vector<Activation> activations;
    std::vector<PbMarker> markers;
  };

  PbEngine(const NodeTopology* topology, std::uint64_t seed, PbConfig config = {});

  // Starts deadline clocks; call once with the start time before ticking.
  void reset(const ParamVector& params, double now);

  TickOutput tick(const ParamVector& params, const IrFrame& frame, double now);

  // Registers a sensor trigger: enters the active state and schedules the
  // cascade of local reflexes out to the edge nodes.
  void on_ir_trigger(const ParamVector& params, int node, double now,
                     TickOutput& out);

  bool in_background() const { return background_; }
  double background_deadline() const { return background_deadline_; }
  double sweep_deadline() const { return sweep_deadline_; }

 private:
  struct Queued {
    Activation activation;
    std::uint64_t seq;
  };
  struct QueuedLater {
    bool operator()(const Queued& a, const Queued& b) const {
      if (a.activation.time != b.activation.time) return a.activation.time > b.activation.time;
      return a.seq > b.seq;
    }
  };

  void enqueue(Activation activation);
  void drain_due(double now, TickOutput& out);
  void run_background_draws(const ParamVector& params, double now, TickOutput& out);

  const NodeTopology* topology_;
  PbConfig config_;
  Rng rng_;

  bool background_ = false;
  double background_deadline_ = 0.0;
  double sweep_deadline_ = 0.0;
  double next_bg_actuator_draw_ = 0.0;
  double next_bg_sma_draw_ = 0.0;

  std::priority_queue<Queued, std::vector<Queued>, QueuedLater> pending_;
  std::uint64_t seq_ = 0;
  std::uint64_t cascade_counter_ = 0;

  std::vector<double> prev_reading_;
  std::vector<double> refractory_until_;
};

}  // namespace las
