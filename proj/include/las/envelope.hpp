#pragma once

#include <stdexcept>

namespace las {

enum class ActuatorKind { Moth, Led, Sma };

// Trapezoidal intensity profile: linear ramp to `peak`, hold, linear ramp
// back to zero. SMA wires use a fixed pulse shape (see sma_pulse) because
// their drive profile is not parameterized.
struct ActuatorEnvelope {
  ActuatorKind kind = ActuatorKind::Led;
  double t_ramp_up = 0.0;
  double t_hold = 0.0;
  double t_ramp_down = 0.0;
  double peak = 0.0;        // fraction of max intensity, [0,1]
  double start_time = 0.0;  // seconds
  double cooldown = 0.0;    // seconds, SMA only

  double end_time() const { return start_time + t_ramp_up + t_hold + t_ramp_down; }

  // Intensity at absolute time t; zero outside [start_time, end_time].
  double intensity_at(double t) const;

  // Active means mid-profile: start <= t < end.
  bool active_at(double t) const { return t >= start_time && t < end_time(); }

  void validate() const {
    if (t_ramp_up < 0 || t_hold < 0 || t_ramp_down < 0 || cooldown < 0)
      throw std::invalid_argument("envelope: negative duration");
    if (peak < 0.0 || peak > 1.0)
      throw std::invalid_argument("envelope: peak outside [0,1]");
  }
};

// Fixed SMA drive: 0.1s rise, 0.8s contraction hold, 0.1s release, followed
// by a cooldown during which re-activation is refused.
ActuatorEnvelope sma_pulse(double start_time, double cooldown_s);

}  // namespace las
