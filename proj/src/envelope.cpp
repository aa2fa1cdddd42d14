#include "las/envelope.hpp"

namespace las {

double ActuatorEnvelope::intensity_at(double t) const {
  const double u = t - start_time;
  if (u < 0.0) return 0.0;
  if (u < t_ramp_up) return peak * (u / t_ramp_up);
  const double after_up = u - t_ramp_up;
  if (after_up < t_hold) return peak;
  const double after_hold = after_up - t_hold;
  if (after_hold < t_ramp_down) return peak * (1.0 - after_hold / t_ramp_down);
  return 0.0;
}

ActuatorEnvelope sma_pulse(double start_time, double cooldown_s) {
  ActuatorEnvelope e;
  e.kind = ActuatorKind::Sma;
  e.t_ramp_up = 0.1;
  e.t_hold = 0.8;
  e.t_ramp_down = 0.1;
  e.peak = 1.0;
  e.start_time = start_time;
  e.cooldown = cooldown_s;
  return e;
}

}  // namespace las
