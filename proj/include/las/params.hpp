#pragma once

#include <array>
#include <string>

namespace las {

inline constexpr int kParamCount = 17;
inline constexpr int kActionDim = 11;

// The 17 behaviour parameters. Times are seconds, i_max is a duty-cycle
// percentage, p is a probability.
struct ParamVector {
  double t_ru_m = 1.5;    // moth ramp up
  double t_ho_m = 1.0;    // moth hold
  double t_rd_m = 2.5;    // moth ramp down
  double t_ru_l = 1.5;    // led ramp up
  double t_ho_l = 1.0;    // led hold
  double t_rd_l = 2.5;    // led ramp down
  double i_max = 78.0;    // peak duty cycle percentage
  double t_gap_m = 1.5;   // moth start -> led start gap
  double t_gap_sma = 0.3; // gap between successive SMA arms
  double t_gap_n = 1.8;   // gap between neighbouring nodes in a cascade
  double t_bg_min = 45.0; // min idle time before background behaviour
  double t_bg_max = 90.0; // max idle time before background behaviour
  double t_w = 5.0;       // background moth/led draw period
  double p = 0.4;         // background activation probability
  double t_sma = 0.7;     // background SMA draw period
  double t_sw_min = 120.0; // min wait between LED sweeps
  double t_sw_max = 240.0; // max wait between LED sweeps

  double& operator[](int i);
  double operator[](int i) const;

  // Throws std::invalid_argument describing the first violated bound.
  void validate() const;
};

ParamVector default_params();

struct ParamRange {
  double lo;
  double hi;
};

// Permitted range per parameter, indexed like ParamVector::operator[].
// t_sma's published range is [1,5] while the baseline default is 0.7; the
// validation bound admits both, the action-space mapping uses [1,5].
const std::array<ParamRange, kParamCount>& param_ranges();
const std::array<std::string, kParamCount>& param_names();

// Indices (into ParamVector) of the 11 parameters the learning agent
// controls. The six excluded ones only take effect after a later trigger, so
// they stay at their defaults.
const std::array<int, kActionDim>& action_param_indices();
const std::array<ParamRange, kActionDim>& action_ranges();

// Affine [-1,1] -> [lo,hi] map per controlled dimension; endpoints map
// exactly. Excluded parameters keep the defaults.
ParamVector scale_action_to_params(const std::array<double, kActionDim>& normalized);

// Inverse of scale_action_to_params on the 11 controlled dimensions.
std::array<double, kActionDim> normalize_params(const ParamVector& params);

// normalize_params clamped into [-1,1]; used when expressing defaults in
// normalized coordinates (the t_sma default sits below its action range).
std::array<double, kActionDim> normalized_defaults();

}  // namespace las
