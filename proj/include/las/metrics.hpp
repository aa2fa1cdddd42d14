#pragma once

#include <map>
#include <vector>

#include "las/sculpture.hpp"

namespace las {

// Per-sensor baseline and blocked-sensor set, estimated from a period with
// nobody under the sculpture.
struct CalibrationProfile {
  std::vector<int> blocked_sensors;      // sorted sensor ids
  std::vector<double> baseline_offsets;  // one per sensor
  double window_start = 0.0;
  double window_end = 0.0;

  // Baseline = mean over the no-visitor window; blocked = near-constant
  // (stddev < 0.005) while pinned high (mean > 0.5).
  static CalibrationProfile from_frames(const std::vector<IrFrame>& frames,
                                        double window_start, double window_end);
};

// Frames with blocked sensors dropped and baselines shifted to zero.
// Analysis-only: the learning path always consumes raw readings.
struct CalibratedFrames {
  std::vector<int> sensor_ids;  // ids kept, ascending
  std::vector<IrFrame> frames;
};

CalibratedFrames calibrate(const std::vector<IrFrame>& frames,
                           const CalibrationProfile& profile);

// One wall-clock minute of frames at a fixed sample rate.
struct MinuteWindow {
  std::vector<IrFrame> frames;
  double sample_rate_hz = 10.0;

  MinuteWindow() = default;
  MinuteWindow(std::vector<IrFrame> frames, double sample_rate_hz);
};

// Mean of every reading in the window; [0,1].
double engagement(const MinuteWindow& window);

inline constexpr double kActiveThreshold = 0.25;  // reading at ~35cm

// Count of readings at or above the active threshold, divided by the sample
// rate.
double active_count(const MinuteWindow& window);

// Frames grouped into wall-clock minute buckets (floor(t/60)); trailing
// partial minutes are kept.
std::map<long long, MinuteWindow> bucket_by_minute(const std::vector<IrFrame>& frames,
                                                   double sample_rate_hz);

struct MannWhitneyResult {
  double u_a = 0.0;         // U statistic of the first sample
  double p_two_sided = 1.0;
  bool exact = false;
};

// Midrank U statistic. p is exact (full enumeration of label assignments)
// when both samples have at most 8 values, otherwise a tie-corrected normal
// approximation with continuity correction.
MannWhitneyResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b);

// Forced-method variants, exposed so the approximation can be compared with
// the exact tail on small samples.
MannWhitneyResult mann_whitney_u_exact(const std::vector<double>& a,
                                       const std::vector<double>& b);
MannWhitneyResult mann_whitney_u_approx(const std::vector<double>& a,
                                        const std::vector<double>& b);

}  // namespace las
