#include "las/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace las {

CalibrationProfile CalibrationProfile::from_frames(const std::vector<IrFrame>& frames,
                                                   double window_start,
                                                   double window_end) {
  std::vector<const IrFrame*> window;
  for (const auto& f : frames)
    if (f.timestamp >= window_start && f.timestamp <= window_end) window.push_back(&f);
  if (window.empty())
    throw std::invalid_argument("calibration: no frames in the no-visitor window");

  const std::size_t n = window.front()->readings.size();
  CalibrationProfile profile;
  profile.window_start = window_start;
  profile.window_end = window_end;
  profile.baseline_offsets.assign(n, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0, sum_sq = 0.0;
    for (const auto* f : window) {
      if (f->readings.size() != n)
        throw std::invalid_argument("calibration: frame width mismatch");
      const double r = f->readings[i];
      sum += r;
      sum_sq += r * r;
    }
    const double mean = sum / static_cast<double>(window.size());
    const double var = std::max(sum_sq / static_cast<double>(window.size()) - mean * mean, 0.0);
    profile.baseline_offsets[i] = mean;
    if (std::sqrt(var) < 0.005 && mean > 0.5)
      profile.blocked_sensors.push_back(static_cast<int>(i));
  }
  return profile;
}

CalibratedFrames calibrate(const std::vector<IrFrame>& frames,
                           const CalibrationProfile& profile) {
  CalibratedFrames out;
  const std::size_t n = profile.baseline_offsets.size();
  for (std::size_t i = 0; i < n; ++i)
    if (!std::binary_search(profile.blocked_sensors.begin(), profile.blocked_sensors.end(),
                            static_cast<int>(i)))
      out.sensor_ids.push_back(static_cast<int>(i));

  out.frames.reserve(frames.size());
  for (const auto& f : frames) {
    if (f.readings.size() != n)
      throw std::invalid_argument("calibration: frame/profile sensor count mismatch");
    IrFrame g;
    g.timestamp = f.timestamp;
    g.readings.reserve(out.sensor_ids.size());
    for (int id : out.sensor_ids) {
      const double shifted =
          f.readings[static_cast<std::size_t>(id)] - profile.baseline_offsets[static_cast<std::size_t>(id)];
      g.readings.push_back(std::clamp(shifted, 0.0, 1.0));
    }
    out.frames.push_back(std::move(g));
  }
  return out;
}

MinuteWindow::MinuteWindow(std::vector<IrFrame> window_frames, double rate_hz)
    : frames(std::move(window_frames)), sample_rate_hz(rate_hz) {
  if (!frames.empty()) {
    const long long bucket = static_cast<long long>(std::floor(frames.front().timestamp / 60.0));
    for (const auto& f : frames) {
      if (static_cast<long long>(std::floor(f.timestamp / 60.0)) != bucket)
        throw std::invalid_argument("minute window: frames span more than one minute");
      if (f.readings.size() != frames.front().readings.size())
        throw std::invalid_argument("minute window: frame width mismatch");
    }
    if (sample_rate_hz > 0.0 &&
        static_cast<double>(frames.size()) > 60.0 * sample_rate_hz + 0.5)
      throw std::invalid_argument("minute window: more frames than the sample rate allows");
  }
}

double engagement(const MinuteWindow& window) {
  if (window.frames.empty()) throw std::invalid_argument("engagement: empty window");
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& f : window.frames) {
    sum = std::accumulate(f.readings.begin(), f.readings.end(), sum);
    count += f.readings.size();
  }
  return sum / static_cast<double>(count);
}

double active_count(const MinuteWindow& window) {
  if (window.frames.empty()) throw std::invalid_argument("active_count: empty window");
  if (!(window.sample_rate_hz > 0.0))
    throw std::invalid_argument("active_count: sample rate must be positive");
  std::size_t hits = 0;
  for (const auto& f : window.frames)
    for (double r : f.readings)
      if (r >= kActiveThreshold) ++hits;
  return static_cast<double>(hits) / window.sample_rate_hz;
}

std::map<long long, MinuteWindow> bucket_by_minute(const std::vector<IrFrame>& frames,
                                                   double sample_rate_hz) {
  std::map<long long, std::vector<IrFrame>> grouped;
  for (const auto& f : frames)
    grouped[static_cast<long long>(std::floor(f.timestamp / 60.0))].push_back(f);
  std::map<long long, MinuteWindow> out;
  for (auto& [minute, bucket] : grouped)
    out.emplace(minute, MinuteWindow(std::move(bucket), sample_rate_hz));
  return out;
}

namespace {

struct RankedSamples {
  std::vector<double> ranks_a;     // midranks of sample a in the pooled order
  std::vector<double> all_ranks;   // midranks of the pooled sample, sorted order
  std::vector<std::size_t> tie_groups;
};

RankedSamples midranks(const std::vector<double>& a, const std::vector<double>& b) {
  struct Tagged {
    double value;
    bool from_a;
  };
  std::vector<Tagged> pooled;
  pooled.reserve(a.size() + b.size());
  for (double v : a) pooled.push_back({v, true});
  for (double v : b) pooled.push_back({v, false});
  std::sort(pooled.begin(), pooled.end(),
            [](const Tagged& x, const Tagged& y) { return x.value < y.value; });

  RankedSamples out;
  out.all_ranks.resize(pooled.size());
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j].value == pooled[i].value) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j);  // average of i+1..j
    for (std::size_t k = i; k < j; ++k) {
      out.all_ranks[k] = rank;
      if (pooled[k].from_a) out.ranks_a.push_back(rank);
    }
    out.tie_groups.push_back(j - i);
    i = j;
  }
  return out;
}

double u_from_rank_sum(double rank_sum, std::size_t n) {
  return rank_sum - static_cast<double>(n * (n + 1)) / 2.0;
}

}  // namespace

MannWhitneyResult mann_whitney_u_exact(const std::vector<double>& a,
                                       const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("mann-whitney: empty sample");
  const std::size_t n = a.size();
  const std::size_t total = n + b.size();
  if (total > 20)
    throw std::invalid_argument("mann-whitney: sample too large for exact enumeration");

  const RankedSamples ranked = midranks(a, b);
  const double u_obs =
      u_from_rank_sum(std::accumulate(ranked.ranks_a.begin(), ranked.ranks_a.end(), 0.0), n);

  // Every way of labelling n of the pooled ranks as sample a.
  std::uint64_t count_le = 0, count_ge = 0, count_total = 0;
  const std::uint32_t limit = 1u << total;
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != n) continue;
    double rank_sum = 0.0;
    for (std::size_t k = 0; k < total; ++k)
      if (mask & (1u << k)) rank_sum += ranked.all_ranks[k];
    const double u = u_from_rank_sum(rank_sum, n);
    ++count_total;
    if (u <= u_obs + 1e-9) ++count_le;
    if (u >= u_obs - 1e-9) ++count_ge;
  }

  MannWhitneyResult result;
  result.u_a = u_obs;
  result.exact = true;
  const double tail =
      static_cast<double>(std::min(count_le, count_ge)) / static_cast<double>(count_total);
  result.p_two_sided = std::min(1.0, 2.0 * tail);
  return result;
}

MannWhitneyResult mann_whitney_u_approx(const std::vector<double>& a,
                                        const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("mann-whitney: empty sample");
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  const double total = n + m;

  const RankedSamples ranked = midranks(a, b);
  const double u_obs = u_from_rank_sum(
      std::accumulate(ranked.ranks_a.begin(), ranked.ranks_a.end(), 0.0), a.size());

  double tie_term = 0.0;
  for (std::size_t t : ranked.tie_groups) {
    const double td = static_cast<double>(t);
    tie_term += td * td * td - td;
  }
  const double variance =
      n * m / 12.0 * (total + 1.0 - tie_term / (total * (total - 1.0)));

  MannWhitneyResult result;
  result.u_a = u_obs;
  result.exact = false;
  if (variance <= 0.0) {
    result.p_two_sided = 1.0;  // all pooled values tied
    return result;
  }
  const double z = std::max(std::abs(u_obs - n * m / 2.0) - 0.5, 0.0) / std::sqrt(variance);
  result.p_two_sided = std::erfc(z / std::sqrt(2.0));
  return result;
}

MannWhitneyResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("mann-whitney: empty sample");
  if (a.size() <= 8 && b.size() <= 8) return mann_whitney_u_exact(a, b);
  return mann_whitney_u_approx(a, b);
}

}  // namespace las
