#include "las/params.hpp"

#include <algorithm>
#include <stdexcept>

namespace las {

namespace {

double* field_ptr(ParamVector& v, int i) {
  switch (i) {
    case 0: return &v.t_ru_m;
    case 1: return &v.t_ho_m;
    case 2: return &v.t_rd_m;
    case 3: return &v.t_ru_l;
    case 4: return &v.t_ho_l;
    case 5: return &v.t_rd_l;
    case 6: return &v.i_max;
    case 7: return &v.t_gap_m;
    case 8: return &v.t_gap_sma;
    case 9: return &v.t_gap_n;
    case 10: return &v.t_bg_min;
    case 11: return &v.t_bg_max;
    case 12: return &v.t_w;
    case 13: return &v.p;
    case 14: return &v.t_sma;
    case 15: return &v.t_sw_min;
    case 16: return &v.t_sw_max;
    default: throw std::out_of_range("params: index out of range");
  }
}

}  // namespace

double& ParamVector::operator[](int i) { return *field_ptr(*this, i); }

double ParamVector::operator[](int i) const {
  return *field_ptr(const_cast<ParamVector&>(*this), i);
}

ParamVector default_params() { return ParamVector{}; }

const std::array<ParamRange, kParamCount>& param_ranges() {
  // t_sma lower bound relaxed to its default (0.7), see header.
  static const std::array<ParamRange, kParamCount> ranges = {{
      {0, 5},     // t_ru_m
      {0, 5},     // t_ho_m
      {0, 5},     // t_rd_m
      {0, 5},     // t_ru_l
      {0, 5},     // t_ho_l
      {0, 5},     // t_rd_l
      {0, 100},   // i_max
      {0, 5},     // t_gap_m
      {0, 5},     // t_gap_sma
      {0, 5},     // t_gap_n
      {15, 60},   // t_bg_min
      {60, 100},  // t_bg_max
      {0, 10},    // t_w
      {0, 1},     // p
      {0.7, 5},   // t_sma
      {5, 200},   // t_sw_min
      {200, 400}, // t_sw_max
  }};
  return ranges;
}

const std::array<std::string, kParamCount>& param_names() {
  static const std::array<std::string, kParamCount> names = {
      "t_ru_m", "t_ho_m", "t_rd_m", "t_ru_l",  "t_ho_l",   "t_rd_l",
      "i_max",  "t_gap_m", "t_gap_sma", "t_gap_n", "t_bg_min", "t_bg_max",
      "t_w",    "p",      "t_sma",  "t_sw_min", "t_sw_max"};
  return names;
}

void ParamVector::validate() const {
  const auto& ranges = param_ranges();
  const auto& names = param_names();
  for (int i = 0; i < kParamCount; ++i) {
    const double v = (*this)[i];
    if (!(v >= ranges[static_cast<std::size_t>(i)].lo &&
          v <= ranges[static_cast<std::size_t>(i)].hi))
      throw std::invalid_argument("params: " + names[static_cast<std::size_t>(i)] +
                                  " out of range");
  }
  if (t_bg_min > t_bg_max) throw std::invalid_argument("params: t_bg_min > t_bg_max");
  if (t_sw_min > t_sw_max) throw std::invalid_argument("params: t_sw_min > t_sw_max");
}

const std::array<int, kActionDim>& action_param_indices() {
  static const std::array<int, kActionDim> idx = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 14};
  return idx;
}

const std::array<ParamRange, kActionDim>& action_ranges() {
  static const std::array<ParamRange, kActionDim> ranges = [] {
    std::array<ParamRange, kActionDim> out{};
    for (int j = 0; j < kActionDim; ++j) {
      const int i = action_param_indices()[static_cast<std::size_t>(j)];
      out[static_cast<std::size_t>(j)] = param_ranges()[static_cast<std::size_t>(i)];
    }
    out[10] = {1.0, 5.0};  // t_sma acts over its published range
    return out;
  }();
  return ranges;
}

ParamVector scale_action_to_params(const std::array<double, kActionDim>& normalized) {
  ParamVector out = default_params();
  const auto& idx = action_param_indices();
  const auto& ranges = action_ranges();
  for (int j = 0; j < kActionDim; ++j) {
    const double a = std::clamp(normalized[static_cast<std::size_t>(j)], -1.0, 1.0);
    const auto [lo, hi] = ranges[static_cast<std::size_t>(j)];
    out[idx[static_cast<std::size_t>(j)]] = lo + (a + 1.0) * (hi - lo) * 0.5;
  }
  return out;
}

std::array<double, kActionDim> normalize_params(const ParamVector& params) {
  std::array<double, kActionDim> out{};
  const auto& idx = action_param_indices();
  const auto& ranges = action_ranges();
  for (int j = 0; j < kActionDim; ++j) {
    const auto [lo, hi] = ranges[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(j)] =
        2.0 * (params[idx[static_cast<std::size_t>(j)]] - lo) / (hi - lo) - 1.0;
  }
  return out;
}

std::array<double, kActionDim> normalized_defaults() {
  auto out = normalize_params(default_params());
  for (auto& v : out) v = std::clamp(v, -1.0, 1.0);
  return out;
}

}  // namespace las
