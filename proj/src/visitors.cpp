#include "las/visitors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace las {

VisitorBehaviour visitor_behaviour_from_string(const std::string& name) {
  if (name == "wanderer") return VisitorBehaviour::Wanderer;
  if (name == "hand_raiser") return VisitorBehaviour::HandRaiser;
  if (name == "brightest_led_seeker") return VisitorBehaviour::BrightestLedSeeker;
  throw std::invalid_argument("visitors: unknown behaviour '" + name + "'");
}

const char* to_string(VisitorBehaviour behaviour) {
  switch (behaviour) {
    case VisitorBehaviour::Wanderer: return "wanderer";
    case VisitorBehaviour::HandRaiser: return "hand_raiser";
    case VisitorBehaviour::BrightestLedSeeker: return "brightest_led_seeker";
  }
  return "?";
}

void VisitorScenario::validate() const {
  double prev = -1.0;
  for (const auto& a : arrivals) {
    if (a.time < prev) throw std::invalid_argument("visitors: arrivals not sorted");
    if (a.dwell_s < 0.0) throw std::invalid_argument("visitors: negative dwell");
    prev = a.time;
  }
  if (raised_height_m < standing_height_m)
    throw std::invalid_argument("visitors: raised height below standing height");
}

VisitorScenario VisitorScenario::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("visitors: cannot open " + path);
  nlohmann::json j;
  in >> j;
  VisitorScenario s;
  s.seed = j.value("seed", 0ull);
  s.standing_height_m = j.value("standing_height_m", s.standing_height_m);
  s.raised_height_m = j.value("raised_height_m", s.raised_height_m);
  s.walk_speed_mps = j.value("walk_speed_mps", s.walk_speed_mps);
  for (const auto& a : j.value("arrivals", nlohmann::json::array())) {
    VisitorArrival arrival;
    arrival.time = a.at("t").get<double>();
    arrival.behaviour = visitor_behaviour_from_string(a.at("behaviour").get<std::string>());
    arrival.dwell_s = a.at("dwell_s").get<double>();
    s.arrivals.push_back(arrival);
  }
  s.validate();
  return s;
}

VisitorScenario VisitorScenario::generate(std::uint64_t seed, double duration_s,
                                          double arrivals_per_min, double mean_dwell_s,
                                          const std::vector<VisitorBehaviour>& behaviours) {
  if (behaviours.empty()) throw std::invalid_argument("visitors: no behaviours to mix");
  VisitorScenario s;
  s.seed = seed;
  Rng rng = Rng(seed).split({0x5ca1ab1eull});
  const double rate_per_s = arrivals_per_min / 60.0;
  double t = 0.0;
  while (rate_per_s > 0.0) {
    t += -std::log(1.0 - rng.uniform()) / rate_per_s;
    if (t >= duration_s) break;
    VisitorArrival a;
    a.time = t;
    a.behaviour = behaviours[rng.uniform_index(behaviours.size())];
    a.dwell_s = -std::log(1.0 - rng.uniform()) * mean_dwell_s;
    s.arrivals.push_back(a);
  }
  return s;
}

VisitorCrowd::VisitorCrowd(const NodeTopology* topology, VisitorScenario scenario)
    : topology_(topology), scenario_(std::move(scenario)) {
  if (!topology_) throw std::invalid_argument("visitors: null topology");
  scenario_.validate();
  min_x_ = max_x_ = topology_->positions().front().x;
  min_y_ = max_y_ = topology_->positions().front().y;
  for (const auto& p : topology_->positions()) {
    min_x_ = std::min(min_x_, p.x);
    max_x_ = std::max(max_x_, p.x);
    min_y_ = std::min(min_y_, p.y);
    max_y_ = std::max(max_y_, p.y);
  }
  const double margin = 0.5;
  min_x_ -= margin;
  max_x_ += margin;
  min_y_ -= margin;
  max_y_ += margin;
}

void VisitorCrowd::apply_schedule(double now) {
  std::erase_if(visitors_, [now](const Visitor& v) { return now > v.depart_time; });
  while (next_arrival_ < scenario_.arrivals.size() &&
         scenario_.arrivals[next_arrival_].time <= now) {
    const auto& a = scenario_.arrivals[next_arrival_];
    Visitor v;
    v.id = spawned_++;
    v.behaviour = a.behaviour;
    v.depart_time = a.time + a.dwell_s;
    v.rng = Rng(scenario_.seed).split({0x715170ull, static_cast<std::uint64_t>(v.id)});
    // Enter from a random point on the boundary of the walkable area.
    if (v.rng.bernoulli(0.5)) {
      v.x = v.rng.bernoulli(0.5) ? min_x_ : max_x_;
      v.y = v.rng.uniform(min_y_, max_y_);
    } else {
      v.x = v.rng.uniform(min_x_, max_x_);
      v.y = v.rng.bernoulli(0.5) ? min_y_ : max_y_;
    }
    visitors_.push_back(std::move(v));
    ++next_arrival_;
  }
}

void VisitorCrowd::pick_wander_target(Visitor& v) {
  v.target_x = v.rng.uniform(min_x_, max_x_);
  v.target_y = v.rng.uniform(min_y_, max_y_);
  v.has_target = true;
}

void VisitorCrowd::advance(Visitor& v, const Sculpture& sculpture, double now, double dt) {
  if (v.behaviour == VisitorBehaviour::BrightestLedSeeker) {
    int best = 0;
    double best_level = -1.0;
    for (int u = 0; u < topology_->node_count(); ++u) {
      const double level = sculpture.intensity(u, Channel::led());
      if (level > best_level) {
        best_level = level;
        best = u;
      }
    }
    v.target_x = topology_->positions()[static_cast<std::size_t>(best)].x;
    v.target_y = topology_->positions()[static_cast<std::size_t>(best)].y;
    v.has_target = true;
  } else if (v.behaviour == VisitorBehaviour::HandRaiser && !v.has_target) {
    const int node = static_cast<int>(v.rng.uniform_index(
        static_cast<std::uint64_t>(topology_->node_count())));
    v.target_x = topology_->positions()[static_cast<std::size_t>(node)].x;
    v.target_y = topology_->positions()[static_cast<std::size_t>(node)].y;
    v.has_target = true;
  } else if (v.behaviour == VisitorBehaviour::Wanderer && !v.has_target) {
    pick_wander_target(v);
  }

  const double dx = v.target_x - v.x;
  const double dy = v.target_y - v.y;
  const double dist = std::hypot(dx, dy);
  const double stride = scenario_.walk_speed_mps * dt;
  const bool arrived = dist <= std::max(stride, 0.1);
  if (arrived) {
    v.x = v.target_x;
    v.y = v.target_y;
  } else {
    v.x += dx / dist * stride;
    v.y += dy / dist * stride;
  }

  switch (v.behaviour) {
    case VisitorBehaviour::Wanderer:
      if (arrived) v.has_target = false;  // stroll on next tick
      v.hand_raised = false;
      break;
    case VisitorBehaviour::HandRaiser:
    case VisitorBehaviour::BrightestLedSeeker:
      if (arrived && now >= v.next_decision) {
        v.hand_raised = v.rng.bernoulli(0.6);
        v.next_decision = now + v.rng.uniform(1.0, 3.0);
      }
      if (!arrived) v.hand_raised = false;
      break;
  }
}

void VisitorCrowd::step(Sculpture& sculpture, double now, double dt) {
  apply_schedule(now);
  std::vector<VisitorMark> marks;
  marks.reserve(visitors_.size());
  for (auto& v : visitors_) {
    advance(v, sculpture, now, dt);
    marks.push_back({v.x, v.y,
                     v.hand_raised ? scenario_.raised_height_m
                                   : scenario_.standing_height_m});
  }
  sculpture.set_visitors(std::move(marks));
}

}  // namespace las
