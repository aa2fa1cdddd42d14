#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "las/rng.hpp"
#include "las/sculpture.hpp"
#include "las/topology.hpp"

namespace las {

enum class VisitorBehaviour { Wanderer, HandRaiser, BrightestLedSeeker };

VisitorBehaviour visitor_behaviour_from_string(const std::string& name);
const char* to_string(VisitorBehaviour behaviour);

struct VisitorArrival {
  double time = 0.0;
  VisitorBehaviour behaviour = VisitorBehaviour::Wanderer;
  double dwell_s = 60.0;
};

// Deterministic crowd description: who shows up when, how they behave, and
// the body geometry the sensors see. Everything replays from the seed.
struct VisitorScenario {
  std::uint64_t seed = 0;
  std::vector<VisitorArrival> arrivals;  // sorted by time
  double standing_height_m = 1.7;
  double raised_height_m = 2.2;
  double walk_speed_mps = 0.8;

  void validate() const;

  static VisitorScenario from_json_file(const std::string& path);

  // Poisson-style arrivals over [0, duration_s] mixing the given behaviours.
  static VisitorScenario generate(std::uint64_t seed, double duration_s,
                                  double arrivals_per_min, double mean_dwell_s,
                                  const std::vector<VisitorBehaviour>& behaviours);
};

// Live visitors walking under the sculpture. step() applies scheduled
// arrivals/departures, advances everyone, and publishes the resulting body
// marks to the sculpture's sensors.
class VisitorCrowd {
 public:
  VisitorCrowd(const NodeTopology* topology, VisitorScenario scenario);

  void step(Sculpture& sculpture, double now, double dt);

  int active_count() const { return static_cast<int>(visitors_.size()); }

 private:
  struct Visitor {
    int id = 0;
    VisitorBehaviour behaviour = VisitorBehaviour::Wanderer;
    double depart_time = 0.0;
    double x = 0.0, y = 0.0;
    double target_x = 0.0, target_y = 0.0;
    bool has_target = false;
    bool hand_raised = false;
    double next_decision = 0.0;
    Rng rng{0};
  };

  void apply_schedule(double now);
  void advance(Visitor& v, const Sculpture& sculpture, double now, double dt);
  void pick_wander_target(Visitor& v);

  const NodeTopology* topology_;
  VisitorScenario scenario_;
  std::size_t next_arrival_ = 0;
  int spawned_ = 0;
  std::vector<Visitor> visitors_;
  double min_x_ = 0.0, max_x_ = 0.0, min_y_ = 0.0, max_y_ = 0.0;
};

}  // namespace las
