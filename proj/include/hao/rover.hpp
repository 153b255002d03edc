#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hao/json_fwd.hpp"
#include "hao/model.hpp"

namespace hao {

class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Discretizes a normal distribution truncated below `floor` into `buckets`
/// equiprobable point masses located at the conditional means of the quantile
/// slices. Returns (value, probability) pairs in increasing value order.
std::vector<std::pair<double, double>> discretize_normal(double mean, double stddev, std::size_t buckets, double floor);

/// Normal consumption of one resource.
struct Consumption {
  double mean = 0.0;
  double stddev = 0.0;
};

struct RoverPath {
  std::size_t from = 0;
  std::size_t to = 0;
  /// Per resource.
  std::vector<Consumption> navigate;
  /// Extra mean consumption per tracked rock, per resource.
  std::vector<double> per_rock_surcharge;
};

struct RoverRock {
  std::string name;
  std::size_t location = 0;
  /// Paths this rock enables when tracked.
  std::vector<std::size_t> enables;
  /// (path index, probability of losing track while following it).
  std::vector<std::pair<std::size_t, double>> loss;
  double reward = 0.0;
  std::vector<Consumption> measure;
  double success_probability = 1.0;
  bool initially_tracked = true;
};

struct RoverParams {
  std::size_t locations = 0;
  std::size_t start_location = 0;
  std::vector<std::string> resource_names{"time", "energy"};
  std::vector<double> max_resources;
  /// Initial resources; empty means max_resources.
  std::vector<double> initial;
  std::vector<RoverPath> paths;
  std::vector<RoverRock> rocks;
  std::size_t buckets = 5;
  bool stop_tracking = false;
  std::vector<Consumption> stop_cost;
  /// Consumption values are rounded to multiples of this (0 disables rounding).
  double quantum = 1.0 / 1024.0;
  double c_min = kDefaultMinConsumption;
};

/// Builds the rover domain: navigation gated on tracked rocks, stochastic
/// loss of tracks while moving, one measurement goal per rock.
///
/// Fluents, in order: at_<loc>..., tracked_<rock>..., moved, then one
/// done_<rock> goal bit per rock.
HybridProblem make_rover_problem(const RoverParams& params);

/// The two-rock example: rocks R1 (reward 10) at L1 and R2 (reward 20) at L2,
/// one path L1 -> L2, no stop-tracking actions.
RoverParams toy_rover_params(bool stochastic);

/// Five rocks on three branches leaving a hub, each branch a chain of
/// `branch_length` locations. Entering a branch loses track of the rocks on
/// the other two, so only one branch's goals can be pursued. Time is ample;
/// energy is the binding resource.
RoverParams oversubscribed_rover_params(std::size_t branch_length, double max_energy);

RoverParams rover_params_from_json(const nlohmann::json& j);
nlohmann::json rover_params_to_json(const RoverParams& params);

}  // namespace hao
