#include "hao/rover.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <map>

namespace hao {

std::vector<std::pair<double, double>> discretize_normal(double mean, double stddev, std::size_t buckets,
                                                         double floor) {
  if (stddev < 0.0) throw DomainError("negative standard deviation");
  if (buckets == 0) throw DomainError("need at least one bucket");
  if (!(mean > floor)) throw DomainError("mean must lie above the truncation floor");
  const double share = 1.0 / static_cast<double>(buckets);
  std::vector<std::pair<double, double>> out;
  if (stddev == 0.0) {
    for (std::size_t k = 0; k < buckets; ++k) out.emplace_back(mean, share);
    return out;
  }
  const boost::math::normal_distribution<double> unit(0.0, 1.0);
  const double z_floor = (floor - mean) / stddev;
  const double cdf_floor = boost::math::cdf(unit, z_floor);
  const double mass = 1.0 - cdf_floor;
  auto z_at = [&](std::size_t k) {
    if (k == 0) return z_floor;
    if (k == buckets) return kInf;
    return boost::math::quantile(unit, cdf_floor + mass * static_cast<double>(k) / static_cast<double>(buckets));
  };
  auto pdf = [&](double z) { return std::isinf(z) ? 0.0 : boost::math::pdf(unit, z); };
  for (std::size_t k = 0; k < buckets; ++k) {
    const double a = z_at(k), b = z_at(k + 1);
    const double slice = mass / static_cast<double>(buckets);
    double v = mean + stddev * (pdf(a) - pdf(b)) / slice;
    v = std::max(v, floor);
    out.emplace_back(v, share);
  }
  return out;
}

namespace {

struct Layout {
  std::size_t locations, rocks;
  std::size_t at(std::size_t l) const { return l; }
  std::size_t tracked(std::size_t r) const { return locations + r; }
  std::size_t moved() const { return locations + rocks; }
  std::size_t done(std::size_t r) const { return locations + rocks + 1 + r; }
};

double quantize(double v, double quantum, double c_min) {
  if (quantum > 0.0) v = std::round(v / quantum) * quantum;
  return std::max(v, std::max(c_min, quantum));
}

// Joint consumption distribution over resources, buckets independent per
// resource; equal vectors are merged.
std::vector<std::pair<std::vector<double>, double>> joint_consumption(const std::vector<Consumption>& per_resource,
                                                                      const std::vector<double>& surcharge,
                                                                      std::size_t tracked, const RoverParams& rp) {
  std::map<std::vector<double>, double> acc{{std::vector<double>{}, 1.0}};
  for (std::size_t i = 0; i < per_resource.size(); ++i) {
    const double extra = i < surcharge.size() ? surcharge[i] * static_cast<double>(tracked) : 0.0;
    const auto masses = discretize_normal(per_resource[i].mean + extra, per_resource[i].stddev, rp.buckets, 0.0);
    std::map<std::vector<double>, double> next;
    for (const auto& [vec, p] : acc) {
      for (const auto& [v, q] : masses) {
        auto w = vec;
        w.push_back(quantize(v, rp.quantum, rp.c_min));
        next[w] += p * q;
      }
    }
    acc = std::move(next);
  }
  return {acc.begin(), acc.end()};
}

Box minimum_requirement(const std::vector<std::pair<std::vector<double>, double>>& dist, std::size_t d) {
  Box b{std::vector<double>(d, 0.0), std::vector<double>(d, kInf)};
  for (const auto& [vec, p] : dist)
    for (std::size_t i = 0; i < d; ++i) b.lo[i] = std::max(b.lo[i], vec[i]);
  return b;
}

Outcome consume(const std::vector<double>& c, double p, const StateEffect& e, const PwcFunction& reward) {
  Outcome o;
  o.probability = p;
  o.effect = e;
  o.kind = EffectKind::kRelative;
  for (double v : c) o.resources.push_back(-v);
  o.reward = reward;
  return o;
}

void check_params(const RoverParams& rp) {
  const std::size_t d = rp.max_resources.size();
  if (d == 0) throw ConstructionError("rover needs at least one resource");
  if (rp.locations == 0 && !rp.rocks.empty()) throw ConstructionError("rocks without locations");
  if (rp.locations > 0 && rp.start_location >= rp.locations) throw ConstructionError("start location out of range");
  if (!rp.initial.empty() && rp.initial.size() != d) throw ConstructionError("initial resources have wrong dimension");
  for (const auto& path : rp.paths) {
    if (path.from >= rp.locations || path.to >= rp.locations) throw ConstructionError("path between unknown locations");
    if (path.navigate.size() != d) throw ConstructionError("navigate consumption needs one model per resource");
  }
  for (const auto& r : rp.rocks) {
    if (r.location >= rp.locations) throw ConstructionError("rock " + r.name + " at unknown location");
    if (!(r.reward > 0.0)) throw ConstructionError("rock " + r.name + " needs a positive reward");
    if (r.measure.size() != d) throw ConstructionError("rock " + r.name + " needs one measure model per resource");
    for (auto pi : r.enables)
      if (pi >= rp.paths.size()) throw ConstructionError("rock " + r.name + " enables an unknown path");
    for (const auto& [pi, q] : r.loss) {
      if (pi >= rp.paths.size()) throw ConstructionError("rock " + r.name + " has loss on an unknown path");
      if (q < 0.0 || q > 1.0) throw ConstructionError("loss probability outside [0,1]");
    }
    if (r.success_probability <= 0.0 || r.success_probability > 1.0)
      throw ConstructionError("success probability outside (0,1]");
  }
  if (rp.stop_tracking && rp.stop_cost.size() != d) throw ConstructionError("stop-tracking cost needs one model per resource");
  if (rp.rocks.size() > 16) throw ConstructionError("at most 16 rocks are supported");
}

}  // namespace

HybridProblem make_rover_problem(const RoverParams& rp) {
  check_params(rp);
  const std::size_t d = rp.max_resources.size();
  const std::size_t nr = rp.rocks.size();
  const Layout lay{rp.locations, nr};

  HybridProblem p;
  p.space.max = rp.max_resources;
  p.space.names = rp.resource_names;
  p.space.names.resize(d, "r");
  p.c_min = rp.c_min;
  for (std::size_t l = 0; l < rp.locations; ++l) p.fluent_names.push_back("at_L" + std::to_string(l + 1));
  for (const auto& r : rp.rocks) p.fluent_names.push_back("tracked_" + r.name);
  p.fluent_names.push_back("moved");
  for (const auto& r : rp.rocks) p.fluent_names.push_back("done_" + r.name);
  for (std::size_t r = 0; r < nr; ++r)
    p.goals.push_back(Goal{"done_" + rp.rocks[r].name, rp.rocks[r].reward, lay.tracked(r), lay.moved()});
  if (p.fluent_count() > DiscreteState::kMaxFluents) throw ConstructionError("too many fluents");

  if (rp.locations > 0) p.initial_state.set(lay.at(rp.start_location));
  for (std::size_t r = 0; r < nr; ++r)
    if (rp.rocks[r].initially_tracked) p.initial_state.set(lay.tracked(r));
  p.initial_point = rp.initial.empty() ? rp.max_resources : rp.initial;

  const PwcFunction no_reward(p.space.max, 0.0);

  // Navigate: one action per (path, tracked set) so cost and loss outcomes are exact.
  DiscreteState tracked_mask;
  for (std::size_t r = 0; r < nr; ++r) tracked_mask.set(lay.tracked(r));
  for (std::size_t pi = 0; pi < rp.paths.size(); ++pi) {
    const auto& path = rp.paths[pi];
    for (std::size_t subset = 1; subset < (std::size_t{1} << nr); ++subset) {
      bool enabled = false;
      std::size_t count = 0;
      std::vector<std::pair<std::size_t, double>> lossy;
      DiscreteState tracked_value;
      for (std::size_t r = 0; r < nr; ++r) {
        if (!((subset >> r) & 1u)) continue;
        ++count;
        tracked_value.set(lay.tracked(r));
        for (auto e : rp.rocks[r].enables) enabled |= (e == pi);
        for (const auto& [lp, q] : rp.rocks[r].loss)
          if (lp == pi && q > 0.0) lossy.emplace_back(r, q);
      }
      if (!enabled) continue;
      ActionSpec a;
      a.name = "Navigate(L" + std::to_string(path.from + 1) + ",L" + std::to_string(path.to + 1) + ")[";
      bool first = true;
      for (std::size_t r = 0; r < nr; ++r)
        if ((subset >> r) & 1u) {
          a.name += (first ? "" : ",") + rp.rocks[r].name;
          first = false;
        }
      a.name += "]";
      DiscreteState mask = tracked_mask, value = tracked_value;
      mask.set(lay.at(path.from));
      value.set(lay.at(path.from));
      a.source = StatePattern{mask, value};
      const auto dist = joint_consumption(path.navigate, path.per_rock_surcharge, count, rp);
      a.applicability = minimum_requirement(dist, d);
      Branch br{a.applicability, {}};
      for (std::size_t lost = 0; lost < (std::size_t{1} << lossy.size()); ++lost) {
        double pl = 1.0;
        StateEffect e;
        e.clear.set(lay.at(path.from));
        e.set.set(lay.at(path.to));
        e.set.set(lay.moved());
        if (path.from == path.to) e.clear.set(lay.at(path.from), false);
        for (std::size_t k = 0; k < lossy.size(); ++k) {
          if ((lost >> k) & 1u) {
            pl *= lossy[k].second;
            e.clear.set(lay.tracked(lossy[k].first));
          } else {
            pl *= 1.0 - lossy[k].second;
          }
        }
        if (pl <= 0.0) continue;
        for (const auto& [c, pc] : dist) br.outcomes.push_back(consume(c, pl * pc, e, no_reward));
      }
      a.branches.push_back(std::move(br));
      p.actions.push_back(std::move(a));
    }
  }

  // Measure rock r at its location.
  for (std::size_t r = 0; r < nr; ++r) {
    const auto& rock = rp.rocks[r];
    ActionSpec a;
    a.name = "Pic(" + rock.name + ")";
    DiscreteState mask, value;
    mask.set(lay.at(rock.location));
    value.set(lay.at(rock.location));
    mask.set(lay.tracked(r));
    value.set(lay.tracked(r));
    mask.set(lay.done(r));
    a.source = StatePattern{mask, value};
    const auto dist = joint_consumption(rock.measure, {}, 0, rp);
    a.applicability = minimum_requirement(dist, d);
    Branch br{a.applicability, {}};
    StateEffect success;
    success.set.set(lay.done(r));
    const PwcFunction reward(p.space.max, rock.reward);
    for (const auto& [c, pc] : dist) {
      br.outcomes.push_back(consume(c, rock.success_probability * pc, success, reward));
      if (rock.success_probability < 1.0)
        br.outcomes.push_back(consume(c, (1.0 - rock.success_probability) * pc, StateEffect{}, no_reward));
    }
    a.branches.push_back(std::move(br));
    p.actions.push_back(std::move(a));
  }

  if (rp.stop_tracking) {
    for (std::size_t r = 0; r < nr; ++r) {
      ActionSpec a;
      a.name = "StopTracking(" + rp.rocks[r].name + ")";
      DiscreteState mask, value;
      mask.set(lay.tracked(r));
      value.set(lay.tracked(r));
      a.source = StatePattern{mask, value};
      const auto dist = joint_consumption(rp.stop_cost, {}, 0, rp);
      a.applicability = minimum_requirement(dist, d);
      Branch br{a.applicability, {}};
      StateEffect e;
      e.clear.set(lay.tracked(r));
      for (const auto& [c, pc] : dist) br.outcomes.push_back(consume(c, pc, e, no_reward));
      a.branches.push_back(std::move(br));
      p.actions.push_back(std::move(a));
    }
  }
  return p;
}

RoverParams oversubscribed_rover_params(std::size_t branch_length, double max_energy) {
  if (branch_length < 3) throw ConstructionError("branch length must be at least 3");
  RoverParams rp;
  rp.locations = 1 + 3 * branch_length;
  rp.max_resources = {200.0, max_energy};
  rp.buckets = 1;
  std::vector<std::vector<std::size_t>> branch_paths(3);
  for (std::size_t b = 0; b < 3; ++b) {
    const std::size_t first = 1 + b * branch_length;
    for (std::size_t i = 0; i < branch_length; ++i) {
      branch_paths[b].push_back(rp.paths.size());
      rp.paths.push_back(RoverPath{i == 0 ? 0 : first + i - 1, first + i, {{3.0, 1.0}, {2.0, 0.5}}, {0.25, 0.25}});
    }
  }
  struct Placement {
    const char* name;
    std::size_t branch;
    std::size_t position;
    double reward;
  };
  const std::size_t last = branch_length - 1;
  const Placement rocks[] = {{"R1", 0, last, 16.0}, {"R2", 0, last - 2, 12.0}, {"R3", 1, last, 9.0},
                             {"R4", 1, last - 1, 7.0}, {"R5", 2, last, 4.0}};
  for (const auto& r : rocks) {
    RoverRock rock;
    rock.name = r.name;
    rock.location = 1 + r.branch * branch_length + r.position;
    rock.reward = r.reward;
    rock.enables = branch_paths[r.branch];
    rock.measure = {{4.0, 1.0}, {3.0, 0.5}};
    for (std::size_t b = 0; b < 3; ++b)
      for (auto path : branch_paths[b]) rock.loss.emplace_back(path, b == r.branch ? 0.1 : 1.0);
    rp.rocks.push_back(rock);
  }
  return rp;
}

RoverParams toy_rover_params(bool stochastic) {
  RoverParams rp;
  rp.locations = 2;
  rp.start_location = 0;
  rp.max_resources = {40.0, 40.0};
  rp.buckets = stochastic ? 3 : 1;
  const double sd_t = stochastic ? 1.0 : 0.0;
  const double sd_e = stochastic ? 0.5 : 0.0;
  rp.paths.push_back(RoverPath{0, 1, {{8.0, 2.0 * sd_t}, {6.0, 2.0 * sd_e}}, {1.0, 0.5}});
  RoverRock r1;
  r1.name = "R1";
  r1.location = 0;
  r1.enables = {0};
  r1.reward = 10.0;
  r1.measure = {{5.0, sd_t}, {4.0, sd_e}};
  RoverRock r2 = r1;
  r2.name = "R2";
  r2.location = 1;
  r2.reward = 20.0;
  r2.measure = {{6.0, sd_t}, {5.0, sd_e}};
  if (stochastic) {
    r1.loss = {{0, 0.2}};
    r2.loss = {{0, 0.3}};
  }
  rp.rocks = {r1, r2};
  return rp;
}

namespace {

using nlohmann::json;

std::vector<Consumption> consumption_from_json(const json& j) {
  std::vector<Consumption> out;
  for (const auto& c : j) out.push_back(Consumption{c.at("mean").get<double>(), c.value("stddev", 0.0)});
  return out;
}

json consumption_to_json(const std::vector<Consumption>& cs) {
  json out = json::array();
  for (const auto& c : cs) out.push_back({{"mean", c.mean}, {"stddev", c.stddev}});
  return out;
}

}  // namespace

RoverParams rover_params_from_json(const json& j) {
  try {
    RoverParams rp;
    rp.locations = j.at("locations").get<std::size_t>();
    rp.start_location = j.value("start_location", std::size_t{0});
    if (j.contains("resource_names")) rp.resource_names = j.at("resource_names").get<std::vector<std::string>>();
    rp.max_resources = j.at("max_resources").get<std::vector<double>>();
    rp.initial = j.value("initial", std::vector<double>{});
    rp.buckets = j.value("buckets", std::size_t{5});
    rp.stop_tracking = j.value("stop_tracking", false);
    if (j.contains("stop_cost")) rp.stop_cost = consumption_from_json(j.at("stop_cost"));
    rp.quantum = j.value("quantum", 1.0 / 1024.0);
    rp.c_min = j.value("c_min", kDefaultMinConsumption);
    for (const auto& pj : j.value("paths", json::array())) {
      RoverPath path;
      path.from = pj.at("from").get<std::size_t>();
      path.to = pj.at("to").get<std::size_t>();
      path.navigate = consumption_from_json(pj.at("navigate"));
      path.per_rock_surcharge = pj.value("per_rock_surcharge", std::vector<double>{});
      rp.paths.push_back(std::move(path));
    }
    for (const auto& rj : j.value("rocks", json::array())) {
      RoverRock r;
      r.name = rj.at("name").get<std::string>();
      r.location = rj.at("location").get<std::size_t>();
      r.enables = rj.value("enables", std::vector<std::size_t>{});
      for (const auto& lj : rj.value("loss", json::array()))
        r.loss.emplace_back(lj.at("path").get<std::size_t>(), lj.at("p").get<double>());
      r.reward = rj.at("reward").get<double>();
      r.measure = consumption_from_json(rj.at("measure"));
      r.success_probability = rj.value("success_probability", 1.0);
      r.initially_tracked = rj.value("initially_tracked", true);
      rp.rocks.push_back(std::move(r));
    }
    return rp;
  } catch (const json::exception& e) {
    throw ConstructionError(std::string("malformed rover parameters: ") + e.what());
  }
}

json rover_params_to_json(const RoverParams& rp) {
  json j;
  j["locations"] = rp.locations;
  j["start_location"] = rp.start_location;
  j["resource_names"] = rp.resource_names;
  j["max_resources"] = rp.max_resources;
  if (!rp.initial.empty()) j["initial"] = rp.initial;
  j["buckets"] = rp.buckets;
  j["stop_tracking"] = rp.stop_tracking;
  if (!rp.stop_cost.empty()) j["stop_cost"] = consumption_to_json(rp.stop_cost);
  j["quantum"] = rp.quantum;
  j["c_min"] = rp.c_min;
  json paths = json::array();
  for (const auto& p : rp.paths)
    paths.push_back({{"from", p.from}, {"to", p.to}, {"navigate", consumption_to_json(p.navigate)},
                     {"per_rock_surcharge", p.per_rock_surcharge}});
  j["paths"] = paths;
  json rocks = json::array();
  for (const auto& r : rp.rocks) {
    json loss = json::array();
    for (const auto& [pi, q] : r.loss) loss.push_back({{"path", pi}, {"p", q}});
    rocks.push_back({{"name", r.name}, {"location", r.location}, {"enables", r.enables}, {"loss", loss},
                     {"reward", r.reward}, {"measure", consumption_to_json(r.measure)},
                     {"success_probability", r.success_probability}, {"initially_tracked", r.initially_tracked}});
  }
  j["rocks"] = rocks;
  return j;
}

}  // namespace hao
