#include "hao/model.hpp"

#include <cmath>
#include <sstream>

namespace hao {

bool ResourceSpace::contains(std::span<const double> x) const {
  if (x.size() != max.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] >= 0.0 && x[i] <= max[i])) return false;
  return true;
}

const Branch* ActionSpec::branch_at(std::span<const double> x) const {
  for (const auto& b : branches)
    if (b.region.contains(x)) return &b;
  return nullptr;
}

std::optional<std::size_t> HybridProblem::fluent_index(const std::string& name) const {
  for (std::size_t i = 0; i < fluent_names.size(); ++i)
    if (fluent_names[i] == name) return i;
  return std::nullopt;
}

std::vector<double> HybridProblem::goal_rewards() const {
  std::vector<double> out;
  out.reserve(goals.size());
  for (const auto& g : goals) out.push_back(g.reward);
  return out;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

bool valid_box(const Box& b, std::size_t d) { return b.lo.size() == d && b.hi.size() == d; }

std::optional<Box> intersect(const Box& a, const Box& b) {
  Box r = a;
  for (std::size_t i = 0; i < a.dims(); ++i) {
    r.lo[i] = std::max(a.lo[i], b.lo[i]);
    r.hi[i] = std::min(a.hi[i], b.hi[i]);
    if (!(r.lo[i] < r.hi[i])) return std::nullopt;
  }
  return r;
}

void check_outcome(const HybridProblem& p, const ActionSpec& a, const Box& region, const Outcome& o,
                   DiscreteState goal_mask, std::vector<Violation>& out) {
  const std::size_t d = p.space.dims();
  auto report = [&](const std::string& m) { out.push_back({a.name, m}); };
  if (!(o.probability > 0.0 && o.probability <= 1.0)) report("outcome probability " + fmt(o.probability) + " not in (0,1]");
  if (o.resources.size() != d) {
    report("outcome resource vector has wrong dimension");
    return;
  }
  if (o.kind == EffectKind::kRelative) {
    bool all_zero = true, positive = false, enough = false;
    for (std::size_t i = 0; i < d; ++i) {
      if (o.resources[i] != 0.0) all_zero = false;
      if (o.resources[i] > 0.0) positive = true;
      if (o.resources[i] <= -p.c_min) enough = true;
    }
    if (all_zero)
      report("zero consumption");
    else if (positive)
      report("positive delta replenishes a resource");
    else if (!enough)
      report("consumption below c_min in every dimension");
    for (std::size_t i = 0; i < d; ++i) {
      if (region.lo[i] + o.resources[i] < 0.0) {
        report("arrival outside the resource space (dimension " + std::to_string(i) + ")");
        break;
      }
    }
  } else {
    if (!p.space.contains(o.resources)) report("absolute arrival point outside the resource space");
    bool consumes = false, monotone = true;
    for (std::size_t i = 0; i < d; ++i) {
      if (o.resources[i] > region.lo[i]) monotone = false;
      if (o.resources[i] <= region.lo[i] - p.c_min) consumes = true;
    }
    if (!monotone) report("absolute arrival point exceeds available resources");
    if (!consumes) report("absolute outcome consumes less than c_min");
  }
  if (o.reward.upper() != p.space.max) {
    report("reward function defined over a different resource space");
    return;
  }
  // Rewards must be bounded by the goals they achieve, so the goal-sum heuristic stays admissible.
  if (!(o.effect.clear & goal_mask).none()) report("outcome clears a goal bit");
  double max_reward = o.reward.default_value();
  for (const auto& piece : o.reward.pieces()) max_reward = std::max(max_reward, piece.value);
  double earned = 0.0;
  for (std::size_t g = 0; g < p.goals.size(); ++g) {
    const std::size_t f = p.goal_fluent(g);
    if (o.effect.set.test(f) && a.source.mask.test(f) && !a.source.value.test(f)) earned += p.goals[g].reward;
  }
  if (max_reward > earned + kValueTol) report("reward " + fmt(max_reward) + " exceeds the goals it achieves (" + fmt(earned) + ")");
  for (const auto& g : p.goals) {
    if (!g.requires_fluent || !g.lock_fluent) continue;
    if (o.effect.clear.test(*g.lock_fluent)) report("outcome clears pruning lock fluent of goal " + g.name);
    if (o.effect.set.test(*g.requires_fluent) &&
        !(a.source.mask.test(*g.lock_fluent) && !a.source.value.test(*g.lock_fluent)))
      report("outcome may set required fluent of goal " + g.name + " after its lock");
  }
}

}  // namespace

std::vector<Violation> validate_problem(const HybridProblem& p) {
  std::vector<Violation> out;
  const std::size_t d = p.space.dims();
  if (d == 0) out.push_back({"", "resource space has no dimensions"});
  for (double m : p.space.max)
    if (!(m > 0.0)) out.push_back({"", "resource maximum " + fmt(m) + " is not positive"});
  if (!(p.c_min > 0.0)) out.push_back({"", "c_min must be positive"});
  if (p.fluent_count() > DiscreteState::kMaxFluents) out.push_back({"", "too many fluents"});
  if (p.goals.size() > p.fluent_count()) out.push_back({"", "more goals than fluents"});
  if (!p.space.contains(p.initial_point)) out.push_back({"", "initial resources outside the resource space"});
  for (const auto& g : p.goals)
    if (g.reward < 0.0) out.push_back({"", "goal " + g.name + " has negative reward"});
  if (!out.empty()) return out;

  DiscreteState goal_mask;
  for (std::size_t g = 0; g < p.goals.size(); ++g) goal_mask.set(p.goal_fluent(g));

  for (const auto& a : p.actions) {
    auto report = [&](const std::string& m) { out.push_back({a.name, m}); };
    if (!valid_box(a.applicability, d)) {
      report("applicability box has wrong dimension");
      continue;
    }
    const auto applic = clip_box(a.applicability, p.space.max);
    if (!applic) continue;  // never executable; harmless
    std::vector<Box> parts;
    for (const auto& br : a.branches) {
      if (!valid_box(br.region, d)) {
        report("branch region has wrong dimension");
        continue;
      }
      auto region = clip_box(br.region, p.space.max);
      if (!region) continue;
      auto inside = intersect(*region, *applic);
      if (!inside) continue;
      for (const auto& prev : parts)
        if (boxes_overlap(prev, *inside)) report("branch regions overlap");
      parts.push_back(*inside);
      double total = 0.0;
      for (const auto& o : br.outcomes) total += o.probability;
      if (std::fabs(total - 1.0) > 1e-9) report("probabilities sum to " + fmt(total));
      for (const auto& o : br.outcomes) check_outcome(p, a, *inside, o, goal_mask, out);
    }
    const double covered = measure(indicator(p.space.max, parts));
    const double need = measure(indicator(p.space.max, {*applic}));
    if (std::fabs(covered - need) > 1e-9 * std::max(1.0, need)) report("branch regions do not cover the applicability region");
  }
  return out;
}

std::vector<std::size_t> matching_actions(const HybridProblem& p, const DiscreteState& n) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < p.actions.size(); ++i)
    if (p.actions[i].source.matches(n)) out.push_back(i);
  return out;
}

std::vector<std::size_t> executable_actions(const HybridProblem& p, const DiscreteState& n,
                                            std::span<const double> x) {
  if (!p.space.contains(x)) throw DomainError("resource point outside the resource space");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < p.actions.size(); ++i) {
    const auto& a = p.actions[i];
    if (a.source.matches(n) && a.applicability.contains(x)) out.push_back(i);
  }
  return out;
}

bool is_terminal(const HybridProblem& p, const DiscreteState& n, std::span<const double> x) {
  return executable_actions(p, n, x).empty();
}

PwcFunction nonterminal_region(const HybridProblem& p, const DiscreteState& n) {
  std::vector<Box> boxes;
  for (auto i : matching_actions(p, n)) boxes.push_back(p.actions[i].applicability);
  return indicator(p.space.max, boxes);
}

Point arrival_point(const Outcome& o, std::span<const double> x) {
  if (o.kind == EffectKind::kAbsolute) return o.resources;
  Point y(x.begin(), x.end());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += o.resources[i];
  return y;
}

}  // namespace hao
