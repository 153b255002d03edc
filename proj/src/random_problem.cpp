#include "hao/random_problem.hpp"

#include <algorithm>
#include <random>

namespace hao {

namespace {

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  // Inclusive range; implementation-independent mapping.
  int between(int lo, int hi) { return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
  bool chance(double p) { return static_cast<double>(rng_() >> 11) * 0x1.0p-53 < p; }

 private:
  std::mt19937_64 rng_;
};

std::vector<Outcome> draw_outcomes(Draw& draw, const RandomProblemParams& rp, const HybridProblem& p,
                                   std::optional<std::size_t> goal) {
  const std::size_t d = rp.dims;
  const std::size_t count = static_cast<std::size_t>(draw.between(1, static_cast<int>(rp.max_outcomes)));
  std::vector<int> weights;
  int total = 0;
  for (std::size_t k = 0; k < count; ++k) {
    weights.push_back(draw.between(1, 4));
    total += weights.back();
  }
  std::vector<Outcome> out;
  double assigned = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    Outcome o;
    o.probability = k + 1 == count ? 1.0 - assigned : static_cast<double>(weights[k]) / total;
    assigned += o.probability;
    for (std::size_t f = 0; f < rp.plain_fluents; ++f) {
      if (draw.chance(0.2))
        o.effect.set.set(f);
      else if (draw.chance(0.25))
        o.effect.clear.set(f);
    }
    o.kind = EffectKind::kRelative;
    o.resources.assign(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) o.resources[i] = -draw.between(0, rp.max_step);
    const std::size_t forced = static_cast<std::size_t>(draw.between(0, static_cast<int>(d) - 1));
    if (o.resources[forced] == 0.0) o.resources[forced] = -draw.between(1, rp.max_step);
    o.reward = PwcFunction(p.space.max, 0.0);
    // The goal is achieved by the first outcome, and by others at random.
    if (goal && (k == 0 || draw.chance(0.4))) {
      const std::size_t gf = p.goal_fluent(*goal);
      o.effect.set.set(gf);
      const double r = p.goals[*goal].reward;
      if (draw.chance(rp.stepped_reward_probability)) {
        const double cut = draw.between(1, static_cast<int>(p.space.max[0]) - 1);
        Box high = Box::whole(d);
        high.lo[0] = cut;
        Box low = Box::whole(d);
        low.hi[0] = cut;
        o.reward = PwcFunction(p.space.max, 0.0, {{high, r}, {low, r / 2.0}});
      } else {
        o.reward = PwcFunction(p.space.max, r);
      }
    }
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace

HybridProblem make_random_problem(const RandomProblemParams& rp, std::uint64_t seed) {
  Draw draw(seed * 0x9e3779b97f4a7c15ull + 17);
  HybridProblem p;
  const std::size_t d = rp.dims;
  for (std::size_t i = 0; i < d; ++i) {
    p.space.max.push_back(draw.between(rp.min_resource, rp.max_resource));
    p.space.names.push_back("r" + std::to_string(i + 1));
  }
  for (std::size_t f = 0; f < rp.plain_fluents; ++f) p.fluent_names.push_back("f" + std::to_string(f));
  for (std::size_t g = 0; g < rp.goals; ++g) {
    p.goals.push_back(Goal{"g" + std::to_string(g), static_cast<double>(draw.between(1, 20)), {}, {}});
    p.fluent_names.push_back("g" + std::to_string(g));
  }
  for (std::size_t f = 0; f < rp.plain_fluents; ++f)
    if (draw.chance(0.5)) p.initial_state.set(f);
  p.initial_point = p.space.max;
  if (draw.chance(0.3))
    for (std::size_t i = 0; i < d; ++i) p.initial_point[i] = draw.between(static_cast<int>(p.space.max[i]) / 2, static_cast<int>(p.space.max[i]));

  const auto actions = static_cast<std::size_t>(draw.between(static_cast<int>(rp.min_actions), static_cast<int>(rp.max_actions)));
  for (std::size_t ai = 0; ai < actions; ++ai) {
    ActionSpec a;
    a.name = "a" + std::to_string(ai);
    for (std::size_t f = 0; f < rp.plain_fluents; ++f) {
      if (!draw.chance(0.4)) continue;
      a.source.mask.set(f);
      if (draw.chance(0.5)) a.source.value.set(f);
    }
    std::optional<std::size_t> goal;
    if (rp.goals > 0 && draw.chance(0.45)) {
      goal = static_cast<std::size_t>(draw.between(0, static_cast<int>(rp.goals) - 1));
      a.source.mask.set(p.goal_fluent(*goal));
      a.name += "_g" + std::to_string(*goal);
    }

    std::vector<std::vector<Outcome>> groups{draw_outcomes(draw, rp, p, goal)};
    const bool split = draw.chance(rp.split_probability);
    if (split) groups.push_back(draw_outcomes(draw, rp, p, goal));

    // Minimum requirement: enough to absorb every relative consumption.
    Box applic = Box::whole(d);
    for (const auto& g : groups)
      for (const auto& o : g)
        for (std::size_t i = 0; i < d; ++i) applic.lo[i] = std::max(applic.lo[i], -o.resources[i]);
    for (std::size_t i = 0; i < d; ++i) applic.lo[i] += draw.between(0, 2);
    applic.lo[0] = std::max(applic.lo[0], 1.0);
    a.applicability = applic;

    // Some outcomes jump to an absolute point below the requirement.
    for (auto& g : groups) {
      for (auto& o : g) {
        if (!draw.chance(rp.absolute_probability)) continue;
        o.kind = EffectKind::kAbsolute;
        for (std::size_t i = 0; i < d; ++i) o.resources[i] = draw.between(0, static_cast<int>(applic.lo[i]) - (i == 0 ? 1 : 0));
      }
    }

    const int cut_lo = static_cast<int>(applic.lo[0]) + 1;
    const int cut_hi = static_cast<int>(p.space.max[0]) - 1;
    if (split && cut_lo <= cut_hi) {
      const double cut = draw.between(cut_lo, cut_hi);
      Box low = applic, high = applic;
      low.hi[0] = cut;
      high.lo[0] = cut;
      a.branches.push_back(Branch{low, std::move(groups[0])});
      a.branches.push_back(Branch{high, std::move(groups[1])});
    } else {
      a.branches.push_back(Branch{applic, std::move(groups[0])});
    }
    p.actions.push_back(std::move(a));
  }
  return p;
}

}  // namespace hao
