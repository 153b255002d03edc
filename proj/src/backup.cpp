#include "hao/backup.hpp"

#include <algorithm>
#include <map>

namespace hao {

namespace {

std::optional<Box> intersect(const Box& a, const Box& b) {
  Box r = a;
  for (std::size_t i = 0; i < a.dims(); ++i) {
    r.lo[i] = std::max(a.lo[i], b.lo[i]);
    r.hi[i] = std::min(a.hi[i], b.hi[i]);
    if (!(r.lo[i] < r.hi[i])) return std::nullopt;
  }
  return r;
}

}  // namespace

QResult q_value(const HybridProblem& p, const DiscreteState& n, std::size_t action, const PwcFunction& region,
                const ValueLookup& successor_values, bool with_reward) {
  const auto& a = p.actions.at(action);
  const auto& upper = p.space.max;
  PwcFunction q(upper, kNotApplicable);
  const auto applic = clip_box(a.applicability, upper);
  if (!applic) return {action, q};
  for (const auto& br : a.branches) {
    const auto inside = intersect(br.region, *applic);
    if (!inside) continue;
    if (!intersects(region, *inside)) continue;
    const auto area = intersect_box(region, *inside);

    // Only points of `area` are read back, and every arrival from there lies in
    // the hypercube, so translated functions need no validity mask.
    std::vector<PwcFunction> moved;
    std::vector<double> weights;
    moved.reserve(2 * br.outcomes.size());
    double constant_part = 0.0;
    for (const auto& o : br.outcomes) {
      if (o.probability == 0.0) continue;
      const auto& next = successor_values(o.effect.apply(n));
      if (next.upper() != upper) throw ContractError("successor value over a different resource space");
      if (o.kind == EffectKind::kAbsolute) {
        double v = next(o.resources);
        if (with_reward) v += o.reward(o.resources);
        constant_part += o.probability * v;
        continue;
      }
      auto add = [&](const PwcFunction& f) {
        if (f.size() == 0) {
          constant_part += o.probability * f.default_value();
        } else {
          moved.push_back(translate(f, o.resources));
          weights.push_back(o.probability);
        }
      };
      add(next);
      if (with_reward) add(o.reward);
    }
    std::vector<Term> terms;
    for (std::size_t k = 0; k < moved.size(); ++k) terms.push_back({weights[k], &moved[k]});
    const PwcFunction offset(upper, constant_part);
    const auto expected = affine_combine(terms, &offset);
    q = select(area, expected, q);
  }
  return {action, q};
}

BackupResult bellman_backup(const HybridProblem& p, const DiscreteState& n, const PwcFunction& region,
                            const ValueLookup& successor_values, const TagFunction* marked) {
  const auto& upper = p.space.max;
  std::vector<QResult> qs;
  for (auto ai : matching_actions(p, n)) {
    const auto applic = clip_box(p.actions[ai].applicability, upper);
    if (!applic || !intersects(region, *applic)) continue;
    qs.push_back(q_value(p, n, ai, region, successor_values));
  }
  if (qs.empty()) return {PwcFunction(upper, 0.0), TagFunction(upper, kNoAction)};
  std::vector<TaggedCandidate> cands;
  for (const auto& q : qs) cands.push_back({static_cast<int>(q.action), &q.q});
  const auto best = pointwise_max_tagged(cands, marked);
  auto value = zip_with([](double r, double v) { return (r != 0.0 && v != kNotApplicable) ? v : 0.0; }, region, best.max);
  auto policy = zip_with([](double r, int t) { return r != 0.0 ? t : kNoAction; }, region, best.argmax);
  return {simplify(value, kValueTol), std::move(policy)};
}

PwcFunction policy_backup(const HybridProblem& p, const DiscreteState& n, const TagFunction& policy,
                          const PwcFunction& region, const ValueLookup& successor_values, bool with_reward) {
  const auto& upper = p.space.max;
  PwcFunction out(upper, 0.0);
  for (int tag : tags_used(policy)) {
    const auto area = region_and(region, tag_region(policy, tag));
    if (is_empty(area)) continue;
    const auto q = q_value(p, n, static_cast<std::size_t>(tag), area, successor_values, with_reward).q;
    out = zip_with([](double m, double v, double old) { return (m != 0.0 && v != kNotApplicable) ? v : old; }, area, q,
                   out);
  }
  return out;
}

PwcFunction reach_image(const HybridProblem& p, const DiscreteState& n, const PwcFunction& source, std::size_t action,
                        const DiscreteState& successor) {
  const auto& a = p.actions.at(action);
  const auto& upper = p.space.max;
  const double width = p.c_min / 2.0;
  std::vector<Box> boxes;
  const auto applic = clip_box(a.applicability, upper);
  if (!applic) return PwcFunction(upper, 0.0);
  for (const auto& br : a.branches) {
    const auto inside = intersect(br.region, *applic);
    if (!inside) continue;
    for (const auto& piece : source.pieces()) {
      if (piece.value == 0.0) continue;
      const auto s = intersect(piece.box, *inside);
      if (!s) continue;
      for (const auto& o : br.outcomes) {
        if (o.probability <= 0.0 || o.effect.apply(n) != successor) continue;
        if (o.kind == EffectKind::kAbsolute) {
          boxes.push_back(point_cell_box(upper, o.resources, width));
          continue;
        }
        Box img = *s;
        for (std::size_t i = 0; i < img.dims(); ++i) {
          img.lo[i] += o.resources[i];
          // The top face [max] maps to the single level max + delta.
          img.hi[i] = img.hi[i] == kInf ? upper[i] + o.resources[i] + width : img.hi[i] + o.resources[i];
        }
        boxes.push_back(std::move(img));
      }
    }
  }
  return indicator(upper, boxes);
}

std::vector<DiscreteState> successors(const HybridProblem& p, const DiscreteState& n, std::size_t action) {
  std::vector<DiscreteState> out;
  for (const auto& br : p.actions.at(action).branches)
    for (const auto& o : br.outcomes)
      if (o.probability > 0.0) out.push_back(o.effect.apply(n));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace hao
