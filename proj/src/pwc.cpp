#include "hao/pwc.hpp"

#include <cmath>
#include <iomanip>
#include <set>

namespace hao {

std::optional<Box> clip_box(Box b, std::span<const double> upper) {
  if (b.lo.size() != upper.size() || b.hi.size() != upper.size())
    throw DomainError("box dimension does not match the hypercube");
  for (std::size_t i = 0; i < upper.size(); ++i) {
    b.lo[i] = std::max(b.lo[i], 0.0);
    if (b.hi[i] > upper[i]) b.hi[i] = kInf;
    if (!(b.lo[i] < b.hi[i]) || b.lo[i] > upper[i]) return std::nullopt;
  }
  return b;
}

bool boxes_overlap(const Box& a, const Box& b) {
  for (std::size_t i = 0; i < a.dims(); ++i)
    if (!(std::max(a.lo[i], b.lo[i]) < std::min(a.hi[i], b.hi[i]))) return false;
  return true;
}

namespace detail {

Grid::Grid(std::span<const double> upper, const std::vector<const std::vector<Box>*>& box_sets)
    : upper_(upper.begin(), upper.end()), cuts_(upper.size()), stride_(upper.size()) {
  const std::size_t d = upper.size();
  for (std::size_t i = 0; i < d; ++i) {
    auto& c = cuts_[i];
    c.push_back(0.0);
    c.push_back(upper[i]);
    for (const auto* set : box_sets) {
      for (const auto& b : *set) {
        if (b.lo[i] >= 0.0 && b.lo[i] <= upper[i]) c.push_back(b.lo[i]);
        if (b.hi[i] >= 0.0 && b.hi[i] <= upper[i]) c.push_back(b.hi[i]);
      }
    }
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  size_ = 1;
  for (std::size_t i = d; i-- > 0;) {
    stride_[i] = size_;
    size_ *= cuts_[i].size();
  }
}

std::size_t Grid::index_of(std::size_t d, double v) const {
  if (v == kInf) return cuts_[d].size();
  const auto& c = cuts_[d];
  return static_cast<std::size_t>(std::lower_bound(c.begin(), c.end(), v) - c.begin());
}

}  // namespace detail

namespace {

void require_same_domain(const PwcFunction& a, const PwcFunction& b) {
  if (a.upper() != b.upper()) throw DomainError("functions are defined over different hypercubes");
}

void require_indicator(const PwcFunction& f) {
  if (!is_indicator(f)) throw DomainError("region operation on a non-indicator function");
}

}  // namespace

PwcFunction constant(std::vector<double> upper, double value) { return PwcFunction(std::move(upper), value); }

PwcFunction indicator(std::vector<double> upper, const std::vector<Box>& boxes) {
  std::vector<Box> clipped;
  for (const auto& b : boxes)
    if (auto c = clip_box(b, upper)) clipped.push_back(std::move(*c));
  detail::Grid grid(upper, {&clipped});
  std::vector<double> cells(grid.size(), 0.0);
  for (const auto& b : clipped) grid.for_each_cell(b, [&](std::size_t c) { cells[c] = 1.0; });
  auto pieces = grid.merge(cells, 0.0, detail::ExactEq<double>{});
  return PwcFunction(std::move(upper), 0.0, std::move(pieces));
}

Box point_cell_box(std::span<const double> upper, std::span<const double> p, double width) {
  Box b{std::vector<double>(p.begin(), p.end()), std::vector<double>(p.size())};
  for (std::size_t i = 0; i < p.size(); ++i) {
    b.hi[i] = p[i] + width;
    if (b.hi[i] > upper[i]) b.hi[i] = kInf;
  }
  return b;
}

PwcFunction point_cell(std::vector<double> upper, std::span<const double> p, double width) {
  Box b = point_cell_box(upper, p, width);
  return indicator(std::move(upper), {b});
}

TaggedMax pointwise_max_tagged(std::span<const TaggedCandidate> candidates, const TagFunction* preferred) {
  if (candidates.empty()) throw DomainError("pointwise max of an empty candidate list");
  const auto& upper = candidates.front().f->upper();
  std::vector<std::vector<Box>> sets;
  for (const auto& c : candidates) {
    require_same_domain(*c.f, *candidates.front().f);
    std::vector<Box> bs;
    for (const auto& p : c.f->pieces()) bs.push_back(p.box);
    sets.push_back(std::move(bs));
  }
  if (preferred) {
    std::vector<Box> bs;
    for (const auto& p : preferred->pieces()) bs.push_back(p.box);
    sets.push_back(std::move(bs));
  }
  std::vector<const std::vector<Box>*> ptrs;
  for (const auto& s : sets) ptrs.push_back(&s);
  detail::Grid grid(upper, ptrs);

  std::vector<std::vector<double>> rasters;
  rasters.reserve(candidates.size());
  for (const auto& c : candidates) rasters.push_back(grid.rasterize(*c.f));
  std::vector<int> pref;
  if (preferred) pref = grid.rasterize(*preferred);

  auto pick = [&](auto value_of, int pref_tag, double& best, int& tag) {
    best = kNotApplicable;
    tag = kNoAction;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      const double v = value_of(k);
      if (v == kNotApplicable) continue;
      if (tag == kNoAction || v > best || (v == best && candidates[k].tag < tag)) {
        best = v;
        tag = candidates[k].tag;
      }
    }
    if (pref_tag == kNoAction || tag == kNoAction) return;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      if (candidates[k].tag != pref_tag) continue;
      const double v = value_of(k);
      if (v != kNotApplicable && v >= best - 1e-12 * std::max(1.0, std::fabs(best))) tag = pref_tag;
    }
  };

  std::vector<double> maxv(grid.size());
  std::vector<int> argv(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    pick([&](std::size_t k) { return rasters[k][c]; }, preferred ? pref[c] : kNoAction, maxv[c], argv[c]);
  }
  double def_v;
  int def_t;
  pick([&](std::size_t k) { return candidates[k].f->default_value(); },
       preferred ? preferred->default_value() : kNoAction, def_v, def_t);

  TaggedMax out{PwcFunction(upper, def_v, grid.merge(maxv, def_v, detail::ExactEq<double>{})),
                TagFunction(upper, def_t, grid.merge(argv, def_t, detail::ExactEq<int>{}))};
  return out;
}

PwcFunction affine_combine(std::span<const Term> terms, const PwcFunction* offset) {
  if (terms.empty() && !offset) throw DomainError("affine combination of nothing");
  const auto& upper = terms.empty() ? offset->upper() : terms.front().f->upper();
  std::vector<std::vector<Box>> sets;
  auto add = [&](const PwcFunction& f) {
    if (f.upper() != upper) throw DomainError("functions are defined over different hypercubes");
    std::vector<Box> bs;
    for (const auto& p : f.pieces()) bs.push_back(p.box);
    sets.push_back(std::move(bs));
  };
  for (const auto& t : terms)
    if (t.weight != 0.0) add(*t.f);
  if (offset) add(*offset);
  std::vector<const std::vector<Box>*> ptrs;
  for (const auto& s : sets) ptrs.push_back(&s);
  detail::Grid grid(upper, ptrs);

  std::vector<double> acc = offset ? grid.rasterize(*offset) : std::vector<double>(grid.size(), 0.0);
  double def = offset ? offset->default_value() : 0.0;
  for (const auto& t : terms) {
    if (t.weight == 0.0) continue;
    def += t.weight * t.f->default_value();
    // Default first, then overwrite by pieces: avoids a full raster per term.
    const double dv = t.weight * t.f->default_value();
    std::vector<char> hit(grid.size(), 0);
    for (const auto& p : t.f->pieces()) {
      const double pv = t.weight * p.value;
      grid.for_each_cell(p.box, [&](std::size_t c) {
        acc[c] += pv;
        hit[c] = 1;
      });
    }
    if (dv != 0.0)
      for (std::size_t c = 0; c < grid.size(); ++c)
        if (!hit[c]) acc[c] += dv;
  }
  return PwcFunction(upper, def, grid.merge(acc, def, detail::ExactEq<double>{}));
}

PwcFunction translate(const PwcFunction& f, std::span<const double> delta) {
  const std::size_t d = f.dims();
  if (delta.size() != d) throw DomainError("shift vector dimension mismatch");
  std::vector<Piece<double>> moved;
  moved.reserve(f.size());
  for (const auto& p : f.pieces()) {
    Box b = p.box;
    for (std::size_t i = 0; i < d; ++i) {
      b.lo[i] -= delta[i];
      if (b.hi[i] != kInf) b.hi[i] -= delta[i];
    }
    moved.push_back({std::move(b), p.value});
  }
  return PwcFunction(f.upper(), f.default_value(), std::move(moved));
}

PwcFunction shift(const PwcFunction& f, std::span<const double> delta, double fill) {
  const auto& upper = f.upper();
  const std::size_t d = upper.size();
  const PwcFunction translated = translate(f, delta);
  // Points whose image x + delta leaves the hypercube take `fill`. For a
  // positive component the closed face x_i = max_i - delta_i is treated as
  // outside; models never produce positive deltas.
  Box valid{std::vector<double>(d, 0.0), std::vector<double>(d, kInf)};
  for (std::size_t i = 0; i < d; ++i) {
    if (delta[i] < 0.0) valid.lo[i] = -delta[i];
    if (delta[i] > 0.0) valid.hi[i] = upper[i] - delta[i];
  }
  const auto mask = indicator(upper, {valid});
  return zip_with([fill](double m, double v) { return m != 0.0 ? v : fill; }, mask, translated);
}

PwcFunction restrict_to(const PwcFunction& f, const PwcFunction& mask, double fill) {
  require_same_domain(f, mask);
  return zip_with([fill](double m, double v) { return m != 0.0 ? v : fill; }, mask, f);
}

double max_abs_diff(const PwcFunction& f, const PwcFunction& g) {
  require_same_domain(f, g);
  const auto grid = detail::Grid::over(f, g);
  const auto a = grid.rasterize(f);
  const auto b = grid.rasterize(g);
  double worst = 0.0;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    if (a[c] == b[c]) continue;
    worst = std::max(worst, std::fabs(a[c] - b[c]));
  }
  return worst;
}

PwcFunction simplify(const PwcFunction& f, double tol) {
  if (tol < 0.0) throw DomainError("negative simplification tolerance");
  const auto grid = detail::Grid::over(f);
  const auto cells = grid.rasterize(f);
  auto pieces = grid.merge(cells, f.default_value(),
                           [tol](double a, double b) { return a == b || std::fabs(a - b) <= tol; });
  if (pieces.size() >= f.size()) return f;
  return PwcFunction(f.upper(), f.default_value(), std::move(pieces));
}

TagFunction simplify(const TagFunction& f) {
  const auto grid = detail::Grid::over(f);
  auto pieces = grid.merge(grid.rasterize(f), f.default_value(), detail::ExactEq<int>{});
  if (pieces.size() >= f.size()) return f;
  return TagFunction(f.upper(), f.default_value(), std::move(pieces));
}

bool is_indicator(const PwcFunction& f) {
  if (f.default_value() != 0.0) return false;
  for (const auto& p : f.pieces())
    if (p.value != 0.0 && p.value != 1.0) return false;
  return true;
}

PwcFunction region_and(const PwcFunction& a, const PwcFunction& b) {
  require_indicator(a);
  require_indicator(b);
  require_same_domain(a, b);
  if (a.size() == 0) return a;
  if (b.size() == 0) return b;
  return zip_with([](double x, double y) { return (x != 0.0 && y != 0.0) ? 1.0 : 0.0; }, a, b);
}

PwcFunction region_or(const PwcFunction& a, const PwcFunction& b) {
  require_indicator(a);
  require_indicator(b);
  require_same_domain(a, b);
  if (a.size() == 0) return b;
  if (b.size() == 0) return a;
  return zip_with([](double x, double y) { return (x != 0.0 || y != 0.0) ? 1.0 : 0.0; }, a, b);
}

PwcFunction region_not(const PwcFunction& a) {
  require_indicator(a);
  // The default must stay 0, so complement explicitly over the grid.
  const auto grid = detail::Grid::over(a);
  auto cells = grid.rasterize(a);
  for (auto& c : cells) c = c != 0.0 ? 0.0 : 1.0;
  return PwcFunction(a.upper(), 0.0, grid.merge(cells, 0.0, detail::ExactEq<double>{}));
}

PwcFunction region_minus(const PwcFunction& a, const PwcFunction& b) {
  require_indicator(a);
  require_indicator(b);
  require_same_domain(a, b);
  if (a.size() == 0 || b.size() == 0) return a;
  return zip_with([](double x, double y) { return (x != 0.0 && y == 0.0) ? 1.0 : 0.0; }, a, b);
}

PwcFunction intersect_box(const PwcFunction& a, const Box& b) {
  require_indicator(a);
  return region_and(a, indicator(a.upper(), {b}));
}

bool is_empty(const PwcFunction& f) {
  require_indicator(f);
  for (const auto& p : f.pieces())
    if (p.value != 0.0) return false;
  return true;
}

bool intersects(const PwcFunction& f, const Box& b) {
  require_indicator(f);
  const auto clipped = clip_box(b, f.upper());
  if (!clipped) return false;
  for (const auto& p : f.pieces())
    if (p.value != 0.0 && boxes_overlap(p.box, *clipped)) return true;
  return false;
}

PwcFunction support(const PwcFunction& f) {
  const auto grid = detail::Grid::over(f);
  auto cells = grid.rasterize(f);
  for (auto& c : cells) c = c > 0.0 ? 1.0 : 0.0;
  return PwcFunction(f.upper(), 0.0, grid.merge(cells, 0.0, detail::ExactEq<double>{}));
}

PwcFunction tag_region(const TagFunction& tags, int tag) {
  std::vector<Box> boxes;
  for (const auto& p : tags.pieces())
    if (p.value == tag) boxes.push_back(p.box);
  if (tags.default_value() == tag) {
    // Rare: the default carries the tag. Complement the other pieces.
    std::vector<Box> others;
    for (const auto& p : tags.pieces())
      if (p.value != tag) others.push_back(p.box);
    return region_not(indicator(tags.upper(), others));
  }
  return indicator(tags.upper(), boxes);
}

std::vector<int> tags_used(const TagFunction& tags) {
  std::set<int> s;
  for (const auto& p : tags.pieces())
    if (p.value != kNoAction) s.insert(p.value);
  return {s.begin(), s.end()};
}

double measure(const PwcFunction& f) {
  double total = 0.0;
  for (const auto& p : f.pieces()) {
    if (p.value == 0.0) continue;
    double v = 1.0;
    for (std::size_t i = 0; i < f.dims(); ++i) v *= std::min(p.box.hi[i], f.upper()[i]) - p.box.lo[i];
    total += v;
  }
  return total;
}

std::optional<Box> bounding_box(const PwcFunction& f) {
  std::optional<Box> out;
  for (const auto& p : f.pieces()) {
    if (p.value == 0.0) continue;
    if (!out) {
      out = p.box;
      continue;
    }
    for (std::size_t i = 0; i < f.dims(); ++i) {
      out->lo[i] = std::min(out->lo[i], p.box.lo[i]);
      out->hi[i] = std::max(out->hi[i], p.box.hi[i]);
    }
  }
  return out;
}

void write_pieces_csv(std::ostream& out, const PwcFunction& f) {
  const std::size_t d = f.dims();
  for (std::size_t i = 0; i < d; ++i) out << "lo_" << i + 1 << ',';
  for (std::size_t i = 0; i < d; ++i) out << "hi_" << i + 1 << ',';
  out << "value\n";
  out << std::setprecision(17);
  for (const auto& p : f.pieces()) {
    for (std::size_t i = 0; i < d; ++i) out << p.box.lo[i] << ',';
    for (std::size_t i = 0; i < d; ++i) out << std::min(p.box.hi[i], f.upper()[i]) << ',';
    out << p.value << '\n';
  }
}

void write_grid_csv(std::ostream& out, const PwcFunction& f, std::size_t resolution) {
  const std::size_t d = f.dims();
  if (resolution < 2) resolution = 2;
  for (std::size_t i = 0; i < d; ++i) out << "x_" << i + 1 << ',';
  out << "value\n";
  out << std::setprecision(17);
  std::vector<std::size_t> idx(d, 0);
  Point x(d);
  while (true) {
    for (std::size_t i = 0; i < d; ++i)
      x[i] = f.upper()[i] * static_cast<double>(idx[i]) / static_cast<double>(resolution - 1);
    for (std::size_t i = 0; i < d; ++i) out << x[i] << ',';
    out << f(x) << '\n';
    std::size_t i = d;
    while (true) {
      if (i == 0) return;
      --i;
      if (++idx[i] < resolution) break;
      idx[i] = 0;
    }
  }
}

}  // namespace hao
