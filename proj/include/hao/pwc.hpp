#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

namespace hao {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Absolute tolerance for value equality (merging, convergence, ties).
inline constexpr double kValueTol = 1e-9;

/// Marks points where an action is not executable. Only ever compared, never summed.
inline constexpr double kNotApplicable = -kInf;

/// Policy tag meaning "no action".
inline constexpr int kNoAction = -1;

using Point = std::vector<double>;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Axis-aligned box, half-open [lo, hi) in every dimension.
///
/// An upper bound of +inf marks a box that reaches the top of the resource
/// hypercube and therefore owns its closed upper face. A box may be a thin
/// sliver [max, inf) that only covers that face.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dims() const { return lo.size(); }
  bool contains(std::span<const double> x) const {
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (!(lo[i] <= x[i] && x[i] < hi[i])) return false;
    return true;
  }
  friend bool operator==(const Box&, const Box&) = default;

  /// The whole hypercube.
  static Box whole(std::size_t dims) { return Box{std::vector<double>(dims, 0.0), std::vector<double>(dims, kInf)}; }
};

/// Clips `b` to [0, upper]. Upper bounds beyond `upper` become +inf.
/// Returns nullopt when nothing of the box lies in the hypercube.
std::optional<Box> clip_box(Box b, std::span<const double> upper);

/// True if the two (clipped) boxes share at least one point.
bool boxes_overlap(const Box& a, const Box& b);

template <class V>
struct Piece {
  Box box;
  V value;
};

/// Piecewise-constant function over the hypercube [0, upper].
///
/// Pieces are pairwise disjoint; points covered by no piece take the default.
template <class V>
class Piecewise {
 public:
  Piecewise() = default;
  Piecewise(std::vector<double> upper, V default_value)
      : upper_(std::move(upper)), default_(std::move(default_value)) {}

  /// Pieces must be pairwise disjoint; they are clipped to the hypercube.
  Piecewise(std::vector<double> upper, V default_value, std::vector<Piece<V>> pieces)
      : upper_(std::move(upper)), default_(std::move(default_value)) {
    pieces_.reserve(pieces.size());
    for (auto& p : pieces) {
      if (auto b = clip_box(std::move(p.box), upper_)) pieces_.push_back({std::move(*b), std::move(p.value)});
    }
  }

  const std::vector<double>& upper() const { return upper_; }
  std::size_t dims() const { return upper_.size(); }
  const V& default_value() const { return default_; }
  const std::vector<Piece<V>>& pieces() const { return pieces_; }
  std::size_t size() const { return pieces_.size(); }

  bool in_domain(std::span<const double> x) const {
    if (x.size() != upper_.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!(x[i] >= 0.0 && x[i] <= upper_[i])) return false;
    return true;
  }

  V operator()(std::span<const double> x) const {
    if (!in_domain(x)) throw DomainError("point outside the resource hypercube");
    for (const auto& p : pieces_)
      if (p.box.contains(x)) return p.value;
    return default_;
  }

 private:
  std::vector<double> upper_;
  V default_{};
  std::vector<Piece<V>> pieces_;
};

using PwcFunction = Piecewise<double>;
using TagFunction = Piecewise<int>;

template <class V>
V evaluate(const Piecewise<V>& f, std::span<const double> x) {
  return f(x);
}

namespace detail {

// Common refinement of several functions: per-dimension cut points. Cell j
// of a dimension spans [cuts[j], cuts[j+1]); the last cell is the top face
// sliver [upper, inf).
class Grid {
 public:
  Grid(std::span<const double> upper, const std::vector<const std::vector<Box>*>& box_sets);
  template <class... Vs>
  static Grid over(const Piecewise<Vs>&... fs) {
    std::vector<std::vector<Box>> sets;
    (sets.push_back(boxes_of(fs)), ...);
    std::vector<const std::vector<Box>*> ptrs;
    for (auto& s : sets) ptrs.push_back(&s);
    return Grid(first_upper(fs...), ptrs);
  }

  std::size_t dims() const { return cuts_.size(); }
  std::size_t size() const { return size_; }
  std::size_t extent(std::size_t d) const { return cuts_[d].size(); }
  std::size_t stride(std::size_t d) const { return stride_[d]; }
  std::size_t index_of(std::size_t d, double v) const;
  double cell_lo(std::size_t d, std::size_t j) const { return cuts_[d][j]; }
  double cell_hi(std::size_t d, std::size_t j) const { return j + 1 < cuts_[d].size() ? cuts_[d][j + 1] : kInf; }
  const std::vector<double>& upper() const { return upper_; }

  /// Calls fn(flat_index) for every cell with from[i] <= index[i] < to[i];
  /// stops early when fn returns false. Returns false if stopped early.
  template <class Fn>
  bool for_each_index(const std::vector<std::size_t>& from, const std::vector<std::size_t>& to, Fn&& fn) const {
    const std::size_t d = dims();
    for (std::size_t i = 0; i < d; ++i)
      if (from[i] >= to[i]) return true;
    std::vector<std::size_t> cur = from;
    while (true) {
      std::size_t flat = 0;
      for (std::size_t i = 0; i < d; ++i) flat += cur[i] * stride_[i];
      for (std::size_t k = from[d - 1]; k < to[d - 1]; ++k)
        if (!fn(flat + k - from[d - 1])) return false;
      std::size_t i = d - 1;
      while (true) {
        if (i == 0) return true;
        --i;
        if (++cur[i] < to[i]) break;
        cur[i] = from[i];
      }
    }
  }

  /// Calls fn(flat_index) for every cell inside the box.
  template <class Fn>
  void for_each_cell(const Box& b, Fn&& fn) const {
    const std::size_t d = dims();
    std::vector<std::size_t> from(d), to(d);
    for (std::size_t i = 0; i < d; ++i) {
      from[i] = index_of(i, b.lo[i]);
      to[i] = index_of(i, b.hi[i]);
    }
    for_each_index(from, to, [&](std::size_t c) {
      fn(c);
      return true;
    });
  }

  template <class V>
  std::vector<V> rasterize(const Piecewise<V>& f) const {
    std::vector<V> out(size_, f.default_value());
    for (const auto& p : f.pieces()) for_each_cell(p.box, [&](std::size_t c) { out[c] = p.value; });
    return out;
  }

  /// Greedily merges equal neighboring cells into boxes, dropping cells equal
  /// to the default.
  template <class V, class Eq>
  std::vector<Piece<V>> merge(const std::vector<V>& values, const V& default_value, Eq eq) const;

 private:
  template <class V>
  static std::vector<Box> boxes_of(const Piecewise<V>& f) {
    std::vector<Box> out;
    out.reserve(f.size());
    for (const auto& p : f.pieces()) out.push_back(p.box);
    return out;
  }
  template <class F, class... Rest>
  static std::span<const double> first_upper(const F& f, const Rest&...) {
    return f.upper();
  }

  std::vector<double> upper_;
  std::vector<std::vector<double>> cuts_;
  std::vector<std::size_t> stride_;
  std::size_t size_ = 1;
};

template <class V, class Eq>
std::vector<Piece<V>> Grid::merge(const std::vector<V>& values, const V& default_value, Eq eq) const {
  const std::size_t d = dims();
  std::vector<char> used(size_, 0);
  std::vector<Piece<V>> out;
  std::vector<std::size_t> start(d), stop(d), from(d), to(d);
  for (std::size_t flat = 0; flat < size_; ++flat) {
    if (used[flat]) continue;
    const V& seed = values[flat];
    if (eq(seed, default_value)) continue;
    std::size_t rem = flat;
    for (std::size_t i = 0; i < d; ++i) {
      start[i] = rem / stride_[i];
      rem %= stride_[i];
      stop[i] = start[i] + 1;
    }
    // Grow along the fastest dimension first, then slab by slab.
    for (std::size_t i = d; i-- > 0;) {
      while (stop[i] < extent(i)) {
        from = start;
        to = stop;
        from[i] = stop[i];
        to[i] = stop[i] + 1;
        const bool ok = for_each_index(from, to, [&](std::size_t c) { return !used[c] && eq(values[c], seed); });
        if (!ok) break;
        ++stop[i];
      }
    }
    for_each_index(start, stop, [&](std::size_t c) {
      used[c] = 1;
      return true;
    });
    Box b{std::vector<double>(d), std::vector<double>(d)};
    for (std::size_t i = 0; i < d; ++i) {
      b.lo[i] = cell_lo(i, start[i]);
      b.hi[i] = cell_hi(i, stop[i] - 1);
    }
    out.push_back({std::move(b), seed});
  }
  return out;
}

template <class V>
struct ExactEq {
  bool operator()(const V& a, const V& b) const { return a == b; }
};

}  // namespace detail

/// Applies `fn` pointwise to any number of functions over the same hypercube.
template <class Fn, class... Vs>
auto zip_with(Fn&& fn, const Piecewise<Vs>&... fs) {
  using R = std::invoke_result_t<Fn, const Vs&...>;
  if (((fs.size() == 0) && ...)) return Piecewise<R>(std::get<0>(std::tie(fs...)).upper(), fn(fs.default_value()...));
  const auto grid = detail::Grid::over(fs...);
  const auto rasters = std::make_tuple(grid.rasterize(fs)...);
  std::vector<R> out(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    out[c] = std::apply([&](const auto&... r) { return fn(r[c]...); }, rasters);
  }
  R def = fn(fs.default_value()...);
  auto pieces = grid.merge(out, def, detail::ExactEq<R>{});
  return Piecewise<R>(grid.upper(), def, std::move(pieces));
}

// ---- construction -----------------------------------------------------------

PwcFunction constant(std::vector<double> upper, double value);
/// Indicator of the union of (possibly overlapping) boxes.
PwcFunction indicator(std::vector<double> upper, const std::vector<Box>& boxes);
/// Indicator of a small cell [p, p + width) around a point, clipped to the hypercube.
PwcFunction point_cell(std::vector<double> upper, std::span<const double> p, double width);
Box point_cell_box(std::span<const double> upper, std::span<const double> p, double width);

// ---- arithmetic ---------------------------------------------------------------

struct TaggedCandidate {
  int tag;
  const PwcFunction* f;
};

struct TaggedMax {
  PwcFunction max;
  TagFunction argmax;
};

/// Pointwise max over candidates. Ties go to the tag `preferred` marks at the
/// point, then to the lowest tag. Where every candidate is kNotApplicable the
/// argmax is kNoAction.
TaggedMax pointwise_max_tagged(std::span<const TaggedCandidate> candidates, const TagFunction* preferred = nullptr);

struct Term {
  double weight;
  const PwcFunction* f;
};

/// Σ weight·f + offset.
PwcFunction affine_combine(std::span<const Term> terms, const PwcFunction* offset = nullptr);

/// g(x) = f(x + delta) wherever x + delta lies in the hypercube; elsewhere
/// the translated pieces and default are kept as they fall.
PwcFunction translate(const PwcFunction& f, std::span<const double> delta);

/// Pull-back g(x) = f(x + delta) where x + delta lies in the hypercube, `fill` elsewhere.
PwcFunction shift(const PwcFunction& f, std::span<const double> delta, double fill);

/// mask ? if_true : if_false, pointwise. `mask` must be an indicator.
template <class V>
Piecewise<V> select(const PwcFunction& mask, const Piecewise<V>& if_true, const Piecewise<V>& if_false) {
  return zip_with([](double m, const V& t, const V& f) { return m != 0.0 ? t : f; }, mask, if_true, if_false);
}

/// Restricts f to the mask, `fill` elsewhere.
PwcFunction restrict_to(const PwcFunction& f, const PwcFunction& mask, double fill);

/// Supremum over the hypercube of |f - g| (both finite where compared; equal infinities count as 0).
double max_abs_diff(const PwcFunction& f, const PwcFunction& g);

/// Merges neighbors whose values differ by at most tol. Never increases the piece count.
PwcFunction simplify(const PwcFunction& f, double tol);
TagFunction simplify(const TagFunction& f);

// ---- region algebra on {0,1} indicators ------------------------------------

bool is_indicator(const PwcFunction& f);
PwcFunction region_and(const PwcFunction& a, const PwcFunction& b);
PwcFunction region_or(const PwcFunction& a, const PwcFunction& b);
PwcFunction region_not(const PwcFunction& a);
PwcFunction region_minus(const PwcFunction& a, const PwcFunction& b);
PwcFunction intersect_box(const PwcFunction& a, const Box& b);
bool is_empty(const PwcFunction& indicator);
/// True if the indicator is nonzero somewhere in the box.
bool intersects(const PwcFunction& indicator, const Box& b);
/// Indicator of {x : f(x) > 0}.
PwcFunction support(const PwcFunction& f);
/// Indicator of {x : tags(x) == tag}.
PwcFunction tag_region(const TagFunction& tags, int tag);
/// Distinct tags used by pieces (kNoAction excluded), ascending.
std::vector<int> tags_used(const TagFunction& tags);
/// Lebesgue measure of the support inside the hypercube.
double measure(const PwcFunction& indicator);
/// Smallest box [0-floor ... , hi] containing the support; nullopt if empty.
std::optional<Box> bounding_box(const PwcFunction& indicator);

/// True if no two pieces overlap.
template <class V>
bool pieces_disjoint(const Piecewise<V>& f) {
  const auto& ps = f.pieces();
  for (std::size_t i = 0; i < ps.size(); ++i)
    for (std::size_t j = i + 1; j < ps.size(); ++j)
      if (boxes_overlap(ps[i].box, ps[j].box)) return false;
  return true;
}

// ---- export -------------------------------------------------------------------

/// One row per piece: lo_1..lo_d, hi_1..hi_d, value. Infinite upper bounds print as the hypercube max.
void write_pieces_csv(std::ostream& out, const PwcFunction& f);
/// Samples f on a resolution^d grid spanning [0, upper]: x_1..x_d, value.
void write_grid_csv(std::ostream& out, const PwcFunction& f, std::size_t resolution);

}  // namespace hao

namespace hao {

/// Box given in the external convention: an upper bound equal to the
/// hypercube max includes the closed top face.
inline Box external_box(std::vector<double> lo, std::vector<double> hi, std::span<const double> upper) {
  for (std::size_t i = 0; i < hi.size() && i < upper.size(); ++i)
    if (hi[i] >= upper[i]) hi[i] = kInf;
  return Box{std::move(lo), std::move(hi)};
}

}  // namespace hao
