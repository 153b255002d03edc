#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "hao/pwc.hpp"

namespace testing {

using hao::Box;
using hao::Point;
using hao::PwcFunction;

/// Grid of probe points including both ends of every axis and the midpoints
/// between grid lines, so every half-open boundary is exercised from both sides.
inline std::vector<Point> probe_grid(const std::vector<double>& upper, std::size_t per_dim) {
  const std::size_t d = upper.size();
  std::vector<std::vector<double>> axis(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < per_dim; ++k) axis[i].push_back(upper[i] * double(k) / double(per_dim - 1));
  }
  std::vector<Point> out;
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    Point p(d);
    for (std::size_t i = 0; i < d; ++i) p[i] = axis[i][idx[i]];
    out.push_back(p);
    std::size_t i = d;
    while (true) {
      if (i == 0) return out;
      --i;
      if (++idx[i] < per_dim) break;
      idx[i] = 0;
    }
  }
}

/// Random function on an integer lattice: random cuts per axis, a random
/// value per cell, one piece per cell (deliberately fragmented).
inline PwcFunction random_lattice_function(std::mt19937_64& rng, const std::vector<double>& upper, int max_cuts,
                                           int value_range, bool indicator = false) {
  const std::size_t d = upper.size();
  std::vector<std::vector<double>> cuts(d);
  for (std::size_t i = 0; i < d; ++i) {
    cuts[i] = {0.0, upper[i]};
    std::uniform_int_distribution<int> n(0, max_cuts), at(1, int(upper[i]) - 1);
    for (int k = n(rng); k > 0; --k) cuts[i].push_back(at(rng));
    std::sort(cuts[i].begin(), cuts[i].end());
    cuts[i].erase(std::unique(cuts[i].begin(), cuts[i].end()), cuts[i].end());
  }
  std::uniform_int_distribution<int> val(indicator ? 0 : -value_range, indicator ? 1 : value_range);
  std::vector<hao::Piece<double>> pieces;
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    Box b{Point(d), Point(d)};
    for (std::size_t i = 0; i < d; ++i) {
      b.lo[i] = cuts[i][idx[i]];
      b.hi[i] = idx[i] + 2 == cuts[i].size() ? hao::kInf : cuts[i][idx[i] + 1];
    }
    const double v = val(rng);
    if (!(indicator && v == 0.0)) pieces.push_back({b, v});
    std::size_t i = d;
    bool done = true;
    while (i-- > 0) {
      if (++idx[i] + 1 < cuts[i].size()) {
        done = false;
        break;
      }
      idx[i] = 0;
    }
    if (done) break;
  }
  return PwcFunction(upper, 0.0, std::move(pieces));
}

/// Every point of `probes` is owned by at most one piece, and pieces never overlap.
inline bool disjoint_everywhere(const PwcFunction& f, const std::vector<Point>& probes) {
  if (!hao::pieces_disjoint(f)) return false;
  for (const auto& x : probes) {
    int owners = 0;
    for (const auto& p : f.pieces()) owners += p.box.contains(x);
    if (owners > 1) return false;
  }
  return true;
}

}  // namespace testing
