// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hao/oracle.hpp"
#include "hao/random_problem.hpp"
#include "hao/rover.hpp"
#include "hao/search.hpp"
#include "hao/sim.hpp"
#include "problems.hpp"

using namespace hao;

namespace {

constexpr double kTol = 1e-9;

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct SuiteInstance {
  std::uint64_t seed;
  HybridProblem problem;
  double oracle;
  std::size_t states;
};

/// Small random instances whose oracle stays under 1e5 hybrid states.
std::vector<SuiteInstance> build_suite(std::size_t count, std::size_t& skipped) {
  std::vector<SuiteInstance> out;
  for (std::uint64_t seed = 1; out.size() < count; ++seed) {
    RandomProblemParams rp;
    rp.plain_fluents = 2 + seed % 3;
    rp.goals = 1 + seed % 2;
    rp.dims = 1 + (seed / 3) % 2;
    rp.max_outcomes = 3;
    HybridProblem p = make_random_problem(rp, seed);
    try {
      auto table = solve_exact(p, 100000);
      out.push_back({seed, std::move(p), table.root().value, table.size()});
    } catch (const OracleOverflow&) {
      ++skipped;
    }
  }
  return out;
}

struct SuiteRuns {
  // criterion 1: k = 7, multi-region
  double worst_oracle_gap = 0.0;
  std::size_t unconverged = 0;
  // criterion 2
  std::size_t iterations = 0;
  std::size_t upper_violations = 0;
  double worst_upper = 0.0;
  // criterion 3
  std::size_t bound_violations = 0;
  std::size_t final_h_nonzero = 0;
  std::size_t sum_mismatch = 0;
  // criterion 4
  double worst_k_spread = 0.0;
};

SuiteRuns run_suite(const std::vector<SuiteInstance>& suite) {
  SuiteRuns r;
  const std::size_t horizons[] = {1, 2, 5, 7, kExhaustive};
  for (const auto& inst : suite) {
    double lo = kInf, hi = -kInf;
    for (std::size_t k : horizons)
      for (bool multi : {true, false}) {
        SearchOptions opt;
        opt.horizon = k;
        opt.multi_region = multi;
        opt.track_error_bound = true;
        std::optional<ErrorBound> last;
        const auto s = solve(inst.problem, opt, [&](const IterationReport& rep) {
          ++r.iterations;
          const double v = rep.value_at_start;
          if (v < inst.oracle - kTol) {
            ++r.upper_violations;
            r.worst_upper = std::max(r.worst_upper, inst.oracle - v);
          }
          const auto& b = *rep.bound;
          if (b.g0 > inst.oracle + kTol || inst.oracle > b.g0 + b.h0 + kTol) ++r.bound_violations;
          if (std::fabs(b.g0 + b.h0 - v) > kTol) ++r.sum_mismatch;
          last = b;
        });
        if (!s.converged) ++r.unconverged;
        if (!last || last->h0 != 0.0 || s.error_bound != 0.0) ++r.final_h_nonzero;
        if (k == 7 && multi) r.worst_oracle_gap = std::max(r.worst_oracle_gap, std::fabs(s.value_at_start - inst.oracle));
        lo = std::min(lo, s.value_at_start);
        hi = std::max(hi, s.value_at_start);
      }
    r.worst_k_spread = std::max(r.worst_k_spread, hi - lo);
  }
  return r;
}

Verdict criterion5() {
  const auto p = testing::round_trip_problem();
  const double exact = solve_exact(p).root().value;
  SearchOptions opt;
  opt.horizon = 1;
  std::size_t cycles_seen = 0, largest = 0;
  const auto s = solve(p, opt, [&](const IterationReport& rep) {
    cycles_seen = rep.graph->stats().multi_node_components;
    largest = rep.graph->stats().largest_component;
  });
  const double gap = std::fabs(s.value_at_start - exact);
  Verdict o;
  o.pass = cycles_seen > 0 && largest >= 2 && s.converged && gap <= kTol;
  o.detail = fmt("multi-node components %zu (largest %zu), %zu iterations, value %.12g vs oracle %.12g", cycles_seen,
                 largest, s.stats.iterations, s.value_at_start, exact);
  return o;
}

/// Componentwise monotonicity of a piecewise-constant function, checked on
/// every cell of the refinement grid of its breakpoints.
std::size_t monotonicity_violations(const PwcFunction& f) {
  const std::size_t d = f.dims();
  std::vector<std::vector<double>> axis(d);
  for (std::size_t i = 0; i < d; ++i) {
    std::set<double> cuts{0.0, f.upper()[i]};
    for (const auto& piece : f.pieces()) {
      cuts.insert(piece.box.lo[i]);
      if (std::isfinite(piece.box.hi[i]) && piece.box.hi[i] < f.upper()[i]) cuts.insert(piece.box.hi[i]);
    }
    axis[i].assign(cuts.begin(), cuts.end());
  }
  std::size_t violations = 0;
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    Point x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = axis[i][idx[i]];
    const double v = evaluate(f, x);
    for (std::size_t i = 0; i < d; ++i) {
      if (idx[i] + 1 == axis[i].size()) continue;
      Point y = x;
      y[i] = axis[i][idx[i] + 1];
      if (evaluate(f, y) < v - kTol) ++violations;
    }
    std::size_t i = d;
    while (true) {
      if (i == 0) return violations;
      --i;
      if (++idx[i] < axis[i].size()) break;
      idx[i] = 0;
    }
  }
}

Verdict criterion6() {
  Verdict o;
  const auto det = solve(make_rover_problem(toy_rover_params(false)));
  const bool det_ok = det.value_at_start == 30.0;

  const auto sp = make_rover_problem(toy_rover_params(true));
  SearchOptions opt;
  opt.horizon = 2;
  const auto st = solve(sp, opt);
  const auto mc = evaluate_policy(sp, st, 100000, 20240601);
  const double z = std::fabs(mc.mean - st.value_at_start) / mc.std_error;
  const bool mc_ok = z <= 3.0;

  SearchOptions whole;
  whole.whole_space = true;
  const auto surface = solve(sp, whole);
  const auto& v = surface.nodes.front().value;
  const std::size_t bad = monotonicity_violations(v);
  const bool surface_ok = bad == 0 && std::fabs(evaluate(v, sp.initial_point) - st.value_at_start) <= kTol;

  o.pass = det_ok && mc_ok && surface_ok;
  o.detail = fmt("deterministic %.17g; stochastic value %.9g, MC mean %.9g +/- %.3g (%.2f sigma); surface %zu pieces, "
                 "%zu monotonicity violations",
                 det.value_at_start, st.value_at_start, mc.mean, mc.std_error, z, v.size(), bad);
  return o;
}

Verdict criterion7() {
  Verdict o;
  const RoverParams base = oversubscribed_rover_params(10, 60.0);
  std::vector<std::size_t> reach, created;
  std::string series;
  for (int i = 0; i <= 10; ++i) {
    RoverParams rp = base;
    rp.initial = {rp.max_resources[0], 6.0 * i};
    const auto p = make_rover_problem(rp);
    reach.push_back(count_reachable_discrete(p));
    created.push_back(solve(p).stats.nodes_created);
    series += fmt(" %d:%zu/%zu", 6 * i, created.back(), reach.back());
  }
  std::size_t strict = 0;
  bool bounded = true, monotone = true;
  for (std::size_t i = 0; i < reach.size(); ++i) {
    bounded = bounded && created[i] <= reach[i];
    strict += created[i] < reach[i];
    if (i) monotone = monotone && created[i] >= created[i - 1] && reach[i] >= reach[i - 1];
  }
  o.pass = bounded && monotone && 2 * strict >= reach.size();
  o.detail = fmt("created/reachable by energy:%s; strict at %zu of %zu", series.c_str(), strict, reach.size());
  return o;
}

Verdict criterion8() {
  Verdict o;
  RoverParams rp = oversubscribed_rover_params(5, 40.0);
  const auto p = make_rover_problem(rp);
  const std::size_t reach = count_reachable_discrete(p);
  const std::size_t horizons[] = {1, 2, 3, 4, 5, 7, 10, 15, 20, kExhaustive};
  std::vector<std::size_t> created;
  std::string series;
  for (std::size_t k : horizons) {
    SearchOptions opt;
    opt.horizon = k;
    created.push_back(solve(p, opt).stats.nodes_created);
    series += k == kExhaustive ? fmt(" inf:%zu", created.back()) : fmt(" %zu:%zu", k, created.back());
  }
  bool monotone = true;
  for (std::size_t i = 1; i < created.size(); ++i) monotone = monotone && created[i] >= created[i - 1];
  const bool levels_off = created[created.size() - 2] == reach && created.back() == reach && created.front() < reach;
  o.pass = monotone && levels_off;
  o.detail = fmt("created by k:%s; reachable %zu", series.c_str(), reach);
  return o;
}

/// Exact check that value == h on the open region.
bool value_is_heuristic_on_open(const SearchNode& node) {
  const auto diff = zip_with(
      [h = node.heuristic](double open, double v) { return open != 0.0 ? std::fabs(v - h) : 0.0; }, node.open,
      node.value);
  if (diff.default_value() != 0.0) return false;
  for (const auto& piece : diff.pieces())
    if (piece.value != 0.0) return false;
  return true;
}

HybridProblem invariant_instance(std::uint64_t seed) {
  RandomProblemParams rp;
  rp.plain_fluents = 1 + seed % 4;
  rp.goals = 1 + seed % 2;
  rp.dims = seed % 10 == 0 ? 2 : 1;
  return make_random_problem(rp, seed);
}

Verdict criterion9() {
  Verdict o;
  const std::size_t per_property = 2000;
  std::size_t cases = 0, open_closed = 0, open_value = 0, normalization = 0, decrease = 0, reproducible = 0;

  // Open ∧ Closed = ∅ and V = H on Open, at every iteration of randomized searches.
  for (std::uint64_t seed = 1; seed <= per_property; ++seed) {
    const auto p = invariant_instance(seed);
    SearchOptions opt;
    opt.horizon = 1 + seed % 3;
    opt.multi_region = seed % 2 == 0;
    bool disjoint = true, heuristic = true;
    solve(p, opt, [&](const IterationReport& rep) {
      for (const auto& node : rep.graph->nodes()) {
        disjoint = disjoint && is_empty(region_and(node.open, node.closed));
        heuristic = heuristic && value_is_heuristic_on_open(node);
      }
    });
    open_closed += !disjoint;
    open_value += !heuristic;
    cases += 2;
  }

  // Probability normalization of generated problems.
  for (std::uint64_t seed = 1; seed <= per_property; ++seed) {
    HybridProblem p;
    if (seed % 4 == 0) {
      RoverParams rp = toy_rover_params(true);
      rp.buckets = 1 + seed % 5;
      rp.rocks[0].loss = {{0, double(seed % 7) / 7.0}};
      rp.rocks[1].success_probability = 0.5 + double(seed % 5) / 10.0;
      p = make_rover_problem(rp);
    } else {
      RandomProblemParams rp;
      rp.dims = 1 + seed % 2;
      rp.plain_fluents = seed % 5;
      p = make_random_problem(rp, seed + 100000);
    }
    bool ok = true;
    for (const auto& a : p.actions)
      for (const auto& b : a.branches) {
        double total = 0.0;
        for (const auto& out : b.outcomes) {
          ok = ok && out.probability >= 0.0;
          total += out.probability;
        }
        ok = ok && std::fabs(total - 1.0) <= kTol;
      }
    normalization += !ok;
    ++cases;
  }

  // Strict resource decrease per simulated step, and seed-reproducible trajectories.
  std::uint64_t seed = 1;
  std::size_t trajectories = 0;
  while (trajectories < per_property) {
    const auto p = invariant_instance(seed + 50000);
    const auto s = solve(p);
    for (std::uint64_t stream = 0; stream < 20 && trajectories < per_property; ++stream, ++trajectories) {
      const auto t = simulate_trajectory(p, s, seed, stream);
      bool ok = true;
      for (const auto& step : t.steps) {
        bool some = false;
        for (std::size_t i = 0; i < step.x.size(); ++i) {
          ok = ok && step.next_x[i] <= step.x[i];
          some = some || step.next_x[i] <= step.x[i] - p.c_min;
        }
        ok = ok && some;
      }
      decrease += !ok;
      std::ostringstream a, b;
      write_trajectory_csv(a, p, t);
      write_trajectory_csv(b, p, simulate_trajectory(p, s, seed, stream));
      reproducible += a.str() != b.str();
      cases += 2;
    }
    ++seed;
  }

  const std::size_t violations = open_closed + open_value + normalization + decrease + reproducible;
  o.pass = violations == 0 && cases >= 10000;
  o.detail = fmt("%zu cases; violations: open/closed %zu, V=H on open %zu, normalization %zu, resource decrease %zu, "
                 "reproducibility %zu",
                 cases, open_closed, open_value, normalization, decrease, reproducible);
  return o;
}

void report(int n, const Verdict& o, double seconds) {
  std::printf("criterion %d: %s (%.1f s) %s\n", n, o.pass ? "PASS" : "FAIL", seconds, o.detail.c_str());
  std::fflush(stdout);
}

template <class F>
Verdict timed(int n, F&& f, bool& all) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict o = f();
  report(n, o, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  all = all && o.pass;
  return o;
}

}  // namespace

int main() {
  bool all = true;
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t skipped = 0;
  const auto suite = build_suite(24, skipped);
  const auto runs = run_suite(suite);
  const double suite_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::size_t max_states = 0;
  for (const auto& inst : suite) max_states = std::max(max_states, inst.states);

  Verdict c1{runs.worst_oracle_gap <= kTol && runs.unconverged == 0,
             fmt("%zu instances (%zu skipped over the state cap, largest %zu states), max |HAO* - oracle| = %.3g",
                 suite.size(), skipped, max_states, runs.worst_oracle_gap)};
  Verdict c2{runs.upper_violations == 0,
             fmt("%zu iterations over %zu runs, %zu below the oracle (worst %.3g)", runs.iterations, suite.size() * 10,
                 runs.upper_violations, runs.worst_upper)};
  Verdict c3{runs.bound_violations == 0 && runs.final_h_nonzero == 0 && runs.sum_mismatch == 0,
             fmt("%zu bracket violations, %zu runs with h0 != 0 at the end, %zu iterations with g0 + h0 != V",
                 runs.bound_violations, runs.final_h_nonzero, runs.sum_mismatch)};
  Verdict c4{runs.worst_k_spread <= kTol && runs.unconverged == 0,
             fmt("k in {1,2,5,7,inf} x multi-region on/off: max spread %.3g", runs.worst_k_spread)};
  for (auto [n, o] : {std::pair{1, c1}, std::pair{2, c2}, std::pair{3, c3}, std::pair{4, c4}}) {
    report(n, o, suite_seconds);
    all = all && o.pass;
  }
  timed(5, criterion5, all);
  timed(6, criterion6, all);
  timed(7, criterion7, all);
  timed(8, criterion8, all);
  timed(9, criterion9, all);
  return all ? 0 : 1;
}
