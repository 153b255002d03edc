#include <doctest.h>

#include <sstream>

#include "hao/policy_io.hpp"
#include "hao/rover.hpp"
#include "hao/search.hpp"
#include "hao/sim.hpp"
#include "hao/sweep.hpp"
#include "problems.hpp"
#include "support.hpp"

using namespace hao;
using nlohmann::json;

TEST_SUITE("io") {
  TEST_CASE("policy documents round trip") {
    for (const auto& p : {make_rover_problem(toy_rover_params(true)), testing::round_trip_problem()}) {
      const auto s = solve(p);
      const json doc = solution_to_json(p, s);
      const auto loaded = solution_from_json(json::parse(doc.dump()));
      CHECK(solution_to_json(loaded.problem, loaded.solution) == doc);
      REQUIRE(loaded.solution.nodes.size() == s.nodes.size());
      CHECK(loaded.solution.value_at_start == s.value_at_start);
      CHECK(loaded.solution.converged == s.converged);
      const auto probes = testing::probe_grid(p.space.max, 15);
      for (std::size_t i = 0; i < s.nodes.size(); ++i) {
        CHECK(loaded.solution.nodes[i].state == s.nodes[i].state);
        for (const auto& x : probes) {
          CHECK(evaluate(loaded.solution.nodes[i].value, x) == evaluate(s.nodes[i].value, x));
          CHECK(evaluate(loaded.solution.nodes[i].policy, x) == evaluate(s.nodes[i].policy, x));
          CHECK(evaluate(loaded.solution.nodes[i].reachable, x) == evaluate(s.nodes[i].reachable, x));
        }
      }
      for (std::uint64_t i = 0; i < 20; ++i) {
        std::ostringstream a, b;
        write_trajectory_csv(a, p, simulate_trajectory(p, s, 1, i));
        write_trajectory_csv(b, loaded.problem, simulate_trajectory(loaded.problem, loaded.solution, 1, i));
        CHECK(a.str() == b.str());
      }
    }
  }

  TEST_CASE("top-face boxes are written as null") {
    const PwcFunction f({4.0}, 0.0, {{Box{{2.0}, {kInf}}, 1.0}});
    const json j = exact_pwc_to_json(f);
    CHECK(j.dump().find("null") != std::string::npos);
    const auto g = exact_pwc_from_json(j, std::vector<double>{4.0});
    CHECK(evaluate(g, Point{4.0}) == 1.0);
    CHECK(evaluate(g, Point{1.0}) == 0.0);
  }

  TEST_CASE("sweep spec on the horizon axis") {
    const json j = {{"problem", problem_to_json(testing::round_trip_problem())},
                    {"axis", "k"},
                    {"values", {1, 2, "inf"}},
                    {"fixed", {{"multi_region", false}}}};
    const auto spec = sweep_spec_from_json(j, ".");
    CHECK(spec.axis == SweepSpec::Axis::kHorizon);
    CHECK(spec.values == std::vector<double>{1, 2, kInf});
    CHECK_FALSE(spec.options.multi_region);

    const auto rows = run_sweep(spec, 2, true);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
      CHECK(r.value == doctest::Approx(rows[0].value).epsilon(1e-12));
      CHECK(r.stats.wall_ms == 0.0);
      CHECK(r.error_bound == 0.0);
    }
    std::ostringstream a, b;
    write_sweep_csv(a, rows);
    write_sweep_csv(b, run_sweep(spec, 1, true));
    CHECK(a.str() == b.str());
    std::istringstream in(a.str());
    std::string header, last;
    std::getline(in, header);
    CHECK(header == kStatsColumns);
    for (std::string line; std::getline(in, line);) last = line;
    CHECK(last.starts_with("inf,"));
  }

  TEST_CASE("sweep spec on an initial resource axis") {
    const json j = {{"problem", problem_to_json(testing::round_trip_problem())},
                    {"axis", "initial_energy"},
                    {"values", {3, 6, 9}}};
    const auto spec = sweep_spec_from_json(j, ".");
    CHECK(spec.axis == SweepSpec::Axis::kInitialResource);
    CHECK(spec.dim == 1);
    const auto rows = run_sweep(spec, 3, true);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].axis_value == 3.0);
    CHECK(rows[0].value <= rows[1].value);
    CHECK(rows[1].value <= rows[2].value);
  }

  TEST_CASE("malformed sweep specs are parse errors") {
    const json base = problem_to_json(testing::round_trip_problem());
    CHECK_THROWS_AS(sweep_spec_from_json({{"problem", base}, {"axis", "initial_fuel"}, {"values", {1}}}, "."),
                    ParseError);
    CHECK_THROWS_AS(sweep_spec_from_json({{"problem", base}, {"axis", "k"}, {"values", {0}}}, "."), ParseError);
    CHECK_THROWS_AS(sweep_spec_from_json({{"problem", base}, {"axis", "k"}, {"values", json::array()}}, "."),
                    ParseError);
    CHECK_THROWS_AS(sweep_spec_from_json({{"problem", base}, {"axis", "initial_time"}, {"values", {99}}}, "."),
                    ParseError);
  }
}
