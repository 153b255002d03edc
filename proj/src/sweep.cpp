#include "hao/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <thread>

#include "hao/model_io.hpp"
#include "hao/rover.hpp"

namespace hao {

using nlohmann::json;

namespace {

double axis_value_from(const json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity" || s == "∞") return kInf;
    throw ParseError("sweep value '" + s + "' is not a number");
  }
  return v.get<double>();
}

void print_number(std::ostream& out, double v) {
  if (std::isinf(v))
    out << "inf";
  else
    out << v;
}

}  // namespace

SweepSpec sweep_spec_from_json(const json& j, const std::filesystem::path& base_dir) {
  try {
    SweepSpec spec;
    if (j.contains("rover")) {
      spec.problem = make_rover_problem(rover_params_from_json(j.at("rover")));
    } else {
      const auto& pj = j.at("problem");
      spec.problem = pj.is_string() ? load_problem(base_dir / pj.get<std::string>()) : problem_from_json(pj);
    }
    const json fixed = j.value("fixed", json::object());
    if (fixed.contains("x0")) spec.problem.initial_point = fixed.at("x0").get<std::vector<double>>();
    if (fixed.contains("k")) {
      const double k = axis_value_from(fixed.at("k"));
      spec.options.horizon = std::isinf(k) ? kExhaustive : static_cast<std::size_t>(k);
    }
    spec.options.multi_region = fixed.value("multi_region", true);
    if (fixed.contains("max_iterations")) spec.options.max_iterations = fixed.at("max_iterations").get<std::size_t>();
    if (fixed.contains("max_seconds")) spec.options.max_seconds = fixed.at("max_seconds").get<double>();

    spec.axis_name = j.at("axis").get<std::string>();
    const auto& names = spec.problem.space.names;
    if (spec.axis_name == "k") {
      spec.axis = SweepSpec::Axis::kHorizon;
    } else if (spec.axis_name.starts_with("initial_")) {
      spec.axis = SweepSpec::Axis::kInitialResource;
      const std::string r = spec.axis_name.substr(8);
      auto it = std::find(names.begin(), names.end(), r);
      if (it != names.end())
        spec.dim = static_cast<std::size_t>(it - names.begin());
      else if (r == "time")
        spec.dim = 0;
      else if (r == "energy")
        spec.dim = 1;
      else
        throw ParseError("unknown sweep axis '" + spec.axis_name + "'");
      if (spec.dim >= spec.problem.space.dims()) throw ParseError("sweep axis beyond the resource dimensions");
    } else {
      throw ParseError("unknown sweep axis '" + spec.axis_name + "'");
    }

    for (const auto& v : j.at("values")) spec.values.push_back(axis_value_from(v));
    if (spec.values.empty()) throw ParseError("sweep needs at least one value");
    for (double v : spec.values) {
      if (spec.axis == SweepSpec::Axis::kHorizon) {
        if (!std::isinf(v) && (v < 1 || v != std::floor(v))) throw ParseError("k values must be positive integers or inf");
      } else if (!(v >= 0.0 && v <= spec.problem.space.max[spec.dim])) {
        throw ParseError("sweep value outside the resource bounds");
      }
    }
    if (j.contains("output")) spec.output = base_dir / j.at("output").get<std::string>();
    return spec;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed sweep spec: ") + e.what());
  }
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, std::size_t jobs, bool deterministic) {
  std::vector<SweepRow> rows(spec.values.size());
  std::vector<std::exception_ptr> errors(spec.values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < spec.values.size();) {
      try {
        HybridProblem problem = spec.problem;
        SearchOptions options = spec.options;
        const double v = spec.values[i];
        if (spec.axis == SweepSpec::Axis::kHorizon)
          options.horizon = std::isinf(v) ? kExhaustive : static_cast<std::size_t>(v);
        else
          problem.initial_point.at(spec.dim) = v;
        const Solution s = solve(problem, options);
        SweepRow& row = rows[i];
        row.axis_value = v;
        row.reachable_states = count_reachable_discrete(problem);
        row.stats = s.stats;
        if (deterministic) row.stats.wall_ms = 0.0;
        row.value = s.value_at_start;
        row.error_bound = s.error_bound;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, spec.values.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kStatsColumns << '\n';
  out << std::setprecision(17);
  for (const auto& r : rows) {
    print_number(out, r.axis_value);
    out << ',' << r.reachable_states << ',' << r.stats.nodes_created << ',' << r.stats.nodes_expanded << ','
        << r.stats.regions_expanded << ',' << r.stats.policy_nodes << ',' << r.stats.policy_branches << ','
        << r.stats.goals_pursued << ',' << r.stats.backups << ',' << r.stats.wall_ms << ',' << r.value << ','
        << r.error_bound << '\n';
  }
}

}  // namespace hao
