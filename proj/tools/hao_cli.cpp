#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "hao/model_io.hpp"
#include "hao/oracle.hpp"
#include "hao/policy_io.hpp"
#include "hao/random_problem.hpp"
#include "hao/rover.hpp"
#include "hao/search.hpp"
#include "hao/sim.hpp"
#include "hao/sweep.hpp"
#include "hao/version.hpp"

using namespace hao;
using nlohmann::json;

namespace {

struct Failure : std::runtime_error {
  int code;
  Failure(int c, const std::string& what) : std::runtime_error(what), code(c) {}
};

std::string header_line(const std::string& input_hash) {
  return "# hao " + std::string(kVersion) + " input-fnv1a=" + input_hash;
}

json generator_json(const std::string& input_hash) {
  return json{{"tool", "hao"}, {"version", kVersion}, {"input_fnv1a", input_hash}};
}

void write_output(const std::string& path, const std::string& body) {
  if (path.empty() || path == "-") {
    std::cout << body;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure(2, "cannot write " + path);
  out << body;
}

std::vector<double> parse_point(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  for (std::string tok; std::getline(in, tok, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw Failure(2, "bad coordinate '" + tok + "' in --x0");
    }
  }
  return out;
}

std::size_t parse_horizon(const std::string& k) {
  if (k == "inf" || k == "infinity") return kExhaustive;
  try {
    const long v = std::stol(k);
    if (v >= 1) return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  throw Failure(2, "--k must be a positive integer or inf");
}

struct ProblemInput {
  HybridProblem problem;
  std::string hash;
};

ProblemInput load_input(const std::string& path, const std::string& x0) {
  const std::string text = read_file(path);
  ProblemInput in{problem_from_json(json::parse(text)), content_hash(text)};
  if (!x0.empty()) {
    in.problem.initial_point = parse_point(x0);
    if (in.problem.initial_point.size() != in.problem.space.dims())
      throw Failure(2, "--x0 has " + std::to_string(in.problem.initial_point.size()) + " coordinates, expected " +
                           std::to_string(in.problem.space.dims()));
    if (!in.problem.space.contains(in.problem.initial_point)) throw Failure(2, "--x0 lies outside the resource space");
  }
  return in;
}

std::string short_number(double v) {
  std::ostringstream s;
  s << v;
  std::string out = s.str();
  const auto e = out.find('e');
  if (e != std::string::npos) {
    std::size_t digits = e + 1;
    if (digits < out.size() && (out[digits] == '-' || out[digits] == '+')) ++digits;
    while (digits + 1 < out.size() && out[digits] == '0') out.erase(digits, 1);
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HAO* planner for hybrid-state MDPs with consumable resources"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // solve
  std::string problem_path, x0_text, out_path, k_text = "7", trace_path, stats_path;
  bool no_multiregion = false, deterministic = false, whole_space = false;
  std::size_t max_iter = 0;
  double max_seconds = 0.0;
  auto* solve_cmd = app.add_subcommand("solve", "Run HAO* and write the policy graph");
  solve_cmd->add_option("--problem", problem_path, "Problem JSON")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--x0", x0_text, "Initial resources, comma separated");
  solve_cmd->add_option("--k", k_text, "Expansion horizon (integer or inf)");
  solve_cmd->add_option("--out", out_path, "Policy JSON output");
  solve_cmd->add_flag("--no-multiregion", no_multiregion, "Back up closed regions one at a time");
  solve_cmd->add_option("--max-iter", max_iter, "Stop after this many iterations");
  solve_cmd->add_option("--max-seconds", max_seconds, "Stop after this much wall time");
  solve_cmd->add_option("--trace", trace_path, "Per-iteration CSV: value and error bound");
  solve_cmd->add_option("--stats", stats_path, "One-row stats CSV");
  solve_cmd->add_flag("--deterministic", deterministic, "Report zero wall time");
  solve_cmd->add_flag("--whole-space", whole_space, "Solve for every initial resource level (full value surface)");

  // oracle
  std::size_t cap = kDefaultOracleCap;
  std::string dump_path;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exact value by enumeration and backward induction");
  oracle_cmd->add_option("--problem", problem_path, "Problem JSON")->required()->check(CLI::ExistingFile);
  oracle_cmd->add_option("--x0", x0_text, "Initial resources, comma separated");
  oracle_cmd->add_option("--cap", cap, "Maximum number of hybrid states");
  oracle_cmd->add_option("--out", dump_path, "CSV table of every state");

  // check
  double tolerance = 1e-9;
  auto* check_cmd = app.add_subcommand("check", "Compare HAO* against the oracle");
  check_cmd->add_option("--problem", problem_path, "Problem JSON")->required()->check(CLI::ExistingFile);
  check_cmd->add_option("--x0", x0_text, "Initial resources, comma separated");
  check_cmd->add_option("--k", k_text, "Expansion horizon (integer or inf)");
  check_cmd->add_flag("--no-multiregion", no_multiregion, "Back up closed regions one at a time");
  check_cmd->add_option("--cap", cap, "Oracle state cap");
  check_cmd->add_option("--tolerance", tolerance, "Allowed |difference|");

  // simulate
  std::string policy_path, trajectory_path;
  std::size_t trials = 10000, jobs = 1;
  std::uint64_t seed = 1;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo evaluation of a policy file");
  sim_cmd->add_option("--policy", policy_path, "Policy JSON from solve")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--trials", trials, "Number of trials")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", seed, "Random seed");
  sim_cmd->add_option("--jobs", jobs, "Worker threads");
  sim_cmd->add_option("--trajectory", trajectory_path, "CSV of the first trial's steps");

  // sweep
  std::string spec_path;
  auto* sweep_cmd = app.add_subcommand("sweep", "Solve over a range of initial resources or horizons");
  sweep_cmd->add_option("--spec", spec_path, "Sweep JSON")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--out", out_path, "Stats CSV (overrides the spec)");
  sweep_cmd->add_option("--jobs", jobs, "Concurrent sweep points");
  sweep_cmd->add_flag("--deterministic", deterministic, "Report zero wall time");

  // export-vf
  std::string node_ref = "0";
  std::size_t grid = 200;
  bool pieces_only = false;
  auto* vf_cmd = app.add_subcommand("export-vf", "Export a node's value function");
  vf_cmd->add_option("--policy", policy_path, "Policy JSON from solve")->required()->check(CLI::ExistingFile);
  vf_cmd->add_option("--node", node_ref, "Node index or fluent hex");
  vf_cmd->add_option("--grid", grid, "Samples per dimension");
  vf_cmd->add_flag("--pieces", pieces_only, "Write the pieces instead of a grid");
  vf_cmd->add_option("--out", out_path, "CSV output");

  // gen-rover
  std::string params_path;
  bool toy = false, toy_stochastic = false, params_only = false;
  auto* rover_cmd = app.add_subcommand("gen-rover", "Generate a rover problem");
  auto* params_opt = rover_cmd->add_option("--params", params_path, "Rover parameter JSON")->check(CLI::ExistingFile);
  auto* toy_opt = rover_cmd->add_flag("--toy", toy, "The deterministic two-rock problem");
  auto* toy_st_opt = rover_cmd->add_flag("--toy-stochastic", toy_stochastic, "The stochastic two-rock problem");
  std::size_t branch_length = 0;
  double max_energy = 60.0;
  auto* over_opt = rover_cmd->add_option("--oversubscribed", branch_length,
                                         "Five rocks on three exclusive branches of this many locations");
  rover_cmd->add_option("--max-energy", max_energy, "Energy bound for --oversubscribed");
  rover_cmd->add_flag("--params-only", params_only, "Write the rover parameters instead of the problem");
  params_opt->excludes(toy_opt)->excludes(toy_st_opt)->excludes(over_opt);
  toy_opt->excludes(toy_st_opt)->excludes(over_opt);
  toy_st_opt->excludes(over_opt);
  rover_cmd->add_option("--out", out_path, "Problem JSON output");

  // gen-random
  RandomProblemParams random_params;
  auto* random_cmd = app.add_subcommand("gen-random", "Generate a small random problem");
  random_cmd->add_option("--seed", seed, "Generator seed");
  random_cmd->add_option("--fluents", random_params.plain_fluents, "Non-goal fluents");
  random_cmd->add_option("--goals", random_params.goals, "Goals");
  random_cmd->add_option("--dims", random_params.dims, "Resource dimensions");
  random_cmd->add_option("--out", out_path, "Problem JSON output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) {
      const auto in = load_input(problem_path, x0_text);
      SearchOptions options;
      options.horizon = parse_horizon(k_text);
      options.multi_region = !no_multiregion;
      if (max_iter > 0) options.max_iterations = max_iter;
      if (max_seconds > 0) options.max_seconds = max_seconds;
      options.track_error_bound = !trace_path.empty();
      options.whole_space = whole_space;
      std::ostringstream trace;
      trace << header_line(in.hash) << "\niteration,value,lower_bound,error_bound,nodes_created\n"
            << std::setprecision(17);
      Solution s = solve(in.problem, options, [&](const IterationReport& r) {
        if (!r.bound) return;
        trace << r.iteration << ',' << r.value_at_start << ',' << r.bound->g0 << ',' << r.bound->h0 << ','
              << r.graph->stats().nodes_created << '\n';
      });
      if (deterministic) s.stats.wall_ms = 0.0;
      if (!out_path.empty()) {
        json doc = solution_to_json(in.problem, s);
        doc["generator"] = generator_json(in.hash);
        write_output(out_path, doc.dump(1) + "\n");
      }
      if (!trace_path.empty()) write_output(trace_path, trace.str());
      if (!stats_path.empty()) {
        SweepRow row{options.horizon == kExhaustive ? kInf : static_cast<double>(options.horizon),
                     count_reachable_discrete(in.problem), s.stats, s.value_at_start, s.error_bound};
        std::ostringstream csv;
        csv << header_line(in.hash) << '\n';
        write_sweep_csv(csv, {row});
        write_output(stats_path, csv.str());
      }
      std::cout << header_line(in.hash) << '\n'
                << "value_at_start " << fmt(s.value_at_start) << '\n'
                << "lower_bound " << fmt(s.lower_bound) << '\n'
                << "error_bound " << fmt(s.error_bound) << '\n'
                << "converged " << (s.converged ? "yes" : "no") << '\n'
                << "iterations " << s.stats.iterations << '\n'
                << "nodes_created " << s.stats.nodes_created << '\n'
                << "nodes_expanded " << s.stats.nodes_expanded << '\n'
                << "policy_nodes " << s.stats.policy_nodes << '\n'
                << "backups " << s.stats.backups << '\n';
      return 0;
    }

    if (*oracle_cmd) {
      const auto in = load_input(problem_path, x0_text);
      if (auto v = validate_problem(in.problem); !v.empty()) throw InvalidProblem(std::move(v));
      const OracleTable table = solve_exact(in.problem, cap);
      if (!dump_path.empty()) {
        std::ostringstream csv;
        csv << header_line(in.hash) << '\n';
        write_oracle_csv(csv, in.problem, table);
        write_output(dump_path, csv.str());
      }
      std::cout << header_line(in.hash) << '\n'
                << "value " << fmt(table.root().value) << '\n'
                << "states " << table.size() << '\n';
      return 0;
    }

    if (*check_cmd) {
      const auto in = load_input(problem_path, x0_text);
      SearchOptions options;
      options.horizon = parse_horizon(k_text);
      options.multi_region = !no_multiregion;
      const Solution s = solve(in.problem, options);
      const OracleTable table = solve_exact(in.problem, cap);
      const double diff = std::fabs(s.value_at_start - table.root().value);
      std::cout << header_line(in.hash) << '\n';
      std::ostringstream detail;
      detail << std::setprecision(17) << " (hao " << s.value_at_start << ", oracle " << table.root().value
             << ", states " << table.size() << ")";
      if (diff <= tolerance) {
        std::cout << "PASS, |Δ| < " << short_number(tolerance) << detail.str() << '\n';
        return 0;
      }
      std::cout << "FAIL, |Δ| = " << std::setprecision(3) << diff << detail.str() << '\n';
      return 1;
    }

    if (*sim_cmd) {
      const std::string text = read_file(policy_path);
      const LoadedPolicy lp = solution_from_json(json::parse(text));
      const auto hash = content_hash(text);
      const PolicyEvaluation e = evaluate_policy(lp.problem, lp.solution, trials, seed, jobs);
      if (!trajectory_path.empty()) {
        std::ostringstream csv;
        csv << header_line(hash) << '\n';
        write_trajectory_csv(csv, lp.problem, simulate_trajectory(lp.problem, lp.solution, seed, 0));
        write_output(trajectory_path, csv.str());
      }
      std::cout << header_line(hash) << '\n'
                << "trials " << e.trials << '\n'
                << "mean " << fmt(e.mean) << '\n'
                << "stderr " << fmt(e.std_error) << '\n'
                << "value_at_start " << fmt(lp.solution.value_at_start) << '\n'
                << "fringe_stops " << e.fringe_stops << '\n';
      for (std::size_t g = 0; g < lp.problem.goals.size(); ++g)
        std::cout << "goal " << lp.problem.goals[g].name << ' ' << fmt(e.goal_rates[g]) << '\n';
      return 0;
    }

    if (*sweep_cmd) {
      const std::string text = read_file(spec_path);
      const auto base = std::filesystem::path(spec_path).parent_path();
      SweepSpec spec = sweep_spec_from_json(json::parse(text), base);
      const auto rows = run_sweep(spec, jobs, deterministic);
      std::ostringstream csv;
      csv << header_line(content_hash(text)) << '\n';
      write_sweep_csv(csv, rows);
      std::string target = out_path;
      if (target.empty() && spec.output) target = spec.output->string();
      write_output(target, csv.str());
      return 0;
    }

    if (*vf_cmd) {
      const std::string text = read_file(policy_path);
      const LoadedPolicy lp = solution_from_json(json::parse(text));
      const auto& nodes = lp.solution.nodes;
      const PolicyNode* node = nullptr;
      const std::size_t width = lp.problem.fluent_count();
      for (const auto& n : nodes)
        if (n.state.hex(width) == node_ref) node = &n;
      if (node == nullptr) {
        std::size_t idx = 0;
        try {
          idx = std::stoul(node_ref);
        } catch (const std::exception&) {
          throw Failure(2, "unknown node '" + node_ref + "'");
        }
        if (idx >= nodes.size()) throw Failure(2, "node index out of range (" + std::to_string(nodes.size()) + " nodes)");
        node = &nodes[idx];
      }
      std::ostringstream csv;
      csv << header_line(content_hash(text)) << '\n';
      if (pieces_only)
        write_pieces_csv(csv, node->value);
      else
        write_grid_csv(csv, node->value, grid);
      write_output(out_path, csv.str());
      return 0;
    }

    if (*rover_cmd) {
      RoverParams params;
      std::string hash;
      if (!params_path.empty()) {
        const std::string text = read_file(params_path);
        params = rover_params_from_json(json::parse(text));
        hash = content_hash(text);
      } else if (toy || toy_stochastic) {
        params = toy_rover_params(toy_stochastic);
        hash = content_hash(toy_stochastic ? "toy-stochastic" : "toy");
      } else if (branch_length > 0) {
        params = oversubscribed_rover_params(branch_length, max_energy);
        hash = content_hash("oversubscribed:" + std::to_string(branch_length) + ":" + std::to_string(max_energy));
      } else {
        throw Failure(2, "gen-rover needs --params, --toy, --toy-stochastic or --oversubscribed");
      }
      json doc = params_only ? rover_params_to_json(params) : problem_to_json(make_rover_problem(params));
      doc["generator"] = generator_json(hash);
      write_output(out_path, doc.dump(1) + "\n");
      return 0;
    }

    if (*random_cmd) {
      json doc = problem_to_json(make_random_problem(random_params, seed));
      doc["generator"] = generator_json(content_hash("random:" + std::to_string(seed)));
      write_output(out_path, doc.dump(1) + "\n");
      return 0;
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.what() << '\n';
    return f.code;
  } catch (const OracleOverflow& e) {
    std::cerr << "error: " << e.what() << " (instance too large for the oracle)\n";
    return 3;
  } catch (const InvalidProblem& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
