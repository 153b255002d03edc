#include "hao/policy_io.hpp"

#include "hao/model_io.hpp"

namespace hao {

using nlohmann::json;

namespace {

json exact_box(const Box& b) {
  json hi = json::array();
  for (double v : b.hi) hi.push_back(v == kInf ? json(nullptr) : json(v));
  return json{{"lo", b.lo}, {"hi", hi}};
}

Box exact_box_from(const json& j, std::span<const double> upper) {
  Box b{j.at("lo").get<std::vector<double>>(), {}};
  for (const auto& v : j.at("hi")) b.hi.push_back(v.is_null() ? kInf : v.get<double>());
  if (b.lo.size() != upper.size() || b.hi.size() != upper.size()) throw ParseError("box dimension mismatch");
  return b;
}

template <class V>
json exact_to_json(const Piecewise<V>& f) {
  json pieces = json::array();
  for (const auto& p : f.pieces()) {
    json b = exact_box(p.box);
    b["value"] = p.value;
    pieces.push_back(std::move(b));
  }
  return json{{"default", f.default_value()}, {"pieces", pieces}};
}

template <class V>
Piecewise<V> exact_from_json(const json& j, std::span<const double> upper) {
  std::vector<Piece<V>> pieces;
  for (const auto& pj : j.at("pieces")) pieces.push_back({exact_box_from(pj, upper), pj.at("value").get<V>()});
  Piecewise<V> f(std::vector<double>(upper.begin(), upper.end()), j.at("default").get<V>(), std::move(pieces));
  if (!pieces_disjoint(f)) throw ParseError("piecewise function has overlapping pieces");
  return f;
}

std::vector<std::size_t> true_bits(const DiscreteState& n, std::size_t width) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < width; ++i)
    if (n.test(i)) out.push_back(i);
  return out;
}

DiscreteState from_bits(const json& j, std::size_t width) {
  DiscreteState n;
  for (const auto& v : j) {
    const auto i = v.get<std::size_t>();
    if (i >= width) throw ParseError("fluent index out of range in policy file");
    n.set(i);
  }
  return n;
}

}  // namespace

json exact_pwc_to_json(const PwcFunction& f) { return exact_to_json(f); }
PwcFunction exact_pwc_from_json(const json& j, std::span<const double> upper) {
  return exact_from_json<double>(j, upper);
}
json exact_tags_to_json(const TagFunction& f) { return exact_to_json(f); }
TagFunction exact_tags_from_json(const json& j, std::span<const double> upper) {
  return exact_from_json<int>(j, upper);
}

json stats_to_json(const SearchStats& s) {
  return json{{"iterations", s.iterations},
              {"nodes_created", s.nodes_created},
              {"nodes_expanded", s.nodes_expanded},
              {"regions_expanded", s.regions_expanded},
              {"backups", s.backups},
              {"multi_node_components", s.multi_node_components},
              {"largest_component", s.largest_component},
              {"component_sweeps", s.component_sweeps},
              {"value_pieces", s.value_pieces},
              {"policy_nodes", s.policy_nodes},
              {"policy_branches", s.policy_branches},
              {"goals_pursued", s.goals_pursued},
              {"wall_ms", s.wall_ms}};
}

SearchStats stats_from_json(const json& j) {
  SearchStats s;
  s.iterations = j.value("iterations", std::size_t{0});
  s.nodes_created = j.value("nodes_created", std::size_t{0});
  s.nodes_expanded = j.value("nodes_expanded", std::size_t{0});
  s.regions_expanded = j.value("regions_expanded", std::size_t{0});
  s.backups = j.value("backups", std::size_t{0});
  s.multi_node_components = j.value("multi_node_components", std::size_t{0});
  s.largest_component = j.value("largest_component", std::size_t{0});
  s.component_sweeps = j.value("component_sweeps", std::size_t{0});
  s.value_pieces = j.value("value_pieces", std::size_t{0});
  s.policy_nodes = j.value("policy_nodes", std::size_t{0});
  s.policy_branches = j.value("policy_branches", std::size_t{0});
  s.goals_pursued = j.value("goals_pursued", std::size_t{0});
  s.wall_ms = j.value("wall_ms", 0.0);
  return s;
}

json solution_to_json(const HybridProblem& problem, const Solution& solution) {
  const std::size_t width = problem.fluent_count();
  json nodes = json::array();
  for (const auto& n : solution.nodes) {
    nodes.push_back(json{{"fluents", true_bits(n.state, width)},
                         {"hex", n.state.hex(width)},
                         {"heuristic", n.heuristic},
                         {"value", exact_pwc_to_json(n.value)},
                         {"policy", exact_tags_to_json(n.policy)},
                         {"closed", exact_pwc_to_json(n.closed)},
                         {"reachable", exact_pwc_to_json(n.reachable)}});
  }
  std::vector<std::string> actions;
  for (const auto& a : problem.actions) actions.push_back(a.name);
  return json{{"problem", problem_to_json(problem)},
              {"start", true_bits(solution.start, width)},
              {"x0", solution.x0},
              {"value_at_start", solution.value_at_start},
              {"lower_bound", solution.lower_bound},
              {"error_bound", solution.error_bound},
              {"converged", solution.converged},
              {"stats", stats_to_json(solution.stats)},
              {"actions", actions},
              {"nodes", nodes}};
}

LoadedPolicy solution_from_json(const json& j) {
  try {
    LoadedPolicy out{problem_from_json(j.at("problem")), {}};
    const auto& upper = out.problem.space.max;
    const std::size_t width = out.problem.fluent_count();
    Solution& s = out.solution;
    s.start = from_bits(j.at("start"), width);
    s.x0 = j.at("x0").get<std::vector<double>>();
    if (s.x0.size() != upper.size()) throw ParseError("x0 dimension mismatch");
    out.problem.initial_state = s.start;
    out.problem.initial_point = s.x0;
    s.value_at_start = j.at("value_at_start").get<double>();
    s.lower_bound = j.value("lower_bound", 0.0);
    s.error_bound = j.value("error_bound", 0.0);
    s.converged = j.value("converged", false);
    if (j.contains("stats")) s.stats = stats_from_json(j.at("stats"));
    for (const auto& nj : j.at("nodes")) {
      PolicyNode n;
      n.state = from_bits(nj.at("fluents"), width);
      n.heuristic = nj.value("heuristic", 0.0);
      n.value = exact_pwc_from_json(nj.at("value"), upper);
      n.policy = exact_tags_from_json(nj.at("policy"), upper);
      n.closed = exact_pwc_from_json(nj.at("closed"), upper);
      n.reachable = exact_pwc_from_json(nj.at("reachable"), upper);
      for (const auto& p : n.policy.pieces())
        if (p.value != kNoAction && (p.value < 0 || static_cast<std::size_t>(p.value) >= out.problem.actions.size()))
          throw ParseError("policy refers to an unknown action");
      s.nodes.push_back(std::move(n));
    }
    if (s.nodes.empty() || s.nodes.front().state != s.start) throw ParseError("policy graph must start at the start state");
    if (!std::is_sorted(s.nodes.begin() + 1, s.nodes.end(),
                        [](const PolicyNode& a, const PolicyNode& b) { return a.state < b.state; }))
      throw ParseError("policy nodes out of canonical order");
    return out;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed policy file: ") + e.what());
  }
}

LoadedPolicy load_policy(const std::filesystem::path& path) { return solution_from_json(read_json_file(path)); }

}  // namespace hao
