#include "hao/search.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <set>

namespace hao {

double heuristic_value(const HybridProblem& problem, const DiscreteState& n) {
  double h = 0.0;
  for (std::size_t g = 0; g < problem.goals.size(); ++g) {
    const Goal& goal = problem.goals[g];
    if (n.test(problem.goal_fluent(g))) continue;
    if (goal.lock_fluent && n.test(*goal.lock_fluent)) {
      if (!goal.requires_fluent || !n.test(*goal.requires_fluent)) continue;
    }
    h += goal.reward;
  }
  return h;
}

std::vector<std::vector<std::size_t>> scc_decompose(const std::vector<std::vector<std::size_t>>& adjacency) {
  const std::size_t n = adjacency.size();
  constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> components;
  std::size_t counter = 0;

  struct Frame {
    std::size_t v;
    std::size_t next;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    std::vector<Frame> calls{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!calls.empty()) {
      Frame& f = calls.back();
      const auto& out = adjacency[f.v];
      if (f.next < out.size()) {
        const std::size_t w = out[f.next++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          calls.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const std::size_t v = f.v;
      calls.pop_back();
      if (!calls.empty()) low[calls.back().v] = std::min(low[calls.back().v], low[v]);
      if (low[v] == index[v]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
      }
    }
  }
  return components;
}

namespace {

std::string describe(const std::vector<Violation>& violations) {
  std::string s = "invalid problem";
  for (const auto& v : violations) s += "\n  " + v.to_string();
  return s;
}

constexpr std::size_t kMaxSweeps = 1000000;

}  // namespace

InvalidProblem::InvalidProblem(std::vector<Violation> violations)
    : std::runtime_error(describe(violations)), violations_(std::move(violations)) {}

// ---- SearchGraph ------------------------------------------------------------

SearchGraph::SearchGraph(const HybridProblem& problem, SearchOptions options)
    : problem_(&problem), options_(std::move(options)) {
  start_cell_ = options_.whole_space ? indicator(problem.space.max, {Box::whole(problem.space.dims())})
                                     : point_cell(problem.space.max, problem.initial_point, problem.c_min / 2);
  const std::size_t s = get_or_create(problem.initial_state);
  nodes_[s].reachable = start_cell_;
  nodes_[s].open = region_and(start_cell_, nodes_[s].nonterminal);
}

std::optional<std::size_t> SearchGraph::find(const DiscreteState& n) const {
  auto it = index_.find(n);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t SearchGraph::get_or_create(const DiscreteState& n) {
  if (auto id = find(n)) return *id;
  const auto& upper = problem_->space.max;
  SearchNode node;
  node.state = n;
  node.heuristic = heuristic_value(*problem_, n);
  node.nonterminal = nonterminal_region(*problem_, n);
  node.value = restrict_to(constant(upper, node.heuristic), node.nonterminal, 0.0);
  node.policy = TagFunction(upper, kNoAction);
  node.open = constant(upper, 0.0);
  node.closed = constant(upper, 0.0);
  node.reachable = constant(upper, 0.0);
  nodes_.push_back(std::move(node));
  phantom_.erase(n);
  index_.emplace(n, nodes_.size() - 1);
  ++stats_.nodes_created;
  return nodes_.size() - 1;
}

const PwcFunction& SearchGraph::value_of(const DiscreteState& n) const {
  if (auto id = find(n)) return nodes_[*id].value;
  auto it = phantom_.find(n);
  if (it == phantom_.end()) {
    const PwcFunction nt = nonterminal_region(*problem_, n);
    it = phantom_.emplace(n, restrict_to(constant(problem_->space.max, heuristic_value(*problem_, n)), nt, 0.0)).first;
  }
  return it->second;
}

void SearchGraph::add_edge(std::size_t from, std::size_t action, std::size_t to) {
  const SearchNode::Edge child{action, to};
  auto& ch = nodes_[from].children;
  if (std::find(ch.begin(), ch.end(), child) != ch.end()) return;
  ch.push_back(child);
  nodes_[to].parents.push_back({action, from});
}

bool SearchGraph::has_fringe() const {
  for (const auto& node : nodes_)
    if (!is_empty(region_and(node.reachable, node.open))) return true;
  return false;
}

void SearchGraph::expand_region(std::size_t id, const PwcFunction& region,
                                std::map<std::size_t, PwcFunction>& next) {
  const DiscreteState n = nodes_[id].state;
  for (std::size_t a : matching_actions(*problem_, n)) {
    if (!intersects(region, problem_->actions[a].applicability)) continue;
    for (const DiscreteState& succ : successors(*problem_, n, a)) {
      PwcFunction image = reach_image(*problem_, n, region, a, succ);
      if (is_empty(image)) continue;
      const std::size_t c = get_or_create(succ);
      add_edge(id, a, c);
      SearchNode& child = nodes_[c];
      PwcFunction fresh = region_minus(region_and(image, child.nonterminal), child.closed);
      if (is_empty(fresh)) continue;
      child.open = region_or(child.open, fresh);
      auto it = next.find(c);
      if (it == next.end())
        next.emplace(c, std::move(fresh));
      else
        it->second = region_or(it->second, fresh);
    }
  }
  SearchNode& node = nodes_[id];
  node.closed = region_or(node.closed, region);
  node.open = region_minus(node.open, region);
  ++stats_.regions_expanded;
}

std::vector<std::size_t> SearchGraph::expand_step(std::size_t horizon) {
  std::map<std::size_t, PwcFunction> frontier;
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    PwcFunction r = region_and(nodes_[id].reachable, nodes_[id].open);
    if (!is_empty(r)) frontier.emplace(id, std::move(r));
  }
  std::set<std::size_t> touched;
  for (std::size_t depth = 0; !frontier.empty() && (horizon == kExhaustive || depth < horizon); ++depth) {
    std::vector<std::size_t> order;
    for (const auto& [id, r] : frontier) order.push_back(id);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return nodes_[a].state < nodes_[b].state; });
    std::map<std::size_t, PwcFunction> next;
    for (std::size_t id : order) {
      PwcFunction r = region_and(frontier.at(id), nodes_[id].open);
      if (is_empty(r)) continue;
      if (is_empty(nodes_[id].closed)) ++stats_.nodes_expanded;
      expand_region(id, r, next);
      touched.insert(id);
    }
    frontier = std::move(next);
  }
  return {touched.begin(), touched.end()};
}

double SearchGraph::backup_node(std::size_t id) {
  const SearchNode& node = nodes_[id];
  const auto& upper = problem_->space.max;
  PwcFunction region = node.closed;
  if (options_.multi_region) {
    if (auto bb = bounding_box(node.closed)) {
      region = indicator(upper, {Box{std::vector<double>(upper.size(), 0.0), bb->hi}});
    }
  }
  ValueLookup lookup = [this](const DiscreteState& s) -> const PwcFunction& { return value_of(s); };
  BackupResult res = bellman_backup(*problem_, node.state, region, lookup, &node.policy);
  PwcFunction value = simplify(select(node.closed, res.value, node.value), 0.0);
  TagFunction policy = simplify(select(node.closed, res.policy, TagFunction(upper, kNoAction)));
  const double change = max_abs_diff(value, node.value);
  nodes_[id].value = std::move(value);
  nodes_[id].policy = std::move(policy);
  ++stats_.backups;
  return change;
}

SearchGraph::UpdateSummary SearchGraph::update_values(const std::vector<std::size_t>& touched) {
  UpdateSummary summary;
  // Z: touched nodes and their ancestors along marked edges.
  std::vector<bool> in_z(nodes_.size(), false);
  std::deque<std::size_t> queue;
  for (std::size_t id : touched) {
    if (!in_z[id]) {
      in_z[id] = true;
      queue.push_back(id);
    }
  }
  std::vector<std::vector<int>> used(nodes_.size());
  std::vector<bool> used_known(nodes_.size(), false);
  auto marked = [&](std::size_t parent, std::size_t action) {
    if (!used_known[parent]) {
      used[parent] = tags_used(nodes_[parent].policy);
      used_known[parent] = true;
    }
    return std::find(used[parent].begin(), used[parent].end(), static_cast<int>(action)) != used[parent].end();
  };
  while (!queue.empty()) {
    const std::size_t id = queue.front();
    queue.pop_front();
    for (const auto& e : nodes_[id].parents) {
      if (in_z[e.node] || !marked(e.node, e.action)) continue;
      in_z[e.node] = true;
      queue.push_back(e.node);
    }
  }

  std::vector<std::size_t> members;
  std::vector<std::size_t> local(nodes_.size(), static_cast<std::size_t>(-1));
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    if (!in_z[id]) continue;
    local[id] = members.size();
    members.push_back(id);
  }
  std::vector<std::vector<std::size_t>> adjacency(members.size());
  std::vector<bool> self_loop(members.size(), false);
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (const auto& e : nodes_[members[i]].children) {
      if (!in_z[e.node]) continue;
      adjacency[i].push_back(local[e.node]);
      if (e.node == members[i]) self_loop[i] = true;
    }
  }

  for (const auto& comp : scc_decompose(adjacency)) {
    ++summary.components;
    summary.largest_component = std::max(summary.largest_component, comp.size());
    const bool cyclic = comp.size() > 1 || self_loop[comp.front()];
    if (!cyclic) {
      summary.max_change = std::max(summary.max_change, backup_node(members[comp.front()]));
      ++summary.backups;
      continue;
    }
    ++stats_.multi_node_components;
    stats_.largest_component = std::max(stats_.largest_component, comp.size());
    for (std::size_t sweep = 0;; ++sweep) {
      if (sweep == kMaxSweeps) throw ContractError("value iteration on a component did not converge");
      double change = 0.0;
      for (std::size_t i : comp) {
        change = std::max(change, backup_node(members[i]));
        ++summary.backups;
      }
      ++stats_.component_sweeps;
      summary.max_change = std::max(summary.max_change, change);
      if (change < kValueTol) break;
    }
  }
  return summary;
}

void SearchGraph::recompute_reachable() {
  const auto& upper = problem_->space.max;
  for (auto& node : nodes_) node.reachable = constant(upper, 0.0);
  std::deque<std::pair<std::size_t, PwcFunction>> work;
  nodes_[start()].reachable = start_cell_;
  work.emplace_back(start(), start_cell_);
  while (!work.empty()) {
    auto [id, delta] = std::move(work.front());
    work.pop_front();
    PwcFunction source = region_and(delta, nodes_[id].closed);
    if (is_empty(source)) continue;
    const DiscreteState n = nodes_[id].state;
    const TagFunction active = select(source, nodes_[id].policy, TagFunction(upper, kNoAction));
    for (int tag : tags_used(active)) {
      if (tag == kNoAction) continue;
      const PwcFunction area = tag_region(active, tag);
      const auto action = static_cast<std::size_t>(tag);
      for (const DiscreteState& succ : successors(*problem_, n, action)) {
        PwcFunction image = reach_image(*problem_, n, area, action, succ);
        if (is_empty(image)) continue;
        auto c = find(succ);
        if (!c) throw ContractError("policy leads to a state missing from the graph");
        PwcFunction fresh = region_minus(image, nodes_[*c].reachable);
        if (is_empty(fresh)) continue;
        nodes_[*c].reachable = region_or(nodes_[*c].reachable, fresh);
        work.emplace_back(*c, std::move(fresh));
      }
    }
  }
}

ErrorBound SearchGraph::error_bound() const {
  const auto& upper = problem_->space.max;
  const std::size_t count = nodes_.size();
  std::vector<PwcFunction> g(count, constant(upper, 0.0));
  std::vector<PwcFunction> h(count);
  for (std::size_t i = 0; i < count; ++i) h[i] = nodes_[i].value;

  const PwcFunction zero = constant(upper, 0.0);
  ValueLookup g_lookup = [&](const DiscreteState& s) -> const PwcFunction& {
    auto id = find(s);
    return id ? g[*id] : zero;
  };
  ValueLookup h_lookup = [&](const DiscreteState& s) -> const PwcFunction& {
    auto id = find(s);
    return id ? h[*id] : value_of(s);
  };
  auto evaluate_node = [&](std::size_t id) {
    const SearchNode& node = nodes_[id];
    if (is_empty(node.closed)) return 0.0;
    PwcFunction gn = simplify(policy_backup(*problem_, node.state, node.policy, node.closed, g_lookup, true), 0.0);
    PwcFunction hn = simplify(
        select(node.closed, policy_backup(*problem_, node.state, node.policy, node.closed, h_lookup, false),
               node.value),
        0.0);
    const double change = std::max(max_abs_diff(gn, g[id]), max_abs_diff(hn, h[id]));
    g[id] = std::move(gn);
    h[id] = std::move(hn);
    return change;
  };

  std::vector<std::vector<std::size_t>> adjacency(count);
  std::vector<bool> self_loop(count, false);
  for (std::size_t i = 0; i < count; ++i) {
    for (const auto& e : nodes_[i].children) {
      adjacency[i].push_back(e.node);
      if (e.node == i) self_loop[i] = true;
    }
  }
  for (const auto& comp : scc_decompose(adjacency)) {
    if (comp.size() == 1 && !self_loop[comp.front()]) {
      evaluate_node(comp.front());
      continue;
    }
    for (std::size_t sweep = 0;; ++sweep) {
      if (sweep == kMaxSweeps) throw ContractError("policy evaluation on a component did not converge");
      double change = 0.0;
      for (std::size_t i : comp) change = std::max(change, evaluate_node(i));
      if (change < kValueTol) break;
    }
  }
  const Point& x0 = problem_->initial_point;
  return {g[start()](x0), h[start()](x0)};
}

double SearchGraph::value_at_start() const { return nodes_[start()].value(problem_->initial_point); }

// ---- solve ------------------------------------------------------------------

const PolicyNode* Solution::find(const DiscreteState& n) const {
  auto it = std::lower_bound(nodes.begin() + (nodes.empty() ? 0 : 1), nodes.end(), n,
                             [](const PolicyNode& p, const DiscreteState& s) { return p.state < s; });
  if (it != nodes.end() && it->state == n) return &*it;
  if (!nodes.empty() && nodes.front().state == n) return &nodes.front();
  return nullptr;
}

namespace {

Solution extract(const SearchGraph& graph, const ErrorBound& bound, bool converged) {
  const HybridProblem& problem = graph.problem();
  Solution s;
  s.start = problem.initial_state;
  s.x0 = problem.initial_point;
  s.value_at_start = graph.value_at_start();
  s.lower_bound = bound.g0;
  s.error_bound = bound.h0;
  s.converged = converged;
  s.stats = graph.stats();

  std::vector<std::size_t> ids;
  for (std::size_t id = 0; id < graph.nodes().size(); ++id) {
    if (id == graph.start() || !is_empty(graph.node(id).reachable)) ids.push_back(id);
  }
  std::sort(ids.begin() + 1, ids.end(),
            [&](std::size_t a, std::size_t b) { return graph.node(a).state < graph.node(b).state; });

  std::vector<bool> goal_seen(problem.goals.size(), false);
  std::size_t branches = 0;
  for (std::size_t id : ids) {
    const SearchNode& node = graph.node(id);
    PolicyNode p{node.state, node.heuristic, node.value, node.policy, node.closed, node.reachable};
    const TagFunction active =
        select(region_and(node.reachable, node.closed), node.policy, TagFunction(problem.space.max, kNoAction));
    for (int tag : tags_used(active))
      if (tag != kNoAction) ++branches;
    for (std::size_t g = 0; g < problem.goals.size(); ++g)
      if (node.state.test(problem.goal_fluent(g)) && !problem.initial_state.test(problem.goal_fluent(g)))
        goal_seen[g] = true;
    s.nodes.push_back(std::move(p));
  }
  s.stats.policy_nodes = s.nodes.size();
  s.stats.policy_branches = branches;
  s.stats.goals_pursued = static_cast<std::size_t>(std::count(goal_seen.begin(), goal_seen.end(), true));
  std::size_t pieces = 0;
  for (const auto& node : graph.nodes()) pieces += node.value.size();
  s.stats.value_pieces = pieces;
  return s;
}

}  // namespace

Solution solve(const HybridProblem& problem, const SearchOptions& options,
               const std::function<void(const IterationReport&)>& on_iteration) {
  if (auto violations = validate_problem(problem); !violations.empty()) throw InvalidProblem(std::move(violations));
  const auto started = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  };

  SearchGraph graph(problem, options);
  auto report = [&](std::size_t iteration) {
    if (!on_iteration) return;
    std::optional<ErrorBound> bound;
    if (options.track_error_bound) bound = graph.error_bound();
    on_iteration({iteration, graph.value_at_start(), bound, &graph});
  };

  bool converged = false;
  report(0);
  for (;;) {
    if (!graph.has_fringe()) {
      converged = true;
      break;
    }
    if (options.max_iterations && graph.stats().iterations >= *options.max_iterations) break;
    if (options.max_seconds && elapsed_ms() >= *options.max_seconds * 1000.0) break;
    const auto touched = graph.expand_step(options.horizon);
    graph.update_values(touched);
    graph.recompute_reachable();
    ++graph.stats().iterations;
    report(graph.stats().iterations);
  }
  const ErrorBound bound = graph.error_bound();
  graph.stats().wall_ms = elapsed_ms();
  return extract(graph, bound, converged);
}

std::size_t count_reachable_discrete(const HybridProblem& problem) {
  const auto& upper = problem.space.max;
  std::unordered_map<DiscreteState, PwcFunction> reached;
  std::deque<std::pair<DiscreteState, PwcFunction>> work;
  const PwcFunction cell = point_cell(upper, problem.initial_point, problem.c_min / 2);
  reached.emplace(problem.initial_state, cell);
  work.emplace_back(problem.initial_state, cell);
  while (!work.empty()) {
    auto [n, delta] = std::move(work.front());
    work.pop_front();
    for (std::size_t a : matching_actions(problem, n)) {
      if (!intersects(delta, problem.actions[a].applicability)) continue;
      for (const DiscreteState& succ : successors(problem, n, a)) {
        PwcFunction image = reach_image(problem, n, delta, a, succ);
        if (is_empty(image)) continue;
        auto it = reached.find(succ);
        if (it == reached.end()) {
          reached.emplace(succ, image);
          work.emplace_back(succ, std::move(image));
          continue;
        }
        PwcFunction fresh = region_minus(image, it->second);
        if (is_empty(fresh)) continue;
        it->second = region_or(it->second, fresh);
        work.emplace_back(succ, std::move(fresh));
      }
    }
  }
  return reached.size();
}

}  // namespace hao
