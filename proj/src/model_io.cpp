#include "hao/model_io.hpp"

#include <fstream>
#include <sstream>

namespace hao {

using nlohmann::json;

namespace {

std::vector<double> numbers(const json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ParseError(std::string(what) + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::size_t fluent_ref(const json& j, const HybridProblem& p) {
  if (j.is_number_unsigned()) {
    const auto i = j.get<std::size_t>();
    if (i >= p.fluent_count()) throw ParseError("fluent index " + std::to_string(i) + " out of range");
    return i;
  }
  if (j.is_string()) {
    if (auto i = p.fluent_index(j.get<std::string>())) return *i;
    throw ParseError("unknown fluent '" + j.get<std::string>() + "'");
  }
  throw ParseError("fluent reference must be a name or an index");
}

DiscreteState fluent_set(const json& j, const HybridProblem& p) {
  DiscreteState s;
  if (j.is_null()) return s;
  if (!j.is_array()) throw ParseError("fluent list must be an array");
  for (const auto& f : j) s.set(fluent_ref(f, p));
  return s;
}

json fluent_list(const DiscreteState& s, const HybridProblem& p) {
  json out = json::array();
  for (std::size_t i = 0; i < p.fluent_count(); ++i)
    if (s.test(i)) out.push_back(p.fluent_names[i]);
  return out;
}

double upper_or_inf(double v, double upper) { return v == kInf ? upper : v; }

}  // namespace

json box_to_json(const Box& b, std::span<const double> upper) {
  json hi = json::array();
  for (std::size_t i = 0; i < b.hi.size(); ++i) hi.push_back(upper_or_inf(b.hi[i], upper[i]));
  return json{{"lo", b.lo}, {"hi", hi}};
}

Box box_from_json(const json& j, std::span<const double> upper) {
  if (!j.is_object()) throw ParseError("box must be an object with lo/hi");
  std::vector<double> lo = j.contains("lo") ? numbers(j.at("lo"), "box lo") : std::vector<double>(upper.size(), 0.0);
  std::vector<double> hi = j.contains("hi") ? numbers(j.at("hi"), "box hi") : std::vector<double>(upper.begin(), upper.end());
  if (lo.size() != upper.size() || hi.size() != upper.size()) throw ParseError("box dimension mismatch");
  return external_box(std::move(lo), std::move(hi), upper);
}

json pwc_to_json(const PwcFunction& f) {
  json pieces = json::array();
  for (const auto& p : f.pieces()) {
    json b = box_to_json(p.box, f.upper());
    b["value"] = p.value;
    pieces.push_back(std::move(b));
  }
  return json{{"default", f.default_value()}, {"pieces", pieces}};
}

PwcFunction pwc_from_json(const json& j, std::span<const double> upper) {
  std::vector<double> up(upper.begin(), upper.end());
  if (j.is_number()) return PwcFunction(up, j.get<double>());
  if (!j.is_object()) throw ParseError("piecewise function must be a number or an object");
  const double def = j.value("default", 0.0);
  std::vector<Piece<double>> pieces;
  if (j.contains("pieces")) {
    for (const auto& pj : j.at("pieces")) pieces.push_back({box_from_json(pj, upper), pj.at("value").get<double>()});
  }
  PwcFunction f(up, def, std::move(pieces));
  if (!pieces_disjoint(f)) throw ParseError("piecewise function has overlapping pieces");
  return f;
}

HybridProblem problem_from_json(const json& j) {
  try {
    HybridProblem p;
    const auto& space = j.at("space");
    p.space.max = numbers(space.at("max"), "space.max");
    if (space.contains("names"))
      p.space.names = space.at("names").get<std::vector<std::string>>();
    else
      for (std::size_t i = 0; i < p.space.max.size(); ++i) p.space.names.push_back("r" + std::to_string(i + 1));
    const auto& upper = p.space.max;

    p.fluent_names = j.value("fluents", std::vector<std::string>{});
    if (j.contains("goals")) {
      for (const auto& gj : j.at("goals")) {
        Goal g;
        g.name = gj.at("name").get<std::string>();
        g.reward = gj.at("reward").get<double>();
        p.goals.push_back(g);
        p.fluent_names.push_back(g.name);
      }
      std::size_t gi = 0;
      for (const auto& gj : j.at("goals")) {
        if (gj.contains("requires")) p.goals[gi].requires_fluent = fluent_ref(gj.at("requires"), p);
        if (gj.contains("lock")) p.goals[gi].lock_fluent = fluent_ref(gj.at("lock"), p);
        ++gi;
      }
    }
    if (p.fluent_count() > DiscreteState::kMaxFluents) throw ParseError("too many fluents");
    p.c_min = j.value("c_min", kDefaultMinConsumption);

    const auto& init = j.at("initial");
    p.initial_state = fluent_set(init.value("true", json::array()), p);
    p.initial_point = init.contains("x") ? numbers(init.at("x"), "initial.x") : upper;

    for (const auto& aj : j.at("actions")) {
      ActionSpec a;
      a.name = aj.at("name").get<std::string>();
      if (aj.contains("pre")) {
        const auto& pre = aj.at("pre");
        const auto t = fluent_set(pre.value("true", json::array()), p);
        const auto f = fluent_set(pre.value("false", json::array()), p);
        if (!(t & f).none()) throw ParseError("action " + a.name + " requires a fluent both true and false");
        a.source = StatePattern{t | f, t};
      }
      a.applicability = aj.contains("applicable") ? box_from_json(aj.at("applicable"), upper)
                                                  : external_box(std::vector<double>(upper.size(), 0.0), upper, upper);
      for (const auto& bj : aj.at("branches")) {
        Branch b;
        b.region = bj.contains("region") ? box_from_json(bj.at("region"), upper) : a.applicability;
        for (const auto& oj : bj.at("outcomes")) {
          Outcome o;
          o.probability = oj.at("p").get<double>();
          o.effect.set = fluent_set(oj.value("set", json::array()), p);
          o.effect.clear = fluent_set(oj.value("clear", json::array()), p);
          if (oj.contains("delta") == oj.contains("point"))
            throw ParseError("outcome of " + a.name + " needs exactly one of delta/point");
          if (oj.contains("delta")) {
            o.kind = EffectKind::kRelative;
            o.resources = numbers(oj.at("delta"), "delta");
          } else {
            o.kind = EffectKind::kAbsolute;
            o.resources = numbers(oj.at("point"), "point");
          }
          o.reward = oj.contains("reward") ? pwc_from_json(oj.at("reward"), upper) : PwcFunction(upper, 0.0);
          b.outcomes.push_back(std::move(o));
        }
        a.branches.push_back(std::move(b));
      }
      p.actions.push_back(std::move(a));
    }
    return p;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed problem: ") + e.what());
  }
}

json problem_to_json(const HybridProblem& p) {
  const auto& upper = p.space.max;
  json j;
  j["space"] = {{"max", upper}, {"names", p.space.names}};
  const std::size_t plain = p.fluent_count() - p.goals.size();
  j["fluents"] = std::vector<std::string>(p.fluent_names.begin(), p.fluent_names.begin() + static_cast<long>(plain));
  json goals = json::array();
  for (const auto& g : p.goals) {
    json gj{{"name", g.name}, {"reward", g.reward}};
    if (g.requires_fluent) gj["requires"] = p.fluent_names[*g.requires_fluent];
    if (g.lock_fluent) gj["lock"] = p.fluent_names[*g.lock_fluent];
    goals.push_back(std::move(gj));
  }
  j["goals"] = goals;
  j["c_min"] = p.c_min;
  j["initial"] = {{"true", fluent_list(p.initial_state, p)}, {"x", p.initial_point}};
  json actions = json::array();
  for (const auto& a : p.actions) {
    json aj;
    aj["name"] = a.name;
    aj["pre"] = {{"true", fluent_list(a.source.value, p)}, {"false", fluent_list(a.source.mask & ~a.source.value, p)}};
    aj["applicable"] = box_to_json(a.applicability, upper);
    json branches = json::array();
    for (const auto& b : a.branches) {
      json outcomes = json::array();
      for (const auto& o : b.outcomes) {
        json oj{{"p", o.probability}, {"set", fluent_list(o.effect.set, p)}, {"clear", fluent_list(o.effect.clear, p)}};
        oj[o.kind == EffectKind::kRelative ? "delta" : "point"] = o.resources;
        if (o.reward.size() == 0)
          oj["reward"] = o.reward.default_value();
        else
          oj["reward"] = pwc_to_json(o.reward);
        outcomes.push_back(std::move(oj));
      }
      branches.push_back({{"region", box_to_json(b.region, upper)}, {"outcomes", outcomes}});
    }
    aj["branches"] = branches;
    actions.push_back(std::move(aj));
  }
  j["actions"] = actions;
  return j;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const std::filesystem::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

HybridProblem load_problem(const std::filesystem::path& path) { return problem_from_json(read_json_file(path)); }

}  // namespace hao
