#pragma once

#include <filesystem>

#include "hao/json_fwd.hpp"
#include "hao/model.hpp"
#include "hao/search.hpp"

namespace hao {

/// Piecewise functions in policy files keep the exact internal boxes: an
/// upper bound of null means the box owns the top face of the hypercube.
nlohmann::json exact_pwc_to_json(const PwcFunction& f);
PwcFunction exact_pwc_from_json(const nlohmann::json& j, std::span<const double> upper);
nlohmann::json exact_tags_to_json(const TagFunction& f);
TagFunction exact_tags_from_json(const nlohmann::json& j, std::span<const double> upper);

nlohmann::json stats_to_json(const SearchStats& stats);
SearchStats stats_from_json(const nlohmann::json& j);

/// Self-contained policy document: the problem, the policy graph and the stats.
nlohmann::json solution_to_json(const HybridProblem& problem, const Solution& solution);

struct LoadedPolicy {
  HybridProblem problem;
  Solution solution;
};
LoadedPolicy solution_from_json(const nlohmann::json& j);
LoadedPolicy load_policy(const std::filesystem::path& path);

}  // namespace hao
