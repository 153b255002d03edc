#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hao/json_fwd.hpp"
#include "hao/model.hpp"
#include "hao/search.hpp"

namespace hao {

struct SweepSpec {
  enum class Axis { kInitialResource, kHorizon };

  Axis axis = Axis::kInitialResource;
  std::string axis_name;
  std::size_t dim = 0;  // resource dimension for kInitialResource
  /// Axis values; kInf stands for the exhaustive horizon on the k axis.
  std::vector<double> values;
  HybridProblem problem;
  SearchOptions options;
  std::optional<std::filesystem::path> output;
};

/// Reads a sweep document. `problem` is a path (relative to `base_dir`), an
/// inline problem object, or replaced by `rover`, a rover parameter object.
/// Axis is "k" or "initial_<resource name>" ("initial_time" and
/// "initial_energy" also address dimensions 0 and 1 of unnamed spaces).
SweepSpec sweep_spec_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

struct SweepRow {
  double axis_value = 0.0;
  std::size_t reachable_states = 0;
  SearchStats stats;
  double value = 0.0;
  double error_bound = 0.0;
};

/// Runs every sweep point, up to `jobs` at a time. Rows come back in value
/// order. With `deterministic`, wall_ms is zeroed.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, std::size_t jobs = 1, bool deterministic = false);

inline constexpr const char* kStatsColumns =
    "axis_value,reachable_states,nodes_created,nodes_expanded,regions_expanded,policy_nodes,policy_branches,"
    "goals_pursued,backups,wall_ms,value,error_bound";

/// Writes the column line and one line per row (no file header).
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace hao
