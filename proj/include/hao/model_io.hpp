#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "hao/json_fwd.hpp"
#include "hao/model.hpp"

namespace hao {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

HybridProblem problem_from_json(const nlohmann::json& j);
nlohmann::json problem_to_json(const HybridProblem& problem);

nlohmann::json box_to_json(const Box& b, std::span<const double> upper);
Box box_from_json(const nlohmann::json& j, std::span<const double> upper);
nlohmann::json pwc_to_json(const PwcFunction& f);
PwcFunction pwc_from_json(const nlohmann::json& j, std::span<const double> upper);

/// Reads a whole file; throws ParseError if it cannot be opened.
std::string read_file(const std::filesystem::path& path);
nlohmann::json read_json_file(const std::filesystem::path& path);
HybridProblem load_problem(const std::filesystem::path& path);

}  // namespace hao
