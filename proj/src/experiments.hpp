#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tame/exact_arith.hpp"
#include "tame/runner.hpp"

namespace tame::runner::detail {

struct Context {
  std::string experiment;
  json system;  // resolved spec
  json params;  // defaults filled
  std::uint64_t seed = 1;
  int jobs = 1;
  std::optional<std::filesystem::path> cache_dir;
};

struct Result {
  json results = json::object();
  json certificates = json::object();
  json series = json::object();
  json provenance = json::array();
  std::optional<std::string> not_stabilized;
};

// "golden", "silver" or a continued fraction "cf:[0; ...]".
RotationNumber parse_alpha(const std::string& text);

// Fills defaults and type-checks `given` for the experiment on a system of
// the given kind. Throws kInvalidArgument.
json experiment_params(const std::string& experiment, const json& system, const json& given);

Result run_experiment(const Context& ctx);

// Re-checks certificates independently of the run; returns failures.
std::vector<std::string> recheck(const json& report);

}  // namespace tame::runner::detail
