#pragma once

// Experiment harness: configs in, JSON reports out.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tame/errors.hpp"

namespace tame::runner {

using json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "tame-report/1";
inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kFailure = 1, kInvalid = 2, kNotStabilized = 3 };

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the config
  int jobs = 1;
  std::optional<std::filesystem::path> cache_dir;
};

struct SystemInfo {
  std::string name;
  json spec;
  std::string description;
};

// Built-in systems, referenced by name from configs.
const std::vector<SystemInfo>& systems();

// Reads a config file. Throws kInvalidArgument on unreadable or malformed text.
json load_config(const std::filesystem::path& path);
json load_report(const std::filesystem::path& path);

// Resolves the system, fills defaults and checks every key. The result is
// what the report embeds. Throws kInvalidArgument.
json normalize(const json& config, const RunOptions& opt = {});

struct Outcome {
  json report;
  int exit_code = kOk;
  std::string diagnostic;  // set when exit_code is kNotStabilized
};

// Validation errors propagate as kInvalidArgument; non-stabilization is
// returned as exit code 3 with the partial report.
Outcome run(const json& config, const RunOptions& opt = {});

// Digest of the report without its timing field.
std::string payload_digest(const json& report);
std::string dump(const json& report);

// Problems found in a report; empty when it conforms to the schema.
std::vector<std::string> validate_report(const json& report);

// Throws kUnknownSeries.
std::string series_csv(const json& report, const std::string& series);

struct Verification {
  bool ok = true;
  std::vector<std::string> lines;
};

// Schema, payload digest, a rerun of the embedded config, and the
// certificates re-checked from scratch.
Verification verify(const json& report, const RunOptions& opt = {});

}  // namespace tame::runner
