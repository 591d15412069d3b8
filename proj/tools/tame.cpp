#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "tame/runner.hpp"

using namespace tame;
using namespace tame::runner;

namespace {

int write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return kOk;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "tame: cannot write " << path << "\n";
    return kFailure;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Enveloping-semigroup experiments and tameness certificates"};
  app.require_subcommand(1);

  std::string config_path, report_path, series, out;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string cache_dir;

  auto* run_cmd = app.add_subcommand("run", "run an experiment config, write its report");
  run_cmd->add_option("config", config_path, "config file (JSON)")->required();
  run_cmd->add_option("--seed", seed, "override the config seed");
  run_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_option("--cache-dir", cache_dir, "factor cache root (default $TAME_CACHE_DIR)");
  run_cmd->add_option("--out", out, "report path (default stdout)");

  auto* plot_cmd = app.add_subcommand("plot", "write one series of a report as CSV");
  plot_cmd->add_option("report", report_path, "report file")->required();
  plot_cmd->add_option("series", series, "series name, e.g. independence, rank, rigidity")->required();
  plot_cmd->add_option("--out", out, "CSV path (default stdout)");

  auto* list_cmd = app.add_subcommand("list-systems", "list the built-in systems");

  auto* verify_cmd = app.add_subcommand("verify", "re-check a report: schema, digests, rerun, certificates");
  verify_cmd->add_option("certificate", report_path, "report file")->required();
  verify_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--cache-dir", cache_dir, "factor cache root (default $TAME_CACHE_DIR)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  RunOptions opt;
  opt.seed = seed;
  opt.jobs = jobs;
  if (!cache_dir.empty()) opt.cache_dir = cache_dir;

  try {
    if (*run_cmd) {
      const auto outcome = run(load_config(config_path), opt);
      if (const int rc = write_out(out, dump(outcome.report)); rc != kOk) return rc;
      if (outcome.exit_code == kNotStabilized) std::cerr << "tame: not stabilized: " << outcome.diagnostic << "\n";
      return outcome.exit_code;
    }
    if (*plot_cmd) return write_out(out, series_csv(load_report(report_path), series));
    if (*list_cmd) {
      for (const auto& s : systems()) std::cout << s.name << "\t" << s.spec.dump() << "\t" << s.description << "\n";
      return kOk;
    }
    if (*verify_cmd) {
      const auto v = verify(load_report(report_path), opt);
      for (const auto& line : v.lines) std::cout << line << "\n";
      return v.ok ? kOk : kFailure;
    }
  } catch (const Error& e) {
    std::cerr << "tame: " << e.what() << "\n";
    const bool validation = e.kind() == ErrorKind::kInvalidArgument || e.kind() == ErrorKind::kUnknownSeries;
    return validation ? kInvalid : kFailure;
  } catch (const std::exception& e) {
    std::cerr << "tame: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
