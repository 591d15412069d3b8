#include <doctest.h>

#include <filesystem>
#include <random>

#include "tame/runner.hpp"

using namespace tame;
using namespace tame::runner;

namespace {

json cfg(const std::string& text) { return json::parse(text); }

ErrorKind kind_of_failure(const json& config) {
  try {
    run(config);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::kInternal;
}

}  // namespace

TEST_CASE("validation errors") {
  const auto bad = {
      R"({"experiment": "rank", "system": "sturmian-golden", "params": {"epsilons": [0.0]}})",
      R"({"experiment": "rank", "system": "sturmian-golden", "params": {"epsilons": [-0.1]}})",
      R"({"experiment": "rank", "system": "sturmian-golden", "params": {"divisors": [16, 8]}})",
      R"({"experiment": "rank", "system": "nowhere"})",
      R"({"experiment": "dance", "system": "sturmian-golden"})",
      R"({"experiment": "rank", "system": "sturmian-golden", "params": {"bogus": 1}})",
      R"({"experiment": "rank", "system": "sturmian-golden", "params": {"grid": "many"}})",
      R"({"experiment": "rank", "system": "sturmian-golden", "params": {"gamma": "x+1"}})",
      R"({"experiment": "rank", "system": "helly"})",
      R"({"experiment": "rank", "system": {"kind": "split-circle", "alpha": "cf:[1;2]"}})",
      R"({"experiment": "rank", "system": {"kind": "split-circle", "depth": 3}})",
      R"({"experiment": "isolation", "system": "rotation-golden"})",
      R"({"experiment": "determine", "system": "sturmian-golden"})",
      R"({"experiment": "limit", "system": "sturmian-golden", "seed": -4})",
      R"({"experiment": "limit", "system": "sturmian-golden", "extra": true})",
      R"([1, 2])",
  };
  for (const auto* text : bad) CHECK_MESSAGE(kind_of_failure(cfg(text)) == ErrorKind::kInvalidArgument, text);
}

TEST_CASE("normalization fills defaults and records the seed") {
  const auto n = normalize(cfg(R"({"experiment": "fibers", "system": "semicocycle"})"));
  CHECK(n["seed"] == 1);
  CHECK(n["system"]["depth"] == 20);
  CHECK(n["system"]["name"] == "semicocycle");
  CHECK(n["params"]["k_max"] == 6);
  RunOptions opt;
  opt.seed = 77;
  CHECK(normalize(cfg(R"({"experiment": "fibers", "system": "semicocycle", "seed": 3})"), opt)["seed"] == 77);
  const auto inline_spec =
      normalize(cfg(R"({"experiment": "rank", "system": {"kind": "split-circle", "alpha": "cf:[0;(2)]"}})"));
  CHECK(inline_spec["system"]["split_set"] == "orbit");
  CHECK(inline_spec["params"]["epsilons"] == json::array({0.1, 0.01}));
}

TEST_CASE("circle points in configs") {
  const auto r = run(cfg(R"({"experiment": "limit", "system": "sturmian-golden",
      "params": {"gammas": ["3a+2/7", "-a", "a-1/3", "5/11", "0"], "random_gammas": 0,
                 "sides": "below", "sample_size": 60, "orbit_window": 2}})"));
  CHECK(r.exit_code == kOk);
  const auto& limits = r.report["results"]["limits"];
  REQUIRE(limits.size() == 5);
  // Offsets are normalized so that a alpha + b lies in [0, 1).
  CHECK(limits[0]["gamma"] == "3a-12/7");
  CHECK(limits[1]["gamma"] == "-1a+1");
  CHECK(limits[2]["gamma"] == "1a-1/3");
  CHECK(limits[3]["gamma"] == "0a+5/11");
  CHECK(r.report["results"]["all_exact"] == true);
  CHECK(r.report["results"]["all_classified"] == true);
}

TEST_CASE("rank report: beta 2 for the Sturmian p_0^-") {
  const auto r = run(cfg(R"({"experiment": "rank", "system": "sturmian-golden",
      "params": {"grid": 2000, "epsilons": [0.1]}})"));
  CHECK(r.exit_code == kOk);
  CHECK(r.report["status"] == "ok");
  CHECK(r.report["results"]["ranks"][0]["beta"] == 2);
  CHECK(validate_report(r.report).empty());
  const auto csv = series_csv(r.report, "rank");
  CHECK(csv.rfind("stage,set_size\n", 0) == 0);
  CHECK_THROWS_AS(series_csv(r.report, "independence"), Error);
  try {
    series_csv(r.report, "independence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUnknownSeries);
  }
}

TEST_CASE("non-stabilization gives exit 3 and a partial report") {
  // A single stage cannot empty A^1 for a discontinuous map.
  const auto r = run(cfg(R"({"experiment": "rank", "system": "sturmian-golden",
      "params": {"grid": 500, "epsilons": [0.1], "max_stages": 1}})"));
  CHECK(r.exit_code == kNotStabilized);
  CHECK(r.report["status"] == "not_stabilized");
  CHECK(r.report.contains("diagnostic"));
  CHECK(r.report["results"]["ranks"][0]["beta"].is_null());
  CHECK(validate_report(r.report).empty());

  // Tight node budget on the Cantor coding: best certificate kept.
  const auto b = run(cfg(R"({"experiment": "independence", "system": "cantor-golden",
      "params": {"L": [16], "horizon": 20000, "node_budget": 50, "exhaustive_max_L": 0}})"));
  CHECK(b.exit_code == kNotStabilized);
  const auto& w = b.report["results"]["windows"][0];
  CHECK(w["search_complete"] == false);
  CHECK(w["verified"] == true);
  CHECK(b.report["certificates"]["independence"][0]["exhaustive"] == false);
}

TEST_CASE("independence series and certificates") {
  const auto r = run(cfg(R"({"experiment": "independence", "system": "sturmian-golden",
      "params": {"L": [4, 8], "horizon": 3000, "complexity_max_L": 12}})"));
  CHECK(r.exit_code == kOk);
  CHECK(series_csv(r.report, "independence").rfind("L,complexity,independence\n", 0) == 0);
  CHECK(series_csv(r.report, "independence").find("8,9,2\n") != std::string::npos);
  CHECK(r.report["results"]["complexity_is_L_plus_1"] == true);
  CHECK(r.report["results"]["windows"][1]["exhaustive_agrees"] == true);
  CHECK(verify(r.report).ok);

  // A forged witness is caught by the independent re-check.
  auto forged = r.report;
  forged["certificates"]["independence"][1]["witnesses"][0] = "11111111";
  forged["payload_digest"] = payload_digest(forged);
  const auto v = verify(forged);
  CHECK_FALSE(v.ok);
}

TEST_CASE("rigidity series") {
  const auto r = run(cfg(R"({"experiment": "rigidity", "system": "rotation-silver", "params": {"k_max": 10}})"));
  CHECK(series_csv(r.report, "rigidity").rfind("n,sup_distance\n", 0) == 0);
  CHECK(r.report["series"]["rigidity"]["rows"].size() == 10);
}

TEST_CASE("reports round-trip through the schema") {
  const auto r = run(cfg(R"({"experiment": "fibers", "system": "semicocycle", "seed": 9})"));
  const auto text = dump(r.report);
  const auto back = json::parse(text);
  CHECK(validate_report(back).empty());
  CHECK(payload_digest(back) == back["payload_digest"]);
  CHECK(dump(back) == text);

  auto broken = back;
  broken.erase("seed");
  CHECK_FALSE(validate_report(broken).empty());
  broken = back;
  broken["series"]["x"] = {{"columns", {"a"}}, {"rows", {{1, 2}}}};
  CHECK_FALSE(validate_report(broken).empty());
  broken = back;
  broken["status"] = "fine";
  CHECK_FALSE(validate_report(broken).empty());
}

TEST_CASE("payloads do not depend on jobs or timing") {
  const std::vector<std::string> configs{
      R"({"experiment": "limit", "system": "sturmian-golden", "params": {"random_gammas": 4, "sample_size": 80}})",
      R"({"experiment": "limit", "system": "cos-golden", "params": {"grid_points": 5}})",
      R"({"experiment": "rank", "system": "free-group", "params": {"probe_length": 4}})",
      R"({"experiment": "determine", "system": "monotone-interval", "params": {"staircases": 4, "adversaries": 50}})",
      R"({"experiment": "counterexample", "system": "partial-linear", "params": {"trials": 20}})",
      R"({"experiment": "fibers", "system": "sturmian-golden", "params": {"orbit_range": 5, "defect_window": 20}})",
  };
  for (const auto& text : configs) {
    RunOptions one, many;
    many.jobs = 4;
    const auto a = run(cfg(text), one), b = run(cfg(text), many);
    CHECK_MESSAGE(a.report["payload_digest"] == b.report["payload_digest"], text);
    auto x = a.report, y = b.report;
    x.erase("wall_time_ms");
    y.erase("wall_time_ms");
    CHECK(x.dump() == y.dump());
  }
  // A different seed changes the payload.
  RunOptions other;
  other.seed = 2;
  CHECK(run(cfg(configs[4])).report["payload_digest"] != run(cfg(configs[4]), other).report["payload_digest"]);
}

TEST_CASE("factor cache leaves the payload unchanged") {
  const auto dir = std::filesystem::temp_directory_path() / ("tame-runner-cache-" + std::to_string(std::random_device{}()));
  const auto c = cfg(R"({"experiment": "independence", "system": "cantor-golden", "params": {"L": [6, 10], "horizon": 5000}})");
  RunOptions opt;
  opt.cache_dir = dir;
  const auto cold = run(c, opt);
  CHECK(std::filesystem::exists(dir));
  const auto warm = run(c, opt);
  CHECK(cold.report["payload_digest"] == warm.report["payload_digest"]);
  CHECK(run(c).report["payload_digest"] == warm.report["payload_digest"]);
  std::filesystem::remove_all(dir);
}

TEST_CASE("built-in systems all resolve") {
  const std::vector<std::string> exps{"limit",     "independence",   "rank",     "fibers", "determine",
                                      "isolation", "counterexample", "rigidity", "catalog"};
  for (const auto& s : systems()) {
    std::size_t usable = 0;
    for (const auto& e : exps) {
      try {
        normalize(json{{"experiment", e}, {"system", s.name}});
        ++usable;
      } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::kInvalidArgument);
      }
    }
    CHECK_MESSAGE(usable > 0, s.name);
  }
}
