#include "tame/runner.hpp"

#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include "experiments.hpp"
#include "tame/tameness.hpp"

namespace tame::runner {

namespace {

Error invalid(const std::string& what) { return Error(ErrorKind::kInvalidArgument, what); }

const std::set<std::string> kExperiments{"limit",     "independence",   "rank",      "fibers", "determine",
                                         "isolation", "counterexample", "rigidity", "catalog"};

// Keys each system kind accepts, besides "kind" and "name".
const std::vector<std::pair<std::string, std::set<std::string>>> kKinds{
    {"split-circle", {"alpha", "split_set"}},
    {"cos", {"alpha"}},
    {"cut-project", {"alpha", "window", "partition", "horizon"}},
    {"full-shift", {}},
    {"semicocycle", {"depth"}},
    {"free-group", {"depth"}},
    {"partial-linear", {}},
    {"affine", {}},
    {"monotone", {"depth"}},
    {"helly", {}},
    {"circle-order", {}},
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json parse_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw invalid(what + " is not valid JSON: " + e.what());
  }
}

std::int64_t int_key(const json& spec, const char* key, std::int64_t lo, std::int64_t hi) {
  const auto& v = spec.at(key);
  if (!v.is_number_integer()) throw invalid(std::string("system key '") + key + "' must be an integer");
  const auto n = v.get<std::int64_t>();
  if (n < lo || n > hi)
    throw invalid(std::string("system key '") + key + "' out of range [" + std::to_string(lo) + ", " +
                  std::to_string(hi) + "]");
  return n;
}

json resolve_system(const json& given) {
  json spec;
  if (given.is_string()) {
    const auto name = given.get<std::string>();
    for (const auto& s : systems())
      if (s.name == name) spec = s.spec;
    if (spec.is_null()) throw invalid("unknown system '" + name + "' (see list-systems)");
  } else if (given.is_object()) {
    spec = given;
  } else {
    throw invalid("'system' must be a name or an object");
  }
  if (!spec.contains("kind") || !spec["kind"].is_string()) throw invalid("system spec needs a string 'kind'");
  const auto kind = spec["kind"].get<std::string>();
  const std::set<std::string>* allowed = nullptr;
  for (const auto& [k, keys] : kKinds)
    if (k == kind) allowed = &keys;
  if (!allowed) throw invalid("unknown system kind '" + kind + "'");
  for (const auto& [key, value] : spec.items())
    if (key != "kind" && key != "name" && !allowed->count(key))
      throw invalid("system kind '" + kind + "' does not take key '" + key + "'");

  if (allowed->count("alpha")) {
    if (!spec.contains("alpha")) spec["alpha"] = "golden";
    if (!spec["alpha"].is_string()) throw invalid("'alpha' must be a string");
    detail::parse_alpha(spec["alpha"].get<std::string>());
  }
  if (kind == "split-circle") {
    if (!spec.contains("split_set")) spec["split_set"] = "orbit";
    const auto& s = spec["split_set"];
    if (!s.is_string() || (s != "orbit" && s != "none" && s != "rationals"))
      throw invalid("'split_set' must be orbit, none or rationals");
  }
  if (kind == "cut-project") {
    if (spec.contains("window") == spec.contains("partition"))
      throw invalid("cut-project systems need exactly one of 'window' and 'partition'");
    if (!spec.contains("horizon")) spec["horizon"] = 100000;
    int_key(spec, "horizon", 1, 10'000'000);
    if (spec.contains("window")) {
      auto& w = spec["window"];
      if (!w.is_object() || w.value("type", "") != "cantor")
        throw invalid("'window' must be {\"type\": \"cantor\", \"scale\": ..., \"generations\": ...}");
      if (!w.contains("scale")) w["scale"] = "1/2";
      if (!w.contains("generations")) w["generations"] = 6;
      if (!w["scale"].is_string()) throw invalid("window 'scale' must be a rational string");
      if (!w["generations"].is_number_integer() || w["generations"].get<int>() < 1 ||
          w["generations"].get<int>() > 12)
        throw invalid("window 'generations' must be an integer in [1, 12]");
    } else {
      const auto& p = spec["partition"];
      if (!p.is_array() || p.empty()) throw invalid("'partition' must be a nonempty list of [lo, hi] arcs");
      for (const auto& arc : p)
        if (!arc.is_array() || arc.size() != 2 || !arc[0].is_string() || !arc[1].is_string())
          throw invalid("each partition arc is a pair of point strings");
    }
  }
  if (kind == "semicocycle") {
    if (!spec.contains("depth")) spec["depth"] = 20;
    int_key(spec, "depth", 1, 63);
  }
  if (kind == "free-group") {
    if (!spec.contains("depth")) spec["depth"] = 16;
    int_key(spec, "depth", 2, 60);
  }
  if (kind == "monotone") {
    if (!spec.contains("depth")) spec["depth"] = 8;
    int_key(spec, "depth", 0, 16);
  }
  if (given.is_string()) spec["name"] = given;
  return spec;
}

std::string type_name(const json& v) { return v.type_name(); }

void expect(std::vector<std::string>& errs, bool ok, const std::string& what) {
  if (!ok) errs.push_back(what);
}

}  // namespace

const std::vector<SystemInfo>& systems() {
  static const std::vector<SystemInfo> all{
      {"sturmian-golden", {{"kind", "split-circle"}, {"alpha", "golden"}, {"split_set", "orbit"}},
       "Sturmian split circle, golden rotation number, the orbit of 0 split"},
      {"sturmian-silver", {{"kind", "split-circle"}, {"alpha", "silver"}, {"split_set", "orbit"}},
       "Sturmian split circle, rotation number sqrt(2) - 1"},
      {"rotation-golden", {{"kind", "split-circle"}, {"alpha", "golden"}, {"split_set", "none"}},
       "plain circle rotation by the golden number"},
      {"rotation-silver", {{"kind", "split-circle"}, {"alpha", "silver"}, {"split_set", "none"}},
       "plain circle rotation by sqrt(2) - 1"},
      {"cos-golden", {{"kind", "cos"}, {"alpha", "golden"}}, "cos(1/x) extension of the golden rotation"},
      {"cantor-golden",
       {{"kind", "cut-project"},
        {"alpha", "golden"},
        {"window", {{"type", "cantor"}, {"scale", "1/2"}, {"generations", 6}}},
        {"horizon", 100000}},
       "cut-and-project coding through a Cantor window (6 generations, scale 1/2)"},
      {"interval-golden",
       {{"kind", "cut-project"}, {"alpha", "golden"}, {"partition", json::array({json::array({"0", "1/2"})})}, {"horizon", 100000}},
       "cut-and-project coding through the window [0, 1/2)"},
      {"full-shift", {{"kind", "full-shift"}}, "the full binary shift"},
      {"semicocycle", {{"kind", "semicocycle"}, {"depth", 20}}, "semicocycle cascade over the dyadic odometer"},
      {"free-group", {{"kind", "free-group"}, {"depth", 16}}, "F2 acting on its boundary, depth 16"},
      {"partial-linear", {{"kind", "partial-linear"}}, "GL(n) acting on R^n, partial linear limits"},
      {"affine", {{"kind", "affine"}}, "affine group acting on the extended line"},
      {"monotone-interval", {{"kind", "monotone"}, {"depth", 8}}, "monotone maps of [0, 1], dyadic sample level 8"},
      {"helly", {{"kind", "helly"}}, "discrete Helly family f_z(z) = 1/2, zero elsewhere"},
      {"circle-order", {{"kind", "circle-order"}}, "circle [0, 1) with the maps p_a and p_(a,b)"},
  };
  return all;
}

json load_config(const std::filesystem::path& path) {
  auto config = parse_text(read_file(path), path.string());
  // A system given as a *.json path is a spec file, relative to the config.
  if (config.is_object() && config.contains("system") && config["system"].is_string()) {
    const auto ref = config["system"].get<std::string>();
    if (ref.size() > 5 && ref.ends_with(".json")) {
      std::filesystem::path file(ref);
      if (file.is_relative()) file = path.parent_path() / file;
      config["system"] = parse_text(read_file(file), file.string());
    }
  }
  return config;
}
json load_report(const std::filesystem::path& path) { return parse_text(read_file(path), path.string()); }

json normalize(const json& config, const RunOptions& opt) {
  if (!config.is_object()) throw invalid("config must be a JSON object");
  for (const auto& [key, value] : config.items())
    if (key != "experiment" && key != "system" && key != "params" && key != "seed" && key != "label")
      throw invalid("unknown config key '" + key + "'");
  if (!config.contains("experiment") || !config["experiment"].is_string())
    throw invalid("config needs a string 'experiment'");
  const auto exp = config["experiment"].get<std::string>();
  if (!kExperiments.count(exp)) throw invalid("unknown experiment '" + exp + "'");
  if (!config.contains("system")) throw invalid("config needs 'system'");

  json out;
  out["experiment"] = exp;
  if (config.contains("label")) {
    if (!config["label"].is_string()) throw invalid("'label' must be a string");
    out["label"] = config["label"];
  }
  out["system"] = resolve_system(config["system"]);
  std::uint64_t seed = 1;
  if (config.contains("seed")) {
    if (!config["seed"].is_number_unsigned()) throw invalid("'seed' must be a nonnegative integer");
    seed = config["seed"].get<std::uint64_t>();
  }
  if (opt.seed) seed = *opt.seed;
  out["seed"] = seed;
  const json given = config.contains("params") ? config["params"] : json::object();
  if (!given.is_object()) throw invalid("'params' must be an object");
  out["params"] = detail::experiment_params(exp, out["system"], given);
  return out;
}

std::string dump(const json& report) { return report.dump(2) + "\n"; }

std::string payload_digest(const json& report) {
  json p = report;
  p.erase("wall_time_ms");
  p.erase("payload_digest");
  return digest(p.dump());
}

Outcome run(const json& config, const RunOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  const json cfg = normalize(config, opt);

  detail::Context ctx;
  ctx.experiment = cfg["experiment"].get<std::string>();
  ctx.system = cfg["system"];
  ctx.params = cfg["params"];
  ctx.seed = cfg["seed"].get<std::uint64_t>();
  ctx.jobs = std::max(1, opt.jobs);
  ctx.cache_dir = opt.cache_dir ? opt.cache_dir : FactorCache::root_from_env();

  auto res = detail::run_experiment(ctx);

  Outcome out;
  json& r = out.report;
  r["schema"] = kSchema;
  r["artifact_version"] = kVersion;
  r["config"] = cfg;
  r["config_digest"] = digest(cfg.dump());
  r["seed"] = ctx.seed;
  r["status"] = res.not_stabilized ? "not_stabilized" : "ok";
  if (res.not_stabilized) {
    r["diagnostic"] = *res.not_stabilized;
    out.exit_code = kNotStabilized;
    out.diagnostic = *res.not_stabilized;
  }
  r["results"] = std::move(res.results);
  r["certificates"] = std::move(res.certificates);
  r["series"] = std::move(res.series);
  r["provenance"] = std::move(res.provenance);
  r["payload_digest"] = payload_digest(r);
  r["wall_time_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<std::string> validate_report(const json& r) {
  std::vector<std::string> errs;
  if (!r.is_object()) return {"report is not an object"};
  const std::vector<std::pair<const char*, json::value_t>> fields{
      {"schema", json::value_t::string},         {"artifact_version", json::value_t::string},
      {"config", json::value_t::object},         {"config_digest", json::value_t::string},
      {"seed", json::value_t::number_unsigned}, {"status", json::value_t::string},
      {"results", json::value_t::object},        {"certificates", json::value_t::object},
      {"series", json::value_t::object},         {"provenance", json::value_t::array},
      {"payload_digest", json::value_t::string}, {"wall_time_ms", json::value_t::number_integer},
  };
  for (const auto& [key, type] : fields) {
    if (!r.contains(key)) {
      errs.push_back(std::string("missing field '") + key + "'");
      continue;
    }
    const auto t = r[key].type();
    const bool ok = t == type || (type == json::value_t::number_integer && t == json::value_t::number_unsigned);
    expect(errs, ok, std::string("field '") + key + "' has type " + type_name(r[key]));
  }
  for (const auto& [key, value] : r.items()) {
    bool known = key == "diagnostic";
    for (const auto& f : fields) known = known || key == f.first;
    expect(errs, known, "unexpected field '" + key + "'");
  }
  if (!errs.empty()) return errs;
  expect(errs, r["schema"] == kSchema, "schema is not " + std::string(kSchema));
  expect(errs, r["status"] == "ok" || r["status"] == "not_stabilized", "status must be ok or not_stabilized");
  expect(errs, (r["status"] == "not_stabilized") == r.contains("diagnostic"),
         "a diagnostic accompanies exactly the not_stabilized status");
  const auto& c = r["config"];
  expect(errs, c.contains("experiment") && c.contains("system") && c.contains("params") && c.contains("seed"),
         "config lacks experiment, system, params or seed");
  if (c.contains("seed")) expect(errs, c["seed"] == r["seed"], "config seed differs from report seed");
  for (const auto& [name, s] : r["series"].items()) {
    if (!s.is_object() || !s.contains("columns") || !s.contains("rows") || !s["columns"].is_array() ||
        !s["rows"].is_array()) {
      errs.push_back("series '" + name + "' needs columns and rows arrays");
      continue;
    }
    for (const auto& col : s["columns"]) expect(errs, col.is_string(), "series '" + name + "' has a non-string column");
    for (const auto& row : s["rows"]) {
      const bool ok = row.is_array() && row.size() == s["columns"].size();
      expect(errs, ok, "series '" + name + "' has a row of the wrong width");
      if (!ok) break;
      for (const auto& v : row) expect(errs, v.is_number(), "series '" + name + "' has a non-numeric cell");
    }
  }
  for (const auto& p : r["provenance"]) expect(errs, p.is_string(), "provenance entries are strings");
  return errs;
}

std::string series_csv(const json& report, const std::string& series) {
  if (!report.is_object() || !report.contains("series") || !report["series"].contains(series)) {
    std::string known;
    if (report.is_object() && report.contains("series"))
      for (const auto& [name, s] : report["series"].items()) known += (known.empty() ? "" : ", ") + name;
    throw Error(ErrorKind::kUnknownSeries,
                "no series '" + series + "' in report" + (known.empty() ? "" : " (has: " + known + ")"));
  }
  const auto& s = report["series"][series];
  std::ostringstream out;
  for (std::size_t i = 0; i < s["columns"].size(); ++i)
    out << (i ? "," : "") << s["columns"][i].get<std::string>();
  out << "\n";
  for (const auto& row : s["rows"]) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i].dump();
    out << "\n";
  }
  return out.str();
}

Verification verify(const json& report, const RunOptions& opt) {
  Verification v;
  auto line = [&](bool ok, const std::string& what) {
    v.ok = v.ok && ok;
    v.lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  };
  const auto errs = validate_report(report);
  line(errs.empty(), "schema " + std::string(kSchema));
  for (const auto& e : errs) v.lines.push_back("     " + e);
  if (!errs.empty()) return v;

  line(report["payload_digest"] == payload_digest(report), "payload digest");
  line(report["config_digest"] == digest(report["config"].dump()), "config digest");

  RunOptions rerun = opt;
  rerun.seed = report["seed"].get<std::uint64_t>();
  try {
    const auto again = run(report["config"], rerun);
    line(again.report["payload_digest"] == report["payload_digest"], "rerun reproduces the payload");
  } catch (const Error& e) {
    line(false, std::string("rerun: ") + e.what());
  }
  const auto failures = detail::recheck(report);
  line(failures.empty(), "certificates re-checked");
  for (const auto& f : failures) v.lines.push_back("     " + f);
  return v;
}

}  // namespace tame::runner
