// One PASS/FAIL line per acceptance criterion. Reads the configs in
// tools/configs, runs each with --jobs 1 and --jobs 8, and checks the reports.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>

#include "tame/runner.hpp"

using namespace tame;
using namespace tame::runner;

namespace {

std::map<std::string, json> reports;       // jobs 1
std::map<std::string, std::string> again;  // payload digest under jobs 8

struct Check {
  bool ok = true;
  std::vector<std::string> notes;
  void operator()(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes.push_back(what);
    }
  }
};

const json& rep(const std::string& name) { return reports.at(name); }
const json& res(const std::string& name) { return rep(name)["results"]; }
const json& par(const std::string& name) { return rep(name)["config"]["params"]; }
bool ok_status(const std::string& name) { return rep(name)["status"] == "ok"; }

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "tools/configs";
  const std::vector<std::string> names{
      "limit-sturmian",         "fibers-sturmian",       "isolation",
      "rank-rotation",          "rank-sturmian",         "rank-sturmian-generic",
      "rank-free-group",        "independence-full-shift", "independence-sturmian",
      "independence-cantor",    "limit-cos",             "determine-rotation",
      "determine-helly",        "determine-staircases",  "counterexample-projective",
      "counterexample-circle",  "catalog-linear",        "catalog-affine",
      "fibers-semicocycle",     "rigidity-rotation",     "rigidity-sturmian",
      "fibers-cos",
  };
  int failed = 0;
  for (const auto& name : names) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const auto config = load_config(dir / (name + ".json"));
      RunOptions one, eight;
      eight.jobs = 8;
      reports[name] = run(config, one).report;
      again[name] = run(config, eight).report["payload_digest"].get<std::string>();
    } catch (const std::exception& e) {
      std::printf("config %s: %s\n", name.c_str(), e.what());
      ++failed;
      continue;
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
    std::printf("ran %-26s %6lld ms (jobs 1 and 8)\n", name.c_str(), static_cast<long long>(ms.count()));
  }
  if (failed) return 1;

  int fails = 0;
  auto guard = [&](int n, const std::string& title, const std::function<void(Check&)>& body) {
    Check c;
    try {
      body(c);
    } catch (const std::exception& e) {
      c(false, std::string("exception: ") + e.what());
    }
    std::printf("criterion %2d: %s  %s\n", n, c.ok ? "PASS" : "FAIL", title.c_str());
    for (const auto& note : c.notes) std::printf("              %s\n", note.c_str());
    fails += c.ok ? 0 : 1;
  };
  guard(1, "Sturmian limit maps reproduce p_gamma^+- exactly, classified one-sided", [](Check& c) {
    const auto& r = res("limit-sturmian");
    c(ok_status("limit-sturmian"), "status");
    c(par("limit-sturmian")["random_gammas"] == 20 && par("limit-sturmian")["gammas"].empty(), "20 gammas");
    c(r["count"] == 40, "both sides of every gamma");
    std::set<std::string> gammas;
    for (const auto& l : r["limits"]) {
      gammas.insert(l["gamma"].get<std::string>());
      c(l["sample_size"].get<std::size_t>() >= 500, "sample of 500 points");
      c(l["exact"] == true, "exact for " + l["gamma"].get<std::string>());
      c(l["classified"] == true && l["classification"].get<std::string>().rfind("one_sided", 0) == 0,
        "one_sided for " + l["gamma"].get<std::string>());
    }
    c(gammas.size() == 20, "20 distinct gammas, got " + std::to_string(gammas.size()));
  });

  guard(2, "split fibers: 2 over n alpha for |n| <= 50, 1 at 50 random points", [](Check& c) {
    const auto& r = res("fibers-sturmian");
    c(r["orbit"].size() == 101, "orbit range");
    for (const auto& o : r["orbit"]) c(o["fiber_size"] == 2, "fiber over " + o["n"].dump());
    c(r["random"].size() == 50, "50 random points");
    for (const auto& o : r["random"]) c(o["fiber_size"] == 1, "fiber over " + o["point"].get<std::string>());
  });

  guard(3, "Sorgenfrey isolation: all 100 in the product, not on one circle", [](Check& c) {
    const auto& r = res("isolation");
    c(r["members"] == 100, "100 members");
    c(r["product"]["isolated"] == 100 && r["product"]["all_isolated"] == true, "product isolates all");
    c(r["circle"]["all_isolated"] == false, "single circle reports non-isolation");
  });

  guard(4, "beta-rank: rotation 1, Sturmian p_gamma^- 2 (eps 0.1, 0.01, 10^4 grid), free group 2 at depth 16",
        [](Check& c) {
          auto ranks = [&](const std::string& name, std::size_t beta, const std::vector<double>& eps) {
            c(ok_status(name), name + " status");
            const auto& rr = res(name)["ranks"];
            c(rr.size() == eps.size(), name + " epsilons");
            for (std::size_t i = 0; i < rr.size() && i < eps.size(); ++i) {
              c(rr[i]["epsilon"] == eps[i], name + " eps");
              c(rr[i]["beta"] == beta, name + " beta at eps " + rr[i]["epsilon"].dump() + " is " + rr[i]["beta"].dump());
              c(rr[i]["resolutions"].size() == 3, name + " three resolutions");
              c(rr[i]["witnesses_verified"] == true, name + " witnesses");
            }
          };
          ranks("rank-rotation", 1, {0.1, 0.01});
          ranks("rank-sturmian", 2, {0.1, 0.01});
          ranks("rank-sturmian-generic", 2, {0.1, 0.01});
          ranks("rank-free-group", 2, {0.5, 0.1});
          c(par("rank-sturmian")["grid"] == 10000 && res("rank-sturmian")["sample_size"] >= 10000, "10^4 grid");
          c(rep("rank-free-group")["config"]["system"]["depth"] == 16, "depth 16");
        });

  guard(5, "independence: full shift L, Sturmian <= ceil(log2(L+1)), Cantor above Sturmian and nondecreasing",
        [](Check& c) {
          const auto& full = res("independence-full-shift")["windows"];
          const auto& st = res("independence-sturmian")["windows"];
          const auto& ca = res("independence-cantor")["windows"];
          const auto& cantor_sys = rep("independence-cantor")["config"]["system"];
          c(cantor_sys["window"]["generations"] == 6 && res("independence-cantor")["horizon"] == 100000,
            "Cantor generation 6, horizon 10^5");
          const std::vector<int> Ls{8, 12, 16, 20};
          c(full.size() == 4 && st.size() == 4 && ca.size() == 4, "four windows each");
          int prev = 0;
          for (std::size_t i = 0; i < Ls.size(); ++i) {
            const int L = Ls[i];
            const auto f = full[i]["independence"].get<int>(), s = st[i]["independence"].get<int>(),
                       k = ca[i]["independence"].get<int>();
            c(full[i]["L"] == L && st[i]["L"] == L && ca[i]["L"] == L, "window order");
            c(f == L, "full shift |I| = " + std::to_string(f) + " at L = " + std::to_string(L));
            c(s <= static_cast<int>(std::ceil(std::log2(L + 1.0))), "Sturmian bound at L = " + std::to_string(L));
            c(k > s, "Cantor " + std::to_string(k) + " vs Sturmian " + std::to_string(s) + " at L = " + std::to_string(L));
            c(k >= prev, "Cantor nondecreasing at L = " + std::to_string(L));
            prev = k;
            for (const auto* w : {&full[i], &st[i], &ca[i]}) {
              c((*w)["verified"] == true && (*w)["search_complete"] == true, "certificate at L = " + std::to_string(L));
              if (L <= 12) c(w->contains("exhaustive_agrees") && (*w)["exhaustive_agrees"] == true,
                             "branch and bound equals exhaustive search at L = " + std::to_string(L));
            }
          }
        });

  guard(6, "complexity p(L) = L+1 for the golden Sturmian coding, L <= 30, horizon 10^4", [](Check& c) {
    c(res("independence-sturmian")["horizon"] == 10000, "horizon");
    const auto& rows = rep("independence-sturmian")["series"]["complexity"]["rows"];
    c(rows.size() == 30, "30 lengths");
    for (const auto& row : rows) c(row[1].get<std::uint64_t>() == row[0].get<std::uint64_t>() + 1, "p(" + row[0].dump() + ")");
  });

  guard(7, "cos(1/x) fibre: branch gives 2, 21-point grid within 0.01, v_eps v_eta = v_eps, round trip", [](Check& c) {
    const auto& r = res("limit-cos");
    c(r["branch_epsilon"] == 2.0, "branch [1/2, 1)");
    c(r["fibre"].size() == 21, "21 grid points");
    for (const auto& f : r["fibre"])
      c(f["epsilon"].is_number() && std::abs(f["epsilon"].get<double>() - f["t"].get<double>()) <= 0.01,
        "t = " + f["t"].dump());
    c(r["idempotent_law"] == true && r["idempotent_pairs"] == 22 * 22, "idempotent law on all pairs");
    c(r["decompose_round_trip"] == true, "decompose_minimal round trip");
  });

  guard(8, "determining sets: rotation 1, Helly m or m-1 (exhaustive), staircases beat 1000 adversaries", [](Check& c) {
    for (const auto& m : res("determine-rotation")["members"]) c(m["size"] == 1, "rotation member " + m["member"].dump());
    int last = 0;
    for (const auto& f : res("determine-helly")["families"]) {
      const int m = f["m"].get<int>(), C = f["zero_map_C"].get<int>();
      c(m <= 20 && f["exhaustive"] == true, "exhaustive search for m = " + std::to_string(m));
      c(C == m || C == m - 1, "Helly |C| = " + std::to_string(C) + " for m = " + std::to_string(m));
      last = m;
    }
    c(last == 20, "m up to 20");
    const auto& st = res("determine-staircases")["staircases"];
    c(st.size() == 20, "20 staircases");
    for (const auto& s : st) c(s["adversaries"] == 1000 && s["agreeing_on_C"] == 1000 && s["escaped"] == 0, "staircase");
  });

  guard(9, "no-countable-basis witnesses: 100 random C up to size 50, both scenarios, re-evaluated", [](Check& c) {
    for (const auto* name : {"counterexample-projective", "counterexample-circle"}) {
      const auto& r = res(name);
      c(r["trials"] == 100 && r["succeeded"] == 100 && r["all_sound"] == true, name);
      c(par(name)["max_size"] == 50, std::string(name) + " sizes up to 50");
      for (const auto& w : rep(name)["certificates"]["witnesses"])
        c(w["agrees_on_C"] == true && w["differs"] == true && w["size"].get<int>() <= 50, name);
    }
  });

  guard(10, "partial linear maps: n I -> {0}, diag(1, n) -> x-axis, associativity, products, 3-point pinning",
        [](Check& c) {
          const auto& r = res("catalog-linear");
          c(r["scalar_domain_dimension"] == 0, "n I");
          c(r["diagonal_is_x_axis_identity"] == true, "diag(1, n)");
          c(r["associativity_triples"] == 50 && r["associativity_max_distance"].get<double>() < 1e-8, "associativity");
          c(r["product_max_discrepancy"].get<double>() < 1e-8, "limits of commuting products");
          const auto& a = res("catalog-affine");
          c(a["all_match_and_pinned"] == true && a["three_point_pinning"] == true, "affine catalog pinning");
        });

  guard(11, "semicocycle fibres: k for k <= 6 at depth 20, 1 at 50 random points", [](Check& c) {
    const auto& r = res("fibers-semicocycle");
    c(r["depth"] == 20, "depth");
    c(r["marked"] == json::array({1, 2, 3, 4, 5, 6}), "marked fibres " + r["marked"].dump());
    c(r["random"].size() == 50, "50 random points");
    for (const auto& p : r["random"]) c(p["fiber_size"] == 1, "random point");
  });

  guard(12, "rigidity: rotation below 1e-6 by k = 25, Sturmian stays at the split floor over n <= 10^4", [](Check& c) {
    const auto& r = res("rigidity-rotation");
    c(r["along_denominators"].size() == 25, "25 denominators");
    c(r["last"].get<double>() < 1e-6, "last sup distance " + r["last"].dump());
    const auto& s = res("rigidity-sturmian");
    c(s["N"] == 10000, "N = 10^4");
    c(s["minimum"].get<double>() >= s["floor"].get<double>(), "minimum " + s["minimum"].dump());
  });

  guard(13, "asymptotics: cos fibre pairs differ exactly at 0, Sturmian split pairs finitely in [-100, 100]",
        [](Check& c) {
          for (const auto& p : res("fibers-cos")["pairs"]) c(p["defect"] == json::array({0}), "cos pair " + p["pair"].dump());
          c(res("fibers-cos")["defect_window"] == 100, "cos window");
          c(res("fibers-sturmian")["defect_window"] == 100, "Sturmian window");
          for (const auto& o : res("fibers-sturmian")["orbit"])
            c(o["defect_finite"] == true && o["defect_size"].get<int>() < 201, "Sturmian pair over " + o["n"].dump());
        });

  guard(14, "determinism: payloads identical under --jobs 1 and --jobs 8", [](Check& c) {
    for (const auto& [name, r] : reports) c(r["payload_digest"] == again.at(name), name);
  });

  return fails == 0 ? 0 : 1;
}
