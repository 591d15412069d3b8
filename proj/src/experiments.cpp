#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <regex>
#include <set>

#include "tame/boundary.hpp"
#include "tame/envelope.hpp"
#include "tame/linear.hpp"
#include "tame/order.hpp"
#include "tame/parallel.hpp"
#include "tame/rank.hpp"
#include "tame/systems.hpp"
#include "tame/tameness.hpp"

namespace tame::runner::detail {

namespace {

using envelope::SplitRule;
using Q = order::Q;

Error invalid(const std::string& what) { return Error(ErrorKind::kInvalidArgument, what); }

// ------------------------------------------------------------------ parsing

Rational parse_rational(const std::string& text) {
  static const std::regex re(R"(^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw invalid("bad rational '" + text + "'");
  try {
    const Rational num(std::stoll(m[1].str()));
    const long long den = m[2].matched ? std::stoll(m[2].str()) : 1;
    if (den == 0) throw invalid("zero denominator in '" + text + "'");
    return num / Rational(den);
  } catch (const std::out_of_range&) {
    throw invalid("rational out of range '" + text + "'");
  }
}

// "3a+2/7", "-a", "a", "2/7", "0": a*alpha + b.
CirclePoint parse_point(const RotationNumber& alpha, const std::string& text) {
  static const std::regex re(R"(^\s*(?:([+-]?\d*)a)?\s*([+-]?\s*\d+(?:/\d+)?)?\s*$)");
  std::smatch m;
  if (text.empty() || !std::regex_match(text, m, re) || (!m[1].matched && !m[2].matched))
    throw invalid("bad circle point '" + text + "' (expected e.g. 3a+2/7)");
  std::int64_t a = 0;
  if (m[1].matched) {
    const auto s = m[1].str();
    a = s.empty() || s == "+" ? 1 : s == "-" ? -1 : std::stoll(s);
  }
  std::string b = m[2].matched ? m[2].str() : "0";
  b.erase(std::remove(b.begin(), b.end(), ' '), b.end());
  return CirclePoint(alpha, a, parse_rational(b));
}

SideTag parse_side(const std::string& s) {
  if (s == "minus") return SideTag::kMinus;
  if (s == "plus") return SideTag::kPlus;
  throw invalid("side must be minus or plus, got '" + s + "'");
}

std::string kind_of(const json& system) { return system["kind"].get<std::string>(); }

SplitCircleSystem make_split(const json& system) {
  const auto alpha = parse_alpha(system["alpha"].get<std::string>());
  const auto s = system["split_set"].get<std::string>();
  if (s == "orbit") return SplitCircleSystem::sturmian(alpha);
  if (s == "none") return SplitCircleSystem::rotation(alpha);
  return SplitCircleSystem(alpha, SplitSet::rationals());
}

bool nothing_split(const json& system) { return system["split_set"] == "none"; }

// ------------------------------------------------------------------ params

enum class T { kInt, kNum, kStr, kInts, kNums, kStrs };

struct ParamSpec {
  const char* key;
  T type;
  json def;
};

std::vector<ParamSpec> param_specs(const std::string& exp, const std::string& kind) {
  auto unsupported = [&] { return invalid("experiment '" + exp + "' does not apply to system kind '" + kind + "'"); };
  if (exp == "limit") {
    if (kind == "split-circle")
      return {{"gammas", T::kStrs, json::array()}, {"random_gammas", T::kInt, 20}, {"sides", T::kStr, "both"},
              {"sample_size", T::kInt, 500},       {"delta", T::kNum, 1e-3},      {"depth", T::kInt, 16},
              {"orbit_window", T::kInt, 5}};
    if (kind == "cos")
      return {{"grid_points", T::kInt, 21}, {"sample_points", T::kInt, 6}, {"delta", T::kNum, 0.05},
              {"tolerance", T::kNum, 0.01}};
    throw unsupported();
  }
  if (exp == "independence") {
    if (kind != "split-circle" && kind != "cut-project" && kind != "full-shift") throw unsupported();
    return {{"L", T::kInts, {8, 12, 16, 20}},
            {"horizon", T::kInt, kind == "split-circle" ? 10000 : 0},
            {"node_budget", T::kInt, 50'000'000},
            {"exhaustive_max_L", T::kInt, 12},
            {"complexity_max_L", T::kInt, 0}};
  }
  if (exp == "rank") {
    if (kind == "split-circle")
      return {{"element", T::kStr, "one-sided"}, {"gamma", T::kStr, "0"},      {"side", T::kStr, "minus"},
              {"m", T::kInt, 1},                  {"grid", T::kInt, 10000},     {"orbit_window", T::kInt, 20},
              {"K", T::kInt, 13},                 {"epsilons", T::kNums, {0.1, 0.01}},
              {"divisors", T::kNums, {8, 16, 32}}, {"max_stages", T::kInt, 16}};
    if (kind == "free-group")
      return {{"element", T::kStr, "power-limit"}, {"word", T::kStr, "ab"},         {"probe_length", T::kInt, 6},
              {"epsilons", T::kNums, {0.5, 0.1}},   {"divisors", T::kNums, {8, 16, 32}}, {"max_stages", T::kInt, 16}};
    throw unsupported();
  }
  if (exp == "fibers") {
    if (kind == "split-circle")
      return {{"orbit_range", T::kInt, 50}, {"random_points", T::kInt, 50}, {"defect_window", T::kInt, 100}};
    if (kind == "cos") return {{"grid_points", T::kInt, 11}, {"defect_window", T::kInt, 100}};
    if (kind == "semicocycle") return {{"k_max", T::kInt, 6}, {"random_points", T::kInt, 50}};
    throw unsupported();
  }
  if (exp == "determine") {
    if (kind == "split-circle") return {{"family_size", T::kInt, 6}, {"pool_size", T::kInt, 8}};
    if (kind == "helly") return {{"m_values", T::kInts, {2, 4, 8, 12, 16, 20}}};
    if (kind == "monotone")
      return {{"staircases", T::kInt, 20}, {"adversaries", T::kInt, 1000}, {"probe_level", T::kInt, 12},
              {"max_jumps", T::kInt, 8}};
    throw unsupported();
  }
  if (exp == "isolation") {
    if (kind != "split-circle") throw unsupported();
    return {{"members", T::kInt, 100}, {"gamma_source", T::kStr, "random"}, {"floor", T::kStr, "1/32"}};
  }
  if (exp == "counterexample") {
    if (kind != "partial-linear" && kind != "circle-order") throw unsupported();
    return {{"trials", T::kInt, 100}, {"max_size", T::kInt, 50}};
  }
  if (exp == "rigidity") {
    if (kind != "split-circle") throw unsupported();
    return {{"k_max", T::kInt, 25},       {"N", T::kInt, 1000}, {"threshold", T::kNum, 1e-6},
            {"sample_size", T::kInt, 200}, {"K", T::kInt, 10}};
  }
  if (exp == "catalog") {
    if (kind == "partial-linear")
      return {{"n", T::kInt, 2}, {"triples", T::kInt, 50}, {"commuting_pairs", T::kInt, 20},
              {"tolerance", T::kNum, 1e-8}};
    if (kind == "affine") return {{"grid_half_steps", T::kInt, 8}, {"sample_quarters", T::kInt, 20}};
    throw unsupported();
  }
  throw invalid("unknown experiment '" + exp + "'");
}

bool has_type(const json& v, T t) {
  auto all = [&](auto pred) { return v.is_array() && std::all_of(v.begin(), v.end(), pred); };
  switch (t) {
    case T::kInt: return v.is_number_integer();
    case T::kNum: return v.is_number();
    case T::kStr: return v.is_string();
    case T::kInts: return all([](const json& x) { return x.is_number_integer(); });
    case T::kNums: return all([](const json& x) { return x.is_number(); });
    case T::kStrs: return all([](const json& x) { return x.is_string(); });
  }
  return false;
}

const char* type_label(T t) {
  switch (t) {
    case T::kInt: return "an integer";
    case T::kNum: return "a number";
    case T::kStr: return "a string";
    case T::kInts: return "a list of integers";
    case T::kNums: return "a list of numbers";
    case T::kStrs: return "a list of strings";
  }
  return "";
}

void require(bool ok, const std::string& what) {
  if (!ok) throw invalid(what);
}

std::int64_t geti(const json& p, const char* k) { return p.at(k).get<std::int64_t>(); }
double getd(const json& p, const char* k) { return p.at(k).get<double>(); }
std::string gets(const json& p, const char* k) { return p.at(k).get<std::string>(); }

void in_range(const json& p, const char* k, std::int64_t lo, std::int64_t hi) {
  const auto v = geti(p, k);
  require(v >= lo && v <= hi, std::string("param '") + k + "' must lie in [" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + "], got " + std::to_string(v));
}

void positive(const json& p, const char* k) {
  require(getd(p, k) > 0, std::string("param '") + k + "' must be positive");
}

void check_values(const std::string& exp, const json& system, const json& p) {
  const auto kind = kind_of(system);
  if (exp == "limit" && kind == "split-circle") {
    for (const auto& g : p["gammas"]) parse_point(RotationNumber::golden(), g.get<std::string>());
    in_range(p, "random_gammas", 0, 10000);
    require(!p["gammas"].empty() || geti(p, "random_gammas") > 0, "no gammas to test");
    const auto s = gets(p, "sides");
    require(s == "below" || s == "above" || s == "both", "'sides' must be below, above or both");
    in_range(p, "sample_size", 2, 1'000'000);
    positive(p, "delta");
    in_range(p, "depth", 1, 40);
    in_range(p, "orbit_window", 0, 1000);
  }
  if (exp == "limit" && kind == "cos") {
    in_range(p, "grid_points", 2, 1000);
    in_range(p, "sample_points", 1, 1000);
    positive(p, "delta");
    positive(p, "tolerance");
  }
  if (exp == "independence") {
    require(!p["L"].empty(), "param 'L' is empty");
    for (const auto& L : p["L"])
      require(L.get<std::int64_t>() >= 1 && L.get<std::int64_t>() <= (kind == "full-shift" ? 24 : 40),
              "window lengths must lie in [1, " + std::string(kind == "full-shift" ? "24" : "40") + "]");
    in_range(p, "horizon", 0, 10'000'000);
    in_range(p, "node_budget", 1, std::int64_t{1} << 50);
    in_range(p, "exhaustive_max_L", 0, 16);
    in_range(p, "complexity_max_L", 0, 62);
    require(kind != "full-shift" || geti(p, "complexity_max_L") == 0, "the full shift has no coding word");
  }
  if (exp == "rank") {
    require(!p["epsilons"].empty(), "param 'epsilons' is empty");
    for (const auto& e : p["epsilons"]) require(e.get<double>() > 0, "epsilon must be positive");
    require(!p["divisors"].empty(), "param 'divisors' is empty");
    double prev = 0;
    for (const auto& d : p["divisors"]) {
      require(d.get<double>() > prev && d.get<double>() >= 1, "divisors must be increasing and at least 1");
      prev = d.get<double>();
    }
    in_range(p, "max_stages", 1, 1000);
    if (kind == "split-circle") {
      const auto e = gets(p, "element");
      require(e == "one-sided" || e == "translation", "'element' must be one-sided or translation");
      parse_point(RotationNumber::golden(), gets(p, "gamma"));
      parse_side(gets(p, "side"));
      in_range(p, "grid", 1, 1'000'000);
      in_range(p, "orbit_window", 0, 1000);
      in_range(p, "K", 1, 40);
    } else {
      const auto e = gets(p, "element");
      require(e == "power-limit" || e == "translation", "'element' must be power-limit or translation");
      const auto w = gets(p, "word");
      require(!w.empty() && w.find_first_not_of("abAB") == std::string::npos, "'word' is a word over a b A B");
      require(e != "power-limit" || !boundary::reduce(w).empty(), "power limits need a nontrivial word");
      in_range(p, "probe_length", 1, 8);
    }
  }
  if (exp == "fibers") {
    if (kind == "split-circle") {
      in_range(p, "orbit_range", 0, 10000);
      in_range(p, "random_points", 0, 100000);
      in_range(p, "defect_window", 1, 100000);
    } else if (kind == "cos") {
      in_range(p, "grid_points", 2, 1000);
      in_range(p, "defect_window", 1, 100000);
    } else {
      in_range(p, "k_max", 1, 30);
      in_range(p, "random_points", 0, 100000);
    }
  }
  if (exp == "determine") {
    if (kind == "split-circle") {
      require(nothing_split(system), "the rotation family needs a system with nothing split");
      in_range(p, "family_size", 1, 1000);
      in_range(p, "pool_size", 1, 1000);
    } else if (kind == "helly") {
      require(!p["m_values"].empty(), "param 'm_values' is empty");
      for (const auto& m : p["m_values"])
        require(m.get<std::int64_t>() >= 1 && m.get<std::int64_t>() <= 64, "m must lie in [1, 64]");
    } else {
      in_range(p, "staircases", 1, 10000);
      in_range(p, "adversaries", 1, 1'000'000);
      in_range(p, "probe_level", 1, 20);
      in_range(p, "max_jumps", 1, 100);
    }
  }
  if (exp == "isolation") {
    require(system["split_set"] == "orbit", "isolation needs the orbit split");
    in_range(p, "members", 1, 100000);
    const auto s = gets(p, "gamma_source");
    require(s == "orbit" || s == "random", "'gamma_source' must be orbit or random");
    require(parse_rational(gets(p, "floor")) > 0, "'floor' must be positive");
  }
  if (exp == "counterexample") {
    in_range(p, "trials", 1, 100000);
    in_range(p, "max_size", 1, 10000);
  }
  if (exp == "rigidity") {
    in_range(p, "k_max", 1, 40);
    in_range(p, "N", 1, 10'000'000);
    positive(p, "threshold");
    in_range(p, "sample_size", 2, 100000);
    in_range(p, "K", 1, 40);
  }
  if (exp == "catalog") {
    if (kind == "partial-linear") {
      in_range(p, "n", 2, 12);
      in_range(p, "triples", 0, 100000);
      in_range(p, "commuting_pairs", 0, 100000);
      positive(p, "tolerance");
    } else {
      in_range(p, "grid_half_steps", 1, 40);
      in_range(p, "sample_quarters", 1, 400);
    }
  }
}

// ------------------------------------------------------------------ helpers

std::vector<double> schedule(double eps, const json& divisors) {
  std::vector<double> s;
  for (const auto& d : divisors) s.push_back(eps / d.get<double>());
  return s;
}

CirclePoint random_gamma(const RotationNumber& alpha, std::mt19937_64& rng) {
  const std::int64_t a = static_cast<std::int64_t>(rng() % 41) - 20;
  const Rational b(static_cast<long long>(rng() % 997), 997);
  switch (rng() % 3) {
    case 0: return CirclePoint::orbit(alpha, a);
    case 1: return CirclePoint::rational(alpha, b);
    default: return CirclePoint(alpha, a, b);
  }
}

void orbit_extras(const SplitCircleSystem& sys, const CirclePoint& gamma, std::int64_t window,
                  std::vector<SplitPoint>& out) {
  for (std::int64_t k = -window; k <= window; ++k) {
    const auto y = CirclePoint::orbit(sys.alpha(), k) - gamma;
    out.push_back(sys.point(y, SideTag::kMinus));
    out.push_back(sys.point(y, SideTag::kPlus));
  }
}

json series(std::vector<std::string> columns, json rows) {
  return json{{"columns", std::move(columns)}, {"rows", std::move(rows)}};
}

// ------------------------------------------------------------------ limit

Result limit_split(const Context& ctx) {
  const auto sys = make_split(ctx.system);
  const auto& p = ctx.params;
  const auto& alpha = sys.alpha();
  std::mt19937_64 rng(ctx.seed);
  std::vector<CirclePoint> gammas;
  for (const auto& g : p["gammas"]) gammas.push_back(parse_point(alpha, g.get<std::string>()));
  const auto wanted = gammas.size() + static_cast<std::size_t>(geti(p, "random_gammas"));
  while (gammas.size() < wanted) {
    const auto g = random_gamma(alpha, rng);
    if (std::find(gammas.begin(), gammas.end(), g) == gammas.end()) gammas.push_back(g);
  }
  const auto sides = gets(p, "sides");
  std::vector<std::pair<CirclePoint, Side>> items;
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (sides == "below" || sides == "both") items.emplace_back(gammas[i], Side::kBelow);
    if (sides == "above" || sides == "both") items.emplace_back(gammas[i], Side::kAbove);
  }

  const auto depth = static_cast<std::size_t>(geti(p, "depth"));
  const auto size = static_cast<std::size_t>(geti(p, "sample_size"));
  const double delta = getd(p, "delta");
  const bool rotation = nothing_split(ctx.system);
  std::vector<json> rows(items.size());
  std::vector<std::string> gens(items.size());
  parallel_for(items.size(), ctx.jobs, [&](std::size_t i) {
    const auto& [gamma, side] = items[i];
    const auto side_tag = side == Side::kAbove ? SideTag::kPlus : SideTag::kMinus;
    json row{{"gamma", gamma.to_string()}, {"approach", std::string(to_string(side))}};
    try {
      const auto seq = one_sided_approach(gamma, side, depth);
      std::vector<SplitPoint> extra;
      orbit_extras(sys, gamma, geti(p, "orbit_window"), extra);
      const auto sample = envelope::split_sample(sys, size, extra);
      const auto gen = envelope::Generator::approach(seq);
      gens[i] = gamma.to_string() + " " + std::string(to_string(side)) + ": " + gen.describe();
      const auto lim = envelope::limit_map(sys, gen, sample, delta);
      const auto c = envelope::classify(sys, lim);
      const SplitRule expected{SplitRule::Kind::kOneSided, 0, gamma, side_tag};
      bool pointwise = lim.images.size() == sample.size();
      for (std::size_t j = 0; pointwise && j < sample.size(); ++j)
        pointwise = lim.images[j] == expected(sys, sample[j]);
      const auto want = rotation ? envelope::ElementClass::Tag::kRotation : envelope::ElementClass::Tag::kOneSided;
      const bool tag_ok = c.tag == want && c.gamma && *c.gamma == gamma && (rotation || c.side == side_tag);
      row["sample_size"] = sample.size();
      row["last_time"] = gen.times.back();
      row["stabilized"] = lim.stabilized;
      row["backend"] = std::string(envelope::to_string(lim.backend));
      row["backend_gap"] = lim.backend_gap;
      row["classification"] = c.to_string();
      row["exact"] = lim.stabilized && pointwise && lim.backend_gap <= delta;
      row["classified"] = tag_ok;
    } catch (const Error& e) {
      if (!e.is_non_stabilization()) throw;
      row["stabilized"] = false;
      row["exact"] = false;
      row["classified"] = false;
      row["diagnostic"] = e.what();
    }
    rows[i] = std::move(row);
  });

  Result r;
  bool all_exact = true, all_classified = true, all_stable = true;
  for (const auto& row : rows) {
    all_exact = all_exact && row["exact"].get<bool>();
    all_classified = all_classified && row["classified"].get<bool>();
    all_stable = all_stable && row["stabilized"].get<bool>();
  }
  r.results["limits"] = rows;
  r.results["count"] = rows.size();
  r.results["all_exact"] = all_exact;
  r.results["all_classified"] = all_classified;
  for (const auto& g : gens)
    if (!g.empty()) r.provenance.push_back(g);
  if (!all_stable) r.not_stabilized = "some limit maps did not stabilize";
  return r;
}

Result limit_cos(const Context& ctx) {
  const auto& p = ctx.params;
  const auto alpha = parse_alpha(ctx.system["alpha"].get<std::string>());
  const CosSystem sys(alpha);
  const double delta = getd(p, "delta"), tol = getd(p, "tolerance");
  std::vector<CosPoint> sample{sys.x0()};
  const auto sp = geti(p, "sample_points");
  for (std::int64_t j = 1; j <= sp; ++j) sample.push_back(sys.generic(CirclePoint::rational(alpha, Rational(j, sp + 1))));

  const auto n = static_cast<std::size_t>(geti(p, "grid_points"));
  std::vector<double> ts;
  for (std::size_t i = 0; i < n; ++i) ts.push_back(-1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1));
  // Element 0 approaches through [1/2, 1); the rest through the fibre values t.
  std::vector<std::optional<envelope::CosElement>> els(n + 1);
  std::vector<std::string> diag(n + 1);
  parallel_for(n + 1, ctx.jobs, [&](std::size_t i) {
    try {
      const auto gen = i == 0 ? envelope::Generator::approach(one_sided_approach(CirclePoint::zero(alpha), Side::kBelow, 16))
                              : envelope::cos_fiber_approach(alpha, ts[i - 1]);
      els[i] = envelope::cos_limit_map(sys, gen, sample, delta);
    } catch (const Error& e) {
      if (!e.is_non_stabilization()) throw;
      diag[i] = e.what();
    }
  });

  Result r;
  json fibre = json::array();
  bool grid_ok = true, all_stable = true;
  for (std::size_t i = 0; i <= n; ++i) {
    json row;
    if (i > 0) row["t"] = ts[i - 1];
    if (!els[i]) {
      all_stable = false;
      row["diagnostic"] = diag[i];
    } else {
      const auto& e = *els[i];
      row["epsilon"] = e.rule && e.rule->epsilon ? json(*e.rule->epsilon) : json(nullptr);
      row["backend_gap"] = e.backend_gap;
      r.provenance.push_back((i == 0 ? std::string("branch [1/2,1)") : "t=" + json(ts[i - 1]).dump()) + ": " +
                             e.generator.describe());
    }
    if (i == 0) {
      r.results["branch_epsilon"] = row.value("epsilon", json(nullptr));
      r.results["branch_is_2"] = row.contains("epsilon") && row["epsilon"] == 2.0;
      continue;
    }
    const bool hit = row.contains("epsilon") && row["epsilon"].is_number() &&
                     std::abs(row["epsilon"].get<double>() - ts[i - 1]) <= tol;
    row["within_tolerance"] = hit;
    grid_ok = grid_ok && hit;
    fibre.push_back(row);
  }
  r.results["fibre"] = fibre;
  r.results["grid_within_tolerance"] = grid_ok;

  // v_eps v_eta = v_eps on every sampled pair, and the minimal-ideal round trip.
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i <= n; ++i)
    if (els[i] && els[i]->rule && els[i]->rule->epsilon) live.push_back(i);
  std::vector<char> law(live.size() * live.size(), 0), trip(live.size(), 0);
  parallel_for(live.size(), ctx.jobs, [&](std::size_t a) {
    const auto& x = *els[live[a]];
    const auto d = envelope::decompose_minimal(sys, x);
    trip[a] = d.recomposes && d.epsilon && *d.epsilon == *x.rule->epsilon && d.gamma == CirclePoint::zero(alpha);
    for (std::size_t b = 0; b < live.size(); ++b) {
      const auto xy = envelope::cos_compose(sys, x, *els[live[b]]);
      law[a * live.size() + b] = xy.rule && xy.rule->epsilon && *xy.rule->epsilon == *x.rule->epsilon &&
                                 xy.rule->gamma && *xy.rule->gamma == CirclePoint::zero(alpha);
    }
  });
  r.results["idempotent_pairs"] = law.size();
  r.results["idempotent_law"] = std::all_of(law.begin(), law.end(), [](char c) { return c != 0; });
  r.results["round_trips"] = trip.size();
  r.results["decompose_round_trip"] = std::all_of(trip.begin(), trip.end(), [](char c) { return c != 0; });
  if (!all_stable) r.not_stabilized = "some cos limit maps did not stabilize";
  return r;
}

// ------------------------------------------------------------------ independence

std::vector<int> coding_word(const json& system, std::size_t horizon) {
  const auto kind = kind_of(system);
  const auto H = static_cast<std::int64_t>(horizon);
  if (kind == "split-circle") {
    const auto sys = make_split(system);
    return sys.coding_word({CirclePoint::zero(sys.alpha()), SideTag::kPlus}, 0, H - 1);
  }
  const auto alpha = parse_alpha(system["alpha"].get<std::string>());
  if (system.contains("window")) {
    const auto& w = system["window"];
    return CutProjectCoding::cantor(alpha, parse_rational(w["scale"].get<std::string>()), w["generations"].get<int>())
        .coding_word(0, H - 1);
  }
  std::vector<CutProjectCoding::HalfOpenArc> arcs;
  for (const auto& arc : system["partition"])
    arcs.push_back({parse_point(alpha, arc[0].get<std::string>()), parse_point(alpha, arc[1].get<std::string>())});
  return CutProjectCoding::intervals(alpha, arcs, CirclePoint::zero(alpha)).coding_word(0, H - 1);
}

std::size_t horizon_of(const Context& ctx) {
  const auto h = geti(ctx.params, "horizon");
  if (h > 0) return static_cast<std::size_t>(h);
  if (ctx.system.contains("horizon")) return ctx.system["horizon"].get<std::size_t>();
  return 100000;
}

bool independent(const std::vector<Factor>& factors, const std::vector<int>& positions) {
  std::vector<bool> seen(std::size_t{1} << positions.size(), false);
  for (Factor f : factors) {
    std::size_t pat = 0;
    for (std::size_t b = 0; b < positions.size(); ++b)
      if ((f >> positions[b]) & 1U) pat |= std::size_t{1} << b;
    seen[pat] = true;
  }
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

// Largest independent set by enumerating every subset of [0, L).
std::size_t exhaustive_independence(const std::vector<Factor>& factors, int L) {
  std::size_t best = 0;
  for (std::uint32_t s = 0; s < (1U << L); ++s) {
    const auto k = static_cast<std::size_t>(__builtin_popcount(s));
    if (k <= best || (std::size_t{1} << k) > factors.size()) continue;
    std::vector<int> pos;
    for (int i = 0; i < L; ++i)
      if ((s >> i) & 1U) pos.push_back(i);
    if (independent(factors, pos)) best = k;
  }
  return best;
}

constexpr std::size_t kMaxStoredWitnesses = 4096;

Result independence(const Context& ctx) {
  const auto& p = ctx.params;
  std::vector<int> Ls;
  for (const auto& L : p["L"]) Ls.push_back(L.get<int>());
  const int max_L = *std::max_element(Ls.begin(), Ls.end());
  const bool full = kind_of(ctx.system) == "full-shift";
  const auto H = horizon_of(ctx);
  const auto key = digest(ctx.system.dump());

  std::optional<FactorCache> cache;
  if (ctx.cache_dir && !full) cache.emplace(*ctx.cache_dir);
  std::vector<std::shared_ptr<const FactorSet>> sets(Ls.size());
  std::vector<int> word;
  bool need_word = geti(p, "complexity_max_L") > 0;
  if (full) {
    const auto fs = std::make_shared<const FactorSet>(FactorSet::full_shift(max_L));
    std::fill(sets.begin(), sets.end(), fs);
  } else {
    for (std::size_t i = 0; i < Ls.size() && cache; ++i)
      if (auto f = cache->load(key, Ls[i], H))
        sets[i] = std::make_shared<const FactorSet>(FactorSet::from_factors(Ls[i], std::move(*f), H));
    need_word = need_word || std::any_of(sets.begin(), sets.end(), [](const auto& s) { return !s; });
  }
  if (need_word) word = coding_word(ctx.system, H);
  if (!full && std::any_of(sets.begin(), sets.end(), [](const auto& s) { return !s; })) {
    const auto fs = std::make_shared<const FactorSet>(FactorSet::from_word(word, max_L));
    for (std::size_t i = 0; i < Ls.size(); ++i) {
      if (sets[i]) continue;
      sets[i] = fs;
      if (cache) cache->store(key, Ls[i], H, fs->factors(Ls[i]));
    }
  }

  IndependenceOptions opt;
  opt.node_budget = static_cast<std::uint64_t>(geti(p, "node_budget"));
  const int exhaustive_max = static_cast<int>(geti(p, "exhaustive_max_L"));
  std::vector<IndependenceCertificate> certs(Ls.size());
  std::vector<char> complete(Ls.size(), 1);
  std::vector<std::optional<std::size_t>> brute(Ls.size());
  parallel_for(Ls.size(), ctx.jobs, [&](std::size_t i) {
    try {
      certs[i] = max_independence(*sets[i], Ls[i], opt);
    } catch (const BudgetError& e) {
      certs[i] = e.best();
      complete[i] = 0;
    }
    if (Ls[i] <= exhaustive_max) brute[i] = exhaustive_independence(sets[i]->factors(Ls[i]), Ls[i]);
  });

  Result r;
  json rows = json::array(), srows = json::array(), certs_json = json::array();
  std::vector<GrowthPoint> growth;
  std::string exhausted;
  for (std::size_t i = 0; i < Ls.size(); ++i) {
    const int L = Ls[i];
    const auto& c = certs[i];
    const auto pL = sets[i]->count(L);
    json row{{"L", L},
             {"complexity", pL},
             {"independence", c.positions.size()},
             {"positions", c.positions},
             {"log_bound", static_cast<int>(std::ceil(std::log2(L + 1.0)))},
             {"search_complete", complete[i] != 0},
             {"nodes", c.nodes},
             {"verified", verify_certificate(c, *sets[i])}};
    if (brute[i]) row["exhaustive_agrees"] = *brute[i] == c.positions.size();
    rows.push_back(row);
    srows.push_back({L, pL, c.positions.size()});
    growth.push_back({L, pL, static_cast<int>(c.positions.size())});
    json cert{{"L", L}, {"positions", c.positions}, {"exhaustive", c.exhaustive}};
    if (c.witnesses.size() <= kMaxStoredWitnesses) {
      json w = json::array();
      for (Factor f : c.witnesses) w.push_back(factor_to_string(f, L));
      cert["witnesses"] = w;
    } else {
      cert["witnesses_omitted"] = c.witnesses.size();
    }
    certs_json.push_back(cert);
    if (!complete[i]) exhausted += (exhausted.empty() ? "" : ", ") + std::to_string(L);
  }
  r.results["windows"] = rows;
  r.results["growth"] = std::string(to_string(growth_report(growth)));
  r.results["horizon"] = full ? json(nullptr) : json(H);
  r.certificates["independence"] = certs_json;
  r.series["independence"] = series({"L", "complexity", "independence"}, srows);
  if (const auto cmax = geti(p, "complexity_max_L"); cmax > 0) {
    const auto prof = complexity(word, static_cast<int>(cmax));
    json crows = json::array();
    bool sturmian = true;
    for (std::size_t i = 0; i < prof.size(); ++i) {
      crows.push_back({i + 1, prof[i]});
      sturmian = sturmian && prof[i] == i + 2;
    }
    r.series["complexity"] = series({"L", "complexity"}, crows);
    r.results["complexity_is_L_plus_1"] = sturmian;
  }
  r.provenance.push_back(full ? std::string("full shift") : "coding word of length " + std::to_string(H) + " from n = 0");
  if (!exhausted.empty()) r.not_stabilized = "node budget exhausted at L = " + exhausted + "; best certificates kept";
  return r;
}

// ------------------------------------------------------------------ rank

std::vector<SplitPoint> grid_sample(const SplitCircleSystem& sys, const CirclePoint& gamma, std::size_t n,
                                    std::int64_t window) {
  std::vector<SplitPoint> pts;
  for (std::size_t j = 0; j < n; ++j)
    pts.push_back(sys.point(CirclePoint::rational(sys.alpha(), Rational(static_cast<long long>(j), static_cast<long long>(n)))));
  orbit_extras(sys, gamma, window, pts);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

Result rank_experiment(const Context& ctx) {
  const auto& p = ctx.params;
  rank::RankProblem prob;
  std::vector<std::string> names;
  std::string element;
  if (kind_of(ctx.system) == "split-circle") {
    const auto sys = make_split(ctx.system);
    const bool one_sided = gets(p, "element") == "one-sided";
    const auto gamma = one_sided ? parse_point(sys.alpha(), gets(p, "gamma")) : CirclePoint::zero(sys.alpha());
    const auto rule = one_sided ? SplitRule{SplitRule::Kind::kOneSided, 0, gamma, parse_side(gets(p, "side"))}
                                : SplitRule{SplitRule::Kind::kTranslation, geti(p, "m"), std::nullopt, SideTag::kPlain};
    element = one_sided ? "p_" + gamma.to_string() + "^" + gets(p, "side") : "T^" + std::to_string(geti(p, "m"));
    const auto sample = grid_sample(sys, gamma, static_cast<std::size_t>(geti(p, "grid")), geti(p, "orbit_window"));
    for (const auto& x : sample) names.push_back(x.to_string());
    prob = rank::split_problem(sys, rule, sample, static_cast<int>(geti(p, "K")));
  } else {
    const auto depth = static_cast<std::size_t>(ctx.system["depth"].get<int>());
    const auto word = gets(p, "word");
    auto sample = boundary::probe_points(static_cast<int>(geti(p, "probe_length")));
    std::function<boundary::BoundaryPoint(const boundary::BoundaryPoint&)> map;
    if (gets(p, "element") == "power-limit") {
      const auto lim = boundary::power_limit(word, depth);
      sample.push_back(lim.attracting);
      sample.push_back(lim.repulsing);
      map = boundary::LoxodromicMap{lim.attracting, lim.repulsing};
      element = "lim (" + word + ")^n: attracting " + lim.attracting.to_string() + ", repulsing " + lim.repulsing.to_string();
    } else {
      map = [word](const boundary::BoundaryPoint& w) { return boundary::act(word, w); };
      element = "translation by " + word;
    }
    for (const auto& x : sample) names.push_back(x.to_string());
    prob = rank::boundary_problem(map, sample, depth);
  }

  rank::RankOptions opt;
  opt.max_stages = static_cast<std::size_t>(geti(p, "max_stages"));
  std::vector<double> eps;
  for (const auto& e : p["epsilons"]) eps.push_back(e.get<double>());
  std::vector<rank::RankTrace> traces(eps.size());
  std::vector<char> checked(eps.size(), 1);
  parallel_for(eps.size(), ctx.jobs, [&](std::size_t i) {
    traces[i] = rank::rank_trace(prob, eps[i], schedule(eps[i], p["divisors"]), opt);
    for (const auto& res : traces[i].resolutions) checked[i] = checked[i] && rank::verify(prob, res, eps[i]);
  });

  auto describe = [&](std::size_t i) { return i < names.size() ? names[i] : "probe#" + std::to_string(i - names.size()); };
  Result r;
  json per_eps = json::array(), certs = json::array();
  std::string failed;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const auto& t = traces[i];
    json res_json = json::array();
    for (const auto& res : t.resolutions) {
      std::vector<std::size_t> sizes;
      for (const auto& s : res.stages) sizes.push_back(s.members.size());
      res_json.push_back({{"r", res.r},
                          {"beta", res.beta ? json(*res.beta) : json(nullptr)},
                          {"stationary", res.stationary},
                          {"stage_sizes", sizes}});
      json stages = json::array();
      for (std::size_t k = 1; k < res.stages.size(); ++k) {
        json members = json::array();
        // x enters A^k through the pair recorded when A^(k-1) was derived.
        const auto& s = res.stages[k];
        const auto& prev = res.stages[k - 1];
        for (std::size_t j = 0; j < s.members.size() && j < 64; ++j) {
          const auto at = static_cast<std::size_t>(
              std::lower_bound(prev.members.begin(), prev.members.end(), s.members[j]) - prev.members.begin());
          members.push_back({{"point", describe(s.members[j])},
                             {"oscillation", prev.osc[at]},
                             {"witness", {describe(prev.witnesses[at].first), describe(prev.witnesses[at].second)}}});
        }
        stages.push_back({{"stage", k}, {"size", s.members.size()}, {"members", members}});
      }
      certs.push_back({{"epsilon", eps[i]}, {"r", res.r}, {"stages", stages}});
    }
    per_eps.push_back({{"epsilon", eps[i]},
                       {"beta", t.beta ? json(*t.beta) : json(nullptr)},
                       {"stabilized", t.stabilized},
                       {"witnesses_verified", checked[i] != 0},
                       {"resolutions", res_json}});
    if (!t.stabilized) failed += (failed.empty() ? "" : ", ") + json(eps[i]).dump();
  }
  r.results["element"] = element;
  r.results["sample_size"] = prob.size;
  r.results["sample_id"] = prob.sample_id;
  r.results["ranks"] = per_eps;
  r.certificates["derivatives"] = certs;
  json rows = json::array();
  const auto& first = traces.front().resolutions.front();
  for (std::size_t k = 0; k < first.stages.size(); ++k) rows.push_back({k, first.stages[k].members.size()});
  r.series["rank"] = series({"stage", "set_size"}, rows);
  r.provenance.push_back("element " + element);
  if (!failed.empty()) r.not_stabilized = "rank did not stabilize at eps = " + failed;
  return r;
}

// ------------------------------------------------------------------ fibers

Result fibers_split(const Context& ctx) {
  const auto sys = make_split(ctx.system);
  const auto& alpha = sys.alpha();
  const auto& p = ctx.params;
  const auto N = geti(p, "orbit_range"), W = geti(p, "defect_window");
  const auto count = static_cast<std::size_t>(2 * N + 1);
  std::vector<std::size_t> sizes(count), defect(count, 0);
  std::vector<char> finite(count, 1);
  parallel_for(count, ctx.jobs, [&](std::size_t i) {
    const auto f = sys.fiber(CirclePoint::orbit(alpha, static_cast<std::int64_t>(i) - N));
    sizes[i] = f.size();
    if (f.size() == 2) {
      const auto d = asymptotic_defect(sys, f[0], f[1], -W, W);
      // Finitely supported: widening the window adds nothing.
      finite[i] = d.size() < static_cast<std::size_t>(2 * W + 1) && d == asymptotic_defect(sys, f[0], f[1], -2 * W, 2 * W);
      defect[i] = d.size();
    }
  });
  std::mt19937_64 rng(ctx.seed);
  json random = json::array();
  bool random_ok = true;
  for (std::int64_t t = 0; t < geti(p, "random_points"); ++t) {
    const std::int64_t a = static_cast<std::int64_t>(rng() % 41) - 20;
    const CirclePoint y(alpha, a, Rational(static_cast<long long>(1 + rng() % 996), 997));
    const auto s = sys.fiber(y).size();
    random_ok = random_ok && s == 1 && !y.in_orbit_of_zero();
    random.push_back({{"point", y.to_string()}, {"fiber_size", s}});
  }
  const std::size_t expected = nothing_split(ctx.system) ? 1 : 2;
  Result r;
  json orbit = json::array();
  for (std::size_t i = 0; i < count; ++i) {
    json row{{"n", static_cast<std::int64_t>(i) - N}, {"fiber_size", sizes[i]}};
    if (sizes[i] == 2) row["defect_size"] = defect[i], row["defect_finite"] = finite[i] != 0;
    orbit.push_back(row);
  }
  r.results["orbit"] = orbit;
  r.results["orbit_fibers_ok"] = std::all_of(sizes.begin(), sizes.end(), [&](std::size_t s) { return s == expected; });
  r.results["random"] = random;
  r.results["random_fibers_ok"] = random_ok;
  r.results["defects_finite"] = std::all_of(finite.begin(), finite.end(), [](char c) { return c != 0; });
  r.results["defect_window"] = W;
  return r;
}

Result fibers_cos(const Context& ctx) {
  const auto alpha = parse_alpha(ctx.system["alpha"].get<std::string>());
  const CosSystem sys(alpha);
  const auto n = static_cast<std::size_t>(geti(ctx.params, "grid_points"));
  const auto W = geti(ctx.params, "defect_window");
  std::vector<double> vals{2.0};
  for (std::size_t i = 0; i < n; ++i) vals.push_back(-1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < vals.size(); ++i)
    for (std::size_t j = i + 1; j < vals.size(); ++j) pairs.emplace_back(i, j);
  std::vector<std::vector<std::int64_t>> d(pairs.size());
  parallel_for(pairs.size(), ctx.jobs, [&](std::size_t k) {
    d[k] = asymptotic_defect(sys, sys.over_zero(vals[pairs[k].first]), sys.over_zero(vals[pairs[k].second]), -W, W);
  });
  Result r;
  bool all_zero = true;
  json rows = json::array();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    all_zero = all_zero && d[k] == std::vector<std::int64_t>{0};
    rows.push_back({{"pair", {vals[pairs[k].first], vals[pairs[k].second]}}, {"defect", d[k]}});
  }
  r.results["pairs"] = rows;
  r.results["defects_are_zero"] = all_zero;
  r.results["defect_window"] = W;
  return r;
}

Result fibers_semicocycle(const Context& ctx) {
  const int depth = ctx.system["depth"].get<int>();
  const auto k_max = static_cast<int>(geti(ctx.params, "k_max"));
  const auto marked = SemicocycleCascade::fibers(k_max, depth);
  std::mt19937_64 rng(ctx.seed);
  json random = json::array();
  bool random_ok = true;
  for (std::int64_t t = 0; t < geti(ctx.params, "random_points"); ++t) {
    const std::uint64_t y = rng();
    const auto c = SemicocycleCascade::fiber_cardinality(y, depth);
    random_ok = random_ok && c == 1;
    random.push_back({{"point", y}, {"fiber_size", c}});
  }
  bool marked_ok = true;
  for (std::size_t k = 0; k < marked.size(); ++k) marked_ok = marked_ok && marked[k] == k + 1;
  Result r;
  r.results["depth"] = depth;
  r.results["marked"] = marked;
  r.results["marked_equal_k"] = marked_ok;
  r.results["random"] = random;
  r.results["random_fibers_ok"] = random_ok;
  return r;
}

// ------------------------------------------------------------------ determine

Result determine_rotation(const Context& ctx) {
  const auto sys = make_split(ctx.system);
  const auto& alpha = sys.alpha();
  const auto pool_size = geti(ctx.params, "pool_size");
  std::vector<CirclePoint> pool;
  for (std::int64_t j = 0; j < pool_size; ++j) pool.push_back(CirclePoint::rational(alpha, Rational(j, pool_size)));
  std::vector<std::vector<std::string>> vals;
  for (std::int64_t g = 0; g < geti(ctx.params, "family_size"); ++g) {
    std::vector<std::string> row;
    for (const auto& x : pool) row.push_back((x + CirclePoint::orbit(alpha, g)).to_string());
    vals.push_back(row);
  }
  const auto labels = envelope::label_table(vals);
  std::vector<envelope::DeterminingSet> sets(labels.size());
  parallel_for(labels.size(), ctx.jobs, [&](std::size_t i) { sets[i] = envelope::determining_set(labels, i); });
  Result r;
  json rows = json::array();
  bool all_one = true;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    all_one = all_one && sets[i].C.size() == (sets.size() > 1 ? 1u : 0u);
    json C = json::array();
    for (auto c : sets[i].C) C.push_back(pool[c].to_string());
    rows.push_back({{"member", "T^" + std::to_string(i)}, {"C", C}, {"size", sets[i].C.size()}, {"exhaustive", sets[i].exhaustive}});
  }
  r.results["members"] = rows;
  r.results["all_size_one"] = all_one;
  return r;
}

Result determine_helly(const Context& ctx) {
  std::vector<int> ms;
  for (const auto& m : ctx.params["m_values"]) ms.push_back(m.get<int>());
  std::vector<envelope::DeterminingSet> zero(ms.size());
  std::vector<std::size_t> others(ms.size(), 0);
  parallel_for(ms.size(), ctx.jobs, [&](std::size_t i) {
    std::vector<Q> grid;
    for (int z = 1; z <= ms[i]; ++z) grid.push_back(Q(z, ms[i] + 1));
    const auto labels = envelope::label_table(order::helly_family_table(grid, grid));
    zero[i] = envelope::determining_set(labels, 0);
    for (std::size_t p = 1; p < labels.size(); ++p)
      others[i] = std::max(others[i], envelope::determining_set(labels, p).C.size());
  });
  Result r;
  json rows = json::array(), srows = json::array();
  bool linear = true;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const auto c = zero[i].C.size();
    const bool ok = c + 1 == static_cast<std::size_t>(ms[i]) || c == static_cast<std::size_t>(ms[i]);
    linear = linear && ok && zero[i].exhaustive;
    rows.push_back({{"m", ms[i]},
                    {"zero_map_C", c},
                    {"exhaustive", zero[i].exhaustive},
                    {"lower_bound", zero[i].lower_bound},
                    {"max_other_C", others[i]}});
    srows.push_back({ms[i], c});
  }
  r.results["families"] = rows;
  r.results["linear_growth"] = linear;
  r.series["determining"] = series({"m", "C_size"}, srows);
  r.provenance.push_back("family {0} u {f_z : z = j/(m+1)}, pool = the grid");
  return r;
}

Result determine_monotone(const Context& ctx) {
  const auto& p = ctx.params;
  const auto dom = order::OrderedDomain::interval(ctx.system["depth"].get<int>());
  const auto n = static_cast<std::size_t>(geti(p, "staircases"));
  const int level = static_cast<int>(geti(p, "probe_level"));
  const auto adversaries = static_cast<std::size_t>(geti(p, "adversaries"));
  std::mt19937_64 rng(ctx.seed);
  std::vector<std::vector<Q>> jumps(n);
  std::vector<std::uint64_t> seeds(n);
  for (std::size_t t = 0; t < n; ++t) {
    std::set<Q> js;
    const int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(geti(p, "max_jumps")));
    while (static_cast<int>(js.size()) < k) js.insert(Q(static_cast<long long>(1 + rng() % 996), 997));
    jumps[t].assign(js.begin(), js.end());
    seeds[t] = rng();
  }
  std::vector<order::DeterminationReport> reps(n);
  std::vector<std::size_t> csize(n);
  parallel_for(n, ctx.jobs, [&](std::size_t t) {
    const int k = static_cast<int>(jumps[t].size());
    std::vector<Q> pv;
    for (int i = 0; i < k; ++i) pv.push_back(Q(2 * i + 1, 2 * k));
    const auto f = order::MonotoneStepMap::staircase(jumps[t], pv);
    csize[t] = order::helly_determining_set(f, dom, level).size();
    std::mt19937_64 local(seeds[t]);
    reps[t] = order::check_determination(f, dom, level, adversaries, local);
  });
  Result r;
  json rows = json::array();
  bool all = true;
  for (std::size_t t = 0; t < n; ++t) {
    json js = json::array();
    for (const auto& q : jumps[t]) js.push_back(std::to_string(q.numerator()) + "/" + std::to_string(q.denominator()));
    const bool ok = reps[t].agreeing_on_C == reps[t].adversaries && reps[t].escaped == 0;
    all = all && ok;
    rows.push_back({{"jumps", js},
                    {"C_size", csize[t]},
                    {"adversaries", reps[t].adversaries},
                    {"agreeing_on_C", reps[t].agreeing_on_C},
                    {"escaped", reps[t].escaped},
                    {"defeated", ok}});
  }
  r.results["staircases"] = rows;
  r.results["all_defeated"] = all;
  return r;
}

// ------------------------------------------------------------------ isolation

Result isolation(const Context& ctx) {
  const auto sys = make_split(ctx.system);
  const auto& alpha = sys.alpha();
  const auto members = static_cast<std::size_t>(geti(ctx.params, "members"));
  std::vector<CirclePoint> gammas;
  if (gets(ctx.params, "gamma_source") == "orbit") {
    for (std::size_t i = 0; i < members; ++i) gammas.push_back(CirclePoint::orbit(alpha, static_cast<std::int64_t>(i)));
  } else {
    std::mt19937_64 rng(ctx.seed);
    while (gammas.size() < members) {
      const auto g = random_gamma(alpha, rng);
      if (std::find(gammas.begin(), gammas.end(), g) == gammas.end()) gammas.push_back(g);
    }
  }
  const auto floor = parse_rational(gets(ctx.params, "floor"));
  envelope::IsolationReport prod, circ;
  parallel_for(2, ctx.jobs, [&](std::size_t i) {
    if (i == 0) prod = envelope::sorgenfrey_isolation_product(gammas, floor);
    else circ = envelope::sorgenfrey_isolation_circle(gammas, floor);
  });
  auto summary = [&](const envelope::IsolationReport& rep) {
    std::size_t isolated = 0;
    json failures = json::array();
    for (std::size_t i = 0; i < rep.members.size(); ++i) {
      if (rep.members[i].isolated) ++isolated;
      else if (failures.size() < 16)
        failures.push_back({{"member", gammas[i].to_string()},
                            {"captured", rep.members[i].captured ? json(gammas[*rep.members[i].captured].to_string()) : json(nullptr)}});
    }
    return json{{"isolated", isolated}, {"all_isolated", rep.all_isolated}, {"first_failures", failures}};
  };
  Result r;
  r.results["members"] = gammas.size();
  r.results["product"] = summary(prod);
  r.results["circle"] = summary(circ);
  json g = json::array();
  for (const auto& x : gammas) g.push_back(x.to_string());
  r.certificates["gammas"] = g;
  return r;
}

// ------------------------------------------------------------------ counterexample

Result counterexample_projective(const Context& ctx) {
  const auto trials = static_cast<std::size_t>(geti(ctx.params, "trials"));
  const auto max_size = static_cast<std::uint64_t>(geti(ctx.params, "max_size"));
  std::mt19937_64 rng(ctx.seed);
  std::normal_distribution<double> g;
  std::vector<std::vector<linear::Vec>> Cs(trials);
  for (auto& C : Cs) {
    const auto size = 1 + rng() % max_size;
    for (std::uint64_t i = 0; i < size; ++i) {
      linear::Vec v(2);
      v << g(rng), g(rng);
      if (rng() % 10 == 0) v.setZero();
      C.push_back(v);
    }
  }
  std::vector<json> rows(trials);
  std::vector<char> ok(trials);
  parallel_for(trials, ctx.jobs, [&](std::size_t t) {
    const auto w = linear::projective_witness(Cs[t]);
    // Evaluate both maps: q agrees with p_inf on C and is finite on the direction.
    const auto pinf = linear::PartialLinearMap::p_infinity(2);
    bool agrees = true;
    for (const auto& c : Cs[t]) {
      const auto a = w.q(c), b = pinf(c);
      agrees = agrees && a.has_value() == b.has_value() && (!a || (*a - *b).norm() < 1e-9);
    }
    const bool differs = w.q(w.direction).has_value() && !pinf(w.direction).has_value();
    ok[t] = agrees && differs && w.agrees_on_C && w.differs;
    rows[t] = {{"size", Cs[t].size()}, {"direction", {w.direction(0), w.direction(1)}}, {"agrees_on_C", agrees}, {"differs", differs}};
  });
  Result r;
  r.results["scenario"] = "projective";
  r.results["trials"] = trials;
  r.results["succeeded"] = std::count(ok.begin(), ok.end(), 1);
  r.results["all_sound"] = std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
  r.certificates["witnesses"] = rows;
  return r;
}

Result counterexample_circle(const Context& ctx) {
  const auto trials = static_cast<std::size_t>(geti(ctx.params, "trials"));
  const auto max_size = static_cast<std::uint64_t>(geti(ctx.params, "max_size"));
  std::mt19937_64 rng(ctx.seed);
  std::vector<std::vector<Q>> Cs(trials);
  std::vector<Q> as(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto size = 1 + rng() % max_size;
    for (std::uint64_t i = 0; i < size; ++i)
      Cs[t].push_back(rng() % 2 ? Q(static_cast<long long>(rng() % 64), 64) : Q(static_cast<long long>(rng() % 1000), 1000));
    Q a(static_cast<long long>(rng() % 1000), 1000);
    while (std::find(Cs[t].begin(), Cs[t].end(), a) != Cs[t].end()) a = Q(static_cast<long long>(rng() % 1000), 1000);
    as[t] = a;
  }
  std::vector<json> rows(trials);
  std::vector<char> ok(trials);
  auto str = [](const Q& q) { return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator()); };
  parallel_for(trials, ctx.jobs, [&](std::size_t t) {
    const auto w = order::circular_counterexample(Cs[t], as[t]);
    // p_a sends everything to a; p_(a,b) fixes b and sends the rest to a.
    const auto pa = [&](const Q&) { return w.a; };
    const auto pab = [&](const Q& x) { return x == w.b ? w.b : w.a; };
    bool agrees = true;
    for (const auto& c : Cs[t]) agrees = agrees && pa(c) == pab(c);
    const bool differs = pa(w.b) != pab(w.b);
    ok[t] = agrees && differs && w.agrees_on_C && w.differs_at_b;
    rows[t] = {{"size", Cs[t].size()}, {"a", str(w.a)}, {"b", str(w.b)}, {"agrees_on_C", agrees}, {"differs", differs}};
  });
  Result r;
  r.results["scenario"] = "circle";
  r.results["trials"] = trials;
  r.results["succeeded"] = std::count(ok.begin(), ok.end(), 1);
  r.results["all_sound"] = std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
  r.certificates["witnesses"] = rows;
  return r;
}

// ------------------------------------------------------------------ rigidity

Result rigidity(const Context& ctx) {
  const auto sys = make_split(ctx.system);
  const auto& p = ctx.params;
  Result r;
  if (nothing_split(ctx.system)) {
    const auto rep = envelope::rotation_rigidity(sys.alpha(), static_cast<std::size_t>(geti(p, "k_max")), geti(p, "N"));
    json rows = json::array(), along = json::array();
    for (std::size_t k = 0; k < rep.along_denominators.size(); ++k) {
      const auto& pt = rep.along_denominators[k];
      rows.push_back({pt.n, pt.sup_distance});
      along.push_back({{"k", k + 1}, {"q", pt.n}, {"sup_distance", pt.sup_distance}});
    }
    const double last = rep.along_denominators.back().sup_distance;
    r.results["along_denominators"] = along;
    r.results["last"] = last;
    r.results["below_threshold"] = last < getd(p, "threshold");
    r.results["minimum"] = rep.minimum;
    r.results["argmin"] = rep.argmin;
    r.series["rigidity"] = series({"n", "sup_distance"}, rows);
  } else {
    const auto sample = envelope::split_sample(sys, static_cast<std::size_t>(geti(p, "sample_size")));
    const auto rep = envelope::split_rigidity(sys, geti(p, "N"), sample, static_cast<int>(geti(p, "K")));
    r.results["minimum"] = rep.minimum;
    r.results["argmin"] = rep.argmin;
    r.results["floor"] = rep.floor;
    r.results["above_floor"] = rep.minimum >= rep.floor;
    r.series["rigidity"] = series({"n", "sup_distance"}, json::array({json::array({rep.argmin, rep.minimum})}));
  }
  r.results["N"] = geti(p, "N");
  return r;
}

// ------------------------------------------------------------------ catalog

Result catalog_linear(const Context& ctx) {
  const auto& p = ctx.params;
  const int n = static_cast<int>(geti(p, "n"));
  const double tol = getd(p, "tolerance");
  Result r;
  const auto scalar = linear::matrix_limit(linear::MatrixSequenceSpec::scalar(n));
  r.results["scalar_domain_dimension"] = scalar.domain_dimension();
  const auto diag = linear::matrix_limit(linear::MatrixSequenceSpec::diagonal({0, 1}));
  linear::Vec e1 = linear::Vec::Zero(2), e2 = linear::Vec::Zero(2);
  e1(0) = 1, e2(1) = 1;
  const auto img = diag(e1);
  const bool x_axis = diag.domain_dimension() == 1 && img && (*img - e1).norm() < tol && !diag(e2);
  r.results["diagonal_domain_dimension"] = diag.domain_dimension();
  r.results["diagonal_is_x_axis_identity"] = x_axis;

  std::mt19937_64 rng(ctx.seed);
  const auto triples = static_cast<std::size_t>(geti(p, "triples"));
  double worst = 0;
  for (std::size_t t = 0; t < triples; ++t) {
    const int dim = 2 + static_cast<int>(rng() % 3);
    const auto a = linear::random_partial_map(dim, rng), b = linear::random_partial_map(dim, rng),
               c = linear::random_partial_map(dim, rng);
    worst = std::max(worst, linear::distance(linear::partial_compose(linear::partial_compose(a, b), c),
                                             linear::partial_compose(a, linear::partial_compose(b, c))));
  }
  r.results["associativity_triples"] = triples;
  r.results["associativity_max_distance"] = worst;
  r.results["associative"] = worst < tol;
  double prod = 0;
  const auto pairs = static_cast<std::size_t>(geti(p, "commuting_pairs"));
  for (std::size_t t = 0; t < pairs; ++t) {
    const auto [e, f] = linear::random_commuting_pair(3, rng);
    prod = std::max(prod, linear::diagonal_product_discrepancy(e, f));
  }
  r.results["commuting_pairs"] = pairs;
  r.results["product_max_discrepancy"] = prod;
  r.results["products_match"] = prod < tol;
  return r;
}

Result catalog_affine(const Context& ctx) {
  const auto half = geti(ctx.params, "grid_half_steps"), quarters = geti(ctx.params, "sample_quarters");
  std::vector<Rational> grid;
  for (std::int64_t k = -half; k <= half; ++k) grid.push_back(Rational(k, 2));
  std::vector<linear::ExtReal> samples{linear::ExtReal::neg_inf(), linear::ExtReal::pos_inf()};
  for (std::int64_t k = -quarters; k <= quarters; ++k) samples.push_back(linear::ExtReal::finite(Rational(k, 4)));
  const auto cands = linear::catalog_candidates(grid);
  std::vector<linear::CatalogLimit> lims(cands.size());
  parallel_for(cands.size(), ctx.jobs, [&](std::size_t i) { lims[i] = linear::affine_catalog_limit(cands[i], samples, cands); });
  Result r;
  json rows = json::array();
  bool all_rule = true, three = true;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const auto& l = lims[i];
    using K = linear::CatalogElement::Kind;
    const bool finite_kind = cands[i].kind == K::kCircle || cands[i].kind == K::kInner;
    all_rule = all_rule && l.matches_rule && l.pinned;
    if (finite_kind) three = three && l.pinning_points.size() == 3;
    json pins = json::array();
    for (const auto& x : l.pinning_points) pins.push_back(x.to_string());
    rows.push_back({{"element", cands[i].to_string()}, {"matches_rule", l.matches_rule}, {"pinned", l.pinned}, {"pinning_points", pins}});
  }
  r.results["candidates"] = cands.size();
  r.results["elements"] = rows;
  r.results["all_match_and_pinned"] = all_rule;
  r.results["three_point_pinning"] = three;
  return r;
}

}  // namespace

RotationNumber parse_alpha(const std::string& text) {
  if (text == "golden") return RotationNumber::golden();
  if (text == "silver") return RotationNumber::silver();
  return RotationNumber::parse(text);
}

json experiment_params(const std::string& experiment, const json& system, const json& given) {
  const auto specs = param_specs(experiment, kind_of(system));
  json out = json::object();
  for (const auto& [key, value] : given.items()) {
    const auto it = std::find_if(specs.begin(), specs.end(), [&](const ParamSpec& s) { return key == s.key; });
    if (it == specs.end()) throw invalid("experiment '" + experiment + "' has no param '" + key + "'");
    if (!has_type(value, it->type)) throw invalid("param '" + key + "' must be " + type_label(it->type));
  }
  for (const auto& s : specs) out[s.key] = given.contains(s.key) ? given[s.key] : s.def;
  check_values(experiment, system, out);
  return out;
}

Result run_experiment(const Context& ctx) {
  const auto& e = ctx.experiment;
  const auto kind = kind_of(ctx.system);
  if (e == "limit") return kind == "cos" ? limit_cos(ctx) : limit_split(ctx);
  if (e == "independence") return independence(ctx);
  if (e == "rank") return rank_experiment(ctx);
  if (e == "fibers") return kind == "cos" ? fibers_cos(ctx) : kind == "semicocycle" ? fibers_semicocycle(ctx) : fibers_split(ctx);
  if (e == "determine") return kind == "helly" ? determine_helly(ctx) : kind == "monotone" ? determine_monotone(ctx) : determine_rotation(ctx);
  if (e == "isolation") return isolation(ctx);
  if (e == "counterexample") return kind == "circle-order" ? counterexample_circle(ctx) : counterexample_projective(ctx);
  if (e == "rigidity") return rigidity(ctx);
  if (e == "catalog") return kind == "affine" ? catalog_affine(ctx) : catalog_linear(ctx);
  throw invalid("unknown experiment '" + e + "'");
}

std::vector<std::string> recheck(const json& report) {
  std::vector<std::string> out;
  const auto& cfg = report["config"];
  if (cfg["experiment"] != "independence") return out;
  const auto& system = cfg["system"];
  const bool full = kind_of(system) == "full-shift";
  Context ctx;
  ctx.system = system;
  ctx.params = cfg["params"];
  int max_L = 1;
  for (const auto& L : cfg["params"]["L"]) max_L = std::max(max_L, L.get<int>());
  const auto fs = full ? FactorSet::full_shift(max_L) : FactorSet::from_word(coding_word(system, horizon_of(ctx)), max_L);
  for (const auto& c : report["certificates"].value("independence", json::array())) {
    const int L = c["L"].get<int>();
    const auto positions = c["positions"].get<std::vector<int>>();
    if (!c.contains("witnesses")) continue;
    const auto& w = c["witnesses"];
    if (w.size() != (std::size_t{1} << positions.size())) {
      out.push_back("L = " + std::to_string(L) + ": wrong number of witnesses");
      continue;
    }
    for (std::size_t pat = 0; pat < w.size(); ++pat) {
      const auto s = w[pat].get<std::string>();
      Factor f = 0;
      for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i] == '1') f |= Factor{1} << i;
      bool ok = static_cast<int>(s.size()) == L && fs.contains(f, L);
      for (std::size_t j = 0; ok && j < positions.size(); ++j)
        ok = ((f >> positions[j]) & 1U) == ((pat >> j) & 1U);
      if (!ok) {
        out.push_back("L = " + std::to_string(L) + ": witness " + s + " fails for pattern " + std::to_string(pat));
        break;
      }
    }
  }
  return out;
}

}  // namespace tame::runner::detail
