#include "tame/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace tame::envelope {

std::string_view to_string(Backend b) { return b == Backend::kExact ? "exact" : "numeric"; }

Generator Generator::constant(std::int64_t m, std::size_t stages) {
  return {std::vector<std::int64_t>(stages, m), std::nullopt, std::nullopt};
}

Generator Generator::approach(const ApproachSequence& seq) { return {seq.times, seq.target, seq.side}; }

bool Generator::is_constant() const {
  if (times.empty()) return false;
  return std::all_of(times.begin(), times.end(), [&](std::int64_t t) { return t == times.front(); });
}

std::string Generator::describe() const {
  std::ostringstream out;
  if (is_constant()) {
    out << "constant " << times.front();
  } else if (target) {
    out << "approach " << target->to_string() << " from " << (side ? tame::to_string(*side) : "?") << " ("
        << times.size() << " terms)";
  } else {
    out << "times";
    for (auto t : times) out << ' ' << t;
  }
  return out.str();
}

std::string ElementClass::to_string() const {
  switch (tag) {
    case Tag::kTranslation: return "translation(" + std::to_string(n) + ")";
    case Tag::kParabolic: return "parabolic(" + target + ")";
    case Tag::kLoxodromic: return "loxodromic(" + target + ", " + repulsing + ")";
    case Tag::kOneSided:
      return "one_sided(" + gamma->to_string() + ", " + std::string(tame::to_string(side)) + ")";
    case Tag::kRotation: return "rotation(" + gamma->to_string() + ")";
    case Tag::kUnresolved: return "unresolved";
  }
  return "?";
}

// ---------------------------------------------------------------- split circle

SplitPoint SplitRule::operator()(const SplitCircleSystem& sys, const SplitPoint& x) const {
  if (kind == Kind::kTranslation) return sys.shift(x, m);
  return sys.point(x.base + *gamma, side);
}

int coding_radius(double delta) {
  if (!(delta > 0)) throw Error(ErrorKind::kInvalidArgument, "tolerance must be positive");
  int K = 0;
  while (std::ldexp(1.0, -K) > delta) ++K;
  return K;
}

namespace {

bool has_splits(const SplitCircleSystem& sys) {
  const auto& s = sys.split_set();
  return s.kind() != SplitSet::Kind::kExplicit || !s.points().empty();
}

// Coding metric for split systems; circle metric when nothing is split.
double sample_distance(const SplitCircleSystem& sys, const SplitPoint& x, const SplitPoint& y, int K) {
  if (!has_splits(sys)) return static_cast<double>(circle_distance(x.base, y.base));
  return coding_distance(sys, x, y, K);
}

}  // namespace

double coding_distance(const SplitCircleSystem& sys, const SplitPoint& x, const SplitPoint& y, int K) {
  if (x == y) return 0;
  for (int k = 0; k <= K; ++k) {
    for (int sgn : {1, -1}) {
      if (k == 0 && sgn < 0) continue;
      if (sys.symbol(sys.shift(x, sgn * k)) != sys.symbol(sys.shift(y, sgn * k))) return std::ldexp(1.0, -k);
    }
  }
  return 0;
}

std::vector<SplitPoint> split_sample(const SplitCircleSystem& sys, std::size_t size,
                                     const std::vector<SplitPoint>& extra) {
  std::vector<SplitPoint> pts;
  const auto& alpha = sys.alpha();
  std::size_t orbit_budget = size / 2;
  for (std::int64_t j = 0; pts.size() < orbit_budget; ++j) {
    for (std::int64_t k : {j, -j}) {
      if (j == 0 && !pts.empty()) continue;
      const auto y = CirclePoint::orbit(alpha, k);
      const auto lo = sys.point(y, SideTag::kMinus), hi = sys.point(y, SideTag::kPlus);
      pts.push_back(lo);
      if (!(hi == lo)) pts.push_back(hi);
    }
  }
  const std::size_t rest = size > pts.size() ? size - pts.size() : 0;
  for (std::size_t j = 1; j <= rest; ++j)
    pts.push_back(sys.point(CirclePoint::rational(alpha, Rational(static_cast<long long>(j),
                                                                   static_cast<long long>(rest + 1)))));
  pts.insert(pts.end(), extra.begin(), extra.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

SplitElement limit_map(const SplitCircleSystem& sys, const Generator& gen, const std::vector<SplitPoint>& sample,
                       double delta, std::size_t max_stages) {
  if (sample.empty()) throw Error(ErrorKind::kInvalidArgument, "empty sample");
  if (gen.times.empty()) throw Error(ErrorKind::kInvalidArgument, "generator has no times");
  const std::size_t S = gen.times.size();
  for (std::size_t i = S > max_stages ? S - max_stages + 1 : 1; i < S; ++i)
    if (gen.times[i] < gen.times[i - 1]) throw Error(ErrorKind::kInvalidArgument, "times must be monotone");
  SplitElement out;
  out.sample = sample;
  out.generator = gen;
  out.tolerance = delta;
  out.provenance.push_back("limit_map: " + gen.describe());
  if (gen.is_constant()) {
    out.rule = SplitRule{SplitRule::Kind::kTranslation, gen.times.front(), std::nullopt, SideTag::kPlain};
  } else if (gen.target && gen.side) {
    out.rule = SplitRule{SplitRule::Kind::kOneSided, 0, *gen.target,
                         *gen.side == Side::kBelow ? SideTag::kMinus : SideTag::kPlus};
  }
  const int K = coding_radius(delta);
  const std::int64_t n_last = gen.times[S - 1];
  const std::int64_t n_prev = gen.times[S >= 2 ? S - 2 : 0];
  double drift = 0;
  std::vector<SplitPoint> last;
  last.reserve(sample.size());
  for (const auto& x : sample) {
    last.push_back(sys.shift(x, n_last));
    drift = std::max(drift, sample_distance(sys, last.back(), sys.shift(x, n_prev), K));
  }
  if (out.rule) {
    out.backend = Backend::kExact;
    out.stabilized = true;
    for (std::size_t i = 0; i < sample.size(); ++i) {
      out.images.push_back((*out.rule)(sys, sample[i]));
      out.backend_gap = std::max(out.backend_gap, sample_distance(sys, last[i], out.images.back(), K));
    }
  } else {
    out.backend = Backend::kNumeric;
    if (drift > delta) {
      std::ostringstream msg;
      msg << "images moved by " << drift << " between the last two of " << S << " stages";
      throw Error(ErrorKind::kNotStabilized, msg.str());
    }
    out.stabilized = true;
    out.images = std::move(last);
  }
  return out;
}

ElementClass classify(const SplitCircleSystem& sys, const SplitElement& p) {
  ElementClass out;
  const auto n = p.sample.size();
  if (n == 0) return out;
  // Translation.
  const CirclePoint d0 = p.images[0].base - p.sample[0].base;
  if (d0 == CirclePoint::orbit(sys.alpha(), d0.alpha_coefficient())) {
    const std::int64_t m = d0.alpha_coefficient();
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) ok = p.images[i] == sys.shift(p.sample[i], m);
    if (ok) {
      out.tag = ElementClass::Tag::kTranslation;
      out.n = m;
      return out;
    }
  }
  // One-sided p_gamma^s, or a rotation when no image is split.
  {
    bool ok = true;
    std::optional<SideTag> side;
    for (std::size_t i = 0; i < n && ok; ++i) {
      ok = p.images[i].base == p.sample[i].base + d0;
      if (!ok) break;
      if (p.images[i].side == SideTag::kPlain) {
        ok = !sys.split_set().contains(p.images[i].base);
      } else if (!side) {
        side = p.images[i].side;
      } else {
        ok = *side == p.images[i].side;
      }
    }
    if (ok) {
      out.gamma = d0;
      if (side) {
        out.tag = ElementClass::Tag::kOneSided;
        out.side = *side;
      } else {
        out.tag = ElementClass::Tag::kRotation;
      }
      return out;
    }
  }
  out = classify_images(
      n, [&](std::size_t i, std::size_t j) { return p.images[i] == p.images[j]; },
      [&](std::size_t i) { return p.images[i] == p.sample[i]; },
      [&](std::size_t i) { return p.images[i].to_string(); });
  return out;
}

namespace {

std::optional<SplitRule> compose_rules(const SplitRule& p, const SplitRule& q) {
  using K = SplitRule::Kind;
  if (p.kind == K::kTranslation && q.kind == K::kTranslation)
    return SplitRule{K::kTranslation, p.m + q.m, std::nullopt, SideTag::kPlain};
  if (p.kind == K::kOneSided && q.kind == K::kTranslation)
    return SplitRule{K::kOneSided, 0, p.gamma->translate(q.m), p.side};
  if (p.kind == K::kTranslation && q.kind == K::kOneSided)
    return SplitRule{K::kOneSided, 0, q.gamma->translate(p.m), q.side};
  return SplitRule{K::kOneSided, 0, *p.gamma + *q.gamma, p.side};
}

}  // namespace

SplitElement compose(const SplitCircleSystem& sys, const SplitElement& p, const SplitElement& q) {
  SplitElement out;
  out.sample = q.sample;
  out.tolerance = std::max(p.tolerance, q.tolerance);
  out.stabilized = p.stabilized && q.stabilized;
  out.backend = (p.backend == Backend::kExact && q.backend == Backend::kExact) ? Backend::kExact : Backend::kNumeric;
  out.provenance = p.provenance;
  out.provenance.insert(out.provenance.end(), q.provenance.begin(), q.provenance.end());
  out.provenance.push_back("compose");
  for (const auto& y : q.images) {
    if (p.rule) {
      out.images.push_back((*p.rule)(sys, y));
      continue;
    }
    auto it = std::find(p.sample.begin(), p.sample.end(), y);
    if (it == p.sample.end())
      throw Error(ErrorKind::kSampleMismatch, "image " + y.to_string() + " lies outside the left factor's sample");
    out.images.push_back(p.images[static_cast<std::size_t>(it - p.sample.begin())]);
  }
  if (p.rule && q.rule) {
    out.rule = compose_rules(*p.rule, *q.rule);
    for (std::size_t i = 0; i < out.sample.size(); ++i)
      if (!((*out.rule)(sys, out.sample[i]) == out.images[i]))
        throw Error(ErrorKind::kInternal, "composed rule disagrees with pointwise composition");
  }
  return out;
}

// ------------------------------------------------------------------ cos(1/x)

CosPoint CosRule::operator()(const CosSystem& sys, const CosPoint& x) const {
  if (kind == Kind::kTranslation) return sys.shift(x, m);
  const CirclePoint base = x.base + *gamma;
  if (!base.in_orbit_of_zero()) return {base, std::nullopt};
  return {base, epsilon.value_or(0.0)};
}

double cos_distance(const CosSystem& sys, const CosPoint& x, const CosPoint& y, int K) {
  double d = 0;
  for (int k = -K; k <= K; ++k)
    d = std::max(d, std::ldexp(1.0, -std::abs(k)) * std::abs(sys.value(x, k) - sys.value(y, k)));
  return d;
}

namespace {

// The longest approach whose times still fit in 64 bits.
ApproachSequence deepest_approach(const CirclePoint& target, Side side) {
  for (std::size_t depth = 64; depth > 1; depth -= 4) {
    try {
      return one_sided_approach(target, side, depth);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kInvalidArgument) throw;
    }
  }
  return one_sided_approach(target, side, 1);
}

}  // namespace

Generator cos_fiber_approach(const RotationNumber& alpha, double t, std::size_t stages) {
  if (t < -1 || t > 1) throw Error(ErrorKind::kInvalidArgument, "fiber value must lie in [-1, 1]");
  Generator gen;
  gen.target = CirclePoint::zero(alpha);
  gen.side = Side::kAbove;
  const double phase = std::acos(t) / (2 * std::numbers::pi);
  std::int64_t prev = 0;
  for (std::size_t i = 0; i < stages; ++i) {
    const double k = 1000.0 * std::ldexp(1.0, 2 * static_cast<int>(i));
    const double theta = 1.0 / (k + phase);
    const Rational tol = Rational(1e-3 / (k * k));
    const auto seq = deepest_approach(CirclePoint::rational(alpha, Rational(theta)), Side::kAbove);
    std::optional<std::int64_t> pick;
    for (std::size_t j = 0; j < seq.times.size(); ++j) {
      if (seq.times[j] > prev && seq.error_bounds[j] < tol) {
        pick = seq.times[j];
        break;
      }
    }
    if (!pick) throw Error(ErrorKind::kDepthInsufficient, "approach to the fiber target ran out of terms");
    gen.times.push_back(*pick);
    prev = *pick;
  }
  return gen;
}

CosElement cos_limit_map(const CosSystem& sys, const Generator& gen, const std::vector<CosPoint>& sample,
                         double delta, int K) {
  if (sample.empty()) throw Error(ErrorKind::kInvalidArgument, "empty sample");
  if (gen.times.empty()) throw Error(ErrorKind::kInvalidArgument, "generator has no times");
  CosElement out;
  out.sample = sample;
  out.generator = gen;
  out.tolerance = delta;
  out.provenance.push_back("cos_limit_map: " + gen.describe());
  const std::size_t S = gen.times.size();
  const std::int64_t n_last = gen.times[S - 1], n_prev = gen.times[S >= 2 ? S - 2 : 0];
  double drift = 0;
  std::vector<CosPoint> last;
  for (const auto& x : sample) {
    last.push_back(sys.shift(x, n_last));
    drift = std::max(drift, cos_distance(sys, last.back(), sys.shift(x, n_prev), K));
  }
  if (drift > delta) {
    std::ostringstream msg;
    msg << "cos images moved by " << drift << " between the last two stages";
    throw Error(ErrorKind::kNotStabilized, msg.str());
  }
  out.stabilized = true;
  if (gen.is_constant()) {
    out.rule = CosRule{CosRule::Kind::kTranslation, gen.times.front(), std::nullopt, std::nullopt};
  } else {
    if (!gen.target) throw Error(ErrorKind::kInvalidArgument, "cos limits need an approach target");
    CosRule rule{CosRule::Kind::kIdeal, 0, std::nullopt, *gen.target};
    for (std::size_t i = 0; i < sample.size() && !rule.epsilon; ++i) {
      const auto k = sys.special_coordinate(sample[i].base + *gen.target);
      if (!k) continue;
      double eps = sys.value(last[i], *k);
      if (std::abs(eps - 2.0) <= delta) eps = 2.0;
      rule.epsilon = eps;
    }
    out.rule = rule;
  }
  for (std::size_t i = 0; i < sample.size(); ++i) {
    out.images.push_back((*out.rule)(sys, sample[i]));
    out.backend_gap = std::max(out.backend_gap, cos_distance(sys, last[i], out.images.back(), K));
  }
  return out;
}

CosElement cos_compose(const CosSystem& sys, const CosElement& p, const CosElement& q) {
  if (!p.rule || !q.rule) throw Error(ErrorKind::kSampleMismatch, "cos composition needs closed-form factors");
  using K = CosRule::Kind;
  CosElement out;
  out.sample = q.sample;
  out.tolerance = std::max(p.tolerance, q.tolerance);
  out.stabilized = p.stabilized && q.stabilized;
  out.provenance = p.provenance;
  out.provenance.insert(out.provenance.end(), q.provenance.begin(), q.provenance.end());
  out.provenance.push_back("compose");
  const auto& a = *p.rule;
  const auto& b = *q.rule;
  CosRule r;
  if (a.kind == K::kTranslation && b.kind == K::kTranslation) {
    r = {K::kTranslation, a.m + b.m, std::nullopt, std::nullopt};
  } else if (a.kind == K::kTranslation) {
    r = {K::kIdeal, 0, b.epsilon, b.gamma->translate(a.m)};
  } else if (b.kind == K::kTranslation) {
    r = {K::kIdeal, 0, a.epsilon, a.gamma->translate(b.m)};
  } else {
    r = {K::kIdeal, 0, a.epsilon ? a.epsilon : b.epsilon, *a.gamma + *b.gamma};
  }
  out.rule = r;
  for (std::size_t i = 0; i < out.sample.size(); ++i) {
    out.images.push_back(a(sys, q.images[i]));
    if (!(r(sys, out.sample[i]) == out.images[i]))
      throw Error(ErrorKind::kInternal, "composed cos rule disagrees with pointwise composition");
  }
  return out;
}

// ------------------------------------------------------------ minimal ideal

IdealDecomposition decompose_minimal(const SplitCircleSystem& sys, const SplitElement& p) {
  std::optional<SplitRule> rule = p.rule;
  if (!rule) {
    const auto c = classify(sys, p);
    if (c.tag == ElementClass::Tag::kTranslation)
      rule = SplitRule{SplitRule::Kind::kTranslation, c.n, std::nullopt, SideTag::kPlain};
    else if (c.tag == ElementClass::Tag::kOneSided)
      rule = SplitRule{SplitRule::Kind::kOneSided, 0, c.gamma, c.side};
    else
      throw Error(ErrorKind::kNotInIdeal, "element is not of the form p_gamma^s: " + c.to_string());
  }
  if (rule->kind == SplitRule::Kind::kTranslation)
    throw Error(ErrorKind::kNotInIdeal, "translations lie outside the minimal ideal");
  IdealDecomposition out{rule->side, std::nullopt, *rule->gamma, true};
  // v_s = p_0^s, g_gamma = p_gamma^+ (u = p_0^+).
  const SplitRule g{SplitRule::Kind::kOneSided, 0, *rule->gamma, SideTag::kPlus};
  const SplitRule v{SplitRule::Kind::kOneSided, 0, CirclePoint::zero(sys.alpha()), rule->side};
  for (std::size_t i = 0; i < p.sample.size(); ++i)
    if (!(v(sys, g(sys, p.sample[i])) == p.images[i])) out.recomposes = false;
  return out;
}

IdealDecomposition decompose_minimal(const CosSystem& sys, const CosElement& p) {
  if (!p.rule) throw Error(ErrorKind::kNotInIdeal, "element has no closed form");
  if (p.rule->kind == CosRule::Kind::kTranslation)
    throw Error(ErrorKind::kNotInIdeal, "translations lie outside the minimal ideal");
  IdealDecomposition out{std::nullopt, p.rule->epsilon, *p.rule->gamma, true};
  // g_gamma = v_2 g_gamma for the idempotent u = v_2; then v_eps g_gamma.
  const CosRule g{CosRule::Kind::kIdeal, 0, 2.0, *p.rule->gamma};
  const CosRule v{CosRule::Kind::kIdeal, 0, p.rule->epsilon, CirclePoint::zero(sys.alpha())};
  for (std::size_t i = 0; i < p.sample.size(); ++i) {
    const CosPoint r = v(sys, g(sys, p.sample[i]));
    if (!(r.base == p.images[i].base) || r.special.has_value() != p.images[i].special.has_value() ||
        (r.special && std::abs(*r.special - *p.images[i].special) > p.tolerance))
      out.recomposes = false;
  }
  return out;
}

// ------------------------------------------------------------- projective line

ProjPoint ProjPoint::from(double x, double y) {
  const double r = std::hypot(x, y);
  if (r == 0) throw Error(ErrorKind::kInvalidArgument, "zero vector has no direction");
  x /= r;
  y /= r;
  if (x < 0 || (x == 0 && y < 0)) x = -x, y = -y;
  return {x, y};
}

ProjPoint ProjPoint::angle(double theta) { return from(std::cos(theta), std::sin(theta)); }

double proj_distance(const ProjPoint& a, const ProjPoint& b) { return std::abs(a.x * b.y - a.y * b.x); }

ProjElement projective_limit(const linear::MatrixSequenceSpec& spec, const std::vector<ProjPoint>& sample,
                             double delta, int stages) {
  if (spec.n != 2) throw Error(ErrorKind::kInvalidArgument, "projective limits act on the plane");
  if (stages < 2) throw Error(ErrorKind::kInvalidArgument, "need at least two stages");
  const linear::Mat last = spec.stage(stages - 1, stages), prev = spec.stage(stages - 2, stages);
  ProjElement out{sample, {}, delta, true};
  for (const auto& p : sample) {
    linear::Vec v(2);
    v << p.x, p.y;
    const linear::Vec a = last * v, b = prev * v;
    const auto ia = ProjPoint::from(a(0), a(1)), ib = ProjPoint::from(b(0), b(1));
    if (proj_distance(ia, ib) > delta) {
      std::ostringstream msg;
      msg << "direction (" << p.x << ", " << p.y << ") still moving by " << proj_distance(ia, ib);
      throw Error(ErrorKind::kNotStabilized, msg.str());
    }
    out.images.push_back(ia);
  }
  return out;
}

ElementClass classify(const ProjElement& p) {
  auto describe = [&](std::size_t i) {
    std::ostringstream out;
    out.precision(6);
    out << "[" << p.images[i].x << " : " << p.images[i].y << "]";
    return out.str();
  };
  return classify_images(
      p.sample.size(), [&](std::size_t i, std::size_t j) { return proj_distance(p.images[i], p.images[j]) <= p.tolerance; },
      [&](std::size_t i) { return proj_distance(p.images[i], p.sample[i]) <= p.tolerance; }, describe);
}

// --------------------------------------------------------- determining sets

DeterminingSet determining_set(const std::vector<std::vector<int>>& labels, std::size_t p) {
  if (p >= labels.size()) throw Error(ErrorKind::kInvalidArgument, "element index out of range");
  const std::size_t pool = labels[p].size();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].size() != pool) throw Error(ErrorKind::kInvalidArgument, "ragged label table");
    for (std::size_t j = i + 1; j < labels.size(); ++j)
      if (labels[i] == labels[j])
        throw Error(ErrorKind::kInvalidArgument, "family members " + std::to_string(i) + " and " +
                                                     std::to_string(j) + " agree on the whole pool");
  }
  std::vector<std::size_t> others;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (i != p) others.push_back(i);
  DeterminingSet out;
  if (others.empty()) return out;
  // cover[j][o]: pool point j separates member others[o] from p.
  std::vector<std::vector<bool>> cover(pool, std::vector<bool>(others.size()));
  std::size_t max_cover = 0;
  for (std::size_t j = 0; j < pool; ++j) {
    std::size_t c = 0;
    for (std::size_t o = 0; o < others.size(); ++o) {
      cover[j][o] = labels[others[o]][j] != labels[p][j];
      c += cover[j][o];
    }
    max_cover = std::max(max_cover, c);
  }
  auto covers = [&](const std::vector<std::size_t>& C) {
    for (std::size_t o = 0; o < others.size(); ++o) {
      bool hit = false;
      for (auto j : C) hit = hit || cover[j][o];
      if (!hit) return false;
    }
    return true;
  };
  if (pool <= 20) {
    for (std::size_t size = 1; size <= pool; ++size) {
      std::vector<std::size_t> C(size);
      for (std::size_t i = 0; i < size; ++i) C[i] = i;
      for (;;) {
        if (covers(C)) {
          out.C = C;
          out.exhaustive = true;
          out.lower_bound = size;
          return out;
        }
        // Next combination in lexicographic order.
        std::size_t i = size;
        while (i > 0 && C[i - 1] == pool - size + i - 1) --i;
        if (i == 0) break;
        ++C[i - 1];
        for (std::size_t k = i; k < size; ++k) C[k] = C[k - 1] + 1;
      }
    }
    throw Error(ErrorKind::kInternal, "no determining subset of a separating pool");
  }
  std::vector<bool> done(others.size(), false);
  std::size_t remaining = others.size();
  while (remaining > 0) {
    std::size_t best = 0, best_gain = 0;
    for (std::size_t j = 0; j < pool; ++j) {
      std::size_t gain = 0;
      for (std::size_t o = 0; o < others.size(); ++o) gain += cover[j][o] && !done[o];
      if (gain > best_gain) best = j, best_gain = gain;
    }
    out.C.push_back(best);
    for (std::size_t o = 0; o < others.size(); ++o)
      if (cover[best][o] && !done[o]) done[o] = true, --remaining;
  }
  std::sort(out.C.begin(), out.C.end());
  out.exhaustive = false;
  out.lower_bound = (others.size() + max_cover - 1) / max_cover;
  return out;
}

// -------------------------------------------------- no countable basis

BasisWitness no_countable_basis_witness(const std::vector<linear::Vec>& C) {
  const auto w = linear::projective_witness(C, 2);
  std::ostringstream out;
  out << "q_L with L spanned by (" << w.direction(0) << ", " << w.direction(1) << ")";
  return {BasisWitness::Scenario::kProjective, out.str(), w.agrees_on_C, w.differs};
}

BasisWitness no_countable_basis_witness(const std::vector<order::Q>& C, const order::Q& a) {
  const auto w = order::circular_counterexample(C, a);
  std::ostringstream out;
  out << "p_(a,b) with a = " << w.a << ", b = " << w.b;
  return {BasisWitness::Scenario::kCircle, out.str(), w.agrees_on_C, w.differs_at_b};
}

// ------------------------------------------------------------- isolation

namespace {

// (y - x) mod 1 < e.
bool within(const CirclePoint& x, const CirclePoint& y, const Rational& e) {
  return compare(y - x, CirclePoint::rational(x.alpha(), e)) == Ordering::kLess;
}

template <class Captures>
IsolationReport isolate(std::size_t n, const Rational& floor, Captures captures) {
  IsolationReport rep;
  rep.all_isolated = true;
  for (std::size_t i = 0; i < n; ++i) {
    Isolation iso;
    for (Rational e(1, 2); e >= floor; e /= 2) {
      iso.epsilon = e;
      iso.captured.reset();
      for (std::size_t j = 0; j < n && !iso.captured; ++j)
        if (j != i && captures(i, j, e)) iso.captured = j;
      if (!iso.captured) {
        iso.isolated = true;
        break;
      }
    }
    rep.all_isolated = rep.all_isolated && iso.isolated;
    rep.members.push_back(iso);
  }
  return rep;
}

}  // namespace

IsolationReport sorgenfrey_isolation_product(const std::vector<CirclePoint>& gammas, const Rational& floor) {
  return isolate(gammas.size(), floor, [&](std::size_t i, std::size_t j, const Rational& e) {
    return within(gammas[i], gammas[j], e) && within(-gammas[i], -gammas[j], e);
  });
}

IsolationReport sorgenfrey_isolation_circle(const std::vector<CirclePoint>& gammas, const Rational& floor) {
  return isolate(gammas.size(), floor,
                 [&](std::size_t i, std::size_t j, const Rational& e) { return within(gammas[i], gammas[j], e); });
}

// ------------------------------------------------------------- rigidity

RigidityReport rotation_rigidity(const RotationNumber& alpha, std::size_t k_max, std::int64_t N) {
  if (N < 1) throw Error(ErrorKind::kInvalidArgument, "rigidity horizon must be at least 1");
  RigidityReport rep;
  const auto zero = CirclePoint::zero(alpha);
  for (std::size_t k = 1; k <= k_max; ++k) {
    const BigInt q = alpha.convergent(k).q;
    if (q > BigInt(std::numeric_limits<std::int64_t>::max())) break;
    const auto n = static_cast<std::int64_t>(q);
    const double sup = static_cast<double>(circle_distance_bound(CirclePoint::orbit(alpha, n), zero));
    rep.along_denominators.push_back({n, sup});
  }
  rep.minimum = 1;
  for (std::int64_t n = 1; n <= N; ++n) {
    const double d = static_cast<double>(circle_distance(CirclePoint::orbit(alpha, n), zero));
    if (d < rep.minimum) rep.minimum = d, rep.argmin = n;
  }
  return rep;
}

RigidityReport split_rigidity(const SplitCircleSystem& sys, std::int64_t N, const std::vector<SplitPoint>& sample,
                              int K) {
  if (N < 1) throw Error(ErrorKind::kInvalidArgument, "rigidity horizon must be at least 1");
  RigidityReport rep;
  const auto zero = CirclePoint::zero(sys.alpha());
  rep.floor = coding_distance(sys, sys.point(zero, SideTag::kMinus), sys.point(zero, SideTag::kPlus), K);
  rep.minimum = std::numeric_limits<double>::infinity();
  for (std::int64_t n = 1; n <= N; ++n) {
    double sup = 0;
    for (const auto& x : sample) {
      sup = std::max(sup, coding_distance(sys, sys.shift(x, n), x, K));
      if (sup >= 1) break;
    }
    if (sup < rep.minimum) rep.minimum = sup, rep.argmin = n;
  }
  return rep;
}

}  // namespace tame::envelope
