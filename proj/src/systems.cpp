#include "tame/systems.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace tame {

std::string_view to_string(SideTag tag) {
  switch (tag) {
    case SideTag::kMinus: return "-";
    case SideTag::kPlain: return "";
    case SideTag::kPlus: return "+";
  }
  return "?";
}

std::string SplitPoint::to_string() const {
  return "(" + base.to_string() + ")" + std::string(tame::to_string(side));
}

Ordering compare(const SplitPoint& x, const SplitPoint& y) {
  Ordering o = compare(x.base, y.base);
  if (o != Ordering::kEqual) return o;
  auto rank = [](SideTag t) { return static_cast<int>(t); };
  if (rank(x.side) < rank(y.side)) return Ordering::kLess;
  if (rank(x.side) > rank(y.side)) return Ordering::kGreater;
  return Ordering::kEqual;
}

bool SplitSet::contains(const CirclePoint& y) const {
  switch (kind_) {
    case Kind::kOrbit: return y.in_orbit_of_zero();
    case Kind::kRationals: return y.is_rational();
    case Kind::kExplicit:
      return std::find(points_.begin(), points_.end(), y) != points_.end();
  }
  return false;
}

namespace {

CodingArc default_arc(const RotationNumber& alpha) {
  return {{CirclePoint::zero(alpha), SideTag::kPlus}, {CirclePoint::orbit(alpha, 1), SideTag::kMinus}, false};
}

bool le(const SplitPoint& x, const SplitPoint& y) { return compare(x, y) != Ordering::kGreater; }

}  // namespace

SplitCircleSystem::SplitCircleSystem(RotationNumber alpha, SplitSet split_set)
    : SplitCircleSystem(alpha, std::move(split_set), default_arc(alpha)) {}

SplitCircleSystem::SplitCircleSystem(RotationNumber alpha, SplitSet split_set, CodingArc arc)
    : alpha_(std::move(alpha)), split_set_(std::move(split_set)), arc_(std::move(arc)) {}

std::vector<SplitPoint> SplitCircleSystem::fiber(const CirclePoint& y) const {
  if (split_set_.contains(y)) return {{y, SideTag::kMinus}, {y, SideTag::kPlus}};
  return {{y, SideTag::kPlain}};
}

SplitPoint SplitCircleSystem::point(const CirclePoint& y, SideTag side) const {
  if (!split_set_.contains(y)) return {y, SideTag::kPlain};
  return {y, side == SideTag::kPlain ? SideTag::kPlus : side};
}

SplitPoint SplitCircleSystem::shift(const SplitPoint& x, std::int64_t n) const {
  if (n == 0) return x;
  return point(x.base.translate(n), x.side);
}

int SplitCircleSystem::symbol(const SplitPoint& x) const {
  if (arc_.full) return 1;
  if (x.side == SideTag::kPlain) {
    for (const SplitPoint* end : {&arc_.lo, &arc_.hi}) {
      if (end->side != SideTag::kPlain && end->base == x.base)
        throw Error(ErrorKind::kBoundaryUndecidable,
                    "plain point " + x.to_string() + " sits on a sided arc endpoint");
    }
  }
  if (le(arc_.lo, arc_.hi)) return le(arc_.lo, x) && le(x, arc_.hi) ? 1 : 0;
  return le(arc_.lo, x) || le(x, arc_.hi) ? 1 : 0;
}

std::vector<int> SplitCircleSystem::coding_word(const SplitPoint& start, std::int64_t from,
                                                std::int64_t to) const {
  if (to < from) throw Error(ErrorKind::kInvalidArgument, "empty coding window");
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(to - from + 1));
  // Floating point decides symbols of orbit points well away from the arc
  // ends; the rest go through exact comparison.
  constexpr std::int64_t kFastRange = 1'000'000;
  const bool fast = !arc_.full && !(arc_.lo.base == arc_.hi.base) && from >= -kFastRange && to <= kFastRange;
  const long double a = alpha_.approx(), x0 = start.base.approx();
  const long double lo = arc_.lo.base.approx(), hi = arc_.hi.base.approx();
  auto gap = [](long double u, long double v) {
    const long double d = std::fabs(u - v);
    return std::min(d, 1 - d);
  };
  for (std::int64_t n = from; n <= to; ++n) {
    if (fast) {
      long double p = x0 + static_cast<long double>(n) * a;
      p -= std::floor(p);
      if (gap(p, lo) > 1e-9L && gap(p, hi) > 1e-9L) {
        out.push_back(lo < hi ? (lo <= p && p <= hi) : (p >= lo || p <= hi));
        continue;
      }
    }
    out.push_back(symbol(shift(start, n)));
  }
  return out;
}

CutProjectCoding::CutProjectCoding(RotationNumber alpha, std::vector<HalfOpenArc> arcs,
                                   CirclePoint y0, bool cantor)
    : alpha_(std::move(alpha)), arcs_(std::move(arcs)), y0_(std::move(y0)), cantor_(cantor) {
  std::sort(arcs_.begin(), arcs_.end(),
            [](const HalfOpenArc& a, const HalfOpenArc& b) { return a.lo < b.lo; });
}

CutProjectCoding CutProjectCoding::intervals(RotationNumber alpha, std::vector<HalfOpenArc> arcs,
                                             CirclePoint y0) {
  return CutProjectCoding(std::move(alpha), std::move(arcs), std::move(y0), false);
}

CutProjectCoding CutProjectCoding::cantor(RotationNumber alpha, Rational c, int generations) {
  if (c <= 0 || c >= 1) throw Error(ErrorKind::kInvalidArgument, "Cantor scale c must lie in (0, 1)");
  if (generations < 1 || generations > 20)
    throw Error(ErrorKind::kInvalidArgument, "Cantor generations must lie in 1..20");
  struct Placed {
    std::int64_t n;
    Rational half;
  };
  std::vector<Placed> placed;
  std::vector<HalfOpenArc> arcs;
  std::int64_t k = 0;  // enumerates 1, -1, 2, -2, ...
  auto next_center = [&]() {
    ++k;
    return (k % 2 == 1) ? (k + 1) / 2 : -(k / 2);
  };
  Rational length = c;
  for (int j = 1; j <= generations; ++j) {
    length /= 3;
    const Rational half = length / 2;
    const std::int64_t want = std::int64_t{1} << (j - 1);
    for (std::int64_t got = 0; got < want;) {
      const std::int64_t n = next_center();
      bool clear = true;
      for (const auto& p : placed) {
        // Closures disjoint iff the centres are more than half + p.half apart.
        const Rational gap = half + p.half;
        CirclePoint d = CirclePoint::orbit(alpha, n - p.n);
        if (!(CirclePoint::rational(alpha, gap) < d && d < CirclePoint::rational(alpha, 1 - gap))) {
          clear = false;
          break;
        }
      }
      if (!clear) continue;
      placed.push_back({n, half});
      CirclePoint centre = CirclePoint::orbit(alpha, n);
      arcs.push_back({centre + Rational(-half), centre + half});
      ++got;
    }
  }
  return CutProjectCoding(alpha, std::move(arcs), CirclePoint::zero(alpha), true);
}

bool CutProjectCoding::in_union(const CirclePoint& y, bool open) const {
  for (const auto& arc : arcs_) {
    const bool wraps = arc.hi < arc.lo;
    const Ordering lo = compare(arc.lo, y);
    const Ordering hi = compare(y, arc.hi);
    const bool above_lo = open ? lo == Ordering::kLess : lo != Ordering::kGreater;
    const bool below_hi = hi == Ordering::kLess;
    if (wraps ? (above_lo || below_hi) : (above_lo && below_hi)) return true;
  }
  return false;
}

bool CutProjectCoding::in_window(const CirclePoint& y) const {
  return cantor_ ? !in_union(y, true) : in_union(y, false);
}

int CutProjectCoding::symbol_at(std::int64_t n) const { return in_window(y0_.translate(n)) ? 1 : 0; }

std::vector<int> CutProjectCoding::coding_word(std::int64_t from, std::int64_t to) const {
  if (to < from) throw Error(ErrorKind::kInvalidArgument, "empty coding window");
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(to - from + 1));
  for (std::int64_t n = from; n <= to; ++n) out.push_back(symbol_at(n));
  return out;
}

long double cos_system_F(long double theta) {
  if (theta == 0) return 0;
  if (theta < 0.5L) return std::cos(2 * std::numbers::pi_v<long double> / theta);
  return 2 * theta;
}

bool CosPoint::operator==(const CosPoint& o) const {
  return base == o.base && special.value_or(0.0) == o.special.value_or(0.0);
}

std::string CosPoint::to_string() const {
  std::ostringstream out;
  out << "(" << base.to_string();
  if (special) out << "; " << *special;
  out << ")";
  return out.str();
}

CosPoint CosSystem::generic(const CirclePoint& base) const {
  if (base.in_orbit_of_zero()) return {base, 0.0};
  return {base, std::nullopt};
}

CosPoint CosSystem::shift(const CosPoint& x, std::int64_t n) const {
  return {x.base.translate(n), x.special};
}

std::optional<std::int64_t> CosSystem::special_coordinate(const CirclePoint& base) const {
  if (!base.in_orbit_of_zero()) return std::nullopt;
  return -base.alpha_coefficient();
}

double CosSystem::value(const CosPoint& x, std::int64_t n) const {
  if (auto k = special_coordinate(x.base); k && *k == n) return x.special.value_or(0.0);
  return static_cast<double>(cos_system_F(x.base.translate(n).approx()));
}

std::vector<double> CosSystem::coding_word(const CosPoint& x, std::int64_t from, std::int64_t to) const {
  if (to < from) throw Error(ErrorKind::kInvalidArgument, "empty coding window");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(to - from + 1));
  for (std::int64_t n = from; n <= to; ++n) out.push_back(value(x, n));
  return out;
}

std::uint64_t SemicocycleCascade::marked_point(int n) {
  if (n < 1) throw Error(ErrorKind::kInvalidArgument, "marked points are indexed from 1");
  std::uint64_t y = 0;
  for (int i = n; i < kMaxDepth; i += n + 1) y |= std::uint64_t{1} << i;
  return y;
}

std::uint64_t SemicocycleCascade::cylinder_mask(int depth) {
  if (depth >= 64) return ~std::uint64_t{0};
  return (std::uint64_t{1} << depth) - 1;
}

double SemicocycleCascade::value(std::uint64_t x, int depth) {
  x &= cylinder_mask(depth);
  for (int n = 1; n < depth; ++n) {
    const std::uint64_t diff = (x ^ marked_point(n)) & cylinder_mask(depth);
    if ((diff & cylinder_mask(n + 1)) != 0) continue;
    const int agree = diff == 0 ? depth : std::countr_zero(diff);
    if (agree >= depth) return 0.0;  // y_n itself, as far as we can see
    const int k = agree - n;
    return static_cast<double>(k % n) / (static_cast<double>(n) * n);
  }
  return 0.0;
}

std::size_t SemicocycleCascade::fiber_cardinality(std::uint64_t y, int depth, std::int64_t window) {
  if (depth < 2 || depth > kMaxDepth)
    throw Error(ErrorKind::kInvalidArgument, "cascade depth must lie in 2..63");
  const std::uint64_t mask = cylinder_mask(depth);
  std::size_t total = 1;
  for (std::int64_t m = -window; m <= window; ++m) {
    const std::uint64_t z = (y + static_cast<std::uint64_t>(m)) & mask;
    for (int n = 1; n < depth; ++n) {
      if (((z ^ marked_point(n)) & mask) != 0) continue;
      if (depth <= n)
        throw Error(ErrorKind::kDepthInsufficient, "cylinders around y_" + std::to_string(n) + " unresolved");
      // Shells k = 1..depth-n are resolved; their values (k mod n)/n^2 give
      // the distinct limits of f at y_n.
      std::set<int> values;
      for (int k = 1; k <= depth - n; ++k) values.insert(k % n);
      total *= values.size();
    }
  }
  return total;
}

std::vector<std::size_t> SemicocycleCascade::fibers(int k_max, int depth) {
  if (k_max < 1) throw Error(ErrorKind::kInvalidArgument, "k_max must be >= 1");
  std::vector<std::size_t> out;
  for (int k = 1; k <= k_max; ++k) {
    if (depth <= k)
      throw Error(ErrorKind::kDepthInsufficient,
                  "depth " + std::to_string(depth) + " does not separate the cylinders of y_" + std::to_string(k));
    out.push_back(fiber_cardinality(marked_point(k), depth));
  }
  return out;
}

std::vector<std::int64_t> asymptotic_defect(const SplitCircleSystem& sys, const SplitPoint& x,
                                            const SplitPoint& y, std::int64_t from, std::int64_t to) {
  auto wx = sys.coding_word(x, from, to);
  auto wy = sys.coding_word(y, from, to);
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < wx.size(); ++i)
    if (wx[i] != wy[i]) out.push_back(from + static_cast<std::int64_t>(i));
  return out;
}

std::vector<std::int64_t> asymptotic_defect(const CosSystem& sys, const CosPoint& x,
                                            const CosPoint& y, std::int64_t from, std::int64_t to) {
  auto wx = sys.coding_word(x, from, to);
  auto wy = sys.coding_word(y, from, to);
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < wx.size(); ++i)
    if (wx[i] != wy[i]) out.push_back(from + static_cast<std::int64_t>(i));
  return out;
}

}  // namespace tame
