#pragma once

// Concrete systems: the split circle (Sturmian and friends), cut-and-project
// codings, the cos(1/x) system and a semicocycle cascade over the dyadic
// odometer.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tame/exact_arith.hpp"

namespace tame {

enum class SideTag { kMinus, kPlain, kPlus };
std::string_view to_string(SideTag tag);

struct SplitPoint {
  CirclePoint base;
  SideTag side = SideTag::kPlain;

  bool operator==(const SplitPoint& o) const { return base == o.base && side == o.side; }
  std::string to_string() const;
};

// Circle order first, then minus < plain < plus on equal bases.
Ordering compare(const SplitPoint& x, const SplitPoint& y);
inline bool operator<(const SplitPoint& x, const SplitPoint& y) {
  return compare(x, y) == Ordering::kLess;
}

class SplitSet {
 public:
  enum class Kind { kOrbit, kRationals, kExplicit };

  static SplitSet orbit() { return SplitSet(Kind::kOrbit, {}); }
  static SplitSet rationals() { return SplitSet(Kind::kRationals, {}); }
  static SplitSet explicit_points(std::vector<CirclePoint> points) {
    return SplitSet(Kind::kExplicit, std::move(points));
  }
  static SplitSet none() { return explicit_points({}); }

  Kind kind() const { return kind_; }
  const std::vector<CirclePoint>& points() const { return points_; }
  bool contains(const CirclePoint& y) const;
  // Invariant under rotation by alpha.
  bool invariant() const { return kind_ == Kind::kOrbit || (kind_ == Kind::kExplicit && points_.empty()); }

 private:
  SplitSet(Kind kind, std::vector<CirclePoint> points) : kind_(kind), points_(std::move(points)) {}
  Kind kind_;
  std::vector<CirclePoint> points_;
};

// Closed arc from `lo` counterclockwise to `hi`; may wrap through 0.
struct CodingArc {
  SplitPoint lo;
  SplitPoint hi;
  bool full = false;
};

class SplitCircleSystem {
 public:
  // Default partition: symbol 1 on [0+, alpha-].
  SplitCircleSystem(RotationNumber alpha, SplitSet split_set);
  SplitCircleSystem(RotationNumber alpha, SplitSet split_set, CodingArc arc);

  static SplitCircleSystem sturmian(RotationNumber alpha) {
    return SplitCircleSystem(std::move(alpha), SplitSet::orbit());
  }
  // Plain rotation: nothing is split.
  static SplitCircleSystem rotation(RotationNumber alpha) {
    return SplitCircleSystem(std::move(alpha), SplitSet::none());
  }

  const RotationNumber& alpha() const { return alpha_; }
  const SplitSet& split_set() const { return split_set_; }
  const CodingArc& arc() const { return arc_; }

  std::vector<SplitPoint> fiber(const CirclePoint& y) const;
  // The canonical point over y carrying `side` if y is split, plain otherwise.
  SplitPoint point(const CirclePoint& y, SideTag side = SideTag::kPlus) const;

  // T^n.
  SplitPoint shift(const SplitPoint& x, std::int64_t n) const;

  // Membership of x in the coding arc. Throws kBoundaryUndecidable for a
  // plain point sitting on a sided arc endpoint.
  int symbol(const SplitPoint& x) const;
  std::vector<int> coding_word(const SplitPoint& start, std::int64_t from, std::int64_t to) const;

 private:
  RotationNumber alpha_;
  SplitSet split_set_;
  CodingArc arc_;
};

// Binary coding of the orbit y0 + n*alpha through a window W.
class CutProjectCoding {
 public:
  struct HalfOpenArc {
    CirclePoint lo;
    CirclePoint hi;  // [lo, hi), counterclockwise
  };

  // W = union of half-open arcs.
  static CutProjectCoding intervals(RotationNumber alpha, std::vector<HalfOpenArc> arcs,
                                    CirclePoint y0);
  // W = circle minus open arcs. Generation j (1..g) removes 2^(j-1) arcs of
  // length c*3^-j centred on orbit points n = 1, -1, 2, -2, ... chosen so
  // closures stay pairwise disjoint.
  static CutProjectCoding cantor(RotationNumber alpha, Rational c, int generations);

  const RotationNumber& alpha() const { return alpha_; }
  bool is_cantor() const { return cantor_; }
  // Sorted by lower endpoint. For the Cantor kind these are the deleted arcs.
  const std::vector<HalfOpenArc>& arcs() const { return arcs_; }
  const CirclePoint& base_point() const { return y0_; }

  bool in_window(const CirclePoint& y) const;
  int symbol_at(std::int64_t n) const;
  std::vector<int> coding_word(std::int64_t from, std::int64_t to) const;

 private:
  CutProjectCoding(RotationNumber alpha, std::vector<HalfOpenArc> arcs, CirclePoint y0, bool cantor);
  bool in_union(const CirclePoint& y, bool open) const;

  RotationNumber alpha_;
  std::vector<HalfOpenArc> arcs_;
  CirclePoint y0_;
  bool cantor_;
};

// F(0) = 0, cos(2 pi / t) on (0, 1/2), 2t on [1/2, 1).
long double cos_system_F(long double theta);

// A point of the orbit closure of x0 = (F(n alpha))_n. Points over the
// orbit of 0 carry the value `special` at the coordinate where the base hits 0;
// it is one of {2} or [-1, 1]. x0 itself has special = 0.
struct CosPoint {
  CirclePoint base;
  std::optional<double> special;

  bool operator==(const CosPoint& o) const;
  std::string to_string() const;
};

class CosSystem {
 public:
  explicit CosSystem(RotationNumber alpha) : alpha_(std::move(alpha)) {}

  const RotationNumber& alpha() const { return alpha_; }

  CosPoint x0() const { return {CirclePoint::zero(alpha_), 0.0}; }
  // The fiber point over 0 whose coordinate-0 value is eps.
  CosPoint over_zero(double eps) const { return {CirclePoint::zero(alpha_), eps}; }
  CosPoint generic(const CirclePoint& base) const;

  CosPoint shift(const CosPoint& x, std::int64_t n) const;
  double value(const CosPoint& x, std::int64_t n) const;
  std::vector<double> coding_word(const CosPoint& x, std::int64_t from, std::int64_t to) const;

  // The coordinate k with base + k*alpha = 0, if any.
  std::optional<std::int64_t> special_coordinate(const CirclePoint& base) const;

 private:
  RotationNumber alpha_;
};

// Semicocycle extension of the dyadic odometer. Points are 2-adic integers
// truncated to 63 bits. The marked points y_n (n >= 1) carry digit 1 at
// positions i >= n with (i - n) % (n + 1) == 0; distinct n give distinct
// orbits. B_{n,k} is the cylinder of depth n+k around y_n, V_n = B_{n,1}, and
// f = (k mod n) / n^2 on B_{n,k} \ B_{n,k+1}, 0 off the V_n.
class SemicocycleCascade {
 public:
  static constexpr int kMaxDepth = 63;

  static std::uint64_t marked_point(int n);
  static std::uint64_t cylinder_mask(int depth);

  // f at the depth-truncated point x.
  static double value(std::uint64_t x, int depth);

  // Number of distinct symbol traces over y at truncation `depth`, scanning
  // coordinates |m| <= window for marked points. Marked points lie in distinct
  // orbits, so only coordinate 0 matters over y_k; a nonzero window at shallow
  // depth picks up aliases of unrelated marked points.
  static std::size_t fiber_cardinality(std::uint64_t y, int depth, std::int64_t window = 0);

  // k -> fiber cardinality over y_k, for k = 1..k_max. Throws
  // kDepthInsufficient when depth <= k.
  static std::vector<std::size_t> fibers(int k_max, int depth);
};

// Coordinates n in [from, to] where the two codings differ.
std::vector<std::int64_t> asymptotic_defect(const SplitCircleSystem& sys, const SplitPoint& x,
                                            const SplitPoint& y, std::int64_t from, std::int64_t to);
std::vector<std::int64_t> asymptotic_defect(const CosSystem& sys, const CosPoint& x,
                                            const CosPoint& y, std::int64_t from, std::int64_t to);

}  // namespace tame
