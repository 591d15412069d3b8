#pragma once

// Monotone step maps on [0, 1] (optionally with split points), one-sided
// limits, Helly-type determining sets, and the circular-order counterexample.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "tame/errors.hpp"

namespace tame::order {

using Q = boost::rational<long long>;

enum class Side { kMinus, kPlain, kPlus };

// A point of [0, 1] or, at a split point s, one of s-, s+.
struct DomainPoint {
  Q x;
  Side side = Side::kPlain;
  bool operator==(const DomainPoint& o) const { return x == o.x && side == o.side; }
  bool operator<(const DomainPoint& o) const {
    return x != o.x ? x < o.x : static_cast<int>(side) < static_cast<int>(o.side);
  }
};
std::string to_string(const DomainPoint& p);

struct Breakpoint {
  Q x;
  Q left;   // f(x-)
  Q point;  // f(x)
  Q right;  // f(x+)
};

// Between consecutive breakpoints f interpolates affinely from right(b_i) to
// left(b_{i+1}); equal ends give a constant piece. 0 and 1 are always
// breakpoints (the constructor adds them when missing, extending constantly).
class MonotoneStepMap {
 public:
  enum class Direction { kIncreasing, kDecreasing };

  // Throws kInvalidArgument unless the values are weakly monotone in one
  // direction and every breakpoint satisfies the sandwich
  // point in [left, right].
  explicit MonotoneStepMap(std::vector<Breakpoint> breakpoints);

  static MonotoneStepMap identity();
  // Nondecreasing staircase: value jumps by 1/k at each jump point, point
  // values taken from `point_values` (in [left, right]) when given.
  static MonotoneStepMap staircase(const std::vector<Q>& jumps, const std::vector<Q>& point_values = {});
  // Parses `(x; left,point,right) (x; ...)`.
  static MonotoneStepMap parse(const std::string& text);

  Direction direction() const { return direction_; }
  const std::vector<Breakpoint>& breakpoints() const { return bps_; }

  Q operator()(const DomainPoint& p) const;
  Q operator()(const Q& x) const { return (*this)(DomainPoint{x, Side::kPlain}); }

  // (f(a-), f(a+)); sandwich f(a) in [f(a-), f(a+)] holds by construction.
  std::pair<Q, Q> one_sided_limits(const Q& a) const;
  std::vector<Q> discontinuities() const;

 private:
  std::vector<Breakpoint> bps_;
  Direction direction_ = Direction::kIncreasing;
};

struct OrderedDomain {
  enum class Kind { kInterval, kFiniteChain };
  Kind kind = Kind::kInterval;
  std::vector<Q> split_points;  // interval kind only
  std::vector<Q> chain;         // finite-chain kind
  int dyadic_level = 8;         // dense sample A = {k / 2^level}

  static OrderedDomain interval(int level = 8) { return {Kind::kInterval, {}, {}, level}; }
  static OrderedDomain split(std::vector<Q> points, int level = 8) {
    return {Kind::kInterval, std::move(points), {}, level};
  }
  static OrderedDomain finite_chain(std::vector<Q> points) {
    return {Kind::kFiniteChain, {}, std::move(points), 0};
  }

  std::vector<DomainPoint> dense_sample() const;
};

std::vector<DomainPoint> singular_points(const OrderedDomain& domain);

struct DeterminationReport {
  std::vector<DomainPoint> C;
  std::size_t adversaries = 0;
  std::size_t agreeing_on_C = 0;
  std::size_t escaped = 0;  // agreeing on C yet differing on the probe grid
  std::optional<DomainPoint> escape_point;
};

// C = disc(f) u sing(X) u A u {probe-grid neighbours of each discontinuity}.
// The neighbours stand in for the one-sided approach a dense A gives for free.
std::vector<DomainPoint> helly_determining_set(const MonotoneStepMap& f, const OrderedDomain& domain,
                                               int probe_level);

// Random monotone adversaries (pinned to f on C, free elsewhere within the
// monotone envelope) plus targeted single-point changes, checked on the
// dyadic probe grid of the given level.
DeterminationReport check_determination(const MonotoneStepMap& f, const OrderedDomain& domain,
                                        int probe_level, std::size_t adversaries, std::mt19937_64& rng);

// Circle [0, 1). p_a sends everything to a; p_{(a,b)} fixes b and sends the
// rest to a.
struct CircularCounterexample {
  Q a;
  Q b;
  bool agrees_on_C = false;
  bool differs_at_b = false;
};

// b is the first dyadic point (levels 1, 2, ...; increasing within a level)
// outside C u {a}. Throws kInvalidArgument if a is in C.
CircularCounterexample circular_counterexample(const std::vector<Q>& C, const Q& a);

// The discrete family {f_z}: f_z(z) = 1/2 and 0 elsewhere. Row 0 is the zero
// map, row i+1 is f_{grid[i]}; columns are `pool` points.
std::vector<std::vector<Q>> helly_family_table(const std::vector<Q>& grid, const std::vector<Q>& pool);

}  // namespace tame::order
