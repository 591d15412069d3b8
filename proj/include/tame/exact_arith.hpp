#pragma once

// Exact arithmetic on the rotation group Z*alpha + Q (mod 1).
//
// alpha is given by its continued-fraction expansion [0; a1, a2, ...] with an
// eventually periodic tail, so alpha is irrational and every order question
// about points a*alpha + b has a finite answer obtained by refining the
// convergent enclosure p_k/q_k < alpha < p_{k+1}/q_{k+1} (or the reverse).

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "tame/errors.hpp"

namespace tame {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct Convergent {
  BigInt p;
  BigInt q;
};

class RotationNumber {
 public:
  // Partial quotients a_1, a_2, ... (a_0 = 0 is implied). The period repeats
  // forever after the prefix and must be nonempty.
  RotationNumber(std::vector<std::int64_t> prefix, std::vector<std::int64_t> period);

  static RotationNumber golden();  // [0; 1, 1, 1, ...]
  static RotationNumber silver();  // [0; 2, 2, 2, ...] = sqrt(2) - 1

  // Accepts `cf:[0;1,1,1,...]` (trailing `...` repeats the last quotient) and
  // `cf:[0;2,(1,3)]` (parenthesized period).
  static RotationNumber parse(std::string_view text);
  std::string to_string() const;

  // i >= 1.
  std::int64_t partial_quotient(std::size_t i) const;

  // Index 0 is 0/1, index 1 is 1/a_1, and so on. Entries past the
  // precomputed table are generated on the fly.
  Convergent convergent(std::size_t i) const;
  const Convergent& cached_convergent(std::size_t i) const;
  std::size_t cached_count() const;

  // The first k convergents p_1/q_1, ..., p_k/q_k.
  std::vector<Rational> convergents(std::size_t k) const;

  // Long-double approximation of alpha, accurate to the type's precision.
  long double approx() const;
  // alpha = data_hi() + data_lo() to about 128 bits.
  long double data_hi() const;
  long double data_lo() const;

  const std::vector<std::int64_t>& prefix() const;
  const std::vector<std::int64_t>& period() const;

  bool operator==(const RotationNumber& other) const;

 private:
  struct Data;
  std::shared_ptr<const Data> data_;
};

// Sign of a*alpha + r; decided exactly. Throws kInternal past 10^4 refinement
// steps (unreachable for irrational alpha).
int sign_of(const RotationNumber& alpha, std::int64_t a, const Rational& r);

// A certified enclosure [lo, hi] of a*alpha + r, using convergents k and k+1.
std::pair<Rational, Rational> enclose(const RotationNumber& alpha, std::int64_t a,
                                      const Rational& r, std::size_t k);

enum class Ordering { kLess, kEqual, kGreater };

// A point a*alpha + b of the circle, stored with b normalized so the value
// lies in [0, 1). (a, b) is then unique for the point.
class CirclePoint {
 public:
  CirclePoint(RotationNumber alpha, std::int64_t a, Rational b);

  static CirclePoint zero(RotationNumber alpha) { return {std::move(alpha), 0, 0}; }
  static CirclePoint orbit(RotationNumber alpha, std::int64_t n) {
    return {std::move(alpha), n, 0};
  }
  static CirclePoint rational(RotationNumber alpha, Rational b) {
    return {std::move(alpha), 0, std::move(b)};
  }

  std::int64_t alpha_coefficient() const { return a_; }
  const Rational& offset() const { return b_; }
  const RotationNumber& alpha() const { return alpha_; }
  long double approx() const { return approx_; }

  // True when the point is n*alpha mod 1 for some integer n.
  bool in_orbit_of_zero() const;
  bool is_rational() const { return a_ == 0; }

  CirclePoint operator+(const CirclePoint& other) const;
  CirclePoint operator-(const CirclePoint& other) const;
  CirclePoint operator-() const;
  CirclePoint operator+(const Rational& shift) const;
  CirclePoint translate(std::int64_t n) const;  // + n*alpha

  bool operator==(const CirclePoint& other) const { return a_ == other.a_ && b_ == other.b_; }

  std::string to_string() const;

 private:
  RotationNumber alpha_;
  std::int64_t a_;
  Rational b_;
  long double approx_;
};

Ordering compare(const CirclePoint& x, const CirclePoint& y);
inline bool operator<(const CirclePoint& x, const CirclePoint& y) {
  return compare(x, y) == Ordering::kLess;
}

// Shortest arc length between two points, as a long double.
long double circle_distance(const CirclePoint& x, const CirclePoint& y);

// Certified upper bound on the circle distance (exact rational).
Rational circle_distance_bound(const CirclePoint& x, const CirclePoint& y);

enum class Side { kBelow, kAbove };
std::string_view to_string(Side side);

struct ApproachSequence {
  CirclePoint target;
  Side side;
  std::vector<std::int64_t> times;
  // Certified bound on the circle distance between times[i]*alpha and target.
  std::vector<Rational> error_bounds;
};

// Times n_i (strictly increasing) with n_i*alpha -> target strictly from the
// requested side. Orbit targets m*alpha use m + q_k along convergent
// denominators of the right parity; other targets use a greedy Ostrowski
// descent. Throws kSideUnreachable if no term can be produced.
ApproachSequence one_sided_approach(const CirclePoint& target, Side side, std::size_t depth);

}  // namespace tame
