#pragma once

// The free group on a, b acting on one-sided infinite reduced words.
// Letters are a, b and their inverses A, B.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tame/errors.hpp"

namespace tame::boundary {

char inverse(char letter);
// Throws kInvalidArgument on letters outside a, b, A, B.
std::string reduce(std::string_view letters);
bool is_reduced(std::string_view word);
std::string inverse_word(std::string_view word);

// prefix . period^inf when the period is nonempty (an exact point); a
// truncated point known only up to |prefix| letters otherwise.
class BoundaryPoint {
 public:
  BoundaryPoint() = default;
  // Throws kInvalidArgument unless the infinite word is reduced.
  BoundaryPoint(std::string prefix, std::string period);

  static BoundaryPoint truncated(std::string prefix) { return BoundaryPoint(std::move(prefix), ""); }
  // `aB(ab)` is aB followed by abab...; without parentheses the point is truncated.
  static BoundaryPoint parse(std::string_view text);

  bool exact() const { return !period_.empty(); }
  const std::string& prefix() const { return prefix_; }
  const std::string& period() const { return period_; }
  // Known letters: unbounded for exact points.
  std::size_t known_length() const;

  char letter(std::size_t i) const;
  std::string head(std::size_t depth) const;
  // Drops the first k letters. Throws kDepthExhausted past the known prefix.
  BoundaryPoint drop(std::size_t k) const;

  bool operator==(const BoundaryPoint& o) const { return prefix_ == o.prefix_ && period_ == o.period_; }
  std::string to_string() const;

 private:
  std::string prefix_;
  std::string period_;
};

// Longest common prefix, capped at depth.
std::size_t common_prefix(const BoundaryPoint& x, const BoundaryPoint& y, std::size_t depth);
// 2^-lcp, or 0 when the depth-prefixes agree.
double distance(const BoundaryPoint& x, const BoundaryPoint& y, std::size_t depth);

// gamma . w with cancellation. Throws kDepthExhausted when a truncated w
// runs out of letters.
BoundaryPoint act(std::string_view gamma, const BoundaryPoint& w);

// gamma = g h g^-1 with h cyclically reduced.
struct Conjugation {
  std::string g;
  std::string h;
};
Conjugation cyclic_core(std::string_view gamma);

struct PowerLimit {
  enum class Kind { kElliptic, kLoxodromic };
  Kind kind = Kind::kElliptic;
  BoundaryPoint attracting;  // g h^inf
  BoundaryPoint repulsing;   // g (h^-1)^inf
  std::size_t probes = 0;
  std::size_t max_steps = 0;  // iterations until the last probe settled
};

// All reduced words of length `length`, each continued by its last letter
// repeated forever (4 * 3^(length-1) points).
std::vector<BoundaryPoint> probe_points(int length = 6);
BoundaryPoint random_point(std::mt19937_64& rng, int prefix_length);

// Iterates gamma^n on every probe point other than the repulsing point until
// its depth-prefix equals the attracting prefix and stays there for one more
// step. Throws kNotStabilized if some probe needs more than depth + 64 steps.
PowerLimit power_limit(std::string_view gamma, std::size_t depth,
                       const std::vector<BoundaryPoint>& probes = probe_points());

// The loxodromic idempotent: the repulsing point is fixed, everything else
// goes to the attracting point.
struct LoxodromicMap {
  BoundaryPoint attracting;
  BoundaryPoint repulsing;
  BoundaryPoint operator()(const BoundaryPoint& x) const { return x == repulsing ? repulsing : attracting; }
};

}  // namespace tame::boundary
