#pragma once

// Finite-sample stand-ins for elements of enveloping semigroups: limits of
// translations along time sequences, classification, composition,
// minimal-ideal coordinates, and finite certificates (determining sets,
// isolation, rigidity, no-countable-basis witnesses).

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tame/errors.hpp"
#include "tame/exact_arith.hpp"
#include "tame/linear.hpp"
#include "tame/order.hpp"
#include "tame/systems.hpp"

namespace tame::envelope {

enum class Backend { kExact, kNumeric };
std::string_view to_string(Backend b);

struct Generator {
  std::vector<std::int64_t> times;  // stages, in order
  std::optional<CirclePoint> target;
  std::optional<Side> side;

  static Generator constant(std::int64_t m, std::size_t stages = 4);
  static Generator approach(const ApproachSequence& seq);
  bool is_constant() const;
  std::string describe() const;
};

struct ElementClass {
  enum class Tag { kTranslation, kParabolic, kLoxodromic, kOneSided, kRotation, kUnresolved };
  Tag tag = Tag::kUnresolved;
  std::int64_t n = 0;               // translation
  std::string target;               // parabolic, loxodromic (attracting)
  std::string repulsing;            // loxodromic
  std::optional<CirclePoint> gamma; // one-sided, rotation
  SideTag side = SideTag::kPlain;   // one-sided

  std::string to_string() const;
};

// Parabolic / loxodromic / identity detection from images alone.
// `same(i, j)` compares image i with image j, `fixed(i)` tells whether image i
// equals sample point i; `describe(i)` prints image i.
template <class Same, class Fixed, class Describe>
ElementClass classify_images(std::size_t size, Same same, Fixed fixed, Describe describe) {
  ElementClass out;
  if (size == 0) return out;
  bool all_fixed = true;
  for (std::size_t i = 0; i < size; ++i) all_fixed = all_fixed && fixed(i);
  if (all_fixed) {
    out.tag = ElementClass::Tag::kTranslation;
    return out;
  }
  // Majority image: the one shared by the most points (first on ties).
  std::size_t best = 0, best_count = 0;
  for (std::size_t i = 0; i < size && best_count * 2 <= size; ++i) {
    std::size_t c = 0;
    for (std::size_t j = 0; j < size; ++j) c += same(i, j) ? 1 : 0;
    if (c > best_count) best = i, best_count = c;
  }
  if (best_count == size) {
    out.tag = ElementClass::Tag::kParabolic;
    out.target = describe(best);
    return out;
  }
  if (best_count + 1 == size) {
    for (std::size_t j = 0; j < size; ++j) {
      if (same(best, j)) continue;
      if (fixed(j)) {
        out.tag = ElementClass::Tag::kLoxodromic;
        out.target = describe(best);
        out.repulsing = describe(j);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- split circle

// x -> T^m x, or x -> point(x + gamma, side).
struct SplitRule {
  enum class Kind { kTranslation, kOneSided };
  Kind kind = Kind::kTranslation;
  std::int64_t m = 0;
  std::optional<CirclePoint> gamma;
  SideTag side = SideTag::kPlain;

  SplitPoint operator()(const SplitCircleSystem& sys, const SplitPoint& x) const;
};

struct SplitElement {
  std::vector<SplitPoint> sample;
  std::vector<SplitPoint> images;
  Generator generator;
  Backend backend = Backend::kExact;
  double tolerance = 0;
  bool stabilized = false;
  std::optional<SplitRule> rule;
  // Largest coding distance between the last numeric stage and the image.
  double backend_gap = 0;
  std::vector<std::string> provenance;
};

// Coding window radius used for a tolerance: smallest K with 2^-K <= delta.
int coding_radius(double delta);
// sup_{|k| <= K} 2^-|k| |s_k(x) - s_k(y)|.
double coding_distance(const SplitCircleSystem& sys, const SplitPoint& x, const SplitPoint& y, int K);

// Sample of `size` points: (k alpha)^- and (k alpha)^+ for small |k|, then
// plain rational points j / N, plus `extra` (deduplicated, sorted).
std::vector<SplitPoint> split_sample(const SplitCircleSystem& sys, std::size_t size,
                                     const std::vector<SplitPoint>& extra = {});

// Exact rule for constant generators (T^m) and approach generators
// (point(x + gamma, minus) from below, plus from above); the numeric check
// compares the last two stages in the coding metric. Without a rule the last
// stage is the image and NotStabilized is raised when the stages disagree.
// Only the last `max_stages` times are checked for monotonicity.
SplitElement limit_map(const SplitCircleSystem& sys, const Generator& gen, const std::vector<SplitPoint>& sample,
                       double delta = 1e-3, std::size_t max_stages = 8);

ElementClass classify(const SplitCircleSystem& sys, const SplitElement& p);

// p o q. Uses p's rule on q's images when p has one; otherwise q's images
// must lie in p's sample (SampleMismatch).
SplitElement compose(const SplitCircleSystem& sys, const SplitElement& p, const SplitElement& q);

// ------------------------------------------------------------------ cos(1/x)

// v_eps g_gamma: base + gamma, value eps at the coordinate where the new base
// hits 0. Translations keep the special value.
struct CosRule {
  enum class Kind { kTranslation, kIdeal };
  Kind kind = Kind::kIdeal;
  std::int64_t m = 0;
  std::optional<double> epsilon;  // unobserved when no sampled image is special
  std::optional<CirclePoint> gamma;

  CosPoint operator()(const CosSystem& sys, const CosPoint& x) const;
};

struct CosElement {
  std::vector<CosPoint> sample;
  std::vector<CosPoint> images;
  Generator generator;
  double tolerance = 0;
  bool stabilized = false;
  std::optional<CosRule> rule;
  double backend_gap = 0;  // weighted sup distance, last stage vs rule images
  std::vector<std::string> provenance;
};

double cos_distance(const CosSystem& sys, const CosPoint& x, const CosPoint& y, int K);

// Times n_i with n_i alpha -> 0 from above through values theta_i where
// cos(2 pi / theta_i) -> t: theta_i = 1 / (k_i + acos(t) / 2 pi), k_i = 1000 * 4^i,
// each term within 1e-3 / k_i^2 of theta_i.
Generator cos_fiber_approach(const RotationNumber& alpha, double t, std::size_t stages = 4);

// Numeric limit of T^{n_i} on the sample, checked on the last two stages in
// the weighted sup metric over |k| <= K. gamma is the generator target;
// epsilon is read off the last stage at the special coordinate (snapped to 2
// within delta).
CosElement cos_limit_map(const CosSystem& sys, const Generator& gen, const std::vector<CosPoint>& sample,
                         double delta = 0.05, int K = 6);

CosElement cos_compose(const CosSystem& sys, const CosElement& p, const CosElement& q);

// ------------------------------------------------------------ minimal ideal

struct IdealDecomposition {
  // Sturmian: side; cos: epsilon (2 or a value in [-1, 1]).
  std::optional<SideTag> side;
  std::optional<double> epsilon;
  CirclePoint gamma;
  bool recomposes = false;  // v_eps g_gamma reproduces the sampled images
};

// Throws kNotInIdeal for translations.
IdealDecomposition decompose_minimal(const SplitCircleSystem& sys, const SplitElement& p);
IdealDecomposition decompose_minimal(const CosSystem& sys, const CosElement& p);

// ------------------------------------------------------------- projective line

// Unit vectors in the plane with the sign fixed (first nonzero coordinate > 0).
struct ProjPoint {
  double x = 1, y = 0;
  static ProjPoint from(double x, double y);
  static ProjPoint angle(double theta);
};
double proj_distance(const ProjPoint& a, const ProjPoint& b);  // |sin| of the angle

struct ProjElement {
  std::vector<ProjPoint> sample;
  std::vector<ProjPoint> images;
  double tolerance = 0;
  bool stabilized = false;
};

// Stages of a 2x2 matrix sequence acting on directions; NotStabilized when
// the last two stages differ by more than delta somewhere.
ProjElement projective_limit(const linear::MatrixSequenceSpec& spec, const std::vector<ProjPoint>& sample,
                             double delta = 1e-9, int stages = 4);
ElementClass classify(const ProjElement& p);

// --------------------------------------------------------- determining sets

struct DeterminingSet {
  std::vector<std::size_t> C;  // pool indices
  bool exhaustive = true;
  std::size_t lower_bound = 0;  // |C| is optimal when it equals this
};

// labels[i][j] is the image class of family member i at pool point j.
// Smallest C such that no other member agrees with member p on C. Exhaustive
// in lexicographic order by increasing size when the pool has <= 20 points,
// greedy set cover otherwise. Throws kInvalidArgument when two members agree
// on the whole pool.
DeterminingSet determining_set(const std::vector<std::vector<int>>& labels, std::size_t p);

// Class ids for a table of values (equal values share an id).
template <class T>
std::vector<std::vector<int>> label_table(const std::vector<std::vector<T>>& values);

// -------------------------------------------------- no countable basis

struct BasisWitness {
  enum class Scenario { kProjective, kCircle };
  Scenario scenario = Scenario::kCircle;
  std::string description;
  bool agrees_on_C = false;
  bool differs = false;
};

// The projective scenario takes nonzero plane points, the circle scenario
// points of [0, 1) and the parabolic target a (not in C).
BasisWitness no_countable_basis_witness(const std::vector<linear::Vec>& C);
BasisWitness no_countable_basis_witness(const std::vector<order::Q>& C, const order::Q& a);

// ------------------------------------------------------------- isolation

struct Isolation {
  bool isolated = false;
  Rational epsilon;                       // last width tried
  std::optional<std::size_t> captured;    // a member inside the neighbourhood
};

struct IsolationReport {
  std::vector<Isolation> members;
  bool all_isolated = false;
};

// Widths 1/2, 1/4, ..., down to `floor`. Product family: member i is
// (p_{g_i}^+, p_{-g_i}^+) with neighbourhood [g, g+e) x [-g, -g+e).
IsolationReport sorgenfrey_isolation_product(const std::vector<CirclePoint>& gammas,
                                             const Rational& floor = Rational(1, 32));
// One circle: member i is p_{g_i}^+ with neighbourhood [g, g+e).
IsolationReport sorgenfrey_isolation_circle(const std::vector<CirclePoint>& gammas,
                                            const Rational& floor = Rational(1, 32));

// ------------------------------------------------------------- rigidity

struct RigidityPoint {
  std::int64_t n = 0;
  double sup_distance = 0;
};

struct RigidityReport {
  std::vector<RigidityPoint> along_denominators;  // rotation only
  double minimum = 0;                             // over 1 <= n <= N
  std::int64_t argmin = 0;
  double floor = 0;                               // split gap for split systems
};

// Plain rotation: sup over the circle of d(x + n alpha, x) = ||n alpha||,
// reported at n = q_1 .. q_kmax and minimized over 1 <= n <= N.
RigidityReport rotation_rigidity(const RotationNumber& alpha, std::size_t k_max, std::int64_t N);
// Split system in the coding metric of radius K. The floor is d(0-, 0+).
RigidityReport split_rigidity(const SplitCircleSystem& sys, std::int64_t N, const std::vector<SplitPoint>& sample,
                              int K = 10);

template <class T>
std::vector<std::vector<int>> label_table(const std::vector<std::vector<T>>& values) {
  std::map<T, int> ids;
  std::vector<std::vector<int>> out;
  for (const auto& row : values) {
    std::vector<int> r;
    for (const auto& v : row) r.push_back(ids.emplace(v, static_cast<int>(ids.size())).first->second);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace tame::envelope
