#pragma once

// Partial linear endomorphisms of R^n u {inf} as pointwise limits of matrix
// sequences, and the affine catalog on the extended line.

#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tame/errors.hpp"
#include "tame/exact_arith.hpp"

namespace tame::linear {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using RationalMatrix = std::vector<std::vector<Rational>>;

// Row-major rational list, e.g. "2 0; 0 1/2" or "2,0,0,1/2" with n = 2.
RationalMatrix parse_matrix(const std::string& text, int n);
Mat to_double(const RationalMatrix& m);

// Points off the domain go to inf, inf goes to inf.
class PartialLinearMap {
 public:
  // `basis` columns span the domain (orthonormalized here); `map` is applied
  // to the orthogonal projection onto the domain.
  PartialLinearMap(Mat basis, const Mat& map);

  static PartialLinearMap identity(int n);
  static PartialLinearMap p_infinity(int n);  // domain {0}
  // q_L: identity on the line spanned by u, inf elsewhere.
  static PartialLinearMap line_limit(const Vec& u);

  int dimension() const { return static_cast<int>(matrix_.rows()); }
  int domain_dimension() const { return static_cast<int>(basis_.cols()); }
  const Mat& basis() const { return basis_; }
  Mat projector() const { return basis_ * basis_.transpose(); }
  // Zero on the orthogonal complement of the domain.
  const Mat& matrix() const { return matrix_; }

  bool in_domain(const Vec& v, double tol = 1e-9) const;
  // nullopt stands for inf.
  std::optional<Vec> operator()(const Vec& v, double tol = 1e-9) const;

 private:
  Mat basis_;
  Mat matrix_;
};

// Largest of the projector and matrix differences; inf if domain
// dimensions differ.
double distance(const PartialLinearMap& p, const PartialLinearMap& q);

// p o q.
PartialLinearMap partial_compose(const PartialLinearMap& p, const PartialLinearMap& q);

struct MatrixSequenceSpec {
  enum class Kind { kScalar, kDiagonal, kPowers, kExplicit };
  Kind kind = Kind::kScalar;
  int n = 2;
  // kDiagonal: entry i at parameter t is t^exponents[i].
  std::vector<int> exponents;
  // kPowers: g.
  RationalMatrix base;
  // kExplicit: the sequence itself; the last `stages` entries are used.
  std::vector<Mat> explicit_terms;

  static MatrixSequenceSpec scalar(int n) { return {Kind::kScalar, n, {}, {}, {}}; }
  static MatrixSequenceSpec diagonal(std::vector<int> exponents) {
    const int n = static_cast<int>(exponents.size());
    return {Kind::kDiagonal, n, std::move(exponents), {}, {}};
  }
  static MatrixSequenceSpec powers(RationalMatrix g) {
    const int n = static_cast<int>(g.size());
    return {Kind::kPowers, n, {}, std::move(g), {}};
  }
  static MatrixSequenceSpec explicit_list(std::vector<Mat> terms) {
    const int n = terms.empty() ? 0 : static_cast<int>(terms.front().rows());
    return {Kind::kExplicit, n, {}, {}, std::move(terms)};
  }

  // Stage s >= 0: t = 10^(4(s+1)) for scalar and diagonal kinds, g^(16(s+1))
  // for powers, explicit_terms[size - stages + s] for explicit lists.
  Mat stage(int s, int stages) const;
};

struct LimitOptions {
  int stages = 4;
  double delta = 1e-8;           // stage-to-stage agreement on the domain
  // Growth of a singular value from the first to the last stage: at most
  // bounded_growth is bounded, at least divergence_growth escapes, anything
  // between is the guard band.
  double bounded_growth = 10;
  double divergence_growth = 1e4;
};

// The exact path applies to powers of rational upper-triangular matrices with
// distinct diagonal moduli; everything else goes through singular values.
// Throws kNotStabilized or kAmbiguousSubspace.
PartialLinearMap matrix_limit(const MatrixSequenceSpec& spec, const LimitOptions& options = {});
bool exact_path_applies(const MatrixSequenceSpec& spec);

// Largest discrepancy between lim(a_t b_t) and lim(a_t) o lim(b_t) for
// diag(t^e) and diag(t^f). Exponents in {-1, 0, 1}.
double diagonal_product_discrepancy(const std::vector<int>& e, const std::vector<int>& f,
                                    const LimitOptions& options = {});
// Random exponent pairs avoiding opposite signs in one coordinate (where
// multiplication is not continuous and the two sides differ).
std::pair<std::vector<int>, std::vector<int>> random_commuting_pair(int n, std::mt19937_64& rng);

// A random partial map: domain of random dimension, random map on it.
PartialLinearMap random_partial_map(int n, std::mt19937_64& rng);

// Witness against a countable basis at p_inf: a line L missing every nonzero
// point of C, with q_L realized as the limit of R diag(1, t, ..., t) R^T.
struct ProjectiveWitness {
  Vec direction;
  PartialLinearMap q;
  bool agrees_on_C = false;  // q(c) = p_inf(c) for every c in C
  bool differs = false;      // q(direction) is finite, p_inf(direction) = inf
};
// Terms use t = 10, 10^3, 10^5, 10^7 to keep the bounded direction well
// conditioned.
ProjectiveWitness projective_witness(const std::vector<Vec>& C, int n = 2);

// ---- affine catalog on Y = R u {-inf, +inf} under t -> a t + b, a > 0 ----

struct ExtReal {
  enum class Kind { kNegInf, kFinite, kPosInf };
  Kind kind = Kind::kFinite;
  Rational value;

  static ExtReal finite(Rational v) { return {Kind::kFinite, std::move(v)}; }
  static ExtReal pos_inf() { return {Kind::kPosInf, 0}; }
  static ExtReal neg_inf() { return {Kind::kNegInf, 0}; }
  bool operator==(const ExtReal& o) const {
    return kind == o.kind && (kind != Kind::kFinite || value == o.value);
  }
  std::string to_string() const;
};

struct CatalogElement {
  enum class Kind {
    kCircle,     // p°_{rs}: +inf right of s, r at s, -inf left of s
    kInner,      // p^i_s: constant s on R
    kPosInf,     // p_inf
    kNegInf,     // p_-inf
    kPosInfAt,   // p_{+inf,s}: +inf right of s and at s, -inf left of s
    kNegInfAt,   // p_{-inf,s}: +inf right of s, -inf at s and left of s
  };
  Kind kind = Kind::kInner;
  Rational r;
  Rational s;

  // Exact rule; +-inf are fixed by every element.
  ExtReal operator()(const ExtReal& t) const;
  // (a_m, b_m) of a realizing sequence at parameter m = k^2.
  std::pair<Rational, Rational> realizing_term(const Rational& m, const Rational& root_m) const;
  bool operator==(const CatalogElement& o) const;
  std::string to_string() const;
};

struct CatalogLimit {
  CatalogElement element;
  std::vector<ExtReal> samples;
  std::vector<ExtReal> limits;  // detected from the realizing sequence
  bool matches_rule = false;    // limits == element(samples), finite values within 1e-3
  std::vector<ExtReal> pinning_points;
  bool pinned = false;          // no other candidate agrees on pinning_points
};

// A finite stand-in for the catalog: all elements with r, s on the grid.
std::vector<CatalogElement> catalog_candidates(const std::vector<Rational>& grid);

// Pinning points: {s-1, s, s+1} for p°_{rs}, {0, 1, 2} for p^i_s, the whole
// sample otherwise (these are pinned by a countable set, not by three points).
std::vector<ExtReal> pinning_points(const CatalogElement& e, const std::vector<ExtReal>& samples);

// Evaluates the realizing sequence at m = 100^(j+1), j < stages, classifies
// each sample's trajectory as convergent or escaping, and checks the rule and
// the pinning against `candidates`. Throws kNotStabilized.
CatalogLimit affine_catalog_limit(const CatalogElement& e, const std::vector<ExtReal>& samples,
                                  const std::vector<CatalogElement>& candidates, int stages = 4);

}  // namespace tame::linear
