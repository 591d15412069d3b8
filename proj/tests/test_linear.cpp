#include <doctest.h>

#include <random>

#include "tame/linear.hpp"

using namespace tame;
using namespace tame::linear;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("scalar and diagonal limits") {
  const auto p = matrix_limit(MatrixSequenceSpec::scalar(2));
  CHECK(p.domain_dimension() == 0);
  CHECK_FALSE(p(v2(1, 0)).has_value());
  CHECK(p(v2(0, 0)).has_value());
  CHECK(distance(p, PartialLinearMap::p_infinity(2)) == 0);

  const auto q = matrix_limit(MatrixSequenceSpec::diagonal({0, 1}));
  CHECK(q.domain_dimension() == 1);
  CHECK(distance(q, PartialLinearMap::line_limit(v2(1, 0))) < 1e-12);
  CHECK((*q(v2(3, 0)) - v2(3, 0)).norm() < 1e-12);
  CHECK_FALSE(q(v2(3, 1e-3)).has_value());

  // Several growth rates at once.
  const auto m = matrix_limit(MatrixSequenceSpec::diagonal({2, 0, 1}));
  CHECK(m.domain_dimension() == 1);
  CHECK(std::abs(m.basis()(1, 0)) > 0.999);

  const auto r = matrix_limit(MatrixSequenceSpec::diagonal({-1, 0}));
  CHECK(r.domain_dimension() == 2);
  CHECK((*r(v2(5, 2)) - v2(0, 2)).norm() < 1e-12);
}

TEST_CASE("exact power path") {
  const auto g = parse_matrix("2 0; 0 1/2", 2);
  REQUIRE(exact_path_applies(MatrixSequenceSpec::powers(g)));
  const auto p = matrix_limit(MatrixSequenceSpec::powers(g));
  CHECK(p.domain_dimension() == 1);
  CHECK(p.in_domain(v2(0, 1)));
  CHECK(p(v2(0, 7))->norm() == 0);
  CHECK_FALSE(p(v2(1, 0)).has_value());

  // Upper triangular with a fixed eigenline and a contracting one.
  const auto h = parse_matrix("1 1; 0 1/3", 2);
  const auto ph = matrix_limit(MatrixSequenceSpec::powers(h));
  CHECK(ph.domain_dimension() == 2);
  const Mat numeric = MatrixSequenceSpec::powers(h).stage(3, 4);
  CHECK((ph.matrix() - numeric).cwiseAbs().maxCoeff() < 1e-12);

  try {
    matrix_limit(MatrixSequenceSpec::powers(parse_matrix("-1 0; 0 1/2", 2)));
    FAIL("expected NotStabilized");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNotStabilized);
  }
  CHECK_THROWS_AS(parse_matrix("1 2 3", 2), Error);
}

TEST_CASE("numeric path errors") {
  // Rotation by a quarter turn: bounded, never settles.
  Mat rot(2, 2);
  rot << 0, -1, 1, 0;
  std::vector<Mat> terms{rot, rot * rot, rot * rot * rot, Mat::Identity(2, 2)};
  try {
    matrix_limit(MatrixSequenceSpec::explicit_list(terms));
    FAIL("expected NotStabilized");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNotStabilized);
  }
  // Growth by 10^3 over the stages sits inside the guard band.
  std::vector<Mat> band;
  for (int k = 0; k < 4; ++k) {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = std::pow(10.0, 5 * k);
    m(1, 1) = std::pow(10.0, k);
    band.push_back(m);
  }
  try {
    matrix_limit(MatrixSequenceSpec::explicit_list(band));
    FAIL("expected AmbiguousSubspace");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kAmbiguousSubspace);
  }
}

TEST_CASE("composition") {
  const auto pinf = PartialLinearMap::p_infinity(2);
  const auto qL = PartialLinearMap::line_limit(v2(1, 0));
  const auto id = PartialLinearMap::identity(2);
  CHECK(distance(partial_compose(qL, id), qL) < 1e-12);
  CHECK(partial_compose(qL, pinf).domain_dimension() == 0);
  CHECK(distance(partial_compose(pinf, pinf), pinf) < 1e-12);
  CHECK(distance(partial_compose(qL, qL), qL) < 1e-12);

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const auto a = random_partial_map(n, rng), b = random_partial_map(n, rng), c = random_partial_map(n, rng);
    const auto left = partial_compose(partial_compose(a, b), c);
    const auto right = partial_compose(a, partial_compose(b, c));
    CHECK(distance(left, right) < 1e-8);
  }
  for (int trial = 0; trial < 20; ++trial) {
    const auto [e, f] = random_commuting_pair(3, rng);
    CHECK(diagonal_product_discrepancy(e, f) < 1e-8);
  }
  // Opposite exponents: lim of the product is the identity, the composition is not.
  CHECK(diagonal_product_discrepancy({1, 0}, {-1, 0}) > 0.5);
}

TEST_CASE("linearity on the domain") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_partial_map(4, rng);
    if (p.domain_dimension() == 0) continue;
    const Vec u = p.basis() * Vec::NullaryExpr(p.domain_dimension(), [&] { return g(rng); });
    const Vec w = p.basis() * Vec::NullaryExpr(p.domain_dimension(), [&] { return g(rng); });
    const double c1 = g(rng), c2 = g(rng);
    const Vec lhs = *p(c1 * u + c2 * w);
    const Vec rhs = c1 * *p(u) + c2 * *p(w);
    CHECK((lhs - rhs).norm() < 1e-8);
  }
}

TEST_CASE("projective witness") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec> C;
    const int size = 1 + static_cast<int>(rng() % 50);
    for (int i = 0; i < size; ++i) C.push_back(v2(g(rng), g(rng)));
    C.push_back(v2(1, 0));  // forces s != 0
    C.push_back(v2(0, 0));
    const auto w = projective_witness(C);
    CHECK(w.agrees_on_C);
    CHECK(w.differs);
    CHECK(std::abs(w.direction(1)) > 0);
  }
}

TEST_CASE("affine catalog") {
  using K = CatalogElement::Kind;
  std::vector<Rational> grid;
  for (int k = -8; k <= 8; ++k) grid.push_back(Rational(k, 2));
  std::vector<ExtReal> samples{ExtReal::neg_inf(), ExtReal::pos_inf()};
  for (int k = -20; k <= 20; ++k) samples.push_back(ExtReal::finite(Rational(k, 4)));
  const auto cands = catalog_candidates(grid);

  const CatalogElement circle{K::kCircle, 0, Rational(1, 2)};
  CHECK(circle(ExtReal::finite(1)) == ExtReal::pos_inf());
  CHECK(circle(ExtReal::finite(Rational(1, 2))) == ExtReal::finite(0));
  CHECK(circle(ExtReal::finite(0)) == ExtReal::neg_inf());

  for (const auto& e : cands) {
    const auto res = affine_catalog_limit(e, samples, cands);
    CHECK_MESSAGE(res.matches_rule, e.to_string());
    CHECK_MESSAGE(res.pinned, e.to_string());
    if (e.kind == K::kCircle || e.kind == K::kInner) CHECK(res.pinning_points.size() == 3);
  }
  const auto inner = affine_catalog_limit({K::kInner, 0, Rational(3, 2)}, samples, cands);
  for (std::size_t i = 2; i < inner.limits.size(); ++i) {
    REQUIRE(inner.limits[i].kind == ExtReal::Kind::kFinite);
    CHECK(abs(inner.limits[i].value - Rational(3, 2)) < Rational(1, 1000));
  }
  // p_circ(0, s) tends to p_+inf as s decreases: on any finite sample the values
  // are +inf once s is below it.
  for (int s = -10; s >= -1000; s *= 10) {
    const CatalogElement e{K::kCircle, 0, s};
    for (std::size_t i = 2; i < samples.size(); ++i) CHECK(e(samples[i]) == ExtReal::pos_inf());
  }
  // Three points do not pin p_+inf: p_circ(0, -5) agrees with it at 0, 1, 2.
  const CatalogElement far{K::kCircle, 0, -5};
  const CatalogElement pinf{K::kPosInf, 0, 0};
  for (int x = 0; x < 3; ++x) CHECK(far(ExtReal::finite(x)) == pinf(ExtReal::finite(x)));
}
