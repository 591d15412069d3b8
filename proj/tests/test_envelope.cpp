#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tame/envelope.hpp"

using namespace tame;
using namespace tame::envelope;

namespace {

RotationNumber golden() { return RotationNumber::golden(); }

CirclePoint random_gamma(const RotationNumber& alpha, std::mt19937_64& rng) {
  // Mix of orbit points, rationals and orbit + rational.
  const std::int64_t a = static_cast<std::int64_t>(rng() % 41) - 20;
  const Rational b(static_cast<long long>(rng() % 997), 997);
  switch (rng() % 3) {
    case 0: return CirclePoint::orbit(alpha, a);
    case 1: return CirclePoint::rational(alpha, b);
    default: return CirclePoint(alpha, a, b);
  }
}

// Includes (k alpha - gamma)^- and (k alpha - gamma)^+ for |k| <= 5.
std::vector<SplitPoint> sample_for(const SplitCircleSystem& sys, const std::vector<CirclePoint>& gammas,
                                   std::size_t size = 500) {
  std::vector<SplitPoint> extra;
  for (const auto& gamma : gammas) {
    for (std::int64_t k = -5; k <= 5; ++k) {
      const auto y = CirclePoint::orbit(sys.alpha(), k) - gamma;
      extra.push_back(sys.point(y, SideTag::kMinus));
      extra.push_back(sys.point(y, SideTag::kPlus));
    }
  }
  return split_sample(sys, size, extra);
}

}  // namespace

TEST_CASE("coding distance and radius") {
  CHECK(coding_radius(1e-3) == 10);
  CHECK(coding_radius(0.5) == 1);
  CHECK_THROWS_AS(coding_radius(0), Error);
  const auto sys = SplitCircleSystem::sturmian(golden());
  const auto zero = CirclePoint::zero(golden());
  const auto lo = sys.point(zero, SideTag::kMinus), hi = sys.point(zero, SideTag::kPlus);
  CHECK(coding_distance(sys, lo, hi, 10) == 1.0);
  CHECK(coding_distance(sys, hi, hi, 10) == 0.0);
  // Far-apart generic points differ somewhere in a short window.
  const auto x = sys.point(CirclePoint::rational(golden(), Rational(1, 10)));
  const auto y = sys.point(CirclePoint::rational(golden(), Rational(1, 10) + Rational(1, 100)));
  CHECK(coding_distance(sys, x, y, 1) == 0.0);
  CHECK(coding_distance(sys, x, y, 40) > 0.0);
}

TEST_CASE("split sample") {
  const auto sys = SplitCircleSystem::sturmian(golden());
  const auto s = split_sample(sys, 100);
  CHECK(s.size() >= 100);
  CHECK(std::is_sorted(s.begin(), s.end()));
  CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
  const auto zero = CirclePoint::zero(golden());
  CHECK(std::find(s.begin(), s.end(), sys.point(zero, SideTag::kMinus)) != s.end());
  CHECK(std::find(s.begin(), s.end(), sys.point(zero, SideTag::kPlus)) != s.end());
}

TEST_CASE("one-sided limits on the Sturmian system") {
  const auto alpha = golden();
  const auto sys = SplitCircleSystem::sturmian(alpha);
  std::mt19937_64 rng(11);
  const double delta = 1e-3;
  for (int trial = 0; trial < 20; ++trial) {
    const auto gamma = random_gamma(alpha, rng);
    const auto side = trial % 2 ? Side::kAbove : Side::kBelow;
    const auto seq = one_sided_approach(gamma, side, 16);
    const auto sample = sample_for(sys, {gamma});
    CHECK(sample.size() >= 500);
    const auto p = limit_map(sys, Generator::approach(seq), sample, delta);
    CHECK(p.backend == Backend::kExact);
    CHECK(p.stabilized);
    CHECK(p.backend_gap <= delta);
    const auto c = classify(sys, p);
    REQUIRE(c.tag == ElementClass::Tag::kOneSided);
    CHECK(*c.gamma == gamma);
    CHECK(c.side == (side == Side::kAbove ? SideTag::kPlus : SideTag::kMinus));
    // Over (k alpha - gamma) the image lands on the requested side of k alpha.
    for (std::int64_t k = -5; k <= 5; ++k) {
      const auto y = CirclePoint::orbit(alpha, k) - gamma;
      for (auto s : {SideTag::kMinus, SideTag::kPlus}) {
        const auto it = std::find(sample.begin(), sample.end(), sys.point(y, s));
        REQUIRE(it != sample.end());
        const auto& img = p.images[static_cast<std::size_t>(it - sample.begin())];
        CHECK(img.base == CirclePoint::orbit(alpha, k));
        CHECK(img.side == c.side);
      }
    }
  }
}

TEST_CASE("constant generators are translations") {
  const auto sys = SplitCircleSystem::sturmian(golden());
  const auto sample = split_sample(sys, 60);
  for (std::int64_t m : {-3, 0, 1, 7}) {
    const auto p = limit_map(sys, Generator::constant(m), sample);
    CHECK(p.backend_gap == 0.0);
    const auto c = classify(sys, p);
    CHECK(c.tag == ElementClass::Tag::kTranslation);
    CHECK(c.n == m);
    CHECK_THROWS_AS(decompose_minimal(sys, p), Error);
  }
}

TEST_CASE("plain rotation limits are rotations") {
  const auto alpha = golden();
  const auto sys = SplitCircleSystem::rotation(alpha);
  const auto gamma = CirclePoint::rational(alpha, Rational(1, 3));
  const auto sample = split_sample(sys, 200);
  const auto p = limit_map(sys, Generator::approach(one_sided_approach(gamma, Side::kBelow, 16)), sample);
  CHECK(p.backend_gap <= 1e-3);
  const auto c = classify(sys, p);
  CHECK(c.tag == ElementClass::Tag::kRotation);
  CHECK(*c.gamma == gamma);
  CHECK(c.to_string().rfind("rotation(", 0) == 0);
}

TEST_CASE("non-monotone or empty generators") {
  const auto sys = SplitCircleSystem::sturmian(golden());
  const auto sample = split_sample(sys, 20);
  CHECK_THROWS_AS(limit_map(sys, Generator{}, sample), Error);
  CHECK_THROWS_AS(limit_map(sys, Generator{{5, 3, 8}, std::nullopt, std::nullopt}, sample), Error);
  CHECK_THROWS_AS(limit_map(sys, Generator::constant(1), {}), Error);
  // Alternating times without a rule do not settle.
  try {
    limit_map(sys, Generator{{1, 2, 3, 4}, std::nullopt, std::nullopt}, sample);
    FAIL("expected NotStabilized");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNotStabilized);
  }
}

TEST_CASE("composition laws") {
  const auto alpha = golden();
  const auto sys = SplitCircleSystem::sturmian(alpha);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = random_gamma(alpha, rng), h = random_gamma(alpha, rng);
    const auto sg = trial % 2 ? Side::kAbove : Side::kBelow;
    const auto sample = sample_for(sys, {g, h, g + h}, 80);
    const auto p = limit_map(sys, Generator::approach(one_sided_approach(g, sg, 16)), sample);
    const auto q = limit_map(sys, Generator::approach(one_sided_approach(h, Side::kAbove, 16)), sample);
    const auto t = limit_map(sys, Generator::constant(3), sample);

    const auto pq = compose(sys, p, q);
    auto c = classify(sys, pq);
    REQUIRE(c.tag == ElementClass::Tag::kOneSided);
    CHECK(*c.gamma == g + h);
    CHECK(c.side == (sg == Side::kAbove ? SideTag::kPlus : SideTag::kMinus));

    c = classify(sys, compose(sys, p, t));
    CHECK(*c.gamma == g.translate(3));
    c = classify(sys, compose(sys, t, q));
    CHECK(*c.gamma == h.translate(3));
    c = classify(sys, compose(sys, t, t));
    CHECK(c.tag == ElementClass::Tag::kTranslation);
    CHECK(c.n == 6);
  }
}

TEST_CASE("composition needs images inside the left sample") {
  const auto sys = SplitCircleSystem::sturmian(golden());
  const auto sample = split_sample(sys, 16);
  auto p = limit_map(sys, Generator::constant(1), sample);
  p.rule.reset();
  const auto q = limit_map(sys, Generator::constant(1000), sample);
  try {
    compose(sys, p, q);
    FAIL("expected SampleMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kSampleMismatch);
  }
}

TEST_CASE("minimal ideal coordinates round trip") {
  const auto alpha = golden();
  const auto sys = SplitCircleSystem::sturmian(alpha);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = random_gamma(alpha, rng);
    const auto side = trial % 2 ? Side::kAbove : Side::kBelow;
    const auto p = limit_map(sys, Generator::approach(one_sided_approach(g, side, 16)), sample_for(sys, {g}));
    const auto d = decompose_minimal(sys, p);
    CHECK(d.recomposes);
    CHECK(d.gamma == g);
    CHECK(*d.side == (side == Side::kAbove ? SideTag::kPlus : SideTag::kMinus));
  }
}

TEST_CASE("cos system: the [1/2, 1) branch gives 2") {
  const auto alpha = golden();
  const CosSystem sys(alpha);
  std::vector<CosPoint> sample{sys.x0()};
  for (int j = 1; j < 10; ++j) sample.push_back(sys.generic(CirclePoint::rational(alpha, Rational(j, 10))));
  const auto gen = Generator::approach(one_sided_approach(CirclePoint::zero(alpha), Side::kBelow, 16));
  const auto p = cos_limit_map(sys, gen, sample);
  REQUIRE(p.rule);
  REQUIRE(p.rule->epsilon);
  CHECK(*p.rule->epsilon == 2.0);
  CHECK(p.backend_gap <= 0.05);
  const auto d = decompose_minimal(sys, p);
  CHECK(d.recomposes);
  CHECK(*d.epsilon == 2.0);
}

TEST_CASE("cos system: fibre values over zero") {
  const auto alpha = golden();
  const CosSystem sys(alpha);
  std::vector<CosPoint> sample{sys.x0()};
  for (int j = 1; j < 6; ++j) sample.push_back(sys.generic(CirclePoint::rational(alpha, Rational(j, 7))));
  for (int i = 0; i <= 20; ++i) {
    const double t = -1.0 + i / 10.0;
    const auto p = cos_limit_map(sys, cos_fiber_approach(alpha, t), sample);
    REQUIRE(p.rule->epsilon);
    CHECK(std::abs(*p.rule->epsilon - t) <= 0.01);
  }
  CHECK_THROWS_AS(cos_fiber_approach(alpha, 1.5), Error);
}

TEST_CASE("cos system: v_eps v_eta = v_eps") {
  const auto alpha = golden();
  const CosSystem sys(alpha);
  std::vector<CosPoint> sample{sys.x0()};
  for (int j = 1; j < 6; ++j) sample.push_back(sys.generic(CirclePoint::rational(alpha, Rational(j, 7))));
  const auto a = cos_limit_map(sys, cos_fiber_approach(alpha, 0.3), sample);
  const auto b = cos_limit_map(sys, cos_fiber_approach(alpha, -0.6), sample);
  const auto ab = cos_compose(sys, a, b);
  CHECK(*ab.rule->epsilon == *a.rule->epsilon);
  CHECK(ab.rule->gamma->alpha_coefficient() == 0);
  CHECK(ab.rule->gamma->offset() == 0);
  const auto t = cos_limit_map(sys, Generator::constant(2), sample);
  CHECK_THROWS_AS(decompose_minimal(sys, t), Error);
  const auto ta = cos_compose(sys, t, a);
  CHECK(*ta.rule->gamma == CirclePoint::orbit(alpha, 2));
}

TEST_CASE("projective loxodromic limit") {
  const auto spec = linear::MatrixSequenceSpec::powers({{Rational(2), Rational(0)}, {Rational(0), Rational(1, 2)}});
  std::vector<ProjPoint> sample{ProjPoint::from(0, 1), ProjPoint::from(1, 0)};
  for (int k = 1; k < 12; ++k) sample.push_back(ProjPoint::angle(k * std::numbers::pi / 12 + 0.01));
  const auto p = projective_limit(spec, sample);
  const auto c = classify(p);
  CHECK(c.tag == ElementClass::Tag::kLoxodromic);
  // Oracle: eigenvectors of the generator.
  linear::Mat g(2, 2);
  g << 2, 0, 0, 0.5;
  Eigen::EigenSolver<linear::Mat> es(g);
  const auto vals = es.eigenvalues().real();
  const int big = std::abs(vals(0)) > std::abs(vals(1)) ? 0 : 1;
  const auto vb = es.eigenvectors().real().col(big), vs = es.eigenvectors().real().col(1 - big);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (i == 0)
      CHECK(proj_distance(p.images[i], ProjPoint::from(vs(0), vs(1))) < 1e-12);
    else
      CHECK(proj_distance(p.images[i], ProjPoint::from(vb(0), vb(1))) < 1e-12);
  }
  // A rotation never settles.
  const double th = 0.3;
  linear::Mat r(2, 2);
  r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  const auto rot = linear::MatrixSequenceSpec::explicit_list({r, r * r, r * r * r, r * r * r * r});
  CHECK_THROWS_AS(projective_limit(rot, sample), Error);
}

TEST_CASE("projective parabolic limit") {
  const auto spec = linear::MatrixSequenceSpec::powers({{Rational(1), Rational(1)}, {Rational(0), Rational(1)}});
  std::vector<ProjPoint> sample;
  for (int k = 1; k < 8; ++k) sample.push_back(ProjPoint::angle(k * 0.37));
  const auto p = projective_limit(spec, sample, 1e-1);
  CHECK(classify(p).tag == ElementClass::Tag::kParabolic);
}

TEST_CASE("determining sets") {
  // Rotation family: p_gamma on a pool of points; p_gamma is fixed by one value.
  const auto alpha = golden();
  std::vector<std::vector<std::string>> vals;
  std::vector<CirclePoint> pool;
  for (int j = 0; j < 8; ++j) pool.push_back(CirclePoint::rational(alpha, Rational(j, 8)));
  for (int g = 0; g < 6; ++g) {
    std::vector<std::string> row;
    for (const auto& x : pool) row.push_back((x + CirclePoint::orbit(alpha, g)).to_string());
    vals.push_back(row);
  }
  const auto labels = label_table(vals);
  for (std::size_t p = 0; p < labels.size(); ++p) {
    const auto d = determining_set(labels, p);
    CHECK(d.C.size() == 1);
    CHECK(d.exhaustive);
  }
  // Helly-type family: indicator rows e_i and the zero row. The zero row
  // needs every point.
  const int m = 6;
  std::vector<std::vector<int>> helly(m + 1, std::vector<int>(m, 0));
  for (int i = 0; i < m; ++i) helly[i][i] = 1;
  CHECK(determining_set(helly, m).C.size() == static_cast<std::size_t>(m));
  CHECK(determining_set(helly, 0).C.size() == 1);
  // Large pools use the greedy path.
  const int big = 30;
  std::vector<std::vector<int>> wide(big + 1, std::vector<int>(big, 0));
  for (int i = 0; i < big; ++i) wide[i][i] = 1;
  const auto d = determining_set(wide, big);
  CHECK_FALSE(d.exhaustive);
  CHECK(d.C.size() == static_cast<std::size_t>(big));
  CHECK(d.lower_bound == static_cast<std::size_t>(big));
  // Duplicates are rejected; a singleton family needs nothing.
  CHECK_THROWS_AS(determining_set({{1, 2}, {1, 2}}, 0), Error);
  CHECK(determining_set({{1, 2}}, 0).C.empty());
}

TEST_CASE("determining sets against brute force") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t pool = 6, members = 5;
    std::vector<std::vector<int>> t;
    while (t.size() < members) {
      std::vector<int> row(pool);
      for (auto& v : row) v = static_cast<int>(rng() % 3);
      if (std::find(t.begin(), t.end(), row) == t.end()) t.push_back(row);
    }
    for (std::size_t p = 0; p < members; ++p) {
      const auto d = determining_set(t, p);
      std::size_t best = pool + 1;
      for (unsigned mask = 0; mask < (1u << pool); ++mask) {
        bool ok = true;
        for (std::size_t o = 0; o < members && ok; ++o) {
          if (o == p) continue;
          bool sep = false;
          for (std::size_t j = 0; j < pool; ++j) sep = sep || ((mask >> j & 1) && t[o][j] != t[p][j]);
          ok = sep;
        }
        if (ok) best = std::min<std::size_t>(best, static_cast<std::size_t>(__builtin_popcount(mask)));
      }
      CHECK(d.C.size() == best);
    }
  }
}

TEST_CASE("no countable basis witnesses") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<linear::Vec> C;
    for (int i = 0; i < 5; ++i) {
      linear::Vec v(2);
      v << u(rng), u(rng);
      C.push_back(v);
    }
    const auto w = no_countable_basis_witness(C);
    CHECK(w.agrees_on_C);
    CHECK(w.differs);
  }
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<order::Q> C;
    for (int i = 0; i < 6; ++i) C.push_back(order::Q(static_cast<long long>(rng() % 64), 64));
    const order::Q a(static_cast<long long>(rng() % 63) * 2 + 1, 129);
    const auto w = no_countable_basis_witness(C, a);
    CHECK(w.agrees_on_C);
    CHECK(w.differs);
  }
}

TEST_CASE("Sorgenfrey isolation") {
  const auto alpha = golden();
  std::vector<CirclePoint> gammas;
  for (int i = 0; i < 100; ++i) gammas.push_back(CirclePoint::orbit(alpha, i));
  const auto prod = sorgenfrey_isolation_product(gammas);
  CHECK(prod.all_isolated);
  for (const auto& m : prod.members) CHECK(m.epsilon == Rational(1, 2));
  const auto circ = sorgenfrey_isolation_circle(gammas);
  CHECK_FALSE(circ.all_isolated);
  std::size_t failed = 0;
  for (const auto& m : circ.members) failed += !m.isolated;
  CHECK(failed > 50);
}

TEST_CASE("rigidity") {
  const auto silver = RotationNumber::silver();
  const auto rot = rotation_rigidity(silver, 20, 1000);
  REQUIRE(rot.along_denominators.size() == 20);
  for (std::size_t i = 1; i < rot.along_denominators.size(); ++i)
    CHECK(rot.along_denominators[i].sup_distance < rot.along_denominators[i - 1].sup_distance);
  CHECK(rot.along_denominators.back().sup_distance < 1e-7);
  // ||q_k alpha|| ~ 1 / (2 sqrt 2 q_k) for silver.
  const auto& last = rot.along_denominators.back();
  CHECK(std::abs(last.sup_distance * static_cast<double>(last.n) * 2 * std::sqrt(2.0) - 1) < 1e-3);
  CHECK(rot.minimum < 1e-3);

  const auto sys = SplitCircleSystem::sturmian(silver);
  const auto split = split_rigidity(sys, 200, split_sample(sys, 100));
  CHECK(split.floor == 1.0);
  CHECK(split.minimum >= split.floor);
}
