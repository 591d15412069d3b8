#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "doctest.h"
#include "tame/systems.hpp"

using namespace tame;
using Float50 = boost::multiprecision::cpp_bin_float_50;

namespace {

Float50 golden50() { return (boost::multiprecision::sqrt(Float50(5)) - 1) / 2; }

// Fixed point of 0 -> 01, 1 -> 0.
std::vector<int> fibonacci_word(std::size_t n) {
  std::vector<int> w{0};
  while (w.size() < n) {
    std::vector<int> next;
    for (int c : w) {
      next.push_back(0);
      if (c == 0) next.push_back(1);
    }
    w = std::move(next);
  }
  w.resize(n);
  return w;
}

}  // namespace

TEST_CASE("split fibers") {
  auto g = RotationNumber::golden();
  auto st = SplitCircleSystem::sturmian(g);
  auto f0 = st.fiber(CirclePoint::zero(g));
  REQUIRE(f0.size() == 2);
  CHECK(f0[0].side == SideTag::kMinus);
  CHECK(f0[1].side == SideTag::kPlus);
  CHECK(st.fiber(CirclePoint::rational(g, Rational(1, 3))).size() == 1);
  SplitCircleSystem q(g, SplitSet::rationals());
  CHECK(q.fiber(CirclePoint::rational(g, Rational(1, 3))).size() == 2);
  for (int n = -50; n <= 50; ++n) CHECK(st.fiber(CirclePoint::orbit(g, n)).size() == 2);
}

TEST_CASE("split order: minus immediately precedes plus") {
  auto g = RotationNumber::golden();
  auto st = SplitCircleSystem::sturmian(g);
  std::mt19937_64 rng(3);
  std::vector<SplitPoint> sample;
  for (int n = -30; n <= 30; ++n)
    for (auto p : st.fiber(CirclePoint::orbit(g, n))) sample.push_back(p);
  for (int i = 0; i < 100; ++i)
    sample.push_back(st.point(CirclePoint::rational(g, Rational(std::uniform_int_distribution<int>(0, 9999)(rng), 10000))));
  for (int n = -30; n <= 30; ++n) {
    auto pair = st.fiber(CirclePoint::orbit(g, n));
    CHECK(pair[0] < pair[1]);
    for (const auto& s : sample) CHECK_FALSE((pair[0] < s && s < pair[1]));
  }
}

TEST_CASE("Sturmian coding matches direct evaluation and the Fibonacci word") {
  auto g = RotationNumber::golden();
  auto st = SplitCircleSystem::sturmian(g);
  SplitPoint start{CirclePoint::zero(g), SideTag::kPlus};
  auto w = st.coding_word(start, 0, 7);
  CHECK(w == std::vector<int>{1, 0, 1, 0, 1, 1, 0, 1});

  const Float50 a = golden50();
  auto long_word = st.coding_word(start, 0, 2000);
  for (std::size_t n = 2; n < long_word.size(); ++n) {
    Float50 v = a * n;
    v -= boost::multiprecision::floor(v);
    CHECK(long_word[n] == (v < a ? 1 : 0));
  }
  // From n = 2 on, the coding is the complement of the Fibonacci word.
  auto fib = fibonacci_word(long_word.size() - 2);
  for (std::size_t i = 0; i < fib.size(); ++i) CHECK(long_word[i + 2] == 1 - fib[i]);
}

TEST_CASE("full arc codes all ones; plain endpoint is undecidable") {
  auto g = RotationNumber::golden();
  CodingArc full{{CirclePoint::zero(g), SideTag::kPlain}, {CirclePoint::zero(g), SideTag::kPlain}, true};
  SplitCircleSystem s(g, SplitSet::orbit(), full);
  auto w = s.coding_word({CirclePoint::rational(g, Rational(1, 5)), SideTag::kPlain}, -5, 5);
  CHECK(w == std::vector<int>(11, 1));
  auto rot = SplitCircleSystem::rotation(g);
  CHECK_THROWS_AS(rot.symbol({CirclePoint::zero(g), SideTag::kPlain}), Error);
  try {
    rot.symbol({CirclePoint::zero(g), SideTag::kPlain});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kBoundaryUndecidable);
  }
}

TEST_CASE("coding is shift-equivariant") {
  auto g = RotationNumber::golden();
  auto st = SplitCircleSystem::sturmian(g);
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    std::int64_t a = std::uniform_int_distribution<std::int64_t>(-100, 100)(rng);
    Rational b(std::uniform_int_distribution<int>(0, 996)(rng), 997);
    SplitPoint x = st.point(CirclePoint(g, a, b), t % 2 ? SideTag::kMinus : SideTag::kPlus);
    const std::int64_t N = std::uniform_int_distribution<std::int64_t>(1, 50)(rng);
    auto lhs = st.coding_word(st.shift(x, 1), -N, N);
    auto rhs = st.coding_word(x, -N + 1, N + 1);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("asymptotic defects") {
  auto g = RotationNumber::golden();
  auto st = SplitCircleSystem::sturmian(g);
  auto z = st.fiber(CirclePoint::zero(g));
  auto d = asymptotic_defect(st, z[0], z[1], -20, 20);
  CHECK(d == std::vector<std::int64_t>{0, 1});
  CHECK(asymptotic_defect(st, z[0], z[0], -20, 20).empty());

  CosSystem cs(g);
  auto dd = asymptotic_defect(cs, cs.over_zero(2.0), cs.over_zero(0.3), -20, 20);
  CHECK(dd == std::vector<std::int64_t>{0});
}

TEST_CASE("cos system values") {
  auto g = RotationNumber::golden();
  CosSystem cs(g);
  CHECK(cs.value(cs.x0(), 0) == 0.0);
  CHECK(cos_system_F(0.5L) == doctest::Approx(1.0));
  CHECK(cos_system_F(0.75L) == doctest::Approx(1.5));
  CHECK(cos_system_F(0.25L) == doctest::Approx(1.0));  // cos(8 pi)
  CHECK(cs.value(cs.x0(), 1) == doctest::Approx(2 * 0.6180339887498949));
  // Shifting moves the special coordinate with the point.
  auto y = cs.shift(cs.over_zero(-0.5), 3);
  CHECK(cs.value(y, -3) == -0.5);
}

TEST_CASE("cut-and-project windows") {
  auto g = RotationNumber::golden();
  // [0, alpha) reproduces the Sturmian coding from 0 (plain start).
  auto iv = CutProjectCoding::intervals(
      g, {{CirclePoint::zero(g), CirclePoint::orbit(g, 1)}}, CirclePoint::zero(g));
  auto st = SplitCircleSystem::sturmian(g);
  auto w1 = iv.coding_word(2, 300);
  auto w2 = st.coding_word({CirclePoint::zero(g), SideTag::kPlus}, 2, 300);
  CHECK(w1 == w2);

  auto cw = CutProjectCoding::cantor(g, Rational(1, 2), 4);
  CHECK(cw.arcs().size() == 15);
  // Deleted arcs are pairwise disjoint.
  for (std::size_t i = 0; i + 1 < cw.arcs().size(); ++i)
    CHECK(cw.arcs()[i].hi < cw.arcs()[i + 1].lo);
  // Centres are deleted, so the coding has zeros there.
  CHECK(cw.symbol_at(1) == 0);
  CHECK(cw.symbol_at(0) == 1);
}

TEST_CASE("semicocycle fibers") {
  auto f = SemicocycleCascade::fibers(6, 20);
  CHECK(f == std::vector<std::size_t>{1, 2, 3, 4, 5, 6});
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) CHECK(SemicocycleCascade::fiber_cardinality(rng(), 20) == 1);
  CHECK_THROWS_AS(SemicocycleCascade::fibers(6, 5), Error);
  // Fiber counts grow with depth and settle at k.
  for (int k = 1; k <= 6; ++k) {
    std::size_t prev = 0;
    for (int depth = k + 1; depth <= 30; ++depth) {
      auto c = SemicocycleCascade::fiber_cardinality(SemicocycleCascade::marked_point(k), depth);
      CHECK(c >= prev);
      prev = c;
    }
    CHECK(prev == static_cast<std::size_t>(k));
  }
  // f is constant on shells B_{n,k} \ B_{n,k+1}.
  auto y3 = SemicocycleCascade::marked_point(3);
  const std::uint64_t shell = y3 ^ (std::uint64_t{1} << 5);  // agrees on 5 digits: k = 2
  CHECK(SemicocycleCascade::value(shell, 20) == doctest::Approx(2.0 / 9));
  CHECK(SemicocycleCascade::value(shell ^ (std::uint64_t{1} << 12), 20) == doctest::Approx(2.0 / 9));
}

TEST_CASE("coding words agree with exact symbols") {
  std::mt19937_64 rng(41);
  for (auto alpha : {RotationNumber::golden(), RotationNumber::silver()}) {
    const auto sys = SplitCircleSystem::sturmian(alpha);
    std::vector<SplitPoint> pts;
    for (int i = 0; i < 200; ++i) {
      const Rational b(static_cast<long long>(rng() % 10007), 10007);
      pts.push_back(sys.point(CirclePoint::rational(alpha, b)));
      // Near the arc ends: orbit points, their sides and tiny offsets.
      const auto y = CirclePoint::orbit(alpha, static_cast<std::int64_t>(rng() % 61) - 30);
      pts.push_back(sys.point(y, SideTag::kMinus));
      pts.push_back(sys.point(y, SideTag::kPlus));
      pts.push_back(sys.point(y + Rational(1, 1LL << 45)));
      pts.push_back(sys.point(y + Rational(-1, 1LL << 45)));
    }
    for (const auto& x : pts) {
      const auto w = sys.coding_word(x, -40, 40);
      for (std::int64_t n = -40; n <= 40; ++n) CHECK(w[static_cast<std::size_t>(n + 40)] == sys.symbol(sys.shift(x, n)));
    }
  }
}
