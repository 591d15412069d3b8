#include "tame/exact_arith.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

namespace tame {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kInternal: return "Internal";
    case ErrorKind::kSideUnreachable: return "SideUnreachable";
    case ErrorKind::kBoundaryUndecidable: return "BoundaryUndecidable";
    case ErrorKind::kDepthInsufficient: return "DepthInsufficient";
    case ErrorKind::kNotStabilized: return "NotStabilized";
    case ErrorKind::kSampleMismatch: return "SampleMismatch";
    case ErrorKind::kNotInIdeal: return "NotInIdeal";
    case ErrorKind::kNoWitness: return "NoWitness";
    case ErrorKind::kBudgetExceeded: return "BudgetExceeded";
    case ErrorKind::kAmbiguousSubspace: return "AmbiguousSubspace";
    case ErrorKind::kDepthExhausted: return "DepthExhausted";
    case ErrorKind::kUnknownSeries: return "UnknownSeries";
  }
  return "Unknown";
}

namespace {

constexpr std::size_t kTableSize = 160;
constexpr std::size_t kMaxRefinements = 10000;
// The long-double evaluation below is accurate to a few 1e-19; anything
// closer to a decision boundary than this goes to exact arithmetic.
constexpr long double kFilter = 1e-15L;

BigInt floor_div(const BigInt& num, const BigInt& den) {
  BigInt q = num / den;
  if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
  return q;
}

BigInt floor_of(const Rational& r) {
  return floor_div(boost::multiprecision::numerator(r), boost::multiprecision::denominator(r));
}

long double to_ld(const Rational& r) { return r.convert_to<long double>(); }

}  // namespace

struct RotationNumber::Data {
  std::vector<std::int64_t> prefix;
  std::vector<std::int64_t> period;
  std::vector<Convergent> table;
  long double hi = 0;  // alpha ~ hi + lo
  long double lo = 0;

  std::int64_t quotient(std::size_t i) const {
    if (i <= prefix.size()) return prefix[i - 1];
    return period[(i - 1 - prefix.size()) % period.size()];
  }
};

RotationNumber::RotationNumber(std::vector<std::int64_t> prefix, std::vector<std::int64_t> period) {
  if (period.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                "continued fraction needs a nonempty periodic tail (alpha must be irrational)");
  }
  for (auto a : prefix)
    if (a < 1) throw Error(ErrorKind::kInvalidArgument, "partial quotients must be >= 1");
  for (auto a : period)
    if (a < 1) throw Error(ErrorKind::kInvalidArgument, "partial quotients must be >= 1");

  auto data = std::make_shared<Data>();
  data->prefix = std::move(prefix);
  data->period = std::move(period);
  data->table.reserve(kTableSize);
  BigInt p_prev = 1, q_prev = 0;
  BigInt p = 0, q = 1;
  data->table.push_back({p, q});
  for (std::size_t i = 1; i < kTableSize; ++i) {
    BigInt a = data->quotient(i);
    BigInt p_next = a * p + p_prev;
    BigInt q_next = a * q + q_prev;
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
    data->table.push_back({p, q});
  }
  const auto& last = data->table.back();
  Rational value(last.p, last.q);
  data->hi = to_ld(value);
  data->lo = to_ld(value - Rational(data->hi));
  data_ = std::move(data);
}

RotationNumber RotationNumber::golden() { return RotationNumber({}, {1}); }
RotationNumber RotationNumber::silver() { return RotationNumber({}, {2}); }

RotationNumber RotationNumber::parse(std::string_view text) {
  auto fail = [&](const char* why) {
    return Error(ErrorKind::kInvalidArgument,
                 std::string("bad continued fraction '") + std::string(text) + "': " + why);
  };
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.rfind("cf:[", 0) != 0 || s.back() != ']') throw fail("expected cf:[0;...]");
  s = s.substr(4, s.size() - 5);
  auto semi = s.find(';');
  if (semi == std::string::npos || s.substr(0, semi) != "0") throw fail("integer part must be 0");
  std::string body = s.substr(semi + 1);

  std::vector<std::int64_t> prefix, period;
  bool in_period = false, saw_period = false, ellipsis = false;
  std::string token;
  auto flush = [&]() {
    if (token.empty()) return;
    std::int64_t v = 0;
    try {
      v = std::stoll(token);
    } catch (...) {
      throw fail("non-integer partial quotient");
    }
    (in_period ? period : prefix).push_back(v);
    token.clear();
  };
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (body.compare(i, 3, "...") == 0) {
      flush();
      if (i + 3 != body.size()) throw fail("'...' must end the expansion");
      ellipsis = true;
      break;
    }
    if (c == '(') {
      if (in_period || saw_period) throw fail("only one period allowed");
      flush();
      in_period = true;
    } else if (c == ')') {
      if (!in_period) throw fail("unbalanced ')'");
      flush();
      in_period = false;
      saw_period = true;
    } else if (c == ',') {
      flush();
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') {
      if (saw_period) throw fail("quotients after the period");
      token.push_back(c);
    } else {
      throw fail("unexpected character");
    }
  }
  flush();
  if (in_period) throw fail("unbalanced '('");
  if (ellipsis) {
    if (saw_period || prefix.empty()) throw fail("'...' needs a preceding quotient");
    period.push_back(prefix.back());
    prefix.pop_back();
  }
  if (period.empty()) throw fail("missing periodic tail");
  return RotationNumber(std::move(prefix), std::move(period));
}

std::string RotationNumber::to_string() const {
  std::ostringstream out;
  out << "cf:[0;";
  bool first = true;
  for (auto a : data_->prefix) {
    if (!first) out << ',';
    out << a;
    first = false;
  }
  if (!first) out << ',';
  out << '(';
  for (std::size_t i = 0; i < data_->period.size(); ++i) {
    if (i) out << ',';
    out << data_->period[i];
  }
  out << ")]";
  return out.str();
}

std::int64_t RotationNumber::partial_quotient(std::size_t i) const {
  if (i == 0) throw Error(ErrorKind::kInvalidArgument, "partial quotients are indexed from 1");
  return data_->quotient(i);
}

const Convergent& RotationNumber::cached_convergent(std::size_t i) const { return data_->table.at(i); }
std::size_t RotationNumber::cached_count() const { return data_->table.size(); }

Convergent RotationNumber::convergent(std::size_t i) const {
  if (i < data_->table.size()) return data_->table[i];
  Convergent prev = data_->table[data_->table.size() - 2];
  Convergent cur = data_->table.back();
  for (std::size_t j = data_->table.size(); j <= i; ++j) {
    BigInt a = data_->quotient(j);
    Convergent next{a * cur.p + prev.p, a * cur.q + prev.q};
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

std::vector<Rational> RotationNumber::convergents(std::size_t k) const {
  std::vector<Rational> out;
  out.reserve(k);
  for (std::size_t i = 1; i <= k; ++i) {
    const Convergent c = convergent(i);
    out.emplace_back(c.p, c.q);
  }
  return out;
}

long double RotationNumber::approx() const { return data_->hi + data_->lo; }
long double RotationNumber::data_hi() const { return data_->hi; }
long double RotationNumber::data_lo() const { return data_->lo; }
const std::vector<std::int64_t>& RotationNumber::prefix() const { return data_->prefix; }
const std::vector<std::int64_t>& RotationNumber::period() const { return data_->period; }

bool RotationNumber::operator==(const RotationNumber& other) const {
  if (data_ == other.data_) return true;
  // Compare normalized expansions over a window long enough to cover both.
  std::size_t n = std::max(data_->prefix.size(), other.data_->prefix.size()) +
                  2 * data_->period.size() * other.data_->period.size();
  for (std::size_t i = 1; i <= n; ++i)
    if (data_->quotient(i) != other.data_->quotient(i)) return false;
  return true;
}

namespace {

// a*alpha + r in long double, organized so that the large integer parts
// cancel exactly before the small parts are added.
long double approx_raw(const RotationNumber& alpha, std::int64_t a, const Rational& r,
                       long double hi, long double lo) {
  (void)alpha;
  const long double al = static_cast<long double>(a);
  const long double p = al * hi;
  const long double e = std::fmal(al, hi, -p);
  const BigInt k = floor_of(r);
  const long double kl = k.convert_to<long double>();
  const long double f = to_ld(r - Rational(k));
  return ((p + kl) + e) + (al * lo + f);
}

int exact_sign_at(std::int64_t a, const Rational& r, const Convergent& c) {
  // sign(a*p/q + n/d) = sign(a*p*d + n*q) since q, d > 0.
  const BigInt& n = boost::multiprecision::numerator(r);
  const BigInt& d = boost::multiprecision::denominator(r);
  BigInt v = BigInt(a) * c.p * d + n * c.q;
  return v.sign();
}

}  // namespace

int sign_of(const RotationNumber& alpha, std::int64_t a, const Rational& r) {
  if (a == 0) return r.sign();
  const long double v = approx_raw(alpha, a, r, alpha.data_hi(), alpha.data_lo());
  if (v > kFilter) return 1;
  if (v < -kFilter) return -1;
  // alpha lies strictly between consecutive convergents; a*x + r is monotone
  // in x, so equal strict signs at both ends decide the sign at alpha.
  Convergent prev = alpha.convergent(0);
  for (std::size_t k = 1; k <= kMaxRefinements; ++k) {
    Convergent cur = k < alpha.cached_count() ? alpha.cached_convergent(k) : alpha.convergent(k);
    int s0 = exact_sign_at(a, r, prev);
    int s1 = exact_sign_at(a, r, cur);
    if (s0 == s1 && s0 != 0) return s0;
    prev = std::move(cur);
  }
  throw Error(ErrorKind::kInternal, "sign refinement exceeded 10^4 steps");
}

std::pair<Rational, Rational> enclose(const RotationNumber& alpha, std::int64_t a,
                                      const Rational& r, std::size_t k) {
  const Convergent c0 = alpha.convergent(k);
  const Convergent c1 = alpha.convergent(k + 1);
  Rational v0 = Rational(BigInt(a) * c0.p, c0.q) + r;
  Rational v1 = Rational(BigInt(a) * c1.p, c1.q) + r;
  if (v1 < v0) std::swap(v0, v1);
  return {v0, v1};
}

CirclePoint::CirclePoint(RotationNumber alpha, std::int64_t a, Rational b)
    : alpha_(std::move(alpha)), a_(a), b_(std::move(b)) {
  const long double hi = alpha_.data_hi(), lo = alpha_.data_lo();
  if (a_ == 0) {
    b_ -= Rational(floor_of(b_));
  } else {
    long double v = approx_raw(alpha_, a_, b_, hi, lo);
    BigInt m = static_cast<long long>(std::floor(v));
    // Pin floor(a*alpha + b) exactly.
    while (sign_of(alpha_, a_, b_ - Rational(m)) < 0) --m;
    while (sign_of(alpha_, a_, b_ - Rational(m + 1)) >= 0) ++m;
    b_ -= Rational(m);
  }
  approx_ = approx_raw(alpha_, a_, b_, hi, lo);
  if (approx_ < 0) approx_ = 0;
  if (approx_ >= 1) approx_ = std::nextafter(1.0L, 0.0L);
}

bool CirclePoint::in_orbit_of_zero() const {
  return boost::multiprecision::denominator(b_) == 1;
}

CirclePoint CirclePoint::operator+(const CirclePoint& other) const {
  return {alpha_, a_ + other.a_, b_ + other.b_};
}
CirclePoint CirclePoint::operator-(const CirclePoint& other) const {
  return {alpha_, a_ - other.a_, b_ - other.b_};
}
CirclePoint CirclePoint::operator-() const { return {alpha_, -a_, -b_}; }
CirclePoint CirclePoint::operator+(const Rational& shift) const { return {alpha_, a_, b_ + shift}; }
CirclePoint CirclePoint::translate(std::int64_t n) const { return {alpha_, a_ + n, b_}; }

std::string CirclePoint::to_string() const {
  std::ostringstream out;
  out << a_ << "a";
  if (b_.sign() >= 0) out << '+';
  out << b_;
  return out.str();
}

Ordering compare(const CirclePoint& x, const CirclePoint& y) {
  if (x.alpha_coefficient() == y.alpha_coefficient() && x.offset() == y.offset())
    return Ordering::kEqual;
  const long double d = x.approx() - y.approx();
  int s;
  if (d > kFilter) {
    s = 1;
  } else if (d < -kFilter) {
    s = -1;
  } else {
    s = sign_of(x.alpha(), x.alpha_coefficient() - y.alpha_coefficient(), x.offset() - y.offset());
  }
  return s < 0 ? Ordering::kLess : (s > 0 ? Ordering::kGreater : Ordering::kEqual);
}

long double circle_distance(const CirclePoint& x, const CirclePoint& y) {
  long double d = std::fabs(x.approx() - y.approx());
  return std::min(d, 1.0L - d);
}

Rational circle_distance_bound(const CirclePoint& x, const CirclePoint& y) {
  if (x == y) return Rational(0);
  const std::int64_t a = x.alpha_coefficient() - y.alpha_coefficient();
  const Rational r = x.offset() - y.offset();
  // d = x - y in (-1, 1); distance = min(|d|, 1 - |d|).
  auto [lo, hi] = enclose(x.alpha(), a, r, 80);
  const int s = sign_of(x.alpha(), a, r);
  Rational abs_hi = s > 0 ? hi : -lo;
  Rational abs_lo = s > 0 ? lo : -hi;
  if (abs_lo.sign() < 0) abs_lo = 0;
  Rational bound = std::min(abs_hi, Rational(1) - abs_lo);
  return bound;
}

std::string_view to_string(Side side) { return side == Side::kBelow ? "below" : "above"; }

namespace {

// Signed error q_i*alpha - p_i has sign (-1)^i.
bool parity_matches(std::size_t i, Side side) {
  return side == Side::kAbove ? (i % 2 == 0) : (i % 2 == 1);
}

ApproachSequence orbit_approach(const CirclePoint& target, Side side, std::size_t depth) {
  const RotationNumber& alpha = target.alpha();
  // target = m*alpha exactly, with b = -floor(m*alpha).
  const std::int64_t m = target.alpha_coefficient();
  ApproachSequence seq{target, side, {}, {}};
  std::int64_t last = std::numeric_limits<std::int64_t>::min();
  for (std::size_t i = 0; seq.times.size() < depth; ++i) {
    if (i > kMaxRefinements) throw Error(ErrorKind::kSideUnreachable, "no convergent of the right parity");
    if (!parity_matches(i, side)) continue;
    const Convergent ci = alpha.convergent(i);
    const Convergent cn = alpha.convergent(i + 1);
    if (cn.q < 2) continue;  // |q_i*alpha - p_i| < 1/q_{i+1} must be below 1/2
    if (ci.q > BigInt(std::numeric_limits<std::int64_t>::max() / 2))
      throw Error(ErrorKind::kInvalidArgument, "approach depth overflows 64-bit times");
    const std::int64_t n = m + ci.q.convert_to<std::int64_t>();
    if (n <= 0 || n <= last) continue;
    seq.times.push_back(n);
    seq.error_bounds.emplace_back(BigInt(1), cn.q);
    last = n;
  }
  return seq;
}

ApproachSequence greedy_approach(const CirclePoint& target, Side side, std::size_t depth) {
  const RotationNumber& alpha = target.alpha();
  ApproachSequence seq{target, side, {}, {}};
  std::int64_t n = 0;
  // gap = target - n*alpha (below) or n*alpha - target (above), as a point in (0, 1).
  auto gap_of = [&](std::int64_t t) {
    CirclePoint here = CirclePoint::orbit(alpha, t);
    return side == Side::kBelow ? target - here : here - target;
  };
  CirclePoint gap = gap_of(n);
  std::size_t i = side == Side::kBelow ? 0 : 1;
  while (seq.times.size() < depth) {
    // Smallest convergent step of the right sign that still fits in the gap.
    std::size_t guard = 0;
    while (true) {
      if (++guard > kMaxRefinements) throw Error(ErrorKind::kSideUnreachable, "gap never fits a step");
      const Convergent ci = alpha.convergent(i);
      if (ci.q > BigInt(std::numeric_limits<std::int64_t>::max()))
        throw Error(ErrorKind::kInvalidArgument, "approach depth overflows 64-bit times");
      // |delta_i| = |q_i*alpha - p_i|; fits iff |delta_i| < gap.
      const std::int64_t q = ci.q.convert_to<std::int64_t>();
      const Rational p(ci.p);
      const int fits = side == Side::kBelow
                           ? sign_of(alpha, gap.alpha_coefficient() - q, gap.offset() + p)
                           : sign_of(alpha, gap.alpha_coefficient() + q, gap.offset() - p);
      if (fits > 0) break;
      i += 2;
    }
    const Convergent ci = alpha.convergent(i);
    const std::int64_t q = ci.q.convert_to<std::int64_t>();
    const Rational p(ci.p);
    const long double step = std::fabs(static_cast<long double>(q) * alpha.approx() -
                                       p.convert_to<long double>());
    std::int64_t c = std::max<std::int64_t>(1, static_cast<std::int64_t>(gap.approx() / step));
    auto fits_c = [&](std::int64_t cc) {
      return side == Side::kBelow
                 ? sign_of(alpha, gap.alpha_coefficient() - cc * q, gap.offset() + p * cc) > 0
                 : sign_of(alpha, gap.alpha_coefficient() + cc * q, gap.offset() - p * cc) > 0;
    };
    const std::int64_t c_max = (std::numeric_limits<std::int64_t>::max() - n) / q;
    if (c_max < 1) throw Error(ErrorKind::kInvalidArgument, "approach depth overflows 64-bit times");
    c = std::min(c, c_max);
    while (c > 1 && !fits_c(c)) --c;
    while (c < c_max && fits_c(c + 1)) ++c;
    n += c * q;
    gap = gap_of(n);
    seq.times.push_back(n);
    seq.error_bounds.push_back(circle_distance_bound(CirclePoint::orbit(alpha, n), target));
    i += 2;
  }
  return seq;
}

}  // namespace

ApproachSequence one_sided_approach(const CirclePoint& target, Side side, std::size_t depth) {
  if (depth == 0) throw Error(ErrorKind::kInvalidArgument, "approach depth must be >= 1");
  if (target.in_orbit_of_zero()) return orbit_approach(target, side, depth);
  return greedy_approach(target, side, depth);
}

}  // namespace tame
