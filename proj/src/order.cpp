#include "tame/order.hpp"

#include <algorithm>
#include <regex>
#include <set>
#include <sstream>

namespace tame::order {

std::string to_string(const DomainPoint& p) {
  std::ostringstream out;
  out << p.x.numerator();
  if (p.x.denominator() != 1) out << '/' << p.x.denominator();
  if (p.side == Side::kMinus) out << '-';
  if (p.side == Side::kPlus) out << '+';
  return out.str();
}

MonotoneStepMap::MonotoneStepMap(std::vector<Breakpoint> breakpoints) : bps_(std::move(breakpoints)) {
  std::sort(bps_.begin(), bps_.end(), [](const Breakpoint& a, const Breakpoint& b) { return a.x < b.x; });
  for (std::size_t i = 0; i < bps_.size(); ++i) {
    if (bps_[i].x < Q(0) || bps_[i].x > Q(1)) throw Error(ErrorKind::kInvalidArgument, "breakpoints must lie in [0, 1]");
    if (i > 0 && bps_[i].x == bps_[i - 1].x) throw Error(ErrorKind::kInvalidArgument, "duplicate breakpoint");
  }
  if (bps_.empty()) throw Error(ErrorKind::kInvalidArgument, "a step map needs at least one breakpoint");
  if (bps_.front().x != Q(0)) {
    const Q v = bps_.front().left;
    bps_.insert(bps_.begin(), Breakpoint{0, v, v, v});
  }
  if (bps_.back().x != Q(1)) {
    const Q v = bps_.back().right;
    bps_.push_back(Breakpoint{1, v, v, v});
  }
  std::vector<Q> seq;
  for (const auto& b : bps_) {
    seq.push_back(b.left);
    seq.push_back(b.point);
    seq.push_back(b.right);
  }
  bool up = true, down = true;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (seq[i] < seq[i - 1]) up = false;
    if (seq[i] > seq[i - 1]) down = false;
  }
  if (!up && !down) {
    for (const auto& b : bps_) {
      const Q lo = std::min(b.left, b.right), hi = std::max(b.left, b.right);
      if (b.point < lo || b.point > hi) {
        std::ostringstream msg;
        msg << "f(a) outside [f(a-), f(a+)] at a = " << b.x << "; not monotone";
        throw Error(ErrorKind::kInvalidArgument, msg.str());
      }
    }
    throw Error(ErrorKind::kInvalidArgument, "breakpoint values are not monotone");
  }
  direction_ = up ? Direction::kIncreasing : Direction::kDecreasing;
}

MonotoneStepMap MonotoneStepMap::identity() {
  return MonotoneStepMap({Breakpoint{0, 0, 0, 0}, Breakpoint{1, 1, 1, 1}});
}

MonotoneStepMap MonotoneStepMap::staircase(const std::vector<Q>& jumps, const std::vector<Q>& point_values) {
  std::vector<Q> xs = jumps;
  std::sort(xs.begin(), xs.end());
  const long long k = static_cast<long long>(xs.size());
  std::vector<Breakpoint> bps;
  bps.push_back({0, 0, 0, 0});
  for (long long i = 0; i < k; ++i) {
    const Q left(i, k), right(i + 1, k);
    const Q point = static_cast<std::size_t>(i) < point_values.size() ? point_values[static_cast<std::size_t>(i)] : left;
    bps.push_back({xs[static_cast<std::size_t>(i)], left, point, right});
  }
  bps.push_back({1, 1, 1, 1});
  return MonotoneStepMap(std::move(bps));
}

namespace {

Q parse_q(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Q(std::stoll(s));
    return Q(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  } catch (const std::exception&) {
    throw Error(ErrorKind::kInvalidArgument, "bad rational '" + s + "'");
  }
}

}  // namespace

MonotoneStepMap MonotoneStepMap::parse(const std::string& text) {
  static const std::regex item(R"(\(\s*([-0-9/]+)\s*;\s*([-0-9/]+)\s*,\s*([-0-9/]+)\s*,\s*([-0-9/]+)\s*\))");
  std::vector<Breakpoint> bps;
  for (std::sregex_iterator it(text.begin(), text.end(), item), end; it != end; ++it) {
    bps.push_back({parse_q((*it)[1]), parse_q((*it)[2]), parse_q((*it)[3]), parse_q((*it)[4])});
  }
  if (bps.empty()) throw Error(ErrorKind::kInvalidArgument, "no `(x; left,point,right)` triples in map literal");
  return MonotoneStepMap(std::move(bps));
}

Q MonotoneStepMap::operator()(const DomainPoint& p) const {
  if (p.x < Q(0) || p.x > Q(1)) throw Error(ErrorKind::kInvalidArgument, "point outside [0, 1]");
  auto it = std::lower_bound(bps_.begin(), bps_.end(), p.x, [](const Breakpoint& b, const Q& x) { return b.x < x; });
  if (it != bps_.end() && it->x == p.x) {
    switch (p.side) {
      case Side::kMinus: return it->left;
      case Side::kPlain: return it->point;
      case Side::kPlus: return it->right;
    }
  }
  const Breakpoint& hi = *it;
  const Breakpoint& lo = *(it - 1);
  return lo.right + (hi.left - lo.right) * (p.x - lo.x) / (hi.x - lo.x);
}

std::pair<Q, Q> MonotoneStepMap::one_sided_limits(const Q& a) const {
  return {(*this)(DomainPoint{a, Side::kMinus}), (*this)(DomainPoint{a, Side::kPlus})};
}

std::vector<Q> MonotoneStepMap::discontinuities() const {
  std::vector<Q> out;
  for (const auto& b : bps_) {
    const bool at_zero = b.x == Q(0), at_one = b.x == Q(1);
    const bool jump = !at_zero && !at_one && b.left != b.right;
    const bool left_gap = !at_zero && b.point != b.left;
    const bool right_gap = !at_one && b.point != b.right;
    if (jump || left_gap || right_gap) out.push_back(b.x);
  }
  return out;
}

std::vector<DomainPoint> OrderedDomain::dense_sample() const {
  std::vector<DomainPoint> out;
  if (kind == Kind::kFiniteChain) {
    for (const auto& q : chain) out.push_back({q, Side::kPlain});
  } else {
    const long long n = 1LL << dyadic_level;
    std::set<Q> splits(split_points.begin(), split_points.end());
    for (long long k = 0; k <= n; ++k) {
      const Q x(k, n);
      if (!splits.count(x)) out.push_back({x, Side::kPlain});
    }
    for (const auto& s : split_points) {
      out.push_back({s, Side::kMinus});
      out.push_back({s, Side::kPlus});
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<DomainPoint> singular_points(const OrderedDomain& domain) {
  std::vector<DomainPoint> out;
  if (domain.kind == OrderedDomain::Kind::kFiniteChain) {
    for (const auto& q : domain.chain) out.push_back({q, Side::kPlain});
  } else {
    for (const auto& s : domain.split_points) {
      out.push_back({s, Side::kMinus});
      out.push_back({s, Side::kPlus});
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

std::vector<DomainPoint> probe_grid(const OrderedDomain& domain, int level) {
  OrderedDomain fine = domain;
  fine.dyadic_level = level;
  if (domain.kind == OrderedDomain::Kind::kFiniteChain) return domain.dense_sample();
  return fine.dense_sample();
}

bool is_split(const OrderedDomain& d, const Q& x) {
  return std::find(d.split_points.begin(), d.split_points.end(), x) != d.split_points.end();
}

}  // namespace

std::vector<DomainPoint> helly_determining_set(const MonotoneStepMap& f, const OrderedDomain& domain,
                                               int probe_level) {
  std::vector<DomainPoint> C = domain.dense_sample();
  for (const auto& s : singular_points(domain)) C.push_back(s);
  const auto grid = probe_grid(domain, probe_level);
  for (const Q& d : f.discontinuities()) {
    if (is_split(domain, d)) {
      C.push_back({d, Side::kMinus});
      C.push_back({d, Side::kPlus});
    } else {
      C.push_back({d, Side::kPlain});
    }
    auto it = std::lower_bound(grid.begin(), grid.end(), DomainPoint{d, Side::kMinus});
    if (it != grid.begin()) C.push_back(*(it - 1));
    auto jt = std::upper_bound(grid.begin(), grid.end(), DomainPoint{d, Side::kPlus});
    if (jt != grid.end()) C.push_back(*jt);
  }
  std::sort(C.begin(), C.end());
  C.erase(std::unique(C.begin(), C.end()), C.end());
  return C;
}

DeterminationReport check_determination(const MonotoneStepMap& f, const OrderedDomain& domain, int probe_level,
                                        std::size_t adversaries, std::mt19937_64& rng) {
  DeterminationReport rep;
  rep.C = helly_determining_set(f, domain, probe_level);
  std::vector<DomainPoint> pts = probe_grid(domain, probe_level);
  pts.insert(pts.end(), rep.C.begin(), rep.C.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const bool inc = f.direction() == MonotoneStepMap::Direction::kIncreasing;
  // Work in increasing terms: flip values of decreasing maps.
  auto fv = [&](const DomainPoint& p) { return inc ? f(p) : -f(p); };
  std::vector<Q> target(pts.size());
  std::vector<bool> pinned(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    target[i] = fv(pts[i]);
    pinned[i] = std::binary_search(rep.C.begin(), rep.C.end(), pts[i]);
  }
  // Envelope [lo_i, hi_i] from the nearest pinned values on each side.
  std::vector<Q> lo(pts.size()), hi(pts.size());
  {
    Q last = target.front();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (pinned[i]) last = target[i];
      lo[i] = last;
    }
    Q next = target.back();
    for (std::size_t i = pts.size(); i-- > 0;) {
      if (pinned[i]) next = target[i];
      hi[i] = next;
    }
  }
  std::vector<std::size_t> free_idx;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (!pinned[i]) free_idx.push_back(i);

  for (std::size_t a = 0; a < adversaries; ++a) {
    std::vector<Q> v = target;
    if (a % 2 == 0 || free_idx.empty()) {
      // Random monotone map inside the envelope.
      Q prev = target.front();
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pinned[i]) {
          prev = v[i];
          continue;
        }
        const Q l = std::max(lo[i], prev), h = hi[i];
        switch (rng() % 3) {
          case 0: v[i] = l; break;
          case 1: v[i] = h; break;
          default: v[i] = (l + h) / 2; break;
        }
        prev = v[i];
      }
    } else {
      // Copy f and move one free point as far as monotonicity allows.
      const std::size_t i = free_idx[(a / 2) % free_idx.size()];
      const Q l = i > 0 ? v[i - 1] : lo[i];
      const Q h = i + 1 < pts.size() ? v[i + 1] : hi[i];
      v[i] = (rng() % 2) ? l : h;
    }
    ++rep.adversaries;
    bool agrees = true;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (pinned[i] && v[i] != target[i]) agrees = false;
    if (!agrees) continue;
    ++rep.agreeing_on_C;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (v[i] != target[i]) {
        ++rep.escaped;
        if (!rep.escape_point) rep.escape_point = pts[i];
        break;
      }
    }
  }
  return rep;
}

CircularCounterexample circular_counterexample(const std::vector<Q>& C, const Q& a) {
  auto norm = [](Q x) {
    const long long fl = x.numerator() >= 0 ? x.numerator() / x.denominator()
                                            : -((-x.numerator() + x.denominator() - 1) / x.denominator());
    return x - Q(fl);
  };
  std::set<Q> taken;
  for (const auto& c : C) taken.insert(norm(c));
  const Q an = norm(a);
  if (taken.count(an)) throw Error(ErrorKind::kInvalidArgument, "a must not lie in C");
  taken.insert(an);
  for (int level = 1; level < 62; ++level) {
    const long long den = 1LL << level;
    for (long long k = 1; k < den; k += 2) {
      const Q b(k, den);
      if (taken.count(b)) continue;
      CircularCounterexample out{an, b, true, false};
      auto p_a = [&](const Q&) { return an; };
      auto p_ab = [&](const Q& x) { return x == b ? b : an; };
      for (const auto& c : C)
        if (p_ab(norm(c)) != p_a(norm(c))) out.agrees_on_C = false;
      out.differs_at_b = p_ab(b) != p_a(b);
      return out;
    }
  }
  throw Error(ErrorKind::kNoWitness, "dyadic points exhausted");
}

std::vector<std::vector<Q>> helly_family_table(const std::vector<Q>& grid, const std::vector<Q>& pool) {
  std::vector<std::vector<Q>> rows;
  rows.emplace_back(pool.size(), Q(0));
  for (const auto& z : grid) {
    std::vector<Q> row;
    for (const auto& x : pool) row.push_back(x == z ? Q(1, 2) : Q(0));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace tame::order
