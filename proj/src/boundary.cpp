#include "tame/boundary.hpp"

#include <cmath>

namespace tame::boundary {

namespace {

void check_letter(char c) {
  if (c != 'a' && c != 'b' && c != 'A' && c != 'B')
    throw Error(ErrorKind::kInvalidArgument, std::string("letter '") + c + "' is not one of a, b, A, B");
}

std::string primitive_root(const std::string& w) {
  const std::size_t n = w.size();
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d) continue;
    bool ok = true;
    for (std::size_t i = d; i < n && ok; ++i) ok = w[i] == w[i - d];
    if (ok) return w.substr(0, d);
  }
  return w;
}

std::string rotate_left(const std::string& w, std::size_t r) {
  r %= w.size();
  return w.substr(r) + w.substr(0, r);
}

const char kLetters[4] = {'a', 'b', 'A', 'B'};

}  // namespace

char inverse(char letter) {
  switch (letter) {
    case 'a': return 'A';
    case 'A': return 'a';
    case 'b': return 'B';
    case 'B': return 'b';
  }
  check_letter(letter);
  return letter;
}

std::string reduce(std::string_view letters) {
  std::string out;
  for (char c : letters) {
    if (c == ' ') continue;
    check_letter(c);
    if (!out.empty() && out.back() == inverse(c))
      out.pop_back();
    else
      out.push_back(c);
  }
  return out;
}

bool is_reduced(std::string_view word) {
  for (std::size_t i = 0; i < word.size(); ++i) {
    check_letter(word[i]);
    if (i > 0 && word[i] == inverse(word[i - 1])) return false;
  }
  return true;
}

std::string inverse_word(std::string_view word) {
  std::string out;
  for (auto it = word.rbegin(); it != word.rend(); ++it) out.push_back(inverse(*it));
  return out;
}

BoundaryPoint::BoundaryPoint(std::string prefix, std::string period)
    : prefix_(std::move(prefix)), period_(std::move(period)) {
  if (!is_reduced(prefix_) || !is_reduced(period_))
    throw Error(ErrorKind::kInvalidArgument, "boundary point letters are not reduced");
  if (period_.empty()) return;
  if (period_.back() == inverse(period_.front()))
    throw Error(ErrorKind::kInvalidArgument, "period '" + period_ + "' is not cyclically reduced");
  if (!prefix_.empty() && prefix_.back() == inverse(period_.front()))
    throw Error(ErrorKind::kInvalidArgument, "prefix cancels against the period");
  period_ = primitive_root(period_);
  while (!prefix_.empty() && prefix_.back() == period_.back()) {
    prefix_.pop_back();
    period_ = period_.back() + period_.substr(0, period_.size() - 1);
  }
}

BoundaryPoint BoundaryPoint::parse(std::string_view text) {
  std::string s;
  for (char c : text)
    if (c != ' ') s.push_back(c);
  const auto open = s.find('(');
  if (open == std::string::npos) return truncated(s);
  if (s.back() != ')') throw Error(ErrorKind::kInvalidArgument, "unterminated period in '" + s + "'");
  const std::string period = s.substr(open + 1, s.size() - open - 2);
  if (period.empty()) throw Error(ErrorKind::kInvalidArgument, "empty period in '" + s + "'");
  return BoundaryPoint(s.substr(0, open), period);
}

std::size_t BoundaryPoint::known_length() const {
  return exact() ? static_cast<std::size_t>(-1) : prefix_.size();
}

char BoundaryPoint::letter(std::size_t i) const {
  if (i < prefix_.size()) return prefix_[i];
  if (!exact()) throw Error(ErrorKind::kDepthExhausted, "letter beyond the stored prefix");
  return period_[(i - prefix_.size()) % period_.size()];
}

std::string BoundaryPoint::head(std::size_t depth) const {
  std::string out;
  const std::size_t n = std::min(depth, known_length());
  for (std::size_t i = 0; i < n; ++i) out.push_back(letter(i));
  return out;
}

BoundaryPoint BoundaryPoint::drop(std::size_t k) const {
  if (k <= prefix_.size()) {
    BoundaryPoint out = *this;
    out.prefix_ = prefix_.substr(k);
    return out;
  }
  if (!exact()) throw Error(ErrorKind::kDepthExhausted, "dropping past the stored prefix");
  BoundaryPoint out;
  out.period_ = rotate_left(period_, k - prefix_.size());
  return out;
}

std::string BoundaryPoint::to_string() const {
  return exact() ? prefix_ + "(" + period_ + ")" : prefix_ + "...";
}

std::size_t common_prefix(const BoundaryPoint& x, const BoundaryPoint& y, std::size_t depth) {
  const std::size_t n = std::min({depth, x.known_length(), y.known_length()});
  std::size_t i = 0;
  while (i < n && x.letter(i) == y.letter(i)) ++i;
  return i;
}

double distance(const BoundaryPoint& x, const BoundaryPoint& y, std::size_t depth) {
  const std::size_t k = common_prefix(x, y, depth);
  return k >= depth ? 0.0 : std::ldexp(1.0, -static_cast<int>(k));
}

BoundaryPoint act(std::string_view gamma, const BoundaryPoint& w) {
  const std::string g = reduce(gamma);
  std::size_t i = g.size(), j = 0;
  while (i > 0) {
    if (j >= w.known_length())
      throw Error(ErrorKind::kDepthExhausted, "cancellation consumed the stored prefix of " + w.to_string());
    if (g[i - 1] != inverse(w.letter(j))) break;
    --i;
    ++j;
  }
  const BoundaryPoint rest = w.drop(j);
  return BoundaryPoint(g.substr(0, i) + rest.prefix(), rest.period());
}

Conjugation cyclic_core(std::string_view gamma) {
  const std::string w = reduce(gamma);
  std::size_t i = 0;
  while (2 * i + 1 < w.size() && w[i] == inverse(w[w.size() - 1 - i])) ++i;
  return {w.substr(0, i), w.substr(i, w.size() - 2 * i)};
}

std::vector<BoundaryPoint> probe_points(int length) {
  std::vector<std::string> words{""};
  for (int l = 0; l < length; ++l) {
    std::vector<std::string> next;
    for (const auto& w : words)
      for (char c : kLetters)
        if (w.empty() || c != inverse(w.back())) next.push_back(w + c);
    words = std::move(next);
  }
  std::vector<BoundaryPoint> out;
  for (const auto& w : words) out.emplace_back(w, std::string(1, w.back()));
  return out;
}

BoundaryPoint random_point(std::mt19937_64& rng, int prefix_length) {
  auto extend = [&](std::string w, int n) {
    while (static_cast<int>(w.size()) < n) {
      const char c = kLetters[rng() % 4];
      if (w.empty() || c != inverse(w.back())) w.push_back(c);
    }
    return w;
  };
  const std::string prefix = extend("", prefix_length);
  for (;;) {
    const std::string period = extend("", 1 + static_cast<int>(rng() % 3));
    if (period.back() == inverse(period.front())) continue;
    if (!prefix.empty() && prefix.back() == inverse(period.front())) continue;
    return BoundaryPoint(prefix, period);
  }
}

PowerLimit power_limit(std::string_view gamma, std::size_t depth, const std::vector<BoundaryPoint>& probes) {
  const std::string g = reduce(gamma);
  PowerLimit out;
  if (g.empty()) return out;
  const auto core = cyclic_core(g);
  out.kind = PowerLimit::Kind::kLoxodromic;
  out.attracting = BoundaryPoint(core.g, core.h);
  out.repulsing = BoundaryPoint(core.g, inverse_word(core.h));
  if (!(act(g, out.attracting) == out.attracting) || !(act(g, out.repulsing) == out.repulsing))
    throw Error(ErrorKind::kInternal, "fixed points of " + g + " are not fixed");
  const std::string target = out.attracting.head(depth);
  const std::size_t cap = depth + 64;
  for (const auto& w : probes) {
    if (w == out.repulsing) continue;
    BoundaryPoint x = w;
    std::size_t steps = 0;
    for (;;) {
      if (x.head(depth) == target && act(g, x).head(depth) == target) break;
      if (++steps > cap)
        throw Error(ErrorKind::kNotStabilized, "probe " + w.to_string() + " did not settle under " + g);
      x = act(g, x);
    }
    ++out.probes;
    out.max_steps = std::max(out.max_steps, steps);
  }
  return out;
}

}  // namespace tame::boundary
