#include "tame/tameness.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace tame {

std::string factor_to_string(Factor f, int length) {
  std::string s(static_cast<std::size_t>(length), '0');
  for (int i = 0; i < length; ++i)
    if ((f >> i) & 1U) s[static_cast<std::size_t>(i)] = '1';
  return s;
}

namespace {

Factor low_mask(int n) { return n >= 64 ? ~Factor{0} : (Factor{1} << n) - 1; }

void sort_unique(std::vector<Factor>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::vector<Factor> factors_of_length(const std::vector<int>& word, int length) {
  std::vector<Factor> out;
  if (word.size() < static_cast<std::size_t>(length)) return out;
  out.reserve(word.size() - static_cast<std::size_t>(length) + 1);
  Factor w = 0;
  for (std::size_t i = 0; i < word.size(); ++i) {
    w = (w >> 1) | (static_cast<Factor>(word[i] & 1) << (length - 1));
    if (i + 1 >= static_cast<std::size_t>(length)) out.push_back(w);
  }
  sort_unique(out);
  return out;
}

}  // namespace

FactorSet FactorSet::from_word(const std::vector<int>& word, int max_length) {
  if (max_length < 1 || max_length > kMaxLength)
    throw Error(ErrorKind::kInvalidArgument, "factor length must lie in 1..62");
  FactorSet fs;
  fs.max_length_ = max_length;
  fs.horizon_ = word.size();
  fs.by_length_.resize(static_cast<std::size_t>(max_length) + 1);
  for (int l = 1; l <= max_length; ++l) fs.by_length_[static_cast<std::size_t>(l)] = factors_of_length(word, l);
  return fs;
}

FactorSet FactorSet::full_shift(int max_length) {
  if (max_length < 1 || max_length > kMaxLength)
    throw Error(ErrorKind::kInvalidArgument, "factor length must lie in 1..62");
  FactorSet fs;
  fs.max_length_ = max_length;
  fs.full_ = true;
  fs.by_length_.resize(static_cast<std::size_t>(max_length) + 1);
  for (int l = 1; l <= std::min(max_length, 24); ++l) {
    auto& v = fs.by_length_[static_cast<std::size_t>(l)];
    v.resize(std::size_t{1} << l);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
  }
  return fs;
}

FactorSet FactorSet::from_factors(int length, std::vector<Factor> factors, std::size_t horizon) {
  if (length < 1 || length > kMaxLength)
    throw Error(ErrorKind::kInvalidArgument, "factor length must lie in 1..62");
  FactorSet fs;
  fs.max_length_ = length;
  fs.horizon_ = horizon;
  fs.by_length_.resize(static_cast<std::size_t>(length) + 1);
  sort_unique(factors);
  fs.by_length_[static_cast<std::size_t>(length)] = std::move(factors);
  return fs;
}

const std::vector<Factor>& FactorSet::factors(int length) const {
  if (length < 1 || length > max_length_)
    throw Error(ErrorKind::kInvalidArgument, "factor length out of range");
  if (full_ && length > 24) throw Error(ErrorKind::kInvalidArgument, "full shift too large to list");
  return by_length_[static_cast<std::size_t>(length)];
}

std::uint64_t FactorSet::count(int length) const {
  if (full_) return length >= 64 ? ~std::uint64_t{0} : std::uint64_t{1} << length;
  return factors(length).size();
}

bool FactorSet::contains(Factor f, int length) const {
  if (full_) return (f & ~low_mask(length)) == 0;
  const auto& v = factors(length);
  return std::binary_search(v.begin(), v.end(), f);
}

std::vector<std::uint64_t> complexity(const std::vector<int>& coding, int L) {
  if (L < 1 || L > FactorSet::kMaxLength)
    throw Error(ErrorKind::kInvalidArgument, "L must lie in 1..62");
  if (coding.size() < 10 * static_cast<std::size_t>(L))
    throw Error(ErrorKind::kInvalidArgument, "horizon must be at least 10 L");
  std::vector<std::uint64_t> out;
  for (int l = 1; l <= L; ++l) out.push_back(factors_of_length(coding, l).size());
  return out;
}

namespace {

class Search {
 public:
  Search(const std::vector<Factor>& factors, int L, std::uint64_t cap, const IndependenceOptions& opt)
      : L_(L), cap_(cap), opt_(opt), root_(factors) {}

  void run() {
    std::vector<int> current;
    descend(root_, current, 0, -1);
  }

  std::vector<int> best;
  std::uint64_t nodes = 0;
  bool complete = true;

 private:
  bool done() const { return opt_.prune && best.size() >= cap_; }

  void descend(const std::vector<Factor>& set, std::vector<int>& current, Factor mask, int last) {
    for (int j = last + 1; j < L_; ++j) {
      if (!complete || done()) return;
      const std::size_t size = current.size() + 1;
      if (opt_.prune) {
        const std::size_t reachable = size + static_cast<std::size_t>(L_ - 1 - j);
        if (reachable <= best.size()) return;  // later j only reach less
      }
      if (++nodes > opt_.node_budget) {
        complete = false;
        return;
      }
      const Factor keep = mask | ~low_mask(j);
      const Factor on = mask | (Factor{1} << j);
      std::vector<Factor> next;
      next.reserve(set.size());
      for (Factor f : set) next.push_back(f & keep & low_mask(L_));
      sort_unique(next);
      scratch_.clear();
      for (Factor f : next) scratch_.push_back(f & on);
      sort_unique(scratch_);
      if (scratch_.size() != (std::size_t{1} << size)) continue;  // not independent
      current.push_back(j);
      if (current.size() > best.size()) best = current;
      descend(next, current, on, j);
      current.pop_back();
    }
  }

  int L_;
  std::uint64_t cap_;
  IndependenceOptions opt_;
  const std::vector<Factor>& root_;
  std::vector<Factor> scratch_;
};

std::vector<Factor> witnesses_for(const std::vector<Factor>& factors, const std::vector<int>& positions) {
  const std::size_t n = std::size_t{1} << positions.size();
  std::vector<Factor> out(n, 0);
  std::vector<bool> seen(n, false);
  std::size_t found = 0;
  for (Factor f : factors) {
    std::size_t pattern = 0;
    for (std::size_t b = 0; b < positions.size(); ++b)
      if ((f >> positions[b]) & 1U) pattern |= std::size_t{1} << b;
    if (!seen[pattern]) {
      seen[pattern] = true;
      out[pattern] = f;
      if (++found == n) break;
    }
  }
  return out;
}

}  // namespace

IndependenceCertificate max_independence(const FactorSet& factors, int L, const IndependenceOptions& options) {
  if (L < 1 || L > 24) throw Error(ErrorKind::kInvalidArgument, "independence window must lie in 1..24");
  if (L > factors.max_length()) throw Error(ErrorKind::kInvalidArgument, "factor set shorter than window");
  IndependenceCertificate cert;
  cert.window = L;
  if (factors.is_full_shift()) {
    for (int i = 0; i < L; ++i) cert.positions.push_back(i);
    cert.witnesses.resize(std::size_t{1} << L);
    for (std::size_t p = 0; p < cert.witnesses.size(); ++p) cert.witnesses[p] = p;
    return cert;
  }
  const auto& list = factors.factors(L);
  const std::uint64_t cap = list.empty() ? 0 : static_cast<std::uint64_t>(std::bit_width(list.size()) - 1);
  Search search(list, L, cap, options);
  search.run();
  cert.positions = search.best;
  cert.witnesses = witnesses_for(list, cert.positions);
  cert.nodes = search.nodes;
  cert.exhaustive = search.complete;
  if (!search.complete) {
    throw BudgetError("independence search stopped after " + std::to_string(options.node_budget) +
                          " nodes; best |I| = " + std::to_string(cert.positions.size()),
                      cert);
  }
  return cert;
}

bool verify_certificate(const IndependenceCertificate& cert, const FactorSet& factors) {
  if (cert.witnesses.size() != (std::size_t{1} << cert.positions.size())) return false;
  for (std::size_t p = 0; p < cert.witnesses.size(); ++p) {
    const Factor w = cert.witnesses[p];
    if (!factors.contains(w, cert.window)) return false;
    for (std::size_t b = 0; b < cert.positions.size(); ++b)
      if (((w >> cert.positions[b]) & 1U) != ((p >> b) & 1U)) return false;
  }
  return true;
}

std::string_view to_string(Growth g) {
  switch (g) {
    case Growth::kBoundedLog: return "bounded_log";
    case Growth::kGrowing: return "growing";
    case Growth::kInconclusive: return "inconclusive";
  }
  return "?";
}

Growth growth_report(const std::vector<GrowthPoint>& points) {
  if (points.size() < 2) return Growth::kInconclusive;
  for (std::size_t i = 1; i < points.size(); ++i)
    if (points[i].L <= points[i - 1].L)
      throw Error(ErrorKind::kInvalidArgument, "L list must be increasing");
  bool strictly_up = true;
  for (std::size_t i = 1; i < points.size(); ++i)
    if (points[i].independence <= points[i - 1].independence) strictly_up = false;
  const auto& first = points.front();
  const auto& last = points.back();
  const double slope = static_cast<double>(last.independence - first.independence) / (last.L - first.L);
  if (strictly_up && slope >= 0.5) return Growth::kGrowing;
  bool within_log = true;
  for (const auto& p : points) {
    const int ceil_log = p.complexity <= 1 ? 0 : std::bit_width(p.complexity - 1);
    if (p.independence > ceil_log) within_log = false;
  }
  // Polynomial complexity as the finite stand-in for sub-exponential.
  const bool sub_exponential =
      static_cast<double>(last.complexity) <= static_cast<double>(last.L) * last.L;
  if (within_log && sub_exponential) return Growth::kBoundedLog;
  return Growth::kInconclusive;
}

std::string digest(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

std::optional<std::filesystem::path> FactorCache::root_from_env() {
  if (const char* env = std::getenv("TAME_CACHE_DIR"); env && *env) return std::filesystem::path(env);
  return std::nullopt;
}

std::filesystem::path FactorCache::file_for(const std::string& key) const {
  return root_ / ("factors-" + key + ".txt");
}

namespace {
std::string cache_key(const std::string& spec, int L, std::size_t H) {
  return digest(spec + "|L=" + std::to_string(L) + "|H=" + std::to_string(H));
}
}  // namespace

std::optional<std::vector<Factor>> FactorCache::load(const std::string& spec, int L, std::size_t H) const {
  const std::string key = cache_key(spec, L, H);
  std::ifstream in(file_for(key));
  if (!in) return std::nullopt;
  std::string header;
  std::getline(in, header);
  if (header != "# tame-factors v1 " + key) return std::nullopt;
  std::vector<Factor> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.size() != static_cast<std::size_t>(L)) return std::nullopt;
    Factor f = 0;
    for (int i = 0; i < L; ++i) {
      const char c = line[static_cast<std::size_t>(i)];
      if (c != '0' && c != '1') return std::nullopt;
      if (c == '1') f |= Factor{1} << i;
    }
    out.push_back(f);
  }
  return out;
}

void FactorCache::store(const std::string& spec, int L, std::size_t H, const std::vector<Factor>& factors) const {
  const std::string key = cache_key(spec, L, H);
  std::filesystem::create_directories(root_);
  std::vector<std::string> lines;
  lines.reserve(factors.size());
  for (Factor f : factors) lines.push_back(factor_to_string(f, L));
  std::sort(lines.begin(), lines.end());
  const auto path = file_for(key);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << "# tame-factors v1 " << key << '\n';
    for (const auto& l : lines) out << l << '\n';
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace tame
