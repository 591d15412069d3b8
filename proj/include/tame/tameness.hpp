#pragma once

// Word complexity and Kerr-Li independence sets of binary codings.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tame/errors.hpp"

namespace tame {

// Factors are packed little-endian: bit i holds letter i.
using Factor = std::uint64_t;

std::string factor_to_string(Factor f, int length);

class FactorSet {
 public:
  static constexpr int kMaxLength = 62;

  // All factors of length <= max_length of `word`.
  static FactorSet from_word(const std::vector<int>& word, int max_length);
  // Every binary word is a factor.
  static FactorSet full_shift(int max_length);
  // Factors of length exactly `length` given explicitly (for cache loads).
  static FactorSet from_factors(int length, std::vector<Factor> factors, std::size_t horizon);

  int max_length() const { return max_length_; }
  std::size_t horizon() const { return horizon_; }
  bool is_full_shift() const { return full_; }

  // Sorted distinct factors of the given length. Not available for the full
  // shift beyond length 24.
  const std::vector<Factor>& factors(int length) const;
  std::uint64_t count(int length) const;
  bool contains(Factor f, int length) const;

 private:
  int max_length_ = 0;
  std::size_t horizon_ = 0;
  bool full_ = false;
  std::vector<std::vector<Factor>> by_length_;  // index = length
};

// p(1..L), as lower bounds limited by the horizon. Requires H >= 10 L.
std::vector<std::uint64_t> complexity(const std::vector<int>& coding, int L);

struct IndependenceCertificate {
  int window = 0;
  std::vector<int> positions;
  // witnesses[pattern] is a length-`window` factor whose letters at
  // positions[j] equal bit j of pattern.
  std::vector<Factor> witnesses;
  bool exhaustive = true;  // false when the search budget ran out
  std::uint64_t nodes = 0;
};

struct IndependenceOptions {
  std::uint64_t node_budget = 50'000'000;
  // Prune with |I| <= floor(log2 p(L)) and by remaining positions.
  bool prune = true;
};

// Lexicographically smallest maximum independent position set in [0, L).
// Throws BudgetError (kind kBudgetExceeded) carrying the best certificate.
IndependenceCertificate max_independence(const FactorSet& factors, int L,
                                         const IndependenceOptions& options = {});

// Re-check every witness against the factor set.
bool verify_certificate(const IndependenceCertificate& cert, const FactorSet& factors);

class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, IndependenceCertificate best)
      : Error(ErrorKind::kBudgetExceeded, what), best_(std::move(best)) {}
  const IndependenceCertificate& best() const { return best_; }

 private:
  IndependenceCertificate best_;
};

enum class Growth { kBoundedLog, kGrowing, kInconclusive };
std::string_view to_string(Growth g);

struct GrowthPoint {
  int L;
  std::uint64_t complexity;
  int independence;
};

// Heuristic label over finite data.
Growth growth_report(const std::vector<GrowthPoint>& points);

// 64-bit FNV-1a, hex encoded.
std::string digest(const std::string& text);

// Disk cache of factor lists keyed by (spec digest, L, H). One sorted factor per
// line after a header that repeats the key digest.
class FactorCache {
 public:
  explicit FactorCache(std::filesystem::path root) : root_(std::move(root)) {}
  // TAME_CACHE_DIR, or nullopt.
  static std::optional<std::filesystem::path> root_from_env();

  std::optional<std::vector<Factor>> load(const std::string& spec, int L, std::size_t H) const;
  void store(const std::string& spec, int L, std::size_t H, const std::vector<Factor>& factors) const;

 private:
  std::filesystem::path file_for(const std::string& key) const;
  std::filesystem::path root_;
};

}  // namespace tame
