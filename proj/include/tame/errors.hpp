#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tame {

// Every failure the library reports is one of these kinds. The CLI maps them
// onto exit codes, so keep the list in sync with tools/tame.cpp.
enum class ErrorKind {
  kInvalidArgument,
  kInternal,
  kSideUnreachable,
  kBoundaryUndecidable,
  kDepthInsufficient,
  kNotStabilized,
  kSampleMismatch,
  kNotInIdeal,
  kNoWitness,
  kBudgetExceeded,
  kAmbiguousSubspace,
  kDepthExhausted,
  kUnknownSeries,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // NotStabilized-class outcomes are results, not failures.
  bool is_non_stabilization() const noexcept {
    return kind_ == ErrorKind::kNotStabilized || kind_ == ErrorKind::kBudgetExceeded;
  }

 private:
  ErrorKind kind_;
};

}  // namespace tame
