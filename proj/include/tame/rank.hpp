#pragma once

// Finite-scale oscillation rank. A^0 is the sample, A^{k+1} the points of A^k
// where the oscillation of p over A^k within radius r is at least eps; the
// rank is the first k with A^k empty.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tame/boundary.hpp"
#include "tame/envelope.hpp"
#include "tame/systems.hpp"

namespace tame::rank {

// Indices 0..size-1 are sample points; size..total-1 are ambient probe points
// that only take part in the first derivative (they stand in for the points
// of the space arbitrarily close to a sample point).
struct RankProblem {
  std::size_t size = 0;
  std::size_t total = 0;
  std::function<double(std::size_t, std::size_t)> dist;        // domain metric
  std::function<double(std::size_t, std::size_t)> image_dist;  // d(p i, p j)
  std::vector<std::vector<std::size_t>> probes;                // per sample point; may be empty
  // Diameter of a set of images equals the largest distance from any member.
  bool image_ultrametric = false;
  std::string sample_id;
};

using Pair = std::pair<std::size_t, std::size_t>;

// max d(p x1, p x2) over x1, x2 in A (plus x's probes when `ambient`) within r
// of x. Throws kInvalidArgument unless x is in A and r > 0.
double oscillation(const RankProblem& prob, std::size_t x, const std::vector<std::size_t>& A, double r,
                   bool ambient = false, Pair* witness = nullptr);

struct Stage {
  std::vector<std::size_t> members;  // A^k, sorted
  std::vector<double> osc;           // oscillation of each member over A^k
  std::vector<Pair> witnesses;       // realizing pair for each member
};

struct ResolutionTrace {
  double r = 0;
  std::vector<Stage> stages;        // A^0, A^1, ..., the last one empty when the rank is reached
  std::optional<std::size_t> beta;  // unset when the budget ran out or a stage repeated
  bool stationary = false;
};

struct RankTrace {
  double epsilon = 0;
  std::string sample_id;
  std::vector<ResolutionTrace> resolutions;
  std::optional<std::size_t> beta;  // common value across resolutions
  bool stabilized = false;
};

struct RankOptions {
  std::size_t max_stages = 16;
  bool ambient_first_stage = true;  // A^1 from probes only, no sample balls
};

std::vector<double> default_schedule(double eps);  // eps/8, eps/16, eps/32

ResolutionTrace derive(const RankProblem& prob, double eps, double r, const RankOptions& opt = {});
// Every point kept in A^{k+1} has a recorded pair within r of it whose images
// are at least eps apart.
bool verify(const RankProblem& prob, const ResolutionTrace& trace, double eps);

// All resolutions; `stabilized` when they agree on a finite rank.
RankTrace rank_trace(const RankProblem& prob, double eps, const std::vector<double>& schedule,
                     const RankOptions& opt = {});
// As rank_trace, throwing kNotStabilized when the resolutions disagree or
// some resolution does not empty out.
RankTrace beta_rank(const RankProblem& prob, double eps, const std::vector<double>& schedule,
                    const RankOptions& opt = {});

struct FamilyMember {
  std::string name;
  std::function<RankProblem()> build;
};

struct SystemRank {
  std::size_t beta = 0;
  std::string witness;  // member attaining the maximum (first on ties)
  std::vector<std::pair<std::string, std::size_t>> members;
};

// Members are built and ranked independently, `jobs` at a time; the result
// does not depend on `jobs`.
SystemRank system_rank(const std::vector<FamilyMember>& family, double eps, const std::vector<double>& schedule,
                       int jobs = 1, const RankOptions& opt = {});

// ------------------------------------------------------------------ builders

// Split-circle element given by a rule on `sample`. Split systems use the
// coding metric of radius K; systems with nothing split use the circle metric.
// Probes are the plain points base +- h for each h.
RankProblem split_problem(const SplitCircleSystem& sys, const envelope::SplitRule& rule,
                          const std::vector<SplitPoint>& sample, int K,
                          const std::vector<Rational>& h = {Rational(1, 1LL << 40), Rational(1, 1LL << 41)});

// A map of the boundary at the given depth. Probes of w are the first `depth`
// letters of w continued by each admissible letter repeated forever.
RankProblem boundary_problem(const std::function<boundary::BoundaryPoint(const boundary::BoundaryPoint&)>& p,
                             const std::vector<boundary::BoundaryPoint>& sample, std::size_t depth);

}  // namespace tame::rank
