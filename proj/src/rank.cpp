#include "tame/rank.hpp"

#include "tame/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <memory>
#include <sstream>
#include <thread>

namespace tame::rank {

namespace {

std::vector<std::size_t> ball(const RankProblem& prob, std::size_t x, const std::vector<std::size_t>& A, double r,
                              bool ambient) {
  std::vector<std::size_t> out;
  for (auto y : A)
    if (y == x || prob.dist(x, y) <= r) out.push_back(y);
  if (ambient && x < prob.probes.size())
    for (auto y : prob.probes[x])
      if (prob.dist(x, y) <= r) out.push_back(y);
  return out;
}

double diameter(const RankProblem& prob, std::size_t x, const std::vector<std::size_t>& B, Pair* witness) {
  double best = 0;
  Pair arg{x, x};
  if (prob.image_ultrametric) {
    for (auto y : B) {
      const double d = prob.image_dist(x, y);
      if (d > best) best = d, arg = {x, y};
    }
  } else {
    for (std::size_t i = 0; i < B.size(); ++i)
      for (std::size_t j = i + 1; j < B.size(); ++j) {
        const double d = prob.image_dist(B[i], B[j]);
        if (d > best) best = d, arg = {B[i], B[j]};
      }
  }
  if (witness) *witness = arg;
  return best;
}

}  // namespace

double oscillation(const RankProblem& prob, std::size_t x, const std::vector<std::size_t>& A, double r, bool ambient,
                   Pair* witness) {
  if (!(r > 0)) throw Error(ErrorKind::kInvalidArgument, "oscillation radius must be positive");
  if (std::find(A.begin(), A.end(), x) == A.end())
    throw Error(ErrorKind::kInvalidArgument, "oscillation point is not in the set");
  return diameter(prob, x, ball(prob, x, A, r, ambient), witness);
}

std::vector<double> default_schedule(double eps) { return {eps / 8, eps / 16, eps / 32}; }

ResolutionTrace derive(const RankProblem& prob, double eps, double r, const RankOptions& opt) {
  if (!(eps > 0)) throw Error(ErrorKind::kInvalidArgument, "eps must be positive");
  if (!(r > 0)) throw Error(ErrorKind::kInvalidArgument, "resolution must be positive");
  ResolutionTrace out;
  out.r = r;
  std::vector<std::size_t> A(prob.size);
  for (std::size_t i = 0; i < prob.size; ++i) A[i] = i;
  for (std::size_t k = 0;; ++k) {
    Stage st;
    st.members = A;
    if (A.empty()) {
      out.stages.push_back(std::move(st));
      out.beta = k;
      return out;
    }
    if (k >= opt.max_stages) {
      out.stages.push_back(std::move(st));
      return out;
    }
    const bool first = k == 0 && opt.ambient_first_stage;
    st.osc.resize(A.size());
    st.witnesses.resize(A.size());
    std::vector<std::size_t> next;
    for (std::size_t i = 0; i < A.size(); ++i) {
      const std::size_t x = A[i];
      const auto B = first ? ball(prob, x, {x}, r, true) : ball(prob, x, A, r, false);
      st.osc[i] = diameter(prob, x, B, &st.witnesses[i]);
      if (st.osc[i] >= eps) next.push_back(x);
    }
    const bool same = next == A;
    out.stages.push_back(std::move(st));
    if (same) {
      out.stationary = true;
      out.stages.push_back(Stage{next, {}, {}});
      return out;
    }
    A = std::move(next);
  }
}

bool verify(const RankProblem& prob, const ResolutionTrace& trace, double eps) {
  for (std::size_t k = 0; k + 1 < trace.stages.size(); ++k) {
    const auto& st = trace.stages[k];
    const auto& kept = trace.stages[k + 1].members;
    if (st.osc.size() != st.members.size()) return false;
    for (std::size_t i = 0; i < st.members.size(); ++i) {
      const std::size_t x = st.members[i];
      const bool in_next = std::binary_search(kept.begin(), kept.end(), x);
      if (in_next != (st.osc[i] >= eps)) return false;
      if (!in_next) continue;
      const auto [a, b] = st.witnesses[i];
      if (prob.dist(x, a) > trace.r && a != x) return false;
      if (prob.dist(x, b) > trace.r && b != x) return false;
      if (prob.image_dist(a, b) < eps) return false;
    }
  }
  return true;
}

RankTrace rank_trace(const RankProblem& prob, double eps, const std::vector<double>& schedule,
                     const RankOptions& opt) {
  if (schedule.empty()) throw Error(ErrorKind::kInvalidArgument, "empty resolution schedule");
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (!(schedule[i] < schedule[i - 1]))
      throw Error(ErrorKind::kInvalidArgument, "resolution schedule must decrease");
  RankTrace out;
  out.epsilon = eps;
  out.sample_id = prob.sample_id;
  for (double r : schedule) out.resolutions.push_back(derive(prob, eps, r, opt));
  out.stabilized = true;
  for (const auto& t : out.resolutions)
    out.stabilized = out.stabilized && t.beta && t.beta == out.resolutions.front().beta;
  if (out.stabilized) out.beta = out.resolutions.front().beta;
  return out;
}

RankTrace beta_rank(const RankProblem& prob, double eps, const std::vector<double>& schedule,
                    const RankOptions& opt) {
  auto out = rank_trace(prob, eps, schedule, opt);
  if (!out.stabilized) {
    std::ostringstream msg;
    msg << "rank differs across resolutions at eps = " << eps << ":";
    for (const auto& t : out.resolutions) {
      msg << " r = " << t.r << " -> ";
      if (t.beta)
        msg << *t.beta;
      else
        msg << (t.stationary ? "stationary" : "budget");
    }
    throw Error(ErrorKind::kNotStabilized, msg.str());
  }
  return out;
}

SystemRank system_rank(const std::vector<FamilyMember>& family, double eps, const std::vector<double>& schedule,
                       int jobs, const RankOptions& opt) {
  if (family.empty()) throw Error(ErrorKind::kInvalidArgument, "empty family");
  std::vector<std::size_t> betas(family.size());
  parallel_for(family.size(), jobs,
               [&](std::size_t i) { betas[i] = *beta_rank(family[i].build(), eps, schedule, opt).beta; });
  SystemRank out;
  for (std::size_t i = 0; i < family.size(); ++i) {
    out.members.emplace_back(family[i].name, betas[i]);
    if (betas[i] > out.beta) out.beta = betas[i], out.witness = family[i].name;
  }
  return out;
}

// ------------------------------------------------------------------ builders

RankProblem split_problem(const SplitCircleSystem& sys, const envelope::SplitRule& rule,
                          const std::vector<SplitPoint>& sample, int K, const std::vector<Rational>& h) {
  if (K < 1) throw Error(ErrorKind::kInvalidArgument, "coding radius must be positive");
  std::vector<SplitPoint> pts = sample;
  RankProblem prob;
  prob.size = sample.size();
  prob.probes.resize(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    for (const auto& step : h) {
      for (const auto& y : {sample[i].base + step, sample[i].base + Rational(-step)}) {
        prob.probes[i].push_back(pts.size());
        pts.push_back(sys.point(y, SideTag::kPlain));
      }
    }
  }
  prob.total = pts.size();
  const auto& s = sys.split_set();
  const bool split = s.kind() != SplitSet::Kind::kExplicit || !s.points().empty();
  std::ostringstream id;
  id << (split ? "split" : "rotation") << ":" << sys.alpha().to_string() << ":" << sample.size();
  prob.sample_id = id.str();
  if (!split) {
    auto pos = std::make_shared<std::vector<double>>(pts.size());
    auto img = std::make_shared<std::vector<double>>(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      (*pos)[i] = static_cast<double>(pts[i].base.approx());
      (*img)[i] = static_cast<double>(rule(sys, pts[i]).base.approx());
    }
    auto circle = [](double a, double b) {
      const double d = std::abs(a - b);
      return std::min(d, 1 - d);
    };
    prob.dist = [pos, circle](std::size_t i, std::size_t j) { return circle((*pos)[i], (*pos)[j]); };
    prob.image_dist = [img, circle](std::size_t i, std::size_t j) { return circle((*img)[i], (*img)[j]); };
    return prob;
  }
  using Words = std::vector<std::vector<signed char>>;
  auto dom = std::make_shared<Words>(pts.size());
  auto img = std::make_shared<Words>(pts.size());
  auto word = [&](const SplitPoint& p) {
    const auto w = sys.coding_word(p, -K, K);
    return std::vector<signed char>(w.begin(), w.end());
  };
  parallel_for(pts.size(), hardware_jobs(), [&](std::size_t i) {
    (*dom)[i] = word(pts[i]);
    (*img)[i] = word(rule(sys, pts[i]));
  });
  // Index order K, K-1, K+1, K-2, ...: increasing |k|.
  auto order = std::make_shared<std::vector<std::pair<std::size_t, int>>>();
  order->emplace_back(static_cast<std::size_t>(K), 0);
  for (int k = 1; k <= K; ++k) {
    order->emplace_back(static_cast<std::size_t>(K - k), k);
    order->emplace_back(static_cast<std::size_t>(K + k), k);
  }
  auto coding = [order](const std::vector<signed char>& a, const std::vector<signed char>& b) {
    for (const auto& [idx, k] : *order)
      if (a[idx] != b[idx]) return std::ldexp(1.0, -k);
    return 0.0;
  };
  prob.dist = [dom, coding](std::size_t i, std::size_t j) { return coding((*dom)[i], (*dom)[j]); };
  prob.image_dist = [img, coding](std::size_t i, std::size_t j) { return coding((*img)[i], (*img)[j]); };
  prob.image_ultrametric = true;
  return prob;
}

RankProblem boundary_problem(const std::function<boundary::BoundaryPoint(const boundary::BoundaryPoint&)>& p,
                             const std::vector<boundary::BoundaryPoint>& sample, std::size_t depth) {
  using boundary::BoundaryPoint;
  if (depth == 0) throw Error(ErrorKind::kInvalidArgument, "depth must be positive");
  auto pts = std::make_shared<std::vector<BoundaryPoint>>(sample);
  RankProblem prob;
  prob.size = sample.size();
  prob.probes.resize(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const std::string head = sample[i].head(depth);
    if (head.size() < depth) continue;
    for (char c : {'a', 'b', 'A', 'B'}) {
      if (c == boundary::inverse(head.back())) continue;
      prob.probes[i].push_back(pts->size());
      pts->emplace_back(head, std::string(1, c));
    }
  }
  prob.total = pts->size();
  auto imgs = std::make_shared<std::vector<BoundaryPoint>>();
  for (const auto& w : *pts) imgs->push_back(p(w));
  prob.dist = [pts, depth](std::size_t i, std::size_t j) { return boundary::distance((*pts)[i], (*pts)[j], depth); };
  prob.image_dist = [imgs, depth](std::size_t i, std::size_t j) {
    return boundary::distance((*imgs)[i], (*imgs)[j], depth);
  };
  prob.image_ultrametric = true;
  prob.sample_id = "boundary:" + std::to_string(sample.size()) + ":" + std::to_string(depth);
  return prob;
}

}  // namespace tame::rank
