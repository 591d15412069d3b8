#include "tame/linear.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace tame::linear {

RationalMatrix parse_matrix(const std::string& text, int n) {
  std::string cleaned = text;
  for (char& c : cleaned)
    if (c == ',' || c == ';' || c == '[' || c == ']') c = ' ';
  std::istringstream in(cleaned);
  std::vector<Rational> entries;
  for (std::string tok; in >> tok;) {
    try {
      entries.emplace_back(tok);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kInvalidArgument, "bad matrix entry '" + tok + "'");
    }
  }
  if (n <= 0 || entries.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
    throw Error(ErrorKind::kInvalidArgument, "matrix literal needs n*n entries");
  RationalMatrix m(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    m[static_cast<std::size_t>(i)].assign(entries.begin() + i * n, entries.begin() + (i + 1) * n);
  return m;
}

Mat to_double(const RationalMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Mat out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      out(i, j) = static_cast<double>(m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
  return out;
}

namespace {

Mat orthonormalize(const Mat& basis, double tol = 1e-10) {
  const auto n = basis.rows();
  if (basis.cols() == 0) return Mat(n, 0);
  Eigen::ColPivHouseholderQR<Mat> qr(basis);
  qr.setThreshold(tol);
  const auto rank = qr.rank();
  Mat q = qr.householderQ() * Mat::Identity(n, rank);
  return q;
}

}  // namespace

PartialLinearMap::PartialLinearMap(Mat basis, const Mat& map) {
  if (basis.rows() != map.rows() || map.rows() != map.cols())
    throw Error(ErrorKind::kInvalidArgument, "partial map shapes disagree");
  basis_ = orthonormalize(basis);
  matrix_ = map * projector();
}

PartialLinearMap PartialLinearMap::identity(int n) { return {Mat::Identity(n, n), Mat::Identity(n, n)}; }

PartialLinearMap PartialLinearMap::p_infinity(int n) { return {Mat(n, 0), Mat::Zero(n, n)}; }

PartialLinearMap PartialLinearMap::line_limit(const Vec& u) {
  const auto n = u.size();
  return {Mat(u), Mat::Identity(n, n)};
}

bool PartialLinearMap::in_domain(const Vec& v, double tol) const {
  const Vec perp = v - projector() * v;
  return perp.norm() <= tol * std::max(1.0, v.norm());
}

std::optional<Vec> PartialLinearMap::operator()(const Vec& v, double tol) const {
  if (!in_domain(v, tol)) return std::nullopt;
  return Vec(matrix_ * v);
}

double distance(const PartialLinearMap& p, const PartialLinearMap& q) {
  if (p.dimension() != q.dimension() || p.domain_dimension() != q.domain_dimension())
    return std::numeric_limits<double>::infinity();
  const double dp = (p.projector() - q.projector()).cwiseAbs().maxCoeff();
  const double dm = (p.matrix() - q.matrix()).cwiseAbs().maxCoeff();
  return std::max(dp, dm);
}

PartialLinearMap partial_compose(const PartialLinearMap& p, const PartialLinearMap& q) {
  if (p.dimension() != q.dimension()) throw Error(ErrorKind::kInvalidArgument, "dimension mismatch");
  const auto n = p.dimension();
  const Mat& Q = q.basis();
  if (Q.cols() == 0) return {Mat(n, 0), p.matrix() * q.matrix()};
  const Mat B = (Mat::Identity(n, n) - p.projector()) * q.matrix() * Q;
  Eigen::JacobiSVD<Mat> svd(B, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = 1e-9 * std::max(1.0, sv.size() ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > tol) ++rank;
  const Mat null = svd.matrixV().rightCols(Q.cols() - rank);
  return {Q * null, p.matrix() * q.matrix()};
}

Mat MatrixSequenceSpec::stage(int s, int stages) const {
  switch (kind) {
    case Kind::kScalar: return std::pow(10.0, 4.0 * (s + 1)) * Mat::Identity(n, n);
    case Kind::kDiagonal: {
      const double t = std::pow(10.0, 4.0 * (s + 1));
      Mat m = Mat::Zero(n, n);
      for (int i = 0; i < n; ++i) m(i, i) = std::pow(t, exponents[static_cast<std::size_t>(i)]);
      return m;
    }
    case Kind::kPowers: {
      Mat g = to_double(base), acc = Mat::Identity(n, n);
      for (int e = 16 * (s + 1); e > 0; e >>= 1) {
        if (e & 1) acc = acc * g;
        g = g * g;
      }
      return acc;
    }
    case Kind::kExplicit: {
      const auto size = static_cast<int>(explicit_terms.size());
      if (size < stages) throw Error(ErrorKind::kInvalidArgument, "explicit sequence shorter than the stage count");
      return explicit_terms[static_cast<std::size_t>(size - stages + s)];
    }
  }
  throw Error(ErrorKind::kInternal, "unknown sequence kind");
}

bool exact_path_applies(const MatrixSequenceSpec& spec) {
  if (spec.kind != MatrixSequenceSpec::Kind::kPowers) return false;
  const auto n = spec.base.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j)
      if (spec.base[i][j] != 0) return false;
    for (std::size_t j = 0; j < i; ++j)
      if (abs(spec.base[i][i]) == abs(spec.base[j][j])) return false;
  }
  return true;
}

namespace {

PartialLinearMap exact_power_limit(const MatrixSequenceSpec& spec) {
  const auto n = spec.base.size();
  const auto& g = spec.base;
  // Eigenvectors of an upper-triangular matrix by back substitution.
  std::vector<std::vector<Rational>> V(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    const Rational& lambda = g[i][i];
    if (lambda == -1) throw Error(ErrorKind::kNotStabilized, "eigenvalue -1: powers oscillate on its eigenline");
    V[i][i] = 1;
    for (std::size_t j = i; j-- > 0;) {
      Rational acc = 0;
      for (std::size_t k = j + 1; k <= i; ++k) acc += g[j][k] * V[k][i];
      V[j][i] = -acc / (g[j][j] - lambda);
    }
  }
  const auto N = static_cast<Eigen::Index>(n);
  Mat Vd(N, N);
  for (Eigen::Index r = 0; r < N; ++r)
    for (Eigen::Index c = 0; c < N; ++c)
      Vd(r, c) = static_cast<double>(V[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
  Eigen::VectorXd D = Eigen::VectorXd::Zero(N);
  std::vector<Eigen::Index> dom;
  for (Eigen::Index i = 0; i < N; ++i) {
    const Rational& lambda = g[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    if (lambda == 1) D(i) = 1;
    if (abs(lambda) < 1 || lambda == 1) dom.push_back(i);
  }
  Mat basis(N, static_cast<Eigen::Index>(dom.size()));
  for (std::size_t k = 0; k < dom.size(); ++k) basis.col(static_cast<Eigen::Index>(k)) = Vd.col(dom[k]);
  const Mat limit = Vd * D.asDiagonal() * Vd.inverse();
  return {basis, limit};
}

}  // namespace

PartialLinearMap matrix_limit(const MatrixSequenceSpec& spec, const LimitOptions& options) {
  if (options.stages < 2) throw Error(ErrorKind::kInvalidArgument, "matrix_limit needs at least two stages");
  if (exact_path_applies(spec)) return exact_power_limit(spec);
  const int S = options.stages;
  const Mat first = spec.stage(0, S), prev = spec.stage(S - 2, S), last = spec.stage(S - 1, S);
  const auto n = last.rows();
  Eigen::JacobiSVD<Mat> svd_last(last, Eigen::ComputeFullV);
  Eigen::JacobiSVD<Mat> svd_first(first);
  const auto& sl = svd_last.singularValues();
  const auto& sf = svd_first.singularValues();
  // Singular values paired by rank; each is bounded or divergent by its growth.
  Eigen::Index bounded = 0;
  double min_divergent = std::numeric_limits<double>::infinity(), max_bounded = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double growth = sl(i) / std::max(sf(i), 1e-300);
    if (sl(i) <= 1e-300 || growth <= options.bounded_growth) {
      ++bounded;
      max_bounded = std::max(max_bounded, sl(i));
    } else if (growth >= options.divergence_growth) {
      min_divergent = std::min(min_divergent, sl(i));
    } else {
      std::ostringstream msg;
      msg << "singular value " << i << " grew by " << growth << ", inside the guard band";
      throw Error(ErrorKind::kAmbiguousSubspace, msg.str());
    }
  }
  if (max_bounded >= min_divergent)
    throw Error(ErrorKind::kNotStabilized, "bounded and divergent singular values not yet separated");
  const Mat domain = svd_last.matrixV().rightCols(bounded);
  const Mat img_last = last * domain, img_prev = prev * domain;
  const double scale = domain.cols() ? std::max(1.0, img_last.cwiseAbs().maxCoeff()) : 1.0;
  const double drift = domain.cols() ? (img_last - img_prev).cwiseAbs().maxCoeff() : 0.0;
  if (drift > options.delta * scale) {
    std::ostringstream msg;
    msg << "images on the bounded subspace moved by " << drift << " between the last two stages";
    throw Error(ErrorKind::kNotStabilized, msg.str());
  }
  // On the domain the limit is last * P.
  return {domain, last};
}

double diagonal_product_discrepancy(const std::vector<int>& e, const std::vector<int>& f,
                                    const LimitOptions& options) {
  if (e.size() != f.size()) throw Error(ErrorKind::kInvalidArgument, "exponent vectors differ in length");
  std::vector<int> sum(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) sum[i] = e[i] + f[i];
  const auto a = matrix_limit(MatrixSequenceSpec::diagonal(e), options);
  const auto b = matrix_limit(MatrixSequenceSpec::diagonal(f), options);
  const auto ab = matrix_limit(MatrixSequenceSpec::diagonal(sum), options);
  return distance(ab, partial_compose(a, b));
}

std::pair<std::vector<int>, std::vector<int>> random_commuting_pair(int n, std::mt19937_64& rng) {
  std::vector<int> e(static_cast<std::size_t>(n)), f(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int a, b;
    do {
      a = static_cast<int>(rng() % 3) - 1;
      b = static_cast<int>(rng() % 3) - 1;
    } while (a * b < 0);
    e[static_cast<std::size_t>(i)] = a;
    f[static_cast<std::size_t>(i)] = b;
  }
  return {e, f};
}

PartialLinearMap random_partial_map(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  // Coordinate domains and coordinate images keep compositions nontrivial.
  std::vector<Eigen::Index> dom;
  Mat img = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (rng() % 3 != 0) dom.push_back(i);
    if (rng() % 3 != 0) img(i, i) = 1;
  }
  Mat basis(n, static_cast<Eigen::Index>(dom.size()));
  for (std::size_t k = 0; k < dom.size(); ++k)
    basis.col(static_cast<Eigen::Index>(k)) = Mat::Identity(n, n).col(dom[k]);
  Mat G(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) G(i, j) = gauss(rng);
  return {basis, img * G};
}

ProjectiveWitness projective_witness(const std::vector<Vec>& C, int n) {
  if (n < 2) throw Error(ErrorKind::kInvalidArgument, "projective witness needs dimension >= 2");
  for (long long k = 0;; ++k) {
    const double s = (k == 0) ? 0.0 : static_cast<double>((k + 1) / 2) * (k % 2 ? 1.0 : -1.0);
    Vec u = Vec::Zero(n);
    u(0) = 1;
    u(1) = s;
    u.normalize();
    bool hit = false;
    for (const auto& c : C) {
      if (c.size() != n) throw Error(ErrorKind::kInvalidArgument, "point dimension mismatch");
      const double cn = c.norm();
      if (cn > 0 && (c - c.dot(u) * u).norm() <= 1e-6 * cn) hit = true;
    }
    if (hit) continue;
    Eigen::HouseholderQR<Mat> qr{Mat(u)};
    const Mat R = qr.householderQ() * Mat::Identity(n, n);
    std::vector<Mat> terms;
    for (int e = 1; e <= 7; e += 2) {
      Vec d = Vec::Constant(n, std::pow(10.0, e));
      d(0) = 1;
      terms.push_back(R * d.asDiagonal() * R.transpose());
    }
    LimitOptions opts;
    auto q = matrix_limit(MatrixSequenceSpec::explicit_list(std::move(terms)), opts);
    ProjectiveWitness w{u, q, true, false};
    for (const auto& c : C) {
      const bool q_inf = !q(c, 1e-7).has_value();
      const bool p_inf = c.norm() > 0;
      if (q_inf != p_inf) w.agrees_on_C = false;
    }
    const auto qu = q(u, 1e-7);
    w.differs = qu.has_value() && (*qu - u).norm() <= 1e-6;
    return w;
  }
}

// ---- affine catalog ----

std::string ExtReal::to_string() const {
  switch (kind) {
    case Kind::kNegInf: return "-inf";
    case Kind::kPosInf: return "+inf";
    case Kind::kFinite: return value.str();
  }
  return "?";
}

ExtReal CatalogElement::operator()(const ExtReal& t) const {
  if (t.kind != ExtReal::Kind::kFinite) return t;
  const Rational& x = t.value;
  switch (kind) {
    case Kind::kCircle:
      if (x > s) return ExtReal::pos_inf();
      if (x < s) return ExtReal::neg_inf();
      return ExtReal::finite(r);
    case Kind::kInner: return ExtReal::finite(s);
    case Kind::kPosInf: return ExtReal::pos_inf();
    case Kind::kNegInf: return ExtReal::neg_inf();
    case Kind::kPosInfAt: return x >= s ? ExtReal::pos_inf() : ExtReal::neg_inf();
    case Kind::kNegInfAt: return x > s ? ExtReal::pos_inf() : ExtReal::neg_inf();
  }
  throw Error(ErrorKind::kInternal, "unknown catalog kind");
}

std::pair<Rational, Rational> CatalogElement::realizing_term(const Rational& m, const Rational& root_m) const {
  switch (kind) {
    case Kind::kCircle: return {m, r - m * s};
    case Kind::kInner: return {1 / m, s};
    case Kind::kPosInf: return {m, m * m};
    case Kind::kNegInf: return {m, -m * m};
    case Kind::kPosInfAt: return {m, -m * s + root_m};
    case Kind::kNegInfAt: return {m, -m * s - root_m};
  }
  throw Error(ErrorKind::kInternal, "unknown catalog kind");
}

bool CatalogElement::operator==(const CatalogElement& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::kCircle: return r == o.r && s == o.s;
    case Kind::kInner:
    case Kind::kPosInfAt:
    case Kind::kNegInfAt: return s == o.s;
    default: return true;
  }
}

std::string CatalogElement::to_string() const {
  switch (kind) {
    case Kind::kCircle: return "p_circ(" + r.str() + "," + s.str() + ")";
    case Kind::kInner: return "p_i(" + s.str() + ")";
    case Kind::kPosInf: return "p_+inf";
    case Kind::kNegInf: return "p_-inf";
    case Kind::kPosInfAt: return "p_+inf(" + s.str() + ")";
    case Kind::kNegInfAt: return "p_-inf(" + s.str() + ")";
  }
  return "?";
}

std::vector<CatalogElement> catalog_candidates(const std::vector<Rational>& grid) {
  using K = CatalogElement::Kind;
  std::vector<CatalogElement> out{{K::kPosInf, 0, 0}, {K::kNegInf, 0, 0}};
  for (const auto& s : grid) {
    out.push_back({K::kInner, 0, s});
    out.push_back({K::kPosInfAt, 0, s});
    out.push_back({K::kNegInfAt, 0, s});
    for (const auto& r : grid) out.push_back({K::kCircle, r, s});
  }
  return out;
}

std::vector<ExtReal> pinning_points(const CatalogElement& e, const std::vector<ExtReal>& samples) {
  using K = CatalogElement::Kind;
  if (e.kind == K::kCircle) return {ExtReal::finite(e.s - 1), ExtReal::finite(e.s), ExtReal::finite(e.s + 1)};
  if (e.kind == K::kInner) return {ExtReal::finite(0), ExtReal::finite(1), ExtReal::finite(2)};
  return samples;
}

CatalogLimit affine_catalog_limit(const CatalogElement& e, const std::vector<ExtReal>& samples,
                                  const std::vector<CatalogElement>& candidates, int stages) {
  if (stages < 3) throw Error(ErrorKind::kInvalidArgument, "affine_catalog_limit needs at least three stages");
  CatalogLimit out{e, samples, {}, true, pinning_points(e, samples), true};
  std::vector<std::pair<Rational, Rational>> terms;
  Rational root = 1;
  for (int j = 0; j < stages; ++j) {
    root *= 10;
    terms.push_back(e.realizing_term(root * root, root));
  }
  for (const auto& t : samples) {
    ExtReal lim;
    if (t.kind != ExtReal::Kind::kFinite) {
      lim = t;
    } else {
      std::vector<double> v;
      Rational last;
      for (const auto& [a, b] : terms) {
        last = a * t.value + b;
        v.push_back(static_cast<double>(last));
      }
      const auto S = v.size();
      const double d1 = std::abs(v[S - 1] - v[S - 2]), d0 = std::abs(v[S - 2] - v[S - 3]);
      if (d1 <= 1e-3 && d1 <= d0) {
        lim = ExtReal::finite(last);
      } else if (std::abs(v[S - 1]) >= 1e3 && std::abs(v[S - 1]) >= 5 * std::abs(v[S - 2]) &&
                 (v[S - 1] > 0) == (v[S - 2] > 0)) {
        lim = v[S - 1] > 0 ? ExtReal::pos_inf() : ExtReal::neg_inf();
      } else {
        throw Error(ErrorKind::kNotStabilized, "trajectory of " + t.to_string() + " under " + e.to_string() +
                                                   " neither settles nor escapes");
      }
    }
    const ExtReal want = e(t);
    if (want.kind != lim.kind) out.matches_rule = false;
    if (want.kind == ExtReal::Kind::kFinite && abs(want.value - lim.value) > Rational(1, 1000))
      out.matches_rule = false;
    out.limits.push_back(lim);
  }
  for (const auto& c : candidates) {
    if (c == e) continue;
    bool agrees = true;
    for (const auto& x : out.pinning_points)
      if (!(c(x) == e(x))) agrees = false;
    if (agrees) out.pinned = false;
  }
  return out;
}

}  // namespace tame::linear
