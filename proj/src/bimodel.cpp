#include "liftlab/bimodel.hpp"

#include <random>

#include "liftlab/errors.hpp"
#include "liftlab/kernels.hpp"

namespace liftlab::bimodel {

namespace {

int top_nonzero(const std::vector<CVector>& c) {
  for (int n = static_cast<int>(c.size()) - 1; n >= 0; --n)
    if (c[n].squaredNorm() > 0.0) return n;
  return -1;
}

bool row_nonzero(const std::vector<CVector>& row) {
  for (const auto& x : row)
    if (x.squaredNorm() > 0.0) return true;
  return false;
}

CVector f_at(const ModelVector& v, cplx z) {
  CVector acc = v.f.back();
  for (int n = static_cast<int>(v.f.size()) - 2; n >= 0; --n) acc = v.f[n] + z * acc;
  return acc;
}

}  // namespace

ThetaModel build_model(const h2::MatPoly& Theta, int K, int N) {
  if (Theta.rows() != Theta.cols()) throw NotSquare("Theta must map E to E");
  if (K <= N) throw GridTooCoarse("K must exceed the truncation degree");
  ThetaModel m;
  m.Theta = Theta;
  m.K = K;
  m.N = N;
  m.zeta = kernels::circle_nodes(1.0, K);
  m.Delta.resize(static_cast<size_t>(K));
  m.range_projector.resize(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k) {
    const CMatrix T = Theta(m.zeta[k]);
    const double nrm = linalg::op_norm(T);
    if (nrm > 1.0 + 1e-8)
      throw NotContractiveOnGrid("Theta has norm " + std::to_string(nrm) + " at node " +
                                 std::to_string(k));
    m.Delta[k] = linalg::defect(T, 1e-8);
    m.range_projector[k] = linalg::range_basis(m.Delta[k]).projector();
  }
  return m;
}

ModelVector zero_vector(const ThetaModel& m) {
  ModelVector v;
  v.f.assign(static_cast<size_t>(m.N + 1), CVector::Zero(m.dim()));
  v.g.assign(static_cast<size_t>(m.N + 1),
             std::vector<CVector>(static_cast<size_t>(m.K), CVector::Zero(m.dim())));
  return v;
}

void project(const ThetaModel& m, ModelVector& v) {
  for (auto& row : v.g)
    for (int k = 0; k < m.K; ++k) row[k] = m.range_projector[k] * row[k];
}

double norm_sq(const ThetaModel& m, const ModelVector& v) {
  double f = 0.0, g = 0.0;
  for (const auto& c : v.f) f += c.squaredNorm();
  for (const auto& row : v.g)
    for (const auto& x : row) g += x.squaredNorm();
  return f + g / m.K;
}

ModelVector subtract(const ModelVector& a, const ModelVector& b) {
  ModelVector d = a;
  for (size_t n = 0; n < d.f.size(); ++n) d.f[n] -= b.f[n];
  for (size_t w = 0; w < d.g.size(); ++w)
    for (size_t k = 0; k < d.g[w].size(); ++k) d.g[w][k] -= b.g[w][k];
  return d;
}

ModelVector apply_V(const ThetaModel& m, const ModelVector& v) {
  if (top_nonzero(v.f) >= m.N) throw WindowOverflow("z f leaves the truncation");
  ModelVector out = zero_vector(m);
  for (int n = 0; n < m.N; ++n) out.f[n + 1] = v.f[n];
  for (int w = 0; w <= m.N; ++w)
    for (int k = 0; k < m.K; ++k) out.g[w][k] = m.zeta[k] * v.g[w][k];
  return out;
}

ModelVector apply_W(const ThetaModel& m, const ModelVector& v) {
  const int df = top_nonzero(v.f);
  if (df + m.Theta.degree() > m.N) throw WindowOverflow("Theta f leaves the truncation");
  if (row_nonzero(v.g[m.N])) throw WindowOverflow("w g leaves the truncation");
  ModelVector out = zero_vector(m);
  for (int n = 0; n <= df; ++n)
    for (int j = 0; j <= m.Theta.degree(); ++j) out.f[n + j] += m.Theta.coeff(j) * v.f[n];
  std::vector<CVector> first(static_cast<size_t>(m.K));
  kernels::for_each_node(m.K, [&](int k) { first[k] = m.Delta[k] * f_at(v, m.zeta[k]); });
  out.g[0] = std::move(first);
  for (int w = 0; w < m.N; ++w) out.g[w + 1] = v.g[w];
  return out;
}

ModelVector random_window_vector(const ThetaModel& m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  auto rv = [&] {
    CVector x(m.dim());
    for (Index i = 0; i < x.size(); ++i) x(i) = cplx(gauss(rng), gauss(rng));
    return x;
  };
  ModelVector v = zero_vector(m);
  const int fdeg = m.N - m.Theta.degree() - 1;
  for (int n = 0; n <= fdeg; ++n) v.f[n] = rv();
  for (int w = 0; w + 1 < m.N; ++w)
    for (int k = 0; k < m.K; ++k) v.g[w][k] = rv();
  project(m, v);
  return v;
}

criteria::CriterionReport verify_bi_isometry(const ThetaModel& m, int trials, std::uint64_t seed,
                                             double tol) {
  criteria::CriterionReport r;
  r.criterion_id = "bi_isometry";
  double v_iso = 0.0, w_iso = 0.0, comm = 0.0, pyth = 0.0;
  for (int t = 0; t < trials; ++t) {
    const ModelVector v = random_window_vector(m, seed + static_cast<std::uint64_t>(t));
    const double n0 = norm_sq(m, v);
    const ModelVector Vv = apply_V(m, v), Wv = apply_W(m, v);
    v_iso = std::max(v_iso, std::abs(norm_sq(m, Vv) - n0) / n0);
    w_iso = std::max(w_iso, std::abs(norm_sq(m, Wv) - n0) / n0);
    const ModelVector d = subtract(apply_V(m, Wv), apply_W(m, Vv));
    comm = std::max(comm, std::sqrt(norm_sq(m, d) / n0));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < m.K; ++k) {
    CVector x(m.dim());
    for (Index i = 0; i < x.size(); ++i) x(i) = cplx(gauss(rng), gauss(rng));
    const CMatrix T = m.Theta(m.zeta[k]);
    const double xx = x.squaredNorm();
    pyth = std::max(pyth, std::abs((T * x).squaredNorm() + (m.Delta[k] * x).squaredNorm() - xx) / xx);
  }
  r.metrics["V_isometry_residual"] = v_iso;
  r.metrics["W_isometry_residual"] = w_iso;
  r.metrics["commutation_residual"] = comm;
  r.metrics["pythagoras_residual"] = pyth;
  r.metrics["trials"] = trials;
  r.metrics["K"] = m.K;
  r.metrics["N"] = m.N;
  r.tolerances["tol"] = tol;
  const bool ok = v_iso <= tol && w_iso <= tol && comm <= tol && pyth <= tol;
  r.verdict = ok ? criteria::Verdict::pass : criteria::Verdict::fail;
  return r;
}

}  // namespace liftlab::bimodel
