#include "liftlab/coiso.hpp"

#include <random>

#include "liftlab/errors.hpp"

namespace liftlab::coiso {

namespace {

// Rotate each column so its largest entry is real and positive.
CMatrix fix_phases(CMatrix Q) {
  for (Index j = 0; j < Q.cols(); ++j) {
    Index i = 0;
    Q.col(j).cwiseAbs().maxCoeff(&i);
    const cplx v = Q(i, j);
    if (std::abs(v) > 0.0) Q.col(j) *= std::abs(v) / v;
  }
  return Q;
}

CMatrix random_unitary(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CMatrix G(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) G(i, j) = cplx(g(rng), g(rng));
  Eigen::HouseholderQR<CMatrix> qr(G);
  return qr.householderQ() * CMatrix::Identity(n, n);
}

CMatrix defect_of_adjoint(const ExtensionProblem& p) {
  const Index m = p.M.dim();
  return linalg::psd_sqrt(CMatrix::Identity(m, m) - p.C * p.C.adjoint());
}

}  // namespace

ExtensionProblem make_problem(const CMatrix& M_span, const CMatrix& M_prime_span,
                              const CMatrix& C_ambient, double tol) {
  ExtensionProblem p;
  p.H_dim = M_span.rows();
  p.H_prime_dim = M_prime_span.rows();
  p.tol = tol;
  if (C_ambient.rows() != p.H_dim || C_ambient.cols() != p.H_prime_dim)
    throw DimensionMismatch("C must be " + std::to_string(p.H_dim) + " x " +
                            std::to_string(p.H_prime_dim));
  p.M = linalg::SubspaceBasis::span_of(M_span);
  p.M.ambient_dim = p.H_dim;
  p.M_prime = linalg::SubspaceBasis::span_of(M_prime_span);
  p.M_prime.ambient_dim = p.H_prime_dim;
  p.C = p.M.columns.adjoint() * C_ambient * p.M_prime.columns;
  const double off = (C_ambient - p.M.columns * p.C * p.M_prime.columns.adjoint()).norm();
  if (off > tol * std::max(1.0, C_ambient.norm()))
    throw DimensionMismatch("C is not supported on M' with range in M");
  return p;
}

ExtensionCount can_extend(const ExtensionProblem& p) {
  if (p.C.rows() != p.M.dim() || p.C.cols() != p.M_prime.dim())
    throw DimensionMismatch("C must map M' into M");
  if (linalg::op_norm(p.C) > 1.0 + p.tol) throw NotContraction("C is not a contraction");
  ExtensionCount c;
  c.codim_M_prime = p.H_prime_dim - p.M_prime.dim();
  c.codim_M = p.H_dim - p.M.dim();
  c.rank_C = linalg::numerical_rank(p.C);
  c.dense_range = c.rank_C == p.M.dim();
  c.defect_C_star = linalg::numerical_rank(defect_of_adjoint(p));
  c.feasible = c.dense_range && c.codim_M_prime >= c.required();
  return c;
}

CMatrix build_extension(const ExtensionProblem& p, std::optional<std::uint64_t> seed) {
  const ExtensionCount cnt = can_extend(p);
  if (!cnt.dense_range)
    throw DimensionObstruction("C has rank " + std::to_string(cnt.rank_C) + " but M has dimension " +
                               std::to_string(p.M.dim()) + ", so its range is not dense");
  if (!cnt.feasible)
    throw DimensionObstruction("dim(H' - M') = " + std::to_string(cnt.codim_M_prime) +
                               " is less than dim(H - M) + dim D_C* = " +
                               std::to_string(cnt.required()));
  const CMatrix& Mb = p.M.columns;
  const CMatrix& Mpb = p.M_prime.columns;
  const CMatrix Dcs = defect_of_adjoint(p);
  const CMatrix Qd = linalg::range_basis(Dcs).columns;
  const CMatrix Nc = fix_phases(linalg::orthogonal_complement(p.M).columns);

  CMatrix free = fix_phases(linalg::orthogonal_complement(p.M_prime).columns);
  if (seed) free = free * random_unitary(free.cols(), *seed);
  const CMatrix Xb = free.leftCols(Qd.cols());
  const CMatrix Yb = free.middleCols(Qd.cols(), Nc.cols());

  // C1 = C^* + X D_C* on M, an isometry of H - M onto Y elsewhere
  const CMatrix C1 = Mpb * p.C.adjoint() * Mb.adjoint() + Xb * Qd.adjoint() * Dcs * Mb.adjoint() +
                     Yb * Nc.adjoint();
  return C1.adjoint();
}

ExtensionResiduals residuals(const ExtensionProblem& p, const CMatrix& C_hat) {
  ExtensionResiduals r;
  const CMatrix& Mb = p.M.columns;
  const CMatrix& Mpb = p.M_prime.columns;
  r.coisometry = linalg::op_norm(C_hat * C_hat.adjoint() - linalg::identity(p.H_dim));
  r.restriction = linalg::op_norm(C_hat * Mpb - Mb * p.C);
  const CMatrix Nc = linalg::orthogonal_complement(p.M).columns;
  r.complement_orthogonal = linalg::op_norm(Mpb.adjoint() * C_hat.adjoint() * Nc);
  r.compression = linalg::op_norm(Mpb.adjoint() * C_hat.adjoint() * Mb - p.C.adjoint());
  return r;
}

}  // namespace liftlab::coiso
