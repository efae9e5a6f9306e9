#include "liftlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "liftlab/errors.hpp"

namespace liftlab::linalg {

namespace {

struct FullSvd {
  CMatrix U;
  CMatrix V;
  Eigen::VectorXd s;
};

FullSvd full_svd(const CMatrix& M) {
  FullSvd out;
  const Index r = M.rows(), c = M.cols();
  if (r == 0 || c == 0) {
    out.U = CMatrix::Identity(r, r);
    out.V = CMatrix::Identity(c, c);
    out.s.resize(0);
    return out;
  }
  Eigen::BDCSVD<CMatrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.U = svd.matrixU();
  out.V = svd.matrixV();
  out.s = svd.singularValues();
  return out;
}

Index count_above(const Eigen::VectorXd& s, double tol) {
  Index k = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) >= tol) ++k;
  return k;
}

double arg_2pi(cplx z) {
  double a = std::arg(z);
  if (a < 0) a += 2.0 * std::numbers::pi;
  if (a >= 2.0 * std::numbers::pi) a = 0.0;
  return a;
}

void require_contraction(const CMatrix& M, double tol, const char* who) {
  const double n = op_norm(M);
  if (n > 1.0 + tol)
    throw NotAContraction(std::string(who) + ": operator norm " + std::to_string(n) +
                          " exceeds 1");
}

}  // namespace

CMatrix identity(Index n) { return CMatrix::Identity(n, n); }

CMatrix SubspaceBasis::projector() const { return columns * columns.adjoint(); }

SubspaceBasis SubspaceBasis::zero(Index ambient) {
  return SubspaceBasis{ambient, CMatrix(ambient, 0), kRankTol};
}

SubspaceBasis SubspaceBasis::whole(Index ambient) {
  return SubspaceBasis{ambient, identity(ambient), kRankTol};
}

SubspaceBasis SubspaceBasis::span_of(const CMatrix& vectors, double tol) {
  return range_basis(vectors, tol);
}

std::vector<double> singular_values(const CMatrix& M) {
  if (M.rows() == 0 || M.cols() == 0) return {};
  Eigen::BDCSVD<CMatrix> svd(M);
  const auto& s = svd.singularValues();
  return std::vector<double>(s.data(), s.data() + s.size());
}

double op_norm(const CMatrix& M) {
  auto s = singular_values(M);
  return s.empty() ? 0.0 : s.front();
}

Index numerical_rank(const CMatrix& M, double tol) {
  auto s = singular_values(M);
  return static_cast<Index>(std::count_if(s.begin(), s.end(), [&](double v) { return v >= tol; }));
}

CMatrix psd_sqrt(const CMatrix& H) {
  const Index n = H.rows();
  if (n == 0) return CMatrix(0, 0);
  CMatrix Hs = 0.5 * (H + H.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(Hs);
  // eigenvalues at rounding level are zero; their square roots would be ~1e-8
  const double floor = 16.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  Eigen::VectorXd ev =
      es.eigenvalues().unaryExpr([floor](double v) { return v <= floor ? 0.0 : std::sqrt(v); });
  return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix defect(const CMatrix& M, double tol) {
  require_contraction(M, tol, "defect");
  return psd_sqrt(identity(M.cols()) - M.adjoint() * M);
}

CMatrix defect_adjoint(const CMatrix& M, double tol) { return defect(M.adjoint(), tol); }

std::vector<std::string> ClassSet::names() const {
  std::vector<std::string> out;
  if (has(OperatorClass::contraction)) out.push_back("contraction");
  if (has(OperatorClass::isometry)) out.push_back("isometry");
  if (has(OperatorClass::coisometry)) out.push_back("coisometry");
  if (has(OperatorClass::unitary)) out.push_back("unitary");
  if (has(OperatorClass::partial_isometry)) out.push_back("partial_isometry");
  if (out.empty()) out.push_back("none");
  return out;
}

ClassSet classify(const CMatrix& M, double tol) {
  ClassSet cs;
  const bool iso = op_norm(M.adjoint() * M - identity(M.cols())) <= tol;
  const bool coiso = op_norm(M * M.adjoint() - identity(M.rows())) <= tol;
  const bool partial = iso || coiso || op_norm(M * M.adjoint() * M - M) <= tol;
  const bool contraction = iso || coiso || op_norm(M) <= 1.0 + tol;
  if (contraction) cs.add(OperatorClass::contraction);
  if (iso) cs.add(OperatorClass::isometry);
  if (coiso) cs.add(OperatorClass::coisometry);
  if (iso && coiso) cs.add(OperatorClass::unitary);
  if (partial) cs.add(OperatorClass::partial_isometry);
  return cs;
}

SubspaceBasis kernel_basis(const CMatrix& M, double tol) {
  const Index c = M.cols();
  if (M.rows() == 0) return SubspaceBasis{c, identity(c), tol};
  FullSvd svd = full_svd(M);
  const Index r = count_above(svd.s, tol);
  return SubspaceBasis{c, svd.V.rightCols(c - r), tol};
}

SubspaceBasis range_basis(const CMatrix& M, double tol) {
  const Index rows = M.rows();
  if (M.cols() == 0) return SubspaceBasis{rows, CMatrix(rows, 0), tol};
  FullSvd svd = full_svd(M);
  const Index r = count_above(svd.s, tol);
  return SubspaceBasis{rows, svd.U.leftCols(r), tol};
}

SubspaceBasis orthogonal_complement(const SubspaceBasis& S) {
  const Index n = S.ambient_dim;
  if (S.dim() == 0) return SubspaceBasis{n, identity(n), S.tol};
  FullSvd svd = full_svd(S.columns);
  const Index r = count_above(svd.s, 0.5);
  return SubspaceBasis{n, svd.U.rightCols(n - r), S.tol};
}

SubspaceBasis subspace_intersection(const SubspaceBasis& U, const SubspaceBasis& V, double tol) {
  if (U.ambient_dim != V.ambient_dim)
    throw DimensionMismatch("subspace_intersection: ambient dimensions " +
                            std::to_string(U.ambient_dim) + " and " +
                            std::to_string(V.ambient_dim));
  const Index n = U.ambient_dim;
  if (U.dim() == 0 || V.dim() == 0) return SubspaceBasis{n, CMatrix(n, 0), tol};
  // principal cosines close to 1 mark common directions
  FullSvd svd = full_svd(U.columns.adjoint() * V.columns);
  const Index k = count_above(svd.s, 1.0 - tol);
  CMatrix cols = U.columns * svd.U.leftCols(k);
  if (k > 0) {
    Eigen::HouseholderQR<CMatrix> qr(cols);
    CMatrix Q = qr.householderQ() * CMatrix::Identity(n, k);
    cols = Q;
  }
  return SubspaceBasis{n, cols, tol};
}

std::vector<cplx> sorted_eigenvalues(const CMatrix& T) {
  if (T.rows() != T.cols()) throw NotSquare("sorted_eigenvalues: matrix is not square");
  if (T.rows() == 0) return {};
  Eigen::ComplexEigenSolver<CMatrix> es(T, false);
  const auto& ev = es.eigenvalues();
  std::vector<cplx> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
    const double ma = std::abs(a), mb = std::abs(b);
    if (std::abs(ma - mb) > 1e-12 * std::max(1.0, ma)) return ma > mb;
    return arg_2pi(a) < arg_2pi(b);
  });
  return out;
}

double spectral_radius(const CMatrix& T) {
  auto ev = sorted_eigenvalues(T);
  return ev.empty() ? 0.0 : std::abs(ev.front());
}

bool is_c_dot_0(const CMatrix& T, double tol) { return spectral_radius(T) < 1.0 - tol; }

std::optional<Witness> find_non_c0dot_witness(const CMatrix& T, double tol) {
  require_contraction(T, tol, "find_non_c0dot_witness");
  auto ev = sorted_eigenvalues(T);
  for (cplx lambda : ev) {
    if (std::abs(lambda) < 1.0 - tol) break;
    const Index n = T.rows();
    FullSvd svd = full_svd(T - lambda * identity(n));
    CVector h = svd.V.col(n - 1);
    Index imax = 0;
    h.cwiseAbs().maxCoeff(&imax);
    h *= std::conj(h(imax)) / std::abs(h(imax));
    h.normalize();
    return Witness{lambda, h};
  }
  return std::nullopt;
}

SubspaceBasis detect_unitary_part(const CMatrix& T, int n_max, double tol) {
  if (T.rows() != T.cols()) throw NotSquare("detect_unitary_part: matrix is not square");
  require_contraction(T, kClassifyTol, "detect_unitary_part");
  const Index dim = T.rows();
  const CMatrix I = identity(dim);
  CMatrix Tn = I;
  Index last_fwd = -1, last_bwd = -1;
  CMatrix fwd(0, dim), bwd(0, dim);
  SubspaceBasis result = SubspaceBasis::whole(dim);
  for (int n = 1; n <= n_max; ++n) {
    Tn = Tn * T;
    CMatrix P = I - Tn.adjoint() * Tn;
    CMatrix Q = I - Tn * Tn.adjoint();
    CMatrix f2(fwd.rows() + dim, dim), b2(bwd.rows() + dim, dim);
    f2 << fwd, P;
    b2 << bwd, Q;
    fwd = std::move(f2);
    bwd = std::move(b2);
    const Index kf = kernel_basis(fwd, tol).dim();
    const Index kb = kernel_basis(bwd, tol).dim();
    CMatrix both(fwd.rows() + bwd.rows(), dim);
    both << fwd, bwd;
    result = kernel_basis(both, tol);
    if (result.dim() == 0) break;
    if (kf == last_fwd && kb == last_bwd) break;
    last_fwd = kf;
    last_bwd = kb;
  }
  return result;
}

}  // namespace liftlab::linalg
