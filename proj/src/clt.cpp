#include "liftlab/clt.hpp"

#include <algorithm>
#include <cmath>

#include "liftlab/errors.hpp"
#include "liftlab/kernels.hpp"

namespace liftlab::clt {

using linalg::SubspaceBasis;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

CMatrix block_diag(const CMatrix& a, const CMatrix& b) {
  CMatrix out = CMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

CMatrix vstack(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() + b.rows(), a.cols());
  out << a, b;
  return out;
}

void finish_coordinates(LiftingData& ld) {
  const Index p = ld.p(), q = ld.q(), pw = ld.p_window();
  ld.ker_omega = linalg::kernel_basis(ld.omega_bar);
  ld.ker_omega_star = linalg::kernel_basis(ld.omega_bar.adjoint());
  ld.Pi = CMatrix::Zero(p, q + pw);
  ld.Pi.rightCols(pw) = ld.basis_DX.adjoint() * ld.basis_DXwindow;
  ld.Pi_prime = CMatrix::Zero(q, q + pw);
  ld.Pi_prime.leftCols(q) = CMatrix::Identity(q, q);
}

CVector flatten(const KVector& k) {
  Index n = k.head.size();
  for (const auto& t : k.tail) n += t.size();
  CVector out(n);
  Index at = 0;
  out.segment(at, k.head.size()) = k.head;
  at += k.head.size();
  for (const auto& t : k.tail) {
    out.segment(at, t.size()) = t;
    at += t.size();
  }
  return out;
}

}  // namespace

CMatrix materialize(const OperatorSpec& spec) {
  return std::visit(
      overloaded{
          [](const DenseSpec& s) -> CMatrix { return s.T; },
          [](const ShiftSpec& s) -> CMatrix {
            const Index d = s.mult;
            const Index n = d * (s.degree + 1);
            CMatrix T = CMatrix::Zero(n, n);
            for (int k = 0; k < s.degree; ++k)
              T.block((k + 1) * d, k * d, d, d) = CMatrix::Identity(d, d);
            return T;
          },
          [](const MultOpSpec& s) -> CMatrix {
            if (s.symbol.rows() != s.symbol.cols())
              throw NotSquare("multiplication operator: symbol is not square");
            const Index d = s.symbol.rows();
            const Index n = d * (s.degree + 1);
            CMatrix T = CMatrix::Zero(n, n);
            for (int i = 0; i <= s.degree; ++i)
              for (int k = 0; k <= i; ++k)
                if (i - k <= s.symbol.degree()) T.block(i * d, k * d, d, d) = s.symbol.coeff(i - k);
            return T;
          },
      },
      spec);
}

CMatrix window_basis(const OperatorSpec& spec) {
  return std::visit(
      overloaded{
          [](const DenseSpec& s) -> CMatrix {
            if (s.window.size() == 0) return linalg::identity(s.T.rows());
            if (s.window.rows() != s.T.rows())
              throw DimensionMismatch("window vectors have the wrong length");
            return linalg::range_basis(s.window).columns;
          },
          [](const ShiftSpec& s) -> CMatrix {
            if (s.degree < 1) throw DimensionMismatch("shift: degree must be at least 1");
            const Index n = s.mult * (s.degree + 1);
            return CMatrix::Identity(n, s.mult * s.degree);
          },
          [](const MultOpSpec& s) -> CMatrix {
            const int top = s.degree - s.symbol.degree();
            if (top < 0) throw DimensionMismatch("multiplication operator: degree below symbol degree");
            const Index d = s.symbol.rows();
            return CMatrix::Identity(d * (s.degree + 1), d * (top + 1));
          },
      },
      spec);
}

CLTProblem build_problem(OperatorSpec spec, CMatrix T_prime, CMatrix X, double tol) {
  CLTProblem p;
  p.T = materialize(spec);
  p.window = window_basis(spec);
  p.spec = std::move(spec);
  p.T_prime = std::move(T_prime);
  p.X = std::move(X);
  p.tol = tol;

  if (p.T.rows() != p.T.cols()) throw NotSquare("problem: T is not square");
  if (p.T_prime.rows() != p.T_prime.cols()) throw NotSquare("problem: T' is not square");
  if (p.X.rows() != p.T_prime.rows() || p.X.cols() != p.T.rows())
    throw DimensionMismatch("problem: X must map the space of T into the space of T'");

  if (linalg::op_norm(p.X) > 1.0 + tol) throw NotContraction("problem: X is not a contraction");
  if (linalg::op_norm(p.T_prime) > 1.0 + tol)
    throw NotContraction("problem: T' is not a contraction");

  const CMatrix TW = p.T * p.window;
  const double iso = linalg::op_norm(TW.adjoint() * TW - linalg::identity(TW.cols()));
  if (iso > tol) throw NotIsometryOnWindow("problem: T is not isometric on its window");

  p.intertwining_residual = linalg::op_norm((p.T_prime * p.X - p.X * p.T) * p.window);
  if (p.intertwining_residual > tol * std::max(1.0, linalg::op_norm(p.X)))
    throw IntertwiningViolated("problem: T'X differs from XT on the window", p.intertwining_residual);
  return p;
}

CMatrix LiftingData::omega_bar_ambient() const {
  return block_diag(basis_DTprime, basis_DXwindow) * omega_bar * basis_DX.adjoint();
}

LiftingData build_omega(const CLTProblem& p) {
  LiftingData ld;
  ld.D_X = linalg::defect(p.X, p.tol);
  ld.D_Tprime = linalg::defect(p.T_prime, p.tol);
  ld.basis_DX = linalg::range_basis(ld.D_X).columns;
  ld.basis_DTprime = linalg::range_basis(ld.D_Tprime).columns;
  ld.basis_DXwindow = linalg::range_basis(ld.D_X * p.window).columns;

  const Index pdim = ld.p(), target = ld.q() + ld.p_window();
  const CMatrix M1 = ld.basis_DX.adjoint() * ld.D_X * p.T * p.window;
  const CMatrix M2 = vstack(ld.basis_DTprime.adjoint() * ld.D_Tprime * p.X * p.window,
                            ld.basis_DXwindow.adjoint() * ld.D_X * p.window);

  ld.omega_bar = CMatrix::Zero(target, pdim);
  if (M1.rows() > 0 && M1.cols() > 0) {
    Eigen::BDCSVD<CMatrix> svd(M1, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    Index r = 0;
    while (r < s.size() && s(r) >= kRankTol) ++r;
    if (r > 0) {
      // omega maps M1 x to M2 x; on the range of M1 this is M2 V S^{-1} U^*
      CMatrix G = M2 * svd.matrixV().leftCols(r) *
                  s.head(r).cwiseInverse().cast<cplx>().asDiagonal();
      Eigen::BDCSVD<CMatrix> polar(G, Eigen::ComputeThinU | Eigen::ComputeThinV);
      CMatrix Go = polar.matrixU() * polar.matrixV().adjoint();
      ld.omega_bar = Go * svd.matrixU().leftCols(r).adjoint();
    }
  }
  finish_coordinates(ld);
  return ld;
}

LiftingData build_omega_explicit(const CLTProblem& p) {
  LiftingData ld;
  ld.D_X = linalg::defect(p.X, p.tol);
  auto sv = linalg::singular_values(ld.D_X);
  if (!sv.empty() && sv.back() < kRankTol)
    throw DefectSingular("explicit construction needs an invertible D_X");
  ld.D_Tprime = linalg::defect(p.T_prime, p.tol);
  ld.basis_DX = linalg::identity(p.X.cols());
  ld.basis_DTprime = linalg::range_basis(ld.D_Tprime).columns;
  ld.basis_DXwindow = linalg::range_basis(ld.D_X * p.window).columns;

  const CMatrix TW = p.T * p.window;
  const CMatrix G = TW.adjoint() * ld.D_X * ld.D_X * TW;
  const CMatrix stacked = vstack(ld.D_Tprime * p.X * p.window, ld.D_X * p.window);
  const CMatrix ambient = stacked * G.ldlt().solve(TW.adjoint() * ld.D_X);
  ld.omega_bar = block_diag(ld.basis_DTprime, ld.basis_DXwindow).adjoint() * ambient;
  finish_coordinates(ld);
  return ld;
}

CMatrix omega_star_omega_explicit(const CLTProblem& p) {
  const CMatrix D = linalg::defect(p.X, p.tol);
  const CMatrix TW = p.T * p.window;
  const CMatrix G = TW.adjoint() * D * D * TW;
  return D * TW * G.ldlt().solve(TW.adjoint() * D);
}

KVector IsometricLifting::apply(const KVector& k) const {
  KVector out;
  out.head = T_prime * k.head;
  out.tail.resize(static_cast<size_t>(degree + 1));
  out.tail[0] = defect_coords * k.head;
  for (int n = 1; n <= degree; ++n) out.tail[n] = k.tail[n - 1];
  return out;
}

KVector IsometricLifting::embed(const CVector& h_prime) const {
  KVector k;
  k.head = h_prime;
  k.tail.assign(static_cast<size_t>(degree + 1), CVector::Zero(defect_dim()));
  return k;
}

CMatrix IsometricLifting::dense() const {
  const Index n = head_dim(), q = defect_dim();
  CMatrix U = CMatrix::Zero(dim(), dim());
  U.topLeftCorner(n, n) = T_prime;
  U.block(n, 0, q, n) = defect_coords;
  for (int k = 1; k <= degree; ++k) U.block(n + k * q, n + (k - 1) * q, q, q) = linalg::identity(q);
  return U;
}

double IsometricLifting::norm_sq(const KVector& k) {
  double s = k.head.squaredNorm();
  for (const auto& t : k.tail) s += t.squaredNorm();
  return s;
}

IsometricLifting minimal_isometric_lifting(const CMatrix& T_prime, int N) {
  if (T_prime.rows() != T_prime.cols()) throw NotSquare("minimal_isometric_lifting: T' is not square");
  const CMatrix D = linalg::defect(T_prime);
  const CMatrix Q = linalg::range_basis(D).columns;
  return IsometricLifting{T_prime, Q.adjoint() * D, N};
}

Index lifting_span_rank(const IsometricLifting& U, int n_max) {
  const Index n = U.head_dim();
  CMatrix span(U.dim(), n * (n_max + 1));
  for (Index i = 0; i < n; ++i) {
    KVector k = U.embed(CVector::Unit(n, i));
    for (int m = 0; m <= n_max; ++m) {
      span.col(m * n + i) = flatten(k);
      k = U.apply(k);
    }
  }
  return linalg::numerical_rank(span);
}

h2::AnalyticFn assemble_schur_W(const LiftingData& ld, const h2::AnalyticFn& R, int check_grid) {
  const CMatrix& K = ld.ker_omega_star.columns;
  const CMatrix& Kin = ld.ker_omega.columns;
  if (R.rows() != K.cols() || R.cols() != Kin.cols())
    throw WrongKernelShapes("Schur symbol must be " + std::to_string(K.cols()) + " x " +
                            std::to_string(Kin.cols()) + ", got " + std::to_string(R.rows()) +
                            " x " + std::to_string(R.cols()));
  auto z = kernels::circle_nodes(1.0, check_grid);
  std::vector<double> norms(z.size());
  kernels::for_each_node(check_grid, [&](int k) { norms[k] = linalg::op_norm(R(z[k])); });
  for (int k = 0; k < check_grid; ++k)
    if (norms[k] > 1.0 + kClassifyTol)
      throw NotContractiveOnGrid("Schur symbol has norm " + std::to_string(norms[k]) +
                                 " at node " + std::to_string(k));

  std::vector<CMatrix> coeffs;
  for (int n = 0; n <= R.series().degree(); ++n) {
    CMatrix c = K * R.series().coeff(n) * Kin.adjoint();
    if (n == 0) c += ld.omega_bar;
    coeffs.push_back(std::move(c));
  }
  const CMatrix omega = ld.omega_bar;
  return h2::AnalyticFn(h2::MatPoly(std::move(coeffs)), [omega, K, Kin, R](cplx zz) -> CMatrix {
    return omega + K * R(zz) * Kin.adjoint();
  });
}

KVector Lifting::apply(const CVector& h) const {
  KVector out;
  out.head = problem.X * h;
  const CVector c = data.basis_DX.adjoint() * (data.D_X * h);
  out.tail.reserve(static_cast<size_t>(N + 1));
  for (int n = 0; n <= N; ++n) out.tail.push_back(Gamma.coeff_or_zero(n) * c);
  return out;
}

Lifting lift(const CLTProblem& p, const h2::AnalyticFn& R, int N) {
  Lifting L;
  L.problem = p;
  L.data = build_omega(p);
  L.W = assemble_schur_W(L.data, R);
  L.A = L.data.Pi * L.W.series();
  L.B = L.data.Pi_prime * L.W.series();
  L.Gamma = h2::gamma_from_blocks(L.A, L.B, N);
  L.U_prime = IsometricLifting{p.T_prime, L.data.basis_DTprime.adjoint() * L.data.D_Tprime, N};
  L.N = N;

  for (Index j = 0; j < p.window.cols(); ++j) {
    const CVector h = p.window.col(j);
    const KVector Yh = L.apply(h);
    const KVector lhs = L.U_prime.apply(Yh);
    const KVector rhs = L.apply(p.T * h);
    double r = (lhs.head - rhs.head).squaredNorm();
    for (int n = 0; n <= N; ++n) r += (lhs.tail[n] - rhs.tail[n]).squaredNorm();
    L.intertwining_residual = std::max(L.intertwining_residual, std::sqrt(r));
    const double gap = IsometricLifting::norm_sq(Yh) - 1.0;
    L.max_norm_gap = std::max(L.max_norm_gap, std::abs(gap));
    L.max_norm_excess = std::max(L.max_norm_excess, gap);
  }
  return L;
}

DimsReport dims_report(const CLTProblem& p, const LiftingData& ld) {
  DimsReport d;
  d.ker_omega = ld.ker_omega.dim();
  d.ker_omega_star = ld.ker_omega_star.dim();
  const CMatrix D_Tstar = linalg::defect_adjoint(p.T, p.tol);
  const CMatrix D_Xstar = linalg::defect_adjoint(p.X, p.tol);
  const auto R_DTprime = linalg::range_basis(ld.D_Tprime);
  const auto R_DTstar = linalg::range_basis(D_Tstar);
  d.defect_Tprime = R_DTprime.dim();
  d.defect_Tstar = R_DTstar.dim();
  d.ker_Tstar = linalg::kernel_basis(p.T.adjoint()).dim();
  d.DX_cap_DTstar = linalg::subspace_intersection(linalg::range_basis(ld.D_X), R_DTstar).dim();
  d.DTprime_cap_DXstar =
      linalg::subspace_intersection(R_DTprime, linalg::range_basis(D_Xstar)).dim();
  d.kernel_bounds = d.ker_omega <= d.ker_omega_star;
  d.defect_bounds = d.defect_Tprime >= d.defect_Tstar;
  d.intersection_bounds = d.DX_cap_DTstar <= d.DTprime_cap_DXstar;
  d.intersections_match =
      d.DX_cap_DTstar == d.ker_omega && d.DTprime_cap_DXstar == d.ker_omega_star;
  return d;
}

h2::AnalyticFn zero_schur(const LiftingData& ld) {
  return h2::MatPoly(ld.ker_omega_star.dim(), ld.ker_omega.dim());
}

h2::AnalyticFn constant_schur(const CMatrix& R0) { return h2::MatPoly::constant(R0); }

}  // namespace liftlab::clt
