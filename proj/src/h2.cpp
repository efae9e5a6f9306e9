#include "liftlab/h2.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "liftlab/errors.hpp"
#include "liftlab/kernels.hpp"

namespace liftlab::h2 {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0) t += kTwoPi;
  return t;
}

}  // namespace

MatPoly::MatPoly(Index rows, Index cols) : coeffs{CMatrix::Zero(rows, cols)} {}

MatPoly::MatPoly(std::vector<CMatrix> c) : coeffs(std::move(c)) {
  if (coeffs.empty()) throw DimensionMismatch("MatPoly: no coefficients");
  for (const auto& m : coeffs)
    if (m.rows() != coeffs.front().rows() || m.cols() != coeffs.front().cols())
      throw DimensionMismatch("MatPoly: coefficients of different shapes");
}

MatPoly MatPoly::constant(const CMatrix& c) { return MatPoly(std::vector<CMatrix>{c}); }

MatPoly MatPoly::identity(Index n) { return constant(CMatrix::Identity(n, n)); }

CMatrix MatPoly::coeff_or_zero(int n) const {
  if (n >= 0 && n <= degree()) return coeffs[static_cast<size_t>(n)];
  return CMatrix::Zero(rows(), cols());
}

CMatrix MatPoly::operator()(cplx z) const {
  CMatrix acc = coeffs.back();
  for (int n = degree() - 1; n >= 0; --n) acc = (z * acc + coeffs[static_cast<size_t>(n)]).eval();
  return acc;
}

MatPoly MatPoly::adjoint_coeffs() const {
  std::vector<CMatrix> c;
  c.reserve(coeffs.size());
  for (const auto& m : coeffs) c.push_back(m.adjoint());
  return MatPoly(std::move(c));
}

MatPoly MatPoly::block(Index r0, Index c0, Index nr, Index nc) const {
  std::vector<CMatrix> c;
  c.reserve(coeffs.size());
  for (const auto& m : coeffs) c.push_back(m.block(r0, c0, nr, nc));
  return MatPoly(std::move(c));
}

MatPoly MatPoly::truncated(int N) const {
  std::vector<CMatrix> c;
  for (int n = 0; n <= N; ++n) c.push_back(coeff_or_zero(n));
  return MatPoly(std::move(c));
}

MatPoly MatPoly::trimmed(double tol) const {
  int top = degree();
  while (top > 0 && coeffs[static_cast<size_t>(top)].cwiseAbs().maxCoeff() <= tol) --top;
  return truncated(top);
}

MatPoly operator*(const CMatrix& L, const MatPoly& P) {
  if (L.cols() != P.rows()) throw DimensionMismatch("MatPoly: left factor has wrong width");
  std::vector<CMatrix> c;
  c.reserve(P.coeffs.size());
  for (const auto& m : P.coeffs) c.push_back(L * m);
  return MatPoly(std::move(c));
}

MatPoly operator*(const MatPoly& P, const CMatrix& R) {
  if (R.rows() != P.cols()) throw DimensionMismatch("MatPoly: right factor has wrong height");
  std::vector<CMatrix> c;
  c.reserve(P.coeffs.size());
  for (const auto& m : P.coeffs) c.push_back(m * R);
  return MatPoly(std::move(c));
}

MatPoly operator+(const MatPoly& a, const MatPoly& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch("MatPoly: sum of different shapes");
  const int deg = std::max(a.degree(), b.degree());
  std::vector<CMatrix> c;
  for (int n = 0; n <= deg; ++n) c.push_back(a.coeff_or_zero(n) + b.coeff_or_zero(n));
  return MatPoly(std::move(c));
}

MatPoly multiply(const MatPoly& a, const MatPoly& b, int max_degree) {
  if (a.cols() != b.rows()) throw DimensionMismatch("MatPoly: product of incompatible shapes");
  const int deg = std::min(max_degree, a.degree() + b.degree());
  std::vector<CMatrix> c(static_cast<size_t>(deg + 1), CMatrix::Zero(a.rows(), b.cols()));
  for (int i = 0; i <= std::min(a.degree(), deg); ++i)
    for (int j = 0; j <= std::min(b.degree(), deg - i); ++j) c[i + j] += a.coeff(i) * b.coeff(j);
  return MatPoly(std::move(c));
}

MatPoly stack_rows(const MatPoly& top, const MatPoly& bottom) {
  if (top.cols() != bottom.cols()) throw DimensionMismatch("stack_rows: widths differ");
  const int deg = std::max(top.degree(), bottom.degree());
  std::vector<CMatrix> c;
  for (int n = 0; n <= deg; ++n) {
    CMatrix m(top.rows() + bottom.rows(), top.cols());
    m << top.coeff_or_zero(n), bottom.coeff_or_zero(n);
    c.push_back(std::move(m));
  }
  return MatPoly(std::move(c));
}

CVector VecPoly::operator()(cplx z) const {
  CVector acc = coeffs.back();
  for (int n = degree() - 1; n >= 0; --n) acc = (z * acc + coeffs[static_cast<size_t>(n)]).eval();
  return acc;
}

VecPoly apply(const MatPoly& P, const CVector& d) {
  if (P.cols() != d.size()) throw DimensionMismatch("apply: vector has wrong length");
  std::vector<CVector> c;
  c.reserve(P.coeffs.size());
  for (const auto& m : P.coeffs) c.push_back(m * d);
  return VecPoly(std::move(c));
}

double hardy_norm_sq(const VecPoly& f) {
  double s = 0.0;
  for (const auto& c : f.coeffs) s += c.squaredNorm();
  return s;
}

CMatrix eval(const MatPoly& P, cplx z) { return P(z); }

std::vector<CMatrix> eval_circle_grid(const MatPoly& P, double rho, int K) {
  if (K < 2 * P.degree() + 1)
    throw GridTooCoarse("eval_circle_grid: K = " + std::to_string(K) + " is below 2*degree+1 = " +
                        std::to_string(2 * P.degree() + 1));
  auto z = kernels::circle_nodes(rho, K);
  return kernels::eval_grid(P, z);
}

AnalyticFn::AnalyticFn(MatPoly series) : series_(std::move(series)) {}

AnalyticFn::AnalyticFn(MatPoly series, std::function<CMatrix(cplx)> exact)
    : series_(std::move(series)), exact_(std::move(exact)) {}

CMatrix AnalyticFn::operator()(cplx z) const { return exact_ ? exact_(z) : series_(z); }

MatPoly neumann_inverse(const MatPoly& A, int N) {
  if (A.rows() != A.cols()) throw NotSquare("neumann_inverse: A is not square");
  const Index n = A.rows();
  std::vector<CMatrix> D;
  D.reserve(static_cast<size_t>(N + 1));
  D.push_back(CMatrix::Identity(n, n));
  for (int m = 1; m <= N; ++m) {
    CMatrix acc = CMatrix::Zero(n, n);
    for (int k = 1; k <= std::min(m, A.degree() + 1); ++k) acc.noalias() += A.coeff(k - 1) * D[m - k];
    D.push_back(std::move(acc));
  }
  return MatPoly(std::move(D));
}

MatPoly gamma_from_blocks(const MatPoly& A, const MatPoly& B, int N) {
  if (B.cols() != A.rows()) throw DimensionMismatch("gamma_from_blocks: B width differs from A");
  return multiply(B, neumann_inverse(A, N), N);
}

MatPoly gamma_from_W(const MatPoly& W, int N) {
  const Index p = W.cols();
  if (W.rows() < p) throw DimensionMismatch("gamma_from_W: W has fewer rows than columns");
  return gamma_from_blocks(W.block(0, 0, p, p), W.block(p, 0, W.rows() - p, p), N);
}

double radial_mean_norm_sq(const AnalyticFn& F, const CVector& d, double rho, int K) {
  auto z = kernels::circle_nodes(rho, K);
  std::vector<double> vals(z.size());
  kernels::for_each_node(K, [&](int k) { vals[k] = (F(z[k]) * d).squaredNorm(); });
  double s = 0.0;
  for (double v : vals) s += v;
  return s / K;
}

double CircleMeasure::total_mass() const {
  double m = 0.0;
  for (const auto& p : pieces) m += p.value * (p.theta_end - p.theta_start) / kTwoPi;
  for (const auto& a : atoms) m += a.mass;
  return m;
}

double CircleMeasure::density(double theta) const {
  const double t = wrap(theta);
  double v = 0.0;
  for (const auto& p : pieces) {
    const double s = wrap(t - p.theta_start);
    if (s < p.theta_end - p.theta_start) v += p.value;
  }
  return v;
}

std::vector<double> CircleMeasure::discontinuities() const {
  std::vector<double> out;
  for (const auto& p : pieces) {
    if (p.theta_end - p.theta_start >= kTwoPi) continue;
    out.push_back(wrap(p.theta_start));
    out.push_back(wrap(p.theta_end));
  }
  for (const auto& a : atoms) out.push_back(wrap(a.theta));
  std::sort(out.begin(), out.end());
  return out;
}

MatPoly herglotz_from_measure(const CircleMeasure& mu, int N) {
  std::vector<CMatrix> c;
  c.reserve(static_cast<size_t>(N + 1));
  c.push_back(CMatrix::Constant(1, 1, mu.total_mass()));
  for (int n = 1; n <= N; ++n) {
    cplx cn = 0.0;
    const cplx in(0.0, n);
    for (const auto& p : mu.pieces)
      cn += p.value / kTwoPi * (std::exp(-in * p.theta_end) - std::exp(-in * p.theta_start)) / (-in);
    for (const auto& a : mu.atoms) cn += a.mass * std::exp(-in * a.theta);
    c.push_back(CMatrix::Constant(1, 1, 2.0 * cn));
  }
  return MatPoly(std::move(c));
}

cplx herglotz_value(const CircleMeasure& mu, cplx z) {
  const cplx I(0.0, 1.0);
  cplx u = 0.0;
  for (const auto& p : mu.pieces) {
    const cplx lb = std::log(1.0 - z * std::exp(-I * p.theta_end));
    const cplx la = std::log(1.0 - z * std::exp(-I * p.theta_start));
    u += p.value / kTwoPi * ((p.theta_end - p.theta_start) - 2.0 * I * (lb - la));
  }
  for (const auto& a : mu.atoms) {
    const cplx zeta = std::exp(I * a.theta);
    u += a.mass * (zeta + z) / (zeta - z);
  }
  return u;
}

MatPoly herglotz_from_A(const MatPoly& A, int N) {
  // (I + zA)J = 2J - I because J = I + zAJ
  MatPoly J = neumann_inverse(A, N);
  for (auto& c : J.coeffs) c *= 2.0;
  J.coeffs.front() -= CMatrix::Identity(A.rows(), A.rows());
  return J;
}

cplx OuterFunction::operator()(cplx z) const {
  cplx acc = 0.0;
  for (int n = static_cast<int>(log_coeffs.size()) - 1; n >= 0; --n) acc = acc * z + log_coeffs[n];
  return std::exp(acc);
}

OuterFunction outer_from_boundary_modulus(std::span<const double> m, int N) {
  const int K = static_cast<int>(m.size());
  if (K == 0) throw AllZeroModulus("outer_from_boundary_modulus: no samples");
  OuterFunction out;
  std::vector<double> logm(m.size());
  bool any = false;
  for (int k = 0; k < K; ++k) {
    double v = m[k];
    if (v > kLogModulusFloor) any = true;
    if (!(v > kLogModulusFloor)) {
      v = kLogModulusFloor;
      ++out.clamped_samples;
    }
    logm[k] = std::log(v);
  }
  if (!any) throw AllZeroModulus("outer_from_boundary_modulus: every sample is zero");

  auto L = kernels::dft(logm);
  const int half = K / 2;
  out.log_coeffs.assign(static_cast<size_t>(half + 1), 0.0);
  out.log_coeffs[0] = L[0].real();
  for (int n = 1; n <= half; ++n)
    out.log_coeffs[n] = (2 * n == K) ? cplx(L[n].real(), 0.0) : 2.0 * L[n];

  std::vector<cplx> b(static_cast<size_t>(N + 1), 0.0);
  b[0] = std::exp(out.log_coeffs[0]);
  for (int n = 1; n <= N; ++n) {
    cplx acc = 0.0;
    for (int k = 1; k <= std::min(n, half); ++k) acc += double(k) * out.log_coeffs[k] * b[n - k];
    b[n] = acc / double(n);
  }
  std::vector<CMatrix> c;
  c.reserve(b.size());
  for (cplx v : b) c.push_back(CMatrix::Constant(1, 1, v));
  out.taylor = MatPoly(std::move(c));

  auto z = kernels::circle_nodes(1.0, K);
  for (int k = 0; k < K; ++k) {
    const double target = std::max(m[k], kLogModulusFloor);
    out.max_modulus_error = std::max(out.max_modulus_error, std::abs(std::abs(out(z[k])) - target));
  }
  return out;
}

OuterDiagnostics outer_diagnostics(const MatPoly& K, int K_grid, double tol) {
  if (K.rows() != K.cols()) throw NotSquare("is_outer: function is not square");
  constexpr double floor = 1e-300;
  OuterDiagnostics d;
  const double det0 = std::abs(K.coeff(0).determinant());
  auto vals = eval_circle_grid(K, 1.0, K_grid);
  double s = 0.0;
  for (const auto& v : vals) s += std::log(std::max(std::abs(v.determinant()), floor));
  d.mean_log_det_boundary = s / K_grid;
  if (det0 < floor) {
    d.log_det_origin = std::log(floor);
    d.outer = false;
    d.note = "determinant vanishes at the origin";
    return d;
  }
  d.log_det_origin = std::log(det0);
  d.outer = d.log_det_origin >= d.mean_log_det_boundary - tol;
  if (!d.outer) d.note = "log|det| at the origin is below its boundary mean";
  return d;
}

bool is_outer(const MatPoly& K, int K_grid, double tol) {
  return outer_diagnostics(K, K_grid, tol).outer;
}

}  // namespace liftlab::h2
