#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "liftlab/linalg.hpp"

namespace liftlab::h2 {

// Matrix-valued polynomial sum_n coeffs[n] z^n; every coefficient has the same shape.
struct MatPoly {
  std::vector<CMatrix> coeffs;

  MatPoly() = default;
  MatPoly(Index rows, Index cols);
  explicit MatPoly(std::vector<CMatrix> c);

  static MatPoly constant(const CMatrix& c);
  static MatPoly identity(Index n);

  Index rows() const { return coeffs.empty() ? 0 : coeffs.front().rows(); }
  Index cols() const { return coeffs.empty() ? 0 : coeffs.front().cols(); }
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  const CMatrix& coeff(int n) const { return coeffs[static_cast<size_t>(n)]; }
  CMatrix coeff_or_zero(int n) const;

  CMatrix operator()(cplx z) const;
  MatPoly adjoint_coeffs() const;
  MatPoly block(Index r0, Index c0, Index nr, Index nc) const;
  MatPoly truncated(int N) const;
  MatPoly trimmed(double tol = 0.0) const;
};

MatPoly operator*(const CMatrix& L, const MatPoly& P);
MatPoly operator*(const MatPoly& P, const CMatrix& R);
MatPoly operator+(const MatPoly& a, const MatPoly& b);
MatPoly multiply(const MatPoly& a, const MatPoly& b, int max_degree);
MatPoly stack_rows(const MatPoly& top, const MatPoly& bottom);

struct VecPoly {
  std::vector<CVector> coeffs;

  VecPoly() = default;
  explicit VecPoly(std::vector<CVector> c) : coeffs(std::move(c)) {}
  Index dim() const { return coeffs.empty() ? 0 : coeffs.front().size(); }
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  CVector operator()(cplx z) const;
};

VecPoly apply(const MatPoly& P, const CVector& d);
double hardy_norm_sq(const VecPoly& f);

CMatrix eval(const MatPoly& P, cplx z);
std::vector<CMatrix> eval_circle_grid(const MatPoly& P, double rho, int K);

// A bounded analytic function known through its Taylor series, optionally with an
// exact pointwise evaluator used in place of the truncated series.
class AnalyticFn {
 public:
  AnalyticFn() = default;
  AnalyticFn(MatPoly series);  // NOLINT(google-explicit-constructor)
  AnalyticFn(MatPoly series, std::function<CMatrix(cplx)> exact);

  CMatrix operator()(cplx z) const;
  const MatPoly& series() const { return series_; }
  bool has_exact() const { return static_cast<bool>(exact_); }
  Index rows() const { return series_.rows(); }
  Index cols() const { return series_.cols(); }

 private:
  MatPoly series_;
  std::function<CMatrix(cplx)> exact_;
};

// Taylor coefficients of (I - zA(z))^{-1} up to degree N.
MatPoly neumann_inverse(const MatPoly& A, int N);
MatPoly gamma_from_blocks(const MatPoly& A, const MatPoly& B, int N);
// W stacked as [A; B] with A square of size W.cols().
MatPoly gamma_from_W(const MatPoly& W, int N);

double radial_mean_norm_sq(const AnalyticFn& F, const CVector& d, double rho, int K);

struct DensityPiece {
  double theta_start;
  double theta_end;
  double value;
};

struct PointMass {
  double theta;
  double mass;
};

// Positive measure on the circle, normalized so that Lebesgue measure has total mass 1.
struct CircleMeasure {
  std::vector<DensityPiece> pieces;
  std::vector<PointMass> atoms;

  double total_mass() const;
  double density(double theta) const;
  std::vector<double> discontinuities() const;
};

MatPoly herglotz_from_measure(const CircleMeasure& mu, int N);
cplx herglotz_value(const CircleMeasure& mu, cplx z);
MatPoly herglotz_from_A(const MatPoly& A, int N);

struct OuterFunction {
  MatPoly taylor;
  std::vector<cplx> log_coeffs;
  int clamped_samples = 0;
  double max_modulus_error = 0.0;

  cplx operator()(cplx z) const;
};

inline constexpr double kLogModulusFloor = 1e-12;

// Outer function whose modulus matches the samples m_k at the nodes 2 pi k / K.
OuterFunction outer_from_boundary_modulus(std::span<const double> m, int N);

struct OuterDiagnostics {
  bool outer = false;
  double log_det_origin = 0.0;
  double mean_log_det_boundary = 0.0;
  std::string note;
};

OuterDiagnostics outer_diagnostics(const MatPoly& K, int K_grid, double tol);
bool is_outer(const MatPoly& K, int K_grid, double tol);

}  // namespace liftlab::h2
