#pragma once

#include <variant>
#include <vector>

#include "liftlab/h2.hpp"
#include "liftlab/linalg.hpp"

namespace liftlab::clt {

// T given as a matrix; the window is spanned by `window`, or is the whole space when empty.
struct DenseSpec {
  CMatrix T;
  CMatrix window{};
};

// Shift of multiplicity `mult` on polynomials of degree <= `degree`, stored with
// index k * mult + j for coefficient k, component j. The top coefficient is dropped,
// so T is isometric on degrees <= degree - 1.
struct ShiftSpec {
  Index mult = 1;
  int degree = 0;
};

// Multiplication by an analytic matrix symbol, truncated to degree <= `degree`.
struct MultOpSpec {
  h2::MatPoly symbol;
  int degree = 0;
};

using OperatorSpec = std::variant<DenseSpec, ShiftSpec, MultOpSpec>;

CMatrix materialize(const OperatorSpec& spec);
// Orthonormal columns spanning the subspace on which T is used.
CMatrix window_basis(const OperatorSpec& spec);

struct CLTProblem {
  OperatorSpec spec;
  CMatrix T;
  CMatrix window;
  CMatrix T_prime;
  CMatrix X;
  double tol = kClassifyTol;
  double intertwining_residual = 0.0;
};

CLTProblem build_problem(OperatorSpec spec, CMatrix T_prime, CMatrix X,
                         double tol = kClassifyTol);

// Coordinates: the defect space of X is C^p through basis_DX, the defect space of T'
// is C^q through basis_DTprime, and the second target block is the closed range of
// D_X on the window, C^{p_w} through basis_DXwindow.
struct LiftingData {
  CMatrix D_X;
  CMatrix D_Tprime;
  CMatrix basis_DX;
  CMatrix basis_DTprime;
  CMatrix basis_DXwindow;
  CMatrix omega_bar;
  linalg::SubspaceBasis ker_omega;
  linalg::SubspaceBasis ker_omega_star;
  CMatrix Pi;
  CMatrix Pi_prime;

  Index p() const { return basis_DX.cols(); }
  Index q() const { return basis_DTprime.cols(); }
  Index p_window() const { return basis_DXwindow.cols(); }
  // omega_bar as a map H -> H' (+) H.
  CMatrix omega_bar_ambient() const;
};

LiftingData build_omega(const CLTProblem& p);
// Closed-form construction, valid when D_X is invertible.
LiftingData build_omega_explicit(const CLTProblem& p);

// Explicit formula for omega_bar^* omega_bar, valid when D_X is invertible.
CMatrix omega_star_omega_explicit(const CLTProblem& p);

struct KVector {
  CVector head;
  std::vector<CVector> tail;
};

// U'(h' + f) = T'h' + (D_{T'} h' + z f), with H^2 truncated to degree <= degree.
struct IsometricLifting {
  CMatrix T_prime;
  CMatrix defect_coords;
  int degree = 0;

  Index head_dim() const { return T_prime.rows(); }
  Index defect_dim() const { return defect_coords.rows(); }
  Index dim() const { return head_dim() + defect_dim() * (degree + 1); }

  KVector apply(const KVector& k) const;
  KVector embed(const CVector& h_prime) const;
  CMatrix dense() const;
  static double norm_sq(const KVector& k);
};

IsometricLifting minimal_isometric_lifting(const CMatrix& T_prime, int N);
// Rank of span{U'^n H' : n <= n_max}; equals dim() when U' is minimal.
Index lifting_span_rank(const IsometricLifting& U, int n_max);

// W = omega_bar + K R(z) K_in^*, with K spanning ker omega_bar^* and K_in spanning ker omega_bar.
h2::AnalyticFn assemble_schur_W(const LiftingData& ld, const h2::AnalyticFn& R, int check_grid = 256);

struct Lifting {
  CLTProblem problem;
  LiftingData data;
  h2::AnalyticFn W;
  h2::MatPoly A;
  h2::MatPoly B;
  h2::MatPoly Gamma;
  IsometricLifting U_prime;
  int N = 0;
  double intertwining_residual = 0.0;
  double max_norm_gap = 0.0;
  double max_norm_excess = 0.0;

  KVector apply(const CVector& h) const;
};

Lifting lift(const CLTProblem& p, const h2::AnalyticFn& R, int N);

struct DimsReport {
  Index ker_omega = 0;
  Index ker_omega_star = 0;
  Index defect_Tprime = 0;
  Index defect_Tstar = 0;
  Index ker_Tstar = 0;
  Index DX_cap_DTstar = 0;
  Index DTprime_cap_DXstar = 0;
  bool kernel_bounds = false;
  bool defect_bounds = false;
  bool intersection_bounds = false;
  bool intersections_match = false;
};

DimsReport dims_report(const CLTProblem& p, const LiftingData& ld);

// Symbols R in kernel coordinates that vanish identically or are constant.
h2::AnalyticFn zero_schur(const LiftingData& ld);
h2::AnalyticFn constant_schur(const CMatrix& R0);

}  // namespace liftlab::clt
