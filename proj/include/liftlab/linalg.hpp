#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace liftlab {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr double kClassifyTol = 1e-9;
inline constexpr double kRankTol = 1e-7;

}  // namespace liftlab

namespace liftlab::linalg {

// Orthonormal columns spanning a subspace of C^ambient_dim.
struct SubspaceBasis {
  Index ambient_dim = 0;
  CMatrix columns;
  double tol = kRankTol;

  Index dim() const { return columns.cols(); }
  CMatrix projector() const;

  static SubspaceBasis zero(Index ambient);
  static SubspaceBasis whole(Index ambient);
  static SubspaceBasis span_of(const CMatrix& vectors, double tol = kRankTol);
};

CMatrix identity(Index n);
double op_norm(const CMatrix& M);
std::vector<double> singular_values(const CMatrix& M);

// Square root of a Hermitian matrix with negative eigenvalues clamped to zero.
CMatrix psd_sqrt(const CMatrix& H);

// (I - M*M)^{1/2}
CMatrix defect(const CMatrix& M, double tol = kClassifyTol);
// (I - MM*)^{1/2}
CMatrix defect_adjoint(const CMatrix& M, double tol = kClassifyTol);

enum class OperatorClass : unsigned {
  contraction = 1u,
  isometry = 2u,
  coisometry = 4u,
  unitary = 8u,
  partial_isometry = 16u,
};

struct ClassSet {
  unsigned bits = 0;
  bool has(OperatorClass c) const { return (bits & static_cast<unsigned>(c)) != 0; }
  void add(OperatorClass c) { bits |= static_cast<unsigned>(c); }
  bool none() const { return bits == 0; }
  std::vector<std::string> names() const;
};

ClassSet classify(const CMatrix& M, double tol = kClassifyTol);

SubspaceBasis kernel_basis(const CMatrix& M, double tol = kRankTol);
SubspaceBasis range_basis(const CMatrix& M, double tol = kRankTol);
SubspaceBasis orthogonal_complement(const SubspaceBasis& S);
SubspaceBasis subspace_intersection(const SubspaceBasis& U, const SubspaceBasis& V,
                                    double tol = kRankTol);
Index numerical_rank(const CMatrix& M, double tol = kRankTol);

// Sorted by modulus descending, then by argument in [0, 2pi) ascending.
std::vector<cplx> sorted_eigenvalues(const CMatrix& T);
double spectral_radius(const CMatrix& T);

bool is_c_dot_0(const CMatrix& T, double tol = kClassifyTol);

struct Witness {
  cplx lambda;
  CVector h;
  // h_n = lambda^{-n} h satisfies T h_{n+1} = h_n with constant norm.
  CVector term(int n) const { return std::pow(lambda, -n) * h; }
};

std::optional<Witness> find_non_c0dot_witness(const CMatrix& T, double tol = kClassifyTol);

SubspaceBasis detect_unitary_part(const CMatrix& T, int n_max, double tol = kRankTol);

}  // namespace liftlab::linalg
