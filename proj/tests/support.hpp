#pragma once

#include <random>

#include "liftlab/linalg.hpp"

namespace testsupport {

using liftlab::cplx;
using liftlab::CMatrix;
using liftlab::CVector;
using liftlab::Index;

inline CMatrix random_matrix(Index r, Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix M(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) M(i, j) = cplx(g(rng), g(rng));
  return M;
}

inline CVector random_vector(Index n, std::mt19937_64& rng) {
  return random_matrix(n, 1, rng).col(0);
}

inline CMatrix random_unitary(Index n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<CMatrix> qr(random_matrix(n, n, rng));
  return qr.householderQ() * CMatrix::Identity(n, n);
}

inline CMatrix random_isometry(Index r, Index c, std::mt19937_64& rng) {
  return random_unitary(r, rng).leftCols(c);
}

// Random matrix scaled to the given operator norm.
inline CMatrix random_with_norm(Index r, Index c, double norm, std::mt19937_64& rng) {
  CMatrix M = random_matrix(r, c, rng);
  Eigen::JacobiSVD<CMatrix> svd(M);
  return M * (norm / svd.singularValues()(0));
}

// Orthonormal basis of {x : Mx = 0} from the eigenvectors of M*M, used as an
// oracle independent of the SVD path.
inline CMatrix null_space_oracle(const CMatrix& M, double tol = 1e-10) {
  const Index n = M.cols();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(M.adjoint() * M);
  Index k = 0;
  while (k < n && es.eigenvalues()(k) < tol) ++k;
  return es.eigenvectors().leftCols(k);
}

inline CMatrix projector(const CMatrix& orthonormal_cols) {
  return orthonormal_cols * orthonormal_cols.adjoint();
}

inline double dist(const CMatrix& a, const CMatrix& b) { return (a - b).norm(); }

}  // namespace testsupport
