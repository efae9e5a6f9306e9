#pragma once

#include <cstdint>
#include <optional>

#include "liftlab/linalg.hpp"

namespace liftlab::coiso {

// C maps M' into M, written in the coordinates of the orthonormal bases of M' and M.
struct ExtensionProblem {
  Index H_dim = 0;
  Index H_prime_dim = 0;
  linalg::SubspaceBasis M;
  linalg::SubspaceBasis M_prime;
  CMatrix C;
  double tol = kClassifyTol;
};

// Orthonormalizes the spanning columns and reads C as an ambient H' -> H matrix
// supported on M' with range in M.
ExtensionProblem make_problem(const CMatrix& M_span, const CMatrix& M_prime_span,
                              const CMatrix& C_ambient, double tol = kClassifyTol);

struct ExtensionCount {
  Index codim_M_prime = 0;  // dim(H' - M')
  Index codim_M = 0;        // dim(H - M)
  Index defect_C_star = 0;  // dim of the defect space of C^*
  Index rank_C = 0;
  bool dense_range = false;
  bool feasible = false;

  Index required() const { return codim_M + defect_C_star; }
};

ExtensionCount can_extend(const ExtensionProblem& p);

// Coisometry C_hat: H' -> H with C_hat restricted to M' equal to C. The free unitary
// choices are identity-like in canonical bases unless a seed is given.
CMatrix build_extension(const ExtensionProblem& p, std::optional<std::uint64_t> seed = {});

struct ExtensionResiduals {
  double coisometry = 0.0;           // ||C_hat C_hat^* - I||
  double restriction = 0.0;          // ||C_hat|M' - C||
  double complement_orthogonal = 0.0;  // ||P_M' C_hat^* (H - M)||
  double compression = 0.0;          // ||P_M' C_hat^*|M - C^*||
};

ExtensionResiduals residuals(const ExtensionProblem& p, const CMatrix& C_hat);

}  // namespace liftlab::coiso
