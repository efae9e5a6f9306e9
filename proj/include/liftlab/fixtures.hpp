#pragma once

#include <cstdint>
#include <random>

#include "liftlab/clt.hpp"

namespace liftlab::fixtures {

CMatrix gaussian(Index rows, Index cols, std::mt19937_64& rng);
CMatrix isometry(Index rows, Index cols, std::mt19937_64& rng);
CMatrix with_norm(const CMatrix& M, double norm);

struct ShiftParams {
  Index mult = 2;
  int degree = 24;
  Index hprime_dim = 3;
  double x_norm = 0.9;
  double tprime_norm = 0.3;
  std::uint64_t seed = 1;
};

// T a truncated shift, T' a random strict contraction and X e_{k,j} = T'^k X0 e_j,
// which intertwines on the window.
clt::CLTProblem shift_problem(const ShiftParams& params);

// T unitary on C^n, T' = T (+) C for a strict contraction C, X = [p(T); 0] for a
// random polynomial p.
clt::CLTProblem commuting_problem(Index n, Index extra, double x_norm, std::uint64_t seed);

// Draws from both families above with small random dimensions and ||X|| = x_norm.
clt::CLTProblem random_problem(std::uint64_t seed, double x_norm = 0.9);

}  // namespace liftlab::fixtures
