#include "liftlab/fixtures.hpp"

namespace liftlab::fixtures {

CMatrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix M(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) M(i, j) = cplx(g(rng), g(rng));
  return M;
}

CMatrix isometry(Index rows, Index cols, std::mt19937_64& rng) {
  Eigen::HouseholderQR<CMatrix> qr(gaussian(rows, cols, rng));
  CMatrix Q = qr.householderQ() * CMatrix::Identity(rows, cols);
  // fix the phase so the factor is unique
  const CMatrix R = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Index j = 0; j < cols; ++j) {
    const cplx d = R(j, j);
    if (std::abs(d) > 0) Q.col(j) *= d / std::abs(d);
  }
  return Q;
}

CMatrix with_norm(const CMatrix& M, double norm) {
  const double n = linalg::op_norm(M);
  return n > 0 ? CMatrix(M * (norm / n)) : M;
}

clt::CLTProblem shift_problem(const ShiftParams& params) {
  std::mt19937_64 rng(params.seed);
  const Index d = params.mult, np = params.hprime_dim;
  const int M = params.degree;
  const CMatrix Tp = with_norm(gaussian(np, np, rng), params.tprime_norm);
  const CMatrix X0 = gaussian(np, d, rng);
  CMatrix X(np, d * (M + 1));
  CMatrix block = X0;
  for (int k = 0; k <= M; ++k) {
    X.middleCols(k * d, d) = block;
    block = Tp * block;
  }
  return clt::build_problem(clt::ShiftSpec{d, M}, Tp, with_norm(X, params.x_norm));
}

clt::CLTProblem commuting_problem(Index n, Index extra, double x_norm, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const CMatrix U = isometry(n, n, rng);
  CMatrix Tp = CMatrix::Zero(n + extra, n + extra);
  Tp.topLeftCorner(n, n) = U;
  if (extra > 0) Tp.bottomRightCorner(extra, extra) = with_norm(gaussian(extra, extra, rng), 0.5);
  CMatrix poly = CMatrix::Zero(n, n), power = CMatrix::Identity(n, n);
  const CMatrix c = gaussian(3, 1, rng);
  for (Index k = 0; k < 3; ++k) {
    poly += c(k, 0) * power;
    power = U * power;
  }
  CMatrix X = CMatrix::Zero(n + extra, n);
  X.topRows(n) = poly;
  return clt::build_problem(clt::DenseSpec{U}, Tp, with_norm(X, x_norm));
}

clt::CLTProblem random_problem(std::uint64_t seed, double x_norm) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, 2);
  if (seed % 3 == 2) return commuting_problem(2 + pick(rng), pick(rng), x_norm, rng());
  ShiftParams sp;
  sp.mult = 1 + pick(rng) % 2;
  sp.degree = 4 + 2 * pick(rng);
  sp.hprime_dim = 1 + pick(rng) + sp.mult % 2;
  sp.x_norm = x_norm;
  sp.tprime_norm = 0.2 + 0.3 * pick(rng);
  sp.seed = rng();
  return shift_problem(sp);
}

}  // namespace liftlab::fixtures
