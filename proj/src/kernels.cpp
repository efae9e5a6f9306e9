#include "liftlab/kernels.hpp"

#include <fftw3.h>
#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <numbers>

namespace liftlab::kernels {

int thread_count() {
  int n = omp_get_max_threads();
  if (const char* cap = std::getenv("LIFTLAB_THREADS")) {
    const int c = std::atoi(cap);
    if (c > 0 && c < n) n = c;
  }
  return n;
}

std::vector<cplx> circle_nodes(double rho, int K) {
  std::vector<cplx> z(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k) z[k] = std::polar(rho, 2.0 * std::numbers::pi * k / K);
  return z;
}

std::vector<CMatrix> eval_grid(const h2::MatPoly& P, std::span<const cplx> z) {
  std::vector<CMatrix> out(z.size());
  for_each_node(static_cast<int>(z.size()), [&](int k) { out[k] = P(z[k]); });
  return out;
}

std::vector<CMatrix> eval_grid(const h2::AnalyticFn& F, std::span<const cplx> z) {
  std::vector<CMatrix> out(z.size());
  for_each_node(static_cast<int>(z.size()), [&](int k) { out[k] = F(z[k]); });
  return out;
}

std::vector<CMatrix> resolvent_apply(std::span<const CMatrix> A, std::span<const cplx> z,
                                     const CMatrix& rhs) {
  std::vector<CMatrix> out(z.size());
  for_each_node(static_cast<int>(z.size()), [&](int k) {
    const Index n = A[k].rows();
    CMatrix M = CMatrix::Identity(n, n) - z[k] * A[k];
    out[k] = M.partialPivLu().solve(rhs);
  });
  return out;
}

std::vector<CMatrix> defect_grid(std::span<const CMatrix> M) {
  std::vector<CMatrix> out(M.size());
  for_each_node(static_cast<int>(M.size()), [&](int k) {
    out[k] = linalg::psd_sqrt(CMatrix::Identity(M[k].cols(), M[k].cols()) - M[k].adjoint() * M[k]);
  });
  return out;
}

std::vector<cplx> dft(std::span<const double> x) {
  const int K = static_cast<int>(x.size());
  std::vector<cplx> out(x.size());
  if (K == 0) return out;
  std::vector<double> in(x.begin(), x.end());
  std::vector<fftw_complex> half(static_cast<size_t>(K / 2 + 1));
  fftw_plan plan = fftw_plan_dft_r2c_1d(K, in.data(), half.data(), FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);
  for (int n = 0; n <= K / 2; ++n) out[n] = cplx(half[n][0], half[n][1]) / double(K);
  for (int n = K / 2 + 1; n < K; ++n) out[n] = std::conj(out[K - n]);
  return out;
}

namespace reference {

std::vector<CMatrix> eval_grid(const h2::MatPoly& P, std::span<const cplx> z) {
  std::vector<CMatrix> out;
  out.reserve(z.size());
  for (cplx zk : z) {
    CMatrix acc = CMatrix::Zero(P.rows(), P.cols());
    cplx power = 1.0;
    for (const auto& c : P.coeffs) {
      acc += power * c;
      power *= zk;
    }
    out.push_back(acc);
  }
  return out;
}

std::vector<CMatrix> resolvent_apply(std::span<const CMatrix> A, std::span<const cplx> z,
                                     const CMatrix& rhs) {
  std::vector<CMatrix> out;
  out.reserve(z.size());
  for (size_t k = 0; k < z.size(); ++k) {
    const Index n = A[k].rows();
    CMatrix M = CMatrix::Identity(n, n) - z[k] * A[k];
    out.push_back(M.fullPivLu().solve(rhs));
  }
  return out;
}

std::vector<CMatrix> defect_grid(std::span<const CMatrix> M) {
  std::vector<CMatrix> out;
  out.reserve(M.size());
  for (const auto& m : M)
    out.push_back(
        linalg::psd_sqrt(CMatrix::Identity(m.cols(), m.cols()) - m.adjoint() * m));
  return out;
}

std::vector<cplx> dft(std::span<const double> x) {
  const size_t K = x.size();
  std::vector<cplx> out(K);
  for (size_t n = 0; n < K; ++n) {
    cplx acc = 0.0;
    for (size_t k = 0; k < K; ++k)
      acc += x[k] * std::polar(1.0, -2.0 * std::numbers::pi * double((n * k) % K) / double(K));
    out[n] = acc / double(K);
  }
  return out;
}

}  // namespace reference

}  // namespace liftlab::kernels
