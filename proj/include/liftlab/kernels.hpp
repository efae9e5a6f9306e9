#pragma once

#include <span>
#include <vector>

#include "liftlab/h2.hpp"

// Grid kernels over circle nodes z_k = rho exp(2 pi i k / K). The default versions run
// the nodes in parallel with OpenMP; `reference` holds plain serial versions.
// Per-node results are written to their own slot, so both give identical output.
namespace liftlab::kernels {

// Thread count for node loops; LIFTLAB_THREADS caps it when set.
int thread_count();

std::vector<cplx> circle_nodes(double rho, int K);

template <class Fn>
void for_each_node(int K, Fn&& fn) {
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (int k = 0; k < K; ++k) fn(k);
}

std::vector<CMatrix> eval_grid(const h2::MatPoly& P, std::span<const cplx> z);
std::vector<CMatrix> eval_grid(const h2::AnalyticFn& F, std::span<const cplx> z);

// (I - z_k A_k)^{-1} rhs at every node.
std::vector<CMatrix> resolvent_apply(std::span<const CMatrix> A, std::span<const cplx> z,
                                     const CMatrix& rhs);

// (I - M_k^* M_k)^{1/2} at every node.
std::vector<CMatrix> defect_grid(std::span<const CMatrix> M);

// c_n = (1/K) sum_k x_k exp(-2 pi i n k / K) for n = 0..K-1.
std::vector<cplx> dft(std::span<const double> x);

}  // namespace liftlab::kernels

namespace liftlab::kernels::reference {

template <class Fn>
void for_each_node(int K, Fn&& fn) {
  for (int k = 0; k < K; ++k) fn(k);
}

std::vector<CMatrix> eval_grid(const h2::MatPoly& P, std::span<const cplx> z);
std::vector<CMatrix> resolvent_apply(std::span<const CMatrix> A, std::span<const cplx> z,
                                     const CMatrix& rhs);
std::vector<CMatrix> defect_grid(std::span<const CMatrix> M);
std::vector<cplx> dft(std::span<const double> x);

}  // namespace liftlab::kernels::reference
