#include <doctest.h>

#include "liftlab/kernels.hpp"
#include "support.hpp"

using namespace liftlab;
using namespace testsupport;

TEST_CASE("parallel grid kernels match the serial reference") {
  std::mt19937_64 rng(21);
  std::vector<CMatrix> coeffs;
  for (int n = 0; n < 12; ++n) coeffs.push_back(0.3 * random_matrix(3, 3, rng));
  h2::MatPoly P(coeffs);
  auto z = kernels::circle_nodes(0.9, 257);

  auto a = kernels::eval_grid(P, z);
  auto b = kernels::reference::eval_grid(P, z);
  for (size_t k = 0; k < z.size(); ++k) CHECK(dist(a[k], b[k]) < 1e-12);

  CMatrix rhs = random_matrix(3, 2, rng);
  auto ra = kernels::resolvent_apply(a, z, rhs);
  auto rb = kernels::reference::resolvent_apply(b, z, rhs);
  for (size_t k = 0; k < z.size(); ++k) CHECK(dist(ra[k], rb[k]) < 1e-9 * (1.0 + rb[k].norm()));

  std::vector<CMatrix> small;
  for (const auto& m : a) small.push_back(0.1 * m);
  auto da = kernels::defect_grid(small);
  auto db = kernels::reference::defect_grid(small);
  for (size_t k = 0; k < z.size(); ++k) CHECK(dist(da[k], db[k]) < 1e-12);
}

TEST_CASE("FFT coefficients match the direct sum") {
  std::mt19937_64 rng(22);
  std::normal_distribution<double> g;
  for (int K : {1, 7, 64, 101}) {
    std::vector<double> x(K);
    for (auto& v : x) v = g(rng);
    auto a = kernels::dft(x);
    auto b = kernels::reference::dft(x);
    for (int n = 0; n < K; ++n) CHECK(std::abs(a[n] - b[n]) < 1e-12);
  }
}

TEST_CASE("node loops fill every slot once") {
  std::vector<int> hits(1000, 0);
  kernels::for_each_node(1000, [&](int k) { hits[k] += 1; });
  for (int h : hits) CHECK(h == 1);
}
