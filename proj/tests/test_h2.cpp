#include <doctest.h>

#include <numbers>

#include "liftlab/errors.hpp"
#include "liftlab/h2.hpp"
#include "liftlab/kernels.hpp"
#include "support.hpp"

using namespace liftlab;
using namespace liftlab::h2;
using namespace testsupport;

namespace {

constexpr double kPi = std::numbers::pi;

MatPoly random_poly(Index r, Index c, int deg, double scale, std::mt19937_64& rng) {
  std::vector<CMatrix> coeffs;
  for (int n = 0; n <= deg; ++n) coeffs.push_back(scale * random_matrix(r, c, rng));
  return MatPoly(std::move(coeffs));
}

MatPoly scalar_poly(std::vector<cplx> c) {
  std::vector<CMatrix> m;
  for (cplx v : c) m.push_back(CMatrix::Constant(1, 1, v));
  return MatPoly(std::move(m));
}

// Midpoint rule for the Herglotz integral of a measure with a bounded density.
cplx herglotz_quadrature(const CircleMeasure& mu, cplx z, int M) {
  cplx s = 0.0;
  for (int k = 0; k < M; ++k) {
    const double t = 2.0 * kPi * (k + 0.5) / M;
    const cplx zeta = std::polar(1.0, t);
    s += (zeta + z) / (zeta - z) * mu.density(t);
  }
  s /= double(M);
  for (const auto& a : mu.atoms) {
    const cplx zeta = std::polar(1.0, a.theta);
    s += a.mass * (zeta + z) / (zeta - z);
  }
  return s;
}

}  // namespace

TEST_CASE("Horner evaluation matches power sums") {
  std::mt19937_64 rng(11);
  MatPoly P = random_poly(2, 3, 6, 1.0, rng);
  for (cplx z : {cplx(0.3, 0.2), cplx(-0.9, 0.1), cplx(1.0, 0.0)}) {
    CMatrix ref = CMatrix::Zero(2, 3);
    for (int n = 0; n <= 6; ++n) ref += std::pow(z, n) * P.coeff(n);
    CHECK(dist(eval(P, z), ref) < 1e-12);
  }
}

TEST_CASE("the identity polynomial on four nodes") {
  MatPoly P = scalar_poly({0.0, 1.0});
  auto v = eval_circle_grid(P, 1.0, 4);
  const cplx expect[] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
  for (int k = 0; k < 4; ++k) CHECK(std::abs(v[k](0, 0) - expect[k]) < 1e-15);
}

TEST_CASE("grids coarser than 2 deg + 1 are rejected") {
  MatPoly P = scalar_poly({1.0, 0.0, 0.0, 1.0});
  CHECK_THROWS_AS(eval_circle_grid(P, 1.0, 6), GridTooCoarse);
  CHECK_NOTHROW(eval_circle_grid(P, 1.0, 7));
}

TEST_CASE("Parseval on the circle") {
  std::mt19937_64 rng(12);
  MatPoly P = random_poly(3, 1, 9, 1.0, rng);
  VecPoly f = h2::apply(P, CVector(CVector::Ones(1)));
  const int K = 32;
  auto vals = eval_circle_grid(P, 1.0, K);
  double mean = 0.0;
  for (const auto& v : vals) mean += v.squaredNorm();
  CHECK(std::abs(mean / K - hardy_norm_sq(f)) < 1e-10 * hardy_norm_sq(f));
}

TEST_CASE("Neumann series of a constant scalar") {
  MatPoly A = MatPoly::constant(CMatrix::Constant(1, 1, 0.5));
  MatPoly J = neumann_inverse(A, 10);
  for (int n = 0; n <= 10; ++n) CHECK(std::abs(J.coeff(n)(0, 0) - std::pow(0.5, n)) < 1e-15);
}

TEST_CASE("Neumann series inverts I - zA") {
  std::mt19937_64 rng(13);
  MatPoly A = random_poly(3, 3, 3, 0.2, rng);
  const int N = 20;
  MatPoly J = neumann_inverse(A, N);
  // (I - zA) J = I up to degree N
  std::vector<CMatrix> shifted{CMatrix::Identity(3, 3)};
  for (int n = 0; n <= A.degree(); ++n) shifted.push_back(-A.coeff(n));
  MatPoly prod = multiply(MatPoly(shifted), J, N);
  CHECK(dist(prod.coeff(0), CMatrix::Identity(3, 3)) < 1e-12);
  for (int n = 1; n <= N; ++n) CHECK(prod.coeff(n).norm() < 1e-10);
  // pointwise against a direct solve inside the disc
  const cplx z(0.3, -0.2);
  CMatrix direct = (CMatrix::Identity(3, 3) - z * A(z)).inverse();
  CHECK(dist(neumann_inverse(A, 120)(z), direct) < 1e-10);
  CHECK_THROWS_AS(neumann_inverse(MatPoly(2, 3), 4), NotSquare);
}

TEST_CASE("gamma of a pure shift column") {
  // W = z [0; I]: A = 0 and B = zI, so Gamma = zI
  std::vector<CMatrix> c{CMatrix::Zero(4, 2), CMatrix::Zero(4, 2)};
  c[1].bottomRows(2) = CMatrix::Identity(2, 2);
  MatPoly G = gamma_from_W(MatPoly(c), 8);
  CHECK(G.coeff(0).norm() == 0.0);
  CHECK(dist(G.coeff(1), CMatrix::Identity(2, 2)) < 1e-15);
  for (int n = 2; n <= 8; ++n) CHECK(G.coeff(n).norm() == 0.0);
}

TEST_CASE("Herglotz series of Lebesgue measure is one") {
  CircleMeasure mu{{{0.0, 2.0 * kPi, 1.0}}, {}};
  MatPoly F = herglotz_from_measure(mu, 16);
  CHECK(std::abs(F.coeff(0)(0, 0) - 1.0) < 1e-15);
  for (int n = 1; n <= 16; ++n) CHECK(std::abs(F.coeff(n)(0, 0)) < 1e-14);
  CHECK(std::abs(herglotz_value(mu, cplx(0.4, 0.3)) - 1.0) < 1e-14);
}

TEST_CASE("Herglotz closed form matches series and quadrature") {
  CircleMeasure mu{{{0.3, 1.7, 0.8}, {2.0, 5.0, 0.25}}, {{4.0, 0.3}}};
  MatPoly F = herglotz_from_measure(mu, 400);
  for (cplx z : {cplx(0.2, 0.1), cplx(-0.5, 0.3), cplx(0.0, 0.6)}) {
    const cplx closed = herglotz_value(mu, z);
    CHECK(std::abs(closed - F(z)(0, 0)) < 1e-10);
    CHECK(std::abs(closed - herglotz_quadrature(mu, z, 200000)) < 1e-4);
  }
  // boundary real part recovers the density away from jumps
  for (double t : {1.0, 3.0, 5.5}) {
    const cplx u = herglotz_value(mu, std::polar(1.0, t));
    CHECK(std::abs(u.real() - mu.density(t)) < 1e-12);
  }
  CHECK(std::abs(F.coeff(0)(0, 0) - mu.total_mass()) < 1e-15);
}

TEST_CASE("Herglotz function built from A") {
  // constant a: F = (1 + az)/(1 - az)
  const cplx a(0.3, 0.4);
  MatPoly F = herglotz_from_A(MatPoly::constant(CMatrix::Constant(1, 1, a)), 30);
  CHECK(std::abs(F.coeff(0)(0, 0) - 1.0) < 1e-15);
  for (int n = 1; n <= 30; ++n) CHECK(std::abs(F.coeff(n)(0, 0) - 2.0 * std::pow(a, n)) < 1e-14);
}

TEST_CASE("outer function from boundary modulus") {
  const int K = 64;
  auto z = kernels::circle_nodes(1.0, K);
  std::vector<double> m(K);
  for (int k = 0; k < K; ++k) m[k] = std::abs(1.0 + 0.5 * z[k]);
  auto b = outer_from_boundary_modulus(m, 10);
  CHECK(std::abs(b.taylor.coeff(0)(0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(b.taylor.coeff(1)(0, 0) - 0.5) < 1e-12);
  for (int n = 2; n <= 10; ++n) CHECK(std::abs(b.taylor.coeff(n)(0, 0)) < 1e-12);
  CHECK(b.max_modulus_error < 1e-12);
  CHECK(b.clamped_samples == 0);

  std::vector<double> c(K, 2.0);
  auto two = outer_from_boundary_modulus(c, 4);
  CHECK(std::abs(two(cplx(0.3, 0.3)) - 2.0) < 1e-13);
}

TEST_CASE("outer function reproduces an arbitrary positive modulus at the nodes") {
  const int K = 128;
  std::vector<double> m(K);
  for (int k = 0; k < K; ++k) m[k] = (k < K / 3) ? 0.2 : 1.0 + 0.5 * std::sin(0.1 * k);
  m[5] = 0.0;
  auto b = outer_from_boundary_modulus(m, 8);
  CHECK(b.clamped_samples == 1);
  CHECK(b.max_modulus_error < 1e-9);
  CHECK(std::abs(b(0.0)) > 0.0);
}

TEST_CASE("outer function rejects an all-zero modulus") {
  std::vector<double> m(16, 0.0);
  CHECK_THROWS_AS(outer_from_boundary_modulus(m, 4), AllZeroModulus);
}

TEST_CASE("determinant test for outer functions") {
  CHECK(is_outer(scalar_poly({1.0, -0.5}), 256, 1e-8));
  CHECK_FALSE(is_outer(scalar_poly({-0.5, 1.0}), 256, 1e-8));
  auto d = outer_diagnostics(scalar_poly({0.0, 1.0}), 64, 1e-8);
  CHECK_FALSE(d.outer);
  CHECK(!d.note.empty());
  // a unitary constant is outer
  std::mt19937_64 rng(14);
  CHECK(is_outer(MatPoly::constant(random_unitary(3, rng)), 16, 1e-10));
}
