#include <doctest.h>

#include <numbers>

#include "liftlab/criteria.hpp"
#include "liftlab/errors.hpp"
#include "liftlab/fixtures.hpp"
#include "support.hpp"

using namespace liftlab;
using namespace liftlab::criteria;
using namespace testsupport;

namespace {

CMatrix stack(const CMatrix& top, const CMatrix& bottom) {
  CMatrix M(top.rows() + bottom.rows(), top.cols());
  M << top, bottom;
  return M;
}

h2::MatPoly constant(const CMatrix& M) { return h2::MatPoly::constant(M); }

std::vector<LadderPoint> ladder(std::initializer_list<double> v) {
  std::vector<LadderPoint> out;
  double rho = 0.9;
  for (double x : v) out.push_back({rho, x}), rho = 1.0 - (1.0 - rho) / 10.0;
  return out;
}

// Random polynomial W with sum ||W_n|| = 0.9, hence contractive on the closed disc.
h2::MatPoly random_contractive(Index rows, Index cols, int deg, std::mt19937_64& rng) {
  std::vector<CMatrix> c;
  double total = 0.0;
  for (int n = 0; n <= deg; ++n) {
    c.push_back(random_matrix(rows, cols, rng));
    total += linalg::op_norm(c.back());
  }
  for (auto& m : c) m *= 0.9 / total;
  return h2::MatPoly(std::move(c));
}

// Synthetic coordinates: p = 1, omega = 0 into C^2, Pi picks the second entry.
clt::LiftingData scalar_shift_data() {
  clt::LiftingData ld;
  ld.basis_DX = CMatrix::Identity(1, 1);
  ld.basis_DTprime = CMatrix::Identity(1, 1);
  ld.basis_DXwindow = CMatrix::Identity(1, 1);
  ld.omega_bar = CMatrix::Zero(2, 1);
  ld.ker_omega = linalg::SubspaceBasis::whole(1);
  ld.ker_omega_star = linalg::SubspaceBasis::whole(2);
  ld.Pi = CMatrix(1, 2);
  ld.Pi << 0.0, 1.0;
  ld.Pi_prime = CMatrix(1, 2);
  ld.Pi_prime << 1.0, 0.0;
  return ld;
}

}  // namespace

TEST_CASE("ladder verdicts") {
  CHECK(ladder_verdict(ladder({1e-1, 1e-2, 1e-4}), 1e-3) == Verdict::pass);
  CHECK(ladder_verdict(ladder({0.5, 0.5, 0.5}), 1e-3) == Verdict::fail);
  CHECK(ladder_verdict(ladder({0.1, 0.2, 0.3}), 1e-3) == Verdict::fail);
  CHECK(ladder_verdict(ladder({0.1, 0.01, 0.002}), 1e-3) == Verdict::inconclusive);
  CHECK(ladder_verdict(ladder({0.1, 0.3, 0.0001}), 1e-3) == Verdict::inconclusive);
  CHECK(ladder_verdict(ladder({1e-15, -1e-15, 5e-14}), 1e-3) == Verdict::pass);
  CHECK(ladder_verdict({}, 1e-3) == Verdict::inconclusive);
}

TEST_CASE("Taylor verdicts") {
  std::vector<TracePoint> geometric, flat, slow;
  for (int n = 0; n <= 64; ++n) {
    geometric.push_back({n, std::pow(0.5, n)});
    flat.push_back({n, 1.0});
    slow.push_back({n, 1.0 / (1.0 + n)});
  }
  CHECK(taylor_verdict(geometric, 1e-6) == Verdict::pass);
  CHECK(taylor_verdict(flat, 1e-6) == Verdict::fail);
  CHECK(taylor_verdict(slow, 1e-6) == Verdict::inconclusive);
}

TEST_CASE("combining verdicts") {
  CHECK(both(Verdict::pass, Verdict::pass) == Verdict::pass);
  CHECK(both(Verdict::pass, Verdict::inconclusive) == Verdict::inconclusive);
  CHECK(both(Verdict::inconclusive, Verdict::fail) == Verdict::fail);
  CHECK(both(Verdict::pass, Verdict::fail) == Verdict::fail);
  CHECK(verdict_from_string(to_string(Verdict::inconclusive)) == Verdict::inconclusive);
  CHECK_THROWS_AS(verdict_from_string("maybe"), SchemaError);
}

TEST_CASE("pure column [0; I] passes every interior check") {
  const CMatrix W0 = stack(CMatrix::Zero(2, 2), CMatrix::Identity(2, 2));
  Settings s;
  auto r = check_gamma_isometry(constant(W0), CMatrix(), s);
  CHECK(r.verdict == Verdict::pass);
  for (const auto& lp : r.rho_ladder) CHECK(std::abs(lp.value) < 1e-14);
  CHECK(r.part("taylor_decay")->verdict == Verdict::pass);
  CHECK(r.metrics.at("hardy_norm_gap") < 1e-14);

  auto h = check_herglotz_measure(constant(W0), CMatrix(), s);
  CHECK(h.verdict == Verdict::pass);
  CHECK(h.part("herglotz_mass")->verdict == Verdict::pass);
  CHECK(check_constant_schur(W0).verdict == Verdict::pass);
}

TEST_CASE("[I; 0] fails with a flat Taylor trace") {
  const CMatrix W0 = stack(CMatrix::Identity(2, 2), CMatrix::Zero(1, 2));
  Settings s;
  auto r = check_gamma_isometry(constant(W0), CMatrix(), s);
  CHECK(r.verdict == Verdict::fail);
  for (const auto& t : r.taylor_trace) CHECK(std::abs(t.value - 1.0) < 1e-14);
  CHECK(check_constant_schur(W0).verdict == Verdict::fail);

  BoundaryOptions b;
  b.boundary_invertibility_asserted = true;
  auto h = check_herglotz_measure(constant(W0), CMatrix(), s, b);
  CHECK(h.part("absolute_continuity")->verdict == Verdict::fail);
  CHECK(h.metrics.at("singular_nodes") == 1.0);
  auto in = check_inner_boundary(constant(W0), CMatrix(), s, b);
  CHECK(in.part("innerness")->verdict == Verdict::pass);
  CHECK(in.part("boundary_defect_integral")->verdict == Verdict::fail);
}

TEST_CASE("scalar w = [1/2; 1/2] against closed forms") {
  CMatrix W0(2, 1);
  W0 << 0.5, 0.5;
  Settings s;
  const CVector d = CVector::Ones(1);
  for (double rho : s.ladder) {
    // d(z) = 1 / (1 - z/2), so mean |d(z)|^2 = 1 / (1 - rho^2 / 4)
    const double md = 1.0 / (1.0 - rho * rho / 4.0);
    auto t = radial_terms(constant(W0), d, rho, s.K);
    CHECK(std::abs(t.mean_dz_sq - md) < 1e-12);
    CHECK(std::abs(t.mean_DW_sq - 0.5 * md) < 1e-12);
    CHECK(std::abs(t.mean_DA_sq - 0.75 * md) < 1e-12);
    CHECK(std::abs(t.mean_gamma_sq - 0.25 * md) < 1e-12);
  }
  auto r = check_gamma_isometry(constant(W0), CMatrix(), s);
  CHECK(r.verdict == Verdict::fail);
  CHECK(r.part("taylor_decay")->verdict == Verdict::pass);
  auto* da = r.part("defect_of_A");
  CHECK(da->verdict == Verdict::pass);
  CHECK(std::abs(da->rho_ladder.back().value - (1.0 - 0.75 / (1.0 - 0.999 * 0.999 / 4))) < 1e-12);
  // ||Gamma d||^2 = 1/3
  CHECK(std::abs(r.metrics.at("hardy_norm_gap") - 2.0 / 3.0) < 1e-12);
  for (const auto& t : r.taylor_trace) CHECK(std::abs(t.value - std::pow(0.5, t.n)) < 1e-15);
}

TEST_CASE("finite-radius identities hold for random contractive W") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    std::mt19937_64 rng(seed);
    const h2::MatPoly W = random_contractive(5, 3, 3, rng);
    const CVector d = random_vector(3, rng);
    const h2::MatPoly G = h2::gamma_from_W(W, 400);
    for (double rho : {0.5, 0.9, 0.99}) {
      const auto t = radial_terms(W, d, rho, 1024);
      const double dd = d.squaredNorm(), r2 = rho * rho;
      const double scale = std::max(1.0, t.mean_dz_sq);
      CHECK(std::abs(t.mean_gamma_sq - (dd / r2 - t.mean_DW_sq - (1.0 / r2 - 1.0) * t.mean_dz_sq)) <
            1e-11 * scale);
      CHECK(std::abs(t.mean_DA_sq - (dd / r2 + (1.0 - 1.0 / r2) * t.mean_dz_sq)) < 1e-11 * scale);
      CHECK(std::abs(t.mean_h - dd) < 1e-11 * scale);
      // Parseval against the Taylor coefficients of Gamma
      double hardy = 0.0;
      for (int n = 0; n <= G.degree(); ++n) hardy += std::pow(r2, n) * (G.coeff(n) * d).squaredNorm();
      CHECK(std::abs(t.mean_gamma_sq - hardy) < 1e-10 * scale);
    }
  }
}

TEST_CASE("criterion agrees with the direct Hardy norm") {
  for (std::uint64_t seed = 10; seed <= 13; ++seed) {
    std::mt19937_64 rng(seed);
    const h2::MatPoly W = random_contractive(4, 2, 2, rng);
    Settings s;
    auto r = check_gamma_isometry(W, CMatrix(), s);
    const bool isometric = r.metrics.at("hardy_norm_gap") < s.tol_int;
    if (r.verdict == Verdict::pass) CHECK(isometric);
    if (r.verdict == Verdict::fail) CHECK_FALSE(isometric);
  }
}

TEST_CASE("interior forms agree and Taylor decay implies the energy check") {
  Settings s;
  s.K = 1024;
  s.N = 128;
  int passes = 0;
  for (std::uint64_t seed = 30; seed < 42; ++seed) {
    std::mt19937_64 rng(seed);
    h2::MatPoly W;
    if (seed % 2 == 0) {
      W = random_contractive(4, 2, 2, rng);
    } else {
      const CMatrix A0 = random_with_norm(2, 2, 0.8, rng);
      W = constant(stack(A0, linalg::psd_sqrt(CMatrix::Identity(2, 2) - A0.adjoint() * A0)));
    }
    const auto r = check_gamma_isometry(W, CMatrix(), s);
    CHECK(r.part("weighted_resolvent")->verdict == r.part("defect_of_A")->verdict);
    if (r.part("taylor_decay")->verdict == Verdict::pass) {
      ++passes;
      CHECK(r.part("resolvent_energy")->verdict == Verdict::pass);
    }
  }
  CHECK(passes > 0);
}

TEST_CASE("known zero of W") {
  std::vector<CMatrix> c{CMatrix::Zero(4, 2), CMatrix::Zero(4, 2)};
  c[1].bottomRows(2) = CMatrix::Identity(2, 2);
  Settings s;
  s.ladder = {0.9, 0.99, 0.999, 0.9999};
  auto r = check_with_known_zero(h2::MatPoly(c), 0.0, CMatrix(), s);
  CHECK(r.verdict == Verdict::pass);
  // integrand is (1 - rho^2) ||d||^2
  CHECK(std::abs(r.rho_ladder.back().value - (1.0 - 0.9999 * 0.9999)) < 1e-12);

  auto zero = check_with_known_zero(h2::MatPoly(4, 2), 0.0, CMatrix(), s);
  CHECK(zero.verdict == Verdict::fail);
  CHECK(zero.notes.size() == 1);
  CHECK_THROWS_AS(check_with_known_zero(h2::MatPoly(c), 0.5, CMatrix(), s), Z0NotAZero);
}

TEST_CASE("non-contractive W is rejected on the grid") {
  CMatrix W0(2, 1);
  W0 << 0.9, 0.9;
  CHECK_THROWS_AS(check_gamma_isometry(constant(W0), CMatrix(), Settings{}), NotContractiveOnGrid);
}

TEST_CASE("inner boundary check requires the assumption") {
  const CMatrix W0 = stack(CMatrix::Zero(1, 1), CMatrix::Identity(1, 1));
  CHECK_THROWS_AS(check_inner_boundary(constant(W0), CMatrix(), Settings{}, BoundaryOptions{}),
                  BoundaryAssumptionMissing);
}

TEST_CASE("constant isometry with stable corner is inner and passes the boundary integral") {
  std::mt19937_64 rng(21);
  CMatrix W0 = random_isometry(5, 3, rng);
  REQUIRE(linalg::spectral_radius(W0.topRows(3)) < 0.99);
  BoundaryOptions b;
  b.boundary_invertibility_asserted = true;
  auto r = check_inner_boundary(constant(W0), CMatrix(), Settings{}, b);
  CHECK(r.verdict == Verdict::pass);
  CHECK(r.part("boundary_defect_integral")->metrics.at("deviation") < 1e-10);
  CHECK(check_constant_schur(W0).verdict == Verdict::pass);
}

TEST_CASE("free Schur lifting on the shift fixture") {
  auto prob = fixtures::shift_problem({});
  auto ld = clt::build_omega(prob);
  REQUIRE(ld.ker_omega.dim() == 2);
  REQUIRE(ld.ker_omega_star.dim() == 3);
  Settings s;
  std::mt19937_64 rng(31);
  const CMatrix dirs = random_matrix(ld.p(), 4, rng);
  // R = 0 leaves the kernel component undamped
  auto r = check_free_schur_lifting(ld, clt::zero_schur(ld), dirs, s);
  CHECK(r.verdict == Verdict::fail);
  CHECK(r.metrics.at("defect_chain_residual") < 1e-10);

  const CMatrix R0 = CMatrix::Identity(3, 2);
  auto c = check_free_schur_lifting(ld, clt::constant_schur(R0), dirs, s);
  CHECK(c.verdict == Verdict::pass);
  CHECK(c.metrics.at("defect_chain_residual") < 1e-10);
  for (const auto& lp : c.rho_ladder) CHECK(std::abs(lp.value) < 1e-12);

  auto o = obstruction_search(ld, R0);
  CHECK(o.metrics.at("spectral_radius_V") < 1.0);
  CHECK_THROWS_AS(obstruction_search(ld, 2.0 * R0), NotIsometricR0);
}

TEST_CASE("identity intertwiner has a unimodular witness") {
  const CMatrix I = CMatrix::Identity(2, 2);
  auto prob = clt::build_problem(clt::DenseSpec{I}, I, CMatrix::Zero(2, 2));
  auto ld = clt::build_omega(prob);
  CHECK(ld.ker_omega.dim() == 0);
  auto o = obstruction_search(ld, CMatrix(0, 0));
  CHECK(o.verdict == Verdict::fail);
  CHECK(std::abs(o.metrics.at("lambda_re") - 1.0) < 1e-12);
  CHECK(o.metrics.at("recursion_residual") < 1e-12);

  auto f = check_free_schur_lifting(ld, clt::zero_schur(ld), CMatrix(), Settings{});
  CHECK(f.verdict == Verdict::fail);
  CHECK(!f.notes.empty());
}

TEST_CASE("backward extension of a witness sequence") {
  auto ld = scalar_shift_data();
  CMatrix R0(2, 1);
  R0 << 0.0, 1.0;
  auto o = obstruction_search(ld, R0);
  REQUIRE(o.verdict == Verdict::fail);
  std::vector<CVector> seq(5, CVector::Ones(1));
  auto r = check_backward_extension(seq, ld, R0, 3);
  CHECK(r.verdict == Verdict::pass);
  CHECK(std::abs(r.metrics.at("C_norm") - 1.0) < 1e-12);
  CHECK(r.metrics.at("C_isometry_residual_on_span") < 1e-12);

  std::vector<CVector> bad{CVector::Constant(1, 2.0), CVector::Ones(1)};
  CHECK_THROWS_AS(check_backward_extension(bad, ld, R0, 1), SequenceViolatesRecursion);
  std::vector<CVector> zero(3, CVector::Zero(1));
  auto z = check_backward_extension(zero, ld, R0, 1);
  CHECK(z.verdict == Verdict::pass);
  CHECK(z.notes.front().find("degenerate") != std::string::npos);
}
