#include "liftlab/scenarios.hpp"

#include <numbers>
#include <random>

#include "liftlab/clt.hpp"
#include "liftlab/errors.hpp"
#include "liftlab/fixtures.hpp"
#include "liftlab/kernels.hpp"

namespace liftlab::scenarios {

using criteria::CriterionReport;
using criteria::Settings;
using criteria::Verdict;

namespace {

constexpr double kPi = std::numbers::pi;

CMatrix stack(const CMatrix& top, const CMatrix& bottom) {
  CMatrix M(top.rows() + bottom.rows(), top.cols());
  M << top, bottom;
  return M;
}

void expect(ScenarioResult& r, const std::string& target, Verdict v) {
  r.expectations.push_back({target, v});
}

ScenarioResult finish(ScenarioResult r) {
  resolve(r.expectations, r.reports);
  return r;
}

bool near_jump(double theta, const std::vector<double>& jumps, int K) {
  const double h = 2.0 * kPi / K * (1.0 + 1e-9);
  for (double j : jumps) {
    double d = std::fmod(std::abs(theta - j), 2.0 * kPi);
    d = std::min(d, 2.0 * kPi - d);
    if (d <= h) return true;
  }
  return false;
}

}  // namespace

bool ScenarioResult::matched() const {
  for (const auto& e : expectations)
    if (!e.met()) return false;
  return true;
}

const CriterionReport* find_report(const std::vector<CriterionReport>& reports,
                                   const std::string& target) {
  const auto slash = target.find('/');
  const std::string head = target.substr(0, slash);
  for (const auto& r : reports) {
    if (r.criterion_id != head) continue;
    if (slash == std::string::npos) return &r;
    return find_report(r.parts, target.substr(slash + 1));
  }
  return nullptr;
}

void resolve(std::vector<Expectation>& expectations, const std::vector<CriterionReport>& reports) {
  for (auto& e : expectations) {
    const CriterionReport* r = find_report(reports, e.target);
    e.found = r != nullptr;
    if (r) e.actual = r->verdict;
  }
}

const std::vector<std::string>& names() {
  static const std::vector<std::string> n{"ex3_1", "ex3_2", "rk3_1", "cor3_3", "prop4_6"};
  return n;
}

Settings default_settings(const std::string& name) {
  Settings s;
  if (name == "ex3_1") {
    s.K = 8192;
    s.N = 1024;
  } else if (name == "ex3_2") {
    s.K = 4096;
  } else if (name == "cor3_3" || name == "prop4_6") {
    s.N = 512;
  } else if (name != "rk3_1") {
    throw SchemaError("unknown example '" + name + "'");
  }
  return s;
}

ScenarioResult run(const std::string& name, const Settings& s, std::uint64_t seed) {
  if (name == "ex3_1") return step_measure(s);
  if (name == "ex3_2") return half_column(s);
  if (name == "rk3_1") return identity_corner(s);
  if (name == "cor3_3") return constant_isometry(s, seed);
  if (name == "prop4_6") return shift_lifting(s, seed);
  throw SchemaError("unknown example '" + name + "'");
}

ScenarioResult half_column(const Settings& s) {
  ScenarioResult r;
  r.name = "ex3_2";
  r.settings = s;
  CMatrix w(2, 1);
  w << 0.5, 0.5;
  const h2::MatPoly W = h2::MatPoly::constant(w);

  const auto z = kernels::circle_nodes(1.0, s.K);
  double poisson = 0.0;
  for (cplx zeta : z) poisson += 0.75 / std::norm(1.0 - zeta / 2.0);
  r.metrics["boundary_integral"] = poisson / s.K;
  const h2::MatPoly G = h2::gamma_from_W(W, s.N);
  double g2 = 0.0;
  for (const auto& c : G.coeffs) g2 += c.squaredNorm();
  r.metrics["gamma_norm_sq"] = g2;
  r.metrics["sup_norm_w"] = w.norm();

  r.reports.push_back(criteria::check_gamma_isometry(W, CMatrix(), s));
  r.reports.push_back(criteria::check_herglotz_measure(W, CMatrix(), s));
  expect(r, "gamma_isometry", Verdict::fail);
  expect(r, "gamma_isometry/defect_of_A", Verdict::pass);
  expect(r, "herglotz_measure/absolute_continuity", Verdict::pass);
  return finish(std::move(r));
}

cplx step_measure_a(const h2::CircleMeasure& mu, const h2::MatPoly& a_series, cplx z) {
  if (std::abs(z) < 1e-3) return a_series(z)(0, 0);
  const cplx u = h2::herglotz_value(mu, z);
  if (!std::isfinite(u.real()) || !std::isfinite(u.imag())) return 1.0 / z;
  return (u - 1.0) / (z * (u + 1.0));
}

StepMeasureData step_measure_data(int K, int N) {
  StepMeasureData d;
  d.mu.pieces = {{0.0, kPi, 0.75}, {kPi, 2.0 * kPi, 0.25}};
  d.mu.atoms = {{0.0, 0.5}};

  // g = z a solves (u + 1) g = u - 1
  const h2::MatPoly U = h2::herglotz_from_measure(d.mu, N + 1);
  std::vector<cplx> u(static_cast<size_t>(N + 2)), g(u.size(), 0.0);
  for (int n = 0; n <= N + 1; ++n) u[n] = U.coeff(n)(0, 0);
  for (int n = 1; n <= N + 1; ++n) {
    cplx acc = u[n];
    for (int k = 1; k < n; ++k) acc -= u[k] * g[n - k];
    g[n] = acc / (u[0] + 1.0);
  }
  std::vector<CMatrix> a;
  for (int n = 0; n <= N; ++n) a.push_back(CMatrix::Constant(1, 1, g[n + 1]));
  d.a_series = h2::MatPoly(std::move(a));

  const auto z = kernels::circle_nodes(1.0, K);
  std::vector<double> m(z.size());
  for (int k = 0; k < K; ++k)
    m[k] = std::sqrt(std::max(0.0, 1.0 - std::norm(step_measure_a(d.mu, d.a_series, z[k]))));
  d.b = h2::outer_from_boundary_modulus(m, N);

  std::vector<CMatrix> w;
  for (int n = 0; n <= N; ++n) {
    CMatrix c(2, 1);
    c << d.a_series.coeff(n)(0, 0), d.b.taylor.coeff(n)(0, 0);
    w.push_back(c);
  }
  auto mu = d.mu;
  auto as = d.a_series;
  auto b = d.b;
  d.W = h2::AnalyticFn(h2::MatPoly(std::move(w)), [mu, as, b](cplx z) {
    CMatrix v(2, 1);
    v << step_measure_a(mu, as, z), b(z);
    return v;
  });
  return d;
}

ScenarioResult step_measure(const Settings& s) {
  ScenarioResult r;
  r.name = "ex3_1";
  r.settings = s;
  const StepMeasureData d = step_measure_data(s.K, s.N);
  const std::vector<double> jumps = d.mu.discontinuities();

  const auto z = kernels::circle_nodes(1.0, s.K);
  double integral = 0.0, pyth = 0.0;
  int excluded = 0;
  for (int k = 0; k < s.K; ++k) {
    if (near_jump(2.0 * kPi * k / s.K, jumps, s.K)) {
      ++excluded;
      continue;
    }
    const cplx a = step_measure_a(d.mu, d.a_series, z[k]);
    integral += (1.0 - std::norm(a)) / std::norm(1.0 - z[k] * a);
    pyth = std::max(pyth, std::abs(std::norm(a) + std::norm(d.b(z[k])) - 1.0));
  }
  r.metrics["boundary_integral"] = integral / s.K;
  r.metrics["pythagoras_max_error"] = pyth;
  r.metrics["excluded_nodes"] = excluded;
  r.metrics["clamped_samples"] = d.b.clamped_samples;
  r.metrics["v_probe_upper"] = h2::herglotz_value(d.mu, std::polar(0.999, kPi / 2)).real();
  r.metrics["v_probe_lower"] = h2::herglotz_value(d.mu, std::polar(0.999, 3 * kPi / 2)).real();

  criteria::BoundaryOptions b;
  b.discontinuities = jumps;
  b.boundary_invertibility_asserted = true;
  r.reports.push_back(criteria::check_gamma_isometry(d.W, CMatrix(), s));
  r.reports.push_back(criteria::check_herglotz_measure(d.W, CMatrix(), s, b));
  r.reports.push_back(criteria::check_inner_boundary(d.W, CMatrix(), s, b));
  expect(r, "gamma_isometry", Verdict::fail);
  expect(r, "herglotz_measure/absolute_continuity", Verdict::fail);
  expect(r, "inner_boundary/innerness", Verdict::pass);
  return finish(std::move(r));
}

ScenarioResult identity_corner(const Settings& s) {
  ScenarioResult r;
  r.name = "rk3_1";
  r.settings = s;
  const CMatrix I = CMatrix::Identity(2, 2);
  const h2::MatPoly W = h2::MatPoly::constant(stack(I, CMatrix::Zero(1, 2)));
  const h2::MatPoly G = h2::gamma_from_W(W, s.N);
  double gmax = 0.0;
  for (const auto& c : G.coeffs) gmax = std::max(gmax, c.norm());
  r.metrics["gamma_coeff_max"] = gmax;

  // T = T' = I and X = 0 give W(0) = omega with A0 = I
  const auto prob = clt::build_problem(clt::DenseSpec{I}, I, CMatrix::Zero(2, 2));
  const auto ld = clt::build_omega(prob);
  r.reports.push_back(criteria::check_gamma_isometry(W, CMatrix(), s));
  r.reports.push_back(criteria::obstruction_search(ld, CMatrix(0, 0)));
  expect(r, "gamma_isometry", Verdict::fail);
  expect(r, "gamma_isometry/taylor_decay", Verdict::fail);
  expect(r, "obstruction_search", Verdict::fail);
  return finish(std::move(r));
}

ScenarioResult constant_isometry(const Settings& s, std::uint64_t seed) {
  ScenarioResult r;
  r.name = "cor3_3";
  r.settings = s;
  std::mt19937_64 rng(seed);
  const Index p = 3;
  const CMatrix A0 = fixtures::with_norm(fixtures::gaussian(p, p, rng), 0.8);
  const CMatrix B0 = linalg::psd_sqrt(linalg::identity(p) - A0.adjoint() * A0);
  const CMatrix W0 = stack(A0, B0);
  const h2::MatPoly W = h2::MatPoly::constant(W0);

  const h2::MatPoly G = h2::gamma_from_W(W, s.N);
  double gap = 0.0;
  for (Index j = 0; j < p; ++j) {
    double sum = 0.0;
    for (const auto& c : G.coeffs) sum += c.col(j).squaredNorm();
    gap = std::max(gap, std::abs(1.0 - sum));
  }
  CMatrix power = linalg::identity(p);
  for (int n = 0; n <= s.N; ++n) power = A0 * power;
  r.metrics["hardy_gap_max"] = gap;
  r.metrics["tail_bound"] = std::pow(linalg::op_norm(power), 2);
  r.metrics["spectral_radius_A0"] = linalg::spectral_radius(A0);
  r.metrics["isometry_residual"] = linalg::op_norm(W0.adjoint() * W0 - linalg::identity(p));

  r.reports.push_back(criteria::check_constant_schur(W0));
  r.reports.push_back(criteria::check_gamma_isometry(W, CMatrix(), s));
  expect(r, "constant_schur", Verdict::pass);
  expect(r, "gamma_isometry", Verdict::pass);
  return finish(std::move(r));
}

ScenarioResult shift_lifting(const Settings& s, std::uint64_t seed) {
  ScenarioResult r;
  r.name = "prop4_6";
  r.settings = s;
  for (Index mult : {Index(1), Index(2)}) {
    fixtures::ShiftParams params;
    params.mult = mult;
    params.seed = seed;
    const auto prob = fixtures::shift_problem(params);
    const auto ld = clt::build_omega(prob);
    const CMatrix R0 = CMatrix::Identity(ld.ker_omega_star.dim(), ld.ker_omega.dim());
    const auto L = clt::lift(prob, clt::constant_schur(R0), s.N);

    std::mt19937_64 rng(seed + 100 * static_cast<std::uint64_t>(mult));
    double norm_gap = 0.0, head = 0.0;
    for (int t = 0; t < 20; ++t) {
      CVector h = prob.window * fixtures::gaussian(prob.window.cols(), 1, rng);
      h.normalize();
      const auto Yh = L.apply(h);
      norm_gap = std::max(norm_gap, std::abs(std::sqrt(clt::IsometricLifting::norm_sq(Yh)) - 1.0));
      head = std::max(head, (Yh.head - prob.X * h).norm());
    }
    const std::string tag = "[mult=" + std::to_string(mult) + "]";
    r.metrics["norm_gap_random" + tag] = norm_gap;
    r.metrics["norm_gap_window" + tag] = L.max_norm_gap;
    r.metrics["norm_excess_window" + tag] = L.max_norm_excess;
    r.metrics["intertwining_residual" + tag] = L.intertwining_residual;
    r.metrics["head_residual" + tag] = head;

    auto f = criteria::check_free_schur_lifting(ld, clt::constant_schur(R0), CMatrix(), s);
    f.criterion_id += tag;
    auto o = criteria::obstruction_search(ld, R0);
    o.criterion_id += tag;
    expect(r, f.criterion_id, Verdict::pass);
    expect(r, o.criterion_id, Verdict::pass);
    r.reports.push_back(std::move(f));
    r.reports.push_back(std::move(o));
  }
  return finish(std::move(r));
}

}  // namespace liftlab::scenarios
