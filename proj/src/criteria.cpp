#include "liftlab/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "liftlab/errors.hpp"
#include "liftlab/kernels.hpp"

namespace liftlab::criteria {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFlatRatio = 0.9;
constexpr double kContractionSlack = 1e-8;

// Per-node, per-column squared norms of x = (I - zA(z))^{-1} d_j and of W x, A x.
struct GridEval {
  int K = 0;
  Index m = 0;
  std::vector<char> used;
  std::vector<double> x_sq, Wx_sq, Ax_sq;

  double at(const std::vector<double>& v, int k, Index j) const { return v[k * m + j]; }
};

GridEval evaluate(const h2::AnalyticFn& W, Index p, const CMatrix& basis, double rho, int K,
                  const std::vector<char>* exclude, double singular_rcond) {
  GridEval g;
  g.K = K;
  g.m = basis.cols();
  g.used.assign(static_cast<size_t>(K), 0);
  g.x_sq.assign(static_cast<size_t>(K * g.m), 0.0);
  g.Wx_sq = g.x_sq;
  g.Ax_sq = g.x_sq;
  const auto z = kernels::circle_nodes(rho, K);
  kernels::for_each_node(K, [&](int k) {
    if (exclude && (*exclude)[k]) return;
    const CMatrix Wz = W(z[k]);
    if (!Wz.allFinite()) return;
    const CMatrix A = Wz.topRows(p);
    Eigen::PartialPivLU<CMatrix> lu(CMatrix::Identity(p, p) - z[k] * A);
    if (p > 0 && !(lu.rcond() >= singular_rcond)) return;
    const CMatrix X = p > 0 ? CMatrix(lu.solve(basis)) : CMatrix(basis);
    const CMatrix WX = Wz * X;
    const CMatrix AX = A * X;
    for (Index j = 0; j < g.m; ++j) {
      g.x_sq[k * g.m + j] = X.col(j).squaredNorm();
      g.Wx_sq[k * g.m + j] = WX.col(j).squaredNorm();
      g.Ax_sq[k * g.m + j] = AX.col(j).squaredNorm();
    }
    g.used[k] = 1;
  });
  for (int k = 0; k < K; ++k) {
    if (!g.used[k]) continue;
    for (Index j = 0; j < g.m; ++j) {
      const double x = g.at(g.x_sq, k, j), wx = g.at(g.Wx_sq, k, j);
      if (wx > x * (1.0 + kContractionSlack) + 1e-300)
        throw NotContractiveOnGrid("W is not contractive at node " + std::to_string(k) +
                                   " of the circle of radius " + std::to_string(rho));
    }
  }
  return g;
}

int used_count(const GridEval& g) { return static_cast<int>(std::count(g.used.begin(), g.used.end(), 1)); }

// Max over columns of (1/K) sum_k f(k, j) / ||d_j||^2.
template <class F>
double column_max_mean(const GridEval& g, const std::vector<double>& dnorm_sq, F&& f) {
  double worst = -std::numeric_limits<double>::infinity();
  for (Index j = 0; j < g.m; ++j) {
    double s = 0.0;
    for (int k = 0; k < g.K; ++k)
      if (g.used[k]) s += f(k, j);
    worst = std::max(worst, s / g.K / dnorm_sq[j]);
  }
  return g.m == 0 ? 0.0 : worst;
}

std::vector<double> column_norms_sq(const CMatrix& basis) {
  std::vector<double> out(static_cast<size_t>(basis.cols()));
  for (Index j = 0; j < basis.cols(); ++j) out[j] = std::max(basis.col(j).squaredNorm(), 1e-300);
  return out;
}

CMatrix basis_or_identity(const CMatrix& basis, Index p) {
  if (basis.cols() == 0) return CMatrix::Identity(p, p);
  if (basis.rows() != p) throw DimensionMismatch("basis vectors have the wrong length");
  return basis;
}

Index a_block_size(const h2::AnalyticFn& W) {
  const Index p = W.cols();
  if (W.rows() < p) throw DimensionMismatch("W must have at least as many rows as columns");
  return p;
}

h2::MatPoly a_series(const h2::AnalyticFn& W) {
  const Index p = W.cols();
  return W.series().block(0, 0, p, p);
}

std::vector<char> boundary_exclusions(int K, const std::vector<double>& jumps) {
  std::vector<char> ex(static_cast<size_t>(K), 0);
  const double h = kTwoPi / K * (1.0 + 1e-9);
  for (int k = 0; k < K; ++k) {
    const double t = kTwoPi * k / K;
    for (double j : jumps) {
      double d = std::fmod(std::abs(t - j), kTwoPi);
      d = std::min(d, kTwoPi - d);
      if (d <= h) ex[k] = 1;
    }
  }
  return ex;
}

CriterionReport make(const std::string& id) {
  CriterionReport r;
  r.criterion_id = id;
  return r;
}

double hardy_gap(const h2::AnalyticFn& W, const CMatrix& basis, int N) {
  const h2::MatPoly G = h2::gamma_from_W(W.series(), N);
  double worst = 0.0;
  for (Index j = 0; j < basis.cols(); ++j) {
    double s = 0.0;
    for (const auto& c : G.coeffs) s += (c * basis.col(j)).squaredNorm();
    const double dn = basis.col(j).squaredNorm();
    worst = std::max(worst, (dn - s) / dn);
  }
  return worst;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "inconclusive";
  }
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "pass") return Verdict::pass;
  if (s == "fail") return Verdict::fail;
  if (s == "inconclusive") return Verdict::inconclusive;
  throw SchemaError("unknown verdict '" + s + "'");
}

const CriterionReport* CriterionReport::part(const std::string& id) const {
  for (const auto& p : parts)
    if (p.criterion_id == id) return &p;
  return nullptr;
}

Verdict ladder_verdict(const std::vector<LadderPoint>& ladder, double tol) {
  if (ladder.empty()) return Verdict::inconclusive;
  auto clean = [](double v) { return std::abs(v) < 1e-13 ? 0.0 : v; };
  bool non_increasing = true, non_decreasing = true;
  for (size_t i = 1; i < ladder.size(); ++i) {
    const double a = clean(ladder[i - 1].value), b = clean(ladder[i].value);
    const double slack = 1e-12 + 1e-9 * std::abs(a);
    if (b > a + slack) non_increasing = false;
    if (b < a - slack) non_decreasing = false;
  }
  const double last = clean(ladder.back().value);
  if (last < tol) return non_increasing ? Verdict::pass : Verdict::inconclusive;
  return non_decreasing ? Verdict::fail : Verdict::inconclusive;
}

Verdict taylor_verdict(const std::vector<TracePoint>& trace, double tol) {
  if (trace.empty()) return Verdict::inconclusive;
  const int N = trace.back().n;
  double tail = 0.0, at_half = 0.0;
  for (const auto& t : trace) {
    if (t.n >= N / 2) tail = std::max(tail, t.value);
    if (t.n == N / 2) at_half = t.value;
  }
  if (tail < tol) return Verdict::pass;
  if (at_half > 0.0 && trace.back().value / at_half >= kFlatRatio) return Verdict::fail;
  return Verdict::inconclusive;
}

Verdict both(Verdict a, Verdict b) {
  if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
  if (a == Verdict::pass && b == Verdict::pass) return Verdict::pass;
  return Verdict::inconclusive;
}

RadialTerms radial_terms(const h2::AnalyticFn& W, const CVector& d, double rho, int K) {
  const Index p = a_block_size(W);
  CMatrix basis = d;
  const GridEval g = evaluate(W, p, basis, rho, K, nullptr, 0.0);
  RadialTerms t;
  t.d_sq = d.squaredNorm();
  const double r2 = rho * rho;
  for (int k = 0; k < K; ++k) {
    if (!g.used[k]) continue;
    const double x = g.at(g.x_sq, k, 0), wx = g.at(g.Wx_sq, k, 0), ax = g.at(g.Ax_sq, k, 0);
    t.mean_dz_sq += x;
    t.mean_Adz_sq += ax;
    t.mean_zAdz_sq += r2 * ax;
    t.mean_DW_sq += x - wx;
    t.mean_DA_sq += x - ax;
    t.mean_gamma_sq += wx - ax;
    t.mean_h += x - r2 * ax;
    t.mean_k += (1.0 - r2) / r2 * x + (x - wx) / r2;
  }
  for (double* v : {&t.mean_dz_sq, &t.mean_Adz_sq, &t.mean_zAdz_sq, &t.mean_DW_sq, &t.mean_DA_sq,
                    &t.mean_gamma_sq, &t.mean_h, &t.mean_k})
    *v /= K;
  return t;
}

std::vector<TracePoint> taylor_trace(const h2::MatPoly& A, const CMatrix& basis, int N) {
  const h2::MatPoly D = h2::neumann_inverse(A, N);
  const auto dn = column_norms_sq(basis);
  std::vector<TracePoint> out;
  out.reserve(static_cast<size_t>(N + 1));
  for (int n = 0; n <= N; ++n) {
    const CMatrix Y = D.coeff(n) * basis;
    double worst = 0.0;
    for (Index j = 0; j < Y.cols(); ++j) worst = std::max(worst, std::sqrt(Y.col(j).squaredNorm() / dn[j]));
    out.push_back({n, worst});
  }
  return out;
}

CriterionReport check_gamma_isometry(const h2::AnalyticFn& W, const CMatrix& basis_in,
                                     const Settings& s) {
  const Index p = a_block_size(W);
  const CMatrix basis = basis_or_identity(basis_in, p);
  const auto dn = column_norms_sq(basis);

  CriterionReport r = make("gamma_isometry");
  CriterionReport weighted = make("weighted_resolvent");
  CriterionReport defect_a = make("defect_of_A");
  CriterionReport energy = make("resolvent_energy");
  CriterionReport taylor = make("taylor_decay");

  for (double rho : s.ladder) {
    const GridEval g = evaluate(W, p, basis, rho, s.K, nullptr, 0.0);
    const double f = 1.0 / (rho * rho) - 1.0;
    r.rho_ladder.push_back({rho, column_max_mean(g, dn, [&](int k, Index j) {
                              return g.at(g.x_sq, k, j) - g.at(g.Wx_sq, k, j);
                            })});
    weighted.rho_ladder.push_back({rho, column_max_mean(g, dn, [&](int k, Index j) {
                                     return f * (g.at(g.x_sq, k, j) - dn[j]);
                                   })});
    defect_a.rho_ladder.push_back({rho, column_max_mean(g, dn, [&](int k, Index j) {
                                     return dn[j] - (g.at(g.x_sq, k, j) - g.at(g.Ax_sq, k, j));
                                   })});
    energy.rho_ladder.push_back({rho, column_max_mean(g, dn, [&](int k, Index j) {
                                   return f * g.at(g.x_sq, k, j);
                                 })});
  }
  taylor.taylor_trace = taylor_trace(a_series(W), basis, s.N);

  const Verdict main = ladder_verdict(r.rho_ladder, s.tol_int);
  weighted.verdict = ladder_verdict(weighted.rho_ladder, s.tol_int);
  defect_a.verdict = ladder_verdict(defect_a.rho_ladder, s.tol_int);
  energy.verdict = ladder_verdict(energy.rho_ladder, 1e-2);
  taylor.verdict = taylor_verdict(taylor.taylor_trace, s.tol_taylor);
  weighted.tolerances["tol_int"] = defect_a.tolerances["tol_int"] = s.tol_int;
  energy.tolerances["tol_int"] = 1e-2;
  taylor.tolerances["tol_taylor"] = s.tol_taylor;
  weighted.notes.push_back("value is (1/rho^2 - 1)(mean ||d(z)||^2 - ||d||^2) / ||d||^2");

  r.verdict = both(main, taylor.verdict);
  r.taylor_trace = taylor.taylor_trace;
  r.tolerances["tol_int"] = s.tol_int;
  r.tolerances["tol_taylor"] = s.tol_taylor;
  r.metrics["defect_ladder_verdict_pass"] = main == Verdict::pass ? 1.0 : 0.0;
  r.metrics["hardy_norm_gap"] = hardy_gap(W, basis, s.N);
  r.metrics["N"] = s.N;
  r.metrics["K"] = s.K;
  r.parts = {weighted, defect_a, energy, taylor};
  return r;
}

CriterionReport check_with_known_zero(const h2::AnalyticFn& W, cplx z0, const CMatrix& basis_in,
                                      const Settings& s, double zero_tol) {
  const Index p = a_block_size(W);
  const double at_zero = linalg::op_norm(W(z0));
  if (at_zero > zero_tol)
    throw Z0NotAZero("W(z0) has norm " + std::to_string(at_zero));
  const CMatrix basis = basis_or_identity(basis_in, p);
  const auto dn = column_norms_sq(basis);
  CriterionReport r = make("gamma_isometry_known_zero");
  for (double rho : s.ladder) {
    const GridEval g = evaluate(W, p, basis, rho, s.K, nullptr, 0.0);
    r.rho_ladder.push_back({rho, column_max_mean(g, dn, [&](int k, Index j) {
                              return g.at(g.x_sq, k, j) - g.at(g.Wx_sq, k, j);
                            })});
  }
  r.verdict = ladder_verdict(r.rho_ladder, s.tol_int);
  r.tolerances["tol_int"] = s.tol_int;
  r.metrics["norm_at_zero"] = at_zero;
  r.metrics["z0_re"] = z0.real();
  r.metrics["z0_im"] = z0.imag();
  bool all_zero = true;
  for (const auto& c : W.series().coeffs) all_zero = all_zero && c.norm() == 0.0;
  if (all_zero) r.notes.push_back("W vanishes identically, so Gamma is the zero map");
  return r;
}

CriterionReport check_constant_schur(const CMatrix& W0, double tol) {
  const Index p = W0.cols();
  if (W0.rows() < p) throw DimensionMismatch("W0 must have at least as many rows as columns");
  CriterionReport r = make("constant_schur");
  const auto cls = linalg::classify(W0, tol);
  const double sr = linalg::spectral_radius(W0.topRows(p));
  const bool iso = cls.has(linalg::OperatorClass::isometry);
  r.metrics["isometry_residual"] = linalg::op_norm(W0.adjoint() * W0 - linalg::identity(p));
  r.metrics["spectral_radius_A0"] = sr;
  r.tolerances["tol"] = tol;
  if (!iso) r.notes.push_back("W0 is not an isometry");
  if (sr >= 1.0 - tol) r.notes.push_back("A0 has spectrum on the unit circle");
  r.verdict = (iso && sr < 1.0 - tol) ? Verdict::pass : Verdict::fail;
  return r;
}

CriterionReport check_herglotz_measure(const h2::AnalyticFn& W, const CMatrix& basis_in,
                                       const Settings& s, const BoundaryOptions& b) {
  const Index p = a_block_size(W);
  const CMatrix basis = basis_or_identity(basis_in, p);
  const auto dn = column_norms_sq(basis);

  CriterionReport r = make("herglotz_measure");
  CriterionReport mass = make("herglotz_mass");
  CriterionReport ac = make("absolute_continuity");
  CriterionReport kv = make("k_vanishing");

  double mass_dev = 0.0;
  for (double rho : s.ladder) {
    const GridEval g = evaluate(W, p, basis, rho, s.K, nullptr, 0.0);
    const double r2 = rho * rho;
    const double hmax = column_max_mean(g, dn, [&](int k, Index j) {
      return g.at(g.x_sq, k, j) - r2 * g.at(g.Ax_sq, k, j);
    });
    const double hmin = -column_max_mean(g, dn, [&](int k, Index j) {
      return -(g.at(g.x_sq, k, j) - r2 * g.at(g.Ax_sq, k, j));
    });
    mass.rho_ladder.push_back({rho, hmax});
    mass_dev = std::max({mass_dev, std::abs(hmax - 1.0), std::abs(hmin - 1.0)});
    kv.rho_ladder.push_back({rho, column_max_mean(g, dn, [&](int k, Index j) {
                               const double x = g.at(g.x_sq, k, j), wx = g.at(g.Wx_sq, k, j);
                               return (1.0 - r2) / r2 * x + (x - wx) / r2;
                             })});
  }
  mass.metrics["max_deviation"] = mass_dev;
  mass.verdict = mass_dev < 1e-9 ? Verdict::pass : Verdict::fail;
  mass.tolerances["tol"] = 1e-9;
  if (mass.verdict == Verdict::fail)
    mass.notes.push_back("the mean is exact for analytic data, so a deviation means the grid "
                         "aliases d(z) at the outer radii; raise K");

  const auto ex = boundary_exclusions(s.K, b.discontinuities);
  const GridEval g = evaluate(W, p, basis, 1.0, s.K, &ex, b.singular_rcond);
  double h_lo = std::numeric_limits<double>::infinity(), h_hi = -h_lo;
  for (Index j = 0; j < g.m; ++j) {
    double sum = 0.0;
    for (int k = 0; k < g.K; ++k)
      if (g.used[k]) sum += g.at(g.x_sq, k, j) - g.at(g.Ax_sq, k, j);
    const double v = sum / g.K / dn[j];
    h_lo = std::min(h_lo, v);
    h_hi = std::max(h_hi, v);
  }
  const double ac_dev = std::max(std::abs(h_lo - 1.0), std::abs(h_hi - 1.0));
  ac.metrics["boundary_mass_min"] = h_lo;
  ac.metrics["boundary_mass_max"] = h_hi;
  ac.metrics["deviation"] = ac_dev;
  ac.verdict = ac_dev < s.tol_int ? Verdict::pass : Verdict::fail;
  ac.tolerances["tol_int"] = s.tol_int;

  const double k_bdry = column_max_mean(g, dn, [&](int k, Index j) {
    return g.at(g.x_sq, k, j) - g.at(g.Wx_sq, k, j);
  });
  kv.metrics["boundary_mean"] = k_bdry;
  kv.verdict = k_bdry < s.tol_int ? Verdict::pass : Verdict::fail;
  kv.tolerances["tol_int"] = s.tol_int;

  const int excluded = static_cast<int>(std::count(ex.begin(), ex.end(), 1));
  r.metrics["excluded_nodes"] = excluded;
  r.metrics["singular_nodes"] = s.K - excluded - used_count(g);
  r.tolerances["tol_int"] = s.tol_int;
  r.verdict = both(ac.verdict, kv.verdict);
  r.parts = {mass, ac, kv};
  return r;
}

CriterionReport check_inner_boundary(const h2::AnalyticFn& W, const CMatrix& basis_in,
                                     const Settings& s, const BoundaryOptions& b) {
  if (!b.boundary_invertibility_asserted)
    throw BoundaryAssumptionMissing(
        "boundary invertibility of I - zA(z) must be asserted by the caller");
  const Index p = a_block_size(W);
  const CMatrix basis = basis_or_identity(basis_in, p);
  const auto dn = column_norms_sq(basis);

  CriterionReport r = make("inner_boundary");
  CriterionReport inner = make("innerness");
  CriterionReport integral = make("boundary_defect_integral");

  auto defect_sq = [](const CMatrix& M) {
    const CMatrix H = CMatrix::Identity(M.cols(), M.cols()) - M.adjoint() * M;
    if (H.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (H + H.adjoint()), Eigen::EigenvaluesOnly);
    return std::max(0.0, es.eigenvalues().maxCoeff());
  };
  auto mean_defect = [&](double rho, const std::vector<char>* ex) {
    const auto z = kernels::circle_nodes(rho, s.K);
    std::vector<double> v(z.size(), 0.0);
    kernels::for_each_node(s.K, [&](int k) {
      if (ex && (*ex)[k]) return;
      const CMatrix Wz = W(z[k]);
      if (Wz.allFinite()) v[k] = defect_sq(Wz);
    });
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / s.K;
  };
  for (double rho : s.ladder) inner.rho_ladder.push_back({rho, mean_defect(rho, nullptr)});
  const auto ex = boundary_exclusions(s.K, b.discontinuities);
  const double bdry = mean_defect(1.0, &ex);
  inner.metrics["boundary_mean"] = bdry;
  inner.verdict = bdry < s.tol_int ? Verdict::pass : Verdict::fail;
  inner.tolerances["tol_int"] = s.tol_int;

  const GridEval g = evaluate(W, p, basis, 1.0, s.K, &ex, b.singular_rcond);
  double dev = 0.0;
  for (Index j = 0; j < g.m; ++j) {
    double sum = 0.0;
    for (int k = 0; k < g.K; ++k)
      if (g.used[k]) sum += g.at(g.x_sq, k, j) - g.at(g.Ax_sq, k, j);
    dev = std::max(dev, std::abs(sum / g.K / dn[j] - 1.0));
  }
  integral.metrics["deviation"] = dev;
  integral.verdict = dev < s.tol_int ? Verdict::pass : Verdict::fail;
  integral.tolerances["tol_int"] = s.tol_int;

  r.metrics["singular_nodes"] =
      s.K - static_cast<int>(std::count(ex.begin(), ex.end(), 1)) - used_count(g);
  r.notes.push_back("boundary invertibility of I - zA(z) asserted by the caller");
  r.verdict = both(inner.verdict, integral.verdict);
  r.parts = {inner, integral};
  return r;
}

CriterionReport check_free_schur_lifting(const clt::LiftingData& ld, const h2::AnalyticFn& R,
                                         const CMatrix& basis_in, const Settings& s) {
  const h2::AnalyticFn W = clt::assemble_schur_W(ld, R);
  const Index p = ld.p();
  const CMatrix basis = basis_or_identity(basis_in, p);
  const auto dn = column_norms_sq(basis);
  const CMatrix& Kin = ld.ker_omega.columns;
  const CMatrix& Pi = ld.Pi;
  const CMatrix& omega = ld.omega_bar;

  CriterionReport r = make("free_schur_lifting");
  CriterionReport taylor = make("taylor_decay");
  double chain = 0.0;

  for (double rho : s.ladder) {
    const auto z = kernels::circle_nodes(rho, s.K);
    const Index m = basis.cols();
    std::vector<double> val(static_cast<size_t>(s.K * m), 0.0), res(static_cast<size_t>(s.K), 0.0);
    kernels::for_each_node(s.K, [&](int k) {
      const CMatrix Wz = W(z[k]);
      const CMatrix A = Pi * Wz;
      const CMatrix X = (CMatrix::Identity(p, p) - z[k] * A).partialPivLu().solve(basis);
      const CMatrix Y = Kin.adjoint() * X;
      const CMatrix RY = R(z[k]) * Y;
      const CMatrix WX = Wz * X;
      const CMatrix OX = omega * X;
      double worst = 0.0;
      for (Index j = 0; j < m; ++j) {
        const double x = X.col(j).squaredNorm();
        const double e1 = x - WX.col(j).squaredNorm();
        const double e2 = x - OX.col(j).squaredNorm() - RY.col(j).squaredNorm();
        const double e3 = Y.col(j).squaredNorm() - RY.col(j).squaredNorm();
        val[k * m + j] = e3;
        worst = std::max({worst, std::abs(e1 - e3) / x, std::abs(e2 - e3) / x});
      }
      res[k] = worst;
    });
    double worst_col = 0.0;
    for (Index j = 0; j < m; ++j) {
      double sum = 0.0;
      for (int k = 0; k < s.K; ++k) sum += val[k * m + j];
      worst_col = std::max(worst_col, sum / s.K / dn[j]);
    }
    for (double v : res) chain = std::max(chain, v);
    r.rho_ladder.push_back({rho, worst_col});
  }

  taylor.taylor_trace = taylor_trace(Pi * W.series(), basis, s.N);
  taylor.verdict = taylor_verdict(taylor.taylor_trace, s.tol_taylor);
  taylor.tolerances["tol_taylor"] = s.tol_taylor;

  Verdict main;
  if (ld.ker_omega.dim() == 0) {
    r.notes.push_back("kernel of omega is trivial, the defect condition is vacuous");
    main = Verdict::pass;
  } else {
    main = ladder_verdict(r.rho_ladder, s.tol_int);
  }
  r.metrics["defect_chain_residual"] = chain;
  r.metrics["dim_ker_omega"] = static_cast<double>(ld.ker_omega.dim());
  r.metrics["dim_ker_omega_star"] = static_cast<double>(ld.ker_omega_star.dim());
  r.tolerances["tol_int"] = s.tol_int;
  r.tolerances["tol_taylor"] = s.tol_taylor;
  r.tolerances["defect_chain"] = 1e-10;
  if (chain > 1e-10) r.notes.push_back("defect chain identity residual above 1e-10");
  r.taylor_trace = taylor.taylor_trace;
  r.verdict = both(main, taylor.verdict);
  r.parts = {taylor};
  return r;
}

namespace {

CMatrix checked_W0(const clt::LiftingData& ld, const CMatrix& R0) {
  const Index k = ld.ker_omega.dim(), ks = ld.ker_omega_star.dim();
  if (R0.rows() != ks || R0.cols() != k)
    throw NotIsometricR0("R0 must map ker omega (dim " + std::to_string(k) +
                         ") into ker omega^* (dim " + std::to_string(ks) + ")");
  if (k > 0 && linalg::op_norm(R0.adjoint() * R0 - linalg::identity(k)) > 1e-8)
    throw NotIsometricR0("R0 is not an isometry");
  return ld.omega_bar + ld.ker_omega_star.columns * R0 * ld.ker_omega.columns.adjoint();
}

}  // namespace

CriterionReport obstruction_search(const clt::LiftingData& ld, const CMatrix& R0, int n_max,
                                   double tol) {
  const CMatrix W0 = checked_W0(ld, R0);
  const CMatrix V = (ld.Pi * W0).adjoint();
  CriterionReport r = make("obstruction_search");
  r.tolerances["tol"] = tol;
  r.metrics["spectral_radius_V"] = linalg::spectral_radius(V);
  const auto w = linalg::find_non_c0dot_witness(V, tol);
  if (!w) {
    r.verdict = Verdict::pass;
    r.notes.push_back("no unimodular eigenvalue, V is of class C.0");
    return r;
  }
  double rec = 0.0;
  bool monotone = true;
  for (int n = 0; n <= n_max; ++n) {
    const CVector dn = w->term(n), dn1 = w->term(n + 1);
    rec = std::max(rec, (V * dn1 - dn).norm());
    if (dn.norm() > dn1.norm() * (1.0 + 1e-12)) monotone = false;
    r.taylor_trace.push_back({n, dn.norm()});
  }
  r.metrics["lambda_re"] = w->lambda.real();
  r.metrics["lambda_im"] = w->lambda.imag();
  r.metrics["lambda_abs"] = std::abs(w->lambda);
  r.metrics["recursion_residual"] = rec;
  r.metrics["norms_nondecreasing"] = monotone ? 1.0 : 0.0;
  r.notes.push_back("witness sequence d_n = lambda^{-n} h satisfies V d_{n+1} = d_n");
  r.verdict = Verdict::fail;
  return r;
}

CriterionReport check_backward_extension(const std::vector<CVector>& seq,
                                         const clt::LiftingData& ld, const CMatrix& R0,
                                         int n_back, double tol) {
  const CMatrix W0 = checked_W0(ld, R0);
  const CMatrix V = (ld.Pi * W0).adjoint();
  const Index p = ld.p();
  CriterionReport r = make("backward_extension");
  r.tolerances["tol"] = tol;

  for (const auto& d : seq)
    if (d.size() != p) throw DimensionMismatch("sequence vectors have the wrong length");
  for (size_t n = 0; n + 1 < seq.size(); ++n) {
    const double scale = std::max(1.0, seq[n + 1].norm());
    if ((V * seq[n + 1] - seq[n]).norm() > tol * scale)
      throw SequenceViolatesRecursion("V d_{n+1} differs from d_n at n = " + std::to_string(n));
    if (seq[n].norm() > seq[n + 1].norm() + tol * scale)
      throw SequenceViolatesRecursion("norms decrease at n = " + std::to_string(n));
  }
  bool all_zero = true;
  for (const auto& d : seq) all_zero = all_zero && d.norm() <= tol;
  if (all_zero) {
    r.verdict = Verdict::pass;
    r.notes.push_back("degenerate: the sequence vanishes");
    return r;
  }

  // extend backward with d_{n-1} = V d_n
  std::vector<CVector> full;
  CVector cur = seq.front();
  std::vector<CVector> back;
  for (int i = 0; i < n_back; ++i) {
    cur = V * cur;
    back.push_back(cur);
  }
  full.assign(back.rbegin(), back.rend());
  full.insert(full.end(), seq.begin(), seq.end());

  const CMatrix& K = ld.ker_omega_star.columns;
  const CMatrix& Kin = ld.ker_omega.columns;
  const CMatrix& om = ld.omega_bar;
  const Index target = om.rows();
  const CMatrix P_final = CMatrix::Identity(target, target) - om * om.adjoint();
  const Index cnt = static_cast<Index>(full.size()) - 1;
  CMatrix Xs(K.cols(), cnt), Ys(Kin.cols(), cnt);
  double res414 = 0.0, scale = 0.0;
  for (Index n = 0; n < cnt; ++n) {
    const CVector up = ld.Pi.adjoint() * full[n + 1];
    Xs.col(n) = K.adjoint() * (P_final * up);
    Ys.col(n) = Kin.adjoint() * full[n];
    res414 = std::max(res414, (om * om.adjoint() * up - om * full[n]).norm());
    scale = std::max(scale, full[n + 1].norm());
  }
  // least-squares C on the span of the x_n
  CMatrix C = CMatrix::Zero(Kin.cols(), K.cols());
  if (Xs.size() > 0 && Ys.rows() > 0) {
    Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(Xs.adjoint());
    cod.setThreshold(kRankTol);
    C = cod.solve(Ys.adjoint()).adjoint();
  }
  const double fit = Ys.size() > 0 ? (C * Xs - Ys).norm() : 0.0;
  const double cnorm = linalg::op_norm(C);
  const auto span = linalg::range_basis(Xs);
  const CMatrix CS = C * span.columns;
  const double span_iso =
      span.dim() > 0 ? linalg::op_norm(CS.adjoint() * CS - linalg::identity(span.dim())) : 0.0;
  const CMatrix DCs = linalg::psd_sqrt(linalg::identity(C.rows()) - C * C.adjoint());
  const Index dim_dcs = linalg::numerical_rank(DCs);
  const Index lhs = K.cols(), rhs = Kin.cols() + dim_dcs;

  r.metrics["C_norm"] = cnorm;
  r.metrics["C_fit_residual"] = fit;
  r.metrics["C_isometry_residual_on_span"] = span_iso;
  r.metrics["span_dim"] = static_cast<double>(span.dim());
  r.metrics["intertwining_residual"] = res414;
  r.metrics["dim_ker_omega_star"] = static_cast<double>(lhs);
  r.metrics["dim_ker_omega_plus_defect_Cstar"] = static_cast<double>(rhs);
  r.metrics["backward_steps"] = n_back;
  const bool ok = cnorm <= 1.0 + tol && fit <= tol * std::max(1.0, scale) &&
                  res414 <= tol * std::max(1.0, scale) && lhs >= rhs;
  r.verdict = ok ? Verdict::pass : Verdict::fail;
  return r;
}

}  // namespace liftlab::criteria
