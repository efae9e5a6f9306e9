#pragma once

#include <map>
#include <string>
#include <vector>

#include "liftlab/clt.hpp"
#include "liftlab/h2.hpp"

namespace liftlab::criteria {

enum class Verdict { pass, fail, inconclusive };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct LadderPoint {
  double rho;
  double value;
};

struct TracePoint {
  int n;
  double value;
};

struct CriterionReport {
  std::string criterion_id;
  Verdict verdict = Verdict::inconclusive;
  std::vector<LadderPoint> rho_ladder;
  std::vector<TracePoint> taylor_trace;
  std::map<std::string, double> tolerances;
  std::map<std::string, double> metrics;
  std::vector<std::string> notes;
  std::vector<CriterionReport> parts;

  const CriterionReport* part(const std::string& id) const;
};

struct Settings {
  std::vector<double> ladder{0.9, 0.99, 0.999};
  int N = 256;
  int K = 2048;
  double tol_int = 1e-3;
  double tol_taylor = 1e-6;
};

// Pass when the last value is below tol and the ladder does not increase; fail when
// the last value is at or above tol and the ladder does not decrease.
Verdict ladder_verdict(const std::vector<LadderPoint>& ladder, double tol);
// Pass when the trace stays below tol from n = N/2 on; fail when it is essentially flat.
Verdict taylor_verdict(const std::vector<TracePoint>& trace, double tol);
Verdict both(Verdict a, Verdict b);

// Grid means for one direction d at radius rho, with d(z) = (I - zA(z))^{-1} d.
struct RadialTerms {
  double d_sq = 0.0;
  double mean_dz_sq = 0.0;
  double mean_Adz_sq = 0.0;
  double mean_zAdz_sq = 0.0;
  double mean_DW_sq = 0.0;
  double mean_DA_sq = 0.0;
  double mean_gamma_sq = 0.0;
  double mean_h = 0.0;
  double mean_k = 0.0;
};

RadialTerms radial_terms(const h2::AnalyticFn& W, const CVector& d, double rho, int K);

// max_j ||D_n d_j|| / ||d_j|| for n = 0..N.
std::vector<TracePoint> taylor_trace(const h2::MatPoly& A, const CMatrix& basis, int N);

CriterionReport check_gamma_isometry(const h2::AnalyticFn& W, const CMatrix& basis,
                                     const Settings& s);

CriterionReport check_with_known_zero(const h2::AnalyticFn& W, cplx z0, const CMatrix& basis,
                                      const Settings& s, double zero_tol = kClassifyTol);

CriterionReport check_constant_schur(const CMatrix& W0, double tol = kClassifyTol);

struct BoundaryOptions {
  std::vector<double> discontinuities;
  bool boundary_invertibility_asserted = false;
  double singular_rcond = 1e-12;
};

CriterionReport check_herglotz_measure(const h2::AnalyticFn& W, const CMatrix& basis,
                                       const Settings& s, const BoundaryOptions& b = {});

CriterionReport check_inner_boundary(const h2::AnalyticFn& W, const CMatrix& basis,
                                     const Settings& s, const BoundaryOptions& b);

CriterionReport check_free_schur_lifting(const clt::LiftingData& ld, const h2::AnalyticFn& R,
                                         const CMatrix& basis, const Settings& s);

CriterionReport obstruction_search(const clt::LiftingData& ld, const CMatrix& R0, int n_max = 16,
                                   double tol = kClassifyTol);

CriterionReport check_backward_extension(const std::vector<CVector>& seq,
                                         const clt::LiftingData& ld, const CMatrix& R0,
                                         int n_back, double tol = 1e-8);

}  // namespace liftlab::criteria
