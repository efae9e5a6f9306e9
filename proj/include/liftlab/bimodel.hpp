#pragma once

#include <cstdint>

#include "liftlab/criteria.hpp"
#include "liftlab/h2.hpp"

namespace liftlab::bimodel {

// Truncated model space H^2(E) (+) H^2(closure of Delta L^2(E)): the first component
// keeps Taylor coefficients of degree <= N, the second keeps w-degrees <= N sampled
// at K nodes of the circle.
struct ThetaModel {
  h2::MatPoly Theta;
  int K = 0;
  int N = 0;
  std::vector<cplx> zeta;
  std::vector<CMatrix> Delta;
  std::vector<CMatrix> range_projector;

  Index dim() const { return Theta.rows(); }
};

ThetaModel build_model(const h2::MatPoly& Theta, int K, int N);

struct ModelVector {
  std::vector<CVector> f;               // f[n], n = 0..N
  std::vector<std::vector<CVector>> g;  // g[w][k], w = 0..N, k = 0..K-1
};

ModelVector zero_vector(const ThetaModel& m);
// Projects each g(w, zeta_k) onto the range of Delta(zeta_k).
void project(const ThetaModel& m, ModelVector& v);
double norm_sq(const ThetaModel& m, const ModelVector& v);
ModelVector subtract(const ModelVector& a, const ModelVector& b);

// f -> z f, g -> zeta g.
ModelVector apply_V(const ThetaModel& m, const ModelVector& v);
// f -> Theta f, g(w, zeta) -> Delta(zeta) f(zeta) + w g(w, zeta).
ModelVector apply_W(const ThetaModel& m, const ModelVector& v);

// Random vector on which V, W, VW and WV all stay inside the truncation.
ModelVector random_window_vector(const ThetaModel& m, std::uint64_t seed);

criteria::CriterionReport verify_bi_isometry(const ThetaModel& m, int trials, std::uint64_t seed = 1,
                                             double tol = 1e-10);

}  // namespace liftlab::bimodel
