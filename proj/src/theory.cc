#include "acefl/theory.h"

#include "acefl/error.h"

namespace acefl {

double MinAmplification(const ParamVector& g, const ParamVector& g_hat_i,
                        const ParamVector& g_j, double alpha_i) {
  CheckSameSize(g, g_hat_i);
  CheckSameSize(g, g_j);
  if (!(alpha_i > 0.0 && alpha_i <= 1.0)) {
    throw PreconditionError("alpha_i must lie in (0, 1]");
  }
  if (CosineDistance(g, g_hat_i) <= CosineDistance(g, g_j)) {
    throw PreconditionError(
        "predicted update already at least as close to g as g_j");
  }
  const double nh = Norm(g_hat_i);
  const double nj = Norm(g_j);
  const double gap = nj * nh - Dot(g_hat_i, g_j);
  if (!(gap > 0.0)) throw PreconditionError("g_hat_i and g_j are parallel");
  return (nh * Dot(g, g_j) - nj * Dot(g, g_hat_i)) / (alpha_i * nh * gap) + 1.0;
}

ParamVector AmplifiedAggregate(const ParamVector& g, const ParamVector& g_hat_i,
                               double alpha_i, double c) {
  ParamVector out = g;
  out.Axpy((c - 1.0) * alpha_i, g_hat_i);
  return out;
}

bool CheckProp1(const ParamVector& g_others_sum, const ParamVector& g_hat_i,
                double alpha_i, double c) {
  if (!(c >= 1.0)) throw PreconditionError("Prop. 1 needs c >= 1");
  ParamVector g = g_others_sum;
  g.Axpy(alpha_i, g_hat_i);
  ParamVector g_prime = g_others_sum;
  g_prime.Axpy(alpha_i * c, g_hat_i);
  return CosineDistance(g_prime, c * g_hat_i) <=
         CosineDistance(g, g_hat_i) + kTheoryTolerance;
}

bool CheckCorollary1(const ParamVector& g, const ParamVector& g_prime,
                     const ParamVector& g_hat_i, const ParamVector& g_j,
                     double c) {
  if (!(c >= 1.0)) throw PreconditionError("Corollary needs c >= 1");
  if (CosineDistance(g, g_hat_i) > CosineDistance(g, g_j)) {
    throw PreconditionError("Corollary hypothesis does not hold");
  }
  return CosineDistance(g_prime, c * g_hat_i) <=
         CosineDistance(g_prime, g_j) + kTheoryTolerance;
}

}  // namespace acefl
