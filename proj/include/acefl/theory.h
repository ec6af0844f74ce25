#ifndef ACEFL_THEORY_H_
#define ACEFL_THEORY_H_

#include "acefl/param_vector.h"

namespace acefl {

inline constexpr double kTheoryTolerance = 1e-9;

// Smallest amplification c for which sending c * g_hat_i beats client j in
// cosine distance to the resulting linear aggregate g' = g + (c-1) alpha_i
// g_hat_i. Throws PreconditionError if g_hat_i already beats g_j, if alpha_i
// is outside (0, 1], or if g_hat_i and g_j are parallel.
double MinAmplification(const ParamVector& g, const ParamVector& g_hat_i,
                        const ParamVector& g_j, double alpha_i);

// With g = g_others + alpha_i g_hat_i and g' = g_others + alpha_i c g_hat_i:
// cosine_distance(g', c g_hat_i) <= cosine_distance(g, g_hat_i) + tol.
bool CheckProp1(const ParamVector& g_others_sum, const ParamVector& g_hat_i,
                double alpha_i, double c);

// Requires cosine_distance(g, g_hat_i) <= cosine_distance(g, g_j); returns
// cosine_distance(g', c g_hat_i) <= cosine_distance(g', g_j) + tol.
bool CheckCorollary1(const ParamVector& g, const ParamVector& g_prime,
                     const ParamVector& g_hat_i, const ParamVector& g_j,
                     double c);

// g + (c - 1) alpha_i g_hat_i.
ParamVector AmplifiedAggregate(const ParamVector& g, const ParamVector& g_hat_i,
                               double alpha_i, double c);

}  // namespace acefl

#endif  // ACEFL_THEORY_H_
