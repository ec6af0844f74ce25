#ifndef ACEFL_VERIFY_H_
#define ACEFL_VERIFY_H_

#include <cstdint>
#include <string>
#include <vector>

#include "acefl/param_vector.h"
#include "acefl/rng.h"

namespace acefl {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Self-check suite behind `acefl verify`: partition counts, L-BFGS against
// exact Hessians, the amplification propositions and the Shapley axioms.
std::vector<CheckResult> RunVerification(std::uint64_t seed = 2024);

// Random symmetric matrix Q diag(eigenvalues) Q^T, row-major, with Q from
// Gram-Schmidt on Gaussian columns.
std::vector<double> RandomSpdMatrix(const std::vector<double>& eigenvalues,
                                    Rng& rng);

ParamVector RandomGaussian(std::size_t dim, Rng& rng);

}  // namespace acefl

#endif  // ACEFL_VERIFY_H_
