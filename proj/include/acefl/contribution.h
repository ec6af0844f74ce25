#ifndef ACEFL_CONTRIBUTION_H_
#define ACEFL_CONTRIBUTION_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "acefl/aggregation.h"
#include "acefl/dataset.h"
#include "acefl/engine.h"
#include "acefl/model.h"
#include "acefl/round_record.h"

namespace acefl {

inline constexpr int kMaxShapleyPlayers = 16;

// Exact Shapley values of a cooperative game on n players. `utility` is
// queried once per subset; bit k of the mask is player k. Throws
// PreconditionError if n > kMaxShapleyPlayers.
std::vector<double> ShapleyExact(
    const std::function<double(std::uint32_t mask)>& utility, int n);

struct FedSv {};
struct Loo {};
struct Cffl {};
struct Gdr {
  double epsilon = 1.0;  // length of every normalized update
  double alpha = 0.95;   // rolling-mean weight of the previous reputation
};
struct Rffl {
  double alpha = 0.95;
};

using EvalMethod = std::variant<FedSv, Loo, Cffl, Gdr, Rffl>;

std::string MethodName(const EvalMethod& method);

// Rolling reputation per client. Values are non-negative and sum to 1.
struct ReputationState {
  std::map<ClientId, double> r;

  static ReputationState Uniform(int num_clients);
  // r_i <- max(0, alpha r_i + (1 - alpha) e_i) for the evaluated clients,
  // then rescaled so they keep their previous total mass; clients without
  // a contribution this round keep their reputation. With full
  // participation this is plain normalization to 1.
  ReputationState Updated(const Contributions& contributions,
                          double alpha) const;
};

// U(S) = L(D_s; w^t) - L(D_s; mean_{k in S} w_k^{t+1}), U(empty) = 0; returns
// the Shapley values of U over the selected clients.
Contributions EvalFedSv(const RoundRecord& round, const Dataset& validation,
                        const ModelKind& model);

// Global model of the round rebuilt without `excluded`, the remaining
// aggregation weights renormalized.
ParamVector LooCounterfactualModel(const RoundRecord& round, ClientId excluded);

// e_i = L(D_s; w_{-i}) - L(D_s; w^{t+1}). Needs >= 2 selected clients.
Contributions EvalLoo(const RoundRecord& round, const Dataset& validation,
                      const ModelKind& model);

// e_i = vacc_i / sum_j vacc_j with vacc_i the validation accuracy of
// w^t - g_i^t. Uniform when every accuracy is 0.
Contributions EvalCffl(const RoundRecord& round, const Dataset& validation,
                       const ModelKind& model);

// e_i = S_c(u, u_i), u_i = eps g_i / |g_i|, u = sum_i r_i u_i with r the
// reputations entering the round (renormalized over the selected clients).
// Zero-norm updates score 0 and are left out of u.
std::pair<Contributions, ReputationState> EvalGdr(const RoundRecord& round,
                                                  const ReputationState& state,
                                                  const Gdr& params);

// e_i = S_c(g^t, g_i^t). Zero-norm client updates score 0; a zero-norm global
// update throws ZeroNormError.
std::pair<Contributions, ReputationState> EvalRffl(const RoundRecord& round,
                                                   const ReputationState& state,
                                                   const Rffl& params);

// The aggregation rule that goes with each evaluation method.
AggregationRule DefaultAggregation(const EvalMethod& method,
                                   bool class_imbalanced);

// Wraps the Eval* functions as an engine plugin. The validation set and model
// are copied in; reputation-based methods start from uniform reputations.
std::unique_ptr<ContributionEvaluator> MakeEvaluator(const EvalMethod& method,
                                                     const ModelKind& model,
                                                     Dataset validation,
                                                     int num_clients);

}  // namespace acefl

#endif  // ACEFL_CONTRIBUTION_H_
