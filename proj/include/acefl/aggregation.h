#ifndef ACEFL_AGGREGATION_H_
#define ACEFL_AGGREGATION_H_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>

#include "acefl/param_vector.h"
#include "acefl/round_record.h"

namespace acefl {

// Weights |D_i| / sum_j |D_j|.
struct FedAvgBySize {};

// Weights |class_i| / sum_j |class_j| in class-imbalanced mode, otherwise
// identical to FedAvgBySize.
struct CffLClassWeighted {
  bool class_imbalanced = true;
};

// Weights are the current reputations renormalized over the participants.
struct ReputationWeighted {};

using AggregationRule =
    std::variant<FedAvgBySize, CffLClassWeighted, ReputationWeighted>;

std::string RuleName(const AggregationRule& rule);

struct AggregationMetadata {
  std::map<ClientId, int> data_sizes;
  std::map<ClientId, int> class_counts;
  std::map<ClientId, double> reputations;
};

struct AggregationResult {
  ParamVector global_update;
  std::map<ClientId, double> weights;
};

// Normalized weights for the given participants. Throws PreconditionError if
// the rule's metadata is missing for a participant or all raw weights are 0.
std::map<ClientId, double> AggregationWeights(
    const AggregationRule& rule, const std::set<ClientId>& participants,
    const AggregationMetadata& metadata);

// Weighted sum in ascending client-id order.
ParamVector ApplyWeights(const std::map<ClientId, ParamVector>& updates,
                         const std::map<ClientId, double>& weights);

AggregationResult Aggregate(const AggregationRule& rule,
                            const std::map<ClientId, ParamVector>& updates,
                            const AggregationMetadata& metadata);

}  // namespace acefl

#endif  // ACEFL_AGGREGATION_H_
