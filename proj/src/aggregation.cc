#include "acefl/aggregation.h"

#include <string>

#include "acefl/error.h"

namespace acefl {
namespace {

template <typename T>
double Lookup(const std::map<ClientId, T>& table, ClientId id,
              const char* what) {
  auto it = table.find(id);
  if (it == table.end()) {
    throw PreconditionError(std::string("aggregation metadata lacks ") + what +
                            " for client " + std::to_string(id));
  }
  return static_cast<double>(it->second);
}

}  // namespace

std::string RuleName(const AggregationRule& rule) {
  if (std::holds_alternative<FedAvgBySize>(rule)) return "fedavg";
  if (std::holds_alternative<CffLClassWeighted>(rule)) return "cffl";
  return "reputation";
}

std::map<ClientId, double> AggregationWeights(
    const AggregationRule& rule, const std::set<ClientId>& participants,
    const AggregationMetadata& metadata) {
  if (participants.empty()) throw PreconditionError("no participants");
  std::map<ClientId, double> raw;
  for (ClientId id : participants) {
    if (const auto* c = std::get_if<CffLClassWeighted>(&rule);
        c != nullptr && c->class_imbalanced) {
      raw[id] = Lookup(metadata.class_counts, id, "class count");
    } else if (std::holds_alternative<ReputationWeighted>(rule)) {
      raw[id] = Lookup(metadata.reputations, id, "reputation");
    } else {
      raw[id] = Lookup(metadata.data_sizes, id, "data size");
    }
    if (raw[id] < 0.0) throw PreconditionError("negative aggregation weight");
  }
  double total = 0.0;
  for (const auto& [id, v] : raw) total += v;
  if (!(total > 0.0)) throw PreconditionError("all aggregation weights are 0");
  for (auto& [id, v] : raw) v /= total;
  return raw;
}

ParamVector ApplyWeights(const std::map<ClientId, ParamVector>& updates,
                         const std::map<ClientId, double>& weights) {
  if (updates.empty()) throw PreconditionError("no updates to aggregate");
  ParamVector out(updates.begin()->second.size());
  for (const auto& [id, w] : weights) {
    auto it = updates.find(id);
    if (it == updates.end()) {
      throw PreconditionError("weight for client without update: " +
                              std::to_string(id));
    }
    out.Axpy(w, it->second);
  }
  return out;
}

AggregationResult Aggregate(const AggregationRule& rule,
                            const std::map<ClientId, ParamVector>& updates,
                            const AggregationMetadata& metadata) {
  std::set<ClientId> participants;
  for (const auto& [id, u] : updates) participants.insert(id);
  AggregationResult result;
  result.weights = AggregationWeights(rule, participants, metadata);
  result.global_update = ApplyWeights(updates, result.weights);
  return result;
}

}  // namespace acefl
