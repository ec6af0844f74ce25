#include "acefl/contribution.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "acefl/error.h"

namespace acefl {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double Binomial(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return std::round(out);
}

void RequireSelected(const RoundRecord& round) {
  if (round.selected.empty()) throw PreconditionError("round has no participants");
}

// Reputations of the selected clients, renormalized to sum to 1.
std::map<ClientId, double> SelectedReputations(const RoundRecord& round,
                                               const ReputationState& state) {
  std::map<ClientId, double> out;
  double total = 0.0;
  for (ClientId id : round.selected) {
    auto it = state.r.find(id);
    out[id] = it == state.r.end() ? 0.0 : it->second;
    total += out[id];
  }
  if (!(total > 0.0)) throw PreconditionError("selected reputations are all 0");
  for (auto& [id, v] : out) v /= total;
  return out;
}

class FunctionEvaluator : public ContributionEvaluator {
 public:
  FunctionEvaluator(std::string name,
                    std::function<Contributions(const RoundRecord&)> fn)
      : name_(std::move(name)), fn_(std::move(fn)) {}
  std::string name() const override { return name_; }
  Contributions Evaluate(const RoundRecord& round) override { return fn_(round); }

 private:
  std::string name_;
  std::function<Contributions(const RoundRecord&)> fn_;
};

class ReputationEvaluator : public ContributionEvaluator {
 public:
  using Step = std::function<std::pair<Contributions, ReputationState>(
      const RoundRecord&, const ReputationState&)>;
  ReputationEvaluator(std::string name, int num_clients, Step step)
      : name_(std::move(name)),
        state_(ReputationState::Uniform(num_clients)),
        step_(std::move(step)) {}

  std::string name() const override { return name_; }
  const std::map<ClientId, double>* reputations() const override {
    return &state_.r;
  }
  Contributions Evaluate(const RoundRecord& round) override {
    auto [contributions, next] = step_(round, state_);
    state_ = std::move(next);
    return contributions;
  }

 private:
  std::string name_;
  ReputationState state_;
  Step step_;
};

}  // namespace

std::vector<double> ShapleyExact(
    const std::function<double(std::uint32_t mask)>& utility, int n) {
  if (n < 1) throw PreconditionError("Shapley needs at least one player");
  if (n > kMaxShapleyPlayers) {
    throw PreconditionError("exact Shapley limited to " +
                            std::to_string(kMaxShapleyPlayers) + " players");
  }
  const std::uint32_t subsets = 1u << n;
  std::vector<double> value(subsets);
  for (std::uint32_t mask = 0; mask < subsets; ++mask) value[mask] = utility(mask);
  // Weight of a coalition of size s not containing i: 1 / (n C(n-1, s)).
  std::vector<double> weight(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) weight[s] = 1.0 / (n * Binomial(n - 1, s));
  std::vector<double> phi(static_cast<std::size_t>(n), 0.0);
  for (std::uint32_t mask = 0; mask < subsets; ++mask) {
    const int s = std::popcount(mask);
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) continue;
      phi[i] += weight[s] * (value[mask | (1u << i)] - value[mask]);
    }
  }
  return phi;
}

std::string MethodName(const EvalMethod& method) {
  return std::visit(Overloaded{
                        [](const FedSv&) { return std::string("fedsv"); },
                        [](const Loo&) { return std::string("loo"); },
                        [](const Cffl&) { return std::string("cffl"); },
                        [](const Gdr&) { return std::string("gdr"); },
                        [](const Rffl&) { return std::string("rffl"); },
                    },
                    method);
}

ReputationState ReputationState::Uniform(int num_clients) {
  ReputationState s;
  for (ClientId id = 0; id < num_clients; ++id) s.r[id] = 1.0 / num_clients;
  return s;
}

ReputationState ReputationState::Updated(const Contributions& contributions,
                                         double alpha) const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw PreconditionError("reputation alpha must lie in (0, 1)");
  }
  ReputationState next = *this;
  double mass = 0.0;
  double raw_total = 0.0;
  std::map<ClientId, double> raw;
  for (const auto& [id, e] : contributions) {
    const double prev = r.count(id) ? r.at(id) : 0.0;
    mass += prev;
    raw[id] = std::max(0.0, alpha * prev + (1.0 - alpha) * e);
    raw_total += raw[id];
  }
  if (!(raw_total > 0.0) || !(mass > 0.0)) return next;
  for (const auto& [id, v] : raw) next.r[id] = v / raw_total * mass;
  // Renormalize globally so rounding drift cannot accumulate.
  double total = 0.0;
  for (const auto& [id, v] : next.r) total += v;
  for (auto& [id, v] : next.r) v /= total;
  return next;
}

Contributions EvalFedSv(const RoundRecord& round, const Dataset& validation,
                        const ModelKind& model) {
  RequireSelected(round);
  const auto& ids = round.selected;
  const int n = static_cast<int>(ids.size());
  const double base_loss = LossOn(model, round.global_before, validation);
  auto utility = [&](std::uint32_t mask) {
    if (mask == 0) return 0.0;
    ParamVector mean_update(round.global_before.size());
    int count = 0;
    for (int k = 0; k < n; ++k) {
      if (mask & (1u << k)) {
        mean_update += round.updates.at(ids[k]);
        ++count;
      }
    }
    mean_update *= 1.0 / count;
    return base_loss -
           LossOn(model, round.global_before - mean_update, validation);
  };
  const auto phi = ShapleyExact(utility, n);
  Contributions out;
  for (int k = 0; k < n; ++k) out[ids[k]] = phi[k];
  return out;
}

ParamVector LooCounterfactualModel(const RoundRecord& round, ClientId excluded) {
  std::map<ClientId, double> weights;
  double total = 0.0;
  for (const auto& [id, w] : round.weights) {
    if (id == excluded) continue;
    weights[id] = w;
    total += w;
  }
  if (weights.empty()) throw PreconditionError("LOO needs >= 2 participants");
  if (!(total > 0.0)) throw PreconditionError("LOO: remaining weights are 0");
  for (auto& [id, w] : weights) w /= total;
  return round.global_before - ApplyWeights(round.updates, weights);
}

Contributions EvalLoo(const RoundRecord& round, const Dataset& validation,
                      const ModelKind& model) {
  if (round.selected.size() < 2) {
    throw PreconditionError("LOO needs at least two selected clients");
  }
  const double full = LossOn(model, round.GlobalAfter(), validation);
  Contributions out;
  for (ClientId id : round.selected) {
    out[id] = LossOn(model, LooCounterfactualModel(round, id), validation) - full;
  }
  return out;
}

Contributions EvalCffl(const RoundRecord& round, const Dataset& validation,
                       const ModelKind& model) {
  RequireSelected(round);
  if (validation.size() == 0) throw PreconditionError("CFFL needs validation data");
  std::map<ClientId, double> vacc;
  double total = 0.0;
  for (ClientId id : round.selected) {
    vacc[id] = AccuracyOn(model, round.global_before - round.updates.at(id),
                          validation);
    total += vacc[id];
  }
  Contributions out;
  for (const auto& [id, a] : vacc) {
    out[id] = total > 0.0 ? a / total : 1.0 / vacc.size();
  }
  return out;
}

std::pair<Contributions, ReputationState> EvalGdr(const RoundRecord& round,
                                                  const ReputationState& state,
                                                  const Gdr& params) {
  RequireSelected(round);
  if (!(params.epsilon > 0.0)) throw PreconditionError("GDR epsilon must be > 0");
  const auto weights = SelectedReputations(round, state);
  std::map<ClientId, ParamVector> normalized;
  ParamVector aggregate(round.global_before.size());
  for (ClientId id : round.selected) {
    const ParamVector& g = round.updates.at(id);
    const double norm = Norm(g);
    if (norm == 0.0) continue;
    normalized[id] = (params.epsilon / norm) * g;
    aggregate.Axpy(weights.at(id), normalized[id]);
  }
  if (normalized.empty()) throw ZeroNormError("GDR: every update is zero");
  if (Norm(aggregate) == 0.0) throw ZeroNormError("GDR: aggregate is zero");
  Contributions out;
  for (ClientId id : round.selected) {
    auto it = normalized.find(id);
    out[id] = it == normalized.end() ? 0.0 : CosineSimilarity(aggregate, it->second);
  }
  return {out, state.Updated(out, params.alpha)};
}

std::pair<Contributions, ReputationState> EvalRffl(const RoundRecord& round,
                                                   const ReputationState& state,
                                                   const Rffl& params) {
  RequireSelected(round);
  if (Norm(round.global_update) == 0.0) {
    throw ZeroNormError("RFFL: global update is zero");
  }
  Contributions out;
  for (ClientId id : round.selected) {
    const ParamVector& g = round.updates.at(id);
    out[id] = Norm(g) == 0.0 ? 0.0 : CosineSimilarity(round.global_update, g);
  }
  return {out, state.Updated(out, params.alpha)};
}

AggregationRule DefaultAggregation(const EvalMethod& method,
                                   bool class_imbalanced) {
  if (std::holds_alternative<Cffl>(method)) {
    return CffLClassWeighted{class_imbalanced};
  }
  if (std::holds_alternative<Gdr>(method) || std::holds_alternative<Rffl>(method)) {
    return ReputationWeighted{};
  }
  return FedAvgBySize{};
}

std::unique_ptr<ContributionEvaluator> MakeEvaluator(const EvalMethod& method,
                                                     const ModelKind& model,
                                                     Dataset validation,
                                                     int num_clients) {
  const std::string name = MethodName(method);
  if (const auto* gdr = std::get_if<Gdr>(&method)) {
    return std::make_unique<ReputationEvaluator>(
        name, num_clients,
        [params = *gdr](const RoundRecord& r, const ReputationState& s) {
          return EvalGdr(r, s, params);
        });
  }
  if (const auto* rffl = std::get_if<Rffl>(&method)) {
    return std::make_unique<ReputationEvaluator>(
        name, num_clients,
        [params = *rffl](const RoundRecord& r, const ReputationState& s) {
          return EvalRffl(r, s, params);
        });
  }
  auto shared = std::make_shared<const std::pair<ModelKind, Dataset>>(
      model, std::move(validation));
  std::function<Contributions(const RoundRecord&)> fn;
  if (std::holds_alternative<FedSv>(method)) {
    fn = [shared](const RoundRecord& r) {
      return EvalFedSv(r, shared->second, shared->first);
    };
  } else if (std::holds_alternative<Loo>(method)) {
    fn = [shared](const RoundRecord& r) {
      return EvalLoo(r, shared->second, shared->first);
    };
  } else {
    fn = [shared](const RoundRecord& r) {
      return EvalCffl(r, shared->second, shared->first);
    };
  }
  return std::make_unique<FunctionEvaluator>(name, std::move(fn));
}

}  // namespace acefl
