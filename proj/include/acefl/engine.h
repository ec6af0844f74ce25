#ifndef ACEFL_ENGINE_H_
#define ACEFL_ENGINE_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "acefl/aggregation.h"
#include "acefl/dataset.h"
#include "acefl/model.h"
#include "acefl/param_vector.h"
#include "acefl/round_record.h"
#include "acefl/training.h"

namespace acefl {

// Deterministic round-keyed uniform sample of max(1, round(fraction * N))
// client ids, sorted ascending.
std::vector<ClientId> SelectClients(int num_clients, double fraction, int round,
                                    std::uint64_t seed);

// Broadcast state seen by every client at the start of round t.
struct RoundView {
  int t = 1;
  const ParamVector* global = nullptr;           // w^t
  const ParamVector* previous_global = nullptr;  // w^{t-1}, null in round 1
  const ParamVector* previous_update = nullptr;  // g^{t-1}, null in round 1
};

struct ClientOutput {
  ParamVector update;
  std::optional<ClientDiagnostics> diagnostics;
};

// One federated client. Implementations own all their mutable state, so
// distinct clients can compute updates concurrently.
class ClientBehavior {
 public:
  virtual ~ClientBehavior() = default;

  // Called for every client at the start of every round, selected or not.
  virtual void Observe(const RoundView& view) { (void)view; }
  virtual ClientOutput ComputeUpdate(const RoundView& view) = 0;

  // Self-reported |D_i| and number of distinct classes.
  virtual int ReportedDataSize() const = 0;
  virtual int ClassCount() const = 0;
};

// Stateless honest client: trains from the broadcast model each round.
class HonestClient : public ClientBehavior {
 public:
  // Per-round SGD seeds derive from (experiment_seed, id, round) only.
  HonestClient(ClientId id, const ModelKind* model, Dataset data,
               TrainSpec spec, std::uint64_t experiment_seed);

  ClientOutput ComputeUpdate(const RoundView& view) override;
  int ReportedDataSize() const override { return data_.size(); }
  int ClassCount() const override { return class_count_; }

  // The update an honest client would send; reused by attack fallbacks.
  ParamVector Train(const RoundView& view) const;
  const Dataset& data() const { return data_; }

 protected:
  ClientId id_;
  const ModelKind* model_;
  Dataset data_;
  TrainSpec spec_;
  std::uint64_t experiment_seed_;
  int class_count_;
};

// Server-side contribution evaluation plugin.
class ContributionEvaluator {
 public:
  virtual ~ContributionEvaluator() = default;
  virtual std::string name() const = 0;
  // Reputations to use as aggregation weights this round, if any.
  virtual const std::map<ClientId, double>* reputations() const {
    return nullptr;
  }
  // Contributions of the selected clients. Called once per round after
  // aggregation; may advance internal state (reputations).
  virtual Contributions Evaluate(const RoundRecord& round) = 0;
};

// Observation-mode countermeasure: flags clients, never alters aggregation.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual DefenseMethod method() const = 0;
  virtual FlagSet Flag(const RoundRecord& round) = 0;
};

struct EngineConfig {
  int num_clients = 10;
  int rounds = 60;
  double selection_fraction = 1.0;
  std::uint64_t seed = 0;
  AggregationRule rule = FedAvgBySize{};
  // Worker threads for Step II; results do not depend on this.
  int threads = 1;
};

class FlEngine {
 public:
  FlEngine(EngineConfig config, ModelKind model, ParamVector initial_model,
           std::vector<std::unique_ptr<ClientBehavior>> clients,
           std::unique_ptr<ContributionEvaluator> evaluator,
           std::vector<std::unique_ptr<Detector>> detectors);

  // Steps I-III of the next round. Plugin exceptions are rethrown as
  // acefl::Error with the round number prepended.
  RoundRecord RunRound();
  // Runs all configured rounds.
  FlTranscript Run();

  const ParamVector& global_model() const { return global_; }
  int next_round() const { return t_; }
  const EngineConfig& config() const { return config_; }
  const ModelKind& model() const { return model_; }
  // Wall-clock seconds each selected client spent in ComputeUpdate, one map
  // per completed round. Kept out of the transcript.
  const std::vector<std::map<ClientId, double>>& client_seconds() const {
    return client_seconds_;
  }

 private:
  RoundRecord RunRoundUnchecked();

  EngineConfig config_;
  ModelKind model_;
  std::vector<std::unique_ptr<ClientBehavior>> clients_;
  std::unique_ptr<ContributionEvaluator> evaluator_;
  std::vector<std::unique_ptr<Detector>> detectors_;

  int t_ = 1;
  ParamVector global_;
  std::optional<ParamVector> previous_global_;
  std::optional<ParamVector> previous_update_;
  std::vector<std::map<ClientId, double>> client_seconds_;
};

}  // namespace acefl

#endif  // ACEFL_ENGINE_H_
