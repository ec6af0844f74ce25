#ifndef ACEFL_ACE_H_
#define ACEFL_ACE_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "acefl/engine.h"
#include "acefl/lbfgs.h"
#include "acefl/param_vector.h"
#include "acefl/round_record.h"

namespace acefl {

// How the attacker fills in rounds the predictor cannot serve.
enum class Strategy {
  kDeltaWeight,  // previous global update plus Gaussian noise
  kLocalTrain,   // an honest local update
};

std::string StrategyName(Strategy s);
Strategy ParseStrategy(const std::string& name);

inline constexpr double kDefaultDeltaSigma = 5e-5;

struct AttackConfig {
  int m = 3;          // curvature buffer length; rounds t <= m are preliminary
  double l = 1.0;     // filter: accept hv only if |hv| <= l |v|
  double c = 1.0;     // amplification of the crafted update
  int evolution_rounds = 1;
  Strategy preliminary_strategy = Strategy::kDeltaWeight;
  Strategy filter_fallback_strategy = Strategy::kDeltaWeight;
  double delta_sigma = kDefaultDeltaSigma;
  // Rounds in which the attacker runs ACE; unset means every round. In other
  // rounds it trains honestly.
  std::optional<std::set<int>> attack_rounds;
};

void ValidateAttackConfig(const AttackConfig& cfg);

// Branch labels written to diagnostics.
inline constexpr const char* kBranchHonest = "honest";
inline constexpr const char* kBranchPreliminary = "preliminary";
inline constexpr const char* kBranchPredicted = "predicted";
inline constexpr const char* kBranchFilterFallback = "filter_fallback";
inline constexpr const char* kBranchSingularFallback = "singular_fallback";
inline constexpr const char* kBranchBackoff = "backoff";

// g_hat = g_prev + hv.
ParamVector PredictGlobalUpdate(const ParamVector& g_prev, const ParamVector& hv);

// |hv| <= l |v|.
bool PassesThreshold(const ParamVector& hv, const ParamVector& v, double l);

// What the attacker sees at the start of round t.
struct AceContext {
  int t = 1;
  const ParamVector* global = nullptr;           // w^t
  const ParamVector* previous_global = nullptr;  // w^{t-1}
  const ParamVector* previous_update = nullptr;  // g^{t-1}
};

struct AceOutcome {
  ParamVector update;
  ClientDiagnostics diagnostics;
  // Last accepted global-update prediction and the accepted products in
  // order; empty when no prediction was accepted.
  std::optional<ParamVector> predicted;
  std::vector<ParamVector> accepted_hv;
};

// Produces the update for a fallback branch.
using StrategyFn = std::function<ParamVector(Strategy)>;

// One round of the attack. `buffers` already hold every observed pair up to
// round t; they are not modified, virtual evolution steps go to a copy.
AceOutcome AceCraftUpdate(const AceContext& ctx, const CurvatureBuffers& buffers,
                          const AttackConfig& cfg, const StrategyFn& strategy);

// w^{t-1} - w^t + N(0, sigma^2) per coordinate.
ParamVector BaselineDeltaWeight(const ParamVector& g_prev, double sigma,
                                std::uint64_t seed);
ParamVector BaselineScaling(const ParamVector& g_local, double factor);

// Malicious client running ACE. It watches every broadcast, including rounds
// it is not selected for, and keeps its own persistent curvature buffers.
class AceClient : public HonestClient {
 public:
  AceClient(ClientId id, const ModelKind* model, Dataset data, TrainSpec spec,
            std::uint64_t experiment_seed, AttackConfig cfg);

  void Observe(const RoundView& view) override;
  ClientOutput ComputeUpdate(const RoundView& view) override;

  const CurvatureBuffers& buffers() const { return buffers_; }
  const std::optional<AceOutcome>& last_outcome() const { return last_; }

 private:
  ParamVector RunStrategy(Strategy s, const RoundView& view) const;

  AttackConfig cfg_;
  CurvatureBuffers buffers_;
  int observed_round_ = 0;
  std::optional<ParamVector> older_update_;  // g^{t-2}
  std::optional<AceOutcome> last_;
};

// Previous global update plus noise; trains honestly in round 1.
class DeltaWeightClient : public HonestClient {
 public:
  DeltaWeightClient(ClientId id, const ModelKind* model, Dataset data,
                    TrainSpec spec, std::uint64_t experiment_seed,
                    double sigma = kDefaultDeltaSigma);
  ClientOutput ComputeUpdate(const RoundView& view) override;

 private:
  double sigma_;
};

// Honest local update multiplied by a constant factor.
class ScalingClient : public HonestClient {
 public:
  ScalingClient(ClientId id, const ModelKind* model, Dataset data,
                TrainSpec spec, std::uint64_t experiment_seed,
                double factor = 2.0);
  ClientOutput ComputeUpdate(const RoundView& view) override;

 private:
  double factor_;
};

// Trains honestly on its jittered, enlarged dataset and reports that size.
class DataAugmentClient : public HonestClient {
 public:
  DataAugmentClient(ClientId id, const ModelKind* model, const Dataset& data,
                    TrainSpec spec, std::uint64_t experiment_seed,
                    double noise_std, int multiplier = 2);
  ClientOutput ComputeUpdate(const RoundView& view) override;
};

}  // namespace acefl

#endif  // ACEFL_ACE_H_
