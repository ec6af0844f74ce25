#include "acefl/ace.h"

#include <utility>

#include "acefl/error.h"
#include "acefl/rng.h"

namespace acefl {
namespace {

std::uint64_t NoiseSeed(std::uint64_t root, ClientId id, int t) {
  return DeriveSeed(root, {static_cast<std::uint64_t>(Stream::kAttackNoise),
                           static_cast<std::uint64_t>(id),
                           static_cast<std::uint64_t>(t)});
}

}  // namespace

std::string StrategyName(Strategy s) {
  return s == Strategy::kDeltaWeight ? "delta_weight" : "local_train";
}

Strategy ParseStrategy(const std::string& name) {
  if (name == "delta_weight" || name == "s1") return Strategy::kDeltaWeight;
  if (name == "local_train" || name == "s2") return Strategy::kLocalTrain;
  throw FormatError("unknown strategy '" + name + "'");
}

void ValidateAttackConfig(const AttackConfig& cfg) {
  if (cfg.m < 1) throw PreconditionError("attack m must be >= 1");
  if (!(cfg.l > 0.0)) throw PreconditionError("attack l must be > 0");
  if (!(cfg.c >= 1.0)) throw PreconditionError("attack c must be >= 1");
  if (cfg.evolution_rounds < 1) {
    throw PreconditionError("evolution_rounds must be >= 1");
  }
  if (!(cfg.delta_sigma >= 0.0)) throw PreconditionError("delta_sigma must be >= 0");
}

ParamVector PredictGlobalUpdate(const ParamVector& g_prev, const ParamVector& hv) {
  return g_prev + hv;
}

bool PassesThreshold(const ParamVector& hv, const ParamVector& v, double l) {
  if (!(l > 0.0)) throw PreconditionError("threshold coefficient must be > 0");
  return Norm(hv) <= l * Norm(v);
}

AceOutcome AceCraftUpdate(const AceContext& ctx, const CurvatureBuffers& buffers,
                          const AttackConfig& cfg, const StrategyFn& strategy) {
  AceOutcome out;
  out.diagnostics.strategy = "ace";
  if (ctx.t <= cfg.m) {
    out.update = strategy(cfg.preliminary_strategy);
    out.diagnostics.branch = kBranchPreliminary;
    return out;
  }
  if (!ctx.previous_global || !ctx.previous_update) {
    throw PreconditionError("ACE needs w^{t-1} and g^{t-1} after round 1");
  }
  out.diagnostics.amplification = cfg.c;

  CurvatureBuffers scratch = buffers;
  ParamVector w_prev = *ctx.previous_global;
  ParamVector w_cur = *ctx.global;
  ParamVector g_hat = *ctx.previous_update;
  ParamVector displacement(w_cur.size());  // w^t - w_hat, summed step by step

  for (int step = 0; step < cfg.evolution_rounds; ++step) {
    const ParamVector v = w_cur - w_prev;
    std::optional<ParamVector> hv;
    bool singular = false;
    if (scratch.empty()) {
      singular = true;
    } else {
      try {
        hv = LbfgsHvp(scratch, v);
      } catch (const CurvatureError&) {
        singular = true;
      }
    }
    if (step == 0 && hv) {
      const double nv = Norm(v);
      out.diagnostics.hv_ratio = nv > 0.0 ? Norm(*hv) / nv : -1.0;
    }
    const bool pass = !singular && PassesThreshold(*hv, v, cfg.l);
    if (!pass) {
      if (step == 0) {
        out.update = cfg.c * strategy(cfg.filter_fallback_strategy);
        out.diagnostics.branch =
            singular ? kBranchSingularFallback : kBranchFilterFallback;
        return out;
      }
      out.diagnostics.branch = kBranchBackoff;
      break;
    }
    g_hat = PredictGlobalUpdate(g_hat, *hv);
    out.accepted_hv.push_back(*hv);
    displacement += g_hat;
    ParamVector w_next = w_cur - g_hat;
    scratch.Push(v, *hv);
    w_prev = std::move(w_cur);
    w_cur = std::move(w_next);
    ++out.diagnostics.evolution_steps;
  }
  if (out.diagnostics.branch.empty()) out.diagnostics.branch = kBranchPredicted;
  out.predicted = g_hat;
  out.update = cfg.c * displacement;
  return out;
}

ParamVector BaselineDeltaWeight(const ParamVector& g_prev, double sigma,
                                std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw PreconditionError("sigma must be >= 0");
  ParamVector out = g_prev;
  if (sigma == 0.0) return out;
  Rng rng(seed);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += rng.Normal(0.0, sigma);
  return out;
}

ParamVector BaselineScaling(const ParamVector& g_local, double factor) {
  if (!(factor > 0.0)) throw PreconditionError("scaling factor must be > 0");
  return factor * g_local;
}

AceClient::AceClient(ClientId id, const ModelKind* model, Dataset data,
                     TrainSpec spec, std::uint64_t experiment_seed,
                     AttackConfig cfg)
    : HonestClient(id, model, std::move(data), spec, experiment_seed),
      cfg_(std::move(cfg)),
      buffers_(cfg_.m) {
  ValidateAttackConfig(cfg_);
}

void AceClient::Observe(const RoundView& view) {
  if (view.t <= observed_round_) return;
  observed_round_ = view.t;
  if (!view.previous_update) return;
  const ParamVector& g1 = *view.previous_update;  // g^{t-1}
  if (older_update_) {
    // dw^{t-1} = w^{t-1} - w^{t-2} = -g^{t-2}; dg^{t-1} = g^{t-1} - g^{t-2}.
    buffers_.Push(-*older_update_, g1 - *older_update_);
  }
  older_update_ = g1;
}

ParamVector AceClient::RunStrategy(Strategy s, const RoundView& view) const {
  if (s == Strategy::kDeltaWeight && view.previous_update) {
    return BaselineDeltaWeight(*view.previous_update, cfg_.delta_sigma,
                               NoiseSeed(experiment_seed_, id_, view.t));
  }
  return Train(view);
}

ClientOutput AceClient::ComputeUpdate(const RoundView& view) {
  Observe(view);
  if (cfg_.attack_rounds && !cfg_.attack_rounds->count(view.t)) {
    ClientDiagnostics d;
    d.strategy = "ace";
    d.branch = kBranchHonest;
    last_.reset();
    return {Train(view), d};
  }
  const AceContext ctx{view.t, view.global, view.previous_global,
                       view.previous_update};
  AceOutcome outcome = AceCraftUpdate(
      ctx, buffers_, cfg_, [&](Strategy s) { return RunStrategy(s, view); });
  ClientOutput result{outcome.update, outcome.diagnostics};
  last_ = std::move(outcome);
  return result;
}

DeltaWeightClient::DeltaWeightClient(ClientId id, const ModelKind* model,
                                     Dataset data, TrainSpec spec,
                                     std::uint64_t experiment_seed, double sigma)
    : HonestClient(id, model, std::move(data), spec, experiment_seed),
      sigma_(sigma) {}

ClientOutput DeltaWeightClient::ComputeUpdate(const RoundView& view) {
  ClientDiagnostics d;
  d.strategy = "delta_weight";
  if (!view.previous_update) {
    d.branch = "local_train";
    return {Train(view), d};
  }
  d.branch = "delta_weight";
  return {BaselineDeltaWeight(*view.previous_update, sigma_,
                              NoiseSeed(experiment_seed_, id_, view.t)),
          d};
}

ScalingClient::ScalingClient(ClientId id, const ModelKind* model, Dataset data,
                             TrainSpec spec, std::uint64_t experiment_seed,
                             double factor)
    : HonestClient(id, model, std::move(data), spec, experiment_seed),
      factor_(factor) {}

ClientOutput ScalingClient::ComputeUpdate(const RoundView& view) {
  ClientDiagnostics d;
  d.strategy = "scaling";
  d.branch = "scaled";
  d.amplification = factor_;
  return {BaselineScaling(Train(view), factor_), d};
}

DataAugmentClient::DataAugmentClient(ClientId id, const ModelKind* model,
                                     const Dataset& data, TrainSpec spec,
                                     std::uint64_t experiment_seed,
                                     double noise_std, int multiplier)
    : HonestClient(
          id, model,
          AugmentJitter(data, noise_std, multiplier,
                        DeriveSeed(experiment_seed,
                                   {static_cast<std::uint64_t>(Stream::kAugment),
                                    static_cast<std::uint64_t>(id)})),
          spec, experiment_seed) {}

ClientOutput DataAugmentClient::ComputeUpdate(const RoundView& view) {
  ClientDiagnostics d;
  d.strategy = "data_augment";
  d.branch = "local_train";
  return {Train(view), d};
}

}  // namespace acefl
