#include "acefl/engine.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <future>
#include <thread>

#include "acefl/error.h"
#include "acefl/rng.h"

namespace acefl {

std::vector<ClientId> SelectClients(int num_clients, double fraction, int round,
                                    std::uint64_t seed) {
  if (num_clients < 1) throw PreconditionError("need at least one client");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw PreconditionError("selection fraction must lie in (0, 1]");
  }
  const int k = std::clamp(
      static_cast<int>(std::lround(fraction * num_clients)), 1, num_clients);
  Rng rng(DeriveSeed(seed, {static_cast<std::uint64_t>(Stream::kSelect),
                            static_cast<std::uint64_t>(round)}));
  return SampleWithoutReplacement(num_clients, k, rng);
}

HonestClient::HonestClient(ClientId id, const ModelKind* model, Dataset data,
                           TrainSpec spec, std::uint64_t experiment_seed)
    : id_(id),
      model_(model),
      data_(std::move(data)),
      spec_(spec),
      experiment_seed_(experiment_seed),
      class_count_(data_.DistinctClassCount()) {}

ParamVector HonestClient::Train(const RoundView& view) const {
  TrainSpec spec = spec_;
  spec.seed = DeriveSeed(experiment_seed_,
                         {static_cast<std::uint64_t>(Stream::kTrain),
                          static_cast<std::uint64_t>(id_),
                          static_cast<std::uint64_t>(view.t)});
  return LocalTrain(*model_, *view.global, data_, spec, view.t - 1);
}

ClientOutput HonestClient::ComputeUpdate(const RoundView& view) {
  return {Train(view), std::nullopt};
}

FlEngine::FlEngine(EngineConfig config, ModelKind model,
                   ParamVector initial_model,
                   std::vector<std::unique_ptr<ClientBehavior>> clients,
                   std::unique_ptr<ContributionEvaluator> evaluator,
                   std::vector<std::unique_ptr<Detector>> detectors)
    : config_(config),
      model_(std::move(model)),
      clients_(std::move(clients)),
      evaluator_(std::move(evaluator)),
      detectors_(std::move(detectors)),
      global_(std::move(initial_model)) {
  if (static_cast<int>(clients_.size()) != config_.num_clients) {
    throw PreconditionError("engine given " + std::to_string(clients_.size()) +
                            " clients, config says " +
                            std::to_string(config_.num_clients));
  }
  if (config_.rounds < 1) throw PreconditionError("rounds must be >= 1");
  if (static_cast<int>(global_.size()) != ParamDim(model_)) {
    throw DimensionError("initial model does not match model kind");
  }
}

RoundRecord FlEngine::RunRound() {
  try {
    return RunRoundUnchecked();
  } catch (const std::exception& e) {
    throw Error("round " + std::to_string(t_) + ": " + e.what());
  }
}

RoundRecord FlEngine::RunRoundUnchecked() {
  RoundRecord record;
  record.t = t_;
  record.global_before = global_;

  // Step I: broadcast.
  RoundView view;
  view.t = t_;
  view.global = &global_;
  view.previous_global = previous_global_ ? &*previous_global_ : nullptr;
  view.previous_update = previous_update_ ? &*previous_update_ : nullptr;
  for (auto& client : clients_) client->Observe(view);

  record.selected = SelectClients(config_.num_clients,
                                  config_.selection_fraction, t_, config_.seed);

  // Step II: local updates. Each task writes only its own slot.
  std::vector<ClientOutput> outputs(record.selected.size());
  std::vector<double> seconds(record.selected.size(), 0.0);
  auto work = [&](std::size_t slot) {
    const auto start = std::chrono::steady_clock::now();
    outputs[slot] = clients_[record.selected[slot]]->ComputeUpdate(view);
    seconds[slot] = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    if (outputs[slot].diagnostics) {
      outputs[slot].diagnostics->seconds = seconds[slot];
    }
  };
  if (config_.threads <= 1) {
    for (std::size_t s = 0; s < outputs.size(); ++s) work(s);
  } else {
    std::vector<std::future<void>> pending;
    std::size_t next = 0;
    while (next < outputs.size() || !pending.empty()) {
      while (next < outputs.size() &&
             static_cast<int>(pending.size()) < config_.threads) {
        pending.push_back(std::async(std::launch::async, work, next++));
      }
      pending.front().get();
      pending.erase(pending.begin());
    }
  }

  auto& round_seconds = client_seconds_.emplace_back();
  for (std::size_t s = 0; s < seconds.size(); ++s) {
    round_seconds[record.selected[s]] = seconds[s];
  }

  AggregationMetadata metadata;
  for (std::size_t s = 0; s < outputs.size(); ++s) {
    const ClientId id = record.selected[s];
    if (outputs[s].update.size() != global_.size()) {
      throw DimensionError("client " + std::to_string(id) +
                           " returned an update of wrong length");
    }
    if (!AllFinite(outputs[s].update)) {
      throw NumericError("client " + std::to_string(id) +
                         " returned a non-finite update");
    }
    record.updates[id] = std::move(outputs[s].update);
    if (outputs[s].diagnostics) record.diagnostics[id] = *outputs[s].diagnostics;
    metadata.data_sizes[id] = clients_[id]->ReportedDataSize();
    metadata.class_counts[id] = clients_[id]->ClassCount();
  }
  if (evaluator_ != nullptr && evaluator_->reputations() != nullptr) {
    metadata.reputations = *evaluator_->reputations();
  }

  // Step III: aggregation, then server-side bookkeeping.
  AggregationResult agg = Aggregate(config_.rule, record.updates, metadata);
  record.global_update = std::move(agg.global_update);
  record.weights = std::move(agg.weights);

  for (ClientId id = 0; id < config_.num_clients; ++id) {
    record.contributions[id] = 0.0;
  }
  if (evaluator_ != nullptr) {
    for (const auto& [id, e] : evaluator_->Evaluate(record)) {
      record.contributions[id] = e;
    }
  }
  for (auto& detector : detectors_) record.flags.push_back(detector->Flag(record));

  previous_global_ = global_;
  previous_update_ = record.global_update;
  global_ = record.GlobalAfter();
  ++t_;
  return record;
}

FlTranscript FlEngine::Run() {
  FlTranscript transcript;
  while (t_ <= config_.rounds) transcript.rounds.push_back(RunRound());
  transcript.final_model = global_;
  return transcript;
}

}  // namespace acefl
