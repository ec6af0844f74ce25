#ifndef ACEFL_ROUND_RECORD_H_
#define ACEFL_ROUND_RECORD_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "acefl/param_vector.h"

namespace acefl {

using ClientId = int;
using Contributions = std::map<ClientId, double>;

// What a non-honest client did in one round.
struct ClientDiagnostics {
  std::string strategy;   // "ace", "delta_weight", ...
  std::string branch;     // which code path produced the update
  double hv_ratio = -1.0;  // |hv| / |v| of the first prediction; -1 if none
  double amplification = 1.0;
  int evolution_steps = 0;
  // Wall-clock seconds spent crafting; in-memory only, never serialized.
  double seconds = 0.0;

  bool operator==(const ClientDiagnostics& o) const {
    return strategy == o.strategy && branch == o.branch &&
           hv_ratio == o.hv_ratio && amplification == o.amplification &&
           evolution_steps == o.evolution_steps;
  }
};

enum class DefenseMethod {
  kMultiKrum,
  kTrimmedMean,
  kFaba,
  kSniper,
  kFoolsgold,
  kRandomGuess,
};

std::string DefenseName(DefenseMethod method);
// Accepts the names produced by DefenseName; throws FormatError otherwise.
DefenseMethod ParseDefense(const std::string& name);

struct FlagSet {
  int round = 0;
  DefenseMethod method = DefenseMethod::kRandomGuess;
  std::vector<ClientId> flagged;  // sorted ascending

  bool operator==(const FlagSet&) const = default;
};

// Everything that happened in one communication round. Rounds are numbered
// from 1. global_before - global_update is the next round's global model.
struct RoundRecord {
  int t = 0;
  ParamVector global_before;
  std::vector<ClientId> selected;  // sorted ascending
  std::map<ClientId, ParamVector> updates;
  ParamVector global_update;
  Contributions contributions;  // every client; 0 when not selected
  std::map<ClientId, double> weights;
  std::map<ClientId, ClientDiagnostics> diagnostics;
  std::vector<FlagSet> flags;

  ParamVector GlobalAfter() const { return global_before - global_update; }
  bool operator==(const RoundRecord&) const = default;
};

struct FlTranscript {
  std::vector<RoundRecord> rounds;
  ParamVector final_model;

  bool operator==(const FlTranscript&) const = default;
};

}  // namespace acefl

#endif  // ACEFL_ROUND_RECORD_H_
