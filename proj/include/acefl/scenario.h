#ifndef ACEFL_SCENARIO_H_
#define ACEFL_SCENARIO_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "acefl/config.h"
#include "acefl/dataset.h"
#include "acefl/defenses.h"
#include "acefl/model.h"
#include "acefl/partition.h"
#include "acefl/round_record.h"

namespace acefl {

inline constexpr const char* kCodeVersion = "1.0.0";

// Data, partition and model shared by the paired runs of one config.
struct ScenarioSetup {
  DataSplit split;
  Partition partition;
  ModelKind model;
  ParamVector initial_model;
};

ScenarioSetup BuildSetup(const ExperimentConfig& cfg);

struct SummaryRow {
  ClientId client = 0;
  double cs_free = 0.0;
  double cs_attack = 0.0;
  int rank_free = 0;
  int rank_attack = 0;
  int delta_r = 0;

  bool operator==(const SummaryRow&) const = default;
};

struct Timing {
  // Mean seconds per round: attackers over rounds where the predictor ran,
  // honest clients over every round they trained.
  double attack_seconds = 0.0;
  double honest_seconds = 0.0;
  int attack_samples = 0;
  int honest_samples = 0;
};

struct ScenarioResult {
  ExperimentConfig config;  // resolved
  std::vector<ClientId> attackers;
  FlTranscript free_run;
  FlTranscript attack_run;
  std::vector<SummaryRow> summary;
  double acc_free = 0.0;
  double acc_attack = 0.0;
  double acc_initial = 0.0;
  std::vector<DetectionReport> detection;
  Timing timing;  // never written to disk

  double cs_free(ClientId id) const { return summary.at(id).cs_free; }
  double cs_attack(ClientId id) const { return summary.at(id).cs_attack; }
  int delta_r(ClientId id) const { return summary.at(id).delta_r; }
};

// Runs the attack-free pilot, settles the attacker set (lowest-CS client
// when none is configured), then the attacked run with identical honest
// seeds. `cfg` is resolved first.
ScenarioResult RunScenario(const ExperimentConfig& cfg);

// Writes transcript.jsonl, transcript_free.jsonl, summary.csv, detection.csv,
// flags.jsonl, accuracy.csv and meta.json. Creates `dir` if needed.
void WriteScenarioOutputs(const ScenarioResult& result,
                          const std::filesystem::path& dir);

void WriteSummaryCsv(std::ostream& out, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> ReadSummaryCsv(std::istream& in);

}  // namespace acefl

#endif  // ACEFL_SCENARIO_H_
