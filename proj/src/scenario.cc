#include "acefl/scenario.h"

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "acefl/ace.h"
#include "acefl/contribution.h"
#include "acefl/engine.h"
#include "acefl/metrics.h"
#include "acefl/rng.h"
#include "acefl/transcript.h"

namespace acefl {
namespace {

std::uint64_t Seed(std::uint64_t root, Stream s) {
  return DeriveSeed(root, {static_cast<std::uint64_t>(s)});
}

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct RunOutput {
  FlTranscript transcript;
  std::vector<std::map<ClientId, double>> seconds;
};

RunOutput RunOnce(const ExperimentConfig& cfg, const ScenarioSetup& setup,
                  const std::vector<ClientId>& attackers, AttackType attack,
                  bool with_detectors) {
  std::vector<std::unique_ptr<ClientBehavior>> clients;
  const ModelKind* model = &setup.model;
  for (ClientId id = 0; id < cfg.num_clients; ++id) {
    Dataset local = setup.split.train.Subset(setup.partition.client_indices[id]);
    const bool malicious =
        std::find(attackers.begin(), attackers.end(), id) != attackers.end();
    const AttackType type = malicious ? attack : AttackType::kNone;
    switch (type) {
      case AttackType::kNone:
        clients.push_back(std::make_unique<HonestClient>(id, model, std::move(local),
                                                         cfg.train, cfg.seed));
        break;
      case AttackType::kAce:
        clients.push_back(std::make_unique<AceClient>(
            id, model, std::move(local), cfg.train, cfg.seed, cfg.ace));
        break;
      case AttackType::kDeltaWeight:
        clients.push_back(std::make_unique<DeltaWeightClient>(
            id, model, std::move(local), cfg.train, cfg.seed, cfg.ace.delta_sigma));
        break;
      case AttackType::kDataAugment:
        clients.push_back(std::make_unique<DataAugmentClient>(
            id, model, local, cfg.train, cfg.seed, cfg.augment_noise,
            cfg.augment_multiplier));
        break;
      case AttackType::kScaling:
        clients.push_back(std::make_unique<ScalingClient>(
            id, model, std::move(local), cfg.train, cfg.seed, cfg.scaling_factor));
        break;
    }
  }

  EngineConfig ec;
  ec.num_clients = cfg.num_clients;
  ec.rounds = cfg.rounds;
  ec.selection_fraction = cfg.selection_fraction;
  ec.seed = cfg.seed;
  ec.threads = cfg.threads;
  ec.rule = cfg.rule ? *cfg.rule
                     : DefaultAggregation(cfg.method,
                                          cfg.partition == PartitionScheme::kClass);
  auto evaluator = MakeEvaluator(cfg.method, setup.model, setup.split.validation,
                                 cfg.num_clients);

  std::vector<std::unique_ptr<Detector>> detectors;
  DefenseOptions options;
  options.k = cfg.defense_k ? *cfg.defense_k
                            : std::max<int>(1, static_cast<int>(attackers.size()));
  options.sniper_threshold = cfg.sniper_threshold;
  options.seed = Seed(cfg.seed, Stream::kDefense);
  if (with_detectors) {
    for (DefenseMethod m : cfg.defenses) detectors.push_back(MakeDetector(m, options));
  }

  FlEngine engine(ec, setup.model, setup.initial_model, std::move(clients),
                  std::move(evaluator), std::move(detectors));
  RunOutput out;
  out.transcript = engine.Run();
  out.seconds = engine.client_seconds();
  return out;
}

Timing MeasureTiming(const RunOutput& run, const std::vector<ClientId>& attackers) {
  Timing t;
  double attack_total = 0.0, honest_total = 0.0;
  for (std::size_t r = 0; r < run.transcript.rounds.size(); ++r) {
    const RoundRecord& rec = run.transcript.rounds[r];
    for (const auto& [id, sec] : run.seconds[r]) {
      const bool malicious =
          std::find(attackers.begin(), attackers.end(), id) != attackers.end();
      if (!malicious) {
        honest_total += sec;
        ++t.honest_samples;
        continue;
      }
      auto d = rec.diagnostics.find(id);
      if (d == rec.diagnostics.end()) continue;
      const std::string& b = d->second.branch;
      if (b == kBranchPredicted || b == kBranchBackoff ||
          b == kBranchFilterFallback || b == kBranchSingularFallback) {
        attack_total += sec;
        ++t.attack_samples;
      }
    }
  }
  if (t.attack_samples) t.attack_seconds = attack_total / t.attack_samples;
  if (t.honest_samples) t.honest_seconds = honest_total / t.honest_samples;
  return t;
}

}  // namespace

ScenarioSetup BuildSetup(const ExperimentConfig& cfg) {
  ScenarioSetup s;
  const Dataset all = GenerateSynthetic(cfg.classes, cfg.features, cfg.per_class,
                                        cfg.spread, Seed(cfg.seed, Stream::kData));
  s.split = SplitDataset(all, cfg.validation_fraction, cfg.test_fraction,
                         Seed(cfg.seed, Stream::kSplit));
  const int n = s.split.train.size();
  const std::uint64_t pseed = Seed(cfg.seed, Stream::kPartition);
  switch (cfg.partition) {
    case PartitionScheme::kUniform:
      s.partition = PartitionUniform(n, cfg.num_clients, pseed);
      break;
    case PartitionScheme::kPowerLaw:
      s.partition = PartitionPowerLaw(n, cfg.num_clients, cfg.power, pseed);
      break;
    case PartitionScheme::kClass:
      s.partition = PartitionByClass(s.split.train, cfg.class_schedule, pseed);
      break;
  }
  if (cfg.model == ModelChoice::kLogistic) {
    s.model = MultinomialLogistic{cfg.features, cfg.classes};
  } else {
    s.model = Mlp1Hidden{cfg.features, cfg.hidden, cfg.classes};
  }
  s.initial_model = InitialParams(s.model, Seed(cfg.seed, Stream::kInit));
  return s;
}

ScenarioResult RunScenario(const ExperimentConfig& raw) {
  ScenarioResult result;
  result.config = Resolve(raw);
  const ExperimentConfig& cfg = result.config;
  const ScenarioSetup setup = BuildSetup(cfg);
  const int n = cfg.num_clients;

  // Detectors only observe, so the pilot can skip them.
  RunOutput free_run = RunOnce(cfg, setup, {}, AttackType::kNone, false);
  const auto cs_free = ContributionScore(free_run.transcript, n);
  result.attackers = cfg.attackers.empty()
                         ? std::vector<ClientId>{LowestScoreClient(cs_free)}
                         : cfg.attackers;
  RunOutput attack_run =
      RunOnce(cfg, setup, result.attackers, cfg.attack, true);
  const auto cs_attack = ContributionScore(attack_run.transcript, n);

  const auto rank_free = Ranks(cs_free);
  const auto rank_attack = Ranks(cs_attack);
  for (ClientId id = 0; id < n; ++id) {
    result.summary.push_back({id, cs_free[id], cs_attack[id], rank_free[id],
                              rank_attack[id], rank_attack[id] - rank_free[id]});
  }
  const Dataset& test = setup.split.test;
  result.acc_initial = AccuracyOn(setup.model, setup.initial_model, test);
  result.acc_free = AccuracyOn(setup.model, free_run.transcript.final_model, test);
  result.acc_attack = AccuracyOn(setup.model, attack_run.transcript.final_model, test);

  std::map<int, std::set<ClientId>> truth;
  for (const auto& r : attack_run.transcript.rounds) {
    auto& s = truth[r.t];
    for (ClientId id : result.attackers) {
      if (r.updates.count(id)) s.insert(id);
    }
  }
  for (std::size_t d = 0; d < cfg.defenses.size(); ++d) {
    std::vector<FlagSet> flags;
    for (const auto& r : attack_run.transcript.rounds) flags.push_back(r.flags.at(d));
    result.detection.push_back(DetectionMetrics(cfg.defenses[d], flags, truth));
  }
  result.timing = MeasureTiming(attack_run, result.attackers);
  result.free_run = std::move(free_run.transcript);
  result.attack_run = std::move(attack_run.transcript);
  return result;
}

void WriteSummaryCsv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "client,cs_free,cs_attack,rank_free,rank_attack,delta_r\n";
  for (const auto& r : rows) {
    out << r.client << ',' << Num(r.cs_free) << ',' << Num(r.cs_attack) << ','
        << r.rank_free << ',' << r.rank_attack << ',' << r.delta_r << '\n';
  }
}

std::vector<SummaryRow> ReadSummaryCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      line != "client,cs_free,cs_attack,rank_free,rank_attack,delta_r") {
    throw FormatError("summary.csv: unexpected header");
  }
  std::vector<SummaryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    SummaryRow r;
    char tail = 0;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf,%d,%d,%d%c", &r.client, &r.cs_free,
                    &r.cs_attack, &r.rank_free, &r.rank_attack, &r.delta_r,
                    &tail) != 6) {
      throw FormatError("summary.csv: bad row '" + line + "'");
    }
    rows.push_back(r);
  }
  return rows;
}

void WriteScenarioOutputs(const ScenarioResult& result,
                          const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (dir / name).string());
    return f;
  };
  const Json config = ConfigToJson(result.config);
  auto transcript_meta = [&](const char* run) {
    Json m;
    m["run"] = run;
    m["seed"] = result.config.seed;
    m["attackers"] = result.attackers;
    m["config"] = config;
    return m;
  };
  {
    auto f = open("transcript.jsonl");
    WriteTranscript(f, transcript_meta("attack"), result.attack_run);
  }
  {
    auto f = open("transcript_free.jsonl");
    WriteTranscript(f, transcript_meta("attack_free"), result.free_run);
  }
  {
    auto f = open("summary.csv");
    WriteSummaryCsv(f, result.summary);
  }
  {
    auto f = open("detection.csv");
    WriteDetectionCsv(f, result.detection);
  }
  {
    auto f = open("flags.jsonl");
    for (const auto& d : result.detection) WriteFlagsJsonl(f, d.rounds);
  }
  {
    auto f = open("accuracy.csv");
    f << "scenario,accuracy\n"
      << "untrained," << Num(result.acc_initial) << '\n'
      << "attack_free," << Num(result.acc_free) << '\n'
      << "attack," << Num(result.acc_attack) << '\n';
  }
  {
    auto f = open("meta.json");
    Json meta;
    meta["version"] = kCodeVersion;
    meta["method"] = MethodName(result.config.method);
    meta["attack"] = AttackTypeName(result.config.attack);
    meta["attackers"] = result.attackers;
    meta["config"] = config;
    f << meta.dump(2) << '\n';
  }
}

}  // namespace acefl
