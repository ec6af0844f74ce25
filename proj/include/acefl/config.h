#ifndef ACEFL_CONFIG_H_
#define ACEFL_CONFIG_H_

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "acefl/ace.h"
#include "acefl/contribution.h"
#include "acefl/error.h"
#include "acefl/round_record.h"
#include "acefl/training.h"
#include "json.hpp"

namespace acefl {

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class PartitionScheme { kUniform, kPowerLaw, kClass };
enum class AttackType { kNone, kAce, kDeltaWeight, kDataAugment, kScaling };
enum class ModelChoice { kLogistic, kMlp };

std::string AttackTypeName(AttackType type);

struct ExperimentConfig {
  // [experiment]
  std::uint64_t seed = 1;
  int num_clients = 10;
  int rounds = 60;
  int threads = 1;

  // [data]
  int classes = 10;
  int features = 20;
  int per_class = 200;
  double spread = 1.0;
  double validation_fraction = 0.2;
  double test_fraction = 0.1;

  // [partition]
  PartitionScheme partition = PartitionScheme::kUniform;
  double power = 2.0;
  std::vector<int> class_schedule;  // empty: 6,6,7,7,...,10,10 scaled to N

  // [model]
  ModelChoice model = ModelChoice::kLogistic;
  int hidden = 16;

  // [train]
  TrainSpec train;

  // [evaluation]
  EvalMethod method = Rffl{};

  // [aggregation]; unset rule means the method's own rule.
  std::optional<AggregationRule> rule;

  // [selection]
  double selection_fraction = 1.0;

  // [attack]
  AttackType attack = AttackType::kAce;
  std::vector<ClientId> attackers;  // empty: lowest-CS client of the pilot
  AttackConfig ace;
  bool evolution_rounds_set = false;  // else 1 for cosine, 2 for validation
  double scaling_factor = 2.0;
  double augment_noise = 0.1;
  int augment_multiplier = 2;

  // [defense]
  std::vector<DefenseMethod> defenses;
  std::optional<int> defense_k;  // default: number of attackers
  std::optional<double> sniper_threshold;
};

// Parses `key = value` lines grouped under `[section]` headers. `#` and `;`
// start comments. Unknown sections or keys and malformed values throw
// ConfigError naming the line.
ExperimentConfig ParseConfig(std::istream& in);
ExperimentConfig LoadConfig(const std::string& path);

// Fills defaults that depend on other fields and checks cross-field
// constraints; throws ConfigError.
ExperimentConfig Resolve(ExperimentConfig cfg);

// Canonical echo of every field, used in meta.json and the transcript header.
nlohmann::ordered_json ConfigToJson(const ExperimentConfig& cfg);

// Default CLA schedule: the 6,6,7,7,8,8,9,9,10,10 pattern for N = 10 and 10
// classes, otherwise climbing evenly from 60% of C to C.
std::vector<int> DefaultClassSchedule(int num_clients, int classes);

}  // namespace acefl

#endif  // ACEFL_CONFIG_H_
