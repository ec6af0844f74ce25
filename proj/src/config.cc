#include "acefl/config.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "acefl/aggregation.h"

namespace acefl {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

long long ToInt(const std::string& s) {
  std::size_t used = 0;
  const long long v = std::stoll(s, &used);
  if (used != s.size()) throw std::invalid_argument(s);
  return v;
}

double ToDouble(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
  return v;
}

std::vector<int> ToIntList(const std::string& s) {
  std::vector<int> out;
  for (const auto& item : SplitList(s)) out.push_back(static_cast<int>(ToInt(item)));
  return out;
}

// "all", "a-b" ranges and single rounds, comma separated.
std::optional<std::set<int>> ToRoundSet(const std::string& s) {
  if (Lower(s) == "all") return std::nullopt;
  std::set<int> out;
  for (const auto& item : SplitList(s)) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      out.insert(static_cast<int>(ToInt(item)));
    } else {
      const int lo = static_cast<int>(ToInt(Trim(item.substr(0, dash))));
      const int hi = static_cast<int>(ToInt(Trim(item.substr(dash + 1))));
      if (hi < lo) throw std::invalid_argument(item);
      for (int t = lo; t <= hi; ++t) out.insert(t);
    }
  }
  return out;
}

double GetAlpha(const EvalMethod& m) {
  if (auto* g = std::get_if<Gdr>(&m)) return g->alpha;
  if (auto* r = std::get_if<Rffl>(&m)) return r->alpha;
  return 0.95;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, std::map<std::string, Setter>>& Setters() {
  static const auto* table = new std::map<std::string, std::map<std::string, Setter>>{
      {"experiment",
       {{"seed", [](auto& c, const auto& v) { c.seed = static_cast<std::uint64_t>(ToInt(v)); }},
        {"num_clients", [](auto& c, const auto& v) { c.num_clients = static_cast<int>(ToInt(v)); }},
        {"rounds", [](auto& c, const auto& v) { c.rounds = static_cast<int>(ToInt(v)); }},
        {"threads", [](auto& c, const auto& v) { c.threads = static_cast<int>(ToInt(v)); }}}},
      {"data",
       {{"classes", [](auto& c, const auto& v) { c.classes = static_cast<int>(ToInt(v)); }},
        {"features", [](auto& c, const auto& v) { c.features = static_cast<int>(ToInt(v)); }},
        {"per_class", [](auto& c, const auto& v) { c.per_class = static_cast<int>(ToInt(v)); }},
        {"spread", [](auto& c, const auto& v) { c.spread = ToDouble(v); }},
        {"validation_fraction", [](auto& c, const auto& v) { c.validation_fraction = ToDouble(v); }},
        {"test_fraction", [](auto& c, const auto& v) { c.test_fraction = ToDouble(v); }}}},
      {"partition",
       {{"scheme",
         [](auto& c, const auto& v) {
           const std::string s = Lower(v);
           if (s == "uni") c.partition = PartitionScheme::kUniform;
           else if (s == "pow") c.partition = PartitionScheme::kPowerLaw;
           else if (s == "cla") c.partition = PartitionScheme::kClass;
           else throw std::invalid_argument(v);
         }},
        {"power", [](auto& c, const auto& v) { c.power = ToDouble(v); }},
        {"classes", [](auto& c, const auto& v) { c.class_schedule = ToIntList(v); }}}},
      {"model",
       {{"kind",
         [](auto& c, const auto& v) {
           const std::string s = Lower(v);
           if (s == "logistic") c.model = ModelChoice::kLogistic;
           else if (s == "mlp") c.model = ModelChoice::kMlp;
           else throw std::invalid_argument(v);
         }},
        {"hidden", [](auto& c, const auto& v) { c.hidden = static_cast<int>(ToInt(v)); }}}},
      {"train",
       {{"epochs", [](auto& c, const auto& v) { c.train.epochs = static_cast<int>(ToInt(v)); }},
        {"learning_rate", [](auto& c, const auto& v) { c.train.learning_rate = ToDouble(v); }},
        {"decay", [](auto& c, const auto& v) { c.train.decay = ToDouble(v); }},
        {"batch_size", [](auto& c, const auto& v) { c.train.batch_size = static_cast<int>(ToInt(v)); }}}},
      {"evaluation",
       {{"method",
         [](auto& c, const auto& v) {
           const std::string s = Lower(v);
           const double alpha = GetAlpha(c.method);
           const double eps = std::holds_alternative<Gdr>(c.method)
                                  ? std::get<Gdr>(c.method).epsilon : 1.0;
           if (s == "fedsv") c.method = FedSv{};
           else if (s == "loo") c.method = Loo{};
           else if (s == "cffl") c.method = Cffl{};
           else if (s == "gdr") c.method = Gdr{eps, alpha};
           else if (s == "rffl") c.method = Rffl{alpha};
           else throw std::invalid_argument(v);
         }},
        {"alpha",
         [](auto& c, const auto& v) {
           const double a = ToDouble(v);
           if (auto* g = std::get_if<Gdr>(&c.method)) g->alpha = a;
           else if (auto* r = std::get_if<Rffl>(&c.method)) r->alpha = a;
           else throw std::invalid_argument("alpha only applies to gdr/rffl");
         }},
        {"epsilon",
         [](auto& c, const auto& v) {
           auto* g = std::get_if<Gdr>(&c.method);
           if (!g) throw std::invalid_argument("epsilon only applies to gdr");
           g->epsilon = ToDouble(v);
         }}}},
      {"aggregation",
       {{"rule",
         [](auto& c, const auto& v) {
           const std::string s = Lower(v);
           if (s == "default") c.rule.reset();
           else if (s == "fedavg") c.rule = FedAvgBySize{};
           else if (s == "class_weighted") c.rule = CffLClassWeighted{true};
           else if (s == "reputation") c.rule = ReputationWeighted{};
           else throw std::invalid_argument(v);
         }}}},
      {"selection",
       {{"fraction", [](auto& c, const auto& v) { c.selection_fraction = ToDouble(v); }}}},
      {"attack",
       {{"type",
         [](auto& c, const auto& v) {
           const std::string s = Lower(v);
           if (s == "none") c.attack = AttackType::kNone;
           else if (s == "ace") c.attack = AttackType::kAce;
           else if (s == "delta_weight") c.attack = AttackType::kDeltaWeight;
           else if (s == "data_augment") c.attack = AttackType::kDataAugment;
           else if (s == "scaling") c.attack = AttackType::kScaling;
           else throw std::invalid_argument(v);
         }},
        {"attackers",
         [](auto& c, const auto& v) {
           c.attackers = Lower(v) == "auto" ? std::vector<int>{} : ToIntList(v);
         }},
        {"m", [](auto& c, const auto& v) { c.ace.m = static_cast<int>(ToInt(v)); }},
        {"l", [](auto& c, const auto& v) { c.ace.l = ToDouble(v); }},
        {"c", [](auto& c, const auto& v) { c.ace.c = ToDouble(v); }},
        {"evolution_rounds",
         [](auto& c, const auto& v) {
           if (Lower(v) == "auto") {
             c.evolution_rounds_set = false;
           } else {
             c.ace.evolution_rounds = static_cast<int>(ToInt(v));
             c.evolution_rounds_set = true;
           }
         }},
        {"preliminary_strategy",
         [](auto& c, const auto& v) { c.ace.preliminary_strategy = ParseStrategy(Lower(v)); }},
        {"fallback_strategy",
         [](auto& c, const auto& v) { c.ace.filter_fallback_strategy = ParseStrategy(Lower(v)); }},
        {"delta_sigma", [](auto& c, const auto& v) { c.ace.delta_sigma = ToDouble(v); }},
        {"attack_rounds", [](auto& c, const auto& v) { c.ace.attack_rounds = ToRoundSet(v); }},
        {"scaling_factor", [](auto& c, const auto& v) { c.scaling_factor = ToDouble(v); }},
        {"augment_noise", [](auto& c, const auto& v) { c.augment_noise = ToDouble(v); }},
        {"augment_multiplier",
         [](auto& c, const auto& v) { c.augment_multiplier = static_cast<int>(ToInt(v)); }}}},
      {"defense",
       {{"methods",
         [](auto& c, const auto& v) {
           c.defenses.clear();
           const std::string s = Lower(v);
           if (s == "none") return;
           if (s == "all") {
             c.defenses = {DefenseMethod::kMultiKrum, DefenseMethod::kTrimmedMean,
                           DefenseMethod::kFaba, DefenseMethod::kSniper,
                           DefenseMethod::kFoolsgold, DefenseMethod::kRandomGuess};
             return;
           }
           for (const auto& item : SplitList(s)) c.defenses.push_back(ParseDefense(item));
         }},
        {"k",
         [](auto& c, const auto& v) {
           if (Lower(v) == "auto") c.defense_k.reset();
           else c.defense_k = static_cast<int>(ToInt(v));
         }},
        {"sniper_threshold",
         [](auto& c, const auto& v) {
           if (Lower(v) == "median") c.sniper_threshold.reset();
           else c.sniper_threshold = ToDouble(v);
         }}}},
  };
  return *table;
}

void Require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

std::string AttackTypeName(AttackType type) {
  switch (type) {
    case AttackType::kNone: return "none";
    case AttackType::kAce: return "ace";
    case AttackType::kDeltaWeight: return "delta_weight";
    case AttackType::kDataAugment: return "data_augment";
    case AttackType::kScaling: return "scaling";
  }
  return "none";
}

ExperimentConfig ParseConfig(std::istream& in) {
  ExperimentConfig cfg;
  std::string section;
  std::string raw;
  int line_no = 0;
  const auto& setters = Setters();
  while (std::getline(in, raw)) {
    ++line_no;
    const auto comment = raw.find_first_of("#;");
    std::string line = Trim(comment == std::string::npos ? raw : raw.substr(0, comment));
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      Require(line.back() == ']', where + "unterminated section header");
      section = Lower(Trim(line.substr(1, line.size() - 2)));
      Require(setters.count(section) > 0, where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    Require(eq != std::string::npos, where + "expected key = value");
    Require(!section.empty(), where + "key outside any section");
    const std::string key = Lower(Trim(line.substr(0, eq)));
    const std::string value = Trim(line.substr(eq + 1));
    const auto& keys = setters.at(section);
    auto it = keys.find(key);
    Require(it != keys.end(), where + "unknown key '" + key + "' in [" + section + "]");
    try {
      it->second(cfg, value);
    } catch (const std::exception& e) {
      throw ConfigError(where + "bad value for " + key + ": '" + value + "' (" +
                        e.what() + ")");
    }
  }
  return cfg;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return ParseConfig(in);
}

std::vector<int> DefaultClassSchedule(int num_clients, int classes) {
  std::vector<int> out;
  const int low = std::max(1, static_cast<int>(std::lround(0.6 * classes)));
  const int pairs = (num_clients + 1) / 2;
  for (int i = 0; i < num_clients; ++i) {
    const int step = i / 2;
    const double frac = pairs > 1 ? double(step) / (pairs - 1) : 1.0;
    out.push_back(low + static_cast<int>(std::lround(frac * (classes - low))));
  }
  return out;
}

ExperimentConfig Resolve(ExperimentConfig cfg) {
  Require(cfg.num_clients >= 1, "num_clients must be >= 1");
  Require(cfg.rounds >= 1, "rounds must be >= 1");
  Require(cfg.threads >= 1, "threads must be >= 1");
  Require(cfg.classes >= 2 && cfg.features >= 2 && cfg.per_class >= 1,
          "data needs classes >= 2, features >= 2, per_class >= 1");
  Require(cfg.spread >= 0.0, "spread must be >= 0");
  Require(cfg.validation_fraction > 0.0 && cfg.test_fraction > 0.0 &&
              cfg.validation_fraction + cfg.test_fraction < 1.0,
          "validation/test fractions must be positive and sum below 1");
  Require(cfg.selection_fraction > 0.0 && cfg.selection_fraction <= 1.0,
          "selection fraction must lie in (0, 1]");
  Require(cfg.hidden >= 1, "hidden must be >= 1");
  try {
    ValidateTrainSpec(cfg.train);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (cfg.partition == PartitionScheme::kClass) {
    if (cfg.class_schedule.empty()) {
      cfg.class_schedule = DefaultClassSchedule(cfg.num_clients, cfg.classes);
    }
    Require(static_cast<int>(cfg.class_schedule.size()) == cfg.num_clients,
            "class schedule length must equal num_clients");
    for (int k : cfg.class_schedule) {
      Require(k >= 1 && k <= cfg.classes, "class schedule entries must be in [1, C]");
    }
  }
  if (cfg.partition == PartitionScheme::kPowerLaw) {
    Require(cfg.power > 1.0, "power-law shape must be > 1");
  }
  if (auto* g = std::get_if<Gdr>(&cfg.method)) {
    Require(g->epsilon > 0.0 && g->alpha > 0.0 && g->alpha < 1.0,
            "gdr needs epsilon > 0 and alpha in (0, 1)");
  }
  if (auto* r = std::get_if<Rffl>(&cfg.method)) {
    Require(r->alpha > 0.0 && r->alpha < 1.0, "rffl needs alpha in (0, 1)");
  }
  if (!cfg.evolution_rounds_set) {
    const bool cosine = std::holds_alternative<Gdr>(cfg.method) ||
                        std::holds_alternative<Rffl>(cfg.method);
    cfg.ace.evolution_rounds = cosine ? 1 : 2;
  }
  try {
    ValidateAttackConfig(cfg.ace);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  std::sort(cfg.attackers.begin(), cfg.attackers.end());
  Require(std::adjacent_find(cfg.attackers.begin(), cfg.attackers.end()) ==
              cfg.attackers.end(),
          "duplicate attacker id");
  for (ClientId id : cfg.attackers) {
    Require(id >= 0 && id < cfg.num_clients, "attacker id out of range");
  }
  Require(static_cast<int>(cfg.attackers.size()) < cfg.num_clients,
          "at least one client must be honest");
  Require(cfg.scaling_factor > 0.0, "scaling factor must be > 0");
  Require(cfg.augment_noise >= 0.0 && cfg.augment_multiplier >= 1,
          "augment noise >= 0 and multiplier >= 1 required");
  if (cfg.defense_k) Require(*cfg.defense_k >= 0, "defense k must be >= 0");
  if (cfg.sniper_threshold) Require(*cfg.sniper_threshold > 0.0, "sniper threshold must be > 0");
  return cfg;
}

nlohmann::ordered_json ConfigToJson(const ExperimentConfig& cfg) {
  using J = nlohmann::ordered_json;
  static const char* kSchemes[] = {"uni", "pow", "cla"};
  J j;
  j["experiment"] = {{"seed", cfg.seed},
                     {"num_clients", cfg.num_clients},
                     {"rounds", cfg.rounds}};
  j["data"] = {{"classes", cfg.classes},
               {"features", cfg.features},
               {"per_class", cfg.per_class},
               {"spread", cfg.spread},
               {"validation_fraction", cfg.validation_fraction},
               {"test_fraction", cfg.test_fraction}};
  j["partition"] = {{"scheme", kSchemes[static_cast<int>(cfg.partition)]},
                    {"power", cfg.power},
                    {"classes", cfg.class_schedule}};
  j["model"] = {{"kind", cfg.model == ModelChoice::kLogistic ? "logistic" : "mlp"},
                {"hidden", cfg.hidden}};
  j["train"] = {{"epochs", cfg.train.epochs},
                {"learning_rate", cfg.train.learning_rate},
                {"decay", cfg.train.decay},
                {"batch_size", cfg.train.batch_size}};
  J eval = {{"method", MethodName(cfg.method)}};
  if (auto* g = std::get_if<Gdr>(&cfg.method)) {
    eval["epsilon"] = g->epsilon;
    eval["alpha"] = g->alpha;
  }
  if (auto* r = std::get_if<Rffl>(&cfg.method)) eval["alpha"] = r->alpha;
  j["evaluation"] = eval;
  j["aggregation"] = {{"rule", cfg.rule ? RuleName(*cfg.rule) : "default"}};
  j["selection"] = {{"fraction", cfg.selection_fraction}};
  J attack = {{"type", AttackTypeName(cfg.attack)},
              {"attackers", cfg.attackers},
              {"m", cfg.ace.m},
              {"l", cfg.ace.l},
              {"c", cfg.ace.c},
              {"evolution_rounds", cfg.ace.evolution_rounds},
              {"preliminary_strategy", StrategyName(cfg.ace.preliminary_strategy)},
              {"fallback_strategy", StrategyName(cfg.ace.filter_fallback_strategy)},
              {"delta_sigma", cfg.ace.delta_sigma},
              {"scaling_factor", cfg.scaling_factor},
              {"augment_noise", cfg.augment_noise},
              {"augment_multiplier", cfg.augment_multiplier}};
  if (cfg.ace.attack_rounds) {
    attack["attack_rounds"] = std::vector<int>(cfg.ace.attack_rounds->begin(),
                                               cfg.ace.attack_rounds->end());
  } else {
    attack["attack_rounds"] = "all";
  }
  j["attack"] = attack;
  std::vector<std::string> defenses;
  for (auto d : cfg.defenses) defenses.push_back(DefenseName(d));
  J defense = {{"methods", defenses}};
  defense["k"] = cfg.defense_k ? J(*cfg.defense_k) : J("auto");
  defense["sniper_threshold"] =
      cfg.sniper_threshold ? J(*cfg.sniper_threshold) : J("median");
  j["defense"] = defense;
  return j;
}

}  // namespace acefl
