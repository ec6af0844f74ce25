#include "acefl/transcript.h"

#include <string>

#include "acefl/error.h"

namespace acefl {
namespace {

Json ToJson(double d) { return d; }

Json ToJson(const ClientDiagnostics& d) {
  return Json{{"strategy", d.strategy},
              {"branch", d.branch},
              {"hv_ratio", d.hv_ratio},
              {"amplification", d.amplification},
              {"evolution_steps", d.evolution_steps}};
}

template <class T>
Json KeyedMap(const std::map<ClientId, T>& m) {
  Json out = Json::object();
  for (const auto& [id, v] : m) out[std::to_string(id)] = ToJson(v);
  return out;
}

ParamVector VectorFromJson(const Json& j) {
  return ParamVector(j.get<std::vector<double>>());
}

ClientId IdFromKey(const std::string& key) {
  std::size_t used = 0;
  const int id = std::stoi(key, &used);
  if (used != key.size()) throw FormatError("bad client key '" + key + "'");
  return id;
}

}  // namespace

Json ToJson(const ParamVector& v) { return v.values(); }

Json ToJson(const FlagSet& f) {
  return Json{{"round", f.round},
              {"method", DefenseName(f.method)},
              {"flagged", f.flagged}};
}

Json ToJson(const RoundRecord& r) {
  Json j;
  j["type"] = "round";
  j["t"] = r.t;
  j["global_before"] = ToJson(r.global_before);
  j["selected"] = r.selected;
  j["updates"] = KeyedMap(r.updates);
  j["global_update"] = ToJson(r.global_update);
  j["contributions"] = KeyedMap(r.contributions);
  j["weights"] = KeyedMap(r.weights);
  j["diagnostics"] = KeyedMap(r.diagnostics);
  Json flags = Json::array();
  for (const auto& f : r.flags) flags.push_back(ToJson(f));
  j["flags"] = std::move(flags);
  return j;
}

FlagSet FlagSetFromJson(const Json& j) {
  FlagSet f;
  f.round = j.at("round").get<int>();
  f.method = ParseDefense(j.at("method").get<std::string>());
  f.flagged = j.at("flagged").get<std::vector<ClientId>>();
  return f;
}

RoundRecord RoundFromJson(const Json& j) {
  RoundRecord r;
  r.t = j.at("t").get<int>();
  r.global_before = VectorFromJson(j.at("global_before"));
  r.selected = j.at("selected").get<std::vector<ClientId>>();
  for (const auto& [k, v] : j.at("updates").items()) {
    r.updates.emplace(IdFromKey(k), VectorFromJson(v));
  }
  r.global_update = VectorFromJson(j.at("global_update"));
  for (const auto& [k, v] : j.at("contributions").items()) {
    r.contributions[IdFromKey(k)] = v.get<double>();
  }
  for (const auto& [k, v] : j.at("weights").items()) {
    r.weights[IdFromKey(k)] = v.get<double>();
  }
  for (const auto& [k, v] : j.at("diagnostics").items()) {
    ClientDiagnostics d;
    d.strategy = v.at("strategy").get<std::string>();
    d.branch = v.at("branch").get<std::string>();
    d.hv_ratio = v.at("hv_ratio").get<double>();
    d.amplification = v.at("amplification").get<double>();
    d.evolution_steps = v.at("evolution_steps").get<int>();
    r.diagnostics[IdFromKey(k)] = d;
  }
  for (const auto& f : j.at("flags")) r.flags.push_back(FlagSetFromJson(f));
  return r;
}

void WriteTranscript(std::ostream& out, const Json& meta,
                     const FlTranscript& transcript) {
  Json head;
  head["type"] = "meta";
  head["v"] = kTranscriptVersion;
  for (const auto& [k, v] : meta.items()) head[k] = v;
  out << head.dump() << '\n';
  for (const auto& r : transcript.rounds) out << ToJson(r).dump() << '\n';
  Json tail{{"type", "final"}, {"final_model", ToJson(transcript.final_model)}};
  out << tail.dump() << '\n';
}

LoadedTranscript ReadTranscript(std::istream& in) {
  LoadedTranscript out;
  std::string line;
  int line_no = 0;
  bool saw_meta = false, saw_final = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      Json j = Json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (type == "meta") {
        if (j.at("v").get<int>() != kTranscriptVersion) {
          throw FormatError("unsupported transcript version");
        }
        j.erase("type");
        j.erase("v");
        out.meta = std::move(j);
        saw_meta = true;
      } else if (type == "round") {
        out.transcript.rounds.push_back(RoundFromJson(j));
      } else if (type == "final") {
        out.transcript.final_model = VectorFromJson(j.at("final_model"));
        saw_final = true;
      } else {
        throw FormatError("unknown record type '" + type + "'");
      }
    } catch (const Json::exception& e) {
      throw FormatError("transcript line " + std::to_string(line_no) + ": " +
                        e.what());
    } catch (const std::invalid_argument&) {
      throw FormatError("transcript line " + std::to_string(line_no) +
                        ": bad client key");
    }
  }
  if (!saw_meta || !saw_final) throw FormatError("transcript is truncated");
  return out;
}

void WriteFlagsJsonl(std::ostream& out, const std::vector<FlagSet>& flags) {
  for (const auto& f : flags) out << ToJson(f).dump() << '\n';
}

std::vector<FlagSet> ReadFlagsJsonl(std::istream& in) {
  std::vector<FlagSet> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(FlagSetFromJson(Json::parse(line)));
    } catch (const Json::exception& e) {
      throw FormatError(std::string("flags line: ") + e.what());
    }
  }
  return out;
}

}  // namespace acefl
