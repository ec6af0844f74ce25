#ifndef ACEFL_TRANSCRIPT_H_
#define ACEFL_TRANSCRIPT_H_

#include <istream>
#include <ostream>
#include <vector>

#include "acefl/round_record.h"
#include "json.hpp"

namespace acefl {

inline constexpr int kTranscriptVersion = 1;

using Json = nlohmann::ordered_json;

Json ToJson(const ParamVector& v);
Json ToJson(const RoundRecord& r);
Json ToJson(const FlagSet& f);
RoundRecord RoundFromJson(const Json& j);
FlagSet FlagSetFromJson(const Json& j);

// JSON lines: {"type":"meta","v":1,...meta fields}, one {"type":"round"} line
// per round, then {"type":"final","final_model":[...]}. Doubles are printed
// in shortest round-trip form, so reading back is exact.
void WriteTranscript(std::ostream& out, const Json& meta,
                     const FlTranscript& transcript);

struct LoadedTranscript {
  Json meta;
  FlTranscript transcript;
};
// Throws FormatError on malformed input or an unsupported version.
LoadedTranscript ReadTranscript(std::istream& in);

// One FlagSet per line.
void WriteFlagsJsonl(std::ostream& out, const std::vector<FlagSet>& flags);
std::vector<FlagSet> ReadFlagsJsonl(std::istream& in);

}  // namespace acefl

#endif  // ACEFL_TRANSCRIPT_H_
