#include "acefl/round_record.h"

#include <array>
#include <utility>

#include "acefl/error.h"

namespace acefl {
namespace {

constexpr std::array<std::pair<DefenseMethod, const char*>, 6> kNames = {{
    {DefenseMethod::kMultiKrum, "multi_krum"},
    {DefenseMethod::kTrimmedMean, "trimmed_mean"},
    {DefenseMethod::kFaba, "faba"},
    {DefenseMethod::kSniper, "sniper"},
    {DefenseMethod::kFoolsgold, "foolsgold"},
    {DefenseMethod::kRandomGuess, "random_guess"},
}};

}  // namespace

std::string DefenseName(DefenseMethod method) {
  for (const auto& [m, name] : kNames) {
    if (m == method) return name;
  }
  throw FormatError("unknown defense method");
}

DefenseMethod ParseDefense(const std::string& name) {
  for (const auto& [m, n] : kNames) {
    if (name == n) return m;
  }
  throw FormatError("unknown defense method '" + name + "'");
}

}  // namespace acefl
