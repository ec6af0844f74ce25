#ifndef ACEFL_DEFENSES_H_
#define ACEFL_DEFENSES_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <vector>

#include "acefl/engine.h"
#include "acefl/param_vector.h"
#include "acefl/round_record.h"

namespace acefl {

using UpdateMap = std::map<ClientId, ParamVector>;

inline constexpr int kMaxCliqueVertices = 16;

// Every flag function returns ids sorted ascending; ties between equal scores
// go to the lower client id.

// Score = sum of squared distances to every other update; flags the k largest.
std::vector<ClientId> FlagMultiKrum(const UpdateMap& updates, int k);

// Per coordinate, one tally point for each of the k largest and k smallest
// entries; flags the k clients with most points.
std::vector<ClientId> FlagTrimmedMean(const UpdateMap& updates, int k);

// k times: drop the remaining update farthest from the remaining mean.
std::vector<ClientId> FlagFaba(const UpdateMap& updates, int k);

// Median pairwise Euclidean distance, used as the default Sniper threshold.
double MedianPairwiseDistance(const UpdateMap& updates);

// Maximum clique of the graph with an edge wherever two updates lie closer
// than `threshold`; flags everyone outside it. Among maximum cliques the
// lexicographically smallest id list wins.
std::vector<ClientId> FlagSniper(const UpdateMap& updates, double threshold);

// Maximum clique of an undirected graph on n <= kMaxCliqueVertices vertices
// given as adjacency bitmasks; returns sorted vertex indices.
std::vector<int> MaximumClique(const std::vector<std::uint32_t>& adjacency);

// Score = highest cosine similarity to another history; flags the k highest.
// Zero-norm histories score -infinity.
std::vector<ClientId> FlagFoolsgold(const UpdateMap& histories, int k);

// k ids drawn uniformly from `candidates`, keyed by (seed, round).
std::vector<ClientId> FlagRandom(const std::vector<ClientId>& candidates, int k,
                                 int round, std::uint64_t seed);

struct DefenseOptions {
  int k = 1;
  std::optional<double> sniper_threshold;  // median pairwise distance if unset
  std::uint64_t seed = 0;                  // random guess stream
};

// Observation-mode detector for one method. Foolsgold keeps per-client
// running sums of every update it has seen.
std::unique_ptr<Detector> MakeDetector(DefenseMethod method,
                                       const DefenseOptions& options);

struct DetectionReport {
  DefenseMethod method = DefenseMethod::kRandomGuess;
  std::vector<FlagSet> rounds;
  std::optional<double> precision;  // unset when no round had flags
  std::optional<double> recall;     // unset when no round had attackers
  std::optional<double> f1;         // unset when precision + recall is 0

  bool operator==(const DetectionReport&) const = default;
};

// Per-round precision and recall, averaged over the rounds where each is
// defined; F1 from the averages. truth_by_round maps round -> malicious ids
// that took part in it; a missing round counts as having none.
DetectionReport DetectionMetrics(
    DefenseMethod method, const std::vector<FlagSet>& flags,
    const std::map<int, std::set<ClientId>>& truth_by_round);

// Same, with one malicious set for every round.
DetectionReport DetectionMetrics(DefenseMethod method,
                                 const std::vector<FlagSet>& flags,
                                 const std::set<ClientId>& truth);

// CSV `method,precision,recall,f1`, undefined values written as N/A.
void WriteDetectionCsv(std::ostream& out,
                       const std::vector<DetectionReport>& reports);

}  // namespace acefl

#endif  // ACEFL_DEFENSES_H_
