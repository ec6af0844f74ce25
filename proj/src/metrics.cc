#include "acefl/metrics.h"

#include <algorithm>
#include <numeric>

#include "acefl/error.h"

namespace acefl {

std::vector<double> ContributionScore(const std::vector<Contributions>& per_round,
                                      int num_clients) {
  if (num_clients < 1) throw PreconditionError("need at least one client");
  std::vector<double> sums(num_clients, 0.0);
  for (const auto& round : per_round) {
    for (const auto& [id, e] : round) {
      if (id < 0 || id >= num_clients) {
        throw PreconditionError("contribution for unknown client " +
                                std::to_string(id));
      }
      sums[id] += e;
    }
  }
  double total = 0.0;
  for (double s : sums) total += s;
  if (total == 0.0) throw PreconditionError("total contribution is zero");
  for (double& s : sums) s /= total;
  return sums;
}

std::vector<double> ContributionScore(const FlTranscript& transcript,
                                      int num_clients) {
  std::vector<Contributions> per_round;
  per_round.reserve(transcript.rounds.size());
  for (const auto& r : transcript.rounds) per_round.push_back(r.contributions);
  return ContributionScore(per_round, num_clients);
}

std::vector<int> Ranks(const std::vector<double>& cs) {
  std::vector<int> order(cs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return cs[a] < cs[b]; });
  std::vector<int> rank(cs.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    rank[order[pos]] = static_cast<int>(pos) + 1;
  }
  return rank;
}

int RankGain(const std::vector<double>& cs_free,
             const std::vector<double>& cs_attack, ClientId client) {
  if (cs_free.size() != cs_attack.size()) {
    throw DimensionError("CS vectors differ in length");
  }
  if (client < 0 || client >= static_cast<int>(cs_free.size())) {
    throw PreconditionError("client id out of range");
  }
  return Ranks(cs_attack)[client] - Ranks(cs_free)[client];
}

ClientId LowestScoreClient(const std::vector<double>& cs) {
  if (cs.empty()) throw PreconditionError("no scores");
  return static_cast<ClientId>(std::min_element(cs.begin(), cs.end()) - cs.begin());
}

}  // namespace acefl
