#include "acefl/defenses.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "acefl/error.h"
#include "acefl/rng.h"

namespace acefl {
namespace {

std::vector<ClientId> TopK(const std::vector<std::pair<ClientId, double>>& scores,
                           int k) {
  auto sorted = scores;
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<ClientId> out;
  for (int i = 0; i < k; ++i) out.push_back(sorted[i].first);
  std::sort(out.begin(), out.end());
  return out;
}

void RequireK(int k, int lo_exclusive_bound, const char* what) {
  if (k < 0 || k >= lo_exclusive_bound) {
    throw PreconditionError(std::string(what) + ": k=" + std::to_string(k) +
                            " out of range");
  }
}

std::vector<std::vector<double>> PairwiseDistances(
    const std::vector<const ParamVector*>& v) {
  const std::size_t n = v.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      d[i][j] = d[j][i] = Distance(*v[i], *v[j]);
    }
  }
  return d;
}

void Unpack(const UpdateMap& updates, std::vector<ClientId>& ids,
            std::vector<const ParamVector*>& vecs) {
  for (const auto& [id, g] : updates) {
    ids.push_back(id);
    vecs.push_back(&g);
  }
}

// Bron-Kerbosch with pivoting; keeps the best clique seen.
void BronKerbosch(const std::vector<std::uint32_t>& adj, std::uint32_t r,
                  std::uint32_t p, std::uint32_t x, std::uint32_t& best) {
  if (p == 0 && x == 0) {
    const int size = std::popcount(r);
    const int best_size = std::popcount(best);
    if (size > best_size) {
      best = r;
    } else if (size == best_size) {
      // Lexicographically smaller sorted id list: compare from the lowest bit.
      const std::uint32_t diff = r ^ best;
      if (diff != 0 && (r & (diff & (~diff + 1)))) best = r;
    }
    return;
  }
  const std::uint32_t px = p | x;
  int pivot = std::countr_zero(px);
  int pivot_degree = -1;
  for (std::uint32_t scan = px; scan; scan &= scan - 1) {
    const int u = std::countr_zero(scan);
    const int degree = std::popcount(p & adj[u]);
    if (degree > pivot_degree) {
      pivot_degree = degree;
      pivot = u;
    }
  }
  for (std::uint32_t cand = p & ~adj[pivot]; cand; cand &= cand - 1) {
    const int v = std::countr_zero(cand);
    const std::uint32_t bit = 1u << v;
    BronKerbosch(adj, r | bit, p & adj[v], x & adj[v], best);
    p &= ~bit;
    x |= bit;
  }
}

class FlagDetector : public Detector {
 public:
  FlagDetector(DefenseMethod method, DefenseOptions options)
      : method_(method), options_(options) {}
  DefenseMethod method() const override { return method_; }

  FlagSet Flag(const RoundRecord& round) override {
    FlagSet out{round.t, method_, {}};
    const int k = options_.k;
    switch (method_) {
      case DefenseMethod::kMultiKrum:
        out.flagged = FlagMultiKrum(round.updates, k);
        break;
      case DefenseMethod::kTrimmedMean:
        out.flagged = FlagTrimmedMean(round.updates, k);
        break;
      case DefenseMethod::kFaba:
        out.flagged = FlagFaba(round.updates, k);
        break;
      case DefenseMethod::kSniper: {
        const double threshold = options_.sniper_threshold
                                     ? *options_.sniper_threshold
                                     : MedianPairwiseDistance(round.updates);
        out.flagged = FlagSniper(round.updates, threshold);
        break;
      }
      case DefenseMethod::kFoolsgold: {
        UpdateMap current;
        for (const auto& [id, g] : round.updates) {
          auto [it, inserted] = history_.try_emplace(id, g);
          if (!inserted) it->second += g;
          current.emplace(id, it->second);
        }
        out.flagged = FlagFoolsgold(current, k);
        break;
      }
      case DefenseMethod::kRandomGuess:
        out.flagged = FlagRandom(round.selected, k, round.t, options_.seed);
        break;
    }
    return out;
  }

 private:
  DefenseMethod method_;
  DefenseOptions options_;
  UpdateMap history_;
};

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

std::vector<ClientId> FlagMultiKrum(const UpdateMap& updates, int k) {
  RequireK(k, static_cast<int>(updates.size()), "Multi-Krum");
  std::vector<ClientId> ids;
  std::vector<const ParamVector*> v;
  Unpack(updates, ids, v);
  std::vector<std::pair<ClientId, double>> scores;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (i != j) s += SquaredDistance(*v[i], *v[j]);
    }
    scores.emplace_back(ids[i], s);
  }
  return TopK(scores, k);
}

std::vector<ClientId> FlagTrimmedMean(const UpdateMap& updates, int k) {
  const int n = static_cast<int>(updates.size());
  if (k < 0 || 2 * k >= n) throw PreconditionError("Trimmed-Mean needs 2k < N");
  std::vector<ClientId> ids;
  std::vector<const ParamVector*> v;
  Unpack(updates, ids, v);
  const std::size_t dim = v.front()->size();
  std::vector<double> tally(n, 0.0);
  std::vector<int> order(n);
  for (std::size_t d = 0; d < dim; ++d) {
    for (int i = 0; i < n; ++i) order[i] = i;
    // Ascending by value; equal values keep ascending id order.
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return (*v[a])[d] < (*v[b])[d]; });
    for (int i = 0; i < k; ++i) tally[order[i]] += 1.0;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return (*v[a])[d] > (*v[b])[d]; });
    for (int i = 0; i < k; ++i) tally[order[i]] += 1.0;
  }
  std::vector<std::pair<ClientId, double>> scores;
  for (int i = 0; i < n; ++i) scores.emplace_back(ids[i], tally[i]);
  return TopK(scores, k);
}

std::vector<ClientId> FlagFaba(const UpdateMap& updates, int k) {
  RequireK(k, static_cast<int>(updates.size()), "FABA");
  UpdateMap remaining = updates;
  std::vector<ClientId> flagged;
  for (int round = 0; round < k; ++round) {
    ParamVector mean(remaining.begin()->second.size());
    for (const auto& [id, g] : remaining) mean += g;
    mean *= 1.0 / static_cast<double>(remaining.size());
    ClientId worst = remaining.begin()->first;
    double worst_d = -1.0;
    for (const auto& [id, g] : remaining) {
      const double d = Distance(g, mean);
      // Two survivors are always equidistant from their mean; rounding must
      // not decide.
      if (d > worst_d * (1.0 + 1e-12) + 1e-300) {
        worst_d = d;
        worst = id;
      }
    }
    flagged.push_back(worst);
    remaining.erase(worst);
  }
  std::sort(flagged.begin(), flagged.end());
  return flagged;
}

double MedianPairwiseDistance(const UpdateMap& updates) {
  if (updates.size() < 2) throw PreconditionError("median distance needs 2 updates");
  std::vector<ClientId> ids;
  std::vector<const ParamVector*> v;
  Unpack(updates, ids, v);
  std::vector<double> all;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) all.push_back(Distance(*v[i], *v[j]));
  }
  std::sort(all.begin(), all.end());
  const std::size_t n = all.size();
  return n % 2 ? all[n / 2] : 0.5 * (all[n / 2 - 1] + all[n / 2]);
}

std::vector<int> MaximumClique(const std::vector<std::uint32_t>& adjacency) {
  const int n = static_cast<int>(adjacency.size());
  if (n > kMaxCliqueVertices) {
    throw PreconditionError("exact clique search limited to " +
                            std::to_string(kMaxCliqueVertices) + " vertices");
  }
  if (n == 0) return {};
  const std::uint32_t all = n == 32 ? ~0u : (1u << n) - 1u;
  std::uint32_t best = 0;
  BronKerbosch(adjacency, 0, all, 0, best);
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (best & (1u << i)) out.push_back(i);
  }
  return out;
}

std::vector<ClientId> FlagSniper(const UpdateMap& updates, double threshold) {
  if (!(threshold > 0.0)) throw PreconditionError("Sniper threshold must be > 0");
  std::vector<ClientId> ids;
  std::vector<const ParamVector*> v;
  Unpack(updates, ids, v);
  const int n = static_cast<int>(v.size());
  if (n > kMaxCliqueVertices) throw PreconditionError("too many clients for Sniper");
  const auto dist = PairwiseDistances(v);
  std::vector<std::uint32_t> adj(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && dist[i][j] < threshold) adj[i] |= 1u << j;
    }
  }
  const auto clique = MaximumClique(adj);
  std::vector<ClientId> flagged;
  std::size_t c = 0;
  for (int i = 0; i < n; ++i) {
    if (c < clique.size() && clique[c] == i) {
      ++c;
    } else {
      flagged.push_back(ids[i]);
    }
  }
  return flagged;
}

std::vector<ClientId> FlagFoolsgold(const UpdateMap& histories, int k) {
  RequireK(k, static_cast<int>(histories.size()), "Foolsgold");
  std::vector<ClientId> ids;
  std::vector<const ParamVector*> v;
  Unpack(histories, ids, v);
  const double neg_inf = -std::numeric_limits<double>::infinity();
  std::vector<double> norms;
  for (const auto* h : v) norms.push_back(Norm(*h));
  std::vector<std::pair<ClientId, double>> scores;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double best = neg_inf;
    if (norms[i] > 0.0) {
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (j == i || norms[j] == 0.0) continue;
        best = std::max(best, CosineSimilarity(*v[i], *v[j]));
      }
    }
    scores.emplace_back(ids[i], best);
  }
  return TopK(scores, k);
}

std::vector<ClientId> FlagRandom(const std::vector<ClientId>& candidates, int k,
                                 int round, std::uint64_t seed) {
  const int n = static_cast<int>(candidates.size());
  if (k < 0 || k > n) throw PreconditionError("random guess needs k <= N");
  Rng rng(DeriveSeed(seed, {static_cast<std::uint64_t>(Stream::kDefense),
                            static_cast<std::uint64_t>(round)}));
  std::vector<ClientId> out;
  for (int idx : SampleWithoutReplacement(n, k, rng)) out.push_back(candidates[idx]);
  std::sort(out.begin(), out.end());
  return out;
}

std::unique_ptr<Detector> MakeDetector(DefenseMethod method,
                                       const DefenseOptions& options) {
  if (options.k < 0) throw PreconditionError("defense k must be >= 0");
  return std::make_unique<FlagDetector>(method, options);
}

DetectionReport DetectionMetrics(
    DefenseMethod method, const std::vector<FlagSet>& flags,
    const std::map<int, std::set<ClientId>>& truth_by_round) {
  if (flags.empty()) throw PreconditionError("detection metrics need rounds");
  DetectionReport report;
  report.method = method;
  report.rounds = flags;
  std::vector<double> precisions, recalls;
  static const std::set<ClientId> kNone;
  for (const FlagSet& f : flags) {
    auto it = truth_by_round.find(f.round);
    const std::set<ClientId>& truth = it == truth_by_round.end() ? kNone : it->second;
    int hits = 0;
    for (ClientId id : f.flagged) hits += truth.count(id) ? 1 : 0;
    if (!f.flagged.empty()) precisions.push_back(double(hits) / f.flagged.size());
    if (!truth.empty()) recalls.push_back(double(hits) / truth.size());
  }
  if (!precisions.empty()) report.precision = Mean(precisions);
  if (!recalls.empty()) report.recall = Mean(recalls);
  if (report.precision && report.recall) {
    const double sum = *report.precision + *report.recall;
    if (sum > 0.0) report.f1 = 2.0 * *report.precision * *report.recall / sum;
  }
  return report;
}

DetectionReport DetectionMetrics(DefenseMethod method,
                                 const std::vector<FlagSet>& flags,
                                 const std::set<ClientId>& truth) {
  std::map<int, std::set<ClientId>> by_round;
  for (const FlagSet& f : flags) by_round[f.round] = truth;
  return DetectionMetrics(method, flags, by_round);
}

void WriteDetectionCsv(std::ostream& out,
                       const std::vector<DetectionReport>& reports) {
  auto cell = [](const std::optional<double>& v) {
    if (!v) return std::string("N/A");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return std::string(buf);
  };
  out << "method,precision,recall,f1\n";
  for (const auto& r : reports) {
    out << DefenseName(r.method) << ',' << cell(r.precision) << ','
        << cell(r.recall) << ',' << cell(r.f1) << '\n';
  }
}

}  // namespace acefl
