#include "acefl/defenses.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "acefl/error.h"
#include "test_util.h"

namespace acefl {
namespace {

using testing::TestRng;

UpdateMap RandomUpdates(TestRng& rng, int n, std::size_t p) {
  UpdateMap u;
  for (int i = 0; i < n; ++i) u[i] = rng.Vector(p);
  return u;
}

// Top-k by score descending, ties to the lower id; returned ascending.
std::vector<ClientId> OracleTopK(std::vector<std::pair<double, ClientId>> s, int k) {
  std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<ClientId> out;
  for (int i = 0; i < k; ++i) out.push_back(s[i].second);
  std::sort(out.begin(), out.end());
  return out;
}

double Dist2(const ParamVector& a, const ParamVector& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

TEST(MultiKrumTest, Examples) {
  UpdateMap u{{0, {0, 0}}, {1, {0.1, 0}}, {2, {0, 0.1}}, {3, {5, 5}}};
  EXPECT_EQ(FlagMultiKrum(u, 1), std::vector<ClientId>{3});
  UpdateMap same{{0, {1, 1}}, {1, {1, 1}}, {2, {1, 1}}};
  EXPECT_EQ(FlagMultiKrum(same, 1), std::vector<ClientId>{0});
  EXPECT_THROW(FlagMultiKrum(same, 3), PreconditionError);
}

TEST(MultiKrumTest, MatchesPairwiseOracle) {
  TestRng rng(1);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = rng.Int(2, 8);
    UpdateMap u = RandomUpdates(rng, n, static_cast<std::size_t>(rng.Int(1, 6)));
    const int k = rng.Int(0, n - 1);
    std::vector<std::pair<double, ClientId>> s;
    for (auto& [i, a] : u) {
      double t = 0;
      for (auto& [j, b] : u) if (i != j) t += Dist2(a, b);
      s.emplace_back(t, i);
    }
    auto got = FlagMultiKrum(u, k);
    EXPECT_EQ(got, OracleTopK(s, k));
    EXPECT_EQ(static_cast<int>(got.size()), k);
  }
}

TEST(TrimmedMeanTest, Examples) {
  UpdateMap u{{0, {0, 0, 0}}, {1, {0.1, -0.1, 0.2}}, {2, {9, 9, 9}},
              {3, {0.2, 0.1, -0.1}}, {4, {-0.1, 0.2, 0.1}}};
  EXPECT_EQ(FlagTrimmedMean(u, 1), std::vector<ClientId>{2});
  UpdateMap same{{0, {1, 1}}, {1, {1, 1}}, {2, {1, 1}}, {3, {1, 1}}, {4, {1, 1}}};
  EXPECT_EQ(FlagTrimmedMean(same, 2), (std::vector<ClientId>{0, 1}));
  EXPECT_THROW(FlagTrimmedMean(same, 3), PreconditionError);
}

TEST(TrimmedMeanTest, MatchesPerDimensionSortOracle) {
  TestRng rng(2);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = rng.Int(3, 8);
    const std::size_t p = static_cast<std::size_t>(rng.Int(1, 6));
    UpdateMap u = RandomUpdates(rng, n, p);
    const int k = rng.Int(0, (n - 1) / 2);
    std::vector<double> tally(static_cast<std::size_t>(n), 0);
    for (std::size_t d = 0; d < p; ++d) {
      std::vector<std::pair<double, int>> col;
      for (auto& [i, a] : u) col.emplace_back(a[d], i);
      std::sort(col.begin(), col.end());
      for (int r = 0; r < k; ++r) {
        tally[col[r].second] += 1;
        tally[col[n - 1 - r].second] += 1;
      }
    }
    std::vector<std::pair<double, ClientId>> s;
    for (int i = 0; i < n; ++i) s.emplace_back(tally[i], i);
    EXPECT_EQ(FlagTrimmedMean(u, k), OracleTopK(s, k));
  }
}

TEST(FabaTest, Examples) {
  UpdateMap u{{0, {0, 0}}, {1, {0.1, 0.1}}, {2, {-0.1, 0}}, {3, {4, -4}}};
  EXPECT_EQ(FlagFaba(u, 1), std::vector<ClientId>{3});
  UpdateMap pair{{0, {1, 0}}, {1, {-1, 0}}};
  EXPECT_EQ(FlagFaba(pair, 1), std::vector<ClientId>{0});
}

TEST(FabaTest, MatchesStepwiseOracle) {
  TestRng rng(3);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = rng.Int(2, 8);
    const std::size_t p = static_cast<std::size_t>(rng.Int(1, 6));
    UpdateMap u = RandomUpdates(rng, n, p);
    const int k = rng.Int(0, n - 1);
    UpdateMap left = u;
    std::vector<ClientId> want;
    for (int r = 0; r < k; ++r) {
      ParamVector mean(p);
      for (auto& [i, a] : left) for (std::size_t d = 0; d < p; ++d) mean[d] += a[d] / left.size();
      ClientId worst = left.begin()->first;
      double worst_d = -1;
      for (auto& [i, a] : left) {
        const double dd = std::sqrt(Dist2(a, mean));
        if (dd > worst_d * (1 + 1e-9)) worst_d = dd, worst = i;
      }
      want.push_back(worst);
      left.erase(worst);
    }
    std::sort(want.begin(), want.end());
    EXPECT_EQ(FlagFaba(u, k), want);
  }
}

TEST(SniperTest, Examples) {
  UpdateMap close{{0, {0, 0}}, {1, {0.1, 0}}, {2, {0, 0.1}}};
  EXPECT_TRUE(FlagSniper(close, 1.0).empty());
  UpdateMap isolated{{0, {0, 0}}, {1, {0.1, 0}}, {2, {0, 0.1}}, {3, {10, 10}}};
  EXPECT_EQ(FlagSniper(isolated, 1.0), std::vector<ClientId>{3});
  EXPECT_THROW(FlagSniper(close, 0.0), PreconditionError);
}

// Largest clique by exhaustive subset search; ties to the lexicographically
// smallest sorted vertex list.
std::vector<int> BruteClique(const std::vector<std::uint32_t>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> best;
  for (std::uint32_t m = 0; m < (1u << n); ++m) {
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      if (!(m & (1u << i))) continue;
      for (int j = i + 1; j < n && ok; ++j) {
        if ((m & (1u << j)) && !(adj[i] & (1u << j))) ok = false;
      }
    }
    if (!ok) continue;
    std::vector<int> set;
    for (int i = 0; i < n; ++i) if (m & (1u << i)) set.push_back(i);
    if (set.size() > best.size() || (set.size() == best.size() && set < best)) best = set;
  }
  return best;
}

TEST(SniperTest, CliqueMatchesBruteForceOnRandomGraphs) {
  TestRng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.Int(1, 8);
    const double density = rng.Uniform(0.2, 0.9);
    std::vector<std::uint32_t> adj(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (rng.Uniform(0, 1) < density) {
          adj[i] |= 1u << j;
          adj[j] |= 1u << i;
        }
      }
    }
    EXPECT_EQ(MaximumClique(adj), BruteClique(adj)) << "trial " << trial;
  }
}

TEST(SniperTest, MatchesOracleWithMedianThreshold) {
  TestRng rng(5);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = rng.Int(2, 8);
    UpdateMap u = RandomUpdates(rng, n, static_cast<std::size_t>(rng.Int(1, 6)));
    std::vector<double> d;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) d.push_back(std::sqrt(Dist2(u[i], u[j])));
    std::sort(d.begin(), d.end());
    const double median =
        d.size() % 2 ? d[d.size() / 2] : 0.5 * (d[d.size() / 2 - 1] + d[d.size() / 2]);
    EXPECT_NEAR(MedianPairwiseDistance(u), median, 1e-12);
    std::vector<std::uint32_t> adj(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && std::sqrt(Dist2(u[i], u[j])) < median) adj[i] |= 1u << j;
    auto clique = BruteClique(adj);
    std::vector<ClientId> want;
    for (int i = 0; i < n; ++i) {
      if (!std::binary_search(clique.begin(), clique.end(), i)) want.push_back(i);
    }
    EXPECT_EQ(FlagSniper(u, MedianPairwiseDistance(u)), want);
  }
}

TEST(FoolsgoldTest, Examples) {
  UpdateMap twins{{0, {1, 2}}, {1, {-1, 0.5}}, {2, {1, 2}}, {3, {3, -1}}};
  EXPECT_EQ(FlagFoolsgold(twins, 2), (std::vector<ClientId>{0, 2}));
  UpdateMap orth{{0, {1, 0, 0}}, {1, {0, 1, 0}}, {2, {0, 0, 1}}};
  EXPECT_EQ(FlagFoolsgold(orth, 1), std::vector<ClientId>{0});
  UpdateMap zero{{0, {0, 0}}, {1, {1, 0}}, {2, {0.9, 0.1}}};
  EXPECT_EQ(FlagFoolsgold(zero, 2), (std::vector<ClientId>{1, 2}));
}

TEST(FoolsgoldTest, MatchesPairwiseSimilarityOracle) {
  TestRng rng(6);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = rng.Int(2, 8);
    UpdateMap u = RandomUpdates(rng, n, static_cast<std::size_t>(rng.Int(2, 6)));
    const int k = rng.Int(0, n - 1);
    std::vector<std::pair<double, ClientId>> s;
    for (auto& [i, a] : u) {
      double best = -2;
      for (auto& [j, b] : u) {
        if (i == j) continue;
        best = std::max(best, Dot(a, b) / std::sqrt(Dot(a, a) * Dot(b, b)));
      }
      s.emplace_back(best, i);
    }
    EXPECT_EQ(FlagFoolsgold(u, k), OracleTopK(s, k));
  }
}

TEST(FoolsgoldDetectorTest, ScoresRunningSumHistories) {
  auto det = MakeDetector(DefenseMethod::kFoolsgold, {1, std::nullopt, 0});
  RoundRecord r1;
  r1.t = 1;
  r1.selected = {0, 1, 2};
  r1.updates = {{0, {1, 0}}, {1, {0, 1}}, {2, {1, 0.1}}};
  EXPECT_EQ(det->Flag(r1).flagged, std::vector<ClientId>{0});
  RoundRecord r2 = r1;
  r2.t = 2;
  r2.updates = {{0, {-1, 1}}, {1, {1, 0}}, {2, {0, 0.05}}};
  // Histories: {0,1}, {1,1}, {1,0.15}; the max-cosine pair is (1, 2).
  EXPECT_EQ(det->Flag(r2).flagged, std::vector<ClientId>{1});
}

TEST(RandomGuessTest, Examples) {
  std::vector<ClientId> all{0, 1, 2, 3, 4};
  EXPECT_EQ(FlagRandom(all, 5, 3, 1), all);
  EXPECT_EQ(FlagRandom(all, 2, 7, 9), FlagRandom(all, 2, 7, 9));
  EXPECT_THROW(FlagRandom(all, 6, 1, 1), PreconditionError);
}

TEST(RandomGuessTest, FlagRateIsKOverN) {
  std::vector<ClientId> all(10);
  for (int i = 0; i < 10; ++i) all[i] = i;
  std::vector<int> hits(10, 0);
  const int rounds = 5000;
  for (int t = 1; t <= rounds; ++t) {
    for (ClientId id : FlagRandom(all, 2, t, 42)) ++hits[id];
  }
  const double sd = std::sqrt(rounds * 0.2 * 0.8);
  for (int h : hits) EXPECT_NEAR(h, rounds * 0.2, 3 * sd);
}

std::vector<FlagSet> Flags(const std::vector<std::vector<ClientId>>& per_round) {
  std::vector<FlagSet> out;
  for (std::size_t r = 0; r < per_round.size(); ++r) {
    out.push_back({static_cast<int>(r) + 1, DefenseMethod::kMultiKrum, per_round[r]});
  }
  return out;
}

TEST(DetectionMetricsTest, Examples) {
  auto perfect = DetectionMetrics(DefenseMethod::kMultiKrum, Flags({{3}, {3}}), {3});
  EXPECT_EQ(*perfect.precision, 1.0);
  EXPECT_EQ(*perfect.recall, 1.0);
  EXPECT_EQ(*perfect.f1, 1.0);
  auto never = DetectionMetrics(DefenseMethod::kMultiKrum, Flags({{1}, {2}}), {3});
  EXPECT_EQ(*never.precision, 0.0);
  EXPECT_EQ(*never.recall, 0.0);
  EXPECT_FALSE(never.f1.has_value());
  std::ostringstream csv;
  WriteDetectionCsv(csv, {perfect, never});
  EXPECT_EQ(csv.str(),
            "method,precision,recall,f1\n"
            "multi_krum,1.000000,1.000000,1.000000\n"
            "multi_krum,0.000000,0.000000,N/A\n");
}

TEST(DetectionMetricsTest, RandomGuessNearTenPercent) {
  std::vector<ClientId> all(10);
  for (int i = 0; i < 10; ++i) all[i] = i;
  std::vector<std::vector<ClientId>> flags;
  for (int t = 1; t <= 4000; ++t) flags.push_back(FlagRandom(all, 1, t, 5));
  auto r = DetectionMetrics(DefenseMethod::kRandomGuess, Flags(flags), {4});
  EXPECT_NEAR(*r.precision, 0.1, 3 * std::sqrt(0.09 / 4000));
}

TEST(DetectionMetricsTest, PrecisionEqualsRecallWhenKMatchesTruth) {
  TestRng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.Int(3, 8);
    UpdateMap u = RandomUpdates(rng, n, 4);
    std::set<ClientId> truth{rng.Int(0, n - 1)};
    if (n > 4) truth.insert(rng.Int(0, n - 1));
    const int k = static_cast<int>(truth.size());
    for (auto flagged : {FlagMultiKrum(u, k), FlagFaba(u, k), FlagFoolsgold(u, k)}) {
      EXPECT_EQ(static_cast<int>(flagged.size()), k);
      auto r = DetectionMetrics(DefenseMethod::kFaba, Flags({flagged}), truth);
      EXPECT_EQ(*r.precision, *r.recall);
    }
  }
}

TEST(DetectionMetricsTest, TruthPerRoundSkipsUndefinedRounds) {
  std::map<int, std::set<ClientId>> truth{{1, {2}}, {2, {}}};
  auto r = DetectionMetrics(DefenseMethod::kSniper, Flags({{2, 5}, {}}), truth);
  EXPECT_DOUBLE_EQ(*r.precision, 0.5);  // round 2 flagged nothing
  EXPECT_DOUBLE_EQ(*r.recall, 1.0);     // round 2 had no attacker
  EXPECT_THROW(DetectionMetrics(DefenseMethod::kSniper, {}, {1}), PreconditionError);
}

}  // namespace
}  // namespace acefl
