#include "acefl/engine.h"

#include <gtest/gtest.h>

#include <memory>
#include <set>

#include "acefl/aggregation.h"
#include "acefl/contribution.h"
#include "acefl/dataset.h"
#include "acefl/error.h"
#include "acefl/partition.h"
#include "test_util.h"

namespace acefl {
namespace {

TEST(SelectClientsTest, Examples) {
  for (int t = 1; t <= 5; ++t) {
    auto all = SelectClients(10, 1.0, t, 3);
    EXPECT_EQ(all.size(), 10u);
    auto half = SelectClients(10, 0.5, t, 3);
    EXPECT_EQ(half.size(), 5u);
    EXPECT_TRUE(std::is_sorted(half.begin(), half.end()));
    EXPECT_EQ(half, SelectClients(10, 0.5, t, 3));
    EXPECT_EQ(std::set<int>(half.begin(), half.end()).size(), 5u);
  }
  EXPECT_EQ(SelectClients(10, 0.01, 1, 3).size(), 1u);
  EXPECT_THROW(SelectClients(10, 0.0, 1, 3), PreconditionError);
  EXPECT_THROW(SelectClients(10, 1.5, 1, 3), PreconditionError);
}

TEST(SelectClientsTest, RoundKeyedAndUniform) {
  std::vector<int> hits(10, 0);
  bool differs = false;
  for (int t = 1; t <= 2000; ++t) {
    auto s = SelectClients(10, 0.3, t, 5);
    for (int id : s) ++hits[id];
    if (s != SelectClients(10, 0.3, 1, 5)) differs = true;
  }
  EXPECT_TRUE(differs);
  // 600 expected per client, binomial sd ~ 20.5.
  for (int h : hits) EXPECT_NEAR(h, 600, 4 * 20.5);
}

TEST(AggregationTest, FedAvgEqualSizes) {
  AggregationMetadata md;
  md.data_sizes = {{0, 50}, {1, 50}};
  auto w = AggregationWeights(FedAvgBySize{}, {0, 1}, md);
  EXPECT_DOUBLE_EQ(w[0], 0.5);
  EXPECT_DOUBLE_EQ(w[1], 0.5);
}

TEST(AggregationTest, ClassWeightedClaSchedule) {
  AggregationMetadata md;
  const std::vector<int> schedule{6, 6, 7, 7, 8, 8, 9, 9, 10, 10};
  std::set<ClientId> ids;
  for (int i = 0; i < 10; ++i) {
    md.class_counts[i] = schedule[i];
    md.data_sizes[i] = 100 + i;
    ids.insert(i);
  }
  auto w = AggregationWeights(CffLClassWeighted{true}, ids, md);
  for (int i = 0; i < 10; ++i) EXPECT_NEAR(w[i], schedule[i] / 80.0, 1e-15);
  auto fallback = AggregationWeights(CffLClassWeighted{false}, ids, md);
  EXPECT_EQ(fallback, AggregationWeights(FedAvgBySize{}, ids, md));
}

TEST(AggregationTest, EqualReputationsGiveUniformAverage) {
  testing::TestRng rng(1);
  std::map<ClientId, ParamVector> updates;
  AggregationMetadata md;
  for (int i = 0; i < 4; ++i) {
    updates[i] = rng.Vector(5);
    md.reputations[i] = 0.25;
  }
  auto r = Aggregate(ReputationWeighted{}, updates, md);
  for (std::size_t j = 0; j < 5; ++j) {
    double mean = 0;
    for (auto& [id, u] : updates) mean += u[j] / 4;
    EXPECT_NEAR(r.global_update[j], mean, 1e-15);
  }
}

TEST(AggregationTest, WeightsSumToOneForEveryRule) {
  testing::TestRng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    AggregationMetadata md;
    std::set<ClientId> ids;
    const int n = rng.Int(1, 12);
    for (int i = 0; i < n; ++i) {
      ids.insert(i);
      md.data_sizes[i] = rng.Int(1, 1000);
      md.class_counts[i] = rng.Int(1, 10);
      md.reputations[i] = rng.Uniform(0.01, 1);
    }
    for (AggregationRule rule : {AggregationRule{FedAvgBySize{}},
                                 AggregationRule{CffLClassWeighted{true}},
                                 AggregationRule{ReputationWeighted{}}}) {
      double sum = 0;
      for (auto& [id, w] : AggregationWeights(rule, ids, md)) {
        EXPECT_GE(w, 0.0);
        sum += w;
      }
      EXPECT_NEAR(sum, 1.0, 1e-12) << RuleName(rule);
    }
  }
}

TEST(AggregationTest, Errors) {
  AggregationMetadata md;
  EXPECT_THROW(AggregationWeights(FedAvgBySize{}, {0}, md), PreconditionError);
  md.reputations = {{0, 0.0}, {1, 0.0}};
  EXPECT_THROW(AggregationWeights(ReputationWeighted{}, {0, 1}, md),
               PreconditionError);
  EXPECT_THROW(Aggregate(FedAvgBySize{}, {}, md), PreconditionError);
}

struct Fixture {
  ModelKind kind = MultinomialLogistic{4, 3};
  Dataset data = GenerateSynthetic(3, 4, 40, 1.0, 1);
  Partition part = PartitionUniform(data.size(), 4, 2);

  std::vector<std::unique_ptr<ClientBehavior>> Clients(TrainSpec spec) {
    std::vector<std::unique_ptr<ClientBehavior>> out;
    for (int i = 0; i < 4; ++i) {
      out.push_back(std::make_unique<HonestClient>(
          i, &kind, data.Subset(part.client_indices[i]), spec, 9));
    }
    return out;
  }

  FlEngine Engine(EngineConfig cfg, TrainSpec spec = {}) {
    return FlEngine(cfg, kind, InitialParams(kind, 1), Clients(spec),
                    MakeEvaluator(Rffl{}, kind, data, 4), {});
  }
};

TEST(EngineTest, IdenticalClientsGiveTheirUpdate) {
  Fixture f;
  std::vector<std::unique_ptr<ClientBehavior>> clients;
  Dataset shared = f.data.Subset(f.part.client_indices[0]);
  for (int i = 0; i < 2; ++i) {
    // Same data, same id-independent training: give both id 0's stream.
    clients.push_back(std::make_unique<HonestClient>(0, &f.kind, shared,
                                                     TrainSpec{}, 9));
  }
  EngineConfig cfg;
  cfg.num_clients = 2;
  cfg.rounds = 1;
  FlEngine engine(cfg, f.kind, InitialParams(f.kind, 1), std::move(clients),
                  nullptr, {});
  RoundRecord r = engine.RunRound();
  EXPECT_EQ(r.updates.at(0), r.updates.at(1));
  for (std::size_t j = 0; j < r.global_update.size(); ++j) {
    EXPECT_NEAR(r.global_update[j], r.updates.at(0)[j], 1e-15);
  }
}

TEST(EngineTest, ZeroLearningRateFreezesModel) {
  Fixture f;
  EngineConfig cfg;
  cfg.num_clients = 4;
  cfg.rounds = 3;
  TrainSpec spec;
  spec.learning_rate = 0.0;
  FlEngine engine(cfg, f.kind, InitialParams(f.kind, 1), f.Clients(spec),
                  nullptr, {});
  FlTranscript t = engine.Run();
  EXPECT_EQ(t.final_model, InitialParams(f.kind, 1));
}

TEST(EngineTest, TranscriptStructure) {
  Fixture f;
  EngineConfig cfg;
  cfg.num_clients = 4;
  cfg.rounds = 1;
  EXPECT_EQ(f.Engine(cfg).Run().rounds.size(), 1u);

  cfg.rounds = 8;
  cfg.selection_fraction = 0.5;
  FlTranscript t = f.Engine(cfg).Run();
  ASSERT_EQ(t.rounds.size(), 8u);
  for (std::size_t r = 0; r < t.rounds.size(); ++r) {
    const RoundRecord& rec = t.rounds[r];
    EXPECT_EQ(rec.t, static_cast<int>(r) + 1);
    EXPECT_EQ(rec.selected.size(), 2u);
    std::set<ClientId> keys;
    for (auto& [id, u] : rec.updates) keys.insert(id);
    EXPECT_EQ(keys, std::set<ClientId>(rec.selected.begin(), rec.selected.end()));
    double wsum = 0;
    for (auto& [id, w] : rec.weights) wsum += w;
    EXPECT_NEAR(wsum, 1.0, 1e-12);
    ASSERT_EQ(rec.contributions.size(), 4u);
    for (auto& [id, e] : rec.contributions) {
      if (!keys.count(id)) EXPECT_EQ(e, 0.0);
    }
    const ParamVector& next =
        r + 1 < t.rounds.size() ? t.rounds[r + 1].global_before : t.final_model;
    EXPECT_EQ(next, rec.global_before - rec.global_update);  // exact
  }
}

TEST(EngineTest, ThreadedMatchesSerial) {
  Fixture f;
  EngineConfig cfg;
  cfg.num_clients = 4;
  cfg.rounds = 6;
  FlTranscript serial = f.Engine(cfg).Run();
  cfg.threads = 3;
  FlTranscript threaded = f.Engine(cfg).Run();
  EXPECT_EQ(serial, threaded);
}

TEST(EngineTest, LearnsBeyondUntrainedModel) {
  Fixture f;
  EngineConfig cfg;
  cfg.num_clients = 4;
  cfg.rounds = 20;
  FlTranscript t = f.Engine(cfg).Run();
  EXPECT_GT(AccuracyOn(f.kind, t.final_model, f.data),
            AccuracyOn(f.kind, InitialParams(f.kind, 1), f.data) + 0.2);
}

class BadClient : public ClientBehavior {
 public:
  ClientOutput ComputeUpdate(const RoundView&) override {
    return {ParamVector(3), std::nullopt};
  }
  int ReportedDataSize() const override { return 1; }
  int ClassCount() const override { return 1; }
};

TEST(EngineTest, ClientErrorsCarryRoundContext) {
  Fixture f;
  std::vector<std::unique_ptr<ClientBehavior>> clients;
  clients.push_back(std::make_unique<BadClient>());
  EngineConfig cfg;
  cfg.num_clients = 1;
  FlEngine engine(cfg, f.kind, InitialParams(f.kind, 1), std::move(clients),
                  nullptr, {});
  try {
    engine.RunRound();
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("round 1"), std::string::npos);
  }
}

}  // namespace
}  // namespace acefl
