#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <vector>

#include "acefl/dataset.h"
#include "acefl/error.h"
#include "acefl/model.h"
#include "acefl/partition.h"
#include "acefl/training.h"
#include "test_util.h"

namespace acefl {
namespace {

using testing::TestRng;

// Exhaustive disjointness/coverage check, independent of ValidatePartition.
void ExpectDisjointCover(const Partition& p, int n, bool full_cover) {
  std::vector<int> hits(static_cast<std::size_t>(n), 0);
  for (const auto& set : p.client_indices) {
    EXPECT_FALSE(set.empty());
    for (int i : set) {
      ASSERT_GE(i, 0);
      ASSERT_LT(i, n);
      ++hits[i];
    }
  }
  for (int h : hits) {
    EXPECT_LE(h, 1);
    if (full_cover) EXPECT_EQ(h, 1);
  }
}

TEST(SyntheticTest, ZeroSpreadSitsOnMeans) {
  Dataset d = GenerateSynthetic(2, 2, 1, 0.0, 0);
  ASSERT_EQ(d.size(), 2);
  for (int i = 0; i < 2; ++i) {
    const auto mean = ClassMean(d.label(i), 2, 2);
    EXPECT_EQ(d.row(i)[0], mean[0]);
    EXPECT_EQ(d.row(i)[1], mean[1]);
  }
  EXPECT_NE(d.row(0)[0], d.row(1)[0]);
}

TEST(SyntheticTest, Deterministic) {
  EXPECT_EQ(GenerateSynthetic(4, 5, 30, 1.0, 9), GenerateSynthetic(4, 5, 30, 1.0, 9));
  EXPECT_NE(GenerateSynthetic(4, 5, 30, 1.0, 9), GenerateSynthetic(4, 5, 30, 1.0, 10));
}

TEST(SyntheticTest, CentralTrainingSeparatesBlobs) {
  Dataset d = GenerateSynthetic(10, 20, 100, 0.5, 7);
  ModelKind kind = MultinomialLogistic{20, 10};
  ParamVector w = InitialParams(kind, 7);
  TrainSpec spec;
  spec.epochs = 5;
  spec.seed = 3;
  w -= LocalTrain(kind, w, d, spec);
  EXPECT_GT(AccuracyOn(kind, w, d), 0.9);
}

TEST(SyntheticTest, Preconditions) {
  EXPECT_THROW(GenerateSynthetic(1, 2, 1, 1, 0), PreconditionError);
  EXPECT_THROW(GenerateSynthetic(2, 1, 1, 1, 0), PreconditionError);
  EXPECT_THROW(GenerateSynthetic(2, 2, 0, 1, 0), PreconditionError);
}

TEST(PartitionUniformTest, Sizes) {
  auto sizes = [](int n) {
    auto s = PartitionUniform(n, 10, 1).Sizes();
    std::sort(s.begin(), s.end());
    return s;
  };
  EXPECT_EQ(sizes(10), std::vector<int>(10, 1));
  EXPECT_EQ(sizes(100), std::vector<int>(10, 10));
  std::vector<int> want(10, 10);
  want[9] = 11;
  EXPECT_EQ(sizes(101), want);
  ExpectDisjointCover(PartitionUniform(101, 10, 1), 101, true);
  EXPECT_THROW(PartitionUniform(9, 10, 1), PreconditionError);
}

TEST(PartitionUniformTest, ShuffledBySeed) {
  EXPECT_NE(PartitionUniform(100, 10, 1).client_indices,
            PartitionUniform(100, 10, 2).client_indices);
  EXPECT_EQ(PartitionUniform(100, 10, 1).client_indices,
            PartitionUniform(100, 10, 1).client_indices);
}

void ExpectWithin(const std::vector<int>& got, const std::vector<int>& want, int tol) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    EXPECT_LE(std::abs(got[i] - want[i]), tol) << "client " << i;
  }
}

TEST(PartitionPowTest, PublishedCounts) {
  ExpectWithin(PowerLawSizes(6000, 10, 2.0),
               {110, 219, 328, 437, 546, 655, 764, 873, 982, 1086}, 2);
  ExpectWithin(PowerLawSizes(40000, 10, 2.0),
               {731, 1458, 2184, 2911, 3637, 4364, 5090, 5817, 6543, 7265}, 2);
}

TEST(PartitionPowTest, ConservationAndOrder) {
  for (int n : {60, 200, 997, 6000, 12345}) {
    for (double a : {1.5, 2.0, 3.0}) {
      auto s = PowerLawSizes(n, 10, a);
      EXPECT_EQ(std::accumulate(s.begin(), s.end(), 0), n);
      EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
      ExpectDisjointCover(PartitionPowerLaw(n, 10, a, 4), n, true);
    }
  }
}

TEST(PartitionPowTest, Errors) {
  EXPECT_THROW(PowerLawSizes(5, 10, 2.0), PreconditionError);
  EXPECT_THROW(PowerLawSizes(100, 10, 1.0), PreconditionError);
  EXPECT_THROW(PowerLawSizes(12, 10, 2.0), PreconditionError);  // a client gets 0
  EXPECT_THROW(PowerLawSizes(50, 10, 3.0), PreconditionError);
}

TEST(PartitionClaTest, ScheduleReproduced) {
  Dataset d = GenerateSynthetic(10, 4, 60, 1.0, 2);
  std::vector<int> schedule{6, 6, 7, 7, 8, 8, 9, 9, 10, 10};
  Partition p = PartitionByClass(d, schedule, 5);
  ExpectDisjointCover(p, d.size(), false);
  std::vector<int> sizes = p.Sizes();
  for (int i = 0; i < 10; ++i) {
    std::set<int> labels;
    for (int r : p.client_indices[i]) labels.insert(d.label(r));
    EXPECT_EQ(static_cast<int>(labels.size()), schedule[i]);
  }
  const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  EXPECT_LE(*hi - *lo, 1);
}

TEST(PartitionClaTest, AllAndSingleClass) {
  Dataset d = GenerateSynthetic(10, 3, 20, 1.0, 2);
  Partition all = PartitionByClass(d, std::vector<int>(10, 10), 1);
  for (const auto& set : all.client_indices) {
    std::set<int> labels;
    for (int r : set) labels.insert(d.label(r));
    EXPECT_EQ(labels.size(), 10u);
  }
  Partition single = PartitionByClass(d, std::vector<int>(10, 1), 1);
  ExpectDisjointCover(single, d.size(), false);
  for (const auto& set : single.client_indices) {
    std::set<int> labels;
    for (int r : set) labels.insert(d.label(r));
    EXPECT_EQ(labels.size(), 1u);
  }
  EXPECT_THROW(PartitionByClass(d, std::vector<int>(10, 11), 1), PreconditionError);
}

TEST(LossTest, UniformModelGivesLogC) {
  Dataset d = GenerateSynthetic(5, 3, 4, 1.0, 1);
  ModelKind kind = MultinomialLogistic{3, 5};
  ParamVector w(static_cast<std::size_t>(ParamDim(kind)));
  EXPECT_NEAR(LossOn(kind, w, d), std::log(5.0), 1e-12);
}

TEST(LossTest, ConfidentCorrectModelNearZero) {
  Dataset d({1, 0, 0, 1}, {0, 1}, 2, 2);
  ModelKind kind = MultinomialLogistic{2, 2};
  ParamVector w{100, 0, 0, 100, 0, 0};
  EXPECT_LT(LossOn(kind, w, d), 1e-30);
  EXPECT_EQ(AccuracyOn(kind, w, d), 1.0);
}

// Naive per-sample cross-entropy for the logistic layout (W row-major, then b).
double NaiveLogisticLoss(const ParamVector& w, const Dataset& d, int C) {
  const int f = d.num_features();
  double total = 0;
  for (int i = 0; i < d.size(); ++i) {
    std::vector<double> z(C);
    for (int k = 0; k < C; ++k) {
      z[k] = w[static_cast<std::size_t>(C * f + k)];
      for (int j = 0; j < f; ++j) z[k] += w[static_cast<std::size_t>(k * f + j)] * d.row(i)[j];
    }
    double denom = 0;
    for (double v : z) denom += std::exp(v);
    total += -std::log(std::exp(z[d.label(i)]) / denom);
  }
  return total / d.size();
}

TEST(LossTest, MatchesNaiveOracle) {
  TestRng rng(11);
  Dataset d = GenerateSynthetic(4, 6, 25, 1.0, 3);
  ModelKind kind = MultinomialLogistic{6, 4};
  for (int trial = 0; trial < 10; ++trial) {
    ParamVector w = rng.Vector(static_cast<std::size_t>(ParamDim(kind)));
    EXPECT_NEAR(LossOn(kind, w, d), NaiveLogisticLoss(w, d, 4), 1e-9);
  }
}

void GradientCheck(const ModelKind& kind, std::uint64_t seed) {
  TestRng rng(seed);
  Dataset d = GenerateSynthetic(3, 4, 10, 1.0, seed);
  ParamVector w = 0.5 * rng.Vector(static_cast<std::size_t>(ParamDim(kind)));
  std::vector<int> rows(static_cast<std::size_t>(d.size()));
  std::iota(rows.begin(), rows.end(), 0);
  ParamVector grad;
  LossAndGradient(kind, w, d, rows, grad);
  // The library gradient is of the mean loss over rows.
  for (int probe = 0; probe < 25; ++probe) {
    const auto j = static_cast<std::size_t>(rng.Int(0, static_cast<int>(w.size()) - 1));
    const double h = 1e-5;
    ParamVector up = w, down = w;
    up[j] += h;
    down[j] -= h;
    const double fd = (LossOn(kind, up, d) - LossOn(kind, down, d)) / (2 * h);
    const double scale = std::max({std::abs(fd), std::abs(grad[j]), 1e-6});
    EXPECT_LT(std::abs(fd - grad[j]) / scale, 1e-4) << KindName(kind) << " coord " << j;
  }
}

TEST(GradientTest, LogisticMatchesFiniteDifferences) {
  GradientCheck(MultinomialLogistic{4, 3}, 1);
}

TEST(GradientTest, MlpMatchesFiniteDifferences) {
  GradientCheck(Mlp1Hidden{4, 5, 3}, 2);
}

TEST(LocalTrainTest, ZeroLearningRateGivesZeroUpdate) {
  Dataset d = GenerateSynthetic(3, 4, 10, 1.0, 1);
  ModelKind kind = MultinomialLogistic{4, 3};
  TrainSpec spec;
  spec.learning_rate = 0.0;
  ParamVector g = LocalTrain(kind, InitialParams(kind, 1), d, spec);
  EXPECT_EQ(g, ParamVector(static_cast<std::size_t>(ParamDim(kind))));
}

TEST(LocalTrainTest, QuadraticOneStepClosedForm) {
  TestRng rng(3);
  const int p = 6;
  std::vector<double> eig{0.5, 1, 1.5, 2, 2.5, 3};
  Quadratic q{p, testing::SpdMatrix(eig, rng), rng.Vector(p)};
  ParamVector w = rng.Vector(p);
  TrainSpec spec;
  spec.epochs = 1;
  spec.learning_rate = 0.1;
  ParamVector g = LocalTrain(q, w, Dataset(), spec);
  ParamVector want = 0.1 * (testing::MatVec(q.hessian, w) + q.offset);
  for (int i = 0; i < p; ++i) {
    EXPECT_NEAR(g[static_cast<std::size_t>(i)], want[static_cast<std::size_t>(i)], 1e-10);
  }
}

TEST(LocalTrainTest, ImprovesLossAndIsDeterministic) {
  Dataset d = GenerateSynthetic(10, 20, 30, 1.0, 4);
  ModelKind kind = MultinomialLogistic{20, 10};
  ParamVector w = InitialParams(kind, 4);
  TrainSpec spec;
  spec.seed = 17;
  ParamVector g = LocalTrain(kind, w, d, spec);
  EXPECT_LT(LossOn(kind, w - g, d), LossOn(kind, w, d));
  EXPECT_EQ(g, LocalTrain(kind, w, d, spec));
  spec.seed = 18;
  EXPECT_NE(g, LocalTrain(kind, w, d, spec));
}

TEST(LocalTrainTest, DecayShrinksLaterRounds) {
  Dataset d = GenerateSynthetic(3, 4, 10, 1.0, 1);
  ModelKind kind = MultinomialLogistic{4, 3};
  TrainSpec spec;
  spec.epochs = 1;
  spec.batch_size = 1000;
  spec.decay = 0.5;
  ParamVector w = InitialParams(kind, 1);
  ParamVector g0 = LocalTrain(kind, w, d, spec, 0);
  ParamVector g1 = LocalTrain(kind, w, d, spec, 1);
  for (std::size_t i = 0; i < g0.size(); ++i) EXPECT_NEAR(g1[i], 0.5 * g0[i], 1e-15);
}

TEST(LocalTrainTest, NonFiniteLossReported) {
  Dataset d = GenerateSynthetic(3, 4, 10, 1.0, 1);
  ModelKind kind = MultinomialLogistic{4, 3};
  TrainSpec spec;
  spec.learning_rate = 1e308;
  try {
    LocalTrain(kind, InitialParams(kind, 1), d, spec, 4);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("round 4"), std::string::npos);
  }
}

TEST(AccuracyTest, SingleCorrectSample) {
  Dataset d({3.0, -1.0}, {0}, 2, 2);
  ModelKind kind = MultinomialLogistic{2, 2};
  EXPECT_EQ(AccuracyOn(kind, ParamVector{1, 0, 0, 0, 0, 0}, d), 1.0);
}

TEST(AccuracyTest, FlippedBinaryLabelsComplement) {
  TestRng rng(8);
  Dataset d = GenerateSynthetic(2, 3, 50, 2.0, 8);
  std::vector<int> flipped = d.labels();
  for (int& y : flipped) y = 1 - y;
  Dataset f(d.features(), flipped, 3, 2);
  ModelKind kind = MultinomialLogistic{3, 2};
  for (int trial = 0; trial < 5; ++trial) {
    ParamVector w = rng.Vector(8);
    EXPECT_NEAR(AccuracyOn(kind, w, f), 1.0 - AccuracyOn(kind, w, d), 1e-12);
  }
}

TEST(AccuracyTest, TiesGoToLowestClass) {
  Dataset d({1.0, 1.0}, {0}, 2, 3);
  ModelKind kind = MultinomialLogistic{2, 3};
  ParamVector w(9);
  EXPECT_EQ(Predict(kind, w, d.row(0)), 0);
}

TEST(AccuracyTest, RandomModelNearChance) {
  TestRng rng(9);
  const int n = 20000, C = 5;
  std::vector<double> x;
  std::vector<int> y;
  for (int i = 0; i < n; ++i) {
    x.push_back(rng.Gauss());
    x.push_back(rng.Gauss());
    y.push_back(rng.Int(0, C - 1));
  }
  Dataset d(x, y, 2, C);
  ModelKind kind = MultinomialLogistic{2, C};
  const double acc = AccuracyOn(kind, rng.Vector(15), d);
  const double sd = std::sqrt(0.2 * 0.8 / n);
  EXPECT_NEAR(acc, 0.2, 3 * sd);
}

TEST(AugmentTest, Cases) {
  Dataset d = GenerateSynthetic(3, 4, 5, 1.0, 1);
  EXPECT_EQ(AugmentJitter(d, 0.3, 1, 1), d);
  Dataset dup = AugmentJitter(d, 0.0, 2, 1);
  ASSERT_EQ(dup.size(), 2 * d.size());
  for (int i = 0; i < d.size(); ++i) {
    EXPECT_EQ(dup.label(i + d.size()), d.label(i));
    for (int j = 0; j < 4; ++j) EXPECT_EQ(dup.row(i + d.size())[j], d.row(i)[j]);
  }
  Dataset a = AugmentJitter(d, 0.1, 2, 5);
  EXPECT_EQ(a.size(), 2 * d.size());
  EXPECT_EQ(a, AugmentJitter(d, 0.1, 2, 5));
  EXPECT_NE(a.row(d.size())[0], d.row(0)[0]);
  EXPECT_THROW(AugmentJitter(d, -1, 2, 1), PreconditionError);
}

TEST(DatasetTest, CsvRoundTripAndValidation) {
  Dataset d = GenerateSynthetic(3, 4, 5, 1.0, 1);
  std::stringstream s;
  WriteDatasetCsv(d, s);
  EXPECT_EQ(ReadDatasetCsv(s, 3), d);
  std::istringstream bad_label("f0,f1,label\n0.5,1,7\n");
  EXPECT_THROW(ReadDatasetCsv(bad_label, 3), FormatError);
  std::istringstream bad_header("a,b,c\n");
  EXPECT_THROW(ReadDatasetCsv(bad_header), FormatError);
  EXPECT_THROW(Dataset({1, 2}, {5}, 2, 3), PreconditionError);
}

TEST(DatasetTest, SplitIsDisjointAndSized) {
  Dataset d = GenerateSynthetic(4, 2, 50, 1.0, 1);
  DataSplit s = SplitDataset(d, 0.2, 0.1, 3);
  EXPECT_EQ(s.train.size() + s.validation.size() + s.test.size(), d.size());
  EXPECT_EQ(s.validation.size(), 40);
  EXPECT_EQ(s.test.size(), 20);
}

}  // namespace
}  // namespace acefl
