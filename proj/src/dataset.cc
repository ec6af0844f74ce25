#include "acefl/dataset.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "acefl/error.h"
#include "acefl/rng.h"

namespace acefl {

Dataset::Dataset(std::vector<double> features, std::vector<int> labels,
                 int num_features, int num_classes)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      num_features_(num_features),
      num_classes_(num_classes) {
  if (num_features_ < 1 || num_classes_ < 1) {
    throw PreconditionError("dataset needs >= 1 feature and >= 1 class");
  }
  if (features_.size() != labels_.size() * num_features_) {
    throw DimensionError("feature matrix does not match label count");
  }
  for (int y : labels_) {
    if (y < 0 || y >= num_classes_) {
      throw PreconditionError("label " + std::to_string(y) +
                              " outside [0, " + std::to_string(num_classes_) +
                              ")");
    }
  }
  for (double v : features_) {
    if (!std::isfinite(v)) throw NumericError("non-finite feature value");
  }
}

Dataset Dataset::Subset(std::span<const int> indices) const {
  std::vector<double> features;
  std::vector<int> labels;
  features.reserve(indices.size() * num_features_);
  labels.reserve(indices.size());
  for (int i : indices) {
    if (i < 0 || i >= size()) throw PreconditionError("subset index range");
    auto r = row(i);
    features.insert(features.end(), r.begin(), r.end());
    labels.push_back(label(i));
  }
  return Dataset(std::move(features), std::move(labels), num_features_,
                 num_classes_);
}

std::vector<int> Dataset::ClassHistogram() const {
  std::vector<int> counts(static_cast<std::size_t>(num_classes_), 0);
  for (int y : labels_) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

int Dataset::DistinctClassCount() const {
  const auto counts = ClassHistogram();
  return static_cast<int>(
      std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; }));
}

std::vector<double> ClassMean(int label, int num_classes, int num_features) {
  std::vector<double> mean(static_cast<std::size_t>(num_features), 0.0);
  if (num_features >= num_classes) {
    for (int j = 0; j < num_features; ++j) {
      if (j % num_classes == label) mean[j] = kClassSeparation;
    }
    return mean;
  }
  int radix = 2;
  while (std::pow(radix, num_features) < num_classes) ++radix;
  int code = label;
  for (int j = 0; j < num_features; ++j) {
    mean[j] = kClassSeparation * (code % radix);
    code /= radix;
  }
  return mean;
}

Dataset GenerateSynthetic(int num_classes, int num_features, int per_class,
                          double spread, std::uint64_t seed) {
  if (num_classes < 2 || num_features < 2 || per_class < 1 || spread < 0.0) {
    throw PreconditionError(
        "GenerateSynthetic needs C >= 2, d >= 2, per_class >= 1, spread >= 0");
  }
  Rng rng(DeriveSeed(seed, {static_cast<std::uint64_t>(Stream::kData)}));
  std::vector<double> features;
  std::vector<int> labels;
  features.reserve(static_cast<std::size_t>(num_classes) * per_class *
                   num_features);
  for (int c = 0; c < num_classes; ++c) {
    const auto mean = ClassMean(c, num_classes, num_features);
    for (int k = 0; k < per_class; ++k) {
      for (int j = 0; j < num_features; ++j) {
        features.push_back(mean[j] + spread * rng.Normal());
      }
      labels.push_back(c);
    }
  }
  return Dataset(std::move(features), std::move(labels), num_features,
                 num_classes);
}

Dataset AugmentJitter(const Dataset& data, double noise_std, int multiplier,
                      std::uint64_t seed) {
  if (noise_std < 0.0 || multiplier < 1) {
    throw PreconditionError("AugmentJitter needs noise_std >= 0, multiplier >= 1");
  }
  if (multiplier == 1) return data;
  Rng rng(DeriveSeed(seed, {static_cast<std::uint64_t>(Stream::kAugment)}));
  std::vector<double> features = data.features();
  std::vector<int> labels = data.labels();
  for (int copy = 1; copy < multiplier; ++copy) {
    for (int i = 0; i < data.size(); ++i) {
      for (double v : data.row(i)) features.push_back(v + noise_std * rng.Normal());
      labels.push_back(data.label(i));
    }
  }
  return Dataset(std::move(features), std::move(labels), data.num_features(),
                 data.num_classes());
}

DataSplit SplitDataset(const Dataset& data, double validation_fraction,
                       double test_fraction, std::uint64_t seed) {
  if (validation_fraction < 0.0 || test_fraction < 0.0 ||
      validation_fraction + test_fraction >= 1.0) {
    throw PreconditionError("split fractions must be >= 0 and sum below 1");
  }
  Rng rng(DeriveSeed(seed, {static_cast<std::uint64_t>(Stream::kSplit)}));
  std::vector<std::vector<int>> by_class(
      static_cast<std::size_t>(data.num_classes()));
  for (int i = 0; i < data.size(); ++i) {
    by_class[static_cast<std::size_t>(data.label(i))].push_back(i);
  }
  std::vector<int> train, validation, test;
  for (auto& members : by_class) {
    rng.Shuffle(members);
    const auto n = static_cast<double>(members.size());
    const auto n_test = static_cast<std::size_t>(std::lround(n * test_fraction));
    const auto n_val =
        static_cast<std::size_t>(std::lround(n * validation_fraction));
    for (std::size_t k = 0; k < members.size(); ++k) {
      if (k < n_test) {
        test.push_back(members[k]);
      } else if (k < n_test + n_val) {
        validation.push_back(members[k]);
      } else {
        train.push_back(members[k]);
      }
    }
  }
  std::sort(train.begin(), train.end());
  std::sort(validation.begin(), validation.end());
  std::sort(test.begin(), test.end());
  return {data.Subset(train), data.Subset(validation), data.Subset(test)};
}

void WriteDatasetCsv(const Dataset& data, std::ostream& out) {
  for (int j = 0; j < data.num_features(); ++j) out << 'f' << j << ',';
  out << "label\n";
  char buf[32];
  for (int i = 0; i < data.size(); ++i) {
    for (double v : data.row(i)) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << buf << ',';
    }
    out << data.label(i) << '\n';
  }
}

namespace {

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string StripCr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

Dataset ReadDatasetCsv(std::istream& in, std::optional<int> num_classes) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty dataset CSV");
  const auto header = SplitCsvLine(StripCr(line));
  if (header.size() < 2 || header.back() != "label") {
    throw FormatError("CSV header must end with 'label'");
  }
  const int d = static_cast<int>(header.size()) - 1;
  for (int j = 0; j < d; ++j) {
    if (header[j] != "f" + std::to_string(j)) {
      throw FormatError("unexpected CSV header column '" + header[j] + "'");
    }
  }
  std::vector<double> features;
  std::vector<int> labels;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = StripCr(line);
    if (line.empty()) continue;
    const auto cells = SplitCsvLine(line);
    if (static_cast<int>(cells.size()) != d + 1) {
      throw FormatError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(d + 1) + " cells");
    }
    try {
      for (int j = 0; j < d; ++j) {
        std::size_t used = 0;
        features.push_back(std::stod(cells[j], &used));
        if (used != cells[j].size()) throw std::invalid_argument("trailing");
      }
      std::size_t used = 0;
      labels.push_back(std::stoi(cells[d], &used));
      if (used != cells[d].size()) throw std::invalid_argument("trailing");
    } catch (const std::logic_error&) {
      throw FormatError("line " + std::to_string(line_no) + ": bad number");
    }
    if (labels.back() < 0 || (num_classes && labels.back() >= *num_classes)) {
      throw FormatError("line " + std::to_string(line_no) + ": label " +
                        std::to_string(labels.back()) + " out of range");
    }
  }
  if (labels.empty()) throw FormatError("dataset CSV has no rows");
  const int classes =
      num_classes.value_or(*std::max_element(labels.begin(), labels.end()) + 1);
  return Dataset(std::move(features), std::move(labels), d, classes);
}

}  // namespace acefl
