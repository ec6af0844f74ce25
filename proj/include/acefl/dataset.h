#ifndef ACEFL_DATASET_H_
#define ACEFL_DATASET_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace acefl {

// Labeled tabular data: n rows of d features (row-major) and one label in
// [0, num_classes) per row.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<double> features, std::vector<int> labels,
          int num_features, int num_classes);

  int size() const { return static_cast<int>(labels_.size()); }
  int num_features() const { return num_features_; }
  int num_classes() const { return num_classes_; }

  std::span<const double> row(int i) const {
    return {features_.data() + static_cast<std::size_t>(i) * num_features_,
            static_cast<std::size_t>(num_features_)};
  }
  int label(int i) const { return labels_[static_cast<std::size_t>(i)]; }

  const std::vector<double>& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }

  Dataset Subset(std::span<const int> indices) const;
  // Number of distinct labels present.
  int DistinctClassCount() const;
  // Per-class sample counts, length num_classes.
  std::vector<int> ClassHistogram() const;

  bool operator==(const Dataset& other) const = default;

 private:
  std::vector<double> features_;
  std::vector<int> labels_;
  int num_features_ = 0;
  int num_classes_ = 0;
};

// Gaussian class blobs. Class means sit on a fixed lattice scaled by
// kClassSeparation (a repeated one-hot pattern when d >= C, a mixed-radix
// grid otherwise); every feature gets independent N(0, spread^2) noise.
// Rows are emitted class by class.
inline constexpr double kClassSeparation = 2.0;
Dataset GenerateSynthetic(int num_classes, int num_features, int per_class,
                          double spread, std::uint64_t seed);

// Lattice point used as the mean of `label`.
std::vector<double> ClassMean(int label, int num_classes, int num_features);

// Appends (multiplier - 1) jittered copies of every row (Gaussian feature
// noise with the given stddev). multiplier == 1 returns the input unchanged.
Dataset AugmentJitter(const Dataset& data, double noise_std, int multiplier,
                      std::uint64_t seed);

struct DataSplit {
  Dataset train;
  Dataset validation;
  Dataset test;
};

// Stratified per-class split into train / validation / test.
DataSplit SplitDataset(const Dataset& data, double validation_fraction,
                       double test_fraction, std::uint64_t seed);

// CSV with header "f0,...,f{d-1},label".
void WriteDatasetCsv(const Dataset& data, std::ostream& out);
// Throws FormatError on malformed input or labels outside [0, num_classes).
// When num_classes is absent it is taken as max(label) + 1.
Dataset ReadDatasetCsv(std::istream& in,
                       std::optional<int> num_classes = std::nullopt);

}  // namespace acefl

#endif  // ACEFL_DATASET_H_
