#ifndef ACEFL_PARTITION_H_
#define ACEFL_PARTITION_H_

#include <cstdint>
#include <vector>

#include "acefl/dataset.h"

namespace acefl {

// Disjoint, non-empty index sets into a parent dataset, one per client.
struct Partition {
  std::vector<std::vector<int>> client_indices;

  int num_clients() const { return static_cast<int>(client_indices.size()); }
  std::vector<int> Sizes() const;
};

// Homogeneous split: shuffled, sizes differ by at most one (the last
// n mod N clients receive the extra sample).
Partition PartitionUniform(int n, int num_clients, std::uint64_t seed);

// Client sizes for the power-law partition with shape a > 1. Quantile
// points x_i are spaced evenly between F^-1(0.01) and F^-1(0.99) of
// F(x; a) = x^a; client i gets a share proportional to the density
// f(x_i; a) = a x_i^(a-1), rounded up, and the last client takes the
// remainder. Non-decreasing, sums to n. Throws PreconditionError when a
// client would end up empty.
std::vector<int> PowerLawSizes(int n, int num_clients, double shape);

Partition PartitionPowerLaw(int n, int num_clients, double shape,
                            std::uint64_t seed);

// Class-imbalanced split: client i draws from exactly class_counts[i]
// distinct classes, every client gets the same number of samples (+-1), and
// each client's samples are spread evenly over its classes. Class sets are
// assigned greedily to the least-loaded classes.
Partition PartitionByClass(const Dataset& data,
                           const std::vector<int>& class_counts,
                           std::uint64_t seed);

// Throws PreconditionError unless the sets are non-empty, disjoint and in
// range for a parent of size n.
void ValidatePartition(const Partition& partition, int n);

}  // namespace acefl

#endif  // ACEFL_PARTITION_H_
