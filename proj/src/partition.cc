#include "acefl/partition.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "acefl/error.h"
#include "acefl/rng.h"

namespace acefl {
namespace {

std::vector<int> ShuffledRange(int n, std::uint64_t seed) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(DeriveSeed(seed, {static_cast<std::uint64_t>(Stream::kPartition)}));
  rng.Shuffle(order);
  return order;
}

Partition ChunkBySizes(const std::vector<int>& order,
                       const std::vector<int>& sizes) {
  Partition out;
  std::size_t cursor = 0;
  for (int s : sizes) {
    std::vector<int> members(order.begin() + cursor,
                             order.begin() + cursor + s);
    std::sort(members.begin(), members.end());
    out.client_indices.push_back(std::move(members));
    cursor += static_cast<std::size_t>(s);
  }
  return out;
}

}  // namespace

std::vector<int> Partition::Sizes() const {
  std::vector<int> sizes;
  for (const auto& c : client_indices) sizes.push_back(static_cast<int>(c.size()));
  return sizes;
}

Partition PartitionUniform(int n, int num_clients, std::uint64_t seed) {
  if (num_clients < 1 || n < num_clients) {
    throw PreconditionError("uniform partition needs n >= N >= 1");
  }
  std::vector<int> sizes(static_cast<std::size_t>(num_clients),
                         n / num_clients);
  const int extra = n % num_clients;
  for (int i = num_clients - extra; i < num_clients; ++i) ++sizes[i];
  return ChunkBySizes(ShuffledRange(n, seed), sizes);
}

std::vector<int> PowerLawSizes(int n, int num_clients, double shape) {
  if (num_clients < 1 || n < num_clients) {
    throw PreconditionError("power-law partition needs n >= N >= 1");
  }
  if (!(shape > 1.0)) throw PreconditionError("power-law shape must exceed 1");
  const double lo = std::pow(0.01, 1.0 / shape);
  const double hi = std::pow(0.99, 1.0 / shape);
  std::vector<double> density(static_cast<std::size_t>(num_clients));
  for (int i = 0; i < num_clients; ++i) {
    const double x =
        num_clients == 1 ? lo : lo + (hi - lo) * i / (num_clients - 1);
    density[i] = shape * std::pow(x, shape - 1.0);
  }
  const double total = std::accumulate(density.begin(), density.end(), 0.0);
  std::vector<int> sizes;
  long assigned = 0;
  for (int i = 0; i + 1 < num_clients; ++i) {
    sizes.push_back(static_cast<int>(std::ceil(n * density[i] / total)));
    assigned += sizes.back();
  }
  sizes.push_back(static_cast<int>(n - assigned));
  if (!std::is_sorted(sizes.begin(), sizes.end())) {
    // Small n: ceil starves the last client. Largest remainder keeps order.
    sizes.assign(static_cast<std::size_t>(num_clients), 0);
    std::vector<std::pair<double, int>> remainders;
    assigned = 0;
    for (int i = 0; i < num_clients; ++i) {
      const double exact = n * density[i] / total;
      sizes[i] = static_cast<int>(std::floor(exact));
      assigned += sizes[i];
      remainders.emplace_back(exact - sizes[i], i);
    }
    // Larger remainder first; on ties the larger index, so order survives.
    std::sort(remainders.begin(), remainders.end(),
              [](const auto& a, const auto& b) {
                return a.first != b.first ? a.first > b.first : a.second > b.second;
              });
    for (long k = 0; k < n - assigned; ++k) ++sizes[remainders[k].second];
  }
  for (int s : sizes) {
    if (s < 1) {
      throw PreconditionError("power-law partition infeasible: a client of " +
                              std::to_string(num_clients) + " would get " +
                              std::to_string(s) + " samples");
    }
  }
  return sizes;
}

Partition PartitionPowerLaw(int n, int num_clients, double shape,
                            std::uint64_t seed) {
  return ChunkBySizes(ShuffledRange(n, seed),
                      PowerLawSizes(n, num_clients, shape));
}

Partition PartitionByClass(const Dataset& data,
                           const std::vector<int>& class_counts,
                           std::uint64_t seed) {
  const int num_classes = data.num_classes();
  const int num_clients = static_cast<int>(class_counts.size());
  if (num_clients < 1) throw PreconditionError("class schedule is empty");
  for (int k : class_counts) {
    if (k < 1 || k > num_classes) {
      throw PreconditionError("class count " + std::to_string(k) +
                              " outside [1, " + std::to_string(num_classes) +
                              "]");
    }
  }
  Rng rng(DeriveSeed(seed, {static_cast<std::uint64_t>(Stream::kPartition)}));
  std::vector<std::vector<int>> pools(static_cast<std::size_t>(num_classes));
  for (int i = 0; i < data.size(); ++i) pools[data.label(i)].push_back(i);
  for (auto& pool : pools) rng.Shuffle(pool);

  // Class sets: each client takes the classes carrying the least load
  // (sum of 1/k over clients already holding them); a seeded permutation
  // breaks ties so that equal loads don't always favour class 0.
  std::vector<int> tie_order(static_cast<std::size_t>(num_classes));
  std::iota(tie_order.begin(), tie_order.end(), 0);
  rng.Shuffle(tie_order);
  std::vector<double> load(static_cast<std::size_t>(num_classes), 0.0);
  std::vector<std::vector<int>> client_classes(
      static_cast<std::size_t>(num_clients));
  for (int i = 0; i < num_clients; ++i) {
    std::vector<int> order = tie_order;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return load[a] < load[b]; });
    order.resize(static_cast<std::size_t>(class_counts[i]));
    std::sort(order.begin(), order.end());
    for (int c : order) load[c] += 1.0 / class_counts[i];
    client_classes[i] = std::move(order);
  }

  // Largest common per-client size S such that quotas fit every class pool.
  // Quota of client i in class c is S / k_i, remainders going to the
  // client's first classes.
  auto quotas_for = [&](int total) {
    std::vector<std::vector<int>> quotas(static_cast<std::size_t>(num_clients));
    for (int i = 0; i < num_clients; ++i) {
      const int k = class_counts[i];
      for (int j = 0; j < k; ++j) quotas[i].push_back(total / k + (j < total % k));
    }
    return quotas;
  };
  auto fits = [&](const std::vector<std::vector<int>>& quotas) {
    std::vector<int> demand(static_cast<std::size_t>(num_classes), 0);
    for (int i = 0; i < num_clients; ++i) {
      for (std::size_t j = 0; j < client_classes[i].size(); ++j) {
        demand[client_classes[i][j]] += quotas[i][j];
      }
    }
    for (int c = 0; c < num_classes; ++c) {
      if (demand[c] > static_cast<int>(pools[c].size())) return false;
    }
    return true;
  };
  int lo = *std::max_element(class_counts.begin(), class_counts.end());
  if (!fits(quotas_for(lo))) {
    throw PreconditionError(
        "class schedule infeasible: not enough samples per class");
  }
  int hi = data.size() / num_clients;
  while (lo < hi) {
    const int mid = lo + (hi - lo + 1) / 2;
    if (fits(quotas_for(mid))) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  const auto quotas = quotas_for(lo);

  Partition out;
  std::vector<std::size_t> cursor(static_cast<std::size_t>(num_classes), 0);
  for (int i = 0; i < num_clients; ++i) {
    std::vector<int> members;
    for (std::size_t j = 0; j < client_classes[i].size(); ++j) {
      const int c = client_classes[i][j];
      for (int q = 0; q < quotas[i][j]; ++q) {
        members.push_back(pools[c][cursor[c]++]);
      }
    }
    std::sort(members.begin(), members.end());
    out.client_indices.push_back(std::move(members));
  }
  return out;
}

void ValidatePartition(const Partition& partition, int n) {
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (const auto& members : partition.client_indices) {
    if (members.empty()) throw PreconditionError("partition has an empty client");
    for (int i : members) {
      if (i < 0 || i >= n) throw PreconditionError("partition index out of range");
      if (seen[i]) throw PreconditionError("partition sets overlap");
      seen[i] = 1;
    }
  }
}

}  // namespace acefl
