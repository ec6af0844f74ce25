#ifndef ACEFL_RNG_H_
#define ACEFL_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace acefl {

// Derives independent 64-bit seeds from a root seed and a path of integer
// tags (e.g. {kind, client, round}) with SplitMix64 finalization. Streams
// derived from different paths never depend on how many draws another
// stream has consumed, which keeps honest clients' randomness identical
// between attacked and attack-free runs.
std::uint64_t DeriveSeed(std::uint64_t root,
                         std::initializer_list<std::uint64_t> path);

// Stream tags used throughout the library.
enum class Stream : std::uint64_t {
  kData = 1,
  kSplit = 2,
  kPartition = 3,
  kInit = 4,
  kTrain = 5,
  kSelect = 6,
  kAttackNoise = 7,
  kAugment = 8,
  kDefense = 9,
};

// Portable random source. The distributions are implemented here rather than
// taken from <random> because the standard distributions are allowed to
// differ between library implementations; transcripts must not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }
  // Uniform in [0, 1).
  double Uniform();
  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t UniformInt(std::uint64_t bound);
  // Standard normal via the Box-Muller transform.
  double Normal();
  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(UniformInt(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// k distinct values from [0, n), sorted ascending (partial Fisher-Yates).
std::vector<int> SampleWithoutReplacement(int n, int k, Rng& rng);

}  // namespace acefl

#endif  // ACEFL_RNG_H_
