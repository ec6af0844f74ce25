#include "acefl/training.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "acefl/error.h"
#include "acefl/rng.h"

namespace acefl {

void ValidateTrainSpec(const TrainSpec& spec) {
  if (spec.epochs < 1) throw PreconditionError("epochs must be >= 1");
  if (spec.batch_size < 1) throw PreconditionError("batch_size must be >= 1");
  if (spec.learning_rate < 0.0) {
    throw PreconditionError("learning rate must be non-negative");
  }
  if (!(spec.decay > 0.0 && spec.decay <= 1.0)) {
    throw PreconditionError("decay must lie in (0, 1]");
  }
}

ParamVector LocalTrain(const ModelKind& kind, const ParamVector& w,
                       const Dataset& data, const TrainSpec& spec,
                       int round_index) {
  ValidateTrainSpec(spec);
  if (static_cast<int>(w.size()) != ParamDim(kind)) {
    throw DimensionError("LocalTrain: parameter length does not match model");
  }
  const double lr = spec.learning_rate * std::pow(spec.decay, round_index);
  if (lr == 0.0) return ParamVector(w.size());
  if (IsClassifier(kind) && data.size() == 0) {
    throw PreconditionError("LocalTrain on an empty dataset");
  }

  Rng rng(spec.seed);
  ParamVector local = w;
  ParamVector grad;
  std::vector<int> order(static_cast<std::size_t>(std::max(data.size(), 1)));
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < spec.epochs; ++epoch) {
    rng.Shuffle(order);
    const int n = static_cast<int>(order.size());
    int batch = 0;
    for (int start = 0; start < n; start += spec.batch_size, ++batch) {
      const int stop = std::min(n, start + spec.batch_size);
      const std::span<const int> rows(order.data() + start,
                                      static_cast<std::size_t>(stop - start));
      const double loss = LossAndGradient(kind, local, data, rows, grad);
      local.Axpy(-lr, grad);
      if (!std::isfinite(loss) || !AllFinite(local)) {
        throw NumericError("non-finite loss in local training (round " +
                           std::to_string(round_index) + ", epoch " +
                           std::to_string(epoch) + ", batch " +
                           std::to_string(batch) + ")");
      }
    }
  }
  return w - local;
}

}  // namespace acefl
