#ifndef ACEFL_TRAINING_H_
#define ACEFL_TRAINING_H_

#include <cstdint>

#include "acefl/dataset.h"
#include "acefl/model.h"
#include "acefl/param_vector.h"

namespace acefl {

struct TrainSpec {
  int epochs = 3;
  double learning_rate = 0.05;
  // Per-round exponential decay: the step size in round r is lr * decay^r.
  double decay = 0.995;
  int batch_size = 32;
  std::uint64_t seed = 0;
};

void ValidateTrainSpec(const TrainSpec& spec);

// Runs spec.epochs epochs of mini-batch SGD from w on `data` and returns the
// local model update g = w - w_after. Rows are reshuffled every epoch
// (Fisher-Yates, seeded by spec.seed). round_index (0-based) selects the
// decayed learning rate. Throws NumericError with epoch/batch context if the
// loss or parameters become non-finite.
ParamVector LocalTrain(const ModelKind& kind, const ParamVector& w,
                       const Dataset& data, const TrainSpec& spec,
                       int round_index = 0);

}  // namespace acefl

#endif  // ACEFL_TRAINING_H_
