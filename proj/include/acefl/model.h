#ifndef ACEFL_MODEL_H_
#define ACEFL_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "acefl/dataset.h"
#include "acefl/param_vector.h"

namespace acefl {

// Softmax regression. Parameters: weights [C][d] row-major, then biases [C].
struct MultinomialLogistic {
  int num_features = 0;
  int num_classes = 0;
};

// One tanh hidden layer. Parameters: W1 [h][d], b1 [h], W2 [C][h], b2 [C].
struct Mlp1Hidden {
  int num_features = 0;
  int hidden = 0;
  int num_classes = 0;
};

// Data-independent objective 0.5 w'Hw + b'w with a fixed symmetric PSD H.
// Used where tests need the exact Hessian.
struct Quadratic {
  int dim = 0;
  std::vector<double> hessian;  // dim x dim, row-major
  ParamVector offset;           // b

  ParamVector HessianTimes(const ParamVector& v) const;
};

using ModelKind = std::variant<MultinomialLogistic, Mlp1Hidden, Quadratic>;

int ParamDim(const ModelKind& kind);
std::string KindName(const ModelKind& kind);
bool IsClassifier(const ModelKind& kind);

// Small N(0, 0.01^2) initialization (zero for the quadratic kind).
ParamVector InitialParams(const ModelKind& kind, std::uint64_t seed);

// Mean cross-entropy (natural log) over all rows; the quadratic form for the
// quadratic kind.
double LossOn(const ModelKind& kind, const ParamVector& w, const Dataset& data);

// Mean loss over `rows` and its gradient, written to `grad` (resized).
double LossAndGradient(const ModelKind& kind, const ParamVector& w,
                       const Dataset& data, std::span<const int> rows,
                       ParamVector& grad);

// Argmax class, ties to the lowest index.
int Predict(const ModelKind& kind, const ParamVector& w,
            std::span<const double> features);

// Fraction of rows predicted correctly. Throws PreconditionError for the
// quadratic kind, which has no notion of a class.
double AccuracyOn(const ModelKind& kind, const ParamVector& w,
                  const Dataset& data);

}  // namespace acefl

#endif  // ACEFL_MODEL_H_
