#include "acefl/param_vector.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "acefl/error.h"

namespace acefl {

void CheckSameSize(const ParamVector& a, const ParamVector& b) {
  if (a.size() != b.size()) {
    throw DimensionError("vector length mismatch: " + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()));
  }
}

ParamVector& ParamVector::operator+=(const ParamVector& other) {
  CheckSameSize(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other[i];
  return *this;
}

ParamVector& ParamVector::operator-=(const ParamVector& other) {
  CheckSameSize(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other[i];
  return *this;
}

ParamVector& ParamVector::operator*=(double scale) {
  for (double& v : values_) v *= scale;
  return *this;
}

ParamVector& ParamVector::Axpy(double scale, const ParamVector& other) {
  CheckSameSize(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i] += scale * other[i];
  }
  return *this;
}

ParamVector operator+(ParamVector a, const ParamVector& b) { return a += b; }
ParamVector operator-(ParamVector a, const ParamVector& b) { return a -= b; }
ParamVector operator-(ParamVector a) { return a *= -1.0; }
ParamVector operator*(double scale, ParamVector a) { return a *= scale; }
ParamVector operator*(ParamVector a, double scale) { return a *= scale; }

double Dot(const ParamVector& a, const ParamVector& b) {
  CheckSameSize(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double Norm(const ParamVector& a) {
  double sum = 0.0;
  for (double v : a) sum += v * v;
  return std::sqrt(sum);
}

double SquaredDistance(const ParamVector& a, const ParamVector& b) {
  CheckSameSize(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

double Distance(const ParamVector& a, const ParamVector& b) {
  return std::sqrt(SquaredDistance(a, b));
}

double CosineSimilarity(const ParamVector& a, const ParamVector& b) {
  CheckSameSize(a, b);
  const double na = Norm(a);
  const double nb = Norm(b);
  if (na == 0.0 || nb == 0.0) {
    throw ZeroNormError("cosine similarity of a zero-norm vector");
  }
  return std::clamp(Dot(a, b) / (na * nb), -1.0, 1.0);
}

double CosineDistance(const ParamVector& a, const ParamVector& b) {
  return 1.0 - CosineSimilarity(a, b);
}

ParamVector WeightedSum(std::span<const ParamVector> vectors,
                        std::span<const double> weights) {
  if (vectors.empty()) throw PreconditionError("weighted sum of no vectors");
  if (vectors.size() != weights.size()) {
    throw DimensionError("weighted sum: " + std::to_string(vectors.size()) +
                         " vectors but " + std::to_string(weights.size()) +
                         " weights");
  }
  ParamVector out(vectors.front().size());
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    out.Axpy(weights[k], vectors[k]);
  }
  return out;
}

bool AllFinite(const ParamVector& a) {
  return std::all_of(a.begin(), a.end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace acefl
