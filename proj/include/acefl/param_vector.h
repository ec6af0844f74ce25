#ifndef ACEFL_PARAM_VECTOR_H_
#define ACEFL_PARAM_VECTOR_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace acefl {

// Flat model parameter (or model update) vector. All vectors exchanged within
// one experiment share the same length.
//
// Reductions accumulate left to right in index order so that results are
// reproducible bit for bit across runs.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::size_t size, double fill = 0.0)
      : values_(size, fill) {}
  explicit ParamVector(std::vector<double> values)
      : values_(std::move(values)) {}
  ParamVector(std::initializer_list<double> values) : values_(values) {}

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  auto begin() { return values_.begin(); }
  auto end() { return values_.end(); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  std::span<double> span() { return values_; }
  std::span<const double> span() const { return values_; }
  const std::vector<double>& values() const { return values_; }

  ParamVector& operator+=(const ParamVector& other);
  ParamVector& operator-=(const ParamVector& other);
  ParamVector& operator*=(double scale);

  // this += scale * other
  ParamVector& Axpy(double scale, const ParamVector& other);

  bool operator==(const ParamVector& other) const = default;

 private:
  std::vector<double> values_;
};

ParamVector operator+(ParamVector a, const ParamVector& b);
ParamVector operator-(ParamVector a, const ParamVector& b);
ParamVector operator-(ParamVector a);
ParamVector operator*(double scale, ParamVector a);
ParamVector operator*(ParamVector a, double scale);

// Throws DimensionError unless a and b have equal length.
void CheckSameSize(const ParamVector& a, const ParamVector& b);

double Dot(const ParamVector& a, const ParamVector& b);
double Norm(const ParamVector& a);
double SquaredDistance(const ParamVector& a, const ParamVector& b);
double Distance(const ParamVector& a, const ParamVector& b);

// a.b / (|a| |b|), clamped to [-1, 1]. Throws ZeroNormError if either input
// has zero norm; callers decide the fallback.
double CosineSimilarity(const ParamVector& a, const ParamVector& b);

// 1 - CosineSimilarity(a, b), in [0, 2].
double CosineDistance(const ParamVector& a, const ParamVector& b);

// sum_i weights[i] * vectors[i]. Throws on empty input or mismatched lengths.
ParamVector WeightedSum(std::span<const ParamVector> vectors,
                        std::span<const double> weights);

bool AllFinite(const ParamVector& a);

}  // namespace acefl

#endif  // ACEFL_PARAM_VECTOR_H_
