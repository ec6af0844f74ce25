#ifndef ACEFL_LBFGS_H_
#define ACEFL_LBFGS_H_

#include <deque>

#include "acefl/error.h"
#include "acefl/param_vector.h"

namespace acefl {

// Raised when the compact-form middle matrix is singular or too badly
// conditioned to trust, or when the curvature scale is undefined.
class CurvatureError : public NumericError {
 public:
  using NumericError::NumericError;
};

inline constexpr double kMaxCurvatureCondition = 1e12;

// FIFO history of model differences dW and update differences dG, oldest first.
class CurvatureBuffers {
 public:
  explicit CurvatureBuffers(int capacity);

  void Push(ParamVector dw, ParamVector dg);
  int capacity() const { return capacity_; }
  int size() const { return static_cast<int>(dw_.size()); }
  bool empty() const { return dw_.empty(); }
  const std::deque<ParamVector>& dw() const { return dw_; }
  const std::deque<ParamVector>& dg() const { return dg_; }

 private:
  int capacity_;
  std::deque<ParamVector> dw_;
  std::deque<ParamVector> dg_;
};

// Compact L-BFGS approximation of H v from the buffered pairs.
ParamVector LbfgsHvp(const CurvatureBuffers& buffers, const ParamVector& v);

}  // namespace acefl

#endif  // ACEFL_LBFGS_H_
