#include "acefl/lbfgs.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace acefl {
namespace {

using Matrix = std::vector<std::vector<double>>;

double OneNorm(const Matrix& a) {
  const std::size_t n = a.size();
  double best = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < n; ++i) col += std::abs(a[i][j]);
    best = std::max(best, col);
  }
  return best;
}

// Gauss-Jordan with partial pivoting on [a | rhs | I]. Returns the solution
// and leaves the inverse in `inverse`.
std::vector<double> SolveWithInverse(Matrix a, std::vector<double> rhs,
                                     Matrix& inverse) {
  const std::size_t n = a.size();
  inverse.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inverse[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (a[pivot][col] == 0.0 || !std::isfinite(a[pivot][col])) {
      throw CurvatureError("L-BFGS middle matrix is singular");
    }
    std::swap(a[col], a[pivot]);
    std::swap(inverse[col], inverse[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    const double inv_pivot = 1.0 / a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] *= inv_pivot;
      inverse[col][j] *= inv_pivot;
    }
    rhs[col] *= inv_pivot;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0.0) continue;
      const double f = a[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inverse[r][j] -= f * inverse[col][j];
      }
      rhs[r] -= f * rhs[col];
    }
  }
  return rhs;
}

}  // namespace

CurvatureBuffers::CurvatureBuffers(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw PreconditionError("buffer capacity must be >= 1");
}

void CurvatureBuffers::Push(ParamVector dw, ParamVector dg) {
  CheckSameSize(dw, dg);
  if (!dw_.empty()) CheckSameSize(dw, dw_.front());
  dw_.push_back(std::move(dw));
  dg_.push_back(std::move(dg));
  if (size() > capacity_) {
    dw_.pop_front();
    dg_.pop_front();
  }
}

ParamVector LbfgsHvp(const CurvatureBuffers& buffers, const ParamVector& v) {
  if (buffers.empty()) throw PreconditionError("L-BFGS needs buffered pairs");
  const auto& s = buffers.dw();
  const auto& y = buffers.dg();
  CheckSameSize(s.front(), v);
  const std::size_t m = s.size();

  const double ss_last = Dot(s.back(), s.back());
  if (ss_last == 0.0) throw CurvatureError("L-BFGS: newest dW is zero");
  const double sigma = Dot(y.back(), s.back()) / ss_last;

  // A = S^T Y, so A[i][j] = s_i . y_j.
  Matrix a(m, std::vector<double>(m));
  Matrix sts(m, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      a[i][j] = Dot(s[i], y[j]);
      sts[i][j] = Dot(s[i], s[j]);
    }
  }
  Matrix middle(2 * m, std::vector<double>(2 * m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    middle[i][i] = -a[i][i];
    for (std::size_t j = 0; j < m; ++j) {
      const double lower = i > j ? a[i][j] : 0.0;
      middle[m + i][j] = lower;    // L
      middle[j][m + i] = lower;    // L^T
      middle[m + i][m + j] = sigma * sts[i][j];
    }
  }
  std::vector<double> rhs(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    rhs[i] = Dot(y[i], v);
    rhs[m + i] = sigma * Dot(s[i], v);
  }

  Matrix inverse;
  const std::vector<double> p = SolveWithInverse(middle, rhs, inverse);
  const double condition = OneNorm(middle) * OneNorm(inverse);
  if (!std::isfinite(condition) || condition > kMaxCurvatureCondition) {
    throw CurvatureError("L-BFGS middle matrix ill-conditioned (cond " +
                         std::to_string(condition) + ")");
  }

  ParamVector out = sigma * v;
  for (std::size_t i = 0; i < m; ++i) {
    out.Axpy(-p[i], y[i]);
    out.Axpy(-sigma * p[m + i], s[i]);
  }
  if (!AllFinite(out)) throw CurvatureError("L-BFGS produced non-finite output");
  return out;
}

}  // namespace acefl
