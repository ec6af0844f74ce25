#include "acefl/model.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "acefl/error.h"
#include "acefl/rng.h"

namespace acefl {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void CheckDim(const ModelKind& kind, const ParamVector& w) {
  if (static_cast<int>(w.size()) != ParamDim(kind)) {
    throw DimensionError("parameter vector has length " +
                         std::to_string(w.size()) + ", model " +
                         KindName(kind) + " expects " +
                         std::to_string(ParamDim(kind)));
  }
}

void CheckFeatures(int expected, const Dataset& data) {
  if (data.num_features() != expected) {
    throw DimensionError("dataset has " + std::to_string(data.num_features()) +
                         " features, model expects " + std::to_string(expected));
  }
}

// Logits of a softmax regression for one row.
void LogisticLogits(const MultinomialLogistic& m, const double* w,
                    std::span<const double> x, std::vector<double>& z) {
  const int d = m.num_features;
  const double* bias = w + static_cast<std::size_t>(m.num_classes) * d;
  z.resize(static_cast<std::size_t>(m.num_classes));
  for (int k = 0; k < m.num_classes; ++k) {
    const double* wk = w + static_cast<std::size_t>(k) * d;
    double s = bias[k];
    for (int j = 0; j < d; ++j) s += wk[j] * x[j];
    z[k] = s;
  }
}

struct MlpLayout {
  std::size_t w1, b1, w2, b2;
};

MlpLayout Layout(const Mlp1Hidden& m) {
  const auto d = static_cast<std::size_t>(m.num_features);
  const auto h = static_cast<std::size_t>(m.hidden);
  const auto c = static_cast<std::size_t>(m.num_classes);
  return {0, h * d, h * d + h, h * d + h + c * h};
}

void MlpForward(const Mlp1Hidden& m, const double* w, std::span<const double> x,
                std::vector<double>& hidden, std::vector<double>& z) {
  const MlpLayout L = Layout(m);
  hidden.resize(static_cast<std::size_t>(m.hidden));
  for (int u = 0; u < m.hidden; ++u) {
    const double* wu = w + L.w1 + static_cast<std::size_t>(u) * m.num_features;
    double s = w[L.b1 + u];
    for (int j = 0; j < m.num_features; ++j) s += wu[j] * x[j];
    hidden[u] = std::tanh(s);
  }
  z.resize(static_cast<std::size_t>(m.num_classes));
  for (int k = 0; k < m.num_classes; ++k) {
    const double* wk = w + L.w2 + static_cast<std::size_t>(k) * m.hidden;
    double s = w[L.b2 + k];
    for (int u = 0; u < m.hidden; ++u) s += wk[u] * hidden[u];
    z[k] = s;
  }
}

// Turns logits into probabilities in place; returns -log p[label].
double SoftmaxCrossEntropy(std::vector<double>& z, int label) {
  const double zmax = *std::max_element(z.begin(), z.end());
  const double label_shifted = z[label] - zmax;
  double denom = 0.0;
  for (double& v : z) {
    v = std::exp(v - zmax);
    denom += v;
  }
  for (double& v : z) v /= denom;
  return std::log(denom) - label_shifted;
}

int ArgMax(const std::vector<double>& z) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(z.size()); ++k) {
    if (z[k] > z[best]) best = k;
  }
  return best;
}

double QuadraticValue(const Quadratic& q, const ParamVector& w) {
  return 0.5 * Dot(w, q.HessianTimes(w)) + Dot(q.offset, w);
}

}  // namespace

ParamVector Quadratic::HessianTimes(const ParamVector& v) const {
  if (static_cast<int>(v.size()) != dim) throw DimensionError("quadratic dim");
  ParamVector out(v.size());
  for (int i = 0; i < dim; ++i) {
    double s = 0.0;
    const double* row = hessian.data() + static_cast<std::size_t>(i) * dim;
    for (int j = 0; j < dim; ++j) s += row[j] * v[j];
    out[i] = s;
  }
  return out;
}

int ParamDim(const ModelKind& kind) {
  return std::visit(
      Overloaded{
          [](const MultinomialLogistic& m) {
            return m.num_classes * (m.num_features + 1);
          },
          [](const Mlp1Hidden& m) {
            return m.hidden * (m.num_features + 1) +
                   m.num_classes * (m.hidden + 1);
          },
          [](const Quadratic& q) { return q.dim; },
      },
      kind);
}

std::string KindName(const ModelKind& kind) {
  return std::visit(
      Overloaded{
          [](const MultinomialLogistic&) { return std::string("logistic"); },
          [](const Mlp1Hidden&) { return std::string("mlp"); },
          [](const Quadratic&) { return std::string("quadratic"); },
      },
      kind);
}

bool IsClassifier(const ModelKind& kind) {
  return !std::holds_alternative<Quadratic>(kind);
}

ParamVector InitialParams(const ModelKind& kind, std::uint64_t seed) {
  ParamVector w(static_cast<std::size_t>(ParamDim(kind)));
  if (!IsClassifier(kind)) return w;
  Rng rng(DeriveSeed(seed, {static_cast<std::uint64_t>(Stream::kInit)}));
  for (double& v : w) v = 0.01 * rng.Normal();
  return w;
}

double LossAndGradient(const ModelKind& kind, const ParamVector& w,
                       const Dataset& data, std::span<const int> rows,
                       ParamVector& grad) {
  CheckDim(kind, w);
  grad = ParamVector(w.size());
  if (const auto* q = std::get_if<Quadratic>(&kind)) {
    grad = q->HessianTimes(w) + q->offset;
    return QuadraticValue(*q, w);
  }
  if (rows.empty()) return 0.0;
  double loss = 0.0;
  std::vector<double> z, hidden, delta_hidden;
  if (const auto* m = std::get_if<MultinomialLogistic>(&kind)) {
    CheckFeatures(m->num_features, data);
    const int d = m->num_features;
    double* gw = grad.data();
    double* gb = gw + static_cast<std::size_t>(m->num_classes) * d;
    for (int r : rows) {
      const auto x = data.row(r);
      LogisticLogits(*m, w.data(), x, z);
      loss += SoftmaxCrossEntropy(z, data.label(r));
      for (int k = 0; k < m->num_classes; ++k) {
        const double delta = z[k] - (k == data.label(r) ? 1.0 : 0.0);
        gb[k] += delta;
        double* gk = gw + static_cast<std::size_t>(k) * d;
        for (int j = 0; j < d; ++j) gk[j] += delta * x[j];
      }
    }
  } else {
    const auto& mlp = std::get<Mlp1Hidden>(kind);
    CheckFeatures(mlp.num_features, data);
    const MlpLayout L = Layout(mlp);
    double* g = grad.data();
    delta_hidden.resize(static_cast<std::size_t>(mlp.hidden));
    for (int r : rows) {
      const auto x = data.row(r);
      MlpForward(mlp, w.data(), x, hidden, z);
      loss += SoftmaxCrossEntropy(z, data.label(r));
      std::fill(delta_hidden.begin(), delta_hidden.end(), 0.0);
      for (int k = 0; k < mlp.num_classes; ++k) {
        const double delta = z[k] - (k == data.label(r) ? 1.0 : 0.0);
        g[L.b2 + k] += delta;
        const double* wk = w.data() + L.w2 + static_cast<std::size_t>(k) * mlp.hidden;
        double* gk = g + L.w2 + static_cast<std::size_t>(k) * mlp.hidden;
        for (int u = 0; u < mlp.hidden; ++u) {
          gk[u] += delta * hidden[u];
          delta_hidden[u] += delta * wk[u];
        }
      }
      for (int u = 0; u < mlp.hidden; ++u) {
        const double pre = delta_hidden[u] * (1.0 - hidden[u] * hidden[u]);
        g[L.b1 + u] += pre;
        double* gu = g + L.w1 + static_cast<std::size_t>(u) * mlp.num_features;
        for (int j = 0; j < mlp.num_features; ++j) gu[j] += pre * x[j];
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  grad *= inv;
  return loss * inv;
}

double LossOn(const ModelKind& kind, const ParamVector& w, const Dataset& data) {
  CheckDim(kind, w);
  if (const auto* q = std::get_if<Quadratic>(&kind)) return QuadraticValue(*q, w);
  if (data.size() == 0) return 0.0;
  double loss = 0.0;
  std::vector<double> z, hidden;
  for (int r = 0; r < data.size(); ++r) {
    if (const auto* m = std::get_if<MultinomialLogistic>(&kind)) {
      CheckFeatures(m->num_features, data);
      LogisticLogits(*m, w.data(), data.row(r), z);
    } else {
      const auto& mlp = std::get<Mlp1Hidden>(kind);
      CheckFeatures(mlp.num_features, data);
      MlpForward(mlp, w.data(), data.row(r), hidden, z);
    }
    loss += SoftmaxCrossEntropy(z, data.label(r));
  }
  return loss / data.size();
}

int Predict(const ModelKind& kind, const ParamVector& w,
            std::span<const double> features) {
  CheckDim(kind, w);
  std::vector<double> z, hidden;
  if (const auto* m = std::get_if<MultinomialLogistic>(&kind)) {
    LogisticLogits(*m, w.data(), features, z);
  } else if (const auto* mlp = std::get_if<Mlp1Hidden>(&kind)) {
    MlpForward(*mlp, w.data(), features, hidden, z);
  } else {
    throw PreconditionError("quadratic model has no class prediction");
  }
  return ArgMax(z);
}

double AccuracyOn(const ModelKind& kind, const ParamVector& w,
                  const Dataset& data) {
  if (!IsClassifier(kind)) {
    throw PreconditionError("accuracy is undefined for the quadratic kind");
  }
  if (data.size() == 0) return 0.0;
  int correct = 0;
  for (int r = 0; r < data.size(); ++r) {
    if (Predict(kind, w, data.row(r)) == data.label(r)) ++correct;
  }
  return static_cast<double>(correct) / data.size();
}

}  // namespace acefl
