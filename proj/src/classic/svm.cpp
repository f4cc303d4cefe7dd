#include <numeric>

#include "absa/error.hpp"
#include "absa/rng.hpp"
#include "tree_builder.hpp"

namespace absa::classic {

namespace {

// One binary Pegasos learner. The weight vector is kept as scale * v so the
// per-step shrink is O(1); the bias rides along as a weight on a constant 1.
struct PegasosLearner {
  std::vector<double> v;
  double v_bias = 0.0;
  double scale = 1.0;

  explicit PegasosLearner(std::size_t dim) : v(dim, 0.0) {}

  double raw_dot(const FeatureVector& x) const {
    double s = v_bias;
    for (const auto& [j, value] : x.entries()) s += v[j] * value;
    return s;
  }

  void step(const FeatureVector& x, double label, double lambda, std::size_t t) {
    const double eta = 1.0 / (lambda * static_cast<double>(t));
    const double margin = label * scale * raw_dot(x);

    scale *= 1.0 - 1.0 / static_cast<double>(t);
    if (scale == 0.0) {
      std::fill(v.begin(), v.end(), 0.0);
      v_bias = 0.0;
      scale = 1.0;
    }
    if (margin < 1.0) {
      const double a = eta * label / scale;
      for (const auto& [j, value] : x.entries()) v[j] += a * value;
      v_bias += a;
    }
  }
};

}  // namespace

LinearSvmModel fit_svm(std::span<const FeatureVector> X, std::span<const Polarity> y,
                       const SvmParams& hp) {
  const std::size_t dim = detail::check_training_set(X, y);
  if (X.size() < 2) throw ValidationError("svm needs at least two training instances");
  detail::require_two_classes(y, "svm");
  if (!(hp.lambda > 0.0)) throw ValidationError("svm lambda must be > 0");

  std::array<PegasosLearner, kNumClasses> learners{PegasosLearner(dim), PegasosLearner(dim),
                                                   PegasosLearner(dim)};
  std::vector<std::size_t> order(X.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(hp.seed);
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    for (std::size_t i : order) {
      ++t;
      for (std::size_t c = 0; c < kNumClasses; ++c) {
        const double label = class_index(y[i]) == c ? 1.0 : -1.0;
        learners[c].step(X[i], label, hp.lambda, t);
      }
    }
  }

  LinearSvmModel model;
  model.dim = dim;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto& l = learners[c];
    model.weights[c].resize(dim);
    for (std::size_t j = 0; j < dim; ++j) model.weights[c][j] = l.scale * l.v[j];
    model.bias[c] = l.scale * l.v_bias;
  }
  return model;
}

ClassScores LinearSvmModel::scores(const FeatureVector& x) const {
  ClassScores out = bias;
  for (std::size_t c = 0; c < kNumClasses; ++c)
    for (const auto& [j, v] : x.entries()) out[c] += weights[c][j] * v;
  return out;
}

}  // namespace absa::classic
