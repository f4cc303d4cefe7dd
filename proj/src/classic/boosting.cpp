#include <algorithm>
#include <cmath>

#include "absa/error.hpp"
#include "tree_builder.hpp"

namespace absa::classic {

namespace {

ClassScores softmax(const ClassScores& z) {
  const double peak = *std::max_element(z.begin(), z.end());
  ClassScores p{};
  double sum = 0.0;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    p[k] = std::exp(z[k] - peak);
    sum += p[k];
  }
  for (double& v : p) v /= sum;
  return p;
}

}  // namespace

BoostedModel fit_gradient_boosting(std::span<const FeatureVector> X,
                                   std::span<const Polarity> y, const BoostingParams& hp) {
  const std::size_t dim = detail::check_training_set(X, y);
  detail::require_two_classes(y, "gradient boosting");
  if (!(hp.learning_rate > 0.0 && hp.learning_rate <= 1.0)) {
    throw ValidationError("learning rate must lie in (0, 1]");
  }

  const std::size_t n = X.size();
  BoostedModel model;
  model.dim = dim;
  model.learning_rate = hp.learning_rate;
  model.rounds.reserve(hp.n_rounds);

  std::vector<ClassScores> scores(n, ClassScores{});
  std::array<std::vector<double>, kNumClasses> residual;
  for (auto& r : residual) r.resize(n);
  std::vector<std::size_t> all_rows(n);
  for (std::size_t i = 0; i < n; ++i) all_rows[i] = i;

  for (std::size_t round = 0; round < hp.n_rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      const ClassScores p = softmax(scores[i]);
      for (std::size_t k = 0; k < kNumClasses; ++k) {
        residual[k][i] = (class_index(y[i]) == k ? 1.0 : 0.0) - p[k];
      }
    }
    std::array<RegressionTree, kNumClasses> trees;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
      const auto& r = residual[k];
      auto newton_step = [&r](std::span<const std::size_t> rows) {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i : rows) {
          num += r[i];
          den += std::abs(r[i]) * (1.0 - std::abs(r[i]));
        }
        return std::clamp(num / std::max(den, 1e-12), -4.0, 4.0);
      };
      trees[k] = detail::grow_regression_tree(X, r, all_rows, hp.tree, newton_step);
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < kNumClasses; ++k)
        scores[i][k] += hp.learning_rate * trees[k].evaluate(X[i]);
    model.rounds.push_back(std::move(trees));
  }
  return model;
}

ClassScores BoostedModel::scores(const FeatureVector& x, std::size_t round_limit) const {
  ClassScores out{};
  const std::size_t limit = std::min(round_limit, rounds.size());
  for (std::size_t r = 0; r < limit; ++r)
    for (std::size_t k = 0; k < kNumClasses; ++k)
      out[k] += learning_rate * rounds[r][k].evaluate(x);
  return out;
}

}  // namespace absa::classic
