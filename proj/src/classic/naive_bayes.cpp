#include <cmath>
#include <limits>

#include "absa/error.hpp"
#include "tree_builder.hpp"

namespace absa::classic {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

NaiveBayesModel fit_naive_bayes(std::span<const FeatureVector> X, std::span<const Polarity> y,
                                double alpha) {
  const std::size_t dim = detail::check_training_set(X, y);
  if (!(alpha > 0.0)) throw ValidationError("naive Bayes smoothing alpha must be > 0");

  std::array<std::vector<double>, kNumClasses> counts;
  for (auto& c : counts) c.assign(dim, 0.0);
  ClassScores totals{};
  ClassScores docs{};
  for (std::size_t i = 0; i < X.size(); ++i) {
    const std::size_t c = class_index(y[i]);
    docs[c] += 1.0;
    for (const auto& [j, v] : X[i].entries()) {
      if (v < 0.0) {
        throw ValidationError("naive Bayes needs non-negative features (row " +
                              std::to_string(i) + ", feature " + std::to_string(j) + ")");
      }
      counts[c][j] += v;
      totals[c] += v;
    }
  }

  NaiveBayesModel model;
  model.dim = dim;
  const double n = static_cast<double>(X.size());
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    model.log_prior[c] = docs[c] > 0.0 ? std::log(docs[c] / n) : kNegInf;
    const double denom = totals[c] + alpha * static_cast<double>(dim);
    auto& ll = model.log_likelihood[c];
    ll.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) ll[j] = std::log((counts[c][j] + alpha) / denom);
  }
  return model;
}

ClassScores NaiveBayesModel::log_joint(const FeatureVector& x) const {
  ClassScores out = log_prior;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (out[c] == kNegInf) continue;
    for (const auto& [j, v] : x.entries()) out[c] += v * log_likelihood[c][j];
  }
  return out;
}

ClassScores NaiveBayesModel::log_posterior(const FeatureVector& x) const {
  ClassScores joint = log_joint(x);
  double peak = kNegInf;
  for (double v : joint) peak = std::max(peak, v);
  double sum = 0.0;
  for (double v : joint)
    if (v != kNegInf) sum += std::exp(v - peak);
  const double log_norm = peak + std::log(sum);
  for (double& v : joint)
    if (v != kNegInf) v -= log_norm;
  return joint;
}

}  // namespace absa::classic
