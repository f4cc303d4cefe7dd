#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "absa/classic.hpp"
#include "absa/rng.hpp"

namespace absa::classic::detail {

/// Throws ValidationError unless X and y are non-empty, equally long and
/// every vector has the same dimensionality. Returns that dimensionality.
std::size_t check_training_set(std::span<const FeatureVector> X, std::span<const Polarity> y);
void require_two_classes(std::span<const Polarity> y, const char* who);

struct SplitConfig {
  TreeParams tree;
  std::size_t max_features = static_cast<std::size_t>(-1);  // >= D means all features
  bool random_thresholds = false;
};

/// CART on Gini impurity. `rows` may repeat (bootstrap); `labels` holds a
/// class index per row of X.
ClassificationTree grow_classification_tree(std::span<const FeatureVector> X,
                                            std::span<const std::size_t> labels,
                                            std::vector<std::size_t> rows,
                                            const SplitConfig& config, Rng& rng);

using LeafValue = std::function<double(std::span<const std::size_t> rows)>;

/// Least-squares regression tree over all features; leaves valued by `leaf_value`.
RegressionTree grow_regression_tree(std::span<const FeatureVector> X,
                                    std::span<const double> targets,
                                    std::vector<std::size_t> rows, const TreeParams& params,
                                    const LeafValue& leaf_value);

}  // namespace absa::classic::detail
