#include <cmath>

#include "absa/error.hpp"
#include "tree_builder.hpp"

namespace absa::classic {

namespace {

ForestModel grow_forest(std::span<const FeatureVector> X, std::span<const Polarity> y,
                        const ForestParams& hp, bool random_thresholds) {
  const std::size_t dim = detail::check_training_set(X, y);
  if (hp.n_trees < 1) throw ValidationError("forest needs at least one tree");

  std::vector<std::size_t> labels(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) labels[i] = class_index(y[i]);

  detail::SplitConfig config{hp.tree};
  config.max_features =
      hp.max_features > 0
          ? hp.max_features
          : std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(dim)))));
  config.random_thresholds = random_thresholds;

  const std::size_t n = X.size();
  ForestModel forest;
  forest.trees.reserve(hp.n_trees);
  // Every tree draws from its own stream, so the forest does not depend on
  // the order trees are built in.
  for (std::size_t t = 0; t < hp.n_trees; ++t) {
    Rng rng(derive_seed(hp.seed, t));
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = hp.bootstrap ? rng.uniform_index(n) : i;
    forest.trees.push_back(
        detail::grow_classification_tree(X, labels, std::move(rows), config, rng));
  }
  return forest;
}

}  // namespace

ForestModel fit_random_forest(std::span<const FeatureVector> X, std::span<const Polarity> y,
                              const ForestParams& hp) {
  return grow_forest(X, y, hp, false);
}

ForestModel fit_extra_trees(std::span<const FeatureVector> X, std::span<const Polarity> y,
                            const ForestParams& hp) {
  return grow_forest(X, y, hp, true);
}

}  // namespace absa::classic
