#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "absa/corpus.hpp"
#include "absa/encode.hpp"

namespace absa::classic {

using ClassScores = std::array<double, kNumClasses>;

enum class ModelKind { naive_bayes, decision_tree, svm, random_forest, extra_trees, gradient_boosting };

std::string_view to_string(ModelKind kind);
/// Accepts the short tags nb, dtree, svm, rforest/rf, etrees/etc, gboost/gbt.
ModelKind model_kind_from_string(std::string_view tag);

struct NaiveBayesParams {
  double alpha = 1.0;
};

struct TreeParams {
  std::size_t max_depth = 20;
  std::size_t min_samples_split = 2;
};

struct SvmParams {
  double lambda = 1e-4;
  std::size_t epochs = 20;
  std::uint64_t seed = 42;
};

struct ForestParams {
  std::size_t n_trees = 100;
  std::size_t max_features = 0;  // 0 selects ceil(sqrt(D))
  bool bootstrap = true;
  TreeParams tree;
  std::uint64_t seed = 42;

  static ForestParams random_forest() { return {}; }
  static ForestParams extra_trees() {
    ForestParams p;
    p.bootstrap = false;
    return p;
  }
};

struct BoostingParams {
  std::size_t n_rounds = 100;
  double learning_rate = 0.1;
  TreeParams tree{3, 2};
  std::uint64_t seed = 42;
};

struct Hyperparams {
  NaiveBayesParams nb;
  TreeParams dtree;
  SvmParams svm;
  ForestParams rforest = ForestParams::random_forest();
  ForestParams etrees = ForestParams::extra_trees();
  BoostingParams gboost;

  /// Throws ValidationError on counts < 1, alpha/lambda <= 0, eta outside (0, 1].
  void validate() const;
  void set_seed(std::uint64_t seed);
};

struct NaiveBayesModel {
  std::size_t dim = 0;
  ClassScores log_prior{};
  std::array<std::vector<double>, kNumClasses> log_likelihood;

  /// ln P(c) + sum_j x_j ln P(j | c); -inf for classes absent from training.
  ClassScores log_joint(const FeatureVector& x) const;
  /// log_joint normalized over classes.
  ClassScores log_posterior(const FeatureVector& x) const;
};

template <typename Leaf>
struct Tree {
  struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;     // x[feature] <= threshold goes left
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::size_t samples = 0;
    Leaf leaf{};
    bool is_leaf() const { return feature < 0; }
  };
  std::vector<Node> nodes;

  std::size_t leaf_index(const FeatureVector& x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
      const auto& n = nodes[i];
      i = static_cast<std::size_t>(x.at(static_cast<std::size_t>(n.feature)) <= n.threshold ? n.left
                                                                                            : n.right);
    }
    return i;
  }
  const Leaf& evaluate(const FeatureVector& x) const { return nodes[leaf_index(x)].leaf; }
};

/// Leaves hold the class distribution of their training samples.
using ClassificationTree = Tree<ClassScores>;
using RegressionTree = Tree<double>;

struct LinearSvmModel {
  std::size_t dim = 0;
  std::array<std::vector<double>, kNumClasses> weights;
  ClassScores bias{};

  ClassScores scores(const FeatureVector& x) const;
};

struct ForestModel {
  std::vector<ClassificationTree> trees;
};

struct BoostedModel {
  std::size_t dim = 0;
  double learning_rate = 0.1;
  std::vector<std::array<RegressionTree, kNumClasses>> rounds;

  /// Raw class scores using the first `round_limit` rounds (all by default).
  ClassScores scores(const FeatureVector& x,
                     std::size_t round_limit = static_cast<std::size_t>(-1)) const;
};

using ModelParams =
    std::variant<NaiveBayesModel, ClassificationTree, LinearSvmModel, ForestModel, BoostedModel>;

struct ClassicModel {
  ModelKind kind = ModelKind::naive_bayes;
  std::size_t dim = 0;
  ModelParams params;
};

NaiveBayesModel fit_naive_bayes(std::span<const FeatureVector> X, std::span<const Polarity> y,
                                double alpha = 1.0);
ClassificationTree fit_decision_tree(std::span<const FeatureVector> X,
                                     std::span<const Polarity> y, const TreeParams& hp = {});
LinearSvmModel fit_svm(std::span<const FeatureVector> X, std::span<const Polarity> y,
                       const SvmParams& hp = {});
ForestModel fit_random_forest(std::span<const FeatureVector> X, std::span<const Polarity> y,
                              const ForestParams& hp = ForestParams::random_forest());
ForestModel fit_extra_trees(std::span<const FeatureVector> X, std::span<const Polarity> y,
                            const ForestParams& hp = ForestParams::extra_trees());
BoostedModel fit_gradient_boosting(std::span<const FeatureVector> X,
                                   std::span<const Polarity> y, const BoostingParams& hp = {});

ClassicModel fit(ModelKind kind, std::span<const FeatureVector> X, std::span<const Polarity> y,
                 const Hyperparams& hp = {});

/// Index of the largest score; ties go to the smaller index.
std::size_t argmax(const ClassScores& scores);

Polarity predict_one(const ClassicModel& model, const FeatureVector& x);
std::vector<Polarity> predict(const ClassicModel& model, std::span<const FeatureVector> X);

}  // namespace absa::classic
