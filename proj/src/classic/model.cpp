#include <algorithm>

#include "absa/error.hpp"
#include "tree_builder.hpp"

namespace absa::classic {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::naive_bayes: return "nb";
    case ModelKind::decision_tree: return "dtree";
    case ModelKind::svm: return "svm";
    case ModelKind::random_forest: return "rforest";
    case ModelKind::extra_trees: return "etrees";
    case ModelKind::gradient_boosting: return "gboost";
  }
  return "?";
}

ModelKind model_kind_from_string(std::string_view tag) {
  if (tag == "nb") return ModelKind::naive_bayes;
  if (tag == "dtree") return ModelKind::decision_tree;
  if (tag == "svm") return ModelKind::svm;
  if (tag == "rforest" || tag == "rf") return ModelKind::random_forest;
  if (tag == "etrees" || tag == "etc") return ModelKind::extra_trees;
  if (tag == "gboost" || tag == "gbt") return ModelKind::gradient_boosting;
  throw ValidationError("unknown classical model kind \"" + std::string(tag) + "\"");
}

namespace {

void check_tree(const TreeParams& p, const char* who) {
  if (p.max_depth < 1 || p.min_samples_split < 1) {
    throw ValidationError(std::string(who) + ": max_depth and min_samples_split must be >= 1");
  }
}

void check_forest(const ForestParams& p, const char* who) {
  if (p.n_trees < 1) throw ValidationError(std::string(who) + ": n_trees must be >= 1");
  check_tree(p.tree, who);
}

}  // namespace

void Hyperparams::validate() const {
  if (!(nb.alpha > 0.0)) throw ValidationError("nb: alpha must be > 0");
  check_tree(dtree, "dtree");
  if (!(svm.lambda > 0.0)) throw ValidationError("svm: lambda must be > 0");
  if (svm.epochs < 1) throw ValidationError("svm: epochs must be >= 1");
  check_forest(rforest, "rforest");
  check_forest(etrees, "etrees");
  if (gboost.n_rounds < 1) throw ValidationError("gboost: n_rounds must be >= 1");
  if (!(gboost.learning_rate > 0.0 && gboost.learning_rate <= 1.0)) {
    throw ValidationError("gboost: learning rate must lie in (0, 1]");
  }
  check_tree(gboost.tree, "gboost");
}

void Hyperparams::set_seed(std::uint64_t seed) {
  svm.seed = seed;
  rforest.seed = seed;
  etrees.seed = seed;
  gboost.seed = seed;
}

ClassicModel fit(ModelKind kind, std::span<const FeatureVector> X, std::span<const Polarity> y,
                 const Hyperparams& hp) {
  hp.validate();
  ClassicModel model;
  model.kind = kind;
  model.dim = detail::check_training_set(X, y);
  switch (kind) {
    case ModelKind::naive_bayes: model.params = fit_naive_bayes(X, y, hp.nb.alpha); break;
    case ModelKind::decision_tree: model.params = fit_decision_tree(X, y, hp.dtree); break;
    case ModelKind::svm: model.params = fit_svm(X, y, hp.svm); break;
    case ModelKind::random_forest: model.params = fit_random_forest(X, y, hp.rforest); break;
    case ModelKind::extra_trees: model.params = fit_extra_trees(X, y, hp.etrees); break;
    case ModelKind::gradient_boosting:
      model.params = fit_gradient_boosting(X, y, hp.gboost);
      break;
  }
  return model;
}

std::size_t argmax(const ClassScores& scores) {
  return static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

namespace {

struct Scorer {
  const FeatureVector& x;

  std::size_t operator()(const NaiveBayesModel& m) const { return argmax(m.log_joint(x)); }
  std::size_t operator()(const ClassificationTree& t) const { return argmax(t.evaluate(x)); }
  std::size_t operator()(const LinearSvmModel& m) const { return argmax(m.scores(x)); }
  std::size_t operator()(const ForestModel& f) const {
    ClassScores votes{};
    for (const auto& t : f.trees) votes[argmax(t.evaluate(x))] += 1.0;
    return argmax(votes);
  }
  std::size_t operator()(const BoostedModel& m) const { return argmax(m.scores(x)); }
};

}  // namespace

Polarity predict_one(const ClassicModel& model, const FeatureVector& x) {
  if (x.dim() != model.dim) {
    throw ValidationError("feature dimensionality " + std::to_string(x.dim()) +
                          " does not match model dimensionality " + std::to_string(model.dim));
  }
  return polarity_from_index(std::visit(Scorer{x}, model.params));
}

std::vector<Polarity> predict(const ClassicModel& model, std::span<const FeatureVector> X) {
  std::vector<Polarity> out;
  out.reserve(X.size());
  for (const auto& x : X) out.push_back(predict_one(model, x));
  return out;
}

}  // namespace absa::classic
