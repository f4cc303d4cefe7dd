#include <doctest.h>

#include <json.hpp>

#include "absa/error.hpp"
#include "absa/pipeline.hpp"
#include "support/synthetic.hpp"

using namespace absa;

namespace {

PipelineConfig config_for(ModelChoice model, FeatureMode features) {
  PipelineConfig c;
  c.model = model;
  c.features = features;
  c.classic.rforest.n_trees = 15;
  c.classic.etrees.n_trees = 15;
  c.classic.gboost.n_rounds = 15;
  c.memnet.epochs = 15;
  c.embedding_dim = 10;
  if (model == ModelChoice::memnet) {
    const auto stop = text::default_stopwords();
    c.stopwords.assign(stop.begin(), stop.end());
  }
  return c;
}

}  // namespace

TEST_CASE("model and feature pairing") {
  PipelineConfig c;
  c.model = ModelChoice::memnet;
  c.features = FeatureMode::tfidf;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.features = FeatureMode::memnet;
  CHECK_NOTHROW(c.validate());
  c.model = ModelChoice::svm;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("labels and tags") {
  CHECK(classifier_label(ModelChoice::svm, FeatureMode::one_hot) == "SVM + OH");
  CHECK(classifier_label(ModelChoice::rf, FeatureMode::location) == "RFC + LE");
  CHECK(classifier_label(ModelChoice::memnet, FeatureMode::memnet) == "MemNet");
  for (const auto* tag : {"nb", "dtree", "svm", "rf", "etc", "gbt", "memnet"}) {
    CHECK(to_string(model_choice_from_string(tag)) == tag);
  }
  for (const auto* tag : {"oh", "le", "tfidf", "memnet"}) CHECK(to_string(feature_mode_from_string(tag)) == tag);
  CHECK_THROWS(feature_mode_from_string("bow"));
}

TEST_CASE("every pairing fits and predicts in the label codomain") {
  const auto data = testing::separable_corpus(90, 12);
  const auto [train, test] = shuffle_split(data, 0.3, 1);
  for (const auto model : {ModelChoice::nb, ModelChoice::dtree, ModelChoice::svm, ModelChoice::rf, ModelChoice::etc,
                           ModelChoice::gbt}) {
    for (const auto features : {FeatureMode::one_hot, FeatureMode::location, FeatureMode::tfidf}) {
      CAPTURE(to_string(model));
      CAPTURE(to_string(features));
      const auto bundle = fit_bundle(config_for(model, features), train);
      const auto out = predict(bundle, test);
      CHECK(out.size() == test.size());
      CHECK(predict(bundle, test) == out);
    }
  }
  const auto mem = fit_bundle(config_for(ModelChoice::memnet, FeatureMode::memnet), train);
  CHECK(predict(mem, test).size() == test.size());
  CHECK(std::get<MemNetBundle>(mem.body).loss_history.size() == 15);
}

TEST_CASE("hyperparameter echo is valid JSON") {
  auto c = config_for(ModelChoice::gbt, FeatureMode::location);
  c.max_len = 12;
  const auto j = nlohmann::json::parse(describe(c));
  CHECK(j.at("model") == "gbt");
  CHECK(j.at("features") == "le");
  CHECK(j.at("seed") == 42);
}

TEST_CASE("idf is fitted on the training folds only") {
  auto data = testing::separable_corpus(60, 9);
  const auto config = config_for(ModelChoice::svm, FeatureMode::tfidf);
  std::vector<std::vector<double>> idfs;
  const eval::Pipeline recorder{"svm", [&](const Dataset& train) -> eval::Predictor {
                                  auto bundle = fit_bundle(config, train);
                                  idfs.push_back(std::get<ClassicBundle>(bundle.body).tfidf.idf);
                                  return [bundle](const Dataset& test) { return predict(bundle, test); };
                                }};
  eval::run_crossval(data, recorder, 3, 5);
  const auto before = idfs;

  const auto plan = eval::stratified_kfold(data.labels(), 3, 5);
  const std::size_t target = plan.folds[1].front();
  data.instances[target].text += " zzzuniquetoken";
  idfs.clear();
  eval::run_crossval(data, recorder, 3, 5);
  CHECK(idfs[1] == before[1]);
  CHECK(idfs[0] != before[0]);
}
