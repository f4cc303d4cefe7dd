#include "absa/pipeline.hpp"

#include <algorithm>

#include <json.hpp>

#include "absa/error.hpp"

namespace absa {

std::string_view to_string(FeatureMode mode) {
  switch (mode) {
    case FeatureMode::one_hot: return "oh";
    case FeatureMode::location: return "le";
    case FeatureMode::tfidf: return "tfidf";
    case FeatureMode::memnet: return "memnet";
  }
  return "?";
}

FeatureMode feature_mode_from_string(std::string_view tag) {
  if (tag == "oh") return FeatureMode::one_hot;
  if (tag == "le") return FeatureMode::location;
  if (tag == "tfidf") return FeatureMode::tfidf;
  if (tag == "memnet") return FeatureMode::memnet;
  throw ValidationError("unknown feature mode \"" + std::string(tag) + "\"");
}

std::string_view to_string(ModelChoice model) {
  switch (model) {
    case ModelChoice::nb: return "nb";
    case ModelChoice::dtree: return "dtree";
    case ModelChoice::svm: return "svm";
    case ModelChoice::rf: return "rf";
    case ModelChoice::etc: return "etc";
    case ModelChoice::gbt: return "gbt";
    case ModelChoice::memnet: return "memnet";
  }
  return "?";
}

ModelChoice model_choice_from_string(std::string_view tag) {
  if (tag == "memnet") return ModelChoice::memnet;
  switch (classic::model_kind_from_string(tag)) {
    case classic::ModelKind::naive_bayes: return ModelChoice::nb;
    case classic::ModelKind::decision_tree: return ModelChoice::dtree;
    case classic::ModelKind::svm: return ModelChoice::svm;
    case classic::ModelKind::random_forest: return ModelChoice::rf;
    case classic::ModelKind::extra_trees: return ModelChoice::etc;
    case classic::ModelKind::gradient_boosting: return ModelChoice::gbt;
  }
  throw ValidationError("unknown model \"" + std::string(tag) + "\"");
}

classic::ModelKind classic_kind(ModelChoice model) {
  switch (model) {
    case ModelChoice::nb: return classic::ModelKind::naive_bayes;
    case ModelChoice::dtree: return classic::ModelKind::decision_tree;
    case ModelChoice::svm: return classic::ModelKind::svm;
    case ModelChoice::rf: return classic::ModelKind::random_forest;
    case ModelChoice::etc: return classic::ModelKind::extra_trees;
    case ModelChoice::gbt: return classic::ModelKind::gradient_boosting;
    case ModelChoice::memnet: break;
  }
  throw ValidationError("memnet is not a classical model");
}

std::string classifier_label(ModelChoice model, FeatureMode features) {
  std::string name;
  switch (model) {
    case ModelChoice::nb: name = "Naive Bayes"; break;
    case ModelChoice::dtree: name = "Decision Tree"; break;
    case ModelChoice::svm: name = "SVM"; break;
    case ModelChoice::rf: name = "RFC"; break;
    case ModelChoice::etc: name = "ETC"; break;
    case ModelChoice::gbt: name = "XGBoost"; break;
    case ModelChoice::memnet: return "MemNet";
  }
  switch (features) {
    case FeatureMode::one_hot: return name + " + OH";
    case FeatureMode::location: return name + " + LE";
    case FeatureMode::tfidf: return name + " + TF-IDF";
    case FeatureMode::memnet: break;
  }
  return name;
}

void PipelineConfig::validate() const {
  const bool memnet_model = model == ModelChoice::memnet;
  const bool memnet_features = features == FeatureMode::memnet;
  if (memnet_model != memnet_features) {
    throw ValidationError("model " + std::string(to_string(model)) +
                          " is incompatible with feature mode " +
                          std::string(to_string(features)));
  }
  if (min_freq < 1) throw ValidationError("min_freq must be >= 1");
  if (max_len && *max_len < 1) throw ValidationError("max_len must be >= 1");
  if (memnet_model) {
    if (memnet.hops < 1) throw ValidationError("memnet needs at least one hop");
    if (!(memnet.lr > 0.0)) throw ValidationError("memnet learning rate must be > 0");
    if (memnet.l2 < 0.0) throw ValidationError("memnet l2 must be >= 0");
    if (embedding_dim < 1) throw ValidationError("embedding dimension must be >= 1");
  } else {
    classic.validate();
  }
}

void PipelineConfig::apply_seed(std::uint64_t s) {
  seed = s;
  classic.set_seed(s);
  memnet.seed = s;
}

FeatureVector ClassicBundle::featurize(const TokenizedInstance& ti) const {
  switch (features) {
    case FeatureMode::one_hot: return one_hot_vector(ti, *vocab);
    case FeatureMode::location: return location_feature_vector(ti, *vocab, aspects, max_len);
    case FeatureMode::tfidf: return tfidf_transform(tfidf, ti);
    case FeatureMode::memnet: break;
  }
  throw ValidationError("classical bundle cannot use memnet features");
}

memnet::Input MemNetBundle::to_input(const Instance& instance) const {
  const StopList stop(stopwords.begin(), stopwords.end());
  return memnet::make_input(text::remove_stopwords(text::tokenize_instance(instance), stop),
                            *vocab);
}

std::string describe(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["model"] = to_string(c.model);
  j["features"] = to_string(c.features);
  j["seed"] = c.seed;
  j["min_freq"] = c.min_freq;
  if (c.model == ModelChoice::memnet) {
    j["hops"] = c.memnet.hops;
    j["lr"] = c.memnet.lr;
    j["epochs"] = c.memnet.epochs;
    j["l2"] = c.memnet.l2;
    j["trainable_embeddings"] = c.memnet.trainable_embeddings;
    j["embedding_dim"] = c.embedding_dim;
    j["embeddings"] = c.embeddings ? c.embeddings->string() : "";
    j["stopwords"] = c.stopwords.size();
    return j.dump();
  }
  if (c.features == FeatureMode::location) {
    j["max_len"] = c.max_len ? nlohmann::ordered_json(*c.max_len) : nlohmann::ordered_json("p95");
  }
  const auto& h = c.classic;
  switch (c.model) {
    case ModelChoice::nb: j["alpha"] = h.nb.alpha; break;
    case ModelChoice::dtree:
      j["max_depth"] = h.dtree.max_depth;
      j["min_samples_split"] = h.dtree.min_samples_split;
      break;
    case ModelChoice::svm:
      j["lambda"] = h.svm.lambda;
      j["epochs"] = h.svm.epochs;
      break;
    case ModelChoice::rf:
    case ModelChoice::etc: {
      const auto& f = c.model == ModelChoice::rf ? h.rforest : h.etrees;
      j["n_trees"] = f.n_trees;
      j["max_features"] = f.max_features == 0 ? nlohmann::ordered_json("sqrt")
                                              : nlohmann::ordered_json(f.max_features);
      j["bootstrap"] = f.bootstrap;
      j["max_depth"] = f.tree.max_depth;
      j["min_samples_split"] = f.tree.min_samples_split;
      break;
    }
    case ModelChoice::gbt:
      j["n_rounds"] = h.gboost.n_rounds;
      j["learning_rate"] = h.gboost.learning_rate;
      j["max_depth"] = h.gboost.tree.max_depth;
      break;
    case ModelChoice::memnet: break;
  }
  return j.dump();
}

namespace {

ClassicBundle fit_classic(const PipelineConfig& config, const Dataset& train) {
  const auto tis = text::tokenize_dataset(train);
  ClassicBundle b;
  b.features = config.features;
  b.vocab = std::make_shared<const Vocabulary>(build_vocab(tis, config.min_freq));
  if (b.features == FeatureMode::location) {
    b.aspects = AspectIdMap::assign(tis);
    b.max_len = config.max_len.value_or(default_max_len(tis));
  }
  if (b.features == FeatureMode::tfidf) b.tfidf = tfidf_fit(tis, b.vocab);

  std::vector<FeatureVector> X;
  std::vector<Polarity> y;
  X.reserve(tis.size());
  for (std::size_t i = 0; i < tis.size(); ++i) {
    try {
      X.push_back(b.featurize(tis[i]));
    } catch (const PaddingError& e) {
      throw PaddingError("instance " + std::to_string(train.instances[i].id) + ": " + e.what());
    }
    y.push_back(tis[i].polarity);
  }
  b.model = classic::fit(classic_kind(config.model), X, y, config.classic);
  return b;
}

MemNetBundle fit_memnet(const PipelineConfig& config, const Dataset& train) {
  MemNetBundle b;
  b.stopwords = config.stopwords;
  std::sort(b.stopwords.begin(), b.stopwords.end());
  b.stopwords.erase(std::unique(b.stopwords.begin(), b.stopwords.end()), b.stopwords.end());
  const StopList stop(b.stopwords.begin(), b.stopwords.end());

  std::vector<TokenizedInstance> tis;
  tis.reserve(train.size());
  for (const auto& inst : train.instances) {
    tis.push_back(text::remove_stopwords(text::tokenize_instance(inst), stop));
  }
  b.vocab = std::make_shared<const Vocabulary>(build_vocab(tis, config.min_freq));
  auto table = config.embeddings
                   ? memnet::load_embeddings(*config.embeddings, *b.vocab, config.embedding_dim,
                                             config.seed)
                   : memnet::random_embeddings(*b.vocab, config.embedding_dim, config.seed);

  std::vector<memnet::Input> inputs;
  std::vector<Polarity> gold;
  for (const auto& ti : tis) {
    inputs.push_back(memnet::make_input(ti, *b.vocab));
    gold.push_back(ti.polarity);
  }
  auto result = memnet::train(inputs, gold, std::move(table), config.memnet);
  b.params = std::move(result.model);
  b.loss_history = std::move(result.loss_history);
  return b;
}

}  // namespace

ModelBundle fit_bundle(const PipelineConfig& config, const Dataset& train) {
  config.validate();
  if (train.empty()) throw ValidationError("training set is empty");
  ModelBundle bundle;
  bundle.model = config.model;
  bundle.seed = config.seed;
  bundle.hyperparameters = describe(config);
  if (config.model == ModelChoice::memnet) {
    bundle.body = fit_memnet(config, train);
  } else {
    bundle.body = fit_classic(config, train);
  }
  return bundle;
}

std::vector<Polarity> predict(const ModelBundle& bundle, const Dataset& data) {
  std::vector<Polarity> out;
  out.reserve(data.size());
  if (const auto* c = std::get_if<ClassicBundle>(&bundle.body)) {
    for (const auto& inst : data.instances) {
      try {
        out.push_back(classic::predict_one(c->model, c->featurize(text::tokenize_instance(inst))));
      } catch (const PaddingError& e) {
        throw PaddingError("instance " + std::to_string(inst.id) + ": " + e.what());
      }
    }
    return out;
  }
  const auto& m = std::get<MemNetBundle>(bundle.body);
  const StopList stop(m.stopwords.begin(), m.stopwords.end());
  for (const auto& inst : data.instances) {
    const auto ti = text::remove_stopwords(text::tokenize_instance(inst), stop);
    out.push_back(memnet::predict(m.params, memnet::make_input(ti, *m.vocab)));
  }
  return out;
}

eval::Pipeline make_pipeline(const PipelineConfig& config) {
  config.validate();
  return {classifier_label(config.model, config.features),
          [config](const Dataset& train) -> eval::Predictor {
            auto bundle = std::make_shared<const ModelBundle>(fit_bundle(config, train));
            return [bundle](const Dataset& test) { return predict(*bundle, test); };
          }};
}

}  // namespace absa
