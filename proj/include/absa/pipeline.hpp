#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "absa/classic.hpp"
#include "absa/corpus.hpp"
#include "absa/encode.hpp"
#include "absa/eval.hpp"
#include "absa/memnet.hpp"
#include "absa/textproc.hpp"

namespace absa {

enum class FeatureMode { one_hot, location, tfidf, memnet };

std::string_view to_string(FeatureMode mode);  // oh | le | tfidf | memnet
FeatureMode feature_mode_from_string(std::string_view tag);

// Classical kinds plus the memory network.
enum class ModelChoice { nb, dtree, svm, rf, etc, gbt, memnet };

std::string_view to_string(ModelChoice model);  // nb | dtree | svm | rf | etc | gbt | memnet
ModelChoice model_choice_from_string(std::string_view tag);
classic::ModelKind classic_kind(ModelChoice model);

/// Display label, e.g. "SVM + OH" or "MemNet".
std::string classifier_label(ModelChoice model, FeatureMode features);

struct PipelineConfig {
  ModelChoice model = ModelChoice::svm;
  FeatureMode features = FeatureMode::one_hot;
  std::uint64_t seed = 42;
  classic::Hyperparams classic;
  std::size_t min_freq = 1;
  std::optional<std::size_t> max_len;  // location features; 95th percentile when unset
  memnet::TrainParams memnet;
  std::size_t embedding_dim = 50;
  std::optional<std::filesystem::path> embeddings;
  std::vector<std::string> stopwords;  // memnet pre-processing

  /// Throws ValidationError when the model/feature pairing is invalid
  /// (memnet model if and only if memnet features) or a setting is out of range.
  void validate() const;
  /// Pushes `seed` into every seeded component.
  void apply_seed(std::uint64_t seed);
};

// Fitted classical model together with every transformer it needs.
struct ClassicBundle {
  FeatureMode features = FeatureMode::one_hot;
  std::shared_ptr<const Vocabulary> vocab;
  AspectIdMap aspects;
  std::size_t max_len = 0;
  TfIdfModel tfidf;  // tf-idf mode only
  classic::ClassicModel model;

  FeatureVector featurize(const TokenizedInstance& ti) const;
};

struct MemNetBundle {
  std::shared_ptr<const Vocabulary> vocab;
  std::vector<std::string> stopwords;  // sorted
  memnet::Params params;
  std::vector<double> loss_history;

  memnet::Input to_input(const Instance& instance) const;
};

struct ModelBundle {
  ModelChoice model = ModelChoice::svm;
  std::uint64_t seed = 42;
  std::string hyperparameters;  // JSON text echoed into archives
  std::variant<ClassicBundle, MemNetBundle> body;
};

ModelBundle fit_bundle(const PipelineConfig& config, const Dataset& train);
std::vector<Polarity> predict(const ModelBundle& bundle, const Dataset& data);

/// Cross-validation adaptor around fit_bundle/predict.
eval::Pipeline make_pipeline(const PipelineConfig& config);

/// Effective configuration as JSON text (for logs and archive metadata).
std::string describe(const PipelineConfig& config);

}  // namespace absa
