#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "absa/corpus.hpp"

namespace absa::eval {

// Test-fold index lists. Training folds are the complement.
struct FoldPlan {
  std::vector<std::vector<std::size_t>> folds;

  std::size_t k() const { return folds.size(); }
  /// Sorted indices outside fold `i`.
  std::vector<std::size_t> training_indices(std::size_t i, std::size_t n) const;
};

/// Within each class: seeded shuffle, then round-robin dealing to folds.
/// Throws ValidationError naming any class that occurs but has fewer than k members.
FoldPlan stratified_kfold(std::span<const Polarity> labels, std::size_t k, std::uint64_t seed);

using Confusion = std::array<std::array<std::size_t, kNumClasses>, kNumClasses>;
using PerClass = std::array<double, kNumClasses>;  // indexed by class_index

struct Scores {
  PerClass precision{};
  PerClass recall{};
  PerClass f1{};
  double accuracy = 0.0;
  friend bool operator==(const Scores&, const Scores&) = default;
};

struct Metrics {
  Confusion confusion{};  // rows gold, columns predicted
  Scores scores;
  friend bool operator==(const Metrics&, const Metrics&) = default;
};

/// 0/0 is taken as 0 for every ratio.
Metrics metrics_from_confusion(const Confusion& confusion);
Metrics compute_metrics(std::span<const Polarity> gold, std::span<const Polarity> predicted);
Scores mean_scores(std::span<const Metrics> metrics);

using Predictor = std::function<std::vector<Polarity>(const Dataset&)>;

// Anything that can be fitted on a training set and then label instances.
struct Pipeline {
  std::string name;  // classifier label shown in reports
  std::function<Predictor(const Dataset& train)> fit;
};

/// Always predicts the most frequent training label (ties to the smaller class index).
Pipeline majority_baseline();

struct CrossValReport {
  std::string classifier;
  std::string dataset;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<Metrics> folds;
  Scores mean;
  Metrics pooled;
};

/// Fits on the k-1 training folds only and scores the held-out fold.
CrossValReport run_crossval(const Dataset& dataset, const Pipeline& pipeline, std::size_t k,
                            std::uint64_t seed);

/// Fixed-width table: Positive, Negative, Neutral (P R F1 each), then Accuracy.
std::string render_table(const CrossValReport& report);
std::string render_json(const CrossValReport& report);

}  // namespace absa::eval
