#include "absa/eval.hpp"

#include <algorithm>
#include <numeric>

#include "absa/error.hpp"
#include "absa/rng.hpp"

namespace absa::eval {

std::vector<std::size_t> FoldPlan::training_indices(std::size_t i, std::size_t n) const {
  std::vector<char> held_out(n, 0);
  for (std::size_t idx : folds.at(i)) held_out[idx] = 1;
  std::vector<std::size_t> out;
  out.reserve(n - folds[i].size());
  for (std::size_t idx = 0; idx < n; ++idx)
    if (!held_out[idx]) out.push_back(idx);
  return out;
}

FoldPlan stratified_kfold(std::span<const Polarity> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("k-fold needs k >= 2");
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[class_index(labels[i])].push_back(i);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (!by_class[c].empty() && by_class[c].size() < k) {
      throw ValidationError("class " + std::to_string(to_int(polarity_from_index(c))) + " has " +
                            std::to_string(by_class[c].size()) + " members, fewer than k = " +
                            std::to_string(k));
    }
  }
  FoldPlan plan;
  plan.folds.resize(k);
  Rng rng(seed);
  std::size_t next = 0;
  for (auto& members : by_class) {
    rng.shuffle(std::span(members));
    for (std::size_t idx : members) {
      plan.folds[next].push_back(idx);
      next = (next + 1) % k;
    }
  }
  for (auto& f : plan.folds) std::sort(f.begin(), f.end());
  return plan;
}

Metrics metrics_from_confusion(const Confusion& confusion) {
  Metrics m;
  m.confusion = confusion;
  auto ratio = [](double num, double den) { return den == 0.0 ? 0.0 : num / den; };
  std::size_t total = 0;
  std::size_t correct = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    std::size_t row = 0;
    std::size_t col = 0;
    for (std::size_t o = 0; o < kNumClasses; ++o) {
      row += confusion[c][o];
      col += confusion[o][c];
      total += confusion[c][o];
    }
    correct += confusion[c][c];
    const double tp = static_cast<double>(confusion[c][c]);
    const double p = ratio(tp, static_cast<double>(col));
    const double r = ratio(tp, static_cast<double>(row));
    m.scores.precision[c] = p;
    m.scores.recall[c] = r;
    m.scores.f1[c] = ratio(2.0 * p * r, p + r);
  }
  m.scores.accuracy = ratio(static_cast<double>(correct), static_cast<double>(total));
  return m;
}

Metrics compute_metrics(std::span<const Polarity> gold, std::span<const Polarity> predicted) {
  if (gold.size() != predicted.size()) {
    throw ValidationError("gold/prediction length mismatch: " + std::to_string(gold.size()) +
                          " vs " + std::to_string(predicted.size()));
  }
  if (gold.empty()) throw ValidationError("cannot score an empty prediction list");
  Confusion confusion{};
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ++confusion[class_index(gold[i])][class_index(predicted[i])];
  }
  return metrics_from_confusion(confusion);
}

Scores mean_scores(std::span<const Metrics> metrics) {
  Scores mean;
  if (metrics.empty()) return mean;
  const double n = static_cast<double>(metrics.size());
  for (const auto& m : metrics) {
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      mean.precision[c] += m.scores.precision[c] / n;
      mean.recall[c] += m.scores.recall[c] / n;
      mean.f1[c] += m.scores.f1[c] / n;
    }
    mean.accuracy += m.scores.accuracy / n;
  }
  return mean;
}

Pipeline majority_baseline() {
  return {"Majority", [](const Dataset& train) -> Predictor {
            std::array<std::size_t, kNumClasses> counts{};
            for (const auto& inst : train.instances) ++counts[class_index(inst.polarity)];
            const auto best = static_cast<std::size_t>(
                std::max_element(counts.begin(), counts.end()) - counts.begin());
            const Polarity label = polarity_from_index(best);
            return [label](const Dataset& test) {
              return std::vector<Polarity>(test.size(), label);
            };
          }};
}

CrossValReport run_crossval(const Dataset& dataset, const Pipeline& pipeline, std::size_t k,
                            std::uint64_t seed) {
  const auto labels = dataset.labels();
  const FoldPlan plan = stratified_kfold(labels, k, seed);

  CrossValReport report;
  report.classifier = pipeline.name;
  report.dataset = dataset.name;
  report.k = k;
  report.seed = seed;
  std::vector<Polarity> pooled_gold;
  std::vector<Polarity> pooled_pred;
  for (std::size_t f = 0; f < k; ++f) {
    try {
      const auto train_idx = plan.training_indices(f, dataset.size());
      const Dataset train = subset(dataset, train_idx);
      const Dataset test = subset(dataset, plan.folds[f]);
      const Predictor predict = pipeline.fit(train);
      const auto predicted = predict(test);
      const auto gold = test.labels();
      report.folds.push_back(compute_metrics(gold, predicted));
      pooled_gold.insert(pooled_gold.end(), gold.begin(), gold.end());
      pooled_pred.insert(pooled_pred.end(), predicted.begin(), predicted.end());
    } catch (const Error& e) {
      throw Error("fold " + std::to_string(f + 1) + " of " + std::to_string(k) + ": " + e.what());
    }
  }
  report.mean = mean_scores(report.folds);
  report.pooled = compute_metrics(pooled_gold, pooled_pred);
  return report;
}

}  // namespace absa::eval
