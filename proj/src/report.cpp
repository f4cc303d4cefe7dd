#include <algorithm>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "absa/eval.hpp"

namespace absa::eval {

namespace {

// Column order of the published results table.
constexpr std::array<Polarity, kNumClasses> kColumnOrder = {Polarity::positive, Polarity::negative,
                                                            Polarity::neutral};
constexpr std::array<const char*, kNumClasses> kColumnNames = {"positive", "negative", "neutral"};

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

// Label column widths; names longer than the defaults widen their column.
struct Layout {
  std::size_t classifier = 24;
  std::size_t dataset = 12;
  std::size_t split = 9;

  std::size_t labels() const { return classifier + dataset + split; }
};

std::string row(const Layout& layout, const std::string& classifier, const std::string& dataset,
                const std::string& split, const Scores& s) {
  std::string line =
      pad(classifier, layout.classifier) + pad(dataset, layout.dataset) + pad(split, layout.split);
  for (Polarity p : kColumnOrder) {
    const std::size_t c = class_index(p);
    line += "| " + pad(fixed(s.precision[c]), 7) + pad(fixed(s.recall[c]), 7) +
            pad(fixed(s.f1[c]), 7);
  }
  line += "| " + fixed(s.accuracy);
  return line;
}

nlohmann::ordered_json scores_json(const Scores& s) {
  nlohmann::ordered_json out;
  for (std::size_t i = 0; i < kNumClasses; ++i) {
    const std::size_t c = class_index(kColumnOrder[i]);
    out[kColumnNames[i]] = {{"precision", s.precision[c]}, {"recall", s.recall[c]}, {"f1", s.f1[c]}};
  }
  out["accuracy"] = s.accuracy;
  return out;
}

nlohmann::ordered_json metrics_json(const Metrics& m) {
  auto out = scores_json(m.scores);
  auto confusion = nlohmann::ordered_json::array();
  for (const auto& r : m.confusion) confusion.push_back(r);
  out["confusion"] = confusion;
  return out;
}

}  // namespace

std::string render_table(const CrossValReport& report) {
  std::ostringstream out;
  Layout layout;
  layout.classifier = std::max(layout.classifier, report.classifier.size() + 2);
  layout.dataset = std::max(layout.dataset, report.dataset.size() + 2);
  layout.split = std::max(layout.split, ("fold " + std::to_string(report.folds.size())).size() + 2);
  const std::string header = pad("Classifier", layout.classifier) + pad("Dataset", layout.dataset) +
                             pad("Split", layout.split) +
                             "| " + pad("Positive Class", 21) + "| " + pad("Negative Class", 21) +
                             "| " + pad("Neutral Class", 21) + "|";
  std::string sub = pad("", layout.labels());
  for (std::size_t i = 0; i < kNumClasses; ++i) sub += "| " + pad("P", 7) + pad("R", 7) + pad("F1", 7);
  sub += "| Accuracy";
  out << "TEST (stratified " << report.k << "-fold, seed " << report.seed << ")\n";
  out << header << '\n' << sub << '\n' << std::string(sub.size(), '-') << '\n';
  out << row(layout, report.classifier, report.dataset, "pooled", report.pooled.scores) << '\n';
  out << row(layout, report.classifier, report.dataset, "mean", report.mean) << '\n';
  for (std::size_t f = 0; f < report.folds.size(); ++f) {
    out << row(layout, report.classifier, report.dataset, "fold " + std::to_string(f + 1),
               report.folds[f].scores)
        << '\n';
  }
  return out.str();
}

std::string render_json(const CrossValReport& report) {
  nlohmann::ordered_json out;
  out["classifier"] = report.classifier;
  out["dataset"] = report.dataset;
  out["k"] = report.k;
  out["seed"] = report.seed;
  out["class_order"] = kColumnNames;
  out["confusion_order"] = {"negative", "neutral", "positive"};
  out["pooled"] = metrics_json(report.pooled);
  out["mean"] = scores_json(report.mean);
  auto folds = nlohmann::ordered_json::array();
  for (const auto& m : report.folds) folds.push_back(metrics_json(m));
  out["folds"] = folds;
  return out.dump(2) + "\n";
}

}  // namespace absa::eval
