#include <algorithm>
#include <cmath>
#include <optional>

#include "absa/error.hpp"
#include "tree_builder.hpp"

namespace absa::classic {
namespace detail {

std::size_t check_training_set(std::span<const FeatureVector> X, std::span<const Polarity> y) {
  if (X.empty()) throw ValidationError("training set is empty");
  if (X.size() != y.size()) {
    throw ValidationError("feature/label count mismatch: " + std::to_string(X.size()) + " vs " +
                          std::to_string(y.size()));
  }
  const std::size_t dim = X.front().dim();
  for (const auto& x : X) {
    if (x.dim() != dim) throw ValidationError("feature vectors differ in dimensionality");
  }
  return dim;
}

void require_two_classes(std::span<const Polarity> y, const char* who) {
  if (std::adjacent_find(y.begin(), y.end(), std::not_equal_to<>()) == y.end()) {
    throw ValidationError(std::string(who) + " needs at least two distinct labels");
  }
}

namespace {

struct Entry {
  std::uint32_t feature;
  double value;
  std::size_t pos;  // index into the node's row list
};

std::vector<Entry> gather(std::span<const FeatureVector> X, std::span<const std::size_t> rows) {
  std::vector<Entry> out;
  for (std::size_t pos = 0; pos < rows.size(); ++pos)
    for (const auto& [f, v] : X[rows[pos]].entries()) out.push_back({f, v, pos});
  std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) {
    if (a.feature != b.feature) return a.feature < b.feature;
    if (a.value != b.value) return a.value < b.value;
    return a.pos < b.pos;
  });
  return out;
}

struct ClassStats {
  ClassScores counts{};
  double n = 0.0;
  void add(std::size_t cls) {
    counts[cls] += 1.0;
    n += 1.0;
  }
  void add(const ClassStats& o) {
    for (std::size_t c = 0; c < kNumClasses; ++c) counts[c] += o.counts[c];
    n += o.n;
  }
  ClassStats minus(const ClassStats& o) const {
    ClassStats r = *this;
    for (std::size_t c = 0; c < kNumClasses; ++c) r.counts[c] -= o.counts[c];
    r.n -= o.n;
    return r;
  }
  // n * Gini(node)
  double cost() const {
    if (n <= 0.0) return 0.0;
    double sq = 0.0;
    for (double c : counts) sq += c * c;
    return n - sq / n;
  }
};

struct RegStats {
  double n = 0.0;
  double sum = 0.0;
  void add(double target) {
    n += 1.0;
    sum += target;
  }
  void add(const RegStats& o) {
    n += o.n;
    sum += o.sum;
  }
  RegStats minus(const RegStats& o) const { return {n - o.n, sum - o.sum}; }
  // Sum of squared errors up to a node-independent constant.
  double cost() const { return n > 0.0 ? -sum * sum / n : 0.0; }
};

template <typename Stats>
struct Group {
  double value;
  Stats stats;
};

struct Candidate {
  std::uint32_t feature = 0;
  double threshold = 0.0;
  double cost = 0.0;
};

// Distinct-value groups of one feature within a node, zeros included.
template <typename Stats, typename AddRow>
std::vector<Group<Stats>> feature_groups(std::span<const Entry> entries, const Stats& node,
                                         AddRow add_row) {
  std::vector<Group<Stats>> groups;
  Stats nonzero;
  for (const auto& e : entries) {
    if (groups.empty() || groups.back().value != e.value) groups.push_back({e.value, Stats{}});
    add_row(groups.back().stats, e.pos);
    add_row(nonzero, e.pos);
  }
  Stats zeros = node.minus(nonzero);
  if (zeros.n > 0.5) {
    auto it = std::lower_bound(groups.begin(), groups.end(), 0.0,
                               [](const Group<Stats>& g, double v) { return g.value < v; });
    groups.insert(it, {0.0, zeros});
  }
  return groups;
}

template <typename Stats>
std::optional<Candidate> best_threshold(std::uint32_t feature,
                                        const std::vector<Group<Stats>>& groups,
                                        const Stats& node) {
  std::optional<Candidate> best;
  Stats left;
  for (std::size_t i = 0; i + 1 < groups.size(); ++i) {
    left.add(groups[i].stats);
    const double cost = left.cost() + node.minus(left).cost();
    if (!best || cost < best->cost) {
      double mid = groups[i].value + (groups[i + 1].value - groups[i].value) / 2.0;
      if (!(mid < groups[i + 1].value)) mid = groups[i].value;
      best = Candidate{feature, mid, cost};
    }
  }
  return best;
}

template <typename Stats>
Candidate random_threshold(std::uint32_t feature, const std::vector<Group<Stats>>& groups,
                           const Stats& node, Rng& rng) {
  const double lo = groups.front().value;
  const double hi = groups.back().value;
  double threshold = rng.uniform(lo, hi);
  if (!(threshold < hi)) threshold = lo;
  Stats left;
  for (const auto& g : groups) {
    if (g.value > threshold) break;
    left.add(g.stats);
  }
  return {feature, threshold, left.cost() + node.minus(left).cost()};
}

// Best split over the node's non-constant features (a random subset of at
// most max_features of them when that is smaller).
template <typename Stats, typename AddRow>
std::optional<Candidate> find_split(std::span<const FeatureVector> X,
                                    std::span<const std::size_t> rows, const Stats& node,
                                    AddRow add_row, const SplitConfig& config, Rng* rng) {
  const auto entries = gather(X, rows);
  struct Range {
    std::uint32_t feature;
    std::size_t begin, end;
  };
  std::vector<Range> varying;
  for (std::size_t b = 0; b < entries.size();) {
    std::size_t e = b;
    while (e < entries.size() && entries[e].feature == entries[b].feature) ++e;
    const bool has_zero = (e - b) < rows.size();
    const bool multi_valued = entries[b].value != entries[e - 1].value;
    if (has_zero || multi_valued) varying.push_back({entries[b].feature, b, e});
    b = e;
  }
  if (rng && config.max_features < varying.size()) {
    for (std::size_t i = 0; i < config.max_features; ++i) {
      std::swap(varying[i], varying[i + rng->uniform_index(varying.size() - i)]);
    }
    varying.resize(config.max_features);
    std::sort(varying.begin(), varying.end(),
              [](const Range& a, const Range& b) { return a.feature < b.feature; });
  }

  std::optional<Candidate> best;
  for (const auto& r : varying) {
    const auto groups =
        feature_groups<Stats>(std::span(entries).subspan(r.begin, r.end - r.begin), node, add_row);
    if (groups.size() < 2) continue;
    std::optional<Candidate> c;
    if (config.random_thresholds && rng) {
      c = random_threshold(r.feature, groups, node, *rng);
    } else {
      c = best_threshold(r.feature, groups, node);
    }
    if (c && (!best || c->cost < best->cost)) best = c;
  }
  return best;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> partition(
    std::span<const FeatureVector> X, std::span<const std::size_t> rows, const Candidate& split) {
  std::vector<std::size_t> left, right;
  for (std::size_t r : rows) {
    (X[r].at(split.feature) <= split.threshold ? left : right).push_back(r);
  }
  return {std::move(left), std::move(right)};
}

struct ClassificationGrower {
  std::span<const FeatureVector> X;
  std::span<const std::size_t> labels;
  const SplitConfig& config;
  Rng& rng;
  ClassificationTree tree;

  std::int32_t grow(std::vector<std::size_t> rows, std::size_t depth) {
    ClassStats node;
    for (std::size_t r : rows) node.add(labels[r]);
    const auto index = static_cast<std::int32_t>(tree.nodes.size());
    auto& n = tree.nodes.emplace_back();
    n.samples = rows.size();
    for (std::size_t c = 0; c < kNumClasses; ++c) n.leaf[c] = node.counts[c] / node.n;

    const bool pure = std::any_of(node.counts.begin(), node.counts.end(),
                                  [&](double c) { return c == node.n; });
    if (pure || depth >= config.tree.max_depth || rows.size() < config.tree.min_samples_split) {
      return index;
    }
    auto add_row = [&](ClassStats& s, std::size_t pos) { s.add(labels[rows[pos]]); };
    const auto split = find_split(X, rows, node, add_row, config, &rng);
    if (!split) return index;

    auto [left_rows, right_rows] = partition(X, rows, *split);
    rows.clear();
    rows.shrink_to_fit();
    const auto left = grow(std::move(left_rows), depth + 1);
    const auto right = grow(std::move(right_rows), depth + 1);
    auto& parent = tree.nodes[static_cast<std::size_t>(index)];
    parent.feature = static_cast<std::int32_t>(split->feature);
    parent.threshold = split->threshold;
    parent.left = left;
    parent.right = right;
    return index;
  }
};

struct RegressionGrower {
  std::span<const FeatureVector> X;
  std::span<const double> targets;
  const TreeParams& params;
  const LeafValue& leaf_value;
  RegressionTree tree;

  std::int32_t grow(std::vector<std::size_t> rows, std::size_t depth) {
    RegStats node;
    for (std::size_t r : rows) node.add(targets[r]);
    const auto index = static_cast<std::int32_t>(tree.nodes.size());
    auto& n = tree.nodes.emplace_back();
    n.samples = rows.size();
    n.leaf = leaf_value(rows);

    if (depth >= params.max_depth || rows.size() < params.min_samples_split) return index;
    auto add_row = [&](RegStats& s, std::size_t pos) { s.add(targets[rows[pos]]); };
    const auto split = find_split(X, rows, node, add_row, SplitConfig{params}, nullptr);
    const double parent_cost = node.cost();
    if (!split || !(split->cost < parent_cost - 1e-12 * std::max(1.0, std::abs(parent_cost)))) {
      return index;
    }

    auto [left_rows, right_rows] = partition(X, rows, *split);
    rows.clear();
    rows.shrink_to_fit();
    const auto left = grow(std::move(left_rows), depth + 1);
    const auto right = grow(std::move(right_rows), depth + 1);
    auto& parent = tree.nodes[static_cast<std::size_t>(index)];
    parent.feature = static_cast<std::int32_t>(split->feature);
    parent.threshold = split->threshold;
    parent.left = left;
    parent.right = right;
    return index;
  }
};

}  // namespace

ClassificationTree grow_classification_tree(std::span<const FeatureVector> X,
                                            std::span<const std::size_t> labels,
                                            std::vector<std::size_t> rows,
                                            const SplitConfig& config, Rng& rng) {
  ClassificationGrower grower{X, labels, config, rng, {}};
  grower.grow(std::move(rows), 0);
  return std::move(grower.tree);
}

RegressionTree grow_regression_tree(std::span<const FeatureVector> X,
                                    std::span<const double> targets,
                                    std::vector<std::size_t> rows, const TreeParams& params,
                                    const LeafValue& leaf_value) {
  RegressionGrower grower{X, targets, params, leaf_value, {}};
  grower.grow(std::move(rows), 0);
  return std::move(grower.tree);
}

}  // namespace detail

ClassificationTree fit_decision_tree(std::span<const FeatureVector> X,
                                     std::span<const Polarity> y, const TreeParams& hp) {
  detail::check_training_set(X, y);
  std::vector<std::size_t> labels(y.size());
  std::vector<std::size_t> rows(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    labels[i] = class_index(y[i]);
    rows[i] = i;
  }
  Rng unused(0);
  return detail::grow_classification_tree(X, labels, std::move(rows), detail::SplitConfig{hp},
                                          unused);
}

}  // namespace absa::classic
