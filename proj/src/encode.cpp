#include "absa/encode.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absa/error.hpp"

namespace absa {

AspectIdMap AspectIdMap::assign(std::span<const TokenizedInstance> corpus) {
  AspectIdMap map;
  for (const auto& ti : corpus) {
    auto phrase = ti.aspect_phrase();
    if (!map.ids_.contains(phrase)) {
      map.ids_.emplace(phrase, static_cast<std::int64_t>(map.phrases_.size()) + 1);
      map.phrases_.push_back(std::move(phrase));
    }
  }
  return map;
}

AspectIdMap AspectIdMap::from_phrases(std::vector<std::string> phrases_in_id_order) {
  AspectIdMap map;
  for (auto& phrase : phrases_in_id_order) {
    if (!map.ids_.emplace(phrase, static_cast<std::int64_t>(map.phrases_.size()) + 1).second) {
      throw ValidationError("duplicate aspect phrase \"" + phrase + "\"");
    }
    map.phrases_.push_back(std::move(phrase));
  }
  return map;
}

std::optional<std::int64_t> AspectIdMap::id(const std::string& phrase) const {
  auto it = ids_.find(phrase);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::int64_t AspectIdMap::id_or_unknown(const std::string& phrase) const {
  return id(phrase).value_or(static_cast<std::int64_t>(phrases_.size()) + 1);
}

IntSequence id_encode(const TokenizedInstance& ti, std::int64_t aspect_id, AspectMode mode) {
  if (aspect_id < 1) throw ValidationError("aspect id must be >= 1");
  if (mode == AspectMode::per_token) {
    IntSequence out(ti.tokens.size(), 0);
    for (std::size_t i = ti.aspect.start; i < ti.aspect.end; ++i) out[i] = aspect_id;
    return out;
  }
  IntSequence out(collapsed_length(ti), 0);
  out[ti.aspect.start] = aspect_id;
  return out;
}

IntSequence bit_mask(const TokenizedInstance& ti) {
  IntSequence out(ti.tokens.size(), 0);
  for (std::size_t i = ti.aspect.start; i < ti.aspect.end; ++i) out[i] = 1;
  return out;
}

std::size_t collapsed_length(const TokenizedInstance& ti) {
  return ti.tokens.size() - ti.aspect.size() + 1;
}

IntSequence location_encode(const TokenizedInstance& ti) {
  IntSequence out;
  out.reserve(collapsed_length(ti) - 1);
  for (std::size_t i = 0; i < ti.aspect.start; ++i) {
    out.push_back(static_cast<std::int64_t>(ti.aspect.start - i));
  }
  for (std::size_t i = ti.aspect.end; i < ti.tokens.size(); ++i) {
    out.push_back(static_cast<std::int64_t>(i - ti.aspect.end + 1));
  }
  return out;
}

IntSequence zero_pad(std::span<const std::int64_t> seq, std::size_t max_len,
                     std::size_t protected_end) {
  if (max_len < 1) throw ValidationError("max_len must be >= 1");
  if (seq.size() > max_len && protected_end > max_len) {
    throw PaddingError("truncating a length-" + std::to_string(seq.size()) +
                       " sequence to " + std::to_string(max_len) +
                       " would drop aspect entries (last at index " +
                       std::to_string(protected_end - 1) + ")");
  }
  IntSequence out(max_len, 0);
  std::copy_n(seq.begin(), std::min(seq.size(), max_len), out.begin());
  return out;
}

IntSequence zero_pad(std::span<const std::int64_t> seq, std::size_t max_len) {
  std::size_t protected_end = 0;
  for (std::size_t i = 0; i < seq.size(); ++i)
    if (seq[i] != 0) protected_end = i + 1;
  return zero_pad(seq, max_len, protected_end);
}

std::size_t default_max_len(std::span<const TokenizedInstance> corpus) {
  if (corpus.empty()) return 1;
  std::vector<double> lengths;
  lengths.reserve(corpus.size());
  for (const auto& ti : corpus) lengths.push_back(static_cast<double>(collapsed_length(ti)));
  std::sort(lengths.begin(), lengths.end());
  const double rank = 0.95 * static_cast<double>(lengths.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, lengths.size() - 1);
  const double value = lengths[lo] + (rank - static_cast<double>(lo)) * (lengths[hi] - lengths[lo]);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(value - 1e-9)));
}

FeatureVector::FeatureVector(std::size_t dim, std::vector<Entry> entries) : dim_(dim) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  for (const auto& [index, value] : entries) {
    if (index >= dim) {
      throw ValidationError("feature index " + std::to_string(index) +
                            " out of range for dimension " + std::to_string(dim));
    }
    if (!entries_.empty() && entries_.back().first == index) {
      entries_.back().second += value;
    } else {
      entries_.emplace_back(index, value);
    }
  }
  std::erase_if(entries_, [](const Entry& e) { return e.second == 0.0; });
}

double FeatureVector::at(std::size_t index) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                             [](const Entry& e, std::size_t i) { return e.first < i; });
  return (it != entries_.end() && it->first == index) ? it->second : 0.0;
}

double FeatureVector::norm() const {
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.second * e.second;
  return std::sqrt(sum);
}

std::vector<double> FeatureVector::dense() const {
  std::vector<double> out(dim_, 0.0);
  for (const auto& [index, value] : entries_) out[index] = value;
  return out;
}

FeatureVector one_hot_vector(const TokenizedInstance& ti, const Vocabulary& vocab) {
  const std::size_t size = vocab.size();
  std::vector<FeatureVector::Entry> entries;
  for (std::size_t i = 0; i < ti.tokens.size(); ++i) {
    const auto id = vocab.id(ti.tokens[i]);
    if (!id) continue;
    entries.emplace_back(static_cast<std::uint32_t>(*id - 1), 1.0);
    if (ti.aspect.contains(i)) {
      entries.emplace_back(static_cast<std::uint32_t>(size + *id - 1), 1.0);
    }
  }
  std::sort(entries.begin(), entries.end());
  entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
  return FeatureVector(2 * size, std::move(entries));
}

FeatureVector location_feature_vector(const TokenizedInstance& ti, const Vocabulary& vocab,
                                      const AspectIdMap& aspects, std::size_t max_len) {
  IntSequence token_ids;
  token_ids.reserve(collapsed_length(ti));
  for (std::size_t i = 0; i < ti.tokens.size(); ++i) {
    if (i == ti.aspect.start) token_ids.push_back(0);
    if (ti.aspect.contains(i)) continue;
    token_ids.push_back(static_cast<std::int64_t>(vocab.id_or_pad(ti.tokens[i])));
  }
  const auto aspect_seq =
      zero_pad(id_encode(ti, aspects.id_or_unknown(ti.aspect_phrase()), AspectMode::phrase), max_len);
  const auto token_block = zero_pad(token_ids, max_len, 0);
  const auto location_block = zero_pad(location_encode(ti), max_len, 0);

  std::vector<FeatureVector::Entry> entries;
  auto append = [&](const IntSequence& block, std::size_t offset) {
    for (std::size_t i = 0; i < block.size(); ++i) {
      if (block[i] != 0) {
        entries.emplace_back(static_cast<std::uint32_t>(offset + i), static_cast<double>(block[i]));
      }
    }
  };
  append(token_block, 0);
  append(aspect_seq, max_len);
  append(location_block, 2 * max_len);
  return FeatureVector(3 * max_len, std::move(entries));
}

TfIdfModel tfidf_fit(std::span<const TokenizedInstance> corpus,
                     std::shared_ptr<const Vocabulary> vocab) {
  if (!vocab) throw ValidationError("tf-idf needs a vocabulary");
  std::vector<std::size_t> df(vocab->size(), 0);
  std::vector<char> seen(vocab->size());
  for (const auto& ti : corpus) {
    std::fill(seen.begin(), seen.end(), 0);
    for (const auto& tok : ti.tokens) {
      if (auto id = vocab->id(tok); id && !seen[*id - 1]) {
        seen[*id - 1] = 1;
        ++df[*id - 1];
      }
    }
  }
  TfIdfModel model;
  model.document_count = corpus.size();
  model.idf.resize(vocab->size());
  const double n = static_cast<double>(corpus.size());
  for (std::size_t j = 0; j < df.size(); ++j) {
    model.idf[j] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[j]))) + 1.0;
  }
  model.vocab = std::move(vocab);
  return model;
}

FeatureVector tfidf_transform(const TfIdfModel& model, const TokenizedInstance& ti) {
  std::map<std::uint32_t, double> tf;
  for (const auto& tok : ti.tokens)
    if (auto id = model.vocab->id(tok)) tf[static_cast<std::uint32_t>(*id - 1)] += 1.0;
  std::vector<FeatureVector::Entry> entries;
  double sq = 0.0;
  for (const auto& [index, count] : tf) {
    const double w = count * model.idf[index];
    entries.emplace_back(index, w);
    sq += w * w;
  }
  if (sq > 0.0) {
    const double inv = 1.0 / std::sqrt(sq);
    for (auto& e : entries) e.second *= inv;
  }
  return FeatureVector(model.idf.size(), std::move(entries));
}

}  // namespace absa
