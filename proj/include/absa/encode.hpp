#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absa/textproc.hpp"

namespace absa {

using IntSequence = std::vector<std::int64_t>;

// Unique id per aspect phrase, assigned 1, 2, 3, ... in order of first
// appearance. Phrases are the aspect tokens joined by single spaces.
class AspectIdMap {
 public:
  static AspectIdMap assign(std::span<const TokenizedInstance> corpus);
  static AspectIdMap from_phrases(std::vector<std::string> phrases_in_id_order);

  std::optional<std::int64_t> id(const std::string& phrase) const;
  /// Id of a known phrase, otherwise the shared id size()+1 for unseen aspects.
  std::int64_t id_or_unknown(const std::string& phrase) const;
  std::size_t size() const { return phrases_.size(); }
  const std::vector<std::string>& phrases() const { return phrases_; }

  friend bool operator==(const AspectIdMap& a, const AspectIdMap& b) {
    return a.phrases_ == b.phrases_;
  }

 private:
  std::vector<std::string> phrases_;
  std::map<std::string, std::int64_t> ids_;
};

enum class AspectMode { per_token, phrase };

/// Zero vector with the aspect id at aspect positions. Phrase mode
/// collapses the aspect to a single entry.
IntSequence id_encode(const TokenizedInstance& ti, std::int64_t aspect_id, AspectMode mode);
IntSequence bit_mask(const TokenizedInstance& ti);
/// Distance of every context token to the aspect, the aspect counting as
/// one position and excluded from the output.
IntSequence location_encode(const TokenizedInstance& ti);

/// Token count with the aspect collapsed to one position.
std::size_t collapsed_length(const TokenizedInstance& ti);

/// Post-pads with zeros or truncates the tail to exactly max_len entries.
/// Truncation dropping any index below protected_end is a PaddingError.
IntSequence zero_pad(std::span<const std::int64_t> seq, std::size_t max_len,
                     std::size_t protected_end);
/// Aspect-sequence form: every nonzero entry is protected.
IntSequence zero_pad(std::span<const std::int64_t> seq, std::size_t max_len);

/// 95th percentile (linear interpolation) of collapsed lengths, rounded up.
std::size_t default_max_len(std::span<const TokenizedInstance> corpus);

// Sparse vector with sorted, explicit-nonzero entries.
class FeatureVector {
 public:
  using Entry = std::pair<std::uint32_t, double>;

  FeatureVector() = default;
  explicit FeatureVector(std::size_t dim) : dim_(dim) {}
  /// Entries are sorted; zeros dropped; duplicate indices summed.
  FeatureVector(std::size_t dim, std::vector<Entry> entries);

  std::size_t dim() const { return dim_; }
  std::span<const Entry> entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }
  double at(std::size_t index) const;
  double norm() const;
  std::vector<double> dense() const;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Entry> entries_;
};

/// Binary bag of words: sentence block then aspect block, 2*|V| wide.
FeatureVector one_hot_vector(const TokenizedInstance& ti, const Vocabulary& vocab);

/// Collapsed token ids (aspect slot 0), phrase-mode aspect sequence and
/// location sequence, each padded to max_len: 3*max_len wide.
FeatureVector location_feature_vector(const TokenizedInstance& ti, const Vocabulary& vocab,
                                      const AspectIdMap& aspects, std::size_t max_len);

struct TfIdfModel {
  std::shared_ptr<const Vocabulary> vocab;
  std::vector<double> idf;  // idf[id - 1]
  std::size_t document_count = 0;
};

/// Smoothed idf: ln((1 + N) / (1 + df)) + 1.
TfIdfModel tfidf_fit(std::span<const TokenizedInstance> corpus,
                     std::shared_ptr<const Vocabulary> vocab);
/// Raw-count tf times idf, L2-normalized unless all zero.
FeatureVector tfidf_transform(const TfIdfModel& model, const TokenizedInstance& ti);

}  // namespace absa
