#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "absa/corpus.hpp"

namespace absa {

/// Half-open token index range [start, end).
struct TokenSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - start; }
  bool contains(std::size_t i) const { return start <= i && i < end; }
  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

struct TokenizedInstance {
  std::vector<std::string> tokens;
  TokenSpan aspect;
  Polarity polarity = Polarity::neutral;

  std::span<const std::string> aspect_tokens() const {
    return std::span(tokens).subspan(aspect.start, aspect.size());
  }
  /// Aspect tokens joined by single spaces.
  std::string aspect_phrase() const;
  friend bool operator==(const TokenizedInstance&, const TokenizedInstance&) = default;
};

using StopList = std::unordered_set<std::string>;

namespace text {

/// Characters replaced by a space before splitting.
inline constexpr std::string_view kFilterChars =
    "!\"#$%&()*+,-./:;<=>?@[\\]^_`{|}~\t\n";

struct Token {
  std::string text;
  CharSpan chars;  // code-point offsets into the source text
};

/// Lowercases ASCII letters, blanks out the filter set, splits on spaces.
std::vector<std::string> tokenize(std::string_view text);
std::vector<Token> tokenize_with_offsets(std::string_view text);

/// Smallest token range covering the aspect characters. Throws
/// AlignmentError when no token overlaps the span or a token straddles
/// the span boundary.
TokenSpan align_aspect_span(std::string_view text, CharSpan aspect,
                            std::span<const Token> tokens);

/// tokenize + align for a corpus instance.
TokenizedInstance tokenize_instance(const Instance& instance);
std::vector<TokenizedInstance> tokenize_dataset(const Dataset& dataset);

/// Drops stop words outside the aspect span; the span is re-indexed.
TokenizedInstance remove_stopwords(const TokenizedInstance& ti, const StopList& stoplist);

/// One token per line, '#' comments and blank lines ignored.
StopList load_stopwords(const std::filesystem::path& path);
StopList default_stopwords();

}  // namespace text

// Token <-> id association. Id 0 is reserved for padding and has no token.
class Vocabulary {
 public:
  Vocabulary() : id_to_token_(1) {}

  /// Builds from tokens already in id order (ids 1..n).
  static Vocabulary from_tokens(std::vector<std::string> tokens_in_id_order);

  std::size_t size() const { return id_to_token_.size() - 1; }
  std::optional<std::size_t> id(std::string_view token) const;
  /// Id of a token, or 0 when out of vocabulary.
  std::size_t id_or_pad(std::string_view token) const;
  const std::string& token(std::size_t id) const { return id_to_token_.at(id); }
  /// Tokens for ids 1..size in order.
  std::span<const std::string> tokens() const { return std::span(id_to_token_).subspan(1); }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.id_to_token_ == b.id_to_token_;
  }

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, std::size_t> token_to_id_;
};

/// Tokens with frequency >= min_freq, ids assigned by descending
/// frequency with lexicographic tie-break.
Vocabulary build_vocab(std::span<const TokenizedInstance> corpus, std::size_t min_freq = 1);

}  // namespace absa
