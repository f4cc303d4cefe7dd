#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace absa {

// Sentiment label. Class indices order the labels negative < neutral < positive,
// which is also the tie-break order used by every classifier.
enum class Polarity : std::int8_t { negative = -1, neutral = 0, positive = 1 };

inline constexpr std::size_t kNumClasses = 3;

constexpr std::size_t class_index(Polarity p) {
  return static_cast<std::size_t>(static_cast<int>(p) + 1);
}
constexpr Polarity polarity_from_index(std::size_t index) {
  return static_cast<Polarity>(static_cast<int>(index) - 1);
}
constexpr int to_int(Polarity p) { return static_cast<int>(p); }

/// Throws ValidationError for anything outside {-1, 0, +1}.
Polarity polarity_from_int(long long value);

/// Half-open range [from, to) counted in Unicode scalar values.
struct CharSpan {
  std::size_t from = 0;
  std::size_t to = 0;
  friend bool operator==(const CharSpan&, const CharSpan&) = default;
};

struct Instance {
  std::uint64_t id = 0;
  std::string text;         // UTF-8
  std::string aspect_term;  // UTF-8, equals text[span] in code points
  CharSpan aspect_span;
  Polarity polarity = Polarity::neutral;
  friend bool operator==(const Instance&, const Instance&) = default;
};

struct Dataset {
  std::string name;
  std::vector<Instance> instances;

  std::size_t size() const { return instances.size(); }
  bool empty() const { return instances.empty(); }
  std::vector<Polarity> labels() const;
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

namespace utf8 {

/// Decodes UTF-8 into code points. Throws ValidationError on malformed input.
std::vector<char32_t> decode(std::string_view text);
std::string encode(std::span<const char32_t> code_points);
std::size_t length(std::string_view text);
/// Substring by code-point offsets [from, to).
std::string substr(std::string_view text, std::size_t from, std::size_t to);

}  // namespace utf8

/// Checks span bounds and that text[span] == aspect_term.
void validate(const Instance& instance);

Dataset read_dataset(std::istream& in, std::string name = {});
Dataset parse_dataset(const std::filesystem::path& path);

void write_dataset(std::ostream& out, const Dataset& dataset);
void save_dataset(const std::filesystem::path& path, const Dataset& dataset);

/// Seeded shuffle followed by a split with |test| = round(test_fraction * n),
/// rounding half to even. Either side ending up empty is an error.
std::pair<Dataset, Dataset> shuffle_split(const Dataset& dataset,
                                          double test_fraction,
                                          std::uint64_t seed);

/// Dataset holding the instances at the given positions, in that order.
Dataset subset(const Dataset& dataset, std::span<const std::size_t> positions);

}  // namespace absa
