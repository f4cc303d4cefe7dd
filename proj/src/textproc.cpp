#include "absa/textproc.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "absa/error.hpp"

namespace absa {

std::string TokenizedInstance::aspect_phrase() const {
  std::string out;
  for (const auto& tok : aspect_tokens()) {
    if (!out.empty()) out.push_back(' ');
    out += tok;
  }
  return out;
}

namespace text {

namespace {

bool is_filtered(char32_t cp) {
  return cp < 0x80 && kFilterChars.find(static_cast<char>(cp)) != std::string_view::npos;
}

char32_t lower(char32_t cp) { return (cp >= U'A' && cp <= U'Z') ? cp + 32 : cp; }

}  // namespace

std::vector<Token> tokenize_with_offsets(std::string_view text) {
  const auto cps = utf8::decode(text);
  std::vector<Token> out;
  std::vector<char32_t> current;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    if (!current.empty()) {
      out.push_back({utf8::encode(current), {start, end}});
      current.clear();
    }
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t cp = cps[i];
    if (cp == U' ' || is_filtered(cp)) {
      flush(i);
      continue;
    }
    if (current.empty()) start = i;
    current.push_back(lower(cp));
  }
  flush(cps.size());
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (auto& tok : tokenize_with_offsets(text)) out.push_back(std::move(tok.text));
  return out;
}

TokenSpan align_aspect_span(std::string_view text, CharSpan aspect,
                            std::span<const Token> tokens) {
  std::optional<std::size_t> first;
  std::size_t last = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& c = tokens[i].chars;
    if (c.to <= aspect.from || c.from >= aspect.to) continue;
    if (c.from < aspect.from || c.to > aspect.to) {
      throw AlignmentError("aspect boundary [" + std::to_string(aspect.from) + ", " +
                           std::to_string(aspect.to) + ") cuts through token \"" +
                           tokens[i].text + "\" in \"" + std::string(text) + "\"");
    }
    if (!first) first = i;
    last = i;
  }
  if (!first) {
    throw AlignmentError("aspect \"" + utf8::substr(text, aspect.from, aspect.to) +
                         "\" contains no token characters");
  }
  return {*first, last + 1};
}

TokenizedInstance tokenize_instance(const Instance& instance) {
  const auto toks = tokenize_with_offsets(instance.text);
  TokenizedInstance ti;
  try {
    ti.aspect = align_aspect_span(instance.text, instance.aspect_span, toks);
  } catch (const AlignmentError& e) {
    throw AlignmentError("instance " + std::to_string(instance.id) + ": " + e.what());
  }
  ti.tokens.reserve(toks.size());
  for (const auto& t : toks) ti.tokens.push_back(t.text);
  ti.polarity = instance.polarity;
  return ti;
}

std::vector<TokenizedInstance> tokenize_dataset(const Dataset& dataset) {
  std::vector<TokenizedInstance> out;
  out.reserve(dataset.size());
  for (const auto& inst : dataset.instances) out.push_back(tokenize_instance(inst));
  return out;
}

TokenizedInstance remove_stopwords(const TokenizedInstance& ti, const StopList& stoplist) {
  TokenizedInstance out;
  out.polarity = ti.polarity;
  out.tokens.reserve(ti.tokens.size());
  for (std::size_t i = 0; i < ti.tokens.size(); ++i) {
    if (i == ti.aspect.start) out.aspect.start = out.tokens.size();
    if (ti.aspect.contains(i) || !stoplist.contains(ti.tokens[i])) {
      out.tokens.push_back(ti.tokens[i]);
    }
    if (i + 1 == ti.aspect.end) out.aspect.end = out.tokens.size();
  }
  return out;
}

StopList load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stop-word file " + path.string());
  StopList out;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    out.insert(line.substr(b, e - b + 1));
  }
  return out;
}

StopList default_stopwords() { return load_stopwords(ABSA_DEFAULT_STOPWORDS); }

}  // namespace text

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens_in_id_order) {
  Vocabulary v;
  for (auto& tok : tokens_in_id_order) {
    if (tok.empty()) throw ValidationError("vocabulary token must be non-empty");
    if (!v.token_to_id_.emplace(tok, v.id_to_token_.size()).second) {
      throw ValidationError("duplicate vocabulary token \"" + tok + "\"");
    }
    v.id_to_token_.push_back(std::move(tok));
  }
  return v;
}

std::optional<std::size_t> Vocabulary::id(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  if (it == token_to_id_.end()) return std::nullopt;
  return it->second;
}

std::size_t Vocabulary::id_or_pad(std::string_view token) const {
  return id(token).value_or(0);
}

Vocabulary build_vocab(std::span<const TokenizedInstance> corpus, std::size_t min_freq) {
  std::map<std::string, std::size_t> freq;
  for (const auto& ti : corpus)
    for (const auto& tok : ti.tokens) ++freq[tok];
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [tok, n] : freq)
    if (n >= min_freq) kept.emplace_back(tok, n);
  // std::map iteration is already lexicographic, so a stable sort on
  // frequency leaves ties in lexicographic order.
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens;
  tokens.reserve(kept.size());
  for (auto& [tok, n] : kept) tokens.push_back(tok);
  return Vocabulary::from_tokens(std::move(tokens));
}

}  // namespace absa
