#include "synthetic.hpp"

#include <cmath>
#include <numeric>

#include "absa/rng.hpp"

namespace absa::testing {

namespace {

const std::vector<std::string> kAspects{"battery", "screen", "keyboard", "service", "pasta",
                                        "battery life", "wine list", "delivery", "camera", "desserts"};
const std::vector<std::string> kSingleAspects{"battery", "screen",  "keyboard", "service",  "pasta",
                                              "delivery", "camera", "desserts", "speakers", "staff"};
const std::array<std::vector<std::string>, 3> kSentiment{{
    {"terrible", "awful", "horrible", "dreadful", "broken"},
    {"average", "ordinary", "adequate", "standard", "typical"},
    {"great", "excellent", "superb", "wonderful", "fantastic"},
}};
const std::vector<std::string> kFillers{"honestly", "overall", "apparently", "yesterday", "lately", "frankly"};

const std::string& pick(Rng& rng, const std::vector<std::string>& pool) {
  return pool[rng.uniform_index(pool.size())];
}

std::vector<std::string> split(const std::string& phrase) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= phrase.size()) {
    const auto end = phrase.find(' ', start);
    out.push_back(phrase.substr(start, end == std::string::npos ? std::string::npos : end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

}  // namespace

Instance make_instance(std::uint64_t id, const std::vector<std::string>& words, std::size_t first,
                       std::size_t last, Polarity polarity) {
  Instance inst;
  inst.id = id;
  inst.polarity = polarity;
  std::size_t chars = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) {
      inst.text += ' ';
      ++chars;
    }
    if (i == first) inst.aspect_span.from = chars;
    inst.text += words[i];
    chars += utf8::length(words[i]);
    if (i + 1 == last) inst.aspect_span.to = chars;
  }
  inst.aspect_term = utf8::substr(inst.text, inst.aspect_span.from, inst.aspect_span.to);
  return inst;
}

Dataset separable_corpus(std::size_t n, std::uint64_t seed, std::array<double, 3> shares) {
  Rng rng(seed);
  std::vector<std::size_t> classes;
  const double total = shares[0] + shares[1] + shares[2];
  for (std::size_t c = 0; c < 3; ++c) {
    const auto count = c == 2 ? n - classes.size()
                              : static_cast<std::size_t>(std::llround(shares[c] / total * static_cast<double>(n)));
    classes.insert(classes.end(), count, c);
  }
  rng.shuffle(std::span(classes));

  Dataset d{"synthetic", {}};
  for (std::size_t i = 0; i < n; ++i) {
    const auto aspect = split(pick(rng, kAspects));
    const auto& word = pick(rng, kSentiment[classes[i]]);
    std::vector<std::string> words;
    std::size_t first = 0;
    if (rng.uniform_index(2) == 0) {
      words = {"the"};
      first = 1;
      words.insert(words.end(), aspect.begin(), aspect.end());
      words.insert(words.end(), {"was", word, pick(rng, kFillers)});
    } else {
      words = {word};
      first = 1;
      words.insert(words.end(), aspect.begin(), aspect.end());
      words.insert(words.end(), {pick(rng, kFillers), pick(rng, kFillers)});
    }
    d.instances.push_back(make_instance(i + 1, words, first, first + aspect.size(),
                                        polarity_from_index(classes[i])));
  }
  return d;
}

Dataset two_aspect_corpus(std::size_t sentences, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d{"two-aspect", {}};
  for (std::size_t s = 0; s < sentences; ++s) {
    const auto& a1 = pick(rng, kSingleAspects);
    std::string a2 = a1;
    while (a2 == a1) a2 = pick(rng, kSingleAspects);
    const bool first_positive = rng.uniform_index(2) == 0;
    const Polarity p1 = first_positive ? Polarity::positive : Polarity::negative;
    const Polarity p2 = first_positive ? Polarity::negative : Polarity::positive;
    const std::vector<std::string> words{pick(rng, kSentiment[class_index(p1)]),
                                         a1,
                                         pick(rng, kFillers),
                                         pick(rng, kFillers),
                                         pick(rng, kFillers),
                                         a2,
                                         pick(rng, kSentiment[class_index(p2)])};
    d.instances.push_back(make_instance(2 * s, words, 1, 2, p1));
    d.instances.push_back(make_instance(2 * s + 1, words, 5, 6, p2));
  }
  return d;
}

Dataset noise_corpus(std::size_t n, std::uint64_t seed) {
  static const std::vector<std::string> words{"alpha", "bravo", "charlie", "delta", "echo",
                                              "foxtrot", "golf", "hotel", "india", "juliet"};
  Rng rng(seed);
  Dataset d{"noise", {}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> w(2 + rng.uniform_index(6));
    for (auto& t : w) t = pick(rng, words);
    const auto pos = rng.uniform_index(w.size());
    d.instances.push_back(make_instance(i + 1, w, pos, pos + 1, polarity_from_index(i % 3)));
  }
  return d;
}

}  // namespace absa::testing
