#include <doctest.h>

#include "absa/error.hpp"
#include "absa/textproc.hpp"
#include "support/synthetic.hpp"

using namespace absa;

namespace {

const std::string kSentence = "the battery life of the phone is too short";

std::string join(std::span<const std::string> tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

}  // namespace

TEST_CASE("tokenize") {
  CHECK(text::tokenize(kSentence) ==
        std::vector<std::string>{"the", "battery", "life", "of", "the", "phone", "is", "too", "short"});
  CHECK(text::tokenize("").empty());
  CHECK(text::tokenize("Fast, but HORRIBLE!") == std::vector<std::string>{"fast", "but", "horrible"});
  CHECK(text::tokenize("a\tb\nc") == std::vector<std::string>{"a", "b", "c"});
  CHECK(text::tokenize("don't") == std::vector<std::string>{"don't"});
  CHECK(text::tokenize("ÉTÉ") == std::vector<std::string>{"ÉtÉ"});
}

TEST_CASE("every filter character splits") {
  for (const char c : text::kFilterChars) {
    const std::string s = std::string("x") + c + "y";
    CHECK(text::tokenize(s) == std::vector<std::string>{"x", "y"});
  }
}

TEST_CASE("tokenize is stable through reassembly") {
  const auto d = testing::separable_corpus(40, 11);
  for (const std::string t : {std::string("Hello,,, world!! (x)"), kSentence, std::string("  a  b ")}) {
    const auto once = text::tokenize(t);
    CHECK(text::tokenize(join(once)) == once);
  }
  for (const auto& inst : d.instances) {
    const auto once = text::tokenize(inst.text);
    CHECK(text::tokenize(join(once)) == once);
  }
}

TEST_CASE("align_aspect_span") {
  const auto align = [](std::string_view t, CharSpan span) {
    return text::align_aspect_span(t, span, text::tokenize_with_offsets(t));
  };
  CHECK(align(kSentence, {4, 16}) == TokenSpan{1, 3});
  CHECK(align(kSentence, {0, 42}) == TokenSpan{0, 9});
  CHECK_THROWS_AS(align("good !!! bad", {5, 8}), AlignmentError);
  CHECK_THROWS_AS(align(kSentence, {5, 16}), AlignmentError);
  CHECK(align("(battery) lasts", {0, 9}) == TokenSpan{0, 1});
}

TEST_CASE("tokenize_instance agrees with tokenizing the aspect") {
  for (const auto& inst : testing::separable_corpus(60, 5).instances) {
    const auto ti = text::tokenize_instance(inst);
    CHECK(join(ti.aspect_tokens()) == join(text::tokenize(inst.aspect_term)));
    CHECK(ti.polarity == inst.polarity);
  }
}

TEST_CASE("remove_stopwords protects the aspect") {
  TokenizedInstance ti{text::tokenize(kSentence), {1, 3}, Polarity::negative};
  const auto out = text::remove_stopwords(ti, {"the", "of", "is"});
  CHECK(out.tokens == std::vector<std::string>{"battery", "life", "phone", "too", "short"});
  CHECK(out.aspect == TokenSpan{0, 2});

  CHECK(text::remove_stopwords(ti, {}).tokens == ti.tokens);

  const auto kept = text::remove_stopwords(ti, {"battery", "the"});
  CHECK(kept.aspect_phrase() == "battery life");
  CHECK(kept.tokens.front() == "battery");
}

TEST_CASE("default stop list") {
  const auto list = text::default_stopwords();
  CHECK(list.count("the") == 1);
  CHECK(list.count("not") == 0);
  CHECK(list.count("#") == 0);
}

TEST_CASE("build_vocab ordering") {
  const std::vector<TokenizedInstance> corpus{{{"a", "b", "a"}, {0, 1}, Polarity::neutral}};
  const auto v = build_vocab(corpus);
  CHECK(v.size() == 2);
  CHECK(v.id("a") == 1);
  CHECK(v.id("b") == 2);
  CHECK_FALSE(v.id("c").has_value());
  CHECK(v.id_or_pad("c") == 0);

  CHECK(build_vocab(corpus, 10).size() == 0);

  const std::vector<TokenizedInstance> tied{{{"zeta", "alpha", "mid"}, {0, 1}, Polarity::neutral}};
  const auto t = build_vocab(tied);
  CHECK(t.id("alpha") == 1);
  CHECK(t.id("mid") == 2);
  CHECK(t.id("zeta") == 3);
}

TEST_CASE("vocabulary is a bijection with 0 reserved") {
  const auto tis = text::tokenize_dataset(testing::separable_corpus(80, 2));
  const auto v = build_vocab(tis);
  for (std::size_t id = 1; id <= v.size(); ++id) {
    const auto& tok = v.token(id);
    CHECK(v.id(tok) == id);
  }
}
