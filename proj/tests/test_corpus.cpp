#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "absa/corpus.hpp"
#include "absa/error.hpp"
#include "support/synthetic.hpp"

using namespace absa;

namespace {

Dataset read(const std::string& text) {
  std::istringstream in(text);
  return read_dataset(in, "test");
}

}  // namespace

TEST_CASE("parses the battery life record") {
  const auto d = read(
      R"({"text":"the battery life of the phone is too short","aspect":"battery life","from":4,"to":16,"polarity":-1})"
      "\n");
  REQUIRE(d.size() == 1);
  const auto& inst = d.instances[0];
  CHECK(inst.id == 0);
  CHECK(inst.aspect_span == CharSpan{4, 16});
  CHECK(inst.polarity == Polarity::negative);
  CHECK(inst.aspect_term == "battery life");
}

TEST_CASE("empty input gives an empty dataset") {
  CHECK(read("").empty());
  CHECK(read("\n  \n").empty());
}

TEST_CASE("ids default to the record position and explicit ids are kept") {
  const auto d = read(R"({"text":"a b","aspect":"a","from":0,"to":1,"polarity":1,"id":7})"
                      "\n"
                      R"({"text":"a b","aspect":"b","from":2,"to":3,"polarity":0})"
                      "\n");
  CHECK(d.instances[0].id == 7);
  CHECK(d.instances[1].id == 1);
}

TEST_CASE("rejections name the line") {
  const std::string good = R"({"text":"a b","aspect":"a","from":0,"to":1,"polarity":1})";
  CHECK_THROWS_AS(read(good + "\n" + R"({"text":"a","aspect":"a","from":0,"to":1,"polarity":2})"),
                  ValidationError);
  CHECK_THROWS_WITH_AS(read(good + "\n{not json"), doctest::Contains("line 2"), ParseError);
  CHECK_THROWS_AS(read(R"({"text":"a b","aspect":"b","from":0,"to":1,"polarity":1})"), ValidationError);
  CHECK_THROWS_AS(read(R"({"text":"a b","aspect":"a","from":0,"to":9,"polarity":1})"), ValidationError);
  CHECK_THROWS_AS(read(R"({"text":"a b","from":0,"to":1,"polarity":1})"), ParseError);
  CHECK_THROWS_AS(read(R"({"text":"a","aspect":"a","from":0,"to":1,"polarity":1,"id":3})"
                       "\n"
                       R"({"text":"a","aspect":"a","from":0,"to":1,"polarity":1,"id":3})"),
                  ValidationError);
}

TEST_CASE("extra fields are ignored") {
  const auto d = read(R"({"text":"a","aspect":"a","from":0,"to":1,"polarity":1,"source":"x"})");
  CHECK(d.size() == 1);
}

TEST_CASE("offsets count code points") {
  const auto d = read(R"({"text":"très bon café","aspect":"café","from":9,"to":13,"polarity":1})");
  CHECK(d.instances[0].aspect_term == "café");
  CHECK(utf8::length("très") == 4);
  CHECK(utf8::substr("très bon café", 5, 8) == "bon");
  CHECK_THROWS_AS(utf8::decode("\xc3"), ValidationError);
  CHECK_THROWS_AS(utf8::decode("\xff"), ValidationError);
}

TEST_CASE("write then read round-trips") {
  const auto d = testing::separable_corpus(50, 3);
  std::ostringstream out;
  write_dataset(out, d);
  auto back = read(out.str());
  back.name = d.name;
  CHECK(back == d);
}

TEST_CASE("shuffle_split partitions deterministically") {
  const auto d = testing::noise_corpus(10, 1);
  const auto [train, test] = shuffle_split(d, 0.2, 7);
  CHECK(train.size() == 8);
  CHECK(test.size() == 2);
  std::multiset<std::uint64_t> ids;
  for (const auto& i : train.instances) ids.insert(i.id);
  for (const auto& i : test.instances) ids.insert(i.id);
  CHECK(ids.size() == 10);
  CHECK(std::set<std::uint64_t>(ids.begin(), ids.end()).size() == 10);

  const auto [train2, test2] = shuffle_split(d, 0.2, 7);
  CHECK(train2 == train);
  CHECK(test2 == test);

  CHECK_THROWS_AS(shuffle_split(d, 0.05, 7), ValidationError);
  CHECK_THROWS_AS(shuffle_split(d, 0.99, 7), ValidationError);
  CHECK_THROWS_AS(shuffle_split(Dataset{}, 0.5, 7), ValidationError);
}

TEST_CASE("polarity codomain") {
  CHECK(polarity_from_int(-1) == Polarity::negative);
  CHECK(polarity_from_int(0) == Polarity::neutral);
  CHECK(polarity_from_int(1) == Polarity::positive);
  CHECK_THROWS_AS(polarity_from_int(2), ValidationError);
  CHECK(class_index(Polarity::negative) == 0);
  CHECK(polarity_from_index(2) == Polarity::positive);
}
