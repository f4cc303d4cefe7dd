#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "absa/error.hpp"
#include "absa/persist.hpp"
#include "support/synthetic.hpp"

using namespace absa;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("absa_persist_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

PipelineConfig small_config(ModelChoice model, FeatureMode features) {
  PipelineConfig c;
  c.model = model;
  c.features = features;
  c.classic.rforest.n_trees = 10;
  c.classic.etrees.n_trees = 10;
  c.classic.gboost.n_rounds = 10;
  c.memnet.epochs = 10;
  c.embedding_dim = 8;
  if (model == ModelChoice::memnet) {
    const auto stop = text::default_stopwords();
    c.stopwords.assign(stop.begin(), stop.end());
  }
  return c;
}

const std::vector<std::pair<ModelChoice, FeatureMode>> kKinds{
    {ModelChoice::nb, FeatureMode::one_hot},      {ModelChoice::dtree, FeatureMode::location},
    {ModelChoice::svm, FeatureMode::tfidf},       {ModelChoice::rf, FeatureMode::one_hot},
    {ModelChoice::etc, FeatureMode::location},    {ModelChoice::gbt, FeatureMode::tfidf},
    {ModelChoice::memnet, FeatureMode::memnet},
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

}  // namespace

TEST_CASE("every kind round-trips bit-exactly") {
  TempDir dir;
  const auto data = testing::separable_corpus(80, 21);
  const auto probe = testing::separable_corpus(100, 3);
  for (const auto& [model, features] : kKinds) {
    CAPTURE(to_string(model));
    const auto bundle = fit_bundle(small_config(model, features), data);
    const auto path = dir.path / (std::string(to_string(model)) + ".absa");
    persist::save(bundle, path);
    const auto loaded = persist::load(path);
    CHECK(loaded.model == bundle.model);
    CHECK(loaded.seed == bundle.seed);
    CHECK(loaded.hyperparameters == bundle.hyperparameters);
    CHECK(persist::serialize(loaded, "T") == persist::serialize(bundle, "T"));
    CHECK(predict(loaded, probe) == predict(bundle, probe));
    CHECK(predict(loaded, data) == predict(bundle, data));
    if (model == ModelChoice::memnet) {
      const auto& a = std::get<MemNetBundle>(bundle.body);
      const auto& b = std::get<MemNetBundle>(loaded.body);
      CHECK(a.params == b.params);
      CHECK(a.loss_history == b.loss_history);
      CHECK(a.stopwords == b.stopwords);
      CHECK(*a.vocab == *b.vocab);
    } else {
      const auto& a = std::get<ClassicBundle>(bundle.body);
      const auto& b = std::get<ClassicBundle>(loaded.body);
      CHECK(*a.vocab == *b.vocab);
      CHECK(a.aspects == b.aspects);
      CHECK(a.max_len == b.max_len);
      CHECK(a.tfidf.idf == b.tfidf.idf);
    }
  }
}

TEST_CASE("two saves differ only in the timestamp") {
  TempDir dir;
  const auto bundle = fit_bundle(small_config(ModelChoice::svm, FeatureMode::one_hot), testing::separable_corpus(30, 1));
  CHECK(persist::serialize(bundle, "2026-01-01T00:00:00Z") == persist::serialize(bundle, "2026-01-01T00:00:00Z"));
  persist::save(bundle, dir.path / "a.absa");
  persist::save(bundle, dir.path / "b.absa");
  auto a = read_file(dir.path / "a.absa");
  auto b = read_file(dir.path / "b.absa");
  REQUIRE(a.size() == b.size());
  const auto at = a.find("\"created\":\"");
  REQUIRE(at != std::string::npos);
  const auto len = std::string("\"created\":\"2026-01-01T00:00:00Z").size();
  a.replace(at, len, len, 'x');
  b.replace(at, len, len, 'x');
  CHECK(a == b);
  CHECK(persist::utc_timestamp().size() == 20);
}

TEST_CASE("corrupt and unsupported archives") {
  TempDir dir;
  const auto bundle = fit_bundle(small_config(ModelChoice::nb, FeatureMode::one_hot), testing::separable_corpus(30, 1));
  const std::string bytes = persist::serialize(bundle, "2026-01-01T00:00:00Z");

  write_file(dir.path / "empty.absa", "");
  CHECK_THROWS_AS(persist::load(dir.path / "empty.absa"), CorruptArchiveError);

  for (const std::size_t cut : {std::size_t{4}, std::size_t{12}, bytes.size() / 2, bytes.size() - 1}) {
    CHECK_THROWS_AS(persist::deserialize(std::string_view(bytes).substr(0, cut)), CorruptArchiveError);
  }
  CHECK_THROWS_AS(persist::deserialize(bytes + "x"), CorruptArchiveError);

  std::string future = bytes;
  const auto at = future.find("\"format_version\":1");
  REQUIRE(at != std::string::npos);
  future[at + 17] = '9';
  CHECK_THROWS_AS(persist::deserialize(future), UnsupportedVersionError);
  // version is checked before the body, even when the body is truncated
  CHECK_THROWS_AS(persist::deserialize(std::string_view(future).substr(0, future.size() - 8)),
                  UnsupportedVersionError);

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(persist::deserialize(bad_magic), CorruptArchiveError);
}

TEST_CASE("I/O failures name the path") {
  const auto bundle = fit_bundle(small_config(ModelChoice::nb, FeatureMode::one_hot), testing::separable_corpus(30, 1));
  CHECK_THROWS_WITH_AS(persist::save(bundle, "/nonexistent-dir/x/model.absa"),
                       doctest::Contains("/nonexistent-dir/x/model.absa"), IoError);
  CHECK_THROWS_WITH_AS(persist::load("/nonexistent-dir/model.absa"), doctest::Contains("/nonexistent-dir/model.absa"),
                       IoError);
}

TEST_CASE("save leaves no temporary files") {
  TempDir dir;
  const auto bundle = fit_bundle(small_config(ModelChoice::nb, FeatureMode::one_hot), testing::separable_corpus(30, 1));
  persist::save(bundle, dir.path / "m.absa");
  persist::save(bundle, dir.path / "m.absa");
  CHECK(std::distance(fs::directory_iterator(dir.path), fs::directory_iterator()) == 1);
}
