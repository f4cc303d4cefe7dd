#include "absa/persist.hpp"

#include <bit>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unistd.h>

#include <json.hpp>

#include "absa/error.hpp"

namespace absa::persist {

using Json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kMagic{"ABSA\0ARC", 8};

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_u64(std::string_view bytes, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) {
    v = (v << 8) | static_cast<unsigned char>(bytes[at + static_cast<std::size_t>(i)]);
  }
  return v;
}

class PayloadWriter {
 public:
  Json put(std::span<const double> values) {
    Json ref = {{"offset", data_.size()}, {"count", values.size()}};
    data_.insert(data_.end(), values.begin(), values.end());
    return ref;
  }
  Json put(double value) { return put(std::span<const double>(&value, 1)); }
  const std::vector<double>& data() const { return data_; }

 private:
  std::vector<double> data_;
};

class PayloadReader {
 public:
  explicit PayloadReader(std::vector<double> data) : data_(std::move(data)) {}

  std::vector<double> get(const Json& ref) const {
    const auto offset = ref.at("offset").get<std::uint64_t>();
    const auto count = ref.at("count").get<std::uint64_t>();
    if (offset > data_.size() || count > data_.size() - offset) {
      throw CorruptArchiveError("payload reference [" + std::to_string(offset) + ", +" +
                                std::to_string(count) + ") exceeds payload of " +
                                std::to_string(data_.size()) + " values");
    }
    return {data_.begin() + static_cast<std::ptrdiff_t>(offset),
            data_.begin() + static_cast<std::ptrdiff_t>(offset + count)};
  }
  std::vector<double> get(const Json& ref, std::size_t expected) const {
    auto v = get(ref);
    if (v.size() != expected) {
      throw CorruptArchiveError("payload array has " + std::to_string(v.size()) +
                                " values, expected " + std::to_string(expected));
    }
    return v;
  }
  double scalar(const Json& ref) const { return get(ref, 1)[0]; }

 private:
  std::vector<double> data_;
};

// ---- trees --------------------------------------------------------------

template <typename Leaf>
Json write_tree(const classic::Tree<Leaf>& tree, PayloadWriter& w) {
  std::vector<std::int64_t> feature, left, right, samples;
  std::vector<double> threshold, leaf;
  for (const auto& n : tree.nodes) {
    feature.push_back(n.feature);
    left.push_back(n.left);
    right.push_back(n.right);
    samples.push_back(static_cast<std::int64_t>(n.samples));
    threshold.push_back(n.threshold);
    if constexpr (std::is_same_v<Leaf, double>) {
      leaf.push_back(n.leaf);
    } else {
      leaf.insert(leaf.end(), n.leaf.begin(), n.leaf.end());
    }
  }
  return {{"feature", feature}, {"left", left},          {"right", right},
          {"samples", samples}, {"threshold", w.put(threshold)}, {"leaf", w.put(leaf)}};
}

template <typename Leaf>
classic::Tree<Leaf> read_tree(const Json& j, const PayloadReader& r) {
  const auto feature = j.at("feature").get<std::vector<std::int64_t>>();
  const auto left = j.at("left").get<std::vector<std::int64_t>>();
  const auto right = j.at("right").get<std::vector<std::int64_t>>();
  const auto samples = j.at("samples").get<std::vector<std::int64_t>>();
  const std::size_t n = feature.size();
  if (n == 0 || left.size() != n || right.size() != n || samples.size() != n) {
    throw CorruptArchiveError("inconsistent tree node arrays");
  }
  constexpr std::size_t width = std::is_same_v<Leaf, double> ? 1 : kNumClasses;
  const auto threshold = r.get(j.at("threshold"), n);
  const auto leaf = r.get(j.at("leaf"), n * width);
  classic::Tree<Leaf> tree;
  tree.nodes.resize(n);
  const auto valid_child = [n](std::int64_t c) { return c > 0 && static_cast<std::size_t>(c) < n; };
  for (std::size_t i = 0; i < n; ++i) {
    auto& node = tree.nodes[i];
    node.feature = static_cast<std::int32_t>(feature[i]);
    node.left = static_cast<std::int32_t>(left[i]);
    node.right = static_cast<std::int32_t>(right[i]);
    node.samples = static_cast<std::size_t>(samples[i]);
    node.threshold = threshold[i];
    if (!node.is_leaf() && !(valid_child(left[i]) && valid_child(right[i]))) {
      throw CorruptArchiveError("tree node " + std::to_string(i) + " has invalid children");
    }
    if constexpr (std::is_same_v<Leaf, double>) {
      node.leaf = leaf[i];
    } else {
      std::copy_n(leaf.begin() + static_cast<std::ptrdiff_t>(i * width), width, node.leaf.begin());
    }
  }
  return tree;
}

// ---- classical models ---------------------------------------------------

Json write_model(const classic::ClassicModel& m, PayloadWriter& w) {
  Json j;
  j["kind"] = classic::to_string(m.kind);
  j["dim"] = m.dim;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, classic::NaiveBayesModel>) {
          j["log_prior"] = w.put(p.log_prior);
          j["log_likelihood"] = Json::array();
          for (const auto& ll : p.log_likelihood) j["log_likelihood"].push_back(w.put(ll));
        } else if constexpr (std::is_same_v<T, classic::ClassificationTree>) {
          j["tree"] = write_tree(p, w);
        } else if constexpr (std::is_same_v<T, classic::LinearSvmModel>) {
          j["weights"] = Json::array();
          for (const auto& wc : p.weights) j["weights"].push_back(w.put(wc));
          j["bias"] = w.put(p.bias);
        } else if constexpr (std::is_same_v<T, classic::ForestModel>) {
          j["trees"] = Json::array();
          for (const auto& t : p.trees) j["trees"].push_back(write_tree(t, w));
        } else {
          j["learning_rate"] = w.put(p.learning_rate);
          j["rounds"] = Json::array();
          for (const auto& round : p.rounds) {
            Json trees = Json::array();
            for (const auto& t : round) trees.push_back(write_tree(t, w));
            j["rounds"].push_back(trees);
          }
        }
      },
      m.params);
  return j;
}

classic::ClassicModel read_model(const Json& j, const PayloadReader& r) {
  classic::ClassicModel m;
  m.kind = classic::model_kind_from_string(j.at("kind").get<std::string>());
  m.dim = j.at("dim").get<std::size_t>();
  const std::size_t dim = m.dim;
  switch (m.kind) {
    case classic::ModelKind::naive_bayes: {
      classic::NaiveBayesModel nb;
      nb.dim = dim;
      const auto prior = r.get(j.at("log_prior"), kNumClasses);
      std::copy(prior.begin(), prior.end(), nb.log_prior.begin());
      const auto& ll = j.at("log_likelihood");
      if (ll.size() != kNumClasses) throw CorruptArchiveError("naive Bayes needs 3 likelihood tables");
      for (std::size_t c = 0; c < kNumClasses; ++c) nb.log_likelihood[c] = r.get(ll[c], dim);
      m.params = std::move(nb);
      break;
    }
    case classic::ModelKind::decision_tree:
      m.params = read_tree<classic::ClassScores>(j.at("tree"), r);
      break;
    case classic::ModelKind::svm: {
      classic::LinearSvmModel svm;
      svm.dim = dim;
      const auto& ws = j.at("weights");
      if (ws.size() != kNumClasses) throw CorruptArchiveError("svm needs 3 weight vectors");
      for (std::size_t c = 0; c < kNumClasses; ++c) svm.weights[c] = r.get(ws[c], dim);
      const auto bias = r.get(j.at("bias"), kNumClasses);
      std::copy(bias.begin(), bias.end(), svm.bias.begin());
      m.params = std::move(svm);
      break;
    }
    case classic::ModelKind::random_forest:
    case classic::ModelKind::extra_trees: {
      classic::ForestModel forest;
      for (const auto& t : j.at("trees")) forest.trees.push_back(read_tree<classic::ClassScores>(t, r));
      m.params = std::move(forest);
      break;
    }
    case classic::ModelKind::gradient_boosting: {
      classic::BoostedModel gb;
      gb.dim = dim;
      gb.learning_rate = r.scalar(j.at("learning_rate"));
      for (const auto& round : j.at("rounds")) {
        if (round.size() != kNumClasses) throw CorruptArchiveError("boosting round needs 3 trees");
        std::array<classic::RegressionTree, kNumClasses> trees;
        for (std::size_t k = 0; k < kNumClasses; ++k) trees[k] = read_tree<double>(round[k], r);
        gb.rounds.push_back(std::move(trees));
      }
      m.params = std::move(gb);
      break;
    }
  }
  return m;
}

// ---- bundles ------------------------------------------------------------

Json write_vocab(const Vocabulary& v) {
  return Json(std::vector<std::string>(v.tokens().begin(), v.tokens().end()));
}

std::shared_ptr<const Vocabulary> read_vocab(const Json& j) {
  return std::make_shared<const Vocabulary>(
      Vocabulary::from_tokens(j.get<std::vector<std::string>>()));
}

Json write_body(const ClassicBundle& b, PayloadWriter& w) {
  Json j;
  j["features"] = to_string(b.features);
  j["vocabulary"] = write_vocab(*b.vocab);
  if (b.features == FeatureMode::location) {
    j["aspects"] = b.aspects.phrases();
    j["max_len"] = b.max_len;
  }
  if (b.features == FeatureMode::tfidf) {
    j["tfidf"] = {{"document_count", b.tfidf.document_count}, {"idf", w.put(b.tfidf.idf)}};
  }
  j["model"] = write_model(b.model, w);
  return j;
}

ClassicBundle read_classic(const Json& j, const PayloadReader& r) {
  ClassicBundle b;
  b.features = feature_mode_from_string(j.at("features").get<std::string>());
  b.vocab = read_vocab(j.at("vocabulary"));
  if (b.features == FeatureMode::location) {
    b.aspects = AspectIdMap::from_phrases(j.at("aspects").get<std::vector<std::string>>());
    b.max_len = j.at("max_len").get<std::size_t>();
  }
  if (b.features == FeatureMode::tfidf) {
    const auto& t = j.at("tfidf");
    b.tfidf.vocab = b.vocab;
    b.tfidf.document_count = t.at("document_count").get<std::size_t>();
    b.tfidf.idf = r.get(t.at("idf"), b.vocab->size());
  }
  b.model = read_model(j.at("model"), r);
  return b;
}

Json write_body(const MemNetBundle& b, PayloadWriter& w) {
  const auto& p = b.params;
  Json j;
  j["vocabulary"] = write_vocab(*b.vocab);
  j["stopwords"] = b.stopwords;
  j["dim"] = p.dim;
  j["hops"] = p.hops;
  j["trainable_embeddings"] = p.trainable_embeddings;
  j["embedding_rows"] = p.embeddings.rows;
  const auto& wt = p.weights;
  j["weights"] = {{"w_att", w.put(wt.w_att)}, {"b_att", w.put(wt.b_att)},
                  {"w_lin", w.put(wt.w_lin)}, {"b_lin", w.put(wt.b_lin)},
                  {"w_out", w.put(wt.w_out)}, {"b_out", w.put(wt.b_out)}};
  j["embeddings"] = w.put(p.embeddings.data);
  j["loss_history"] = w.put(b.loss_history);
  return j;
}

MemNetBundle read_memnet(const Json& j, const PayloadReader& r) {
  MemNetBundle b;
  b.vocab = read_vocab(j.at("vocabulary"));
  b.stopwords = j.at("stopwords").get<std::vector<std::string>>();
  auto& p = b.params;
  p.dim = j.at("dim").get<std::size_t>();
  p.hops = j.at("hops").get<std::size_t>();
  p.trainable_embeddings = j.at("trainable_embeddings").get<bool>();
  const std::size_t d = p.dim;
  const std::size_t rows = j.at("embedding_rows").get<std::size_t>();
  if (d == 0 || p.hops == 0 || rows != b.vocab->size() + 1) {
    throw CorruptArchiveError("memnet shapes inconsistent with vocabulary");
  }
  const auto& wj = j.at("weights");
  p.weights.w_att = r.get(wj.at("w_att"), 2 * d);
  p.weights.b_att = r.scalar(wj.at("b_att"));
  p.weights.w_lin = r.get(wj.at("w_lin"), d * d);
  p.weights.b_lin = r.get(wj.at("b_lin"), d);
  p.weights.w_out = r.get(wj.at("w_out"), kNumClasses * d);
  p.weights.b_out = r.get(wj.at("b_out"), kNumClasses);
  p.embeddings.dim = d;
  p.embeddings.rows = rows;
  p.embeddings.data = r.get(j.at("embeddings"), rows * d);
  b.loss_history = r.get(j.at("loss_history"));
  return b;
}

}  // namespace

std::string serialize(const ModelBundle& bundle, std::string_view timestamp) {
  PayloadWriter payload;
  Json header;
  header["format_version"] = kFormatVersion;
  header["kind"] = to_string(bundle.model);
  header["metadata"] = {{"seed", bundle.seed},
                        {"hyperparameters", Json::parse(bundle.hyperparameters.empty()
                                                            ? std::string("{}")
                                                            : bundle.hyperparameters)},
                        {"created", std::string(timestamp)}};
  header["body"] = std::visit([&](const auto& b) { return write_body(b, payload); }, bundle.body);

  const std::string text = header.dump();
  std::string out(kMagic);
  put_u64(out, text.size());
  out += text;
  put_u64(out, payload.data().size());
  for (double v : payload.data()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

ModelBundle deserialize(std::string_view bytes) {
  if (bytes.size() < kMagic.size() + 8 || bytes.substr(0, kMagic.size()) != kMagic) {
    throw CorruptArchiveError("not a model archive (bad or missing magic)");
  }
  std::size_t at = kMagic.size();
  const std::uint64_t header_len = get_u64(bytes, at);
  at += 8;
  if (header_len > bytes.size() - at) throw CorruptArchiveError("truncated archive header");
  Json header;
  try {
    header = Json::parse(bytes.substr(at, header_len));
  } catch (const Json::exception& e) {
    throw CorruptArchiveError(std::string("unreadable archive header: ") + e.what());
  }
  at += header_len;

  try {
    const auto version = header.at("format_version").get<std::int64_t>();
    if (version != kFormatVersion) {
      throw UnsupportedVersionError("archive format version " + std::to_string(version) +
                                    " is not supported (expected " +
                                    std::to_string(kFormatVersion) + ")");
    }
    if (bytes.size() - at < 8) throw CorruptArchiveError("truncated archive payload");
    const std::uint64_t count = get_u64(bytes, at);
    at += 8;
    if (count > (bytes.size() - at) / 8 || bytes.size() - at != count * 8) {
      throw CorruptArchiveError("archive payload length mismatch (truncated or trailing bytes)");
    }
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) values[i] = std::bit_cast<double>(get_u64(bytes, at + 8 * i));
    const PayloadReader reader(std::move(values));

    ModelBundle bundle;
    bundle.model = model_choice_from_string(header.at("kind").get<std::string>());
    const auto& meta = header.at("metadata");
    bundle.seed = meta.at("seed").get<std::uint64_t>();
    bundle.hyperparameters = meta.at("hyperparameters").dump();
    const auto& body = header.at("body");
    if (bundle.model == ModelChoice::memnet) {
      bundle.body = read_memnet(body, reader);
    } else {
      auto classic_body = read_classic(body, reader);
      if (classic_body.model.kind != classic_kind(bundle.model)) {
        throw CorruptArchiveError("archive kind does not match its model body");
      }
      bundle.body = std::move(classic_body);
    }
    return bundle;
  } catch (const Json::exception& e) {
    throw CorruptArchiveError(std::string("malformed archive structure: ") + e.what());
  } catch (const ValidationError& e) {
    throw CorruptArchiveError(std::string("invalid archive contents: ") + e.what());
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void save(const ModelBundle& bundle, const std::filesystem::path& path) {
  const std::string bytes = serialize(bundle, utc_timestamp());
  auto tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write model archive " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw IoError("failed writing model archive " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw IoError("cannot move model archive into place at " + path.string() + ": " + ec.message());
  }
}

ModelBundle load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model archive " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace absa::persist
