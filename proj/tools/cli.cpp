#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "absa/error.hpp"
#include "absa/persist.hpp"

namespace absa::cli {

using Json = nlohmann::ordered_json;

std::string_view to_string(Command command) {
  switch (command) {
    case Command::train: return "train";
    case Command::predict: return "predict";
    case Command::cv: return "cv";
    case Command::encode: return "encode";
    case Command::gradcheck: return "gradcheck";
    case Command::metrics: return "metrics";
  }
  return "?";
}

namespace {

struct RawFlags {
  std::string data, test, out, archive, gold, pred, stopwords, embeddings;
  std::string model = "svm";
  std::string features;
  std::size_t k = 5;
  std::uint64_t seed = 42;
  std::size_t hops = 3;
  double lr = 0.01;
  std::size_t epochs = 100;
  std::size_t dim = 0;
  std::size_t max_len = 0;
  std::size_t min_freq = 1;
  std::size_t index = 0;
  double holdout = 0.0;
  bool trainable = false;
};

const std::vector<std::string> kModels{"nb", "dtree", "svm", "rf", "etc", "gbt", "memnet"};
const std::vector<std::string> kFeatures{"oh", "le", "tfidf", "memnet"};

CLI::Option* add_path(CLI::App* app, const std::string& flag, std::string& target,
                      const std::string& help, bool required = false) {
  auto* opt = app->add_option(flag, target, help);
  if (required) opt->required();
  return opt;
}

void add_model_flags(CLI::App* app, RawFlags& raw) {
  app->add_option("--model", raw.model, "Classifier")
      ->check(CLI::IsMember(kModels))
      ->capture_default_str();
  app->add_option("--features", raw.features, "Feature encoding (default: memnet for memnet, else oh)")
      ->check(CLI::IsMember(kFeatures));
  app->add_option("--seed", raw.seed, "Master random seed")->capture_default_str();
  app->add_option("--embeddings", raw.embeddings, "GloVe-format embedding file (memnet)");
  app->add_option("--hops", raw.hops, "Memory network hops")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--lr", raw.lr, "Memory network learning rate")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--epochs", raw.epochs, "Memory network epochs")->capture_default_str();
  app->add_option("--dim", raw.dim, "Embedding dimension (default 50)")->check(CLI::PositiveNumber);
  app->add_flag("--trainable-embeddings", raw.trainable, "Fine-tune embeddings (memnet)");
  app->add_option("--max-len", raw.max_len, "Padded length for le features (default: 95th percentile)")
      ->check(CLI::PositiveNumber);
  app->add_option("--min-freq", raw.min_freq, "Minimum token count for the vocabulary")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--stopwords", raw.stopwords, "Stop-word list for memnet (default: bundled list)");
}

std::optional<std::filesystem::path> opt_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::filesystem::path(s);
}

PipelineConfig pipeline_from(const RawFlags& raw) {
  PipelineConfig p;
  try {
    p.model = model_choice_from_string(raw.model);
    if (raw.features.empty()) {
      p.features = p.model == ModelChoice::memnet ? FeatureMode::memnet : FeatureMode::one_hot;
    } else {
      p.features = feature_mode_from_string(raw.features);
    }
    p.apply_seed(raw.seed);
    p.min_freq = raw.min_freq;
    if (raw.max_len > 0) p.max_len = raw.max_len;
    p.memnet.hops = raw.hops;
    p.memnet.lr = raw.lr;
    p.memnet.epochs = raw.epochs;
    p.memnet.trainable_embeddings = raw.trainable;
    if (raw.dim > 0) p.embedding_dim = raw.dim;
    p.embeddings = opt_path(raw.embeddings);
    p.validate();
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  return p;
}

std::vector<Polarity> read_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open label file " + path.string());
  std::vector<Polarity> labels;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string field = line.substr(first, last - first + 1);
    std::size_t used = 0;
    long long value = 0;
    try {
      value = std::stoll(field, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != field.size()) {
      throw ParseError(path.string() + ": line " + std::to_string(number) + ": expected -1, 0 or 1, got \"" +
                       field + "\"");
    }
    try {
      labels.push_back(polarity_from_int(value));
    } catch (const ValidationError& e) {
      throw ParseError(path.string() + ": line " + std::to_string(number) + ": " + e.what());
    }
  }
  return labels;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw IoError("failed writing " + path.string());
}

PipelineConfig with_stopwords(const RunConfig& config) {
  PipelineConfig p = config.pipeline;
  if (p.model == ModelChoice::memnet) {
    const StopList list = config.stopwords ? text::load_stopwords(*config.stopwords) : text::default_stopwords();
    p.stopwords.assign(list.begin(), list.end());
  }
  return p;
}

Json metrics_json(const eval::Metrics& m) {
  Json j;
  Json confusion = Json::array();
  for (const auto& row : m.confusion) confusion.push_back(row);
  j["confusion_order"] = {"negative", "neutral", "positive"};
  j["confusion"] = confusion;
  for (const Polarity p : {Polarity::positive, Polarity::negative, Polarity::neutral}) {
    const auto c = class_index(p);
    const char* name = p == Polarity::positive ? "positive" : p == Polarity::negative ? "negative" : "neutral";
    j[name] = {{"precision", m.scores.precision[c]}, {"recall", m.scores.recall[c]}, {"f1", m.scores.f1[c]}};
  }
  j["accuracy"] = m.scores.accuracy;
  return j;
}

int run_train(const RunConfig& config, std::ostream& out) {
  Dataset data = parse_dataset(*config.data);
  Dataset held_out;
  if (config.holdout > 0.0) {
    auto [train, test] = shuffle_split(data, config.holdout, config.pipeline.seed);
    data = std::move(train);
    held_out = std::move(test);
  } else if (config.test) {
    held_out = parse_dataset(*config.test);
  }
  spdlog::info("fitting {} on {} instances", classifier_label(config.pipeline.model, config.pipeline.features),
               data.size());
  const ModelBundle bundle = fit_bundle(with_stopwords(config), data);
  persist::save(bundle, *config.out);
  spdlog::info("saved {}", config.out->string());
  if (held_out.size() > 0) {
    const auto predicted = predict(bundle, held_out);
    const auto gold = held_out.labels();
    const auto m = eval::compute_metrics(gold, predicted);
    out << metrics_json(m).dump(2) << '\n';
  }
  return 0;
}

int run_predict(const RunConfig& config, std::ostream& out) {
  const ModelBundle bundle = persist::load(*config.archive);
  const Dataset data = parse_dataset(*config.data);
  std::ostringstream labels;
  for (const Polarity p : predict(bundle, data)) labels << to_int(p) << '\n';
  if (config.out) {
    write_text(*config.out, labels.str());
  } else {
    out << labels.str();
  }
  return 0;
}

int run_cv(const RunConfig& config, std::ostream& out) {
  const Dataset data = parse_dataset(*config.data);
  const auto report =
      eval::run_crossval(data, make_pipeline(with_stopwords(config)), config.k, config.pipeline.seed);
  const std::string table = eval::render_table(report);
  if (config.out) {
    auto txt = *config.out;
    auto json = *config.out;
    txt += ".txt";
    json += ".json";
    write_text(txt, table);
    write_text(json, eval::render_json(report));
    spdlog::info("wrote {} and {}", txt.string(), json.string());
  } else {
    out << table;
  }
  return 0;
}

int run_encode(const RunConfig& config, std::ostream& out) {
  const Dataset data = parse_dataset(*config.data);
  const auto tis = text::tokenize_dataset(data);
  const auto aspects = AspectIdMap::assign(tis);
  const auto vocab = std::make_shared<const Vocabulary>(build_vocab(tis));
  const auto tfidf = tfidf_fit(tis, vocab);

  auto encode_one = [&](const TokenizedInstance& ti) {
    Json tf = Json::object();
    for (const auto& [idx, val] : tfidf_transform(tfidf, ti).entries()) tf[std::to_string(idx)] = val;
    Json j;
    j["aspect_sequence"] = id_encode(ti, aspects.id_or_unknown(ti.aspect_phrase()), AspectMode::per_token);
    j["bit_mask"] = bit_mask(ti);
    j["location_sequence"] = location_encode(ti);
    j["tfidf"] = tf;
    return j;
  };

  std::ostringstream text;
  if (config.index) {
    if (*config.index >= tis.size()) {
      throw ValidationError("--index " + std::to_string(*config.index) + " out of range for " +
                            std::to_string(tis.size()) + " instances");
    }
    text << encode_one(tis[*config.index]).dump() << '\n';
  } else {
    for (const auto& ti : tis) text << encode_one(ti).dump() << '\n';
  }
  if (config.out) {
    write_text(*config.out, text.str());
  } else {
    out << text.str();
  }
  return 0;
}

int run_gradcheck(const RunConfig& config, std::ostream& out) {
  constexpr double kEpsilon = 1e-5;
  constexpr double kTolerance = 1e-4;
  double worst = 0.0;
  for (const bool trainable : {false, true}) {
    const auto c = memnet::random_check_case(config.grad_dim, config.grad_context, config.pipeline.memnet.hops,
                                             trainable, config.pipeline.seed);
    const double err = memnet::grad_check(c.params, c.input, c.gold, kEpsilon);
    spdlog::info("d={} m={} K={} embeddings {}: max relative error {:.3e}", config.grad_dim,
                 config.grad_context, config.pipeline.memnet.hops, trainable ? "trainable" : "frozen", err);
    worst = std::max(worst, err);
  }
  out << "max relative error " << worst << '\n';
  if (worst >= kTolerance) {
    spdlog::error("gradient check failed: {:.3e} >= {:.0e}", worst, kTolerance);
    return 1;
  }
  return 0;
}

int run_metrics(const RunConfig& config, std::ostream& out) {
  const auto gold = read_labels(*config.gold);
  const auto pred = read_labels(*config.pred);
  out << metrics_json(eval::compute_metrics(gold, pred)).dump(2) << '\n';
  return 0;
}

spdlog::level::level_enum log_level_from_env(bool& unknown) {
  unknown = false;
  const char* env = std::getenv("ABSA_LOG");
  const std::string v = env ? env : "";
  if (v.empty() || v == "info") return spdlog::level::info;
  if (v == "quiet") return spdlog::level::off;
  if (v == "debug") return spdlog::level::debug;
  unknown = true;
  return spdlog::level::info;
}

}  // namespace

RunConfig parse_args(const std::vector<std::string>& args) {
  CLI::App app{"Aspect-based sentiment analysis: encoders, classifiers, memory network, evaluation.", "absa"};
  app.require_subcommand(1);
  RawFlags raw;

  auto* train = app.add_subcommand("train", "Fit a model and write a .absa archive");
  add_path(train, "--data", raw.data, "Training JSONL", true);
  add_path(train, "--out", raw.out, "Archive path", true);
  add_path(train, "--test", raw.test, "Labelled JSONL scored after fitting");
  train->add_option("--holdout", raw.holdout, "Fraction of --data held out and scored instead")
      ->check(CLI::Range(0.0, 1.0));
  add_model_flags(train, raw);

  auto* predict_cmd = app.add_subcommand("predict", "Label instances with a saved archive");
  add_path(predict_cmd, "--archive", raw.archive, ".absa archive", true);
  add_path(predict_cmd, "--data", raw.data, "JSONL to label", true);
  add_path(predict_cmd, "--out", raw.out, "Label file (default: stdout)");

  auto* cv = app.add_subcommand("cv", "Stratified k-fold cross-validation report");
  add_path(cv, "--data", raw.data, "Labelled JSONL", true);
  add_path(cv, "--out", raw.out, "Report prefix; writes <out>.txt and <out>.json (default: table to stdout)");
  cv->add_option("--k", raw.k, "Number of folds")->check(CLI::Range(2, 1000))->capture_default_str();
  add_model_flags(cv, raw);

  auto* encode = app.add_subcommand("encode", "Print sequence and tf-idf encodings as JSON lines");
  add_path(encode, "--data", raw.data, "JSONL", true);
  add_path(encode, "--out", raw.out, "Output file (default: stdout)");
  auto* index_opt = encode->add_option("--index", raw.index, "Zero-based position of one instance");

  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of memory network gradients");
  gradcheck->add_option("--seed", raw.seed, "Random seed")->capture_default_str();
  gradcheck->add_option("--hops", raw.hops, "Hops")->check(CLI::PositiveNumber)->capture_default_str();
  gradcheck->add_option("--dim", raw.dim, "Embedding dimension (default 8)")->check(CLI::PositiveNumber);

  auto* metrics = app.add_subcommand("metrics", "Precision, recall, F1 and accuracy from label files");
  add_path(metrics, "--gold", raw.gold, "Gold labels, one of -1/0/1 per line", true);
  add_path(metrics, "--pred", raw.pred, "Predicted labels, same layout", true);

  if (args.empty()) throw UsageError(app.help());

  std::vector<const char*> argv{"absa"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    std::ostringstream text;
    std::ostringstream ignored;
    app.exit(e, text, ignored);
    throw HelpRequested{text.str()};
  } catch (const CLI::ParseError& e) {
    throw UsageError(std::string(e.what()) + "\nRun with --help for more information.");
  }

  RunConfig c;
  const CLI::App* chosen = app.get_subcommands().front();
  if (chosen == train) c.command = Command::train;
  else if (chosen == predict_cmd) c.command = Command::predict;
  else if (chosen == cv) c.command = Command::cv;
  else if (chosen == encode) c.command = Command::encode;
  else if (chosen == gradcheck) c.command = Command::gradcheck;
  else c.command = Command::metrics;

  c.data = opt_path(raw.data);
  c.test = opt_path(raw.test);
  c.out = opt_path(raw.out);
  c.archive = opt_path(raw.archive);
  c.gold = opt_path(raw.gold);
  c.pred = opt_path(raw.pred);
  c.stopwords = opt_path(raw.stopwords);
  c.k = raw.k;
  c.holdout = raw.holdout;
  if (index_opt->count() > 0) c.index = raw.index;
  if (c.command == Command::train && c.holdout > 0.0 && c.test) {
    throw UsageError("--holdout and --test are mutually exclusive");
  }
  if (c.command == Command::train || c.command == Command::cv) {
    c.pipeline = pipeline_from(raw);
  } else {
    c.pipeline.apply_seed(raw.seed);
    c.pipeline.memnet.hops = raw.hops;
    if (raw.dim > 0) c.grad_dim = raw.dim;
  }
  return c;
}

std::string describe(const RunConfig& c) {
  Json j;
  j["command"] = to_string(c.command);
  auto put = [&](const char* key, const std::optional<std::filesystem::path>& p) {
    if (p) j[key] = p->string();
  };
  put("data", c.data);
  put("test", c.test);
  put("out", c.out);
  put("archive", c.archive);
  put("gold", c.gold);
  put("pred", c.pred);
  put("stopwords", c.stopwords);
  j["seed"] = c.pipeline.seed;
  switch (c.command) {
    case Command::cv:
      j["k"] = c.k;
      j["pipeline"] = Json::parse(absa::describe(c.pipeline));
      break;
    case Command::train:
      if (c.holdout > 0.0) j["holdout"] = c.holdout;
      j["pipeline"] = Json::parse(absa::describe(c.pipeline));
      break;
    case Command::encode:
      if (c.index) j["index"] = *c.index;
      break;
    case Command::gradcheck:
      j["dim"] = c.grad_dim;
      j["contexts"] = c.grad_context;
      j["hops"] = c.pipeline.memnet.hops;
      break;
    default:
      break;
  }
  return j.dump();
}

int run(const RunConfig& config, std::ostream& out) {
  switch (config.command) {
    case Command::train: return run_train(config, out);
    case Command::predict: return run_predict(config, out);
    case Command::cv: return run_cv(config, out);
    case Command::encode: return run_encode(config, out);
    case Command::gradcheck: return run_gradcheck(config, out);
    case Command::metrics: return run_metrics(config, out);
  }
  return 1;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_st>(err);
  auto logger = std::make_shared<spdlog::logger>("absa", sink);
  logger->set_pattern("[%l] %v");
  bool unknown_level = false;
  logger->set_level(log_level_from_env(unknown_level));
  auto previous = spdlog::default_logger();
  spdlog::set_default_logger(logger);
  struct Restore {
    std::shared_ptr<spdlog::logger> logger;
    ~Restore() { spdlog::set_default_logger(logger); }
  } restore{previous};
  if (unknown_level) spdlog::warn("ABSA_LOG must be quiet, info or debug; using info");

  RunConfig config;
  try {
    config = parse_args(args);
  } catch (const HelpRequested& h) {
    out << h.text;
    return 0;
  } catch (const UsageError& e) {
    err << e.what() << '\n';
    return 2;
  }
  spdlog::info("config {}", describe(config));
  try {
    return run(config, out) == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace absa::cli
