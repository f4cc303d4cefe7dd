#include "absa/corpus.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "absa/error.hpp"
#include "absa/rng.hpp"

namespace absa {

using nlohmann::json;

Polarity polarity_from_int(long long value) {
  if (value < -1 || value > 1) {
    throw ValidationError("polarity must be -1, 0 or 1, got " +
                          std::to_string(value));
  }
  return static_cast<Polarity>(value);
}

std::vector<Polarity> Dataset::labels() const {
  std::vector<Polarity> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) out.push_back(inst.polarity);
  return out;
}

namespace utf8 {

std::vector<char32_t> decode(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t extra = 0;
    char32_t cp = 0;
    if (lead < 0x80) {
      cp = lead;
    } else if ((lead & 0xE0) == 0xC0) {
      extra = 1;
      cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
      extra = 2;
      cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
      extra = 3;
      cp = lead & 0x07;
    } else {
      throw ValidationError("invalid UTF-8 lead byte at offset " +
                            std::to_string(i));
    }
    if (i + extra >= text.size()) {
      throw ValidationError("truncated UTF-8 sequence at offset " +
                            std::to_string(i));
    }
    for (std::size_t k = 1; k <= extra; ++k) {
      const auto cont = static_cast<unsigned char>(text[i + k]);
      if ((cont & 0xC0) != 0x80) {
        throw ValidationError("invalid UTF-8 continuation byte at offset " +
                              std::to_string(i + k));
      }
      cp = (cp << 6) | (cont & 0x3F);
    }
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

std::string encode(std::span<const char32_t> code_points) {
  std::string out;
  out.reserve(code_points.size());
  for (char32_t cp : code_points) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

std::size_t length(std::string_view text) { return decode(text).size(); }

std::string substr(std::string_view text, std::size_t from, std::size_t to) {
  const auto cps = decode(text);
  to = std::min(to, cps.size());
  from = std::min(from, to);
  return encode(std::span(cps).subspan(from, to - from));
}

}  // namespace utf8

void validate(const Instance& inst) {
  const std::string who = "instance " + std::to_string(inst.id);
  const auto cps = utf8::decode(inst.text);
  const auto [from, to] = inst.aspect_span;
  if (!(from < to && to <= cps.size())) {
    throw ValidationError(who + ": aspect span [" + std::to_string(from) +
                          ", " + std::to_string(to) +
                          ") out of bounds for text of length " +
                          std::to_string(cps.size()));
  }
  const auto covered = utf8::encode(std::span(cps).subspan(from, to - from));
  if (covered != inst.aspect_term) {
    throw ValidationError(who + ": text[" + std::to_string(from) + ", " +
                          std::to_string(to) + ") is \"" + covered +
                          "\", expected aspect \"" + inst.aspect_term + "\"");
  }
}

namespace {

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

Instance instance_from_json(const json& rec, std::size_t position) {
  if (!rec.is_object()) throw ParseError("record is not a JSON object");
  auto field = [&](const char* key) -> const json& {
    auto it = rec.find(key);
    if (it == rec.end()) throw ParseError(std::string("missing field \"") + key + "\"");
    return *it;
  };
  auto integer = [&](const char* key) -> long long {
    const json& v = field(key);
    if (!v.is_number_integer()) {
      throw ParseError(std::string("field \"") + key + "\" must be an integer");
    }
    return v.get<long long>();
  };
  auto text = [&](const char* key) -> std::string {
    const json& v = field(key);
    if (!v.is_string()) {
      throw ParseError(std::string("field \"") + key + "\" must be a string");
    }
    return v.get<std::string>();
  };

  Instance inst;
  inst.text = text("text");
  inst.aspect_term = text("aspect");
  const long long from = integer("from");
  const long long to = integer("to");
  const long long pol = integer("polarity");
  if (rec.contains("id")) {
    const long long id = integer("id");
    if (id < 0) throw ParseError("field \"id\" must be non-negative");
    inst.id = static_cast<std::uint64_t>(id);
  } else {
    inst.id = position;
  }
  const std::string who = "instance " + std::to_string(inst.id);
  if (from < 0 || to < 0) {
    throw ValidationError(who + ": negative aspect offset");
  }
  inst.aspect_span = {static_cast<std::size_t>(from), static_cast<std::size_t>(to)};
  try {
    inst.polarity = polarity_from_int(pol);
  } catch (const ValidationError& e) {
    throw ValidationError(who + ": " + e.what());
  }
  return inst;
}

}  // namespace

Dataset read_dataset(std::istream& in, std::string name) {
  Dataset ds;
  ds.name = std::move(name);
  std::unordered_set<std::uint64_t> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    Instance inst;
    try {
      inst = instance_from_json(json::parse(line), ds.instances.size());
    } catch (const json::exception& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      validate(inst);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!seen.insert(inst.id).second) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": duplicate instance id " + std::to_string(inst.id));
    }
    ds.instances.push_back(std::move(inst));
  }
  return ds;
}

Dataset parse_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path.string());
  return read_dataset(in, path.stem().string());
}

void write_dataset(std::ostream& out, const Dataset& dataset) {
  for (const auto& inst : dataset.instances) {
    json rec;
    rec["id"] = inst.id;
    rec["text"] = inst.text;
    rec["aspect"] = inst.aspect_term;
    rec["from"] = inst.aspect_span.from;
    rec["to"] = inst.aspect_span.to;
    rec["polarity"] = to_int(inst.polarity);
    out << rec.dump() << '\n';
  }
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset " + path.string());
  write_dataset(out, dataset);
}

Dataset subset(const Dataset& dataset, std::span<const std::size_t> positions) {
  Dataset out;
  out.name = dataset.name;
  out.instances.reserve(positions.size());
  for (std::size_t p : positions) out.instances.push_back(dataset.instances.at(p));
  return out;
}

std::pair<Dataset, Dataset> shuffle_split(const Dataset& dataset,
                                          double test_fraction,
                                          std::uint64_t seed) {
  if (dataset.empty()) throw ValidationError("cannot split an empty dataset");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ValidationError("test fraction must lie in (0, 1)");
  }
  const std::size_t n = dataset.size();
  const auto n_test =
      static_cast<std::size_t>(std::nearbyint(test_fraction * static_cast<double>(n)));
  if (n_test == 0 || n_test == n) {
    throw ValidationError("test fraction " + std::to_string(test_fraction) +
                          " leaves an empty side for " + std::to_string(n) +
                          " instances");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span(order));
  const std::span<const std::size_t> all(order);
  return {subset(dataset, all.subspan(n_test)), subset(dataset, all.first(n_test))};
}

}  // namespace absa
