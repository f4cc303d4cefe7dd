#include "absa/memnet.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "absa/encode.hpp"
#include "absa/error.hpp"
#include "absa/rng.hpp"

namespace absa::memnet {

EmbeddingTable random_embeddings(const Vocabulary& vocab, std::size_t dim, std::uint64_t seed) {
  if (dim < 1) throw ValidationError("embedding dimension must be >= 1");
  EmbeddingTable table(vocab.size() + 1, dim);
  Rng rng(seed);
  for (std::size_t i = dim; i < table.data.size(); ++i) table.data[i] = rng.uniform(-0.25, 0.25);
  return table;
}

EmbeddingTable read_embeddings(std::istream& in, const Vocabulary& vocab, std::size_t dim,
                               std::uint64_t seed) {
  EmbeddingTable table = random_embeddings(vocab, dim, seed);
  std::string line;
  std::size_t line_no = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(' ') == std::string::npos) continue;
    std::istringstream fields(line);
    std::string token;
    fields >> token;
    values.clear();
    std::string field;
    while (fields >> field) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ParseError("embeddings line " + std::to_string(line_no) + ": bad float \"" +
                         field + "\"");
      }
      values.push_back(v);
    }
    if (values.size() != dim) {
      throw ParseError("embeddings line " + std::to_string(line_no) + ": expected " +
                       std::to_string(dim) + " floats, found " + std::to_string(values.size()));
    }
    if (auto id = vocab.id(token)) std::copy(values.begin(), values.end(), table.row(*id).begin());
  }
  std::fill_n(table.data.begin(), dim, 0.0);
  return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                               std::size_t dim, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embeddings " + path.string());
  return read_embeddings(in, vocab, dim, seed);
}

Weights Weights::zeros(std::size_t dim) {
  Weights w;
  w.w_att.assign(2 * dim, 0.0);
  w.w_lin.assign(dim * dim, 0.0);
  w.b_lin.assign(dim, 0.0);
  w.w_out.assign(kNumClasses * dim, 0.0);
  w.b_out.assign(kNumClasses, 0.0);
  return w;
}

Params Params::zeros(EmbeddingTable embeddings, std::size_t hops) {
  if (hops < 1) throw ValidationError("memory network needs at least one hop");
  Params p;
  p.dim = embeddings.dim;
  p.hops = hops;
  p.weights = Weights::zeros(embeddings.dim);
  p.embeddings = std::move(embeddings);
  return p;
}

Input make_input(const TokenizedInstance& ti, const Vocabulary& vocab) {
  Input in;
  for (std::size_t i = 0; i < ti.tokens.size(); ++i) {
    const std::size_t id = vocab.id_or_pad(ti.tokens[i]);
    (ti.aspect.contains(i) ? in.aspect : in.context).push_back(id);
  }
  in.aspect_position = ti.aspect.start;
  in.locations = location_encode(ti);
  return in;
}

std::vector<double> location_weights(std::span<const std::int64_t> locations, std::size_t n) {
  std::vector<double> out;
  out.reserve(locations.size());
  for (auto l : locations) {
    if (l < 1 || static_cast<std::size_t>(l) >= n) {
      throw ValidationError("location " + std::to_string(l) + " outside [1, " +
                            std::to_string(n) + ")");
    }
    out.push_back(1.0 - static_cast<double>(l) / static_cast<double>(n));
  }
  return out;
}

namespace {

void softmax_inplace(std::span<double> z) {
  if (z.empty()) return;
  const double peak = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - peak);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Everything the backward pass needs.
struct Tape {
  std::vector<std::size_t> active;             // positions of non-padding contexts
  std::vector<double> location;                // v_i per active context
  std::vector<std::vector<double>> memory;     // m_i per active context
  std::vector<std::size_t> aspect_rows;        // non-padding aspect ids
  std::vector<std::vector<double>> states;     // x_0 .. x_K
  std::vector<std::vector<double>> scores;     // tanh scores per hop
  std::vector<std::vector<double>> attention;  // alpha per hop
  Probabilities probabilities{};
};

void validate_input(const Params& p, const Input& in) {
  if (in.locations.size() != in.context.size()) {
    throw ValidationError("memnet input needs one location per context entry");
  }
  auto check = [&](std::size_t id) {
    if (id >= p.embeddings.rows) {
      throw ValidationError("token id " + std::to_string(id) + " outside embedding table");
    }
  };
  std::for_each(in.context.begin(), in.context.end(), check);
  std::for_each(in.aspect.begin(), in.aspect.end(), check);
}

Tape run_forward(const Params& p, const Input& in) {
  validate_input(p, in);
  const std::size_t d = p.dim;
  const auto& w = p.weights;
  Tape t;

  const auto v = location_weights(in.locations, in.context.size() + 1);
  for (std::size_t i = 0; i < in.context.size(); ++i) {
    if (in.context[i] == 0) continue;
    t.active.push_back(i);
    t.location.push_back(v[i]);
    const auto e = p.embeddings.row(in.context[i]);
    auto& m = t.memory.emplace_back(d);
    for (std::size_t j = 0; j < d; ++j) m[j] = v[i] * e[j];
  }

  std::vector<double> x(d, 0.0);
  for (std::size_t id : in.aspect)
    if (id != 0) t.aspect_rows.push_back(id);
  for (std::size_t id : t.aspect_rows) {
    const auto e = p.embeddings.row(id);
    for (std::size_t j = 0; j < d; ++j) x[j] += e[j];
  }
  if (!t.aspect_rows.empty()) {
    for (double& xj : x) xj /= static_cast<double>(t.aspect_rows.size());
  }
  t.states.push_back(x);

  const std::span<const double> w_mem(w.w_att.data(), d);
  const std::span<const double> w_state(w.w_att.data() + d, d);
  const std::size_t m = t.memory.size();
  for (std::size_t k = 0; k < p.hops; ++k) {
    const auto& prev = t.states.back();
    const double state_term = dot(w_state, prev) + w.b_att;
    std::vector<double> g(m);
    for (std::size_t i = 0; i < m; ++i) g[i] = std::tanh(dot(w_mem, t.memory[i]) + state_term);
    std::vector<double> alpha = g;
    softmax_inplace(alpha);

    std::vector<double> next(w.b_lin);
    for (std::size_t r = 0; r < d; ++r) {
      next[r] += dot(std::span(w.w_lin).subspan(r * d, d), prev);
    }
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < d; ++j) next[j] += alpha[i] * t.memory[i][j];

    t.scores.push_back(std::move(g));
    t.attention.push_back(std::move(alpha));
    t.states.push_back(std::move(next));
  }

  const auto& top = t.states.back();
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    t.probabilities[c] = w.b_out[c] + dot(std::span(w.w_out).subspan(c * d, d), top);
  }
  softmax_inplace(t.probabilities);
  return t;
}

double weight_penalty(Weights w, double l2) {
  if (l2 == 0.0) return 0.0;
  double sq = 0.0;
  w.for_each([&](std::span<double> s) {
    for (double v : s) sq += v * v;
  });
  return 0.5 * l2 * sq;
}

}  // namespace

ForwardResult forward(const Params& params, const Input& input) {
  Tape t = run_forward(params, input);
  ForwardResult out;
  out.probabilities = t.probabilities;
  for (std::size_t k = 0; k < params.hops; ++k) {
    out.hops.push_back({std::move(t.attention[k]), std::move(t.states[k + 1])});
  }
  return out;
}

double loss(const Params& params, const Input& input, Polarity gold, double l2) {
  const Tape t = run_forward(params, input);
  return -std::log(t.probabilities[class_index(gold)]) + weight_penalty(params.weights, l2);
}

double loss_and_gradients(const Params& p, const Input& in, Polarity gold, Gradients& grads,
                          double l2) {
  const Tape t = run_forward(p, in);
  const std::size_t d = p.dim;
  const std::size_t m = t.memory.size();
  const auto& w = p.weights;
  grads.weights = Weights::zeros(d);
  grads.embedding_rows.clear();
  auto& gw = grads.weights;

  const std::size_t gold_index = class_index(gold);
  const double value = -std::log(t.probabilities[gold_index]) + weight_penalty(w, l2);

  // Output layer.
  std::vector<double> dx(d, 0.0);
  const auto& top = t.states.back();
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const double dz = t.probabilities[c] - (c == gold_index ? 1.0 : 0.0);
    gw.b_out[c] = dz;
    for (std::size_t j = 0; j < d; ++j) {
      gw.w_out[c * d + j] = dz * top[j];
      dx[j] += dz * w.w_out[c * d + j];
    }
  }

  // Hops in reverse; the shared tensors accumulate across hops.
  std::vector<std::vector<double>> dmemory(m, std::vector<double>(d, 0.0));
  const double* w_mem = w.w_att.data();
  const double* w_state = w.w_att.data() + d;
  for (std::size_t k = p.hops; k-- > 0;) {
    const auto& prev = t.states[k];
    const auto& alpha = t.attention[k];
    const auto& g = t.scores[k];
    std::vector<double> dprev(d, 0.0);

    for (std::size_t r = 0; r < d; ++r) {
      gw.b_lin[r] += dx[r];
      for (std::size_t j = 0; j < d; ++j) {
        gw.w_lin[r * d + j] += dx[r] * prev[j];
        dprev[j] += w.w_lin[r * d + j] * dx[r];
      }
    }

    std::vector<double> dalpha(m);
    double weighted = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      dalpha[i] = dot(dx, t.memory[i]);
      weighted += alpha[i] * dalpha[i];
      for (std::size_t j = 0; j < d; ++j) dmemory[i][j] += alpha[i] * dx[j];
    }
    for (std::size_t i = 0; i < m; ++i) {
      const double dscore = alpha[i] * (dalpha[i] - weighted);
      const double dpre = dscore * (1.0 - g[i] * g[i]);
      gw.b_att += dpre;
      for (std::size_t j = 0; j < d; ++j) {
        gw.w_att[j] += dpre * t.memory[i][j];
        gw.w_att[d + j] += dpre * prev[j];
        dmemory[i][j] += dpre * w_mem[j];
        dprev[j] += dpre * w_state[j];
      }
    }
    dx = std::move(dprev);
  }

  if (l2 != 0.0) {
    Weights current = w;
    std::vector<std::span<double>> params_view;
    current.for_each([&](std::span<double> s) { params_view.push_back(s); });
    std::size_t idx = 0;
    gw.for_each([&](std::span<double> s) {
      const auto src = params_view[idx++];
      for (std::size_t j = 0; j < s.size(); ++j) s[j] += l2 * src[j];
    });
  }

  if (p.trainable_embeddings) {
    auto row_grad = [&](std::size_t id) -> std::vector<double>& {
      auto [it, inserted] = grads.embedding_rows.try_emplace(id, d, 0.0);
      return it->second;
    };
    for (std::size_t i = 0; i < m; ++i) {
      auto& gr = row_grad(in.context[t.active[i]]);
      for (std::size_t j = 0; j < d; ++j) gr[j] += t.location[i] * dmemory[i][j];
    }
    const double share = t.aspect_rows.empty() ? 0.0 : 1.0 / static_cast<double>(t.aspect_rows.size());
    for (std::size_t id : t.aspect_rows) {
      auto& gr = row_grad(id);
      for (std::size_t j = 0; j < d; ++j) gr[j] += share * dx[j];
    }
  }
  return value;
}

double grad_check(const Params& params, const Input& input, Polarity gold, double epsilon,
                  double l2) {
  if (!(epsilon > 0.0)) throw ValidationError("grad_check epsilon must be > 0");
  Gradients grads;
  loss_and_gradients(params, input, gold, grads, l2);

  double worst = 0.0;
  auto compare = [&](double analytic, double numeric) {
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(analytic - numeric) / denom);
  };
  Params probe = params;
  auto central = [&](double& slot) {
    const double saved = slot;
    slot = saved + epsilon;
    const double up = loss(probe, input, gold, l2);
    slot = saved - epsilon;
    const double down = loss(probe, input, gold, l2);
    slot = saved;
    return (up - down) / (2.0 * epsilon);
  };

  std::vector<std::span<double>> analytic;
  grads.weights.for_each([&](std::span<double> s) { analytic.push_back(s); });
  std::size_t tensor = 0;
  probe.weights.for_each([&](std::span<double> s) {
    for (std::size_t j = 0; j < s.size(); ++j) compare(analytic[tensor][j], central(s[j]));
    ++tensor;
  });

  if (params.trainable_embeddings) {
    const std::size_t d = params.dim;
    for (std::size_t r = 0; r < params.embeddings.rows; ++r) {
      auto it = grads.embedding_rows.find(r);
      for (std::size_t j = 0; j < d; ++j) {
        const double a = it == grads.embedding_rows.end() ? 0.0 : it->second[j];
        compare(a, central(probe.embeddings.data[r * d + j]));
      }
    }
  }
  return worst;
}

TrainResult train(std::span<const Input> inputs, std::span<const Polarity> gold,
                  EmbeddingTable embeddings, const TrainParams& hp) {
  if (inputs.empty()) throw ValidationError("memnet training set is empty");
  if (inputs.size() != gold.size()) throw ValidationError("memnet input/label count mismatch");

  TrainResult result;
  Params& p = result.model;
  p = Params::zeros(std::move(embeddings), hp.hops);
  p.trainable_embeddings = hp.trainable_embeddings;
  Rng rng(hp.seed);
  p.weights.for_each([&](std::span<double> s) {
    for (double& v : s) v = rng.uniform(-0.01, 0.01);
  });

  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Gradients grads;
  for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    double total = 0.0;
    for (std::size_t i : order) {
      const double value = loss_and_gradients(p, inputs[i], gold[i], grads, hp.l2);
      if (!std::isfinite(value)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch + 1) +
                            ", instance " + std::to_string(i));
      }
      total += value;
      std::vector<std::span<double>> g;
      grads.weights.for_each([&](std::span<double> s) { g.push_back(s); });
      std::size_t tensor = 0;
      p.weights.for_each([&](std::span<double> s) {
        for (std::size_t j = 0; j < s.size(); ++j) s[j] -= hp.lr * g[tensor][j];
        ++tensor;
      });
      for (const auto& [row, gr] : grads.embedding_rows) {
        auto target = p.embeddings.row(row);
        for (std::size_t j = 0; j < gr.size(); ++j) target[j] -= hp.lr * gr[j];
      }
    }
    result.loss_history.push_back(total / static_cast<double>(inputs.size()));
  }
  return result;
}

Polarity predict(const Params& params, const Input& input) {
  const auto probs = run_forward(params, input).probabilities;
  const auto best = static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
  return polarity_from_index(best);
}

CheckCase random_check_case(std::size_t dim, std::size_t contexts, std::size_t hops,
                            bool trainable_embeddings, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t rows = contexts + 3;
  EmbeddingTable table(rows, dim);
  for (std::size_t i = dim; i < table.data.size(); ++i) table.data[i] = rng.uniform(-0.5, 0.5);
  CheckCase c{Params::zeros(std::move(table), hops), {}, Polarity::neutral};
  c.params.trainable_embeddings = trainable_embeddings;
  c.params.weights.for_each([&](std::span<double> t) {
    for (double& v : t) v = rng.uniform(-0.5, 0.5);
  });
  auto& in = c.input;
  in.aspect = {contexts + 1, contexts + 2};
  in.aspect_position = rng.uniform_index(contexts + 1);
  for (std::size_t i = 0; i < contexts; ++i) {
    in.context.push_back(i + 1);
    const auto p = static_cast<std::int64_t>(in.aspect_position);
    const auto pos = static_cast<std::int64_t>(i);
    in.locations.push_back(pos < p ? p - pos : pos - p + 1);
  }
  c.gold = polarity_from_index(rng.uniform_index(kNumClasses));
  return c;
}

}  // namespace absa::memnet
