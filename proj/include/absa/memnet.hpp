#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "absa/corpus.hpp"
#include "absa/textproc.hpp"

namespace absa::memnet {

using Probabilities = std::array<double, kNumClasses>;

// (|V| + 1) x dim row-major matrix; row 0 is the all-zero padding row.
struct EmbeddingTable {
  std::size_t dim = 0;
  std::size_t rows = 0;
  std::vector<double> data;

  EmbeddingTable() = default;
  EmbeddingTable(std::size_t rows, std::size_t dim) : dim(dim), rows(rows), data(rows * dim, 0.0) {}

  std::span<double> row(std::size_t i) { return std::span(data).subspan(i * dim, dim); }
  std::span<const double> row(std::size_t i) const { return std::span(data).subspan(i * dim, dim); }
  friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;
};

/// Every vocabulary row drawn uniformly from [-0.25, 0.25]; row 0 zero.
EmbeddingTable random_embeddings(const Vocabulary& vocab, std::size_t dim, std::uint64_t seed);
/// GloVe text layout: token followed by exactly `dim` floats per line.
/// Rows for tokens not in the file keep their seeded random values.
EmbeddingTable read_embeddings(std::istream& in, const Vocabulary& vocab, std::size_t dim,
                               std::uint64_t seed);
EmbeddingTable load_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                               std::size_t dim, std::uint64_t seed);

// Trainable tensors shared by every hop.
struct Weights {
  std::vector<double> w_att;  // 1 x 2d: memory half then state half
  double b_att = 0.0;
  std::vector<double> w_lin;  // d x d row-major
  std::vector<double> b_lin;  // d
  std::vector<double> w_out;  // 3 x d row-major
  std::vector<double> b_out;  // 3

  static Weights zeros(std::size_t dim);

  /// Visits every tensor in a fixed order.
  template <typename F>
  void for_each(F&& f) {
    f(std::span<double>(w_att));
    f(std::span<double>(&b_att, 1));
    f(std::span<double>(w_lin));
    f(std::span<double>(b_lin));
    f(std::span<double>(w_out));
    f(std::span<double>(b_out));
  }
  friend bool operator==(const Weights&, const Weights&) = default;
};

struct Params {
  std::size_t dim = 0;
  std::size_t hops = 1;
  Weights weights;
  EmbeddingTable embeddings;
  bool trainable_embeddings = false;

  static Params zeros(EmbeddingTable embeddings, std::size_t hops);
  friend bool operator==(const Params&, const Params&) = default;
};

struct Gradients {
  Weights weights;
  std::map<std::size_t, std::vector<double>> embedding_rows;  // only when trainable
};

// One query: the context words of a sentence plus the aspect they are
// judged against. Context id 0 is padding and takes no part in attention.
struct Input {
  std::vector<std::size_t> context;
  std::vector<std::size_t> aspect;
  std::size_t aspect_position = 0;
  std::vector<std::int64_t> locations;  // one per context entry, >= 1
};

/// Maps tokens through the vocabulary; unknown tokens become padding.
Input make_input(const TokenizedInstance& ti, const Vocabulary& vocab);

/// v_i = 1 - l_i / n. Throws ValidationError when some l_i >= n.
std::vector<double> location_weights(std::span<const std::int64_t> locations, std::size_t n);

struct HopTrace {
  std::vector<double> attention;  // over the non-padding contexts, in order
  std::vector<double> state;      // x_k
};

struct ForwardResult {
  Probabilities probabilities{};
  std::vector<HopTrace> hops;
};

ForwardResult forward(const Params& params, const Input& input);

/// Cross-entropy of the gold class plus (l2 / 2) * |weights|^2.
double loss(const Params& params, const Input& input, Polarity gold, double l2 = 0.0);
double loss_and_gradients(const Params& params, const Input& input, Polarity gold,
                          Gradients& grads, double l2 = 0.0);

/// Max over trainable scalars of |a - n| / max(|a|, |n|, 1e-8), where n is
/// the central difference with step epsilon.
double grad_check(const Params& params, const Input& input, Polarity gold, double epsilon,
                  double l2 = 0.0);

struct TrainParams {
  std::size_t hops = 3;
  double lr = 0.01;
  std::size_t epochs = 100;
  double l2 = 0.0;
  std::uint64_t seed = 42;
  bool trainable_embeddings = false;
};

struct TrainResult {
  Params model;
  std::vector<double> loss_history;  // mean loss per epoch
};

/// Weights start uniform in [-0.01, 0.01]; per-instance SGD over a seeded
/// shuffle each epoch. Throws TrainingError on a non-finite loss.
TrainResult train(std::span<const Input> inputs, std::span<const Polarity> gold,
                  EmbeddingTable embeddings, const TrainParams& hp);

Polarity predict(const Params& params, const Input& input);

// Random model and query for gradient checking: embeddings and weights
// uniform in [-0.5, 0.5], a two-token aspect at a random position among
// `contexts` context words.
struct CheckCase {
  Params params;
  Input input;
  Polarity gold = Polarity::neutral;
};

CheckCase random_check_case(std::size_t dim, std::size_t contexts, std::size_t hops,
                            bool trainable_embeddings, std::uint64_t seed);

}  // namespace absa::memnet
