#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "absa/error.hpp"
#include "absa/memnet.hpp"
#include "absa/rng.hpp"

using namespace absa;
using namespace absa::memnet;

namespace {

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("location weights") {
  CHECK(location_weights(std::vector<std::int64_t>{1}, 8) == std::vector<double>{0.875});
  CHECK(location_weights(std::vector<std::int64_t>{}, 8).empty());
  CHECK(location_weights(std::vector<std::int64_t>{1, 1, 2, 3, 4, 5, 6}, 8) ==
        std::vector<double>{0.875, 0.875, 0.75, 0.625, 0.5, 0.375, 0.25});
  CHECK_THROWS_AS(location_weights(std::vector<std::int64_t>{8}, 8), ValidationError);
  CHECK_THROWS_AS(location_weights(std::vector<std::int64_t>{0}, 8), ValidationError);
}

TEST_CASE("make_input from a tokenized instance") {
  const TokenizedInstance ti{{"battery", "life", "phone", "too", "short"}, {0, 2}, Polarity::negative};
  const auto vocab = Vocabulary::from_tokens({"battery", "life", "phone", "short"});
  const auto in = make_input(ti, vocab);
  CHECK(in.aspect == std::vector<std::size_t>{1, 2});
  CHECK(in.context == std::vector<std::size_t>{3, 0, 4});
  CHECK(in.locations == std::vector<std::int64_t>{1, 2, 3});
  CHECK(in.aspect_position == 0);
}

TEST_CASE("embedding loading") {
  const auto vocab = Vocabulary::from_tokens({"good", "bad", "meh"});
  std::istringstream file("good 0.5 -1.25\nother 1 2\nbad 3 4\n");
  const auto table = read_embeddings(file, vocab, 2, 9);
  CHECK(table.rows == 4);
  CHECK(table.row(0)[0] == 0.0);
  CHECK(table.row(1)[0] == 0.5);
  CHECK(table.row(1)[1] == -1.25);
  CHECK(table.row(2)[1] == 4.0);
  for (double v : table.row(3)) CHECK(std::abs(v) <= 0.25);
  std::istringstream again("good 0.5 -1.25\nother 1 2\nbad 3 4\n");
  CHECK(read_embeddings(again, vocab, 2, 9) == table);

  std::istringstream bad("good 0.5\n");
  CHECK_THROWS_WITH_AS(read_embeddings(bad, vocab, 2, 9), doctest::Contains("line 1"), ParseError);
  std::istringstream wide("good 1 2 3\n");
  CHECK_THROWS_AS(read_embeddings(wide, vocab, 2, 9), ParseError);

  const auto r = random_embeddings(vocab, 3, 1);
  for (double v : r.row(0)) CHECK(v == 0.0);
  for (std::size_t i = 3; i < r.data.size(); ++i) CHECK(std::abs(r.data[i]) <= 0.25);
}

TEST_CASE("forward normalization and attention edge cases") {
  for (std::size_t m : {0u, 1u, 5u}) {
    const auto c = random_check_case(8, m, 3, false, 100 + m);
    const auto f = forward(c.params, c.input);
    CHECK(std::abs(sum(f.probabilities) - 1.0) < 1e-12);
    for (double p : f.probabilities) CHECK(p > 0);
    REQUIRE(f.hops.size() == 3);
    for (const auto& h : f.hops) {
      CHECK(h.attention.size() == m);
      if (m > 0) CHECK(std::abs(sum(h.attention) - 1.0) < 1e-12);
      if (m == 1) CHECK(h.attention[0] == 1.0);
    }
  }
  auto c = random_check_case(8, 4, 2, false, 7);
  std::fill(c.params.weights.w_att.begin(), c.params.weights.w_att.end(), 0.0);
  c.params.weights.b_att = 0.0;
  for (const auto& h : forward(c.params, c.input).hops) {
    for (double a : h.attention) CHECK(a == doctest::Approx(0.25).epsilon(1e-15));
  }
}

TEST_CASE("linear path identities") {
  auto c = random_check_case(6, 0, 3, false, 3);
  std::fill(c.params.weights.w_lin.begin(), c.params.weights.w_lin.end(), 0.0);
  std::fill(c.params.weights.b_lin.begin(), c.params.weights.b_lin.end(), 0.0);
  const auto f = forward(c.params, c.input);
  for (double v : f.hops.back().state) CHECK(v == 0.0);
  const auto& b = c.params.weights.b_out;
  const double z = std::exp(b[0]) + std::exp(b[1]) + std::exp(b[2]);
  for (std::size_t k = 0; k < 3; ++k) CHECK(f.probabilities[k] == doctest::Approx(std::exp(b[k]) / z));
}

TEST_CASE("padding never participates") {
  auto c = random_check_case(6, 4, 2, false, 5);
  c.input.context = {1, 0, 2, 3, 0, 4};
  c.input.locations = {3, 2, 1, 1, 2, 3};
  const auto base = forward(c.params, c.input).probabilities;
  auto moved = c.input;
  moved.context = {0, 1, 2, 3, 4, 0};
  moved.locations = {1, 3, 1, 1, 3, 2};
  const auto after = forward(c.params, moved).probabilities;
  for (std::size_t k = 0; k < 3; ++k) CHECK(after[k] == doctest::Approx(base[k]).epsilon(1e-14));
}

TEST_CASE("loss and output-bias gradient") {
  const auto vocab = Vocabulary::from_tokens({"a", "b"});
  auto params = Params::zeros(random_embeddings(vocab, 4, 1), 2);
  const Input in{{1}, {2}, 1, {1}};
  CHECK(loss(params, in, Polarity::positive) == doctest::Approx(std::log(3.0)));

  const auto c = random_check_case(5, 3, 2, false, 11);
  Gradients g;
  loss_and_gradients(c.params, c.input, c.gold, g);
  const auto probs = forward(c.params, c.input).probabilities;
  for (std::size_t k = 0; k < 3; ++k) {
    const double onehot = k == class_index(c.gold) ? 1.0 : 0.0;
    CHECK(g.weights.b_out[k] == doctest::Approx(probs[k] - onehot).epsilon(1e-14));
  }
  CHECK(g.embedding_rows.empty());
}

TEST_CASE("gradient check across hops, context sizes and embedding modes") {
  for (std::size_t hops : {1u, 2u, 3u}) {
    for (std::size_t m : {0u, 1u, 5u}) {
      for (bool trainable : {false, true}) {
        const auto c = random_check_case(8, m, hops, trainable, 1000 * hops + 10 * m + trainable);
        CAPTURE(hops);
        CAPTURE(m);
        CAPTURE(trainable);
        CHECK(grad_check(c.params, c.input, c.gold, 1e-5) < 1e-4);
        CHECK(grad_check(c.params, c.input, c.gold, 1e-5, 0.01) < 1e-4);
      }
    }
  }
  const auto vocab = Vocabulary::from_tokens({"a", "b"});
  const auto zero = Params::zeros(EmbeddingTable(3, 4), 2);
  CHECK(std::isfinite(grad_check(zero, Input{{1}, {2}, 0, {1}}, Polarity::neutral, 1e-5)));
}

TEST_CASE("trainable embeddings receive gradients") {
  const auto c = random_check_case(4, 3, 2, true, 17);
  Gradients g;
  loss_and_gradients(c.params, c.input, c.gold, g);
  CHECK(g.embedding_rows.size() == 5);
  CHECK(g.embedding_rows.count(0) == 0);
}

TEST_CASE("training") {
  const auto vocab = Vocabulary::from_tokens({"good", "bad", "food", "service"});
  const std::vector<Input> inputs{{{1}, {3}, 1, {1}}, {{2}, {3}, 1, {1}}, {{1}, {4}, 1, {1}}, {{2}, {4}, 1, {1}}};
  const std::vector<Polarity> gold{Polarity::positive, Polarity::negative, Polarity::positive, Polarity::negative};
  const auto table = random_embeddings(vocab, 8, 3);

  TrainParams hp;
  hp.epochs = 0;
  const auto none = train(inputs, gold, table, hp);
  CHECK(none.loss_history.empty());
  for (double w : none.model.weights.w_att) CHECK(std::abs(w) <= 0.01);

  hp.epochs = 800;
  const auto a = train(inputs, gold, table, hp);
  const auto b = train(inputs, gold, table, hp);
  CHECK(a.loss_history == b.loss_history);
  CHECK(a.model == b.model);
  CHECK(a.loss_history.back() < a.loss_history.front());
  for (std::size_t i = 0; i < inputs.size(); ++i) CHECK(predict(a.model, inputs[i]) == gold[i]);
  CHECK(a.model.embeddings == table);

  hp.lr = 1e308;
  hp.epochs = 5;
  CHECK_THROWS_WITH_AS(train(inputs, gold, table, hp), doctest::Contains("epoch"), TrainingError);
}

TEST_CASE("predict tie-break") {
  const auto zero = Params::zeros(EmbeddingTable(3, 4), 1);
  CHECK(predict(zero, Input{{1}, {2}, 0, {1}}) == Polarity::negative);
  auto p = zero;
  p.weights.b_out = {0.2, 0.5, 0.3};
  CHECK(predict(p, Input{{}, {2}, 0, {}}) == Polarity::neutral);
}
