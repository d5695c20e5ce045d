#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "support.hpp"
#include "vforge/errors.hpp"
#include "vforge/scoring.hpp"

using namespace vforge;
using doctest::Approx;

namespace {

LabelWordEmbeddings two_label_embeddings() {
  // L = 3 mask positions, H = 2
  return LabelWordEmbeddings(vforge::testing::two_labels(),
                             {{"A", {{1, 0}, {0, 1}, {1, 1}}}, {"B", {{0, 1}, {1, 0}, {-1, 1}}}});
}

std::map<std::string, std::string> as_map(const std::vector<std::size_t>& ids, const LabelSet& ls) {
  std::map<std::string, std::string> out;
  for (std::size_t i = 0; i < ids.size(); ++i) out["e" + std::to_string(i)] = ls.labels()[ids[i]];
  return out;
}

}  // namespace

TEST_CASE("label embeddings validate their shape") {
  const auto ls = vforge::testing::two_labels();
  CHECK_THROWS_AS(LabelWordEmbeddings(ls, {{"A", {{1, 0}}}}), IdMismatch);
  CHECK_THROWS_AS(LabelWordEmbeddings(ls, {{"A", {{1, 0}}}, {"B", {{1, 0}, {0, 1}}}}), DimensionMismatch);
  CHECK_THROWS_AS(LabelWordEmbeddings(ls, {{"A", {{1, 0}}}, {"B", {{1, 0, 0}}}}), DimensionMismatch);
  const auto emb = two_label_embeddings();
  CHECK(emb.mask_count() == 3);
  CHECK(emb.hidden_dim() == 2);
}

TEST_CASE("scores are mean cosines over mask positions") {
  const auto ls = vforge::testing::two_labels();
  const auto emb = two_label_embeddings();
  MaskVectorRecord rec{"x", {{2, 0}, {0, 3}, {1, 0}}};
  const auto s = score_example(rec, emb, ls);
  // A: cos = 1, 1, 1/sqrt2; B: 0, 0, -1/sqrt2
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(s.scores[0] == Approx((2.0 + r) / 3.0).epsilon(1e-12));
  CHECK(s.scores[1] == Approx(-r / 3.0).epsilon(1e-12));
  CHECK(predict(s, ls) == "A");

  MaskVectorRecord same{"y", emb.at("B")};
  CHECK(score_example(same, emb, ls).scores[1] == Approx(1.0).epsilon(1e-12));
  CHECK(predict(score_example(same, emb, ls), ls) == "B");

  MaskVectorRecord wrong{"z", {{1, 0}, {0, 1}}};
  CHECK_THROWS_AS(score_example(wrong, emb, ls), DimensionMismatch);
}

TEST_CASE("predict ties go to the earlier label and match a brute-force argmax") {
  const auto ls = vforge::testing::six_labels();
  CHECK(predict(ScoreMatrix{"t", {0.2, 0.5, 0.5, 0.1, 0.5, 0.0}}, ls) == ls.labels()[1]);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> d(-3, 3);
  for (int trial = 0; trial < 500; ++trial) {
    ScoreMatrix s{"t", {}};
    for (std::size_t i = 0; i < ls.size(); ++i) s.scores.push_back(d(rng) / 3.0);
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.scores.size(); ++i) {
      if (s.scores[i] > s.scores[best]) best = i;
    }
    CHECK(predict(s, ls) == ls.labels()[best]);
  }
}

TEST_CASE("argmax is invariant to positive rescaling of mask vectors") {
  const auto ls = vforge::testing::six_labels();
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  std::map<std::string, Matrix> m;
  for (const auto& label : ls.labels()) m[label] = {{n(rng), n(rng), n(rng), n(rng)}, {n(rng), n(rng), n(rng), n(rng)}};
  const LabelWordEmbeddings emb(ls, m);
  for (int trial = 0; trial < 200; ++trial) {
    MaskVectorRecord rec{"r", {{n(rng), n(rng), n(rng), n(rng)}, {n(rng), n(rng), n(rng), n(rng)}}};
    const auto before = predict(score_example(rec, emb, ls), ls);
    const double c = std::exp(n(rng) * 3);
    for (auto& row : rec.vectors) {
      for (auto& v : row) v *= c;
    }
    CHECK(predict(score_example(rec, emb, ls), ls) == before);
  }
}

TEST_CASE("evaluate matches the confusion-matrix reference") {
  const auto ls = vforge::testing::six_labels();
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 60;
    std::vector<std::size_t> gold(n), pred(n);
    // skew some trials toward few classes so zero-support labels show up
    const std::size_t span = 1 + rng() % 6;
    for (std::size_t i = 0; i < n; ++i) {
      gold[i] = rng() % span;
      pred[i] = rng() % 6;
    }
    const auto ref = vforge::testing::reference_metrics(gold, pred, 6);
    const auto rep = evaluate(as_map(pred, ls), as_map(gold, ls), ls);
    CHECK(rep.micro_f1 == Approx(ref.micro).epsilon(1e-12));
    CHECK(rep.macro_f1 == Approx(ref.macro).epsilon(1e-12));
    CHECK(rep.micro_f1 == Approx(rep.accuracy).epsilon(1e-12));
    CHECK(rep.total == n);
    for (std::size_t c = 0; c < 6; ++c) CHECK(rep.per_label[c].f1 == Approx(ref.f1[c]).epsilon(1e-12));
  }
}

TEST_CASE("metrics are invariant to permuting examples") {
  const auto ls = vforge::testing::six_labels();
  std::mt19937_64 rng(3);
  std::vector<std::size_t> gold(80), pred(80);
  for (std::size_t i = 0; i < 80; ++i) {
    gold[i] = rng() % 6;
    pred[i] = rng() % 6;
  }
  const auto base = evaluate(as_map(pred, ls), as_map(gold, ls), ls);
  std::vector<std::size_t> order(80);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> g2, p2;
  for (auto i : order) {
    g2.push_back(gold[i]);
    p2.push_back(pred[i]);
  }
  const auto shuffled = evaluate(as_map(p2, ls), as_map(g2, ls), ls);
  CHECK(shuffled.micro_f1 == base.micro_f1);
  CHECK(shuffled.macro_f1 == base.macro_f1);
}

TEST_CASE("majority-class predictor") {
  const auto ls = vforge::testing::six_labels();
  const auto negative = *ls.index_of(ls.negative_label());
  std::vector<std::size_t> gold, pred;
  for (std::size_t i = 0; i < 16943; ++i) {
    gold.push_back(i < 13485 ? negative : (i % 5 == negative ? 5 : i % 5));
    pred.push_back(negative);
  }
  const auto rep = evaluate(as_map(pred, ls), as_map(gold, ls), ls);
  CHECK(rep.micro_f1 == Approx(13485.0 / 16943.0).epsilon(1e-12));
  CHECK(rep.micro_f1 == Approx(0.7959).epsilon(1e-4));
}

TEST_CASE("evaluate rejects mismatched inputs") {
  const auto ls = vforge::testing::two_labels();
  CHECK_THROWS_AS(evaluate({{"a", "A"}}, {{"b", "A"}}, ls), IdMismatch);
  CHECK_THROWS_AS(evaluate({{"a", "A"}}, {{"a", "A"}, {"b", "B"}}, ls), IdMismatch);
  CHECK_THROWS_AS(evaluate({{"a", "Z"}}, {{"a", "A"}}, ls), UnknownLabel);
}

TEST_CASE("exchange files round-trip") {
  const auto ls = vforge::testing::two_labels();
  const auto emb = two_label_embeddings();
  std::stringstream e;
  write_label_embeddings(e, emb, ls);
  const auto back = read_label_embeddings(e, ls);
  CHECK(back.at("A") == emb.at("A"));
  CHECK(back.at("B") == emb.at("B"));

  std::vector<MaskVectorRecord> recs{{"x", {{1, 2}, {3, 4}, {5, 6}}}, {"y", {{0, 0}, {1, 1}, {0.5, -0.25}}}};
  std::stringstream m;
  write_mask_vectors(m, recs);
  const auto rb = read_mask_vectors(m);
  REQUIRE(rb.size() == 2);
  CHECK(rb[1].example_id == "y");
  CHECK(rb[1].vectors == recs[1].vectors);

  std::stringstream p;
  write_predictions(p, {score_example(recs[0], emb, ls), score_example(recs[1], emb, ls)}, ls);
  const auto preds = read_predictions(p);
  CHECK(preds.size() == 2);
  CHECK(preds.at("x") == predict(score_example(recs[0], emb, ls), ls));

  std::istringstream junk("{not json\n");
  CHECK_THROWS_AS(read_mask_vectors(junk), MalformedRecord);
}
