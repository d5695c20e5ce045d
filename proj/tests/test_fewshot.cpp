#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "support.hpp"
#include "vforge/errors.hpp"
#include "vforge/fewshot.hpp"
#include "vforge/synth.hpp"

using namespace vforge;

namespace {

CorpusSplit pools(std::size_t a_count, std::size_t b_count) {
  CorpusSplit split{SplitName::Train, {}};
  auto add = [&](const std::string& label, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      split.examples.push_back(vforge::testing::make_example(label + std::to_string(i), {"x", "binds", "y"},
                                                             {1, -1, 1}, 0, 1, 2, 3, label));
    }
  };
  add("A", a_count);
  add("B", b_count);
  return split;
}

std::map<std::string, std::string> label_of(const CorpusSplit& split) {
  std::map<std::string, std::string> out;
  for (const auto& ex : split.examples) out[ex.id] = ex.label;
  return out;
}

}  // namespace

TEST_CASE("config validation") {
  FewShotConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.k = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
  cfg = FewShotConfig{};
  cfg.seeds.clear();
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
  cfg.seeds = {1, 1};
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
}

TEST_CASE("draws are deterministic per seed and exactly k per label") {
  const auto split = pools(20, 12);
  const auto ls = vforge::testing::two_labels();
  const auto labels = label_of(split);
  FewShotConfig cfg{4, {0, 1, 2, 3, 4}};
  const auto first = draw_fewshot(split, ls, cfg);
  CHECK(first == draw_fewshot(split, ls, cfg));
  REQUIRE(first.size() == 5);
  for (const auto& fs : first) {
    CHECK(fs.train_ids.size() == 8);
    std::map<std::string, std::size_t> per_label;
    for (const auto& id : fs.train_ids) ++per_label[labels.at(id)];
    CHECK(per_label["A"] == 4);
    CHECK(per_label["B"] == 4);
    CHECK(std::set<std::string>(fs.train_ids.begin(), fs.train_ids.end()).size() == 8);

    std::set<std::string> train(fs.train_ids.begin(), fs.train_ids.end());
    for (const auto& id : fs.val_ids) CHECK(train.count(id) == 0);
    CHECK(fs.val_ids.size() == 8);
    CHECK(fs.train_ids.size() <= cfg.k * ls.size());
  }
  CHECK(first[0].train_ids != first[1].train_ids);
}

TEST_CASE("different seeds give different draws") {
  const auto split = pools(30, 30);
  const auto ls = vforge::testing::two_labels();
  FewShotConfig cfg{5, {}};
  for (std::uint64_t s = 0; s < 100; ++s) cfg.seeds.push_back(s);
  const auto draws = draw_fewshot(split, ls, cfg);
  std::set<std::vector<std::string>> distinct;
  for (const auto& fs : draws) distinct.insert(fs.train_ids);
  // C(30,5)^2 orderings; a collision among 100 draws would be astronomically unlikely.
  CHECK(distinct.size() == 100);
}

TEST_CASE("small pools are topped up with replacement") {
  const auto ls = vforge::testing::two_labels();
  SUBCASE("one example, k = 2") {
    const auto split = pools(1, 5);
    const auto draws = draw_fewshot(split, ls, FewShotConfig{2, {3}});
    std::size_t a_hits = 0;
    for (const auto& id : draws[0].train_ids) a_hits += id == "A0";
    CHECK(a_hits == 2);
    CHECK(draws[0].train_ids.size() == 4);
    // nothing left for A in validation
    for (const auto& id : draws[0].val_ids) CHECK(id != "A0");
  }
  SUBCASE("pool smaller than k keeps every id at least once") {
    const auto split = pools(3, 10);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto fs = draw_fewshot(split, ls, FewShotConfig{7, {seed}})[0];
      std::map<std::string, std::size_t> counts;
      for (const auto& id : fs.train_ids) ++counts[id];
      for (int i = 0; i < 3; ++i) CHECK(counts["A" + std::to_string(i)] >= 1);
      std::size_t a_total = 0;
      for (const auto& [id, n] : counts) a_total += id[0] == 'A' ? n : 0;
      CHECK(a_total == 7);
    }
  }
}

TEST_CASE("empty relation pool") {
  const auto split = pools(5, 0);
  CHECK_THROWS_AS(draw_fewshot(split, vforge::testing::two_labels(), FewShotConfig{}), EmptyRelationPool);
}

TEST_CASE("synthetic corpus and JSON round-trip") {
  auto corpus = generate_synthetic({12, 0.1, 3, "f"});
  CorpusSplit split{SplitName::Train, corpus.examples};
  const auto draws = draw_fewshot(split, corpus.labelset, FewShotConfig{4, {0, 9}});
  for (const auto& fs : draws) {
    CHECK(fs.train_ids.size() == 4 * corpus.labelset.size());
    CHECK(fewshot_from_json(to_json(fs)) == fs);
  }
}
