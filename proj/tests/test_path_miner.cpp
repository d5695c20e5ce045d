#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "support.hpp"
#include "vforge/errors.hpp"
#include "vforge/path_miner.hpp"
#include "vforge/synth.hpp"

using namespace vforge;
using vforge::testing::make_example;

namespace {

std::vector<Token> tokens_from_heads(const std::vector<int>& heads) {
  std::vector<Token> tokens;
  for (std::size_t i = 0; i < heads.size(); ++i) tokens.push_back(Token{i, "w" + std::to_string(i), heads[i], "dep", false});
  return tokens;
}

}  // namespace

TEST_CASE("build_graph") {
  SUBCASE("three-token fan") {
    auto g = build_graph(tokens_from_heads({-1, 0, 0}));
    CHECK(g.node_count() == 3);
    REQUIRE(g.edge_count() == 2);
    CHECK(g.edges()[0] == std::pair<std::size_t, std::size_t>{0, 1});
    CHECK(g.edges()[1] == std::pair<std::size_t, std::size_t>{0, 2});
  }
  SUBCASE("single token") {
    auto g = build_graph(tokens_from_heads({-1}));
    CHECK(g.node_count() == 1);
    CHECK(g.edge_count() == 0);
  }
  SUBCASE("random trees have n-1 edges, one per non-root head link") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 50; ++trial) {
      auto heads = vforge::testing::random_tree(10, rng);
      auto g = build_graph(tokens_from_heads(heads));
      CHECK(g.edge_count() == 9);
      for (std::size_t i = 0; i < heads.size(); ++i) {
        if (heads[i] < 0) continue;
        const auto& nb = g.neighbors(i);
        CHECK(std::find(nb.begin(), nb.end(), static_cast<std::size_t>(heads[i])) != nb.end());
      }
    }
  }
  SUBCASE("cycles propagate NonTreeParse") {
    CHECK_THROWS_AS(build_graph(tokens_from_heads({-1, 2, 1})), NonTreeParse);
  }
}

TEST_CASE("shortest_path") {
  auto chain = build_graph(tokens_from_heads({1, -1, 1}));
  CHECK(shortest_path(chain, 0, 2) == std::vector<std::size_t>{0, 1, 2});
  CHECK(shortest_path(chain, 2, 0) == std::vector<std::size_t>{2, 1, 0});
  for (std::size_t k = 0; k < 3; ++k) CHECK(shortest_path(chain, k, k) == std::vector<std::size_t>{k});

  SUBCASE("ascending tie-break on a general graph") {
    // Square 0-1-3, 0-2-3: both routes have length 3; BFS from 0 reaches 3 via 1.
    DependencyGraph g(4);
    g.add_edge(0, 2);
    g.add_edge(0, 1);
    g.add_edge(1, 3);
    g.add_edge(2, 3);
    CHECK(shortest_path(g, 0, 3) == std::vector<std::size_t>{0, 1, 3});
  }

  SUBCASE("matches exhaustive enumeration on random trees up to 12 nodes") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
      const auto n = 1 + static_cast<std::size_t>(trial % 12);
      auto heads = vforge::testing::random_tree(n, rng);
      auto g = build_graph(tokens_from_heads(heads));
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
          const auto path = shortest_path(g, a, b);
          std::size_t paths_seen = 0;
          CHECK(path.size() == vforge::testing::brute_force_path_nodes(heads, a, b, &paths_seen));
          CHECK(paths_seen == 1);  // trees have exactly one simple path
          CHECK(path.front() == a);
          CHECK(path.back() == b);
          std::set<std::size_t> distinct(path.begin(), path.end());
          CHECK(distinct.size() == path.size());
        }
      }
    }
  }
}

TEST_CASE("entity anchors") {
  // "retinoic acid activates EGFR": retinoic -> acid -> activates(root) <- EGFR
  auto ex = make_example("a", {"retinoic", "acid", "activates", "EGFR"}, {1, 2, -1, 2}, 0, 2, 3, 4, "A");
  CHECK(entity_anchor(ex.tokens, ex.e1) == 1);
  CHECK(entity_anchor(ex.tokens, ex.e2) == 3);

  // Both span tokens point outside: fall back to the last one.
  auto two_out = make_example("b", {"x", "y", "z"}, {-1, 0, 0}, 1, 3, 0, 1, "A");
  CHECK(entity_anchor(two_out.tokens, two_out.e1) == 2);
}

TEST_CASE("mine_candidates") {
  SUBCASE("X inhibits Y") {
    auto ex = make_example("s", {"X", "inhibits", "Y"}, {1, -1, 1}, 0, 1, 2, 3, "A");
    auto paths = compute_paths(ex);
    const std::vector<int> heads{1, -1, 1};
    CHECK(paths.local.size() == vforge::testing::brute_force_path_nodes(heads, 0, 2));
    CHECK(paths.global.size() == vforge::testing::brute_force_path_nodes(heads, 0, 2));
    auto phrases = mine_candidates(ex);
    REQUIRE(phrases.size() == 1);
    CHECK(phrases[0].words == std::vector<std::string>{"inhibits"});
    CHECK(phrases[0].source_indices == std::vector<std::size_t>{1});
    CHECK(phrases[0].example_id == "s");
  }
  SUBCASE("adjacent sibling entities leave nothing after exclusion") {
    // "the X Y" with X -> Y root; local path X-Y is entirely entity tokens.
    auto ex = make_example("s", {"the", "X", "Y"}, {2, 2, -1}, 1, 2, 2, 3, "A");
    CHECK(mine_candidates(ex).empty());
    // X and Y are siblings under "binds", which lies off the global path the-end.
    auto siblings = make_example("t", {"the", "X", "Y", "binds", "end"}, {4, 3, 3, 4, -1}, 1, 2, 2, 3, "A");
    CHECK(compute_paths(siblings).local == std::vector<std::size_t>{1, 3, 2});
    CHECK(mine_candidates(siblings).empty());
  }
  SUBCASE("words are lowercased and punctuation skipped for the global path") {
    auto ex = make_example("s", {"X", "Inhibits", "Y", "."}, {1, -1, 1, 1}, 0, 1, 2, 3, "A");
    auto paths = compute_paths(ex);
    CHECK(paths.global.front() == 0);
    CHECK(paths.global.back() == 2);
    auto phrases = mine_candidates(ex);
    REQUIRE(phrases.size() == 1);
    CHECK(phrases[0].words == std::vector<std::string>{"inhibits"});
  }
  SUBCASE("running example yields a phrase containing 'inhibitor'") {
    auto phrases = mine_candidates(vforge::testing::imipramine_example());
    REQUIRE(phrases.size() == 1);
    const auto& w = phrases[0].words;
    CHECK(std::find(w.begin(), w.end(), "inhibitor") != w.end());
  }
}

TEST_CASE("mining properties on random parses") {
  std::mt19937_64 rng(2024);
  std::size_t checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const auto n = 4 + static_cast<std::size_t>(trial % 9);
    auto heads = vforge::testing::random_tree(n, rng);
    std::vector<std::string> words;
    for (std::size_t i = 0; i < n; ++i) words.push_back(i + 1 == n ? "." : "W" + std::to_string(i));
    // entity spans: single tokens a < b, neither the final period
    std::uniform_int_distribution<std::size_t> pick(0, n - 2);
    auto a = pick(rng), b = pick(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    auto ex = make_example("r" + std::to_string(trial), words, heads, a, a + 1, b, b + 1, "A");
    auto paths = compute_paths(ex);
    auto local_oracle = vforge::testing::brute_force_path_nodes_set(heads, a, b);
    CHECK(std::set<std::size_t>(paths.local.begin(), paths.local.end()) == local_oracle);

    auto phrases = mine_candidates(ex);
    CHECK(phrases == mine_candidates(ex));
    for (const auto& p : phrases) {
      ++checked;
      CHECK(std::is_sorted(p.source_indices.begin(), p.source_indices.end()));
      for (auto t : p.source_indices) {
        CHECK(std::find(paths.local.begin(), paths.local.end(), t) != paths.local.end());
        CHECK(std::find(paths.global.begin(), paths.global.end(), t) != paths.global.end());
        CHECK_FALSE(ex.e1.contains(t));
        CHECK_FALSE(ex.e2.contains(t));
        CHECK_FALSE(ex.tokens[t].is_punct);
      }
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("synthetic corpus mines exactly its planted phrases") {
  auto corpus = generate_synthetic({20, 0.1, 5, "p"});
  const auto& noise = synthetic_noise_phrases();
  for (const auto& ex : corpus.examples) {
    auto phrases = mine_candidates(ex);
    REQUIRE(phrases.size() == 1);
    const auto& words = phrases[0].words;
    const bool planted = words == corpus.planted.at(ex.label);
    const bool noisy = std::find(noise.begin(), noise.end(), words) != noise.end();
    CHECK((planted || noisy));
  }
}

TEST_CASE("mine_split with workers matches the serial result and round-trips as JSONL") {
  auto corpus = generate_synthetic({15, 0.1, 9, "m"});
  CorpusSplit split{SplitName::Train, corpus.examples};
  auto serial = mine_split(split, 1);
  CHECK(serial.size() == split.examples.size());
  CHECK(mine_split(split, 4) == serial);

  std::ostringstream out;
  write_candidates(out, serial);
  std::istringstream in(out.str());
  CHECK(read_candidates(in) == serial);
}
