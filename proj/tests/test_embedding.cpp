#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "vforge/embedding.hpp"
#include "vforge/errors.hpp"
#include "vforge/synth.hpp"

using namespace vforge;
using doctest::Approx;

namespace {

StaticVectorProvider small_provider() {
  std::istringstream in("inhibitor 1 0 2\nof 0 2 0\nIs 3 3 3\n");
  return StaticVectorProvider::parse(in);
}

}  // namespace

TEST_CASE("static vector file parsing") {
  auto p = small_provider();
  CHECK(p.dim() == 3);
  CHECK(p.vocabulary_size() == 3);

  std::istringstream mixed("a 1 2 3\nb 1 2\n");
  CHECK_THROWS_AS(StaticVectorProvider::parse(mixed), DimensionMismatch);
  std::istringstream junk("a 1 x 3\n");
  CHECK_THROWS_AS(StaticVectorProvider::parse(junk), MalformedRecord);
  std::istringstream empty("");
  CHECK_THROWS_AS(StaticVectorProvider::parse(empty), ProviderUnavailable);
  CHECK_THROWS_AS(StaticVectorProvider::load("/nonexistent/vectors.txt"), ProviderUnavailable);
}

TEST_CASE("phrase embedding is the mean of word vectors with OOV as zero") {
  auto p = small_provider();
  CHECK(embed("inhibitor", p) == EmbeddingVector({1.0, 0.0, 2.0}));
  CHECK(embed("inhibitor of", p) == EmbeddingVector({0.5, 1.0, 1.0}));
  // OOV word stays in the denominator.
  CHECK(embed("inhibitor zzz", p) == EmbeddingVector({0.5, 0.0, 1.0}));
  CHECK(embed("qqq zzz", p).is_zero());
  // exact match first, then lowercase
  CHECK(p.lookup("Is") != nullptr);
  CHECK(p.lookup("OF") != nullptr);
  CHECK(p.lookup("is") == nullptr);
  CHECK_THROWS_AS(embed("   ", p), std::invalid_argument);
}

TEST_CASE("cosine properties") {
  CHECK(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 0.0);
  CHECK(cosine(std::vector<double>{1, 1}, std::vector<double>{1, 0}) == Approx(0.7071067811865476));
  CHECK(cosine(std::vector<double>{0, 0}, std::vector<double>{1, 0}) == 0.0);
  CHECK(cosine(std::vector<double>{2, 4}, std::vector<double>{2, 4}) == Approx(1.0));
  CHECK_THROWS_AS(cosine(std::vector<double>{1}, std::vector<double>{1, 2}), DimensionMismatch);
  CHECK_THROWS_AS(EmbeddingVector(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(EmbeddingVector(std::vector<double>{1.0, NAN}), std::invalid_argument);
}

TEST_CASE("synthetic vectors give planted phrases positive similarity with their descriptions") {
  std::istringstream in(synthetic_vectors());
  auto p = StaticVectorProvider::parse(in);
  CHECK(p.dim() == 16);
  const auto ls = synthetic_labelset();
  for (const auto& [label, words] : synthetic_planted_phrases()) {
    std::string phrase = words[0] + " " + words[1] + " " + words[2];
    const auto own = cosine(embed(phrase, p).values(), embed(ls.description(label), p).values());
    CHECK(own > 0.3);
    for (const auto& other : ls.labels()) {
      if (other == label) continue;
      CHECK(own > cosine(embed(phrase, p).values(), embed(ls.description(other), p).values()));
    }
  }
}

TEST_CASE("provider is safe for concurrent lookups") {
  std::istringstream in(synthetic_vectors());
  const auto p = StaticVectorProvider::parse(in);
  const auto expected = embed("is inhibitor of", p);
  std::vector<int> ok(8, 0);
  {
    std::vector<std::jthread> threads;
    for (std::size_t t = 0; t < ok.size(); ++t) {
      threads.emplace_back([&, t] {
        for (int i = 0; i < 200; ++i) ok[t] += embed("is inhibitor of", p) == expected;
      });
    }
  }
  for (auto n : ok) CHECK(n == 200);
}

TEST_CASE("HTTP embedding provider") {
  httplib::Server server;
  server.Post("/embed", [](const httplib::Request& req, httplib::Response& res) {
    auto body = nlohmann::json::parse(req.body);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& t : body.at("texts")) {
      const auto s = t.get<std::string>();
      rows.push_back({static_cast<double>(s.size()), 1.0});
    }
    res.set_content(nlohmann::json{{"embeddings", rows}}.dump(), "application/json");
  });
  server.Post("/broken", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::jthread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  const std::string base = "http://127.0.0.1:" + std::to_string(port);
  HttpEmbeddingProvider provider(base);
  CHECK(provider.dim() == 2);
  CHECK(embed("abc", provider) == EmbeddingVector({3.0, 1.0}));

  HttpEmbeddingProvider broken(base, "/broken");
  CHECK_THROWS_AS(broken.embed("x"), ProviderUnavailable);
  server.stop();

  HttpEmbeddingProvider unreachable("http://127.0.0.1:1", "/embed", 1);
  CHECK_THROWS_AS(unreachable.embed("x"), ProviderUnavailable);
}
