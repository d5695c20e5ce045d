#include "vforge/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "vforge/errors.hpp"
#include "vforge/path_miner.hpp"

namespace vforge {

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("embedding vector must have dim > 0");
  for (auto v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("embedding vector has a non-finite entry");
  }
}

EmbeddingVector EmbeddingVector::zeros(std::size_t dim) { return EmbeddingVector(std::vector<double>(dim, 0.0)); }

bool EmbeddingVector::is_zero() const noexcept {
  for (auto v : values_) {
    if (v != 0.0) return false;
  }
  return true;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  // Rounding can push |c| a hair past 1.
  return std::clamp(c, -1.0, 1.0);
}

EmbeddingVector embed(std::string_view text, const EmbeddingProvider& provider) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw std::invalid_argument("cannot embed empty text");
  }
  return provider.embed(text);
}

StaticVectorProvider StaticVectorProvider::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ProviderUnavailable("cannot open vector file " + path.string());
  return parse(in);
}

StaticVectorProvider StaticVectorProvider::parse(std::istream& in) {
  StaticVectorProvider provider;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    std::vector<double> values;
    std::string number;
    while (fields >> number) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(number, &used));
        if (used != number.size()) throw std::invalid_argument(number);
      } catch (const std::exception&) {
        throw MalformedRecord(line_no, "non-numeric vector component '" + number + "'");
      }
      if (!std::isfinite(values.back())) throw MalformedRecord(line_no, "non-finite vector component");
    }
    if (values.empty()) throw MalformedRecord(line_no, "word '" + word + "' has no vector");
    if (provider.dim_ == 0) provider.dim_ = values.size();
    if (values.size() != provider.dim_) {
      throw DimensionMismatch("line " + std::to_string(line_no) + ": expected dimension " +
                              std::to_string(provider.dim_) + ", got " + std::to_string(values.size()));
    }
    provider.vectors_.insert_or_assign(std::move(word), std::move(values));
  }
  if (provider.dim_ == 0) throw ProviderUnavailable("vector file holds no vectors");
  return provider;
}

const std::vector<double>* StaticVectorProvider::lookup(std::string_view word) const {
  if (auto it = vectors_.find(std::string(word)); it != vectors_.end()) return &it->second;
  if (auto it = vectors_.find(lowercase(word)); it != vectors_.end()) return &it->second;
  return nullptr;
}

EmbeddingVector StaticVectorProvider::embed(std::string_view text) const {
  std::vector<double> sum(dim_, 0.0);
  std::size_t words = 0;
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) {
    ++words;
    if (const auto* v = lookup(word)) {
      for (std::size_t i = 0; i < dim_; ++i) sum[i] += (*v)[i];
    }
  }
  if (words == 0) throw std::invalid_argument("cannot embed empty text");
  for (auto& x : sum) x /= static_cast<double>(words);
  return EmbeddingVector(std::move(sum));
}

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string base_url, std::string path, int timeout_seconds)
    : base_url_(std::move(base_url)), path_(std::move(path)), timeout_seconds_(timeout_seconds) {}

std::vector<EmbeddingVector> HttpEmbeddingProvider::request(const std::vector<std::string>& texts) const {
  httplib::Client client(base_url_);
  client.set_connection_timeout(timeout_seconds_);
  client.set_read_timeout(timeout_seconds_);
  nlohmann::json body = {{"texts", texts}};
  auto response = client.Post(path_, body.dump(), "application/json");
  if (!response) {
    throw ProviderUnavailable("embedding endpoint " + base_url_ + path_ + " unreachable: " +
                              httplib::to_string(response.error()));
  }
  if (response->status != 200) {
    throw ProviderUnavailable("embedding endpoint returned HTTP " + std::to_string(response->status));
  }
  std::vector<EmbeddingVector> out;
  try {
    auto reply = nlohmann::json::parse(response->body);
    for (const auto& row : reply.at("embeddings")) out.emplace_back(row.get<std::vector<double>>());
  } catch (const std::exception& e) {
    throw ProviderUnavailable(std::string("malformed embedding response: ") + e.what());
  }
  if (out.size() != texts.size()) throw ProviderUnavailable("embedding response has the wrong number of rows");
  return out;
}

std::size_t HttpEmbeddingProvider::dim() const { return request({"dimension probe"}).front().dim(); }

EmbeddingVector HttpEmbeddingProvider::embed(std::string_view text) const {
  return request({std::string(text)}).front();
}

}  // namespace vforge
