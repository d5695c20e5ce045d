#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vforge {

/// Fixed-dimension real vector with finite entries.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  /// Throws std::invalid_argument on an empty or non-finite input.
  explicit EmbeddingVector(std::vector<double> values);
  static EmbeddingVector zeros(std::size_t dim);

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  bool is_zero() const noexcept;

  bool operator==(const EmbeddingVector&) const = default;

 private:
  std::vector<double> values_;
};

/// Cosine similarity; 0 when either side is the zero vector.
/// Throws DimensionMismatch on unequal lengths.
double cosine(std::span<const double> a, std::span<const double> b);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dim() const = 0;
  /// `text` must be non-empty. Implementations are safe for concurrent calls.
  virtual EmbeddingVector embed(std::string_view text) const = 0;
};

EmbeddingVector embed(std::string_view text, const EmbeddingProvider& provider);

/// Word vectors read from a text file with lines `token f1 f2 ... fD`.
/// A phrase embeds to the mean of its whitespace-separated words, where
/// out-of-vocabulary words count as zero vectors.
class StaticVectorProvider final : public EmbeddingProvider {
 public:
  static StaticVectorProvider load(const std::filesystem::path& path);
  static StaticVectorProvider parse(std::istream& in);

  std::size_t dim() const override { return dim_; }
  EmbeddingVector embed(std::string_view text) const override;

  /// Exact lookup first, lowercase second; nullptr when absent.
  const std::vector<double>* lookup(std::string_view word) const;
  std::size_t vocabulary_size() const noexcept { return vectors_.size(); }

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

/// Sentence encoder behind HTTP. POSTs `{"texts": [...]}` to `<base_url><path>`
/// and expects `{"embeddings": [[...]]}` back.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(std::string base_url, std::string path = "/embed", int timeout_seconds = 30);

  /// Probes the endpoint with one request to learn the dimension.
  std::size_t dim() const override;
  EmbeddingVector embed(std::string_view text) const override;

 private:
  std::vector<EmbeddingVector> request(const std::vector<std::string>& texts) const;

  std::string base_url_;
  std::string path_;
  int timeout_seconds_;
};

}  // namespace vforge
