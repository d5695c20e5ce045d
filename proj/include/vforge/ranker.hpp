#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vforge/corpus.hpp"
#include "vforge/embedding.hpp"
#include "vforge/path_miner.hpp"

namespace vforge {

enum class RankingMethod { Frequency, FrequencySpecificity, Similarity, Combined, RandomPick };

/// Canonical names: frequency, frequency_specificity, similarity, combined, random_pick.
std::string to_string(RankingMethod method);
/// Also accepts the CLI spellings `freq-spec` and `random`.
RankingMethod parse_ranking_method(std::string_view name);
bool needs_embeddings(RankingMethod method) noexcept;

/// Occurrence statistics of one length-L candidate window.
struct CandidateStats {
  std::string phrase;  // words joined by a single space
  std::vector<std::string> words;
  /// N_c(r): distinct training examples of label r whose mined phrase contains
  /// this window. Every label of the LabelSet has an entry.
  std::map<std::string, std::size_t> per_label_example_count;
  /// N_r: number of labels with a nonzero count.
  std::size_t label_presence_count = 0;
  /// Smallest (byte-wise) example id containing the window. Used as the
  /// "first occurrence" tie-break so that statistics do not depend on the
  /// order in which examples are fed.
  std::string first_example_id;

  std::size_t count(const std::string& label) const;
  bool operator==(const CandidateStats&) const = default;
};

using StatsTable = std::map<std::string, CandidateStats>;

/// Partial counts that merge associatively, for per-shard counting.
class StatsAccumulator {
 public:
  StatsAccumulator(const LabelSet& labelset, std::size_t window);

  void add(const LabeledCandidate& candidate);
  void merge(const StatsAccumulator& other);
  /// Throws EmptyPool when a label ends up with no window.
  StatsTable finish() const;

 private:
  const LabelSet* labelset_;
  std::size_t window_;
  // phrase -> label index -> example ids
  std::map<std::string, std::vector<std::set<std::string>>> hits_;
};

StatsTable collect_stats(std::span<const LabeledCandidate> candidates, const LabelSet& labelset,
                         std::size_t window = 3, std::size_t workers = 1);

double score_frequency(const CandidateStats& stats, const std::string& label);
/// N_c(r) * ln(N_R / N_r).
double score_frequency_specificity(const CandidateStats& stats, const std::string& label,
                                   const LabelSet& labelset);
double score_similarity(const EmbeddingVector& candidate, const EmbeddingVector& relation);
double score_combined(const CandidateStats& stats, const std::string& label, const LabelSet& labelset,
                      const EmbeddingVector& candidate, const EmbeddingVector& relation);

struct RankedVerbalizer {
  std::string label;
  std::vector<std::string> words;
  double score = 0.0;
  RankingMethod method = RankingMethod::Frequency;

  std::string phrase() const;
  bool operator==(const RankedVerbalizer&) const = default;
};

struct ScoredCandidate {
  const CandidateStats* stats = nullptr;
  double score = 0.0;
};

/// Orders by score (descending), then first occurrence, then phrase.
bool ranks_before(const ScoredCandidate& a, const ScoredCandidate& b);
/// Index of the winner under ranks_before; the span must be non-empty.
std::size_t select_best(std::span<const ScoredCandidate> pool);

/// Candidates seen at least once with `label`, in (first occurrence, phrase) order.
std::vector<const CandidateStats*> label_pool(const StatsTable& stats, const std::string& label);

/// The verbalizer choice for every label, in LabelSet order, plus the
/// settings that produced it.
struct VerbalizerSet {
  RankingMethod method = RankingMethod::Frequency;
  std::uint64_t seed = 0;
  std::size_t mask_count = 3;
  std::vector<RankedVerbalizer> entries;

  const RankedVerbalizer& at(const std::string& label) const;

  std::string to_toml() const;
  static VerbalizerSet parse(std::string_view toml_text);
  static VerbalizerSet load(const std::filesystem::path& path);

  bool operator==(const VerbalizerSet&) const = default;
};

/// `provider` may be null for methods that do not need embeddings.
/// The returned lists are best-first; for random_pick they are the first k
/// draws of a seeded partial Fisher-Yates shuffle over the label pool.
std::vector<std::vector<RankedVerbalizer>> rank_top_k(const StatsTable& stats, const LabelSet& labelset,
                                                      RankingMethod method, std::uint64_t seed,
                                                      const EmbeddingProvider* provider, std::size_t k);

VerbalizerSet select_verbalizers(const StatsTable& stats, const LabelSet& labelset, RankingMethod method,
                                 std::uint64_t seed, const EmbeddingProvider* provider = nullptr);

}  // namespace vforge
