#include "vforge/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <toml++/toml.hpp>

#include "vforge/errors.hpp"
#include "vforge/random.hpp"

namespace vforge {

namespace {

std::string join_words(std::span<const std::string> words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out += ' ';
    out += words[i];
  }
  return out;
}

}  // namespace

std::string to_string(RankingMethod method) {
  switch (method) {
    case RankingMethod::Frequency: return "frequency";
    case RankingMethod::FrequencySpecificity: return "frequency_specificity";
    case RankingMethod::Similarity: return "similarity";
    case RankingMethod::Combined: return "combined";
    case RankingMethod::RandomPick: return "random_pick";
  }
  return "frequency";
}

RankingMethod parse_ranking_method(std::string_view name) {
  if (name == "frequency") return RankingMethod::Frequency;
  if (name == "freq-spec" || name == "frequency_specificity" || name == "frequency-specificity") {
    return RankingMethod::FrequencySpecificity;
  }
  if (name == "similarity") return RankingMethod::Similarity;
  if (name == "combined") return RankingMethod::Combined;
  if (name == "random" || name == "random_pick" || name == "random-pick") return RankingMethod::RandomPick;
  throw InvalidConfig("unknown ranking method '" + std::string(name) + "'");
}

bool needs_embeddings(RankingMethod method) noexcept {
  return method == RankingMethod::Similarity || method == RankingMethod::Combined;
}

std::size_t CandidateStats::count(const std::string& label) const {
  auto it = per_label_example_count.find(label);
  return it == per_label_example_count.end() ? 0 : it->second;
}

StatsAccumulator::StatsAccumulator(const LabelSet& labelset, std::size_t window)
    : labelset_(&labelset), window_(window) {
  if (window_ == 0) throw std::invalid_argument("window length must be at least 1");
}

void StatsAccumulator::add(const LabeledCandidate& candidate) {
  auto label = labelset_->index_of(candidate.label);
  if (!label) throw UnknownLabel(0, candidate.label);
  const auto& words = candidate.words;
  if (words.size() < window_) return;
  for (std::size_t start = 0; start + window_ <= words.size(); ++start) {
    auto phrase = join_words(std::span(words).subspan(start, window_));
    auto& per_label = hits_[phrase];
    if (per_label.empty()) per_label.resize(labelset_->size());
    per_label[*label].insert(candidate.example_id);
  }
}

void StatsAccumulator::merge(const StatsAccumulator& other) {
  for (const auto& [phrase, per_label] : other.hits_) {
    auto& mine = hits_[phrase];
    if (mine.empty()) mine.resize(labelset_->size());
    for (std::size_t r = 0; r < per_label.size(); ++r) mine[r].insert(per_label[r].begin(), per_label[r].end());
  }
}

StatsTable StatsAccumulator::finish() const {
  StatsTable table;
  const auto& labels = labelset_->labels();
  std::vector<bool> label_has_pool(labels.size(), false);
  for (const auto& [phrase, per_label] : hits_) {
    CandidateStats stats;
    stats.phrase = phrase;
    std::istringstream words(phrase);
    for (std::string w; words >> w;) stats.words.push_back(w);
    for (std::size_t r = 0; r < labels.size(); ++r) {
      const auto n = per_label[r].size();
      stats.per_label_example_count[labels[r]] = n;
      if (n == 0) continue;
      ++stats.label_presence_count;
      label_has_pool[r] = true;
      const auto& first = *per_label[r].begin();
      if (stats.first_example_id.empty() || first < stats.first_example_id) stats.first_example_id = first;
    }
    table.emplace(phrase, std::move(stats));
  }
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (!label_has_pool[r]) throw EmptyPool(labels[r]);
  }
  return table;
}

StatsTable collect_stats(std::span<const LabeledCandidate> candidates, const LabelSet& labelset,
                         std::size_t window, std::size_t workers) {
  workers = std::max<std::size_t>(1, std::min(workers, candidates.size()));
  std::vector<StatsAccumulator> shards(workers, StatsAccumulator(labelset, window));
  if (workers == 1) {
    for (const auto& c : candidates) shards[0].add(c);
  } else {
    const auto chunk = (candidates.size() + workers - 1) / workers;
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      const auto begin = std::min(candidates.size(), w * chunk);
      const auto end = std::min(candidates.size(), begin + chunk);
      threads.emplace_back([&shards, candidates, w, begin, end] {
        for (auto i = begin; i < end; ++i) shards[w].add(candidates[i]);
      });
    }
  }
  for (std::size_t w = 1; w < shards.size(); ++w) shards[0].merge(shards[w]);
  return shards[0].finish();
}

double score_frequency(const CandidateStats& stats, const std::string& label) {
  return static_cast<double>(stats.count(label));
}

double score_frequency_specificity(const CandidateStats& stats, const std::string& label,
                                   const LabelSet& labelset) {
  const auto n_c = stats.count(label);
  if (n_c == 0 || stats.label_presence_count == 0) return 0.0;
  return static_cast<double>(n_c) *
         std::log(static_cast<double>(labelset.size()) / static_cast<double>(stats.label_presence_count));
}

double score_similarity(const EmbeddingVector& candidate, const EmbeddingVector& relation) {
  return cosine(candidate.values(), relation.values());
}

double score_combined(const CandidateStats& stats, const std::string& label, const LabelSet& labelset,
                      const EmbeddingVector& candidate, const EmbeddingVector& relation) {
  return score_frequency_specificity(stats, label, labelset) * score_similarity(candidate, relation);
}

std::string RankedVerbalizer::phrase() const { return join_words(words); }

bool ranks_before(const ScoredCandidate& a, const ScoredCandidate& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.stats->first_example_id != b.stats->first_example_id) {
    return a.stats->first_example_id < b.stats->first_example_id;
  }
  return a.stats->phrase < b.stats->phrase;
}

std::size_t select_best(std::span<const ScoredCandidate> pool) {
  if (pool.empty()) throw std::invalid_argument("select_best on an empty pool");
  std::size_t best = 0;
  for (std::size_t i = 1; i < pool.size(); ++i) {
    if (ranks_before(pool[i], pool[best])) best = i;
  }
  return best;
}

std::vector<const CandidateStats*> label_pool(const StatsTable& stats, const std::string& label) {
  std::vector<const CandidateStats*> pool;
  for (const auto& [_, s] : stats) {
    if (s.count(label) > 0) pool.push_back(&s);
  }
  std::sort(pool.begin(), pool.end(), [](const CandidateStats* a, const CandidateStats* b) {
    if (a->first_example_id != b->first_example_id) return a->first_example_id < b->first_example_id;
    return a->phrase < b->phrase;
  });
  return pool;
}

std::vector<std::vector<RankedVerbalizer>> rank_top_k(const StatsTable& stats, const LabelSet& labelset,
                                                      RankingMethod method, std::uint64_t seed,
                                                      const EmbeddingProvider* provider, std::size_t k) {
  if (needs_embeddings(method) && provider == nullptr) {
    throw ProviderUnavailable("method " + to_string(method) + " needs an embedding provider");
  }
  Rng rng(seed);
  std::unordered_map<std::string, EmbeddingVector> phrase_vectors;

  std::vector<std::vector<RankedVerbalizer>> out;
  for (const auto& label : labelset.labels()) {
    auto pool = label_pool(stats, label);
    if (pool.empty()) throw EmptyPool(label);
    std::vector<RankedVerbalizer> ranked;

    if (method == RankingMethod::RandomPick) {
      const auto take = std::min(k, pool.size());
      rng.partial_shuffle(pool, take);
      for (std::size_t i = 0; i < take; ++i) ranked.push_back({label, pool[i]->words, 0.0, method});
      out.push_back(std::move(ranked));
      continue;
    }

    EmbeddingVector relation_vec;
    if (needs_embeddings(method)) relation_vec = embed(labelset.description(label), *provider);

    std::vector<ScoredCandidate> scored;
    scored.reserve(pool.size());
    for (const auto* s : pool) {
      double score = 0.0;
      switch (method) {
        case RankingMethod::Frequency: score = score_frequency(*s, label); break;
        case RankingMethod::FrequencySpecificity: score = score_frequency_specificity(*s, label, labelset); break;
        case RankingMethod::Similarity:
        case RankingMethod::Combined: {
          auto it = phrase_vectors.find(s->phrase);
          if (it == phrase_vectors.end()) it = phrase_vectors.emplace(s->phrase, embed(s->phrase, *provider)).first;
          score = method == RankingMethod::Similarity ? score_similarity(it->second, relation_vec)
                                                      : score_combined(*s, label, labelset, it->second, relation_vec);
          break;
        }
        case RankingMethod::RandomPick: break;
      }
      scored.push_back({s, score});
    }
    const auto take = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(), ranks_before);
    for (std::size_t i = 0; i < take; ++i) ranked.push_back({label, scored[i].stats->words, scored[i].score, method});
    out.push_back(std::move(ranked));
  }
  return out;
}

VerbalizerSet select_verbalizers(const StatsTable& stats, const LabelSet& labelset, RankingMethod method,
                                 std::uint64_t seed, const EmbeddingProvider* provider) {
  VerbalizerSet set;
  set.method = method;
  set.seed = seed;
  auto ranked = rank_top_k(stats, labelset, method, seed, provider, 1);
  for (auto& per_label : ranked) set.entries.push_back(std::move(per_label.front()));
  set.mask_count = set.entries.empty() ? 0 : set.entries.front().words.size();
  return set;
}

const RankedVerbalizer& VerbalizerSet::at(const std::string& label) const {
  for (const auto& e : entries) {
    if (e.label == label) return e;
  }
  throw InvalidConfig("verbalizer set has no entry for label '" + label + "'");
}

std::string VerbalizerSet::to_toml() const {
  toml::array labels;
  for (const auto& e : entries) {
    toml::array words;
    for (const auto& w : e.words) words.push_back(w);
    labels.push_back(toml::table{{"id", e.label}, {"words", std::move(words)}, {"score", e.score}});
  }
  toml::table doc{{"method", to_string(method)},
                  {"seed", static_cast<std::int64_t>(seed)},
                  {"mask_count", static_cast<std::int64_t>(mask_count)},
                  {"label", std::move(labels)}};
  std::ostringstream out;
  out << doc << "\n";
  return out.str();
}

VerbalizerSet VerbalizerSet::parse(std::string_view toml_text) {
  toml::table doc;
  try {
    doc = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    throw InvalidConfig(std::string("verbalizer file is not valid TOML: ") + std::string(e.description()));
  }
  VerbalizerSet set;
  set.method = parse_ranking_method(doc["method"].value_or(std::string{}));
  set.seed = static_cast<std::uint64_t>(doc["seed"].value_or(std::int64_t{0}));
  const auto mask_count = doc["mask_count"].value_or(std::int64_t{0});
  if (mask_count < 1) throw InvalidConfig("verbalizer file needs mask_count >= 1");
  set.mask_count = static_cast<std::size_t>(mask_count);
  auto* labels = doc["label"].as_array();
  if (labels == nullptr) throw InvalidConfig("verbalizer file has no [[label]] entries");
  for (auto& node : *labels) {
    auto* table = node.as_table();
    if (table == nullptr) throw InvalidConfig("[[label]] entry is not a table");
    RankedVerbalizer v;
    v.method = set.method;
    v.label = (*table)["id"].value_or(std::string{});
    v.score = (*table)["score"].value_or(0.0);
    if (auto* words = (*table)["words"].as_array()) {
      for (auto& w : *words) v.words.push_back(w.value_or(std::string{}));
    }
    if (v.label.empty() || v.words.size() != set.mask_count) {
      throw InvalidConfig("verbalizer entry '" + v.label + "' needs an id and exactly " +
                          std::to_string(set.mask_count) + " words");
    }
    set.entries.push_back(std::move(v));
  }
  return set;
}

VerbalizerSet VerbalizerSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact(path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

}  // namespace vforge
