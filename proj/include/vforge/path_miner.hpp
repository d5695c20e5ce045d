#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "vforge/corpus.hpp"

namespace vforge {

/// Undirected view of a dependency parse. Neighbor lists are kept sorted so
/// breadth-first search expands in ascending token order.
class DependencyGraph {
 public:
  explicit DependencyGraph(std::size_t node_count);

  void add_edge(std::size_t a, std::size_t b);

  std::size_t node_count() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<std::size_t>& neighbors(std::size_t node) const { return adjacency_.at(node); }
  /// Edges as (min, max) pairs in insertion order.
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const noexcept { return edges_; }

 private:
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
};

/// One edge {t, head(t)} per non-root token. Throws NonTreeParse for invalid heads.
DependencyGraph build_graph(const AnnotatedExample& example);
DependencyGraph build_graph(const std::vector<Token>& tokens);

/// Breadth-first shortest path, inclusive of both endpoints. Returns an empty
/// path only when `to` is unreachable, which cannot happen on a tree.
std::vector<std::size_t> shortest_path(const DependencyGraph& graph, std::size_t from, std::size_t to);

/// The token representing a multi-token entity: the unique span token whose
/// head lies outside the span, or the last span token when there is not
/// exactly one such token.
std::size_t entity_anchor(const std::vector<Token>& tokens, const EntitySpan& span);

struct PathPair {
  std::vector<std::size_t> local;   // e1 anchor -> e2 anchor
  std::vector<std::size_t> global;  // first non-punct token -> last non-punct token
};

PathPair compute_paths(const AnnotatedExample& example);

struct CandidatePhrase {
  std::vector<std::string> words;  // lowercased
  std::vector<std::size_t> source_indices;
  std::string example_id;

  bool operator==(const CandidatePhrase&) const = default;
};

/// Zero or one phrase: the non-entity, non-punctuation tokens lying on both
/// the local and the global path, in surface order.
std::vector<CandidatePhrase> mine_candidates(const AnnotatedExample& example);

/// ASCII lowercase; bytes >= 0x80 pass through untouched.
std::string lowercase(std::string_view text);

/// A mined phrase paired with the gold label of its example. One record of
/// the candidate JSONL exchange file.
struct LabeledCandidate {
  std::string example_id;
  std::string label;
  std::vector<std::string> words;

  bool operator==(const LabeledCandidate&) const = default;
};

std::vector<LabeledCandidate> mine_split(const CorpusSplit& split, std::size_t workers = 1);

void write_candidates(std::ostream& out, const std::vector<LabeledCandidate>& candidates);
std::vector<LabeledCandidate> read_candidates(std::istream& in);

}  // namespace vforge
