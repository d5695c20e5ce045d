#include "vforge/path_miner.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <limits>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "vforge/errors.hpp"

namespace vforge {

DependencyGraph::DependencyGraph(std::size_t node_count) : adjacency_(node_count) {}

void DependencyGraph::add_edge(std::size_t a, std::size_t b) {
  auto& na = adjacency_.at(a);
  auto& nb = adjacency_.at(b);
  na.insert(std::lower_bound(na.begin(), na.end(), b), b);
  nb.insert(std::lower_bound(nb.begin(), nb.end(), a), a);
  edges_.emplace_back(std::min(a, b), std::max(a, b));
}

DependencyGraph build_graph(const std::vector<Token>& tokens) {
  validate_tree(tokens);
  DependencyGraph graph(tokens.size());
  for (const auto& t : tokens) {
    if (!t.is_root()) graph.add_edge(t.index, static_cast<std::size_t>(t.head));
  }
  return graph;
}

DependencyGraph build_graph(const AnnotatedExample& example) { return build_graph(example.tokens); }

std::vector<std::size_t> shortest_path(const DependencyGraph& graph, std::size_t from, std::size_t to) {
  const auto n = graph.node_count();
  if (from >= n || to >= n) throw std::out_of_range("shortest_path: node index out of range");
  if (from == to) return {from};

  constexpr auto kUnseen = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> parent(n, kUnseen);
  parent[from] = from;
  std::deque<std::size_t> frontier{from};
  while (!frontier.empty()) {
    const auto node = frontier.front();
    frontier.pop_front();
    if (node == to) break;
    for (auto next : graph.neighbors(node)) {
      if (parent[next] != kUnseen) continue;
      parent[next] = node;
      frontier.push_back(next);
    }
  }
  if (parent[to] == kUnseen) return {};

  std::vector<std::size_t> path{to};
  for (auto node = to; node != from;) {
    node = parent[node];
    path.push_back(node);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::size_t entity_anchor(const std::vector<Token>& tokens, const EntitySpan& span) {
  std::size_t found = 0;
  std::size_t anchor = span.end - 1;
  for (std::size_t i = span.start; i < span.end; ++i) {
    const auto& t = tokens.at(i);
    if (t.is_root() || !span.contains(static_cast<std::size_t>(t.head))) {
      ++found;
      anchor = i;
    }
  }
  return found == 1 ? anchor : span.end - 1;
}

PathPair compute_paths(const AnnotatedExample& example) {
  const auto graph = build_graph(example);
  const auto& tokens = example.tokens;

  auto first = std::find_if(tokens.begin(), tokens.end(), [](const Token& t) { return !t.is_punct; });
  auto last = std::find_if(tokens.rbegin(), tokens.rend(), [](const Token& t) { return !t.is_punct; });
  std::size_t first_word = 0;
  std::size_t last_word = tokens.size() - 1;
  if (first != tokens.end()) {
    first_word = first->index;
    last_word = last->index;
  }

  PathPair paths;
  paths.local = shortest_path(graph, entity_anchor(tokens, example.e1), entity_anchor(tokens, example.e2));
  paths.global = shortest_path(graph, first_word, last_word);
  return paths;
}

std::string lowercase(std::string_view text) {
  std::string out(text);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<CandidatePhrase> mine_candidates(const AnnotatedExample& example) {
  const auto paths = compute_paths(example);
  std::vector<bool> on_global(example.tokens.size(), false);
  for (auto t : paths.global) on_global[t] = true;

  std::vector<std::size_t> shared;
  for (auto t : paths.local) {
    if (!on_global[t]) continue;
    if (example.e1.contains(t) || example.e2.contains(t)) continue;
    if (example.tokens[t].is_punct) continue;
    shared.push_back(t);
  }
  if (shared.empty()) return {};
  std::sort(shared.begin(), shared.end());

  CandidatePhrase phrase;
  phrase.example_id = example.id;
  phrase.source_indices = shared;
  phrase.words.reserve(shared.size());
  for (auto t : shared) phrase.words.push_back(lowercase(example.tokens[t].text));
  return {std::move(phrase)};
}

std::vector<LabeledCandidate> mine_split(const CorpusSplit& split, std::size_t workers) {
  const auto n = split.examples.size();
  std::vector<std::vector<CandidatePhrase>> mined(n);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (auto i = begin; i < end; ++i) mined[i] = mine_candidates(split.examples[i]);
  };
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    work(0, n);
  } else {
    std::vector<std::jthread> threads;
    const auto chunk = (n + workers - 1) / workers;
    for (std::size_t begin = 0; begin < n; begin += chunk) {
      threads.emplace_back(work, begin, std::min(n, begin + chunk));
    }
  }

  std::vector<LabeledCandidate> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& phrase : mined[i]) {
      out.push_back({split.examples[i].id, split.examples[i].label, std::move(phrase.words)});
    }
  }
  return out;
}

void write_candidates(std::ostream& out, const std::vector<LabeledCandidate>& candidates) {
  for (const auto& c : candidates) {
    nlohmann::json record = {{"example_id", c.example_id}, {"label", c.label}, {"words", c.words}};
    out << record.dump() << '\n';
  }
}

std::vector<LabeledCandidate> read_candidates(std::istream& in) {
  std::vector<LabeledCandidate> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto record = nlohmann::json::parse(text);
      out.push_back({record.at("example_id").get<std::string>(), record.at("label").get<std::string>(),
                     record.at("words").get<std::vector<std::string>>()});
    } catch (const nlohmann::json::exception& e) {
      throw MalformedRecord(line, std::string("bad candidate record: ") + e.what());
    }
  }
  return out;
}

}  // namespace vforge
