#pragma once

// Builders and independent oracles shared by the test suites. Nothing in
// here calls into the code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "vforge/corpus.hpp"

namespace vforge::testing {

inline LabelSet two_labels() {
  return LabelSet({"A", "B"}, {{"A", "alpha"}, {"B", "beta"}}, "B");
}

inline LabelSet six_labels() {
  return LabelSet({"CPR:3", "CPR:4", "CPR:5", "CPR:6", "CPR:9", "no_relation"},
                  {{"CPR:3", "activation"},
                   {"CPR:4", "inhibition"},
                   {"CPR:5", "agonist"},
                   {"CPR:6", "antagonist"},
                   {"CPR:9", "substrate"},
                   {"no_relation", ""}},
                  "no_relation");
}

/// Example from parallel arrays; punctuation is inferred from the text.
inline AnnotatedExample make_example(std::string id, const std::vector<std::string>& words,
                                     const std::vector<int>& heads, std::size_t e1_start, std::size_t e1_end,
                                     std::size_t e2_start, std::size_t e2_end, std::string label) {
  AnnotatedExample ex;
  ex.id = std::move(id);
  for (std::size_t i = 0; i < words.size(); ++i) {
    const bool punct = words[i] == "." || words[i] == ",";
    ex.tokens.push_back(Token{i, words[i], heads[i], heads[i] == -1 ? "root" : "dep", punct});
  }
  ex.e1 = EntitySpan{e1_start, e1_end, span_text(ex.tokens, e1_start, e1_end), EntityRole::E1};
  ex.e2 = EntitySpan{e2_start, e2_end, span_text(ex.tokens, e2_start, e2_end), EntityRole::E2};
  ex.label = std::move(label);
  return ex;
}

/// The running example "The specificity of tracer uptake was determined by
/// adding the imipramine inhibitor NET ." with a spaCy-style parse in which
/// "inhibitor" heads the object of "adding" and NET attaches to it.
inline AnnotatedExample imipramine_example() {
  //                 0      1            2     3        4       5      6            7     8         9      10
  std::vector<std::string> w = {"The", "specificity", "of", "tracer", "uptake", "was", "determined", "by", "adding",
                                "the", "imipramine", "inhibitor", "NET", "."};
  //                      11          12     13
  std::vector<int> heads = {1, 6, 1, 4, 2, 6, -1, 6, 7, 11, 11, 8, 11, 6};
  return make_example("chemprot-ex", w, heads, 10, 11, 12, 13, "CPR:4");
}

/// Uniform random labelled tree on n nodes (random Prufer-free attachment:
/// node i > 0 attaches to a uniformly chosen earlier node, then labels are
/// permuted). Returns the head array with -1 for the root.
inline std::vector<int> random_tree(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> heads(n, -1);
  for (std::size_t i = 1; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    heads[perm[i]] = static_cast<int>(perm[pick(rng)]);
  }
  return heads;
}

/// Length (in nodes) of the shortest simple path between a and b, found by
/// enumerating every simple path with DFS over adjacency built from `heads`.
inline std::size_t brute_force_path_nodes(const std::vector<int>& heads, std::size_t a, std::size_t b,
                                          std::size_t* paths_seen = nullptr) {
  const auto n = heads.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (heads[i] >= 0) {
      adj[i].push_back(static_cast<std::size_t>(heads[i]));
      adj[static_cast<std::size_t>(heads[i])].push_back(i);
    }
  }
  std::size_t best = SIZE_MAX;
  std::size_t count = 0;
  std::vector<bool> used(n, false);
  std::function<void(std::size_t, std::size_t)> dfs = [&](std::size_t node, std::size_t len) {
    if (node == b) {
      ++count;
      best = std::min(best, len);
      return;
    }
    for (auto next : adj[node]) {
      if (used[next]) continue;
      used[next] = true;
      dfs(next, len + 1);
      used[next] = false;
    }
  };
  used[a] = true;
  dfs(a, 1);
  if (paths_seen != nullptr) *paths_seen = count;
  return best;
}

/// Every node set lying on some shortest simple path a..b, by enumeration.
inline std::set<std::size_t> brute_force_path_nodes_set(const std::vector<int>& heads, std::size_t a, std::size_t b) {
  const auto n = heads.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (heads[i] >= 0) {
      adj[i].push_back(static_cast<std::size_t>(heads[i]));
      adj[static_cast<std::size_t>(heads[i])].push_back(i);
    }
  }
  std::vector<std::vector<std::size_t>> found;
  std::vector<std::size_t> path{a};
  std::vector<bool> used(n, false);
  used[a] = true;
  std::function<void(std::size_t)> dfs = [&](std::size_t node) {
    if (node == b) {
      found.push_back(path);
      return;
    }
    for (auto next : adj[node]) {
      if (used[next]) continue;
      used[next] = true;
      path.push_back(next);
      dfs(next);
      path.pop_back();
      used[next] = false;
    }
  };
  dfs(a);
  std::size_t shortest = SIZE_MAX;
  for (const auto& p : found) shortest = std::min(shortest, p.size());
  std::set<std::size_t> nodes;
  for (const auto& p : found) {
    if (p.size() == shortest) nodes.insert(p.begin(), p.end());
  }
  return nodes;
}

/// Reference multi-class metrics from an explicit confusion matrix
/// (rows = gold, columns = predicted), using precision/recall first.
struct ReferenceMetrics {
  double micro = 0.0;
  double macro = 0.0;
  std::vector<double> f1;
};

inline ReferenceMetrics reference_metrics(const std::vector<std::size_t>& gold, const std::vector<std::size_t>& pred,
                                          std::size_t classes) {
  std::vector<std::vector<double>> cm(classes, std::vector<double>(classes, 0.0));
  for (std::size_t i = 0; i < gold.size(); ++i) cm[gold[i]][pred[i]] += 1.0;
  ReferenceMetrics out;
  double diag = 0.0, total = 0.0;
  for (std::size_t c = 0; c < classes; ++c) {
    double row = 0.0, col = 0.0;
    for (std::size_t k = 0; k < classes; ++k) {
      row += cm[c][k];
      col += cm[k][c];
      total += cm[c][k];
    }
    diag += cm[c][c];
    const double p = col > 0 ? cm[c][c] / col : 0.0;
    const double r = row > 0 ? cm[c][c] / row : 0.0;
    out.f1.push_back(p + r > 0 ? 2 * p * r / (p + r) : 0.0);
  }
  double sum = 0.0;
  for (auto f : out.f1) sum += f;
  out.macro = sum / static_cast<double>(classes);
  // Pooled precision = pooled recall = diag / total for single-label data.
  const double pooled_p = total > 0 ? diag / total : 0.0;
  out.micro = pooled_p;
  return out;
}

/// Independent recount of N_c(r): for every length-L window key, the number
/// of distinct example ids per label whose word list contains it contiguously.
struct Recount {
  std::map<std::string, std::map<std::string, std::set<std::string>>> examples;  // phrase -> label -> ids
};

inline Recount recount(const std::vector<std::tuple<std::string, std::string, std::vector<std::string>>>& rows,
                       std::size_t L) {
  std::set<std::string> keys;
  for (const auto& [id, label, words] : rows) {
    for (std::size_t s = 0; s + L <= words.size(); ++s) {
      std::string key;
      for (std::size_t j = 0; j < L; ++j) key += (j ? " " : "") + words[s + j];
      keys.insert(key);
    }
  }
  Recount out;
  for (const auto& key : keys) {
    for (const auto& [id, label, words] : rows) {
      std::string joined;
      for (std::size_t j = 0; j < words.size(); ++j) joined += (j ? " " : "") + words[j];
      // Contiguous word containment, checked on padded strings.
      if ((" " + joined + " ").find(" " + key + " ") != std::string::npos) out.examples[key][label].insert(id);
    }
  }
  return out;
}

}  // namespace vforge::testing
