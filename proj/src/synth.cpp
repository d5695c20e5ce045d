#include "vforge/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "vforge/io.hpp"
#include "vforge/random.hpp"

namespace vforge {

namespace {

constexpr std::size_t kDim = 16;
constexpr std::size_t kConceptDims = 6;

const std::vector<std::string> kFillers = {"the",     "results", "study", "cells",  "we",       "found",
                                           "that",    "in",      "vitro", "rats",   "human",    "binding",
                                           "assay",   "showed",  "data",  "strong", "response", "treatment",
                                           "levels",  "brain",   "after", "both",   "these",    "effects"};

const std::vector<std::vector<std::string>> kChemicals = {
    {"imipramine"}, {"aspirin"},  {"caffeine"}, {"nicotine"},         {"dopamine"},
    {"tamoxifen"},  {"morphine"}, {"clozapine"}, {"retinoic", "acid"}, {"nitric", "oxide"}};

const std::vector<std::vector<std::string>> kGenes = {
    {"NET"},  {"EGFR"}, {"COX-2"},   {"CYP3A4"}, {"D2", "receptor"},
    {"SERT"}, {"AChE"}, {"5-HT2A"}, {"MAO-A"},  {"estrogen", "receptor"}};

// Concept axis per word; all other vocabulary is "function" space.
const std::vector<std::pair<std::string, std::size_t>> kConceptWords = {
    {"activated", 0},  {"activation", 0}, {"inhibitor", 1}, {"inhibition", 1},
    {"agonist", 2},    {"antagonist", 3}, {"substrate", 4}, {"concentrations", 5},
    {"no", 5},         {"relation", 5}};

const std::vector<std::string> kFunctionWords = {"is", "by", "of", "for", "as", "known", "actions",
                                                 "between", "and", "chemical", "gene"};

}  // namespace

LabelSet synthetic_labelset() {
  return LabelSet({"CPR:3", "CPR:4", "CPR:5", "CPR:6", "CPR:9", "no_relation"},
                  {{"CPR:3", "activation"},
                   {"CPR:4", "inhibition"},
                   {"CPR:5", "agonist"},
                   {"CPR:6", "antagonist"},
                   {"CPR:9", "substrate"},
                   {"no_relation", ""}},
                  "no_relation");
}

std::map<std::string, std::vector<std::string>> synthetic_planted_phrases() {
  return {{"CPR:3", {"is", "activated", "by"}},        {"CPR:4", {"is", "inhibitor", "of"}},
          {"CPR:5", {"agonist", "actions", "of"}},     {"CPR:6", {"known", "as", "antagonist"}},
          {"CPR:9", {"is", "substrate", "for"}},       {"no_relation", {"by", "concentrations", "of"}}};
}

const std::vector<std::vector<std::string>>& synthetic_noise_phrases() {
  static const std::vector<std::vector<std::string>> phrases = {
      {"was", "observed", "in"}, {"effect", "evaluated", "in"}, {"were", "tested", "with"},
      {"levels", "found", "in"}, {"data", "shown", "for"},      {"role", "played", "in"}};
  return phrases;
}

SynthCorpus generate_synthetic(const SynthConfig& cfg) {
  SynthCorpus out{synthetic_labelset(), {}, {}, {}, synthetic_planted_phrases()};
  Rng rng(cfg.seed);
  const auto& labels = out.labelset.labels();
  const auto noisy_per_label =
      static_cast<std::size_t>(std::floor(static_cast<double>(cfg.per_label) * cfg.noise_fraction));

  // Exactly noisy_per_label examples of each label carry a noise phrase.
  std::vector<std::vector<bool>> noisy(labels.size(), std::vector<bool>(cfg.per_label, false));
  for (auto& flags : noisy) {
    std::vector<std::size_t> slots(cfg.per_label);
    for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i;
    rng.partial_shuffle(slots, noisy_per_label);
    for (std::size_t i = 0; i < noisy_per_label && i < slots.size(); ++i) flags[slots[i]] = true;
  }

  auto pick = [&rng](const auto& items) -> const auto& { return items[rng.below(items.size())]; };

  const auto total = cfg.per_label * labels.size();
  for (std::size_t n = 0; n < total; ++n) {
    const auto r = n % labels.size();
    const auto j = n / labels.size();
    const auto& label = labels[r];
    const auto& phrase = noisy[r][j] ? pick(synthetic_noise_phrases()) : out.planted.at(label);

    // Spine in surface order.
    std::vector<std::string> spine;
    const auto prefix = 1 + rng.below(2);
    for (std::size_t i = 0; i < prefix; ++i) spine.push_back(pick(kFillers));
    const auto e1_begin = spine.size();
    for (const auto& w : pick(kChemicals)) spine.push_back(w);
    const auto e1_end = spine.size();
    for (const auto& w : phrase) spine.push_back(w);
    const auto e2_begin = spine.size();
    for (const auto& w : pick(kGenes)) spine.push_back(w);
    const auto e2_end = spine.size();
    const auto suffix = rng.below(3);
    for (std::size_t i = 0; i < suffix; ++i) spine.push_back(pick(kFillers));

    const auto root = static_cast<std::size_t>(rng.below(spine.size()));

    // Nodes: spine nodes first (ids 0..S-1), then leaves. `after[p]` lists
    // leaves placed between spine positions p and p+1.
    struct Node {
      std::string text;
      std::size_t head;  // node id; == self for root
      bool punct = false;
      std::string deprel;
    };
    std::vector<Node> nodes;
    for (std::size_t i = 0; i < spine.size(); ++i) {
      const auto head = i < root ? i + 1 : (i > root ? i - 1 : i);
      nodes.push_back({spine[i], head, false, i == root ? "root" : "dep"});
    }
    std::vector<std::vector<std::size_t>> after(spine.size());
    const auto leaves = rng.below(4);
    for (std::size_t l = 0; l < leaves; ++l) {
      std::size_t gap = 0;
      for (;;) {
        gap = static_cast<std::size_t>(rng.below(spine.size() - 1));
        const bool inside_e1 = gap >= e1_begin && gap + 1 < e1_end;
        const bool inside_e2 = gap >= e2_begin && gap + 1 < e2_end;
        if (!inside_e1 && !inside_e2) break;
      }
      const auto head = static_cast<std::size_t>(rng.below(nodes.size()));
      after[gap].push_back(nodes.size());
      nodes.push_back({pick(kFillers), head, false, "dep"});
    }
    const auto period = nodes.size();
    nodes.push_back({".", root, true, "punct"});

    // Surface order and the node -> token index map.
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < spine.size(); ++i) {
      order.push_back(i);
      for (auto leaf : after[i]) order.push_back(leaf);
    }
    order.push_back(period);
    std::vector<std::size_t> position(nodes.size());
    for (std::size_t p = 0; p < order.size(); ++p) position[order[p]] = p;

    AnnotatedExample ex;
    char id[64];
    std::snprintf(id, sizeof id, "%s-%04zu", cfg.id_prefix.c_str(), n + 1);
    ex.id = id;
    ex.label = label;
    for (std::size_t p = 0; p < order.size(); ++p) {
      const auto& node = nodes[order[p]];
      const bool is_root = node.head == order[p];
      ex.tokens.push_back(Token{p, node.text, is_root ? kRootHead : static_cast<std::int32_t>(position[node.head]),
                                node.deprel, node.punct});
    }
    ex.e1 = EntitySpan{position[e1_begin], position[e1_end - 1] + 1, {}, EntityRole::E1};
    ex.e2 = EntitySpan{position[e2_begin], position[e2_end - 1] + 1, {}, EntityRole::E2};
    ex.e1.text = span_text(ex.tokens, ex.e1.start, ex.e1.end);
    ex.e2.text = span_text(ex.tokens, ex.e2.start, ex.e2.end);

    out.sentences.push_back({ex.id + "-s", ex.tokens});
    out.relations.push_back({ex.id, ex.id + "-s", ex.e1.start, ex.e1.end, ex.e2.start, ex.e2.end, ex.label});
    out.examples.push_back(std::move(ex));
  }
  return out;
}

std::string synthetic_vectors(std::uint64_t seed) {
  Rng rng(seed);
  auto noise = [&rng](double scale) { return (2.0 * rng.unit() - 1.0) * scale; };

  std::set<std::string> function_vocab(kFunctionWords.begin(), kFunctionWords.end());
  function_vocab.insert(kFillers.begin(), kFillers.end());
  for (const auto& p : synthetic_noise_phrases()) function_vocab.insert(p.begin(), p.end());
  for (const auto& group : {kChemicals, kGenes}) {
    for (const auto& entity : group) function_vocab.insert(entity.begin(), entity.end());
  }
  for (const auto& [word, _] : kConceptWords) function_vocab.erase(word);

  std::string out;
  char buf[32];
  auto emit = [&](const std::string& word, const std::vector<double>& v) {
    out += word;
    for (auto x : v) {
      std::snprintf(buf, sizeof buf, " %.6f", x);
      out += buf;
    }
    out += '\n';
  };

  for (const auto& [word, axis] : kConceptWords) {
    std::vector<double> v(kDim);
    for (auto& x : v) x = noise(0.05);
    v[axis] += 1.0;
    emit(word, v);
  }
  for (const auto& word : function_vocab) {
    std::vector<double> v(kDim);
    double norm = 0.0;
    for (std::size_t i = kConceptDims; i < kDim; ++i) {
      v[i] = noise(1.0);
      norm += v[i] * v[i];
    }
    norm = std::sqrt(norm);
    for (std::size_t i = kConceptDims; i < kDim; ++i) v[i] *= 0.5 / norm;
    for (std::size_t i = 0; i < kConceptDims; ++i) v[i] = noise(0.02);
    emit(word, v);
  }
  return out;
}

std::filesystem::path write_synthetic_bundle(const SynthBundleOptions& o) {
  const std::filesystem::path dir = o.out;
  write_atomic(dir / "labelset.toml", synthetic_labelset().to_toml());
  write_atomic(dir / "vectors.txt", synthetic_vectors());

  const std::pair<const char*, std::uint64_t> splits[] = {{"train", o.seed}, {"test", o.seed + 1000}};
  for (const auto& [name, seed] : splits) {
    const auto corpus = generate_synthetic({o.per_label, o.noise, seed, std::string("synth-") + name});
    std::ostringstream conllu, standoff, jsonl;
    write_conllu(conllu, corpus.sentences);
    write_standoff(standoff, corpus.relations);
    write_corpus(jsonl, CorpusSplit{parse_split_name(name), corpus.examples});
    write_atomic(dir / (std::string(name) + ".conllu"), conllu.str());
    write_atomic(dir / (std::string(name) + ".standoff.tsv"), standoff.str());
    write_atomic(dir / (std::string(name) + ".jsonl"), jsonl.str());
  }
  const auto config = dir / "vforge.toml";
  write_atomic(config,
               "out_dir = \"out\"\n"
               "labelset = \"labelset.toml\"\n"
               "vectors = \"vectors.txt\"\n\n"
               "[splits.train]\nconllu = \"train.conllu\"\nstandoff = \"train.standoff.tsv\"\n\n"
               "[splits.test]\nconllu = \"test.conllu\"\nstandoff = \"test.standoff.tsv\"\n\n"
               "[rank]\nmethod = \"combined\"\nseed = 0\ntop_k = 3\n\n"
               "[fewshot]\nk = 4\nseeds = [0, 1, 2, 3, 4]\n\n"
               "[score]\nsplit = \"test\"\n");
  return config;
}

}  // namespace vforge
