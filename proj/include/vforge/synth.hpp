#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vforge/conllu.hpp"
#include "vforge/corpus.hpp"

namespace vforge {

/// Generator for a six-relation mini corpus with planted label phrases.
///
/// Every sentence is a random tree built around a spine
///   filler+ e1 w1 w2 w3 e2 filler*
/// whose links form a chain towards a randomly placed root. Extra filler
/// leaves are hung off random nodes and interleaved into the surface order
/// (never outside the spine's first and last token, never inside an entity),
/// and a final "." attaches to the root. Hence the global path is the spine,
/// the local path is the e1..e2 segment, and the mined phrase is exactly
/// w1 w2 w3: the relation's planted phrase, or for a fixed fraction of
/// examples a noise phrase shared across relations.
struct SynthConfig {
  std::size_t per_label = 10;
  double noise_fraction = 0.1;
  std::uint64_t seed = 7;
  std::string id_prefix = "synth";
};

struct SynthCorpus {
  LabelSet labelset;
  std::vector<AnnotatedExample> examples;
  std::vector<ConlluSentence> sentences;
  std::vector<StandoffRelation> relations;
  std::map<std::string, std::vector<std::string>> planted;  // label -> phrase words
};

LabelSet synthetic_labelset();
std::map<std::string, std::vector<std::string>> synthetic_planted_phrases();
const std::vector<std::vector<std::string>>& synthetic_noise_phrases();

SynthCorpus generate_synthetic(const SynthConfig& cfg);

/// Static vectors (dimension 16) for every word the generator can emit.
/// Dimensions 0-5 carry one concept per relation: each planted phrase's
/// content word and its relation's description words point along the same
/// axis. Function, filler and noise words live in dimensions 6-15.
std::string synthetic_vectors(std::uint64_t seed = 11);

struct SynthBundleOptions {
  std::string out = "synthetic";
  std::size_t per_label = 10;
  std::uint64_t seed = 7;
  double noise = 0.1;
};

/// Writes labelset.toml, vectors.txt, {train,test}.{conllu,standoff.tsv,jsonl}
/// and a vforge.toml that runs the whole pipeline on them. The test split uses
/// seed + 1000. Returns the config path.
std::filesystem::path write_synthetic_bundle(const SynthBundleOptions& opts);

}  // namespace vforge
