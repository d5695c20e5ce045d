#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vforge/fewshot.hpp"
#include "vforge/prompt.hpp"
#include "vforge/ranker.hpp"

namespace vforge {

inline constexpr std::string_view kToolVersion = "0.3.1";

enum class Stage { Convert, Ingest, Mine, Rank, Emit, Fewshot, Score, Eval, MockHarness };

std::string to_string(Stage stage);
Stage parse_stage(std::string_view name);

struct SplitSource {
  std::string split;  // train | val | test
  std::optional<std::filesystem::path> jsonl;
  std::optional<std::filesystem::path> conllu;
  std::optional<std::filesystem::path> standoff;
};

/// Everything a pipeline run reads. Relative paths in the TOML file are
/// resolved against the file's directory.
struct PipelineConfig {
  std::filesystem::path out_dir = "out";
  std::filesystem::path labelset;
  std::optional<std::filesystem::path> vectors;
  std::optional<std::string> embedding_url;
  std::vector<SplitSource> splits;
  bool lenient = false;

  TemplateConfig templ;
  RankingMethod method = RankingMethod::Combined;
  std::uint64_t rank_seed = 0;
  std::size_t top_k = 5;
  std::size_t workers = 1;

  FewShotConfig fewshot{8, {0, 1, 2, 3, 4}};
  std::optional<std::filesystem::path> fewshot_out;

  std::string score_split = "test";
  std::optional<std::filesystem::path> mask_vectors;
  std::optional<std::filesystem::path> label_embeddings;
  std::optional<std::filesystem::path> predictions;

  static PipelineConfig load(const std::filesystem::path& path);
  static PipelineConfig parse(std::string_view toml_text, const std::filesystem::path& base_dir);
  /// Canonical form; its SHA-256 is the manifest's config hash.
  std::string to_toml() const;

  SplitSource* find_split(std::string_view name);
};

struct StageResult {
  std::vector<std::filesystem::path> artifacts;
  std::string summary;  // human-readable, printed by the CLI
};

/// Runs one stage, writing its artifacts (atomically) and
/// `<out_dir>/<stage>/manifest.json`. Stage outputs:
///   convert      convert/<split>.jsonl
///   ingest       ingest/<split>.jsonl, ingest/<split>.histogram.json
///   mine         mine/train.candidates.jsonl
///   rank         rank/verbalizers.toml, rank/topk.jsonl
///   emit         emit/<split>.prompts.jsonl, emit/verbalizers.toml, emit/template.toml
///   fewshot      fewshot/seed_<s>.json (or the configured directory)
///   score        score/<split>.predictions.jsonl
///   eval         eval/<split>.report.json
///   mock-harness harness/label_embeddings.jsonl, harness/<split>.mask_vectors.jsonl
/// Throws MissingArtifact when an upstream artifact is absent.
StageResult run_stage(Stage stage, const PipelineConfig& cfg);

}  // namespace vforge
