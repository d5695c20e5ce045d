// vforge: command-line driver for the verbalizer pipeline.
//
//   vforge <stage> --config cfg.toml [stage flags]
//
// Exit codes: 0 ok, 1 usage/config, 2 data error, 3 internal error. Failures
// print one JSON object on stderr: {"error", "message", "stage", "exit_code"}.
// Log verbosity comes from VFORGE_LOG (trace, debug, info, warn, error, off).

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "vforge/errors.hpp"
#include "vforge/pipeline.hpp"
#include "vforge/synth.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kDataError = 2;
constexpr int kInternal = 3;

int report_error(const std::string& kind, const std::string& message, const std::string& stage, int code) {
  nlohmann::json err = {{"error", kind}, {"message", message}, {"stage", stage}, {"exit_code", code}};
  std::cerr << err.dump() << std::endl;
  return code;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("vforge");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* level = std::getenv("VFORGE_LOG");
  spdlog::set_level(level != nullptr ? spdlog::level::from_str(level) : spdlog::level::warn);
}

struct Overrides {
  std::string config;
  // convert
  std::string split, conllu, standoff;
  // ingest
  bool lenient = false;
  // rank
  std::string method, vectors;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> mask_count, top_k;
  // fewshot
  std::optional<std::size_t> k;
  std::vector<std::uint64_t> seeds;
  std::string out;
  // score / eval
  std::string mask_vectors, label_embeddings, predictions;
};

vforge::PipelineConfig build_config(const Overrides& o) {
  auto cfg = vforge::PipelineConfig::load(o.config);
  if (o.lenient) cfg.lenient = true;
  if (!o.conllu.empty() || !o.standoff.empty()) {
    const auto name = o.split.empty() ? std::string("train") : o.split;
    vforge::parse_split_name(name);
    auto* src = cfg.find_split(name);
    if (src == nullptr) {
      cfg.splits.push_back({name, {}, {}, {}});
      src = &cfg.splits.back();
    }
    if (!o.conllu.empty()) src->conllu = fs::absolute(o.conllu);
    if (!o.standoff.empty()) src->standoff = fs::absolute(o.standoff);
  } else if (!o.split.empty()) {
    vforge::parse_split_name(o.split);
    cfg.score_split = o.split;
  }
  if (!o.method.empty()) cfg.method = vforge::parse_ranking_method(o.method);
  if (!o.vectors.empty()) cfg.vectors = fs::absolute(o.vectors);
  if (o.seed) cfg.rank_seed = *o.seed;
  if (o.mask_count) cfg.templ.mask_count = *o.mask_count;
  if (o.top_k) cfg.top_k = *o.top_k;
  if (o.k) cfg.fewshot.k = *o.k;
  if (!o.seeds.empty()) cfg.fewshot.seeds = o.seeds;
  if (!o.out.empty()) cfg.fewshot_out = fs::absolute(o.out);
  if (!o.mask_vectors.empty()) cfg.mask_vectors = fs::absolute(o.mask_vectors);
  if (!o.label_embeddings.empty()) cfg.label_embeddings = fs::absolute(o.label_embeddings);
  if (!o.predictions.empty()) cfg.predictions = fs::absolute(o.predictions);
  cfg.templ.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"vforge: mine, rank and evaluate prompt verbalizers for relation extraction"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(vforge::kToolVersion));

  Overrides o;
  auto stage_command = [&](const std::string& name, const std::string& help) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("--config", o.config, "pipeline config (TOML)")->required()->check(CLI::ExistingFile);
    return cmd;
  };

  auto* convert = stage_command("convert", "CoNLL-U + standoff relations -> canonical JSONL");
  convert->add_option("--split", o.split, "split the --conllu/--standoff pair belongs to");
  convert->add_option("--conllu", o.conllu, "CoNLL-U file");
  convert->add_option("--standoff", o.standoff, "standoff relation TSV");

  auto* ingest = stage_command("ingest", "validate corpus splits and write label histograms");
  ingest->add_flag("--lenient", o.lenient, "drop and log invalid records instead of failing");

  stage_command("mine", "mine candidate phrases from dependency paths of the training split");

  auto* rank = stage_command("rank", "score candidates and choose one verbalizer per relation");
  rank->add_option("--method", o.method, "ranking score")
      ->check(CLI::IsMember({"frequency", "freq-spec", "similarity", "combined", "random"}));
  rank->add_option("--seed", o.seed, "seed for random pick");
  rank->add_option("--mask-count", o.mask_count, "label words per verbalizer")->check(CLI::PositiveNumber);
  rank->add_option("--vectors", o.vectors, "static word vectors")->check(CLI::ExistingFile);
  rank->add_option("--top-k", o.top_k, "candidates per relation written for inspection")->check(CLI::PositiveNumber);

  auto* emit = stage_command("emit", "render baseline and prompt inputs");
  emit->add_option("--mask-count", o.mask_count, "masks in the template")->check(CLI::PositiveNumber);

  auto* fewshot = stage_command("fewshot", "draw k-per-relation few-shot splits");
  fewshot->add_option("--k", o.k, "examples per relation")->check(CLI::PositiveNumber);
  fewshot->add_option("--seeds", o.seeds, "comma-separated seeds")->delimiter(',');
  fewshot->add_option("--out", o.out, "output directory");

  auto* score = stage_command("score", "predict relations from mask vectors");
  score->add_option("--split", o.split, "split being scored");
  score->add_option("--mask-vectors", o.mask_vectors, "mask-vector JSONL")->check(CLI::ExistingFile);
  score->add_option("--label-embeddings", o.label_embeddings, "label-word embedding JSONL")
      ->check(CLI::ExistingFile);

  auto* eval = stage_command("eval", "micro/macro F1 of predictions against gold labels");
  eval->add_option("--split", o.split, "split being evaluated");
  eval->add_option("--predictions", o.predictions, "prediction JSONL")->check(CLI::ExistingFile);

  auto* mock = stage_command("mock-harness",
                             "stand-in for the trainer: label-word embeddings from static vectors and "
                             "gold mask vectors for the score split");
  mock->add_option("--split", o.split, "split to write mask vectors for");

  vforge::SynthBundleOptions synth_options;
  auto* synth = app.add_subcommand("synth", "write the synthetic six-relation corpus and a matching config");
  synth->add_option("--out", synth_options.out, "output directory");
  synth->add_option("--per-label", synth_options.per_label, "examples per relation and split")
      ->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_options.seed, "generator seed (test split uses seed + 1000)");
  synth->add_option("--noise", synth_options.noise, "fraction of examples with a noise phrase")
      ->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  auto* chosen = app.get_subcommands().front();
  const auto stage_name = chosen->get_name();
  try {
    if (chosen == synth) {
      vforge::write_synthetic_bundle(synth_options);
      std::cout << "synthetic corpus written to " << synth_options.out << "\n";
      return kOk;
    }
    const auto cfg = build_config(o);
    const auto result = vforge::run_stage(vforge::parse_stage(stage_name), cfg);
    std::cout << result.summary;
    return kOk;
  } catch (const vforge::InvalidConfig& e) {
    return report_error(e.kind(), e.what(), stage_name, kUsage);
  } catch (const vforge::InvalidLabelSet& e) {
    return report_error(e.kind(), e.what(), stage_name, kUsage);
  } catch (const vforge::Error& e) {
    return report_error(e.kind(), e.what(), stage_name, kDataError);
  } catch (const std::exception& e) {
    return report_error("Internal", e.what(), stage_name, kInternal);
  }
}
