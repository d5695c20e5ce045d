#include "vforge/pipeline.hpp"

#include <chrono>
#include <ctime>
#include <map>
#include <memory>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>
#include <toml++/toml.hpp>

#include "vforge/conllu.hpp"
#include "vforge/corpus.hpp"
#include "vforge/errors.hpp"
#include "vforge/io.hpp"
#include "vforge/path_miner.hpp"
#include "vforge/scoring.hpp"

namespace vforge {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr std::string_view kSplitOrder[] = {"train", "val", "test"};

fs::path resolve(const fs::path& base, const std::string& value) {
  fs::path p(value);
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

std::optional<fs::path> optional_path(const toml::node_view<const toml::node>& node, const fs::path& base) {
  if (auto v = node.value<std::string>()) return resolve(base, *v);
  return std::nullopt;
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Collects inputs and outputs of one stage and writes its manifest.
class StageRun {
 public:
  StageRun(Stage stage, const PipelineConfig& cfg) : stage_(stage), cfg_(cfg), dir_(cfg.out_dir / to_string(stage)) {}

  const fs::path& dir() const { return dir_; }

  /// Records an input; throws MissingArtifact if it is absent.
  fs::path input(const fs::path& path) {
    if (!fs::exists(path)) throw MissingArtifact(path.string());
    inputs_[path.string()] = sha256_file(path);
    return path;
  }

  void output(const fs::path& path, std::string_view content) {
    write_atomic(path, content);
    outputs_[fs::relative(path, cfg_.out_dir).generic_string()] = sha256_hex(content);
    result_.artifacts.push_back(path);
  }

  StageResult finish(std::string summary) {
    json manifest = {{"stage", to_string(stage_)},
                     {"tool_version", std::string(kToolVersion)},
                     {"config_hash", sha256_hex(cfg_.to_toml())},
                     {"inputs", inputs_},
                     {"outputs", outputs_},
                     {"created_at", timestamp_utc()}};
    write_atomic(dir_ / "manifest.json", manifest.dump(2) + "\n");
    result_.summary = std::move(summary);
    return std::move(result_);
  }

 private:
  Stage stage_;
  const PipelineConfig& cfg_;
  fs::path dir_;
  std::map<std::string, std::string> inputs_;
  std::map<std::string, std::string> outputs_;
  StageResult result_;
};

LabelSet load_labelset(StageRun& run, const PipelineConfig& cfg) {
  if (cfg.labelset.empty()) throw InvalidConfig("no label set configured");
  return LabelSet::load(run.input(cfg.labelset));
}

CorpusSplit load_ingested(StageRun& run, const PipelineConfig& cfg, const LabelSet& labelset, std::string_view split) {
  const auto path = cfg.out_dir / "ingest" / (std::string(split) + ".jsonl");
  std::istringstream in(read_file(run.input(path)));
  return load_corpus(in, labelset, {parse_split_name(split), false, nullptr});
}

std::vector<std::string> ingested_splits(const PipelineConfig& cfg) {
  std::vector<std::string> out;
  for (auto name : kSplitOrder) {
    if (fs::exists(cfg.out_dir / "ingest" / (std::string(name) + ".jsonl"))) out.emplace_back(name);
  }
  return out;
}

std::unique_ptr<EmbeddingProvider> make_provider(StageRun& run, const PipelineConfig& cfg) {
  if (cfg.embedding_url) return std::make_unique<HttpEmbeddingProvider>(*cfg.embedding_url);
  if (!cfg.vectors) throw InvalidConfig("this stage needs 'vectors' or 'embedding_url'");
  return std::make_unique<StaticVectorProvider>(StaticVectorProvider::load(run.input(*cfg.vectors)));
}

StageResult run_convert(const PipelineConfig& cfg) {
  StageRun run(Stage::Convert, cfg);
  const auto labelset = load_labelset(run, cfg);
  std::ostringstream summary;
  bool any = false;
  for (const auto& src : cfg.splits) {
    if (!src.conllu || !src.standoff) continue;
    any = true;
    std::istringstream conllu(read_file(run.input(*src.conllu)));
    std::istringstream standoff(read_file(run.input(*src.standoff)));
    auto examples = convert(read_conllu(conllu), read_standoff(standoff), labelset);
    std::ostringstream out;
    write_corpus(out, CorpusSplit{parse_split_name(src.split), std::move(examples)});
    run.output(run.dir() / (src.split + ".jsonl"), out.str());
    summary << src.split << ": converted\n";
  }
  if (!any) throw InvalidConfig("convert needs a split with both 'conllu' and 'standoff'");
  return run.finish(summary.str());
}

StageResult run_ingest(const PipelineConfig& cfg) {
  StageRun run(Stage::Ingest, cfg);
  const auto labelset = load_labelset(run, cfg);
  std::ostringstream summary;
  std::vector<RejectedRecord> rejected;
  for (auto name : kSplitOrder) {
    std::optional<fs::path> source;
    for (const auto& src : cfg.splits) {
      if (src.split == name && src.jsonl) source = src.jsonl;
    }
    const auto converted = cfg.out_dir / "convert" / (std::string(name) + ".jsonl");
    if (!source && fs::exists(converted)) source = converted;
    if (!source) {
      if (name == "train") throw MissingArtifact(converted.string());
      continue;
    }
    std::istringstream in(read_file(run.input(*source)));
    std::vector<RejectedRecord> dropped;
    auto split = load_corpus(in, labelset, {parse_split_name(name), cfg.lenient, &dropped});
    for (auto& d : dropped) d.reason = std::string(name) + ": " + d.reason;
    rejected.insert(rejected.end(), dropped.begin(), dropped.end());

    std::ostringstream out;
    write_corpus(out, split);
    run.output(run.dir() / (std::string(name) + ".jsonl"), out.str());

    json hist = json::object();
    for (const auto& [label, count] : label_histogram(split, labelset)) hist[label] = count;
    run.output(run.dir() / (std::string(name) + ".histogram.json"), hist.dump(2) + "\n");
    summary << name << ": " << split.examples.size() << " examples " << hist.dump() << "\n";
  }
  if (cfg.lenient) {
    std::ostringstream out;
    for (const auto& r : rejected) out << json{{"line", r.line}, {"kind", r.kind}, {"reason", r.reason}}.dump() << '\n';
    run.output(run.dir() / "rejected.jsonl", out.str());
    summary << rejected.size() << " records rejected\n";
  }
  return run.finish(summary.str());
}

StageResult run_mine(const PipelineConfig& cfg) {
  StageRun run(Stage::Mine, cfg);
  const auto labelset = load_labelset(run, cfg);
  const auto train = load_ingested(run, cfg, labelset, "train");
  const auto mined = mine_split(train, cfg.workers);
  std::ostringstream out;
  write_candidates(out, mined);
  run.output(run.dir() / "train.candidates.jsonl", out.str());
  return run.finish(std::to_string(mined.size()) + " phrases mined from " + std::to_string(train.examples.size()) +
                    " training examples\n");
}

StageResult run_rank(const PipelineConfig& cfg) {
  StageRun run(Stage::Rank, cfg);
  const auto labelset = load_labelset(run, cfg);
  std::istringstream in(read_file(run.input(cfg.out_dir / "mine" / "train.candidates.jsonl")));
  const auto candidates = read_candidates(in);
  const auto stats = collect_stats(candidates, labelset, cfg.templ.mask_count, cfg.workers);

  std::unique_ptr<EmbeddingProvider> provider;
  if (needs_embeddings(cfg.method)) provider = make_provider(run, cfg);
  auto set = select_verbalizers(stats, labelset, cfg.method, cfg.rank_seed, provider.get());
  set.mask_count = cfg.templ.mask_count;
  run.output(run.dir() / "verbalizers.toml", set.to_toml());

  const auto top = rank_top_k(stats, labelset, cfg.method, cfg.rank_seed, provider.get(), cfg.top_k);
  std::ostringstream topk;
  std::ostringstream summary;
  for (const auto& per_label : top) {
    for (std::size_t i = 0; i < per_label.size(); ++i) {
      const auto& v = per_label[i];
      const auto& s = stats.at(v.phrase());
      topk << json{{"label", v.label},
                   {"rank", i + 1},
                   {"words", v.words},
                   {"score", v.score},
                   {"n_c", s.count(v.label)},
                   {"n_r", s.label_presence_count}}
                  .dump()
           << '\n';
    }
  }
  for (const auto& v : set.entries) summary << v.label << "\t" << v.phrase() << "\t" << v.score << "\n";
  run.output(run.dir() / "topk.jsonl", topk.str());
  return run.finish(summary.str());
}

StageResult run_emit(const PipelineConfig& cfg) {
  StageRun run(Stage::Emit, cfg);
  const auto labelset = load_labelset(run, cfg);
  const auto verbalizer_path = run.input(cfg.out_dir / "rank" / "verbalizers.toml");
  const auto verbalizer_text = read_file(verbalizer_path);
  const auto verbalizers = VerbalizerSet::parse(verbalizer_text);
  if (verbalizers.mask_count != cfg.templ.mask_count) {
    throw InvalidConfig("verbalizers have " + std::to_string(verbalizers.mask_count) + " words but the template has " +
                        std::to_string(cfg.templ.mask_count) + " masks");
  }
  std::ostringstream summary;
  auto splits = ingested_splits(cfg);
  if (splits.empty()) throw MissingArtifact((cfg.out_dir / "ingest" / "train.jsonl").string());
  for (const auto& name : splits) {
    const auto split = load_ingested(run, cfg, labelset, name);
    std::ostringstream out;
    for (const auto& ex : split.examples) {
      const auto prompt = render_prompt(ex, cfg.templ);
      out << json{{"example_id", ex.id},
                  {"baseline", render_baseline(ex, cfg.templ)},
                  {"prompt", prompt.text},
                  {"gold_label", ex.label},
                  {"gold_filled", render_filled(ex, verbalizers.at(ex.label).words, cfg.templ)}}
                 .dump()
          << '\n';
    }
    run.output(run.dir() / (name + ".prompts.jsonl"), out.str());
    summary << name << ": " << split.examples.size() << " prompts\n";
  }
  run.output(run.dir() / "verbalizers.toml", verbalizer_text);
  toml::table templ{{"mask_literal", cfg.templ.mask_literal},
                    {"mask_count", static_cast<std::int64_t>(cfg.templ.mask_count)},
                    {"e1_open", cfg.templ.e1_open},
                    {"e1_close", cfg.templ.e1_close},
                    {"e2_open", cfg.templ.e2_open},
                    {"e2_close", cfg.templ.e2_close},
                    {"similarity", "cosine"},
                    {"mask_aggregation", "mean"}};
  std::ostringstream templ_text;
  templ_text << templ << "\n";
  run.output(run.dir() / "template.toml", templ_text.str());
  return run.finish(summary.str());
}

StageResult run_fewshot(const PipelineConfig& cfg) {
  StageRun run(Stage::Fewshot, cfg);
  const auto labelset = load_labelset(run, cfg);
  const auto train = load_ingested(run, cfg, labelset, "train");
  const auto dir = cfg.fewshot_out.value_or(run.dir());
  std::ostringstream summary;
  for (const auto& split : draw_fewshot(train, labelset, cfg.fewshot)) {
    const auto path = dir / ("seed_" + std::to_string(split.seed) + ".json");
    run.output(path, to_json(split) + "\n");
    summary << "seed " << split.seed << ": " << split.train_ids.size() << " train, " << split.val_ids.size()
            << " val\n";
  }
  return run.finish(summary.str());
}

fs::path harness_dir(const PipelineConfig& cfg) { return cfg.out_dir / "harness"; }

StageResult run_score(const PipelineConfig& cfg) {
  StageRun run(Stage::Score, cfg);
  const auto labelset = load_labelset(run, cfg);
  const auto vectors_path =
      cfg.mask_vectors.value_or(harness_dir(cfg) / (cfg.score_split + ".mask_vectors.jsonl"));
  const auto emb_path = cfg.label_embeddings.value_or(harness_dir(cfg) / "label_embeddings.jsonl");
  std::istringstream vin(read_file(run.input(vectors_path)));
  std::istringstream ein(read_file(run.input(emb_path)));
  const auto records = read_mask_vectors(vin);
  const auto emb = read_label_embeddings(ein, labelset);

  std::vector<ScoreMatrix> scores;
  scores.reserve(records.size());
  for (const auto& rec : records) scores.push_back(score_example(rec, emb, labelset));
  std::ostringstream out;
  write_predictions(out, scores, labelset);
  run.output(run.dir() / (cfg.score_split + ".predictions.jsonl"), out.str());
  return run.finish(std::to_string(scores.size()) + " examples scored\n");
}

StageResult run_eval(const PipelineConfig& cfg) {
  StageRun run(Stage::Eval, cfg);
  const auto labelset = load_labelset(run, cfg);
  const auto split = load_ingested(run, cfg, labelset, cfg.score_split);
  const auto pred_path =
      cfg.predictions.value_or(cfg.out_dir / "score" / (cfg.score_split + ".predictions.jsonl"));
  std::istringstream in(read_file(run.input(pred_path)));
  const auto predicted = read_predictions(in);
  std::map<std::string, std::string> gold;
  for (const auto& ex : split.examples) gold[ex.id] = ex.label;
  const auto report = evaluate(predicted, gold, labelset);
  run.output(run.dir() / (cfg.score_split + ".report.json"), report.to_json() + "\n");
  return run.finish(report.to_table());
}

StageResult run_mock_harness(const PipelineConfig& cfg) {
  StageRun run(Stage::MockHarness, cfg);
  const auto labelset = load_labelset(run, cfg);
  if (!cfg.vectors) throw InvalidConfig("mock-harness needs static 'vectors'");
  const auto provider = StaticVectorProvider::load(run.input(*cfg.vectors));
  const auto verbalizers = VerbalizerSet::load(run.input(cfg.out_dir / "rank" / "verbalizers.toml"));

  std::map<std::string, Matrix> per_label;
  for (const auto& label : labelset.labels()) {
    Matrix m;
    for (const auto& word : verbalizers.at(label).words) {
      const auto* v = provider.lookup(word);
      m.push_back(v != nullptr ? *v : std::vector<double>(provider.dim(), 0.0));
    }
    per_label[label] = std::move(m);
  }
  const LabelWordEmbeddings emb(labelset, per_label);
  std::ostringstream eout;
  write_label_embeddings(eout, emb, labelset);
  run.output(harness_dir(cfg) / "label_embeddings.jsonl", eout.str());

  const auto split = load_ingested(run, cfg, labelset, cfg.score_split);
  std::vector<MaskVectorRecord> records;
  for (const auto& ex : split.examples) records.push_back({ex.id, emb.at(ex.label)});
  std::ostringstream vout;
  write_mask_vectors(vout, records);
  run.output(harness_dir(cfg) / (cfg.score_split + ".mask_vectors.jsonl"), vout.str());
  return run.finish(std::to_string(records.size()) + " gold mask-vector records\n");
}

}  // namespace

std::string to_string(Stage stage) {
  switch (stage) {
    case Stage::Convert: return "convert";
    case Stage::Ingest: return "ingest";
    case Stage::Mine: return "mine";
    case Stage::Rank: return "rank";
    case Stage::Emit: return "emit";
    case Stage::Fewshot: return "fewshot";
    case Stage::Score: return "score";
    case Stage::Eval: return "eval";
    case Stage::MockHarness: return "mock-harness";
  }
  return "convert";
}

Stage parse_stage(std::string_view name) {
  for (auto s : {Stage::Convert, Stage::Ingest, Stage::Mine, Stage::Rank, Stage::Emit, Stage::Fewshot, Stage::Score,
                 Stage::Eval, Stage::MockHarness}) {
    if (to_string(s) == name) return s;
  }
  throw InvalidConfig("unknown stage '" + std::string(name) + "'");
}

SplitSource* PipelineConfig::find_split(std::string_view name) {
  for (auto& s : splits) {
    if (s.split == name) return &s;
  }
  return nullptr;
}

PipelineConfig PipelineConfig::parse(std::string_view toml_text, const fs::path& base) {
  toml::table doc;
  try {
    doc = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    throw InvalidConfig(std::string("config is not valid TOML: ") + std::string(e.description()));
  }
  const toml::table& root = doc;
  PipelineConfig cfg;
  cfg.out_dir = resolve(base, root["out_dir"].value_or(std::string("out")));
  if (auto v = root["labelset"].value<std::string>()) cfg.labelset = resolve(base, *v);
  cfg.vectors = optional_path(root["vectors"], base);
  if (auto v = root["embedding_url"].value<std::string>()) cfg.embedding_url = *v;
  cfg.lenient = root["lenient"].value_or(false);
  cfg.workers = static_cast<std::size_t>(std::max<std::int64_t>(1, root["workers"].value_or(std::int64_t{1})));

  if (const auto* splits = root["splits"].as_table()) {
    for (auto name : kSplitOrder) {
      const auto node = (*splits)[name];
      if (!node.is_table()) continue;
      SplitSource src{std::string(name), optional_path(node["jsonl"], base), optional_path(node["conllu"], base),
                      optional_path(node["standoff"], base)};
      cfg.splits.push_back(std::move(src));
    }
    for (const auto& [key, _] : *splits) {
      parse_split_name(key.str());
    }
  }

  const auto templ = root["template"];
  cfg.templ.mask_literal = templ["mask_literal"].value_or(cfg.templ.mask_literal);
  const auto mask_count = templ["mask_count"].value_or(std::int64_t{3});
  if (mask_count < 1) throw InvalidConfig("template.mask_count must be at least 1");
  cfg.templ.mask_count = static_cast<std::size_t>(mask_count);
  cfg.templ.e1_open = templ["e1_open"].value_or(cfg.templ.e1_open);
  cfg.templ.e1_close = templ["e1_close"].value_or(cfg.templ.e1_close);
  cfg.templ.e2_open = templ["e2_open"].value_or(cfg.templ.e2_open);
  cfg.templ.e2_close = templ["e2_close"].value_or(cfg.templ.e2_close);
  cfg.templ.validate();

  const auto rank = root["rank"];
  if (auto m = rank["method"].value<std::string>()) cfg.method = parse_ranking_method(*m);
  cfg.rank_seed = static_cast<std::uint64_t>(rank["seed"].value_or(std::int64_t{0}));
  cfg.top_k = static_cast<std::size_t>(std::max<std::int64_t>(1, rank["top_k"].value_or(std::int64_t{5})));

  const auto few = root["fewshot"];
  const auto k = few["k"].value_or(std::int64_t{8});
  if (k < 1) throw InvalidConfig("fewshot.k must be at least 1");
  cfg.fewshot.k = static_cast<std::size_t>(k);
  if (const auto* seeds = few["seeds"].as_array()) {
    cfg.fewshot.seeds.clear();
    for (const auto& s : *seeds) cfg.fewshot.seeds.push_back(static_cast<std::uint64_t>(s.value_or(std::int64_t{0})));
  }
  cfg.fewshot_out = optional_path(few["out"], base);
  cfg.fewshot.validate();

  const auto score = root["score"];
  cfg.score_split = score["split"].value_or(std::string("test"));
  parse_split_name(cfg.score_split);
  cfg.mask_vectors = optional_path(score["mask_vectors"], base);
  cfg.label_embeddings = optional_path(score["label_embeddings"], base);
  cfg.predictions = optional_path(score["predictions"], base);
  return cfg;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  return parse(read_file(path), fs::absolute(path).parent_path());
}

std::string PipelineConfig::to_toml() const {
  toml::table doc{{"out_dir", out_dir.string()}, {"labelset", labelset.string()}, {"lenient", lenient},
                  {"workers", static_cast<std::int64_t>(workers)}};
  if (vectors) doc.insert("vectors", vectors->string());
  if (embedding_url) doc.insert("embedding_url", *embedding_url);
  toml::table split_table;
  for (const auto& s : splits) {
    toml::table t;
    if (s.jsonl) t.insert("jsonl", s.jsonl->string());
    if (s.conllu) t.insert("conllu", s.conllu->string());
    if (s.standoff) t.insert("standoff", s.standoff->string());
    split_table.insert(s.split, std::move(t));
  }
  doc.insert("splits", std::move(split_table));
  doc.insert("template", toml::table{{"mask_literal", templ.mask_literal},
                                     {"mask_count", static_cast<std::int64_t>(templ.mask_count)},
                                     {"e1_open", templ.e1_open},
                                     {"e1_close", templ.e1_close},
                                     {"e2_open", templ.e2_open},
                                     {"e2_close", templ.e2_close}});
  doc.insert("rank", toml::table{{"method", to_string(method)},
                                 {"seed", static_cast<std::int64_t>(rank_seed)},
                                 {"top_k", static_cast<std::int64_t>(top_k)}});
  toml::array seeds;
  for (auto s : fewshot.seeds) seeds.push_back(static_cast<std::int64_t>(s));
  toml::table few{{"k", static_cast<std::int64_t>(fewshot.k)}, {"seeds", std::move(seeds)}};
  if (fewshot_out) few.insert("out", fewshot_out->string());
  doc.insert("fewshot", std::move(few));
  toml::table score{{"split", score_split}};
  if (mask_vectors) score.insert("mask_vectors", mask_vectors->string());
  if (label_embeddings) score.insert("label_embeddings", label_embeddings->string());
  if (predictions) score.insert("predictions", predictions->string());
  doc.insert("score", std::move(score));
  std::ostringstream out;
  out << doc << "\n";
  return out.str();
}

StageResult run_stage(Stage stage, const PipelineConfig& cfg) {
  spdlog::debug("stage {} -> {}", to_string(stage), (cfg.out_dir / to_string(stage)).string());
  switch (stage) {
    case Stage::Convert: return run_convert(cfg);
    case Stage::Ingest: return run_ingest(cfg);
    case Stage::Mine: return run_mine(cfg);
    case Stage::Rank: return run_rank(cfg);
    case Stage::Emit: return run_emit(cfg);
    case Stage::Fewshot: return run_fewshot(cfg);
    case Stage::Score: return run_score(cfg);
    case Stage::Eval: return run_eval(cfg);
    case Stage::MockHarness: return run_mock_harness(cfg);
  }
  throw InvalidConfig("unknown stage");
}

}  // namespace vforge
