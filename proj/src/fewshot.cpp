#include "vforge/fewshot.hpp"

#include <set>

#include <nlohmann/json.hpp>

#include "vforge/errors.hpp"
#include "vforge/random.hpp"

namespace vforge {

void FewShotConfig::validate() const {
  if (k < 1) throw InvalidConfig("few-shot k must be at least 1");
  if (seeds.empty()) throw InvalidConfig("few-shot needs at least one seed");
  std::set<std::uint64_t> distinct(seeds.begin(), seeds.end());
  if (distinct.size() != seeds.size()) throw InvalidConfig("few-shot seeds must be distinct");
}

std::vector<FewShotSplit> draw_fewshot(const CorpusSplit& split, const LabelSet& labelset,
                                       const FewShotConfig& cfg) {
  cfg.validate();
  std::vector<std::vector<std::size_t>> by_label(labelset.size());
  for (std::size_t i = 0; i < split.examples.size(); ++i) {
    auto r = labelset.index_of(split.examples[i].label);
    if (!r) throw UnknownLabel(0, split.examples[i].label);
    by_label[*r].push_back(i);
  }
  for (std::size_t r = 0; r < by_label.size(); ++r) {
    if (by_label[r].empty()) throw EmptyRelationPool(labelset.labels()[r]);
  }

  std::vector<FewShotSplit> out;
  for (auto seed : cfg.seeds) {
    Rng rng(seed);
    FewShotSplit fs{seed, {}, {}};
    std::vector<std::vector<std::size_t>> remaining(by_label.size());

    for (std::size_t r = 0; r < by_label.size(); ++r) {
      auto pool = by_label[r];
      if (pool.size() >= cfg.k) {
        rng.partial_shuffle(pool, cfg.k);
        for (std::size_t i = 0; i < cfg.k; ++i) fs.train_ids.push_back(split.examples[pool[i]].id);
        remaining[r].assign(pool.begin() + static_cast<std::ptrdiff_t>(cfg.k), pool.end());
      } else {
        for (auto i : pool) fs.train_ids.push_back(split.examples[i].id);
        for (auto extra = pool.size(); extra < cfg.k; ++extra) {
          fs.train_ids.push_back(split.examples[pool[rng.below(pool.size())]].id);
        }
      }
    }
    for (auto& pool : remaining) {
      const auto take = std::min(cfg.k, pool.size());
      rng.partial_shuffle(pool, take);
      for (std::size_t i = 0; i < take; ++i) fs.val_ids.push_back(split.examples[pool[i]].id);
    }
    out.push_back(std::move(fs));
  }
  return out;
}

std::string to_json(const FewShotSplit& split) {
  nlohmann::json doc = {{"seed", split.seed}, {"train_ids", split.train_ids}, {"val_ids", split.val_ids}};
  return doc.dump();
}

FewShotSplit fewshot_from_json(const std::string& text) {
  try {
    auto doc = nlohmann::json::parse(text);
    return FewShotSplit{doc.at("seed").get<std::uint64_t>(), doc.at("train_ids").get<std::vector<std::string>>(),
                        doc.at("val_ids").get<std::vector<std::string>>()};
  } catch (const nlohmann::json::exception& e) {
    throw MalformedRecord(1, std::string("bad few-shot split: ") + e.what());
  }
}

}  // namespace vforge
