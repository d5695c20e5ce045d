#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "vforge/corpus.hpp"

namespace vforge {

struct FewShotConfig {
  std::size_t k = 8;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};

  void validate() const;
};

struct FewShotSplit {
  std::uint64_t seed = 0;
  std::vector<std::string> train_ids;
  std::vector<std::string> val_ids;

  bool operator==(const FewShotSplit&) const = default;
};

/// One split per seed. Draw order, which is part of the reproducibility
/// contract:
///   rng = Rng(seed)
///   for each label in LabelSet order, over that label's ids in corpus order:
///     pool >= k: partial Fisher-Yates, take the first k
///     pool <  k: every id once, then (k - pool) draws with replacement
///   for each label in LabelSet order, over ids not drawn for training:
///     partial Fisher-Yates, take min(k, remaining)
/// Throws EmptyRelationPool if a label has no example.
std::vector<FewShotSplit> draw_fewshot(const CorpusSplit& split, const LabelSet& labelset,
                                       const FewShotConfig& cfg);

std::string to_json(const FewShotSplit& split);
FewShotSplit fewshot_from_json(const std::string& text);

}  // namespace vforge
