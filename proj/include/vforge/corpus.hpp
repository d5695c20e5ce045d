#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vforge {

/// Ordered relation inventory. The position of a label in `labels()` is its
/// index everywhere else in the toolkit (score vectors, tie-breaks, output order).
class LabelSet {
 public:
  static constexpr std::string_view kDefaultNegativeDescription =
      "no relation between the chemical and the gene";

  /// Throws InvalidLabelSet if the invariants do not hold. An empty
  /// description on the negative label is replaced by kDefaultNegativeDescription.
  LabelSet(std::vector<std::string> labels, std::map<std::string, std::string> descriptions,
           std::string negative_label);

  /// Reads a TOML document: `negative_label = "..."` plus `[[label]]` tables
  /// carrying `id` and `description`.
  static LabelSet load(const std::filesystem::path& path);
  static LabelSet parse(std::string_view toml_text);
  std::string to_toml() const;

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& negative_label() const noexcept { return negative_; }
  const std::string& description(const std::string& label) const;
  std::size_t size() const noexcept { return labels_.size(); }
  bool contains(const std::string& label) const;
  std::optional<std::size_t> index_of(const std::string& label) const;

  bool operator==(const LabelSet&) const = default;

 private:
  std::vector<std::string> labels_;
  std::map<std::string, std::string> descriptions_;
  std::string negative_;
};

inline constexpr std::int32_t kRootHead = -1;

struct Token {
  std::size_t index = 0;
  std::string text;
  std::int32_t head = kRootHead;
  std::string deprel;
  bool is_punct = false;

  bool is_root() const noexcept { return head == kRootHead; }
  bool operator==(const Token&) const = default;
};

enum class EntityRole { E1, E2 };

struct EntitySpan {
  std::size_t start = 0;  // inclusive
  std::size_t end = 0;    // exclusive
  std::string text;
  EntityRole role = EntityRole::E1;

  bool contains(std::size_t token) const noexcept { return token >= start && token < end; }
  bool operator==(const EntitySpan&) const = default;
};

struct AnnotatedExample {
  std::string id;
  std::vector<Token> tokens;
  EntitySpan e1;
  EntitySpan e2;
  std::string label;

  bool operator==(const AnnotatedExample&) const = default;
};

enum class SplitName { Train, Val, Test };

std::string to_string(SplitName name);
SplitName parse_split_name(std::string_view name);

struct CorpusSplit {
  SplitName name = SplitName::Train;
  std::vector<AnnotatedExample> examples;

  bool operator==(const CorpusSplit&) const = default;
};

/// A record dropped in lenient mode.
struct RejectedRecord {
  std::size_t line = 0;
  std::string kind;
  std::string reason;
};

struct LoadOptions {
  SplitName split = SplitName::Train;
  bool lenient = false;
  /// Filled with the dropped records when `lenient` is set.
  std::vector<RejectedRecord>* rejected = nullptr;
};

/// Space-joined token texts of [start, end).
std::string span_text(const std::vector<Token>& tokens, std::size_t start, std::size_t end);

/// Throws NonTreeParse unless the head links form a single rooted tree.
void validate_tree(const std::vector<Token>& tokens, std::size_t line = 0);

/// Checks every AnnotatedExample invariant against `labelset`.
void validate_example(const AnnotatedExample& example, const LabelSet& labelset,
                      std::size_t line = 0);

/// Parses one JSONL record (the canonical corpus schema) and validates it.
AnnotatedExample parse_example(std::string_view json_line, const LabelSet& labelset,
                               std::size_t line);
std::string serialize_example(const AnnotatedExample& example);

CorpusSplit load_corpus(std::istream& in, const LabelSet& labelset, const LoadOptions& options = {});
CorpusSplit load_corpus(const std::filesystem::path& path, const LabelSet& labelset,
                        const LoadOptions& options = {});
void write_corpus(std::ostream& out, const CorpusSplit& split);

/// Count per label, in LabelSet order; every label is present.
std::vector<std::pair<std::string, std::size_t>> label_histogram(const CorpusSplit& split,
                                                                 const LabelSet& labelset);

}  // namespace vforge
