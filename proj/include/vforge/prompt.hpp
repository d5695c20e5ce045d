#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vforge/corpus.hpp"

namespace vforge {

struct TemplateConfig {
  std::string mask_literal = "[MASK]";
  std::size_t mask_count = 3;
  std::string e1_open = "[E1] ";
  std::string e1_close = " [/E1]";
  std::string e2_open = "[E2] ";
  std::string e2_close = " [/E2]";

  /// Throws InvalidConfig when mask_count is 0 or the mask literal is empty.
  void validate() const;
  bool operator==(const TemplateConfig&) const = default;
};

struct PromptRecord {
  std::string example_id;
  std::string text;
  std::size_t mask_positions = 0;
  std::string gold_label;
};

/// Joins tokens with single spaces, except that closing punctuation
/// (. , ; : ! ? ) ] }) attaches to the preceding token and opening
/// brackets attach to the following one.
std::string detokenize(std::span<const std::string> pieces, std::span<const Token> tokens);
std::string detokenize(const std::vector<Token>& tokens);

/// `<sentence> <e1> <mask x L> <e2>.`
PromptRecord render_prompt(const AnnotatedExample& example, const TemplateConfig& cfg = {});

/// The sentence with both entity spans wrapped in their marker literals.
std::string render_baseline(const AnnotatedExample& example, const TemplateConfig& cfg = {});

/// The prompt with its masks replaced by `words`; requires |words| = mask_count.
std::string render_filled(const AnnotatedExample& example, std::span<const std::string> words,
                          const TemplateConfig& cfg = {});

}  // namespace vforge
