#include "vforge/prompt.hpp"

#include <string_view>

#include "vforge/errors.hpp"

namespace vforge {

namespace {

bool attaches_left(const Token& t) {
  if (!t.is_punct) return false;
  static constexpr std::string_view kClosing[] = {".", ",", ";", ":", "!", "?", ")", "]", "}"};
  for (auto c : kClosing) {
    if (t.text == c) return true;
  }
  return false;
}

bool attaches_right(const Token& t) {
  return t.is_punct && (t.text == "(" || t.text == "[" || t.text == "{");
}

std::string suffix(const AnnotatedExample& example, std::span<const std::string> middle) {
  std::string out = example.e1.text;
  for (const auto& m : middle) {
    out += ' ';
    out += m;
  }
  out += ' ';
  out += example.e2.text;
  out += '.';
  return out;
}

}  // namespace

void TemplateConfig::validate() const {
  if (mask_count < 1) throw InvalidConfig("mask_count must be at least 1");
  if (mask_literal.empty()) throw InvalidConfig("mask literal must be non-empty");
}

std::string detokenize(std::span<const std::string> pieces, std::span<const Token> tokens) {
  std::string out;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const bool glue = i == 0 || attaches_left(tokens[i]) || attaches_right(tokens[i - 1]);
    if (!glue) out += ' ';
    out += pieces[i];
  }
  return out;
}

std::string detokenize(const std::vector<Token>& tokens) {
  std::vector<std::string> pieces;
  pieces.reserve(tokens.size());
  for (const auto& t : tokens) pieces.push_back(t.text);
  return detokenize(pieces, tokens);
}

PromptRecord render_prompt(const AnnotatedExample& example, const TemplateConfig& cfg) {
  cfg.validate();
  const std::vector<std::string> masks(cfg.mask_count, cfg.mask_literal);
  return PromptRecord{example.id, detokenize(example.tokens) + ' ' + suffix(example, masks), cfg.mask_count,
                      example.label};
}

std::string render_baseline(const AnnotatedExample& example, const TemplateConfig& cfg) {
  std::vector<std::string> pieces;
  pieces.reserve(example.tokens.size());
  for (const auto& t : example.tokens) pieces.push_back(t.text);
  auto wrap = [&](const EntitySpan& span, const std::string& open, const std::string& close) {
    pieces[span.start] = open + pieces[span.start];
    pieces[span.end - 1] += close;
  };
  wrap(example.e1, cfg.e1_open, cfg.e1_close);
  wrap(example.e2, cfg.e2_open, cfg.e2_close);
  return detokenize(pieces, example.tokens);
}

std::string render_filled(const AnnotatedExample& example, std::span<const std::string> words,
                          const TemplateConfig& cfg) {
  cfg.validate();
  if (words.size() != cfg.mask_count) {
    throw InvalidConfig("expected " + std::to_string(cfg.mask_count) + " label words, got " +
                        std::to_string(words.size()));
  }
  return detokenize(example.tokens) + ' ' + suffix(example, words);
}

}  // namespace vforge
