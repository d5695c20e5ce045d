#include "vforge/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>
#include <toml++/toml.hpp>

#include "vforge/errors.hpp"

namespace vforge {

using json = nlohmann::json;

LabelSet::LabelSet(std::vector<std::string> labels, std::map<std::string, std::string> descriptions,
                   std::string negative_label)
    : labels_(std::move(labels)), descriptions_(std::move(descriptions)), negative_(std::move(negative_label)) {
  if (labels_.size() < 2) {
    throw InvalidLabelSet("a label set needs at least two labels");
  }
  std::set<std::string> seen;
  for (const auto& label : labels_) {
    if (label.empty()) throw InvalidLabelSet("empty label identifier");
    if (!seen.insert(label).second) throw InvalidLabelSet("duplicate label '" + label + "'");
  }
  if (!seen.contains(negative_)) {
    throw InvalidLabelSet("negative label '" + negative_ + "' is not among the labels");
  }
  for (const auto& [label, _] : descriptions_) {
    if (!seen.contains(label)) throw InvalidLabelSet("description for unknown label '" + label + "'");
  }
  auto& negative_description = descriptions_[negative_];
  if (negative_description.empty()) negative_description = kDefaultNegativeDescription;
  for (const auto& label : labels_) {
    auto it = descriptions_.find(label);
    if (it == descriptions_.end() || it->second.empty()) {
      throw InvalidLabelSet("label '" + label + "' has no description");
    }
  }
}

LabelSet LabelSet::parse(std::string_view toml_text) {
  toml::table doc;
  try {
    doc = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    throw InvalidLabelSet(std::string("label set is not valid TOML: ") + std::string(e.description()));
  }
  auto negative = doc["negative_label"].value<std::string>();
  if (!negative) throw InvalidLabelSet("missing 'negative_label'");
  auto* entries = doc["label"].as_array();
  if (entries == nullptr) throw InvalidLabelSet("missing [[label]] entries");

  std::vector<std::string> labels;
  std::map<std::string, std::string> descriptions;
  for (auto& node : *entries) {
    auto* table = node.as_table();
    if (table == nullptr) throw InvalidLabelSet("[[label]] entry is not a table");
    auto id = (*table)["id"].value<std::string>();
    if (!id) throw InvalidLabelSet("[[label]] entry without 'id'");
    labels.push_back(*id);
    descriptions[*id] = (*table)["description"].value_or(std::string{});
  }
  return LabelSet(std::move(labels), std::move(descriptions), *negative);
}

LabelSet LabelSet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidLabelSet("cannot open label set " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::string LabelSet::to_toml() const {
  toml::array entries;
  for (const auto& label : labels_) {
    entries.push_back(toml::table{{"id", label}, {"description", descriptions_.at(label)}});
  }
  toml::table doc{{"negative_label", negative_}, {"label", std::move(entries)}};
  std::ostringstream out;
  out << doc << "\n";
  return out.str();
}

const std::string& LabelSet::description(const std::string& label) const {
  auto it = descriptions_.find(label);
  if (it == descriptions_.end()) throw InvalidLabelSet("unknown label '" + label + "'");
  return it->second;
}

bool LabelSet::contains(const std::string& label) const { return index_of(label).has_value(); }

std::optional<std::size_t> LabelSet::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

std::string to_string(SplitName name) {
  switch (name) {
    case SplitName::Train: return "train";
    case SplitName::Val: return "val";
    case SplitName::Test: return "test";
  }
  return "train";
}

SplitName parse_split_name(std::string_view name) {
  if (name == "train") return SplitName::Train;
  if (name == "val") return SplitName::Val;
  if (name == "test") return SplitName::Test;
  throw InvalidConfig("unknown split name '" + std::string(name) + "'");
}

std::string span_text(const std::vector<Token>& tokens, std::size_t start, std::size_t end) {
  std::string out;
  for (std::size_t i = start; i < end && i < tokens.size(); ++i) {
    if (i > start) out += ' ';
    out += tokens[i].text;
  }
  return out;
}

void validate_tree(const std::vector<Token>& tokens, std::size_t line) {
  const auto n = tokens.size();
  if (n == 0) throw NonTreeParse(line, "sentence has no tokens");
  std::size_t roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto head = tokens[i].head;
    if (head == kRootHead) {
      ++roots;
      continue;
    }
    if (head < 0 || static_cast<std::size_t>(head) >= n) {
      throw NonTreeParse(line, "token " + std::to_string(i) + " has out-of-range head " + std::to_string(head));
    }
    if (static_cast<std::size_t>(head) == i) {
      throw NonTreeParse(line, "token " + std::to_string(i) + " is its own head");
    }
  }
  if (roots != 1) throw NonTreeParse(line, "expected exactly one root, found " + std::to_string(roots));

  // 0 = unvisited, 1 = on current walk, 2 = known to reach the root.
  std::vector<std::uint8_t> state(n, 0);
  std::vector<std::size_t> walk;
  for (std::size_t start = 0; start < n; ++start) {
    walk.clear();
    std::size_t cur = start;
    while (state[cur] == 0) {
      state[cur] = 1;
      walk.push_back(cur);
      if (tokens[cur].is_root()) break;
      cur = static_cast<std::size_t>(tokens[cur].head);
    }
    if (state[cur] == 1 && !tokens[cur].is_root()) {
      throw NonTreeParse(line, "head links contain a cycle through token " + std::to_string(cur));
    }
    for (auto t : walk) state[t] = 2;
  }
}

void validate_example(const AnnotatedExample& ex, const LabelSet& labelset, std::size_t line) {
  if (ex.id.empty()) throw MalformedRecord(line, "empty id");
  for (std::size_t i = 0; i < ex.tokens.size(); ++i) {
    if (ex.tokens[i].index != i) throw MalformedRecord(line, "token index out of order at " + std::to_string(i));
  }
  validate_tree(ex.tokens, line);
  const auto n = ex.tokens.size();
  for (const auto* span : {&ex.e1, &ex.e2}) {
    const char* name = span->role == EntityRole::E1 ? "e1" : "e2";
    if (!(span->start < span->end && span->end <= n)) {
      throw MalformedRecord(line, std::string(name) + " span [" + std::to_string(span->start) + ", " +
                                      std::to_string(span->end) + ") is invalid for " + std::to_string(n) +
                                      " tokens");
    }
    if (span->text != span_text(ex.tokens, span->start, span->end)) {
      throw MalformedRecord(line, std::string(name) + " text does not match its tokens");
    }
  }
  if (ex.e1.role != EntityRole::E1 || ex.e2.role != EntityRole::E2) {
    throw MalformedRecord(line, "entity roles are swapped");
  }
  if (ex.e1.start < ex.e2.end && ex.e2.start < ex.e1.end) throw MalformedRecord(line, "e1 and e2 overlap");
  if (!labelset.contains(ex.label)) throw UnknownLabel(line, ex.label);
}

namespace {

template <typename T>
T field(const json& record, const char* key, std::size_t line) {
  auto it = record.find(key);
  if (it == record.end()) throw MalformedRecord(line, std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw MalformedRecord(line, std::string("field '") + key + "' has the wrong type");
  }
}

EntitySpan parse_span(const json& record, const char* key, EntityRole role, std::size_t line) {
  auto obj = field<json>(record, key, line);
  if (!obj.is_object()) throw MalformedRecord(line, std::string("field '") + key + "' is not an object");
  auto start = field<std::int64_t>(obj, "start", line);
  auto end = field<std::int64_t>(obj, "end", line);
  if (start < 0 || end < 0) throw MalformedRecord(line, std::string(key) + " has a negative offset");
  return EntitySpan{static_cast<std::size_t>(start), static_cast<std::size_t>(end), {}, role};
}

}  // namespace

AnnotatedExample parse_example(std::string_view json_line, const LabelSet& labelset, std::size_t line) {
  json record;
  try {
    record = json::parse(json_line);
  } catch (const json::parse_error& e) {
    throw MalformedRecord(line, std::string("invalid JSON: ") + e.what());
  }
  if (!record.is_object()) throw MalformedRecord(line, "record is not a JSON object");

  AnnotatedExample ex;
  ex.id = field<std::string>(record, "id", line);
  auto texts = field<std::vector<std::string>>(record, "tokens", line);
  auto heads = field<std::vector<std::int64_t>>(record, "heads", line);
  auto deprels = field<std::vector<std::string>>(record, "deprels", line);
  auto punct = field<std::vector<bool>>(record, "is_punct", line);
  if (heads.size() != texts.size() || deprels.size() != texts.size() || punct.size() != texts.size()) {
    throw MalformedRecord(line, "tokens, heads, deprels and is_punct differ in length");
  }
  ex.tokens.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (heads[i] < kRootHead || heads[i] > INT32_MAX) {
      throw NonTreeParse(line, "token " + std::to_string(i) + " has out-of-range head " + std::to_string(heads[i]));
    }
    ex.tokens.push_back(Token{i, std::move(texts[i]), static_cast<std::int32_t>(heads[i]), std::move(deprels[i]),
                              static_cast<bool>(punct[i])});
  }
  ex.e1 = parse_span(record, "e1", EntityRole::E1, line);
  ex.e2 = parse_span(record, "e2", EntityRole::E2, line);
  ex.label = field<std::string>(record, "label", line);
  // Text is derived, so spans are range-checked before it is filled in.
  for (auto* span : {&ex.e1, &ex.e2}) {
    if (span->start < span->end && span->end <= ex.tokens.size()) {
      span->text = span_text(ex.tokens, span->start, span->end);
    }
  }
  validate_example(ex, labelset, line);
  return ex;
}

std::string serialize_example(const AnnotatedExample& ex) {
  json tokens = json::array(), heads = json::array(), deprels = json::array(), punct = json::array();
  for (const auto& t : ex.tokens) {
    tokens.push_back(t.text);
    heads.push_back(t.head);
    deprels.push_back(t.deprel);
    punct.push_back(t.is_punct);
  }
  json record = {{"id", ex.id},
                 {"tokens", std::move(tokens)},
                 {"heads", std::move(heads)},
                 {"deprels", std::move(deprels)},
                 {"is_punct", std::move(punct)},
                 {"e1", {{"start", ex.e1.start}, {"end", ex.e1.end}}},
                 {"e2", {{"start", ex.e2.start}, {"end", ex.e2.end}}},
                 {"label", ex.label}};
  return record.dump();
}

CorpusSplit load_corpus(std::istream& in, const LabelSet& labelset, const LoadOptions& options) {
  CorpusSplit split{options.split, {}};
  std::unordered_set<std::string> ids;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      auto ex = parse_example(text, labelset, line);
      if (!ids.insert(ex.id).second) throw MalformedRecord(line, "duplicate id '" + ex.id + "'");
      split.examples.push_back(std::move(ex));
    } catch (const RecordError& e) {
      if (!options.lenient) throw;
      spdlog::warn("dropping record: {} ({})", e.what(), e.kind());
      if (options.rejected != nullptr) options.rejected->push_back({e.line(), e.kind(), e.what()});
    }
  }
  return split;
}

CorpusSplit load_corpus(const std::filesystem::path& path, const LabelSet& labelset, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact(path.string());
  return load_corpus(in, labelset, options);
}

void write_corpus(std::ostream& out, const CorpusSplit& split) {
  for (const auto& ex : split.examples) out << serialize_example(ex) << '\n';
}

std::vector<std::pair<std::string, std::size_t>> label_histogram(const CorpusSplit& split,
                                                                 const LabelSet& labelset) {
  std::vector<std::pair<std::string, std::size_t>> counts;
  counts.reserve(labelset.size());
  for (const auto& label : labelset.labels()) counts.emplace_back(label, 0);
  for (const auto& ex : split.examples) {
    auto index = labelset.index_of(ex.label);
    if (!index) throw UnknownLabel(0, ex.label);
    ++counts[*index].second;
  }
  return counts;
}

}  // namespace vforge
