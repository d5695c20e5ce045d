#include "vforge/conllu.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "vforge/errors.hpp"

namespace vforge {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

std::size_t parse_index(const std::string& field, std::size_t line, const char* what) {
  try {
    std::size_t used = 0;
    auto v = std::stoll(field, &used);
    if (used != field.size() || v < 0) throw std::invalid_argument(field);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw MalformedRecord(line, std::string("bad ") + what + " '" + field + "'");
  }
}

}  // namespace

std::vector<ConlluSentence> read_conllu(std::istream& in) {
  std::vector<ConlluSentence> out;
  ConlluSentence current;
  std::size_t line_no = 0;
  bool open = false;
  auto flush = [&] {
    if (!open) return;
    if (current.sent_id.empty()) current.sent_id = "s" + std::to_string(out.size() + 1);
    out.push_back(std::move(current));
    current = {};
    open = false;
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line.front() == '#') {
      constexpr std::string_view kKey = "# sent_id";
      if (line.rfind(kKey, 0) == 0) {
        auto eq = line.find('=');
        if (eq != std::string::npos) {
          auto value = line.substr(eq + 1);
          auto first = value.find_first_not_of(' ');
          current.sent_id = first == std::string::npos ? "" : value.substr(first);
        }
      }
      open = true;
      continue;
    }
    auto cols = split_tabs(line);
    if (cols.size() != 10) throw MalformedRecord(line_no, "expected 10 tab-separated columns");
    if (cols[0].find_first_of("-.") != std::string::npos) continue;
    const auto id = parse_index(cols[0], line_no, "token id");
    if (id != current.tokens.size() + 1) throw MalformedRecord(line_no, "token ids must be 1, 2, 3, ...");
    const auto head = parse_index(cols[6], line_no, "head");
    Token t;
    t.index = id - 1;
    t.text = cols[1];
    t.head = head == 0 ? kRootHead : static_cast<std::int32_t>(head - 1);
    t.deprel = cols[7];
    t.is_punct = cols[3] == "PUNCT";
    current.tokens.push_back(std::move(t));
    open = true;
  }
  flush();
  return out;
}

void write_conllu(std::ostream& out, const std::vector<ConlluSentence>& sentences) {
  for (const auto& s : sentences) {
    out << "# sent_id = " << s.sent_id << '\n';
    for (const auto& t : s.tokens) {
      out << t.index + 1 << '\t' << t.text << "\t_\t" << (t.is_punct ? "PUNCT" : "X") << "\t_\t_\t"
          << (t.is_root() ? 0 : t.head + 1) << '\t' << t.deprel << "\t_\t_\n";
    }
    out << '\n';
  }
}

std::vector<StandoffRelation> read_standoff(std::istream& in) {
  std::vector<StandoffRelation> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto cols = split_tabs(line);
    if (cols.size() != 7) throw MalformedRecord(line_no, "expected 7 tab-separated standoff columns");
    out.push_back({cols[0], cols[1], parse_index(cols[2], line_no, "e1 start"), parse_index(cols[3], line_no, "e1 end"),
                   parse_index(cols[4], line_no, "e2 start"), parse_index(cols[5], line_no, "e2 end"), cols[6]});
  }
  return out;
}

void write_standoff(std::ostream& out, const std::vector<StandoffRelation>& relations) {
  out << "# example_id\tsent_id\te1_start\te1_end\te2_start\te2_end\tlabel\n";
  for (const auto& r : relations) {
    out << r.example_id << '\t' << r.sent_id << '\t' << r.e1_start << '\t' << r.e1_end << '\t' << r.e2_start << '\t'
        << r.e2_end << '\t' << r.label << '\n';
  }
}

std::vector<AnnotatedExample> convert(const std::vector<ConlluSentence>& sentences,
                                      const std::vector<StandoffRelation>& relations, const LabelSet& labelset) {
  std::unordered_map<std::string, const ConlluSentence*> by_id;
  for (const auto& s : sentences) {
    if (!by_id.emplace(s.sent_id, &s).second) throw MalformedRecord(0, "duplicate sentence id '" + s.sent_id + "'");
  }
  std::vector<AnnotatedExample> out;
  out.reserve(relations.size());
  for (std::size_t i = 0; i < relations.size(); ++i) {
    const auto& rel = relations[i];
    const auto line = i + 1;
    auto it = by_id.find(rel.sent_id);
    if (it == by_id.end()) throw MalformedRecord(line, "unknown sentence id '" + rel.sent_id + "'");
    AnnotatedExample ex;
    ex.id = rel.example_id;
    ex.tokens = it->second->tokens;
    ex.e1 = EntitySpan{rel.e1_start, rel.e1_end, {}, EntityRole::E1};
    ex.e2 = EntitySpan{rel.e2_start, rel.e2_end, {}, EntityRole::E2};
    for (auto* span : {&ex.e1, &ex.e2}) {
      if (span->start < span->end && span->end <= ex.tokens.size()) {
        span->text = span_text(ex.tokens, span->start, span->end);
      }
    }
    ex.label = rel.label;
    validate_example(ex, labelset, line);
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace vforge
