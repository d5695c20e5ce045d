#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vforge/corpus.hpp"

namespace vforge {

/// One parsed CoNLL-U sentence. Multiword-token ranges (`3-4`) and empty
/// nodes (`5.1`) are skipped; HEAD 0 becomes kRootHead and UPOS PUNCT sets
/// is_punct.
struct ConlluSentence {
  std::string sent_id;
  std::vector<Token> tokens;
};

/// Sentence ids come from `# sent_id = ...` comments, else `s<ordinal>`
/// (1-based).
std::vector<ConlluSentence> read_conllu(std::istream& in);
void write_conllu(std::ostream& out, const std::vector<ConlluSentence>& sentences);

/// One relation instance from the standoff file. Offsets are 0-based token
/// indices into the referenced sentence, end-exclusive. Tab-separated:
/// `example_id sent_id e1_start e1_end e2_start e2_end label`; blank lines
/// and lines starting with `#` are ignored.
struct StandoffRelation {
  std::string example_id;
  std::string sent_id;
  std::size_t e1_start = 0, e1_end = 0, e2_start = 0, e2_end = 0;
  std::string label;
};

std::vector<StandoffRelation> read_standoff(std::istream& in);
void write_standoff(std::ostream& out, const std::vector<StandoffRelation>& relations);

/// Joins relations to their sentences and validates each resulting example.
/// Relations whose sentence id is unknown raise MalformedRecord with the
/// standoff line number.
std::vector<AnnotatedExample> convert(const std::vector<ConlluSentence>& sentences,
                                      const std::vector<StandoffRelation>& relations, const LabelSet& labelset);

}  // namespace vforge
