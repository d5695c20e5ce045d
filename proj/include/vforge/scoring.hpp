#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "vforge/corpus.hpp"

namespace vforge {

using Matrix = std::vector<std::vector<double>>;

/// Final-layer outputs at the L mask positions of one prompt, in order.
struct MaskVectorRecord {
  std::string example_id;
  Matrix vectors;
};

/// Per label, the embeddings of its L label words.
class LabelWordEmbeddings {
 public:
  /// Checks that every label of `labelset` is present with the same L x H shape.
  LabelWordEmbeddings(const LabelSet& labelset, std::map<std::string, Matrix> vectors);

  const Matrix& at(const std::string& label) const { return vectors_.at(label); }
  std::size_t mask_count() const noexcept { return mask_count_; }
  std::size_t hidden_dim() const noexcept { return hidden_dim_; }

 private:
  std::map<std::string, Matrix> vectors_;
  std::size_t mask_count_ = 0;
  std::size_t hidden_dim_ = 0;
};

/// One score per label, in LabelSet order.
struct ScoreMatrix {
  std::string example_id;
  std::vector<double> scores;
};

/// score(r) = mean over mask positions j of cos(rec[j], emb[r][j]).
ScoreMatrix score_example(const MaskVectorRecord& rec, const LabelWordEmbeddings& emb, const LabelSet& labelset);

/// Argmax; ties go to the earlier label.
const std::string& predict(const ScoreMatrix& scores, const LabelSet& labelset);

struct LabelMetrics {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
};

struct EvalReport {
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::size_t total = 0;
  std::vector<LabelMetrics> per_label;  // LabelSet order

  std::string to_json() const;
  std::string to_table() const;
};

/// Micro F1 pools every class including the negative one; macro F1 averages
/// per-label F1 with zero-support labels counting as 0.
/// Throws IdMismatch unless both maps cover the same ids.
EvalReport evaluate(const std::map<std::string, std::string>& predicted,
                    const std::map<std::string, std::string>& gold, const LabelSet& labelset);

std::vector<MaskVectorRecord> read_mask_vectors(std::istream& in);
void write_mask_vectors(std::ostream& out, const std::vector<MaskVectorRecord>& records);
LabelWordEmbeddings read_label_embeddings(std::istream& in, const LabelSet& labelset);
void write_label_embeddings(std::ostream& out, const LabelWordEmbeddings& emb, const LabelSet& labelset);

/// Prediction exchange file: `{"example_id": str, "label": str}` per line,
/// optionally with a "scores" object.
void write_predictions(std::ostream& out, const std::vector<ScoreMatrix>& scores, const LabelSet& labelset);
std::map<std::string, std::string> read_predictions(std::istream& in);

}  // namespace vforge
