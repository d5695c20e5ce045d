#include "vforge/scoring.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vforge/embedding.hpp"
#include "vforge/errors.hpp"

namespace vforge {

using json = nlohmann::json;

namespace {

void check_finite(const Matrix& m, const std::string& what) {
  for (const auto& row : m) {
    for (auto v : row) {
      if (!std::isfinite(v)) throw DimensionMismatch(what + " has a non-finite value");
    }
  }
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

LabelWordEmbeddings::LabelWordEmbeddings(const LabelSet& labelset, std::map<std::string, Matrix> vectors)
    : vectors_(std::move(vectors)) {
  bool first = true;
  for (const auto& label : labelset.labels()) {
    auto it = vectors_.find(label);
    if (it == vectors_.end()) throw IdMismatch("label-word embeddings lack label '" + label + "'");
    const auto& m = it->second;
    if (m.empty() || m.front().empty()) throw DimensionMismatch("empty label-word embeddings for '" + label + "'");
    if (first) {
      mask_count_ = m.size();
      hidden_dim_ = m.front().size();
      first = false;
    }
    if (m.size() != mask_count_) throw DimensionMismatch(mask_count_, m.size());
    for (const auto& row : m) {
      if (row.size() != hidden_dim_) throw DimensionMismatch(hidden_dim_, row.size());
    }
    check_finite(m, "label-word embedding of '" + label + "'");
  }
  for (const auto& [label, _] : vectors_) {
    if (!labelset.contains(label)) throw UnknownLabel(0, label);
  }
}

ScoreMatrix score_example(const MaskVectorRecord& rec, const LabelWordEmbeddings& emb, const LabelSet& labelset) {
  if (rec.vectors.size() != emb.mask_count()) throw DimensionMismatch(emb.mask_count(), rec.vectors.size());
  for (const auto& v : rec.vectors) {
    if (v.size() != emb.hidden_dim()) throw DimensionMismatch(emb.hidden_dim(), v.size());
  }
  ScoreMatrix out{rec.example_id, {}};
  out.scores.reserve(labelset.size());
  const auto positions = static_cast<double>(rec.vectors.size());
  for (const auto& label : labelset.labels()) {
    const auto& words = emb.at(label);
    double sum = 0.0;
    for (std::size_t j = 0; j < rec.vectors.size(); ++j) sum += cosine(rec.vectors[j], words[j]);
    out.scores.push_back(sum / positions);
  }
  return out;
}

const std::string& predict(const ScoreMatrix& scores, const LabelSet& labelset) {
  if (scores.scores.empty() || scores.scores.size() != labelset.size()) {
    throw DimensionMismatch(labelset.size(), scores.scores.size());
  }
  std::size_t best = 0;
  for (std::size_t r = 1; r < scores.scores.size(); ++r) {
    if (scores.scores[r] > scores.scores[best]) best = r;
  }
  return labelset.labels()[best];
}

EvalReport evaluate(const std::map<std::string, std::string>& predicted,
                    const std::map<std::string, std::string>& gold, const LabelSet& labelset) {
  if (predicted.size() != gold.size()) {
    throw IdMismatch("predictions cover " + std::to_string(predicted.size()) + " ids, gold covers " +
                     std::to_string(gold.size()));
  }
  const auto n_labels = labelset.size();
  std::vector<std::size_t> tp(n_labels, 0), fp(n_labels, 0), fn(n_labels, 0), support(n_labels, 0);
  auto index = [&](const std::string& label) {
    auto r = labelset.index_of(label);
    if (!r) throw UnknownLabel(0, label);
    return *r;
  };
  std::size_t correct = 0;
  for (const auto& [id, gold_label] : gold) {
    auto it = predicted.find(id);
    if (it == predicted.end()) throw IdMismatch("no prediction for id '" + id + "'");
    const auto g = index(gold_label);
    const auto p = index(it->second);
    ++support[g];
    if (g == p) {
      ++tp[g];
      ++correct;
    } else {
      ++fp[p];
      ++fn[g];
    }
  }

  EvalReport report;
  report.total = gold.size();
  std::size_t all_tp = 0, all_fp = 0, all_fn = 0;
  double f1_sum = 0.0;
  for (std::size_t r = 0; r < n_labels; ++r) {
    LabelMetrics m;
    m.label = labelset.labels()[r];
    m.true_positives = tp[r];
    m.false_positives = fp[r];
    m.false_negatives = fn[r];
    m.support = support[r];
    m.precision = ratio(tp[r], tp[r] + fp[r]);
    m.recall = ratio(tp[r], tp[r] + fn[r]);
    m.f1 = ratio(2 * tp[r], 2 * tp[r] + fp[r] + fn[r]);
    f1_sum += m.f1;
    all_tp += tp[r];
    all_fp += fp[r];
    all_fn += fn[r];
    report.per_label.push_back(std::move(m));
  }
  report.micro_f1 = ratio(2 * all_tp, 2 * all_tp + all_fp + all_fn);
  report.macro_f1 = f1_sum / static_cast<double>(n_labels);
  report.accuracy = ratio(correct, report.total);
  return report;
}

std::string EvalReport::to_json() const {
  json per = json::object();
  for (const auto& m : per_label) {
    per[m.label] = {{"precision", m.precision},
                    {"recall", m.recall},
                    {"f1", m.f1},
                    {"support", m.support},
                    {"tp", m.true_positives},
                    {"fp", m.false_positives},
                    {"fn", m.false_negatives}};
  }
  json doc = {{"micro_f1", micro_f1}, {"macro_f1", macro_f1}, {"accuracy", accuracy},
              {"total", total},       {"per_label", per}};
  return doc.dump(2);
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-16s %9s %9s %9s %9s\n", "label", "precision", "recall", "f1", "support");
  out << line;
  for (const auto& m : per_label) {
    std::snprintf(line, sizeof line, "%-16s %9.4f %9.4f %9.4f %9zu\n", m.label.c_str(), m.precision, m.recall, m.f1,
                  m.support);
    out << line;
  }
  std::snprintf(line, sizeof line, "micro F1 %.4f  macro F1 %.4f  (n=%zu)\n", micro_f1, macro_f1, total);
  out << line;
  return out.str();
}

std::vector<MaskVectorRecord> read_mask_vectors(std::istream& in) {
  std::vector<MaskVectorRecord> out;
  std::string text;
  std::size_t line = 0;
  std::size_t hidden = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    MaskVectorRecord rec;
    try {
      auto doc = json::parse(text);
      rec.example_id = doc.at("example_id").get<std::string>();
      rec.vectors = doc.at("vectors").get<Matrix>();
    } catch (const json::exception& e) {
      throw MalformedRecord(line, std::string("bad mask-vector record: ") + e.what());
    }
    if (rec.vectors.empty()) throw MalformedRecord(line, "mask-vector record has no vectors");
    for (const auto& v : rec.vectors) {
      if (hidden == 0) hidden = v.size();
      if (v.size() != hidden || hidden == 0) {
        throw DimensionMismatch("line " + std::to_string(line) + ": hidden size differs from earlier records");
      }
    }
    check_finite(rec.vectors, "mask vectors on line " + std::to_string(line));
    out.push_back(std::move(rec));
  }
  return out;
}

void write_mask_vectors(std::ostream& out, const std::vector<MaskVectorRecord>& records) {
  for (const auto& rec : records) out << json{{"example_id", rec.example_id}, {"vectors", rec.vectors}}.dump() << '\n';
}

LabelWordEmbeddings read_label_embeddings(std::istream& in, const LabelSet& labelset) {
  std::map<std::string, Matrix> vectors;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto doc = json::parse(text);
      vectors[doc.at("label").get<std::string>()] = doc.at("vectors").get<Matrix>();
    } catch (const json::exception& e) {
      throw MalformedRecord(line, std::string("bad label-embedding record: ") + e.what());
    }
  }
  return LabelWordEmbeddings(labelset, std::move(vectors));
}

void write_label_embeddings(std::ostream& out, const LabelWordEmbeddings& emb, const LabelSet& labelset) {
  for (const auto& label : labelset.labels()) {
    out << json{{"label", label}, {"vectors", emb.at(label)}}.dump() << '\n';
  }
}

void write_predictions(std::ostream& out, const std::vector<ScoreMatrix>& scores, const LabelSet& labelset) {
  for (const auto& s : scores) {
    json per = json::object();
    for (std::size_t r = 0; r < labelset.size(); ++r) per[labelset.labels()[r]] = s.scores[r];
    out << json{{"example_id", s.example_id}, {"label", predict(s, labelset)}, {"scores", per}}.dump() << '\n';
  }
}

std::map<std::string, std::string> read_predictions(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto doc = json::parse(text);
      auto id = doc.at("example_id").get<std::string>();
      if (!out.emplace(id, doc.at("label").get<std::string>()).second) {
        throw MalformedRecord(line, "duplicate prediction for '" + id + "'");
      }
    } catch (const json::exception& e) {
      throw MalformedRecord(line, std::string("bad prediction record: ") + e.what());
    }
  }
  return out;
}

}  // namespace vforge
