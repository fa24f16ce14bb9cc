#include <string>

#include "legalattr/corpus.h"
#include "legalattr/error.h"

namespace legalattr {
namespace corpus {
namespace {

constexpr std::string_view kDocIdPrefix = "# doc_id = ";

std::string LabelName(const std::vector<int> &labels, size_t i,
                      LabelScheme scheme) {
  const int label = labels[i];
  if (scheme == LabelScheme::kIO) return TagSet::Legal().name(label);
  if (label == kNoTag) return "O";
  const bool begins = i == 0 || labels[i - 1] != label;
  return (begins ? "B-" : "I-") + TagSet::Legal().name(label);
}

int ParseLabel(std::string_view name) {
  if (name == "O") return kNoTag;
  if (name.size() > 2 && (name.starts_with("B-") || name.starts_with("I-"))) {
    name.remove_prefix(2);
  }
  return TagSet::Legal().Index(name);
}

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t pos = 0;
  while (true) {
    size_t tab = line.find('\t', pos);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
}

// Shared reader for the two- and three-column layouts. `on_token` receives
// the split fields of each token line.
template <typename OnSentenceStart, typename OnToken>
void ReadTokenLines(std::string_view data, size_t columns,
                    OnSentenceStart on_sentence_start, OnToken on_token) {
  std::string doc_id;
  int sentence_index = 0;
  bool in_sentence = false;
  size_t line_number = 0;
  size_t pos = 0;
  while (pos < data.size()) {
    size_t eol = data.find('\n', pos);
    if (eol == std::string_view::npos) eol = data.size();
    std::string_view line = data.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.empty()) {
      if (in_sentence) ++sentence_index;
      in_sentence = false;
      continue;
    }
    if (line.front() == '#' && line.find('\t') == std::string_view::npos) {
      if (line.starts_with(kDocIdPrefix)) {
        doc_id = std::string(line.substr(kDocIdPrefix.size()));
        sentence_index = 0;
        in_sentence = false;
      }
      continue;
    }
    auto fields = SplitTabs(line);
    if (fields.size() != columns) {
      throw Error(ErrorKind::kInvalidInput,
                  "line " + std::to_string(line_number) + ": expected " +
                      std::to_string(columns) + " tab-separated columns, got " +
                      std::to_string(fields.size()));
    }
    if (fields[0].empty()) {
      throw Error(ErrorKind::kInvalidInput,
                  "line " + std::to_string(line_number) + ": empty token");
    }
    if (!in_sentence) on_sentence_start(doc_id, sentence_index);
    in_sentence = true;
    try {
      on_token(fields);
    } catch (const Error &e) {
      throw Error(e.kind(),
                  "line " + std::to_string(line_number) + ": " + e.what());
    }
  }
}

void AppendToken(std::string_view surface, LabeledSequence *seq) {
  const int64_t start = seq->tokens.empty() ? 0 : seq->tokens.back().end + 1;
  // Offsets count code points; surfaces are UTF-8.
  int64_t length = 0;
  for (char c : surface) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++length;
  }
  seq->tokens.push_back({std::string(surface), start, start + length});
}

}  // namespace

std::string ExportConll(std::span<const LabeledSequence> seqs,
                        LabelScheme scheme) {
  std::string out;
  const std::string *current_doc = nullptr;
  for (const LabeledSequence &seq : seqs) {
    if (current_doc == nullptr || *current_doc != seq.doc_id) {
      out += std::string(kDocIdPrefix) + seq.doc_id + "\n";
      current_doc = &seq.doc_id;
    }
    for (size_t i = 0; i < seq.tokens.size(); ++i) {
      out += seq.tokens[i].surface + "\t" + LabelName(seq.labels, i, scheme) +
             "\n";
    }
    out += "\n";
  }
  return out;
}

std::vector<LabeledSequence> ImportConll(std::string_view data) {
  std::vector<LabeledSequence> seqs;
  ReadTokenLines(
      data, 2,
      [&](const std::string &doc_id, int sentence_index) {
        seqs.push_back({doc_id, sentence_index, {}, {}});
      },
      [&](const std::vector<std::string_view> &fields) {
        const int label = ParseLabel(fields[1]);
        AppendToken(fields[0], &seqs.back());
        seqs.back().labels.push_back(label);
      });
  return seqs;
}

std::string ExportTagged(std::span<const LabeledSequence> gold,
                         std::span<const std::vector<int>> predicted) {
  if (gold.size() != predicted.size()) {
    throw Error(ErrorKind::kInvalidInput,
                "tagged export: gold and predicted sentence counts differ");
  }
  std::string out;
  const std::string *current_doc = nullptr;
  for (size_t s = 0; s < gold.size(); ++s) {
    const LabeledSequence &seq = gold[s];
    if (predicted[s].size() != seq.size()) {
      throw Error(ErrorKind::kInvalidInput,
                  "tagged export: label count mismatch in document '" +
                      seq.doc_id + "'");
    }
    if (current_doc == nullptr || *current_doc != seq.doc_id) {
      out += std::string(kDocIdPrefix) + seq.doc_id + "\n";
      current_doc = &seq.doc_id;
    }
    for (size_t i = 0; i < seq.tokens.size(); ++i) {
      out += seq.tokens[i].surface + "\t" +
             TagSet::Legal().name(seq.labels[i]) + "\t" +
             TagSet::Legal().name(predicted[s][i]) + "\n";
    }
    out += "\n";
  }
  return out;
}

TaggedCorpus ImportTagged(std::string_view data) {
  TaggedCorpus corpus;
  ReadTokenLines(
      data, 3,
      [&](const std::string &doc_id, int sentence_index) {
        corpus.gold.push_back({doc_id, sentence_index, {}, {}});
        corpus.predicted.push_back({doc_id, sentence_index, {}, {}});
      },
      [&](const std::vector<std::string_view> &fields) {
        const int gold = ParseLabel(fields[1]);
        const int predicted = ParseLabel(fields[2]);
        AppendToken(fields[0], &corpus.gold.back());
        AppendToken(fields[0], &corpus.predicted.back());
        corpus.gold.back().labels.push_back(gold);
        corpus.predicted.back().labels.push_back(predicted);
      });
  return corpus;
}

}  // namespace corpus
}  // namespace legalattr
