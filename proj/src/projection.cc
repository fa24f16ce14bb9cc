#include <algorithm>

#include "legalattr/corpus.h"
#include "legalattr/error.h"
#include "legalattr/text.h"

namespace legalattr {
namespace corpus {

std::vector<LabeledSequence> ProjectSpans(const Document &doc) {
  const std::u32string text = DecodeUtf8(doc.text);
  ValidateDocument(doc, static_cast<int64_t>(text.size()));

  std::vector<SpanAnnotation> spans = doc.spans;
  std::sort(spans.begin(), spans.end(),
            [](const SpanAnnotation &a, const SpanAnnotation &b) {
              return a.start < b.start;
            });

  std::vector<LabeledSequence> seqs;
  const std::vector<CharRange> sentences = SplitSentences(text);
  for (size_t s = 0; s < sentences.size(); ++s) {
    LabeledSequence seq;
    seq.doc_id = doc.id;
    seq.sentence_index = static_cast<int>(s);
    seq.tokens = Tokenize(text, sentences[s]);
    seq.labels.assign(seq.tokens.size(), kNoTag);
    for (size_t t = 0; t < seq.tokens.size(); ++t) {
      const Token &token = seq.tokens[t];
      // First span ending after the token start; spans are disjoint so the
      // candidates are contiguous from there.
      auto it = std::upper_bound(
          spans.begin(), spans.end(), token.start,
          [](int64_t pos, const SpanAnnotation &a) { return pos < a.end; });
      for (; it != spans.end() && it->start < token.end; ++it) {
        if (seq.labels[t] != kNoTag && seq.labels[t] != it->tag) {
          throw Error(ErrorKind::kInvalidInput,
                      "document '" + doc.id + "': token '" + token.surface +
                          "' at [" + std::to_string(token.start) + "," +
                          std::to_string(token.end) +
                          ") overlaps spans of different tags");
        }
        seq.labels[t] = it->tag;
      }
    }
    seqs.push_back(std::move(seq));
  }
  return seqs;
}

std::vector<LabeledSequence> ProjectCorpus(std::span<const Document> docs) {
  std::vector<LabeledSequence> all;
  for (const Document &doc : docs) {
    auto seqs = ProjectSpans(doc);
    std::move(seqs.begin(), seqs.end(), std::back_inserter(all));
  }
  return all;
}

std::vector<LabeledSequence> SelectHighlighted(
    std::span<const LabeledSequence> seqs) {
  std::vector<LabeledSequence> out;
  for (const LabeledSequence &seq : seqs) {
    if (std::any_of(seq.labels.begin(), seq.labels.end(),
                    [](int label) { return label != kNoTag; })) {
      out.push_back(seq);
    }
  }
  return out;
}

}  // namespace corpus
}  // namespace legalattr
