#ifndef LEGALATTR_CORPUS_H_
#define LEGALATTR_CORPUS_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "legalattr/tagset.h"

namespace legalattr {
namespace corpus {

// All character offsets in this module count Unicode scalar values, not
// bytes. Ranges are half-open.
struct CharRange {
  int64_t start = 0;
  int64_t end = 0;

  bool operator==(const CharRange &) const = default;
};

struct SpanAnnotation {
  int64_t start = 0;
  int64_t end = 0;
  int tag = kNoTag;

  bool operator==(const SpanAnnotation &) const = default;
};

struct Document {
  std::string id;
  std::string text;  // UTF-8
  std::vector<SpanAnnotation> spans;
  std::optional<int> judgment;  // 0 = rejected, 1 = accepted

  bool operator==(const Document &) const = default;
};

struct Token {
  std::string surface;  // UTF-8, never contains whitespace
  int64_t start = 0;
  int64_t end = 0;

  bool operator==(const Token &) const = default;
};

// One sentence of a document; labels are indices into TagSet::Legal().
struct LabeledSequence {
  std::string doc_id;
  int sentence_index = 0;
  std::vector<Token> tokens;
  std::vector<int> labels;

  size_t size() const { return tokens.size(); }
  bool operator==(const LabeledSequence &) const = default;
};

// ---------------------------------------------------------------------------
// Annotation files (JSON lines).

// Parses one document per non-blank line:
//   {"id": str, "text": str, "spans": [{"start","end","tag"}], "judgment"}
// Every error names the 1-based line number. Spans are validated against the
// text and returned sorted by start offset.
std::vector<Document> ParseAnnotations(std::string_view data);

// Serializes documents in the format read by ParseAnnotations.
std::string WriteAnnotations(std::span<const Document> docs);

// Checks the span invariants of a single document (bounds, tag range,
// pairwise non-overlap). Throws ErrorKind::kInvalidInput.
void ValidateDocument(const Document &doc, int64_t text_length);

// ---------------------------------------------------------------------------
// Segmentation.

// Rule-based sentence boundaries. A sentence ends after '.', '?' or '!'
// (plus any closing quotes or brackets) when the next non-space character is
// an uppercase letter or digit, possibly behind an opening quote or bracket.
// A period ending one of the fixed legal abbreviations (v., vs., Sec., No.,
// Mr., Dr., Smt., Hon., Art., Ors., Anr.) never ends a sentence. Returned
// ranges are trimmed of surrounding whitespace.
std::vector<CharRange> SplitSentences(std::u32string_view text);

// Maximal non-whitespace runs inside `range`, with exact source offsets.
std::vector<Token> Tokenize(std::u32string_view text, CharRange range);

// True when `word` (a whitespace-delimited run ending in '.') is one of the
// abbreviations that suppress a sentence boundary.
bool IsAbbreviation(std::u32string_view word);

// ---------------------------------------------------------------------------
// Span projection.

// One LabeledSequence per sentence. A token receives a span's tag when any of
// its characters falls inside the span; every other token is NoTag. Spans that
// cross a sentence boundary label tokens on both sides.
std::vector<LabeledSequence> ProjectSpans(const Document &doc);

// Projects every document, preserving document order.
std::vector<LabeledSequence> ProjectCorpus(std::span<const Document> docs);

// Sentences carrying at least one non-NoTag label.
std::vector<LabeledSequence> SelectHighlighted(
    std::span<const LabeledSequence> seqs);

// ---------------------------------------------------------------------------
// Dataset statistics.

struct TagCounts {
  int64_t sentences = 0;  // sentences with at least one token of the tag
  int64_t tokens = 0;     // tokens carrying the tag

  bool operator==(const TagCounts &) const = default;
};

struct StatsReport {
  std::string split;
  std::array<TagCounts, kNumTags> per_tag{};  // NoTag entry left at zero

  bool operator==(const StatsReport &) const = default;
};

StatsReport ComputeStats(std::span<const LabeledSequence> seqs,
                         std::string split_name);
StatsReport ComputeStats(std::span<const Document> docs,
                         std::string split_name);

// Long form: header "tag\tsentences\ttokens", one row per attribute tag in
// report order.
std::string RenderStatsTsv(const StatsReport &report);

// Wide form: header "split\tstatistic\t<7 tags>", then a "#sentences" and a
// "#tokens" row for every split.
std::string RenderStatsTable(std::span<const StatsReport> reports);

// ---------------------------------------------------------------------------
// Token TSV ("CoNLL-style").

enum class LabelScheme {
  kIO,   // the tag name per token
  kBIO,  // B-<tag> / I-<tag> over runs of identical tags, "O" for NoTag
};

// "# doc_id = <id>" before each document, one "surface\ttag" line per token
// and a blank line after each sentence.
std::string ExportConll(std::span<const LabeledSequence> seqs,
                        LabelScheme scheme = LabelScheme::kIO);

// Reads ExportConll output in either label scheme. Sentence indices restart at
// zero for every document; token offsets are regenerated as if the surfaces
// were joined by single spaces.
std::vector<LabeledSequence> ImportConll(std::string_view data);

// Tagging output: the token TSV with a third column holding the predicted
// tag. `predicted` parallels `gold`.
std::string ExportTagged(std::span<const LabeledSequence> gold,
                         std::span<const std::vector<int>> predicted);

struct TaggedCorpus {
  std::vector<LabeledSequence> gold;
  std::vector<LabeledSequence> predicted;
};

// Reads ExportTagged output.
TaggedCorpus ImportTagged(std::string_view data);

}  // namespace corpus
}  // namespace legalattr

#endif  // LEGALATTR_CORPUS_H_
