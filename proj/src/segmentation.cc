#include <array>

#include "legalattr/corpus.h"
#include "legalattr/text.h"

namespace legalattr {
namespace corpus {
namespace {

bool IsTerminator(char32_t c) { return c == '.' || c == '?' || c == '!'; }

bool IsClosing(char32_t c) {
  switch (c) {
    case '"': case '\'': case ')': case ']':
    case 0x2019: case 0x201D: case 0x00BB:
      return true;
    default:
      return false;
  }
}

bool IsOpening(char32_t c) {
  switch (c) {
    case '"': case '\'': case '(': case '[':
    case 0x2018: case 0x201C: case 0x00AB:
      return true;
    default:
      return false;
  }
}

bool StartsSentence(std::u32string_view text, size_t pos) {
  if (pos >= text.size()) return false;
  if (IsOpening(text[pos]) && pos + 1 < text.size()) ++pos;
  return IsUpper(text[pos]) || IsDigit(text[pos]);
}

}  // namespace

bool IsAbbreviation(std::u32string_view word) {
  static constexpr std::array<std::u32string_view, 11> kAbbreviations = {
      U"v.",   U"vs.",  U"Sec.", U"No.",  U"Mr.", U"Dr.",
      U"Smt.", U"Hon.", U"Art.", U"Ors.", U"Anr."};
  while (!word.empty() && IsOpening(word.front())) word.remove_prefix(1);
  for (auto abbreviation : kAbbreviations) {
    if (word == abbreviation) return true;
  }
  return false;
}

std::vector<CharRange> SplitSentences(std::u32string_view text) {
  std::vector<CharRange> ranges;
  const size_t n = text.size();
  size_t start = 0;
  while (start < n && IsSpace(text[start])) ++start;

  size_t i = start;
  while (i < n) {
    if (!IsTerminator(text[i])) {
      ++i;
      continue;
    }
    size_t end = i + 1;
    while (end < n && (IsTerminator(text[end]) || IsClosing(text[end]))) ++end;
    if (end >= n || !IsSpace(text[end])) {
      i = end;
      continue;
    }
    size_t next = end;
    while (next < n && IsSpace(text[next])) ++next;
    if (!StartsSentence(text, next)) {
      i = next;
      continue;
    }
    if (text[i] == '.' && end == i + 1) {
      size_t word_start = i;
      while (word_start > start && !IsSpace(text[word_start - 1])) --word_start;
      if (IsAbbreviation(text.substr(word_start, i + 1 - word_start))) {
        i = next;
        continue;
      }
    }
    ranges.push_back({static_cast<int64_t>(start), static_cast<int64_t>(end)});
    start = next;
    i = next;
  }

  if (start < n) {
    size_t last = n;
    while (last > start && IsSpace(text[last - 1])) --last;
    if (last > start) {
      ranges.push_back({static_cast<int64_t>(start), static_cast<int64_t>(last)});
    }
  }
  return ranges;
}

std::vector<Token> Tokenize(std::u32string_view text, CharRange range) {
  std::vector<Token> tokens;
  size_t i = static_cast<size_t>(range.start);
  const size_t end = std::min(static_cast<size_t>(range.end), text.size());
  while (i < end) {
    while (i < end && IsSpace(text[i])) ++i;
    if (i >= end) break;
    const size_t begin = i;
    while (i < end && !IsSpace(text[i])) ++i;
    tokens.push_back({EncodeUtf8(text.substr(begin, i - begin)),
                      static_cast<int64_t>(begin), static_cast<int64_t>(i)});
  }
  return tokens;
}

}  // namespace corpus
}  // namespace legalattr
