#ifndef LEGALATTR_TEXT_H_
#define LEGALATTR_TEXT_H_

#include <string>
#include <string_view>

namespace legalattr {

// UTF-8 <-> UTF-32 conversion. Decoding rejects overlong forms, surrogates
// and truncated sequences with an ErrorKind::kInvalidInput error.
std::u32string DecodeUtf8(std::string_view bytes);
std::string EncodeUtf8(std::u32string_view text);
void AppendUtf8(char32_t c, std::string *out);

// Character classes used by the sentence splitter, tokenizer and features.
// Whitespace covers ASCII whitespace and the Unicode Zs/Zl/Zp separators.
bool IsSpace(char32_t c);
bool IsDigit(char32_t c);
bool IsUpper(char32_t c);
bool IsLower(char32_t c);

// Simple one-to-one case mapping for ASCII, Latin-1, Latin Extended-A,
// Greek and Cyrillic. Other characters map to themselves.
char32_t ToLower(char32_t c);
std::u32string ToLower(std::u32string_view text);

// Lowercases a UTF-8 string (invalid input throws).
std::string ToLowerUtf8(std::string_view text);

}  // namespace legalattr

#endif  // LEGALATTR_TEXT_H_
