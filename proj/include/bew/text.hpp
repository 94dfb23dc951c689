#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace bew {

// Decodes the next UTF-8 code point starting at `i`, advancing `i`.
// Returns 0xFFFD (and advances one byte) on malformed input.
char32_t utf8_next(std::string_view s, std::size_t& i);

// Appends one code point to a UTF-8 string.
void utf8_append(std::string& out, char32_t cp);

// True when every byte sequence in `s` is well-formed UTF-8.
bool utf8_valid(std::string_view s);

// Number of code points.
std::size_t utf8_length(std::string_view s);

// Unicode White_Space property (covers NBSP, ideographic space, etc.).
bool is_unicode_space(char32_t cp);

// Trim plus collapse internal whitespace runs into a single ASCII space.
std::string normalize_ws(std::string_view s);

std::string to_lower_ascii(std::string_view s);

// Canonical form for title/text comparison: whitespace-normalized, ASCII-lowered.
std::string fold_key(std::string_view s);

// Lowercase word tokens; splits on anything that is not alnum or apostrophe.
std::vector<std::string> word_tokens(std::string_view s);

// Splits at sentence punctuation (. ! ?) followed by whitespace; pieces are
// trimmed, empties dropped. A string without such a boundary comes back whole.
std::vector<std::string> split_sentences(std::string_view s);

// Directory-safe slug: lowercase alnum runs joined by single hyphens.
std::string slugify(std::string_view s);

// "2026-01-01T00:00:00Z" style UTC timestamps.
std::string iso8601_now();
std::string iso8601_from_time(std::int64_t unix_seconds);
// Returns -1 when the string does not parse.
std::int64_t iso8601_to_time(std::string_view s);

}  // namespace bew
