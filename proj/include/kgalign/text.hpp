#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kgalign::text {

// Decodes UTF-8 into Unicode scalar values. Invalid sequences decode to U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

// Simple case folding for ASCII, Latin-1, Latin Extended-A, Greek and Cyrillic.
char32_t to_lower(char32_t c);
std::u32string to_lower(std::u32string_view s);
std::string to_lower_utf8(std::string_view s);

// Splits on ASCII whitespace and, optionally, underscores. Empty pieces are dropped.
std::vector<std::string> tokenize(std::string_view s, bool split_underscores);

// Splits a line on tabs, keeping empty fields.
std::vector<std::string_view> split_tabs(std::string_view line);

// Removes a trailing '\r' (CRLF input).
std::string_view strip_cr(std::string_view line);

// Local name of a URI: the text after the last '/', underscores turned into spaces.
// Non-URI strings are returned unchanged.
std::string uri_local_name(std::string_view s);

}  // namespace kgalign::text
