#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace subseg::unicode {

using code_point_t = char32_t;

/// Decodes UTF-8, throwing Error(decode) that names the byte offset of the
/// first ill-formed sequence.
std::vector<code_point_t> decode(std::string_view utf8);

/// Splits into one substring per code point. Input must be valid UTF-8.
std::vector<std::string> split_code_points(std::string_view utf8);

void append(std::string& out, code_point_t cp);

bool is_whitespace(code_point_t cp);
bool is_punctuation_or_symbol(code_point_t cp);
bool is_decimal_digit(code_point_t cp);

/// Canonical composition (NFC).
std::string compose(std::string_view utf8);

}  // namespace subseg::unicode
