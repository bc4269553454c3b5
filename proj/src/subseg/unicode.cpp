#include "subseg/unicode.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "subseg/error.hpp"

namespace subseg::unicode {

std::vector<code_point_t> decode(std::string_view utf8) {
  std::vector<code_point_t> out;
  out.reserve(utf8.size());
  const auto* data = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto length = static_cast<int32_t>(utf8.size());
  int32_t offset = 0;
  while (offset < length) {
    const int32_t start = offset;
    UChar32 c;
    U8_NEXT(data, offset, length, c);
    if (c < 0)
      throw Error(ErrorCode::decode,
                  "invalid UTF-8 sequence at byte offset " + std::to_string(start));
    out.push_back(static_cast<code_point_t>(c));
  }
  return out;
}

std::vector<std::string> split_code_points(std::string_view utf8) {
  std::vector<std::string> out;
  const auto* data = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto length = static_cast<int32_t>(utf8.size());
  int32_t offset = 0;
  while (offset < length) {
    const int32_t start = offset;
    UChar32 c;
    U8_NEXT(data, offset, length, c);
    if (c < 0)
      throw Error(ErrorCode::decode,
                  "invalid UTF-8 sequence at byte offset " + std::to_string(start));
    out.emplace_back(utf8.substr(start, offset - start));
  }
  return out;
}

void append(std::string& out, code_point_t cp) {
  char buffer[U8_MAX_LENGTH];
  int32_t length = 0;
  UBool error = false;
  U8_APPEND(reinterpret_cast<uint8_t*>(buffer), length, U8_MAX_LENGTH,
            static_cast<UChar32>(cp), error);
  if (error)
    throw Error(ErrorCode::invalid_argument, "cannot encode code point " + std::to_string(cp));
  out.append(buffer, length);
}

bool is_whitespace(code_point_t cp) {
  return u_isUWhiteSpace(static_cast<UChar32>(cp));
}

bool is_punctuation_or_symbol(code_point_t cp) {
  switch (u_charType(static_cast<UChar32>(cp))) {
    case U_CONNECTOR_PUNCTUATION:
    case U_DASH_PUNCTUATION:
    case U_START_PUNCTUATION:
    case U_END_PUNCTUATION:
    case U_INITIAL_PUNCTUATION:
    case U_FINAL_PUNCTUATION:
    case U_OTHER_PUNCTUATION:
    case U_MATH_SYMBOL:
    case U_CURRENCY_SYMBOL:
    case U_MODIFIER_SYMBOL:
    case U_OTHER_SYMBOL:
      return true;
    default:
      return false;
  }
}

bool is_decimal_digit(code_point_t cp) {
  return u_charType(static_cast<UChar32>(cp)) == U_DECIMAL_DIGIT_NUMBER;
}

std::string compose(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status))
    throw Error(ErrorCode::config, std::string("NFC normalizer unavailable: ") + u_errorName(status));
  const auto input = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), utf8.size()));
  icu::UnicodeString composed = nfc->normalize(input, status);
  if (U_FAILURE(status))
    throw Error(ErrorCode::decode, std::string("NFC normalization failed: ") + u_errorName(status));
  std::string out;
  composed.toUTF8String(out);
  return out;
}

}  // namespace subseg::unicode
