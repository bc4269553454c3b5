#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "subseg/corpus.hpp"

namespace subseg::text {

/// Line normalization, applied in this order:
///
///   1. canonical composition (NFC)
///   2. substitutions
///        U+2018 U+2019 U+201A U+201B U+2032            -> '
///        U+201C U+201D U+201E U+201F U+2033 U+00AB U+00BB -> "
///        U+2010 U+2011 U+2012 U+2013 U+2014 U+2015 U+2212 -> -
///        U+FF10..U+FF19 (fullwidth digits)              -> 0..9
///   3. every run of Unicode whitespace becomes one ASCII space
///   4. leading and trailing whitespace is trimmed
///
/// Throws Error(decode) on ill-formed UTF-8.
std::string normalize_line(std::string_view line);

MonoCorpus normalize(const MonoCorpus& corpus);

struct StatsReport {
  std::uint64_t sentence_count = 0;
  std::uint64_t token_count = 0;
  std::uint64_t type_count = 0;
  std::uint64_t blank_count = 0;
  std::uint64_t duplicate_count = 0;

  friend bool operator==(const StatsReport&, const StatsReport&) = default;
};

/// Blank: zero tokens. Duplicate: a non-blank line equal to an earlier one.
StatsReport stats(const MonoCorpus& corpus);

/// Tokens and types are counted over both sides. Blank: either side empty.
/// Duplicate: a non-blank pair equal on both sides to an earlier pair.
StatsReport stats(const ParallelCorpus& corpus);

}  // namespace subseg::text
