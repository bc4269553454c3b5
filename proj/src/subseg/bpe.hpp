#pragma once

// Character-level byte-pair encoding over whitespace-delimited words.
//
// A word starts as one symbol per code point, the last one carrying the
// end-of-word marker ("t</w>" is a single symbol). Learning repeatedly merges the
// most frequent adjacent symbol pair; application replays merges by rank.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "subseg/corpus.hpp"

namespace subseg::bpe {

inline constexpr std::string_view end_of_word = "</w>";
inline constexpr std::string_view default_joiner = "@@";

using Symbol = std::string;
using Merge = std::pair<Symbol, Symbol>;

struct Codes {
  std::vector<Merge> merges;  // rank == index
  std::uint64_t num_merges = 0;

  friend bool operator==(const Codes&, const Codes&) = default;
};

using WordCounts = std::map<std::string, std::uint64_t>;

WordCounts count_words(const MonoCorpus& corpus);

/// One symbol per code point, end-of-word marker fused onto the last.
std::vector<Symbol> split_word(std::string_view word);

/// Learns up to num_merges merges, recounting pair frequencies after every merge.
/// Stops early once the best pair occurs fewer than twice. Ties go to the
/// smallest (left, right) in byte order.
Codes learn_bpe(const WordCounts& word_counts, std::uint64_t num_merges);

/// Applies codes to single words, caching results.
class Segmenter {
public:
  explicit Segmenter(const Codes& codes);

  std::vector<Symbol> apply(std::string_view word) const;

  /// Pieces with the marker stripped; the joiner suffixes every non-final piece.
  std::vector<std::string> segment(std::string_view word, std::string_view joiner) const;

private:
  std::map<Merge, std::size_t, std::less<>> _ranks;
};

std::vector<Symbol> apply_bpe(std::string_view word, const Codes& codes);

MonoCorpus segment_corpus(const MonoCorpus& corpus,
                          const Codes& codes,
                          std::string_view joiner = default_joiner);

/// Joins every token ending with the joiner onto the token that follows it.
MonoCorpus desegment(const MonoCorpus& corpus, std::string_view joiner = default_joiner);

/// Codes file: "#bpe:v1\tnum_merges=<k>" then "left right" per merge.
void write_codes(std::ostream& out, const Codes& codes);
Codes read_codes(std::istream& in);
void save_codes(const std::string& path, const Codes& codes);
Codes load_codes(const std::string& path);

}  // namespace subseg::bpe
