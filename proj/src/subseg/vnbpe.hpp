#pragma once

// Syllable-level merge learning for space-separated scripts such as Vietnamese.
//
// Tokens are treated as indivisible units. Adjacent token pairs are counted once
// over the input, every pair reaching the frequency threshold becomes a rule, and
// rules are replayed in decreasing-frequency order, each rewriting "left right"
// into the single token "left_right".

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "subseg/corpus.hpp"

namespace subseg::vnbpe {

inline constexpr char joiner = '_';

struct MergeRule {
  std::string left;
  std::string right;
  std::uint64_t frequency = 0;

  std::string joined() const { return left + joiner + right; }

  friend bool operator==(const MergeRule&, const MergeRule&) = default;
};

struct Codes {
  std::vector<MergeRule> rules;
  std::uint32_t min_freq = 2;

  friend bool operator==(const Codes&, const Codes&) = default;
};

/// Digits, optionally interleaved with '.' and ',', at least one digit.
bool is_numeric_token(std::string_view token);

/// Every code point is Unicode punctuation or symbol.
bool is_symbol_token(std::string_view token);

/// Decides which tokens never take part in a merge. A pair is excluded when
/// either side is a separator or numeric.
class ExclusionPolicy {
public:
  using Predicate = std::function<bool(std::string_view)>;

  /// Separators: every punctuation/symbol-only token. Numeric: is_numeric_token.
  ExclusionPolicy();

  /// Adds an explicit separator on top of the punctuation/symbol class.
  ExclusionPolicy& add_separator(std::string token);
  ExclusionPolicy& use_symbol_class(bool enabled);
  ExclusionPolicy& set_numeric_rule(Predicate rule);

  bool is_separator(std::string_view token) const;
  bool is_numeric(std::string_view token) const;
  bool excludes(std::string_view token) const { return is_separator(token) || is_numeric(token); }

private:
  std::unordered_set<std::string> _separators;
  bool _symbol_class = true;
  Predicate _numeric;
};

enum class PairCounting {
  sliding,          // every adjacency (t[i], t[i+1])
  non_overlapping,  // a counted pair consumes both tokens; an excluded pair advances by one
};

enum class Threshold {
  at_least,      // frequency >= min_freq
  greater_than,  // frequency > min_freq
};

struct LearnOptions {
  std::uint32_t min_freq = 2;
  Threshold threshold = Threshold::at_least;
  PairCounting counting = PairCounting::sliding;
};

using Pair = std::pair<std::string, std::string>;
using PairCounts = std::map<Pair, std::uint64_t>;

using WarningSink = std::function<void(std::string_view)>;

/// Writes "warning: <message>" to standard error.
void warn_to_stderr(std::string_view message);

PairCounts count_pairs(const MonoCorpus& corpus,
                       const ExclusionPolicy& policy = {},
                       PairCounting counting = PairCounting::sliding);

struct LearnResult {
  Codes codes;
  MonoCorpus rewritten;
};

/// Counts once, keeps pairs over the threshold, orders them by decreasing
/// frequency (ties by (left, right) byte order) and replays them on the input.
LearnResult learn(const MonoCorpus& corpus,
                  const LearnOptions& options = {},
                  const ExclusionPolicy& policy = {},
                  const WarningSink& warn = warn_to_stderr);

/// Replays rules in order. Each rule makes one left-to-right pass per line and
/// rewrites every non-overlapping adjacency "left right" into "left_right";
/// a token produced by a rule is not revisited by that same rule.
MonoCorpus apply(const MonoCorpus& corpus,
                 const Codes& codes,
                 const WarningSink& warn = warn_to_stderr);

/// Replays rules in reverse order, splitting tokens equal to "left_right".
MonoCorpus unapply(const MonoCorpus& corpus, const Codes& codes);

/// Codes file: "#vnbpe:v1\tmin_freq=<k>" then "left\tright\tfrequency" per rule.
void write_codes(std::ostream& out, const Codes& codes);
Codes read_codes(std::istream& in);
void save_codes(const std::string& path, const Codes& codes);
Codes load_codes(const std::string& path);

}  // namespace subseg::vnbpe
