#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "subseg/corpus.hpp"

namespace subseg::augment {

/// Language tag prepended to every token, e.g. "__{lang}__" renders "__vi__".
class TagTemplate {
public:
  static constexpr std::string_view placeholder = "{lang}";
  static constexpr std::string_view default_pattern = "__{lang}__";

  /// Throws Error(config) when the pattern lacks the placeholder.
  explicit TagTemplate(std::string pattern = std::string(default_pattern));

  const std::string& pattern() const noexcept { return _pattern; }

  /// Throws Error(config) when the rendered tag contains whitespace, the BPE
  /// joiner "@@" or the end-of-word marker.
  std::string render(std::string_view lang) const;

private:
  std::string _pattern;
};

Sentence tag(const Sentence& sentence, std::string_view rendered_tag);

/// Removes the rendered prefix from every token that carries it.
Sentence strip_tag(const Sentence& sentence, std::string_view rendered_tag);

/// pairs[i] = (translated_source[i], mono_target[i]).
ParallelCorpus assemble_backtranslation(const MonoCorpus& mono_target,
                                        const MonoCorpus& translated_source);

/// Original followed by synthetic; with a seed the result is a Fisher-Yates
/// permutation of that concatenation.
ParallelCorpus mix_corpora(const ParallelCorpus& original,
                           const ParallelCorpus& synthetic,
                           std::optional<std::uint64_t> shuffle_seed = std::nullopt);

/// Tagged original pairs followed by tagged identity pairs (line, line) built from
/// the target-language monolingual corpus.
ParallelCorpus make_mix_source(const ParallelCorpus& original,
                               const MonoCorpus& target_mono,
                               const TagTemplate& tag_template = TagTemplate{});

struct SubsampleSpec {
  std::uint64_t k = 0;
  std::uint64_t seed = 0;
};

/// Shuffles with the seeded generator and keeps the first k lines.
MonoCorpus subsample(const MonoCorpus& corpus, const SubsampleSpec& spec);
ParallelCorpus subsample(const ParallelCorpus& corpus, const SubsampleSpec& spec);

enum class DuplicateKey {
  pair,    // both sides equal
  source,  // source side equal
  target,  // target side equal
};

struct CleanReport {
  std::uint64_t blank_removed = 0;
  std::uint64_t duplicate_removed = 0;

  friend bool operator==(const CleanReport&, const CleanReport&) = default;
};

struct CleanResult {
  ParallelCorpus corpus;
  CleanReport report;
};

/// Drops pairs with a blank side, then later duplicates of an already kept pair.
CleanResult clean(const ParallelCorpus& corpus, DuplicateKey key = DuplicateKey::pair);

}  // namespace subseg::augment
