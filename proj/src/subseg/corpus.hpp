#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace subseg {

/// Ordered whitespace-free tokens of one corpus line. A line with zero tokens is
/// a blank line; hygiene filtering removes those explicitly.
struct Sentence {
  std::vector<std::string> tokens;

  bool empty() const noexcept { return tokens.empty(); }
  std::size_t size() const noexcept { return tokens.size(); }

  friend bool operator==(const Sentence&, const Sentence&) = default;
  friend auto operator<=>(const Sentence&, const Sentence&) = default;
};

struct SentencePair {
  Sentence source;
  Sentence target;

  friend bool operator==(const SentencePair&, const SentencePair&) = default;
  friend auto operator<=>(const SentencePair&, const SentencePair&) = default;
};

struct MonoCorpus {
  std::string lang;
  std::vector<Sentence> lines;

  std::size_t size() const noexcept { return lines.size(); }
  friend bool operator==(const MonoCorpus&, const MonoCorpus&) = default;
};

struct ParallelCorpus {
  std::string src_lang;
  std::string tgt_lang;
  std::vector<SentencePair> pairs;

  std::size_t size() const noexcept { return pairs.size(); }
  friend bool operator==(const ParallelCorpus&, const ParallelCorpus&) = default;
};

/// True for a non-empty valid UTF-8 string without Unicode whitespace.
bool is_valid_token(std::string_view text);

/// Splits on runs of Unicode whitespace. Throws Error(decode) on ill-formed UTF-8.
Sentence parse_line(std::string_view raw);

/// Joins tokens with a single ASCII space.
std::string serialize(const Sentence& sentence);

/// Reads a UTF-8 text file as lines; "-" reads standard input. LF and CRLF
/// terminators are accepted; a missing final terminator is tolerated.
std::vector<std::string> read_lines(const std::string& path);

/// Writes every line followed by LF; "-" writes standard output.
void write_lines(const std::string& path, const std::vector<std::string>& lines);

MonoCorpus parse_mono(std::string_view text, std::string lang = {});
std::string serialize(const MonoCorpus& corpus);

MonoCorpus read_mono(const std::string& path, std::string lang = {});
void write_mono(const std::string& path, const MonoCorpus& corpus);

/// Throws Error(alignment) naming both line counts when the files differ in length.
ParallelCorpus read_parallel(const std::string& src_path,
                             const std::string& tgt_path,
                             std::string src_lang = {},
                             std::string tgt_lang = {});
void write_parallel(const std::string& src_path,
                    const std::string& tgt_path,
                    const ParallelCorpus& corpus);

/// Zips two monolingual corpora line by line.
ParallelCorpus zip(const MonoCorpus& source, const MonoCorpus& target);
MonoCorpus source_side(const ParallelCorpus& corpus);
MonoCorpus target_side(const ParallelCorpus& corpus);

}  // namespace subseg
