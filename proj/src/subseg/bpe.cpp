#include "subseg/bpe.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <thread>
#include <tuple>

#include "subseg/error.hpp"
#include "subseg/threads.hpp"
#include "subseg/unicode.hpp"

namespace subseg::bpe {

namespace {

void validate_joiner(std::string_view joiner) {
  if (!is_valid_token(joiner))
    throw Error(ErrorCode::invalid_argument, "joiner must be non-empty and whitespace-free");
}

// Merges every non-overlapping occurrence of (left, right), scanning left to right.
std::vector<Symbol> merge_all(const std::vector<Symbol>& symbols, const Merge& merge) {
  std::vector<Symbol> out;
  out.reserve(symbols.size());
  for (std::size_t i = 0; i < symbols.size();) {
    if (i + 1 < symbols.size() && symbols[i] == merge.first && symbols[i + 1] == merge.second) {
      out.push_back(merge.first + merge.second);
      i += 2;
    } else {
      out.push_back(symbols[i++]);
    }
  }
  return out;
}

// Pair frequencies with an ordered view for picking the best pair.
class PairStats {
public:
  void adjust(const Merge& pair, std::int64_t delta) {
    if (delta == 0)
      return;
    auto [it, inserted] = _counts.try_emplace(pair, 0);
    if (!inserted)
      _ranked.erase({-it->second, pair});
    it->second += delta;
    if (it->second > 0)
      _ranked.insert({-it->second, pair});
    else
      _counts.erase(it);
  }

  bool empty() const { return _ranked.empty(); }

  std::pair<Merge, std::int64_t> best() const {
    const auto& [negative, pair] = *_ranked.begin();
    return {pair, -negative};
  }

private:
  std::map<Merge, std::int64_t> _counts;
  std::set<std::tuple<std::int64_t, Merge>> _ranked;
};

}  // namespace

WordCounts count_words(const MonoCorpus& corpus) {
  WordCounts counts;
  for (const auto& line : corpus.lines) {
    for (const auto& token : line.tokens)
      ++counts[token];
  }
  return counts;
}

std::vector<Symbol> split_word(std::string_view word) {
  auto symbols = unicode::split_code_points(word);
  if (!symbols.empty())
    symbols.back() += end_of_word;
  return symbols;
}

Codes learn_bpe(const WordCounts& word_counts, std::uint64_t num_merges) {
  struct Word {
    std::vector<Symbol> symbols;
    std::int64_t count;
  };
  std::vector<Word> words;
  words.reserve(word_counts.size());
  for (const auto& [word, count] : word_counts) {
    if (!is_valid_token(word))
      throw Error(ErrorCode::invalid_argument, "word is empty or contains whitespace");
    if (count == 0)
      throw Error(ErrorCode::invalid_argument, "word counts must be positive: " + word);
    if (count > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
      throw Error(ErrorCode::range, "word count too large: " + word);
    words.push_back({split_word(word), static_cast<std::int64_t>(count)});
  }

  PairStats stats;
  std::map<Merge, std::set<std::size_t>> where;
  const auto account = [&](std::size_t index, std::int64_t sign) {
    const auto& word = words[index];
    for (std::size_t i = 0; i + 1 < word.symbols.size(); ++i) {
      Merge pair{word.symbols[i], word.symbols[i + 1]};
      stats.adjust(pair, sign * word.count);
      if (sign > 0)
        where[pair].insert(index);
    }
  };
  for (std::size_t i = 0; i < words.size(); ++i)
    account(i, +1);

  Codes codes;
  codes.num_merges = num_merges;
  while (codes.merges.size() < num_merges && !stats.empty()) {
    auto [merge, frequency] = stats.best();
    if (frequency < 2)
      break;
    codes.merges.push_back(merge);

    auto node = where.extract(merge);
    for (const std::size_t index : node.mapped()) {
      account(index, -1);
      // Index entries for pairs that vanished from this word go stale; they are
      // harmless because a stale word no longer contains the pair.
      words[index].symbols = merge_all(words[index].symbols, merge);
      account(index, +1);
    }
  }
  return codes;
}

Segmenter::Segmenter(const Codes& codes) {
  for (std::size_t i = 0; i < codes.merges.size(); ++i)
    _ranks.try_emplace(codes.merges[i], i);
}

std::vector<Symbol> Segmenter::apply(std::string_view word) const {
  auto symbols = split_word(word);
  while (symbols.size() > 1) {
    std::size_t best_rank = std::numeric_limits<std::size_t>::max();
    const Merge* best = nullptr;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      auto it = _ranks.find(Merge{symbols[i], symbols[i + 1]});
      if (it != _ranks.end() && it->second < best_rank) {
        best_rank = it->second;
        best = &it->first;
      }
    }
    if (!best)
      break;
    symbols = merge_all(symbols, *best);
  }
  return symbols;
}

std::vector<std::string> Segmenter::segment(std::string_view word, std::string_view joiner) const {
  auto pieces = apply(word);
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (i + 1 < pieces.size())
      pieces[i] += joiner;
    else
      pieces[i].resize(pieces[i].size() - end_of_word.size());
  }
  return pieces;
}

std::vector<Symbol> apply_bpe(std::string_view word, const Codes& codes) {
  return Segmenter(codes).apply(word);
}

MonoCorpus segment_corpus(const MonoCorpus& corpus, const Codes& codes, std::string_view joiner) {
  validate_joiner(joiner);
  const Segmenter segmenter(codes);
  MonoCorpus out{corpus.lang, std::vector<Sentence>(corpus.size())};

  const auto run = [&](std::size_t begin, std::size_t end) {
    std::unordered_map<std::string, std::vector<std::string>> cache;
    for (std::size_t l = begin; l < end; ++l) {
      auto& tokens = out.lines[l].tokens;
      for (const auto& word : corpus.lines[l].tokens) {
        auto it = cache.find(word);
        if (it == cache.end())
          it = cache.emplace(word, segmenter.segment(word, joiner)).first;
        tokens.insert(tokens.end(), it->second.begin(), it->second.end());
      }
    }
  };

  const std::size_t n = corpus.size();
  const std::size_t workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(1, n / 2048));
  if (workers <= 1) {
    run(0, n);
    return out;
  }
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w)
    threads.emplace_back(run, n * w / workers, n * (w + 1) / workers);
  for (auto& t : threads)
    t.join();
  return out;
}

MonoCorpus desegment(const MonoCorpus& corpus, std::string_view joiner) {
  validate_joiner(joiner);
  MonoCorpus out{corpus.lang, {}};
  out.lines.reserve(corpus.size());
  for (const auto& line : corpus.lines) {
    Sentence sentence;
    std::string pending;
    bool open = false;
    for (const auto& token : line.tokens) {
      if (token.size() > joiner.size() && token.ends_with(joiner)) {
        pending.append(token, 0, token.size() - joiner.size());
        open = true;
        continue;
      }
      pending += token;
      sentence.tokens.push_back(std::move(pending));
      pending.clear();
      open = false;
    }
    if (open)
      sentence.tokens.push_back(std::move(pending));
    out.lines.push_back(std::move(sentence));
  }
  return out;
}

void write_codes(std::ostream& out, const Codes& codes) {
  out << "#bpe:v1\tnum_merges=" << codes.num_merges << '\n';
  for (const auto& [left, right] : codes.merges)
    out << left << ' ' << right << '\n';
}

Codes read_codes(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorCode::format, "codes file is empty");
  if (!line.empty() && line.back() == '\r')
    line.pop_back();
  constexpr std::string_view header = "#bpe:v1\tnum_merges=";
  if (!line.starts_with(header))
    throw Error(ErrorCode::format, "missing '#bpe:v1' header");
  Codes codes;
  const std::string_view value = std::string_view(line).substr(header.size());
  if (auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), codes.num_merges);
      ec != std::errc() || ptr != value.data() + value.size())
    throw Error(ErrorCode::format, "invalid num_merges in header: " + std::string(value));

  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    const auto space = line.find(' ');
    if (space == std::string::npos || line.find(' ', space + 1) != std::string::npos)
      throw Error(ErrorCode::format, "line " + std::to_string(number) + ": expected 'left right'");
    Merge merge{line.substr(0, space), line.substr(space + 1)};
    if (!is_valid_token(merge.first) || !is_valid_token(merge.second))
      throw Error(ErrorCode::format, "line " + std::to_string(number) + ": invalid symbol");
    codes.merges.push_back(std::move(merge));
  }
  if (codes.merges.size() > codes.num_merges)
    throw Error(ErrorCode::format, "more merges than num_merges in header");
  return codes;
}

void save_codes(const std::string& path, const Codes& codes) {
  if (path == "-") {
    write_codes(std::cout, codes);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error(ErrorCode::io, "cannot open " + path + " for writing");
  write_codes(out, codes);
  if (!out)
    throw Error(ErrorCode::io, "write failure on " + path);
}

Codes load_codes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::io, "cannot open " + path + " for reading");
  return read_codes(in);
}

}  // namespace subseg::bpe
