#include "subseg/vnbpe.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "subseg/error.hpp"
#include "subseg/threads.hpp"
#include "subseg/unicode.hpp"

namespace subseg::vnbpe {

namespace {

using TokenId = std::uint32_t;

constexpr std::uint64_t pair_key(TokenId left, TokenId right) {
  return (static_cast<std::uint64_t>(left) << 32) | right;
}

class Vocabulary {
public:
  TokenId intern(const std::string& text) {
    auto [it, inserted] = _ids.try_emplace(text, static_cast<TokenId>(_texts.size()));
    if (inserted)
      _texts.push_back(text);
    return it->second;
  }

  std::optional<TokenId> find(const std::string& text) const {
    auto it = _ids.find(text);
    if (it == _ids.end())
      return std::nullopt;
    return it->second;
  }

  const std::string& text(TokenId id) const { return _texts[id]; }
  std::size_t size() const { return _texts.size(); }

private:
  std::unordered_map<std::string, TokenId> _ids;
  std::vector<std::string> _texts;
};

// Corpus held as token ids plus, per token, the lines it may occur in.
// Posting lists are supersets: entries go stale once a token is merged away.
struct Workspace {
  std::string lang;
  Vocabulary vocab;
  std::vector<std::vector<TokenId>> lines;
  std::vector<std::vector<std::uint32_t>> postings;
  bool has_underscore = false;

  explicit Workspace(const MonoCorpus& corpus) : lang(corpus.lang) {
    lines.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto& tokens = corpus.lines[i].tokens;
      std::vector<TokenId> ids;
      ids.reserve(tokens.size());
      for (const auto& token : tokens) {
        const TokenId id = vocab.intern(token);
        if (id >= postings.size()) {
          postings.resize(id + 1);
          if (token.find(joiner) != std::string::npos)
            has_underscore = true;
        }
        auto& posting = postings[id];
        if (posting.empty() || posting.back() != i)
          posting.push_back(static_cast<std::uint32_t>(i));
        ids.push_back(id);
      }
      lines.push_back(std::move(ids));
    }
  }

  MonoCorpus to_corpus() const {
    MonoCorpus out{lang, {}};
    out.lines.reserve(lines.size());
    for (const auto& ids : lines) {
      Sentence sentence;
      sentence.tokens.reserve(ids.size());
      for (const TokenId id : ids)
        sentence.tokens.push_back(vocab.text(id));
      out.lines.push_back(std::move(sentence));
    }
    return out;
  }
};

// Returns whether anything was rewritten.
bool merge_line(std::vector<TokenId>& line, TokenId left, TokenId right, TokenId joined) {
  if (line.size() < 2)
    return false;
  std::size_t read = 0;
  std::size_t write = 0;
  bool merged = false;
  while (read < line.size()) {
    if (read + 1 < line.size() && line[read] == left && line[read + 1] == right) {
      line[write++] = joined;
      read += 2;
      merged = true;
    } else {
      line[write++] = line[read++];
    }
  }
  line.resize(write);
  return merged;
}

void replay(Workspace& ws, const Codes& codes) {
  std::vector<std::size_t> stamp(ws.lines.size(), 0);
  std::size_t generation = 0;
  for (const auto& rule : codes.rules) {
    ++generation;
    const auto left = ws.vocab.find(rule.left);
    const auto right = ws.vocab.find(rule.right);
    if (!left || !right)
      continue;
    const TokenId joined = ws.vocab.intern(rule.joined());
    if (joined >= ws.postings.size())
      ws.postings.resize(joined + 1);

    // Scan the shorter posting list; both tokens must be present for a merge.
    const TokenId probe =
        ws.postings[*left].size() <= ws.postings[*right].size() ? *left : *right;
    const std::vector<std::uint32_t> candidates = ws.postings[probe];
    auto& joined_posting = ws.postings[joined];
    for (const std::uint32_t line_id : candidates) {
      if (stamp[line_id] == generation)
        continue;
      stamp[line_id] = generation;
      if (merge_line(ws.lines[line_id], *left, *right, joined)) {
        if (joined_posting.empty() || joined_posting.back() != line_id)
          joined_posting.push_back(line_id);
      }
    }
  }
}

using IdCounts = std::unordered_map<std::uint64_t, std::uint64_t>;

void count_range(const Workspace& ws,
                 const std::vector<char>& excluded,
                 PairCounting counting,
                 std::size_t begin,
                 std::size_t end,
                 IdCounts& counts) {
  for (std::size_t l = begin; l < end; ++l) {
    const auto& line = ws.lines[l];
    std::size_t i = 0;
    while (i + 1 < line.size()) {
      const TokenId a = line[i];
      const TokenId b = line[i + 1];
      if (excluded[a] || excluded[b]) {
        ++i;
        continue;
      }
      ++counts[pair_key(a, b)];
      i += counting == PairCounting::sliding ? 1 : 2;
    }
  }
}

IdCounts count_ids(const Workspace& ws, const ExclusionPolicy& policy, PairCounting counting) {
  std::vector<char> excluded(ws.vocab.size());
  for (TokenId id = 0; id < ws.vocab.size(); ++id)
    excluded[id] = policy.excludes(ws.vocab.text(id));

  const std::size_t n = ws.lines.size();
  const std::size_t workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(1, n / 4096));
  if (workers <= 1) {
    IdCounts counts;
    count_range(ws, excluded, counting, 0, n, counts);
    return counts;
  }

  std::vector<IdCounts> partial(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    threads.emplace_back(
        [&, begin, end, w] { count_range(ws, excluded, counting, begin, end, partial[w]); });
  }
  for (auto& t : threads)
    t.join();
  IdCounts counts = std::move(partial[0]);
  for (std::size_t w = 1; w < workers; ++w) {
    for (const auto& [key, value] : partial[w])
      counts[key] += value;
  }
  return counts;
}

void warn_if_underscored(const Workspace& ws, const WarningSink& warn) {
  if (ws.has_underscore && warn)
    warn("input contains tokens with '_'; unapply will not restore them exactly");
}

}  // namespace

bool is_numeric_token(std::string_view token) {
  bool digit = false;
  for (const auto cp : unicode::decode(token)) {
    if (unicode::is_decimal_digit(cp))
      digit = true;
    else if (cp != U'.' && cp != U',')
      return false;
  }
  return digit;
}

bool is_symbol_token(std::string_view token) {
  const auto cps = unicode::decode(token);
  return !cps.empty() && std::all_of(cps.begin(), cps.end(), unicode::is_punctuation_or_symbol);
}

ExclusionPolicy::ExclusionPolicy() : _numeric(is_numeric_token) {}

ExclusionPolicy& ExclusionPolicy::add_separator(std::string token) {
  _separators.insert(std::move(token));
  return *this;
}

ExclusionPolicy& ExclusionPolicy::use_symbol_class(bool enabled) {
  _symbol_class = enabled;
  return *this;
}

ExclusionPolicy& ExclusionPolicy::set_numeric_rule(Predicate rule) {
  _numeric = std::move(rule);
  return *this;
}

bool ExclusionPolicy::is_separator(std::string_view token) const {
  if (_separators.contains(std::string(token)))
    return true;
  return _symbol_class && is_symbol_token(token);
}

bool ExclusionPolicy::is_numeric(std::string_view token) const {
  return _numeric && _numeric(token);
}

void warn_to_stderr(std::string_view message) {
  std::cerr << "warning: " << message << '\n';
}

PairCounts count_pairs(const MonoCorpus& corpus, const ExclusionPolicy& policy, PairCounting counting) {
  const Workspace ws(corpus);
  PairCounts out;
  for (const auto& [key, count] : count_ids(ws, policy, counting)) {
    out.emplace(Pair{ws.vocab.text(static_cast<TokenId>(key >> 32)),
                     ws.vocab.text(static_cast<TokenId>(key & 0xFFFFFFFFu))},
                count);
  }
  return out;
}

LearnResult learn(const MonoCorpus& corpus,
                  const LearnOptions& options,
                  const ExclusionPolicy& policy,
                  const WarningSink& warn) {
  if (options.min_freq < 1)
    throw Error(ErrorCode::invalid_argument, "min_freq must be at least 1");

  Workspace ws(corpus);
  warn_if_underscored(ws, warn);

  struct Candidate {
    TokenId left;
    TokenId right;
    std::uint64_t frequency;
  };
  std::vector<Candidate> kept;
  for (const auto& [key, count] : count_ids(ws, policy, options.counting)) {
    const bool keep = options.threshold == Threshold::at_least ? count >= options.min_freq
                                                               : count > options.min_freq;
    if (keep)
      kept.push_back({static_cast<TokenId>(key >> 32), static_cast<TokenId>(key & 0xFFFFFFFFu), count});
  }
  std::sort(kept.begin(), kept.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.frequency != b.frequency)
      return a.frequency > b.frequency;
    const auto& al = ws.vocab.text(a.left);
    const auto& bl = ws.vocab.text(b.left);
    if (al != bl)
      return al < bl;
    return ws.vocab.text(a.right) < ws.vocab.text(b.right);
  });

  LearnResult result;
  result.codes.min_freq = options.min_freq;
  result.codes.rules.reserve(kept.size());
  for (const auto& c : kept)
    result.codes.rules.push_back({ws.vocab.text(c.left), ws.vocab.text(c.right), c.frequency});

  replay(ws, result.codes);
  result.rewritten = ws.to_corpus();
  return result;
}

MonoCorpus apply(const MonoCorpus& corpus, const Codes& codes, const WarningSink& warn) {
  Workspace ws(corpus);
  warn_if_underscored(ws, warn);
  replay(ws, codes);
  return ws.to_corpus();
}

MonoCorpus unapply(const MonoCorpus& corpus, const Codes& codes) {
  // joined form -> ranks producing it, ascending
  std::unordered_map<std::string, std::vector<std::size_t>> ranks;
  for (std::size_t i = 0; i < codes.rules.size(); ++i)
    ranks[codes.rules[i].joined()].push_back(i);

  // Splitting a token never depends on its neighbours, so the reverse replay runs
  // per token: a piece split off by rule r can only be split again by a rule
  // with rank below r, since later ranks have already been replayed.
  std::unordered_map<std::string, std::vector<std::string>> cache;
  const auto split = [&](const std::string& token) -> const std::vector<std::string>& {
    if (auto it = cache.find(token); it != cache.end())
      return it->second;
    std::vector<std::pair<std::string, std::size_t>> pending{{token, codes.rules.size()}};
    std::vector<std::string> out;
    while (!pending.empty()) {
      auto [text, bound] = std::move(pending.back());
      pending.pop_back();
      const auto it = ranks.find(text);
      if (it == ranks.end() || it->second.front() >= bound) {
        out.push_back(std::move(text));
        continue;
      }
      const std::size_t r = *std::prev(std::lower_bound(it->second.begin(), it->second.end(), bound));
      pending.emplace_back(codes.rules[r].right, r);
      pending.emplace_back(codes.rules[r].left, r);
    }
    return cache.emplace(token, std::move(out)).first->second;
  };

  MonoCorpus out{corpus.lang, {}};
  out.lines.reserve(corpus.size());
  for (const auto& line : corpus.lines) {
    Sentence sentence;
    for (const auto& token : line.tokens) {
      const auto& parts = split(token);
      sentence.tokens.insert(sentence.tokens.end(), parts.begin(), parts.end());
    }
    out.lines.push_back(std::move(sentence));
  }
  return out;
}

void write_codes(std::ostream& out, const Codes& codes) {
  out << "#vnbpe:v1\tmin_freq=" << codes.min_freq << '\n';
  for (const auto& rule : codes.rules)
    out << rule.left << '\t' << rule.right << '\t' << rule.frequency << '\n';
}

Codes read_codes(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorCode::format, "codes file is empty");
  if (!line.empty() && line.back() == '\r')
    line.pop_back();
  constexpr std::string_view header = "#vnbpe:v1\tmin_freq=";
  if (!line.starts_with(header))
    throw Error(ErrorCode::format, "missing '#vnbpe:v1' header");
  Codes codes;
  const std::string_view value = std::string_view(line).substr(header.size());
  if (auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), codes.min_freq);
      ec != std::errc() || ptr != value.data() + value.size() || codes.min_freq < 1)
    throw Error(ErrorCode::format, "invalid min_freq in header: " + std::string(value));

  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    const auto first = line.find('\t');
    const auto second = first == std::string::npos ? first : line.find('\t', first + 1);
    if (second == std::string::npos || line.find('\t', second + 1) != std::string::npos)
      throw Error(ErrorCode::format, "line " + std::to_string(number) + ": expected left<TAB>right<TAB>frequency");
    MergeRule rule{line.substr(0, first), line.substr(first + 1, second - first - 1), 0};
    if (!is_valid_token(rule.left) || !is_valid_token(rule.right))
      throw Error(ErrorCode::format, "line " + std::to_string(number) + ": invalid token");
    const std::string_view freq = std::string_view(line).substr(second + 1);
    if (auto [ptr, ec] = std::from_chars(freq.data(), freq.data() + freq.size(), rule.frequency);
        ec != std::errc() || ptr != freq.data() + freq.size())
      throw Error(ErrorCode::format, "line " + std::to_string(number) + ": invalid frequency");
    codes.rules.push_back(std::move(rule));
  }
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

}  // namespace subseg::vnbpe
