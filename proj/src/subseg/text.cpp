#include "subseg/text.hpp"

#include <set>
#include <unordered_set>

#include "subseg/unicode.hpp"

namespace subseg::text {

namespace {

unicode::code_point_t substitute(unicode::code_point_t cp) {
  switch (cp) {
    case 0x2018: case 0x2019: case 0x201A: case 0x201B: case 0x2032:
      return U'\'';
    case 0x201C: case 0x201D: case 0x201E: case 0x201F: case 0x2033: case 0x00AB: case 0x00BB:
      return U'"';
    case 0x2010: case 0x2011: case 0x2012: case 0x2013: case 0x2014: case 0x2015: case 0x2212:
      return U'-';
    default:
      break;
  }
  if (cp >= 0xFF10 && cp <= 0xFF19)
    return U'0' + (cp - 0xFF10);
  return cp;
}

}  // namespace

std::string normalize_line(std::string_view line) {
  unicode::decode(line);  // rejects ill-formed input before ICU would replace it
  const std::string composed = unicode::compose(line);
  std::string out;
  out.reserve(composed.size());
  bool pending_space = false;
  for (const auto cp : unicode::decode(composed)) {
    if (unicode::is_whitespace(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    unicode::append(out, substitute(cp));
  }
  return out;
}

MonoCorpus normalize(const MonoCorpus& corpus) {
  MonoCorpus out{corpus.lang, {}};
  out.lines.reserve(corpus.size());
  for (const auto& line : corpus.lines)
    out.lines.push_back(parse_line(normalize_line(serialize(line))));
  return out;
}

StatsReport stats(const MonoCorpus& corpus) {
  StatsReport report;
  std::unordered_set<std::string> types;
  std::set<Sentence> seen;
  for (const auto& line : corpus.lines) {
    ++report.sentence_count;
    report.token_count += line.size();
    types.insert(line.tokens.begin(), line.tokens.end());
    if (line.empty())
      ++report.blank_count;
    else if (!seen.insert(line).second)
      ++report.duplicate_count;
  }
  report.type_count = types.size();
  return report;
}

StatsReport stats(const ParallelCorpus& corpus) {
  StatsReport report;
  std::unordered_set<std::string> types;
  std::set<SentencePair> seen;
  for (const auto& pair : corpus.pairs) {
    ++report.sentence_count;
    report.token_count += pair.source.size() + pair.target.size();
    types.insert(pair.source.tokens.begin(), pair.source.tokens.end());
    types.insert(pair.target.tokens.begin(), pair.target.tokens.end());
    if (pair.source.empty() || pair.target.empty())
      ++report.blank_count;
    else if (!seen.insert(pair).second)
      ++report.duplicate_count;
  }
  report.type_count = types.size();
  return report;
}

}  // namespace subseg::text
