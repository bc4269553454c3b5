#pragma once

// Brute-force replay of the syllable merge procedure, written against text rather
// than token ids: pairs are counted with a map over every adjacency, rules are
// sorted by (-frequency, left, right), and each rule is a non-overlapping
// left-to-right string replacement over a delimited rendering of every line.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace oracle {

using Lines = std::vector<std::vector<std::string>>;

struct VnRule {
  std::string left;
  std::string right;
  unsigned long frequency;

  bool operator==(const VnRule&) const = default;
};

struct VnResult {
  std::vector<VnRule> rules;
  Lines lines;
};

inline std::string render(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens)
    out += "\x01" + t + "\x02";
  return out;
}

inline std::vector<std::string> unrender(const std::string& text) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto close = text.find('\x02', pos);
    tokens.push_back(text.substr(pos + 1, close - pos - 1));
    pos = close + 1;
  }
  return tokens;
}

inline void replace_all(std::string& text, const std::string& from, const std::string& to) {
  std::string out;
  std::size_t pos = 0;
  for (;;) {
    const auto hit = text.find(from, pos);
    if (hit == std::string::npos)
      break;
    out.append(text, pos, hit - pos);
    out += to;
    pos = hit + from.size();
  }
  out.append(text, pos, std::string::npos);
  text = std::move(out);
}

inline VnResult vnbpe_replay(const Lines& lines,
                             const std::set<std::string>& excluded,
                             unsigned long min_freq,
                             bool strict = false,
                             bool non_overlapping = false) {
  std::map<std::pair<std::string, std::string>, unsigned long> counts;
  for (const auto& line : lines) {
    std::size_t i = 0;
    while (i + 1 < line.size()) {
      if (excluded.count(line[i]) || excluded.count(line[i + 1])) {
        i += 1;
        continue;
      }
      counts[{line[i], line[i + 1]}] += 1;
      i += non_overlapping ? 2 : 1;
    }
  }
  std::vector<std::tuple<long, std::string, std::string>> kept;
  for (const auto& [pair, freq] : counts) {
    if (strict ? freq > min_freq : freq >= min_freq)
      kept.emplace_back(-static_cast<long>(freq), pair.first, pair.second);
  }
  std::sort(kept.begin(), kept.end());

  std::vector<std::string> text;
  for (const auto& line : lines)
    text.push_back(render(line));

  VnResult result;
  for (const auto& [neg, left, right] : kept) {
    result.rules.push_back({left, right, static_cast<unsigned long>(-neg)});
    const std::string original = "\x01" + left + "\x02\x01" + right + "\x02";
    const std::string replaced = "\x01" + left + "_" + right + "\x02";
    for (auto& t : text)
      replace_all(t, original, replaced);
  }
  for (const auto& t : text)
    result.lines.push_back(unrender(t));
  return result;
}

}  // namespace oracle
