#include "subseg/corpus.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "subseg/error.hpp"
#include "subseg/unicode.hpp"

namespace subseg {

namespace {

std::vector<std::string> split_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    lines.push_back(std::move(line));
    line.clear();
  }
  return lines;
}

std::vector<Sentence> parse_all(const std::vector<std::string>& raw, const std::string& path) {
  std::vector<Sentence> out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    try {
      out.push_back(parse_line(raw[i]));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::decode)
        throw;
      throw Error(ErrorCode::decode, path + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

bool is_valid_token(std::string_view text) {
  if (text.empty())
    return false;
  try {
    for (const auto cp : unicode::decode(text)) {
      if (unicode::is_whitespace(cp))
        return false;
    }
  } catch (const Error&) {
    return false;
  }
  return true;
}

Sentence parse_line(std::string_view raw) {
  Sentence sentence;
  std::size_t offset = 0;
  std::size_t token_start = std::string_view::npos;
  for (const auto cp : unicode::decode(raw)) {
    const std::size_t width = cp < 0x80 ? 1 : cp < 0x800 ? 2 : cp < 0x10000 ? 3 : 4;
    if (unicode::is_whitespace(cp)) {
      if (token_start != std::string_view::npos) {
        sentence.tokens.emplace_back(raw.substr(token_start, offset - token_start));
        token_start = std::string_view::npos;
      }
    } else if (token_start == std::string_view::npos) {
      token_start = offset;
    }
    offset += width;
  }
  if (token_start != std::string_view::npos)
    sentence.tokens.emplace_back(raw.substr(token_start));
  return sentence;
}

std::string serialize(const Sentence& sentence) {
  std::string out;
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    if (i)
      out += ' ';
    out += sentence.tokens[i];
  }
  return out;
}

std::vector<std::string> read_lines(const std::string& path) {
  if (path == "-")
    return split_lines(std::cin);
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::io, "cannot open " + path + " for reading");
  auto lines = split_lines(in);
  if (in.bad())
    throw Error(ErrorCode::io, "read failure on " + path);
  return lines;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  auto emit = [&](std::ostream& out) {
    for (const auto& line : lines) {
      out << line << '\n';
    }
    out.flush();
    if (!out)
      throw Error(ErrorCode::io, "write failure on " + path);
  };
  if (path == "-") {
    emit(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error(ErrorCode::io, "cannot open " + path + " for writing");
  emit(out);
}

MonoCorpus parse_mono(std::string_view text, std::string lang) {
  std::istringstream in{std::string(text)};
  return MonoCorpus{std::move(lang), parse_all(split_lines(in), "<memory>")};
}

std::string serialize(const MonoCorpus& corpus) {
  std::string out;
  for (const auto& line : corpus.lines) {
    out += serialize(line);
    out += '\n';
  }
  return out;
}

MonoCorpus read_mono(const std::string& path, std::string lang) {
  return MonoCorpus{std::move(lang), parse_all(read_lines(path), path)};
}

void write_mono(const std::string& path, const MonoCorpus& corpus) {
  std::vector<std::string> lines;
  lines.reserve(corpus.lines.size());
  for (const auto& line : corpus.lines)
    lines.push_back(serialize(line));
  write_lines(path, lines);
}

ParallelCorpus read_parallel(const std::string& src_path,
                             const std::string& tgt_path,
                             std::string src_lang,
                             std::string tgt_lang) {
  auto source = read_mono(src_path, std::move(src_lang));
  auto target = read_mono(tgt_path, std::move(tgt_lang));
  return zip(source, target);
}

void write_parallel(const std::string& src_path,
                    const std::string& tgt_path,
                    const ParallelCorpus& corpus) {
  write_mono(src_path, source_side(corpus));
  write_mono(tgt_path, target_side(corpus));
}

ParallelCorpus zip(const MonoCorpus& source, const MonoCorpus& target) {
  if (source.size() != target.size())
    throw Error(ErrorCode::alignment,
                "line count mismatch: source has " + std::to_string(source.size()) +
                " lines, target has " + std::to_string(target.size()));
  ParallelCorpus corpus{source.lang, target.lang, {}};
  corpus.pairs.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i)
    corpus.pairs.push_back({source.lines[i], target.lines[i]});
  return corpus;
}

MonoCorpus source_side(const ParallelCorpus& corpus) {
  MonoCorpus out{corpus.src_lang, {}};
  out.lines.reserve(corpus.size());
  for (const auto& pair : corpus.pairs)
    out.lines.push_back(pair.source);
  return out;
}

MonoCorpus target_side(const ParallelCorpus& corpus) {
  MonoCorpus out{corpus.tgt_lang, {}};
  out.lines.reserve(corpus.size());
  for (const auto& pair : corpus.pairs)
    out.lines.push_back(pair.target);
  return out;
}

}  // namespace subseg
