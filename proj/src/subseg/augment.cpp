#include "subseg/augment.hpp"

#include <numeric>
#include <set>
#include <span>

#include "subseg/error.hpp"
#include "subseg/rng.hpp"

namespace subseg::augment {

namespace {

void check_languages(const ParallelCorpus& a, const ParallelCorpus& b) {
  if (a.src_lang != b.src_lang || a.tgt_lang != b.tgt_lang)
    throw Error(ErrorCode::config,
                "language mismatch: " + a.src_lang + "-" + a.tgt_lang + " vs " + b.src_lang +
                "-" + b.tgt_lang);
}

std::vector<std::size_t> sample_indices(std::size_t size, const SubsampleSpec& spec) {
  if (spec.k == 0)
    throw Error(ErrorCode::range, "subsample size must be positive");
  if (spec.k > size)
    throw Error(ErrorCode::range,
                "cannot take " + std::to_string(spec.k) + " lines from a corpus of " +
                std::to_string(size));
  std::vector<std::size_t> order(size);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(spec.seed);
  shuffle(std::span(order), rng);
  order.resize(spec.k);
  return order;
}

}  // namespace

TagTemplate::TagTemplate(std::string pattern) : _pattern(std::move(pattern)) {
  if (_pattern.find(placeholder) == std::string::npos)
    throw Error(ErrorCode::config, "tag template '" + _pattern + "' lacks the {lang} placeholder");
}

std::string TagTemplate::render(std::string_view lang) const {
  std::string out = _pattern;
  for (auto pos = out.find(placeholder); pos != std::string::npos;
       pos = out.find(placeholder, pos + lang.size()))
    out.replace(pos, placeholder.size(), lang);
  if (!is_valid_token(out))
    throw Error(ErrorCode::config, "rendered tag '" + out + "' is empty or contains whitespace");
  if (out.find("@@") != std::string::npos || out.find("</w>") != std::string::npos)
    throw Error(ErrorCode::config, "rendered tag '" + out + "' collides with BPE markers");
  return out;
}

Sentence tag(const Sentence& sentence, std::string_view rendered_tag) {
  Sentence out;
  out.tokens.reserve(sentence.size());
  for (const auto& token : sentence.tokens)
    out.tokens.push_back(std::string(rendered_tag) + token);
  return out;
}

Sentence strip_tag(const Sentence& sentence, std::string_view rendered_tag) {
  Sentence out;
  out.tokens.reserve(sentence.size());
  for (const auto& token : sentence.tokens) {
    if (token.starts_with(rendered_tag) && token.size() > rendered_tag.size())
      out.tokens.push_back(token.substr(rendered_tag.size()));
    else
      out.tokens.push_back(token);
  }
  return out;
}

ParallelCorpus assemble_backtranslation(const MonoCorpus& mono_target,
                                        const MonoCorpus& translated_source) {
  if (mono_target.size() != translated_source.size())
    throw Error(ErrorCode::alignment,
                "line count mismatch: monolingual target has " + std::to_string(mono_target.size()) +
                " lines, translations have " + std::to_string(translated_source.size()));
  return zip(translated_source, mono_target);
}

ParallelCorpus mix_corpora(const ParallelCorpus& original,
                           const ParallelCorpus& synthetic,
                           std::optional<std::uint64_t> shuffle_seed) {
  check_languages(original, synthetic);
  ParallelCorpus out{original.src_lang, original.tgt_lang, original.pairs};
  out.pairs.insert(out.pairs.end(), synthetic.pairs.begin(), synthetic.pairs.end());
  if (shuffle_seed) {
    Rng rng(*shuffle_seed);
    shuffle(std::span(out.pairs), rng);
  }
  return out;
}

ParallelCorpus make_mix_source(const ParallelCorpus& original,
                               const MonoCorpus& target_mono,
                               const TagTemplate& tag_template) {
  if (target_mono.lang != original.tgt_lang)
    throw Error(ErrorCode::config,
                "monolingual corpus language '" + target_mono.lang +
                "' differs from target language '" + original.tgt_lang + "'");
  const std::string src_tag = tag_template.render(original.src_lang);
  const std::string tgt_tag = tag_template.render(original.tgt_lang);

  ParallelCorpus out{original.src_lang, original.tgt_lang, {}};
  out.pairs.reserve(original.size() + target_mono.size());
  for (const auto& pair : original.pairs)
    out.pairs.push_back({tag(pair.source, src_tag), tag(pair.target, tgt_tag)});
  for (const auto& line : target_mono.lines) {
    Sentence tagged = tag(line, tgt_tag);
    out.pairs.push_back({tagged, tagged});
  }
  return out;
}

MonoCorpus subsample(const MonoCorpus& corpus, const SubsampleSpec& spec) {
  MonoCorpus out{corpus.lang, {}};
  for (const auto i : sample_indices(corpus.size(), spec))
    out.lines.push_back(corpus.lines[i]);
  return out;
}

ParallelCorpus subsample(const ParallelCorpus& corpus, const SubsampleSpec& spec) {
  ParallelCorpus out{corpus.src_lang, corpus.tgt_lang, {}};
  for (const auto i : sample_indices(corpus.size(), spec))
    out.pairs.push_back(corpus.pairs[i]);
  return out;
}

CleanResult clean(const ParallelCorpus& corpus, DuplicateKey key) {
  CleanResult result{{corpus.src_lang, corpus.tgt_lang, {}}, {}};
  std::set<SentencePair> seen;
  for (const auto& pair : corpus.pairs) {
    if (pair.source.empty() || pair.target.empty()) {
      ++result.report.blank_removed;
      continue;
    }
    SentencePair probe;
    if (key != DuplicateKey::target)
      probe.source = pair.source;
    if (key != DuplicateKey::source)
      probe.target = pair.target;
    if (!seen.insert(std::move(probe)).second) {
      ++result.report.duplicate_removed;
      continue;
    }
    result.corpus.pairs.push_back(pair);
  }
  return result;
}

}  // namespace subseg::augment
