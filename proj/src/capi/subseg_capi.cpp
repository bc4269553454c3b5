#include "subseg.h"

#include <cstdlib>
#include <cstring>
#include <mutex>
#include <new>
#include <sstream>
#include <string>

#include "subseg/attn.hpp"
#include "subseg/augment.hpp"
#include "subseg/bpe.hpp"
#include "subseg/corpus.hpp"
#include "subseg/error.hpp"
#include "subseg/text.hpp"
#include "subseg/vnbpe.hpp"

struct subseg_corpus {
  subseg::MonoCorpus value;
};

struct subseg_parallel {
  subseg::ParallelCorpus value;
};

struct subseg_vnbpe_codes {
  subseg::vnbpe::Codes value;
};

struct subseg_bpe_codes {
  subseg::bpe::Codes value;
};

namespace {

thread_local std::string last_error;

std::mutex warning_mutex;
subseg_warning_fn warning_fn = nullptr;
void* warning_user_data = nullptr;

void emit_warning(std::string_view message) {
  subseg_warning_fn fn;
  void* user_data;
  {
    std::lock_guard lock(warning_mutex);
    fn = warning_fn;
    user_data = warning_user_data;
  }
  if (fn)
    fn(std::string(message).c_str(), user_data);
  else
    subseg::vnbpe::warn_to_stderr(message);
}

int status_for(subseg::ErrorCode code) {
  using subseg::ErrorCode;
  switch (code) {
    case ErrorCode::io: return SUBSEG_ERR_IO;
    case ErrorCode::decode: return SUBSEG_ERR_DECODE;
    case ErrorCode::alignment: return SUBSEG_ERR_ALIGNMENT;
    case ErrorCode::config: return SUBSEG_ERR_CONFIG;
    case ErrorCode::range: return SUBSEG_ERR_RANGE;
    case ErrorCode::format: return SUBSEG_ERR_FORMAT;
    case ErrorCode::vocabulary: return SUBSEG_ERR_VOCABULARY;
    case ErrorCode::dimension: return SUBSEG_ERR_DIMENSION;
    case ErrorCode::numeric: return SUBSEG_ERR_NUMERIC;
    case ErrorCode::invalid_argument: return SUBSEG_ERR_INVALID_ARGUMENT;
  }
  return SUBSEG_ERR_INTERNAL;
}

template <typename F>
int guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return SUBSEG_OK;
  } catch (const subseg::Error& e) {
    last_error = e.what();
    return status_for(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SUBSEG_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SUBSEG_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return SUBSEG_ERR_INTERNAL;
  }
}

void require(const void* pointer, const char* name) {
  if (!pointer)
    throw subseg::Error(subseg::ErrorCode::invalid_argument, std::string(name) + " is NULL");
}

std::string optional_string(const char* value) {
  return value ? std::string(value) : std::string();
}

char* copy_string(const std::string& value) {
  auto* out = static_cast<char*>(std::malloc(value.size() + 1));
  if (!out)
    throw std::bad_alloc();
  std::memcpy(out, value.data(), value.size());
  out[value.size()] = '\0';
  return out;
}

template <typename Handle, typename Value>
Handle* wrap(Value&& value) {
  return new Handle{std::forward<Value>(value)};
}

}  // namespace

extern "C" {

const char* subseg_version(void) {
  return "1.0.0";
}

const char* subseg_last_error(void) {
  return last_error.c_str();
}

const char* subseg_status_name(int status) {
  switch (status) {
    case SUBSEG_OK: return "ok";
    case SUBSEG_ERR_IO: return "io";
    case SUBSEG_ERR_DECODE: return "decode";
    case SUBSEG_ERR_ALIGNMENT: return "alignment";
    case SUBSEG_ERR_CONFIG: return "config";
    case SUBSEG_ERR_RANGE: return "range";
    case SUBSEG_ERR_FORMAT: return "format";
    case SUBSEG_ERR_VOCABULARY: return "vocabulary";
    case SUBSEG_ERR_DIMENSION: return "dimension";
    case SUBSEG_ERR_NUMERIC: return "numeric";
    case SUBSEG_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case SUBSEG_ERR_INTERNAL: return "internal";
    default: return "unknown";
  }
}

void subseg_string_free(char* str) {
  std::free(str);
}

void subseg_set_warning_handler(subseg_warning_fn fn, void* user_data) {
  std::lock_guard lock(warning_mutex);
  warning_fn = fn;
  warning_user_data = user_data;
}

int subseg_corpus_read(const char* path, const char* lang, subseg_corpus** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = wrap<subseg_corpus>(subseg::read_mono(path, optional_string(lang)));
  });
}

int subseg_corpus_from_text(const char* text, size_t length, const char* lang, subseg_corpus** out) {
  return guarded([&] {
    require(out, "out");
    if (length > 0)
      require(text, "text");
    *out = wrap<subseg_corpus>(
        subseg::parse_mono(std::string_view(text ? text : "", length), optional_string(lang)));
  });
}

int subseg_corpus_write(const subseg_corpus* corpus, const char* path) {
  return guarded([&] {
    require(corpus, "corpus");
    require(path, "path");
    subseg::write_mono(path, corpus->value);
  });
}

int subseg_corpus_to_text(const subseg_corpus* corpus, char** text, size_t* length) {
  return guarded([&] {
    require(corpus, "corpus");
    require(text, "text");
    const std::string serialized = subseg::serialize(corpus->value);
    *text = copy_string(serialized);
    if (length)
      *length = serialized.size();
  });
}

size_t subseg_corpus_size(const subseg_corpus* corpus) {
  return corpus ? corpus->value.size() : 0;
}

const char* subseg_corpus_lang(const subseg_corpus* corpus) {
  return corpus ? corpus->value.lang.c_str() : "";
}

void subseg_corpus_free(subseg_corpus* corpus) {
  delete corpus;
}

int subseg_parallel_read(const char* src_path, const char* tgt_path, const char* src_lang,
                         const char* tgt_lang, subseg_parallel** out) {
  return guarded([&] {
    require(src_path, "src_path");
    require(tgt_path, "tgt_path");
    require(out, "out");
    *out = wrap<subseg_parallel>(subseg::read_parallel(src_path, tgt_path, optional_string(src_lang),
                                                       optional_string(tgt_lang)));
  });
}

int subseg_parallel_from_corpora(const subseg_corpus* source, const subseg_corpus* target,
                                 subseg_parallel** out) {
  return guarded([&] {
    require(source, "source");
    require(target, "target");
    require(out, "out");
    *out = wrap<subseg_parallel>(subseg::zip(source->value, target->value));
  });
}

int subseg_parallel_write(const subseg_parallel* corpus, const char* src_path, const char* tgt_path) {
  return guarded([&] {
    require(corpus, "corpus");
    require(src_path, "src_path");
    require(tgt_path, "tgt_path");
    subseg::write_parallel(src_path, tgt_path, corpus->value);
  });
}

int subseg_parallel_side(const subseg_parallel* corpus, int side, subseg_corpus** out) {
  return guarded([&] {
    require(corpus, "corpus");
    require(out, "out");
    if (side != 0 && side != 1)
      throw subseg::Error(subseg::ErrorCode::invalid_argument, "side must be 0 or 1");
    *out = wrap<subseg_corpus>(side == 0 ? subseg::source_side(corpus->value)
                                         : subseg::target_side(corpus->value));
  });
}

size_t subseg_parallel_size(const subseg_parallel* corpus) {
  return corpus ? corpus->value.size() : 0;
}

void subseg_parallel_free(subseg_parallel* corpus) {
  delete corpus;
}

int subseg_normalize(const subseg_corpus* corpus, subseg_corpus** out) {
  return guarded([&] {
    require(corpus, "corpus");
    require(out, "out");
    *out = wrap<subseg_corpus>(subseg::text::normalize(corpus->value));
  });
}

namespace {

subseg_stats to_c(const subseg::text::StatsReport& report) {
  return {report.sentence_count, report.token_count, report.type_count, report.blank_count,
          report.duplicate_count};
}

}  // namespace

int subseg_corpus_stats(const subseg_corpus* corpus, subseg_stats* out) {
  return guarded([&] {
    require(corpus, "corpus");
    require(out, "out");
    *out = to_c(subseg::text::stats(corpus->value));
  });
}

int subseg_parallel_stats(const subseg_parallel* corpus, subseg_stats* out) {
  return guarded([&] {
    require(corpus, "corpus");
    require(out, "out");
    *out = to_c(subseg::text::stats(corpus->value));
  });
}

subseg_vnbpe_options subseg_vnbpe_default_options(void) {
  return {2, 0, 0};
}

int subseg_vnbpe_learn(const subseg_corpus* corpus, const subseg_vnbpe_options* options,
                       subseg_vnbpe_codes** codes, subseg_corpus** rewritten) {
  return guarded([&] {
    require(corpus, "corpus");
    require(codes, "codes");
    const subseg_vnbpe_options opts = options ? *options : subseg_vnbpe_default_options();
    subseg::vnbpe::LearnOptions learn_options;
    learn_options.min_freq = opts.min_freq;
    learn_options.threshold = opts.strict_gt ? subseg::vnbpe::Threshold::greater_than
                                             : subseg::vnbpe::Threshold::at_least;
    learn_options.counting = opts.nonoverlap_count ? subseg::vnbpe::PairCounting::non_overlapping
                                                   : subseg::vnbpe::PairCounting::sliding;
    auto result = subseg::vnbpe::learn(corpus->value, learn_options, {}, emit_warning);
    auto* codes_handle = wrap<subseg_vnbpe_codes>(std::move(result.codes));
    if (rewritten) {
      try {
        *rewritten = wrap<subseg_corpus>(std::move(result.rewritten));
      } catch (...) {
        delete codes_handle;
        throw;
      }
    }
    *codes = codes_handle;
  });
}

int subseg_vnbpe_apply(const subseg_corpus* corpus, const subseg_vnbpe_codes* codes, subseg_corpus** out) {
  return guarded([&] {
    require(corpus, "corpus");
    require(codes, "codes");
    require(out, "out");
    *out = wrap<subseg_corpus>(subseg::vnbpe::apply(corpus->value, codes->value, emit_warning));
  });
}

int subseg_vnbpe_unapply(const subseg_corpus* corpus, const subseg_vnbpe_codes* codes,
                         subseg_corpus** out) {
  return guarded([&] {
    require(corpus, "corpus");
    require(codes, "codes");
    require(out, "out");
    *out = wrap<subseg_corpus>(subseg::vnbpe::unapply(corpus->value, codes->value));
  });
}

int subseg_vnbpe_codes_load(const char* path, subseg_vnbpe_codes** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = wrap<subseg_vnbpe_codes>(subseg::vnbpe::load_codes(path));
  });
}

int subseg_vnbpe_codes_save(const subseg_vnbpe_codes* codes, const char* path) {
  return guarded([&] {
    require(codes, "codes");
    require(path, "path");
    subseg::vnbpe::save_codes(path, codes->value);
  });
}

size_t subseg_vnbpe_codes_size(const subseg_vnbpe_codes* codes) {
  return codes ? codes->value.rules.size() : 0;
}

int subseg_vnbpe_codes_rule(const subseg_vnbpe_codes* codes, size_t index, const char** left,
                            const char** right, uint64_t* frequency) {
  return guarded([&] {
    require(codes, "codes");
    if (index >= codes->value.rules.size())
      throw subseg::Error(subseg::ErrorCode::range,
                          "rule " + std::to_string(index) + " of " +
                          std::to_string(codes->value.rules.size()));
    const auto& rule = codes->value.rules[index];
    if (left)
      *left = rule.left.c_str();
    if (right)
      *right = rule.right.c_str();
    if (frequency)
      *frequency = rule.frequency;
  });
}

void subseg_vnbpe_codes_free(subseg_vnbpe_codes* codes) {
  delete codes;
}

int subseg_bpe_learn(const subseg_corpus* corpus, uint64_t num_merges, subseg_bpe_codes** out) {
  return guarded([&] {
    require(corpus, "corpus");
    require(out, "out");
    *out = wrap<subseg_bpe_codes>(
        subseg::bpe::learn_bpe(subseg::bpe::count_words(corpus->value), num_merges));
  });
}

int subseg_bpe_segment(const subseg_corpus* corpus, const subseg_bpe_codes* codes, const char* joiner,
                       subseg_corpus** out) {
  return guarded([&] {
    require(corpus, "corpus");
    require(codes, "codes");
    require(out, "out");
    *out = wrap<subseg_corpus>(subseg::bpe::segment_corpus(
        corpus->value, codes->value, joiner ? std::string_view(joiner) : subseg::bpe::default_joiner));
  });
}

int subseg_bpe_desegment(const subseg_corpus* corpus, const char* joiner, subseg_corpus** out) {
  return guarded([&] {
    require(corpus, "corpus");
    require(out, "out");
    *out = wrap<subseg_corpus>(subseg::bpe::desegment(
        corpus->value, joiner ? std::string_view(joiner) : subseg::bpe::default_joiner));
  });
}

int subseg_bpe_codes_load(const char* path, subseg_bpe_codes** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = wrap<subseg_bpe_codes>(subseg::bpe::load_codes(path));
  });
}

int subseg_bpe_codes_save(const subseg_bpe_codes* codes, const char* path) {
  return guarded([&] {
    require(codes, "codes");
    require(path, "path");
    subseg::bpe::save_codes(path, codes->value);
  });
}

size_t subseg_bpe_codes_size(const subseg_bpe_codes* codes) {
  return codes ? codes->value.merges.size() : 0;
}

void subseg_bpe_codes_free(subseg_bpe_codes* codes) {
  delete codes;
}

int subseg_backtranslation(const subseg_corpus* mono_target, const subseg_corpus* translations,
                           subseg_parallel** out) {
  return guarded([&] {
    require(mono_target, "mono_target");
    require(translations, "translations");
    require(out, "out");
    *out = wrap<subseg_parallel>(
        subseg::augment::assemble_backtranslation(mono_target->value, translations->value));
  });
}

int subseg_mix(const subseg_parallel* original, const subseg_parallel* synthetic, int has_seed,
               uint64_t seed, subseg_parallel** out) {
  return guarded([&] {
    require(original, "original");
    require(synthetic, "synthetic");
    require(out, "out");
    std::optional<std::uint64_t> shuffle_seed;
    if (has_seed)
      shuffle_seed = seed;
    *out = wrap<subseg_parallel>(
        subseg::augment::mix_corpora(original->value, synthetic->value, shuffle_seed));
  });
}

int subseg_mix_source(const subseg_parallel* original, const subseg_corpus* target_mono,
                      const char* tag_template, subseg_parallel** out) {
  return guarded([&] {
    require(original, "original");
    require(target_mono, "target_mono");
    require(out, "out");
    const subseg::augment::TagTemplate tmpl(
        tag_template ? std::string(tag_template)
                     : std::string(subseg::augment::TagTemplate::default_pattern));
    *out = wrap<subseg_parallel>(
        subseg::augment::make_mix_source(original->value, target_mono->value, tmpl));
  });
}

int subseg_clean(const subseg_parallel* corpus, subseg_duplicate_key key, subseg_parallel** out,
                 subseg_clean_report* report) {
  return guarded([&] {
    require(corpus, "corpus");
    require(out, "out");
    subseg::augment::DuplicateKey dup;
    switch (key) {
      case SUBSEG_DUPLICATE_PAIR: dup = subseg::augment::DuplicateKey::pair; break;
      case SUBSEG_DUPLICATE_SOURCE: dup = subseg::augment::DuplicateKey::source; break;
      case SUBSEG_DUPLICATE_TARGET: dup = subseg::augment::DuplicateKey::target; break;
      default:
        throw subseg::Error(subseg::ErrorCode::invalid_argument, "unknown duplicate key");
    }
    auto result = subseg::augment::clean(corpus->value, dup);
    if (report)
      *report = {result.report.blank_removed, result.report.duplicate_removed};
    *out = wrap<subseg_parallel>(std::move(result.corpus));
  });
}

int subseg_subsample_corpus(const subseg_corpus* corpus, uint64_t k, uint64_t seed, subseg_corpus** out) {
  return guarded([&] {
    require(corpus, "corpus");
    require(out, "out");
    *out = wrap<subseg_corpus>(subseg::augment::subsample(corpus->value, {k, seed}));
  });
}

int subseg_subsample_parallel(const subseg_parallel* corpus, uint64_t k, uint64_t seed,
                              subseg_parallel** out) {
  return guarded([&] {
    require(corpus, "corpus");
    require(out, "out");
    *out = wrap<subseg_parallel>(subseg::augment::subsample(corpus->value, {k, seed}));
  });
}

int subseg_attncheck(uint64_t seed, uint32_t n, uint32_t dim, char** report, int* all_passed) {
  return guarded([&] {
    require(report, "report");
    const auto checks = subseg::attn::run_invariant_suite(seed, n, dim);
    std::ostringstream text;
    text.precision(6);
    text << std::scientific;
    bool ok = true;
    for (const auto& check : checks) {
      text << check.name << '=' << (check.passed ? "pass" : "fail") << '\n';
      text << check.name << ".value=" << check.value << '\n';
      ok = ok && check.passed;
    }
    *report = copy_string(text.str());
    if (all_passed)
      *all_passed = ok ? 1 : 0;
  });
}

}  // extern "C"
