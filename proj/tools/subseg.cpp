// subseg: command-line front end over the subseg C API.
//
// Every failure prints one line "code=<name> msg=<message>" to standard error and
// exits with the nonzero status code.

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "subseg.h"

namespace {

struct Failure : std::runtime_error {
  Failure(int status, const std::string& message) : std::runtime_error(message), status(status) {}
  int status;
};

void check(int status) {
  if (status != SUBSEG_OK)
    throw Failure(status, subseg_last_error());
}

struct CorpusDeleter {
  void operator()(subseg_corpus* p) const { subseg_corpus_free(p); }
};
struct ParallelDeleter {
  void operator()(subseg_parallel* p) const { subseg_parallel_free(p); }
};
struct VnCodesDeleter {
  void operator()(subseg_vnbpe_codes* p) const { subseg_vnbpe_codes_free(p); }
};
struct BpeCodesDeleter {
  void operator()(subseg_bpe_codes* p) const { subseg_bpe_codes_free(p); }
};
struct StringDeleter {
  void operator()(char* p) const { subseg_string_free(p); }
};

using Corpus = std::unique_ptr<subseg_corpus, CorpusDeleter>;
using Parallel = std::unique_ptr<subseg_parallel, ParallelDeleter>;
using VnCodes = std::unique_ptr<subseg_vnbpe_codes, VnCodesDeleter>;
using BpeCodes = std::unique_ptr<subseg_bpe_codes, BpeCodesDeleter>;
using CString = std::unique_ptr<char, StringDeleter>;

Corpus read_corpus(const std::string& path, const std::string& lang = {}) {
  subseg_corpus* raw = nullptr;
  check(subseg_corpus_read(path.c_str(), lang.c_str(), &raw));
  return Corpus(raw);
}

Parallel read_parallel(const std::string& src, const std::string& tgt, const std::string& src_lang,
                       const std::string& tgt_lang) {
  subseg_parallel* raw = nullptr;
  check(subseg_parallel_read(src.c_str(), tgt.c_str(), src_lang.c_str(), tgt_lang.c_str(), &raw));
  return Parallel(raw);
}

void write(const Corpus& corpus, const std::string& path) {
  check(subseg_corpus_write(corpus.get(), path.c_str()));
}

void write(const Parallel& corpus, const std::string& src, const std::string& tgt) {
  check(subseg_parallel_write(corpus.get(), src.c_str(), tgt.c_str()));
}

void print_stats(const subseg_stats& s, bool json) {
  if (json) {
    nlohmann::ordered_json j;
    j["sentence_count"] = s.sentence_count;
    j["token_count"] = s.token_count;
    j["type_count"] = s.type_count;
    j["blank_count"] = s.blank_count;
    j["duplicate_count"] = s.duplicate_count;
    std::cout << j.dump() << '\n';
    return;
  }
  std::cout << "sentence_count=" << s.sentence_count << '\n'
            << "token_count=" << s.token_count << '\n'
            << "type_count=" << s.type_count << '\n'
            << "blank_count=" << s.blank_count << '\n'
            << "duplicate_count=" << s.duplicate_count << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"subseg: subword segmentation and parallel-corpus augmentation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(subseg_version()));

  std::string input = "-";
  std::string output = "-";
  const auto add_io = [&](CLI::App* cmd) {
    cmd->add_option("-i,--input", input, "Input file, '-' for standard input")->capture_default_str();
    cmd->add_option("-o,--output", output, "Output file, '-' for standard output")->capture_default_str();
  };

  // normalize
  auto* normalize = app.add_subcommand("normalize", "NFC, quote/dash/digit substitution, whitespace cleanup");
  add_io(normalize);

  // stats
  auto* stats = app.add_subcommand("stats", "Corpus statistics as key=value lines");
  std::string stats_src, stats_tgt;
  bool stats_json = false;
  stats->add_option("-i,--input", input, "Monolingual input file");
  stats->add_option("--src", stats_src, "Source side of a parallel corpus");
  stats->add_option("--tgt", stats_tgt, "Target side of a parallel corpus");
  stats->add_flag("--json", stats_json, "Emit a single-line JSON object");

  // vnbpe
  std::string codes_path;
  auto* vn_learn = app.add_subcommand("vnbpe-learn", "Learn syllable merge rules");
  subseg_vnbpe_options vn_options = subseg_vnbpe_default_options();
  bool strict_gt = false;
  bool nonoverlap = false;
  std::string apply_out;
  vn_learn->add_option("-i,--input", input, "Input corpus")->capture_default_str();
  vn_learn->add_option("--codes", codes_path, "Output codes file")->required();
  vn_learn->add_option("--min-freq", vn_options.min_freq, "Minimum pair frequency")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  vn_learn->add_flag("--strict-gt", strict_gt, "Keep pairs with frequency > min-freq");
  vn_learn->add_flag("--nonoverlap-count", nonoverlap, "Count non-overlapping pairs only");
  vn_learn->add_option("--apply-out", apply_out, "Write the rewritten corpus here");

  auto* vn_apply = app.add_subcommand("vnbpe-apply", "Apply syllable merge rules");
  vn_apply->add_option("--codes", codes_path, "Codes file")->required();
  add_io(vn_apply);

  auto* vn_unapply = app.add_subcommand("vnbpe-unapply", "Undo syllable merges");
  vn_unapply->add_option("--codes", codes_path, "Codes file")->required();
  add_io(vn_unapply);

  // bpe
  std::string joiner = "@@";
  std::uint64_t merges = 0;
  auto* bpe_learn = app.add_subcommand("bpe-learn", "Learn character BPE merges");
  bpe_learn->add_option("-i,--input", input, "Input corpus")->capture_default_str();
  bpe_learn->add_option("--codes", codes_path, "Output codes file")->required();
  bpe_learn->add_option("--merges", merges, "Number of merge operations")->required();

  auto* bpe_apply = app.add_subcommand("bpe-apply", "Segment a corpus with BPE codes");
  bpe_apply->add_option("--codes", codes_path, "Codes file")->required();
  bpe_apply->add_option("--joiner", joiner, "Suffix on non-final pieces")->capture_default_str();
  add_io(bpe_apply);

  auto* bpe_deseg = app.add_subcommand("bpe-deseg", "Undo BPE segmentation");
  bpe_deseg->add_option("--joiner", joiner, "Suffix on non-final pieces")->capture_default_str();
  add_io(bpe_deseg);

  // augmentation
  std::string src_lang, tgt_lang, src_out, tgt_out;
  const auto add_langs = [&](CLI::App* cmd) {
    cmd->add_option("--src-lang", src_lang, "Source language code");
    cmd->add_option("--tgt-lang", tgt_lang, "Target language code");
  };
  const auto add_outputs = [&](CLI::App* cmd) {
    cmd->add_option("--src-out", src_out, "Source-side output file")->required();
    cmd->add_option("--tgt-out", tgt_out, "Target-side output file")->required();
  };

  std::string mono_path, trans_path;
  auto* backtrans = app.add_subcommand("backtrans", "Pair translations with their monolingual originals");
  backtrans->add_option("--mono", mono_path, "Target-language monolingual corpus")->required();
  backtrans->add_option("--trans", trans_path, "Its translations into the source language")->required();
  add_outputs(backtrans);
  add_langs(backtrans);

  std::string orig_src, orig_tgt, syn_src, syn_tgt;
  std::optional<std::uint64_t> seed;
  auto* mix = app.add_subcommand("mix", "Concatenate original and synthetic parallel data");
  mix->add_option("--orig-src", orig_src)->required();
  mix->add_option("--orig-tgt", orig_tgt)->required();
  mix->add_option("--syn-src", syn_src)->required();
  mix->add_option("--syn-tgt", syn_tgt)->required();
  mix->add_option("--seed", seed, "Shuffle the result with this seed");
  add_outputs(mix);
  add_langs(mix);

  std::string src_path, tgt_path;
  std::string tag_template = "__{lang}__";
  auto* mixsource = app.add_subcommand("mixsource", "Language-tagged parallel data plus identity pairs");
  mixsource->add_option("--src", src_path, "Source side")->required();
  mixsource->add_option("--tgt", tgt_path, "Target side")->required();
  mixsource->add_option("--mono", mono_path, "Target-language monolingual corpus")->required();
  mixsource->add_option("--template", tag_template, "Tag pattern containing {lang}")->capture_default_str();
  mixsource->add_option("--src-lang", src_lang, "Source language code")->required();
  mixsource->add_option("--tgt-lang", tgt_lang, "Target language code")->required();
  add_outputs(mixsource);

  std::string dedup = "pair";
  auto* clean = app.add_subcommand("clean", "Remove blank and duplicate pairs");
  clean->add_option("--src", src_path, "Source side")->required();
  clean->add_option("--tgt", tgt_path, "Target side")->required();
  clean->add_option("--dedup", dedup, "Duplicate key")
      ->capture_default_str()
      ->check(CLI::IsMember({"pair", "source", "target"}));
  add_outputs(clean);

  std::uint64_t k = 0;
  std::uint64_t subsample_seed = 0;
  auto* subsample = app.add_subcommand("subsample", "Seeded shuffle and take the first k lines");
  subsample->add_option("-i,--input", input, "Monolingual input")->capture_default_str();
  subsample->add_option("-o,--output", output, "Monolingual output")->capture_default_str();
  subsample->add_option("--src", src_path, "Source side (parallel mode)");
  subsample->add_option("--tgt", tgt_path, "Target side (parallel mode)");
  subsample->add_option("--src-out", src_out, "Source output (parallel mode)");
  subsample->add_option("--tgt-out", tgt_out, "Target output (parallel mode)");
  subsample->add_option("--k", k, "Number of lines to keep")->required()->check(CLI::PositiveNumber);
  subsample->add_option("--seed", subsample_seed, "Shuffle seed")->required();

  std::uint64_t attn_seed = 0;
  std::uint32_t attn_n = 4;
  std::uint32_t attn_dim = 4;
  auto* attncheck = app.add_subcommand("attncheck", "Run the attention forward-pass invariant suite");
  attncheck->add_option("--seed", attn_seed)->required();
  attncheck->add_option("--n", attn_n, "Source length")->capture_default_str()->check(CLI::PositiveNumber);
  attncheck->add_option("--dim", attn_dim, "Every model dimension")->capture_default_str()->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "code=invalid_argument msg=" << e.what() << '\n';
    return SUBSEG_ERR_INVALID_ARGUMENT;
  }

  try {
    if (*normalize) {
      auto corpus = read_corpus(input);
      subseg_corpus* out = nullptr;
      check(subseg_normalize(corpus.get(), &out));
      write(Corpus(out), output);
    } else if (*stats) {
      subseg_stats report{};
      if (!stats_src.empty() || !stats_tgt.empty()) {
        if (stats_src.empty() || stats_tgt.empty())
          throw Failure(SUBSEG_ERR_INVALID_ARGUMENT, "--src and --tgt must be given together");
        auto corpus = read_parallel(stats_src, stats_tgt, "", "");
        check(subseg_parallel_stats(corpus.get(), &report));
      } else {
        auto corpus = read_corpus(input);
        check(subseg_corpus_stats(corpus.get(), &report));
      }
      print_stats(report, stats_json);
    } else if (*vn_learn) {
      vn_options.strict_gt = strict_gt ? 1 : 0;
      vn_options.nonoverlap_count = nonoverlap ? 1 : 0;
      auto corpus = read_corpus(input);
      subseg_vnbpe_codes* codes = nullptr;
      subseg_corpus* rewritten = nullptr;
      check(subseg_vnbpe_learn(corpus.get(), &vn_options, &codes, apply_out.empty() ? nullptr : &rewritten));
      VnCodes codes_handle(codes);
      Corpus rewritten_handle(rewritten);
      check(subseg_vnbpe_codes_save(codes, codes_path.c_str()));
      if (!apply_out.empty())
        write(rewritten_handle, apply_out);
    } else if (*vn_apply || *vn_unapply) {
      subseg_vnbpe_codes* codes = nullptr;
      check(subseg_vnbpe_codes_load(codes_path.c_str(), &codes));
      VnCodes codes_handle(codes);
      auto corpus = read_corpus(input);
      subseg_corpus* out = nullptr;
      check(*vn_apply ? subseg_vnbpe_apply(corpus.get(), codes, &out)
                      : subseg_vnbpe_unapply(corpus.get(), codes, &out));
      write(Corpus(out), output);
    } else if (*bpe_learn) {
      auto corpus = read_corpus(input);
      subseg_bpe_codes* codes = nullptr;
      check(subseg_bpe_learn(corpus.get(), merges, &codes));
      BpeCodes handle(codes);
      check(subseg_bpe_codes_save(codes, codes_path.c_str()));
    } else if (*bpe_apply) {
      subseg_bpe_codes* codes = nullptr;
      check(subseg_bpe_codes_load(codes_path.c_str(), &codes));
      BpeCodes handle(codes);
      auto corpus = read_corpus(input);
      subseg_corpus* out = nullptr;
      check(subseg_bpe_segment(corpus.get(), codes, joiner.c_str(), &out));
      write(Corpus(out), output);
    } else if (*bpe_deseg) {
      auto corpus = read_corpus(input);
      subseg_corpus* out = nullptr;
      check(subseg_bpe_desegment(corpus.get(), joiner.c_str(), &out));
      write(Corpus(out), output);
    } else if (*backtrans) {
      auto mono = read_corpus(mono_path, tgt_lang);
      auto trans = read_corpus(trans_path, src_lang);
      subseg_parallel* out = nullptr;
      check(subseg_backtranslation(mono.get(), trans.get(), &out));
      write(Parallel(out), src_out, tgt_out);
    } else if (*mix) {
      auto original = read_parallel(orig_src, orig_tgt, src_lang, tgt_lang);
      auto synthetic = read_parallel(syn_src, syn_tgt, src_lang, tgt_lang);
      subseg_parallel* out = nullptr;
      check(subseg_mix(original.get(), synthetic.get(), seed ? 1 : 0, seed.value_or(0), &out));
      write(Parallel(out), src_out, tgt_out);
    } else if (*mixsource) {
      auto original = read_parallel(src_path, tgt_path, src_lang, tgt_lang);
      auto mono = read_corpus(mono_path, tgt_lang);
      subseg_parallel* out = nullptr;
      check(subseg_mix_source(original.get(), mono.get(), tag_template.c_str(), &out));
      write(Parallel(out), src_out, tgt_out);
    } else if (*clean) {
      auto corpus = read_parallel(src_path, tgt_path, "", "");
      const subseg_duplicate_key key = dedup == "source"   ? SUBSEG_DUPLICATE_SOURCE
                                       : dedup == "target" ? SUBSEG_DUPLICATE_TARGET
                                                           : SUBSEG_DUPLICATE_PAIR;
      subseg_parallel* out = nullptr;
      subseg_clean_report report{};
      check(subseg_clean(corpus.get(), key, &out, &report));
      Parallel handle(out);
      write(handle, src_out, tgt_out);
      std::cout << "input_pairs=" << subseg_parallel_size(corpus.get()) << '\n'
                << "blank_removed=" << report.blank_removed << '\n'
                << "duplicate_removed=" << report.duplicate_removed << '\n'
                << "output_pairs=" << subseg_parallel_size(handle.get()) << '\n';
    } else if (*subsample) {
      if (!src_path.empty() || !tgt_path.empty()) {
        if (src_path.empty() || tgt_path.empty() || src_out.empty() || tgt_out.empty())
          throw Failure(SUBSEG_ERR_INVALID_ARGUMENT,
                        "parallel mode needs --src, --tgt, --src-out and --tgt-out");
        auto corpus = read_parallel(src_path, tgt_path, "", "");
        subseg_parallel* out = nullptr;
        check(subseg_subsample_parallel(corpus.get(), k, subsample_seed, &out));
        write(Parallel(out), src_out, tgt_out);
      } else {
        auto corpus = read_corpus(input);
        subseg_corpus* out = nullptr;
        check(subseg_subsample_corpus(corpus.get(), k, subsample_seed, &out));
        write(Corpus(out), output);
      }
    } else if (*attncheck) {
      char* report = nullptr;
      int passed = 0;
      check(subseg_attncheck(attn_seed, attn_n, attn_dim, &report, &passed));
      CString handle(report);
      std::cout << report << "all=" << (passed ? "pass" : "fail") << '\n';
      return passed ? 0 : 1;
    }
  } catch (const Failure& e) {
    std::cerr << "code=" << subseg_status_name(e.status) << " msg=" << e.what() << '\n';
    return e.status;
  } catch (const std::exception& e) {
    std::cerr << "code=internal msg=" << e.what() << '\n';
    return SUBSEG_ERR_INTERNAL;
  }
  return 0;
}
