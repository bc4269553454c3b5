#ifndef SUBSEG_H
#define SUBSEG_H

/*
 * C interface to the subseg toolkit: corpus I/O, syllable merge learning,
 * character BPE, corpus augmentation and the attention forward-pass checks.
 *
 * Every object is an opaque handle released with its *_free function. Calls
 * return SUBSEG_OK or an error status; the message for the most recent failure
 * on the calling thread is available from subseg_last_error(). Output handles
 * are written only on success. Strings returned through char** are allocated
 * by the library and released with subseg_string_free().
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SUBSEG_BUILDING_LIBRARY)
#    define SUBSEG_API __declspec(dllexport)
#  else
#    define SUBSEG_API __declspec(dllimport)
#  endif
#else
#  define SUBSEG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum subseg_status {
  SUBSEG_OK = 0,
  SUBSEG_ERR_IO = 1,
  SUBSEG_ERR_DECODE = 2,
  SUBSEG_ERR_ALIGNMENT = 3,
  SUBSEG_ERR_CONFIG = 4,
  SUBSEG_ERR_RANGE = 5,
  SUBSEG_ERR_FORMAT = 6,
  SUBSEG_ERR_VOCABULARY = 7,
  SUBSEG_ERR_DIMENSION = 8,
  SUBSEG_ERR_NUMERIC = 9,
  SUBSEG_ERR_INVALID_ARGUMENT = 10,
  SUBSEG_ERR_INTERNAL = 11
} subseg_status;

typedef struct subseg_corpus subseg_corpus;          /* monolingual */
typedef struct subseg_parallel subseg_parallel;      /* aligned pairs */
typedef struct subseg_vnbpe_codes subseg_vnbpe_codes;
typedef struct subseg_bpe_codes subseg_bpe_codes;

/* Library version, e.g. "1.0.0". */
SUBSEG_API const char* subseg_version(void);

/* Message of the last failed call on this thread; "" when none. */
SUBSEG_API const char* subseg_last_error(void);

/* Short machine-readable name: "ok", "io", "decode", "alignment", ... */
SUBSEG_API const char* subseg_status_name(int status);

SUBSEG_API void subseg_string_free(char* str);

/* Receives library warnings; NULL restores the default (standard error). */
typedef void (*subseg_warning_fn)(const char* message, void* user_data);
SUBSEG_API void subseg_set_warning_handler(subseg_warning_fn fn, void* user_data);

/* ---- monolingual corpora ------------------------------------------------ */

/* path "-" reads standard input. lang may be NULL or "". */
SUBSEG_API int subseg_corpus_read(const char* path, const char* lang, subseg_corpus** out);
SUBSEG_API int subseg_corpus_from_text(const char* text, size_t length, const char* lang,
                                       subseg_corpus** out);
/* path "-" writes standard output. */
SUBSEG_API int subseg_corpus_write(const subseg_corpus* corpus, const char* path);
/* One line per sentence, LF-terminated. */
SUBSEG_API int subseg_corpus_to_text(const subseg_corpus* corpus, char** text, size_t* length);
SUBSEG_API size_t subseg_corpus_size(const subseg_corpus* corpus);
SUBSEG_API const char* subseg_corpus_lang(const subseg_corpus* corpus);
SUBSEG_API void subseg_corpus_free(subseg_corpus* corpus);

/* ---- parallel corpora --------------------------------------------------- */

/* Fails with SUBSEG_ERR_ALIGNMENT when line counts differ. */
SUBSEG_API int subseg_parallel_read(const char* src_path, const char* tgt_path,
                                    const char* src_lang, const char* tgt_lang,
                                    subseg_parallel** out);
SUBSEG_API int subseg_parallel_from_corpora(const subseg_corpus* source, const subseg_corpus* target,
                                            subseg_parallel** out);
SUBSEG_API int subseg_parallel_write(const subseg_parallel* corpus, const char* src_path,
                                     const char* tgt_path);
/* Copies one side out as a monolingual corpus; side 0 = source, 1 = target. */
SUBSEG_API int subseg_parallel_side(const subseg_parallel* corpus, int side, subseg_corpus** out);
SUBSEG_API size_t subseg_parallel_size(const subseg_parallel* corpus);
SUBSEG_API void subseg_parallel_free(subseg_parallel* corpus);

/* ---- normalization and statistics -------------------------------------- */

SUBSEG_API int subseg_normalize(const subseg_corpus* corpus, subseg_corpus** out);

typedef struct subseg_stats {
  uint64_t sentence_count;
  uint64_t token_count;
  uint64_t type_count;
  uint64_t blank_count;
  uint64_t duplicate_count;
} subseg_stats;

SUBSEG_API int subseg_corpus_stats(const subseg_corpus* corpus, subseg_stats* out);
SUBSEG_API int subseg_parallel_stats(const subseg_parallel* corpus, subseg_stats* out);

/* ---- syllable merge learning (underscore-joined tokens) ----------------- */

typedef struct subseg_vnbpe_options {
  uint32_t min_freq;        /* >= 1, default 2 */
  int strict_gt;            /* keep pairs with frequency > min_freq instead of >= */
  int nonoverlap_count;     /* count non-overlapping pairs instead of every adjacency */
} subseg_vnbpe_options;

SUBSEG_API subseg_vnbpe_options subseg_vnbpe_default_options(void);

/* rewritten may be NULL when only the codes are wanted. */
SUBSEG_API int subseg_vnbpe_learn(const subseg_corpus* corpus, const subseg_vnbpe_options* options,
                                  subseg_vnbpe_codes** codes, subseg_corpus** rewritten);
SUBSEG_API int subseg_vnbpe_apply(const subseg_corpus* corpus, const subseg_vnbpe_codes* codes,
                                  subseg_corpus** out);
SUBSEG_API int subseg_vnbpe_unapply(const subseg_corpus* corpus, const subseg_vnbpe_codes* codes,
                                    subseg_corpus** out);
SUBSEG_API int subseg_vnbpe_codes_load(const char* path, subseg_vnbpe_codes** out);
SUBSEG_API int subseg_vnbpe_codes_save(const subseg_vnbpe_codes* codes, const char* path);
SUBSEG_API size_t subseg_vnbpe_codes_size(const subseg_vnbpe_codes* codes);
/* Borrowed pointers valid until the codes are freed. */
SUBSEG_API int subseg_vnbpe_codes_rule(const subseg_vnbpe_codes* codes, size_t index,
                                       const char** left, const char** right, uint64_t* frequency);
SUBSEG_API void subseg_vnbpe_codes_free(subseg_vnbpe_codes* codes);

/* ---- character BPE ------------------------------------------------------ */

SUBSEG_API int subseg_bpe_learn(const subseg_corpus* corpus, uint64_t num_merges,
                                subseg_bpe_codes** out);
/* joiner NULL means "@@". */
SUBSEG_API int subseg_bpe_segment(const subseg_corpus* corpus, const subseg_bpe_codes* codes,
                                  const char* joiner, subseg_corpus** out);
SUBSEG_API int subseg_bpe_desegment(const subseg_corpus* corpus, const char* joiner,
                                    subseg_corpus** out);
SUBSEG_API int subseg_bpe_codes_load(const char* path, subseg_bpe_codes** out);
SUBSEG_API int subseg_bpe_codes_save(const subseg_bpe_codes* codes, const char* path);
SUBSEG_API size_t subseg_bpe_codes_size(const subseg_bpe_codes* codes);
SUBSEG_API void subseg_bpe_codes_free(subseg_bpe_codes* codes);

/* ---- augmentation ------------------------------------------------------- */

/* pairs[i] = (translations[i], mono_target[i]). */
SUBSEG_API int subseg_backtranslation(const subseg_corpus* mono_target,
                                      const subseg_corpus* translations, subseg_parallel** out);
/* Shuffled with seed when has_seed is nonzero, else original then synthetic. */
SUBSEG_API int subseg_mix(const subseg_parallel* original, const subseg_parallel* synthetic,
                          int has_seed, uint64_t seed, subseg_parallel** out);
/* tag_template NULL means "__{lang}__". */
SUBSEG_API int subseg_mix_source(const subseg_parallel* original, const subseg_corpus* target_mono,
                                 const char* tag_template, subseg_parallel** out);

typedef enum subseg_duplicate_key {
  SUBSEG_DUPLICATE_PAIR = 0,
  SUBSEG_DUPLICATE_SOURCE = 1,
  SUBSEG_DUPLICATE_TARGET = 2
} subseg_duplicate_key;

typedef struct subseg_clean_report {
  uint64_t blank_removed;
  uint64_t duplicate_removed;
} subseg_clean_report;

SUBSEG_API int subseg_clean(const subseg_parallel* corpus, subseg_duplicate_key key,
                            subseg_parallel** out, subseg_clean_report* report);
SUBSEG_API int subseg_subsample_corpus(const subseg_corpus* corpus, uint64_t k, uint64_t seed,
                                       subseg_corpus** out);
SUBSEG_API int subseg_subsample_parallel(const subseg_parallel* corpus, uint64_t k, uint64_t seed,
                                         subseg_parallel** out);

/* ---- attention forward-pass checks ------------------------------------- */

/* Runs the seeded invariant suite. The report holds "<check>=pass|fail" and
 * "<check>.value=<number>" lines; *all_passed is set to 1 when every check passed. */
SUBSEG_API int subseg_attncheck(uint64_t seed, uint32_t n, uint32_t dim, char** report,
                                int* all_passed);

#ifdef __cplusplus
}
#endif

#endif /* SUBSEG_H */
