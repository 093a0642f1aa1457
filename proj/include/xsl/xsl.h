/*
 * C interface to the cross-situational word learning library.
 *
 * Every object is an opaque handle released with its matching *_free
 * function. Functions that can fail return an xsl_status; on failure the
 * calling thread's xsl_last_error() describes what went wrong. Output
 * pointers are only written on success.
 */
#ifndef XSL_XSL_H
#define XSL_XSL_H

#include <stddef.h>
#include <stdint.h>

#if defined(XSL_BUILDING_LIBRARY)
#define XSL_API __attribute__((visibility("default")))
#else
#define XSL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum xsl_status {
  XSL_OK = 0,
  XSL_ERR_INVALID_ARGUMENT = 1, /* null handle, out-of-range index, misuse */
  XSL_ERR_CONFIG = 2,           /* bad parameters or config text */
  XSL_ERR_PARSE = 3,            /* malformed corpus, lexicon, or snapshot */
  XSL_ERR_IO = 4,               /* file could not be read or written */
  XSL_ERR_RUNTIME = 5           /* anything else, e.g. corpus too short */
} xsl_status;

typedef enum xsl_mechanism {
  XSL_MECHANISM_FAS = 0,
  XSL_MECHANISM_NO_COMP = 1,
  XSL_MECHANISM_REF_COMP = 2,
  XSL_MECHANISM_WORD_COMP = 3
} xsl_mechanism;

typedef enum xsl_similarity {
  XSL_SIMILARITY_COSINE = 0,
  XSL_SIMILARITY_DOT = 1
} xsl_similarity;

typedef enum xsl_length_condition {
  XSL_LENGTH_SHORT = 0, /* utterances of at most 3 words */
  XSL_LENGTH_LONG = 1   /* utterances of at least 5 words */
} xsl_length_condition;

typedef struct xsl_lexicon xsl_lexicon;
typedef struct xsl_corpus xsl_corpus;
typedef struct xsl_learner xsl_learner;
typedef struct xsl_record xsl_record;

typedef struct xsl_corpus_spec {
  size_t vocab_size;
  size_t features_min;
  size_t features_max;
  size_t feature_pool; /* 0 = automatic */
  double feature_skew;
  double zipf_exponent;
  size_t len_min;
  size_t len_max;
  size_t n_pairs;
  uint64_t seed;
} xsl_corpus_spec;

typedef struct xsl_learner_config {
  xsl_mechanism mechanism;
  xsl_similarity similarity;
  double lambda;
  double beta;
} xsl_learner_config;

typedef struct xsl_acq_summary {
  uint64_t t;
  double mean_acq;
  double prop_learned;
  size_t n_words;
  int empty; /* nonzero when no word was scored */
  size_t n_not_in_lexicon;
} xsl_acq_summary;

typedef struct xsl_run_info {
  const char* mechanism; /* owned by the record */
  const char* condition; /* e.g. "long-u2"; owned by the record */
  size_t n_checkpoints;
  xsl_acq_summary final_all;
  xsl_acq_summary final_low;
  xsl_acq_summary final_high;
} xsl_run_info;

XSL_API const char* xsl_version(void);
XSL_API const char* xsl_last_error(void);
XSL_API const char* xsl_status_string(xsl_status status);
XSL_API const char* xsl_mechanism_name(xsl_mechanism mechanism);
XSL_API xsl_status xsl_mechanism_parse(const char* name, xsl_mechanism* out);

/* Lexicons ---------------------------------------------------------------- */

XSL_API void xsl_corpus_spec_init(xsl_corpus_spec* spec);
XSL_API xsl_status xsl_lexicon_generate(const xsl_corpus_spec* spec, xsl_lexicon** out);
XSL_API xsl_status xsl_lexicon_load(const char* path, xsl_lexicon** out);
XSL_API xsl_status xsl_lexicon_save(const xsl_lexicon* lexicon, const char* path);
XSL_API size_t xsl_lexicon_size(const xsl_lexicon* lexicon);
XSL_API void xsl_lexicon_free(xsl_lexicon* lexicon);

/* Corpora ----------------------------------------------------------------- */

XSL_API xsl_status xsl_corpus_generate(const xsl_lexicon* lexicon, const xsl_corpus_spec* spec,
                                       xsl_corpus** out);
XSL_API xsl_status xsl_corpus_parse(const char* text, xsl_corpus** out);
XSL_API xsl_status xsl_corpus_load(const char* path, xsl_corpus** out);
/* labels may be NULL; otherwise referents are prefixed with their word. */
XSL_API xsl_status xsl_corpus_save(const xsl_corpus* corpus, const char* path,
                                   const xsl_lexicon* labels);
XSL_API size_t xsl_corpus_size(const xsl_corpus* corpus);
XSL_API xsl_status xsl_corpus_pair_shape(const xsl_corpus* corpus, size_t index,
                                         size_t* utterance_length, size_t* scene_size);
XSL_API xsl_status xsl_corpus_filter_length(const xsl_corpus* corpus,
                                            xsl_length_condition condition, xsl_corpus** out);
XSL_API xsl_status xsl_corpus_inject_uncertainty(const xsl_corpus* corpus, int level,
                                                 xsl_corpus** out);
XSL_API xsl_status xsl_corpus_word_frequency(const xsl_corpus* corpus, const char* word,
                                             size_t* out);
XSL_API void xsl_corpus_free(xsl_corpus* corpus);

/* Learners ---------------------------------------------------------------- */

/* Defaults: word-comp, cosine, lambda 1e-5, beta 0 (must be set). */
XSL_API void xsl_learner_config_init(xsl_learner_config* config);
/* beta = 10 x the lexicon's feature universe. */
XSL_API xsl_status xsl_learner_config_for_lexicon(xsl_learner_config* config,
                                                  const xsl_lexicon* lexicon);
XSL_API xsl_status xsl_learner_create(const xsl_learner_config* config, xsl_learner** out);
/* Processes pairs [begin, end) of the corpus in order. */
XSL_API xsl_status xsl_learner_process(xsl_learner* learner, const xsl_corpus* corpus,
                                       size_t begin, size_t end);
XSL_API xsl_status xsl_learner_meaning_prob(const xsl_learner* learner, const char* word,
                                            const char* feature, double* out);
XSL_API uint64_t xsl_learner_time(const xsl_learner* learner);
XSL_API xsl_status xsl_learner_save(const xsl_learner* learner, const char* path);
XSL_API xsl_status xsl_learner_load(const char* path, xsl_learner** out);
XSL_API void xsl_learner_free(xsl_learner* learner);

/* Evaluation -------------------------------------------------------------- */

XSL_API xsl_status xsl_evaluate(const xsl_learner* learner, const xsl_lexicon* lexicon,
                                double theta, xsl_acq_summary* out);
XSL_API xsl_status xsl_acq_score(const xsl_learner* learner, const xsl_lexicon* lexicon,
                                 const char* word, double* out);

/* Experiments ------------------------------------------------------------- */

/* config_text holds `key = value` lines; later lines win. Result files are
 * written when an `out` directory is given. */
XSL_API xsl_status xsl_experiment_run(const char* config_text, xsl_record** out);
/* path may be a record.json file or the directory holding one. */
XSL_API xsl_status xsl_record_load(const char* path, xsl_record** out);
XSL_API uint64_t xsl_record_digest(const xsl_record* record);
XSL_API double xsl_record_wall_clock(const xsl_record* record);
XSL_API size_t xsl_record_run_count(const xsl_record* record);
XSL_API xsl_status xsl_record_run_info(const xsl_record* record, size_t index, xsl_run_info* out);
XSL_API void xsl_record_free(xsl_record* record);

/* Comparison table as CSV text; release with xsl_string_free. */
XSL_API xsl_status xsl_compare(const xsl_record* const* records, size_t count, char** table);
XSL_API xsl_status xsl_emit_plots(const xsl_record* const* records, size_t count,
                                  const char* out_dir);
XSL_API void xsl_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* XSL_XSL_H */
