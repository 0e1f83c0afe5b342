#ifndef RKINDEX_RKINDEX_H
#define RKINDEX_RKINDEX_H

/* C interface to the rkindex library. All objects are opaque handles owned
 * by the caller and released with the matching *_free function. Functions
 * returning rk_status leave a message in rk_last_error() on failure. */

#include <stddef.h>
#include <stdint.h>

#if defined(RKINDEX_BUILDING_LIBRARY)
#define RKINDEX_API __attribute__((visibility("default")))
#else
#define RKINDEX_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rk_status {
  RK_OK = 0,
  RK_E_INVALID_ARGUMENT = 1,
  RK_E_INSUFFICIENT_PAPERS = 2,
  RK_E_UNKNOWN_LABEL = 3,
  RK_E_PARSE = 4,
  RK_E_IO = 5,
  RK_E_INTERNAL = 6
} rk_status;

typedef enum rk_tie_policy { RK_TIE_ORDINAL = 0, RK_TIE_MIN_RANK = 1 } rk_tie_policy;

typedef enum rk_format { RK_FORMAT_CSV = 0, RK_FORMAT_JSON = 1 } rk_format;

typedef enum rk_split { RK_SPLIT_DOMESTIC = 0, RK_SPLIT_COLLABORATIVE = 1, RK_SPLIT_BOTH = 2 } rk_split;

typedef struct rk_config rk_config;
typedef struct rk_ensemble rk_ensemble;
typedef struct rk_corpus rk_corpus;
typedef struct rk_report rk_report;

/* Message for the last failed call on this thread; "" when none. */
RKINDEX_API const char* rk_last_error(void);
RKINDEX_API const char* rk_status_string(rk_status status);
RKINDEX_API const char* rk_version(void);

RKINDEX_API rk_status rk_parse_tie_policy(const char* text, rk_tie_policy* out);

/* --- primitives ---------------------------------------------------------- */

RKINDEX_API rk_status rk_geometric_mean(const double* xs, size_t n, double* out);
RKINDEX_API rk_status rk_rk_index(const uint64_t* rank1s, size_t n, double offset, double scale,
                                  double* out);
RKINDEX_API rk_status rk_lognormal_survival(double mu, double sigma, double c, double* out);

/* --- ensemble configuration ---------------------------------------------- */

RKINDEX_API rk_status rk_config_create(rk_config** out); /* paper grid defaults */
RKINDEX_API rk_status rk_config_load(const char* path, rk_config** out);
RKINDEX_API rk_status rk_config_parse(const char* text, rk_config** out);
RKINDEX_API rk_status rk_config_set_seed(rk_config* config, uint64_t seed);
RKINDEX_API uint64_t rk_config_seed(const rk_config* config);
RKINDEX_API uint64_t rk_config_total_papers(const rk_config* config);
/* 16 hex digits; valid until the config is modified or freed. */
RKINDEX_API const char* rk_config_hash(const rk_config* config);
RKINDEX_API void rk_config_free(rk_config* config);

/* --- synthetic ensembles ------------------------------------------------- */

/* Samples every series and builds the world list. Output does not depend on
 * jobs. */
RKINDEX_API rk_status rk_ensemble_generate(const rk_config* config, unsigned jobs,
                                           rk_tie_policy tie, rk_ensemble** out);
RKINDEX_API size_t rk_ensemble_series_count(const rk_ensemble* ensemble);
RKINDEX_API size_t rk_ensemble_world_size(const rk_ensemble* ensemble);
RKINDEX_API void rk_ensemble_free(rk_ensemble* ensemble);

typedef struct rk_indicator_params {
  size_t k;
  double offset;
  double scale;
  const double* xs; /* percentiles; NULL selects 10,1,0.5,0.1,0.01 */
  size_t n_xs;
  double local_share; /* > 0 adds the experimental fractional Rk column */
} rk_indicator_params;

RKINDEX_API void rk_indicator_params_default(rk_indicator_params* params);

typedef struct rk_experiment_options {
  size_t sample_size;  /* tables1: series sampled from the grid */
  double fig4_mu_min;  /* fig4: lowest grid mu used */
} rk_experiment_options;

RKINDEX_API void rk_experiment_options_default(rk_experiment_options* options);

/* params may be NULL for defaults throughout. */
RKINDEX_API rk_status rk_report_series(const rk_ensemble* ensemble, rk_report** out);
RKINDEX_API rk_status rk_report_values(const rk_ensemble* ensemble, rk_report** out);
/* n_labels == 0 reports every series. */
RKINDEX_API rk_status rk_report_ranks(const rk_ensemble* ensemble, const char* const* labels,
                                      size_t n_labels, const rk_indicator_params* params,
                                      rk_report** out);
RKINDEX_API rk_status rk_report_indicators(const rk_ensemble* ensemble,
                                           const rk_indicator_params* params, rk_report** out);
RKINDEX_API rk_status rk_report_ptop(const rk_ensemble* ensemble, const rk_indicator_params* params,
                                     rk_report** out);
/* id: tables1 | fig1 | fig2 | fig3 | fig4 */
RKINDEX_API rk_status rk_run_experiment(const char* id, const rk_ensemble* ensemble,
                                        const rk_indicator_params* params,
                                        const rk_experiment_options* options, rk_report** out);

/* --- real corpora -------------------------------------------------------- */

/* meta_path may be NULL. Malformed rows do not fail the load; inspect them
 * through rk_corpus_diagnostic. */
RKINDEX_API rk_status rk_corpus_load(const char* csv_path, const char* meta_path, rk_corpus** out);
RKINDEX_API size_t rk_corpus_size(const rk_corpus* corpus);
/* Row errors followed by metadata warnings. line is 0 for warnings. */
RKINDEX_API size_t rk_corpus_diagnostic_count(const rk_corpus* corpus);
RKINDEX_API size_t rk_corpus_error_count(const rk_corpus* corpus);
RKINDEX_API const char* rk_corpus_diagnostic(const rk_corpus* corpus, size_t index, size_t* line);
/* Countries by paper count; returns the total and fills up to cap entries. */
RKINDEX_API size_t rk_corpus_countries(const rk_corpus* corpus, const char** out, size_t cap);
RKINDEX_API void rk_corpus_free(rk_corpus* corpus);

/* wide = 1: one row per country with both splits side by side. */
RKINDEX_API rk_status rk_report_assess(const rk_corpus* corpus, const char* const* countries,
                                       size_t n_countries, rk_split split, int wide,
                                       rk_tie_policy tie, const rk_indicator_params* params,
                                       rk_report** out);
RKINDEX_API rk_status rk_report_assess_temporal(const rk_corpus* const* corpora, size_t n_corpora,
                                                const char* const* countries, size_t n_countries,
                                                rk_tie_policy tie,
                                                const rk_indicator_params* params, rk_report** out);
RKINDEX_API rk_status rk_report_corpus_ranks(const rk_corpus* corpus, const char* country,
                                             rk_split split, rk_tie_policy tie,
                                             const rk_indicator_params* params, rk_report** out);
RKINDEX_API rk_status rk_report_corpus_indicators(const rk_corpus* corpus,
                                                  const char* const* countries, size_t n_countries,
                                                  rk_split split, rk_tie_policy tie,
                                                  const rk_indicator_params* params,
                                                  rk_report** out);

/* --- reports ------------------------------------------------------------- */

RKINDEX_API const char* rk_report_name(const rk_report* report);
RKINDEX_API size_t rk_report_row_count(const rk_report* report);
/* Rendered text, valid until the next render call on the same report or
 * rk_report_free. CSV with comments prepends metadata as '# ' lines. */
RKINDEX_API const char* rk_report_render(rk_report* report, rk_format format, int with_comments);
RKINDEX_API const char* rk_report_sidecar(rk_report* report);
/* Metadata value as JSON text, or NULL when the key is absent. */
RKINDEX_API const char* rk_report_meta(rk_report* report, const char* key);
RKINDEX_API void rk_report_free(rk_report* report);

#ifdef __cplusplus
}
#endif

#endif
