/* C interface to the contractive Markov system library.
 *
 * Conventions:
 *  - Every fallible call returns a cms_status; outputs are written through
 *    pointers only on CMS_OK.  cms_last_error() describes the most recent
 *    failure on the calling thread (valid until the next failing call there).
 *  - char** outputs receive malloc'd NUL-terminated buffers; release them
 *    with cms_string_free.  Handles are released with their *_free function;
 *    freeing NULL is a no-op.
 *  - Report strings are JSON documents with a fixed envelope:
 *    {"tool":{"name","version"},"operation":...,"params":{...},...}.
 *    Randomized operations take an explicit seed, and their output bytes do
 *    not depend on the thread count.
 */
#ifndef CMS_H
#define CMS_H

#include <stdint.h>

#if defined(_WIN32)
#define CMS_API __declspec(dllexport)
#else
#define CMS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cms_status {
  CMS_OK = 0,
  CMS_ERR_INVALID_ARGUMENT = 1,
  CMS_ERR_PARSE = 2,
  CMS_ERR_DOMAIN = 3,
  CMS_ERR_VALIDATION = 4,
  CMS_ERR_RESOURCE_LIMIT = 5,
  CMS_ERR_IO = 6,
  CMS_ERR_INTERNAL = 7
} cms_status;

typedef struct cms_system cms_system;         /* immutable system description */
typedef struct cms_measure cms_measure;       /* particle measure */
typedef struct cms_trajectory cms_trajectory; /* sampled chain path */

CMS_API const char* cms_version(void);
CMS_API const char* cms_last_error(void);
CMS_API void cms_string_free(char* s);

/* -- systems ------------------------------------------------------------ */

CMS_API cms_status cms_system_from_file(const char* path, cms_system** out);
CMS_API cms_status cms_system_from_text(const char* json_text, cms_system** out);
/* Built-in fixture by name; params_json may be NULL or a JSON object of
 * overrides (e.g. {"alpha":0.2,"delta":0.3} for example1). */
CMS_API cms_status cms_system_fixture(const char* name, const char* params_json,
                                      cms_system** out);
CMS_API void cms_system_free(cms_system* sys);
/* The system as a JSON document (parse -> emit is idempotent). */
CMS_API cms_status cms_system_emit(const cms_system* sys, char** json_out);
/* JSON array of {"name","description"} for every fixture. */
CMS_API cms_status cms_fixture_list(char** json_out);

/* Structural checks plus `samples` sampled points per vertex of partition /
 * probability / map-containment checks (0 = structural only).  *ok_out is 1
 * when no violations were found. */
CMS_API cms_status cms_system_validate(const cms_system* sys, long samples, uint64_t seed,
                                       int* ok_out, char** report_out);

/* Monte Carlo sup of the average one-step contraction ratio over same-vertex
 * pairs.  Estimates grow monotonically in `pairs` at fixed seed. */
CMS_API cms_status cms_contraction_estimate(const cms_system* sys, long pairs, uint64_t seed,
                                            int threads, double* sup_out, char** report_out);

/* -- measures ------------------------------------------------------------ */

CMS_API cms_status cms_measure_from_base_points(const cms_system* sys, cms_measure** out);
CMS_API cms_status cms_measure_read_csv(const cms_system* sys, const char* path,
                                        cms_measure** out);
CMS_API cms_status cms_measure_write_csv(const cms_system* sys, const cms_measure* m,
                                         const char* path);
CMS_API void cms_measure_free(cms_measure* m);
CMS_API long cms_measure_size(const cms_measure* m);

/* One adjoint update.  policy: "split" (deterministic splitting, systematic
 * resampling only past `budget`) or "resample" (always `budget` draws). */
CMS_API cms_status cms_apply_u_star(const cms_system* sys, const cms_measure* in,
                                    const char* policy, long budget, uint64_t seed, int threads,
                                    cms_measure** out);

/* Iterate the adjoint from the base-point measure; the report carries panel
 * integrals, first moments and weak-star changes per iteration. */
CMS_API cms_status cms_estimate_invariant(const cms_system* sys, long particles, int iterations,
                                          const char* policy, uint64_t seed, int threads,
                                          cms_measure** measure_out, char** report_out);

/* mode: "auto", "panel" or "w1". */
CMS_API cms_status cms_weakstar_distance(const cms_system* sys, const cms_measure* a,
                                         const cms_measure* b, const char* mode, double* out);

CMS_API cms_status cms_entropy(const cms_system* sys, const cms_measure* m, double* out);

/* -- trajectories --------------------------------------------------------- */

/* start_spec: "vertex:K" (base point of vertex K), a coordinate list
 * "0.25,1.5", or a word "0-1-2". */
CMS_API cms_status cms_simulate(const cms_system* sys, const char* start_spec, long steps,
                                uint64_t seed, cms_trajectory** out);
CMS_API void cms_trajectory_free(cms_trajectory* t);
CMS_API long cms_trajectory_length(const cms_trajectory* t);
CMS_API cms_status cms_trajectory_write_csv(const cms_system* sys, const cms_trajectory* t,
                                            const char* path);
/* Mean log step probability: the exponential decay rate of the traced
 * cylinder. */
CMS_API cms_status cms_trajectory_log_cylinder_rate(const cms_trajectory* t, double* out);
CMS_API cms_status cms_trajectory_empirical(const cms_system* sys, const cms_trajectory* t,
                                            long burn_in, cms_measure** out);

/* -- coding map ----------------------------------------------------------- */

/* Successive-approximation report for one word ("0-1-2..."): increments,
 * final point, optional tail bound.  rate/prefactor <= 0 mean "unset" (rate
 * falls back to the system's claimed rate). */
CMS_API cms_status cms_code_word(const cms_system* sys, const char* word, double rate,
                                 double prefactor, char** report_out);

/* Mean coding increments by depth over sampled words + fitted log-slope. */
CMS_API cms_status cms_decay_report(const cms_system* sys, const cms_measure* start,
                                    const int* depths, int n_depths, long words, uint64_t seed,
                                    int threads, char** report_out);

/* Endpoint ensemble vs coded ensemble after `depth` steps. */
CMS_API cms_status cms_pushforward_check(const cms_system* sys, const cms_measure* start,
                                         int depth, long samples, uint64_t seed, int threads,
                                         char** report_out);

/* Histogram of coded points over the viewport; optional PGM image and
 * nonzero-cell CSV.  y bounds are ignored for 1-d systems.  `start` may be
 * NULL (words then start at base points, vertex chosen uniformly). */
CMS_API cms_status cms_render(const cms_system* sys, const cms_measure* start, long points,
                              int depth, uint64_t seed, int width, int height, double x0,
                              double x1, double y0, double y1, const char* pgm_path,
                              const char* csv_path, char** report_out);

/* -- cylinder functionals -------------------------------------------------- */

CMS_API cms_status cms_cylinder_mass(const cms_system* sys, const cms_measure* m,
                                     const char* word, char** report_out);

/* Additivity + stationarity residuals over all admissible words up to
 * max_len. */
CMS_API cms_status cms_cylinder_consistency(const cms_system* sys, const cms_measure* m,
                                            int max_len, char** report_out);

/* Empirical next-edge conditionals vs probabilities at the coded word
 * point. */
CMS_API cms_status cms_conditional_check(const cms_system* sys, const cms_measure* m,
                                         int word_len, long words, uint64_t seed, int threads,
                                         char** report_out);

/* log probability of the last edge at the coded prefix point; -inf when the
 * word is not a path. */
CMS_API cms_status cms_energy_eval(const cms_system* sys, const char* word, double* out);

/* Stationary edge law / entropy of a Markov g-function.  q comes from
 * `q_csv_path` (E rows of E comma-separated entries) or, when NULL, from the
 * system's "q" parameter. */
CMS_API cms_status cms_gmeasure_oracle(const cms_system* sys, const char* q_csv_path,
                                       char** report_out);

/* Word-backend identity between the Markov operator and the transfer
 * operator with potential g, on sampled words, for each test function. */
CMS_API cms_status cms_ruelle_check(const cms_system* sys, const char* const* phi_texts,
                                    int n_phis, long points, uint64_t seed, int threads,
                                    char** report_out);

/* Suffix statistics of the particle words vs cylinder integrals (word
 * backends). */
CMS_API cms_status cms_natural_extension_check(const cms_system* sys, const cms_measure* m,
                                               int max_len, char** report_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CMS_H */
