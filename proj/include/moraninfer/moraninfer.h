/* moraninfer: Moran-process simulation and Bayesian inference of relative fitness. */
#ifndef MORANINFER_H
#define MORANINFER_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MI_BUILDING_LIBRARY)
#    define MI_API __declspec(dllexport)
#  else
#    define MI_API __declspec(dllimport)
#  endif
#else
#  define MI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mi_status {
    MI_OK = 0,
    MI_ERR_INVALID_ARGUMENT = 1, /* null pointer, bad enum value */
    MI_ERR_DOMAIN = 2,           /* parameter outside its domain */
    MI_ERR_STRUCTURAL = 3,       /* update rule impossible on the topology */
    MI_ERR_NUMERICAL = 4,        /* degenerate posterior, boundary MAP */
    MI_ERR_PARSE = 5,            /* malformed JSON, prior string or event log */
    MI_ERR_BATCH = 6,            /* one trajectory of a batch failed; see mi_last_error */
    MI_ERR_INTERNAL = 7
} mi_status;

typedef enum mi_format { MI_FORMAT_CSV = 0, MI_FORMAT_JSON = 1 } mi_format;

/* Library version, e.g. "0.1.0". */
MI_API const char* mi_version(void);

/* Message of the last failed call on this thread; "" if none. */
MI_API const char* mi_last_error(void);

MI_API const char* mi_status_name(mi_status status);

/* ---- owned text buffers ---- */
typedef struct mi_buffer mi_buffer;

MI_API const char* mi_buffer_data(const mi_buffer* buffer);
MI_API size_t mi_buffer_size(const mi_buffer* buffer);
MI_API void mi_buffer_free(mi_buffer* buffer);

/* ---- scalar kernels ---- */

/* Probability that B fixates from b of N individuals, B at relative fitness r. */
MI_API mi_status mi_fixation_probability(double r, int64_t n, int64_t b, double* out);

/* One Moran step from (a, b) with fitness f_a, f_b. */
MI_API mi_status mi_moran_transition(int64_t a, int64_t b, double f_a, double f_b, double* up, double* down,
                                     double* stay);

/* Probability that the reproducer in pool (a, b) is type A when B has relative fitness r. */
MI_API mi_status mi_birth_probability_a(int64_t a, int64_t b, double r, double* out);

MI_API mi_status mi_bernoulli_kl(double p, double p_hat, double* out);
MI_API mi_status mi_beta_kl(double alpha_new, double beta_new, double alpha_old, double beta_old, double* out);

/* ---- event logs ---- */
typedef struct mi_event_log mi_event_log;

/* request: {"model":{..},"init":{..},"r":..,"seed":..,"max_steps":..} */
MI_API mi_status mi_simulate(const char* request_json, mi_event_log** out);

MI_API mi_status mi_event_log_parse(const char* text, size_t length, mi_event_log** out);
MI_API mi_status mi_event_log_serialize(const mi_event_log* log, mi_buffer** out);
MI_API size_t mi_event_log_event_count(const mi_event_log* log);
MI_API uint64_t mi_event_log_steps(const mi_event_log* log);
/* "fixated-a", "fixated-b" or "truncated". */
MI_API const char* mi_event_log_outcome(const mi_event_log* log);
/* Replays the log; MI_ERR_DOMAIN names the first inconsistent event. */
MI_API mi_status mi_event_log_check(const mi_event_log* log);
MI_API void mi_event_log_free(mi_event_log* log);

/* ---- inference ---- */

/* request: {"prior":"gamma:2,2" or {..},"grid":{"points","r_max","uniform_until"},"ci_mass",
 *           "pseudocount","sample_size","sample_seed"}
 * summary receives the summary record in `format`; posterior (optional, may be NULL)
 * receives the (r, density) CSV. */
MI_API mi_status mi_infer(const mi_event_log* log, const char* request_json, mi_format format, mi_buffer** summary,
                          mi_buffer** posterior);

/* ---- experiments ---- */

/* kind: "sweep", "histogram", "graph-compare", "random-graph", "info-gain", "fixation-check".
 * threads = 0 selects the hardware concurrency; results do not depend on it. */
MI_API mi_status mi_run_experiment(const char* kind, const char* request_json, mi_format format, unsigned threads,
                                   mi_buffer** out);

#ifdef __cplusplus
}
#endif

#endif /* MORANINFER_H */
