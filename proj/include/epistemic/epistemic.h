#ifndef EPISTEMIC_EPISTEMIC_H
#define EPISTEMIC_EPISTEMIC_H

/* C interface to the epistemic library. Objects are opaque handles released
 * with their *_free function; reports come back as JSON strings released
 * with epi_string_free. Every call returns an epi_status, and on failure
 * epi_last_error() describes the problem (per thread). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define EPI_API __declspec(dllexport)
#else
#define EPI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum epi_status {
  EPI_OK = 0,
  EPI_INVALID_ARGUMENT = 1,
  EPI_DIMENSION_MISMATCH = 2,
  EPI_UNSUPPORTED_DIMENSION = 3,
  EPI_DEGENERATE_SPAN = 4,
  EPI_NOT_CONVERGED = 5,
  EPI_PRECONDITION = 6,
  EPI_IO = 7,
  EPI_PARSE = 8,
  EPI_INTERNAL = 100
} epi_status;

typedef struct epi_state epi_state;
typedef struct epi_mub epi_mub;
typedef struct epi_model epi_model;
typedef struct epi_design epi_design;

EPI_API const char* epi_version(void);
/* Message of the last failed call on this thread, "" if none. */
EPI_API const char* epi_last_error(void);
EPI_API const char* epi_status_name(epi_status status);
EPI_API void epi_string_free(char* s);

/* Pure states. `re_im` holds 2 * dim doubles (re, im interleaved); the vector
 * is rescaled to unit norm. JSON form: {"dim": d, "amplitudes": [[re, im], ...]}. */
EPI_API epi_status epi_state_create(size_t dim, const double* re_im, epi_state** out);
EPI_API epi_status epi_state_from_json(const char* json, epi_state** out);
EPI_API epi_status epi_state_to_json(const epi_state* state, char** json);
EPI_API epi_status epi_state_dim(const epi_state* state, size_t* dim);
EPI_API epi_status epi_state_fidelity(const epi_state* a, const epi_state* b, double* out);
EPI_API void epi_state_free(epi_state* state);

/* Complete sets of mutually unbiased bases for d in {2, 4, 8, 9} or an odd prime. */
EPI_API epi_status epi_mub_generate(size_t dim, epi_mub** out);
EPI_API epi_status epi_mub_shape(const epi_mub* mub, size_t* dim, size_t* bases);
/* Copies vector `k` of basis `gamma` into a new state handle. */
EPI_API epi_status epi_mub_vector(const epi_mub* mub, size_t gamma, size_t k, epi_state** out);
/* Family with its verification report. */
EPI_API epi_status epi_mub_to_json(const epi_mub* mub, char** json);
EPI_API void epi_mub_free(epi_mub* mub);

/* Triple criterion on overlaps x1, x2, x3; *out is 1 or 0. */
EPI_API epi_status epi_pp_incompatible(double x1, double x2, double x3, double slack, int* out);
/* Overlaps, criterion and the optimized conjugate basis of (a, b, c).
 * Returns EPI_NOT_CONVERGED, with the report still written, when the search
 * did not converge. */
EPI_API epi_status epi_pp_check_json(const epi_state* a, const epi_state* b, const epi_state* c,
                                     size_t restarts, uint64_t seed, unsigned threads,
                                     char** json);

/* Bound report for dimension d; the noisy forms are added when with_noise != 0. */
EPI_API epi_status epi_bound_json(size_t dim, int with_noise, double eps1, double eps2,
                                  char** json);
EPI_API epi_status epi_noise_threshold(size_t dim, double* out);
EPI_API epi_status epi_threshold_json(size_t dim, char** json);

/* The 27-triple d = 3 certificate. Returns EPI_NOT_CONVERGED, with the
 * report still written, when some triple did not converge. */
EPI_API epi_status epi_d3_certificate_json(size_t restarts, uint64_t seed, unsigned threads,
                                           char** json);

/* Ontological models: the qubit sphere model or a discrete model in JSON. */
EPI_API epi_status epi_model_ks2(int order, epi_model** out);
EPI_API epi_status epi_model_from_json(const char* json, epi_model** out);
/* Born rule and overlap checks on `pairs` state pairs. The sphere model draws
 * Haar-random qubit pairs from `seed`; a discrete model uses its own
 * labelled quantum states (pairs = 0 means all of them). */
EPI_API epi_status epi_model_verify_json(const epi_model* model, size_t pairs, uint64_t seed,
                                         char** json);
EPI_API void epi_model_free(epi_model* model);

/* Experiment design (conjugate bases for every triple) and simulated runs.
 * `noise` is "none", "depolarizing:p" or "misalignment:sigma". */
EPI_API epi_status epi_design_build(size_t dim, size_t restarts, uint64_t seed, unsigned threads,
                                    epi_design** out);
EPI_API epi_status epi_design_simulate_json(const epi_design* design, const char* noise,
                                            uint64_t shots, uint64_t seed, unsigned threads,
                                            char** json);
EPI_API void epi_design_free(epi_design* design);

/* Random discrete instances of the two overlap inequalities. */
EPI_API epi_status epi_inequality_suite_json(size_t bonferroni_instances,
                                             size_t response_instances, size_t points,
                                             uint64_t seed, unsigned threads, char** json);

#ifdef __cplusplus
}
#endif

#endif
