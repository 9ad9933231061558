#ifndef CAPLAB_H
#define CAPLAB_H

/* C API of the capacity laboratory. Objects live behind opaque handles,
 * every call reports a status code, and the message of the last failure on
 * the calling thread is available via caplab_last_error(). Structured
 * results come back as JSON documents in malloc'd strings released with
 * caplab_string_free(). Subsets travel as lowercase hex masks ("0x1b",
 * bit i = point i); rationals as numerator/denominator integer pairs. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(CAPLAB_BUILD)
#define CAPLAB_API __declspec(dllexport)
#else
#define CAPLAB_API __declspec(dllimport)
#endif
#else
#define CAPLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum caplab_status {
    CAPLAB_OK = 0,
    CAPLAB_ERR_INVALID_ARGUMENT = 1,
    CAPLAB_ERR_SIZE_CAP = 2,
    CAPLAB_ERR_DEGENERATE_RESTRICTION = 3,
    CAPLAB_ERR_CONSTRUCTION_INFEASIBLE = 4,
    CAPLAB_ERR_SCENARIO_INVALID = 5,
    CAPLAB_ERR_INTERNAL = 6
} caplab_status;

typedef struct caplab_space caplab_space;
typedef struct caplab_capacity caplab_capacity;

/* Library version, static storage. */
CAPLAB_API const char* caplab_version(void);

/* Message of the most recent failure on this thread; "" when none. */
CAPLAB_API const char* caplab_last_error(void);

CAPLAB_API void caplab_string_free(char* s);

/* Uniform grid of `resolution` points covering [a_num/a_den, b_num/b_den]. */
CAPLAB_API caplab_status caplab_space_grid(size_t resolution, int64_t a_num, int64_t a_den,
                                           int64_t b_num, int64_t b_den, caplab_space** out);
CAPLAB_API void caplab_space_free(caplab_space* space);
CAPLAB_API size_t caplab_space_size(const caplab_space* space);

/* Builds a capacity from a JSON spec, the same schema scenario configs use,
 * e.g. {"kind":"huber","weights":["uniform"],"eps":[1,10],"delta":[1,20]}. */
CAPLAB_API caplab_status caplab_capacity_create(const caplab_space* space, const char* spec_json,
                                                caplab_capacity** out);
CAPLAB_API void caplab_capacity_free(caplab_capacity* capacity);

/* Evaluates the capacity on the subset encoded by mask_hex. */
CAPLAB_API caplab_status caplab_capacity_value(const caplab_capacity* capacity,
                                               const char* mask_hex, double* out);

/* Normalization/monotonicity, subadditivity and two-alternation checks on
 * the tabulated capacity; seed drives the sampled fallback on large grounds.
 * Returns a JSON document with one report per property. */
CAPLAB_API caplab_status caplab_check_properties(const caplab_capacity* capacity, uint64_t seed,
                                                 char** out_json);

/* Core emptiness with witness / cover certificate, as a JSON document. */
CAPLAB_API caplab_status caplab_core_nonempty(const caplab_capacity* capacity, char** out_json);

/* Minimal-capacity removal for the keep/remove problem on u with oscillation
 * bound eta at pair distances below scale. method: "exact", "greedy" or
 * "oracle". Returns the removal result as a JSON document. */
CAPLAB_API caplab_status caplab_min_removal(const caplab_capacity* capacity, const double* u,
                                            size_t u_len, double eta, int64_t scale_num,
                                            int64_t scale_den, const char* method,
                                            char** out_json);

/* Default config document for a scenario kind. */
CAPLAB_API caplab_status caplab_default_config(const char* kind, char** out_json);

/* Runs a scenario end to end: merges config_json (NULL = defaults) onto the
 * built-in defaults, computes, writes report files under out_dir ("json"
 * writes the JSON report, "csv" additionally writes row tables), and hands
 * back the report. has_seed != 0 makes `seed` override the config seed.
 * exit_code receives 0 (all scenario assertions hold) or 1 (assertion
 * failed); config problems surface as CAPLAB_ERR_SCENARIO_INVALID. */
CAPLAB_API caplab_status caplab_run_scenario(const char* kind, const char* config_json,
                                             const char* out_dir, const char* format,
                                             int has_seed, uint64_t seed, int* exit_code,
                                             char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* CAPLAB_H */
