/* C interface to the logmon library: opaque handles, status codes and
 * reports returned as heap strings (release with lm_string_free). */
#ifndef LOGMON_LOGMON_H
#define LOGMON_LOGMON_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(LOGMON_BUILDING_LIBRARY)
#define LM_API __attribute__((visibility("default")))
#else
#define LM_API
#endif

typedef enum lm_status {
  LM_OK = 0,
  LM_SELFTEST_FAILED = 1,
  LM_PARSE_ERROR = 2,
  LM_BUDGET_EXCEEDED = 3,
  LM_HYPOTHESIS_VIOLATED = 4,
  LM_INVALID_ARGUMENT = 5
} lm_status;

typedef enum lm_format { LM_FORMAT_JSON = 0, LM_FORMAT_TEXT = 1 } lm_format;

typedef struct lm_config lm_config;
typedef struct lm_monoid lm_monoid;
typedef struct lm_connection lm_connection;

LM_API const char* lm_version(void);

/* Message of the last failing call on this thread; empty when none. */
LM_API const char* lm_last_error(void);
LM_API void lm_string_free(char* s);

/* Defaults: prime 5, truncation 12, weight bound 10, JSON output, sequential shear. */
LM_API lm_config* lm_config_create(void);
LM_API void lm_config_destroy(lm_config* cfg);
LM_API lm_status lm_config_set_prime(lm_config* cfg, long prime);
LM_API lm_status lm_config_set_truncation(lm_config* cfg, long truncation);
LM_API lm_status lm_config_set_weight_bound(lm_config* cfg, long bound);
LM_API lm_status lm_config_set_format(lm_config* cfg, lm_format format);
LM_API lm_status lm_config_set_parallel(lm_config* cfg, int parallel);

LM_API lm_status lm_monoid_parse(const char* json, lm_monoid** out);
LM_API lm_status lm_monoid_load(const char* path, lm_monoid** out);
/* Faces, facets, units, group, semi-saturation, bounded saturation test, weighting. */
LM_API lm_status lm_monoid_analyze(const lm_monoid* m, const lm_config* cfg, char** report);
LM_API void lm_monoid_destroy(lm_monoid* m);

/* The truncation in the document wins over the configured default. */
LM_API lm_status lm_connection_parse(const char* json, const lm_config* cfg, lm_connection** out);
LM_API lm_status lm_connection_load(const char* path, const lm_config* cfg, lm_connection** out);
/* command: "exponents", "shear", "unipotent", "dl", "homotopy" or "logconv".
 * options: JSON object or NULL. Keys: "sigma" (exponent-set document), "face"
 * (generator indices), "all_faces" (bool), "target" and "l" (dl), "xi" and
 * "xi_prime" (homotopy), "qa", "q_eta" and "depth" (logconv). */
LM_API lm_status lm_connection_run(const lm_connection* c, const lm_config* cfg, const char* command,
                                   const char* options, char** report);
LM_API void lm_connection_destroy(lm_connection* c);

/* Oracle equivalence and invariant suite. inject_fault corrupts one fixture
 * coefficient, which must make the run fail. */
LM_API lm_status lm_selftest(const lm_config* cfg, int inject_fault, char** report);

#ifdef __cplusplus
}
#endif

#endif
