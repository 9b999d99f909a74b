#ifndef PULSE_PULSE_H
#define PULSE_PULSE_H

#include <stddef.h>
#include <stdint.h>

#if defined(PULSE_BUILDING_LIBRARY)
#define PULSE_API __attribute__((visibility("default")))
#else
#define PULSE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pulse_status {
  PULSE_OK = 0,
  PULSE_INVALID_ARGUMENT = 1,
  PULSE_IO_ERROR = 2,
  PULSE_BAD_DATA = 3,
  PULSE_NOT_FOUND = 4,
  PULSE_CORRUPT_STORE = 5,
  PULSE_BIND_FAILURE = 6,
  PULSE_INTERNAL = 7
} pulse_status;

/* Message and fine-grained code (e.g. "unknown_label") of the last failure on
 * the calling thread. Valid until the next call on that thread. */
PULSE_API const char* pulse_last_error(void);
PULSE_API const char* pulse_last_error_code(void);

/* Releases strings returned through char** out-parameters. */
PULSE_API void pulse_free(char* s);

/* ---- store ------------------------------------------------------------ */

typedef struct pulse_store pulse_store;

PULSE_API pulse_status pulse_store_open(const char* dir, int create, pulse_store** out);
PULSE_API void pulse_store_close(pulse_store* store);
PULSE_API pulse_status pulse_store_version(const pulse_store* store, uint64_t* out);

typedef struct pulse_ingest_options {
  int raw_gkg;     /* 27-column GKG 2.1 input instead of the 6-column layout */
  int baseline;    /* unfiltered corpus stored as per-publisher counts */
  int deduplicate; /* normally 1 */
  unsigned jobs;   /* worker threads, 0 or 1 for single-threaded */
} pulse_ingest_options;

PULSE_API void pulse_ingest_options_init(pulse_ingest_options* options);

/* report_json receives the flat counter object. May be NULL. */
PULSE_API pulse_status pulse_ingest_gkg(pulse_store* store, const char* const* files, size_t n_files,
                                        const pulse_ingest_options* options, char** report_json);

PULSE_API pulse_status pulse_load_bias(pulse_store* store, const char* mbfc_csv, const char* allsides_csv,
                                       char** summary_json);

/* kind: cases, deaths, mobility, distancing, demographics or trends.
 * region may be NULL. */
PULSE_API pulse_status pulse_ingest_signal(pulse_store* store, const char* kind, const char* file,
                                           const char* region, char** summary_json);

/* CSV (lemma,mentions) or a JSON array when as_json is set. */
PULSE_API pulse_status pulse_keywords(pulse_store* store, size_t k, int as_json, char** out);

/* what: counts, bias, pearson, shares or ratios. from/to are YYYY-MM-DD or
 * NULL. Output is long-format date,label,value. */
PULSE_API pulse_status pulse_analyze(pulse_store* store, const char* what, const char* from, const char* to,
                                     int as_json, char** out);

/* granularity may be NULL (finest stored). */
PULSE_API pulse_status pulse_export(pulse_store* store, const char* metric, const char* granularity, int as_json,
                                    char** out);

/* ---- API -------------------------------------------------------------- */

/* Routes one GET target such as "/v1/series/articles?granularity=weekly"
 * against the current store version. */
PULSE_API pulse_status pulse_api_get(pulse_store* store, const char* target, int* http_status, char** body);

typedef struct pulse_server pulse_server;

/* bind is "host:port"; port 0 picks a free port. static_dir may be NULL. */
PULSE_API pulse_status pulse_server_start(const char* store_dir, const char* bind, const char* static_dir,
                                          pulse_server** out);
PULSE_API int pulse_server_port(const pulse_server* server);
PULSE_API void pulse_server_stop(pulse_server* server);

/* Blocking variant. on_ready (may be NULL) is called with the bound port
 * before requests are served. */
PULSE_API pulse_status pulse_serve(const char* store_dir, const char* bind, const char* static_dir,
                                   void (*on_ready)(int port, void* user), void* user);

/* ---- bias registry ---------------------------------------------------- */

typedef struct pulse_registry pulse_registry;

/* Either path may be NULL or empty. */
PULSE_API pulse_status pulse_registry_load(const char* mbfc_csv, const char* allsides_csv, pulse_registry** out);
PULSE_API void pulse_registry_free(pulse_registry* registry);
/* Returns a static label name such as "Left-center" or "Unrated". */
PULSE_API const char* pulse_registry_resolve(const pulse_registry* registry, const char* publisher);

/* ---- pure helpers ----------------------------------------------------- */

/* grade receives 'A'..'D' or 'F'. */
PULSE_API pulse_status pulse_grade_distancing(double reduction, char* grade);
PULSE_API pulse_status pulse_pearson(const double* x, size_t nx, const double* y, size_t ny, double* out);
/* hex receives 32 lowercase hex digits and a terminating NUL. */
PULSE_API pulse_status pulse_dedup_key(const char* publisher, const char* title, char hex[33]);
/* out has room for n values. */
PULSE_API pulse_status pulse_normalize_interest(const double* shares, size_t n, double* out);
PULSE_API pulse_status pulse_parse_gkg_line(const char* line, int raw_gkg, char** record_json);

#ifdef __cplusplus
}
#endif

#endif
