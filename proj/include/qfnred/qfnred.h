/* Copyright the qfnred authors.
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the qfnred shared library. All objects are opaque handles
 * owned by the caller and released with the matching *_free function.
 * Functions that can fail return a qfnred_status; the message of the last
 * failure on the calling thread is available from qfnred_last_error().
 */

#ifndef QFNRED_H
#define QFNRED_H

#include <stddef.h>
#include <stdint.h>

#if defined(QFNRED_BUILDING_LIBRARY)
#define QFNRED_API __attribute__((visibility("default")))
#else
#define QFNRED_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Matches the process exit codes of the command-line tool. */
typedef enum qfnred_status {
  QFNRED_OK = 0,
  QFNRED_IO_ERROR = 1,
  QFNRED_VALIDATION_FAILURE = 2,
  QFNRED_ILL_POSED_FEEDBACK = 3,
  QFNRED_STRUCTURAL = 4,
  QFNRED_INVALID_ARGUMENT = 5,
  QFNRED_INTERNAL_ERROR = 6
} qfnred_status;

typedef struct qfnred_spec qfnred_spec;
typedef struct qfnred_report qfnred_report;

typedef struct qfnred_options {
  double tol;                 /* validator tolerance, default 1e-9 */
  const int64_t* internal;    /* 0-based internal channel indices, or NULL */
  size_t internal_count;      /* entries in `internal`; used when internal != NULL */
  int has_k;                  /* nonzero if `k` is set */
  double k;                   /* instantiation point for families */
  const double* k_values;     /* convergence sweep, or NULL for 2,4,8,16,32 */
  size_t k_count;
  double t;                   /* propagation time, default 1 */
  const char* rho0;           /* "basis:i" or a JSON file path; NULL for "basis:0" */
} qfnred_options;

QFNRED_API const char* qfnred_version(void);

/* Message of the most recent failure on this thread, "" if none. */
QFNRED_API const char* qfnred_last_error(void);

QFNRED_API void qfnred_options_init(qfnred_options* opts);

/* --- specs ------------------------------------------------------------- */

QFNRED_API qfnred_status qfnred_spec_load(const char* path, qfnred_spec** out);
QFNRED_API qfnred_status qfnred_spec_parse(const char* text, size_t length, qfnred_spec** out);
QFNRED_API qfnred_status qfnred_spec_save(const qfnred_spec* spec, const char* path);
/* Canonical text; release with qfnred_string_free. */
QFNRED_API qfnred_status qfnred_spec_to_json(const qfnred_spec* spec, char** out);
/* "generator", "slh" or "scaled_family". */
QFNRED_API const char* qfnred_spec_kind(const qfnred_spec* spec);
QFNRED_API void qfnred_spec_free(qfnred_spec* spec);

QFNRED_API void qfnred_string_free(char* s);

/* --- operations -------------------------------------------------------- */
/* Each returns a report even when the operation itself fails; the return
 * value is then the report status. A NULL `opts` means defaults. */

QFNRED_API qfnred_status qfnred_validate(const qfnred_spec* spec, const qfnred_options* opts,
                                         qfnred_report** out);
QFNRED_API qfnred_status qfnred_feedback(const qfnred_spec* spec, const qfnred_options* opts,
                                         qfnred_report** out);
QFNRED_API qfnred_status qfnred_adiabatic(const qfnred_spec* spec, const qfnred_options* opts,
                                          qfnred_report** out);
QFNRED_API qfnred_status qfnred_commute(const qfnred_spec* spec, const qfnred_options* opts,
                                        qfnred_report** out);
QFNRED_API qfnred_status qfnred_converge(const qfnred_spec* spec, const qfnred_options* opts,
                                         qfnred_report** out);

/* --- reports ----------------------------------------------------------- */

QFNRED_API qfnred_status qfnred_report_status(const qfnred_report* report);
/* Release with qfnred_string_free. `timestamp` = 0 omits time fields. */
QFNRED_API qfnred_status qfnred_report_json(const qfnred_report* report, int timestamp, char** out);
QFNRED_API qfnred_status qfnred_report_summary(const qfnred_report* report, char** out);
QFNRED_API qfnred_status qfnred_report_save(const qfnred_report* report, const char* path,
                                            int timestamp);
/* Reduced network produced by the operation, or NULL (not an error) if none. */
QFNRED_API qfnred_status qfnred_report_output(const qfnred_report* report, qfnred_spec** out);
QFNRED_API void qfnred_report_free(qfnred_report* report);

#ifdef __cplusplus
}
#endif

#endif /* QFNRED_H */
