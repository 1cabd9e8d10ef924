#ifndef QLAX_H
#define QLAX_H

/* C interface to the q-deformed KdV / mKdV / Toda verification engine.
 *
 * All entry points are exported with C linkage so the library can be loaded
 * from any language runtime. A session owns its result buffers: the strings
 * returned by the accessors stay valid until the next qlax_execute call on
 * the same session, or until the session is freed. Sessions are independent;
 * use one per thread.
 *
 * Requests are JSON objects. Fields (all optional unless noted):
 *   command  "verify" | "root" | "flow" | "ham" | "bracket" | "miura"
 *            | "toda" | "limit"                       (required)
 *   suite    "kdv" | "mkdv" | "toda" | "poisson" | "limits" | "all"
 *   N        operator order, default 2
 *   window   point window for the Fourier modes, default 2
 *   depth    operator truncation depth, 0 = per-check default
 *   degcap   truncation degree for geometric inverses, default 3
 *   mode     "exact" (rational functions of q) | "numeric" (fixed q0)
 *   q0       rational string, e.g. "3/2"
 *   seed     64-bit seed for the randomized spot checks
 *   n        flow / hamiltonian index, default 1
 *   arg      command argument (operator text, "table:gen,gen", toda mode,
 *            limit target)
 *   format   "text" | "json"
 *   timings  false suppresses per-check timings for byte-stable output
 */

#ifdef __cplusplus
extern "C" {
#endif

typedef struct qlax_session qlax_session;

typedef enum {
    QLAX_OK = 0,
    QLAX_ERR_INVALID_ARGUMENT = 1, /* bad request JSON or config values */
    QLAX_ERR_PARSE = 2,            /* malformed operator/series/generator text */
    QLAX_ERR_CHECK_FAILED = 3,     /* a verification suite reported failures */
    QLAX_ERR_INTERNAL = 4
} qlax_status;

const char* qlax_version(void);

qlax_session* qlax_session_new(void);
void qlax_session_free(qlax_session* s);

/* Executes one JSON request. Returns a qlax_status value. */
int qlax_execute(qlax_session* s, const char* request_json);

/* Human-readable output of the last command (empty until a command ran). */
const char* qlax_output_text(const qlax_session* s);

/* Machine-readable output of the last command as a JSON document. For
 * verify commands this is the report object
 *   { "suite", "config", "checks": [ { "name", "anchor", "status",
 *     "witness"?, "ms" } ], "pass" }. */
const char* qlax_output_json(const qlax_session* s);

/* Message of the last error (empty when the last call succeeded). */
const char* qlax_last_error(const qlax_session* s);

#ifdef __cplusplus
}
#endif

#endif /* QLAX_H */
