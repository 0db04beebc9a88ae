#ifndef DIARSCORE_H
#define DIARSCORE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum DsStatus {
  DS_STATUS_OK = 0,
  // A required pointer argument was NULL.
  DS_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  DS_STATUS_INVALID_UTF8 = 2,
  // An RTTM, UEM or manifest text failed to parse.
  DS_STATUS_PARSE_ERROR = 3,
  // Scoring failed: missing system output, missing UEM entry, no
  // reference speech, ...
  DS_STATUS_SCORING_ERROR = 4,
  // An index was past the end.
  DS_STATUS_OUT_OF_RANGE = 5,
  // A numeric argument was invalid (negative collar, NaN, ...).
  DS_STATUS_INVALID_ARGUMENT = 6,
  // The library panicked. This is a bug.
  DS_STATUS_PANIC = 7,
} DsStatus;

// Scores of a corpus. Opaque.
typedef struct DsReport DsReport;

// Accumulates scoring inputs. Opaque.
typedef struct DsScorer DsScorer;

// One table row. Times are seconds, rates percent.
typedef struct DsRow {
  double der;
  double jer;
  double false_alarm;
  double miss;
  double confusion;
  double total;
  size_t n_files;
  size_t n_ref_speakers;
  size_t n_sys_speakers;
} DsRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, static string.
const char *ds_version(void);

// Message of the last failed call on this thread, or NULL. Valid until
// the next library call on this thread.
const char *ds_last_error_message(void);

// Releases a string returned by this library. NULL is ignored.
void ds_string_free(char *s);

// New scorer: strict parsing, no collar, whole recordings scored.
struct DsScorer *ds_scorer_new(void);

void ds_scorer_free(struct DsScorer *scorer);

// Downgrades RTTM tag, channel and placeholder deviations to warnings.
// Affects texts added afterwards.
enum DsStatus ds_scorer_set_lenient(struct DsScorer *scorer, bool lenient);

// Collar in seconds around reference boundaries. Zero (the default) is
// the challenge setting.
enum DsStatus ds_scorer_set_collar(struct DsScorer *scorer, double collar_seconds);

// Adds one reference RTTM text. `source` names it in diagnostics and may
// be NULL.
enum DsStatus ds_scorer_add_reference(struct DsScorer *scorer,
                                      const char *source,
                                      const char *rttm);

// Adds one system RTTM text. A text with no turns declares empty output
// for the recording named by the file stem of `source`, which must then
// be non-NULL.
enum DsStatus ds_scorer_add_system(struct DsScorer *scorer, const char *source, const char *rttm);

// Sets the scoring regions from UEM text, replacing earlier ones.
enum DsStatus ds_scorer_set_uem(struct DsScorer *scorer, const char *source, const char *uem);

// Scores everything added so far. On success `*out` receives a report to
// release with [`ds_report_free`].
enum DsStatus ds_scorer_run(const struct DsScorer *scorer, struct DsReport **out);

void ds_report_free(struct DsReport *report);

// Number of scored files; 0 for a NULL report.
size_t ds_report_file_count(const struct DsReport *report);

// Id of the file at `index` (files are in name order), or NULL.
char *ds_report_file_id(const struct DsReport *report, size_t index);

enum DsStatus ds_report_file_row(const struct DsReport *report, size_t index, struct DsRow *out);

// Pooled DER and speaker-averaged JER over all files.
enum DsStatus ds_report_overall_row(const struct DsReport *report, struct DsRow *out);

// Fixed-width text table, or NULL.
char *ds_report_table(const struct DsReport *report);

// JSON document with full precision, or NULL.
char *ds_report_json(const struct DsReport *report);

// CSV with a header row, or NULL.
char *ds_report_csv(const struct DsReport *report);

// Validates a submission of `count` RTTM texts against a manifest.
//
// `sources[i]` names `texts[i]`; `uem` may be NULL. On success `*valid`
// holds the verdict and `*report_text` the human-readable diagnostics.
enum DsStatus ds_validate(const char *manifest,
                          const char *const *sources,
                          const char *const *texts,
                          size_t count,
                          const char *uem,
                          bool *valid,
                          char **report_text);

// Speech segments of recording `file_id` in label-file form: the union
// of its reference turns with pauses up to `max_gap_seconds` bridged.
enum DsStatus ds_derive_sad(const char *rttm,
                            const char *file_id,
                            double max_gap_seconds,
                            char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIARSCORE_H */
