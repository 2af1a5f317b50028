#ifndef BARGE_ALNS_H
#define BARGE_ALNS_H

/* Generated from the barge-alns-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Outcome of a call. Anything but `Ok` leaves the out-parameters untouched.
typedef enum BargeStatus {
  BARGE_STATUS_OK = 0,
  // A required pointer argument was null.
  BARGE_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  BARGE_STATUS_INVALID_UTF8 = 2,
  // The instance JSON failed to parse or validate.
  BARGE_STATUS_BAD_INSTANCE = 3,
  // The solution JSON failed to parse or does not fit the instance.
  BARGE_STATUS_BAD_SOLUTION = 4,
  // The preset row or topology is not in the catalogue.
  BARGE_STATUS_UNKNOWN_PRESET = 5,
  // The request exceeds a hard size limit.
  BARGE_STATUS_TOO_LARGE = 6,
  // A search option is outside its valid range.
  BARGE_STATUS_BAD_OPTIONS = 7,
  // No result exists for the request.
  BARGE_STATUS_NO_RESULT = 8,
  // An unexpected internal failure was contained.
  BARGE_STATUS_INTERNAL = 9,
} BargeStatus;

// Port layout used by the instance generator.
typedef enum BargeTopology {
  BARGE_TOPOLOGY_OCEANIC = 0,
  BARGE_TOPOLOGY_INLAND = 1,
} BargeTopology;

// Opaque handle to a validated instance.
typedef struct BargeInstance BargeInstance;

// Opaque handle to a solution for one specific instance.
typedef struct BargeSolution BargeSolution;

// Search parameters; obtain defaults from [`barge_search_defaults`] and
// override fields as needed. A `time_limit` of zero or below means no
// wall-clock cap.
typedef struct BargeSearchOptions {
  uint64_t seed;
  uintptr_t iterations;
  uintptr_t multistart;
  uintptr_t stagnation;
  double time_limit;
  uint32_t family_bias;
  double t_init;
  double cooling;
  double t_min;
} BargeSearchOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Default search parameters, matching the command-line tool.
struct BargeSearchOptions barge_search_defaults(void);

// Parse and validate an instance from its JSON document.
//
// On success `*out` owns a new handle; release it with
// [`barge_instance_free`].
//
// # Safety
// `json` must point to a NUL-terminated string and `out` to a writable
// pointer slot; both stay borrowed only for the duration of the call.
enum BargeStatus barge_instance_parse(const char *json, struct BargeInstance **out);

// Build a benchmark instance from the preset catalogue (rows 1 to 6).
//
// # Safety
// `out` must point to a writable pointer slot.
enum BargeStatus barge_instance_generate(uint8_t row,
                                         enum BargeTopology topology,
                                         uint64_t seed,
                                         struct BargeInstance **out);

// Instance as pretty-printed JSON. Returns null on a null handle; free the
// string with [`barge_string_free`].
//
// # Safety
// `inst` must be a live handle from this library or null.
char *barge_instance_json(const struct BargeInstance *inst);

// Release an instance handle; null is ignored.
//
// # Safety
// `inst` must be a handle from this library that has not been freed yet.
void barge_instance_free(struct BargeInstance *inst);

// Run the search and hand back the best solution found.
//
// `options` may be null for defaults. Release `*out` with
// [`barge_solution_free`].
//
// # Safety
// `inst` must be a live handle; `options`, when non-null, must point to a
// readable options struct; `out` must be a writable pointer slot.
enum BargeStatus barge_solve(const struct BargeInstance *inst,
                             const struct BargeSearchOptions *options,
                             struct BargeSolution **out);

// Exact optimum by exhaustive enumeration; only for tiny instances.
//
// Fails with `TooLarge` beyond the enumeration limit and `NoResult` when
// no capacity-feasible schedule exists.
//
// # Safety
// Same contract as [`barge_solve`].
enum BargeStatus barge_oracle(const struct BargeInstance *inst, struct BargeSolution **out);

// Parse a solution JSON document against its instance.
//
// # Safety
// `inst` must be a live handle, `json` a NUL-terminated string, `out` a
// writable pointer slot.
enum BargeStatus barge_solution_parse(const struct BargeInstance *inst,
                                      const char *json,
                                      struct BargeSolution **out);

// Solution as pretty-printed JSON with schedule and loss attached.
// Returns null when either handle is null; free with
// [`barge_string_free`].
//
// # Safety
// Both handles must be live handles from this library or null.
char *barge_solution_json(const struct BargeInstance *inst, const struct BargeSolution *sol);

// Total loss of a solution; NaN when a handle is null or the schedule
// cannot be evaluated.
//
// # Safety
// Both handles must be live handles from this library or null.
double barge_solution_loss(const struct BargeInstance *inst, const struct BargeSolution *sol);

// Number of hard-constraint violations; -1 when a handle is null.
//
// # Safety
// Both handles must be live handles from this library or null.
intptr_t barge_validate(const struct BargeInstance *inst, const struct BargeSolution *sol);

// Export the integer program in CPLEX LP format.
//
// On success `*out` receives a string to free with
// [`barge_string_free`].
//
// # Safety
// `inst` must be a live handle and `out` a writable pointer slot.
enum BargeStatus barge_export_lp(const struct BargeInstance *inst, char **out);

// Release a solution handle; null is ignored.
//
// # Safety
// `sol` must be a handle from this library that has not been freed yet.
void barge_solution_free(struct BargeSolution *sol);

// Release a string returned by this library; null is ignored.
//
// # Safety
// `text` must come from this library and not have been freed yet.
void barge_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BARGE_ALNS_H */
