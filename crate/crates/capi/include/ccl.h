#ifndef CCL_H
#define CCL_H

/* generated by cbindgen from ccl-capi; do not edit by hand */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes mirroring the CLI exit codes.
typedef enum CclStatus {
  CCL_STATUS_OK = 0,
  CCL_STATUS_MISMATCH = 1,
  CCL_STATUS_INCONCLUSIVE = 2,
  CCL_STATUS_INVALID_ARGUMENT = 3,
  CCL_STATUS_INTERNAL = 4,
} CclStatus;

// Opaque crystal handle.
typedef struct CclCrystal CclCrystal;

// Opaque root-system handle.
typedef struct CclRootSystem CclRootSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread.  The pointer stays
// valid until the next failing call on the same thread.
const char *ccl_last_error_message(void);

// Static version string.
const char *ccl_version(void);

// Release a string returned through an out-pointer.
//
// # Safety
// `s` must come from this library and not be freed twice.
void ccl_string_free(char *s);

// Build a root system from a Dynkin type label such as "A2".
//
// # Safety
// `label` must be a NUL-terminated string and `out` a valid pointer.
enum CclStatus ccl_root_system_new(const char *label, struct CclRootSystem **out);

// # Safety
// `rs` must come from `ccl_root_system_new` and not be freed twice.
void ccl_root_system_free(struct CclRootSystem *rs);

// Rank, or 0 for a null handle.
//
// # Safety
// `rs` must be a live handle or null.
uintptr_t ccl_root_system_rank(const struct CclRootSystem *rs);

// JSON datum `{"type":...,"rank":...,"cartan":[...]}`.
//
// # Safety
// `rs` must be a live handle; `out` a valid pointer.
enum CclStatus ccl_root_system_json(const struct CclRootSystem *rs, char **out);

// Build the crystal B(lambda); `coords` has one entry per node.
//
// # Safety
// `rs` must be live; `coords` must point to `len` integers; `out` valid.
enum CclStatus ccl_crystal_new(const struct CclRootSystem *rs,
                               const int64_t *coords,
                               uintptr_t len,
                               struct CclCrystal **out);

// # Safety
// `c` must come from a ccl constructor and not be freed twice.
void ccl_crystal_free(struct CclCrystal *c);

// Number of elements, or 0 for a null handle.
//
// # Safety
// `c` must be a live handle or null.
uintptr_t ccl_crystal_len(const struct CclCrystal *c);

// Tensor product of two crystals over the same root system.
//
// # Safety
// `a`, `b` must be live handles; `out` a valid pointer.
enum CclStatus ccl_crystal_tensor(const struct CclCrystal *a,
                                  const struct CclCrystal *b,
                                  struct CclCrystal **out);

// The crystal graph as JSON `{"elements":[...],"edges":[...]}`.
//
// # Safety
// `c` must be live; `out` valid.
enum CclStatus ccl_crystal_json(const struct CclCrystal *c, char **out);

// The crystal graph in DOT format.
//
// # Safety
// `c` must be live; `out` valid.
enum CclStatus ccl_crystal_dot(const struct CclCrystal *c, char **out);

// Schützenberger involution as a permutation written into `perm`
// (caller-allocated, `len` = number of elements).  Pass `nodes = NULL`
// for the full diagram or a list of 0-based node indices for xi_J.
//
// # Safety
// `c` live; `perm` must point to `len` writable entries; `nodes` must
// point to `n_nodes` entries when non-null.
enum CclStatus ccl_schutzenberger(const struct CclCrystal *c,
                                  const uintptr_t *nodes,
                                  uintptr_t n_nodes,
                                  uintptr_t *perm,
                                  uintptr_t len);

// Run one verification case from a JSON configuration (same schema as
// `ccl verify case --config`).  The status reports the verdict: Ok for
// equal, Mismatch, or Inconclusive; the full report lands in `out`.
//
// # Safety
// `config_json` must be NUL-terminated; `out` valid.
enum CclStatus ccl_verify_case(const char *config_json, char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CCL_H */
