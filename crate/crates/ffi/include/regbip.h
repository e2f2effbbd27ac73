#ifndef REGBIP_H
#define REGBIP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum RegbipStatus {
  REGBIP_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  REGBIP_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  REGBIP_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed graph, spec, config or JSON.
   */
  REGBIP_STATUS_INVALID_INPUT = 3,
  /**
   * A pipeline stage failed; the message names the stage.
   */
  REGBIP_STATUS_STAGE_FAILED = 4,
  /**
   * A decomposition did not pass verification.
   */
  REGBIP_STATUS_VERIFICATION_FAILED = 5,
  /**
   * An index or buffer length was out of range.
   */
  REGBIP_STATUS_OUT_OF_RANGE = 6,
  /**
   * Internal panic, caught at the boundary.
   */
  REGBIP_STATUS_PANIC = 7,
} RegbipStatus;

/**
 * Opaque verified decomposition.
 */
typedef struct RegbipDecomposition RegbipDecomposition;

/**
 * Opaque simple graph.
 */
typedef struct RegbipGraph RegbipGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *regbip_version(void);

/**
 * Message of the last failed call on this thread, or null after a
 * successful call. Valid until the next call on the same thread.
 */
const char *regbip_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void regbip_string_free(char *s);

/**
 * Parses the edge-list text format (`n m` header, then `m` lines `u v`).
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RegbipStatus regbip_graph_parse(const char *text_ptr, struct RegbipGraph **out);

/**
 * Builds a graph from a generator spec such as
 * `random_regular:n=200,d=32,seed=7` or `complete:n=64`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RegbipStatus regbip_graph_generate(const char *spec, struct RegbipGraph **out);

/**
 * Builds a graph on `n` vertices from `edge_count` pairs stored flat in
 * `edges` (`2 * edge_count` entries).
 *
 * # Safety
 * `edges` must point to `2 * edge_count` readable values (it may be null
 * when `edge_count` is 0), and `out` must be a valid pointer.
 */
enum RegbipStatus regbip_graph_from_edges(size_t n,
                                          const size_t *edges,
                                          size_t edge_count,
                                          struct RegbipGraph **out);

/**
 * Releases a graph. Null is ignored.
 *
 * # Safety
 * `g` must be null or a graph from this library, not yet freed.
 */
void regbip_graph_free(struct RegbipGraph *g);

/**
 * # Safety
 * `g` must be a live graph and `out` a valid pointer.
 */
enum RegbipStatus regbip_graph_vertex_count(const struct RegbipGraph *g, size_t *out);

/**
 * # Safety
 * `g` must be a live graph and `out` a valid pointer.
 */
enum RegbipStatus regbip_graph_edge_count(const struct RegbipGraph *g, size_t *out);

/**
 * Common degree of a regular graph; `REGBIP_STATUS_INVALID_INPUT` otherwise.
 *
 * # Safety
 * `g` must be a live graph and `out` a valid pointer.
 */
enum RegbipStatus regbip_graph_regular_degree(const struct RegbipGraph *g, size_t *out);

/**
 * Writes the graph in edge-list format to a new string.
 *
 * # Safety
 * `g` must be a live graph and `out` a valid pointer.
 */
enum RegbipStatus regbip_graph_to_edge_list(const struct RegbipGraph *g, char **out);

/**
 * Decomposes a regular graph into regular bipartite spanning pieces.
 *
 * `config_json` may be null, or a JSON object overriding pipeline
 * parameters with the same keys as the CLI `--config` file. `seed`
 * overrides any seed in the config.
 *
 * # Safety
 * `g` must be a live graph, `config_json` null or a NUL-terminated string,
 * and `out` a valid pointer.
 */
enum RegbipStatus regbip_decompose(const struct RegbipGraph *g,
                                   uint64_t seed,
                                   const char *config_json,
                                   struct RegbipDecomposition **out);

/**
 * Releases a decomposition. Null is ignored.
 *
 * # Safety
 * `d` must be null or a decomposition from this library, not yet freed.
 */
void regbip_decomposition_free(struct RegbipDecomposition *d);

/**
 * # Safety
 * `d` must be a live decomposition and `out` a valid pointer.
 */
enum RegbipStatus regbip_decomposition_part_count(const struct RegbipDecomposition *d, size_t *out);

/**
 * Degree of the last piece, the part of the absorber left after regularization.
 *
 * # Safety
 * `d` must be a live decomposition and `out` a valid pointer.
 */
enum RegbipStatus regbip_decomposition_leftover_degree(const struct RegbipDecomposition *d,
                                                       size_t *out);

/**
 * # Safety
 * `d` must be a live decomposition and `out` a valid pointer.
 */
enum RegbipStatus regbip_decomposition_part_degree(const struct RegbipDecomposition *d,
                                                   size_t index,
                                                   size_t *out);

/**
 * # Safety
 * `d` must be a live decomposition and `out` a valid pointer.
 */
enum RegbipStatus regbip_decomposition_part_edge_count(const struct RegbipDecomposition *d,
                                                       size_t index,
                                                       size_t *out);

/**
 * Copies the edges of part `index` into `buf` as flat pairs. `buf_len`
 * must be at least twice the part's edge count.
 *
 * # Safety
 * `d` must be a live decomposition and `buf` must point to `buf_len`
 * writable values.
 */
enum RegbipStatus regbip_decomposition_part_edges(const struct RegbipDecomposition *d,
                                                  size_t index,
                                                  size_t *buf,
                                                  size_t buf_len);

/**
 * Writes the side (0 or 1) of every vertex in part `index` to `sides`,
 * which must hold one byte per vertex of the host graph.
 *
 * # Safety
 * `d` must be a live decomposition and `sides` must point to `len`
 * writable bytes.
 */
enum RegbipStatus regbip_decomposition_part_sides(const struct RegbipDecomposition *d,
                                                  size_t index,
                                                  uint8_t *sides,
                                                  size_t len);

/**
 * Serializes the decomposition to the JSON document written by the CLI
 * (without a timestamp).
 *
 * # Safety
 * `d` must be a live decomposition and `out` a valid pointer.
 */
enum RegbipStatus regbip_decomposition_to_json(const struct RegbipDecomposition *d, char **out);

/**
 * Checks a decomposition JSON document against `g`. Returns
 * `REGBIP_STATUS_OK` with `*verified` set to the outcome; the reasons for a
 * failed check are available from `regbip_last_error`.
 *
 * # Safety
 * `g` must be a live graph, `json` a NUL-terminated string and `verified`
 * a valid pointer.
 */
enum RegbipStatus regbip_verify_json(const struct RegbipGraph *g, const char *json, bool *verified);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REGBIP_H */
