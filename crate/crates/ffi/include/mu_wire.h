#ifndef MU_WIRE_H
#define MU_WIRE_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum MwStatus {
  MW_STATUS_OK = 0,
  MW_STATUS_NULL_ARGUMENT,
  MW_STATUS_INVALID_UTF8,
  MW_STATUS_PARSE,
  MW_STATUS_INVALID_SCHEMA,
  MW_STATUS_TRUNCATED_BUFFER,
  MW_STATUS_BAD_DESC_TAG,
  MW_STATUS_TRAILING_GARBAGE_IN_HEADER,
  MW_STATUS_SCHEMA_MISMATCH,
  MW_STATUS_BAD_TAG,
  MW_STATUS_SIZE_MISMATCH,
  MW_STATUS_PATH_OUT_OF_RANGE,
  MW_STATUS_IO,
  MW_STATUS_INTERNAL,
} MwStatus;

/**
 * Opaque handle on a sealed file image.
 */
typedef struct MwRegion MwRegion;

/**
 * Opaque schema handle.
 */
typedef struct MwSchema MwSchema;

/**
 * Location of a subtree inside a region.
 */
typedef struct MwCursor {
  uint64_t pos;
  uint64_t size;
} MwCursor;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call.
 */
const char *mw_last_error_message(void);

/**
 * Parses a schema written as `mu { name: desc, ... }`.
 */
enum MwStatus mw_schema_parse(const char *dsl, struct MwSchema **out);

/**
 * The binary tree schema `mu { leaf: none, node: (rec * (byte * rec)) }`.
 */
struct MwSchema *mw_schema_tree(void);

size_t mw_schema_len(const struct MwSchema *schema);

void mw_schema_free(struct MwSchema *schema);

/**
 * Copies `len` bytes and checks their header against `schema`.
 */
enum MwStatus mw_region_attach(const struct MwSchema *schema,
                               const uint8_t *data,
                               size_t len,
                               struct MwRegion **out);

enum MwStatus mw_region_open(const struct MwSchema *schema,
                             const char *path,
                             struct MwRegion **out);

/**
 * Serialises a tree literal such as `(node leaf 1 leaf)`.
 */
enum MwStatus mw_region_encode(const struct MwSchema *schema,
                               const char *literal,
                               struct MwRegion **out);

void mw_region_free(struct MwRegion *region);

/**
 * Borrows the whole file image; valid while the region lives.
 */
enum MwStatus mw_region_bytes(const struct MwRegion *region, const uint8_t **data, size_t *len);

enum MwStatus mw_region_root(const struct MwRegion *region, struct MwCursor *out);

/**
 * Constructor tag of the node at `c`.
 */
enum MwStatus mw_cursor_tag(const struct MwRegion *region, struct MwCursor c, uint8_t *out);

/**
 * The `index`-th subtree (left to right) of the node at `c`.
 */
enum MwStatus mw_cursor_child(const struct MwRegion *region,
                              struct MwCursor c,
                              size_t index,
                              struct MwCursor *out);

/**
 * Sum of node bytes; binary tree schema only.
 */
enum MwStatus mw_cursor_sum(const struct MwRegion *region, struct MwCursor c, uint64_t *out);

/**
 * Byte of the rightmost node, or -1 for a leaf; binary tree schema only.
 */
enum MwStatus mw_cursor_rightmost(const struct MwRegion *region, struct MwCursor c, int32_t *out);

/**
 * Renders the subtree at `c` as a literal. Free with `mw_string_free`.
 */
enum MwStatus mw_cursor_dump(const struct MwRegion *region, struct MwCursor c, char **out);

void mw_string_free(char *s);

/**
 * Writes the region's header followed by the subtree at `c`.
 */
enum MwStatus mw_cursor_write_file(const struct MwRegion *region,
                                   struct MwCursor c,
                                   const char *path);

/**
 * New region holding a raw-byte copy of the subtree at `c`.
 */
enum MwStatus mw_cursor_copy(const struct MwRegion *region,
                             struct MwCursor c,
                             struct MwRegion **out);

/**
 * New region holding the subtree at `c` with its root children exchanged;
 * binary tree schema only.
 */
enum MwStatus mw_cursor_swap(const struct MwRegion *region,
                             struct MwCursor c,
                             struct MwRegion **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MU_WIRE_H */
