#ifndef CALLMATCH_H
#define CALLMATCH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CmAlgorithm {
  /**
   * Maximum matching.
   */
  CM_ALGORITHM_MM = 0,
  /**
   * Maximum matching, made fair and priced at pair midpoints.
   */
  CM_ALGORITHM_FAIR_MM = 1,
  /**
   * Maximum uniform-price matching.
   */
  CM_ALGORITHM_UM = 2,
} CmAlgorithm;

/**
 * Status code returned by every fallible entry point.
 */
typedef enum CmStatus {
  CM_STATUS_OK = 0,
  CM_STATUS_NULL_POINTER = 1,
  CM_STATUS_DUPLICATE_ID = 2,
  CM_STATUS_INVALID_MATCHING = 3,
  CM_STATUS_NOT_MATCHABLE = 4,
  CM_STATUS_UNSORTED = 5,
  CM_STATUS_OUT_OF_RANGE = 6,
  /**
   * Nothing trades, so there is no clearing price.
   */
  CM_STATUS_NO_PRICE = 7,
} CmStatus;

/**
 * Order book under construction. Opaque to C.
 */
typedef struct CmInstance CmInstance;

/**
 * Opaque list of fills.
 */
typedef struct CmMatching CmMatching;

/**
 * One trade.
 */
typedef struct CmFill {
  uint64_t bid_id;
  uint64_t ask_id;
  uint64_t bid_price;
  uint64_t ask_price;
  uint64_t trade_price;
} CmFill;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *cm_last_error_message(void);

/**
 * Fresh empty order book. Free with [`cm_instance_free`].
 */
struct CmInstance *cm_instance_new(void);

/**
 * # Safety
 * `inst` must be null or a handle from [`cm_instance_new`] not yet freed.
 */
void cm_instance_free(struct CmInstance *inst);

/**
 * # Safety
 * `inst` must be null or a live instance handle.
 */
enum CmStatus cm_instance_add_bid(struct CmInstance *inst, uint64_t price, uint64_t id);

/**
 * # Safety
 * `inst` must be null or a live instance handle.
 */
enum CmStatus cm_instance_add_ask(struct CmInstance *inst, uint64_t price, uint64_t id);

/**
 * Number of bids and asks. Either out pointer may be null.
 *
 * # Safety
 * `inst` must be a live instance handle; out pointers null or writable.
 */
enum CmStatus cm_instance_counts(const struct CmInstance *inst, size_t *bids, size_t *asks);

/**
 * Run a mechanism over the book. On success `*out` owns a new matching.
 *
 * # Safety
 * `inst` must be a live instance handle and `out` writable.
 */
enum CmStatus cm_run(const struct CmInstance *inst, enum CmAlgorithm algo, struct CmMatching **out);

/**
 * Clearing price of the uniform mechanism. Returns `NoPrice` when
 * nothing trades.
 *
 * # Safety
 * `inst` must be a live instance handle and `price` writable.
 */
enum CmStatus cm_uniform_price(const struct CmInstance *inst, uint64_t *price);

/**
 * Rewire `m` so it is fair on both sides, keeping its size.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum CmStatus cm_fairize(const struct CmInstance *inst,
                         const struct CmMatching *m,
                         struct CmMatching **out);

/**
 * Reprice every pair at the midpoint of its bid and ask.
 *
 * # Safety
 * `m` must be live and `out` writable.
 */
enum CmStatus cm_ir_middle(const struct CmMatching *m, struct CmMatching **out);

/**
 * Empty matching, for building one by hand with [`cm_matching_push`].
 */
struct CmMatching *cm_matching_new(void);

/**
 * # Safety
 * `m` must be null or a matching handle not yet freed.
 */
void cm_matching_free(struct CmMatching *m);

/**
 * # Safety
 * `m` must be a live matching handle.
 */
enum CmStatus cm_matching_push(struct CmMatching *m, struct CmFill fill);

/**
 * Number of fills; 0 for null.
 *
 * # Safety
 * `m` must be null or a live matching handle.
 */
size_t cm_matching_len(const struct CmMatching *m);

/**
 * # Safety
 * `m` must be a live matching handle and `fill` writable.
 */
enum CmStatus cm_matching_get(const struct CmMatching *m, size_t index, struct CmFill *fill);

/**
 * Every pair trades at a price between its ask and bid.
 *
 * # Safety
 * `m` must be live and `out` writable.
 */
enum CmStatus cm_is_ir(const struct CmMatching *m, bool *out);

/**
 * # Safety
 * `m` must be live and `out` writable.
 */
enum CmStatus cm_is_uniform(const struct CmMatching *m, bool *out);

/**
 * # Safety
 * Handles must be live and `out` writable.
 */
enum CmStatus cm_is_fair(const struct CmInstance *inst, const struct CmMatching *m, bool *out);

/**
 * `m` is a valid matching over the book's orders.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum CmStatus cm_matching_in(const struct CmInstance *inst, const struct CmMatching *m, bool *out);

/**
 * No matching over the book is larger than `m`.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum CmStatus cm_is_maximum(const struct CmInstance *inst, const struct CmMatching *m, bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CALLMATCH_H */
