#ifndef HYPERENTM_H
#define HYPERENTM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HeStatus {
  HE_STATUS_OK = 0,
  HE_STATUS_NULL_POINTER = 1,
  HE_STATUS_INVALID_ARGUMENT = 2,
  HE_STATUS_IO = 3,
  HE_STATUS_INVALID_GENOME = 4,
  HE_STATUS_CONTRACT = 5,
  HE_STATUS_CONFIG = 6,
  HE_STATUS_PANIC = 7,
} HeStatus;

typedef enum HeGenomeKind {
  HE_GENOME_KIND_DIRECT = 0,
  HE_GENOME_KIND_CPPN = 1,
} HeGenomeKind;

typedef enum HeBattery {
  /**
   * 50 episodes, lengths 1..=10.
   */
  HE_BATTERY_TRAINING = 0,
  /**
   * 100 episodes, lengths 1..=10.
   */
  HE_BATTERY_GENERALIZATION = 1,
  /**
   * 50 episodes of length 100.
   */
  HE_BATTERY_LONG = 2,
} HeBattery;

/**
 * Opaque genome handle.
 */
typedef struct HeGenome HeGenome;

/**
 * Opaque network handle.
 */
typedef struct HeNetwork HeNetwork;

/**
 * Opaque memory tape handle.
 */
typedef struct HeTape HeTape;

/**
 * Raw CPPN outputs for one query.
 */
typedef struct HeCppnResponse {
  double weight;
  double leo;
  double bias;
} HeCppnResponse;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *he_last_error(void);

/**
 * Loads a genome JSON file.
 */
enum HeStatus he_genome_load(const char *path, struct HeGenome **out);

/**
 * Parses a genome from JSON text.
 */
enum HeStatus he_genome_from_json(const char *json, struct HeGenome **out);

/**
 * The locality-seed CPPN.
 */
enum HeStatus he_genome_locality_seed(struct HeGenome **out);

/**
 * A hand-built CPPN that solves the copy task at every bit size.
 */
enum HeStatus he_genome_aligned_copy(struct HeGenome **out);

enum HeStatus he_genome_kind(const struct HeGenome *genome, enum HeGenomeKind *out);

/**
 * Number of connection genes.
 */
enum HeStatus he_genome_complexity(const struct HeGenome *genome, size_t *out);

/**
 * Serialises a genome; release the string with [`he_string_free`].
 */
enum HeStatus he_genome_to_json(const struct HeGenome *genome, char **out);

void he_genome_free(struct HeGenome *genome);

void he_string_free(char *s);

/**
 * Queries a CPPN genome for the connection from `(x1, y1, z1)` to `(x2, y2, z2)`.
 */
enum HeStatus he_cppn_query(const struct HeGenome *genome,
                            double x1,
                            double y1,
                            double z1,
                            double x2,
                            double y2,
                            double z2,
                            struct HeCppnResponse *out);

/**
 * Builds a copy-task controller for `bits`: a CPPN is synthesised over the
 * substrate, a direct genome is decoded (and must match `bits`).
 */
enum HeStatus he_network_build(const struct HeGenome *genome, size_t bits, struct HeNetwork **out);

enum HeStatus he_network_input_count(const struct HeNetwork *net, size_t *out);

enum HeStatus he_network_output_count(const struct HeNetwork *net, size_t *out);

enum HeStatus he_network_connection_count(const struct HeNetwork *net, size_t *out);

/**
 * One forward pass. Buffer lengths must equal the network's arity.
 */
enum HeStatus he_network_activate(struct HeNetwork *net,
                                  const double *inputs,
                                  size_t input_len,
                                  double *outputs,
                                  size_t output_len);

void he_network_free(struct HeNetwork *net);

/**
 * A fresh tape: one zero cell of `width` values, head at 0.
 */
enum HeStatus he_tape_new(size_t width, struct HeTape **out);

/**
 * Write, content jump, shift, then read into `read_out`.
 */
enum HeStatus he_tape_step(struct HeTape *tape,
                           const double *write,
                           size_t width,
                           double interp,
                           double jump,
                           double shift_left,
                           double shift_stay,
                           double shift_right,
                           double *read_out);

enum HeStatus he_tape_len(const struct HeTape *tape, size_t *out);

enum HeStatus he_tape_head(const struct HeTape *tape, size_t *out);

void he_tape_free(struct HeTape *tape);

/**
 * Mean copy-task score of `net` on a battery whose episodes derive from `seed`.
 */
enum HeStatus he_evaluate_battery(const struct HeNetwork *net,
                                  size_t bits,
                                  enum HeBattery battery,
                                  uint64_t seed,
                                  double *out_score);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPERENTM_H */
