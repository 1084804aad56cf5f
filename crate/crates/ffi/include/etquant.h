#ifndef ETQUANT_H
#define ETQUANT_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EtStatus {
  ET_STATUS_OK = 0,
  ET_STATUS_NULL_POINTER = 1,
  ET_STATUS_INVALID_STRING = 2,
  ET_STATUS_DOMAIN = 3,
  ET_STATUS_FEASIBILITY = 4,
  ET_STATUS_CONFIG = 5,
  ET_STATUS_PARSE = 6,
  ET_STATUS_IO = 7,
  ET_STATUS_OUT_OF_RANGE = 8,
  ET_STATUS_PANIC = 9,
} EtStatus;

typedef enum EtRayKind {
  ET_RAY_KIND_INTERIOR_CONE = 0,
  ET_RAY_KIND_INTERIOR_CONE_AT_ONE = 1,
  ET_RAY_KIND_CRITICAL_RAY = 2,
} EtRayKind;

typedef enum EtClassKind {
  ET_CLASS_KIND_UNDETERMINED = 0,
  ET_CLASS_KIND_EMPTY = 1,
  ET_CLASS_KIND_COMPLETE = 2,
  ET_CLASS_KIND_EMPTY_OR_COMPLETE = 3,
  ET_CLASS_KIND_DILUTED_BIPARTITE = 4,
  ET_CLASS_KIND_TURAN = 5,
  ET_CLASS_KIND_TURAN_PAIR = 6,
} EtClassKind;

/**
 * Opaque graph handle.
 */
typedef struct EtGraph EtGraph;

/**
 * Opaque `(E, T)` support table handle.
 */
typedef struct EtSupportTable EtSupportTable;

/**
 * Opaque sampler trajectory handle.
 */
typedef struct EtTrajectory EtTrajectory;

typedef struct EtExtremalClass {
  enum EtClassKind kind;
  /**
   * Class counts for `Turan` (first entry) and `TuranPair`.
   */
  uint64_t classes[2];
  /**
   * Edge retention for `DilutedBipartite`.
   */
  double p;
} EtExtremalClass;

typedef struct EtDirectionResult {
  enum EtRayKind ray;
  /**
   * Cone or critical ray index; unused for `InteriorConeAtOne`.
   */
  int64_t k;
  bool exact;
  bool has_near_critical;
  int64_t near_critical;
  bool has_side;
  int8_t side;
  struct EtExtremalClass extremal;
} EtDirectionResult;

typedef struct EtLineResult {
  struct EtExtremalClass extremal;
  bool near_critical;
  bool nearest_has_k;
  uint64_t nearest_k;
  double nearest_slope;
  double nearest_distance;
} EtLineResult;

typedef struct EtSamplerConfig {
  size_t n;
  double beta1;
  double beta2;
  uint64_t steps;
  uint64_t seed;
  uint64_t thin;
} EtSamplerConfig;

typedef struct EtRecord {
  uint64_t step;
  double e;
  double t;
  double accepted_frac;
} EtRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call into the library.
 */
const char *et_last_error(void);

/**
 * Empty graph on `n` nodes.
 */
enum EtStatus et_graph_new(size_t n, struct EtGraph **out_graph);

/**
 * Turán graph `T(n, r)`.
 */
enum EtStatus et_graph_turan(size_t n, size_t r, struct EtGraph **out_graph);

void et_graph_free(struct EtGraph *g);

enum EtStatus et_graph_node_count(const struct EtGraph *g, size_t *out_n);

/**
 * Toggles the pair `{i, j}` and reports the edge and triangle count changes.
 */
enum EtStatus et_graph_flip(struct EtGraph *g, size_t i, size_t j, int8_t *out_de, int64_t *out_dt);

enum EtStatus et_graph_counts(const struct EtGraph *g,
                              uint64_t *out_edges,
                              uint64_t *out_triangles);

/**
 * Edge and triangle homomorphism densities `(2E/n², 6T/n³)`.
 */
enum EtStatus et_graph_densities(const struct EtGraph *g, double *out_e, double *out_t);

/**
 * Unnormalized log-probability `2β1E + 6β2T/n`.
 */
enum EtStatus et_graph_log_weight(const struct EtGraph *g,
                                  double beta1,
                                  double beta2,
                                  double *out_w);

/**
 * The extreme point `v_k = (k/(k+1), k(k-1)/(k+1)²)`.
 */
enum EtStatus et_v_k(uint64_t k, double *out_e, double *out_t);

/**
 * Critical slope `a_k = -k(3k+5)/((k+1)(k+2))`.
 */
enum EtStatus et_a_k(uint64_t k, double *out_a);

enum EtStatus et_razborov_lower(double e, double *out_t);

enum EtStatus et_kk_upper(double e, double *out_t);

/**
 * Classifies the direction `(x, y)`, given as decimal or fraction strings.
 * `beta1` and `beta2` may both be null; otherwise they give the base point
 * used to resolve critical rays.
 */
enum EtStatus et_classify_direction(const char *x,
                                    const char *y,
                                    const char *beta1,
                                    const char *beta2,
                                    struct EtDirectionResult *out_result);

/**
 * Classifies the line `β1 = a β2 + b` as `β2 → +∞` (`limit_sign > 0`) or
 * `β2 → -∞` (`limit_sign < 0`).
 */
enum EtStatus et_classify_line(const char *a,
                               const char *b,
                               int32_t limit_sign,
                               struct EtLineResult *out_result);

/**
 * Enumerates all labeled graphs on `n <= 7` nodes (`n = 8` with
 * `allow_long`).
 */
enum EtStatus et_support_enumerate(size_t n, bool allow_long, struct EtSupportTable **out_table);

/**
 * Loads a support table written by `etquant enumerate`.
 */
enum EtStatus et_support_read_csv(const char *path, struct EtSupportTable **out_table);

void et_support_free(struct EtSupportTable *t);

/**
 * Number of distinct `(E, T)` points.
 */
enum EtStatus et_support_len(const struct EtSupportTable *t, size_t *out_len);

/**
 * The `index`-th support point in `(E, T)` order with its graph count.
 */
enum EtStatus et_support_entry(const struct EtSupportTable *t,
                               size_t index,
                               uint64_t *out_edges,
                               uint64_t *out_triangles,
                               uint64_t *out_count);

/**
 * `P_{n,β}` of the support point with the given counts; zero off the support.
 */
enum EtStatus et_family_prob(const struct EtSupportTable *t,
                             double beta1,
                             double beta2,
                             uint64_t edges,
                             uint64_t triangles,
                             double *out_p);

/**
 * Log-normalizer `ln Σ ν(x) exp(n²⟨β, x⟩)`.
 */
enum EtStatus et_family_log_normalizer(const struct EtSupportTable *t,
                                       double beta1,
                                       double beta2,
                                       double *out_z);

/**
 * Mean of the densities under `P_{n,β}`.
 */
enum EtStatus et_family_mean(const struct EtSupportTable *t,
                             double beta1,
                             double beta2,
                             double *out_e,
                             double *out_t);

/**
 * Runs a Metropolis chain. `init` is `empty`, `complete`, `turan:R` or
 * `random:P`.
 */
enum EtStatus et_sample(const struct EtSamplerConfig *config,
                        const char *init,
                        struct EtTrajectory **out_trajectory);

void et_trajectory_free(struct EtTrajectory *t);

enum EtStatus et_trajectory_len(const struct EtTrajectory *t, size_t *out_len);

enum EtStatus et_trajectory_record(const struct EtTrajectory *t,
                                   size_t index,
                                   struct EtRecord *out_record);

enum EtStatus et_trajectory_acceptance_rate(const struct EtTrajectory *t, double *out_rate);

/**
 * Copy of the chain's final graph, owned by the caller.
 */
enum EtStatus et_trajectory_final_graph(const struct EtTrajectory *t, struct EtGraph **out_graph);

/**
 * Class count `r` maximizing `log_weight(T(n, r)) + ln ν(T(n, r))`.
 */
enum EtStatus et_mode_check(size_t n, double beta1, double beta2, size_t *out_r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ETQUANT_H */
