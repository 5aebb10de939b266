/*
 bqpca: bilateral generalized two-dimensional quaternion PCA with Lp norms.

 C interface to the shared library. All objects are opaque handles created by
 a bqpca_*_load / _create / _build / _fit call and released with the matching
 _free function (free functions accept NULL). Every fallible call returns a
 bqpca_status; on failure bqpca_last_error() describes the problem. The error
 message is thread-local and stays valid until the next failing call on the
 same thread.

 Image data crosses the boundary in two layouts:
   rgb     interleaved 8-bit r,g,b per pixel, row-major (3*rows*cols bytes)
   planes  four row-major real planes, component 0 (real) first
           (4*rows*cols doubles); pixel (r,g,b) is (r i + g j + b k) / 255

 Datasets handed to the library are uncentered; fitting centers by the
 training mean and stores it in the basis, and projection/reconstruction
 subtract the basis mean internally.
*/
#ifndef BQPCA_BQPCA_H
#define BQPCA_BQPCA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BQPCA_API __declspec(dllexport)
#else
#define BQPCA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bqpca_status {
  BQPCA_OK = 0,
  BQPCA_ERR_SHAPE = 1,
  BQPCA_ERR_INVALID_PARAMETER = 2,
  BQPCA_ERR_DEGENERATE_DIRECTION = 3,
  BQPCA_ERR_INVALID_WEIGHT = 4,
  BQPCA_ERR_INVALID_DATASET = 5,
  BQPCA_ERR_IO = 6,
  BQPCA_ERR_FORMAT = 7,
  BQPCA_ERR_NULL_ARGUMENT = 8,
  BQPCA_ERR_INTERNAL = 9
} bqpca_status;

typedef enum bqpca_manner {
  BQPCA_UNWEIGHTED = 0,
  BQPCA_WEIGHTED_LEFT = 1,
  BQPCA_WEIGHTED_RIGHT = 2,
  BQPCA_WEIGHTED_BOTH = 3
} bqpca_manner;

typedef enum bqpca_transform {
  BQPCA_TRANSFORM_IDENTITY = 0,
  BQPCA_TRANSFORM_INVERSE_LOG = 1
} bqpca_transform;

typedef enum bqpca_init { BQPCA_INIT_ONES = 0, BQPCA_INIT_RANDOM = 1 } bqpca_init;

typedef enum bqpca_side { BQPCA_SIDE_LEFT = 0, BQPCA_SIDE_RIGHT = 1 } bqpca_side;

typedef struct bqpca_fit_params {
  double s;          /* >= 1 */
  double p;          /* > 0, or INFINITY */
  uint32_t k1;       /* left projectors, 1 <= k1 <= rows */
  uint32_t k2;       /* right projectors, 1 <= k2 <= cols */
  double tol;        /* relative objective change that stops the MM loop */
  uint32_t max_iter; /* MM iteration cap per direction */
  bqpca_init init;
  uint64_t seed; /* used by BQPCA_INIT_RANDOM */
  /* Nonzero: the 0 < p < 1 update weights by |w^k| instead of |w^0|. */
  int small_p_uses_current;
} bqpca_fit_params;

typedef struct bqpca_dataset bqpca_dataset;
typedef struct bqpca_basis bqpca_basis;
typedef struct bqpca_gallery bqpca_gallery;

/* errors */
BQPCA_API const char* bqpca_last_error(void);
BQPCA_API const char* bqpca_status_string(bqpca_status status);
/* 1-based direction index of the last DegenerateDirection raised by a fit, 0 if none. */
BQPCA_API size_t bqpca_last_error_direction(void);

/* parameters (s = p = 2, k1 = k2 = 1, tol = 1e-4, max_iter = 500, all-ones start) */
BQPCA_API void bqpca_fit_params_init(bqpca_fit_params* params);

/* datasets */
BQPCA_API bqpca_status bqpca_dataset_load(const char* root, bqpca_dataset** out);
BQPCA_API bqpca_status bqpca_dataset_create(size_t rows, size_t cols, bqpca_dataset** out);
BQPCA_API bqpca_status bqpca_dataset_add_rgb(bqpca_dataset* set, const char* label,
                                             const uint8_t* rgb);
BQPCA_API bqpca_status bqpca_dataset_add_planes(bqpca_dataset* set, const char* label,
                                                const double* planes);
BQPCA_API void bqpca_dataset_free(bqpca_dataset* set);
BQPCA_API size_t bqpca_dataset_size(const bqpca_dataset* set);
BQPCA_API size_t bqpca_dataset_rows(const bqpca_dataset* set);
BQPCA_API size_t bqpca_dataset_cols(const bqpca_dataset* set);
/* Label / file name of sample i; NULL when out of range. Owned by the dataset. */
BQPCA_API const char* bqpca_dataset_label(const bqpca_dataset* set, size_t i);
BQPCA_API const char* bqpca_dataset_source(const bqpca_dataset* set, size_t i);
BQPCA_API bqpca_status bqpca_dataset_image(const bqpca_dataset* set, size_t i, double* planes);
/* Stratified per-class split; any of the outputs may be NULL to discard it. */
BQPCA_API bqpca_status bqpca_dataset_split(const bqpca_dataset* set, const double fractions[3],
                                           uint64_t seed, bqpca_dataset** train,
                                           bqpca_dataset** validation, bqpca_dataset** test);
/* Writes dir/<label>/<file> in each sample's original format; i/j/k parts are
   clipped to [0, 1]. */
BQPCA_API bqpca_status bqpca_dataset_export(const bqpca_dataset* set, const char* dir);

/* fitting */
BQPCA_API bqpca_status bqpca_fit(const bqpca_dataset* train, const bqpca_fit_params* params,
                                 bqpca_basis** out);
BQPCA_API bqpca_status bqpca_basis_save(const bqpca_basis* basis, const char* path);
BQPCA_API bqpca_status bqpca_basis_load(const char* path, bqpca_basis** out);
BQPCA_API bqpca_status bqpca_basis_truncate(const bqpca_basis* basis, size_t k1, size_t k2,
                                            bqpca_basis** out);
BQPCA_API void bqpca_basis_free(bqpca_basis* basis);
BQPCA_API bqpca_status bqpca_basis_dims(const bqpca_basis* basis, size_t* rows, size_t* cols,
                                        size_t* k1, size_t* k2);
BQPCA_API bqpca_status bqpca_basis_params(const bqpca_basis* basis, bqpca_fit_params* out);
/* Per-direction objective values (k1 or k2 doubles). */
BQPCA_API bqpca_status bqpca_basis_weights(const bqpca_basis* basis, bqpca_side side,
                                           double* out);
/* Projector planes: 4 * rows * k1 (left) or 4 * cols * k2 (right) doubles. */
BQPCA_API bqpca_status bqpca_basis_projector(const bqpca_basis* basis, bqpca_side side,
                                             double* planes);
/* Fit diagnostics for direction idx (0-based). BQPCA_ERR_INVALID_PARAMETER for a
   basis read from disk. */
BQPCA_API bqpca_status bqpca_basis_direction_info(const bqpca_basis* basis, bqpca_side side,
                                                  size_t idx, double* objective,
                                                  size_t* iterations, int* converged);
BQPCA_API size_t bqpca_basis_warning_count(const bqpca_basis* basis);
BQPCA_API const char* bqpca_basis_warning(const bqpca_basis* basis, size_t i);

/* data-driven weighting selection; accuracy[] is indexed by bqpca_manner */
BQPCA_API bqpca_status bqpca_select_weighting(const bqpca_dataset* train,
                                              const bqpca_fit_params* params, size_t repeats,
                                              double train_fraction, uint64_t seed,
                                              bqpca_transform transform, bqpca_manner* chosen,
                                              double accuracy[4]);

/* recognition */
BQPCA_API bqpca_status bqpca_gallery_build(const bqpca_dataset* train, const bqpca_basis* basis,
                                           bqpca_manner manner, bqpca_transform transform,
                                           bqpca_gallery** out);
BQPCA_API void bqpca_gallery_free(bqpca_gallery* gallery);
BQPCA_API size_t bqpca_gallery_size(const bqpca_gallery* gallery);
/* Nearest gallery label for probe i of `probes`; *label is owned by the gallery. */
BQPCA_API bqpca_status bqpca_classify(const bqpca_gallery* gallery, const bqpca_dataset* probes,
                                      size_t i, const char** label, double* distance);
BQPCA_API bqpca_status bqpca_evaluate(const bqpca_gallery* gallery, const bqpca_dataset* test,
                                      double* accuracy);

/* reconstruction; `recs` may be NULL when only the ratio is wanted */
BQPCA_API bqpca_status bqpca_reconstruct(const bqpca_dataset* set, const bqpca_basis* basis,
                                         bqpca_manner manner, bqpca_transform transform,
                                         bqpca_dataset** recs, double* ratio);

#ifdef __cplusplus
}
#endif

#endif /* BQPCA_BQPCA_H */
