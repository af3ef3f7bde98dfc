#ifndef DRAC_H
#define DRAC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum DracStatus {
  DRAC_STATUS_OK = 0,
  DRAC_STATUS_NULL_POINTER = 1,
  DRAC_STATUS_INVALID_ARGUMENT = 2,
  DRAC_STATUS_IO = 3,
  DRAC_STATUS_PARSE = 4,
  DRAC_STATUS_DEGENERATE = 5,
  DRAC_STATUS_INDEX_OUT_OF_RANGE = 6,
  DRAC_STATUS_BUFFER_TOO_SMALL = 7,
  DRAC_STATUS_INTERNAL = 8,
} DracStatus;

// Opaque clustering result.
typedef struct DracClustering DracClustering;

// Opaque point set.
typedef struct DracDataset DracDataset;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null if none. The
// pointer stays valid until the next failing call on the same thread.
const char *drac_last_error_message(void);

// Builds a dataset from `n` coordinates in `xs` and `ys`.
//
// # Safety
// `xs` and `ys` must each point to `n` readable doubles; `out` must be writable.
enum DracStatus drac_dataset_new(const double *xs,
                                 const double *ys,
                                 size_t n,
                                 struct DracDataset **out);

// Reads a two-column CSV file.
//
// # Safety
// `path` must be a nul-terminated string; `out` must be writable.
enum DracStatus drac_dataset_from_csv(const char *path, bool has_header, struct DracDataset **out);

// Number of points, or 0 for a null handle.
//
// # Safety
// `dataset` must be null or a live handle.
size_t drac_dataset_len(const struct DracDataset *dataset);

// # Safety
// `dataset` must be null or a handle not yet freed.
void drac_dataset_free(struct DracDataset *dataset);

// Writes the Shapley value of every point into `out[0..len]`.
//
// # Safety
// `dataset` must be a live handle; `out` must hold `len` writable doubles.
enum DracStatus drac_shapley(const struct DracDataset *dataset, double *out, size_t len);

// Clusters `dataset` with threshold `delta` and queue fraction `gamma`.
//
// # Safety
// `dataset` must be a live handle; `out` must be writable.
enum DracStatus drac_cluster_run(const struct DracDataset *dataset,
                                 double delta,
                                 double gamma,
                                 struct DracClustering **out);

// Number of labeled points, or 0 for a null handle.
//
// # Safety
// `clustering` must be null or a live handle.
size_t drac_clustering_len(const struct DracClustering *clustering);

// Number of clusters (noise excluded), or 0 for a null handle.
//
// # Safety
// `clustering` must be null or a live handle.
size_t drac_clustering_num_clusters(const struct DracClustering *clustering);

// Writes each point's cluster id, or -1 for noise, into `out[0..len]`.
//
// # Safety
// `clustering` must be a live handle; `out` must hold `len` writable values.
enum DracStatus drac_clustering_labels(const struct DracClustering *clustering,
                                       int64_t *out,
                                       size_t len);

// Writes the center point index of each cluster into `out[0..len]`.
//
// # Safety
// `clustering` must be a live handle; `out` must hold `len` writable values.
enum DracStatus drac_clustering_centers(const struct DracClustering *clustering,
                                        size_t *out,
                                        size_t len);

// Similarity threshold used by cluster `cluster`.
//
// # Safety
// `clustering` must be a live handle; `out` must be writable.
enum DracStatus drac_clustering_beta(const struct DracClustering *clustering,
                                     size_t cluster,
                                     double *out);

// # Safety
// `clustering` must be null or a handle not yet freed.
void drac_clustering_free(struct DracClustering *clustering);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DRAC_H */
