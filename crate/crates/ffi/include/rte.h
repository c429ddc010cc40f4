/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef RTE_H
#define RTE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RteStatus {
  RTE_STATUS_OK = 0,
  RTE_STATUS_NULL_POINTER = 1,
  RTE_STATUS_CONFIG = 2,
  RTE_STATUS_NUMERIC = 3,
  RTE_STATUS_IO = 4,
  RTE_STATUS_INVALID_ARGUMENT = 5,
  RTE_STATUS_PANIC = 6,
} RteStatus;

// Run configuration (domain, medium, source, solver settings).
typedef struct RteConfig RteConfig;

// Boundary outflow samples, `K` points by `N` directions.
typedef struct RteMeasurement RteMeasurement;

// Unstructured triangular mesh.
typedef struct RteMesh RteMesh;

// Per-triangle reconstruction and its diagnostics.
typedef struct RteReport RteReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on this thread.
const char *rte_last_error(void);

// Library version as a static nul-terminated string.
const char *rte_version(void);

// Generates a mesh of the domain described by `curve` (e.g. `circle:1`,
// `ellipse:0.69:0.92`) with target edge length `h`.
//
// # Safety
// `curve` must be a nul-terminated string; `out` must be valid for one write.
enum RteStatus rte_mesh_generate(const char *curve, double h, struct RteMesh **out);

// # Safety
// `path` must be a nul-terminated string; `out` must be valid for one write.
enum RteStatus rte_mesh_read(const char *path, struct RteMesh **out);

// # Safety
// `mesh` must be a live handle and `path` a nul-terminated string.
enum RteStatus rte_mesh_write(const struct RteMesh *mesh, const char *path);

// # Safety
// `mesh` must be a live handle; the outputs must be valid for one write each.
enum RteStatus rte_mesh_size(const struct RteMesh *mesh, size_t *vertices, size_t *triangles);

// # Safety
// `mesh` must be null or a handle not yet freed.
void rte_mesh_free(struct RteMesh *mesh);

// Reads and validates an INI run configuration.
//
// # Safety
// `path` must be a nul-terminated string; `out` must be valid for one write.
enum RteStatus rte_config_read(const char *path, struct RteConfig **out);

// Parses a configuration held in memory.
//
// # Safety
// `text` must be a nul-terminated string; `out` must be valid for one write.
enum RteStatus rte_config_parse(const char *text, struct RteConfig **out);

// One of `exp1`, `exp2`, `exp1-desk`, `exp2-desk`.
//
// # Safety
// `name` must be a nul-terminated string; `out` must be valid for one write.
enum RteStatus rte_config_preset(const char *name, struct RteConfig **out);

// # Safety
// `config` must be null or a handle not yet freed.
void rte_config_free(struct RteConfig *config);

// Synthetic boundary data for the configured medium and source, using the
// configured forward mesh and model.
//
// # Safety
// `config` must be a live handle; `out` must be valid for one write.
enum RteStatus rte_forward(const struct RteConfig *config, struct RteMeasurement **out);

// # Safety
// `path` must be a nul-terminated string; `out` must be valid for one write.
enum RteStatus rte_measurement_read(const char *path, struct RteMeasurement **out);

// # Safety
// `meas` must be a live handle and `path` a nul-terminated string.
enum RteStatus rte_measurement_write(const struct RteMeasurement *meas, const char *path);

// Number of boundary points `K` and directions `N`.
//
// # Safety
// `meas` must be a live handle; the outputs must be valid for one write each.
enum RteStatus rte_measurement_dims(const struct RteMeasurement *meas, size_t *k, size_t *n);

// Copies the `K·N` samples, point-major, into `buf` of length `len`.
//
// # Safety
// `meas` must be a live handle and `buf` valid for `len` writes.
enum RteStatus rte_measurement_copy_values(const struct RteMeasurement *meas,
                                           double *buf,
                                           size_t len);

// # Safety
// `meas` must be null or a handle not yet freed.
void rte_measurement_free(struct RteMeasurement *meas);

// Reconstructs the source on `mesh` at truncation order `m`; a negative `m`
// selects the configured order.
//
// # Safety
// All handles must be live; `out` must be valid for one write.
enum RteStatus rte_reconstruct(const struct RteConfig *config,
                               const struct RteMeasurement *meas,
                               const struct RteMesh *mesh,
                               int32_t m,
                               struct RteReport **out);

// Number of triangles, i.e. the length of the `q` arrays.
//
// # Safety
// `report` must be a live handle; `triangles` must be valid for one write.
enum RteStatus rte_report_len(const struct RteReport *report, size_t *triangles);

// Imaginary-part criterion value of the reconstruction.
//
// # Safety
// `report` must be a live handle; `value` must be valid for one write.
enum RteStatus rte_report_e_imag(const struct RteReport *report, double *value);

// Copies the per-triangle real and imaginary parts of `q`; each buffer has length `len`.
//
// # Safety
// `report` must be a live handle and both buffers valid for `len` writes.
enum RteStatus rte_report_copy_q(const struct RteReport *report,
                                 double *real,
                                 double *imag,
                                 size_t len);

// # Safety
// `report` must be null or a handle not yet freed.
void rte_report_free(struct RteReport *report);

// Runs the built-in oracle suite and reports how many checks passed.
//
// # Safety
// The outputs must be valid for one write each.
enum RteStatus rte_validate(size_t *passed, size_t *total);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RTE_H */
