/* latlin C interface.
 *
 * All functions return a latlin_status. On failure a message describing the
 * error is available from latlin_last_error() on the calling thread until the
 * next failing call on that thread.
 *
 * Array layouts
 *   lattice field   points * dim doubles, point-major (u[p*dim + i])
 *   cell field      cells * dim * 2^dim doubles; each cell block is a dim x 2^dim
 *                   matrix stored column-major (g[c*B + i + dim*j], B = dim * 2^dim)
 *   matrices        basis and Z column-major; F passed to latlin_model_eval is a
 *                   dim x 2^dim column-major matrix
 *   tensor          C[((i*dim + j)*dim + k)*dim + l]
 */
#ifndef LATLIN_H
#define LATLIN_H

#include <stddef.h>
#include <stdint.h>

#if defined(LATLIN_BUILDING_LIBRARY)
#define LATLIN_API __attribute__((visibility("default")))
#else
#define LATLIN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum latlin_status {
  LATLIN_OK = 0,
  LATLIN_INVALID_ARGUMENT = 1,
  LATLIN_UNSUPPORTED_DIMENSION = 2,
  LATLIN_EMPTY_LATTICE = 3,
  LATLIN_MARGIN_VIOLATION = 4,
  LATLIN_FRINGE_POINT = 5,
  LATLIN_LATTICE_MISMATCH = 6,
  LATLIN_QUADRATURE_MISALIGNMENT = 7,
  LATLIN_MALFORMED_MODEL = 8,
  LATLIN_SYMMETRY_VIOLATION = 9,
  LATLIN_NON_FINITE = 10,
  LATLIN_INSTABILITY = 11,
  LATLIN_NO_CONVERGENCE = 12,
  LATLIN_CFL_VIOLATION = 13,
  LATLIN_IO = 14,
  LATLIN_CONFIG = 15,
  LATLIN_RESOLUTION_BUDGET = 16,
  LATLIN_INTERNAL = 99
} latlin_status;

typedef struct latlin_lattice latlin_lattice;
typedef struct latlin_model latlin_model;

LATLIN_API const char* latlin_version(void);
LATLIN_API const char* latlin_status_string(latlin_status status);
LATLIN_API const char* latlin_last_error(void);

/* ---- lattice ---------------------------------------------------------- */

/* omega_tilde_lo / omega_tilde_hi may be NULL: omega is then widened by
 * 2 * epsilon * max_a sum_b |A_ab| on every side. */
LATLIN_API latlin_status latlin_lattice_create(int dim, const double* basis, double epsilon, const double* omega_lo,
                                               const double* omega_hi, const double* omega_tilde_lo,
                                               const double* omega_tilde_hi, latlin_lattice** out);
LATLIN_API void latlin_lattice_destroy(latlin_lattice* lattice);

LATLIN_API latlin_status latlin_lattice_info(const latlin_lattice* lattice, int* dim, int64_t* points, int64_t* cells,
                                             int* corners, double* cell_volume);
/* coords: points * dim doubles. */
LATLIN_API latlin_status latlin_lattice_points(const latlin_lattice* lattice, double* coords);
/* flags: points bytes, 1 for points of omega. */
LATLIN_API latlin_status latlin_lattice_in_omega(const latlin_lattice* lattice, unsigned char* flags);
/* barycenters: cells * dim doubles. */
LATLIN_API latlin_status latlin_lattice_barycenters(const latlin_lattice* lattice, double* barycenters);
/* Z: dim * 2^dim doubles, column-major. */
LATLIN_API latlin_status latlin_lattice_corner_labels(const latlin_lattice* lattice, double* Z);
/* Index of the stored cell containing x; LATLIN_FRINGE_POINT when no stored cell does. */
LATLIN_API latlin_status latlin_lattice_cell_of(const latlin_lattice* lattice, const double* x, int64_t* cell);

/* ---- cell energy models ------------------------------------------------ */

/* model_json: {"name": "harmonic_chain" | "cauchy_born_split" | "quartic_probe",
 * "params": {...}}; the reference cell is the lattice's Z. */
LATLIN_API latlin_status latlin_model_create(const char* model_json, const latlin_lattice* lattice,
                                             latlin_model** out);
LATLIN_API void latlin_model_destroy(latlin_model* model);
/* grad may be NULL. */
LATLIN_API latlin_status latlin_model_eval(const latlin_model* model, const double* F, double* W, double* grad);
/* C: dim^4 doubles, C = Z H Z from the Hessian at Z. */
LATLIN_API latlin_status latlin_model_tensor(const latlin_model* model, double* C);

/* ---- discrete operators ----------------------------------------------- */

LATLIN_API latlin_status latlin_inner_product(const latlin_lattice* lattice, const double* u, const double* v,
                                              double* out);
LATLIN_API latlin_status latlin_discrete_gradient(const latlin_lattice* lattice, const double* u, double* g);
LATLIN_API latlin_status latlin_discrete_divergence(const latlin_lattice* lattice, const double* g, double* out);
LATLIN_API latlin_status latlin_energy(const latlin_lattice* lattice, const latlin_model* model, double delta,
                                       const double* u, double* energy);
LATLIN_API latlin_status latlin_force(const latlin_lattice* lattice, const latlin_model* model, double delta,
                                      const double* u, double* force);

/* ---- command drivers --------------------------------------------------- */

/* command: "simulate" | "converge" | "tensor" | "check-model" | "audit" | "recover".
 * request_json is the command's JSON request; "converge" takes
 * {"config": {...}, "out": "<dir>"} and "audit" takes
 * {"trajectory": "<file>", "edie_tolerance"?: number}. On success *result_json
 * receives a string owned by the caller (release with latlin_string_free). */
LATLIN_API latlin_status latlin_run(const char* command, const char* request_json, char** result_json);
LATLIN_API void latlin_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* LATLIN_H */
