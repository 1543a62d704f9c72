#ifndef MIMETIC_H
#define MIMETIC_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result of every call.
typedef enum MimeticStatus {
  MIMETIC_STATUS_OK = 0,
  MIMETIC_STATUS_NULL_POINTER = 1,
  MIMETIC_STATUS_INVALID_ARGUMENT = 2,
  MIMETIC_STATUS_SHAPE_MISMATCH = 3,
  MIMETIC_STATUS_BUFFER_TOO_SMALL = 4,
  MIMETIC_STATUS_UNSUPPORTED = 5,
  MIMETIC_STATUS_PANIC = 6,
} MimeticStatus;

// How a 3D run is started.
typedef enum MimeticInit3 {
  // The lowest cavity mode; needs trivial materials and a bounded box to be meaningful.
  MIMETIC_INIT3_MODE = 0,
  // Uniform random fields from the given seed.
  MIMETIC_INIT3_RANDOM = 1,
} MimeticInit3;

// Maxwell's equations on the unit cube, `E` on primal edges and `H` on dual edges.
typedef struct MimeticMaxwell MimeticMaxwell;

// Scalar harmonic oscillator `u' = -w v`, `v' = w u`.
typedef struct MimeticOscillator MimeticOscillator;

// 1D wave equation on `[0, 1]` with pinned ends.
typedef struct MimeticWave1d MimeticWave1d;

// Scalar wave equation on the unit cube with `s` at primal nodes.
typedef struct MimeticWave3d MimeticWave3d;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *mimetic_version(void);

// Message for the last failed call on this thread; empty after a success.
// Valid until the next call on the same thread.
const char *mimetic_last_error(void);

// # Safety
// `out` must be valid for a pointer write.
enum MimeticStatus mimetic_oscillator_new(double omega,
                                          double dt,
                                          double u0,
                                          double v0,
                                          struct MimeticOscillator **out);

// # Safety
// `h` must come from [`mimetic_oscillator_new`].
enum MimeticStatus mimetic_oscillator_step(struct MimeticOscillator *h, size_t steps);

// Writes `u_n`, `v_{n+1/2}` and the step count.
//
// # Safety
// `h` must come from [`mimetic_oscillator_new`]; outputs must be writable.
enum MimeticStatus mimetic_oscillator_state(struct MimeticOscillator *h,
                                            double *u,
                                            double *v_half,
                                            size_t *step);

// # Safety
// `h` must come from [`mimetic_oscillator_new`]; outputs must be writable.
enum MimeticStatus mimetic_oscillator_conserved(struct MimeticOscillator *h,
                                                double *c_n,
                                                double *c_half);

// # Safety
// `h` must come from [`mimetic_oscillator_new`] and not be used afterwards. Null is ignored.
void mimetic_oscillator_free(struct MimeticOscillator *h);

// Creates a run with the named material preset (as on the command line, e.g.
// `cmp:1` or `bump:2,2`) and `nx` points, taking `dt = courant dx / s_max`.
// Constant presets start from the lowest standing mode, others from
// `sin(pi x)` at rest.
//
// # Safety
// `material` must be a NUL-terminated string; `out` must be writable.
enum MimeticStatus mimetic_wave1d_new(const char *material,
                                      size_t nx,
                                      double courant,
                                      struct MimeticWave1d **out);

// # Safety
// `h` must come from [`mimetic_wave1d_new`].
enum MimeticStatus mimetic_wave1d_step(struct MimeticWave1d *h, size_t steps);

// # Safety
// `h` must come from [`mimetic_wave1d_new`]; outputs must be writable.
enum MimeticStatus mimetic_wave1d_conserved(struct MimeticWave1d *h, double *c_n, double *c_half);

// Number of primal points.
//
// # Safety
// `h` must come from [`mimetic_wave1d_new`]; `len` must be writable.
enum MimeticStatus mimetic_wave1d_len(struct MimeticWave1d *h, size_t *len);

// Time step chosen at creation.
//
// # Safety
// `h` must come from [`mimetic_wave1d_new`]; `dt` must be writable.
enum MimeticStatus mimetic_wave1d_dt(struct MimeticWave1d *h, double *dt);

// Copies `u` at the current integer time level.
//
// # Safety
// `h` must come from [`mimetic_wave1d_new`]; `out` must hold `len` doubles.
enum MimeticStatus mimetic_wave1d_copy_u(struct MimeticWave1d *h, double *out, size_t len);

// # Safety
// `h` must come from [`mimetic_wave1d_new`] and not be used afterwards. Null is ignored.
void mimetic_wave1d_free(struct MimeticWave1d *h);

// Creates an `n^3` run with the named material set (`trivial`, `diagonal` or
// `variable`) and `dt = safety * 2 / |A|`.
//
// # Safety
// `materials` must be a NUL-terminated string; `out` must be writable.
enum MimeticStatus mimetic_wave3d_new(size_t n,
                                      bool periodic,
                                      const char *materials,
                                      double safety,
                                      enum MimeticInit3 init,
                                      uint64_t seed,
                                      struct MimeticWave3d **out);

// # Safety
// `h` must come from [`mimetic_wave3d_new`].
enum MimeticStatus mimetic_wave3d_step(struct MimeticWave3d *h, size_t steps);

// # Safety
// `h` must come from [`mimetic_wave3d_new`]; outputs must be writable.
enum MimeticStatus mimetic_wave3d_conserved(struct MimeticWave3d *h, double *c_n, double *c_half);

// Number of primal nodes, the length of the array written by [`mimetic_wave3d_copy_s`].
//
// # Safety
// `h` must come from [`mimetic_wave3d_new`]; `len` must be writable.
enum MimeticStatus mimetic_wave3d_len(struct MimeticWave3d *h, size_t *len);

// Copies `s` at the current level, indexed `[i][j][k]` with `k` fastest.
//
// # Safety
// `h` must come from [`mimetic_wave3d_new`]; `out` must hold `len` doubles.
enum MimeticStatus mimetic_wave3d_copy_s(struct MimeticWave3d *h, double *out, size_t len);

// # Safety
// `h` must come from [`mimetic_wave3d_new`] and not be used afterwards. Null is ignored.
void mimetic_wave3d_free(struct MimeticWave3d *h);

// Creates an `n^3` run. [`MimeticInit3::Mode`] starts from the TE110 cavity mode.
//
// # Safety
// `materials` must be a NUL-terminated string; `out` must be writable.
enum MimeticStatus mimetic_maxwell_new(size_t n,
                                       bool periodic,
                                       const char *materials,
                                       double safety,
                                       enum MimeticInit3 init,
                                       uint64_t seed,
                                       struct MimeticMaxwell **out);

// # Safety
// `h` must come from [`mimetic_maxwell_new`].
enum MimeticStatus mimetic_maxwell_step(struct MimeticMaxwell *h, size_t steps);

// # Safety
// `h` must come from [`mimetic_maxwell_new`]; outputs must be writable.
enum MimeticStatus mimetic_maxwell_conserved(struct MimeticMaxwell *h, double *c_n, double *c_half);

// Norms of the electric and magnetic divergence.
//
// # Safety
// `h` must come from [`mimetic_maxwell_new`]; outputs must be writable.
enum MimeticStatus mimetic_maxwell_divergence(struct MimeticMaxwell *h,
                                              double *div_e,
                                              double *div_h);

// Number of stored `E` values over all three components.
//
// # Safety
// `h` must come from [`mimetic_maxwell_new`]; `len` must be writable.
enum MimeticStatus mimetic_maxwell_len(struct MimeticMaxwell *h, size_t *len);

// Copies `E`: the x component first, then y, then z, each `[i][j][k]` with `k` fastest.
//
// # Safety
// `h` must come from [`mimetic_maxwell_new`]; `out` must hold `len` doubles.
enum MimeticStatus mimetic_maxwell_copy_e(struct MimeticMaxwell *h, double *out, size_t len);

// # Safety
// `h` must come from [`mimetic_maxwell_new`] and not be used afterwards. Null is ignored.
void mimetic_maxwell_free(struct MimeticMaxwell *h);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MIMETIC_H */
