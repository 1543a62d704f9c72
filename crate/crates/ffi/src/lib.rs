//! C interface to the `mimetic` solvers.
//!
//! Every solver is an opaque handle created by a `*_new` function and released
//! with the matching `*_free`. Functions return a [`MimeticStatus`]; on failure
//! [`mimetic_last_error`] gives a message for the calling thread. Output
//! arrays are written in row-major order and must be at least as long as the
//! matching `*_len` function reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mimetic::leapfrog::{
    conserved_full, conserved_half_step, system_step, AdjointPair, SystemState,
};
use mimetic::mimetic3d::{Boundary, Field3, FieldKind, Grid3, Star3};
use mimetic::oscillator::{self, InitMode, OscParams, OscState};
use mimetic::wave1d::{self, Grid1D, MaterialPreset, Materials1D, Start, Wave1DOps, WaveState1D};
use mimetic::wave3d::{
    cavity_mode, maxwell_divergence, maxwell_initial_state, scalar_initial_state, suggest_dt,
    suggest_dt_maxwell, te110_fields, Materials3, MaxwellOps, ScalarWaveOps,
};
use mimetic::Error;

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MimeticStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ShapeMismatch = 3,
    BufferTooSmall = 4,
    Unsupported = 5,
    Panic = 6,
}

/// How a 3D run is started.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MimeticInit3 {
    /// The lowest cavity mode; needs trivial materials and a bounded box to be meaningful.
    Mode = 0,
    /// Uniform random fields from the given seed.
    Random = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

struct Failure(MimeticStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Shape { .. } | Error::Kind { .. } => MimeticStatus::ShapeMismatch,
            Error::Unsupported(_) => MimeticStatus::Unsupported,
            _ => MimeticStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(MimeticStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, turning errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MimeticStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            MimeticStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal error: {msg}"));
            MimeticStatus::Panic
        }
    }
}

unsafe fn handle<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null("handle"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Failure(
            MimeticStatus::InvalidArgument,
            format!("{what} is not UTF-8"),
        )
    })
}

unsafe fn write_pair(a: *mut f64, b: *mut f64, va: f64, vb: f64) -> Result<(), Failure> {
    if a.is_null() || b.is_null() {
        return Err(null("output"));
    }
    *a = va;
    *b = vb;
    Ok(())
}

unsafe fn copy_out(
    src: impl ExactSizeIterator<Item = f64>,
    out: *mut f64,
    len: usize,
) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output buffer"));
    }
    if len < src.len() {
        return Err(Failure(
            MimeticStatus::BufferTooSmall,
            format!("buffer holds {len} values, need {}", src.len()),
        ));
    }
    let dst = std::slice::from_raw_parts_mut(out, src.len());
    for (d, s) in dst.iter_mut().zip(src) {
        *d = s;
    }
    Ok(())
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn release<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

fn conserved<P: AdjointPair>(s: &SystemState<P::X, P::Y>, ops: &P) -> (f64, f64) {
    (conserved_full(s, ops), conserved_half_step(s, ops))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mimetic_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn mimetic_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

// Oscillator

/// Scalar harmonic oscillator `u' = -w v`, `v' = w u`.
pub struct MimeticOscillator {
    params: OscParams,
    state: OscState,
}

/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn mimetic_oscillator_new(
    omega: f64,
    dt: f64,
    u0: f64,
    v0: f64,
    out: *mut *mut MimeticOscillator,
) -> MimeticStatus {
    guard(|| {
        let params = OscParams::new(omega, dt, 0)?;
        let state = oscillator::initial_state(u0, v0, &params, InitMode::Taylor);
        emit(out, MimeticOscillator { params, state })
    })
}

/// # Safety
/// `h` must come from [`mimetic_oscillator_new`].
#[no_mangle]
pub unsafe extern "C" fn mimetic_oscillator_step(
    h: *mut MimeticOscillator,
    steps: usize,
) -> MimeticStatus {
    guard(|| {
        let h = handle(h)?;
        for _ in 0..steps {
            h.state = oscillator::leapfrog_step(&h.state, &h.params);
        }
        Ok(())
    })
}

/// Writes `u_n`, `v_{n+1/2}` and the step count.
///
/// # Safety
/// `h` must come from [`mimetic_oscillator_new`]; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn mimetic_oscillator_state(
    h: *mut MimeticOscillator,
    u: *mut f64,
    v_half: *mut f64,
    step: *mut usize,
) -> MimeticStatus {
    guard(|| {
        let h = handle(h)?;
        if step.is_null() {
            return Err(null("step"));
        }
        write_pair(u, v_half, h.state.u, h.state.v_half)?;
        *step = h.state.step;
        Ok(())
    })
}

/// # Safety
/// `h` must come from [`mimetic_oscillator_new`]; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn mimetic_oscillator_conserved(
    h: *mut MimeticOscillator,
    c_n: *mut f64,
    c_half: *mut f64,
) -> MimeticStatus {
    guard(|| {
        let h = handle(h)?;
        let a = oscillator::conserved_n(&h.state, &h.params);
        let b = oscillator::conserved_half_of(&h.state, &h.params);
        write_pair(c_n, c_half, a, b)
    })
}

/// # Safety
/// `h` must come from [`mimetic_oscillator_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn mimetic_oscillator_free(h: *mut MimeticOscillator) {
    release(h)
}

// 1D wave

/// 1D wave equation on `[0, 1]` with pinned ends.
pub struct MimeticWave1d {
    grid: Grid1D,
    materials: Materials1D,
    state: WaveState1D,
}

impl MimeticWave1d {
    fn ops(&self) -> Wave1DOps<'_> {
        Wave1DOps {
            materials: &self.materials,
            dx: self.grid.dx,
            nx: self.grid.nx,
        }
    }
}

/// Creates a run with the named material preset (as on the command line, e.g.
/// `cmp:1` or `bump:2,2`) and `nx` points, taking `dt = courant dx / s_max`.
/// Constant presets start from the lowest standing mode, others from
/// `sin(pi x)` at rest.
///
/// # Safety
/// `material` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mimetic_wave1d_new(
    material: *const c_char,
    nx: usize,
    courant: f64,
    out: *mut *mut MimeticWave1d,
) -> MimeticStatus {
    guard(|| {
        let preset: MaterialPreset = text(material, "material")?.parse()?;
        if !(courant > 0.0) {
            return Err(Failure(
                MimeticStatus::InvalidArgument,
                format!("courant must be > 0, got {courant}"),
            ));
        }
        let probe = Grid1D::new(0.0, 1.0, nx, 1.0, 1)?;
        let speed = wave1d::cfl_speed(&preset.materials(&probe)?);
        // One unit of time split into whole steps no longer than requested.
        let nt = (speed / (courant * probe.dx)).ceil().max(1.0) as usize;
        let grid = Grid1D::new(0.0, 1.0, nx, 1.0, nt)?;
        let materials = preset.materials(&grid)?;
        let start = if preset.is_constant() {
            Start::ExactMode { m: 1 }
        } else {
            Start::SineTaylor {
                m: 1,
                variant: mimetic::leapfrog::TaylorVariant::Oscillator,
            }
        };
        let state = wave1d::initial_state(&grid, &materials, start)?;
        emit(
            out,
            MimeticWave1d {
                grid,
                materials,
                state,
            },
        )
    })
}

/// # Safety
/// `h` must come from [`mimetic_wave1d_new`].
#[no_mangle]
pub unsafe extern "C" fn mimetic_wave1d_step(h: *mut MimeticWave1d, steps: usize) -> MimeticStatus {
    guard(|| {
        let h = handle(h)?;
        let ops = Wave1DOps {
            materials: &h.materials,
            dx: h.grid.dx,
            nx: h.grid.nx,
        };
        for _ in 0..steps {
            system_step(&mut h.state, &ops)?;
        }
        Ok(())
    })
}

/// # Safety
/// `h` must come from [`mimetic_wave1d_new`]; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn mimetic_wave1d_conserved(
    h: *mut MimeticWave1d,
    c_n: *mut f64,
    c_half: *mut f64,
) -> MimeticStatus {
    guard(|| {
        let h = handle(h)?;
        let (a, b) = conserved(&h.state, &h.ops());
        write_pair(c_n, c_half, a, b)
    })
}

/// Number of primal points.
///
/// # Safety
/// `h` must come from [`mimetic_wave1d_new`]; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mimetic_wave1d_len(
    h: *mut MimeticWave1d,
    len: *mut usize,
) -> MimeticStatus {
    guard(|| {
        let h = handle(h)?;
        len.as_mut()
            .map(|l| *l = h.grid.nx)
            .ok_or_else(|| null("len"))
    })
}

/// Time step chosen at creation.
///
/// # Safety
/// `h` must come from [`mimetic_wave1d_new`]; `dt` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mimetic_wave1d_dt(h: *mut MimeticWave1d, dt: *mut f64) -> MimeticStatus {
    guard(|| {
        let h = handle(h)?;
        dt.as_mut()
            .map(|d| *d = h.grid.dt)
            .ok_or_else(|| null("dt"))
    })
}

/// Copies `u` at the current integer time level.
///
/// # Safety
/// `h` must come from [`mimetic_wave1d_new`]; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mimetic_wave1d_copy_u(
    h: *mut MimeticWave1d,
    out: *mut f64,
    len: usize,
) -> MimeticStatus {
    guard(|| {
        let h = handle(h)?;
        copy_out(h.state.f.iter().copied(), out, len)
    })
}

/// # Safety
/// `h` must come from [`mimetic_wave1d_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn mimetic_wave1d_free(h: *mut MimeticWave1d) {
    release(h)
}

// 3D solvers

fn cube(n: usize, periodic: bool) -> Result<Grid3, Failure> {
    let b = if periodic {
        Boundary::Periodic
    } else {
        Boundary::Bounded
    };
    Ok(Grid3::cube(n, b)?)
}

/// Scalar wave equation on the unit cube with `s` at primal nodes.
pub struct MimeticWave3d {
    grid: Grid3,
    star: Star3,
    state: SystemState<Field3, Field3>,
}

impl MimeticWave3d {
    fn ops(&self) -> ScalarWaveOps<'_> {
        ScalarWaveOps {
            star: &self.star,
            grid: &self.grid,
        }
    }
}

/// Creates an `n^3` run with the named material set (`trivial`, `diagonal` or
/// `variable`) and `dt = safety * 2 / |A|`.
///
/// # Safety
/// `materials` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mimetic_wave3d_new(
    n: usize,
    periodic: bool,
    materials: *const c_char,
    safety: f64,
    init: MimeticInit3,
    seed: u64,
    out: *mut *mut MimeticWave3d,
) -> MimeticStatus {
    guard(|| {
        let mats: Materials3 = text(materials, "materials")?.parse()?;
        let grid = cube(n, periodic)?;
        let star = mats.scalar_star(&grid)?;
        let state = {
            let ops = ScalarWaveOps::new(&star, &grid)?;
            let dt = suggest_dt(&star, &grid, safety)?;
            let (s0, v0) = match init {
                MimeticInit3::Mode => (
                    Field3::from_fn(FieldKind::Node, &grid, |_, p| cavity_mode(p, 0.0)),
                    Field3::zeros(FieldKind::DualFace, &grid),
                ),
                MimeticInit3::Random => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let s0 = Field3::random(FieldKind::Node, &grid, &mut rng, 0);
                    (s0, Field3::random(FieldKind::DualFace, &grid, &mut rng, 0))
                }
            };
            scalar_initial_state(&ops, s0, &v0, dt)?
        };
        emit(out, MimeticWave3d { grid, star, state })
    })
}

/// # Safety
/// `h` must come from [`mimetic_wave3d_new`].
#[no_mangle]
pub unsafe extern "C" fn mimetic_wave3d_step(h: *mut MimeticWave3d, steps: usize) -> MimeticStatus {
    guard(|| {
        let h = handle(h)?;
        let ops = ScalarWaveOps {
            star: &h.star,
            grid: &h.grid,
        };
        for _ in 0..steps {
            system_step(&mut h.state, &ops)?;
        }
        Ok(())
    })
}

/// # Safety
/// `h` must come from [`mimetic_wave3d_new`]; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn mimetic_wave3d_conserved(
    h: *mut MimeticWave3d,
    c_n: *mut f64,
    c_half: *mut f64,
) -> MimeticStatus {
    guard(|| {
        let h = handle(h)?;
        let (a, b) = conserved(&h.state, &h.ops());
        write_pair(c_n, c_half, a, b)
    })
}

/// Number of primal nodes, the length of the array written by [`mimetic_wave3d_copy_s`].
///
/// # Safety
/// `h` must come from [`mimetic_wave3d_new`]; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mimetic_wave3d_len(
    h: *mut MimeticWave3d,
    len: *mut usize,
) -> MimeticStatus {
    guard(|| {
        let h = handle(h)?;
        len.as_mut()
            .map(|l| *l = h.state.f.len())
            .ok_or_else(|| null("len"))
    })
}

/// Copies `s` at the current level, indexed `[i][j][k]` with `k` fastest.
///
/// # Safety
/// `h` must come from [`mimetic_wave3d_new`]; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mimetic_wave3d_copy_s(
    h: *mut MimeticWave3d,
    out: *mut f64,
    len: usize,
) -> MimeticStatus {
    guard(|| {
        let h = handle(h)?;
        copy_out(h.state.f.comps[0].iter().copied(), out, len)
    })
}

/// # Safety
/// `h` must come from [`mimetic_wave3d_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn mimetic_wave3d_free(h: *mut MimeticWave3d) {
    release(h)
}

/// Maxwell's equations on the unit cube, `E` on primal edges and `H` on dual edges.
pub struct MimeticMaxwell {
    grid: Grid3,
    materials: Star3,
    state: SystemState<Field3, Field3>,
}

impl MimeticMaxwell {
    fn ops(&self) -> MaxwellOps<'_> {
        MaxwellOps {
            materials: &self.materials,
            grid: &self.grid,
        }
    }
}

/// Creates an `n^3` run. [`MimeticInit3::Mode`] starts from the TE110 cavity mode.
///
/// # Safety
/// `materials` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mimetic_maxwell_new(
    n: usize,
    periodic: bool,
    materials: *const c_char,
    safety: f64,
    init: MimeticInit3,
    seed: u64,
    out: *mut *mut MimeticMaxwell,
) -> MimeticStatus {
    guard(|| {
        let mats: Materials3 = text(materials, "materials")?.parse()?;
        let grid = cube(n, periodic)?;
        let star = mats.maxwell_star(&grid)?;
        let state = {
            let ops = MaxwellOps::new(&star, &grid)?;
            let dt = suggest_dt_maxwell(&star, &grid, safety)?;
            let (e0, h0) = match init {
                MimeticInit3::Mode => te110_fields(&grid, 0.0, 0.0),
                MimeticInit3::Random => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let e0 = Field3::random(FieldKind::Edge, &grid, &mut rng, 0);
                    (e0, Field3::random(FieldKind::DualEdge, &grid, &mut rng, 0))
                }
            };
            maxwell_initial_state(&ops, e0, &h0, dt)?
        };
        emit(
            out,
            MimeticMaxwell {
                grid,
                materials: star,
                state,
            },
        )
    })
}

/// # Safety
/// `h` must come from [`mimetic_maxwell_new`].
#[no_mangle]
pub unsafe extern "C" fn mimetic_maxwell_step(
    h: *mut MimeticMaxwell,
    steps: usize,
) -> MimeticStatus {
    guard(|| {
        let h = handle(h)?;
        let ops = MaxwellOps {
            materials: &h.materials,
            grid: &h.grid,
        };
        for _ in 0..steps {
            system_step(&mut h.state, &ops)?;
        }
        Ok(())
    })
}

/// # Safety
/// `h` must come from [`mimetic_maxwell_new`]; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn mimetic_maxwell_conserved(
    h: *mut MimeticMaxwell,
    c_n: *mut f64,
    c_half: *mut f64,
) -> MimeticStatus {
    guard(|| {
        let h = handle(h)?;
        let (a, b) = conserved(&h.state, &h.ops());
        write_pair(c_n, c_half, a, b)
    })
}

/// Norms of the electric and magnetic divergence.
///
/// # Safety
/// `h` must come from [`mimetic_maxwell_new`]; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn mimetic_maxwell_divergence(
    h: *mut MimeticMaxwell,
    div_e: *mut f64,
    div_h: *mut f64,
) -> MimeticStatus {
    guard(|| {
        let h = handle(h)?;
        let [a, b] = maxwell_divergence(&h.state, &h.ops())?;
        write_pair(div_e, div_h, a, b)
    })
}

/// Number of stored `E` values over all three components.
///
/// # Safety
/// `h` must come from [`mimetic_maxwell_new`]; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mimetic_maxwell_len(
    h: *mut MimeticMaxwell,
    len: *mut usize,
) -> MimeticStatus {
    guard(|| {
        let h = handle(h)?;
        len.as_mut()
            .map(|l| *l = h.state.f.len())
            .ok_or_else(|| null("len"))
    })
}

/// Copies `E`: the x component first, then y, then z, each `[i][j][k]` with `k` fastest.
///
/// # Safety
/// `h` must come from [`mimetic_maxwell_new`]; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mimetic_maxwell_copy_e(
    h: *mut MimeticMaxwell,
    out: *mut f64,
    len: usize,
) -> MimeticStatus {
    guard(|| {
        let h = handle(h)?;
        let values: Vec<f64> = h
            .state
            .f
            .comps
            .iter()
            .flat_map(|a| a.iter().copied())
            .collect();
        copy_out(values.into_iter(), out, len)
    })
}

/// # Safety
/// `h` must come from [`mimetic_maxwell_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn mimetic_maxwell_free(h: *mut MimeticMaxwell) {
    release(h)
}
