//! C ABI over the `curvecomm` library.
//!
//! Every fallible function returns a [`CurvecommStatus`] and writes its result
//! through an out-pointer; out-pointers are left untouched on failure. The
//! message of the most recent failure on the calling thread is available from
//! [`curvecomm_last_error_message`]. Constellations are opaque handles created
//! by `curvecomm_constellation_new_*` and released with
//! [`curvecomm_constellation_free`].
//!
//! Decoder arguments take the values of [`CurvecommDecoder`]; they are passed
//! as `uint32_t` so that out-of-range values are rejected instead of being
//! undefined behaviour.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use curvecomm::bounds::{euclidean_offset_pep, ser_bounds};
use curvecomm::channel::DecoderKind;
use curvecomm::geometry::{antipodal_geometry, pair_geometry, Constellation, PairGeometry};
use curvecomm::montecarlo::{estimate_pairwise_pep, estimate_ser, with_workers, PepEstimate};
use curvecomm::pairwise::{
    euclidean_pep, matched_pep_for_pair, matched_phantom_pep, q_function, NoiseParams,
};
use curvecomm::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvecommStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    InvalidPair = 3,
    NotPhantom = 4,
    NumericFailure = 5,
    SingularModel = 6,
    Config = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvecommDecoder {
    Matched = 0,
    Euclidean = 1,
}

/// Opaque constellation handle.
pub struct CurvecommConstellation {
    inner: Constellation,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CurvecommPairGeometry {
    pub delta: f64,
    pub cos_alpha: f64,
    pub gamma: f64,
    pub proj_i: f64,
    pub proj_j: f64,
    pub phantom: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CurvecommAntipodalGeometry {
    pub delta: f64,
    pub gamma: f64,
    pub speed: f64,
    pub rho: f64,
}

/// Euclidean SER bounds of a uniform even codebook and the matched antipodal
/// lower bound.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CurvecommSerBounds {
    pub lower: f64,
    pub upper_raw: f64,
    /// `min(upper_raw, 1)`.
    pub upper: f64,
    pub matched_lower: f64,
}

/// Monte Carlo frequency with a 95% Wilson interval.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CurvecommEstimate {
    pub value: f64,
    pub errors: u64,
    pub trials: u64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

impl From<PepEstimate> for CurvecommEstimate {
    fn from(e: PepEstimate) -> Self {
        Self {
            value: e.value,
            errors: e.errors,
            trials: e.trials,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
            seed: e.seed,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CurvecommStatus {
    match e {
        Error::InvalidParameter(_) => CurvecommStatus::InvalidParameter,
        Error::InvalidPair { .. } => CurvecommStatus::InvalidPair,
        Error::NotPhantom { .. } => CurvecommStatus::NotPhantom,
        Error::NumericFailure(_) => CurvecommStatus::NumericFailure,
        Error::SingularModel(_) => CurvecommStatus::SingularModel,
        Error::Config(_) => CurvecommStatus::Config,
    }
}

struct Failure(CurvecommStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(CurvecommStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, recording any failure or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CurvecommStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CurvecommStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            CurvecommStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, value: T) {
    // SAFETY: callers check `out` for null first; the C caller guarantees it
    // points to writable storage for `T`.
    unsafe { out.write(value) }
}

unsafe fn handle<'a>(c: *const CurvecommConstellation) -> Result<&'a Constellation, Failure> {
    // SAFETY: non-null handles come from `curvecomm_constellation_new_*` and
    // the caller guarantees they have not been freed.
    unsafe { c.as_ref() }
        .map(|h| &h.inner)
        .ok_or_else(|| null("constellation"))
}

fn decoder(value: u32) -> Result<DecoderKind, Failure> {
    match value {
        0 => Ok(DecoderKind::Matched),
        1 => Ok(DecoderKind::Euclidean),
        other => Err(Failure(
            CurvecommStatus::InvalidParameter,
            format!("unknown decoder {other}"),
        )),
    }
}

/// NUL-terminated message of the last failure on this thread, or an empty
/// string. Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn curvecomm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn curvecomm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Gaussian upper tail `Q(x)`.
#[no_mangle]
pub unsafe extern "C" fn curvecomm_q_function(x: f64, out: *mut f64) -> CurvecommStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let v = q_function(x)?;
        unsafe { write(out, v) };
        Ok(())
    })
}

/// Uniform codebook of `m` points on the order-`k` curve.
#[no_mangle]
pub unsafe extern "C" fn curvecomm_constellation_new_uniform(
    k: usize,
    m: usize,
    out: *mut *mut CurvecommConstellation,
) -> CurvecommStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = Constellation::uniform(k, m)?;
        unsafe {
            write(
                out,
                Box::into_raw(Box::new(CurvecommConstellation { inner })),
            )
        };
        Ok(())
    })
}

/// Codebook at `count` strictly increasing phases in `[0, 2π)`.
#[no_mangle]
pub unsafe extern "C" fn curvecomm_constellation_new_phases(
    k: usize,
    phases: *const f64,
    count: usize,
    out: *mut *mut CurvecommConstellation,
) -> CurvecommStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if phases.is_null() {
            return Err(null("phases"));
        }
        // SAFETY: caller guarantees `count` readable values at `phases`.
        let phases = unsafe { std::slice::from_raw_parts(phases, count) }.to_vec();
        let inner = Constellation::from_phases(k, phases)?;
        unsafe {
            write(
                out,
                Box::into_raw(Box::new(CurvecommConstellation { inner })),
            )
        };
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn curvecomm_constellation_free(c: *mut CurvecommConstellation) {
    if !c.is_null() {
        // SAFETY: `c` came from `Box::into_raw` in a constructor and is freed once.
        drop(unsafe { Box::from_raw(c) });
    }
}

#[no_mangle]
pub unsafe extern "C" fn curvecomm_constellation_len(
    c: *const CurvecommConstellation,
    out: *mut usize,
) -> CurvecommStatus {
    guard(|| {
        let c = unsafe { handle(c) }?;
        if out.is_null() {
            return Err(null("out"));
        }
        unsafe { write(out, c.len()) };
        Ok(())
    })
}

/// Ambient dimension `2k`.
#[no_mangle]
pub unsafe extern "C" fn curvecomm_constellation_dim(
    c: *const CurvecommConstellation,
    out: *mut usize,
) -> CurvecommStatus {
    guard(|| {
        let c = unsafe { handle(c) }?;
        if out.is_null() {
            return Err(null("out"));
        }
        unsafe { write(out, c.dim()) };
        Ok(())
    })
}

/// Copies point `i` into `buf`, which must hold `dim` values.
#[no_mangle]
pub unsafe extern "C" fn curvecomm_constellation_point(
    c: *const CurvecommConstellation,
    i: usize,
    buf: *mut f64,
    len: usize,
) -> CurvecommStatus {
    guard(|| {
        let c = unsafe { handle(c) }?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        if i >= c.len() {
            return Err(Failure(
                CurvecommStatus::InvalidParameter,
                format!("index {i} out of range for M = {}", c.len()),
            ));
        }
        if len < c.dim() {
            return Err(Failure(
                CurvecommStatus::InvalidParameter,
                format!("buffer holds {len} values, need {}", c.dim()),
            ));
        }
        // SAFETY: caller guarantees `len` writable values at `buf`.
        unsafe { std::slice::from_raw_parts_mut(buf, c.dim()) }.copy_from_slice(c.point(i));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn curvecomm_pair_geometry(
    c: *const CurvecommConstellation,
    i: usize,
    j: usize,
    tol: f64,
    out: *mut CurvecommPairGeometry,
) -> CurvecommStatus {
    guard(|| {
        let c = unsafe { handle(c) }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let g = pair_geometry(c, i, j, tol)?;
        let g = CurvecommPairGeometry {
            delta: g.delta,
            cos_alpha: g.cos_alpha,
            gamma: g.gamma,
            proj_i: g.proj_i,
            proj_j: g.proj_j,
            phantom: g.phantom,
        };
        unsafe { write(out, g) };
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn curvecomm_antipodal_geometry(
    k: usize,
    out: *mut CurvecommAntipodalGeometry,
) -> CurvecommStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let g = antipodal_geometry(k)?;
        let g = CurvecommAntipodalGeometry {
            delta: g.delta,
            gamma: g.gamma,
            speed: g.speed,
            rho: g.rho,
        };
        unsafe { write(out, g) };
        Ok(())
    })
}

/// Euclidean pairwise error from chord length and transmit-side alignment.
#[no_mangle]
pub unsafe extern "C" fn curvecomm_euclidean_pep(
    delta: f64,
    cos_alpha: f64,
    beta: f64,
    sigma_c: f64,
    out: *mut f64,
) -> CurvecommStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let n = NoiseParams::new(beta, sigma_c)?;
        let v = euclidean_pep(&PairGeometry::from_scalars(delta, cos_alpha, f64::NAN), n)?;
        unsafe { write(out, v) };
        Ok(())
    })
}

/// Matched pairwise error of a pair the caller asserts is phantom.
#[no_mangle]
pub unsafe extern "C" fn curvecomm_matched_phantom_pep(
    delta: f64,
    gamma: f64,
    beta: f64,
    sigma_c: f64,
    quad_order: usize,
    out: *mut f64,
) -> CurvecommStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let n = NoiseParams::new(beta, sigma_c)?;
        let v = matched_phantom_pep(delta, gamma, n, quad_order)?;
        unsafe { write(out, v) };
        Ok(())
    })
}

/// Matched pairwise error of a codebook pair; non-phantom pairs yield
/// `CURVECOMM_STATUS_NOT_PHANTOM`.
#[no_mangle]
pub unsafe extern "C" fn curvecomm_matched_pep_for_pair(
    c: *const CurvecommConstellation,
    i: usize,
    j: usize,
    beta: f64,
    sigma_c: f64,
    quad_order: usize,
    tol: f64,
    out: *mut f64,
) -> CurvecommStatus {
    guard(|| {
        let c = unsafe { handle(c) }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let n = NoiseParams::new(beta, sigma_c)?;
        let v = matched_pep_for_pair(c, i, j, n, quad_order, tol)?;
        unsafe { write(out, v) };
        Ok(())
    })
}

/// Euclidean pairwise error at offset `q` of a uniform `m`-point codebook.
#[no_mangle]
pub unsafe extern "C" fn curvecomm_offset_pep(
    k: usize,
    m: usize,
    q: usize,
    beta: f64,
    sigma_c: f64,
    out: *mut f64,
) -> CurvecommStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let n = NoiseParams::new(beta, sigma_c)?;
        let v = euclidean_offset_pep(k, m, q, n)?;
        unsafe { write(out, v) };
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn curvecomm_ser_bounds(
    k: usize,
    m: usize,
    beta: f64,
    sigma_c: f64,
    quad_order: usize,
    out: *mut CurvecommSerBounds,
) -> CurvecommStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let n = NoiseParams::new(beta, sigma_c)?;
        let b = ser_bounds(k, m, n, quad_order)?;
        let b = CurvecommSerBounds {
            lower: b.lower,
            upper_raw: b.upper_raw,
            upper: b.upper,
            matched_lower: b.matched_lower.unwrap_or(f64::NAN),
        };
        unsafe { write(out, b) };
        Ok(())
    })
}

/// Monte Carlo frequency of "`j` scores no worse than `i`" with `i` sent.
/// `workers = 0` uses the default pool size; the result does not depend on it.
#[no_mangle]
pub unsafe extern "C" fn curvecomm_estimate_pairwise_pep(
    c: *const CurvecommConstellation,
    i: usize,
    j: usize,
    decoder_kind: u32,
    beta: f64,
    sigma_c: f64,
    trials: u64,
    seed: u64,
    workers: usize,
    out: *mut CurvecommEstimate,
) -> CurvecommStatus {
    guard(|| {
        let c = unsafe { handle(c) }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let d = decoder(decoder_kind)?;
        let n = NoiseParams::new(beta, sigma_c)?;
        let e = with_workers(workers, || {
            estimate_pairwise_pep(c, i, j, d, n, trials, seed)
        })??;
        unsafe { write(out, e.into()) };
        Ok(())
    })
}

/// Monte Carlo symbol error rate with equiprobable symbols.
#[no_mangle]
pub unsafe extern "C" fn curvecomm_estimate_ser(
    c: *const CurvecommConstellation,
    decoder_kind: u32,
    beta: f64,
    sigma_c: f64,
    trials: u64,
    seed: u64,
    workers: usize,
    out: *mut CurvecommEstimate,
) -> CurvecommStatus {
    guard(|| {
        let c = unsafe { handle(c) }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let d = decoder(decoder_kind)?;
        let n = NoiseParams::new(beta, sigma_c)?;
        let e = with_workers(workers, || estimate_ser(c, d, n, trials, seed))??;
        unsafe { write(out, e.into()) };
        Ok(())
    })
}
