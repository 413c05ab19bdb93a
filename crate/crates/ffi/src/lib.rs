//! C ABI over `dynframe`.
//!
//! Operators and frame systems are opaque handles created by `df_*_new`
//! style constructors and released with the matching `*_free`. Every
//! fallible call returns a [`DfStatus`]; on failure a message is available
//! from [`df_last_error_message`] until the next failing call on the same
//! thread. Matrices cross the boundary as arrays of [`DfComplex`]: operators
//! row-major, generator families column by column.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use dynframe::defect::{parseval_generators, parseval_index};
use dynframe::frames::{frame_bounds, FrameSystem};
use dynframe::inner::BlaschkeProduct;
use dynframe::operators::{admissibility, OperatorSpec};
use dynframe::tighten::{canonical_tighten, index_certificate};
use dynframe::{Error, Mat};
use num_complex::Complex64;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    DimensionMismatch = 3,
    Unstable = 4,
    Borderline = 5,
    NotAdmissible = 6,
    NotAFrame = 7,
    NotContraction = 8,
    CertificateFailed = 9,
    Numerical = 10,
    BufferTooSmall = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DfComplex {
    pub re: f64,
    pub im: f64,
}

impl From<DfComplex> for Complex64 {
    fn from(z: DfComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

impl From<Complex64> for DfComplex {
    fn from(z: Complex64) -> Self {
        DfComplex { re: z.re, im: z.im }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DfAdmissibility {
    pub norm: f64,
    pub spectral_radius: f64,
    pub is_contraction: bool,
    pub adjoint_strongly_stable: bool,
    pub admits_parseval: bool,
    pub admits_frame: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DfFrameBounds {
    pub lower: f64,
    pub upper: f64,
    pub parseval_defect: f64,
    pub stein_residual: f64,
    pub is_frame: bool,
    pub is_parseval: bool,
}

/// Opaque operator handle.
pub struct DfOperator(OperatorSpec);

/// Opaque frame-system handle.
pub struct DfFrameSystem(FrameSystem);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> DfStatus {
    match e {
        Error::InvalidInput(_) | Error::NotInDisc { .. } | Error::NonHermitian { .. } => DfStatus::InvalidInput,
        Error::DimensionMismatch { .. } => DfStatus::DimensionMismatch,
        Error::Unstable { .. } => DfStatus::Unstable,
        Error::Borderline { .. } => DfStatus::Borderline,
        Error::NotAdmissible(_) => DfStatus::NotAdmissible,
        Error::NotAFrame { .. } => DfStatus::NotAFrame,
        Error::NotContraction { .. } => DfStatus::NotContraction,
        e if e.is_certificate_failure() => DfStatus::CertificateFailed,
        _ => DfStatus::Numerical,
    }
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (DfStatus, String)>) -> DfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DfStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            DfStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (DfStatus, String) {
    (status_of(&e), e.to_string())
}

fn null() -> (DfStatus, String) {
    (DfStatus::NullPointer, "null pointer argument".into())
}

unsafe fn slice<'a, T>(p: *const T, len: usize) -> Result<&'a [T], (DfStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize) -> Result<&'a mut [T], (DfStatus, String)> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn out_ref<'a, T>(p: *mut T) -> Result<&'a mut T, (DfStatus, String)> {
    p.as_mut().ok_or_else(null)
}

/// Message describing the last failure on this thread; empty if none.
/// The pointer stays valid until the next failing call on the thread.
#[no_mangle]
pub extern "C" fn df_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a dense `dim × dim` operator from row-major `data`.
///
/// # Safety
/// `data` must point to `dim * dim` values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn df_operator_dense(data: *const DfComplex, dim: usize, out: *mut *mut DfOperator) -> DfStatus {
    guard(|| {
        let out = out_ref(out)?;
        let d = slice(data, dim * dim)?;
        let m = Mat::from_fn(dim, dim, |i, j| d[i * dim + j].into());
        let t = OperatorSpec::dense(m).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(DfOperator(t)));
        Ok(())
    })
}

/// Creates a diagonal operator.
///
/// # Safety
/// `entries` must point to `dim` values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn df_operator_diagonal(
    entries: *const DfComplex,
    dim: usize,
    out: *mut *mut DfOperator,
) -> DfStatus {
    guard(|| {
        let out = out_ref(out)?;
        let e = slice(entries, dim)?;
        let t = OperatorSpec::diagonal(e.iter().map(|&z| z.into()).collect()).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(DfOperator(t)));
        Ok(())
    })
}

/// Dimension of the operator, `0` for a null handle.
///
/// # Safety
/// `op` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn df_operator_dim(op: *const DfOperator) -> usize {
    op.as_ref().map_or(0, |o| o.0.dim())
}

/// # Safety
/// `op` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn df_operator_free(op: *mut DfOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_admissibility(op: *const DfOperator, tol: f64, out: *mut DfAdmissibility) -> DfStatus {
    guard(|| {
        let t = op.as_ref().ok_or_else(null)?;
        let out = out_ref(out)?;
        let r = admissibility(&t.0, tol).map_err(lib_err)?;
        *out = DfAdmissibility {
            norm: r.norm,
            spectral_radius: r.spectral_radius,
            is_contraction: r.is_contraction,
            adjoint_strongly_stable: r.adjoint_strongly_stable,
            admits_parseval: r.admits_parseval,
            admits_frame: r.admits_frame,
        };
        Ok(())
    })
}

/// Minimal generator count of a Parseval frame of iterations (0 if none).
///
/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_parseval_index(op: *const DfOperator, out: *mut usize) -> DfStatus {
    guard(|| {
        let t = op.as_ref().ok_or_else(null)?;
        *out_ref(out)? = parseval_index(&t.0).map_err(lib_err)?;
        Ok(())
    })
}

/// Certified frame index: minimal generator count of any frame of iterations.
///
/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_frame_index(op: *const DfOperator, seed: u64, out: *mut usize) -> DfStatus {
    guard(|| {
        let t = op.as_ref().ok_or_else(null)?;
        *out_ref(out)? = index_certificate(&t.0, seed).map_err(lib_err)?.gamma;
        Ok(())
    })
}

/// Builds a frame system from `count` generators of length `dim(op)`,
/// stored one after another.
///
/// # Safety
/// `op` must be a live handle, `generators` must hold `count * dim(op)`
/// values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn df_frame_system_new(
    op: *const DfOperator,
    generators: *const DfComplex,
    count: usize,
    out: *mut *mut DfFrameSystem,
) -> DfStatus {
    guard(|| {
        let t = op.as_ref().ok_or_else(null)?;
        let out = out_ref(out)?;
        let d = t.0.dim();
        let g = slice(generators, d * count)?;
        let m = Mat::from_fn(d, count, |i, j| g[j * d + i].into());
        let sys = FrameSystem::new(t.0.clone(), m).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(DfFrameSystem(sys)));
        Ok(())
    })
}

/// The Parseval frame generated by the defect operator of `op`.
///
/// # Safety
/// `op` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_parseval_generators(op: *const DfOperator, out: *mut *mut DfFrameSystem) -> DfStatus {
    guard(|| {
        let t = op.as_ref().ok_or_else(null)?;
        let out = out_ref(out)?;
        let sys = parseval_generators(&t.0).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(DfFrameSystem(sys)));
        Ok(())
    })
}

/// # Safety
/// `sys` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn df_frame_system_dim(sys: *const DfFrameSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.0.dim())
}

/// # Safety
/// `sys` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn df_frame_system_generator_count(sys: *const DfFrameSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.0.generator_count())
}

/// Copies the generators, one after another, into `buf` of length `len`.
///
/// # Safety
/// `sys` must be a live handle and `buf` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn df_frame_system_generators(
    sys: *const DfFrameSystem,
    buf: *mut DfComplex,
    len: usize,
) -> DfStatus {
    guard(|| {
        let s = sys.as_ref().ok_or_else(null)?;
        let g = s.0.generators();
        if len < g.len() {
            return Err((DfStatus::BufferTooSmall, format!("need {} values, got {len}", g.len())));
        }
        let b = slice_mut(buf, len)?;
        for (k, z) in g.iter().enumerate() {
            b[k] = (*z).into();
        }
        Ok(())
    })
}

/// Copies the system's operator, row-major, into `buf` of length `len`.
///
/// # Safety
/// `sys` must be a live handle and `buf` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn df_frame_system_operator(
    sys: *const DfFrameSystem,
    buf: *mut DfComplex,
    len: usize,
) -> DfStatus {
    guard(|| {
        let s = sys.as_ref().ok_or_else(null)?;
        let m = s.0.operator_matrix();
        let d = m.nrows();
        if len < d * d {
            return Err((DfStatus::BufferTooSmall, format!("need {} values, got {len}", d * d)));
        }
        let b = slice_mut(buf, len)?;
        for i in 0..d {
            for j in 0..d {
                b[i * d + j] = m[(i, j)].into();
            }
        }
        Ok(())
    })
}

/// # Safety
/// `sys` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_frame_bounds(sys: *const DfFrameSystem, out: *mut DfFrameBounds) -> DfStatus {
    guard(|| {
        let s = sys.as_ref().ok_or_else(null)?;
        let out = out_ref(out)?;
        let r = frame_bounds(&s.0).map_err(lib_err)?;
        *out = DfFrameBounds {
            lower: r.lower_bound,
            upper: r.upper_bound,
            parseval_defect: r.parseval_defect,
            stein_residual: r.stein_residual,
            is_frame: r.is_frame,
            is_parseval: r.is_parseval,
        };
        Ok(())
    })
}

/// Canonical tightening: a new system whose operator is
/// `S^{-1/2} T S^{1/2}` and whose generators form a Parseval frame.
///
/// # Safety
/// `sys` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_tighten(sys: *const DfFrameSystem, out: *mut *mut DfFrameSystem) -> DfStatus {
    guard(|| {
        let s = sys.as_ref().ok_or_else(null)?;
        let out = out_ref(out)?;
        let r = canonical_tighten(&s.0).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(DfFrameSystem(r.tightened)));
        Ok(())
    })
}

/// # Safety
/// `sys` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn df_frame_system_free(sys: *mut DfFrameSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Taylor coefficients `0..=m` of the Blaschke product with the given zeros.
///
/// # Safety
/// `zeros` must hold `count` values and `out` must hold `m + 1` values.
#[no_mangle]
pub unsafe extern "C" fn df_blaschke_coeffs(
    zeros: *const DfComplex,
    count: usize,
    m: usize,
    out: *mut DfComplex,
) -> DfStatus {
    guard(|| {
        let z: Vec<Complex64> = slice(zeros, count)?.iter().map(|&z| z.into()).collect();
        let dst = slice_mut(out, m + 1)?;
        let b = BlaschkeProduct::from_zeros(&z).map_err(lib_err)?;
        for (d, c) in dst.iter_mut().zip(b.coeffs(m)) {
            *d = c.into();
        }
        Ok(())
    })
}
