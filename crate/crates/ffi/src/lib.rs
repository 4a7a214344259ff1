//! C interface to `sqrtop`.
//!
//! Objects cross the boundary as opaque handles (`SqrtopParams`, `SqrtopField`) created and
//! released through this API. Every fallible call returns a `SqrtopStatus`; on failure the
//! message is kept per thread and read back with `sqrtop_last_error_message`. Panics are caught
//! and reported as `SQRTOP_STATUS_PANIC`.

use num_complex::Complex64;
use sqrtop::error::Error;
use sqrtop::field::{Field, Grid};
use sqrtop::kernel::{self, MassConstruction, MassModel};
use sqrtop::params::PhysicalParams;
use sqrtop::propagator::{self, LightConeRegion, PropagatorOptions};
use sqrtop::{special, spectral, suites};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqrtopStatus {
    Ok = 0,
    Domain = 1,
    Singularity = 2,
    Numerical = 3,
    Accuracy = 4,
    Usage = 5,
    Branch = 6,
    Unsupported = 7,
    Malformed = 8,
    Io = 9,
    NullPointer = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqrtopGridKind {
    Radial = 0,
    Periodic = 1,
    Open = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqrtopMassModel {
    Scalar = 0,
    Verbatim = 1,
    Hermitian = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SqrtopRegion {
    PastTimelike = -1,
    Spacelike = 0,
    FutureTimelike = 1,
}

/// Physical constants m, c, ħ, e.
pub struct SqrtopParams(PhysicalParams);

/// Sampled complex field with 1 or 4 components per grid point.
pub struct SqrtopField(Field);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn status_of(e: &Error) -> SqrtopStatus {
    match e {
        Error::Domain(_) => SqrtopStatus::Domain,
        Error::Singularity(_) => SqrtopStatus::Singularity,
        Error::Numerical(_) => SqrtopStatus::Numerical,
        Error::Accuracy { .. } => SqrtopStatus::Accuracy,
        Error::Usage(_) => SqrtopStatus::Usage,
        Error::Branch(_) => SqrtopStatus::Branch,
        Error::Unsupported(_) => SqrtopStatus::Unsupported,
        Error::Malformed { .. } => SqrtopStatus::Malformed,
        Error::Io(_) => SqrtopStatus::Io,
    }
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn fail(status: SqrtopStatus, message: impl Into<String>) -> SqrtopStatus {
    set_error(message.into());
    status
}

/// Run `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), SqrtopStatus>) -> SqrtopStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SqrtopStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(SqrtopStatus::Panic, msg)
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, SqrtopStatus>;
}

impl<T> OrStatus<T> for sqrtop::error::Result<T> {
    fn or_status(self) -> Result<T, SqrtopStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, SqrtopStatus> {
    p.as_ref().ok_or_else(|| fail(SqrtopStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, SqrtopStatus> {
    p.as_mut().ok_or_else(|| fail(SqrtopStatus::NullPointer, format!("{what} is null")))
}

unsafe fn vec3(p: *const f64, what: &str) -> Result<[f64; 3], SqrtopStatus> {
    if p.is_null() {
        return Err(fail(SqrtopStatus::NullPointer, format!("{what} is null")));
    }
    Ok([*p, *p.add(1), *p.add(2)])
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated, truncated to
/// `len`) and returns the full message length excluding the NUL; 0 when there is no error.
/// `buf` may be null to query the length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn sqrtop_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let slot = slot.borrow();
        let Some(msg) = slot.as_ref() else {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sqrtop_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Natural units m = c = ħ = e = 1. Never fails.
#[no_mangle]
pub extern "C" fn sqrtop_params_natural() -> *mut SqrtopParams {
    boxed(SqrtopParams(PhysicalParams::natural()))
}

/// # Safety
/// `out` must be a valid pointer; the handle written there is released with
/// `sqrtop_params_free`.
#[no_mangle]
pub unsafe extern "C" fn sqrtop_params_new(m: f64, c: f64, hbar: f64, e: f64, out_params: *mut *mut SqrtopParams) -> SqrtopStatus {
    guard(|| {
        let slot = out(out_params, "out_params")?;
        *slot = ptr::null_mut();
        let p = PhysicalParams::new(m, c, hbar, e).or_status()?;
        *slot = boxed(SqrtopParams(p));
        Ok(())
    })
}

/// Inverse Compton length mc/ħ; NaN for a null handle.
///
/// # Safety
/// `params` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sqrtop_params_mu(params: *const SqrtopParams) -> f64 {
    params.as_ref().map_or(f64::NAN, |p| p.0.mu())
}

/// # Safety
/// `params` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sqrtop_params_free(params: *mut SqrtopParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Modified Bessel function K_order(u), order 0..=3, u > 0.
///
/// # Safety
/// `value` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sqrtop_bessel_k(order: u32, u: f64, value: *mut f64) -> SqrtopStatus {
    guard(|| {
        let v = out(value, "value")?;
        *v = special::bessel_k(order, u).or_status()?;
        Ok(())
    })
}

/// Jump density μ²K₂(μr)/(2π²r²) of the free operator (per unit ħc); μ = 0 gives the massless
/// limit 1/(π²r⁴).
///
/// # Safety
/// `value` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sqrtop_levy_density(mu: f64, r: f64, value: *mut f64) -> SqrtopStatus {
    guard(|| {
        if !(mu >= 0.0 && r > 0.0 && mu.is_finite() && r.is_finite()) {
            return Err(fail(SqrtopStatus::Domain, format!("need mu >= 0 and r > 0, got mu = {mu}, r = {r}")));
        }
        *out(value, "value")? = kernel::levy_density(mu, r);
        Ok(())
    })
}

/// Propagator kernel at (ct, r) off the light cone, with its region.
///
/// # Safety
/// `re`, `im` and `region` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sqrtop_z_kernel(
    ct: f64,
    r: f64,
    mu: f64,
    re: *mut f64,
    im: *mut f64,
    region: *mut SqrtopRegion,
) -> SqrtopStatus {
    guard(|| {
        let (re, im, region) = (out(re, "re")?, out(im, "im")?, out(region, "region")?);
        let z = propagator::z_kernel(ct, r, mu).or_status()?;
        let k = z.kernel(mu);
        *re = k.re;
        *im = k.im;
        *region = match z.region {
            LightConeRegion::PastTimelike => SqrtopRegion::PastTimelike,
            LightConeRegion::Spacelike => SqrtopRegion::Spacelike,
            LightConeRegion::FutureTimelike => SqrtopRegion::FutureTimelike,
        };
        Ok(())
    })
}

/// Kernel of exp(−t√(−Δ + μ²)) at distance r.
///
/// # Safety
/// `params` must be a live handle and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sqrtop_heat_kernel(params: *const SqrtopParams, r: f64, t: f64, value: *mut f64) -> SqrtopStatus {
    guard(|| {
        let p = deref(params, "params")?;
        *out(value, "value")? = propagator::subordinated_heat_kernel(r, t, &p.0).or_status()?;
        Ok(())
    })
}

/// Zero field on a radial grid of `n` samples or a cubic periodic/open grid of `n` points per
/// side.
///
/// # Safety
/// `out_field` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sqrtop_field_new(
    kind: SqrtopGridKind,
    n: usize,
    spacing: f64,
    components: usize,
    out_field: *mut *mut SqrtopField,
) -> SqrtopStatus {
    guard(|| {
        let slot = out(out_field, "out_field")?;
        *slot = ptr::null_mut();
        let grid = match kind {
            SqrtopGridKind::Radial => Grid::radial(n, spacing),
            SqrtopGridKind::Periodic => Grid::periodic(n, spacing),
            SqrtopGridKind::Open => Grid::open(n, spacing),
        }
        .or_status()?;
        if components != 1 && components != 4 {
            return Err(fail(SqrtopStatus::Usage, format!("fields carry 1 or 4 components, got {components}")));
        }
        *slot = boxed(SqrtopField(Field::zeros(grid, components)));
        Ok(())
    })
}

/// Parse the text field format.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out_field` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sqrtop_field_from_text(text: *const c_char, out_field: *mut *mut SqrtopField) -> SqrtopStatus {
    guard(|| {
        let slot = out(out_field, "out_field")?;
        *slot = ptr::null_mut();
        if text.is_null() {
            return Err(fail(SqrtopStatus::NullPointer, "text is null"));
        }
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| fail(SqrtopStatus::Malformed, format!("malformed data at byte {}: not UTF-8", e.valid_up_to())))?;
        *slot = boxed(SqrtopField(Field::from_text(s).or_status()?));
        Ok(())
    })
}

/// Serialise to the text field format. Release the string with `sqrtop_string_free`.
///
/// # Safety
/// `field` must be a live handle and `out_text` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sqrtop_field_to_text(field: *const SqrtopField, out_text: *mut *mut c_char) -> SqrtopStatus {
    guard(|| {
        let slot = out(out_text, "out_text")?;
        *slot = ptr::null_mut();
        let f = deref(field, "field")?;
        *slot = CString::new(f.0.to_text()).expect("no NUL in field text").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sqrtop_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of complex samples (grid points × components); 0 for a null handle.
///
/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sqrtop_field_len(field: *const SqrtopField) -> usize {
    field.as_ref().map_or(0, |f| f.0.data.len())
}

/// Position of grid point `index` (without the component stride); on radial grids (r, 0, 0).
///
/// # Safety
/// `field` must be a live handle and `xyz` point to 3 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sqrtop_field_position(field: *const SqrtopField, index: usize, xyz: *mut f64) -> SqrtopStatus {
    guard(|| {
        let f = deref(field, "field")?;
        if xyz.is_null() {
            return Err(fail(SqrtopStatus::NullPointer, "xyz is null"));
        }
        if index >= f.0.grid.len() {
            return Err(fail(SqrtopStatus::Usage, format!("index {index} outside grid of {}", f.0.grid.len())));
        }
        let x = match f.0.grid {
            Grid::Radial { .. } => [f.0.grid.radius(index), 0.0, 0.0],
            _ => f.0.grid.position(index),
        };
        ptr::copy_nonoverlapping(x.as_ptr(), xyz, 3);
        Ok(())
    })
}

/// Copy samples out as separate real and imaginary arrays of length `len`, which must equal
/// `sqrtop_field_len`. Samples are point-major: index = point·components + component.
///
/// # Safety
/// `field` must be a live handle; `re` and `im` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sqrtop_field_get(field: *const SqrtopField, re: *mut f64, im: *mut f64, len: usize) -> SqrtopStatus {
    guard(|| {
        let f = deref(field, "field")?;
        check_len(f, re.is_null() || im.is_null(), len)?;
        for (i, z) in f.0.data.iter().enumerate() {
            *re.add(i) = z.re;
            *im.add(i) = z.im;
        }
        Ok(())
    })
}

/// Overwrite samples from real and imaginary arrays; layout as in `sqrtop_field_get`.
///
/// # Safety
/// `field` must be a live handle; `re` and `im` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sqrtop_field_set(field: *mut SqrtopField, re: *const f64, im: *const f64, len: usize) -> SqrtopStatus {
    guard(|| {
        let f = out(field, "field")?;
        check_len(f, re.is_null() || im.is_null(), len)?;
        for (i, z) in f.0.data.iter_mut().enumerate() {
            *z = Complex64::new(*re.add(i), *im.add(i));
        }
        Ok(())
    })
}

fn check_len(f: &SqrtopField, null: bool, len: usize) -> Result<(), SqrtopStatus> {
    if null {
        return Err(fail(SqrtopStatus::NullPointer, "sample array is null"));
    }
    if len != f.0.data.len() {
        return Err(fail(SqrtopStatus::Usage, format!("array length {len}, field has {}", f.0.data.len())));
    }
    Ok(())
}

/// # Safety
/// `field` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sqrtop_field_free(field: *mut SqrtopField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

unsafe fn apply(
    params: *const SqrtopParams,
    field: *const SqrtopField,
    out_field: *mut *mut SqrtopField,
    op: impl FnOnce(&PhysicalParams, &Field) -> sqrtop::error::Result<Field>,
) -> SqrtopStatus {
    guard(|| {
        let slot = out(out_field, "out_field")?;
        *slot = ptr::null_mut();
        let p = deref(params, "params")?;
        let f = deref(field, "field")?;
        *slot = boxed(SqrtopField(op(&p.0, &f.0).or_status()?));
        Ok(())
    })
}

/// Free square-root operator through its Bessel-kernel representation.
///
/// # Safety
/// Handles must be live and `out_field` a valid pointer; the result is a new handle.
#[no_mangle]
pub unsafe extern "C" fn sqrtop_apply_free(
    params: *const SqrtopParams,
    field: *const SqrtopField,
    out_field: *mut *mut SqrtopField,
) -> SqrtopStatus {
    apply(params, field, out_field, |p, f| kernel::apply_free(f, p))
}

/// Free operator as a Fourier multiplier: periodic grids use the FFT, radial grids the sine
/// transform.
///
/// # Safety
/// As for `sqrtop_apply_free`.
#[no_mangle]
pub unsafe extern "C" fn sqrtop_apply_spectral(
    params: *const SqrtopParams,
    field: *const SqrtopField,
    out_field: *mut *mut SqrtopField,
) -> SqrtopStatus {
    apply(params, field, out_field, |p, f| match f.grid {
        Grid::Radial { .. } => spectral::radial_apply_spectral(f, p).map(|r| r.field),
        _ => spectral::apply_spectral(f, p, None),
    })
}

/// Operator with constant vector potential `a` (3 doubles).
///
/// # Safety
/// As for `sqrtop_apply_free`; `a` must point to 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn sqrtop_apply_constant_a(
    params: *const SqrtopParams,
    field: *const SqrtopField,
    a: *const f64,
    out_field: *mut *mut SqrtopField,
) -> SqrtopStatus {
    let a = match vec3(a, "a") {
        Ok(a) => a,
        Err(s) => return s,
    };
    apply(params, field, out_field, |p, f| kernel::apply_constant_a(f, a, p))
}

/// Operator with constant magnetic field `b` (3 doubles) on an open grid.
///
/// # Safety
/// As for `sqrtop_apply_free`; `b` must point to 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn sqrtop_apply_constant_b(
    params: *const SqrtopParams,
    field: *const SqrtopField,
    b: *const f64,
    model: SqrtopMassModel,
    out_field: *mut *mut SqrtopField,
) -> SqrtopStatus {
    let b = match vec3(b, "b") {
        Ok(b) => b,
        Err(s) => return s,
    };
    let model = match model {
        SqrtopMassModel::Scalar => MassModel::Scalar,
        SqrtopMassModel::Verbatim => MassModel::Matrix(MassConstruction::VerbatimBlock),
        SqrtopMassModel::Hermitian => MassModel::Matrix(MassConstruction::HermitianSigmaB),
    };
    apply(params, field, out_field, |p, f| kernel::apply_constant_b(f, b, p, model).map(|(out, _)| out))
}

/// exp(−i t √(...)/ħ) applied spectrally on a periodic grid.
///
/// # Safety
/// As for `sqrtop_apply_free`.
#[no_mangle]
pub unsafe extern "C" fn sqrtop_evolve_spectral(
    params: *const SqrtopParams,
    field: *const SqrtopField,
    t: f64,
    out_field: *mut *mut SqrtopField,
) -> SqrtopStatus {
    apply(params, field, out_field, |p, f| spectral::evolve_spectral(f, t, p))
}

/// Time evolution through the position-space propagator kernel, with vector potential `a`
/// (3 doubles, or null for zero).
///
/// # Safety
/// As for `sqrtop_apply_free`; `a` must be null or point to 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn sqrtop_propagate(
    params: *const SqrtopParams,
    field: *const SqrtopField,
    t: f64,
    a: *const f64,
    out_field: *mut *mut SqrtopField,
) -> SqrtopStatus {
    let a = if a.is_null() { [0.0; 3] } else { [*a, *a.add(1), *a.add(2)] };
    apply(params, field, out_field, |p, f| {
        propagator::apply_u(f, t, a, p, &PropagatorOptions::default()).map(|r| r.field)
    })
}

/// Relative L² distance between two fields on the same grid.
///
/// # Safety
/// Handles must be live and `value` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sqrtop_field_rel_error(
    field: *const SqrtopField,
    reference: *const SqrtopField,
    value: *mut f64,
) -> SqrtopStatus {
    guard(|| {
        let (f, r) = (deref(field, "field")?, deref(reference, "reference")?);
        *out(value, "value")? = f.0.rel_l2_error(&r.0).or_status()?;
        Ok(())
    })
}

/// Run a verification suite (or "all") under default tolerances and write the number of failed
/// checks to `failed`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `failed` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sqrtop_run_suite(name: *const c_char, failed: *mut usize) -> SqrtopStatus {
    guard(|| {
        let failed = out(failed, "failed")?;
        if name.is_null() {
            return Err(fail(SqrtopStatus::NullPointer, "name is null"));
        }
        let name = CStr::from_ptr(name).to_str().map_err(|_| fail(SqrtopStatus::Usage, "suite name is not UTF-8"))?;
        let reports = suites::run_suite(name, &suites::Tolerances::default()).or_status()?;
        *failed = reports.iter().map(|r| r.failures().count()).sum();
        Ok(())
    })
}
