//! C ABI over `nfheat`.
//!
//! Every fallible function returns an [`NfhStatus`]; on failure the message is
//! kept per thread and can be copied out with [`nfh_last_error_message`].
//! Materials and plate pairs are opaque heap handles released with their
//! `_free` function. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use nfheat::asymptotics::{self, ExpansionCoefficients};
use nfheat::error::Error;
use nfheat::materials::{self, OpticalTable, PermittivityModel};
use nfheat::planar::{self, LambdaLadder, PlanarConfig, PlateauStatus, PlatePair, SpectralDecomposition};
use nfheat::spectral::{self, SpectralTable};
use num_complex::Complex64;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NfhStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidString = 2,
    Domain = 3,
    OutOfRange = 4,
    Quadrature = 5,
    Fit = 6,
    Numerical = 7,
    Config = 8,
    Parse = 9,
    Io = 10,
    Panic = 11,
}

/// Opaque permittivity model.
pub struct NfhMaterial(PermittivityModel);

/// Opaque pair of bodies facing each other across the gap.
pub struct NfhPlatePair(PlatePair);

/// Plate transfer split by channel.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct NfhChannels {
    pub prop_e: f64,
    pub prop_m: f64,
    pub evan_e: f64,
    pub evan_m: f64,
    pub total: f64,
}

/// Expansion coefficients. `d0` is NaN when unknown; functions that need it
/// then fail with `NFH_STATUS_DOMAIN`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct NfhCoefficients {
    pub lambda: f64,
    pub beta: f64,
    pub d0: f64,
}

/// Nonretarded amplitude at one frequency.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct NfhLambda {
    pub value: f64,
    pub plateau_estimate_error: f64,
    pub plateau_spread: f64,
    pub quasi_static: f64,
    /// Nonzero when the probe ladder spread exceeded 1%.
    pub wide_spread: i32,
}

/// Result of a `β` fit. `gamma` and `stderr_gamma` are NaN when not fitted.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct NfhFit {
    pub beta: f64,
    pub gamma: f64,
    pub residual_rms: f64,
    pub stderr_beta: f64,
    pub stderr_gamma: f64,
    pub n_points: usize,
    pub n_warnings: usize,
}

/// Thermally aggregated coefficients.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct NfhAggregate {
    pub lambda: f64,
    pub beta: f64,
    pub tail_mass: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Failure {
    Null(&'static str),
    Utf8(&'static str),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn status_of(e: &Error) -> NfhStatus {
    match e {
        Error::Domain(_) => NfhStatus::Domain,
        Error::OutOfRange { .. } => NfhStatus::OutOfRange,
        Error::Quadrature { .. } => NfhStatus::Quadrature,
        Error::Fit(_) => NfhStatus::Fit,
        Error::Numerical(_) => NfhStatus::Numerical,
        Error::Config(_) => NfhStatus::Config,
        Error::Parse { .. } => NfhStatus::Parse,
        Error::Io(_) => NfhStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> NfhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            NfhStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            NfhStatus::NullPointer
        }
        Ok(Err(Failure::Utf8(what))) => {
            set_error(format!("{what} is not valid UTF-8"));
            NfhStatus::InvalidString
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            NfhStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn string<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Utf8(what))
}

unsafe fn slice<'a>(p: *const f64, n: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

fn channels(d: SpectralDecomposition) -> NfhChannels {
    NfhChannels {
        prop_e: d.prop_e,
        prop_m: d.prop_m,
        evan_e: d.evan_e,
        evan_m: d.evan_m,
        total: d.total,
    }
}

fn coefficients(c: &NfhCoefficients) -> nfheat::Result<ExpansionCoefficients> {
    let base = ExpansionCoefficients::new(c.lambda, c.beta)?;
    if c.d0.is_nan() {
        Ok(base)
    } else {
        base.with_d0(c.d0)
    }
}

fn planar_config(rel_tol: f64) -> PlanarConfig {
    PlanarConfig {
        rel_tol,
        ..Default::default()
    }
}

/// Copies the calling thread's last error message (NUL-terminated, truncated
/// to `len`) into `buf`. Returns the full message length excluding the NUL,
/// or 0 if there is none. `buf` may be null to query the length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn nfh_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            return 0;
        };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Bundled material preset by name (`"sic"`, `"sio2"`).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nfh_material_preset(name: *const c_char, out: *mut *mut NfhMaterial) -> NfhStatus {
    guard(|| {
        let out = self::out(out, "out")?;
        let name = string(name, "name")?;
        let p = materials::preset(name).ok_or_else(|| Error::Config(format!("unknown material preset '{name}'")))?;
        *out = Box::into_raw(Box::new(NfhMaterial(p.model)));
        Ok(())
    })
}

/// Single Lorentz oscillator; frequencies in rad/s.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nfh_material_lorentz(
    eps_inf: f64,
    omega_l: f64,
    omega_t: f64,
    gamma: f64,
    out: *mut *mut NfhMaterial,
) -> NfhStatus {
    guard(|| {
        let out = self::out(out, "out")?;
        let m = PermittivityModel::lorentz(eps_inf, omega_l, omega_t, gamma)?;
        *out = Box::into_raw(Box::new(NfhMaterial(m)));
        Ok(())
    })
}

/// Frequency-independent permittivity.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nfh_material_constant(eps_re: f64, eps_im: f64, out: *mut *mut NfhMaterial) -> NfhStatus {
    guard(|| {
        let out = self::out(out, "out")?;
        let m = PermittivityModel::constant(Complex64::new(eps_re, eps_im))?;
        *out = Box::into_raw(Box::new(NfhMaterial(m)));
        Ok(())
    })
}

/// Tabulated optical data loaded from a whitespace-separated file of
/// `omega_rad_per_s eps_re eps_im` rows.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nfh_material_table_file(path: *const c_char, out: *mut *mut NfhMaterial) -> NfhStatus {
    guard(|| {
        let out = self::out(out, "out")?;
        let path = string(path, "path")?;
        let t = OpticalTable::load(Path::new(path))?;
        *out = Box::into_raw(Box::new(NfhMaterial(PermittivityModel::Tabulated(t))));
        Ok(())
    })
}

/// Releases a material. Null is ignored.
///
/// # Safety
/// `m` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nfh_material_free(m: *mut NfhMaterial) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// ε(ω) at `omega` rad/s.
///
/// # Safety
/// `m` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nfh_permittivity(m: *const NfhMaterial, omega: f64, re: *mut f64, im: *mut f64) -> NfhStatus {
    guard(|| {
        let m = deref(m, "material")?;
        let (re, im) = (out(re, "re")?, out(im, "im")?);
        let eps = m.0.permittivity(omega)?;
        *re = eps.re;
        *im = eps.im;
        Ok(())
    })
}

/// Pair of bodies. The materials are copied; the caller keeps ownership.
///
/// # Safety
/// `first` and `second` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nfh_plate_pair_new(
    first: *const NfhMaterial,
    second: *const NfhMaterial,
    out: *mut *mut NfhPlatePair,
) -> NfhStatus {
    guard(|| {
        let out = self::out(out, "out")?;
        let pair = PlatePair::new(deref(first, "first")?.0.clone(), deref(second, "second")?.0.clone());
        *out = Box::into_raw(Box::new(NfhPlatePair(pair)));
        Ok(())
    })
}

/// Two black bodies: unit transmission of propagating modes, no tunnelling.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nfh_plate_pair_unit_transmission(out: *mut *mut NfhPlatePair) -> NfhStatus {
    guard(|| {
        *self::out(out, "out")? = Box::into_raw(Box::new(NfhPlatePair(PlatePair::UnitTransmission)));
        Ok(())
    })
}

/// Releases a plate pair. Null is ignored.
///
/// # Safety
/// `p` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nfh_plate_pair_free(p: *mut NfhPlatePair) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Spectral plate transfer per unit area at `omega` rad/s and gap `s` m,
/// W·m⁻²·(rad/s)⁻¹ per unit occupation difference.
///
/// # Safety
/// `pair` must be a live handle; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nfh_spectral_transfer(
    pair: *const NfhPlatePair,
    omega: f64,
    s: f64,
    rel_tol: f64,
    result: *mut NfhChannels,
) -> NfhStatus {
    guard(|| {
        let pair = deref(pair, "pair")?;
        let result = out(result, "result")?;
        *result = channels(planar::spectral_transfer(&pair.0, omega, s, &planar_config(rel_tol))?);
        Ok(())
    })
}

/// Frequency-integrated plate flux per unit area, W·m⁻².
///
/// # Safety
/// `pair` must be a live handle; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nfh_integrate_plate(
    pair: *const NfhPlatePair,
    t1: f64,
    t2: f64,
    s: f64,
    rel_tol: f64,
    result: *mut NfhChannels,
) -> NfhStatus {
    guard(|| {
        let pair = deref(pair, "pair")?;
        let result = out(result, "result")?;
        let flux = planar::integrate_plate(&pair.0, t1, t2, s, &PlanarConfig::default(), rel_tol)?;
        *result = channels(flux.channels);
        Ok(())
    })
}

/// Nonretarded amplitude `λ_ω` at `omega` rad/s using the default probe
/// ladder.
///
/// # Safety
/// `pair` must be a live handle; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nfh_lambda_omega(
    pair: *const NfhPlatePair,
    omega: f64,
    rel_tol: f64,
    result: *mut NfhLambda,
) -> NfhStatus {
    guard(|| {
        let pair = deref(pair, "pair")?;
        let result = out(result, "result")?;
        let l = planar::lambda_extract(&pair.0, omega, &LambdaLadder::default(), &planar_config(rel_tol))?;
        *result = NfhLambda {
            value: l.value,
            plateau_estimate_error: l.plateau_estimate_error,
            plateau_spread: l.plateau_spread,
            quasi_static: l.quasi_static,
            wide_spread: (l.status == PlateauStatus::WideSpread) as i32,
        };
        Ok(())
    })
}

unsafe fn closed_form(
    coeffs: *const NfhCoefficients,
    result: *mut f64,
    f: impl FnOnce(&ExpansionCoefficients) -> nfheat::Result<f64>,
) -> NfhStatus {
    guard(|| {
        let c = coefficients(deref(coeffs, "coeffs")?)?;
        let result = out(result, "result")?;
        *result = f(&c)?;
        Ok(())
    })
}

/// Sphere–plate `h(d)`; needs `d0`.
///
/// # Safety
/// `coeffs` must point to a valid struct; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nfh_sphere_plate_h(d: f64, r: f64, coeffs: *const NfhCoefficients, result: *mut f64) -> NfhStatus {
    closed_form(coeffs, result, |c| asymptotics::sphere_plate_h(d, r, c))
}

/// Sphere–plate `dh/dd` (negative for a positive amplitude).
///
/// # Safety
/// `coeffs` must point to a valid struct; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nfh_sphere_plate_h_prime(d: f64, r: f64, coeffs: *const NfhCoefficients, result: *mut f64) -> NfhStatus {
    closed_form(coeffs, result, |c| asymptotics::sphere_plate_h_prime(d, r, c))
}

/// Sphere–plate total transfer; needs `d0`.
///
/// # Safety
/// `coeffs` must point to a valid struct; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nfh_sphere_plate_total(d: f64, r: f64, coeffs: *const NfhCoefficients, result: *mut f64) -> NfhStatus {
    closed_form(coeffs, result, |c| asymptotics::sphere_plate_total(d, r, c))
}

/// Cylinder–plate transfer per unit length; needs `d0`.
///
/// # Safety
/// `coeffs` must point to a valid struct; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nfh_cylinder_plate_total_per_length(d: f64, r: f64, coeffs: *const NfhCoefficients, result: *mut f64) -> NfhStatus {
    closed_form(coeffs, result, |c| asymptotics::cylinder_plate_total_per_length(d, r, c))
}

/// Two-sphere total transfer; needs `d0`.
///
/// # Safety
/// `coeffs` must point to a valid struct; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nfh_two_spheres_total(
    d: f64,
    r1: f64,
    r2: f64,
    coeffs: *const NfhCoefficients,
    result: *mut f64,
) -> NfhStatus {
    guard(|| {
        let c = coefficients(deref(coeffs, "coeffs")?)?;
        *out(result, "result")? = asymptotics::two_spheres_total(d, r1, r2, &c)?;
        Ok(())
    })
}

/// Sphere–plate near-field adjusted transfer `H(d) − H(d_ref)`; independent
/// of `d0`.
///
/// # Safety
/// `coeffs` must point to a valid struct; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nfh_near_field_adjusted(
    d: f64,
    d_ref: f64,
    r: f64,
    coeffs: *const NfhCoefficients,
    result: *mut f64,
) -> NfhStatus {
    guard(|| {
        let c = coefficients(deref(coeffs, "coeffs")?)?;
        *out(result, "result")? = asymptotics::near_field_adjusted(d, d_ref, r, &c)?;
        Ok(())
    })
}

/// Difference of the adjusted proximity-approximation curve from the adjusted
/// curve, `4πβλ ln(d/d_ref)`.
///
/// # Safety
/// `coeffs` must point to a valid struct; `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nfh_pta_deviation(
    d: f64,
    d_ref: f64,
    coeffs: *const NfhCoefficients,
    result: *mut f64,
) -> NfhStatus {
    guard(|| {
        let c = coefficients(deref(coeffs, "coeffs")?)?;
        *out(result, "result")? = asymptotics::pta_deviation(d, d_ref, &c)?;
        Ok(())
    })
}

/// Fits `β` (and `γ` if `include_gamma` is nonzero) to `n` sphere–plate
/// derivative samples `(d[i], h_prime[i])`.
///
/// # Safety
/// `d` and `h_prime` must point to `n` readable values; `result` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn nfh_fit_beta(
    d: *const f64,
    h_prime: *const f64,
    n: usize,
    r: f64,
    lambda_w: f64,
    include_gamma: i32,
    result: *mut NfhFit,
) -> NfhStatus {
    guard(|| {
        let points: Vec<(f64, f64)> = slice(d, n, "d")?
            .iter()
            .copied()
            .zip(slice(h_prime, n, "h_prime")?.iter().copied())
            .collect();
        let result = out(result, "result")?;
        let f = nfheat::fitting::fit_beta(&points, r, lambda_w, include_gamma != 0)?;
        *result = NfhFit {
            beta: f.beta,
            gamma: f.gamma.unwrap_or(f64::NAN),
            residual_rms: f.residual_rms,
            stderr_beta: f.stderr_beta,
            stderr_gamma: f.stderr_gamma.unwrap_or(f64::NAN),
            n_points: f.n_points,
            n_warnings: f.warnings.len(),
        };
        Ok(())
    })
}

/// Thermally aggregates tabulated `λ_ω` and `β_ω` sampled at the increasing
/// frequencies `omega[0..n]` (rad/s).
///
/// # Safety
/// `omega`, `lambda_w` and `beta_w` must point to `n` readable values;
/// `result` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nfh_aggregate(
    omega: *const f64,
    lambda_w: *const f64,
    beta_w: *const f64,
    n: usize,
    t1: f64,
    t2: f64,
    rel_tol: f64,
    result: *mut NfhAggregate,
) -> NfhStatus {
    guard(|| {
        let w = slice(omega, n, "omega")?.to_vec();
        let lt = SpectralTable::new(w.clone(), slice(lambda_w, n, "lambda_w")?.to_vec())?;
        let bt = SpectralTable::new(w, slice(beta_w, n, "beta_w")?.to_vec())?;
        let result = out(result, "result")?;
        let a = spectral::aggregate_tables(&lt, &bt, t1, t2, rel_tol)?;
        *result = NfhAggregate {
            lambda: a.lambda,
            beta: a.beta,
            tail_mass: a.tail_mass,
        };
        Ok(())
    })
}
