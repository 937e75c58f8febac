//! Radiative transfer between two parallel half-spaces.
//!
//! The spectral density per unit area, with `q = ω/c`, is
//!
//! ```text
//! h(ω, S) = ħω/(4π²) Σ_p [ ∫₀^q k dk (1−|r₁|²)(1−|r₂|²)/|1 − r₁r₂e^{2ik_zS}|²
//!                        + ∫_q^∞ k dk 4 Im r₁ Im r₂ e^{−2κS}/|1 − r₁r₂e^{−2κS}|² ]
//! ```
//!
//! so that the total flux is `H = ∫ dω [n_ω(T₁) − n_ω(T₂)] h`. The
//! propagating integral is done in `k_z ∈ [0, q]` (removing the square-root
//! edge at the light line), the evanescent one in `u = κS ∈ [0, u_max]`, for
//! which `k dk = u du / S²`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::constants::{C, HBAR};
use crate::error::{Error, Result};
use crate::materials::{fresnel, FresnelPair, PermittivityModel};
use crate::quadrature::Integrator;
use crate::spectral;

/// The two bodies facing each other across the vacuum gap.
#[derive(Debug, Clone)]
pub enum PlatePair {
    Bodies {
        first: PermittivityModel,
        second: PermittivityModel,
    },
    /// Test hook: both reflection coefficients forced to zero, so every
    /// propagating mode is transmitted with unit probability (two black
    /// bodies) and nothing tunnels.
    UnitTransmission,
}

impl PlatePair {
    pub fn new(first: PermittivityModel, second: PermittivityModel) -> Self {
        Self::Bodies { first, second }
    }

    pub fn symmetric(model: PermittivityModel) -> Self {
        Self::Bodies {
            first: model.clone(),
            second: model,
        }
    }

    pub fn swapped(&self) -> Self {
        match self {
            Self::Bodies { first, second } => Self::Bodies {
                first: second.clone(),
                second: first.clone(),
            },
            Self::UnitTransmission => Self::UnitTransmission,
        }
    }

    fn permittivities(&self, omega: f64) -> Result<Option<(Complex64, Complex64)>> {
        match self {
            Self::Bodies { first, second } => Ok(Some((first.permittivity(omega)?, second.permittivity(omega)?))),
            Self::UnitTransmission => Ok(None),
        }
    }

    /// Intersection of the two materials' frequency supports.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Bodies { first, second } => {
                let (a0, a1) = first.support();
                let (b0, b1) = second.support();
                (a0.max(b0), a1.min(b1))
            }
            Self::UnitTransmission => (0.0, f64::INFINITY),
        }
    }

    /// Frequencies where the spectra have sharp structure (Lorentz poles and
    /// surface-mode frequencies), used to seed quadrature panels.
    pub fn resonance_hints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        if let Self::Bodies { first, second } = self {
            for m in [first, second] {
                if let PermittivityModel::LorentzOscillator {
                    eps_inf,
                    omega_l,
                    omega_t,
                    ..
                } = *m
                {
                    // Re ε = −1 for the undamped oscillator.
                    let sp = ((eps_inf * omega_l * omega_l + omega_t * omega_t) / (eps_inf + 1.0)).sqrt();
                    out.extend([omega_t, sp, omega_l]);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

/// Parallel-plate spectral transfer per unit area split into channels.
/// Units are W·m⁻²·(rad/s)⁻¹ once multiplied by the occupation difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDecomposition {
    pub prop_e: f64,
    pub prop_m: f64,
    pub evan_e: f64,
    pub evan_m: f64,
    pub total: f64,
}

impl SpectralDecomposition {
    pub fn from_channels(prop_e: f64, prop_m: f64, evan_e: f64, evan_m: f64) -> Self {
        Self {
            prop_e,
            prop_m,
            evan_e,
            evan_m,
            total: prop_e + prop_m + evan_e + evan_m,
        }
    }

    pub fn propagating(&self) -> f64 {
        self.prop_e + self.prop_m
    }

    pub fn evanescent(&self) -> f64 {
        self.evan_e + self.evan_m
    }
}

/// Quadrature settings for the plate integrals.
#[derive(Debug, Clone, Copy)]
pub struct PlanarConfig {
    /// Relative tolerance of the wavevector integrals.
    pub rel_tol: f64,
    /// Minimum upper limit of the evanescent `u = κS` integral; the integrand
    /// decays like `e^{−2u}` beyond the resonant peak.
    pub u_max: f64,
}

impl Default for PlanarConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            u_max: 40.0,
        }
    }
}

/// Blackbody spectral transfer `ħω³/(4π²c²)`: the propagating total for
/// unit transmission, and an upper bound for passive media.
pub fn blackbody_spectral(omega: f64) -> f64 {
    HBAR * omega.powi(3) / (4.0 * PI * PI * C * C)
}

fn reflections(eps: Option<(Complex64, Complex64)>, omega: f64, k: f64) -> Result<(FresnelPair, FresnelPair)> {
    match eps {
        Some((e1, e2)) => Ok((fresnel(e1, omega, k)?, fresnel(e2, omega, k)?)),
        None => Ok((FresnelPair::ZERO, FresnelPair::ZERO)),
    }
}

fn propagating_factor(r1: Complex64, r2: Complex64, phase: Complex64) -> f64 {
    let den = (Complex64::new(1.0, 0.0) - r1 * r2 * phase).norm_sqr();
    (1.0 - r1.norm_sqr()) * (1.0 - r2.norm_sqr()) / den
}

fn evanescent_factor(r1: Complex64, r2: Complex64, decay: f64) -> f64 {
    let den = (Complex64::new(1.0, 0.0) - r1 * r2 * decay).norm_sqr();
    4.0 * r1.im * r2.im * decay / den
}

fn check_gap(omega: f64, s: f64) -> Result<()> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("gap must be positive, got S = {s}")));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Domain(format!("frequency must be positive, got {omega}")));
    }
    Ok(())
}

/// Runs a quadrature whose integrand may fail; the first failure wins.
fn integrate_fallible<const N: usize, F>(integrator: &Integrator, mut f: F, points: &[f64]) -> Result<[f64; N]>
where
    F: FnMut(f64) -> Result<[f64; N]>,
{
    let mut failure = None;
    let est = integrator.integrate_vec(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                [0.0; N]
            }
        },
        points,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(est?.value)
}

/// Four-channel parallel-plate spectral transfer at frequency `omega` and gap `s`.
pub fn spectral_transfer(pair: &PlatePair, omega: f64, s: f64, cfg: &PlanarConfig) -> Result<SpectralDecomposition> {
    check_gap(omega, s)?;
    let eps = pair.permittivities(omega)?;
    let q = omega / C;
    let pref = HBAR * omega / (4.0 * PI * PI);
    let integrator = Integrator::with_rel_tol(cfg.rel_tol);

    // Propagating: k dk = k_z dk_z, k_z ∈ [0, q].
    let prop = integrate_fallible(
        &integrator,
        |kz| {
            let k = (q * q - kz * kz).max(0.0).sqrt();
            let (r1, r2) = reflections(eps, omega, k)?;
            let phase = Complex64::from_polar(1.0, 2.0 * kz * s);
            Ok([
                kz * propagating_factor(r1.electric, r2.electric, phase),
                kz * propagating_factor(r1.magnetic, r2.magnetic, phase),
            ])
        },
        &[0.0, q],
    )?;

    let evan = match eps {
        None => [0.0, 0.0],
        Some((e1, e2)) => {
            // Place the multiple-reflection resonance, |r₁r₂|e^{−2u} ≈ 1, on a
            // panel boundary and extend the range past it.
            let qs1 = (e1 - 1.0) / (e1 + 1.0);
            let qs2 = (e2 - 1.0) / (e2 + 1.0);
            let peak = 0.5 * (qs1 * qs2).norm().ln();
            let u_max = cfg.u_max + peak.max(0.0);
            let mut pts = vec![0.0, 0.5, 2.0, 6.0, u_max];
            if peak > 0.0 {
                pts.push(peak);
            }
            pts.sort_by(f64::total_cmp);
            pts.dedup();
            let v = integrate_fallible(
                &integrator,
                |u| {
                    let kappa = u / s;
                    let k = (q * q + kappa * kappa).sqrt();
                    let (r1, r2) = reflections(eps, omega, k)?;
                    let decay = (-2.0 * u).exp();
                    Ok([
                        u * evanescent_factor(r1.electric, r2.electric, decay),
                        u * evanescent_factor(r1.magnetic, r2.magnetic, decay),
                    ])
                },
                &pts,
            )?;
            [v[0] / (s * s), v[1] / (s * s)]
        }
    };

    Ok(SpectralDecomposition::from_channels(
        pref * prop[0],
        pref * prop[1],
        pref * evan[0],
        pref * evan[1],
    ))
}

/// Evaluates [`spectral_transfer`] on a list of `(ω, S)` points in parallel;
/// results keep input order.
pub fn spectral_sweep(pair: &PlatePair, points: &[(f64, f64)], cfg: &PlanarConfig) -> Result<Vec<SpectralDecomposition>> {
    points
        .par_iter()
        .map(|&(w, s)| spectral_transfer(pair, w, s, cfg))
        .collect()
}

/// Status of a nonretarded-amplitude extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlateauStatus {
    Ok,
    /// `S²·h_evanE` varies by more than 1% across the probe ladder.
    WideSpread,
}

/// Nonretarded amplitude `λ_ω` with `h_pp(S) ≈ λ_ω/S²`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaOmega {
    pub omega: f64,
    /// Richardson-extrapolated `lim_{S→0} S²·h_evanE(S)`.
    pub value: f64,
    /// Relative change between the last two extrapolation levels.
    pub plateau_estimate_error: f64,
    /// Largest relative deviation of the raw `S²·h_evanE` ladder values from
    /// `value`.
    pub plateau_spread: f64,
    /// Quasi-static amplitude from the constant-reflection `u` integral.
    pub quasi_static: f64,
    pub status: PlateauStatus,
    /// Probe separations and the raw `S²·h_evanE` values.
    pub ladder: Vec<(f64, f64)>,
}

/// Probe ladder for [`lambda_extract`].
#[derive(Debug, Clone, Copy)]
pub struct LambdaLadder {
    /// Largest probe separation, m.
    pub s_max: f64,
    /// Number of halvings; the ladder has `levels` points.
    pub levels: usize,
}

impl Default for LambdaLadder {
    fn default() -> Self {
        Self { s_max: 8e-9, levels: 4 }
    }
}

/// Quasi-static amplitude
/// `λ_ω = ħω/(4π²) ∫₀^∞ du u 4 Im r₁ Im r₂ e^{−2u}/|1 − r₁r₂e^{−2u}|²`
/// with `r_i = (ε_i − 1)/(ε_i + 1)`.
pub fn lambda_quasi_static(pair: &PlatePair, omega: f64, rel_tol: f64) -> Result<f64> {
    let Some((e1, e2)) = pair.permittivities(omega)? else {
        return Ok(0.0);
    };
    let r1 = (e1 - 1.0) / (e1 + 1.0);
    let r2 = (e2 - 1.0) / (e2 + 1.0);
    let peak = 0.5 * (r1 * r2).norm().ln();
    let u_max = 40.0 + peak.max(0.0);
    let mut pts = vec![0.0, 0.5, 2.0, 6.0, u_max];
    if peak > 0.0 {
        pts.push(peak);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let est = Integrator::with_rel_tol(rel_tol)
        .integrate_vec(|u| [u * evanescent_factor(r1, r2, (-2.0 * u).exp())], &pts)?;
    Ok(HBAR * omega / (4.0 * PI * PI) * est.value[0])
}

/// Extracts `λ_ω` by Richardson extrapolation of `S²·h_evanE(S)` on a
/// halving ladder of separations (error terms assumed even in `S`).
pub fn lambda_extract(pair: &PlatePair, omega: f64, ladder: &LambdaLadder, cfg: &PlanarConfig) -> Result<LambdaOmega> {
    if ladder.levels < 2 {
        return Err(Error::Domain("lambda extraction needs at least two ladder levels".into()));
    }
    let seps: Vec<f64> = (0..ladder.levels)
        .map(|i| ladder.s_max / 2f64.powi(i as i32))
        .collect();
    let raw: Vec<f64> = seps
        .par_iter()
        .map(|&s| spectral_transfer(pair, omega, s, cfg).map(|d| d.evan_e * s * s))
        .collect::<Result<_>>()?;

    // Neville-style Richardson table with steps h_i = S_i², ratio 4.
    let mut table = raw.clone();
    let mut previous = table[table.len() - 1];
    let mut current = previous;
    for level in 1..table.len() {
        let factor = 4f64.powi(level as i32);
        for i in (level..table.len()).rev() {
            table[i] = (factor * table[i] - table[i - 1]) / (factor - 1.0);
        }
        previous = current;
        current = table[table.len() - 1];
    }
    if current <= 0.0 {
        return Err(Error::Numerical(format!(
            "extrapolated lambda_omega = {current:e} is not positive"
        )));
    }
    let spread = raw
        .iter()
        .map(|v| (v / current - 1.0).abs())
        .fold(0.0_f64, f64::max);
    let quasi_static = lambda_quasi_static(pair, omega, cfg.rel_tol)?;
    Ok(LambdaOmega {
        omega,
        value: current,
        plateau_estimate_error: ((current - previous) / current).abs(),
        plateau_spread: spread,
        quasi_static,
        status: if spread > 1e-2 {
            PlateauStatus::WideSpread
        } else {
            PlateauStatus::Ok
        },
        ladder: seps.into_iter().zip(raw).collect(),
    })
}

/// Frequency-integrated plate flux per unit area, W·m⁻², by channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateFlux {
    pub channels: SpectralDecomposition,
    pub error: f64,
    /// Frequency band actually integrated, rad/s.
    pub band: (f64, f64),
}

/// `H = ∫ dω [n_ω(T1) − n_ω(T2)] h(ω, S)` per unit area, by channel.
///
/// The band is `(0, ω_cut]` with `ħω_cut = 40 k_B max(T1, T2)`, intersected
/// with the tabulated support of the materials.
pub fn integrate_plate(pair: &PlatePair, t1: f64, t2: f64, s: f64, cfg: &PlanarConfig, rel_tol: f64) -> Result<PlateFlux> {
    if !(t1 >= 0.0 && t2 >= 0.0) {
        return Err(Error::Domain(format!("temperatures must be >= 0 (T1={t1}, T2={t2})")));
    }
    if !(s > 0.0) {
        return Err(Error::Domain(format!("gap must be positive, got S = {s}")));
    }
    if t1 == t2 {
        return Ok(PlateFlux {
            channels: SpectralDecomposition::from_channels(0.0, 0.0, 0.0, 0.0),
            error: 0.0,
            band: (0.0, 0.0),
        });
    }
    let (lo_sup, hi_sup) = pair.support();
    let hi = spectral::cutoff_frequency(t1, t2).min(hi_sup);
    let lo = lo_sup;
    if hi <= lo {
        return Err(Error::Domain("material support does not overlap the thermal band".into()));
    }
    let inner = PlanarConfig {
        rel_tol: (0.1 * rel_tol).min(cfg.rel_tol),
        ..*cfg
    };
    let pts = spectral::frequency_panels(lo, hi, &pair.resonance_hints());
    let mut failure = None;
    let est = Integrator::with_rel_tol(rel_tol).integrate_vec(
        |w| {
            let wt = spectral::weight(w, t1, t2);
            match spectral_transfer(pair, w, s, &inner) {
                Ok(d) => [wt * d.prop_e, wt * d.prop_m, wt * d.evan_e, wt * d.evan_m],
                Err(e) => {
                    failure.get_or_insert(e);
                    [0.0; 4]
                }
            }
        },
        &pts,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let est = est?;
    let v = est.value;
    Ok(PlateFlux {
        channels: SpectralDecomposition::from_channels(v[0], v[1], v[2], v[3]),
        error: est.error.iter().sum(),
        band: (lo, hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{rad_per_um_to_rad_per_s, stefan_boltzmann};
    use crate::materials::sic;
    use proptest::prelude::*;

    fn sic_pair() -> PlatePair {
        PlatePair::symmetric(sic().model)
    }

    #[test]
    fn unit_transmission_is_blackbody() {
        let w = 1.3e14;
        let d = spectral_transfer(&PlatePair::UnitTransmission, w, 1e-7, &PlanarConfig::default()).unwrap();
        assert!((d.propagating() / blackbody_spectral(w) - 1.0).abs() < 1e-12);
        assert_eq!(d.evanescent(), 0.0);
        assert!((d.prop_e - d.prop_m).abs() < 1e-12 * d.prop_e);
    }

    #[test]
    fn far_gap_suppresses_tunnelling() {
        // Frustrated modes just beyond the light line are only suppressed
        // algebraically (≈ (c/ωS)⁴), not by e^{−2κS}.
        let w = rad_per_um_to_rad_per_s(0.6);
        let cfg = PlanarConfig::default();
        let near = spectral_transfer(&sic_pair(), w, 10.0 * C / w, &cfg).unwrap();
        assert!(near.evanescent() <= 1e-3 * near.propagating(), "{near:?}");
        let far = spectral_transfer(&sic_pair(), w, 30.0 * C / w, &cfg).unwrap();
        assert!(far.evanescent() <= 1e-6 * far.propagating(), "{far:?}");
    }

    #[test]
    fn electric_tunnelling_dominates_at_ten_nanometres() {
        let w = rad_per_um_to_rad_per_s(0.5955);
        let d = spectral_transfer(&sic_pair(), w, 1e-8, &PlanarConfig::default()).unwrap();
        assert!(d.evan_e >= 0.9 * d.total, "{d:?}");
    }

    #[test]
    fn total_is_channel_sum() {
        let w = rad_per_um_to_rad_per_s(0.62);
        let d = spectral_transfer(&sic_pair(), w, 3e-8, &PlanarConfig::default()).unwrap();
        assert_eq!(d.total, d.prop_e + d.prop_m + d.evan_e + d.evan_m);
    }

    #[test]
    fn rejects_bad_gap() {
        assert!(matches!(
            spectral_transfer(&sic_pair(), 1e14, 0.0, &PlanarConfig::default()),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            spectral_transfer(&sic_pair(), 1e14, -1e-9, &PlanarConfig::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn lambda_symmetric_under_swap() {
        let other = PermittivityModel::constant(Complex64::new(-1.3, 0.4)).unwrap();
        let pair = PlatePair::new(sic().model, other);
        let w = rad_per_um_to_rad_per_s(0.59);
        let cfg = PlanarConfig::default();
        let a = lambda_extract(&pair, w, &LambdaLadder::default(), &cfg).unwrap();
        let b = lambda_extract(&pair.swapped(), w, &LambdaLadder::default(), &cfg).unwrap();
        assert!((a.value / b.value - 1.0).abs() < 1e-8);
        assert!((a.quasi_static / b.quasi_static - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sn2_plateau_for_sic() {
        let w = rad_per_um_to_rad_per_s(0.5955);
        let cfg = PlanarConfig::default();
        let a = spectral_transfer(&sic_pair(), w, 1e-9, &cfg).unwrap().evan_e * 1e-18;
        let b = spectral_transfer(&sic_pair(), w, 2e-9, &cfg).unwrap().evan_e * 4e-18;
        assert!((a / b - 1.0).abs() < 1e-2);
    }

    #[test]
    fn unit_transmission_lambda_is_an_error() {
        let err = lambda_extract(&PlatePair::UnitTransmission, 1e14, &LambdaLadder::default(), &PlanarConfig::default())
            .unwrap_err();
        assert!(matches!(err, Error::Numerical(_)));
    }

    #[test]
    fn stefan_boltzmann_from_plate_integral() {
        let flux = integrate_plate(&PlatePair::UnitTransmission, 300.0, 0.0, 1e-6, &PlanarConfig::default(), 1e-9).unwrap();
        let sb = stefan_boltzmann() * 300f64.powi(4);
        assert!((flux.channels.total / sb - 1.0).abs() < 1e-6);
    }

    #[test]
    fn plate_integral_antisymmetry() {
        let cfg = PlanarConfig { rel_tol: 1e-7, ..Default::default() };
        let a = integrate_plate(&sic_pair(), 300.0, 0.0, 1e-7, &cfg, 1e-5).unwrap();
        let b = integrate_plate(&sic_pair(), 0.0, 300.0, 1e-7, &cfg, 1e-5).unwrap();
        assert_eq!(a.channels.total, -b.channels.total);
        assert!(a.channels.total > 0.0);
        let z = integrate_plate(&sic_pair(), 300.0, 300.0, 1e-7, &cfg, 1e-5).unwrap();
        assert_eq!(z.channels.total, 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn channels_positive_and_bounded(
            re1 in -10.0f64..10.0, im1 in 0.01f64..5.0,
            re2 in -10.0f64..10.0, im2 in 0.01f64..5.0,
            w in 5e13f64..5e14, log_s in -9.0f64..-5.0,
        ) {
            let pair = PlatePair::new(
                PermittivityModel::constant(Complex64::new(re1, im1)).unwrap(),
                PermittivityModel::constant(Complex64::new(re2, im2)).unwrap(),
            );
            let s = 10f64.powf(log_s);
            let d = spectral_transfer(&pair, w, s, &PlanarConfig::default()).unwrap();
            prop_assert!(d.prop_e >= 0.0 && d.prop_m >= 0.0 && d.evan_e >= 0.0 && d.evan_m >= 0.0);
            prop_assert!(d.propagating() <= blackbody_spectral(w) * (1.0 + 1e-9));
        }
    }

    #[test]
    fn total_non_increasing_with_gap() {
        let w = rad_per_um_to_rad_per_s(0.58);
        let cfg = PlanarConfig::default();
        let mut prev = f64::INFINITY;
        for i in 0..12 {
            let s = 1e-9 * 10f64.powf(i as f64 * 0.25);
            let t = spectral_transfer(&sic_pair(), w, s, &cfg).unwrap().total;
            assert!(t <= prev * (1.0 + 1e-9), "increase at S={s}");
            prev = t;
        }
    }
}
