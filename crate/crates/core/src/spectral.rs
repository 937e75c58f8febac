//! Bose–Einstein weighting, frequency integration of spectral transfer and
//! thermal aggregation of per-frequency expansion coefficients.

use crate::constants::{HBAR, K_B};
use crate::error::{Error, Result};
use crate::quadrature::Integrator;

/// `ħω/(k_B T)` at which frequency integrals are truncated. The weight there
/// is `e⁻⁴⁰ ≈ 4·10⁻¹⁸`.
pub const CUTOFF_X: f64 = 40.0;

/// Bose–Einstein occupation `1/(e^{ħω/k_BT} − 1)`; zero at `T = 0`.
pub fn bose_einstein(omega: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let x = HBAR * omega / (K_B * t);
    1.0 / x.exp_m1()
}

/// Weight difference `n_ω(T1) − n_ω(T2)`.
pub fn weight(omega: f64, t1: f64, t2: f64) -> f64 {
    if t1 == t2 {
        return 0.0;
    }
    bose_einstein(omega, t1) - bose_einstein(omega, t2)
}

/// Upper frequency limit for thermal integrals at the given temperatures.
pub fn cutoff_frequency(t1: f64, t2: f64) -> f64 {
    CUTOFF_X * K_B * t1.max(t2) / HBAR
}

fn check_temperatures(t1: f64, t2: f64) -> Result<()> {
    if !(t1 >= 0.0 && t2 >= 0.0 && t1.is_finite() && t2.is_finite()) {
        return Err(Error::Domain(format!("temperatures must be finite and >= 0 (T1={t1}, T2={t2})")));
    }
    Ok(())
}

/// Initial panel boundaries for a thermal integral on `[lo, hi]`: a
/// geometric grid that resolves the `1/ω` rise of the weight near zero plus
/// any caller-supplied resonance hints.
pub(crate) fn frequency_panels(lo: f64, hi: f64, hints: &[f64]) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    let first = if lo > 0.0 { lo } else { hi * 1e-4 };
    let n = 24;
    for i in 0..n {
        let p = first * (hi / first).powf(i as f64 / n as f64);
        if p > lo && p < hi {
            pts.push(p);
        }
    }
    pts.extend(hints.iter().copied().filter(|h| *h > lo && *h < hi));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Result of a thermal frequency integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integrated {
    pub value: f64,
    pub error: f64,
}

/// `H = ∫ dω [n_ω(T1) − n_ω(T2)] h(ω)` over `(0, ω_cut]`.
///
/// `hints` are optional frequencies (rad/s) where `h` has structure.
pub fn total_transfer<F>(h_spectral: F, t1: f64, t2: f64, rel_tol: f64, hints: &[f64]) -> Result<Integrated>
where
    F: Fn(f64) -> Result<f64>,
{
    check_temperatures(t1, t2)?;
    if t1 == t2 {
        return Ok(Integrated { value: 0.0, error: 0.0 });
    }
    let hi = cutoff_frequency(t1, t2);
    let pts = frequency_panels(0.0, hi, hints);
    let mut failure = None;
    let est = Integrator::with_rel_tol(rel_tol).integrate_vec(
        |w| match h_spectral(w) {
            Ok(h) => [weight(w, t1, t2) * h],
            Err(e) => {
                failure.get_or_insert(e);
                [0.0]
            }
        },
        &pts,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let est = est?;
    Ok(Integrated {
        value: est.value[0],
        error: est.error[0],
    })
}

/// Tabulated function of frequency with linear interpolation and a finite
/// support `[ω_min, ω_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTable {
    omega: Vec<f64>,
    value: Vec<f64>,
}

impl SpectralTable {
    pub fn new(omega: Vec<f64>, value: Vec<f64>) -> Result<Self> {
        if omega.len() != value.len() || omega.len() < 2 {
            return Err(Error::Domain("spectral table needs >= 2 (omega, value) pairs".into()));
        }
        if omega.windows(2).any(|w| w[1] <= w[0]) || omega[0] <= 0.0 {
            return Err(Error::Domain("spectral table frequencies must be positive and strictly increasing".into()));
        }
        if value.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("spectral table holds non-finite values".into()));
        }
        Ok(Self { omega, value })
    }

    /// Parses CSV with header `omega_rad_per_s,value`.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let rows = crate::csv::read_numeric(text, &["omega_rad_per_s", "value"])?;
        let (omega, value) = rows.into_iter().map(|r| (r[0], r[1])).unzip();
        Self::new(omega, value)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.omega[0], self.omega[self.omega.len() - 1])
    }

    pub fn nodes(&self) -> &[f64] {
        &self.omega
    }

    /// Linear interpolation; zero outside the support.
    pub fn eval(&self, w: f64) -> f64 {
        let (lo, hi) = self.support();
        if !(lo..=hi).contains(&w) {
            return 0.0;
        }
        let j = self.omega.partition_point(|x| *x < w);
        if j == 0 || self.omega[j] == w {
            return self.value[j];
        }
        let t = (w - self.omega[j - 1]) / (self.omega[j] - self.omega[j - 1]);
        self.value[j - 1] + t * (self.value[j] - self.value[j - 1])
    }
}

/// Thermally aggregated `(λ, β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateCoefficients {
    pub lambda: f64,
    pub beta: f64,
    pub t1: f64,
    pub t2: f64,
    /// Fraction of the thermal weight `ω|n(T1) − n(T2)|` outside the
    /// supplied frequency support.
    pub tail_mass: f64,
}

/// Maximum thermal tail mass tolerated outside the coefficient support.
pub const MAX_TAIL_MASS: f64 = 1e-4;

/// Fraction of `∫ ω |n(T1) − n(T2)| dω` lying outside `[lo, hi]`.
pub fn thermal_tail_mass(lo: f64, hi: f64, t1: f64, t2: f64) -> Result<f64> {
    let cut = cutoff_frequency(t1, t2);
    let integrator = Integrator::with_rel_tol(1e-10);
    let f = |w: f64| w * weight(w, t1, t2).abs();
    let pts = frequency_panels(0.0, cut, &[]);
    let total = integrator.integrate_vec(|w| [f(w)], &pts)?.value[0];
    let inside_lo = lo.clamp(0.0, cut);
    let inside_hi = hi.clamp(0.0, cut);
    let inside = if inside_hi > inside_lo {
        integrator
            .integrate_vec(|w| [f(w)], &frequency_panels(inside_lo, inside_hi, &[]))?
            .value[0]
    } else {
        0.0
    };
    Ok(((total - inside) / total).max(0.0))
}

/// Aggregates per-frequency coefficients:
/// `λ = ∫ dω [n(T1) − n(T2)] λ_ω` and
/// `β = λ⁻¹ ∫ dω [n(T1) − n(T2)] β_ω λ_ω`.
///
/// `support` is the frequency range on which `lambda_w` and `beta_w` are
/// known; the integrals are taken over its intersection with `(0, ω_cut]`.
pub fn aggregate_coefficients<L, B>(
    lambda_w: L,
    beta_w: B,
    support: (f64, f64),
    t1: f64,
    t2: f64,
    rel_tol: f64,
    hints: &[f64],
) -> Result<AggregateCoefficients>
where
    L: Fn(f64) -> f64,
    B: Fn(f64) -> f64,
{
    check_temperatures(t1, t2)?;
    if t1 == t2 {
        return Err(Error::Domain("beta undefined at equal temperatures".into()));
    }
    let (lo, hi) = support;
    if !(lo >= 0.0 && hi > lo) {
        return Err(Error::Domain(format!("invalid coefficient support [{lo:e}, {hi:e}]")));
    }
    let tail_mass = thermal_tail_mass(lo, hi, t1, t2)?;
    if tail_mass > MAX_TAIL_MASS {
        return Err(Error::Numerical(format!(
            "coefficient tables cover too little of the thermal support: tail mass {tail_mass:.3e} > {MAX_TAIL_MASS:e}"
        )));
    }
    let a = lo;
    let b = hi.min(cutoff_frequency(t1, t2));
    let pts = frequency_panels(a, b, hints);
    let est = Integrator::with_rel_tol(rel_tol).integrate_vec(
        |w| {
            let wt = weight(w, t1, t2) * lambda_w(w);
            [wt, wt * beta_w(w)]
        },
        &pts,
    )?;
    let lambda = est.value[0];
    if lambda == 0.0 {
        return Err(Error::Numerical("aggregated lambda vanishes; beta undefined".into()));
    }
    Ok(AggregateCoefficients {
        lambda,
        beta: est.value[1] / lambda,
        t1,
        t2,
        tail_mass,
    })
}

/// Aggregates tabulated coefficients; table nodes are used as panel hints.
pub fn aggregate_tables(
    lambda_w: &SpectralTable,
    beta_w: &SpectralTable,
    t1: f64,
    t2: f64,
    rel_tol: f64,
) -> Result<AggregateCoefficients> {
    let (l0, l1) = lambda_w.support();
    let (b0, b1) = beta_w.support();
    let support = (l0.max(b0), l1.min(b1));
    // Many table nodes would make the initial panel list huge; thin them.
    let stride = (lambda_w.nodes().len() / 64).max(1);
    let hints: Vec<f64> = lambda_w.nodes().iter().step_by(stride).copied().collect();
    aggregate_coefficients(|w| lambda_w.eval(w), |w| beta_w.eval(w), support, t1, t2, rel_tol, &hints)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::stefan_boltzmann;
    use std::f64::consts::PI;

    #[test]
    fn zero_temperature_is_zero() {
        assert_eq!(bose_einstein(1e14, 0.0), 0.0);
    }

    #[test]
    fn unit_argument() {
        let t = 300.0;
        let w = K_B * t / HBAR;
        let n = bose_einstein(w, t);
        assert!((n - 0.581_976_706_869_326_4).abs() < 1e-12, "{n}");
    }

    #[test]
    fn rayleigh_jeans_limit() {
        let t = 300.0;
        let w = 1e-3 * K_B * t / HBAR;
        let n = bose_einstein(w, t);
        assert!((n / (K_B * t / (HBAR * w)) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn stefan_boltzmann_from_blackbody_spectrum() {
        let bb = |w: f64| Ok(HBAR * w.powi(3) / (4.0 * PI * PI * crate::constants::C.powi(2)));
        let h = total_transfer(bb, 300.0, 0.0, 1e-10, &[]).unwrap();
        let sb = stefan_boltzmann() * 300f64.powi(4);
        assert!((h.value / sb - 1.0).abs() < 1e-9, "{}", h.value / sb);
        let back = total_transfer(bb, 0.0, 300.0, 1e-10, &[]).unwrap();
        assert_eq!(back.value, -h.value);
        assert_eq!(total_transfer(bb, 300.0, 300.0, 1e-10, &[]).unwrap().value, 0.0);
    }

    #[test]
    fn weight_support_centres_near_thermal_wavelength() {
        // λ_T = ħc/(k_B T) ≈ 7.6 µm at 300 K; the blackbody-weighted spectrum
        // ω³ n_ω(T) peaks at ħω ≈ 2.82 k_BT, i.e. wavevector ≈ 2.82/λ_T.
        let t = 300.0;
        let lt = crate::constants::thermal_wavelength(t);
        assert!((lt * 1e6 - 7.63).abs() < 0.01);
        let peak = (1..8000)
            .map(|i| i as f64 * 1e-3 * K_B * t / HBAR)
            .max_by(|a, b| (a.powi(3) * bose_einstein(*a, t)).total_cmp(&(b.powi(3) * bose_einstein(*b, t))))
            .unwrap();
        let x = peak / (crate::constants::C / lt);
        assert!((x - 2.821).abs() < 0.01, "{x}");
    }

    #[test]
    fn constant_beta_is_reproduced() {
        let t1 = 300.0;
        let hi = 60.0 * K_B * t1 / HBAR;
        let agg = aggregate_coefficients(
            |w| 1e-20 * (1.0 + (w / 1e14).sin().powi(2)),
            |_| 0.37,
            (1e6, hi),
            t1,
            0.0,
            1e-10,
            &[],
        )
        .unwrap();
        assert!((agg.beta - 0.37).abs() < 1e-12);
    }

    #[test]
    fn lambda_closed_form_bose_integral() {
        // λ_ω = λ0·ħω/(k_B T1) gives λ = λ0·(π²/6)·k_B T1/ħ.
        let t1 = 300.0;
        let scale = K_B * t1 / HBAR;
        let lambda0 = 2.5e-21;
        let agg = aggregate_coefficients(|w| lambda0 * w / scale, |_| 0.5, (1e-6 * scale, 60.0 * scale), t1, 0.0, 1e-11, &[])
            .unwrap();
        let expected = lambda0 * PI * PI / 6.0 * scale;
        // The support starts at 10⁻⁶ k_BT/ħ, which drops ≈ 6·10⁻⁷ of the mass.
        assert!((agg.lambda / expected - 1.0).abs() < 1e-6, "{}", agg.lambda / expected);
    }

    #[test]
    fn beta_is_a_convex_combination() {
        let t1 = 450.0;
        let hi = 50.0 * K_B * t1 / HBAR;
        let beta = |w: f64| -3.0 + 4.0 * (w / 2e13).cos().powi(2);
        let agg = aggregate_coefficients(|w| w * 1e-30, beta, (1e8, hi), t1, 10.0, 1e-10, &[]).unwrap();
        assert!(agg.beta >= -3.0 && agg.beta <= 1.0);
    }

    #[test]
    fn equal_temperatures_rejected() {
        let err = aggregate_coefficients(|_| 1.0, |_| 1.0, (1.0, 1e16), 300.0, 300.0, 1e-8, &[]).unwrap_err();
        assert!(err.to_string().contains("equal temperatures"));
    }

    #[test]
    fn narrow_support_is_a_coverage_error() {
        let t1 = 300.0;
        let s = K_B * t1 / HBAR;
        let err = aggregate_coefficients(|_| 1.0, |_| 0.5, (0.5 * s, 3.0 * s), t1, 0.0, 1e-8, &[]).unwrap_err();
        assert!(err.to_string().contains("tail mass"), "{err}");
    }

    #[test]
    fn antisymmetric_aggregation() {
        let s = K_B * 300.0 / HBAR;
        let a = aggregate_coefficients(|w| w, |_| 0.2, (1e-6 * s, 80.0 * s), 300.0, 20.0, 1e-10, &[]).unwrap();
        let b = aggregate_coefficients(|w| w, |_| 0.2, (1e-6 * s, 80.0 * s), 20.0, 300.0, 1e-10, &[]).unwrap();
        assert_eq!(a.lambda, -b.lambda);
        assert!(a.lambda > 0.0);
    }

    #[test]
    fn table_interpolates_and_vanishes_outside() {
        let t = SpectralTable::new(vec![1.0, 2.0, 3.0], vec![0.0, 2.0, 1.0]).unwrap();
        assert_eq!(t.eval(1.5), 1.0);
        assert_eq!(t.eval(3.0), 1.0);
        assert_eq!(t.eval(3.5), 0.0);
        assert!(SpectralTable::new(vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
    }
}
