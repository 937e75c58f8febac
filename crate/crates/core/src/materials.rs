//! Dielectric response of the two bodies and their planar Fresnel
//! reflection coefficients.
//!
//! Frequencies are angular frequencies in rad/s and in-plane wavevectors are
//! in rad/m throughout. Materials are non-magnetic (μ = 1).

use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::constants::C;
use crate::error::{Error, Result};

/// One sample of tabulated optical data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpticalSample {
    pub omega: f64,
    pub eps_re: f64,
    pub eps_im: f64,
}

/// Tabulated dielectric function, linearly interpolated in ω on the real and
/// imaginary parts separately. Never extrapolates.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalTable {
    samples: Vec<OpticalSample>,
}

impl OpticalTable {
    pub fn new(samples: Vec<OpticalSample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Domain("tabulated permittivity needs at least 2 samples".into()));
        }
        for (i, s) in samples.iter().enumerate() {
            if !(s.omega.is_finite() && s.eps_re.is_finite() && s.eps_im.is_finite()) {
                return Err(Error::Domain(format!("non-finite optical sample at index {i}")));
            }
            if s.omega <= 0.0 {
                return Err(Error::Domain(format!("non-positive frequency at index {i}")));
            }
            if s.eps_im < 0.0 {
                return Err(Error::Domain(format!(
                    "Im eps = {} < 0 at index {i} violates passivity",
                    s.eps_im
                )));
            }
        }
        if let Some(i) = samples.windows(2).position(|w| w[1].omega <= w[0].omega) {
            return Err(Error::Domain(format!(
                "tabulated frequencies must be strictly increasing (index {})",
                i + 1
            )));
        }
        Ok(Self { samples })
    }

    /// Parses the plain-text optical data format: one
    /// `omega_rad_per_s eps_re eps_im` triple per line, `#` comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut samples = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected 3 columns, found {}", fields.len()),
                });
            }
            let mut vals = [0.0; 3];
            for (v, f) in vals.iter_mut().zip(&fields) {
                *v = f.parse().map_err(|_| Error::Parse {
                    line: idx + 1,
                    message: format!("not a number: {f:?}"),
                })?;
            }
            if let Some(prev) = samples.last() {
                let prev: &OpticalSample = prev;
                if vals[0] <= prev.omega {
                    return Err(Error::Parse {
                        line: idx + 1,
                        message: "frequencies are not strictly increasing".into(),
                    });
                }
            }
            samples.push(OpticalSample {
                omega: vals[0],
                eps_re: vals[1],
                eps_im: vals[2],
            });
        }
        Self::new(samples)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn samples(&self) -> &[OpticalSample] {
        &self.samples
    }

    pub fn range(&self) -> (f64, f64) {
        (self.samples[0].omega, self.samples[self.samples.len() - 1].omega)
    }

    fn eval(&self, omega: f64) -> Result<Complex64> {
        let (min, max) = self.range();
        if !(min..=max).contains(&omega) {
            return Err(Error::OutOfRange { omega, min, max });
        }
        let hi = self.samples.partition_point(|s| s.omega < omega);
        let hi_s = self.samples[hi];
        if hi_s.omega == omega || hi == 0 {
            return Ok(Complex64::new(hi_s.eps_re, hi_s.eps_im));
        }
        let lo_s = self.samples[hi - 1];
        let t = (omega - lo_s.omega) / (hi_s.omega - lo_s.omega);
        Ok(Complex64::new(
            lo_s.eps_re + t * (hi_s.eps_re - lo_s.eps_re),
            lo_s.eps_im + t * (hi_s.eps_im - lo_s.eps_im),
        ))
    }
}

/// Complex dielectric function ε(ω).
#[derive(Debug, Clone, PartialEq)]
pub enum PermittivityModel {
    /// `ε_∞(ω_L² − ω² − iγω)/(ω_T² − ω² − iγω)`.
    LorentzOscillator {
        eps_inf: f64,
        omega_l: f64,
        omega_t: f64,
        gamma: f64,
    },
    Tabulated(OpticalTable),
    Constant(Complex64),
}

impl PermittivityModel {
    pub fn lorentz(eps_inf: f64, omega_l: f64, omega_t: f64, gamma: f64) -> Result<Self> {
        if !(omega_t > 0.0 && omega_l > omega_t) {
            return Err(Error::Domain(format!(
                "Lorentz oscillator needs omega_L > omega_T > 0 (got {omega_l:e}, {omega_t:e})"
            )));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::Domain(format!("damping must be >= 0, got {gamma}")));
        }
        if !(eps_inf >= 1.0 && eps_inf.is_finite()) {
            return Err(Error::Domain(format!("eps_inf must be >= 1, got {eps_inf}")));
        }
        Ok(Self::LorentzOscillator {
            eps_inf,
            omega_l,
            omega_t,
            gamma,
        })
    }

    pub fn constant(eps: Complex64) -> Result<Self> {
        if !(eps.re.is_finite() && eps.im.is_finite()) {
            return Err(Error::Domain("non-finite permittivity".into()));
        }
        if eps.im < 0.0 {
            return Err(Error::Domain(format!("Im eps = {} < 0 violates passivity", eps.im)));
        }
        Ok(Self::Constant(eps))
    }

    /// Frequency window over which the model is defined.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Tabulated(t) => t.range(),
            _ => (0.0, f64::INFINITY),
        }
    }

    pub fn permittivity(&self, omega: f64) -> Result<Complex64> {
        permittivity(self, omega)
    }
}

/// Evaluates ε(ω) for `model`.
pub fn permittivity(model: &PermittivityModel, omega: f64) -> Result<Complex64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::Domain(format!("frequency must be positive and finite, got {omega}")));
    }
    let eps = match model {
        PermittivityModel::LorentzOscillator {
            eps_inf,
            omega_l,
            omega_t,
            gamma,
        } => {
            let damp = Complex64::new(0.0, gamma * omega);
            let w2 = omega * omega;
            *eps_inf * (omega_l * omega_l - w2 - damp) / (omega_t * omega_t - w2 - damp)
        }
        PermittivityModel::Tabulated(table) => table.eval(omega)?,
        PermittivityModel::Constant(eps) => *eps,
    };
    if !(eps.re.is_finite() && eps.im.is_finite()) {
        return Err(Error::Domain(format!("permittivity is not finite at omega = {omega:e}")));
    }
    Ok(eps)
}

/// Descriptive metadata attached to a shipped material preset.
#[derive(Debug, Clone)]
pub struct Preset {
    pub name: String,
    pub source: String,
    pub model: PermittivityModel,
}

#[derive(Deserialize)]
struct LorentzFile {
    name: String,
    version: u32,
    parameter_set: String,
    eps_inf: f64,
    omega_l: f64,
    omega_t: f64,
    gamma: f64,
}

const SIC_FILE: &str = include_str!("../data/sic_lorentz.toml");
const SIO2_STANDIN_FILE: &str = include_str!("../data/sio2_standin.txt");

/// Parses a Lorentz-oscillator preset file (TOML with `eps_inf`, `omega_l`,
/// `omega_t`, `gamma` in rad/s).
pub fn parse_lorentz_preset(text: &str) -> Result<Preset> {
    let f: LorentzFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    Ok(Preset {
        name: f.name,
        source: format!("{} (v{})", f.parameter_set, f.version),
        model: PermittivityModel::lorentz(f.eps_inf, f.omega_l, f.omega_t, f.gamma)?,
    })
}

/// Silicon carbide, single Lorentz oscillator.
pub fn sic() -> Preset {
    parse_lorentz_preset(SIC_FILE).expect("bundled SiC preset is valid")
}

/// Tabulated SiO₂ stand-in sampled from a multi-oscillator quartz model.
/// Not measured data; see the header of `data/sio2_standin.txt`.
pub fn sio2_standin() -> Preset {
    Preset {
        name: "SiO2-standin".into(),
        source: "tabulated multi-oscillator quartz model (stand-in, not measured data)".into(),
        model: PermittivityModel::Tabulated(
            OpticalTable::parse(SIO2_STANDIN_FILE).expect("bundled SiO2 table is valid"),
        ),
    }
}

/// Looks up a bundled preset by (case-insensitive) name.
pub fn preset(name: &str) -> Option<Preset> {
    match name.to_ascii_lowercase().as_str() {
        "sic" => Some(sic()),
        "sio2" | "sio2-standin" | "sio2_standin" => Some(sio2_standin()),
        _ => None,
    }
}

/// Fresnel reflection amplitudes of a vacuum/medium interface.
///
/// `electric` is the electric (TM, p-polarized) mode whose quasi-static limit
/// is `(ε−1)/(ε+1)`; `magnetic` is the magnetic (TE, s-polarized) mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelPair {
    pub electric: Complex64,
    pub magnetic: Complex64,
}

impl FresnelPair {
    pub const ZERO: FresnelPair = FresnelPair {
        electric: Complex64::new(0.0, 0.0),
        magnetic: Complex64::new(0.0, 0.0),
    };
}

/// Square root on the branch with non-negative imaginary part.
pub fn sqrt_decaying(z: Complex64) -> Complex64 {
    let r = z.sqrt();
    if r.im < 0.0 || (r.im == 0.0 && r.re < 0.0) {
        -r
    } else {
        r
    }
}

/// Fresnel coefficients for permittivity `eps` at frequency `omega` and
/// in-plane wavevector `k`.
pub fn fresnel(eps: Complex64, omega: f64, k: f64) -> Result<FresnelPair> {
    if !(eps.re.is_finite() && eps.im.is_finite() && omega.is_finite() && k.is_finite()) {
        return Err(Error::Domain("non-finite Fresnel input".into()));
    }
    if omega <= 0.0 || k < 0.0 {
        return Err(Error::Domain(format!("need omega > 0 and k >= 0 (omega={omega}, k={k})")));
    }
    let q0 = (omega / C) * (omega / C);
    let kz = sqrt_decaying(Complex64::new(q0 - k * k, 0.0));
    let kzm = sqrt_decaying(eps * q0 - k * k);
    // (kz − kzm) rewritten as (1−ε)q0/(kz + kzm) to avoid cancellation at k ≫ ω/c.
    let sum = kz + kzm;
    let magnetic = (1.0 - eps) * q0 / (sum * sum);
    let electric = (eps * kz - kzm) / (eps * kz + kzm);
    Ok(FresnelPair { electric, magnetic })
}

/// Outcome of the nonretarded-regime validity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Validity {
    /// `Im[(ε−1)/(ε+1)] / (Im[ε−1]·(ωd/2c)²)`; values ≫ 1 mean the `S⁻²`
    /// evanescent term dominates.
    Ratio(f64),
    /// Lossless medium: both sides of the criterion vanish.
    Degenerate,
}

impl Validity {
    pub fn ratio(self) -> Option<f64> {
        match self {
            Validity::Ratio(r) => Some(r),
            Validity::Degenerate => None,
        }
    }
}

/// Quasi-static validity ratio for two equal materials at separation `d`.
pub fn quasistatic_validity(eps: Complex64, omega: f64, d: f64) -> Result<Validity> {
    if !(omega > 0.0 && d > 0.0) {
        return Err(Error::Domain(format!("need omega > 0 and d > 0 (omega={omega}, d={d})")));
    }
    if eps.im == 0.0 {
        return Ok(Validity::Degenerate);
    }
    let num = ((eps - 1.0) / (eps + 1.0)).im;
    let x = omega * d / (2.0 * C);
    Ok(Validity::Ratio(num / (eps.im * x * x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::rad_per_um_to_rad_per_s;
    use proptest::prelude::*;

    fn sic_model() -> PermittivityModel {
        sic().model
    }

    #[test]
    fn lorentz_static_limit() {
        let m = PermittivityModel::lorentz(6.7, 1.825e14, 1.494e14, 0.0).unwrap();
        let eps = m.permittivity(1.0).unwrap();
        let expected = 6.7 * (1.825e14f64 / 1.494e14).powi(2);
        assert!((eps.re - expected).abs() / expected < 1e-12);
        assert_eq!(eps.im, 0.0);
    }

    #[test]
    fn sic_high_frequency_limit() {
        let eps = sic_model().permittivity(1e19).unwrap();
        assert!((eps.re - 6.7).abs() < 1e-6, "{eps}");
        assert!(eps.im.abs() < 1e-6);
    }

    #[test]
    fn sic_surface_mode_near_point_six() {
        // ε(ω) = −1 close to ω/c ≈ 0.596 rad/µm for the shipped parameter set.
        let w = rad_per_um_to_rad_per_s(0.5955);
        let eps = sic_model().permittivity(w).unwrap();
        assert!((eps.re + 1.0).abs() < 0.1, "{eps}");
    }

    #[test]
    fn tabulated_grid_points_are_exact() {
        let t = OpticalTable::new(vec![
            OpticalSample { omega: 1.0, eps_re: 2.0, eps_im: 0.5 },
            OpticalSample { omega: 2.0, eps_re: 4.0, eps_im: 1.5 },
            OpticalSample { omega: 4.0, eps_re: -1.0, eps_im: 0.1 },
        ])
        .unwrap();
        let m = PermittivityModel::Tabulated(t);
        assert_eq!(m.permittivity(2.0).unwrap(), Complex64::new(4.0, 1.5));
        assert_eq!(m.permittivity(4.0).unwrap(), Complex64::new(-1.0, 0.1));
        assert_eq!(m.permittivity(1.5).unwrap(), Complex64::new(3.0, 1.0));
    }

    #[test]
    fn tabulated_out_of_range_is_error() {
        let m = sio2_standin().model;
        let (lo, hi) = m.support();
        assert!(matches!(m.permittivity(lo * 0.5), Err(Error::OutOfRange { .. })));
        assert!(matches!(m.permittivity(hi * 1.01), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn loader_rejects_unsorted_and_malformed() {
        let err = OpticalTable::parse("# c\n1.0 2 0.1\n0.5 2 0.1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = OpticalTable::parse("1.0 2 0.1\n2.0 x 0.1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(OpticalTable::parse("1.0 2 0.1\n").is_err());
    }

    #[test]
    fn invalid_lorentz_rejected() {
        assert!(PermittivityModel::lorentz(6.7, 1.0e14, 1.5e14, 1e12).is_err());
        assert!(PermittivityModel::lorentz(0.5, 2.0e14, 1.5e14, 1e12).is_err());
        assert!(PermittivityModel::lorentz(6.7, 2.0e14, 1.5e14, -1.0).is_err());
    }

    #[test]
    fn vacuum_reflects_nothing() {
        for &(w, k) in &[(1e14, 0.0), (1e14, 1e5), (1e14, 1e9)] {
            let r = fresnel(Complex64::new(1.0, 0.0), w, k).unwrap();
            assert_eq!(r.electric.norm(), 0.0);
            assert_eq!(r.magnetic.norm(), 0.0);
        }
    }

    #[test]
    fn normal_incidence_degenerate() {
        let eps = Complex64::new(-3.0, 0.4);
        let r = fresnel(eps, 1.7e14, 0.0).unwrap();
        assert!((r.electric.norm() - r.magnetic.norm()).abs() < 1e-14);
    }

    #[test]
    fn quasi_static_limit_of_electric_mode() {
        let m = sic_model();
        let w = rad_per_um_to_rad_per_s(0.5955);
        let eps = m.permittivity(w).unwrap();
        let k = 100.0 * w / C;
        let r = fresnel(eps, w, k).unwrap();
        let qs = (eps - 1.0) / (eps + 1.0);
        assert!((r.electric - qs).norm() <= 1e-3 * qs.norm());
        assert!(r.magnetic.norm() < 1e-3);
    }

    #[test]
    fn negative_real_eps_branch_is_resolved() {
        let eps = Complex64::new(-2.0, 0.0);
        let r = fresnel(eps, 1e14, 0.5e14 / C).unwrap();
        assert!(r.electric.re.is_finite() && r.magnetic.re.is_finite());
    }

    #[test]
    fn validity_ratio_examples() {
        let eps = Complex64::new(1.0, 1.0);
        let d = 1e-6;
        let omega = 2.0 * C / d;
        let v = quasistatic_validity(eps, omega, d).unwrap();
        assert!((v.ratio().unwrap() - 0.4).abs() < 1e-14);
        assert_eq!(
            quasistatic_validity(Complex64::new(3.0, 0.0), omega, d).unwrap(),
            Validity::Degenerate
        );
        let small = quasistatic_validity(eps, omega, 1e-12).unwrap().ratio().unwrap();
        assert!(small > 1e10);
    }

    proptest! {
        #[test]
        fn sic_is_passive(w in 1e12f64..1e16) {
            let eps = sic_model().permittivity(w).unwrap();
            prop_assert!(eps.im >= 0.0);
        }

        #[test]
        fn propagating_reflection_bounded(
            re in -20.0f64..20.0, im in 0.0f64..20.0, w in 1e13f64..1e15, frac in 0.0f64..1.0
        ) {
            let eps = Complex64::new(re, im);
            let k = frac * w / C;
            let r = fresnel(eps, w, k).unwrap();
            prop_assert!(r.electric.norm() <= 1.0 + 1e-12);
            prop_assert!(r.magnetic.norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn fresnel_continuous_across_light_line() {
        let m = sic_model();
        let w = rad_per_um_to_rad_per_s(0.58);
        let eps = m.permittivity(w).unwrap();
        let kl = w / C;
        let n = 2001;
        let mut prev = fresnel(eps, w, 0.99 * kl).unwrap();
        for i in 1..n {
            let k = kl * (0.99 + 0.02 * i as f64 / (n - 1) as f64);
            let cur = fresnel(eps, w, k).unwrap();
            assert!((cur.electric - prev.electric).norm() < 0.05, "jump at k={k}");
            assert!((cur.magnetic - prev.magnetic).norm() < 0.05, "jump at k={k}");
            prev = cur;
        }
    }
}
