//! Quadrature-versus-closed-form comparison: evaluates
//! `pta + gradient_correction` on a gap ladder, fits the small-gap
//! expansion and compares leading and subleading coefficients with
//! [`crate::asymptotics`].

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{
    cylinder_basis, fit_expansion, geometric_ladder, gradient_expansion, ladder, pta, sphere_basis, GeometryConfig,
    GradientCoefficients, HeightProfile, ProfileKind,
};

/// One numeric-versus-closed-form comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleLine {
    pub label: String,
    pub numeric: f64,
    pub closed_form: f64,
    pub rel_error: f64,
}

impl OracleLine {
    pub fn new(label: impl Into<String>, numeric: f64, closed_form: f64) -> Self {
        let rel_error = if closed_form == 0.0 {
            numeric.abs()
        } else {
            ((numeric - closed_form) / closed_form).abs()
        };
        Self {
            label: label.into(),
            numeric,
            closed_form,
            rel_error,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub geometry: String,
    pub lines: Vec<OracleLine>,
    /// Relative change of the subleading coefficient when the rim cutoff is
    /// halved.
    pub cutoff_sensitivity: f64,
}

impl OracleReport {
    pub fn max_rel_error(&self) -> f64 {
        self.lines.iter().map(|l| l.rel_error).fold(0.0, f64::max)
    }
}

/// Ladder and quadrature settings.
#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
    pub cutoff: f64,
    pub geometry: GeometryConfig,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            x_min: 1e-4,
            x_max: 1e-2,
            points: 24,
            cutoff: 0.05,
            geometry: GeometryConfig::default(),
        }
    }
}

fn fitted(kind: ProfileKind, scale: f64, lambda: f64, beta: f64, cutoff: f64, cfg: &OracleConfig) -> Result<Vec<f64>> {
    let xs = geometric_ladder(cfg.x_min, cfg.x_max, cfg.points);
    let coeffs = GradientCoefficients::new(beta);
    let values = ladder(&xs, |x| {
        let profile = HeightProfile::new(kind, x * scale)?;
        gradient_expansion(&profile, lambda, coeffs, cutoff, &cfg.geometry)
    })?;
    let ys: Vec<f64> = values.iter().map(|(_, v)| *v).collect();
    let basis = match kind {
        ProfileKind::Cylinder { .. } => cylinder_basis(),
        _ => sphere_basis(),
    };
    fit_expansion(&xs, &ys, &basis)
}

fn validate(cfg: &OracleConfig) -> Result<()> {
    if !(cfg.x_min > 0.0 && cfg.x_min < cfg.x_max && cfg.x_max < 1.0) {
        return Err(Error::Domain(format!("invalid ladder d/R in [{}, {}]", cfg.x_min, cfg.x_max)));
    }
    Ok(())
}

/// Sphere of radius `r` facing a plate.
pub fn sphere(r: f64, lambda: f64, beta: f64, cfg: &OracleConfig) -> Result<OracleReport> {
    validate(cfg)?;
    let kind = ProfileKind::Sphere { radius: r };
    let c = fitted(kind, r, lambda, beta, cfg.cutoff, cfg)?;
    let c_half = fitted(kind, r, lambda, beta, 0.5 * cfg.cutoff, cfg)?;
    // V = c₀/x + c₁ ln x + … with x = d/R.
    Ok(OracleReport {
        geometry: "sphere-plate".into(),
        lines: vec![
            OracleLine::new("leading 2*pi*R*lambda", c[0] * r, 2.0 * PI * r * lambda),
            OracleLine::new("log -2*pi*lambda*(2*beta-1)", c[1], -2.0 * PI * lambda * (2.0 * beta - 1.0)),
        ],
        cutoff_sensitivity: ((c_half[1] - c[1]) / c[1]).abs(),
    })
}

/// Two spheres `r1 ≤ r2`.
pub fn two_spheres(r1: f64, r2: f64, lambda: f64, beta: f64, cfg: &OracleConfig) -> Result<OracleReport> {
    validate(cfg)?;
    let scale = r1.min(r2);
    let kind = ProfileKind::TwoSpheresEffective { r1, r2 };
    let c = fitted(kind, scale, lambda, beta, cfg.cutoff, cfg)?;
    let c_half = fitted(kind, scale, lambda, beta, 0.5 * cfg.cutoff, cfg)?;
    let r_eff = r1 * r2 / (r1 + r2);
    let log_closed = 2.0 * PI * lambda * r_eff * (1.0 / (r1 + r2) - (2.0 * beta - 1.0) * (1.0 / r1 + 1.0 / r2));
    Ok(OracleReport {
        geometry: "two-spheres".into(),
        lines: vec![
            OracleLine::new("leading 2*pi*lambda*R1*R2/(R1+R2)", c[0] * scale, 2.0 * PI * lambda * r_eff),
            OracleLine::new("log coefficient", c[1], log_closed),
        ],
        cutoff_sensitivity: ((c_half[1] - c[1]) / c[1]).abs(),
    })
}

/// Cylinder of radius `r` facing a plate, per unit length.
pub fn cylinder(r: f64, lambda: f64, beta: f64, cfg: &OracleConfig) -> Result<OracleReport> {
    validate(cfg)?;
    let kind = ProfileKind::Cylinder { radius: r, length: 1.0 };
    let c = fitted(kind, r, lambda, beta, cfg.cutoff, cfg)?;
    let c_half = fitted(kind, r, lambda, beta, 0.5 * cfg.cutoff, cfg)?;
    // V = c₀ x^{-3/2} + c₁ x^{-1/2} + …; the bracket is 1 + (c₁/c₀)(d/R).
    Ok(OracleReport {
        geometry: "cylinder-plate".into(),
        lines: vec![
            OracleLine::new("leading pi*sqrt(R)*lambda/sqrt(2)", c[0] * r.powf(1.5), PI * r.sqrt() * lambda / 2f64.sqrt()),
            OracleLine::new("linear 2*beta-3/4", c[1] / c[0], 2.0 * beta - 0.75),
        ],
        cutoff_sensitivity: ((c_half[1] / c_half[0] - c[1] / c[0]) / (c[1] / c[0])).abs(),
    })
}

/// Flat profile: the proximity integral is exact.
pub fn flat(area: f64, gap: f64, lambda: f64) -> Result<OracleReport> {
    let profile = HeightProfile::new(ProfileKind::Flat { area }, gap)?;
    let v = pta(&profile, |s| lambda / (s * s), &GeometryConfig::default())?;
    Ok(OracleReport {
        geometry: "flat".into(),
        lines: vec![OracleLine::new("A*lambda/d^2", v, area * lambda / (gap * gap))],
        cutoff_sensitivity: 0.0,
    })
}

/// Largest relative difference between a two-sphere profile with
/// `r2 = ratio·r1` and a single sphere over the ladder.
pub fn two_spheres_vs_sphere(r1: f64, ratio: f64, lambda: f64, beta: f64, cfg: &OracleConfig) -> Result<OracleReport> {
    validate(cfg)?;
    let xs = geometric_ladder(cfg.x_min, cfg.x_max, cfg.points);
    let coeffs = GradientCoefficients::new(beta);
    let diffs = ladder(&xs, |x| {
        let d = x * r1;
        let one = HeightProfile::new(ProfileKind::Sphere { radius: r1 }, d)?;
        let two = HeightProfile::new(ProfileKind::TwoSpheresEffective { r1, r2: ratio * r1 }, d)?;
        let a = gradient_expansion(&one, lambda, coeffs, cfg.cutoff, &cfg.geometry)?;
        let b = gradient_expansion(&two, lambda, coeffs, cfg.cutoff, &cfg.geometry)?;
        Ok((b - a).abs() / a.abs())
    })?;
    let worst = diffs.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    Ok(OracleReport {
        geometry: format!("two-spheres R2/R1={ratio:e} vs sphere"),
        lines: vec![OracleLine::new("max relative difference", worst, 0.0)],
        cutoff_sensitivity: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_coefficients_recovered() {
        for beta in [0.774, 0.206, -3.026] {
            let rep = sphere(1e-5, 2.0, beta, &OracleConfig::default()).unwrap();
            assert!(rep.max_rel_error() < 0.02, "{rep:?}");
        }
    }

    #[test]
    fn sphere_pta_limit() {
        let rep = sphere(1.0, 1.0, 0.0, &OracleConfig::default()).unwrap();
        assert!(rep.max_rel_error() < 1e-3, "{rep:?}");
    }

    #[test]
    fn cylinder_pta_limit() {
        let rep = cylinder(1.0, 1.0, 0.0, &OracleConfig::default()).unwrap();
        assert!(rep.max_rel_error() < 1e-3, "{rep:?}");
    }

    #[test]
    fn flat_is_exact() {
        let rep = flat(3.0, 1e-8, 0.4).unwrap();
        assert!(rep.max_rel_error() < 1e-15);
    }

    #[test]
    fn bad_ladder_rejected() {
        let cfg = OracleConfig {
            x_min: 1e-2,
            x_max: 1e-4,
            ..Default::default()
        };
        assert!(sphere(1.0, 1.0, 0.5, &cfg).is_err());
    }
}
