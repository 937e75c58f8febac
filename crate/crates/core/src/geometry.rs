//! Gap profiles `S(x)` and brute-force quadrature of the proximity transfer
//! and its first gradient correction.
//!
//! Axisymmetric profiles are integrated in `t = ρ²` (so `d²x = π dt`); the
//! cylinder is integrated per unit length along the single curved direction.
//! These quadratures serve as the independent check of the closed forms in
//! [`crate::asymptotics`].

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::Integrator;

/// Shape of the curved body facing the plate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileKind {
    Sphere { radius: f64 },
    /// Two spheres facing each other; the gap is the sum of both sagittas.
    TwoSpheresEffective { r1: f64, r2: f64 },
    /// Cylinder of radius `radius` and length `length` with its axis parallel
    /// to the plate. Integrals are returned per unit length.
    Cylinder { radius: f64, length: f64 },
    /// `S = d + ρ²/(2 R_curv)` over the disc `ρ ≤ R_curv`.
    Paraboloid { r_curv: f64 },
    Flat { area: f64 },
}

/// Gap profile with closest approach `gap` at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeightProfile {
    pub kind: ProfileKind,
    pub gap: f64,
}

fn sagitta(r: f64, rho: f64) -> f64 {
    // r − √(r² − ρ²) written without cancellation.
    let rho2 = rho * rho;
    rho2 / (r + (r * r - rho2).max(0.0).sqrt())
}

fn slope(r: f64, rho: f64) -> f64 {
    rho / (r * r - rho * rho).sqrt()
}

impl HeightProfile {
    pub fn new(kind: ProfileKind, gap: f64) -> Result<Self> {
        if !(gap > 0.0 && gap.is_finite()) {
            return Err(Error::Domain(format!("gap must be positive, got {gap}")));
        }
        let ok = match kind {
            ProfileKind::Sphere { radius } => radius > 0.0,
            ProfileKind::TwoSpheresEffective { r1, r2 } => r1 > 0.0 && r2 > 0.0,
            ProfileKind::Cylinder { radius, length } => radius > 0.0 && length > 0.0,
            ProfileKind::Paraboloid { r_curv } => r_curv > 0.0,
            ProfileKind::Flat { area } => area > 0.0,
        };
        if !ok {
            return Err(Error::Domain(format!("profile dimensions must be positive: {kind:?}")));
        }
        Ok(Self { kind, gap })
    }

    pub fn with_gap(&self, gap: f64) -> Result<Self> {
        Self::new(self.kind, gap)
    }

    /// Outer radius (or half-width for the cylinder) of the projected domain.
    /// `None` for the flat profile, which has no curved boundary.
    pub fn domain_radius(&self) -> Option<f64> {
        match self.kind {
            ProfileKind::Sphere { radius } => Some(radius),
            ProfileKind::TwoSpheresEffective { r1, r2 } => Some(r1.min(r2)),
            ProfileKind::Cylinder { radius, .. } => Some(radius),
            ProfileKind::Paraboloid { r_curv } => Some(r_curv),
            ProfileKind::Flat { .. } => None,
        }
    }

    /// Effective radius of curvature at the closest point, `R_eff⁻¹ = Σ 1/R_i`.
    pub fn effective_radius(&self) -> Option<f64> {
        match self.kind {
            ProfileKind::Sphere { radius } | ProfileKind::Cylinder { radius, .. } => Some(radius),
            ProfileKind::TwoSpheresEffective { r1, r2 } => Some(r1 * r2 / (r1 + r2)),
            ProfileKind::Paraboloid { r_curv } => Some(r_curv),
            ProfileKind::Flat { .. } => None,
        }
    }

    /// Gap `S` at distance `rho` from the closest point (for the cylinder,
    /// `rho` is the coordinate across the axis).
    pub fn height(&self, rho: f64) -> f64 {
        let d = self.gap;
        match self.kind {
            ProfileKind::Sphere { radius } | ProfileKind::Cylinder { radius, .. } => d + sagitta(radius, rho),
            ProfileKind::TwoSpheresEffective { r1, r2 } => d + sagitta(r1, rho) + sagitta(r2, rho),
            ProfileKind::Paraboloid { r_curv } => d + rho * rho / (2.0 * r_curv),
            ProfileKind::Flat { .. } => d,
        }
    }

    /// `|∇S|` at `rho`.
    pub fn gradient(&self, rho: f64) -> f64 {
        match self.kind {
            ProfileKind::Sphere { radius } | ProfileKind::Cylinder { radius, .. } => slope(radius, rho),
            ProfileKind::TwoSpheresEffective { r1, r2 } => slope(r1, rho) + slope(r2, rho),
            ProfileKind::Paraboloid { r_curv } => rho / r_curv,
            ProfileKind::Flat { .. } => 0.0,
        }
    }

    /// Slopes of the two individual surfaces, `(|∇s₁|, |∇s₂|)`, where body 1
    /// is the lower one. Single curved bodies report `(0, |∇S|)`.
    pub fn surface_slopes(&self, rho: f64) -> (f64, f64) {
        match self.kind {
            ProfileKind::TwoSpheresEffective { r1, r2 } => (slope(r1, rho), slope(r2, rho)),
            _ => (0.0, self.gradient(rho)),
        }
    }
}

/// Quadrature settings for profile integrals.
#[derive(Debug, Clone, Copy)]
pub struct GeometryConfig {
    pub rel_tol: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-12 }
    }
}

/// Panel boundaries in the radial variable `x` (either `ρ` or `t = ρ²`)
/// covering `[0, x_max]`, refined around the contact scale `x_c` and
/// towards the outer edge.
fn radial_panels(x_c: f64, x_max: f64) -> Vec<f64> {
    let mut pts = vec![0.0, x_max];
    let mut x = x_c / 8.0;
    while x < x_max {
        pts.push(x);
        x *= 4.0;
    }
    for k in 1..12 {
        let edge = x_max * (1.0 - 4f64.powi(-k));
        if edge > 0.0 {
            pts.push(edge);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts.retain(|p| *p >= 0.0 && *p <= x_max);
    pts
}

/// Integrates `density(ρ)` over the projected domain up to `rho_max`:
/// `∫ 2πρ dρ` (via `t = ρ²`) for axisymmetric profiles, `∫ dx` over
/// `|x| ≤ rho_max` for the cylinder.
fn integrate_domain<F>(profile: &HeightProfile, rho_max: f64, density: F, cfg: &GeometryConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let integrator = Integrator::with_rel_tol(cfg.rel_tol);
    let r_eff = profile
        .effective_radius()
        .ok_or_else(|| Error::Domain("profile has no curvature".into()))?;
    let contact = (2.0 * r_eff * profile.gap).sqrt();
    match profile.kind {
        ProfileKind::Cylinder { .. } => {
            let pts = radial_panels(contact, rho_max);
            let est = integrator.integrate_vec(|x| [density(x)], &pts)?;
            Ok(2.0 * est.value[0])
        }
        _ => {
            let t_max = rho_max * rho_max;
            let pts = radial_panels(contact * contact, t_max);
            let est = integrator.integrate_vec(|t| [density(t.sqrt())], &pts)?;
            Ok(PI * est.value[0])
        }
    }
}

/// Proximity transfer `∫_Σ d²x h(S(x))` of the plate model `h_model`.
/// Cylinder results are per unit length.
pub fn pta<F>(profile: &HeightProfile, h_model: F, cfg: &GeometryConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if let ProfileKind::Flat { area } = profile.kind {
        return Ok(area * h_model(profile.gap));
    }
    let rho_max = profile
        .domain_radius()
        .ok_or_else(|| Error::Domain("empty projected domain".into()))?;
    integrate_domain(profile, rho_max, |rho| h_model(profile.height(rho)), cfg)
}

/// Gradient correction with its dependence on the rim cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientCorrection {
    pub value: f64,
    /// Change of `value` when the cutoff is halved. Asymptotically
    /// independent of the gap, so it only shifts the `O(d⁰)` constant.
    pub cutoff_shift: f64,
}

/// Two-surface gradient coefficients. For a single curved body only
/// `beta` enters; for two curved surfaces the functional is
/// `β(|∇H₁|² + |∇H₂|²) + β_× ∇H₁·∇H₂` with heights measured along +z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientCoefficients {
    pub beta: f64,
    pub beta_cross: f64,
}

impl GradientCoefficients {
    /// Cross coefficient `β_× = 2 − 2β`, the choice reproduced by the
    /// two-sphere closed form.
    pub fn new(beta: f64) -> Self {
        Self {
            beta,
            beta_cross: 2.0 - 2.0 * beta,
        }
    }
}

fn gradient_density(profile: &HeightProfile, coeffs: GradientCoefficients, rho: f64) -> f64 {
    match profile.kind {
        ProfileKind::TwoSpheresEffective { .. } => {
            // Lower surface H₁ = −s₁ slopes downwards: ∇H₁·∇H₂ = −|∇s₁||∇s₂|.
            let (g1, g2) = profile.surface_slopes(rho);
            coeffs.beta * (g1 * g1 + g2 * g2) - coeffs.beta_cross * g1 * g2
        }
        _ => {
            let g = profile.gradient(rho);
            coeffs.beta * g * g
        }
    }
}

/// `∫ d²x λ_ω [β|∇S|² (+ cross term)] / S²` over `|x| ≤ R(1 − cutoff)`.
pub fn gradient_correction(
    profile: &HeightProfile,
    lambda_w: f64,
    coeffs: GradientCoefficients,
    cutoff: f64,
    cfg: &GeometryConfig,
) -> Result<GradientCorrection> {
    if !(cutoff > 0.0 && cutoff < 1.0) {
        return Err(Error::Domain(format!("cutoff must lie in (0, 1), got {cutoff}")));
    }
    let Some(radius) = profile.domain_radius() else {
        return Ok(GradientCorrection {
            value: 0.0,
            cutoff_shift: 0.0,
        });
    };
    let single_curved = !matches!(profile.kind, ProfileKind::TwoSpheresEffective { .. });
    if coeffs.beta == 0.0 && single_curved {
        return Ok(GradientCorrection {
            value: 0.0,
            cutoff_shift: 0.0,
        });
    }
    let eval = |c: f64| {
        integrate_domain(
            profile,
            radius * (1.0 - c),
            |rho| {
                let s = profile.height(rho);
                lambda_w * gradient_density(profile, coeffs, rho) / (s * s)
            },
            cfg,
        )
    };
    let value = eval(cutoff)?;
    let halved = eval(0.5 * cutoff)?;
    Ok(GradientCorrection {
        value,
        cutoff_shift: halved - value,
    })
}

/// Proximity transfer plus gradient correction for `h_pp = λ_ω/S²`.
pub fn gradient_expansion(
    profile: &HeightProfile,
    lambda_w: f64,
    coeffs: GradientCoefficients,
    cutoff: f64,
    cfg: &GeometryConfig,
) -> Result<f64> {
    let base = pta(profile, |s| lambda_w / (s * s), cfg)?;
    let corr = gradient_correction(profile, lambda_w, coeffs, cutoff, cfg)?;
    Ok(base + corr.value)
}

/// Evaluates `f` at each gap of a ladder in parallel, keeping order.
pub fn ladder<F>(gaps: &[f64], f: F) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    gaps.par_iter().map(|&d| f(d).map(|v| (d, v))).collect()
}

/// `n` gaps geometrically spaced over `[lo, hi]`.
pub fn geometric_ladder(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1).max(1) as f64))
        .collect()
}

/// Basis functions of the scaled gap `x = d/R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    InvX,
    LogX,
    One,
    XLogX,
    X,
    /// `x^{k/2}` for a half-integer power.
    HalfPower(i32),
}

impl Basis {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Basis::InvX => 1.0 / x,
            Basis::LogX => x.ln(),
            Basis::One => 1.0,
            Basis::XLogX => x * x.ln(),
            Basis::X => x,
            Basis::HalfPower(k) => x.powf(0.5 * k as f64),
        }
    }
}

/// Expansion bases used to read leading and subleading coefficients off a
/// gap ladder.
pub fn sphere_basis() -> Vec<Basis> {
    vec![Basis::InvX, Basis::LogX, Basis::One, Basis::XLogX, Basis::X]
}

pub fn cylinder_basis() -> Vec<Basis> {
    vec![
        Basis::HalfPower(-3),
        Basis::HalfPower(-1),
        Basis::One,
        Basis::HalfPower(1),
        Basis::X,
    ]
}

/// Least-squares fit of `values` against `basis(x)` with rows scaled by the
/// leading basis function (relative residuals).
pub fn fit_expansion(xs: &[f64], values: &[f64], basis: &[Basis]) -> Result<Vec<f64>> {
    if xs.len() != values.len() || xs.len() < basis.len() {
        return Err(Error::Fit(format!(
            "need at least {} ladder points, got {}",
            basis.len(),
            xs.len()
        )));
    }
    let lead = basis[0];
    let a = DMatrix::from_fn(xs.len(), basis.len(), |i, j| basis[j].eval(xs[i]) / lead.eval(xs[i]));
    let b = DVector::from_iterator(xs.len(), xs.iter().zip(values).map(|(x, v)| v / lead.eval(*x)));
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= 1e-14 * smax {
        return Err(Error::Fit("ladder too narrow: design matrix is rank deficient".into()));
    }
    let sol = svd.solve(&b, 0.0).map_err(|e| Error::Fit(e.to_string()))?;
    Ok(sol.iter().copied().collect())
}
