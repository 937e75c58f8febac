//! Closed-form small-gap expansions for sphere–plate, two spheres and
//! cylinder–plate, plus near-field adjusted curves.
//!
//! All functions accept either spectral coefficients (`λ_ω` in
//! W·s/rad) or thermally aggregated ones (`λ` in W); the formulas are the
//! same.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Amplitude `λ`, gradient coefficient `β` and the integration constant
/// `d₀` of the logarithmic terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionCoefficients {
    pub lambda: f64,
    pub beta: f64,
    pub d0: Option<f64>,
}

impl ExpansionCoefficients {
    pub fn new(lambda: f64, beta: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
        }
        if !beta.is_finite() {
            return Err(Error::Domain("beta must be finite".into()));
        }
        Ok(Self { lambda, beta, d0: None })
    }

    pub fn with_d0(mut self, d0: f64) -> Result<Self> {
        if !(d0 > 0.0 && d0.is_finite()) {
            return Err(Error::Domain(format!("d0 must be positive, got {d0}")));
        }
        self.d0 = Some(d0);
        Ok(self)
    }

    fn require_d0(&self) -> Result<f64> {
        self.d0
            .ok_or_else(|| Error::Domain("d0 required for absolute h".into()))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive, got {v}")))
    }
}

/// `(2πRλ/d)[1 − (2β − 1)(d/R) ln(d/d₀)]`.
pub fn sphere_plate_h(d: f64, r: f64, c: &ExpansionCoefficients) -> Result<f64> {
    positive("d", d)?;
    positive("R", r)?;
    let d0 = c.require_d0()?;
    Ok(2.0 * PI * r * c.lambda / d * (1.0 - (2.0 * c.beta - 1.0) * (d / r) * (d / d0).ln()))
}

/// `∂h/∂d = −(2πRλ/d²)[1 + (2β − 1)(d/R)]`; negative, its magnitude is the
/// decay rate `−∂h/∂d`. Independent of `d₀`.
pub fn sphere_plate_h_prime(d: f64, r: f64, c: &ExpansionCoefficients) -> Result<f64> {
    positive("d", d)?;
    positive("R", r)?;
    Ok(-2.0 * PI * r * c.lambda / (d * d) * (1.0 + (2.0 * c.beta - 1.0) * d / r))
}

/// Total sphere–plate transfer from aggregated coefficients.
pub fn sphere_plate_total(d: f64, r: f64, agg: &ExpansionCoefficients) -> Result<f64> {
    sphere_plate_h(d, r, agg)
}

/// Two spheres with a single shared `d₀`:
/// `(2πλ R₁R₂/(R₁+R₂)/d)[1 + (d/(R₁+R₂)) ln(d/d₀) − (2β−1)(d/R₁ + d/R₂) ln(d/d₀)]`.
pub fn two_spheres_total(d: f64, r1: f64, r2: f64, agg: &ExpansionCoefficients) -> Result<f64> {
    positive("d", d)?;
    positive("R1", r1)?;
    positive("R2", r2)?;
    let d0 = agg.require_d0()?;
    let r_eff = r1 * r2 / (r1 + r2);
    let log = (d / d0).ln();
    let bracket = 1.0 + d / (r1 + r2) * log - (2.0 * agg.beta - 1.0) * (d / r1 + d / r2) * log;
    Ok(2.0 * PI * agg.lambda * r_eff / d * bracket)
}

/// Cylinder–plate transfer per unit length,
/// `(π√R λ/(√2 d^{3/2}))[1 + (2β − 3/4)(d/R)]`.
pub fn cylinder_plate_total_per_length(d: f64, r: f64, agg: &ExpansionCoefficients) -> Result<f64> {
    positive("d", d)?;
    positive("R", r)?;
    let lead = PI * r.sqrt() * agg.lambda / (2f64.sqrt() * d.powf(1.5));
    Ok(lead * (1.0 + (2.0 * agg.beta - 0.75) * d / r))
}

/// Closed-form geometries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    SpherePlate { r: f64 },
    TwoSpheres { r1: f64, r2: f64 },
    /// Values are per unit length.
    CylinderPlate { r: f64 },
}

impl Geometry {
    pub fn name(&self) -> &'static str {
        match self {
            Geometry::SpherePlate { .. } => "sphere-plate",
            Geometry::TwoSpheres { .. } => "two-spheres",
            Geometry::CylinderPlate { .. } => "cylinder-plate",
        }
    }

    /// Smallest radius, the length that sets the expansion parameter `d/R`.
    pub fn length_scale(&self) -> f64 {
        match *self {
            Geometry::SpherePlate { r } | Geometry::CylinderPlate { r } => r,
            Geometry::TwoSpheres { r1, r2 } => r1.min(r2),
        }
    }

    /// Absolute transfer; needs `d₀` except for the cylinder.
    pub fn total(&self, d: f64, c: &ExpansionCoefficients) -> Result<f64> {
        match *self {
            Geometry::SpherePlate { r } => sphere_plate_total(d, r, c),
            Geometry::TwoSpheres { r1, r2 } => two_spheres_total(d, r1, r2, c),
            Geometry::CylinderPlate { r } => cylinder_plate_total_per_length(d, r, c),
        }
    }

    /// `H(d) − H(d_ref)` evaluated so that `d₀` never enters.
    pub fn adjusted(&self, d: f64, d_ref: f64, c: &ExpansionCoefficients) -> Result<f64> {
        positive("d", d)?;
        positive("d_ref", d_ref)?;
        let lam = c.lambda;
        let b = 2.0 * c.beta - 1.0;
        match *self {
            Geometry::SpherePlate { r } => {
                positive("R", r)?;
                Ok(2.0 * PI * r * lam * (1.0 / d - 1.0 / d_ref) - 2.0 * PI * lam * b * (d / d_ref).ln())
            }
            Geometry::TwoSpheres { r1, r2 } => {
                positive("R1", r1)?;
                positive("R2", r2)?;
                let r_eff = r1 * r2 / (r1 + r2);
                let log_coeff = 2.0 * PI * lam * r_eff * (1.0 / (r1 + r2) - b * (1.0 / r1 + 1.0 / r2));
                Ok(2.0 * PI * lam * r_eff * (1.0 / d - 1.0 / d_ref) + log_coeff * (d / d_ref).ln())
            }
            Geometry::CylinderPlate { r } => {
                Ok(cylinder_plate_total_per_length(d, r, c)? - cylinder_plate_total_per_length(d_ref, r, c)?)
            }
        }
    }
}

/// Sphere–plate near-field adjusted model,
/// `2πRλ(1/d − 1/d_ref) − 2πλ(2β − 1) ln(d/d_ref)`.
pub fn near_field_adjusted(d: f64, d_ref: f64, r: f64, c: &ExpansionCoefficients) -> Result<f64> {
    Geometry::SpherePlate { r }.adjusted(d, d_ref, c)
}

/// Predicted adjusted PTA-minus-exact deviation `4πβλ ln(d/d_ref)`.
pub fn pta_deviation(d: f64, d_ref: f64, c: &ExpansionCoefficients) -> Result<f64> {
    positive("d", d)?;
    positive("d_ref", d_ref)?;
    Ok(4.0 * PI * c.beta * c.lambda * (d / d_ref).ln())
}

/// Quantity carried by a [`TransferCurve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    H,
    HPrime,
    HTotal,
    HTotalPrime,
    HAdjusted,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::H => "h",
            Quantity::HPrime => "h_prime",
            Quantity::HTotal => "H",
            Quantity::HTotalPrime => "H_prime",
            Quantity::HAdjusted => "H_adjusted",
        }
    }
}

/// Ordered `(d, value)` samples of a transfer quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferCurve {
    pub quantity: Quantity,
    pub geometry: String,
    pub points: Vec<(f64, f64)>,
}

impl TransferCurve {
    pub fn new(quantity: Quantity, geometry: impl Into<String>, points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("empty curve".into()));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::Domain(format!("d must be strictly increasing ({} then {})", w[0].0, w[1].0)));
            }
        }
        if points.iter().any(|(d, v)| !(d.is_finite() && *d > 0.0 && v.is_finite())) {
            return Err(Error::Domain("curve values must be finite with d > 0".into()));
        }
        Ok(Self {
            quantity,
            geometry: geometry.into(),
            points,
        })
    }

    /// Samples `f` on the gaps `ds`.
    pub fn from_model<F>(quantity: Quantity, geometry: impl Into<String>, ds: &[f64], f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let pts = ds.iter().map(|&d| f(d).map(|v| (d, v))).collect::<Result<Vec<_>>>()?;
        Self::new(quantity, geometry, pts)
    }

    /// Value at `d`, exact on nodes; between nodes `d·value` is interpolated
    /// linearly in `ln d`, which is nearly exact for `1/d` curves.
    pub fn value_at(&self, d: f64) -> Result<f64> {
        let (lo, hi) = (self.points[0].0, self.points[self.points.len() - 1].0);
        if !(d >= lo && d <= hi) {
            return Err(Error::Domain(format!("d_ref={d} outside curve range [{lo}, {hi}]")));
        }
        let i = self.points.partition_point(|(x, _)| *x < d);
        let (d1, v1) = self.points[i];
        if d1 == d {
            return Ok(v1);
        }
        let (d0, v0) = self.points[i - 1];
        let t = (d / d0).ln() / (d1 / d0).ln();
        Ok(((1.0 - t) * d0 * v0 + t * d1 * v1) / d)
    }

    /// Subtracts the value at `d_ref` from every point.
    pub fn near_field_adjusted(&self, d_ref: f64) -> Result<Self> {
        let reference = self.value_at(d_ref)?;
        Ok(Self {
            quantity: Quantity::HAdjusted,
            geometry: self.geometry.clone(),
            points: self.points.iter().map(|&(d, v)| (d, v - reference)).collect(),
        })
    }
}
