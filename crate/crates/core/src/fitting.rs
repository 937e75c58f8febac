//! Recovering `β_ω` (and optionally a next-order `γ`) from sphere–plate
//! derivative data `h′(d)`.
//!
//! Data are divided by the leading term `−2πRλ_ω/d²`, which leaves the
//! bracket `1 + (2β − 1)x + γ x² ln x` with `x = d/R`, linear in the
//! parameters.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::csv::Table;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub beta: f64,
    pub gamma: Option<f64>,
    /// RMS residual of the normalized bracket.
    pub residual_rms: f64,
    pub stderr_beta: f64,
    pub stderr_gamma: Option<f64>,
    pub n_points: usize,
    pub warnings: Vec<String>,
}

/// Fits `h′(d) = −(2πRλ/d²)[1 + (2β − 1)(d/R) + γ (d/R)² ln(d/R)]` to
/// `(d, h′)` samples.
pub fn fit_beta(points: &[(f64, f64)], r: f64, lambda_w: f64, include_gamma: bool) -> Result<FitResult> {
    if !(r > 0.0 && lambda_w.is_finite() && lambda_w != 0.0) {
        return Err(Error::Domain("need R > 0 and a nonzero lambda".into()));
    }
    let min_points = if include_gamma { 6 } else { 4 };
    if points.len() < min_points {
        return Err(Error::Fit(format!(
            "need at least {min_points} points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|(d, v)| !(*d > 0.0 && d.is_finite() && v.is_finite())) {
        return Err(Error::Domain("fit data need finite values and d > 0".into()));
    }
    let mut distinct: Vec<f64> = points.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < min_points {
        return Err(Error::Fit("d-range too narrow: rank-deficient design matrix".into()));
    }

    let mut warnings = Vec::new();
    let n = points.len();
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for &(d, hp) in points {
        let bracket = hp / (-2.0 * PI * r * lambda_w / (d * d));
        if bracket < 0.0 {
            warnings.push(format!("negative normalized data at d={d:e}"));
        }
        xs.push(d / r);
        ys.push(bracket - 1.0);
    }
    let p = if include_gamma { 2 } else { 1 };
    let a = DMatrix::from_fn(n, p, |i, j| if j == 0 { xs[i] } else { xs[i] * xs[i] * xs[i].ln() });
    let b = DVector::from_vec(ys);
    let svd = a.clone().svd(true, true);
    if svd.singular_values.min() <= 1e-10 * svd.singular_values.max() {
        return Err(Error::Fit("d-range too narrow: rank-deficient design matrix".into()));
    }
    let sol = svd.solve(&b, 0.0).map_err(|e| Error::Fit(e.to_string()))?;
    let resid = &b - &a * &sol;
    let rss = resid.norm_squared();
    let dof = (n - p).max(1) as f64;
    let cov = (a.transpose() * &a)
        .try_inverse()
        .ok_or_else(|| Error::Fit("singular normal matrix".into()))?
        * (rss / dof);
    Ok(FitResult {
        beta: 0.5 * (sol[0] + 1.0),
        gamma: include_gamma.then(|| sol[1]),
        residual_rms: (rss / n as f64).sqrt(),
        stderr_beta: 0.5 * cov[(0, 0)].sqrt(),
        stderr_gamma: include_gamma.then(|| cov[(1, 1)].sqrt()),
        n_points: n,
        warnings,
    })
}

/// One frequency's data set for [`fit_batch`].
#[derive(Debug, Clone)]
pub struct FitInput {
    pub omega: f64,
    pub lambda_w: f64,
    pub points: Vec<(f64, f64)>,
}

/// Fits several frequencies concurrently, keeping input order.
pub fn fit_batch(inputs: &[FitInput], r: f64, include_gamma: bool) -> Result<Vec<(f64, FitResult)>> {
    inputs
        .par_iter()
        .map(|inp| fit_beta(&inp.points, r, inp.lambda_w, include_gamma).map(|f| (inp.omega, f)))
        .collect()
}

/// Output table `omega_rad_per_s,beta,gamma,residual_rms,stderr_beta,stderr_gamma`.
/// Without `γ` the two `γ` columns are written as zero.
pub fn results_table(results: &[(f64, FitResult)], include_gamma: bool) -> Table {
    let mut t = Table::new(["omega_rad_per_s", "beta", "gamma", "residual_rms", "stderr_beta", "stderr_gamma"])
        .meta("include_gamma", include_gamma);
    for (omega, f) in results {
        t.push(vec![
            *omega,
            f.beta,
            f.gamma.unwrap_or(0.0),
            f.residual_rms,
            f.stderr_beta,
            f.stderr_gamma.unwrap_or(0.0),
        ]);
    }
    t
}
