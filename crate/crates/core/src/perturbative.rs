//! Matching a second-order perturbative kernel to the gradient expansion:
//! the `k²` coefficient of `α₂(k; d)` divided by `h_pp(d)` is `β_ω`.

use nalgebra::{DMatrix, DVector};

use crate::csv::read_numeric;
use crate::error::{Error, Result};

/// Response of the plate transfer to a small height profile `s(x)`:
/// `h[d + s] = α₀(d) + α₁(d) s̃(0) + ∫ d²k/(2π)² α₂(k; d) |s̃(k)|²`.
///
/// `alpha2` must be even in `k`; it is called with signed `k` so that odd
/// content can be detected.
pub trait PerturbativeKernel: Sync {
    fn alpha0(&self, d: f64) -> f64;
    fn alpha1(&self, d: f64) -> f64;
    fn alpha2(&self, k: f64, d: f64) -> f64;
}

/// Result of the small-`k` fit `α₂ = a + b k² + c k⁴`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct K2Estimate {
    /// `α₂⁽²⁾(d)`, the `k²` coefficient.
    pub value: f64,
    /// Standard error of `value` from the fit residual.
    pub error: f64,
    /// RMS fit residual relative to `max |α₂|`.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct K2Options {
    /// Probe wavevectors in rad/m; `None` selects 8 points geometric in
    /// `[10⁻³, 10⁻¹]/d`.
    pub k_probe: Option<Vec<f64>>,
    /// Largest accepted relative residual.
    pub max_residual: f64,
}

impl Default for K2Options {
    fn default() -> Self {
        Self {
            k_probe: None,
            max_residual: 1e-8,
        }
    }
}

pub fn default_k_ladder(d: f64) -> Vec<f64> {
    (0..8).map(|i| 1e-3 / d * 100f64.powf(i as f64 / 7.0)).collect()
}

/// Fits `{1, k², k⁴}` to samples `(k, α₂)`.
pub fn fit_k2(ks: &[f64], values: &[f64], max_residual: f64) -> Result<K2Estimate> {
    if ks.len() != values.len() || ks.len() < 4 {
        return Err(Error::Fit(format!("need at least 4 kernel samples, got {}", ks.len())));
    }
    let k_max = ks.iter().fold(0.0f64, |m, k| m.max(k.abs()));
    if k_max == 0.0 {
        return Err(Error::Fit("all probe wavevectors are zero".into()));
    }
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if scale > 0.0 { scale } else { 1.0 };
    // u = (k/k_max)² keeps the design matrix well conditioned.
    let us: Vec<f64> = ks.iter().map(|k| (k / k_max).powi(2)).collect();
    let n = us.len();
    let a = DMatrix::from_fn(n, 3, |i, j| us[i].powi(j as i32));
    let b = DVector::from_iterator(n, values.iter().map(|v| v / scale));
    let svd = a.clone().svd(true, true);
    if svd.singular_values.min() <= 1e-12 * svd.singular_values.max() {
        return Err(Error::Fit("probe wavevectors do not resolve k² and k⁴".into()));
    }
    let x = svd.solve(&b, 0.0).map_err(|e| Error::Fit(e.to_string()))?;
    let r = &b - &a * &x;
    let rss = r.norm_squared();
    let residual = (rss / n as f64).sqrt();
    if residual > max_residual {
        return Err(Error::Fit(format!(
            "kernel not quadratic at probed k (relative residual {residual:.3e})"
        )));
    }
    let dof = (n as f64 - 3.0).max(1.0);
    let cov = (a.transpose() * &a)
        .try_inverse()
        .ok_or_else(|| Error::Fit("singular normal matrix".into()))?;
    let stderr = (rss / dof * cov[(1, 1)]).sqrt();
    let k2 = k_max * k_max;
    Ok(K2Estimate {
        value: x[1] * scale / k2,
        error: stderr * scale / k2,
        residual,
    })
}

/// `α₂⁽²⁾(d)` from a kernel.
pub fn extract_k2(kernel: &dyn PerturbativeKernel, d: f64, opts: &K2Options) -> Result<K2Estimate> {
    if !(d > 0.0) {
        return Err(Error::Domain(format!("separation must be positive, got {d}")));
    }
    let ks = opts.k_probe.clone().unwrap_or_else(|| default_k_ladder(d));
    let values: Vec<f64> = ks.iter().map(|&k| kernel.alpha2(k, d)).collect();
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (&k, &v) in ks.iter().zip(&values) {
        let mirrored = kernel.alpha2(-k, d);
        if (v - mirrored).abs() > 1e-10 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Domain(format!(
                "kernel has odd-in-k content: alpha2({k:e}) != alpha2({:e})",
                -k
            )));
        }
    }
    fit_k2(&ks, &values, opts.max_residual)
}

/// `β_ω = α₂⁽²⁾(d)/h_pp(d)` at a single separation.
pub fn beta_at(kernel: &dyn PerturbativeKernel, d: f64, h_pp_at_d: f64, opts: &K2Options) -> Result<f64> {
    if !(h_pp_at_d > 0.0) {
        return Err(Error::Domain(format!("h_pp must be positive, got {h_pp_at_d}")));
    }
    Ok(extract_k2(kernel, d, opts)?.value / h_pp_at_d)
}

/// `β_ω` at `d`, cross-checked at `4d`; the two must agree to `rel_tol`
/// for `d` inside the scaling regime.
pub fn beta_from_kernel<H>(kernel: &dyn PerturbativeKernel, d: f64, h_pp: H, rel_tol: f64, opts: &K2Options) -> Result<f64>
where
    H: Fn(f64) -> f64,
{
    let near = beta_at(kernel, d, h_pp(d), opts)?;
    let far_d = 4.0 * d;
    let far = beta_at(kernel, far_d, h_pp(far_d), opts)?;
    let spread = (near - far).abs();
    if spread > rel_tol * near.abs().max(far.abs()) && spread > f64::EPSILON {
        return Err(Error::Numerical(format!(
            "outside scaling regime: beta={near} at d={d:e}, {far} at d={far_d:e}"
        )));
    }
    Ok(near)
}

/// `|α₁(d) − ∂α₀/∂d| / |∂α₀/∂d|` with a central difference of step
/// `rel_step·d`.
pub fn consistency_alpha1(kernel: &dyn PerturbativeKernel, d: f64, rel_step: f64) -> Result<f64> {
    if !(d > 0.0 && rel_step > 0.0 && rel_step < 1.0) {
        return Err(Error::Domain("need d > 0 and 0 < rel_step < 1".into()));
    }
    let h = rel_step * d;
    let deriv = (kernel.alpha0(d + h) - kernel.alpha0(d - h)) / (2.0 * h);
    if deriv == 0.0 {
        return Err(Error::Numerical("alpha0 has zero slope".into()));
    }
    Ok(((kernel.alpha1(d) - deriv) / deriv).abs())
}

/// Externally computed `α₂(k)` samples at a fixed separation.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedKernel {
    pub d: f64,
    pub k: Vec<f64>,
    pub alpha2: Vec<f64>,
}

impl TabulatedKernel {
    /// Reads CSV `k_rad_per_m,alpha2`.
    pub fn parse_csv(text: &str, d: f64) -> Result<Self> {
        let rows = read_numeric(text, &["k_rad_per_m", "alpha2"])?;
        Ok(Self {
            d,
            k: rows.iter().map(|r| r[0]).collect(),
            alpha2: rows.iter().map(|r| r[1]).collect(),
        })
    }

    pub fn extract_k2(&self, max_residual: f64) -> Result<K2Estimate> {
        for (i, &k) in self.k.iter().enumerate() {
            if let Some(j) = self.k.iter().position(|&q| q == -k && q != 0.0) {
                let (a, b) = (self.alpha2[i], self.alpha2[j]);
                if (a - b).abs() > 1e-10 * a.abs().max(b.abs()) {
                    return Err(Error::Domain(format!("kernel has odd-in-k content at k={k:e}")));
                }
            }
        }
        fit_k2(&self.k, &self.alpha2, max_residual)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `α₀ = λ/d²` with `α₂ = 6λ/d⁴ + βλk²/d² + c₄λk⁴`.
    struct Synthetic {
        lambda: f64,
        beta: f64,
        c4: f64,
        alpha1_scale: f64,
    }

    impl PerturbativeKernel for Synthetic {
        fn alpha0(&self, d: f64) -> f64 {
            self.lambda / (d * d)
        }
        fn alpha1(&self, d: f64) -> f64 {
            -2.0 * self.alpha1_scale * self.lambda / (d * d * d)
        }
        fn alpha2(&self, k: f64, d: f64) -> f64 {
            self.lambda * (6.0 / d.powi(4) + self.beta * k * k / (d * d) + self.c4 * k.powi(4))
        }
    }

    fn kernel(beta: f64, c4: f64) -> Synthetic {
        Synthetic {
            lambda: 3e-20,
            beta,
            c4,
            alpha1_scale: 1.0,
        }
    }

    struct Odd;
    impl PerturbativeKernel for Odd {
        fn alpha0(&self, _: f64) -> f64 {
            1.0
        }
        fn alpha1(&self, _: f64) -> f64 {
            0.0
        }
        fn alpha2(&self, k: f64, _: f64) -> f64 {
            1.0 + 1e-3 * k
        }
    }

    struct Steep;
    impl PerturbativeKernel for Steep {
        fn alpha0(&self, _: f64) -> f64 {
            1.0
        }
        fn alpha1(&self, _: f64) -> f64 {
            0.0
        }
        fn alpha2(&self, k: f64, d: f64) -> f64 {
            (-(k * d * 30.0).powi(2)).exp()
        }
    }

    #[test]
    fn exact_quadratic_kernel() {
        let d = 1e-8;
        let est = extract_k2(&kernel(0.774, 0.0), d, &K2Options::default()).unwrap();
        let want = 0.774 * 3e-20 / (d * d);
        assert!(((est.value - want) / want).abs() < 1e-9, "{est:?}");
    }

    #[test]
    fn quartic_term_is_separated() {
        let d = 1e-8;
        let k_max = 1e-1 / d;
        let b = 0.206 / (d * d);
        let c4 = 1e-3 * b / (k_max * k_max);
        let est = extract_k2(&kernel(0.206, c4), d, &K2Options::default()).unwrap();
        let want = 0.206 * 3e-20 / (d * d);
        assert!(((est.value - want) / want).abs() < 1e-3);
    }

    #[test]
    fn constant_kernel_gives_zero() {
        let d = 1e-8;
        let est = extract_k2(&kernel(0.0, 0.0), d, &K2Options::default()).unwrap();
        let scale = 6.0 * 3e-20 / d.powi(4) / (1e-1 / d).powi(2);
        assert!(est.value.abs() < 1e-12 * scale);
    }

    #[test]
    fn odd_content_rejected() {
        let err = extract_k2(&Odd, 1e-8, &K2Options::default()).unwrap_err();
        assert!(err.to_string().contains("odd-in-k"));
    }

    #[test]
    fn non_quadratic_kernel_rejected() {
        let err = extract_k2(&Steep, 1e-8, &K2Options::default()).unwrap_err();
        assert!(err.to_string().contains("not quadratic"), "{err}");
    }

    #[test]
    fn beta_trivial_values() {
        let d = 2e-8;
        let h = |d: f64| 3e-20 / (d * d);
        assert_eq!(beta_from_kernel(&kernel(0.0, 0.0), d, h, 1e-2, &K2Options::default()).unwrap().abs() < 1e-10, true);
        let one = beta_from_kernel(&kernel(1.0, 0.0), d, h, 1e-2, &K2Options::default()).unwrap();
        assert!((one - 1.0).abs() < 1e-9);
    }

    #[test]
    fn beta_is_separation_independent() {
        let h = |d: f64| 3e-20 / (d * d);
        for d in [1e-9, 4e-9, 1.6e-8] {
            let beta = beta_from_kernel(&kernel(0.774, 0.0), d, h, 1e-2, &K2Options::default()).unwrap();
            assert!((beta - 0.774).abs() < 1e-8);
        }
    }

    #[test]
    fn scaling_violation_detected() {
        // Wrong h_pp scaling makes β drift with d.
        let h = |d: f64| 3e-20 / d;
        let err = beta_from_kernel(&kernel(0.774, 0.0), 1e-8, h, 1e-2, &K2Options::default()).unwrap_err();
        assert!(err.to_string().contains("scaling regime"));
    }

    #[test]
    fn alpha1_consistency() {
        let good = kernel(0.5, 0.0);
        assert!(consistency_alpha1(&good, 1e-8, 1e-4).unwrap() <= 1e-6);
        let bad = Synthetic {
            alpha1_scale: 0.3,
            ..kernel(0.5, 0.0)
        };
        assert!(consistency_alpha1(&bad, 1e-8, 1e-4).unwrap() > 0.5);
    }

    #[test]
    fn alpha1_residual_is_second_order_in_step() {
        let k = kernel(0.5, 0.0);
        let r1 = consistency_alpha1(&k, 1e-8, 2e-2).unwrap();
        let r2 = consistency_alpha1(&k, 1e-8, 1e-2).unwrap();
        assert!((r1 / r2 - 4.0).abs() < 0.05, "{}", r1 / r2);
    }

    #[test]
    fn tabulated_kernel_from_csv() {
        let d = 1e-8;
        let k = kernel(-0.086, 0.0);
        let mut text = String::from("k_rad_per_m,alpha2\n");
        for q in default_k_ladder(d) {
            text.push_str(&format!("{q:e},{:e}\n", k.alpha2(q, d)));
        }
        let tab = TabulatedKernel::parse_csv(&text, d).unwrap();
        let est = tab.extract_k2(1e-8).unwrap();
        let want = -0.086 * 3e-20 / (d * d);
        assert!(((est.value - want) / want).abs() < 1e-6);
        let err = TabulatedKernel::parse_csv("k_rad_per_m,alpha2\n1,2\nx,3\n", d).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }
}
