//! Adaptive Gauss–Kronrod (7/15 point) quadrature on finite intervals.
//!
//! The integrator works on vector-valued integrands so that several
//! channels sharing one expensive evaluation (for example both polarizations
//! of a Fresnel-weighted transmission) are refined together. Convergence is
//! declared per component.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Value and absolute error estimate of an integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<const N: usize> {
    pub value: [f64; N],
    pub error: [f64; N],
}

/// Adaptive integrator configuration.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for Integrator {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 0.0,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn gk15<const N: usize, F>(f: &mut F, a: f64, b: f64) -> Panel<N>
where
    F: FnMut(f64) -> [f64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut samples = [[0.0; N]; 15];
    samples[7] = f(center);
    for j in 0..7 {
        let dx = half * XGK[j];
        samples[j] = f(center - dx);
        samples[14 - j] = f(center + dx);
    }

    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for c in 0..N {
        let fc = samples[7][c];
        let mut kron = WGK[7] * fc;
        let mut gauss = WG[3] * fc;
        let mut res_abs = WGK[7] * fc.abs();
        for j in 0..7 {
            let pair = samples[j][c] + samples[14 - j][c];
            kron += WGK[j] * pair;
            res_abs += WGK[j] * (samples[j][c].abs() + samples[14 - j][c].abs());
            if j % 2 == 1 {
                gauss += WG[j / 2] * pair;
            }
        }
        let mean = 0.5 * kron;
        let mut res_asc = WGK[7] * (fc - mean).abs();
        for j in 0..7 {
            res_asc += WGK[j] * ((samples[j][c] - mean).abs() + (samples[14 - j][c] - mean).abs());
        }
        let scale = half.abs();
        value[c] = kron * half;
        error[c] = rescale_error((kron - gauss) * half, res_abs * scale, res_asc * scale);
    }
    Panel { a, b, value, error }
}

impl Integrator {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    /// Integrates a scalar function over `[a, b]`.
    pub fn integrate<F>(&self, mut f: F, a: f64, b: f64) -> Result<(f64, f64)>
    where
        F: FnMut(f64) -> f64,
    {
        let est = self.integrate_vec(|x| [f(x)], &[a, b])?;
        Ok((est.value[0], est.error[0]))
    }

    /// Integrates a vector-valued function over the piecewise interval given
    /// by `points` (sorted breakpoints, first and last are the limits).
    pub fn integrate_vec<const N: usize, F>(&self, mut f: F, points: &[f64]) -> Result<Estimate<N>>
    where
        F: FnMut(f64) -> [f64; N],
    {
        if points.len() < 2 {
            return Err(Error::Domain("quadrature needs at least two points".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::Domain("non-finite integration limit".into()));
        }
        let mut panels: Vec<Panel<N>> = points
            .windows(2)
            .filter(|w| w[1] != w[0])
            .map(|w| gk15(&mut f, w[0], w[1]))
            .collect();
        if panels.is_empty() {
            return Ok(Estimate {
                value: [0.0; N],
                error: [0.0; N],
            });
        }

        loop {
            let (value, error) = totals(&panels);
            if value.iter().chain(error.iter()).any(|v| !v.is_finite()) {
                return Err(Error::Numerical("integrand produced a non-finite value".into()));
            }
            let tol: [f64; N] = std::array::from_fn(|c| self.abs_tol.max(self.rel_tol * value[c].abs()));
            let worst = (0..N)
                .map(|c| ratio(error[c], tol[c]))
                .fold(0.0_f64, f64::max);
            if worst <= 1.0 {
                return Ok(Estimate { value, error });
            }

            // Bisect the panel contributing most to the worst normalized error.
            let (idx, _) = panels
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let score = (0..N).map(|c| ratio(p.error[c], tol[c])).fold(0.0_f64, f64::max);
                    (i, score)
                })
                .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });

            let p = panels[idx];
            let mid = 0.5 * (p.a + p.b);
            let too_narrow = (p.b - p.a).abs() <= 4.0 * f64::EPSILON * p.a.abs().max(p.b.abs()).max(f64::MIN_POSITIVE);
            if panels.len() >= self.max_intervals || too_narrow {
                let achieved = (0..N)
                    .map(|c| error[c] / value[c].abs().max(f64::MIN_POSITIVE))
                    .fold(0.0_f64, f64::max);
                return Err(Error::Quadrature {
                    achieved,
                    requested: self.rel_tol,
                });
            }
            let left = gk15(&mut f, p.a, mid);
            let right = gk15(&mut f, mid, p.b);
            panels[idx] = left;
            panels.push(right);
        }
    }
}

fn ratio(err: f64, tol: f64) -> f64 {
    if tol > 0.0 {
        err / tol
    } else if err > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

fn totals<const N: usize>(panels: &[Panel<N>]) -> ([f64; N], [f64; N]) {
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for p in panels {
        for c in 0..N {
            value[c] += p.value[c];
            error[c] += p.error[c];
        }
    }
    (value, error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let (v, _) = Integrator::default().integrate(|x| x.powi(5) - 3.0 * x * x, 0.0, 2.0).unwrap();
        assert!((v - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_exponential() {
        let (v, _) = Integrator::with_rel_tol(1e-10)
            .integrate(|x| (-x).exp() * (20.0 * x).cos(), 0.0, 10.0)
            .unwrap();
        // ∫ e^{-x} cos(20x) = [e^{-x}(20 sin 20x − cos 20x)]/401
        let exact = |x: f64| (-x).exp() * (20.0 * (20.0 * x).sin() - (20.0 * x).cos()) / 401.0;
        assert!((v - (exact(10.0) - exact(0.0))).abs() < 1e-12);
    }

    #[test]
    fn sharp_peak_converges() {
        let g = 1e-4;
        let (v, _) = Integrator::with_rel_tol(1e-10)
            .integrate(|x| g / ((x - 0.3).powi(2) + g * g), 0.0, 1.0)
            .unwrap();
        let exact = (0.7 / g).atan() + (0.3 / g).atan();
        assert!((v - exact).abs() / exact < 1e-9);
    }

    #[test]
    fn vector_components_converge_independently() {
        let est = Integrator::with_rel_tol(1e-10)
            .integrate_vec(|x| [x.sin(), 1e-20 * x.cos()], &[0.0, PI / 2.0])
            .unwrap();
        assert!((est.value[0] - 1.0).abs() < 1e-12);
        assert!((est.value[1] - 1e-20).abs() < 1e-31);
    }

    #[test]
    fn breakpoints_are_respected() {
        let est = Integrator::default()
            .integrate_vec(|x| [if x < 1.0 { 1.0 } else { 2.0 }], &[0.0, 1.0, 3.0])
            .unwrap();
        assert!((est.value[0] - 5.0).abs() < 1e-14);
    }

    #[test]
    fn non_convergence_reports_achieved_tolerance() {
        let integrator = Integrator {
            rel_tol: 1e-14,
            abs_tol: 0.0,
            max_intervals: 3,
        };
        let err = integrator.integrate(|x| x.abs().sqrt().recip(), 0.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }), "{err}");
    }
}
