//! Command-line front end.
//!
//! Every option can be given as a flag or in a TOML config file (`--config`)
//! whose sections mirror the flag groups:
//!
//! ```toml
//! tol = 1e-8
//! [materials]
//! body1 = "sic"
//! [frequency]
//! omega = [0.55, 0.6]
//! unit = "rad/um"
//! [ladder]
//! min = 1e-9
//! max = 1e-5
//! count = 40
//! spacing = "geometric"
//! [temperatures]
//! t1 = 300.0
//! t2 = 0.0
//! [geometry]
//! kind = "sphere"
//! radius = 1e-5
//! [coefficients]
//! lambda = 1e-9
//! beta = 0.5119
//! ```
//!
//! Flags take precedence over the file. Material names are looked up in
//! `$NFHEAT_DATA_DIR` (`<name>.toml` Lorentz presets, `<name>.txt` optical
//! tables), then among the bundled presets, then as a file path.

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Deserialize;

use crate::asymptotics::{self, ExpansionCoefficients, Geometry};
use crate::constants::{rad_per_um_to_rad_per_s, stefan_boltzmann};
use crate::csv::{fmt_f64, read_numeric, Table};
use crate::error::{Error, Result};
use crate::fitting::{fit_beta, results_table};
use crate::materials::{self, parse_lorentz_preset, quasistatic_validity, OpticalTable, PermittivityModel};
use crate::oracle::{self, OracleConfig, OracleReport};
use crate::planar::{self, LambdaLadder, PlanarConfig, PlateauStatus, PlatePair};
use crate::spectral::{aggregate_tables, SpectralTable};

#[derive(Debug, Parser)]
#[command(name = "nfheat", version, about = "Near-field radiative heat transfer: plate spectra, curvature expansions and fits")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Relative quadrature tolerance, in (0, 1e-2].
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Worker threads for ladder evaluation.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parallel-plate spectral transfer by channel on an (omega, S) grid.
    Spectrum(SpectrumArgs),
    /// Nonretarded amplitude lambda_omega by extrapolation and quasi-static oracle.
    Lambda(LambdaArgs),
    /// Closed-form sphere, two-sphere and cylinder curves with adjusted variants.
    Expand(ExpandArgs),
    /// Fit beta (and optionally gamma) to d_m,h_prime data.
    Fit(FitArgs),
    /// Thermally aggregate lambda_omega and beta_omega tables.
    Aggregate(AggregateArgs),
    /// Compare geometry quadrature ladders with the closed forms.
    Oracle(OracleArgs),
    /// Quasi-static validity ratio on an (omega, d) grid.
    Validity(ValidityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Geometric,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
pub enum FrequencyUnit {
    #[value(name = "rad/um")]
    #[serde(rename = "rad/um")]
    RadPerUm,
    #[value(name = "rad/s")]
    #[serde(rename = "rad/s")]
    RadPerS,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryKind {
    Sphere,
    TwoSpheres,
    Cylinder,
    Flat,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    /// First body: preset name or data file.
    #[arg(long)]
    pub body1: Option<String>,
    /// Second body (defaults to the first).
    #[arg(long)]
    pub body2: Option<String>,
    /// Replace both bodies by perfect emitters (reflections forced to zero).
    #[arg(long)]
    #[serde(default)]
    pub unit_transmission: bool,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencySection {
    /// Frequencies, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(default)]
    pub omega: Vec<f64>,
    /// Unit of --omega; rad/um is read as omega/c.
    #[arg(long, value_enum)]
    pub unit: Option<FrequencyUnit>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderSection {
    /// Smallest separation, m.
    #[arg(long = "min")]
    pub min: Option<f64>,
    /// Largest separation, m.
    #[arg(long = "max")]
    pub max: Option<f64>,
    /// Number of separations.
    #[arg(long = "count")]
    pub count: Option<usize>,
    #[arg(long, value_enum)]
    pub spacing: Option<Spacing>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemperatureSection {
    /// Temperature of body 1, K.
    #[arg(long)]
    pub t1: Option<f64>,
    /// Temperature of body 2, K.
    #[arg(long)]
    pub t2: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    #[arg(long = "geometry", value_enum)]
    pub kind: Option<GeometryKind>,
    /// Radius (the smaller one for two spheres), m.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Second sphere radius, m.
    #[arg(long)]
    pub radius2: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSection {
    /// Amplitude lambda (W, or W per rad/s when spectral).
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Gradient coefficient beta.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Integration constant of the log terms, m.
    #[arg(long)]
    pub d0: Option<f64>,
    /// Reference separation of adjusted curves, m.
    #[arg(long)]
    pub d_ref: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub tol: Option<f64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub materials: MaterialSection,
    #[serde(default)]
    pub frequency: FrequencySection,
    #[serde(default)]
    pub ladder: LadderSection,
    #[serde(default)]
    pub temperatures: TemperatureSection,
    #[serde(default)]
    pub geometry: GeometrySection,
    #[serde(default)]
    pub coefficients: CoefficientSection,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub materials: MaterialSection,
    #[command(flatten)]
    pub frequency: FrequencySection,
    #[command(flatten)]
    pub ladder: LadderSection,
    #[command(flatten)]
    pub temperatures: TemperatureSection,
    /// Add total divided by the blackbody value.
    #[arg(long)]
    pub normalize: bool,
    /// Integrate over frequency with Bose-Einstein weights instead.
    #[arg(long)]
    pub integrated: bool,
}

#[derive(Debug, Args)]
pub struct LambdaArgs {
    #[command(flatten)]
    pub materials: MaterialSection,
    #[command(flatten)]
    pub frequency: FrequencySection,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub geometry: GeometrySection,
    #[command(flatten)]
    pub coefficients: CoefficientSection,
    #[command(flatten)]
    pub ladder: LadderSection,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV with columns d_m,h_prime.
    pub input: PathBuf,
    #[command(flatten)]
    pub geometry: GeometrySection,
    #[command(flatten)]
    pub coefficients: CoefficientSection,
    /// Frequency label written to the output, rad/s.
    #[arg(long, default_value_t = 0.0)]
    pub omega_label: f64,
    /// Also fit the next-order gamma term.
    #[arg(long)]
    pub include_gamma: bool,
}

#[derive(Debug, Args)]
pub struct AggregateArgs {
    /// CSV omega_rad_per_s,value of lambda_omega.
    #[arg(long)]
    pub lambda_table: PathBuf,
    /// CSV omega_rad_per_s,value of beta_omega.
    #[arg(long)]
    pub beta_table: PathBuf,
    #[command(flatten)]
    pub temperatures: TemperatureSection,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Restrict to one geometry (all when absent).
    #[command(flatten)]
    pub geometry: GeometrySection,
    #[command(flatten)]
    pub coefficients: CoefficientSection,
    /// Smallest d/R of the ladder.
    #[arg(long, default_value_t = 1e-4)]
    pub x_min: f64,
    /// Largest d/R of the ladder.
    #[arg(long, default_value_t = 1e-2)]
    pub x_max: f64,
    #[arg(long, default_value_t = 24)]
    pub points: usize,
    /// Rim cutoff of the gradient integral, fraction of R.
    #[arg(long, default_value_t = 0.05)]
    pub cutoff: f64,
}

#[derive(Debug, Args)]
pub struct ValidityArgs {
    #[command(flatten)]
    pub materials: MaterialSection,
    #[command(flatten)]
    pub frequency: FrequencySection,
    #[command(flatten)]
    pub ladder: LadderSection,
}

fn merge<T: Clone>(flag: &Option<T>, file: &Option<T>) -> Option<T> {
    flag.clone().or_else(|| file.clone())
}

impl MaterialSection {
    fn merged(&self, file: &Self) -> Self {
        Self {
            body1: merge(&self.body1, &file.body1),
            body2: merge(&self.body2, &file.body2),
            unit_transmission: self.unit_transmission || file.unit_transmission,
        }
    }
}

impl FrequencySection {
    fn merged(&self, file: &Self) -> Self {
        Self {
            omega: if self.omega.is_empty() { file.omega.clone() } else { self.omega.clone() },
            unit: merge(&self.unit, &file.unit),
        }
    }

    fn rad_per_s(&self) -> Result<Vec<f64>> {
        if self.omega.is_empty() {
            return Err(Error::Config("no frequencies given (--omega)".into()));
        }
        let unit = self.unit.unwrap_or(FrequencyUnit::RadPerUm);
        self.omega
            .iter()
            .map(|&w| {
                if !(w > 0.0 && w.is_finite()) {
                    return Err(Error::Config(format!("frequency must be positive, got {w}")));
                }
                Ok(match unit {
                    FrequencyUnit::RadPerUm => rad_per_um_to_rad_per_s(w),
                    FrequencyUnit::RadPerS => w,
                })
            })
            .collect()
    }
}

impl LadderSection {
    fn merged(&self, file: &Self) -> Self {
        Self {
            min: merge(&self.min, &file.min),
            max: merge(&self.max, &file.max),
            count: merge(&self.count, &file.count),
            spacing: merge(&self.spacing, &file.spacing),
        }
    }

    /// Ladder values; `defaults` fills missing bounds.
    fn values(&self, defaults: Option<(f64, f64, usize)>) -> Result<Vec<f64>> {
        let (dmin, dmax, dcount) = match defaults {
            Some((a, b, n)) => (Some(a), Some(b), Some(n)),
            None => (None, None, None),
        };
        let min = self.min.or(dmin).ok_or_else(|| Error::Config("ladder min missing (--min)".into()))?;
        let max = self.max.or(dmax).ok_or_else(|| Error::Config("ladder max missing (--max)".into()))?;
        let count = self.count.or(dcount).ok_or_else(|| Error::Config("ladder count missing (--count)".into()))?;
        if !(min > 0.0 && min.is_finite() && max.is_finite()) {
            return Err(Error::Config(format!("ladder bounds must be positive and finite (min={min}, max={max})")));
        }
        if !(min < max) {
            return Err(Error::Config(format!("ladder min must be below max (min={min}, max={max})")));
        }
        if count < 2 {
            return Err(Error::Config(format!("ladder count must be at least 2, got {count}")));
        }
        let last = (count - 1) as f64;
        Ok(match self.spacing.unwrap_or(Spacing::Geometric) {
            Spacing::Geometric => (0..count).map(|i| min * (max / min).powf(i as f64 / last)).collect(),
            Spacing::Linear => (0..count).map(|i| min + (max - min) * i as f64 / last).collect(),
        })
    }
}

impl TemperatureSection {
    fn merged(&self, file: &Self) -> Self {
        Self {
            t1: merge(&self.t1, &file.t1),
            t2: merge(&self.t2, &file.t2),
        }
    }

    fn pair(&self) -> Result<(f64, f64)> {
        let t1 = self.t1.unwrap_or(300.0);
        let t2 = self.t2.unwrap_or(0.0);
        if !(t1 >= 0.0 && t2 >= 0.0 && t1.is_finite() && t2.is_finite()) {
            return Err(Error::Config(format!("temperatures must be finite and >= 0 (t1={t1}, t2={t2})")));
        }
        Ok((t1, t2))
    }
}

impl GeometrySection {
    fn merged(&self, file: &Self) -> Self {
        Self {
            kind: merge(&self.kind, &file.kind),
            radius: merge(&self.radius, &file.radius),
            radius2: merge(&self.radius2, &file.radius2),
        }
    }

    fn radius(&self) -> Result<f64> {
        match self.radius {
            Some(r) if r > 0.0 && r.is_finite() => Ok(r),
            Some(r) => Err(Error::Config(format!("radius must be positive, got {r}"))),
            None => Err(Error::Config("radius missing (--radius)".into())),
        }
    }

    fn closed_form(&self) -> Result<Geometry> {
        let r = self.radius()?;
        match self.kind.unwrap_or(GeometryKind::Sphere) {
            GeometryKind::Sphere => Ok(Geometry::SpherePlate { r }),
            GeometryKind::Cylinder => Ok(Geometry::CylinderPlate { r }),
            GeometryKind::TwoSpheres => {
                let r2 = self.radius2.ok_or_else(|| Error::Config("radius2 missing for two spheres".into()))?;
                if !(r2 > 0.0 && r2.is_finite()) {
                    return Err(Error::Config(format!("radius2 must be positive, got {r2}")));
                }
                Ok(Geometry::TwoSpheres { r1: r.min(r2), r2: r.max(r2) })
            }
            GeometryKind::Flat => Err(Error::Config("flat geometry has no curvature expansion".into())),
        }
    }
}

impl CoefficientSection {
    fn merged(&self, file: &Self) -> Self {
        Self {
            lambda: merge(&self.lambda, &file.lambda),
            beta: merge(&self.beta, &file.beta),
            d0: merge(&self.d0, &file.d0),
            d_ref: merge(&self.d_ref, &file.d_ref),
        }
    }

    fn expansion(&self) -> Result<ExpansionCoefficients> {
        let lambda = self.lambda.ok_or_else(|| Error::Config("lambda missing (--lambda)".into()))?;
        let beta = self.beta.ok_or_else(|| Error::Config("beta missing (--beta)".into()))?;
        let c = ExpansionCoefficients::new(lambda, beta).map_err(as_config)?;
        match self.d0 {
            Some(d0) => c.with_d0(d0).map_err(as_config),
            None => Ok(c),
        }
    }
}

fn as_config(e: Error) -> Error {
    match e {
        Error::Domain(m) => Error::Config(m),
        other => other,
    }
}

fn tolerance(flag: Option<f64>, default: f64) -> Result<f64> {
    let tol = flag.unwrap_or(default);
    if !(tol > 0.0 && tol <= 1e-2) {
        return Err(Error::Config(format!("tolerance must lie in (0, 1e-2], got {tol}")));
    }
    Ok(tol)
}

/// Resolves a material name to a permittivity model.
pub fn resolve_material(name: &str) -> Result<PermittivityModel> {
    if let Some(dir) = std::env::var_os("NFHEAT_DATA_DIR") {
        let dir = PathBuf::from(dir);
        let toml = dir.join(format!("{name}.toml"));
        if toml.is_file() {
            return Ok(parse_lorentz_preset(&std::fs::read_to_string(toml)?)?.model);
        }
        let table = dir.join(format!("{name}.txt"));
        if table.is_file() {
            return Ok(PermittivityModel::Tabulated(OpticalTable::load(&table)?));
        }
    }
    if let Some(p) = materials::preset(name) {
        return Ok(p.model);
    }
    let path = Path::new(name);
    if path.is_file() {
        return if path.extension().is_some_and(|e| e == "toml") {
            Ok(parse_lorentz_preset(&std::fs::read_to_string(path)?)?.model)
        } else {
            Ok(PermittivityModel::Tabulated(OpticalTable::load(path)?))
        };
    }
    Err(Error::Config(format!("unknown material {name:?}")))
}

fn plate_pair(m: &MaterialSection) -> Result<PlatePair> {
    if m.unit_transmission {
        return Ok(PlatePair::UnitTransmission);
    }
    let body1 = m
        .body1
        .as_deref()
        .ok_or_else(|| Error::Config("material missing (--body1)".into()))?;
    let first = resolve_material(body1)?;
    let second = match m.body2.as_deref() {
        Some(name) => resolve_material(name)?,
        None => first.clone(),
    };
    Ok(PlatePair::new(first, second))
}

fn material_meta(t: Table, m: &MaterialSection) -> Table {
    if m.unit_transmission {
        return t.meta("bodies", "unit-transmission");
    }
    let b1 = m.body1.clone().unwrap_or_default();
    let b2 = m.body2.clone().unwrap_or_else(|| b1.clone());
    t.meta("body1", b1).meta("body2", b2)
}

fn cmd_spectrum(args: &SpectrumArgs, file: &RunConfig, tol: Option<f64>) -> Result<String> {
    let mats = args.materials.merged(&file.materials);
    let gaps = args.ladder.merged(&file.ladder).values(None)?;
    let pair = plate_pair(&mats)?;
    if args.integrated {
        let (t1, t2) = args.temperatures.merged(&file.temperatures).pair()?;
        let rel_tol = tolerance(tol, 1e-6)?;
        let cfg = PlanarConfig::default();
        let fluxes = gaps
            .par_iter()
            .map(|&s| planar::integrate_plate(&pair, t1, t2, s, &cfg, rel_tol))
            .collect::<Result<Vec<_>>>()?;
        let mut header = vec!["S_m", "prop_E", "prop_M", "evan_E", "evan_M", "total"];
        if args.normalize {
            header.push("total_over_blackbody");
        }
        let mut t = material_meta(Table::new(header), &mats)
            .meta("command", "spectrum")
            .meta("mode", "integrated")
            .meta("T1_K", fmt_f64(t1))
            .meta("T2_K", fmt_f64(t2))
            .meta("units", "W m^-2");
        let bb = stefan_boltzmann() * (t1.powi(4) - t2.powi(4));
        for (s, f) in gaps.iter().zip(&fluxes) {
            let c = f.channels;
            let mut row = vec![*s, c.prop_e, c.prop_m, c.evan_e, c.evan_m, c.total];
            if args.normalize {
                row.push(if bb != 0.0 { c.total / bb } else { 0.0 });
            }
            t.push(row);
        }
        return Ok(t.render());
    }
    let freqs = args.frequency.merged(&file.frequency).rad_per_s()?;
    let cfg = PlanarConfig {
        rel_tol: tolerance(tol, 1e-8)?,
        ..Default::default()
    };
    let points: Vec<(f64, f64)> = freqs.iter().flat_map(|&w| gaps.iter().map(move |&s| (w, s))).collect();
    let spectra = planar::spectral_sweep(&pair, &points, &cfg)?;
    let mut header = vec!["omega_rad_per_s", "S_m", "prop_E", "prop_M", "evan_E", "evan_M", "total"];
    if args.normalize {
        header.push("total_over_blackbody");
    }
    let mut t = material_meta(Table::new(header), &mats)
        .meta("command", "spectrum")
        .meta("units", "W m^-2 (rad/s)^-1");
    for (&(w, s), d) in points.iter().zip(&spectra) {
        let mut row = vec![w, s, d.prop_e, d.prop_m, d.evan_e, d.evan_m, d.total];
        if args.normalize {
            row.push(d.total / planar::blackbody_spectral(w));
        }
        t.push(row);
    }
    Ok(t.render())
}

fn cmd_lambda(args: &LambdaArgs, file: &RunConfig, tol: Option<f64>) -> Result<String> {
    let mats = args.materials.merged(&file.materials);
    let freqs = args.frequency.merged(&file.frequency).rad_per_s()?;
    let pair = plate_pair(&mats)?;
    let cfg = PlanarConfig {
        rel_tol: tolerance(tol, 1e-10)?,
        ..Default::default()
    };
    let ladder = LambdaLadder::default();
    let values = freqs
        .par_iter()
        .map(|&w| planar::lambda_extract(&pair, w, &ladder, &cfg))
        .collect::<Result<Vec<_>>>()?;
    let mut t = material_meta(
        Table::new(["omega_rad_per_s", "value", "plateau_estimate_error", "plateau_spread", "quasi_static", "wide_spread"]),
        &mats,
    )
    .meta("command", "lambda")
    .meta("units", "W (rad/s)^-1");
    for v in &values {
        if v.status == PlateauStatus::WideSpread {
            eprintln!("warning: plateau spread {:.3e} above 1% at omega={:e}", v.plateau_spread, v.omega);
        }
        t.push(vec![
            v.omega,
            v.value,
            v.plateau_estimate_error,
            v.plateau_spread,
            v.quasi_static,
            f64::from(u8::from(v.status == PlateauStatus::WideSpread)),
        ]);
    }
    Ok(t.render())
}

fn cmd_expand(args: &ExpandArgs, file: &RunConfig) -> Result<String> {
    let geo = args.geometry.merged(&file.geometry);
    let geometry = geo.closed_form()?;
    let coeffs = args.coefficients.merged(&file.coefficients);
    let c = coeffs.expansion()?;
    let pta = ExpansionCoefficients { beta: 0.0, ..c };
    let r = geometry.length_scale();
    let d_ref = coeffs.d_ref.unwrap_or(0.004 * r);
    if !(d_ref > 0.0 && d_ref < r) {
        return Err(Error::Config(format!("d_ref must lie in (0, R), got {d_ref}")));
    }
    let ds = args.ladder.merged(&file.ladder).values(Some((0.004 * r, 0.1 * r, 40)))?;
    if ds.last().is_some_and(|&d| d >= r) {
        return Err(Error::Config("ladder extends beyond d = R where the expansion is meaningless".into()));
    }
    let absolute = c.d0.is_some() || matches!(geometry, Geometry::CylinderPlate { .. });

    let mut header: Vec<&str> = vec!["d_m"];
    match geometry {
        Geometry::CylinderPlate { .. } => header.extend([
            "H_per_L_W_per_m",
            "H_pta_per_L_W_per_m",
            "H_adjusted_per_L_W_per_m",
            "H_pta_adjusted_per_L_W_per_m",
        ]),
        Geometry::SpherePlate { .. } => {
            header.push("h_prime");
            if absolute {
                header.extend(["H_W", "H_pta_W"]);
            }
            header.extend(["H_adjusted_W", "H_pta_adjusted_W", "pta_deviation_W"]);
        }
        Geometry::TwoSpheres { .. } => {
            if absolute {
                header.extend(["H_W", "H_pta_W"]);
            }
            header.extend(["H_adjusted_W", "H_pta_adjusted_W"]);
        }
    }
    let mut t = Table::new(header)
        .meta("command", "expand")
        .meta("geometry", geometry.name())
        .meta("quantity", "H")
        .meta("lambda", fmt_f64(c.lambda))
        .meta("beta", fmt_f64(c.beta))
        .meta("d0", c.d0.map(fmt_f64).unwrap_or_else(|| "unset".into()))
        .meta("d_ref", fmt_f64(d_ref));
    t = match geometry {
        Geometry::SpherePlate { r } | Geometry::CylinderPlate { r } => t.meta("R_m", fmt_f64(r)),
        Geometry::TwoSpheres { r1, r2 } => t.meta("R1_m", fmt_f64(r1)).meta("R2_m", fmt_f64(r2)),
    };
    if matches!(geometry, Geometry::SpherePlate { .. }) {
        t = t.meta(
            "sign_convention",
            "h_prime is dH/dd = -(2 pi R lambda/d^2)[1 + (2 beta - 1) d/R] (negative); -h_prime is the decay rate",
        );
    }
    for &d in &ds {
        let mut row = vec![d];
        if let Geometry::SpherePlate { r } = geometry {
            row.push(asymptotics::sphere_plate_h_prime(d, r, &c)?);
        }
        if absolute {
            row.push(geometry.total(d, &c)?);
            row.push(geometry.total(d, &pta)?);
        }
        row.push(geometry.adjusted(d, d_ref, &c)?);
        row.push(geometry.adjusted(d, d_ref, &pta)?);
        if matches!(geometry, Geometry::SpherePlate { .. }) {
            row.push(asymptotics::pta_deviation(d, d_ref, &c)?);
        }
        t.push(row);
    }
    Ok(t.render())
}

fn cmd_fit(args: &FitArgs, file: &RunConfig) -> Result<String> {
    let geo = args.geometry.merged(&file.geometry);
    let r = geo.radius()?;
    let coeffs = args.coefficients.merged(&file.coefficients);
    let lambda = coeffs.lambda.ok_or_else(|| Error::Config("lambda missing (--lambda)".into()))?;
    let text = std::fs::read_to_string(&args.input)?;
    let rows = read_numeric(&text, &["d_m", "h_prime"])?;
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r[0], r[1])).collect();
    let fit = fit_beta(&points, r, lambda, args.include_gamma)?;
    for w in &fit.warnings {
        eprintln!("warning: {w}");
    }
    let t = results_table(&[(args.omega_label, fit)], args.include_gamma)
        .meta("command", "fit")
        .meta("R_m", fmt_f64(r))
        .meta("lambda", fmt_f64(lambda));
    Ok(t.render())
}

fn cmd_aggregate(args: &AggregateArgs, file: &RunConfig, tol: Option<f64>) -> Result<String> {
    let (t1, t2) = args.temperatures.merged(&file.temperatures).pair()?;
    let rel_tol = tolerance(tol, 1e-8)?;
    let lam = SpectralTable::parse_csv(&std::fs::read_to_string(&args.lambda_table)?)?;
    let beta = SpectralTable::parse_csv(&std::fs::read_to_string(&args.beta_table)?)?;
    let agg = aggregate_tables(&lam, &beta, t1, t2, rel_tol)?;
    let mut t = Table::new(["T1_K", "T2_K", "lambda_W", "beta", "tail_mass"]).meta("command", "aggregate");
    t.push(vec![agg.t1, agg.t2, agg.lambda, agg.beta, agg.tail_mass]);
    Ok(t.render())
}

fn cmd_oracle(args: &OracleArgs, file: &RunConfig, tol: Option<f64>) -> Result<String> {
    let geo = args.geometry.merged(&file.geometry);
    let coeffs = args.coefficients.merged(&file.coefficients);
    let r = geo.radius.unwrap_or(1e-5);
    let r2 = geo.radius2.unwrap_or(2.0 * r);
    let lambda = coeffs.lambda.unwrap_or(1.0);
    let beta = coeffs.beta.unwrap_or(0.774);
    if !(r > 0.0 && r2 > 0.0 && lambda > 0.0 && beta.is_finite()) {
        return Err(Error::Config("oracle needs positive radii and lambda".into()));
    }
    if args.points < 6 || !(args.cutoff > 0.0 && args.cutoff < 1.0) {
        return Err(Error::Config("oracle needs at least 6 ladder points and a cutoff in (0, 1)".into()));
    }
    if !(args.x_min > 0.0 && args.x_min < args.x_max && args.x_max < 1.0) {
        return Err(Error::Config(format!("invalid ladder d/R in [{}, {}]", args.x_min, args.x_max)));
    }
    let mut cfg = OracleConfig {
        x_min: args.x_min,
        x_max: args.x_max,
        points: args.points,
        cutoff: args.cutoff,
        ..Default::default()
    };
    cfg.geometry.rel_tol = tolerance(tol, 1e-12)?;
    let mut reports: Vec<OracleReport> = Vec::new();
    let all = geo.kind.is_none();
    let want = |k: GeometryKind| all || geo.kind == Some(k);
    if want(GeometryKind::Sphere) {
        reports.push(oracle::sphere(r, lambda, beta, &cfg)?);
    }
    if want(GeometryKind::Cylinder) {
        reports.push(oracle::cylinder(r, lambda, beta, &cfg)?);
    }
    if want(GeometryKind::TwoSpheres) {
        reports.push(oracle::two_spheres(r.min(r2), r.max(r2), lambda, beta, &cfg)?);
        reports.push(oracle::two_spheres_vs_sphere(r, 1e6, lambda, beta, &cfg)?);
    }
    if want(GeometryKind::Flat) {
        reports.push(oracle::flat(PI * r * r, args.x_min * r, lambda)?);
    }
    let mut out = Vec::new();
    writeln!(
        out,
        "# command=oracle\n# d_over_R={:e}..{:e}\n# points={}\n# cutoff={}\n# lambda={}\n# beta={}",
        cfg.x_min,
        cfg.x_max,
        cfg.points,
        cfg.cutoff,
        fmt_f64(lambda),
        fmt_f64(beta)
    )?;
    {
        let mut w = ::csv::Writer::from_writer(&mut out);
        let io = |e: ::csv::Error| Error::Io(std::io::Error::other(e.to_string()));
        w.write_record(["geometry", "quantity", "numeric", "closed_form", "rel_error", "cutoff_sensitivity"])
            .map_err(io)?;
        for rep in &reports {
            for line in &rep.lines {
                w.write_record([
                    rep.geometry.as_str(),
                    line.label.as_str(),
                    &fmt_f64(line.numeric),
                    &fmt_f64(line.closed_form),
                    &fmt_f64(line.rel_error),
                    &fmt_f64(rep.cutoff_sensitivity),
                ])
                .map_err(io)?;
            }
        }
        w.flush()?;
    }
    Ok(String::from_utf8(out).expect("csv output is utf-8"))
}

fn cmd_validity(args: &ValidityArgs, file: &RunConfig) -> Result<String> {
    let mats = args.materials.merged(&file.materials);
    let name = mats
        .body1
        .as_deref()
        .ok_or_else(|| Error::Config("material missing (--body1)".into()))?;
    let model = resolve_material(name)?;
    let freqs = args.frequency.merged(&file.frequency).rad_per_s()?;
    let ds = args.ladder.merged(&file.ladder).values(None)?;
    let mut t = Table::new(["omega_rad_per_s", "d_m", "ratio"])
        .meta("command", "validity")
        .meta("body", name)
        .meta("note", "NaN marks a lossless medium where the criterion is degenerate");
    for &w in &freqs {
        let eps = model.permittivity(w)?;
        for &d in &ds {
            let ratio = quasistatic_validity(eps, w, d)?.ratio().unwrap_or(f64::NAN);
            t.push(vec![w, d, ratio]);
        }
    }
    Ok(t.render())
}

/// Runs a parsed command and returns the rendered output.
pub fn execute(cli: &Cli) -> Result<String> {
    let file = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(|e| match e {
            Error::Io(io) => Error::Config(format!("cannot read config {}: {io}", path.display())),
            other => other,
        })?,
        None => RunConfig::default(),
    };
    let tol = cli.tol.or(file.tol);
    let threads = cli.threads.or(file.threads);
    let run = || match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(a, &file, tol),
        Command::Lambda(a) => cmd_lambda(a, &file, tol),
        Command::Expand(a) => cmd_expand(a, &file),
        Command::Fit(a) => cmd_fit(a, &file),
        Command::Aggregate(a) => cmd_aggregate(a, &file, tol),
        Command::Oracle(a) => cmd_oracle(a, &file, tol),
        Command::Validity(a) => cmd_validity(a, &file),
    };
    match threads {
        Some(0) => Err(Error::Config("--threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(run),
        None => run(),
    }
}

/// Parses `args`, runs the command and writes the output. Returns the
/// process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = execute(&cli).and_then(|text| {
        let out = cli.out.clone().or_else(|| {
            cli.config
                .as_ref()
                .and_then(|p| RunConfig::load(p).ok())
                .and_then(|c| c.out)
        });
        match out {
            Some(path) => std::fs::write(path, text).map_err(Error::from),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                stdout.flush().map_err(Error::from)
            }
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("nfheat: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> Result<String> {
        let cli = Cli::try_parse_from(std::iter::once("nfheat").chain(args.iter().copied())).unwrap();
        execute(&cli)
    }

    #[test]
    fn config_sections_parse() {
        let cfg = RunConfig::parse(
            "tol = 1e-6\n[materials]\nbody1 = \"sic\"\n[frequency]\nomega = [0.6]\nunit = \"rad/um\"\n[ladder]\nmin = 1e-9\nmax = 1e-8\ncount = 3\nspacing = \"linear\"\n[geometry]\nkind = \"two-spheres\"\nradius = 1e-5\nradius2 = 2e-5\n",
        )
        .unwrap();
        assert_eq!(cfg.tol, Some(1e-6));
        assert_eq!(cfg.ladder.spacing, Some(Spacing::Linear));
        assert_eq!(cfg.geometry.kind, Some(GeometryKind::TwoSpheres));
        assert_eq!(cfg.frequency.unit, Some(FrequencyUnit::RadPerUm));
    }

    #[test]
    fn unknown_config_key_is_config_error() {
        let err = RunConfig::parse("[ladder]\nminimum = 1\n").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn ladder_validation() {
        let bad = LadderSection {
            min: Some(1e-8),
            max: Some(1e-9),
            count: Some(4),
            spacing: None,
        };
        assert!(matches!(bad.values(None), Err(Error::Config(_))));
        let lin = LadderSection {
            min: Some(1.0),
            max: Some(3.0),
            count: Some(3),
            spacing: Some(Spacing::Linear),
        };
        assert_eq!(lin.values(None).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn tolerance_range() {
        assert!(tolerance(Some(0.0), 1e-8).is_err());
        assert!(tolerance(Some(0.1), 1e-8).is_err());
        assert_eq!(tolerance(None, 1e-8).unwrap(), 1e-8);
    }

    #[test]
    fn unit_transmission_spectrum_is_blackbody() {
        let out = run(&[
            "spectrum",
            "--unit-transmission",
            "--omega",
            "0.6",
            "--min",
            "1e-6",
            "--max",
            "1e-5",
            "--count",
            "2",
            "--normalize",
        ])
        .unwrap();
        let t = crate::csv::read_table(&out, &["omega_rad_per_s", "S_m"]).unwrap();
        assert_eq!(t.rows.len(), 2);
        let last = out.lines().last().unwrap();
        let ratio: f64 = last.rsplit(',').next().unwrap().parse().unwrap();
        assert!((ratio - 1.0).abs() < 1e-8);
    }

    #[test]
    fn expand_cylinder_column_name() {
        let out = run(&["expand", "--geometry", "cylinder", "--radius", "1e-5", "--lambda", "1", "--beta", "0.3"]).unwrap();
        assert!(out.contains("H_per_L_W_per_m"));
    }

    #[test]
    fn expand_without_d0_has_only_adjusted_columns() {
        let out = run(&["expand", "--radius", "1e-5", "--lambda", "1", "--beta", "0.5119"]).unwrap();
        assert!(out.contains("d_m,h_prime,H_adjusted_W,H_pta_adjusted_W,pta_deviation_W"));
        assert!(out.contains("# sign_convention="));
        let with = run(&["expand", "--radius", "1e-5", "--lambda", "1", "--beta", "0.5119", "--d0", "1e-7"]).unwrap();
        assert!(with.contains("d_m,h_prime,H_W,H_pta_W,"));
    }

    #[test]
    fn unknown_material_is_config_error() {
        let err = run(&["lambda", "--body1", "unobtainium", "--omega", "0.6"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
