//! Near-field radiative heat transfer between a planar body and gently
//! curved objects at small separations.
//!
//! The crate covers the whole chain from material response to observable
//! transfer:
//!
//! * [`materials`]: dielectric functions, Fresnel coefficients and the
//!   quasi-static validity ratio.
//! * [`planar`]: parallel-plate spectral transfer split into four channels,
//!   the nonretarded amplitude `λ_ω` and the frequency-integrated flux.
//! * [`geometry`]: gap profiles and brute-force quadrature of the proximity
//!   transfer and its gradient correction.
//! * [`asymptotics`]: closed-form small-distance expansions for sphere–plate,
//!   sphere–sphere and cylinder–plate, plus near-field adjusted curves.
//! * [`perturbative`]: extraction of `β_ω` from the `k²` coefficient of a
//!   second-order perturbative kernel.
//! * [`fitting`]: linear least-squares recovery of `β_ω` from `h′(d)` data.
//! * [`spectral`]: Bose–Einstein weights and thermal aggregation.
//! * [`cli`]: configuration and the subcommands of the `nfheat` binary.

pub mod asymptotics;
pub mod cli;
pub mod constants;
pub mod csv;
pub mod error;
pub mod fitting;
pub mod geometry;
pub mod materials;
pub mod oracle;
pub mod perturbative;
pub mod planar;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};
