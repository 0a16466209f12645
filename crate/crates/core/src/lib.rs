//! Nonequilibrium Casimir pressure between two similar metallic plates of
//! finite thickness held at different temperatures.
//!
//! The pressure on the lower plate splits into a modified equilibrium
//! part, evaluated as a Matsubara sum on the imaginary frequency axis
//! ([`equilibrium`]), and a proper nonequilibrium part given by
//! real-frequency integrals over propagating and evanescent waves
//! ([`noneq`]). Plates follow either the Drude model with a
//! temperature-dependent relaxation parameter or the plasma model.

pub mod config_file;
pub mod constants;
pub mod equilibrium;
pub mod error;
pub mod material;
pub mod noneq;
pub mod optics;
pub mod permittivity;
pub mod quadrature;
pub mod scan;
pub mod system;
pub mod units;

pub use equilibrium::{delta_eq_rel, pressure_eq, pressure_eq_mean, pressure_eq_tilde};
pub use error::{Error, Result};
pub use material::{MaterialDb, MaterialParams};
pub use noneq::{delta_pneq, pressure_ideal, pressure_neq, pressure_neq_upper, PressureBreakdown};
pub use optics::Polarization;
pub use permittivity::PermittivityModel;
pub use system::{PlateSpec, SystemConfig};

/// Default relative tolerance on each pressure.
pub const DEFAULT_TOL: f64 = 1e-6;
