//! Friction torque exerted by electromagnetic zero-point fluctuations on a
//! spinning dielectric ellipsoid.
//!
//! The computation chains four pieces:
//!
//! - [`polarizability`]: depolarization factors and the static
//!   polarizability tensor of the ellipsoid;
//! - [`dipole_radiation`]: field of an oscillating dipole, the angular
//!   momentum it radiates, and a Maxwell-stress surface oracle;
//! - [`rotating_scatter`]: the frequency lines of the spinning dipole and
//!   the torque for one incident mode;
//! - [`vacuum_spectrum`]: the sum over zero-point modes up to a cutoff.
//!
//! [`verify`] cross-checks every analytic route against an independent
//! numerical one.

pub mod dipole_radiation;
pub mod error;
pub mod oracle;
pub mod polarizability;
pub mod quadrature;
pub mod rotating_scatter;
pub mod units;
pub mod vacuum_spectrum;
pub mod verify;

pub use dipole_radiation::{
    hertz_field, radiated_field, radiated_torque, radiated_torque_z, stress_tensor_torque_oracle,
    ComplexDipoleAmplitude, FieldSample, TorqueComponent, TorqueMethod, TorqueResult,
};
pub use error::{Axis, Error, Result};
pub use polarizability::{
    alpha_beta_split, depolarization_factors, polarizability_tensor, spheroid_closed_form,
    AlphaBeta, AxisymmetricResponse, DepolarizationFactors, Ellipsoid, PolarizabilityTensor,
};
pub use rotating_scatter::{
    closed_form_torque, decompose_rotating_polarization, mode_torque, small_omega_torque,
    IncidentMode, SpectralDecomposition, SpectralLine, SpinState,
};
pub use units::UnitSystem;
pub use vacuum_spectrum::{
    casimir_torque, mode_density, per_mode_field_square, torque_spectrum, CasimirTorqueResult,
    CutoffRule, CutoffShape, VacuumIntegrationConfig,
};
