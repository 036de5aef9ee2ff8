//! Field and radiated torque of an oscillating point dipole.
//!
//! A physical dipole is written `P(t) = ½(P̂ e^{iωt} + P̂* e^{−iωt})`.
//! [`hertz_field`] evaluates the Hertz field
//!
//! ```text
//! Ê = k² e^{ikr}/r [P̂ − n(n·P̂)] + [3n(n·P̂) − P̂] (1/r³ − ik/r²) e^{ikr}
//! B̂ = k² (n×P̂) (1 − 1/(ikr)) e^{ikr}/r
//! ```
//!
//! which is the outgoing solution for the opposite time factor e^{−iωt}.
//! [`radiated_field`] returns the outgoing amplitude in the e^{+iωt}
//! convention used for `P(t)`; it differs from the Hertz form by k → −k.
//! Time-averaged quadratic quantities are unaffected by which of the two
//! complex-conjugate descriptions is used.

use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::quadrature::{CompensatedSum, GaussLegendre};
use crate::units::UnitSystem;

pub type ComplexVector = Vector3<Complex64>;

/// Prefactor of the radiated-torque formula `Γ = (16πi k³/3) P̂ × P̂*`.
pub const RADIATED_TORQUE_PREFACTOR: f64 = 16.0 * PI / 3.0;

/// Ratio (Maxwell-stress torque) / [`radiated_torque_z`] in Gaussian units.
///
/// The angular momentum radiated by a dipole in Gaussian units is
/// `(i k³/3) P̂ × P̂*`, so the stress integral and the 16π/3 formula differ
/// by the constant 1/(16π).
pub const STRESS_TO_RADIATED_RATIO: f64 = 1.0 / (16.0 * PI);

/// One frequency component of an oscillating dipole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexDipoleAmplitude {
    pub p_hat: ComplexVector,
    /// Angular frequency, ≥ 0.
    pub omega: f64,
    /// Wavenumber ω/c.
    pub k: f64,
}

impl ComplexDipoleAmplitude {
    pub fn new(p_hat: ComplexVector, omega: f64, units: &UnitSystem) -> Result<Self> {
        if !(omega.is_finite() && omega >= 0.0) {
            return Err(invalid(
                "omega",
                format!("must be finite and non-negative, got {omega}"),
            ));
        }
        Ok(Self {
            p_hat,
            omega,
            k: omega / units.c,
        })
    }

    /// Real dipole moment `½(P̂ e^{iωt} + c.c.)` at time `t`.
    pub fn at_time(&self, t: f64) -> Vector3<f64> {
        let phase = Complex64::from_polar(1.0, self.omega * t);
        self.p_hat.map(|p| (p * phase).re)
    }

    pub fn conj(&self) -> Self {
        Self {
            p_hat: self.p_hat.map(|p| p.conj()),
            ..*self
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            p_hat: self.p_hat * Complex64::from(s),
            ..*self
        }
    }

    /// |P̂|², the natural scale of torques built from this amplitude.
    pub fn norm_squared(&self) -> f64 {
        self.p_hat.iter().map(|p| p.norm_sqr()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub e_hat: ComplexVector,
    pub b_hat: ComplexVector,
    pub position: Vector3<f64>,
}

fn real_to_complex(v: &Vector3<f64>) -> ComplexVector {
    v.map(Complex64::from)
}

/// Hertz field of the dipole at `position` (Gaussian units, e^{ikr} form).
pub fn hertz_field(p: &ComplexDipoleAmplitude, position: Vector3<f64>) -> Result<FieldSample> {
    let r = position.norm();
    if r == 0.0 || !r.is_finite() {
        return Err(Error::Singularity);
    }
    let k = p.k;
    let n = real_to_complex(&(position / r));
    let pv = p.p_hat;
    let n_dot_p = n.dot(&pv);
    let phase = Complex64::new(0.0, k * r).exp();
    let i = Complex64::i();

    let transverse = pv - n * n_dot_p;
    let longitudinal = n * (n_dot_p * 3.0) - pv;
    let radiation = Complex64::from(k * k / r) * phase;
    let near = (Complex64::from(1.0 / (r * r * r)) - i * (k / (r * r))) * phase;
    let e_hat = transverse * radiation + longitudinal * near;

    // k² (1 − 1/(ikr)) / r = k²/r + ik/r²
    let magnetic = (Complex64::from(k * k / r) + i * (k / (r * r))) * phase;
    let b_hat = n.cross(&pv) * magnetic;

    Ok(FieldSample {
        e_hat,
        b_hat,
        position,
    })
}

/// Outgoing field amplitude in the e^{+iωt} convention of `P(t)`.
pub fn radiated_field(p: &ComplexDipoleAmplitude, position: Vector3<f64>) -> Result<FieldSample> {
    let s = hertz_field(&p.conj(), position)?;
    Ok(FieldSample {
        e_hat: s.e_hat.map(|z| z.conj()),
        b_hat: s.b_hat.map(|z| z.conj()),
        position,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TorqueMethod {
    Analytic,
    StressOracle,
}

impl TorqueMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            TorqueMethod::Analytic => "analytic",
            TorqueMethod::StressOracle => "stress-oracle",
        }
    }
}

/// Contribution of a single frequency to a torque.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorqueComponent {
    pub omega: f64,
    pub gamma_z: f64,
}

/// Emitted when the stress integral changes between `grid` and `grid / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionWarning {
    pub fine: f64,
    pub coarse: f64,
    pub relative_change: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TorqueResult {
    pub gamma_z: f64,
    pub components: Vec<TorqueComponent>,
    pub method: TorqueMethod,
    /// Residual of any internal cross-check that produced this value.
    pub cross_check_residual: Option<f64>,
    pub warning: Option<ResolutionWarning>,
}

impl TorqueResult {
    pub fn single(omega: f64, gamma_z: f64, method: TorqueMethod) -> Self {
        Self {
            gamma_z,
            components: vec![TorqueComponent { omega, gamma_z }],
            method,
            cross_check_residual: None,
            warning: None,
        }
    }

    pub fn component_sum(&self) -> f64 {
        let s: CompensatedSum = self.components.iter().map(|c| c.gamma_z).collect();
        s.value()
    }
}

/// Full torque vector `(16πi k³/3) P̂ × P̂*`. The cross product `P̂ × P̂*` is
/// purely imaginary, so the result is real.
pub fn radiated_torque(p: &ComplexDipoleAmplitude) -> Vector3<f64> {
    let conj = p.p_hat.map(|z| z.conj());
    let cross = p.p_hat.cross(&conj);
    let scale = RADIATED_TORQUE_PREFACTOR * p.k.powi(3);
    cross.map(|z| -z.im * scale)
}

/// z-component `(16πi k³/3)(P̂_x P̂_y* − P̂_y P̂_x*)`.
pub fn radiated_torque_z(p: &ComplexDipoleAmplitude) -> TorqueResult {
    let [px, py] = [p.p_hat.x, p.p_hat.y];
    // i (z − z*) = −2 Im z
    let gamma = -2.0 * (px * py.conj()).im * RADIATED_TORQUE_PREFACTOR * p.k.powi(3);
    TorqueResult::single(p.omega, gamma, TorqueMethod::Analytic)
}

/// Smallest angular grid accepted by [`stress_tensor_torque_oracle`].
pub const MIN_ORACLE_GRID: usize = 16;
/// Relative change between grid and grid/2 above which a warning is attached.
pub const ORACLE_RESOLUTION_TOL: f64 = 1e-8;

fn stress_torque_on_grid(p: &ComplexDipoleAmplitude, radius: f64, n: usize) -> Result<f64> {
    let rule = GaussLegendre::new(n);
    let dphi = 2.0 * PI / n as f64;
    let mut sum = CompensatedSum::new();
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let sin_theta = (1.0 - x * x).max(0.0).sqrt();
        for j in 0..n {
            let phi = dphi * j as f64;
            let normal = Vector3::new(sin_theta * phi.cos(), sin_theta * phi.sin(), x);
            let s = radiated_field(p, normal * radius)?;
            let nc = real_to_complex(&normal);
            // time-averaged stress applied to n; the isotropic part is
            // parallel to n and drops out of n × (T·n)
            let e_n = s.e_hat.map(|z| z.conj()).dot(&nc);
            let b_n = s.b_hat.map(|z| z.conj()).dot(&nc);
            let tn = (s.e_hat * e_n + s.b_hat * b_n).map(|z| z.re / (8.0 * PI));
            let torque_density = radius * (normal.x * tn.y - normal.y * tn.x);
            sum.add(torque_density * radius * radius * w * dphi);
        }
    }
    Ok(sum.value())
}

/// Torque on the dipole from the time-averaged Maxwell stress integrated
/// over a sphere of radius `sphere_radius` centred on it.
///
/// Uses `grid` Gauss–Legendre nodes in cos θ and `grid` trapezoid nodes in
/// azimuth, and repeats the integral on `grid / 2` to detect
/// under-resolution.
pub fn stress_tensor_torque_oracle(
    p: &ComplexDipoleAmplitude,
    sphere_radius: f64,
    grid: usize,
) -> Result<TorqueResult> {
    if !(sphere_radius.is_finite() && sphere_radius > 0.0) {
        return Err(invalid(
            "sphere_radius",
            format!("must be positive, got {sphere_radius}"),
        ));
    }
    if grid < MIN_ORACLE_GRID {
        return Err(invalid(
            "grid",
            format!("needs at least {MIN_ORACLE_GRID} points, got {grid}"),
        ));
    }
    let fine = stress_torque_on_grid(p, sphere_radius, grid)?;
    let coarse = stress_torque_on_grid(p, sphere_radius, grid / 2)?;
    let scale = fine.abs().max(p.k.powi(3) * p.norm_squared() / 3.0);
    let change = (fine - coarse).abs();
    let warning =
        (scale > 0.0 && change > ORACLE_RESOLUTION_TOL * scale).then(|| ResolutionWarning {
            fine,
            coarse,
            relative_change: change / scale,
        });
    Ok(TorqueResult {
        warning,
        ..TorqueResult::single(p.omega, fine, TorqueMethod::StressOracle)
    })
}
