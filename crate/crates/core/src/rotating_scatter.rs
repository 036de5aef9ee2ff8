//! Torque on a spinning anisotropic dipole driven by one incident mode.
//!
//! The symmetry axis `N(t) = (sin θ cos Ωt, sin θ sin Ωt, cos θ)` rotates
//! about z. For an incident field `E(t) = (E_x, 0, E_z) cos ωt` the
//! anisotropic polarization `α N (N·E)` has lines at ω + mΩ for
//! m = −2..=2. Each line radiates angular momentum independently, and the
//! sum of the line torques has the closed form
//!
//! ```text
//! Γ_z = α²/(6c³) [ E_x² sin⁴θ ((ω−2Ω)³ − (ω+2Ω)³)
//!                + 4 E_z² sin²θ cos²θ ((ω−Ω)³ − (ω+Ω)³) ]
//! ```
//!
//! whose Ω → 0 slope is `−ω²Ω α²/c³ [2 E_x² sin⁴θ + 4 E_z² sin²θ cos²θ]`.

use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::dipole_radiation::{
    radiated_torque_z, ComplexDipoleAmplitude, ComplexVector, TorqueComponent, TorqueMethod,
    TorqueResult,
};
use crate::error::{invalid, Error, Result};
use crate::units::UnitSystem;

/// Converts a line torque from [`radiated_torque_z`] (prefactor 16π/3) to the
/// normalization of the closed form above, which corresponds to a
/// prefactor of 4/3.
pub const MODE_TORQUE_NORMALIZATION: f64 = 1.0 / (4.0 * PI);

/// Relative tolerance for the closed form vs. line-sum cross-check.
pub const CONSISTENCY_TOL: f64 = 1e-10;

/// Weight of the E_z² term relative to the E_x² term in the closed form.
pub const EZ_TERM_WEIGHT: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinState {
    /// Angular velocity Ω about +z; negative values spin the other way.
    pub angular_speed: f64,
    /// Tilt θ of the symmetry axis from the rotation axis, in [0, π].
    pub tilt: f64,
}

impl SpinState {
    pub fn new(angular_speed: f64, tilt: f64) -> Result<Self> {
        if !angular_speed.is_finite() {
            return Err(invalid(
                "Omega",
                format!("must be finite, got {angular_speed}"),
            ));
        }
        if !(0.0..=PI).contains(&tilt) {
            return Err(invalid("theta", format!("must lie in [0, pi], got {tilt}")));
        }
        Ok(Self {
            angular_speed,
            tilt,
        })
    }

    /// (sin θ, cos θ) with values within a few ulps of zero flushed to zero,
    /// so that θ = π/2 and θ = π give exactly vanishing factors.
    pub fn tilt_sin_cos(&self) -> (f64, f64) {
        let flush = |v: f64| if v.abs() < 4.0 * f64::EPSILON { 0.0 } else { v };
        let (s, c) = self.tilt.sin_cos();
        (flush(s), flush(c))
    }

    pub fn symmetry_axis_at(&self, t: f64) -> Vector3<f64> {
        let (s, c) = self.tilt_sin_cos();
        let (sp, cp) = (self.angular_speed * t).sin_cos();
        Vector3::new(s * cp, s * sp, c)
    }

    pub fn with_angular_speed(&self, angular_speed: f64) -> Self {
        Self {
            angular_speed,
            ..*self
        }
    }
}

/// Incident plane-wave mode `E(t) = (E_x, 0, E_z) cos ωt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidentMode {
    pub omega: f64,
    pub e_x: f64,
    pub e_z: f64,
}

impl IncidentMode {
    pub fn new(omega: f64, e_x: f64, e_z: f64) -> Result<Self> {
        if !(omega.is_finite() && omega >= 0.0) {
            return Err(invalid(
                "omega",
                format!("must be finite and non-negative, got {omega}"),
            ));
        }
        if !(e_x.is_finite() && e_z.is_finite()) {
            return Err(invalid("E", "field amplitudes must be finite"));
        }
        Ok(Self { omega, e_x, e_z })
    }

    pub fn field_at(&self, t: f64) -> Vector3<f64> {
        Vector3::new(self.e_x, 0.0, self.e_z) * (self.omega * t).cos()
    }
}

/// One line of the rotating polarization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLine {
    /// m in ω + mΩ.
    pub harmonic: i32,
    /// ω + mΩ before folding; may be negative.
    pub signed_frequency: f64,
    /// Amplitude at |ω + mΩ|, conjugated when the line was folded.
    pub amplitude: ComplexDipoleAmplitude,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    /// Lines ordered by harmonic m = −2, −1, 0, 1, 2.
    pub lines: [SpectralLine; 5],
}

impl SpectralDecomposition {
    /// Real polarization at time `t` rebuilt from the lines.
    pub fn reconstruct(&self, t: f64) -> Vector3<f64> {
        self.lines.iter().map(|l| l.amplitude.at_time(t)).sum()
    }

    pub fn line(&self, harmonic: i32) -> &SpectralLine {
        &self.lines[(harmonic + 2) as usize]
    }
}

/// Time-domain anisotropic polarization `α N(t) (N(t)·E(t))`.
pub fn anisotropic_polarization_at(
    alpha: f64,
    spin: &SpinState,
    mode: &IncidentMode,
    t: f64,
) -> Vector3<f64> {
    let n = spin.symmetry_axis_at(t);
    let e = mode.field_at(t);
    n * (alpha * n.dot(&e))
}

/// Exact complex amplitudes of `α N(t)(N(t)·E(t))` at ω + mΩ.
pub fn decompose_rotating_polarization(
    alpha: f64,
    spin: &SpinState,
    mode: &IncidentMode,
    units: &UnitSystem,
) -> Result<SpectralDecomposition> {
    let (s, c) = spin.tilt_sin_cos();
    let zero = Complex64::new(0.0, 0.0);
    let re = Complex64::from;
    // N(t) = Σ_p N_p e^{ipΩt}
    let n_plus = Vector3::new(re(0.5 * s), Complex64::new(0.0, -0.5 * s), zero);
    let n_minus = n_plus.map(|z| z.conj());
    let n_zero = Vector3::new(zero, zero, re(c));
    let n_harm = |p: i32| -> ComplexVector {
        match p {
            -1 => n_minus,
            0 => n_zero,
            1 => n_plus,
            _ => ComplexVector::zeros(),
        }
    };
    // N(t)·E₀ = Σ_q d_q e^{iqΩt}
    let d_harm = |q: i32| -> Complex64 {
        match q {
            -1 | 1 => re(0.5 * s * mode.e_x),
            0 => re(c * mode.e_z),
            _ => zero,
        }
    };

    let mut lines = Vec::with_capacity(5);
    for m in -2..=2 {
        let coefficient: ComplexVector = (-1..=1).map(|p| n_harm(p) * d_harm(m - p)).sum();
        let p_hat = coefficient * re(alpha);
        let signed_frequency = mode.omega + m as f64 * spin.angular_speed;
        let (p_hat, frequency) = if signed_frequency < 0.0 {
            (p_hat.map(|z| z.conj()), -signed_frequency)
        } else {
            (p_hat, signed_frequency)
        };
        lines.push(SpectralLine {
            harmonic: m,
            signed_frequency,
            amplitude: ComplexDipoleAmplitude::new(p_hat, frequency, units)?,
        });
    }
    Ok(SpectralDecomposition {
        lines: lines.try_into().expect("five harmonics"),
    })
}

/// Closed-form torque for one incident mode.
pub fn closed_form_torque(
    alpha: f64,
    spin: &SpinState,
    mode: &IncidentMode,
    units: &UnitSystem,
) -> f64 {
    let (s, c) = spin.tilt_sin_cos();
    let w = mode.omega;
    let big = spin.angular_speed;
    // (ω−2Ω)³ − (ω+2Ω)³ and (ω−Ω)³ − (ω+Ω)³, factored
    let double_shift = -4.0 * big * (3.0 * w * w + 4.0 * big * big);
    let single_shift = -2.0 * big * (3.0 * w * w + big * big);
    let s2 = s * s;
    let bracket = mode.e_x * mode.e_x * s2 * s2 * double_shift
        + EZ_TERM_WEIGHT * mode.e_z * mode.e_z * s2 * c * c * single_shift;
    alpha * alpha / (6.0 * units.c.powi(3)) * bracket
}

/// Per-line torques in closed-form normalization.
pub fn line_torques(decomposition: &SpectralDecomposition) -> Vec<TorqueComponent> {
    decomposition
        .lines
        .iter()
        .map(|l| TorqueComponent {
            omega: l.amplitude.omega,
            gamma_z: radiated_torque_z(&l.amplitude).gamma_z * MODE_TORQUE_NORMALIZATION,
        })
        .collect()
}

fn lines_are_distinct(decomposition: &SpectralDecomposition) -> bool {
    let freqs: Vec<f64> = decomposition
        .lines
        .iter()
        .map(|l| l.amplitude.omega)
        .collect();
    for i in 0..freqs.len() {
        for j in (i + 1)..freqs.len() {
            let scale = freqs[i].abs().max(freqs[j].abs());
            if (freqs[i] - freqs[j]).abs() <= 1e-12 * scale {
                return false;
            }
        }
    }
    true
}

/// Torque on the spinning body from one incident mode.
///
/// The value is the closed form; the line-by-line radiated torques are
/// returned as components and must sum to it within [`CONSISTENCY_TOL`].
pub fn mode_torque(
    alpha: f64,
    spin: &SpinState,
    mode: &IncidentMode,
    units: &UnitSystem,
) -> Result<TorqueResult> {
    if spin.angular_speed == 0.0 {
        return Ok(TorqueResult {
            cross_check_residual: Some(0.0),
            ..TorqueResult::single(mode.omega, 0.0, TorqueMethod::Analytic)
        });
    }
    let decomposition = decompose_rotating_polarization(alpha, spin, mode, units)?;
    if !lines_are_distinct(&decomposition) {
        return Err(invalid(
            "Omega",
            format!(
                "shifted frequencies coincide for omega = {}, Omega = {}",
                mode.omega, spin.angular_speed
            ),
        ));
    }
    let closed = closed_form_torque(alpha, spin, mode, units);
    let components = line_torques(&decomposition);
    let result = TorqueResult {
        gamma_z: closed,
        components,
        method: TorqueMethod::Analytic,
        cross_check_residual: None,
        warning: None,
    };
    let sum = result.component_sum();
    let scale = closed.abs().max(
        alpha
            * alpha
            * (mode.e_x * mode.e_x + mode.e_z * mode.e_z)
            * mode.omega.powi(2)
            * spin.angular_speed.abs()
            / units.c.powi(3),
    );
    let residual = if scale > 0.0 {
        (sum - closed).abs() / scale
    } else {
        (sum - closed).abs()
    };
    if residual > CONSISTENCY_TOL {
        return Err(Error::Consistency {
            residual,
            tolerance: CONSISTENCY_TOL,
        });
    }
    Ok(TorqueResult {
        cross_check_residual: Some(residual),
        ..result
    })
}

/// Linear-in-Ω torque, valid for |Ω| ≪ ω.
pub fn small_omega_torque(
    alpha: f64,
    spin: &SpinState,
    mode: &IncidentMode,
    units: &UnitSystem,
) -> TorqueResult {
    let gamma = small_omega_torque_from_squares(
        alpha,
        spin,
        mode.omega,
        mode.e_x * mode.e_x,
        mode.e_z * mode.e_z,
        units,
    );
    TorqueResult::single(mode.omega, gamma, TorqueMethod::Analytic)
}

/// [`small_omega_torque`] with the field entering only through E_x² and E_z²,
/// which may be mean squares.
pub fn small_omega_torque_from_squares(
    alpha: f64,
    spin: &SpinState,
    omega: f64,
    e_x_sq: f64,
    e_z_sq: f64,
    units: &UnitSystem,
) -> f64 {
    let (s, c) = spin.tilt_sin_cos();
    let s2 = s * s;
    let bracket = 2.0 * e_x_sq * s2 * s2 + 4.0 * e_z_sq * s2 * c * c;
    -omega * omega * spin.angular_speed * alpha * alpha * bracket / units.c.powi(3)
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNITS: UnitSystem = UnitSystem::natural();

    #[test]
    fn untilted_body_has_single_line_along_z() {
        let spin = SpinState::new(0.3, 0.0).unwrap();
        let mode = IncidentMode::new(1.0, 0.7, 1.3).unwrap();
        let d = decompose_rotating_polarization(2.0, &spin, &mode, &UNITS).unwrap();
        for l in &d.lines {
            if l.harmonic == 0 {
                assert_eq!(l.amplitude.p_hat.z, Complex64::from(2.0 * 1.3));
                assert_eq!(l.amplitude.p_hat.x.norm() + l.amplitude.p_hat.y.norm(), 0.0);
            } else {
                assert_eq!(l.amplitude.norm_squared(), 0.0);
            }
        }
    }

    #[test]
    fn perpendicular_tilt_has_only_even_lines() {
        let spin = SpinState::new(0.2, PI / 2.0).unwrap();
        let mode = IncidentMode::new(1.0, 1.0, 0.0).unwrap();
        let d = decompose_rotating_polarization(1.0, &spin, &mode, &UNITS).unwrap();
        assert!(d.line(1).amplitude.norm_squared() < 1e-30);
        assert!(d.line(-1).amplitude.norm_squared() < 1e-30);
        assert!(d.line(2).amplitude.norm_squared() > 0.0);
        assert!(d.line(0).amplitude.norm_squared() > 0.0);
    }

    #[test]
    fn reconstruction_matches_time_domain() {
        let spin = SpinState::new(0.13, 1.0).unwrap();
        let mode = IncidentMode::new(1.0, 0.8, -0.6).unwrap();
        let d = decompose_rotating_polarization(1.7, &spin, &mode, &UNITS).unwrap();
        for i in 0..200 {
            let t = 0.37 * i as f64;
            let diff = d.reconstruct(t) - anisotropic_polarization_at(1.7, &spin, &mode, t);
            assert!(diff.norm() < 1e-13);
        }
    }

    #[test]
    fn no_rotation_means_no_torque() {
        let spin = SpinState::new(0.0, 0.9).unwrap();
        let mode = IncidentMode::new(2.0, 1.0, 1.0).unwrap();
        assert_eq!(mode_torque(1.0, &spin, &mode, &UNITS).unwrap().gamma_z, 0.0);
        assert_eq!(closed_form_torque(1.0, &spin, &mode, &UNITS), 0.0);
        assert_eq!(small_omega_torque(1.0, &spin, &mode, &UNITS).gamma_z, 0.0);
    }

    #[test]
    fn null_geometries() {
        let mode = IncidentMode::new(1.0, 1.0, 1.0).unwrap();
        let flat = SpinState::new(0.1, 0.0).unwrap();
        assert_eq!(mode_torque(1.0, &flat, &mode, &UNITS).unwrap().gamma_z, 0.0);
        let perp = SpinState::new(0.1, PI / 2.0).unwrap();
        let ez_only = IncidentMode::new(1.0, 0.0, 1.0).unwrap();
        assert_eq!(
            mode_torque(1.0, &perp, &ez_only, &UNITS)
                .unwrap()
                .gamma_z
                .abs(),
            0.0
        );
    }

    #[test]
    fn reference_point_value() {
        // ω = 1, Ω = 0.01, θ = π/4, E_x = E_z = 1, α = 1, c = 1
        let spin = SpinState::new(0.01, PI / 4.0).unwrap();
        let mode = IncidentMode::new(1.0, 1.0, 1.0).unwrap();
        let r = mode_torque(1.0, &spin, &mode, &UNITS).unwrap();
        assert!((r.gamma_z + 0.015001).abs() < 1e-15);
        assert!((r.component_sum() + 0.015001).abs() < 1e-12);
    }

    #[test]
    fn folded_lines_still_sum_to_closed_form() {
        let spin = SpinState::new(0.7, 1.1).unwrap();
        let mode = IncidentMode::new(1.0, 0.9, 0.4).unwrap();
        let d = decompose_rotating_polarization(1.0, &spin, &mode, &UNITS).unwrap();
        assert!(d.line(-2).signed_frequency < 0.0);
        let r = mode_torque(1.0, &spin, &mode, &UNITS).unwrap();
        assert!(r.cross_check_residual.unwrap() < 1e-12);
    }

    #[test]
    fn coincident_folded_lines_are_rejected() {
        let spin = SpinState::new(1.0, 1.1).unwrap();
        let mode = IncidentMode::new(1.0, 0.9, 0.4).unwrap();
        assert!(mode_torque(1.0, &spin, &mode, &UNITS).is_err());
    }

    #[test]
    fn isotropic_response_adds_no_torque() {
        let spin = SpinState::new(0.05, 0.8).unwrap();
        let mode = IncidentMode::new(1.0, 0.6, 1.2).unwrap();
        let mut d = decompose_rotating_polarization(1.3, &spin, &mode, &UNITS).unwrap();
        let before: f64 = line_torques(&d).iter().map(|c| c.gamma_z).sum();
        let beta = 2.5;
        let iso = Vector3::new(mode.e_x, 0.0, mode.e_z).map(|v| Complex64::from(beta * v));
        d.lines[2].amplitude.p_hat += iso;
        let after: f64 = line_torques(&d).iter().map(|c| c.gamma_z).sum();
        assert!((after - before).abs() <= 1e-16 * before.abs());
    }

    #[test]
    fn spin_state_validation() {
        assert!(SpinState::new(f64::NAN, 0.1).is_err());
        assert!(SpinState::new(0.1, -0.1).is_err());
        assert!(SpinState::new(0.1, 4.0).is_err());
        let s = SpinState::new(0.4, 0.7).unwrap();
        for i in 0..20 {
            assert!((s.symmetry_axis_at(i as f64 * 0.9).norm() - 1.0).abs() < 1e-15);
        }
        assert!(IncidentMode::new(-1.0, 1.0, 1.0).is_err());
    }
}
