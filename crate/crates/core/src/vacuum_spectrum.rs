//! Friction torque from the zero-point spectrum.
//!
//! Each vacuum mode of frequency ω contributes `⟨|E|²⟩ = ħω/(2V)` and there
//! are `8πVω²/c³` modes per unit frequency. Splitting the mean square
//! isotropically (`⟨E_x²⟩ = ⟨E_z²⟩ = ⟨|E|²⟩/3`) and inserting it into the
//! small-Ω mode torque gives an integrand proportional to ω⁵, which is cut
//! off at ω_c where the wavelength reaches the body size.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::polarizability::{ellipsoid_polarizability, Ellipsoid};
use crate::quadrature::{CompensatedSum, GaussLegendre};
use crate::rotating_scatter::{small_omega_torque_from_squares, SpinState};
use crate::units::UnitSystem;

pub const MIN_QUADRATURE_POINTS: usize = 64;

/// The exponential cutoff is integrated up to this multiple of ω_c.
const EXPONENTIAL_SPAN: f64 = 60.0;
const EXPONENTIAL_PANELS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffRule {
    /// ω_c given explicitly.
    Fixed(f64),
    /// ω_c = c / max(a, b, c).
    SizeDerived,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutoffShape {
    /// Integrate over [0, ω_c].
    Sharp,
    /// Integrate over [0, ∞) with weight e^{−ω/ω_c}.
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VacuumIntegrationConfig {
    pub cutoff: CutoffRule,
    pub shape: CutoffShape,
    pub units: UnitSystem,
    /// Quantization volume V; cancels from the result.
    pub volume: f64,
    pub quadrature_points: usize,
    /// O(1) factor multiplying the integrand; the isotropic-split estimate
    /// corresponds to 1.
    pub angular_prefactor: f64,
}

impl Default for VacuumIntegrationConfig {
    fn default() -> Self {
        Self {
            cutoff: CutoffRule::SizeDerived,
            shape: CutoffShape::Sharp,
            units: UnitSystem::natural(),
            volume: 1.0,
            quadrature_points: MIN_QUADRATURE_POINTS,
            angular_prefactor: 1.0,
        }
    }
}

impl VacuumIntegrationConfig {
    pub fn validate(&self) -> Result<()> {
        if let CutoffRule::Fixed(w) = self.cutoff {
            if !(w.is_finite() && w > 0.0) {
                return Err(invalid(
                    "cutoff",
                    format!("cutoff frequency must be positive, got {w}"),
                ));
            }
        }
        if !(self.volume.is_finite() && self.volume > 0.0) {
            return Err(invalid(
                "volume",
                format!("must be positive, got {}", self.volume),
            ));
        }
        if self.quadrature_points < MIN_QUADRATURE_POINTS {
            return Err(invalid(
                "quadrature_points",
                format!(
                    "needs at least {MIN_QUADRATURE_POINTS}, got {}",
                    self.quadrature_points
                ),
            ));
        }
        if !(self.angular_prefactor.is_finite() && self.angular_prefactor > 0.0) {
            return Err(invalid("angular_prefactor", "must be positive and finite"));
        }
        Ok(())
    }

    pub fn cutoff_omega(&self, e: &Ellipsoid) -> f64 {
        match self.cutoff {
            CutoffRule::Fixed(w) => w,
            CutoffRule::SizeDerived => self.units.c / e.max_semi_axis(),
        }
    }

    fn upper_limit(&self, cutoff: f64) -> f64 {
        match self.shape {
            CutoffShape::Sharp => cutoff,
            CutoffShape::Exponential => EXPONENTIAL_SPAN * cutoff,
        }
    }
}

/// Number of field modes per unit angular frequency, 8πVω²/c³.
pub fn mode_density(omega: f64, volume: f64, units: &UnitSystem) -> f64 {
    8.0 * PI * volume * omega * omega / units.c.powi(3)
}

/// Zero-point mean square field of one mode, ħω/(2V).
pub fn per_mode_field_square(omega: f64, volume: f64, units: &UnitSystem) -> f64 {
    units.hbar * omega / (2.0 * volume)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CasimirTorqueResult {
    pub gamma_c: f64,
    pub cutoff_omega: f64,
    pub alpha: f64,
    /// (ω, dΓ/dω) at the quadrature nodes.
    pub integrand_samples: Vec<(f64, f64)>,
    /// Γ_C / (ħΩ (α/abc)²); absent when the reference scale vanishes.
    pub dimensionless_ratio: Option<f64>,
}

/// Spectral density dΓ/dω of the friction torque.
pub fn torque_integrand(
    alpha: f64,
    spin: &SpinState,
    omega: f64,
    cutoff: f64,
    cfg: &VacuumIntegrationConfig,
) -> f64 {
    let units = &cfg.units;
    let mean_square = per_mode_field_square(omega, cfg.volume, units);
    let share = mean_square / 3.0;
    let per_mode = small_omega_torque_from_squares(alpha, spin, omega, share, share, units);
    let weight = match cfg.shape {
        CutoffShape::Sharp => 1.0,
        CutoffShape::Exponential => (-omega / cutoff).exp(),
    };
    cfg.angular_prefactor * per_mode * mode_density(omega, cfg.volume, units) * weight
}

/// Friction torque for a body with anisotropic polarizability `alpha` and
/// axes product `axes_product`, at cutoff frequency `cutoff`.
pub fn casimir_torque_with_alpha(
    alpha: f64,
    axes_product: f64,
    spin: &SpinState,
    cutoff: f64,
    cfg: &VacuumIntegrationConfig,
) -> Result<CasimirTorqueResult> {
    cfg.validate()?;
    if !(cutoff.is_finite() && cutoff > 0.0) {
        return Err(invalid(
            "cutoff",
            format!("cutoff frequency must be positive, got {cutoff}"),
        ));
    }
    if !alpha.is_finite() {
        return Err(invalid("alpha", "polarizability must be finite"));
    }
    let rule = GaussLegendre::new(cfg.quadrature_points);
    let upper = cfg.upper_limit(cutoff);
    let panels = match cfg.shape {
        CutoffShape::Sharp => 1,
        CutoffShape::Exponential => EXPONENTIAL_PANELS,
    };
    let width = upper / panels as f64;
    let mut samples = Vec::with_capacity(panels * rule.nodes.len());
    let mut total = CompensatedSum::new();
    for panel in 0..panels {
        let lo = width * panel as f64;
        let mid = lo + 0.5 * width;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let omega = mid + 0.5 * width * x;
            let value = torque_integrand(alpha, spin, omega, cutoff, cfg);
            samples.push((omega, value));
            total.add(0.5 * width * w * value);
        }
    }
    let gamma_c = total.value();
    let reference = cfg.units.hbar * spin.angular_speed * (alpha / axes_product).powi(2);
    Ok(CasimirTorqueResult {
        gamma_c,
        cutoff_omega: cutoff,
        alpha,
        integrand_samples: samples,
        dimensionless_ratio: (reference != 0.0).then(|| gamma_c / reference),
    })
}

fn anisotropic_alpha(e: &Ellipsoid) -> Result<f64> {
    let (_, tensor) = ellipsoid_polarizability(e)?;
    tensor
        .alpha_beta
        .map(|s| s.alpha)
        .ok_or(Error::NotAxisymmetric {
            a_xx: tensor.a_xx,
            a_yy: tensor.a_yy,
        })
}

/// Friction torque Γ_C on the spinning ellipsoid `e`, which must be
/// axisymmetric about its Z axis.
pub fn casimir_torque(
    e: &Ellipsoid,
    spin: &SpinState,
    cfg: &VacuumIntegrationConfig,
) -> Result<CasimirTorqueResult> {
    cfg.validate()?;
    let alpha = anisotropic_alpha(e)?;
    casimir_torque_with_alpha(alpha, e.axes_product(), spin, cfg.cutoff_omega(e), cfg)
}

/// dΓ/dω on a uniform grid of `n_samples` points from 0 to the integration
/// limit (ω_c for a sharp cutoff).
pub fn torque_spectrum(
    e: &Ellipsoid,
    spin: &SpinState,
    cfg: &VacuumIntegrationConfig,
    n_samples: usize,
) -> Result<Vec<(f64, f64)>> {
    if n_samples < 2 {
        return Err(invalid(
            "n_samples",
            format!("needs at least 2, got {n_samples}"),
        ));
    }
    cfg.validate()?;
    let alpha = anisotropic_alpha(e)?;
    let cutoff = cfg.cutoff_omega(e);
    let upper = cfg.upper_limit(cutoff);
    let step = upper / (n_samples - 1) as f64;
    Ok((0..n_samples)
        .map(|i| {
            let omega = if i + 1 == n_samples {
                upper
            } else {
                step * i as f64
            };
            (omega, torque_integrand(alpha, spin, omega, cutoff, cfg))
        })
        .collect())
}

/// Trapezoid rule over uniformly spaced samples.
pub fn trapezoid(samples: &[(f64, f64)]) -> f64 {
    let s: CompensatedSum = samples
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .collect();
    s.value()
}
