//! Brute-force Fourier oracle for the rotating polarization.
//!
//! Samples `α N(t)(N(t)·E(t))` densely over one common period of ω and Ω
//! and projects onto each line frequency. For commensurate frequencies the
//! signal is a trigonometric polynomial, so the projection is exact up to
//! rounding once the sample count exceeds twice the highest harmonic.

use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::dipole_radiation::ComplexVector;
use crate::error::{invalid, Result};
use crate::rotating_scatter::{anisotropic_polarization_at, IncidentMode, SpinState};

/// Complex amplitude `P̂` at `frequency` such that the signal contains
/// `½(P̂ e^{ift} + c.c.)`, from `samples` equispaced samples over `period`.
pub fn fourier_amplitude<F: Fn(f64) -> Vector3<f64>>(
    signal: F,
    period: f64,
    frequency: f64,
    samples: usize,
) -> ComplexVector {
    let dt = period / samples as f64;
    let mut acc = ComplexVector::zeros();
    for n in 0..samples {
        let t = dt * n as f64;
        let phase = Complex64::from_polar(1.0, -frequency * t);
        acc += signal(t).map(|v| Complex64::from(v) * phase);
    }
    let norm = if frequency == 0.0 { 1.0 } else { 2.0 };
    acc * Complex64::from(norm / samples as f64)
}

fn as_multiple(value: f64, base: f64, name: &'static str) -> Result<i64> {
    let ratio = value / base;
    let rounded = ratio.round();
    if (ratio - rounded).abs() > 1e-9 * ratio.abs().max(1.0) {
        return Err(invalid(
            name,
            format!("{value} is not an integer multiple of {base}"),
        ));
    }
    Ok(rounded as i64)
}

/// Line amplitudes at |ω + mΩ| for m = −2..=2 obtained by sampling the
/// time-domain polarization. ω and Ω must be integer multiples of
/// `base_frequency`.
pub fn dft_decomposition(
    alpha: f64,
    spin: &SpinState,
    mode: &IncidentMode,
    base_frequency: f64,
) -> Result<[ComplexVector; 5]> {
    if !(base_frequency.is_finite() && base_frequency > 0.0) {
        return Err(invalid("base_frequency", "must be positive"));
    }
    let n_omega = as_multiple(mode.omega, base_frequency, "omega")?;
    let n_spin = as_multiple(spin.angular_speed, base_frequency, "Omega")?;
    let highest = (n_omega.abs() + 2 * n_spin.abs()) as usize;
    let samples = 4 * highest + 16;
    let period = 2.0 * PI / base_frequency;
    let signal = |t: f64| anisotropic_polarization_at(alpha, spin, mode, t);
    let mut out = [ComplexVector::zeros(); 5];
    for (slot, m) in out.iter_mut().zip(-2i64..=2) {
        let harmonic = (n_omega + m * n_spin).abs();
        *slot = fourier_amplitude(signal, period, harmonic as f64 * base_frequency, samples);
    }
    Ok(out)
}
