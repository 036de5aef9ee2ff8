//! Self-verification suite: every analytic route is compared against an
//! independent numerical one.
//!
//! The suite accepts a [`Fault`] so that the harness itself can be tested:
//! an injected fault must make at least one check fail.

use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dipole_radiation::{
    radiated_torque_z, stress_tensor_torque_oracle, ComplexDipoleAmplitude,
    STRESS_TO_RADIATED_RATIO,
};
use crate::error::Result;
use crate::oracle::dft_decomposition;
use crate::polarizability::{
    depolarization_factors, ellipsoid_polarizability, spheroid_closed_form, Ellipsoid,
    DEFAULT_DEPOLARIZATION_TOL,
};
use crate::rotating_scatter::{
    closed_form_torque, decompose_rotating_polarization, small_omega_torque, IncidentMode,
    SpinState, MODE_TORQUE_NORMALIZATION,
};
use crate::units::UnitSystem;
use crate::vacuum_spectrum::{casimir_torque, casimir_torque_with_alpha, VacuumIntegrationConfig};

/// Deliberate defects injected into the analytic routes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Radiated-torque prefactor doubled.
    PrefactorBug,
    /// Closed-form mode torque with flipped sign.
    SignFlip,
}

impl Fault {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "none" => Some(Fault::None),
            "prefactor-bug" => Some(Fault::PrefactorBug),
            "sign-flip" => Some(Fault::SignFlip),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Fault::None => "none",
            Fault::PrefactorBug => "prefactor-bug",
            Fault::SignFlip => "sign-flip",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub random_ellipsoids: usize,
    pub fault: Fault,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 20_240_601,
            random_ellipsoids: 1000,
            fault: Fault::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, residual: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name,
            passed: residual.is_finite() && residual <= tolerance,
            residual,
            tolerance,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Routes {
    fault: Fault,
    units: UnitSystem,
}

impl Routes {
    fn radiated(&self, p: &ComplexDipoleAmplitude) -> f64 {
        let g = radiated_torque_z(p).gamma_z;
        match self.fault {
            Fault::PrefactorBug => 2.0 * g,
            _ => g,
        }
    }

    fn closed_form(&self, alpha: f64, spin: &SpinState, mode: &IncidentMode) -> f64 {
        let g = closed_form_torque(alpha, spin, mode, &self.units);
        match self.fault {
            Fault::SignFlip => -g,
            _ => g,
        }
    }

    fn line_sum(&self, alpha: f64, spin: &SpinState, mode: &IncidentMode) -> Result<f64> {
        let d = decompose_rotating_polarization(alpha, spin, mode, &self.units)?;
        Ok(d.lines
            .iter()
            .map(|l| self.radiated(&l.amplitude) * MODE_TORQUE_NORMALIZATION)
            .sum())
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn random_dipole(
    rng: &mut ChaCha8Rng,
    omega: f64,
    units: &UnitSystem,
) -> Result<ComplexDipoleAmplitude> {
    let mut c = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let p = Vector3::new(c(), c(), c());
    ComplexDipoleAmplitude::new(p, omega, units)
}

/// Least-squares slope of log(y) against log(x).
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy, sxx, sxy) = points.iter().fold((0.0, 0.0, 0.0, 0.0), |acc, &(x, y)| {
        let (lx, ly) = (x.ln(), y.ln());
        (acc.0 + lx, acc.1 + ly, acc.2 + lx * lx, acc.3 + lx * ly)
    });
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn depolarization_checks(rng: &mut ChaCha8Rng, opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    for _ in 0..opts.random_ellipsoids {
        let e = Ellipsoid::new(
            log_uniform(rng, 0.1, 10.0),
            log_uniform(rng, 0.1, 10.0),
            log_uniform(rng, 0.1, 10.0),
            1.0,
            2.0,
        )?;
        let m = depolarization_factors(&e, DEFAULT_DEPOLARIZATION_TOL)?;
        worst = worst.max(m.sum_rule_residual().abs());
    }
    let sum_rule = Check::new(
        "depolarization_sum_rule",
        worst,
        1e-9,
        format!(
            "{} random ellipsoids, max |m_x + m_y + m_z - 1|",
            opts.random_ellipsoids
        ),
    );

    let sphere = Ellipsoid::sphere(1.7, 1.0, 3.0)?;
    let (m, t) = ellipsoid_polarizability(&sphere)?;
    let m_err = m
        .as_array()
        .iter()
        .map(|v| (v - 1.0 / 3.0).abs())
        .fold(0.0, f64::max);
    let ab = t.alpha_beta.expect("sphere is axisymmetric");
    let sphere_check = Check::new(
        "sphere_limit",
        (m_err / 1e-10).max(ab.alpha.abs() / ab.beta.abs() / 1e-12),
        1.0,
        format!(
            "max |m - 1/3| = {m_err:e}, |alpha/beta| = {:e}",
            (ab.alpha / ab.beta).abs()
        ),
    );

    let mut worst_rel = 0.0f64;
    for i in 0..200 {
        let ecc = 0.01 + (0.999 - 0.01) * i as f64 / 199.0;
        let stretch = 1.0 / (1.0 - ecc * ecc).sqrt();
        for (eq, pol) in [(1.0, stretch), (stretch, 1.0)] {
            let e = Ellipsoid::new(eq, eq, pol, 1.0, 2.0)?;
            let quad = depolarization_factors(&e, DEFAULT_DEPOLARIZATION_TOL)?;
            let exact = spheroid_closed_form(eq, pol);
            for (q, x) in quad.as_array().iter().zip(exact.as_array()) {
                worst_rel = worst_rel.max((q - x).abs() / x.abs());
            }
        }
    }
    let spheroid = Check::new(
        "spheroid_closed_form",
        worst_rel,
        1e-8,
        "200 prolate and 200 oblate spheroids, eccentricity 0.01..0.999".into(),
    );
    Ok(vec![sum_rule, sphere_check, spheroid])
}

fn stress_oracle_checks(rng: &mut ChaCha8Rng, routes: &Routes) -> Result<Vec<Check>> {
    let units = routes.units;
    let mut ratios = Vec::with_capacity(20);
    let mut sign_ok = true;
    for _ in 0..20 {
        let omega = rng.gen_range(0.5..2.0);
        let p = random_dipole(rng, omega, &units)?;
        let radius = 20.0 / p.k;
        let oracle = stress_tensor_torque_oracle(&p, radius, 32)?.gamma_z;
        let analytic = routes.radiated(&p);
        sign_ok &= oracle.signum() == analytic.signum();
        ratios.push(oracle / analytic);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let spread = ratios
        .iter()
        .map(|r| (r / mean - 1.0).abs())
        .fold(0.0, f64::max);
    let offset = (mean / STRESS_TO_RADIATED_RATIO - 1.0).abs();
    let ratio_check = Check::new(
        "stress_oracle_ratio",
        if sign_ok { spread.max(offset) } else { f64::INFINITY },
        1e-6,
        format!(
            "20 random dipoles: oracle/analytic = {mean:.12e} (expected 1/(16 pi) = {:.12e}), spread {spread:.3e}, signs agree: {sign_ok}",
            STRESS_TO_RADIATED_RATIO
        ),
    );

    let circular = ComplexDipoleAmplitude::new(
        Vector3::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 0.0),
        ),
        1.0,
        &units,
    )?;
    let values: Vec<f64> = [5.0, 50.0, 500.0]
        .iter()
        .map(|kr| stress_tensor_torque_oracle(&circular, kr / circular.k, 32).map(|r| r.gamma_z))
        .collect::<Result<_>>()?;
    let spread = values
        .iter()
        .map(|v| (v / values[0] - 1.0).abs())
        .fold(0.0, f64::max);
    let radius_check = Check::new(
        "stress_oracle_radius_independence",
        spread,
        1e-6,
        format!(
            "torque at kr = 5, 50, 500: {:.12e}, {:.12e}, {:.12e}",
            values[0], values[1], values[2]
        ),
    );
    Ok(vec![ratio_check, radius_check])
}

fn decomposition_check(rng: &mut ChaCha8Rng, units: &UnitSystem) -> Result<Check> {
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n_omega: i64 = rng.gen_range(8..40);
        let n_spin: i64 = rng.gen_range(1..(n_omega / 2));
        let base = 0.05;
        let spin = SpinState::new(n_spin as f64 * base, rng.gen_range(0.0..PI))?;
        let mode = IncidentMode::new(
            n_omega as f64 * base,
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        )?;
        let alpha = rng.gen_range(0.1..3.0);
        let analytic = decompose_rotating_polarization(alpha, &spin, &mode, units)?;
        let sampled = dft_decomposition(alpha, &spin, &mode, base)?;
        let peak = alpha * (mode.e_x.abs() + mode.e_z.abs());
        for (line, dft) in analytic.lines.iter().zip(sampled.iter()) {
            worst = worst.max((line.amplitude.p_hat - dft).norm() / peak);
        }
    }
    Ok(Check::new(
        "dft_decomposition",
        worst,
        1e-10,
        "100 random draws, max line-amplitude error relative to peak polarization".into(),
    ))
}

fn random_mode_draw(rng: &mut ChaCha8Rng) -> Result<(f64, SpinState, IncidentMode)> {
    let omega = rng.gen_range(0.1..10.0);
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let spin = SpinState::new(
        sign * omega * rng.gen_range(1e-3..0.49),
        rng.gen_range(0.05..(PI - 0.05)),
    )?;
    let mode = IncidentMode::new(omega, rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))?;
    Ok((rng.gen_range(0.1..3.0), spin, mode))
}

fn mode_torque_checks(rng: &mut ChaCha8Rng, routes: &Routes) -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    let mut wrong_sign = 0usize;
    for _ in 0..1000 {
        let (alpha, spin, mode) = random_mode_draw(rng)?;
        let closed = routes.closed_form(alpha, &spin, &mode);
        let sum = routes.line_sum(alpha, &spin, &mode)?;
        worst = worst.max((closed - sum).abs() / closed.abs());
        if closed != 0.0 && closed.signum() != -spin.angular_speed.signum() {
            wrong_sign += 1;
        }
    }
    let consistency = Check::new(
        "closed_form_vs_line_sum",
        worst,
        1e-10,
        "1000 random draws, relative difference".into(),
    );

    let zero_cases = [
        (SpinState::new(0.0, 0.8)?, IncidentMode::new(1.0, 1.0, 1.0)?),
        (SpinState::new(0.1, 0.0)?, IncidentMode::new(1.0, 1.0, 1.0)?),
        (
            SpinState::new(0.1, PI / 2.0)?,
            IncidentMode::new(1.0, 0.0, 1.0)?,
        ),
    ];
    let zero_max = zero_cases
        .iter()
        .map(|(s, m)| routes.closed_form(1.0, s, m).abs())
        .fold(0.0, f64::max);
    let nulls = Check::new(
        "torque_nulls",
        zero_max,
        0.0,
        "Omega = 0, theta = 0, and theta = pi/2 with E_x = 0 give exactly zero".into(),
    );

    let resistive = Check::new(
        "resistivity",
        wrong_sign as f64,
        0.0,
        format!("draws with torque not opposing the spin: {wrong_sign} of 1000"),
    );
    Ok(vec![consistency, nulls, resistive])
}

fn small_omega_checks(routes: &Routes) -> Result<Vec<Check>> {
    let units = routes.units;
    let mode = IncidentMode::new(1.0, 1.0, 1.0)?;
    let mut ladder = Vec::new();
    for &x in &[1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4] {
        let spin = SpinState::new(x * mode.omega, PI / 3.0)?;
        let exact = routes.closed_form(1.0, &spin, &mode);
        let linear = small_omega_torque(1.0, &spin, &mode, &units).gamma_z;
        ladder.push((x, ((exact - linear) / exact).abs()));
    }
    let slope = log_log_slope(&ladder);
    let slope_check = Check::new(
        "small_omega_convergence",
        (slope - 2.0).abs(),
        0.05,
        format!("log-log slope of relative deviation over Omega/omega in [1e-4, 1e-1]: {slope:.6}"),
    );

    // central difference of the line-sum torque at Omega = 1e-6 omega with only E_z
    let tilt = PI / 4.0;
    let ez_mode = IncidentMode::new(1.0, 0.0, 1.0)?;
    let h = 1e-6 * ez_mode.omega;
    let plus = routes.line_sum(1.0, &SpinState::new(h, tilt)?, &ez_mode)?;
    let minus = routes.line_sum(1.0, &SpinState::new(-h, tilt)?, &ez_mode)?;
    let slope_fd = (plus - minus) / (2.0 * h);
    let (s, c) = tilt.sin_cos();
    let unit = ez_mode.omega.powi(2) * s * s * c * c / units.c.powi(3);
    let coefficient = -slope_fd / unit;
    let linear_coefficient =
        -small_omega_torque(1.0, &SpinState::new(1.0, tilt)?, &ez_mode, &units).gamma_z / unit;
    let ez_check = Check::new(
        "ez_coefficient",
        (coefficient - linear_coefficient).abs() / linear_coefficient,
        1e-6,
        format!(
            "finite-difference E_z coefficient of the line-sum torque = {coefficient:.9}; linearized torque uses {linear_coefficient}; \
             a closed form with E_z weight 2E_z^2/6 instead of 4E_z^2/6 would give 2"
        ),
    );
    Ok(vec![slope_check, ez_check])
}

fn vacuum_checks(routes: &Routes) -> Result<Vec<Check>> {
    let units = routes.units;
    let body = Ellipsoid::new(1.0, 1.0, 2.0, 1.0, 5.0)?;
    let spin = SpinState::new(0.01, PI / 4.0)?;
    let cfg = VacuumIntegrationConfig {
        units,
        ..Default::default()
    };
    let base = casimir_torque(&body, &spin, &cfg)?;
    let doubled_spin = casimir_torque(&body, &spin.with_angular_speed(0.02), &cfg)?;
    let cutoff = base.cutoff_omega;
    let alpha = base.alpha;
    let volume = body.axes_product();
    let at_cutoff = |w: f64, a: f64, c: &VacuumIntegrationConfig| {
        casimir_torque_with_alpha(a, volume, &spin, w, c)
    };
    let doubled_cutoff = at_cutoff(2.0 * cutoff, alpha, &cfg)?;
    let doubled_alpha = at_cutoff(cutoff, 2.0 * alpha, &cfg)?;
    let mut volume_dev = 0.0f64;
    for v in [1.0, 1e3, 1e6] {
        let c = VacuumIntegrationConfig { volume: v, ..cfg };
        let r = at_cutoff(cutoff, alpha, &c)?;
        volume_dev = volume_dev.max((r.gamma_c / base.gamma_c - 1.0).abs());
    }
    let omega_ratio = doubled_spin.gamma_c / base.gamma_c;
    let cutoff_ratio = doubled_cutoff.gamma_c / base.gamma_c;
    let alpha_ratio = doubled_alpha.gamma_c / base.gamma_c;
    let scalings = Check::new(
        "vacuum_scalings",
        [
            (omega_ratio - 2.0).abs() / 1e-12,
            (cutoff_ratio - 64.0).abs() / 1e-9,
            (alpha_ratio - 4.0).abs() / 1e-12,
            volume_dev / 1e-12,
            if base.gamma_c * spin.angular_speed < 0.0 { 0.0 } else { f64::INFINITY },
        ]
        .into_iter()
        .fold(0.0, f64::max),
        1.0,
        format!(
            "Omega doubling {omega_ratio:.15}, cutoff doubling {cutoff_ratio:.12}, alpha doubling {alpha_ratio:.15}, \
             volume deviation {volume_dev:.3e}, torque {:.6e}",
            base.gamma_c
        ),
    );
    let ratio = base.dimensionless_ratio.unwrap_or(f64::NAN).abs();
    let magnitude = Check::new(
        "order_of_magnitude",
        ratio.log10().abs(),
        2.0,
        format!("2:1 prolate, eps1/eps = 5, size-derived cutoff: |Gamma_C / (hbar Omega (alpha/abc)^2)| = {ratio:.6}"),
    );
    Ok(vec![scalings, magnitude])
}

/// Runs every check.
pub fn run_verification(opts: &VerifyOptions) -> Result<VerifyReport> {
    let routes = Routes {
        fault: opts.fault,
        units: UnitSystem::natural(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = depolarization_checks(&mut rng, opts)?;
    checks.extend(stress_oracle_checks(&mut rng, &routes)?);
    checks.push(decomposition_check(&mut rng, &routes.units)?);
    checks.extend(mode_torque_checks(&mut rng, &routes)?);
    checks.extend(small_omega_checks(&routes)?);
    checks.extend(vacuum_checks(&routes)?);
    Ok(VerifyReport { checks })
}
