//! Library routes checked against independently written oracles.

use std::f64::consts::{FRAC_PI_4, PI};

use casimir_spin::dipole_radiation::{ComplexVector, STRESS_TO_RADIATED_RATIO};
use casimir_spin::oracle::dft_decomposition;
use casimir_spin::polarizability::DEFAULT_DEPOLARIZATION_TOL;
use casimir_spin::rotating_scatter::{line_torques, MODE_TORQUE_NORMALIZATION};
use casimir_spin::vacuum_spectrum::trapezoid;
use casimir_spin::verify::log_log_slope;
use casimir_spin::*;
use nalgebra::Vector3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Carlson's symmetric integral R_D(x, y, z) by the duplication theorem.
fn carlson_rd(mut x: f64, mut y: f64, mut z: f64) -> f64 {
    let (mut sum, mut fac) = (0.0, 1.0);
    let (ave, dx, dy, dz) = loop {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * (sy + sz) + sy * sz;
        sum += fac / (sz * (z + lambda));
        fac *= 0.25;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        let ave = 0.2 * (x + y + 3.0 * z);
        let (dx, dy, dz) = ((ave - x) / ave, (ave - y) / ave, (ave - z) / ave);
        if dx.abs().max(dy.abs()).max(dz.abs()) < 1e-4 {
            break (ave, dx, dy, dz);
        }
    };
    let (c1, c2, c3, c4) = (3.0 / 14.0, 1.0 / 6.0, 9.0 / 22.0, 3.0 / 26.0);
    let (c5, c6) = (0.25 * c3, 1.5 * c4);
    let ea = dx * dy;
    let eb = dz * dz;
    let ec = ea - eb;
    let ed = ea - 6.0 * eb;
    let ee = ed + ec + ec;
    let series =
        1.0 + ed * (-c1 + c5 * ed - c6 * dz * ee) + dz * (c2 * ee + dz * (-c3 * ec + dz * c4 * ea));
    3.0 * sum + fac * series / (ave * ave.sqrt())
}

#[test]
fn depolarization_matches_carlson_rd() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let (a, b, c) = (
            10f64.powf(rng.gen_range(-1.0..1.0)),
            10f64.powf(rng.gen_range(-1.0..1.0)),
            10f64.powf(rng.gen_range(-1.0..1.0)),
        );
        let e = Ellipsoid::new(a, b, c, 1.0, 3.0).unwrap();
        let m = depolarization_factors(&e, DEFAULT_DEPOLARIZATION_TOL).unwrap();
        let abc3 = a * b * c / 3.0;
        let expected = [
            abc3 * carlson_rd(b * b, c * c, a * a),
            abc3 * carlson_rd(a * a, c * c, b * b),
            abc3 * carlson_rd(a * a, b * b, c * c),
        ];
        for (got, want) in m.as_array().iter().zip(expected) {
            assert!(
                (got - want).abs() <= 1e-9 * want,
                "{a} {b} {c}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn spheroids_match_closed_form() {
    for &ratio in &[0.05, 0.3, 0.99, 1.01, 2.0, 10.0, 80.0] {
        let e = Ellipsoid::new(1.0, 1.0, ratio, 1.0, 2.0).unwrap();
        let m = depolarization_factors(&e, 1e-12).unwrap();
        let closed = spheroid_closed_form(1.0, ratio);
        for (got, want) in m.as_array().iter().zip(closed.as_array()) {
            assert!(
                (got - want).abs() <= 1e-10 * want.max(1e-3),
                "ratio {ratio}"
            );
        }
    }
}

#[test]
fn prolate_two_to_one_reference() {
    // m_z = (1−e²)/e³ (atanh e − e) with e² = 3/4
    let ecc = 0.75f64.sqrt();
    let m_z = 0.25 / ecc.powi(3) * (ecc.atanh() - ecc);
    let e = Ellipsoid::new(1.0, 1.0, 2.0, 1.0, 5.0).unwrap();
    let m = depolarization_factors(&e, 1e-12).unwrap();
    assert!((m.m_z - m_z).abs() < 1e-12);
    assert!((m.m_x - 0.5 * (1.0 - m_z)).abs() < 1e-12);
}

type Cplx = (f64, f64);

fn cmul(a: Cplx, b: Cplx) -> Cplx {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cadd(a: Cplx, b: Cplx) -> Cplx {
    (a.0 + b.0, a.1 + b.1)
}

fn cscale(a: Cplx, s: f64) -> Cplx {
    (a.0 * s, a.1 * s)
}

/// Dipole field written out in real and imaginary parts.
fn split_field(p: [Cplx; 3], k: f64, x: [f64; 3]) -> ([Cplx; 3], [Cplx; 3]) {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let n = [x[0] / r, x[1] / r, x[2] / r];
    let phase = ((k * r).cos(), (k * r).sin());
    let n_dot_p = (0..3).fold((0.0, 0.0), |acc, j| cadd(acc, cscale(p[j], n[j])));
    let rad = cscale(phase, k * k / r);
    let near = cmul(phase, (1.0 / r.powi(3), -k / (r * r)));
    let mag = cmul(phase, (k * k / r, k / (r * r)));
    let mut e = [(0.0, 0.0); 3];
    for j in 0..3 {
        let transverse = cadd(p[j], cscale(n_dot_p, -n[j]));
        let longitudinal = cadd(cscale(n_dot_p, 3.0 * n[j]), cscale(p[j], -1.0));
        e[j] = cadd(cmul(transverse, rad), cmul(longitudinal, near));
    }
    let cross = [
        cadd(cscale(p[2], n[1]), cscale(p[1], -n[2])),
        cadd(cscale(p[0], n[2]), cscale(p[2], -n[0])),
        cadd(cscale(p[1], n[0]), cscale(p[0], -n[1])),
    ];
    let b = [
        cmul(cross[0], mag),
        cmul(cross[1], mag),
        cmul(cross[2], mag),
    ];
    (e, b)
}

fn random_dipole(rng: &mut ChaCha8Rng, omega: f64) -> ComplexDipoleAmplitude {
    let p = ComplexVector::from_fn(|_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    ComplexDipoleAmplitude::new(p, omega, &UnitSystem::natural()).unwrap()
}

#[test]
fn hertz_field_matches_split_implementation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let omega = rng.gen_range(0.1..5.0);
        let p = random_dipole(&mut rng, omega);
        let x = Vector3::new(
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
        );
        let got = hertz_field(&p, x).unwrap();
        let pc = [0, 1, 2].map(|j| (p.p_hat[j].re, p.p_hat[j].im));
        let (e, b) = split_field(pc, p.k, [x.x, x.y, x.z]);
        let scale = got.e_hat.norm().max(got.b_hat.norm());
        for j in 0..3 {
            assert!((got.e_hat[j] - Complex64::new(e[j].0, e[j].1)).norm() <= 1e-13 * scale);
            assert!((got.b_hat[j] - Complex64::new(b[j].0, b[j].1)).norm() <= 1e-13 * scale);
        }
    }
}

#[test]
fn hertz_field_obeys_faraday_law() {
    // ∇×E = ik B for the e^{ikr} outgoing form
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let p = random_dipole(&mut rng, 1.3);
    let h = 1e-4;
    let e_at = |x: Vector3<f64>| hertz_field(&p, x).unwrap().e_hat;
    for _ in 0..10 {
        let x = Vector3::new(
            rng.gen_range(1.0..2.0),
            rng.gen_range(-2.0..-1.0),
            rng.gen_range(0.5..1.5),
        );
        let d = |axis: usize| {
            let mut step = Vector3::zeros();
            step[axis] = h;
            (e_at(x + step) - e_at(x - step)) / Complex64::from(2.0 * h)
        };
        let (dx, dy, dz) = (d(0), d(1), d(2));
        let curl = Vector3::new(dy.z - dz.y, dz.x - dx.z, dx.y - dy.x);
        let expected = hertz_field(&p, x).unwrap().b_hat * Complex64::new(0.0, p.k);
        assert!((curl - expected).norm() <= 1e-6 * expected.norm());
    }
}

#[test]
fn radiated_field_is_time_reversed_hertz_field() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let p = random_dipole(&mut rng, 0.7);
    let x = Vector3::new(0.3, 1.1, -0.4);
    let out = radiated_field(&p, x).unwrap();
    let pc = [0, 1, 2].map(|j| (p.p_hat[j].re, p.p_hat[j].im));
    let (e, _) = split_field(pc, -p.k, [x.x, x.y, x.z]);
    for (got, want) in out.e_hat.iter().zip(e) {
        assert!((got - Complex64::new(want.0, want.1)).norm() < 1e-13 * out.e_hat.norm());
    }
}

#[test]
fn circular_dipole_torque_sign_and_ratio() {
    let p_hat = Vector3::new(
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, -1.0),
        Complex64::new(0.0, 0.0),
    );
    let p = ComplexDipoleAmplitude::new(p_hat, 1.0, &UnitSystem::natural()).unwrap();
    let analytic = radiated_torque_z(&p).gamma_z;
    let oracle = stress_tensor_torque_oracle(&p, 10.0, 64).unwrap();
    assert!(analytic < 0.0 && oracle.gamma_z < 0.0);
    assert!(oracle.warning.is_none());
    assert!(
        (oracle.gamma_z / analytic - STRESS_TO_RADIATED_RATIO).abs()
            < 1e-10 * STRESS_TO_RADIATED_RATIO
    );
}

#[test]
fn linear_dipole_radiates_no_torque() {
    let p_hat = Vector3::new(
        Complex64::new(0.3, 0.0),
        Complex64::new(-1.2, 0.0),
        Complex64::new(0.5, 0.0),
    );
    let p = ComplexDipoleAmplitude::new(
        p_hat * Complex64::new(0.0, 1.0).exp(),
        2.0,
        &UnitSystem::natural(),
    )
    .unwrap();
    assert!(radiated_torque_z(&p).gamma_z.abs() < 1e-14);
    let scale = p.k.powi(3) * p.norm_squared();
    assert!(
        stress_tensor_torque_oracle(&p, 3.0, 48)
            .unwrap()
            .gamma_z
            .abs()
            < 1e-10 * scale
    );
}

#[test]
fn minimum_oracle_grid_is_already_converged() {
    // time-averaged stress is a low-degree angular polynomial
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let p = random_dipole(&mut rng, 3.0);
    let coarse = stress_tensor_torque_oracle(&p, 40.0, 16).unwrap();
    let fine = stress_tensor_torque_oracle(&p, 40.0, 96).unwrap();
    assert!(coarse.warning.is_none());
    assert!((coarse.gamma_z - fine.gamma_z).abs() < 1e-12 * fine.gamma_z.abs());
}

#[test]
fn decomposition_matches_sampled_spectrum() {
    let units = UnitSystem::natural();
    for &(omega, big, theta, ex, ez) in &[
        (1.0, 0.1, 1.0, 1.0, 0.5),
        (2.0, 0.5, 0.3, -0.7, 1.2),
        (0.5, 0.4, 2.0, 1.0, 1.0),
        (1.0, 0.75, FRAC_PI_4, 0.4, -2.0),
    ] {
        let spin = SpinState::new(big, theta).unwrap();
        let mode = IncidentMode::new(omega, ex, ez).unwrap();
        let dec = decompose_rotating_polarization(1.7, &spin, &mode, &units).unwrap();
        let dft = dft_decomposition(1.7, &spin, &mode, 0.05).unwrap();
        for (line, sampled) in dec.lines.iter().zip(dft.iter()) {
            if line.amplitude.omega == 0.0 {
                continue;
            }
            assert!(
                (line.amplitude.p_hat - sampled).norm() < 1e-10,
                "{omega} {big} {theta}"
            );
        }
    }
}

#[test]
fn mode_torque_reference_value_via_stress_oracle() {
    let units = UnitSystem::natural();
    let spin = SpinState::new(0.01, FRAC_PI_4).unwrap();
    let mode = IncidentMode::new(1.0, 1.0, 1.0).unwrap();
    let result = mode_torque(1.0, &spin, &mode, &units).unwrap();
    // s² = c² = ½, ω = 1
    let s2 = 0.5;
    let by_hand =
        -(s2 * s2 * 4.0 * 0.01 * (3.0 + 4e-4) + 4.0 * s2 * 0.5 * 2.0 * 0.01 * (3.0 + 1e-4)) / 6.0;
    assert!((result.gamma_z - by_hand).abs() < 1e-15);
    assert!((result.gamma_z + 0.015001).abs() < 1e-9);

    let dec = decompose_rotating_polarization(1.0, &spin, &mode, &units).unwrap();
    let oracle: f64 = dec
        .lines
        .iter()
        .map(|l| {
            stress_tensor_torque_oracle(&l.amplitude, 5.0, 48)
                .unwrap()
                .gamma_z
        })
        .sum();
    let converted = oracle / STRESS_TO_RADIATED_RATIO * MODE_TORQUE_NORMALIZATION;
    assert!((converted - result.gamma_z).abs() < 1e-9 * result.gamma_z.abs());
}

#[test]
fn line_sum_reproduces_closed_form_at_random_points() {
    let units = UnitSystem::natural();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..200 {
        let omega = rng.gen_range(0.1..10.0);
        let spin = SpinState::new(rng.gen_range(0.0..0.4) * omega, rng.gen_range(0.0..PI)).unwrap();
        let mode =
            IncidentMode::new(omega, rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)).unwrap();
        let alpha = rng.gen_range(0.1..3.0);
        let dec = decompose_rotating_polarization(alpha, &spin, &mode, &units).unwrap();
        let sum: f64 = line_torques(&dec).iter().map(|c| c.gamma_z).sum();
        let closed = closed_form_torque(alpha, &spin, &mode, &units);
        let scale = alpha
            * alpha
            * (mode.e_x.powi(2) + mode.e_z.powi(2))
            * omega
            * omega
            * spin.angular_speed;
        assert!((sum - closed).abs() <= 1e-10 * scale.max(closed.abs()));
    }
}

#[test]
fn ez_coefficient_by_finite_difference() {
    let units = UnitSystem::natural();
    let spin = SpinState::new(1e-3, 1.1).unwrap();
    let (s, c) = spin.tilt_sin_cos();
    let omega = 1.0;
    // slope in E_z² of the line sum at small Ω, normalized by −ω²Ω α² s²c²/6
    let line_sum = |ez: f64| -> f64 {
        let mode = IncidentMode::new(omega, 0.0, ez).unwrap();
        let dec = decompose_rotating_polarization(1.0, &spin, &mode, &units).unwrap();
        line_torques(&dec).iter().map(|l| l.gamma_z).sum()
    };
    let slope = (line_sum(1.5) - line_sum(0.5)) / (2.25 - 0.25);
    let coefficient = slope / (-omega * omega * spin.angular_speed * s * s * c * c / 6.0) / 6.0;
    assert!((coefficient - 4.0).abs() < 1e-5, "{coefficient}");
}

#[test]
fn small_omega_limit_converges_quadratically() {
    let units = UnitSystem::natural();
    let mode = IncidentMode::new(1.0, 0.8, 1.3).unwrap();
    let points: Vec<(f64, f64)> = [1e-2, 5e-3, 2.5e-3, 1.25e-3]
        .iter()
        .map(|&big| {
            let spin = SpinState::new(big, 0.9).unwrap();
            let exact = mode_torque(1.0, &spin, &mode, &units).unwrap().gamma_z;
            let approx = small_omega_torque(1.0, &spin, &mode, &units).gamma_z;
            (big, ((exact - approx) / exact).abs())
        })
        .collect();
    let slope = log_log_slope(&points);
    assert!((slope - 2.0).abs() < 0.01, "{slope}");
}

#[test]
fn vacuum_spectrum_grows_as_fifth_power() {
    let e = Ellipsoid::new(1.0, 1.0, 2.0, 1.0, 5.0).unwrap();
    let spin = SpinState::new(0.01, FRAC_PI_4).unwrap();
    let cfg = VacuumIntegrationConfig::default();
    let spectrum = torque_spectrum(&e, &spin, &cfg, 200).unwrap();
    let cutoff = cfg.cutoff_omega(&e);
    let low: Vec<(f64, f64)> = spectrum
        .iter()
        .filter(|(w, _)| *w > 0.0 && *w < 0.1 * cutoff)
        .map(|&(w, v)| (w, v.abs()))
        .collect();
    assert!(low.len() >= 5);
    assert!((log_log_slope(&low) - 5.0).abs() < 0.01);
}

#[test]
fn dense_trapezoid_agrees_with_quadrature() {
    let e = Ellipsoid::new(1.0, 1.0, 2.0, 1.0, 5.0).unwrap();
    let spin = SpinState::new(0.01, FRAC_PI_4).unwrap();
    let cfg = VacuumIntegrationConfig::default();
    let total = casimir_torque(&e, &spin, &cfg).unwrap().gamma_c;
    let dense = trapezoid(&torque_spectrum(&e, &spin, &cfg, 10_000).unwrap());
    assert!(((dense - total) / total).abs() < 1e-6);
}
