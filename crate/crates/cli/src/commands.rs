use casimir_spin::polarizability::ellipsoid_polarizability;
use casimir_spin::rotating_scatter::CONSISTENCY_TOL;
use casimir_spin::verify::run_verification;
use casimir_spin::{
    casimir_torque, depolarization_factors, mode_torque, polarizability_tensor, small_omega_torque,
    spheroid_closed_form, torque_spectrum, Error,
};
use rayon::prelude::*;

use crate::config::{Param, RunConfig, SweepTarget};
use crate::error::{CliError, CliResult};
use crate::report::{Body, Cell, CheckRow, Report};

const SUM_RULE_TOL: f64 = 1e-9;
const CLOSED_FORM_TOL: f64 = 1e-8;

/// Values from one evaluation: scalars that also appear as sweep columns,
/// plus rows only shown in single-run reports.
#[derive(Debug, Default)]
pub struct Outcome {
    pub scalars: Vec<(String, Cell)>,
    pub extra: Vec<(String, Cell)>,
    pub checks: Vec<CheckRow>,
}

impl Outcome {
    fn push(&mut self, name: &str, cell: Cell) {
        self.scalars.push((name.to_string(), cell));
    }

    fn into_report(self, cfg: &RunConfig) -> Report {
        let mut values = self.scalars;
        values.extend(self.extra);
        Report {
            config: cfg.to_pairs(),
            body: Body::Quantities(values),
            checks: self.checks,
        }
    }
}

fn check(name: &str, residual: f64, tolerance: f64, detail: String) -> CheckRow {
    CheckRow {
        name: name.to_string(),
        passed: residual.is_finite() && residual <= tolerance,
        residual,
        tolerance,
        detail,
    }
}

pub fn depol_outcome(cfg: &RunConfig) -> CliResult<Outcome> {
    let e = cfg.ellipsoid()?;
    let m =
        depolarization_factors(&e, cfg.tol).map_err(CliError::physics("depolarization factors"))?;
    let t = polarizability_tensor(&e, &m).map_err(CliError::physics("polarizability tensor"))?;
    let mut out = Outcome::default();
    out.push("m_x", Cell::Num(m.m_x));
    out.push("m_y", Cell::Num(m.m_y));
    out.push("m_z", Cell::Num(m.m_z));
    out.push("sum_rule_residual", Cell::Num(m.sum_rule_residual()));
    out.push("a_xx", Cell::Num(t.a_xx));
    out.push("a_yy", Cell::Num(t.a_yy));
    out.push("a_zz", Cell::Num(t.a_zz));
    out.push("alpha", Cell::opt(t.alpha_beta.map(|s| s.alpha)));
    out.push("beta", Cell::opt(t.alpha_beta.map(|s| s.beta)));
    out.checks.push(check(
        "sum_rule",
        m.sum_rule_residual().abs(),
        SUM_RULE_TOL,
        "|m_x + m_y + m_z - 1|".into(),
    ));

    // cross-check column for spheroids about Z
    if e.a == e.b {
        let closed = spheroid_closed_form(e.a, e.c);
        let rel = ((m.m_z - closed.m_z) / closed.m_z).abs();
        out.push("m_z_closed_form", Cell::Num(closed.m_z));
        out.push("closed_form_relative_error", Cell::Num(rel));
        out.checks.push(check(
            "spheroid_closed_form",
            rel,
            CLOSED_FORM_TOL,
            "quadrature m_z vs prolate/oblate closed form".into(),
        ));
    } else {
        out.push("m_z_closed_form", Cell::Empty);
        out.push("closed_form_relative_error", Cell::Empty);
    }
    Ok(out)
}

fn anisotropic_alpha(cfg: &RunConfig) -> CliResult<f64> {
    let e = cfg.ellipsoid()?;
    let (_, t) = ellipsoid_polarizability(&e).map_err(CliError::physics("polarizability"))?;
    t.alpha_beta
        .map(|s| s.alpha)
        .ok_or_else(|| CliError::Physics {
            context: "torque needs a body axisymmetric about Z (a = b)".into(),
            source: Error::NotAxisymmetric {
                a_xx: t.a_xx,
                a_yy: t.a_yy,
            },
        })
}

pub fn mode_torque_outcome(cfg: &RunConfig) -> CliResult<Outcome> {
    let alpha = anisotropic_alpha(cfg)?;
    let (spin, mode, units) = (cfg.spin()?, cfg.mode()?, cfg.unit_system());
    let exact =
        mode_torque(alpha, &spin, &mode, &units).map_err(CliError::physics("mode torque"))?;
    let small = small_omega_torque(alpha, &spin, &mode, &units).gamma_z;
    let relative = if exact.gamma_z == 0.0 && small == 0.0 {
        0.0
    } else {
        ((exact.gamma_z - small) / exact.gamma_z).abs()
    };
    let residual = exact.cross_check_residual.unwrap_or(0.0);

    let mut out = Outcome::default();
    out.push("alpha", Cell::Num(alpha));
    out.push("gamma_exact", Cell::Num(exact.gamma_z));
    out.push("gamma_small_omega", Cell::Num(small));
    out.push("relative_difference", Cell::Num(relative));
    out.push("component_sum", Cell::Num(exact.component_sum()));
    out.push("cross_check_residual", Cell::Num(residual));
    let labels: Vec<String> = if exact.components.len() == 5 {
        (-2..=2).map(|m| format!("line[{m}]")).collect()
    } else {
        vec!["line[all]".to_string()]
    };
    for (label, c) in labels.iter().zip(&exact.components) {
        out.extra
            .push((format!("{label}.frequency"), Cell::Num(c.omega)));
        out.extra
            .push((format!("{label}.gamma_z"), Cell::Num(c.gamma_z)));
    }
    out.checks.push(check(
        "component_sum",
        residual,
        CONSISTENCY_TOL,
        "per-line radiated torques vs closed form, relative".into(),
    ));
    Ok(out)
}

pub fn vacuum_outcome(cfg: &RunConfig) -> CliResult<Outcome> {
    let (e, spin, vcfg) = (cfg.ellipsoid()?, cfg.spin()?, cfg.vacuum()?);
    let r = casimir_torque(&e, &spin, &vcfg).map_err(CliError::physics("vacuum torque"))?;
    let units = cfg.unit_system();
    let mut out = Outcome::default();
    out.push("alpha", Cell::Num(r.alpha));
    out.push("cutoff_omega", Cell::Num(r.cutoff_omega));
    out.push("gamma_c", Cell::Num(r.gamma_c));
    out.push("dimensionless_ratio", Cell::opt(r.dimensionless_ratio));
    out.push("units.c", Cell::Num(units.c));
    out.push("units.hbar", Cell::Num(units.hbar));
    let opposing = r.gamma_c * spin.angular_speed;
    out.checks.push(check(
        "resistive",
        opposing.max(0.0),
        0.0,
        "Gamma_C * Omega must not be positive".into(),
    ));
    Ok(out)
}

/// dΓ/dω sampled on a uniform grid, as a two-column table.
pub fn spectrum_report(cfg: &RunConfig) -> CliResult<Report> {
    let (e, spin, vcfg) = (cfg.ellipsoid()?, cfg.spin()?, cfg.vacuum()?);
    let samples = torque_spectrum(&e, &spin, &vcfg, cfg.spectrum_samples)
        .map_err(CliError::physics("torque spectrum"))?;
    Ok(Report {
        config: cfg.to_pairs(),
        body: Body::Table {
            columns: vec!["omega".into(), "dgamma_domega".into()],
            rows: samples
                .into_iter()
                .map(|(w, v)| vec![Cell::Num(w), Cell::Num(v)])
                .collect(),
        },
        checks: Vec::new(),
    })
}

pub fn depol(cfg: &RunConfig) -> CliResult<Report> {
    Ok(depol_outcome(cfg)?.into_report(cfg))
}

pub fn mode_torque_cmd(cfg: &RunConfig) -> CliResult<Report> {
    Ok(mode_torque_outcome(cfg)?.into_report(cfg))
}

pub fn vacuum(cfg: &RunConfig) -> CliResult<Report> {
    Ok(vacuum_outcome(cfg)?.into_report(cfg))
}

pub fn verify(cfg: &RunConfig) -> CliResult<Report> {
    let opts = cfg.verify_options();
    let report = run_verification(&opts).map_err(CliError::physics("verification run"))?;
    let checks: Vec<CheckRow> = report
        .checks
        .iter()
        .map(|c| CheckRow {
            name: c.name.to_string(),
            passed: c.passed,
            residual: c.residual,
            tolerance: c.tolerance,
            detail: c.detail.clone(),
        })
        .collect();
    let failed = checks.iter().filter(|c| !c.passed).count();
    let values = vec![
        ("all_passed".to_string(), Cell::Bool(failed == 0)),
        ("checks_run".to_string(), Cell::Int(checks.len() as i64)),
        ("checks_failed".to_string(), Cell::Int(failed as i64)),
        (
            "fault".to_string(),
            Cell::Text(opts.fault.as_str().to_string()),
        ),
    ];
    Ok(Report {
        config: cfg.to_pairs(),
        body: Body::Quantities(values),
        checks,
    })
}

fn evaluate(target: SweepTarget, cfg: &RunConfig) -> CliResult<Outcome> {
    match target {
        SweepTarget::Depol => depol_outcome(cfg),
        SweepTarget::ModeTorque => mode_torque_outcome(cfg),
        SweepTarget::Vacuum => vacuum_outcome(cfg),
    }
}

fn point_label(cfg: &RunConfig, params: &[Param]) -> String {
    let parts: Vec<String> = params
        .iter()
        .map(|&p| {
            format!(
                "{}={}",
                p.name(),
                cfg.param(p).map_or("auto".into(), |v| v.to_string())
            )
        })
        .collect();
    format!("grid point {}", parts.join(", "))
}

/// Full grid of configs, outer axis major.
pub fn sweep_grid(cfg: &RunConfig) -> CliResult<Vec<RunConfig>> {
    let axes = cfg.sweep_axes();
    if axes.is_empty() {
        return Err(CliError::Config(
            "sweep needs sweep.outer (and optionally sweep.inner)".into(),
        ));
    }
    let mut grid = vec![cfg.clone()];
    for axis in &axes {
        let values = axis.values();
        grid = grid
            .into_iter()
            .flat_map(|base| {
                values.iter().map(move |&v| {
                    let mut point = base.clone();
                    point.set_param(axis.param, v);
                    point
                })
            })
            .collect();
    }
    let params: Vec<Param> = axes.iter().map(|a| a.param).collect();
    for point in &grid {
        point
            .validate()
            .map_err(|e| CliError::Config(format!("{}: {e}", point_label(point, &params))))?;
    }
    Ok(grid)
}

pub fn sweep(cfg: &RunConfig, workers: usize) -> CliResult<Report> {
    let grid = sweep_grid(cfg)?;
    let params: Vec<Param> = cfg.sweep_axes().iter().map(|a| a.param).collect();
    let target = cfg.sweep_target;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {workers} workers: {e}")))?;
    let outcomes: Vec<CliResult<Outcome>> =
        pool.install(|| grid.par_iter().map(|p| evaluate(target, p)).collect());

    let mut columns: Vec<String> = Param::ALL.iter().map(|p| p.name().to_string()).collect();
    let mut rows = Vec::with_capacity(grid.len());
    let mut failed_checks = Vec::new();
    for (i, (point, outcome)) in grid.iter().zip(outcomes).enumerate() {
        let outcome = outcome.map_err(|e| match e {
            CliError::Physics { context, source } => CliError::Physics {
                context: format!("{}: {context}", point_label(point, &params)),
                source,
            },
            other => other,
        })?;
        for c in outcome.checks.into_iter().filter(|c| !c.passed) {
            failed_checks.push(CheckRow {
                name: format!("{} at {}", c.name, point_label(point, &params)),
                ..c
            });
        }
        if i == 0 {
            columns.extend(outcome.scalars.iter().map(|(k, _)| k.clone()));
        }
        let mut row: Vec<Cell> = Param::ALL
            .iter()
            .map(|&p| point.param(p).map_or(Cell::Text("auto".into()), Cell::Num))
            .collect();
        row.extend(outcome.scalars.into_iter().map(|(_, c)| c));
        rows.push(row);
    }
    Ok(Report {
        config: cfg.to_pairs(),
        body: Body::Table { columns, rows },
        checks: failed_checks,
    })
}
