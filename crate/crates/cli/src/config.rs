//! Run configuration: flat `key = value` text, command-line overrides, and
//! the resolved form embedded in every report.

use std::f64::consts::PI;

use casimir_spin::vacuum_spectrum::{
    CutoffRule, CutoffShape, VacuumIntegrationConfig, MIN_QUADRATURE_POINTS,
};
use casimir_spin::verify::{Fault, VerifyOptions};
use casimir_spin::{Ellipsoid, IncidentMode, SpinState, UnitSystem};

use crate::error::{CliError, CliResult};

/// Prefix of config lines embedded in CSV reports.
pub const EMBED_PREFIX: &str = "#@";

/// Scalar parameters that can be overridden from the command line and swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    A,
    B,
    C,
    Eps,
    Eps1,
    Omega,
    SpinRate,
    Theta,
    Ex,
    Ez,
    Cutoff,
    Volume,
}

impl Param {
    pub const ALL: [Param; 12] = [
        Param::A,
        Param::B,
        Param::C,
        Param::Eps,
        Param::Eps1,
        Param::Omega,
        Param::SpinRate,
        Param::Theta,
        Param::Ex,
        Param::Ez,
        Param::Cutoff,
        Param::Volume,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Param::A => "a",
            Param::B => "b",
            Param::C => "c",
            Param::Eps => "eps",
            Param::Eps1 => "eps1",
            Param::Omega => "omega",
            Param::SpinRate => "Omega",
            Param::Theta => "theta",
            Param::Ex => "Ex",
            Param::Ez => "Ez",
            Param::Cutoff => "cutoff",
            Param::Volume => "volume",
        }
    }

    pub fn from_name(name: &str) -> Option<Param> {
        Param::ALL.into_iter().find(|p| p.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cutoff {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Lin,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepAxis {
    pub param: Param,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl SweepAxis {
    /// Parses `name:start:stop:count[:lin|log]`.
    pub fn parse(text: &str) -> Result<SweepAxis, String> {
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(format!(
                "expected name:start:stop:count[:lin|log], got `{text}`"
            ));
        }
        let param = Param::from_name(parts[0])
            .ok_or_else(|| format!("`{}` is not a sweepable parameter", parts[0]))?;
        let start = parse_number(parts[1])?;
        let stop = parse_number(parts[2])?;
        let count: usize = parts[3]
            .parse()
            .map_err(|_| format!("count `{}` is not a positive integer", parts[3]))?;
        let spacing = match parts.get(4).copied().unwrap_or("lin") {
            "lin" => Spacing::Lin,
            "log" => Spacing::Log,
            other => return Err(format!("spacing must be lin or log, got `{other}`")),
        };
        let axis = SweepAxis {
            param,
            start,
            stop,
            count,
            spacing,
        };
        axis.check()?;
        Ok(axis)
    }

    fn check(&self) -> Result<(), String> {
        if self.count == 0 {
            return Err("count must be at least 1".into());
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err("bounds must be finite".into());
        }
        if self.spacing == Spacing::Log && !(self.start > 0.0 && self.stop > 0.0) {
            return Err("log spacing needs positive bounds".into());
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let last = self.count - 1;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i == last {
                    return self.stop;
                }
                let t = i as f64 / last as f64;
                match self.spacing {
                    Spacing::Lin => self.start + (self.stop - self.start) * t,
                    Spacing::Log => {
                        (self.start.ln() + (self.stop.ln() - self.start.ln()) * t).exp()
                    }
                }
            })
            .collect()
    }

    fn render(&self) -> String {
        let spacing = match self.spacing {
            Spacing::Lin => "lin",
            Spacing::Log => "log",
        };
        format!(
            "{}:{}:{}:{}:{}",
            self.param.name(),
            self.start,
            self.stop,
            self.count,
            spacing
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepTarget {
    Depol,
    ModeTorque,
    Vacuum,
}

impl SweepTarget {
    pub fn parse(s: &str) -> Option<SweepTarget> {
        match s {
            "depol" => Some(SweepTarget::Depol),
            "mode-torque" => Some(SweepTarget::ModeTorque),
            "vacuum" => Some(SweepTarget::Vacuum),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SweepTarget::Depol => "depol",
            SweepTarget::ModeTorque => "mode-torque",
            SweepTarget::Vacuum => "vacuum",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitsKind {
    Natural,
    Cgs,
}

/// Units block: Gaussian units with c and ħ fixed by the system, lengths
/// and times optionally rescaled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitsBlock {
    pub kind: UnitsKind,
    pub length_cm: f64,
    pub time_s: f64,
}

impl UnitsBlock {
    pub fn system(&self) -> UnitSystem {
        match self.kind {
            UnitsKind::Natural => UnitSystem::natural(),
            UnitsKind::Cgs => UnitSystem::cgs(self.length_cm, self.time_s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub eps: f64,
    pub eps1: f64,
    pub omega: f64,
    pub spin_rate: f64,
    pub theta: f64,
    pub e_x: f64,
    pub e_z: f64,
    pub cutoff: Cutoff,
    pub cutoff_shape: CutoffShape,
    pub volume: f64,
    pub quadrature_points: usize,
    pub angular_prefactor: f64,
    pub tol: f64,
    pub spectrum_samples: usize,
    pub units: UnitsBlock,
    pub sweep_target: SweepTarget,
    pub sweep_outer: Option<SweepAxis>,
    pub sweep_inner: Option<SweepAxis>,
    pub verify_seed: u64,
    pub verify_ellipsoids: usize,
    pub verify_fault: Fault,
}

impl Default for RunConfig {
    fn default() -> Self {
        let verify = VerifyOptions::default();
        Self {
            a: 1.0,
            b: 1.0,
            c: 2.0,
            eps: 1.0,
            eps1: 5.0,
            omega: 1.0,
            spin_rate: 0.01,
            theta: PI / 4.0,
            e_x: 1.0,
            e_z: 1.0,
            cutoff: Cutoff::Auto,
            cutoff_shape: CutoffShape::Sharp,
            volume: 1.0,
            quadrature_points: MIN_QUADRATURE_POINTS,
            angular_prefactor: 1.0,
            tol: casimir_spin::polarizability::DEFAULT_DEPOLARIZATION_TOL,
            spectrum_samples: 200,
            units: UnitsBlock {
                kind: UnitsKind::Natural,
                length_cm: 1.0,
                time_s: 1.0,
            },
            sweep_target: SweepTarget::ModeTorque,
            sweep_outer: None,
            sweep_inner: None,
            verify_seed: verify.seed,
            verify_ellipsoids: verify.random_ellipsoids,
            verify_fault: verify.fault,
        }
    }
}

/// Accepts plain floats plus `pi`, `-pi`, `pi/N` and `N*pi`.
pub fn parse_number(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t),
    };
    let value = if body == "pi" {
        Some(PI)
    } else if let Some(den) = body.strip_prefix("pi/") {
        den.parse::<f64>().ok().map(|d| PI / d)
    } else if let Some(num) = body.strip_suffix("*pi") {
        num.parse::<f64>().ok().map(|n| n * PI)
    } else {
        None
    };
    let value = match value {
        Some(v) => sign * v,
        None => t
            .parse::<f64>()
            .map_err(|_| format!("`{t}` is not a number"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("`{t}` is not finite"))
    }
}

fn parse_count(text: &str) -> Result<usize, String> {
    text.trim()
        .parse()
        .map_err(|_| format!("`{}` is not a non-negative integer", text.trim()))
}

impl RunConfig {
    /// Loads a config file, an embedded-config CSV report, or a JSON report.
    pub fn from_text(text: &str, source: &str) -> CliResult<RunConfig> {
        let mut cfg = RunConfig::default();
        if text.trim_start().starts_with('{') {
            cfg.apply_json(text, source)?;
            return Ok(cfg);
        }
        let embedded = text.lines().any(|l| l.starts_with(EMBED_PREFIX));
        let mut seen = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let body = if embedded {
                match line.strip_prefix(EMBED_PREFIX) {
                    Some(rest) => rest,
                    None => continue,
                }
            } else {
                line
            };
            let body = body.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let at = |msg: String| CliError::Config(format!("{source}:{}: {msg}", idx + 1));
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| at(format!("expected `key = value`, got `{body}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.contains(&key) {
                return Err(at(format!("duplicate key `{key}`")));
            }
            seen.push(key);
            cfg.set(key, value)
                .map_err(|msg| at(format!("{key}: {msg}")))?;
        }
        Ok(cfg)
    }

    fn apply_json(&mut self, text: &str, source: &str) -> CliResult<()> {
        let err = |msg: String| CliError::Config(format!("{source}: {msg}"));
        let doc: serde_json::Value =
            serde_json::from_str(text).map_err(|e| err(format!("invalid JSON: {e}")))?;
        let object = doc
            .get("config")
            .and_then(|c| c.as_object())
            .ok_or_else(|| err("JSON report has no \"config\" object".into()))?;
        for (key, value) in object {
            let text = match value {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) => match n.as_u64() {
                    Some(u) => u.to_string(),
                    None => n.as_f64().map(|f| f.to_string()).unwrap_or_default(),
                },
                other => return Err(err(format!("{key}: unsupported value {other}"))),
            };
            self.set(key, &text)
                .map_err(|msg| err(format!("{key}: {msg}")))?;
        }
        Ok(())
    }

    pub fn set_param(&mut self, param: Param, value: f64) {
        match param {
            Param::A => self.a = value,
            Param::B => self.b = value,
            Param::C => self.c = value,
            Param::Eps => self.eps = value,
            Param::Eps1 => self.eps1 = value,
            Param::Omega => self.omega = value,
            Param::SpinRate => self.spin_rate = value,
            Param::Theta => self.theta = value,
            Param::Ex => self.e_x = value,
            Param::Ez => self.e_z = value,
            Param::Cutoff => self.cutoff = Cutoff::Fixed(value),
            Param::Volume => self.volume = value,
        }
    }

    pub fn param(&self, param: Param) -> Option<f64> {
        Some(match param {
            Param::A => self.a,
            Param::B => self.b,
            Param::C => self.c,
            Param::Eps => self.eps,
            Param::Eps1 => self.eps1,
            Param::Omega => self.omega,
            Param::SpinRate => self.spin_rate,
            Param::Theta => self.theta,
            Param::Ex => self.e_x,
            Param::Ez => self.e_z,
            Param::Cutoff => match self.cutoff {
                Cutoff::Auto => return None,
                Cutoff::Fixed(w) => w,
            },
            Param::Volume => self.volume,
        })
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        if key == "cutoff" && value == "auto" {
            self.cutoff = Cutoff::Auto;
            return Ok(());
        }
        if let Some(p) = Param::from_name(key) {
            self.set_param(p, parse_number(value)?);
            return Ok(());
        }
        match key {
            "cutoff_shape" => {
                self.cutoff_shape = match value {
                    "sharp" => CutoffShape::Sharp,
                    "exponential" => CutoffShape::Exponential,
                    _ => return Err(format!("expected sharp or exponential, got `{value}`")),
                }
            }
            "quadrature_points" => self.quadrature_points = parse_count(value)?,
            "angular_prefactor" => self.angular_prefactor = parse_number(value)?,
            "tol" => self.tol = parse_number(value)?,
            "spectrum_samples" => self.spectrum_samples = parse_count(value)?,
            "units.system" => {
                self.units.kind = match value {
                    "natural" => UnitsKind::Natural,
                    "cgs" => UnitsKind::Cgs,
                    _ => return Err(format!("expected natural or cgs, got `{value}`")),
                }
            }
            "units.length_cm" => self.units.length_cm = parse_number(value)?,
            "units.time_s" => self.units.time_s = parse_number(value)?,
            "sweep.target" => {
                self.sweep_target = SweepTarget::parse(value).ok_or_else(|| {
                    format!("expected depol, mode-torque or vacuum, got `{value}`")
                })?
            }
            "sweep.outer" => self.sweep_outer = parse_optional_axis(value)?,
            "sweep.inner" => self.sweep_inner = parse_optional_axis(value)?,
            "verify.seed" => {
                self.verify_seed = value
                    .parse()
                    .map_err(|_| format!("`{value}` is not an unsigned integer"))?
            }
            "verify.ellipsoids" => self.verify_ellipsoids = parse_count(value)?,
            "verify.fault" => {
                self.verify_fault = Fault::parse(value).ok_or_else(|| {
                    format!("expected none, prefactor-bug or sign-flip, got `{value}`")
                })?
            }
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Resolved config as ordered key/value pairs; loading these back gives
    /// an identical config.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        let mut out: Vec<(&'static str, String)> = Param::ALL
            .iter()
            .map(|&p| {
                let v = match self.param(p) {
                    Some(x) => x.to_string(),
                    None => "auto".to_string(),
                };
                (p.name(), v)
            })
            .collect();
        let shape = match self.cutoff_shape {
            CutoffShape::Sharp => "sharp",
            CutoffShape::Exponential => "exponential",
        };
        let system = match self.units.kind {
            UnitsKind::Natural => "natural",
            UnitsKind::Cgs => "cgs",
        };
        let axis = |a: &Option<SweepAxis>| a.map(|a| a.render()).unwrap_or_else(|| "none".into());
        out.extend([
            ("cutoff_shape", shape.to_string()),
            ("quadrature_points", self.quadrature_points.to_string()),
            ("angular_prefactor", self.angular_prefactor.to_string()),
            ("tol", self.tol.to_string()),
            ("spectrum_samples", self.spectrum_samples.to_string()),
            ("units.system", system.to_string()),
            ("units.length_cm", self.units.length_cm.to_string()),
            ("units.time_s", self.units.time_s.to_string()),
            ("sweep.target", self.sweep_target.as_str().to_string()),
            ("sweep.outer", axis(&self.sweep_outer)),
            ("sweep.inner", axis(&self.sweep_inner)),
            ("verify.seed", self.verify_seed.to_string()),
            ("verify.ellipsoids", self.verify_ellipsoids.to_string()),
            ("verify.fault", self.verify_fault.as_str().to_string()),
        ]);
        out
    }

    pub fn sweep_axes(&self) -> Vec<SweepAxis> {
        self.sweep_outer
            .iter()
            .chain(self.sweep_inner.iter())
            .copied()
            .collect()
    }

    pub fn unit_system(&self) -> UnitSystem {
        self.units.system()
    }

    pub fn ellipsoid(&self) -> CliResult<Ellipsoid> {
        Ellipsoid::new(self.a, self.b, self.c, self.eps, self.eps1).map_err(config_error)
    }

    pub fn spin(&self) -> CliResult<SpinState> {
        SpinState::new(self.spin_rate, self.theta).map_err(config_error)
    }

    pub fn mode(&self) -> CliResult<IncidentMode> {
        IncidentMode::new(self.omega, self.e_x, self.e_z).map_err(config_error)
    }

    pub fn vacuum(&self) -> CliResult<VacuumIntegrationConfig> {
        let cfg = VacuumIntegrationConfig {
            cutoff: match self.cutoff {
                Cutoff::Auto => CutoffRule::SizeDerived,
                Cutoff::Fixed(w) => CutoffRule::Fixed(w),
            },
            shape: self.cutoff_shape,
            units: self.unit_system(),
            volume: self.volume,
            quadrature_points: self.quadrature_points,
            angular_prefactor: self.angular_prefactor,
        };
        cfg.validate().map_err(config_error)?;
        Ok(cfg)
    }

    pub fn verify_options(&self) -> VerifyOptions {
        VerifyOptions {
            seed: self.verify_seed,
            random_ellipsoids: self.verify_ellipsoids,
            fault: self.verify_fault,
        }
    }

    /// Checks every physical parameter before any computation runs.
    pub fn validate(&self) -> CliResult<()> {
        if self.units.kind == UnitsKind::Cgs
            && !(self.units.length_cm > 0.0 && self.units.time_s > 0.0)
        {
            return Err(CliError::Config(
                "units.length_cm and units.time_s must be positive".into(),
            ));
        }
        if !(self.tol > 0.0 && self.tol <= 1e-3) {
            return Err(CliError::Config(format!(
                "tol: must lie in (0, 1e-3], got {}",
                self.tol
            )));
        }
        if self.sweep_inner.is_some() && self.sweep_outer.is_none() {
            return Err(CliError::Config(
                "sweep.inner given without sweep.outer".into(),
            ));
        }
        if let (Some(o), Some(i)) = (self.sweep_outer, self.sweep_inner) {
            if o.param == i.param {
                return Err(CliError::Config(format!(
                    "both sweep axes vary `{}`",
                    o.param.name()
                )));
            }
        }
        self.ellipsoid()?;
        self.spin()?;
        self.mode()?;
        self.vacuum()?;
        Ok(())
    }
}

fn parse_optional_axis(value: &str) -> Result<Option<SweepAxis>, String> {
    if value == "none" {
        Ok(None)
    } else {
        SweepAxis::parse(value).map(Some)
    }
}

fn config_error(e: casimir_spin::Error) -> CliError {
    CliError::Config(e.to_string())
}
