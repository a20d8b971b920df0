//! `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, keys are dot-scoped. Every
//! key must be known and may appear once. A minimal file:
//!
//! ```text
//! model.tls_count = 1
//! cpb.e_c_ghz = 4.5
//! cpb.e_j_max_ghz = 6.33
//! tls1.e_r_ghz = 0.62
//! tls1.t_lr_ghz = 0.06
//! tls1.e_int_ghz = 0.35
//! tls1.delta_e_j_ghz = 2.02
//! ```

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::analysis::{JunctionGeometry, LifetimeInputs};
use crate::fitting::{AssignmentPolicy, BoundSet, Interval, NelderMeadOptions};
use crate::hamiltonian::{CpbParams, ModelConfig, TlsParams};
use crate::spectra::{uniform_grid, ResonatorParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}` (first set on line {first})")]
    DuplicateKey {
        line: usize,
        key: String,
        first: usize,
    },
    #[error("line {line}: key `{key}`: malformed value `{value}` ({expected})")]
    BadValue {
        line: usize,
        key: String,
        value: String,
        expected: &'static str,
    },
    #[error("missing required keys: {}", .0.join(", "))]
    Missing(Vec<String>),
    #[error("line {line}: key `{key}`: {reason}")]
    Invalid {
        line: usize,
        key: String,
        reason: String,
    },
}

/// Gate-charge sweep `start..=stop` in steps of `step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            start: 0.8,
            stop: 1.2,
            step: 0.005,
        }
    }
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        uniform_grid(self.start, self.stop, self.step)
            .expect("grid validated when the configuration was parsed")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OutputPaths {
    pub spectrum_csv: Option<String>,
    pub spectrum_svg: Option<String>,
    pub fit_report: Option<String>,
    pub residuals_csv: Option<String>,
    pub analysis_report: Option<String>,
    pub sweep_dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub policy: AssignmentPolicy,
    /// Number of random starts; zero fits once from the configured model.
    pub seeds: usize,
    pub rng_seed: u64,
    pub optimizer: NelderMeadOptions,
    pub bounds: BoundSet,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            policy: AssignmentPolicy::NearestBranch,
            seeds: 0,
            rng_seed: 0,
            optimizer: NelderMeadOptions::default(),
            bounds: BoundSet::default(),
        }
    }
}

/// Everything a batch run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub grid: GridSpec,
    pub max_states: usize,
    pub outputs: OutputPaths,
    pub resonator: Option<ResonatorParams>,
    pub junction: Option<JunctionGeometry>,
    pub lifetime: LifetimeInputs,
    pub fit: FitOptions,
}

impl RunConfig {
    pub fn junction_or_nominal(&self) -> JunctionGeometry {
        self.junction.unwrap_or(JunctionGeometry::NOMINAL)
    }
}

/// Kind of value a key holds.
#[derive(Clone, Copy)]
enum Kind {
    Number,
    Integer,
    Text,
    Pair,
    Policy,
}

const TLS_FIELDS: [&str; 4] = ["e_r_ghz", "t_lr_ghz", "e_int_ghz", "delta_e_j_ghz"];

fn known_keys() -> Vec<(String, Kind)> {
    use Kind::*;
    let mut keys: Vec<(String, Kind)> = [
        ("model.tls_count", Integer),
        ("cpb.e_c_ghz", Number),
        ("cpb.e_j_max_ghz", Number),
        ("cpb.n_charge_states", Integer),
        ("flux.ratio", Number),
        ("t_12_ghz", Number),
        ("grid.start", Number),
        ("grid.stop", Number),
        ("grid.step", Number),
        ("spectrum.max_states", Integer),
        ("output.spectrum_csv", Text),
        ("output.spectrum_svg", Text),
        ("output.fit_report", Text),
        ("output.residuals_csv", Text),
        ("output.analysis_report", Text),
        ("output.sweep_dir", Text),
        ("resonator.omega_r_ghz", Number),
        ("resonator.g_ghz", Number),
        ("junction.area_nm2", Number),
        ("junction.barrier_nm", Number),
        ("junction.tls_charge_e", Number),
        ("analysis.alpha_inv_us_ghz3", Number),
        ("analysis.temperature_mk", Number),
        ("fit.policy", Policy),
        ("fit.seeds", Integer),
        ("fit.rng_seed", Integer),
        ("fit.max_iterations", Integer),
        ("fit.f_spread_tol", Number),
        ("fit.bounds.e_c_ghz", Pair),
        ("fit.bounds.e_j_ghz", Pair),
        ("fit.bounds.t_12_ghz", Pair),
    ]
    .into_iter()
    .map(|(k, t)| (k.to_string(), t))
    .collect();
    for i in 1..=2 {
        for f in TLS_FIELDS {
            keys.push((format!("tls{i}.{f}"), Number));
            keys.push((format!("fit.bounds.tls{i}.{f}"), Pair));
        }
    }
    keys
}

/// True for `[+-]digits[.digits][(e|E)[+-]digits]` (a leading or trailing
/// dot is allowed as long as there is at least one mantissa digit).
fn is_decimal(s: &str) -> bool {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let mut digits = 0;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
        digits += 1;
    }
    if i < b.len() && b[i] == b'.' {
        i += 1;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
            digits += 1;
        }
    }
    if digits == 0 {
        return false;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        let start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == start {
            return false;
        }
    }
    i == b.len()
}

#[derive(Debug, Clone)]
enum Value {
    Number(f64),
    Integer(u64),
    Text(String),
    Pair(f64, f64),
    Policy(AssignmentPolicy),
}

struct Entry {
    line: usize,
    value: Value,
}

fn parse_value(line: usize, key: &str, raw: &str, kind: Kind) -> Result<Value, ConfigError> {
    let bad = |expected: &'static str| ConfigError::BadValue {
        line,
        key: key.to_string(),
        value: raw.to_string(),
        expected,
    };
    match kind {
        Kind::Number => {
            if !is_decimal(raw) {
                return Err(bad("decimal number"));
            }
            let v: f64 = raw.parse().map_err(|_| bad("decimal number"))?;
            if !v.is_finite() {
                return Err(bad("finite decimal number"));
            }
            Ok(Value::Number(v))
        }
        Kind::Integer => raw
            .parse::<u64>()
            .map(Value::Integer)
            .map_err(|_| bad("non-negative integer")),
        Kind::Text => {
            if raw.is_empty() {
                Err(bad("non-empty text"))
            } else {
                Ok(Value::Text(raw.to_string()))
            }
        }
        Kind::Pair => {
            let (a, b) = raw.split_once(',').ok_or_else(|| bad("`lower, upper`"))?;
            let (a, b) = (a.trim(), b.trim());
            if !is_decimal(a) || !is_decimal(b) {
                return Err(bad("`lower, upper`"));
            }
            let lo: f64 = a.parse().map_err(|_| bad("`lower, upper`"))?;
            let hi: f64 = b.parse().map_err(|_| bad("`lower, upper`"))?;
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(bad("`lower, upper`"));
            }
            Ok(Value::Pair(lo, hi))
        }
        Kind::Policy => match raw {
            "nearest" | "nearest-branch" => Ok(Value::Policy(AssignmentPolicy::NearestBranch)),
            "hinted" => Ok(Value::Policy(AssignmentPolicy::Hinted)),
            _ => Err(bad("`nearest-branch` or `hinted`")),
        },
    }
}

/// Parses and validates a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let known: BTreeMap<String, Kind> = known_keys().into_iter().collect();
    let mut entries: BTreeMap<String, Entry> = BTreeMap::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw_line.split_once('#') {
            Some((before, _)) => before,
            None => raw_line,
        }
        .trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or(ConfigError::Syntax { line })?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(ConfigError::Syntax { line });
        }
        let kind = *known.get(key).ok_or_else(|| ConfigError::UnknownKey {
            line,
            key: key.to_string(),
        })?;
        if let Some(first) = entries.get(key) {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
                first: first.line,
            });
        }
        let value = parse_value(line, key, value, kind)?;
        entries.insert(key.to_string(), Entry { line, value });
    }

    Builder { entries }.build()
}

struct Builder {
    entries: BTreeMap<String, Entry>,
}

impl Builder {
    fn line(&self, key: &str) -> usize {
        self.entries.get(key).map(|e| e.line).unwrap_or(0)
    }

    fn invalid(&self, key: &str, reason: impl Into<String>) -> ConfigError {
        ConfigError::Invalid {
            line: self.line(key),
            key: key.to_string(),
            reason: reason.into(),
        }
    }

    fn number(&self, key: &str) -> Option<f64> {
        match self.entries.get(key).map(|e| &e.value) {
            Some(Value::Number(v)) => Some(*v),
            _ => None,
        }
    }

    fn integer(&self, key: &str) -> Option<u64> {
        match self.entries.get(key).map(|e| &e.value) {
            Some(Value::Integer(v)) => Some(*v),
            _ => None,
        }
    }

    fn text(&self, key: &str) -> Option<String> {
        match self.entries.get(key).map(|e| &e.value) {
            Some(Value::Text(v)) => Some(v.clone()),
            _ => None,
        }
    }

    fn interval(&self, key: &str, default: Interval) -> Result<Interval, ConfigError> {
        match self.entries.get(key).map(|e| &e.value) {
            Some(Value::Pair(lo, hi)) => {
                if lo > hi {
                    Err(self.invalid(key, "lower bound exceeds upper bound"))
                } else {
                    Ok(Interval::new(*lo, *hi))
                }
            }
            _ => Ok(default),
        }
    }

    fn build(self) -> Result<RunConfig, ConfigError> {
        let mut missing = Vec::new();
        for key in ["model.tls_count", "cpb.e_c_ghz", "cpb.e_j_max_ghz"] {
            if !self.entries.contains_key(key) {
                missing.push(key.to_string());
            }
        }
        let tls_count = self.integer("model.tls_count");
        if let Some(n) = tls_count {
            if n > 2 {
                return Err(self.invalid("model.tls_count", "must be 0, 1 or 2"));
            }
            for i in 1..=n {
                for f in TLS_FIELDS {
                    let key = format!("tls{i}.{f}");
                    if !self.entries.contains_key(&key) {
                        missing.push(key);
                    }
                }
            }
            if n == 2 && !self.entries.contains_key("t_12_ghz") {
                missing.push("t_12_ghz".into());
            }
        }
        if !missing.is_empty() {
            return Err(ConfigError::Missing(missing));
        }
        let tls_count = tls_count.expect("checked above") as usize;

        // Parameters for fluctuators the model does not have are typos.
        for key in self.entries.keys() {
            let extra_tls = (tls_count + 1..=2).any(|i| {
                key.starts_with(&format!("tls{i}.")) || key.starts_with(&format!("fit.bounds.tls{i}."))
            });
            if extra_tls || (tls_count < 2 && key.ends_with("t_12_ghz")) {
                return Err(self.invalid(
                    key,
                    format!("not used by a model with {tls_count} TLS"),
                ));
            }
        }

        let n_charge = self.integer("cpb.n_charge_states").unwrap_or(4) as usize;
        let cpb = CpbParams::new(
            self.number("cpb.e_c_ghz").expect("required"),
            self.number("cpb.e_j_max_ghz").expect("required"),
            n_charge,
        )
        .map_err(|e| self.invalid("cpb", e.to_string()))?;
        let tls: Vec<TlsParams> = (1..=tls_count)
            .map(|i| TlsParams {
                e_r: self.number(&format!("tls{i}.e_r_ghz")).expect("required"),
                t_lr: self.number(&format!("tls{i}.t_lr_ghz")).expect("required"),
                e_int: self.number(&format!("tls{i}.e_int_ghz")).expect("required"),
                delta_e_j: self.number(&format!("tls{i}.delta_e_j_ghz")).expect("required"),
            })
            .collect();
        for (i, t) in tls.iter().enumerate() {
            if t.t_lr < 0.0 {
                return Err(self.invalid(&format!("tls{}.t_lr_ghz", i + 1), "must be non-negative"));
            }
        }
        let model = ModelConfig {
            cpb,
            flux_ratio: self.number("flux.ratio").unwrap_or(0.0),
            tls,
            t_12: self.number("t_12_ghz").unwrap_or(0.0),
        };

        let defaults = GridSpec::default();
        let grid = GridSpec {
            start: self.number("grid.start").unwrap_or(defaults.start),
            stop: self.number("grid.stop").unwrap_or(defaults.stop),
            step: self.number("grid.step").unwrap_or(defaults.step),
        };
        if grid.step <= 0.0 {
            return Err(self.invalid("grid.step", "must be positive"));
        }
        if grid.start >= grid.stop {
            return Err(self.invalid("grid.start", "must be below grid.stop"));
        }
        if grid.start < 0.0 || grid.stop > 2.0 {
            return Err(self.invalid("grid.start", "grid must lie within [0, 2]"));
        }

        let dim = model.dim();
        let max_states = match self.integer("spectrum.max_states") {
            Some(k) => {
                let k = k as usize;
                if k == 0 || k >= dim {
                    return Err(self.invalid(
                        "spectrum.max_states",
                        format!("must lie in 1..{dim} for this model"),
                    ));
                }
                k
            }
            None => 4.min(dim - 1),
        };

        let outputs = OutputPaths {
            spectrum_csv: self.text("output.spectrum_csv"),
            spectrum_svg: self.text("output.spectrum_svg"),
            fit_report: self.text("output.fit_report"),
            residuals_csv: self.text("output.residuals_csv"),
            analysis_report: self.text("output.analysis_report"),
            sweep_dir: self.text("output.sweep_dir"),
        };

        let resonator = match (
            self.number("resonator.omega_r_ghz"),
            self.number("resonator.g_ghz"),
        ) {
            (None, None) => None,
            (Some(omega_r), Some(g)) => {
                let r = ResonatorParams { omega_r, g };
                r.validate()
                    .map_err(|e| self.invalid("resonator.omega_r_ghz", e.to_string()))?;
                Some(r)
            }
            (Some(_), None) => return Err(ConfigError::Missing(vec!["resonator.g_ghz".into()])),
            (None, Some(_)) => {
                return Err(ConfigError::Missing(vec!["resonator.omega_r_ghz".into()]))
            }
        };

        let junction_keys = ["junction.area_nm2", "junction.barrier_nm", "junction.tls_charge_e"];
        let junction = if junction_keys.iter().any(|k| self.entries.contains_key(*k)) {
            let nominal = JunctionGeometry::NOMINAL;
            let geom = JunctionGeometry {
                area: self.number("junction.area_nm2").unwrap_or(nominal.area),
                barrier_thickness: self.number("junction.barrier_nm").unwrap_or(nominal.barrier_thickness),
                tls_charge: self.number("junction.tls_charge_e").unwrap_or(nominal.tls_charge),
            };
            for (key, v) in junction_keys
                .iter()
                .zip([geom.area, geom.barrier_thickness, geom.tls_charge])
            {
                if v <= 0.0 {
                    return Err(self.invalid(key, "must be positive"));
                }
            }
            Some(geom)
        } else {
            None
        };

        let lifetime_defaults = LifetimeInputs::default();
        let lifetime = LifetimeInputs {
            alpha_inv: self
                .number("analysis.alpha_inv_us_ghz3")
                .unwrap_or(lifetime_defaults.alpha_inv),
            temperature_mk: self
                .number("analysis.temperature_mk")
                .unwrap_or(lifetime_defaults.temperature_mk),
        };
        if lifetime.temperature_mk <= 0.0 {
            return Err(self.invalid("analysis.temperature_mk", "must be positive"));
        }

        let fit = self.fit_options()?;
        Ok(RunConfig {
            model,
            grid,
            max_states,
            outputs,
            resonator,
            junction,
            lifetime,
            fit,
        })
    }

    fn fit_options(&self) -> Result<FitOptions, ConfigError> {
        let d = FitOptions::default();
        let policy = match self.entries.get("fit.policy").map(|e| &e.value) {
            Some(Value::Policy(p)) => *p,
            _ => d.policy,
        };
        let max_iterations = self
            .integer("fit.max_iterations")
            .map(|v| v as usize)
            .unwrap_or(d.optimizer.max_iterations);
        let f_spread_tol = self.number("fit.f_spread_tol").unwrap_or(d.optimizer.f_spread_tol);
        if f_spread_tol < 0.0 {
            return Err(self.invalid("fit.f_spread_tol", "must be non-negative"));
        }
        let b = d.bounds;
        let mut bounds = BoundSet {
            e_c: self.interval("fit.bounds.e_c_ghz", b.e_c)?,
            e_j: self.interval("fit.bounds.e_j_ghz", b.e_j)?,
            t_12: self.interval("fit.bounds.t_12_ghz", b.t_12)?,
            ..b
        };
        for i in 0..2 {
            let n = i + 1;
            bounds.e_r[i] = self.interval(&format!("fit.bounds.tls{n}.e_r_ghz"), b.e_r[i])?;
            bounds.t_lr[i] = self.interval(&format!("fit.bounds.tls{n}.t_lr_ghz"), b.t_lr[i])?;
            bounds.e_int[i] = self.interval(&format!("fit.bounds.tls{n}.e_int_ghz"), b.e_int[i])?;
            bounds.delta_e_j[i] =
                self.interval(&format!("fit.bounds.tls{n}.delta_e_j_ghz"), b.delta_e_j[i])?;
        }
        Ok(FitOptions {
            policy,
            seeds: self.integer("fit.seeds").unwrap_or(0) as usize,
            rng_seed: self.integer("fit.rng_seed").unwrap_or(0),
            optimizer: NelderMeadOptions {
                max_iterations,
                f_spread_tol,
                ..d.optimizer
            },
            bounds,
        })
    }
}

/// Canonical text form: every setting written explicitly in a fixed order.
/// Parsing the result gives back an identical configuration.
pub fn to_canonical_text(config: &RunConfig) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: &dyn fmt::Display| {
        writeln!(out, "{k} = {v}").expect("writing to a String cannot fail");
    };
    let m = &config.model;
    kv("model.tls_count", &m.tls.len());
    kv("cpb.e_c_ghz", &m.cpb.e_c);
    kv("cpb.e_j_max_ghz", &m.cpb.e_j_max);
    kv("cpb.n_charge_states", &m.cpb.n_charge_states);
    kv("flux.ratio", &m.flux_ratio);
    for (i, t) in m.tls.iter().enumerate() {
        let n = i + 1;
        kv(&format!("tls{n}.e_r_ghz"), &t.e_r);
        kv(&format!("tls{n}.t_lr_ghz"), &t.t_lr);
        kv(&format!("tls{n}.e_int_ghz"), &t.e_int);
        kv(&format!("tls{n}.delta_e_j_ghz"), &t.delta_e_j);
    }
    if m.tls.len() == 2 {
        kv("t_12_ghz", &m.t_12);
    }
    kv("grid.start", &config.grid.start);
    kv("grid.stop", &config.grid.stop);
    kv("grid.step", &config.grid.step);
    kv("spectrum.max_states", &config.max_states);
    let o = &config.outputs;
    for (k, v) in [
        ("output.spectrum_csv", &o.spectrum_csv),
        ("output.spectrum_svg", &o.spectrum_svg),
        ("output.fit_report", &o.fit_report),
        ("output.residuals_csv", &o.residuals_csv),
        ("output.analysis_report", &o.analysis_report),
        ("output.sweep_dir", &o.sweep_dir),
    ] {
        if let Some(p) = v {
            kv(k, p);
        }
    }
    if let Some(r) = &config.resonator {
        kv("resonator.omega_r_ghz", &r.omega_r);
        kv("resonator.g_ghz", &r.g);
    }
    if let Some(j) = &config.junction {
        kv("junction.area_nm2", &j.area);
        kv("junction.barrier_nm", &j.barrier_thickness);
        kv("junction.tls_charge_e", &j.tls_charge);
    }
    kv("analysis.alpha_inv_us_ghz3", &config.lifetime.alpha_inv);
    kv("analysis.temperature_mk", &config.lifetime.temperature_mk);
    let f = &config.fit;
    let policy = match f.policy {
        AssignmentPolicy::NearestBranch => "nearest-branch",
        AssignmentPolicy::Hinted => "hinted",
    };
    kv("fit.policy", &policy);
    kv("fit.seeds", &f.seeds);
    kv("fit.rng_seed", &f.rng_seed);
    kv("fit.max_iterations", &f.optimizer.max_iterations);
    kv("fit.f_spread_tol", &f.optimizer.f_spread_tol);
    let pair = |i: Interval| format!("{}, {}", i.lower, i.upper);
    kv("fit.bounds.e_c_ghz", &pair(f.bounds.e_c));
    kv("fit.bounds.e_j_ghz", &pair(f.bounds.e_j));
    for i in 0..m.tls.len() {
        let n = i + 1;
        kv(&format!("fit.bounds.tls{n}.e_r_ghz"), &pair(f.bounds.e_r[i]));
        kv(&format!("fit.bounds.tls{n}.t_lr_ghz"), &pair(f.bounds.t_lr[i]));
        kv(&format!("fit.bounds.tls{n}.e_int_ghz"), &pair(f.bounds.e_int[i]));
        kv(&format!("fit.bounds.tls{n}.delta_e_j_ghz"), &pair(f.bounds.delta_e_j[i]));
    }
    if m.tls.len() == 2 {
        kv("fit.bounds.t_12_ghz", &pair(f.bounds.t_12));
    }
    out
}
