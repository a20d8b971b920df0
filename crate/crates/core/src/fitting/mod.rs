//! Fitting one- and two-TLS models to spectral ridge data.
//!
//! Several flux-bias datasets can be fitted jointly. The charging energy and
//! the fluctuator parameters (`E_R`, `E_int`, `T_LR`, and `T_12` for two
//! fluctuators) are shared; each dataset gets its own `E_J` and `ΔE_J` per
//! fluctuator.

pub mod nelder_mead;
mod synthetic;

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::hamiltonian::{CpbParams, ModelConfig, TlsParams};
use crate::spectra::{bright_transitions, Levels, SpectraError};

pub use nelder_mead::NelderMeadOptions;
pub use synthetic::{synthetic_ridges, SyntheticOptions};

/// Bright-line floor relative to the brightest transition at a gate charge.
pub const VISIBILITY_FLOOR: f64 = 0.01;
/// Contribution (GHz^2) of a point that cannot be assigned to any line.
pub const UNASSIGNED_PENALTY: f64 = 1e4;
/// Minimum number of points in at least one dataset.
pub const MIN_POINTS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error("invalid fit problem: {0}")]
    InvalidProblem(String),
    #[error("parameter {label} = {value} lies outside [{lower}, {upper}]")]
    OutOfBounds {
        label: String,
        value: f64,
        lower: f64,
        upper: f64,
    },
    #[error("expected {expected} parameters, got {found}")]
    WrongLength { expected: usize, found: usize },
}

/// One digitized point on a spectral ridge.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgePoint {
    pub n_g: f64,
    /// GHz
    pub freq: f64,
    pub weight: f64,
    /// Ordinal of the bright line (ascending frequency) this point belongs to.
    pub branch_hint: Option<usize>,
}

impl RidgePoint {
    pub fn new(n_g: f64, freq: f64) -> Self {
        Self {
            n_g,
            freq,
            weight: 1.0,
            branch_hint: None,
        }
    }
}

/// Ridge points measured at one flux bias.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub label: String,
    pub points: Vec<RidgePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    SingleTls,
    TwoTls,
}

impl ModelKind {
    pub fn tls_count(self) -> usize {
        match self {
            ModelKind::SingleTls => 1,
            ModelKind::TwoTls => 2,
        }
    }

    pub fn from_tls_count(n: usize) -> Option<Self> {
        match n {
            1 => Some(ModelKind::SingleTls),
            2 => Some(ModelKind::TwoTls),
            _ => None,
        }
    }
}

/// How ridge points are matched to model lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignmentPolicy {
    /// Closest bright line in frequency; hints are ignored.
    NearestBranch,
    /// The bright line whose ascending ordinal equals the point's hint.
    /// Points without a hint fall back to the nearest line.
    Hinted,
}

/// What a parameter controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamRole {
    ChargingEnergy,
    Asymmetry(usize),
    ChargeCoupling(usize),
    Tunneling(usize),
    TlsTlsTunneling,
    Josephson { dataset: usize },
    JosephsonModulation { dataset: usize, tls: usize },
}

/// Closed interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub const fn new(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower && x <= self.upper
    }
}

/// Bounds per parameter family, applied to every dataset or fluctuator.
/// A zero-width interval pins the parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSet {
    pub e_c: Interval,
    pub e_j: Interval,
    pub delta_e_j: [Interval; 2],
    pub e_r: [Interval; 2],
    pub e_int: [Interval; 2],
    pub t_lr: [Interval; 2],
    pub t_12: Interval,
}

impl Default for BoundSet {
    fn default() -> Self {
        Self {
            e_c: Interval::new(1.0, 10.0),
            e_j: Interval::new(0.5, 15.0),
            delta_e_j: [Interval::new(-4.0, 4.0); 2],
            e_r: [Interval::new(-2.0, 2.0); 2],
            e_int: [Interval::new(-1.0, 1.0); 2],
            t_lr: [Interval::new(0.0, 0.2); 2],
            t_12: Interval::new(0.0, 0.2),
        }
    }
}

impl BoundSet {
    pub fn for_role(&self, role: ParamRole) -> Interval {
        match role {
            ParamRole::ChargingEnergy => self.e_c,
            ParamRole::Asymmetry(i) => self.e_r[i],
            ParamRole::ChargeCoupling(i) => self.e_int[i],
            ParamRole::Tunneling(i) => self.t_lr[i],
            ParamRole::TlsTlsTunneling => self.t_12,
            ParamRole::Josephson { .. } => self.e_j,
            ParamRole::JosephsonModulation { tls, .. } => self.delta_e_j[tls],
        }
    }
}

/// A labelled parameter slot with its bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub label: String,
    pub role: ParamRole,
    pub bounds: Interval,
}

/// Datasets, model structure and bounds of a fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitProblem {
    pub datasets: Vec<Dataset>,
    pub kind: ModelKind,
    pub n_charge_states: usize,
    pub policy: AssignmentPolicy,
    params: Vec<ParamSpec>,
}

impl FitProblem {
    pub fn new(
        datasets: Vec<Dataset>,
        kind: ModelKind,
        n_charge_states: usize,
        bounds: &BoundSet,
        policy: AssignmentPolicy,
    ) -> Result<Self, FitError> {
        if datasets.is_empty() {
            return Err(FitError::InvalidProblem("no datasets".into()));
        }
        if !datasets.iter().any(|d| d.points.len() >= MIN_POINTS) {
            return Err(FitError::InvalidProblem(format!(
                "at least one dataset needs {MIN_POINTS} or more points"
            )));
        }
        for d in &datasets {
            for (i, p) in d.points.iter().enumerate() {
                let valid = p.n_g.is_finite()
                    && (0.0..=2.0).contains(&p.n_g)
                    && p.freq.is_finite()
                    && p.freq > 0.0
                    && p.weight.is_finite()
                    && p.weight >= 0.0;
                if !valid {
                    return Err(FitError::InvalidProblem(format!(
                        "dataset {:?} point {i} is out of range",
                        d.label
                    )));
                }
            }
        }
        CpbParams::new(1.0, 1.0, n_charge_states)
            .map_err(|e| FitError::InvalidProblem(e.to_string()))?;

        let params = layout(&datasets, kind, bounds);
        for p in &params {
            let b = p.bounds;
            if !(b.lower.is_finite() && b.upper.is_finite()) || b.lower > b.upper {
                return Err(FitError::InvalidProblem(format!(
                    "bad bounds [{}, {}] for {}",
                    b.lower, b.upper, p.label
                )));
            }
        }
        Ok(Self {
            datasets,
            kind,
            n_charge_states,
            policy,
            params,
        })
    }

    pub fn params(&self) -> &[ParamSpec] {
        &self.params
    }

    pub fn labels(&self) -> Vec<String> {
        self.params.iter().map(|p| p.label.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.params.iter().position(|p| p.label == label)
    }

    pub fn lower(&self) -> Vec<f64> {
        self.params.iter().map(|p| p.bounds.lower).collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        self.params.iter().map(|p| p.bounds.upper).collect()
    }

    /// Parameter vector reproducing `model` for every dataset.
    pub fn initial_from(&self, model: &ModelConfig) -> Vec<f64> {
        self.params
            .iter()
            .map(|p| match p.role {
                ParamRole::ChargingEnergy => model.cpb.e_c,
                ParamRole::Asymmetry(i) => model.tls[i].e_r,
                ParamRole::ChargeCoupling(i) => model.tls[i].e_int,
                ParamRole::Tunneling(i) => model.tls[i].t_lr,
                ParamRole::TlsTlsTunneling => model.t_12,
                ParamRole::Josephson { .. } => model.e_j(),
                ParamRole::JosephsonModulation { tls, .. } => model.tls[tls].delta_e_j,
            })
            .collect()
    }

    /// Clamps `params` into the bounds.
    pub fn clip(&self, params: &[f64]) -> Vec<f64> {
        params
            .iter()
            .zip(&self.params)
            .map(|(x, p)| x.clamp(p.bounds.lower, p.bounds.upper))
            .collect()
    }

    pub fn check(&self, params: &[f64]) -> Result<(), FitError> {
        if params.len() != self.params.len() {
            return Err(FitError::WrongLength {
                expected: self.params.len(),
                found: params.len(),
            });
        }
        for (x, p) in params.iter().zip(&self.params) {
            if !p.bounds.contains(*x) {
                return Err(FitError::OutOfBounds {
                    label: p.label.clone(),
                    value: *x,
                    lower: p.bounds.lower,
                    upper: p.bounds.upper,
                });
            }
        }
        Ok(())
    }

    /// Model for dataset `dataset` at parameter vector `params`.
    pub fn model_for(&self, params: &[f64], dataset: usize) -> ModelConfig {
        let n_tls = self.kind.tls_count();
        let mut e_c = 0.0;
        let mut e_j = 0.0;
        let mut tls = vec![TlsParams::default(); n_tls];
        let mut t_12 = 0.0;
        for (x, p) in params.iter().zip(&self.params) {
            match p.role {
                ParamRole::ChargingEnergy => e_c = *x,
                ParamRole::Asymmetry(i) => tls[i].e_r = *x,
                ParamRole::ChargeCoupling(i) => tls[i].e_int = *x,
                ParamRole::Tunneling(i) => tls[i].t_lr = *x,
                ParamRole::TlsTlsTunneling => t_12 = *x,
                ParamRole::Josephson { dataset: d } if d == dataset => e_j = *x,
                ParamRole::JosephsonModulation { dataset: d, tls: i } if d == dataset => {
                    tls[i].delta_e_j = *x
                }
                _ => {}
            }
        }
        ModelConfig {
            cpb: CpbParams {
                e_c,
                e_j_max: e_j,
                n_charge_states: self.n_charge_states,
            },
            flux_ratio: 0.0,
            tls,
            t_12,
        }
    }
}

fn layout(datasets: &[Dataset], kind: ModelKind, bounds: &BoundSet) -> Vec<ParamSpec> {
    let n_tls = kind.tls_count();
    let mut specs = Vec::new();
    let mut push = |label: String, role: ParamRole| {
        specs.push(ParamSpec {
            label,
            role,
            bounds: bounds.for_role(role),
        })
    };
    push("e_c".into(), ParamRole::ChargingEnergy);
    for i in 0..n_tls {
        push(format!("tls{}.e_r", i + 1), ParamRole::Asymmetry(i));
        push(format!("tls{}.e_int", i + 1), ParamRole::ChargeCoupling(i));
        push(format!("tls{}.t_lr", i + 1), ParamRole::Tunneling(i));
    }
    if n_tls == 2 {
        push("t_12".into(), ParamRole::TlsTlsTunneling);
    }
    for (d, ds) in datasets.iter().enumerate() {
        push(format!("{}.e_j", ds.label), ParamRole::Josephson { dataset: d });
        for i in 0..n_tls {
            push(
                format!("{}.tls{}.delta_e_j", ds.label, i + 1),
                ParamRole::JosephsonModulation { dataset: d, tls: i },
            );
        }
    }
    specs
}

/// Residual bookkeeping for one ridge point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResidual {
    pub dataset: usize,
    pub point: usize,
    pub n_g: f64,
    pub freq: f64,
    /// Assigned model line, if any.
    pub model_freq: Option<f64>,
    pub weight: f64,
    /// Weighted squared residual, or the penalty for unassigned points.
    pub contribution: f64,
}

impl PointResidual {
    pub fn flagged(&self) -> bool {
        self.model_freq.is_none()
    }

    pub fn residual(&self) -> Option<f64> {
        self.model_freq.map(|m| self.freq - m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveReport {
    /// Σ weight · residual^2 (GHz^2).
    pub value: f64,
    pub residuals: Vec<PointResidual>,
}

impl ObjectiveReport {
    pub fn flagged(&self) -> usize {
        self.residuals.iter().filter(|r| r.flagged()).count()
    }
}

fn assign(policy: AssignmentPolicy, lines: &[f64], point: &RidgePoint) -> Option<f64> {
    let nearest = || {
        lines.iter().copied().min_by(|a, b| {
            (a - point.freq)
                .abs()
                .total_cmp(&(b - point.freq).abs())
                .then(a.total_cmp(b))
        })
    };
    match (policy, point.branch_hint) {
        (AssignmentPolicy::Hinted, Some(h)) => lines.get(h).copied(),
        _ => nearest(),
    }
}

/// Bright lines (ascending frequency) of `model` at every distinct gate
/// charge of `points`.
fn bright_lines_by_gate(
    model: &ModelConfig,
    points: &[RidgePoint],
) -> Result<HashMap<u64, Vec<f64>>, FitError> {
    let mut cache: HashMap<u64, Vec<f64>> = HashMap::new();
    for p in points {
        let key = p.n_g.to_bits();
        if cache.contains_key(&key) {
            continue;
        }
        let levels = Levels::solve(model, p.n_g)?;
        let mut lines: Vec<f64> = bright_transitions(&levels, VISIBILITY_FLOOR)
            .into_iter()
            .map(|(_, f)| f)
            .collect();
        lines.sort_by(f64::total_cmp);
        cache.insert(key, lines);
    }
    Ok(cache)
}

/// Weighted least-squares objective with per-point residuals.
pub fn objective_report(problem: &FitProblem, params: &[f64]) -> Result<ObjectiveReport, FitError> {
    problem.check(params)?;
    let mut residuals = Vec::new();
    for (d, ds) in problem.datasets.iter().enumerate() {
        let model = problem.model_for(params, d);
        let lines = bright_lines_by_gate(&model, &ds.points)?;
        for (i, p) in ds.points.iter().enumerate() {
            let model_freq = assign(problem.policy, &lines[&p.n_g.to_bits()], p);
            let contribution = match model_freq {
                Some(m) => p.weight * (p.freq - m) * (p.freq - m),
                None => UNASSIGNED_PENALTY,
            };
            residuals.push(PointResidual {
                dataset: d,
                point: i,
                n_g: p.n_g,
                freq: p.freq,
                model_freq,
                weight: p.weight,
                contribution,
            });
        }
    }
    // Summing in sorted order makes the total independent of point order.
    let mut terms: Vec<f64> = residuals.iter().map(|r| r.contribution).collect();
    terms.sort_by(f64::total_cmp);
    let value = terms.iter().sum();
    Ok(ObjectiveReport { value, residuals })
}

/// Objective value only.
pub fn objective(problem: &FitProblem, params: &[f64]) -> Result<f64, FitError> {
    objective_report(problem, params).map(|r| r.value)
}

/// Optimized parameters and diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub labels: Vec<String>,
    pub params: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub residuals: Vec<PointResidual>,
}

impl FitResult {
    pub fn get(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.params[i])
    }
}

/// Nelder-Mead over the free (non-pinned) parameters.
pub fn fit(
    problem: &FitProblem,
    initial: &[f64],
    options: &NelderMeadOptions,
) -> Result<FitResult, FitError> {
    problem.check(initial)?;
    let free: Vec<usize> = problem
        .params()
        .iter()
        .enumerate()
        .filter(|(_, p)| p.bounds.width() > 0.0)
        .map(|(i, _)| i)
        .collect();
    let expand = |x: &[f64]| -> Vec<f64> {
        let mut full = initial.to_vec();
        for (&i, &v) in free.iter().zip(x) {
            full[i] = v;
        }
        full
    };
    let x0: Vec<f64> = free.iter().map(|&i| initial[i]).collect();
    let lower: Vec<f64> = free.iter().map(|&i| problem.params()[i].bounds.lower).collect();
    let upper: Vec<f64> = free.iter().map(|&i| problem.params()[i].bounds.upper).collect();

    let outcome = nelder_mead::minimize(
        |x| objective(problem, &expand(x)),
        &x0,
        &lower,
        &upper,
        options,
    )?;
    let params = expand(&outcome.x);
    let report = objective_report(problem, &params)?;
    Ok(FitResult {
        labels: problem.labels(),
        params,
        objective: report.value,
        iterations: outcome.iterations,
        evaluations: outcome.evaluations,
        converged: outcome.converged,
        residuals: report.residuals,
    })
}

/// Range of one parameter over the near-optimal multistart results.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpread {
    pub label: String,
    pub min: f64,
    pub max: f64,
}

impl ParamSpread {
    /// `(max - min) / |best|`, or the absolute spread when `best` is zero.
    pub fn relative_to(&self, best: f64) -> f64 {
        let spread = self.max - self.min;
        if best == 0.0 {
            spread
        } else {
            spread / best.abs()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultistartResult {
    pub best: FitResult,
    pub best_seed: usize,
    /// Starting vector of every run, in seed order.
    pub starts: Vec<Vec<f64>>,
    /// Final objective of every run, in seed order.
    pub objectives: Vec<f64>,
    /// Number of runs whose objective is within twice the best.
    pub near_optimal: usize,
    pub spread: Vec<ParamSpread>,
}

/// Uniform random starting points inside the bounds (pinned parameters keep
/// their value).
pub fn sample_starts(problem: &FitProblem, count: usize, rng_seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    (0..count)
        .map(|_| {
            problem
                .params()
                .iter()
                .map(|p| {
                    if p.bounds.width() > 0.0 {
                        rng.random_range(p.bounds.lower..=p.bounds.upper)
                    } else {
                        p.bounds.lower
                    }
                })
                .collect()
        })
        .collect()
}

/// Runs [`fit`] from `seed_count` random starts and keeps the best result.
///
/// Runs are independent and execute in parallel; the winner is chosen by
/// `(objective, seed index)` so the outcome does not depend on scheduling.
pub fn multistart(
    problem: &FitProblem,
    seed_count: usize,
    rng_seed: u64,
    options: &NelderMeadOptions,
) -> Result<MultistartResult, FitError> {
    if seed_count == 0 {
        return Err(FitError::InvalidProblem("seed_count must be at least 1".into()));
    }
    let starts = sample_starts(problem, seed_count, rng_seed);
    let results: Vec<FitResult> = starts
        .par_iter()
        .map(|s| fit(problem, s, options))
        .collect::<Result<_, _>>()?;

    let best_seed = (0..results.len())
        .min_by(|&a, &b| {
            results[a]
                .objective
                .total_cmp(&results[b].objective)
                .then(a.cmp(&b))
        })
        .expect("at least one run");
    let best_obj = results[best_seed].objective;
    let near: Vec<&FitResult> = results
        .iter()
        .filter(|r| r.objective <= 2.0 * best_obj)
        .collect();
    let spread = problem
        .labels()
        .into_iter()
        .enumerate()
        .map(|(i, label)| ParamSpread {
            label,
            min: near.iter().map(|r| r.params[i]).fold(f64::INFINITY, f64::min),
            max: near.iter().map(|r| r.params[i]).fold(f64::NEG_INFINITY, f64::max),
        })
        .collect();
    let objectives = results.iter().map(|r| r.objective).collect();
    let near_optimal = near.len();
    Ok(MultistartResult {
        best: results.into_iter().nth(best_seed).expect("index in range"),
        best_seed,
        starts,
        objectives,
        near_optimal,
        spread,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set4() -> ModelConfig {
        ModelConfig::single(
            CpbParams::new(4.5, 6.33, 4).unwrap(),
            TlsParams {
                e_r: 0.62,
                t_lr: 0.06,
                e_int: 0.35,
                delta_e_j: 2.02,
            },
        )
    }

    fn dataset(label: &str, n: usize) -> Dataset {
        Dataset {
            label: label.into(),
            points: (0..n)
                .map(|i| RidgePoint::new(0.9 + 0.01 * i as f64, 7.0))
                .collect(),
        }
    }

    #[test]
    fn layout_labels() {
        let p = FitProblem::new(
            vec![dataset("a", 8), dataset("b", 8)],
            ModelKind::TwoTls,
            4,
            &BoundSet::default(),
            AssignmentPolicy::NearestBranch,
        )
        .unwrap();
        assert_eq!(
            p.labels(),
            vec![
                "e_c",
                "tls1.e_r",
                "tls1.e_int",
                "tls1.t_lr",
                "tls2.e_r",
                "tls2.e_int",
                "tls2.t_lr",
                "t_12",
                "a.e_j",
                "a.tls1.delta_e_j",
                "a.tls2.delta_e_j",
                "b.e_j",
                "b.tls1.delta_e_j",
                "b.tls2.delta_e_j",
            ]
        );
    }

    #[test]
    fn model_round_trip_through_parameters() {
        let p = FitProblem::new(
            vec![dataset("x", 8)],
            ModelKind::SingleTls,
            4,
            &BoundSet::default(),
            AssignmentPolicy::NearestBranch,
        )
        .unwrap();
        let x = p.initial_from(&set4());
        assert_eq!(p.model_for(&x, 0), set4());
    }

    #[test]
    fn problem_validation() {
        let too_small = FitProblem::new(
            vec![dataset("a", 7)],
            ModelKind::SingleTls,
            4,
            &BoundSet::default(),
            AssignmentPolicy::NearestBranch,
        );
        assert!(matches!(too_small, Err(FitError::InvalidProblem(_))));
        let mut bounds = BoundSet::default();
        bounds.e_c = Interval::new(5.0, 4.0);
        let bad = FitProblem::new(
            vec![dataset("a", 8)],
            ModelKind::SingleTls,
            4,
            &bounds,
            AssignmentPolicy::NearestBranch,
        );
        assert!(bad.is_err());
    }

    #[test]
    fn out_of_bounds_rejected() {
        let p = FitProblem::new(
            vec![dataset("a", 8)],
            ModelKind::SingleTls,
            4,
            &BoundSet::default(),
            AssignmentPolicy::NearestBranch,
        )
        .unwrap();
        let mut x = p.initial_from(&set4());
        x[3] = 0.5; // t_lr above its default upper bound of 0.2
        assert!(matches!(objective(&p, &x), Err(FitError::OutOfBounds { .. })));
        assert!(matches!(
            fit(&p, &x, &NelderMeadOptions::default()),
            Err(FitError::OutOfBounds { .. })
        ));
        assert!(matches!(
            objective(&p, &x[..3]),
            Err(FitError::WrongLength { .. })
        ));
    }

    #[test]
    fn hinted_out_of_range_is_penalized() {
        let mut ds = dataset("a", 8);
        ds.points[0].branch_hint = Some(50);
        let p = FitProblem::new(
            vec![ds],
            ModelKind::SingleTls,
            4,
            &BoundSet::default(),
            AssignmentPolicy::Hinted,
        )
        .unwrap();
        let report = objective_report(&p, &p.initial_from(&set4())).unwrap();
        assert_eq!(report.flagged(), 1);
        assert!(report.value >= UNASSIGNED_PENALTY);
        assert!(report.residuals[0].residual().is_none());
    }

    #[test]
    fn starts_are_reproducible_and_in_bounds() {
        let p = FitProblem::new(
            vec![dataset("a", 8)],
            ModelKind::SingleTls,
            4,
            &BoundSet::default(),
            AssignmentPolicy::NearestBranch,
        )
        .unwrap();
        let a = sample_starts(&p, 5, 7);
        assert_eq!(a, sample_starts(&p, 5, 7));
        assert_ne!(a, sample_starts(&p, 5, 8));
        for s in &a {
            p.check(s).unwrap();
        }
    }
}
