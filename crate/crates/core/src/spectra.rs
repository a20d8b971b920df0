//! Transition spectra over gate charge, eigenvector composition, visibility
//! and dispersive-shift diagnostics.

use rayon::prelude::*;
use thiserror::Error;

use crate::eigen::{eigendecompose, EigenError, EigenSystem};
use crate::hamiltonian::{
    block_terms, build_cpb_block, build_hamiltonian, charge_operator_diagonal, CpbParams,
    HamiltonianError, ModelConfig,
};

/// Transitions closer to the resonator than this are treated as resonant.
pub const RESONANCE_GUARD_GHZ: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error(transparent)]
    Model(#[from] HamiltonianError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error("requested {requested} excited states but the Hamiltonian has dimension {dim}")]
    TooManyStates { requested: usize, dim: usize },
    #[error("invalid gate-charge grid: {0}")]
    BadGrid(String),
    #[error("zero qubit-resonator detuning; the dispersive approximation does not apply")]
    ZeroDetuning,
    #[error("transition between states {j} and {k} is resonant with the resonator")]
    Resonant { j: usize, k: usize },
    #[error("invalid resonator parameters: {0}")]
    BadResonator(String),
}

/// One ground-to-excited transition at a fixed gate charge.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionLine {
    pub n_g: f64,
    /// `E_k - E_0` (GHz).
    pub freq: f64,
    /// Excited-state index `k >= 1`.
    pub state_index: usize,
    /// Weight of state `k` in the ground state's dominant TLS configuration.
    pub cpb_fraction: f64,
    /// Weight of state `k` in configurations where TLS 1 (resp. 2) is flipped
    /// relative to the ground state. Zero for absent fluctuators.
    pub tls_flip_fractions: [f64; 2],
    /// Probability that the CPB itself is excited: one minus the overlap of
    /// state `k` with the lowest CPB state of every well configuration.
    pub cpb_excitation: f64,
    /// `|<k| 2n - n_g |0>|^2`.
    pub visibility: f64,
}

/// Transition lines for an ascending gate-charge grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub grid: Vec<f64>,
    pub lines: Vec<TransitionLine>,
}

impl SpectrumTable {
    /// Lines for excited state `k`, in grid order.
    pub fn branch(&self, state_index: usize) -> impl Iterator<Item = &TransitionLine> {
        self.lines
            .iter()
            .filter(move |l| l.state_index == state_index)
    }

    pub fn max_state_index(&self) -> usize {
        self.lines.iter().map(|l| l.state_index).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonatorParams {
    /// Resonator frequency ω_r/2π (GHz).
    pub omega_r: f64,
    /// Coupling g/2π (GHz).
    pub g: f64,
}

impl ResonatorParams {
    pub fn validate(&self) -> Result<(), SpectraError> {
        if !(self.omega_r.is_finite() && self.omega_r > 0.0) {
            return Err(SpectraError::BadResonator(format!(
                "omega_r must be positive, got {}",
                self.omega_r
            )));
        }
        if !(self.g.is_finite() && self.g >= 0.0) {
            return Err(SpectraError::BadResonator(format!(
                "g must be non-negative, got {}",
                self.g
            )));
        }
        Ok(())
    }
}

/// Evenly spaced grid `start, start + step, ..., <= stop`.
pub fn uniform_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, SpectraError> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) || step <= 0.0 || start > stop
    {
        return Err(SpectraError::BadGrid(format!(
            "start {start}, stop {stop}, step {step}"
        )));
    }
    // Tolerate round-off in (stop - start) / step.
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// Two-state transition energy `sqrt((4 E_c (1 - n_g))^2 + E_J^2)`.
pub fn two_level_closed_form(e_c: f64, e_j: f64, n_g: f64) -> f64 {
    let detuning = 4.0 * e_c * (1.0 - n_g);
    detuning.hypot(e_j)
}

/// Expansion of [`two_level_closed_form`] about `n_g = 1`:
/// `E_J + 8 E_c^2 (1 - n_g)^2 / E_J`.
pub fn parabolic_approximation(e_c: f64, e_j: f64, n_g: f64) -> f64 {
    let d = 1.0 - n_g;
    e_j + 8.0 * e_c * e_c * d * d / e_j
}

/// Diagonalized model at one gate charge, with the bookkeeping needed to
/// classify eigenvectors.
#[derive(Debug, Clone)]
pub struct Levels {
    pub n_g: f64,
    pub system: EigenSystem,
    charge_diag: Vec<f64>,
    n_charge: usize,
}

impl Levels {
    pub fn solve(config: &ModelConfig, n_g: f64) -> Result<Self, SpectraError> {
        let h = build_hamiltonian(config, n_g)?;
        let system = eigendecompose(&h)?;
        Ok(Self {
            n_g,
            system,
            charge_diag: charge_operator_diagonal(config, n_g),
            n_charge: config.cpb.n_charge_states,
        })
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    pub fn transition(&self, k: usize) -> f64 {
        self.system.value(k) - self.system.value(0)
    }

    /// `<a| Q |b>` with Q the island charge operator.
    pub fn charge_element(&self, a: usize, b: usize) -> f64 {
        self.system
            .vector(a)
            .iter()
            .zip(self.system.vector(b))
            .zip(&self.charge_diag)
            .map(|((x, y), q)| x * q * y)
            .sum()
    }

    pub fn visibility(&self, k: usize) -> f64 {
        let m = self.charge_element(k, 0);
        m * m
    }

    /// Probability weight of state `k` in each TLS well configuration.
    pub fn config_weights(&self, k: usize) -> Vec<f64> {
        self.system
            .vector(k)
            .chunks_exact(self.n_charge)
            .map(|block| block.iter().map(|x| x * x).sum())
            .collect()
    }

    /// Well configuration carrying most of the ground state's weight.
    pub fn ground_config(&self) -> usize {
        let w = self.config_weights(0);
        let mut best = 0;
        for (c, &wc) in w.iter().enumerate() {
            if wc > w[best] {
                best = c;
            }
        }
        best
    }
}

/// Transitions `k = 1..=max_states` at one gate charge.
pub fn transitions_at(
    config: &ModelConfig,
    n_g: f64,
    max_states: usize,
) -> Result<Vec<TransitionLine>, SpectraError> {
    let dim = config.dim();
    if max_states >= dim {
        return Err(SpectraError::TooManyStates {
            requested: max_states,
            dim,
        });
    }
    let levels = Levels::solve(config, n_g)?;
    let block_grounds = block_ground_states(config, n_g)?;
    let ground_config = levels.ground_config();
    let lines = (1..=max_states)
        .map(|k| {
            let weights = levels.config_weights(k);
            let mut flips = [0.0; 2];
            for (c, &w) in weights.iter().enumerate() {
                let flipped = c ^ ground_config;
                for (i, f) in flips.iter_mut().enumerate() {
                    if flipped & (1 << i) != 0 {
                        *f += w;
                    }
                }
            }
            let vk = levels.system.vector(k);
            let ground_overlap: f64 = block_grounds
                .iter()
                .enumerate()
                .map(|(c, g)| {
                    let start = c * levels.n_charge;
                    let amp: f64 = g.iter().zip(&vk[start..]).map(|(a, b)| a * b).sum();
                    amp * amp
                })
                .sum();
            TransitionLine {
                n_g,
                freq: levels.transition(k).max(0.0),
                state_index: k,
                cpb_fraction: weights[ground_config].clamp(0.0, 1.0),
                tls_flip_fractions: flips.map(|f| f.clamp(0.0, 1.0)),
                cpb_excitation: (1.0 - ground_overlap).clamp(0.0, 1.0),
                visibility: levels.visibility(k),
            }
        })
        .collect();
    Ok(lines)
}

/// Lowest eigenvector of each diagonal CPB block.
fn block_ground_states(config: &ModelConfig, n_g: f64) -> Result<Vec<Vec<f64>>, SpectraError> {
    (0..config.config_count())
        .map(|c| {
            let t = block_terms(config, c);
            let block = build_cpb_block(&config.cpb, n_g, t.e_j_eff, t.e_int_sum, t.e_offset);
            Ok(eigendecompose(&block)?.vector(0).to_vec())
        })
        .collect()
}

/// Applies [`transitions_at`] across an ascending grid. Grid points are
/// evaluated in parallel and reassembled in grid order.
pub fn spectrum(
    config: &ModelConfig,
    grid: &[f64],
    max_states: usize,
) -> Result<SpectrumTable, SpectraError> {
    check_grid(grid)?;
    let per_point: Vec<Vec<TransitionLine>> = grid
        .par_iter()
        .map(|&n_g| transitions_at(config, n_g, max_states))
        .collect::<Result<_, _>>()?;
    Ok(SpectrumTable {
        grid: grid.to_vec(),
        lines: per_point.into_iter().flatten().collect(),
    })
}

fn check_grid(grid: &[f64]) -> Result<(), SpectraError> {
    if grid.iter().any(|x| !x.is_finite() || !(0.0..=2.0).contains(x)) {
        return Err(SpectraError::BadGrid(
            "gate charges must lie in [0, 2]".into(),
        ));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SpectraError::BadGrid(
            "gate charges must be strictly ascending".into(),
        ));
    }
    Ok(())
}

/// Transitions whose visibility is at least `relative_floor` times the
/// brightest transition at this gate charge, as `(state_index, freq)` in
/// ascending state order.
pub fn bright_transitions(levels: &Levels, relative_floor: f64) -> Vec<(usize, f64)> {
    let vis: Vec<f64> = (1..levels.dim()).map(|k| levels.visibility(k)).collect();
    let max = vis.iter().cloned().fold(0.0, f64::max);
    if max <= 0.0 {
        return Vec::new();
    }
    vis.iter()
        .enumerate()
        .filter(|(_, &v)| v >= relative_floor * max)
        .map(|(i, _)| (i + 1, levels.transition(i + 1)))
        .collect()
}

/// Gate charge and frequency at the minimum of branch `state_index` on
/// `[lo, hi]`, by golden-section search refined to `tol` in `n_g`.
///
/// The branch must be unimodal on the bracket.
pub fn branch_minimum(
    config: &ModelConfig,
    state_index: usize,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<(f64, f64), SpectraError> {
    if state_index == 0 || state_index >= config.dim() {
        return Err(SpectraError::TooManyStates {
            requested: state_index,
            dim: config.dim(),
        });
    }
    let f = |x: f64| -> Result<f64, SpectraError> {
        Ok(Levels::solve(config, x)?.transition(state_index))
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

/// Two-level dispersive shift `g^2 / (f_q - ω_r)`.
pub fn dispersive_shift(res: &ResonatorParams, qubit_freq: f64) -> Result<f64, SpectraError> {
    res.validate()?;
    let detuning = qubit_freq - res.omega_r;
    if detuning == 0.0 {
        return Err(SpectraError::ZeroDetuning);
    }
    Ok(res.g * res.g / detuning)
}

/// Multilevel effective shift of state `j`:
/// `χ_j = Σ_{k≠j} g^2 w_jk 2ω_kj / (ω_kj^2 - ω_r^2)` with `ω_kj = E_k - E_j`
/// and `w_jk = |<k|Q|j>|^2` normalized by `|<1|Q|0>|^2` of the bare CPB at
/// `n_g = 1`.
///
/// This is a qualitative readout diagnostic; nothing is fitted to it.
pub fn chi_eff_multilevel(
    config: &ModelConfig,
    res: &ResonatorParams,
    n_g: f64,
    state_index: usize,
) -> Result<f64, SpectraError> {
    res.validate()?;
    let levels = Levels::solve(config, n_g)?;
    if state_index >= levels.dim() {
        return Err(SpectraError::TooManyStates {
            requested: state_index,
            dim: levels.dim(),
        });
    }
    let norm = bare_reference_element(&config.cpb, config.e_j())?;
    let g2 = res.g * res.g;
    let wr2 = res.omega_r * res.omega_r;
    let ej = levels.system.value(state_index);
    let mut chi = 0.0;
    for k in 0..levels.dim() {
        if k == state_index {
            continue;
        }
        let omega = levels.system.value(k) - ej;
        if (omega.abs() - res.omega_r).abs() < RESONANCE_GUARD_GHZ {
            return Err(SpectraError::Resonant { j: state_index, k });
        }
        let q = levels.charge_element(k, state_index);
        chi += g2 * (q * q / norm) * 2.0 * omega / (omega * omega - wr2);
    }
    Ok(chi)
}

fn bare_reference_element(cpb: &CpbParams, e_j: f64) -> Result<f64, SpectraError> {
    let bare = ModelConfig::bare(CpbParams {
        e_j_max: e_j.abs(),
        ..*cpb
    });
    let levels = Levels::solve(&bare, 1.0)?;
    let q = levels.charge_element(1, 0);
    Ok(q * q)
}
