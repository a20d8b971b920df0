//! Charge-basis Hamiltonians for a Cooper-pair box coupled to zero, one or
//! two two-level fluctuators.
//!
//! All energies are frequency equivalents `E/h` in GHz.
//!
//! Basis ordering: the index of a basis state is `config * m + charge`, where
//! `m` is the number of charge states and `config` is a bit set of TLS wells
//! (bit `i` set when TLS `i + 1` sits in its right well). For two fluctuators
//! this gives the block order `LL, RL, LR, RR` (TLS-2 well outermost), and for
//! one fluctuator `[L; R]`. Inside a block, charge states run in ascending
//! Cooper-pair number.

use std::f64::consts::PI;

use log::warn;
use thiserror::Error;

/// Largest supported charge window.
pub const MAX_CHARGE_STATES: usize = 8;
/// Largest number of fluctuators the block builders understand.
pub const MAX_TLS: usize = 2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HamiltonianError {
    #[error("expected {expected} TLS in the model, found {found}")]
    TlsCount { expected: usize, found: usize },
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
}

/// Bare Cooper-pair box parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpbParams {
    /// Charging energy E_c/h (GHz).
    pub e_c: f64,
    /// Josephson energy at zero flux, E_J^max/h (GHz).
    pub e_j_max: f64,
    /// Number of Cooper-pair charge states kept in the window.
    pub n_charge_states: usize,
}

impl CpbParams {
    pub fn new(e_c: f64, e_j_max: f64, n_charge_states: usize) -> Result<Self, HamiltonianError> {
        let params = Self {
            e_c,
            e_j_max,
            n_charge_states,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), HamiltonianError> {
        if !(self.e_c.is_finite() && self.e_c > 0.0) {
            return Err(HamiltonianError::InvalidParameter(format!(
                "e_c must be positive, got {}",
                self.e_c
            )));
        }
        if !(self.e_j_max.is_finite() && self.e_j_max > 0.0) {
            return Err(HamiltonianError::InvalidParameter(format!(
                "e_j_max must be positive, got {}",
                self.e_j_max
            )));
        }
        if !(2..=MAX_CHARGE_STATES).contains(&self.n_charge_states) {
            return Err(HamiltonianError::InvalidParameter(format!(
                "n_charge_states must lie in 2..={MAX_CHARGE_STATES}, got {}",
                self.n_charge_states
            )));
        }
        Ok(())
    }

    /// Cooper-pair numbers in the charge window, ascending.
    pub fn charge_numbers(&self) -> Vec<i32> {
        charge_numbers(self.n_charge_states)
    }
}

/// The `m` consecutive Cooper-pair numbers `1 - ceil(m/2) ..= floor(m/2)`.
pub fn charge_numbers(m: usize) -> Vec<i32> {
    let m = m as i32;
    let lo = 1 - (m + 1) / 2;
    (lo..lo + m).collect()
}

/// Double-well fluctuator parameters, with the left-well energy fixed at 0.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TlsParams {
    /// Right-well asymmetry E_R/h (GHz).
    pub e_r: f64,
    /// Tunneling matrix element T_LR/h (GHz), non-negative.
    pub t_lr: f64,
    /// Charge coupling E_int/h (GHz).
    pub e_int: f64,
    /// Josephson modulation ΔE_J/h (GHz).
    pub delta_e_j: f64,
}

impl TlsParams {
    pub fn validate(&self) -> Result<(), HamiltonianError> {
        let all_finite = [self.e_r, self.t_lr, self.e_int, self.delta_e_j]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(HamiltonianError::InvalidParameter(
                "TLS parameters must be finite".into(),
            ));
        }
        if self.t_lr < 0.0 {
            return Err(HamiltonianError::InvalidParameter(format!(
                "t_lr must be non-negative, got {}",
                self.t_lr
            )));
        }
        Ok(())
    }
}

/// A CPB at a given flux bias plus up to two fluctuators.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub cpb: CpbParams,
    /// External flux in units of the flux quantum.
    pub flux_ratio: f64,
    pub tls: Vec<TlsParams>,
    /// Direct TLS-TLS tunneling (GHz); only used with two fluctuators.
    pub t_12: f64,
}

impl ModelConfig {
    pub fn bare(cpb: CpbParams) -> Self {
        Self {
            cpb,
            flux_ratio: 0.0,
            tls: Vec::new(),
            t_12: 0.0,
        }
    }

    pub fn single(cpb: CpbParams, tls: TlsParams) -> Self {
        Self {
            cpb,
            flux_ratio: 0.0,
            tls: vec![tls],
            t_12: 0.0,
        }
    }

    pub fn double(cpb: CpbParams, tls1: TlsParams, tls2: TlsParams, t_12: f64) -> Self {
        Self {
            cpb,
            flux_ratio: 0.0,
            tls: vec![tls1, tls2],
            t_12,
        }
    }

    pub fn with_flux(mut self, flux_ratio: f64) -> Self {
        self.flux_ratio = flux_ratio;
        self
    }

    pub fn validate(&self) -> Result<(), HamiltonianError> {
        self.cpb.validate()?;
        if self.tls.len() > MAX_TLS {
            return Err(HamiltonianError::InvalidParameter(format!(
                "at most {MAX_TLS} TLS are supported, got {}",
                self.tls.len()
            )));
        }
        for tls in &self.tls {
            tls.validate()?;
        }
        if !self.flux_ratio.is_finite() || !self.t_12.is_finite() {
            return Err(HamiltonianError::InvalidParameter(
                "flux_ratio and t_12 must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Signed Josephson energy at this flux bias.
    pub fn e_j(&self) -> f64 {
        ej_from_flux(self.cpb.e_j_max, self.flux_ratio)
    }

    pub fn tls_count(&self) -> usize {
        self.tls.len()
    }

    /// Number of TLS well configurations, `2^tls_count`.
    pub fn config_count(&self) -> usize {
        1 << self.tls.len()
    }

    pub fn dim(&self) -> usize {
        self.cpb.n_charge_states * self.config_count()
    }
}

/// Dense real symmetric matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Builds a matrix from the upper triangle (`i <= j`) of `f`, mirroring
    /// it into the lower triangle.
    pub fn from_upper_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds from row-major data, rejecting anything not exactly symmetric.
    pub fn from_row_major(dim: usize, data: Vec<f64>) -> Result<Self, HamiltonianError> {
        if data.len() != dim * dim {
            return Err(HamiltonianError::InvalidParameter(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                if data[i * dim + j].to_bits() != data[j * dim + i].to_bits() {
                    return Err(HamiltonianError::InvalidParameter(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { dim, entries: data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.entries[i * self.dim + j] = value;
        self.entries[j * self.dim + i] = value;
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| {
            (i + 1..self.dim).all(|j| self.get(i, j).to_bits() == self.get(j, i).to_bits())
        })
    }

    /// `self * v` for a column vector.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim, "vector length must match matrix dimension");
        self.entries
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Copies `block` into the diagonal block starting at `offset`.
    fn put_block(&mut self, offset: usize, block: &SymMatrix) {
        for i in 0..block.dim {
            for j in i..block.dim {
                self.set(offset + i, offset + j, block.get(i, j));
            }
        }
    }
}

/// Josephson energy of the split junction at flux `flux_ratio = Φ/Φ₀`.
///
/// The sign of the cosine is kept; callers decide what a negative value means.
pub fn ej_from_flux(e_j_max: f64, flux_ratio: f64) -> f64 {
    let c = (PI * flux_ratio).cos();
    // cos(π/2) is 6e-17 in floating point; snap the zero of the cosine.
    let c = if c.abs() < 1e-15 { 0.0 } else { c };
    e_j_max * c
}

/// Tridiagonal CPB block over the charge window.
///
/// Diagonal: `E_c (2n - n_g)^2 + e_int_sum (2n - n_g) + e_offset`.
/// Off-diagonal between neighbouring charge states: `-e_j_eff / 2`.
pub fn build_cpb_block(
    cpb: &CpbParams,
    n_g: f64,
    e_j_eff: f64,
    e_int_sum: f64,
    e_offset: f64,
) -> SymMatrix {
    let numbers = cpb.charge_numbers();
    let m = numbers.len();
    let hop = -e_j_eff / 2.0;
    SymMatrix::from_upper_fn(m, |i, j| {
        if i == j {
            let q = 2.0 * numbers[i] as f64 - n_g;
            cpb.e_c * q * q + e_int_sum * q + e_offset
        } else if j == i + 1 {
            hop
        } else {
            0.0
        }
    })
}

/// Parameters of the CPB block for one TLS well configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockTerms {
    pub e_j_eff: f64,
    pub e_int_sum: f64,
    pub e_offset: f64,
}

/// Block terms for well configuration `config` (bit `i` set: TLS `i+1` in R).
///
/// Each TLS in L adds `+ΔE_J/2` to the Josephson energy and each TLS in R
/// subtracts it and contributes its `E_int` and `E_R`. With both fluctuators
/// in R the CPB-mediated term `E_int,1 E_int,2 / 2E_c` is added as well.
pub fn block_terms(config: &ModelConfig, well_config: usize) -> BlockTerms {
    let mut terms = BlockTerms {
        e_j_eff: config.e_j(),
        e_int_sum: 0.0,
        e_offset: 0.0,
    };
    for (i, tls) in config.tls.iter().enumerate() {
        if well_config & (1 << i) == 0 {
            terms.e_j_eff += tls.delta_e_j / 2.0;
        } else {
            terms.e_j_eff -= tls.delta_e_j / 2.0;
            terms.e_int_sum += tls.e_int;
            terms.e_offset += tls.e_r;
        }
    }
    if config.tls.len() == 2 && well_config == 0b11 {
        terms.e_offset += config.tls[0].e_int * config.tls[1].e_int / (2.0 * config.cpb.e_c);
    }
    terms
}

/// Coupling between two well configurations: single flips tunnel through
/// the flipped TLS, the double flip through `t_12`.
fn config_coupling(config: &ModelConfig, a: usize, b: usize) -> f64 {
    match a ^ b {
        0 => 0.0,
        0b01 => config.tls[0].t_lr,
        0b10 => config.tls[1].t_lr,
        0b11 => config.t_12,
        _ => unreachable!("at most two TLS"),
    }
}

/// Assembles the full Hamiltonian for any supported number of fluctuators.
pub fn build_hamiltonian(config: &ModelConfig, n_g: f64) -> Result<SymMatrix, HamiltonianError> {
    config.validate()?;
    let m = config.cpb.n_charge_states;
    let configs = config.config_count();
    let mut h = SymMatrix::zeros(m * configs);
    for c in 0..configs {
        let terms = block_terms(config, c);
        if terms.e_j_eff < 0.0 {
            warn!(
                "negative effective Josephson energy {:.6} GHz in well configuration {c}",
                terms.e_j_eff
            );
        }
        let block = build_cpb_block(
            &config.cpb,
            n_g,
            terms.e_j_eff,
            terms.e_int_sum,
            terms.e_offset,
        );
        h.put_block(c * m, &block);
    }
    for a in 0..configs {
        for b in (a + 1)..configs {
            let t = config_coupling(config, a, b);
            if t != 0.0 {
                for k in 0..m {
                    h.set(a * m + k, b * m + k, t);
                }
            }
        }
    }
    Ok(h)
}

/// The bare CPB Hamiltonian (no fluctuators) at this flux bias.
pub fn build_cpb(config: &ModelConfig, n_g: f64) -> Result<SymMatrix, HamiltonianError> {
    expect_tls(config, 0)?;
    build_hamiltonian(config, n_g)
}

/// CPB plus one fluctuator, `[[H_L, T], [T, H_R]]`.
pub fn build_single_tls(config: &ModelConfig, n_g: f64) -> Result<SymMatrix, HamiltonianError> {
    expect_tls(config, 1)?;
    build_hamiltonian(config, n_g)
}

/// CPB plus two fluctuators in the `LL, RL, LR, RR` block order.
pub fn build_two_tls(config: &ModelConfig, n_g: f64) -> Result<SymMatrix, HamiltonianError> {
    expect_tls(config, 2)?;
    build_hamiltonian(config, n_g)
}

fn expect_tls(config: &ModelConfig, expected: usize) -> Result<(), HamiltonianError> {
    if config.tls.len() != expected {
        return Err(HamiltonianError::TlsCount {
            expected,
            found: config.tls.len(),
        });
    }
    Ok(())
}

/// Diagonal of the island charge operator `2n - n_g`, repeated over every
/// well configuration.
pub fn charge_operator_diagonal(config: &ModelConfig, n_g: f64) -> Vec<f64> {
    let numbers = config.cpb.charge_numbers();
    (0..config.config_count())
        .flat_map(|_| numbers.iter().map(move |&n| 2.0 * n as f64 - n_g))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set4_cpb(m: usize) -> CpbParams {
        CpbParams::new(4.5, 6.33, m).unwrap()
    }

    fn set4_tls() -> TlsParams {
        TlsParams {
            e_r: 0.62,
            t_lr: 0.06,
            e_int: 0.35,
            delta_e_j: 2.02,
        }
    }

    fn table2_set1() -> ModelConfig {
        ModelConfig::double(
            CpbParams::new(4.3, 2.79, 2).unwrap(),
            TlsParams {
                e_r: 0.62,
                t_lr: 0.0,
                e_int: -0.40,
                delta_e_j: 1.36,
            },
            TlsParams {
                e_r: -0.82,
                t_lr: 0.04,
                e_int: 0.13,
                delta_e_j: -1.00,
            },
            0.04,
        )
    }

    #[test]
    fn charge_windows_are_centered() {
        assert_eq!(charge_numbers(2), vec![0, 1]);
        assert_eq!(charge_numbers(3), vec![-1, 0, 1]);
        assert_eq!(charge_numbers(4), vec![-1, 0, 1, 2]);
        assert_eq!(charge_numbers(5), vec![-2, -1, 0, 1, 2]);
        assert_eq!(charge_numbers(8), vec![-3, -2, -1, 0, 1, 2, 3, 4]);
    }

    #[test]
    fn flux_dependence() {
        assert_eq!(ej_from_flux(7.33, 0.0), 7.33);
        assert_eq!(ej_from_flux(7.33, 0.5), 0.0);
        assert!((ej_from_flux(7.33, 1.0 / 3.0) - 3.665).abs() < 1e-12);
        assert!(ej_from_flux(7.33, 0.75) < 0.0);
    }

    #[test]
    fn cpb_block_at_degeneracy() {
        let b = build_cpb_block(&set4_cpb(2), 1.0, 6.33, 0.0, 0.0);
        assert_eq!(b.diagonal(), vec![4.5, 4.5]);
        assert_eq!(b.get(0, 1), -3.165);
    }

    #[test]
    fn cpb_block_with_coupling_terms() {
        let b = build_cpb_block(&set4_cpb(2), 1.0, 6.33, 0.35, 0.62);
        assert!((b.get(0, 0) - 4.77).abs() < 1e-12);
        assert!((b.get(1, 1) - 5.47).abs() < 1e-12);
        assert_eq!(b.get(1, 0), -3.165);
    }

    #[test]
    fn cpb_block_four_states() {
        let b = build_cpb_block(&set4_cpb(4), 1.0, 6.33, 0.0, 0.0);
        assert_eq!(b.diagonal(), vec![40.5, 4.5, 4.5, 40.5]);
        for i in 0..3 {
            assert_eq!(b.get(i, i + 1), -3.165);
        }
        assert_eq!(b.get(0, 2), 0.0);
        assert_eq!(b.get(0, 3), 0.0);
    }

    #[test]
    fn single_tls_blocks_match_table_one_set_four() {
        let cfg = ModelConfig::single(set4_cpb(2), set4_tls());
        let h = build_single_tls(&cfg, 1.0).unwrap();
        assert_eq!(h.dim(), 4);
        assert!((h.get(0, 1) + 3.67).abs() < 1e-12);
        assert!((h.get(2, 3) + 2.66).abs() < 1e-12);
        assert!((h.get(2, 2) - (4.5 - 0.35 + 0.62)).abs() < 1e-12);
        assert!((h.get(3, 3) - (4.5 + 0.35 + 0.62)).abs() < 1e-12);
        assert_eq!(h.get(0, 0), 4.5);
        assert_eq!(h.get(0, 2), 0.06);
        assert_eq!(h.get(1, 3), 0.06);
        assert_eq!(h.get(0, 3), 0.0);
        assert!(h.is_symmetric());
    }

    #[test]
    fn single_tls_rejects_wrong_count() {
        let cfg = ModelConfig::bare(set4_cpb(2));
        assert_eq!(
            build_single_tls(&cfg, 1.0),
            Err(HamiltonianError::TlsCount {
                expected: 1,
                found: 0
            })
        );
        assert!(build_two_tls(&ModelConfig::single(set4_cpb(2), set4_tls()), 1.0).is_err());
    }

    #[test]
    fn zero_tunneling_is_block_diagonal() {
        let mut tls = set4_tls();
        tls.t_lr = 0.0;
        let h = build_single_tls(&ModelConfig::single(set4_cpb(4), tls), 0.93).unwrap();
        for i in 0..4 {
            for j in 4..8 {
                assert_eq!(h.get(i, j), 0.0);
            }
        }
    }

    #[test]
    fn trivial_tls_duplicates_cpb() {
        let cfg = ModelConfig::single(set4_cpb(4), TlsParams::default());
        let h = build_single_tls(&cfg, 0.87).unwrap();
        let bare = build_cpb_block(&cfg.cpb, 0.87, 6.33, 0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(h.get(i, j), bare.get(i, j));
                assert_eq!(h.get(i + 4, j + 4), bare.get(i, j));
                assert_eq!(h.get(i, j + 4), 0.0);
            }
        }
    }

    #[test]
    fn two_tls_hrl_hop() {
        let cfg = table2_set1();
        let h = build_two_tls(&cfg, 1.0).unwrap();
        // RL block starts at row 2 for m = 2.
        assert!((h.get(2, 3) + 0.805).abs() < 1e-12);
        // T1 couples LL-RL, T2 couples LL-LR, T12 couples LL-RR and RL-LR.
        assert_eq!(h.get(0, 2), 0.0);
        assert_eq!(h.get(0, 4), 0.04);
        assert_eq!(h.get(0, 6), 0.04);
        assert_eq!(h.get(2, 4), 0.04);
        assert_eq!(h.get(2, 6), 0.04);
        assert_eq!(h.get(4, 6), 0.0);
    }

    #[test]
    fn two_tls_mediated_term_in_rr() {
        let cfg = table2_set1();
        let terms = block_terms(&cfg, 0b11);
        let mediated: f64 = -0.40 * 0.13 / (2.0 * 4.3);
        assert!((mediated + 0.006047).abs() < 1e-6);
        assert!((terms.e_offset - (0.62 - 0.82 + mediated)).abs() < 1e-15);
        assert!((terms.e_int_sum - (-0.40 + 0.13)).abs() < 1e-15);
        assert!((terms.e_j_eff - (2.79 - 0.68 + 0.50)).abs() < 1e-12);
        // LR: TLS 2 in R only, no mediated term.
        let lr = block_terms(&cfg, 0b10);
        assert!((lr.e_offset + 0.82).abs() < 1e-15);
    }

    #[test]
    fn decoupled_two_tls_repeats_cpb() {
        let cfg = ModelConfig::double(
            set4_cpb(2),
            TlsParams::default(),
            TlsParams::default(),
            0.0,
        );
        let h = build_two_tls(&cfg, 1.1).unwrap();
        let bare = build_cpb_block(&cfg.cpb, 1.1, 6.33, 0.0, 0.0);
        for c in 0..4 {
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(h.get(c * 2 + i, c * 2 + j), bare.get(i, j));
                }
            }
        }
    }

    #[test]
    fn charge_operator_repeats_per_block() {
        let cfg = ModelConfig::single(set4_cpb(2), set4_tls());
        assert_eq!(charge_operator_diagonal(&cfg, 1.0), vec![-1.0, 1.0, -1.0, 1.0]);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(CpbParams::new(0.0, 1.0, 4).is_err());
        assert!(CpbParams::new(4.5, -1.0, 4).is_err());
        assert!(CpbParams::new(4.5, 1.0, 1).is_err());
        assert!(CpbParams::new(4.5, 1.0, 9).is_err());
        let mut tls = set4_tls();
        tls.t_lr = -0.1;
        assert!(build_single_tls(&ModelConfig::single(set4_cpb(2), tls), 1.0).is_err());
    }
}
