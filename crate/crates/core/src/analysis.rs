//! Microscopic quantities derived from fitted model parameters.
//!
//! Energies come in as GHz (`E/h`); every conversion to SI goes through the
//! constants below.

use std::f64::consts::PI;

use crate::hamiltonian::{ModelConfig, TlsParams};

/// Planck constant (J s), exact.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Elementary charge (C), exact.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Superconducting flux quantum h / 2e (Wb).
pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * ELEMENTARY_CHARGE);
/// Boltzmann constant over Planck constant (GHz per K).
pub const KB_OVER_H_GHZ_PER_K: f64 = 20.836_619;

const GHZ: f64 = 1e9;
const NANO: f64 = 1e-9;
const NM2_TO_CM2: f64 = 1e-14;

/// Geometry of the junction hosting the fluctuator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionGeometry {
    /// Area of one junction (nm^2).
    pub area: f64,
    /// Tunnel barrier thickness (nm).
    pub barrier_thickness: f64,
    /// Fluctuator charge in units of e.
    pub tls_charge: f64,
}

impl JunctionGeometry {
    /// A 350 nm x 150 nm junction with a 1 nm barrier and a single
    /// elementary charge.
    pub const NOMINAL: JunctionGeometry = JunctionGeometry {
        area: 350.0 * 150.0,
        barrier_thickness: 1.0,
        tls_charge: 1.0,
    };
}

/// Critical current (nA) for a Josephson energy in GHz: `I0 = 2π h f / Φ0`.
pub fn critical_current(e_j: f64) -> f64 {
    2.0 * PI * PLANCK * e_j * GHZ / FLUX_QUANTUM / NANO
}

/// Inverse of [`critical_current`]: Josephson energy (GHz) for `i0` in nA.
pub fn josephson_energy(i0_na: f64) -> f64 {
    i0_na * NANO * FLUX_QUANTUM / (2.0 * PI * PLANCK) / GHZ
}

/// `(|ΔE_J| / E_J, A_eff)` with `A_eff` in nm^2.
pub fn fractional_and_area(e_j: f64, delta_e_j: f64, geom: &JunctionGeometry) -> (f64, f64) {
    let ratio = delta_e_j.abs() / e_j;
    (ratio, ratio * geom.area)
}

/// Projected hop distance `(x_R - x_L) cos η` in Å.
pub fn hop_distance(e_int: f64, e_c: f64, geom: &JunctionGeometry) -> f64 {
    let nm = e_int.abs() * geom.barrier_thickness / (2.0 * e_c * geom.tls_charge);
    nm * 10.0
}

/// Island potential shift (µV) when the fluctuator hops by
/// `displacement_cos` nm (already projected on the field).
pub fn island_potential_shift(geom: &JunctionGeometry, c_sigma_ff: f64, displacement_cos: f64) -> f64 {
    let volts = geom.tls_charge * ELEMENTARY_CHARGE / (c_sigma_ff * 1e-15)
        * (displacement_cos / geom.barrier_thickness);
    volts * 1e6
}

/// Total island capacitance (fF) implied by a charging energy `E_c = e^2 / 2C`.
pub fn island_capacitance(e_c: f64) -> f64 {
    ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (2.0 * PLANCK * e_c * GHZ) * 1e15
}

/// Isolated fluctuator transition `sqrt(E_R^2 + 4 T_LR^2)` (GHz).
pub fn tls_frequency(e_r: f64, t_lr: f64) -> f64 {
    (e_r * e_r + 4.0 * t_lr * t_lr).sqrt()
}

/// Thermal energy `k_B T / h` in GHz for a temperature in mK.
pub fn thermal_frequency(temperature_mk: f64) -> f64 {
    KB_OVER_H_GHZ_PER_K * temperature_mk * 1e-3
}

/// Outcome of the fluctuator lifetime estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lifetime {
    /// Finite bound, in µs.
    Finite(f64),
    /// Zero tunneling: the relaxation rate vanishes.
    Unbounded,
}

impl Lifetime {
    pub fn micros(self) -> Option<f64> {
        match self {
            Lifetime::Finite(t) => Some(t),
            Lifetime::Unbounded => None,
        }
    }
}

/// `T1 = (1/α) / (ω_TLS T_LR^2 coth(ω_TLS / 2 k_B T))`, energies in GHz,
/// `alpha_inv` in µs GHz^3, result in µs.
pub fn t1_bound(alpha_inv: f64, omega_tls: f64, t_lr: f64, temperature_mk: f64) -> Lifetime {
    if t_lr == 0.0 || omega_tls == 0.0 {
        return Lifetime::Unbounded;
    }
    let x = omega_tls / (2.0 * thermal_frequency(temperature_mk));
    let coth = 1.0 / x.tanh();
    Lifetime::Finite(alpha_inv / (omega_tls * t_lr * t_lr * coth))
}

/// Critical current density (A/cm^2) for `e_j_max` spread over `geom.area`.
pub fn current_density(e_j_max: f64, geom: &JunctionGeometry) -> f64 {
    critical_current(e_j_max) * NANO / (geom.area * NM2_TO_CM2)
}

/// Inputs of the lifetime estimate that are not part of the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifetimeInputs {
    /// `1/α` in µs GHz^3.
    pub alpha_inv: f64,
    pub temperature_mk: f64,
}

impl Default for LifetimeInputs {
    fn default() -> Self {
        Self {
            alpha_inv: 100.0,
            temperature_mk: 25.0,
        }
    }
}

/// Every derived quantity for one fluctuator of a model.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedReport {
    pub tls_index: usize,
    /// Critical current at the configured flux (nA).
    pub i0: f64,
    pub delta_i0: f64,
    pub fractional_delta_ej: f64,
    /// nm^2
    pub a_eff: f64,
    /// Å
    pub hop_distance: f64,
    pub tls_freq: f64,
    pub t1_bound: Lifetime,
    /// µV
    pub island_potential_shift: f64,
    /// A/cm^2, from E_J^max over both junctions of the split pair.
    pub current_density: f64,
}

impl DerivedReport {
    pub fn for_tls(
        config: &ModelConfig,
        tls_index: usize,
        geom: &JunctionGeometry,
        lifetime: &LifetimeInputs,
    ) -> Self {
        let tls: &TlsParams = &config.tls[tls_index];
        let e_j = config.e_j().abs();
        let (fractional, a_eff) = fractional_and_area(e_j, tls.delta_e_j, geom);
        let hop_a = hop_distance(tls.e_int, config.cpb.e_c, geom);
        let tls_freq = tls_frequency(tls.e_r, tls.t_lr);
        Self {
            tls_index,
            i0: critical_current(e_j),
            delta_i0: critical_current(tls.delta_e_j.abs()),
            fractional_delta_ej: fractional,
            a_eff,
            hop_distance: hop_a,
            tls_freq,
            t1_bound: t1_bound(lifetime.alpha_inv, tls_freq, tls.t_lr, lifetime.temperature_mk),
            island_potential_shift: island_potential_shift(
                geom,
                island_capacitance(config.cpb.e_c),
                hop_a / 10.0,
            ),
            current_density: current_density(
                config.cpb.e_j_max,
                &JunctionGeometry {
                    area: 2.0 * geom.area,
                    ..*geom
                },
            ),
        }
    }

    /// One report per fluctuator in the model.
    pub fn all(config: &ModelConfig, geom: &JunctionGeometry, lifetime: &LifetimeInputs) -> Vec<Self> {
        (0..config.tls.len())
            .map(|i| Self::for_tls(config, i, geom, lifetime))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn critical_current_values() {
        // 4π e f, evaluated independently of the Φ0 route.
        let direct = |f_ghz: f64| 4.0 * PI * ELEMENTARY_CHARGE * f_ghz * 1e9 * 1e9;
        assert!(close(critical_current(6.0), direct(6.0), 1e-12));
        assert!((critical_current(6.0) - 12.08).abs() < 0.005);
        assert!((critical_current(7.33) - 14.76).abs() < 0.005);
        assert_eq!(critical_current(0.0), 0.0);
        assert!((critical_current(2.02) - 4.07).abs() < 0.005);
    }

    #[test]
    fn area_and_fraction() {
        let g = JunctionGeometry::NOMINAL;
        let (r, a) = fractional_and_area(5.93, 1.84, &g);
        assert!((r - 0.310).abs() < 5e-4);
        assert!((a - 16_290.0).abs() < 5.0);
        let (r, a) = fractional_and_area(6.33, 2.02, &g);
        assert!((r - 0.319).abs() < 5e-4);
        assert!((a - 16_752.0).abs() < 10.0);
        assert_eq!(fractional_and_area(6.33, 0.0, &g), (0.0, 0.0));
        // Negative modulation counts by magnitude.
        assert_eq!(fractional_and_area(2.79, -1.0, &g).0, 1.0 / 2.79);
    }

    #[test]
    fn hop_distances() {
        let g = JunctionGeometry::NOMINAL;
        assert!((hop_distance(0.35, 4.5, &g) - 0.3889).abs() < 1e-4);
        assert!((hop_distance(0.13, 4.3, &g) - 0.1512).abs() < 1e-4);
        assert!((hop_distance(-0.40, 4.3, &g) - 0.4651).abs() < 1e-4);
        assert_eq!(hop_distance(0.0, 4.5, &g), 0.0);
    }

    #[test]
    fn potential_shift() {
        let g = JunctionGeometry::NOMINAL;
        // e / C = 10 µV.
        let c_ff = ELEMENTARY_CHARGE / 10e-6 * 1e15;
        assert!((island_potential_shift(&g, c_ff, 1.0) - 10.0).abs() < 1e-9);
        assert_eq!(island_potential_shift(&g, c_ff, 0.0), 0.0);
        assert!((island_potential_shift(&g, 4.0, 0.0389) - 1.558).abs() < 5e-4);
    }

    #[test]
    fn capacitance_from_charging_energy() {
        let c = island_capacitance(4.5);
        assert!((c - 4.304).abs() < 1e-3, "{c}");
    }

    #[test]
    fn tls_frequency_values() {
        assert!((tls_frequency(0.62, 0.06) - 0.6316).abs() < 1e-4);
        assert_eq!(tls_frequency(0.62, 0.0), 0.62);
        assert!((tls_frequency(0.0, 0.06) - 0.12).abs() < 1e-15);
    }

    #[test]
    fn lifetime_estimates() {
        // Zero-temperature limit.
        let t = t1_bound(100.0, 0.6316, 0.06, 1e-3).micros().unwrap();
        assert!(close(t, 100.0 / (0.6316 * 0.0036), 1e-12));

        let x: f64 = 0.6316 / (2.0 * 0.020_836_619 * 25.0);
        let coth = x.cosh() / x.sinh();
        let expected = 100.0 / (0.6316 * 0.0036 * coth);
        let t = t1_bound(100.0, 0.6316, 0.06, 25.0).micros().unwrap();
        assert!(close(t, expected, 1e-12));
        assert!(close(t, 23_640.0, 0.01), "{t}");

        let doubled = t1_bound(100.0, 0.6316, 0.12, 25.0).micros().unwrap();
        assert!(close(doubled, t / 4.0, 1e-12));
        assert_eq!(t1_bound(100.0, 0.62, 0.0, 25.0), Lifetime::Unbounded);
    }

    #[test]
    fn current_density_values() {
        let two = JunctionGeometry {
            area: 2.0 * 52_500.0,
            ..JunctionGeometry::NOMINAL
        };
        let j = current_density(7.33, &two);
        assert!((j - 14.06).abs() < 0.01, "{j}");
        let four = JunctionGeometry {
            area: 4.0 * 52_500.0,
            ..two
        };
        assert!(close(current_density(7.33, &four), j / 2.0, 1e-12));
        assert_eq!(current_density(0.0, &two), 0.0);
    }

    #[test]
    fn conversions_round_trip() {
        for i0 in [0.5, 4.07, 12.0, 14.76, 1000.0] {
            assert!(close(critical_current(josephson_energy(i0)), i0, 1e-12));
        }
    }
}
