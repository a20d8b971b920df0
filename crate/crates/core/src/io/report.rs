//! Key=value reports and the residual table.

use std::fmt::Write as _;

use super::format::g9;
use crate::analysis::{island_capacitance, DerivedReport, Lifetime};
use crate::fitting::{Dataset, FitResult, MultistartResult};

fn kv(out: &mut String, key: &str, value: impl std::fmt::Display) {
    writeln!(out, "{key} = {value}").expect("writing to a String cannot fail");
}

/// Fit outcome. `multistart` adds the seed bookkeeping and the parameter
/// spread over near-optimal runs.
pub fn fit_report(result: &FitResult, multistart: Option<&MultistartResult>) -> String {
    let mut out = String::new();
    kv(&mut out, "objective_ghz2", g9(result.objective));
    kv(&mut out, "converged", result.converged);
    kv(&mut out, "iterations", result.iterations);
    kv(&mut out, "evaluations", result.evaluations);
    kv(&mut out, "points", result.residuals.len());
    kv(
        &mut out,
        "unassigned_points",
        result.residuals.iter().filter(|r| r.flagged()).count(),
    );
    if let Some(ms) = multistart {
        kv(&mut out, "seeds", ms.objectives.len());
        kv(&mut out, "best_seed", ms.best_seed);
        kv(&mut out, "near_optimal_runs", ms.near_optimal);
    }
    for (label, value) in result.labels.iter().zip(&result.params) {
        kv(&mut out, &format!("param.{label}"), g9(*value));
    }
    if let Some(ms) = multistart {
        for s in &ms.spread {
            kv(&mut out, &format!("spread.{}", s.label), format!("{}, {}", g9(s.min), g9(s.max)));
        }
    }
    out
}

pub const RESIDUALS_HEADER: &str = "dataset,n_g,freq_ghz,model_freq_ghz,residual_ghz,weight,flagged";

/// One row per ridge point in input order. Unassigned points have empty
/// model and residual fields and `flagged = 1`.
pub fn residuals_csv(result: &FitResult, datasets: &[Dataset]) -> String {
    let mut out = String::new();
    out.push_str(RESIDUALS_HEADER);
    out.push('\n');
    for r in &result.residuals {
        let (model, residual) = match r.model_freq {
            Some(m) => (g9(m), g9(r.freq - m)),
            None => (String::new(), String::new()),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            datasets[r.dataset].label,
            g9(r.n_g),
            g9(r.freq),
            model,
            residual,
            g9(r.weight),
            u8::from(r.flagged())
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// Derived quantities, one `tls<i>.` block per fluctuator.
pub fn analysis_report(e_c: f64, reports: &[DerivedReport]) -> String {
    let mut out = String::new();
    kv(&mut out, "island_capacitance_ff", g9(island_capacitance(e_c)));
    if let Some(first) = reports.first() {
        kv(&mut out, "i0_na", g9(first.i0));
        kv(&mut out, "current_density_a_per_cm2", g9(first.current_density));
    }
    for r in reports {
        let p = format!("tls{}", r.tls_index + 1);
        kv(&mut out, &format!("{p}.delta_i0_na"), g9(r.delta_i0));
        kv(&mut out, &format!("{p}.fractional_delta_ej"), g9(r.fractional_delta_ej));
        kv(&mut out, &format!("{p}.a_eff_nm2"), g9(r.a_eff));
        kv(&mut out, &format!("{p}.hop_distance_angstrom"), g9(r.hop_distance));
        kv(&mut out, &format!("{p}.island_potential_shift_uv"), g9(r.island_potential_shift));
        kv(&mut out, &format!("{p}.tls_freq_ghz"), g9(r.tls_freq));
        let t1 = match r.t1_bound {
            Lifetime::Finite(t) => g9(t),
            Lifetime::Unbounded => "unbounded".into(),
        };
        kv(&mut out, &format!("{p}.t1_bound_us"), t1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{JunctionGeometry, LifetimeInputs};
    use crate::fitting::PointResidual;
    use crate::hamiltonian::{CpbParams, ModelConfig, TlsParams};

    #[test]
    fn analysis_keys() {
        let config = ModelConfig::single(
            CpbParams::new(4.5, 6.33, 4).unwrap(),
            TlsParams {
                e_r: 0.62,
                t_lr: 0.0,
                e_int: 0.35,
                delta_e_j: 2.02,
            },
        );
        let reports =
            DerivedReport::all(&config, &JunctionGeometry::NOMINAL, &LifetimeInputs::default());
        let text = analysis_report(4.5, &reports);
        assert!(text.contains("tls1.t1_bound_us = unbounded\n"));
        assert!(text.contains("tls1.hop_distance_angstrom = 0.388"));
        assert!(text.lines().all(|l| l.contains(" = ")));
    }

    #[test]
    fn residual_rows() {
        let result = FitResult {
            labels: vec!["e_c".into()],
            params: vec![4.5],
            objective: 1e4,
            iterations: 3,
            evaluations: 7,
            converged: true,
            residuals: vec![
                PointResidual {
                    dataset: 0,
                    point: 0,
                    n_g: 1.0,
                    freq: 6.4,
                    model_freq: Some(6.33),
                    weight: 1.0,
                    contribution: 0.0049,
                },
                PointResidual {
                    dataset: 0,
                    point: 1,
                    n_g: 1.0,
                    freq: 9.0,
                    model_freq: None,
                    weight: 1.0,
                    contribution: 1e4,
                },
            ],
        };
        let data = [Dataset {
            label: "a".into(),
            points: vec![],
        }];
        let csv = residuals_csv(&result, &data);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[1], "a,1,6.4,6.33,0.07,1,0");
        assert_eq!(lines[2], "a,1,9,,,1,1");
        let report = fit_report(&result, None);
        assert!(report.contains("unassigned_points = 1\n"));
        assert!(report.contains("param.e_c = 4.5\n"));
    }
}
