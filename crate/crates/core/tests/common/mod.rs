#![allow(dead_code)]

use cpbtls::{CpbParams, ModelConfig, TlsParams};

pub fn table1(set: usize) -> ModelConfig {
    let (e_j, delta_e_j, t_lr) = match set {
        1 => (3.64, 1.50, 0.01),
        2 => (4.16, 1.54, 0.01),
        3 => (5.93, 1.84, 0.06),
        4 => (6.33, 2.02, 0.06),
        _ => panic!("no such set"),
    };
    ModelConfig::single(
        CpbParams::new(4.5, e_j, 4).unwrap(),
        TlsParams {
            e_r: 0.62,
            t_lr,
            e_int: 0.35,
            delta_e_j,
        },
    )
}

pub fn table2(set: usize) -> ModelConfig {
    let (e_j, dej1, dej2, e_r2, e_int2) = match set {
        1 => (2.79, 1.36, -1.00, -0.82, 0.13),
        2 => (3.43, 1.40, -0.68, -0.69, 0.15),
        _ => panic!("no such set"),
    };
    ModelConfig::double(
        CpbParams::new(4.3, e_j, 4).unwrap(),
        TlsParams {
            e_r: 0.62,
            t_lr: 0.0,
            e_int: -0.40,
            delta_e_j: dej1,
        },
        TlsParams {
            e_r: e_r2,
            t_lr: 0.04,
            e_int: e_int2,
            delta_e_j: dej2,
        },
        0.04,
    )
}

pub fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step).round() as usize;
    (0..=n).map(|i| start + step * i as f64).collect()
}
