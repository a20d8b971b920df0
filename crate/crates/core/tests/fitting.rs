mod common;

use cpbtls::fitting::{
    fit, multistart, objective, sample_starts, synthetic_ridges, AssignmentPolicy, BoundSet,
    Dataset, FitProblem, Interval, ModelKind, NelderMeadOptions, SyntheticOptions,
};
use cpbtls::spectra::Levels;

use common::{grid, table1};

fn noiseless(seed: u64) -> SyntheticOptions {
    SyntheticOptions {
        noise_sigma: 0.0,
        seed,
        min_freq: 0.0,
        max_freq: 12.0,
    }
}

fn physical_bounds() -> BoundSet {
    let mut b = BoundSet::default();
    b.e_c = Interval::new(4.0, 5.0);
    b.e_j = Interval::new(5.0, 8.0);
    b.delta_e_j[0] = Interval::new(0.5, 4.0);
    b.e_r[0] = Interval::new(0.0, 1.5);
    b.e_int[0] = Interval::new(0.0, 1.0);
    b
}

fn problem(points: Vec<cpbtls::fitting::RidgePoint>, bounds: &BoundSet) -> FitProblem {
    FitProblem::new(
        vec![Dataset {
            label: "set4".into(),
            points,
        }],
        ModelKind::SingleTls,
        4,
        bounds,
        AssignmentPolicy::NearestBranch,
    )
    .unwrap()
}

#[test]
fn exact_data_is_a_zero_of_the_objective() {
    let truth = table1(4);
    let pts = synthetic_ridges(&truth, &grid(0.85, 1.15, 0.005), &noiseless(0)).unwrap();
    let p = problem(pts, &physical_bounds());
    let x = p.initial_from(&truth);
    assert!(objective(&p, &x).unwrap() < 1e-20);
    let result = fit(&p, &x, &NelderMeadOptions::default()).unwrap();
    assert!(result.converged);
    assert!(result.objective < 1e-12);

    let mut bumped = x.clone();
    bumped[p.index_of("set4.e_j").unwrap()] += 0.1;
    assert!(objective(&p, &bumped).unwrap() > 1e-3);
}

#[test]
fn hinted_policy_uses_bright_ordinals() {
    let truth = table1(4);
    let pts = synthetic_ridges(&truth, &grid(0.9, 1.1, 0.01), &noiseless(0)).unwrap();
    assert!(pts.iter().all(|p| p.branch_hint.is_some()));
    let hinted = FitProblem::new(
        vec![Dataset {
            label: "set4".into(),
            points: pts.clone(),
        }],
        ModelKind::SingleTls,
        4,
        &physical_bounds(),
        AssignmentPolicy::Hinted,
    )
    .unwrap();
    let x = hinted.initial_from(&truth);
    assert!(objective(&hinted, &x).unwrap() < 1e-20);

    // Swapping the two lowest ordinals makes every such point land on the
    // other branch under the hinted policy but not under nearest-branch.
    let swapped: Vec<_> = pts
        .iter()
        .map(|p| {
            let mut q = p.clone();
            q.branch_hint = p.branch_hint.map(|h| match h {
                0 => 1,
                1 => 0,
                h => h,
            });
            q
        })
        .collect();
    let hinted_swapped = FitProblem::new(
        vec![Dataset {
            label: "set4".into(),
            points: swapped.clone(),
        }],
        ModelKind::SingleTls,
        4,
        &physical_bounds(),
        AssignmentPolicy::Hinted,
    )
    .unwrap();
    assert!(objective(&hinted_swapped, &x).unwrap() > 1e-3);
    let nearest = problem(swapped, &physical_bounds());
    assert!(objective(&nearest, &x).unwrap() < 1e-20);
}

#[test]
fn round_trip_from_displaced_start() {
    let truth = table1(4);
    let pts = synthetic_ridges(
        &truth,
        &grid(0.85, 1.15, 0.005),
        &SyntheticOptions {
            noise_sigma: 0.01,
            seed: 7,
            min_freq: 0.0,
            max_freq: 12.0,
        },
    )
    .unwrap();
    let p = problem(pts, &physical_bounds());
    let start: Vec<f64> = p.clip(&p.initial_from(&truth).iter().map(|v| v * 1.1).collect::<Vec<_>>());
    let r = fit(&p, &start, &NelderMeadOptions::default()).unwrap();
    let close = |label: &str, target: f64, tol: f64| {
        let v = r.get(label).unwrap();
        assert!((v - target).abs() <= tol * target, "{label} = {v}");
    };
    close("set4.e_j", 6.33, 0.05);
    close("set4.tls1.delta_e_j", 2.02, 0.05);
    close("tls1.e_r", 0.62, 0.15);
    close("tls1.e_int", 0.35, 0.15);
    for (x, param) in r.params.iter().zip(p.params()) {
        assert!(param.bounds.contains(*x));
    }
}

#[test]
fn single_seed_multistart_equals_plain_fit() {
    let truth = table1(4);
    let pts = synthetic_ridges(&truth, &grid(0.9, 1.1, 0.01), &noiseless(0)).unwrap();
    let p = problem(pts, &physical_bounds());
    let options = NelderMeadOptions {
        max_iterations: 200,
        ..Default::default()
    };
    let ms = multistart(&p, 1, 99, &options).unwrap();
    let start = &sample_starts(&p, 1, 99)[0];
    let direct = fit(&p, start, &options).unwrap();
    assert_eq!(ms.best, direct);
    assert_eq!(ms.best_seed, 0);
    assert_eq!(ms.near_optimal, 1);
}

#[test]
fn toy_problem_starts_agree_with_grid_scan() {
    let truth = table1(4);
    let pts = synthetic_ridges(
        &truth,
        &grid(0.9, 1.1, 0.01),
        &SyntheticOptions {
            noise_sigma: 0.01,
            seed: 5,
            min_freq: 0.0,
            max_freq: 12.0,
        },
    )
    .unwrap();
    let mut b = BoundSet::default();
    b.e_c = Interval::new(4.5, 4.5);
    b.delta_e_j[0] = Interval::new(2.02, 2.02);
    b.e_r[0] = Interval::new(0.62, 0.62);
    b.e_int[0] = Interval::new(0.35, 0.35);
    b.t_lr[0] = Interval::new(0.06, 0.06);
    b.e_j = Interval::new(6.1, 6.6);
    let p = problem(pts, &b);
    assert_eq!(p.lower().iter().zip(p.upper()).filter(|(l, u)| *l < u).count(), 1);

    let idx = p.index_of("set4.e_j").unwrap();
    let mut x = p.initial_from(&truth);
    let scan = |lo: f64, hi: f64, n: usize, x: &mut Vec<f64>| {
        (0..=n)
            .map(|i| lo + (hi - lo) * i as f64 / n as f64)
            .map(|e| {
                x[idx] = e;
                (e, objective(&p, x).unwrap())
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
            .0
    };
    let coarse = scan(6.1, 6.6, 500, &mut x);
    let oracle = scan(coarse - 0.002, coarse + 0.002, 400, &mut x);

    let options = NelderMeadOptions {
        f_spread_tol: 1e-12,
        ..Default::default()
    };
    let ms = multistart(&p, 6, 3, &options).unwrap();
    for s in ms.starts.iter() {
        let r = fit(&p, s, &options).unwrap();
        assert!((r.params[idx] - oracle).abs() < 1e-4, "{} vs {oracle}", r.params[idx]);
    }
    assert!((ms.best.params[idx] - oracle).abs() < 1e-4);
}

#[test]
fn multistart_is_deterministic() {
    let truth = table1(4);
    let pts = synthetic_ridges(&truth, &grid(0.9, 1.1, 0.02), &noiseless(0)).unwrap();
    let p = problem(pts, &physical_bounds());
    let options = NelderMeadOptions {
        max_iterations: 150,
        ..Default::default()
    };
    let a = multistart(&p, 4, 21, &options).unwrap();
    let b = multistart(&p, 4, 21, &options).unwrap();
    assert_eq!(a, b);
    for r in &a.spread {
        assert!(r.min <= r.max);
    }
}

#[test]
fn synthetic_points_follow_bright_lines() {
    let truth = table1(4);
    let pts = synthetic_ridges(&truth, &[1.0], &noiseless(0)).unwrap();
    let levels = Levels::solve(&truth, 1.0).unwrap();
    let freqs: Vec<f64> = pts.iter().map(|p| p.freq).collect();
    assert_eq!(freqs.len(), 2);
    assert!((freqs[0] - levels.transition(2)).abs() < 1e-12);
    assert!((freqs[1] - levels.transition(3)).abs() < 1e-12);
}
