//! Box-constrained Nelder-Mead simplex search.
//!
//! Every trial point is clipped into the box before it is evaluated, so the
//! simplex never leaves the feasible region.

/// Reflection, expansion, contraction and shrink coefficients.
const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Stop once `max f - min f` over the simplex drops below this.
    pub f_spread_tol: f64,
    pub max_iterations: usize,
    /// Initial step per coordinate as a fraction of the box width.
    pub initial_step_fraction: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            f_spread_tol: 1e-6,
            max_iterations: 5000,
            initial_step_fraction: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

fn clip(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((xi, &lo), &hi) in x.iter_mut().zip(lower).zip(upper) {
        *xi = xi.clamp(lo, hi);
    }
}

/// Minimizes `f` inside `[lower, upper]` starting from `x0`.
///
/// Errors returned by `f` abort the search and are passed through.
pub fn minimize<E>(
    mut f: impl FnMut(&[f64]) -> Result<f64, E>,
    x0: &[f64],
    lower: &[f64],
    upper: &[f64],
    options: &NelderMeadOptions,
) -> Result<NelderMeadOutcome, E> {
    let n = x0.len();
    assert!(lower.len() == n && upper.len() == n, "bounds must match x0");
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64], evaluations: &mut usize| -> Result<f64, E> {
        *evaluations += 1;
        f(x)
    };

    let mut start = x0.to_vec();
    clip(&mut start, lower, upper);
    if n == 0 {
        let fx = eval(&start, &mut evaluations)?;
        return Ok(NelderMeadOutcome {
            x: start,
            f: fx,
            iterations: 0,
            evaluations,
            converged: true,
        });
    }

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.clone());
    for i in 0..n {
        let mut v = start.clone();
        let step = options.initial_step_fraction * (upper[i] - lower[i]);
        v[i] = if v[i] + step <= upper[i] {
            v[i] + step
        } else {
            v[i] - step
        };
        clip(&mut v, lower, upper);
        simplex.push(v);
    }
    let mut values = Vec::with_capacity(n + 1);
    for v in &simplex {
        values.push(eval(v, &mut evaluations)?);
    }

    let mut iterations = 0;
    let mut converged = false;
    let mut order: Vec<usize> = (0..=n).collect();
    loop {
        // Stable ordering: ties keep the lower vertex index first.
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];
        if values[worst] - values[best] < options.f_spread_tol {
            converged = true;
            break;
        }
        if iterations >= options.max_iterations {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for &idx in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&simplex[idx]) {
                *c += x;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= n as f64);

        let along = |coef: f64| -> Vec<f64> {
            let mut p: Vec<f64> = centroid
                .iter()
                .zip(&simplex[worst])
                .map(|(c, w)| c + coef * (c - w))
                .collect();
            clip(&mut p, lower, upper);
            p
        };

        let reflected = along(REFLECT);
        let f_reflected = eval(&reflected, &mut evaluations)?;

        if f_reflected < values[best] {
            let expanded = along(EXPAND);
            let f_expanded = eval(&expanded, &mut evaluations)?;
            if f_expanded < f_reflected {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
            continue;
        }
        if f_reflected < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
            continue;
        }

        let (candidate, f_candidate, threshold) = if f_reflected < values[worst] {
            let outside = along(REFLECT * CONTRACT);
            let fo = eval(&outside, &mut evaluations)?;
            (outside, fo, f_reflected)
        } else {
            let inside = along(-CONTRACT);
            let fi = eval(&inside, &mut evaluations)?;
            (inside, fi, values[worst])
        };
        if f_candidate < threshold {
            simplex[worst] = candidate;
            values[worst] = f_candidate;
            continue;
        }

        let anchor = simplex[best].clone();
        for idx in 0..=n {
            if idx == best {
                continue;
            }
            let mut p: Vec<f64> = anchor
                .iter()
                .zip(&simplex[idx])
                .map(|(a, x)| a + SHRINK * (x - a))
                .collect();
            clip(&mut p, lower, upper);
            values[idx] = eval(&p, &mut evaluations)?;
            simplex[idx] = p;
        }
    }

    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let best = order[0];
    Ok(NelderMeadOutcome {
        x: simplex[best].clone(),
        f: values[best],
        iterations,
        evaluations,
        converged,
    })
}
