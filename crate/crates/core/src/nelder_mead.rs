//! Nelder-Mead simplex minimization with an optional projection hook.
//!
//! Parameters follow the dimension-adaptive choice of Gao and Han
//! (`α = 1, γ = 1 + 2/n, ρ = 0.75 - 1/(2n), σ = 1 - 1/n`), which behaves
//! much better than the classic constants once `n` exceeds a handful.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadOptions {
    pub max_iters: usize,
    /// Stop when `f_worst - f_best <= f_tol` and the simplex diameter is `<= x_tol`.
    pub f_tol: f64,
    pub x_tol: f64,
    pub adaptive: bool,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            f_tol: 1e-12,
            x_tol: 1e-10,
            adaptive: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iters: usize,
    pub evals: usize,
    pub converged: bool,
    /// Best value after each iteration; non-increasing.
    pub history: Vec<f64>,
}

struct Coeffs {
    reflect: f64,
    expand: f64,
    contract: f64,
    shrink: f64,
}

impl Coeffs {
    fn new(n: usize, adaptive: bool) -> Self {
        if adaptive && n > 2 {
            let nf = n as f64;
            Self {
                reflect: 1.0,
                expand: 1.0 + 2.0 / nf,
                contract: 0.75 - 0.5 / nf,
                shrink: 1.0 - 1.0 / nf,
            }
        } else {
            Self {
                reflect: 1.0,
                expand: 2.0,
                contract: 0.5,
                shrink: 0.5,
            }
        }
    }
}

fn key(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Minimizes `f` starting from the axis-aligned simplex `x0 + stepᵢ eᵢ`.
///
/// `project` is applied to every vertex before it is evaluated.
pub fn minimize<F, P>(
    mut f: F,
    x0: &[f64],
    step: f64,
    opts: &NelderMeadOptions,
    mut project: P,
) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
    P: FnMut(&mut [f64]),
{
    let n = x0.len();
    let mut simplex = Vec::with_capacity(n + 1);
    let mut first = x0.to_vec();
    project(&mut first);
    simplex.push(first);
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step;
        project(&mut v);
        simplex.push(v);
    }
    minimize_simplex(&mut f, simplex, opts, &mut project)
}

/// Minimizes `f` from an explicit initial simplex of `n + 1` vertices.
pub fn minimize_simplex<F, P>(
    f: &mut F,
    mut simplex: Vec<Vec<f64>>,
    opts: &NelderMeadOptions,
    project: &mut P,
) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
    P: FnMut(&mut [f64]),
{
    let n = simplex.len() - 1;
    let c = Coeffs::new(n, opts.adaptive);
    let mut values: Vec<f64> = simplex.iter().map(|x| key(f(x))).collect();
    let mut evals = simplex.len();
    let mut history = Vec::new();
    let mut order: Vec<usize> = (0..=n).collect();
    let mut converged = false;
    let mut iters = 0;

    let point = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> {
        // a + t (b - a)
        a.iter().zip(b).map(|(a, b)| a + t * (b - a)).collect()
    };

    while iters < opts.max_iters {
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
        let best = order[0];
        let worst = order[n];
        let second = order[n.saturating_sub(1)];
        history.push(values[best]);

        let spread = values[worst] - values[best];
        let diameter = simplex
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[best])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread <= opts.f_tol && diameter <= opts.x_tol {
            converged = true;
            break;
        }
        iters += 1;

        let mut centroid = vec![0.0; n];
        for &i in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&simplex[i]) {
                *c += x;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= n as f64);

        let mut eval = |x: &mut Vec<f64>, evals: &mut usize| -> f64 {
            project(x);
            *evals += 1;
            key(f(x))
        };

        let mut xr = point(&centroid, &simplex[worst], -c.reflect);
        let fr = eval(&mut xr, &mut evals);
        if fr < values[best] {
            let mut xe = point(&centroid, &xr, c.expand);
            let fe = eval(&mut xe, &mut evals);
            if fe < fr {
                simplex[worst] = xe;
                values[worst] = fe;
            } else {
                simplex[worst] = xr;
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second] {
            simplex[worst] = xr;
            values[worst] = fr;
            continue;
        }
        let shrink_needed = if fr < values[worst] {
            let mut xc = point(&centroid, &xr, c.contract);
            let fc = eval(&mut xc, &mut evals);
            if fc <= fr {
                simplex[worst] = xc;
                values[worst] = fc;
                false
            } else {
                true
            }
        } else {
            let mut xc = point(&centroid, &simplex[worst], c.contract);
            let fc = eval(&mut xc, &mut evals);
            if fc < values[worst] {
                simplex[worst] = xc;
                values[worst] = fc;
                false
            } else {
                true
            }
        };
        if shrink_needed {
            let xb = simplex[best].clone();
            for &i in &order[1..] {
                let mut v = point(&xb, &simplex[i], c.shrink);
                values[i] = eval(&mut v, &mut evals);
                simplex[i] = v;
            }
        }
    }

    let best = (0..=n)
        .min_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)))
        .expect("non-empty simplex");
    if let Some(&last) = history.last() {
        if values[best] < last {
            history.push(values[best]);
        }
    }
    NelderMeadResult {
        x: simplex[best].clone(),
        f: values[best],
        iters,
        evals,
        converged,
        history,
    }
}
