//! Derivative-free simplex minimization.

pub(crate) struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimizes `f` from `x0` with an axis-aligned initial simplex of edge
/// `step`. Stops after `max_evals` evaluations or once the spread of simplex
/// values drops below `ftol`.
pub(crate) fn minimize(f: impl Fn(&[f64]) -> f64, x0: Vec<f64>, step: f64, max_evals: usize, ftol: f64) -> Minimum {
    let dim = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let v0 = f(&x0);
    simplex.push((x0.clone(), v0));
    for i in 0..dim {
        let mut x = x0.clone();
        x[i] += step;
        let v = f(&x);
        simplex.push((x, v));
    }
    let mut evals = dim + 1;

    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0].1, simplex[dim].1);
        if (worst - best).abs() <= ftol * (1.0 + best.abs()) {
            break;
        }
        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|(x, _)| x[j]).sum::<f64>() / dim as f64)
            .collect();
        let toward = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[dim].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = toward(REFLECT);
        let vr = f(&xr);
        evals += 1;
        if vr < best {
            let xe = toward(REFLECT * EXPAND);
            let ve = f(&xe);
            evals += 1;
            simplex[dim] = if ve < vr { (xe, ve) } else { (xr, vr) };
            continue;
        }
        if vr < simplex[dim - 1].1 {
            simplex[dim] = (xr, vr);
            continue;
        }
        let (xc, vc) = if vr < worst {
            let x = toward(REFLECT * CONTRACT);
            let v = f(&x);
            (x, v)
        } else {
            let x = toward(-CONTRACT);
            let v = f(&x);
            (x, v)
        };
        evals += 1;
        if vc < worst.min(vr) {
            simplex[dim] = (xc, vc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for (x, v) in simplex.iter_mut().skip(1) {
            for (xi, ai) in x.iter_mut().zip(&anchor) {
                *xi = ai + SHRINK * (*xi - ai);
            }
            *v = f(x);
        }
        evals += dim;
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Minimum { x, value }
}
