//! Derivative-free search utilities: golden-section refinement, boolean
//! bisection, and a small Nelder-Mead simplex for the probe-state optimizer.

/// Golden-section search for the maximum of `f` on `[a, b]`.
///
/// Assumes a unimodal (or flat) objective on the bracket. Returns (x, f(x)).
pub fn golden_section_maximize(f: impl Fn(f64) -> f64, a: f64, b: f64, xtol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > xtol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Smallest x in [lo, hi] with `pred(x)` true, to within `xtol`, assuming
/// `pred` is monotone (false below the crossing, true above). Requires
/// `pred(hi)` true; `None` otherwise.
pub fn bisect_smallest_true(
    pred: impl Fn(f64) -> bool,
    lo: f64,
    hi: f64,
    xtol: f64,
) -> Option<f64> {
    if !pred(hi) {
        return None;
    }
    let (mut lo, mut hi) = (lo, hi);
    if pred(lo) {
        return Some(lo);
    }
    while hi - lo > xtol {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Nelder-Mead simplex minimization with standard coefficients
/// (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
///
/// Returns the best vertex and its value; the best value never regresses.
pub fn nelder_mead_minimize(
    f: impl Fn(&[f64]) -> f64,
    start: &[f64],
    initial_step: f64,
    ftol: f64,
    max_iters: usize,
) -> (Vec<f64>, f64) {
    let dim = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..dim {
        let mut x = start.to_vec();
        x[i] += initial_step;
        let fx = f(&x);
        simplex.push((x, fx));
    }

    for _ in 0..max_iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        if (worst - best).abs() <= ftol * (1.0 + best.abs()) {
            break;
        }
        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; dim];
        for (x, _) in simplex.iter().take(dim) {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }
        let worst_x = simplex[dim].0.clone();
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&worst_x)
            .map(|(c, w)| 2.0 * c - w)
            .collect();
        let f_reflect = f(&reflect);
        if f_reflect < simplex[0].1 {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&worst_x)
                .map(|(c, w)| 3.0 * c - 2.0 * w)
                .collect();
            let f_expand = f(&expand);
            simplex[dim] = if f_expand < f_reflect {
                (expand, f_expand)
            } else {
                (reflect, f_reflect)
            };
            continue;
        }
        if f_reflect < simplex[dim - 1].1 {
            simplex[dim] = (reflect, f_reflect);
            continue;
        }
        let contract: Vec<f64> = centroid
            .iter()
            .zip(&worst_x)
            .map(|(c, w)| 0.5 * (c + w))
            .collect();
        let f_contract = f(&contract);
        if f_contract < simplex[dim].1 {
            simplex[dim] = (contract, f_contract);
            continue;
        }
        // Shrink toward the best vertex.
        let best_x = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let shrunk: Vec<f64> = best_x
                .iter()
                .zip(&vertex.0)
                .map(|(b, x)| 0.5 * (b + x))
                .collect();
            let fs = f(&shrunk);
            *vertex = (shrunk, fs);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}
