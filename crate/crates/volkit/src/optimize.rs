//! Derivative-free simplex search with a quasi-Newton polish, used by the
//! maximum-likelihood estimators on transformed (unconstrained) parameters.
//!
//! Both routines are deterministic: no randomness, no time-dependent state.
//! Objectives may return `f64::INFINITY` for unusable points; the simplex
//! treats such points as arbitrarily bad.

/// Outcome of a minimization run.
#[derive(Debug, Clone)]
pub(crate) struct OptimOutcome {
    pub x: Vec<f64>,
    pub fx: f64,
    /// Stopped by tolerance rather than by the evaluation budget.
    pub converged: bool,
    pub evals: usize,
}

/// Nelder-Mead simplex minimization.
///
/// Standard reflection/expansion/contraction/shrink coefficients
/// (1, 2, 0.5, 0.5); stops when the simplex function spread falls below
/// `ftol` or the evaluation budget is spent.
pub(crate) fn nelder_mead(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    initial_step: f64,
    ftol: f64,
    max_evals: usize,
) -> OptimOutcome {
    let dim = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    // Vertices paired with their objective values, kept sorted best-first.
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let f0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), f0));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += initial_step;
        let fx = eval(&x, &mut evals);
        simplex.push((x, fx));
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));

    let mut converged = false;
    while evals + 4 <= max_evals {
        let spread = simplex[dim].1 - simplex[0].1;
        if spread.is_finite() && spread <= ftol {
            converged = true;
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let point = |coef: f64| -> Vec<f64> {
            centroid.iter().zip(&worst.0).map(|(c, w)| c + coef * (c - w)).collect()
        };

        let reflected = point(1.0);
        let f_reflected = eval(&reflected, &mut evals);
        if f_reflected < simplex[0].1 {
            let expanded = point(2.0);
            let f_expanded = eval(&expanded, &mut evals);
            simplex[dim] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
        } else if f_reflected < simplex[dim - 1].1 {
            simplex[dim] = (reflected, f_reflected);
        } else {
            let contracted = if f_reflected < worst.1 { point(0.5) } else { point(-0.5) };
            let f_contracted = eval(&contracted, &mut evals);
            if f_contracted < worst.1.min(f_reflected) {
                simplex[dim] = (contracted, f_contracted);
            } else {
                // Shrink toward the best vertex.
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    for (v, b) in vertex.0.iter_mut().zip(&best) {
                        *v = b + 0.5 * (*v - b);
                    }
                    vertex.1 = eval(&vertex.0.clone(), &mut evals);
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    }

    let (x, fx) = simplex.swap_remove(0);
    OptimOutcome { x, fx, converged, evals }
}

/// BFGS minimization with central-difference gradients and a backtracking
/// Armijo line search. Intended as a polish step from a near-optimal point.
pub(crate) fn quasi_newton_polish(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    ftol: f64,
    max_evals: usize,
) -> OptimOutcome {
    let dim = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut x = x0.to_vec();
    let mut fx = eval(&x, &mut evals);
    if !fx.is_finite() {
        return OptimOutcome { x, fx, converged: false, evals };
    }

    let gradient = |x: &[f64], evals: &mut usize, eval: &mut dyn FnMut(&[f64], &mut usize) -> f64| -> Option<Vec<f64>> {
        let mut g = vec![0.0; x.len()];
        for i in 0..x.len() {
            let h = 1e-6 * (1.0 + x[i].abs());
            let mut xp = x.to_vec();
            xp[i] += h;
            let fp = eval(&xp, evals);
            xp[i] = x[i] - h;
            let fm = eval(&xp, evals);
            if !(fp.is_finite() && fm.is_finite()) {
                return None;
            }
            g[i] = (fp - fm) / (2.0 * h);
        }
        Some(g)
    };

    // Inverse-Hessian approximation, identity to start.
    let mut h_inv: Vec<Vec<f64>> = (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    let mut g = match gradient(&x, &mut evals, &mut eval) {
        Some(g) => g,
        None => return OptimOutcome { x, fx, converged: false, evals },
    };

    let mut converged = false;
    while evals + 2 * dim + 4 <= max_evals {
        // d = −H·g
        let mut direction = vec![0.0; dim];
        for i in 0..dim {
            direction[i] = -(0..dim).map(|j| h_inv[i][j] * g[j]).sum::<f64>();
        }
        let slope: f64 = direction.iter().zip(&g).map(|(d, gi)| d * gi).sum();
        if slope >= 0.0 {
            // Not a descent direction; reset the approximation.
            for (i, row) in h_inv.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = if i == j { 1.0 } else { 0.0 };
                }
            }
            direction = g.iter().map(|gi| -gi).collect();
        }
        let slope: f64 = direction.iter().zip(&g).map(|(d, gi)| d * gi).sum();
        if slope.abs() <= 1e-16 * (1.0 + fx.abs()) {
            converged = true;
            break;
        }

        // Backtracking Armijo search.
        let mut step = 1.0;
        let mut x_new = Vec::new();
        let mut f_new = f64::INFINITY;
        let mut accepted = false;
        for _ in 0..30 {
            x_new = x.iter().zip(&direction).map(|(xi, d)| xi + step * d).collect();
            f_new = eval(&x_new, &mut evals);
            if f_new <= fx + 1e-4 * step * slope {
                accepted = true;
                break;
            }
            step *= 0.5;
            if evals + 2 * dim + 4 > max_evals {
                break;
            }
        }
        if !accepted {
            converged = true; // no descent achievable at this resolution
            break;
        }

        let improvement = fx - f_new;
        let g_new = match gradient(&x_new, &mut evals, &mut eval) {
            Some(g) => g,
            None => {
                x = x_new;
                fx = f_new;
                break;
            }
        };

        // BFGS update of the inverse Hessian.
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        if sy > 1e-12 {
            let rho = 1.0 / sy;
            // H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ
            let mut hy = vec![0.0; dim];
            for i in 0..dim {
                hy[i] = (0..dim).map(|j| h_inv[i][j] * y[j]).sum();
            }
            let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
            for i in 0..dim {
                for j in 0..dim {
                    h_inv[i][j] += rho * rho * yhy * s[i] * s[j]
                        - rho * (hy[i] * s[j] + s[i] * hy[j])
                        + rho * s[i] * s[j];
                }
            }
        }

        x = x_new;
        fx = f_new;
        g = g_new;
        if improvement < ftol {
            converged = true;
            break;
        }
    }

    OptimOutcome { x, fx, converged, evals }
}
