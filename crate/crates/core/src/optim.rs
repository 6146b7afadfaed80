//! Nelder–Mead simplex minimisation.

/// Result of a minimisation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    /// Simplex shrank below the tolerance before the evaluation budget ran out.
    pub converged: bool,
}

/// Minimises `f` from `x0`.
///
/// The starting simplex is `x0` plus `step` along each axis. Stops once every
/// vertex lies within `tol` (max-norm) of the best vertex, or after
/// `max_evals` evaluations. The returned point is the best ever evaluated, so
/// its value never exceeds `f(x0)`.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], step: f64, tol: f64, max_evals: usize) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    let mut evals = 0usize;
    let mut best = (x0.to_vec(), f64::INFINITY);
    // Points past the budget are rejected without evaluation.
    let mut eval = |x: &[f64], evals: &mut usize, best: &mut (Vec<f64>, f64)| {
        if *evals >= max_evals {
            return f64::INFINITY;
        }
        *evals += 1;
        let v = f(x);
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if v < best.1 {
            best.0 = x.to_vec();
            best.1 = v;
        }
        v
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let v0 = eval(x0, &mut evals, &mut best);
    simplex.push((x0.to_vec(), v0));
    if dim == 0 {
        return Minimum { x: best.0, value: best.1, evals, converged: true };
    }
    for i in 0..dim {
        if evals >= max_evals {
            break;
        }
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(&x, &mut evals, &mut best);
        simplex.push((x, v));
    }
    if simplex.len() < dim + 1 {
        return Minimum { x: best.0, value: best.1, evals, converged: false };
    }

    let mut converged = false;
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let size = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if size < tol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|(x, _)| x[k]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (w - c)).collect()
        };

        let xr = along(-1.0);
        let fr = eval(&xr, &mut evals, &mut best);
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = eval(&xe, &mut evals, &mut best);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
            continue;
        }
        // Contract toward the better of the reflected and worst points.
        let (xc, fc) = if fr < worst.1 {
            let xc = along(-0.5);
            let fc = eval(&xc, &mut evals, &mut best);
            (xc, fc)
        } else {
            let xc = along(0.5);
            let fc = eval(&xc, &mut evals, &mut best);
            (xc, fc)
        };
        if fc < worst.1.min(fr) {
            simplex[dim] = (xc, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            if evals >= max_evals {
                break;
            }
            let x: Vec<f64> = anchor.iter().zip(&vertex.0).map(|(a, v)| a + 0.5 * (v - a)).collect();
            let v = eval(&x, &mut evals, &mut best);
            *vertex = (x, v);
        }
    }
    Minimum { x: best.0, value: best.1, evals, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let m = nelder_mead(
            |x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2),
            &[0.0, 0.0],
            0.5,
            1e-8,
            5000,
        );
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] + 2.0).abs() < 1e-6);
    }

    #[test]
    fn rosenbrock() {
        let m = nelder_mead(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            0.5,
            1e-10,
            20_000,
        );
        assert!(m.value < 1e-10, "{m:?}");
    }

    #[test]
    fn budget_and_monotonicity() {
        let f = |x: &[f64]| x.iter().map(|v| v.sin() + 0.1 * v * v).sum::<f64>();
        let x0 = [2.0, -1.0, 0.5];
        let m = nelder_mead(f, &x0, 0.3, 1e-12, 25);
        assert!(m.evals <= 25);
        assert!(m.value <= f(&x0));
    }
}
