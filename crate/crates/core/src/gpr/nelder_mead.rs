//! Box-constrained Nelder-Mead simplex search with dimension-adaptive
//! coefficients (Gao & Han). Trial points are projected onto the box.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    /// Convergence when the spread of simplex values falls below
    /// `f_tol * (1 + |f_best|)` and the simplex fits in an `x_tol` box.
    pub f_tol: f64,
    pub x_tol: f64,
    pub initial_step: f64,
    /// Fresh simplexes built around the converged point.
    pub rebuilds: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_evals: 3000,
            f_tol: 1e-10,
            x_tol: 1e-6,
            initial_step: 1.0,
            rebuilds: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evals: usize,
}

fn project(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *v = v.clamp(lo, hi);
    }
}

struct Counter<'a, F> {
    f: &'a mut F,
    bounds: &'a [(f64, f64)],
    evals: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counter<'_, F> {
    fn eval(&mut self, mut x: Vec<f64>) -> (Vec<f64>, f64) {
        project(&mut x, self.bounds);
        self.evals += 1;
        let fx = (self.f)(&x);
        (x, if fx.is_nan() { f64::INFINITY } else { fx })
    }
}

/// Minimizes `f` over the box `bounds`, starting from `x0`.
/// NaN objective values are treated as `+inf`.
pub fn minimize<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    bounds: &[(f64, f64)],
    opts: &NelderMeadOptions,
) -> Minimum {
    assert_eq!(x0.len(), bounds.len());
    let n = x0.len();
    let nf = n as f64;
    let (alpha, beta, gamma, delta) =
        (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);
    let mut counter = Counter {
        f: &mut f,
        bounds,
        evals: 0,
    };
    let (mut best_x, mut best_f) = counter.eval(x0.to_vec());

    for _round in 0..=opts.rebuilds {
        let round_start_f = best_f;
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((best_x.clone(), best_f));
        for i in 0..n {
            let mut x = best_x.clone();
            let (lo, hi) = bounds[i];
            // step inward if the vertex would sit on the boundary
            x[i] = if x[i] + opts.initial_step <= hi {
                x[i] + opts.initial_step
            } else {
                (x[i] - opts.initial_step).max(lo)
            };
            simplex.push(counter.eval(x));
        }

        while counter.evals < opts.max_evals {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let f_lo = simplex[0].1;
            let f_hi = simplex[n].1;
            let spread_f = (f_hi - f_lo).abs();
            let spread_x = (0..n)
                .map(|d| {
                    let (mn, mx) = simplex.iter().fold((f64::MAX, f64::MIN), |(mn, mx), p| {
                        (mn.min(p.0[d]), mx.max(p.0[d]))
                    });
                    mx - mn
                })
                .fold(0.0, f64::max);
            if f_lo.is_finite()
                && spread_f <= opts.f_tol * (1.0 + f_lo.abs())
                && spread_x <= opts.x_tol
            {
                break;
            }

            let centroid: Vec<f64> = (0..n)
                .map(|d| simplex[..n].iter().map(|p| p.0[d]).sum::<f64>() / nf)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n].0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let (xr, fr) = counter.eval(along(alpha));
            if fr < f_lo {
                let (xe, fe) = counter.eval(along(alpha * beta));
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < f_hi {
                counter.eval(along(alpha * gamma))
            } else {
                counter.eval(along(-gamma))
            };
            if fc < fr.min(f_hi) {
                simplex[n] = (xc, fc);
                continue;
            }
            // shrink toward the best vertex
            let x_best = simplex[0].0.clone();
            for p in simplex.iter_mut().skip(1) {
                let x: Vec<f64> = x_best
                    .iter()
                    .zip(&p.0)
                    .map(|(b, v)| b + delta * (v - b))
                    .collect();
                *p = counter.eval(x);
            }
        }

        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[0].1 < best_f {
            best_x = simplex[0].0.clone();
            best_f = simplex[0].1;
        }
        if counter.evals >= opts.max_evals
            || (round_start_f - best_f).abs() <= opts.f_tol * (1.0 + best_f.abs())
        {
            break;
        }
    }

    Minimum {
        x: best_x,
        fx: best_f,
        evals: counter.evals,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let target = [1.0, -2.0, 0.5, 3.0];
        let m = minimize(
            |x| x.iter().zip(&target).map(|(a, b)| (a - b).powi(2)).sum(),
            &[0.0; 4],
            &[(-10.0, 10.0); 4],
            &NelderMeadOptions::default(),
        );
        for (a, b) in m.x.iter().zip(&target) {
            assert!((a - b).abs() < 1e-4, "{:?}", m.x);
        }
    }

    #[test]
    fn rosenbrock() {
        let m = minimize(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            &[(-5.0, 5.0); 2],
            &NelderMeadOptions {
                max_evals: 5000,
                ..Default::default()
            },
        );
        assert!(
            (m.x[0] - 1.0).abs() < 1e-3 && (m.x[1] - 1.0).abs() < 1e-3,
            "{m:?}"
        );
    }

    #[test]
    fn respects_bounds() {
        let m = minimize(
            |x| (x[0] - 5.0).powi(2) + (x[1] + 5.0).powi(2),
            &[0.0, 0.0],
            &[(-1.0, 1.0), (-1.0, 1.0)],
            &NelderMeadOptions::default(),
        );
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] + 1.0).abs() < 1e-6);
    }

    #[test]
    fn never_worse_than_start_and_nan_tolerant() {
        let f = |x: &[f64]| {
            if x[0] > 0.5 {
                f64::NAN
            } else {
                (x[0] + 0.2).powi(2) + x[1].abs()
            }
        };
        let start = [0.4, 0.3];
        let m = minimize(f, &start, &[(-2.0, 2.0); 2], &NelderMeadOptions::default());
        assert!(m.fx <= f(&start));
        assert!(m.fx.is_finite());
    }
}
