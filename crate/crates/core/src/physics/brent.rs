//! Brent's bracketing root finder (inverse quadratic interpolation, secant and
//! bisection steps), iterated until the bracket collapses to machine precision.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrentRoot {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BrentError<E> {
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    MaxIterations {
        best: BrentRoot,
    },
    Eval(E),
}

/// Finds a root of `f` in `[lo, hi]`, which must bracket a sign change.
///
/// `xtol` is an absolute tolerance on the root location; pass `0.0` to
/// refine until adjacent floats.
pub fn brent<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    lo: f64,
    hi: f64,
    xtol: f64,
    max_iter: usize,
) -> Result<BrentRoot, BrentError<E>> {
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a).map_err(BrentError::Eval)?;
    let mut fb = f(b).map_err(BrentError::Eval)?;
    if fa == 0.0 {
        return Ok(BrentRoot {
            x: a,
            fx: fa,
            iterations: 0,
        });
    }
    if fb == 0.0 {
        return Ok(BrentRoot {
            x: b,
            fx: fb,
            iterations: 0,
        });
    }
    if fa.signum() == fb.signum() {
        return Err(BrentError::NoSignChange {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for iter in 1..=max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(BrentRoot {
                x: b,
                fx: fb,
                iterations: iter,
            });
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                // secant
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                // inverse quadratic
                let q0 = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * q0 * (q0 - r) - (b - a) * (r - 1.0));
                q = (q0 - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b).map_err(BrentError::Eval)?;
    }
    Err(BrentError::MaxIterations {
        best: BrentRoot {
            x: b,
            fx: fb,
            iterations: max_iter,
        },
    })
}
