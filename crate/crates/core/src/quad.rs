//! Adaptive quadrature for complex-valued integrands on real intervals.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Adaptive Simpson integration of a complex integrand over `[a, b]`.
///
/// `tol` is an absolute tolerance on the integral value; `budget` caps the
/// number of integrand evaluations before giving up.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64, budget: usize) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("non-finite interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let mut evals = 3usize;
    let val = simpson_recurse(&f, a, b, fa, fm, fb, whole, tol, 50, &mut evals, budget)?;
    Ok(val)
}

/// Integrate over consecutive panels `[pts[0], pts[1]], [pts[1], pts[2]], ...`.
/// Breakpoints must be sorted ascending.
pub fn integrate_pieces<F>(f: F, pts: &[f64], tol: f64, budget: usize) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if pts.len() < 2 {
        return Err(Error::Domain("need at least two breakpoints".into()));
    }
    for w in pts.windows(2) {
        if w[1] < w[0] {
            return Err(Error::Domain("breakpoints must be sorted".into()));
        }
    }
    let per_piece = tol / (pts.len() - 1) as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for w in pts.windows(2) {
        total += adaptive_simpson(&f, w[0], w[1], per_piece, budget)?;
    }
    Ok(total)
}

fn simpson(a: f64, b: f64, fa: Complex64, fm: Complex64, fb: Complex64) -> Complex64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
    evals: &mut usize,
    budget: usize,
) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if *evals > budget {
        return Err(Error::NonConvergence(format!(
            "evaluation budget {budget} exhausted on [{a}, {b}]"
        )));
    }
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    *evals += 2;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 {
        return Err(Error::NonConvergence(format!(
            "max subdivision depth reached on [{a}, {b}]"
        )));
    }
    // Absolute tolerance with a roundoff-relative floor: integrands built
    // from near-cancelling f64 sums carry ~1e-11 noise relative to the
    // magnitude of the summands (not of the cancelled integral), so panels
    // cannot be resolved beyond that no matter how finely they are split.
    let sample_mass = (b - a) / 6.0
        * (fa.norm() + 4.0 * flm.norm() + fm.norm() + 4.0 * frm.norm() + fb.norm());
    if delta.norm() <= 15.0 * tol || delta.norm() <= 1e-11 * sample_mass {
        return Ok(left + right + delta / 15.0);
    }
    let lv = simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, evals, budget)?;
    let rv = simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, evals, budget)?;
    Ok(lv + rv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn integrates_polynomial_exactly() {
        let v = adaptive_simpson(|x| Complex64::new(x * x * x - 2.0 * x, 0.0), 0.0, 2.0, 1e-12, 100_000).unwrap();
        assert_abs_diff_eq!(v.re, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn integrates_complex_exponential() {
        // \int_0^pi e^{ix} dx = 2i
        let v = adaptive_simpson(|x| Complex64::new(0.0, x).exp(), 0.0, PI, 1e-12, 100_000).unwrap();
        assert_abs_diff_eq!(v.re, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(v.im, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn integrates_gaussian_tail() {
        // \int_{-10}^{10} e^{-x^2} dx = sqrt(pi) to ~1e-44
        let v = adaptive_simpson(|x| Complex64::new((-x * x).exp(), 0.0), -10.0, 10.0, 1e-12, 1_000_000).unwrap();
        assert_abs_diff_eq!(v.re, PI.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn pieces_match_single_panel() {
        let f = |x: f64| Complex64::new((x).sin(), (2.0 * x).cos());
        let a = adaptive_simpson(f, -1.0, 3.0, 1e-12, 1_000_000).unwrap();
        let b = integrate_pieces(f, &[-1.0, 0.0, 0.5, 3.0], 1e-12, 1_000_000).unwrap();
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn rejects_unsorted_breakpoints() {
        let f = |_: f64| Complex64::new(1.0, 0.0);
        assert!(integrate_pieces(f, &[0.0, 2.0, 1.0], 1e-10, 1000).is_err());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        // highly oscillatory with a tiny budget
        let r = adaptive_simpson(|x| Complex64::new((200.0 * x).sin(), 0.0), 0.0, 10.0, 1e-14, 50);
        assert!(matches!(r, Err(Error::NonConvergence(_))), "got {r:?}");
    }
}
