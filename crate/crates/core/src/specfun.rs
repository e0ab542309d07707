//! Scalar special functions: the quantum exponential on the real line and the
//! auxiliary function V_theta it is built from.
//!
//! V_theta(x) = exp{ (1/2*pi*i) \int_0^\infty log(1 + a^{-theta}) / (a + e^{-x}) da },
//! analytic on the strip |Im x| < pi.  After a = e^u the integrand becomes
//! log(1 + e^{-theta u}) e^u / (e^u + e^{-x}), which is what we integrate.
//!
//! The deformation parameter is hbar = sign * pi / (2k + 3) and the exponent
//! theta = 2*pi/hbar.  With that choice the reflection identity
//!   conj(V(log t)) = e^{-i pi/4} c' e^{i log^2 t / 2 hbar} V(-log t)
//! holds to machine precision and |F(r, rho)| = 1 exactly on the negative
//! half-line; see the design notes for the calibration that pinned this.

use crate::error::{Error, Result};
use crate::quad::{adaptive_simpson, integrate_pieces};
use num_complex::Complex64;
use std::f64::consts::PI;

pub const DEFAULT_TOL: f64 = 1e-10;
const BUDGET: usize = 4_000_000;

type C64 = Complex64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Deformation parameter bundle.  `hbar = sign * pi / (2k + 3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanckParam {
    pub k: u32,
    pub sign: i8,
    pub hbar: f64,
    /// Exponent used in the defining integral: `2*pi/hbar`.
    pub theta: f64,
    /// Reflection constant `c' = exp(i(pi/4 + hbar/24 + pi^2/(6 hbar)))`.
    pub c_prime: C64,
}

pub fn make_planck(k: u32, sign: i8) -> Result<PlanckParam> {
    if sign != 1 && sign != -1 {
        return Err(Error::Config(format!("sign must be +1 or -1, got {sign}")));
    }
    let hbar = f64::from(sign) * PI / (2.0 * k as f64 + 3.0);
    let theta = 2.0 * PI / hbar;
    let c_prime = c(0.0, PI / 4.0 + hbar / 24.0 + PI * PI / (6.0 * hbar)).exp();
    Ok(PlanckParam { k, sign, hbar, theta, c_prime })
}

impl PlanckParam {
    /// (-1)^k as a float.
    pub fn parity(&self) -> f64 {
        if self.k % 2 == 0 { 1.0 } else { -1.0 }
    }
}

/// A point of the "real line with doubled negative half-axis": `rho` must be
/// 0 when `r >= 0` and +-1 when `r < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaRealPoint {
    pub r: f64,
    pub rho: i8,
}

impl DeltaRealPoint {
    pub fn new(r: f64, rho: i8) -> Result<Self> {
        if !r.is_finite() {
            return Err(Error::Domain(format!("r must be finite, got {r}")));
        }
        if r >= 0.0 && rho != 0 {
            return Err(Error::Domain(format!("rho must be 0 for r >= 0, got {rho}")));
        }
        if r < 0.0 && rho != 1 && rho != -1 {
            return Err(Error::Domain(format!("rho must be +-1 for r < 0, got {rho}")));
        }
        Ok(DeltaRealPoint { r, rho })
    }
}

/// log(1 + e^{-theta u}) without overflow at either end.
fn softlog(theta: f64, u: f64) -> f64 {
    let w = -theta * u;
    if w > 30.0 {
        w + (-w).exp().ln_1p()
    } else if w < -30.0 {
        w.exp().ln_1p()
    } else {
        w.exp().ln_1p()
    }
}

/// d/du log(1 + e^{-theta u}) = -theta / (1 + e^{theta u}).
fn softlog_deriv(theta: f64, u: f64) -> f64 {
    let w = theta * u;
    if w > 700.0 {
        0.0
    } else {
        -theta / (1.0 + w.exp())
    }
}

/// Exponent E(x) = \int log(1+e^{-theta u}) e^u/(e^u + e^{-x}) du over the
/// whole line, truncated where the tails are below working precision.
fn vtheta_exponent(theta: f64, x: C64, tol: f64) -> Result<C64> {
    let emx = (-x).exp();
    let rex = x.re;
    let lo = (-rex).min(0.0) - 55.0;
    let hi = (-rex).max(0.0) + 34.0 / theta + 3.0;
    let mut pts = vec![lo, -rex - 1.0, -rex, -rex + 1.0, 0.0, hi];
    // When Im x approaches +-pi the denominator nearly vanishes at u = -Re x;
    // pack breakpoints geometrically around that point so the adaptive rule
    // sees the spike.
    let eps_eff = PI - x.im.abs();
    if eps_eff < 0.5 {
        let mut d = 0.5;
        let d_min = (eps_eff / 4.0).max(1e-8);
        while d > d_min {
            pts.push(-rex - d);
            pts.push(-rex + d);
            d *= 0.25;
        }
    }
    pts.retain(|p| p.is_finite() && *p >= lo && *p <= hi);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let f = |u: f64| {
        let eu = u.exp();
        softlog(theta, u) * eu / (eu + emx)
    };
    integrate_pieces(f, &pts, tol, BUDGET)
}

/// V_theta at a point of the open strip |Im x| < pi, for an explicitly given
/// theta > 0.  Internal entry point; also used by the calibration controls.
pub(crate) fn vtheta_with_theta(theta: f64, x: C64, tol: f64) -> Result<C64> {
    if theta <= 0.0 {
        return Err(Error::Domain(format!("theta must be positive, got {theta}")));
    }
    if x.im.abs() >= PI {
        return Err(Error::Domain(format!(
            "x = {x} outside the strip |Im x| < pi"
        )));
    }
    let e = vtheta_exponent(theta, x, tol)?;
    Ok((e / c(0.0, 2.0 * PI)).exp())
}

/// V_theta(x) on the strip |Im x| < pi.
pub fn vtheta(p: &PlanckParam, x: C64, tol: f64) -> Result<C64> {
    if p.hbar <= 0.0 {
        return Err(Error::Domain(
            "defining integral requires hbar > 0 (theta > 0)".into(),
        ));
    }
    vtheta_with_theta(p.theta, x, tol)
}

/// log V_theta(y - i pi) on the lower edge of the strip, from the principal
/// value plus half-residue form of the defining integral.  Safe to exponentiate
/// after adding dressing exponents, which is why the log is exposed.
pub(crate) fn vtheta_lower_log(theta: f64, y: f64, tol: f64) -> Result<C64> {
    if theta <= 0.0 {
        return Err(Error::Domain(format!("theta must be positive, got {theta}")));
    }
    // x = y - i pi, so e^{-x} = -e^{-y}: simple pole at u0 = -y.
    let u0 = -y;
    let g = |u: f64| softlog(theta, u) * u.exp();
    // Integrand with the pole: g(u) / (e^u - e^{u0}).
    let phi = |u: f64| {
        let eu = u.exp();
        g(u) / (eu - u0.exp())
    };
    let lo = u0.min(0.0) - 55.0;
    let hi = u0.max(0.0) + 34.0 / theta + 3.0;
    let h = 1.0;
    // Symmetric sum around the pole: the simple pole cancels and
    // psi(s) = phi(u0+s) + phi(u0-s) extends analytically to s = 0 with
    // psi(0) = 2 softlog'(u0) + softlog(u0).
    let psi0 = 2.0 * softlog_deriv(theta, u0) + softlog(theta, u0);
    let psi = |s: f64| {
        if s < 1e-9 {
            c(psi0, 0.0)
        } else {
            c(phi(u0 + s) + phi(u0 - s), 0.0)
        }
    };
    let pv_core = adaptive_simpson(psi, 0.0, h, tol, BUDGET)?;
    let mut pts_left = vec![lo, u0 - 1.0];
    let mut pts_right = vec![u0 + 1.0, hi];
    if u0 - 1.0 > lo {
        pts_left.insert(1, (u0 - 1.0).min(0.0).max(lo));
    }
    if u0 + 1.0 < hi {
        pts_right.insert(1, (u0 + 1.0).max(0.0).min(hi));
    }
    pts_left.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts_left.dedup();
    pts_right.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts_right.dedup();
    let wrap = |u: f64| c(phi(u), 0.0);
    let tail = integrate_pieces(wrap, &pts_left, tol, BUDGET)?
        + integrate_pieces(wrap, &pts_right, tol, BUDGET)?;
    let pv = pv_core + tail;
    // Half-residue: the pole sits at a = e^{-y} approached from below the
    // positive real axis, contributing -i pi times the residue log(1+e^{theta y}).
    let residue = softlog(theta, u0);
    let e = pv - c(0.0, PI * residue);
    Ok(e / c(0.0, 2.0 * PI))
}

fn neville_at_zero(xs: &[f64], ys: &[C64]) -> C64 {
    let n = xs.len();
    let mut t = ys.to_vec();
    for level in 1..n {
        for i in 0..n - level {
            let xi = xs[i];
            let xj = xs[i + level];
            t[i] = (t[i + 1] * c(-xi, 0.0) - t[i] * c(-xj, 0.0)) / (xj - xi);
        }
    }
    t[0]
}

/// V_theta(y - i pi): boundary value on the lower edge of the strip.
///
/// Computed two independent ways — extrapolation of interior values
/// V_theta(y - i(pi - eps)) to eps = 0, and the principal-value-plus-residue
/// form — which must agree within `tol`.
pub fn vtheta_lower_edge(p: &PlanckParam, y: f64, tol: f64) -> Result<C64> {
    if p.hbar <= 0.0 {
        return Err(Error::Domain(
            "defining integral requires hbar > 0 (theta > 0)".into(),
        ));
    }
    let v_pv = vtheta_lower_log(p.theta, y, DEFAULT_TOL)?.exp();
    let eps: [f64; 4] = [1e-2, 1e-3, 1e-4, 1e-5];
    let mut vals = Vec::with_capacity(eps.len());
    for &e in &eps {
        vals.push(vtheta_with_theta(p.theta, c(y, -(PI - e)), 1e-11)?);
    }
    let v_eps = neville_at_zero(&eps, &vals);
    if (v_eps - v_pv).norm() > tol.max(1e-8) {
        return Err(Error::NonConvergence(format!(
            "lower-edge methods disagree at y = {y}: |diff| = {:.3e}",
            (v_eps - v_pv).norm()
        )));
    }
    Ok(v_pv)
}

/// The quantum exponential F(r, rho) on the doubled real line:
/// F = V_theta(log r) for r > 0, F = 1 at r = 0, and
/// F = (1 + i rho |r|^{theta/2}) V_theta(log|r| - i pi) for r < 0.
pub fn fh_scalar(p: &PlanckParam, pt: DeltaRealPoint, tol: f64) -> Result<C64> {
    if pt.r == 0.0 {
        return Ok(c(1.0, 0.0));
    }
    if pt.r > 0.0 {
        return vtheta(p, c(pt.r.ln(), 0.0), tol);
    }
    let y = (-pt.r).ln();
    let e_low = vtheta_lower_log(p.theta, y, tol)?;
    // 1 + i rho e^w with w = (theta/2) y, evaluated in log space when e^w
    // alone would overflow.
    let w = 0.5 * p.theta * y;
    if w <= 300.0 {
        let v = e_low.exp();
        Ok((c(1.0, 0.0) + c(0.0, f64::from(pt.rho)) * c(w.exp(), 0.0)) * v)
    } else {
        // log(1 + i rho e^w) = w + log(i rho) + O(e^{-w})
        let log_pref = c(w, f64::from(pt.rho) * PI / 2.0);
        Ok((log_pref + e_low).exp())
    }
}

/// Residual of the strip-interior reflection identity at t > 0:
/// |conj(V(log t)) - e^{-i pi/4} c' e^{i log^2 t / 2 hbar} V(-log t)|.
pub fn reflection_residual(p: &PlanckParam, t: f64, tol: f64) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    let y = t.ln();
    let lhs = vtheta(p, c(y, 0.0), tol)?.conj();
    let rhs = c(0.0, -PI / 4.0).exp()
        * p.c_prime
        * c(0.0, y * y / (2.0 * p.hbar)).exp()
        * vtheta(p, c(-y, 0.0), tol)?;
    Ok((lhs - rhs).norm())
}

/// Same residual but with the exponent theta perturbed by `scale`; used as a
/// negative control for the theta calibration.
pub fn reflection_residual_scaled_theta(p: &PlanckParam, t: f64, scale: f64, tol: f64) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    let theta = p.theta * scale;
    let y = t.ln();
    let lhs = vtheta_with_theta(theta, c(y, 0.0), tol)?.conj();
    let rhs = c(0.0, -PI / 4.0).exp()
        * p.c_prime
        * c(0.0, y * y / (2.0 * p.hbar)).exp()
        * vtheta_with_theta(theta, c(-y, 0.0), tol)?;
    Ok((lhs - rhs).norm())
}

/// Residual of the lower-edge reflection identity at t > 0 (y = log t):
/// |conj(V(y - i pi)) - i (-1)^k c' e^{-i pi/4} e^{i y^2/2 hbar} e^{-(theta/2) y} V(-y - i pi)|.
pub fn lower_reflection_residual(p: &PlanckParam, t: f64, tol: f64) -> Result<f64> {
    lower_reflection_residual_impl(p, t, tol, false)
}

/// Negative control: same identity with c' conjugated.
pub fn lower_reflection_residual_conj_control(p: &PlanckParam, t: f64, tol: f64) -> Result<f64> {
    lower_reflection_residual_impl(p, t, tol, true)
}

fn lower_reflection_residual_impl(p: &PlanckParam, t: f64, tol: f64, conj_c: bool) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    let y = t.ln();
    let lhs = vtheta_lower_edge(p, y, tol)?.conj();
    let cp = if conj_c { p.c_prime.conj() } else { p.c_prime };
    let rhs = c(0.0, 1.0)
        * c(p.parity(), 0.0)
        * cp
        * c(0.0, -PI / 4.0).exp()
        * c(0.0, y * y / (2.0 * p.hbar)).exp()
        * c((-0.5 * p.theta * y).exp(), 0.0)
        * vtheta_lower_edge(p, -y, tol)?;
    Ok((lhs - rhs).norm())
}

// Scalar pieces used by the operator functional calculus: the positive-branch
// value, the lower-edge value, and the dressed lower-edge value
// |lambda|^{theta/2} V(log|lambda| - i pi) computed in log space.
pub(crate) fn fh_branch_positive(p: &PlanckParam, lambda: f64, tol: f64) -> Result<C64> {
    vtheta(p, c(lambda.ln(), 0.0), tol)
}

pub(crate) fn fh_branch_lower(p: &PlanckParam, lambda_abs: f64, tol: f64) -> Result<C64> {
    Ok(vtheta_lower_log(p.theta, lambda_abs.ln(), tol)?.exp())
}

pub(crate) fn fh_branch_lower_dressed(p: &PlanckParam, lambda_abs: f64, tol: f64) -> Result<C64> {
    let y = lambda_abs.ln();
    let e = vtheta_lower_log(p.theta, y, tol)?;
    Ok((e + c(0.5 * p.theta * y, 0.0)).exp())
}
