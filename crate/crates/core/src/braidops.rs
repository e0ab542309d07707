//! The braided group operations on doubled systems: forming the extension
//! [R+S] (resp. [b+d]) by conjugating the second leg with the quantum
//! exponential of the quotient operator T = e^{i hbar/2} S^{-1} R, the block
//! closed form of that exponential, and residual checks of the exponential
//! functional equation and of the homomorphism properties of the structure
//! maps between the three operator domains.

use std::cell::RefCell;
use std::collections::HashMap;

use ndarray::{Array1, Array2};

use crate::domains::{map_m_to_n_tensor, map_n_to_m, BlockSystem, Flavor, MPair, NPair};
use crate::error::{Error, Result};
use crate::hilbert::{
    conj_transpose, fro_norm, kron, kron_with_signs, lift_probes, quadratic_form,
    rel_fro_residual, spectral_projection_with, try_func_of_hermitian, HermitianSpectral, LinOp,
    OpFlags, SpecRegion, StateVector, C64,
};
use crate::specfun::{
    fh_branch_lower, fh_branch_lower_dressed, fh_branch_positive, PlanckParam,
};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// The data produced while building an extension: the quotient operator, its
/// reflection, and the block quantum exponential used for the conjugation.
#[derive(Debug, Clone)]
pub struct ExtensionData {
    pub t: LinOp,
    pub tau: LinOp,
    pub fh_t: LinOp,
}

/// F_h(m A, mu nu chi(m A < 0)) for a Hermitian A and a commuting reflection
/// nu supported (at most) on the spectral subspaces of A, by joint functional
/// calculus:
///
///   F = f1(A) + nu f2(A),
///   f1(v) = V(log v)            for v = m lambda > 0,
///         = 1                   for v = 0,
///         = V(log|v| - i pi)    for v < 0,
///   f2(v) = i mu |v|^{theta/2} V(log|v| - i pi)  for v < 0, else 0.
///
/// On a nu-eigenvector with eigenvalue rho this reduces to the scalar
/// piecewise definition (1 + i mu rho |v|^{theta/2}) V(log|v| - i pi).
/// f2 vanishes off the negative subspace, so any chi(mA < 0) factor in the
/// reflection argument is absorbed automatically.
pub fn fh_of_scaled_pair(
    p: &PlanckParam,
    a: &LinOp,
    nu: &LinOp,
    m: f64,
    mu: f64,
    tol: f64,
) -> Result<LinOp> {
    if a.dim() != nu.dim() {
        return Err(Error::DimensionMismatch("pair operands differ in size".into()));
    }
    let memo1: RefCell<HashMap<u64, C64>> = RefCell::new(HashMap::new());
    let memo2: RefCell<HashMap<u64, C64>> = RefCell::new(HashMap::new());
    let f1 = try_func_of_hermitian(a, |lam| {
        let v = m * lam;
        if let Some(&z) = memo1.borrow().get(&v.to_bits()) {
            return Ok(z);
        }
        let z = if v > 0.0 {
            fh_branch_positive(p, v, tol)?
        } else if v < 0.0 {
            fh_branch_lower(p, -v, tol)?
        } else {
            c(1.0, 0.0)
        };
        memo1.borrow_mut().insert(v.to_bits(), z);
        Ok(z)
    })?;
    let f2 = try_func_of_hermitian(a, |lam| {
        let v = m * lam;
        if v >= 0.0 {
            return Ok(c(0.0, 0.0));
        }
        if let Some(&z) = memo2.borrow().get(&v.to_bits()) {
            return Ok(z);
        }
        let z = c(0.0, mu) * fh_branch_lower_dressed(p, -v, tol)?;
        memo2.borrow_mut().insert(v.to_bits(), z);
        Ok(z)
    })?;
    let mat = &f1.mat + &nu.mat.dot(&f2.mat);
    Ok(LinOp::from_parts(mat, OpFlags { unitary: true, ..Default::default() }))
}

/// F_h(A, nu chi(A < 0)).
pub fn fh_of_pair(p: &PlanckParam, a: &LinOp, nu: &LinOp, tol: f64) -> Result<LinOp> {
    fh_of_scaled_pair(p, a, nu, 1.0, 1.0, tol)
}

/// The block closed form of F_h(T, nu) on the standard doubled system, with
/// T = diag(T+, -T+, -T+, T+) and nu the signed middle swap:
///
///   diag blocks 1,4:      V(log T+)
///   diag blocks 2,3:      V(log T+ - i pi)
///   middle off-diagonal:  i (-1)^k T+^{theta/2} V(log T+ - i pi)
///
/// All three pieces are scalar functions of the one positive builder T+.
pub fn fh_block(p: &PlanckParam, sys: &BlockSystem, tol: f64) -> Result<LinOp> {
    let vpos = try_func_of_hermitian(&sys.tp, |lam| fh_branch_positive(p, lam, tol))?;
    let vlow = try_func_of_hermitian(&sys.tp, |lam| fh_branch_lower(p, lam, tol))?;
    let par = p.parity();
    let wd = try_func_of_hermitian(&sys.tp, |lam| {
        Ok(c(0.0, par) * fh_branch_lower_dressed(p, lam, tol)?)
    })?;
    let n = sys.grid.n;
    let mut mat = Array2::zeros((4 * n, 4 * n));
    let mut put = |bi: usize, bj: usize, src: &Array2<C64>| {
        for i in 0..n {
            for j in 0..n {
                mat[[bi * n + i, bj * n + j]] = src[[i, j]];
            }
        }
    };
    put(0, 0, &vpos.mat);
    put(3, 3, &vpos.mat);
    put(1, 1, &vlow.mat);
    put(2, 2, &vlow.mat);
    put(1, 2, &wd.mat);
    put(2, 1, &wd.mat);
    Ok(LinOp::from_parts(mat, OpFlags { unitary: true, ..Default::default() }))
}

/// u^H a u, Hermitian-symmetrized, with spectral data carried through the
/// conjugation (eigenvectors u^H U_a, same eigenvalues).
fn conjugate_hermitian(u: &LinOp, a: &LinOp) -> Result<LinOp> {
    let uh = conj_transpose(&u.mat);
    let mat = uh.dot(&a.mat).dot(&u.mat);
    let mat = (&mat + &conj_transpose(&mat)).mapv(|z| z * 0.5);
    let sa = a.spectral()?;
    let vecs = uh.dot(&sa.eigenvectors);
    let spectral = HermitianSpectral::from_diagonalization(&vecs, &sa.eigenvalues.to_vec())?;
    LinOp::with_spectral(
        mat,
        OpFlags { hermitian: true, positive: a.flags.positive, ..Default::default() },
        spectral,
    )
}

/// u^H a u symmetrized, without spectral bookkeeping (for the involutions).
fn conjugate_involution(u: &LinOp, a: &LinOp) -> LinOp {
    let uh = conj_transpose(&u.mat);
    let mat = uh.dot(&a.mat).dot(&u.mat);
    let mat = (&mat + &conj_transpose(&mat)).mapv(|z| z * 0.5);
    LinOp::from_parts(mat, OpFlags { hermitian: true, ..Default::default() })
}

/// The N-side braided operation on the standard doubled system:
/// [R+S] = F_h(T, nu)^* S F_h(T, nu), sigma~ = F_h(T, nu)^* sigma F_h(T, nu).
pub fn op_n(p: &PlanckParam, sys: &BlockSystem, tol: f64) -> Result<(NPair, ExtensionData)> {
    if sys.flavor != Flavor::N2 {
        return Err(Error::Domain("op_n needs an N-flavor doubled system".into()));
    }
    let fh = fh_block(p, sys, tol)?;
    let r = conjugate_hermitian(&fh, &sys.a2)?;
    let rho = conjugate_involution(&fh, &sys.inv2);
    let ext = ExtensionData { t: sys.t.clone(), tau: sys.nu.clone(), fh_t: fh };
    Ok((NPair { r, rho }, ext))
}

/// The M-side braided operation: [b+d]_phi = F_h(f, phi)^* d F_h(f, phi),
/// delta~ = F_h(f, phi)^* delta F_h(f, phi) (delta = inv1 in the M layout).
pub fn op_m(p: &PlanckParam, sys: &BlockSystem, tol: f64) -> Result<(MPair, ExtensionData)> {
    if sys.flavor != Flavor::M2 {
        return Err(Error::Domain("op_m needs an M-flavor doubled system".into()));
    }
    let fh = fh_block(p, sys, tol)?;
    let b = conjugate_hermitian(&fh, &sys.a2)?;
    let beta = conjugate_involution(&fh, &sys.inv1);
    let ext = ExtensionData { t: sys.t.clone(), tau: sys.nu.clone(), fh_t: fh };
    Ok((MPair { b, beta }, ext))
}

fn probe_norm(v: &Array1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn max_apply_residual(a: &Array2<C64>, b: &Array2<C64>, probes: &[Array1<C64>]) -> f64 {
    let mut worst = 0.0f64;
    for w in probes {
        let aw = a.dot(w);
        let bw = b.dot(w);
        let d = (&aw - &bw).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let scale = probe_norm(&aw).max(probe_norm(&bw)).max(probe_norm(w));
        worst = worst.max(d / scale.max(1e-300));
    }
    worst
}

/// max over probe pairs of |<w|(A - B)v>| / (||w|| ||v||).  The two-sided
/// window matters for the equation residuals: the lower-edge branch functions
/// have kernels decaying only like e^{-|x-y|/2}, so the vector norm of the
/// difference integrates periodization wrap from the grid boundary that both
/// windows suppress.
pub(crate) fn bilinear_residual(a: &Array2<C64>, b: &Array2<C64>, probes: &[Array1<C64>]) -> f64 {
    let diff = a - b;
    let mut worst = 0.0f64;
    for v in probes {
        let dv = diff.dot(v);
        for w in probes {
            let me: C64 = w.iter().zip(dv.iter()).map(|(x, y)| x.conj() * y).sum();
            worst = worst.max(me.norm() / (probe_norm(w) * probe_norm(v)).max(1e-300));
        }
    }
    worst
}

/// Residual of the exponential functional equation
/// F_h([R+S], sigma~ chi([R+S]<0)) = F_h(R, rho chi(R<0)) F_h(S, sigma chi(S<0))
/// on probes lifted to the doubled space.
pub fn exp_equation_residual(
    p: &PlanckParam,
    sys: &BlockSystem,
    result: &NPair,
    probes: &[StateVector],
    tol: f64,
) -> Result<f64> {
    let chi = spectral_projection_with(&result.r, SpecRegion::Negative, 0.0, 0.0)?;
    let nu_arg = LinOp::from_parts(
        result.rho.mat.dot(&chi.mat),
        OpFlags { hermitian: true, ..Default::default() },
    );
    let lhs = fh_of_pair(p, &result.r, &nu_arg, tol)?;
    let fr = fh_of_pair(p, &sys.a1, &sys.inv1, tol)?;
    let fs = fh_of_pair(p, &sys.a2, &sys.inv2, tol)?;
    let rhs = fr.mat.dot(&fs.mat);
    let lifted = lift_probes(probes, 4);
    Ok(bilinear_residual(&lhs.mat, &rhs, &lifted))
}

/// Same equation with the extension built from the flipped reflection -nu:
/// picks the wrong self-adjoint extension, so the residual stays large.
pub fn exp_equation_control_residual(
    p: &PlanckParam,
    sys: &BlockSystem,
    probes: &[StateVector],
    tol: f64,
) -> Result<f64> {
    let neg_nu = LinOp::from_parts(
        sys.nu.mat.mapv(|z| -z),
        OpFlags { hermitian: true, ..Default::default() },
    );
    let fh = fh_of_pair(p, &sys.t, &neg_nu, tol)?;
    let r = conjugate_hermitian(&fh, &sys.a2)?;
    let rho = conjugate_involution(&fh, &sys.inv2);
    exp_equation_residual(p, sys, &NPair { r, rho }, probes, tol)
}

/// Positive-parts degenerate case on the plain (undoubled) canonical pair:
/// V(log(V(log T)^* S V(log T))) = V(log R) V(log S).
pub fn exp_equation_positive_residual(
    p: &PlanckParam,
    rp: &LinOp,
    sp: &LinOp,
    tp: &LinOp,
    probes: &[StateVector],
    tol: f64,
) -> Result<f64> {
    let fh = try_func_of_hermitian(tp, |lam| fh_branch_positive(p, lam, tol))?;
    let fh = LinOp::from_parts(fh.mat, OpFlags { unitary: true, ..Default::default() });
    let rs = conjugate_hermitian(&fh, sp)?;
    let lhs = try_func_of_hermitian(&rs, |lam| fh_branch_positive(p, lam, tol))?;
    let vr = try_func_of_hermitian(rp, |lam| fh_branch_positive(p, lam, tol))?;
    let vs = try_func_of_hermitian(sp, |lam| fh_branch_positive(p, lam, tol))?;
    let rhs = vr.mat.dot(&vs.mat);
    let lifted: Vec<Array1<C64>> = probes.iter().map(|w| w.data.clone()).collect();
    Ok(max_apply_residual(&lhs.mat, &rhs, &lifted))
}

/// Extension consistency: the sesquilinear form of [R+S] matches the form sum
/// <w|R v> + <w|S v> on windowed probes.  Both sides go through eigenbases.
pub fn extension_form_residual(
    sys: &BlockSystem,
    result: &NPair,
    probes: &[StateVector],
) -> Result<f64> {
    let lifted = lift_probes(probes, 4);
    let mut worst = 0.0f64;
    for (i, w) in lifted.iter().enumerate() {
        let v = &lifted[(i + 1) % lifted.len()];
        let ext = quadratic_form(&result.r, w, v)?;
        let sum = quadratic_form(&sys.a1, w, v)? + quadratic_form(&sys.a2, w, v)?;
        let scale = probe_norm(w) * probe_norm(v);
        worst = worst.max((ext - sum).norm() / scale.max(1e-300));
    }
    Ok(worst)
}

/// Spectrum preservation under the conjugation: eigenvalues of [R+S] from a
/// fresh eigensolve match the eigenvalues of S, normalized by the largest
/// magnitude (the spectra span e^{+-12}, so a uniform relative comparison is
/// the meaningful metric).
pub fn spectrum_preservation_residual(sys: &BlockSystem, result: &NPair) -> Result<f64> {
    let fresh = LinOp::from_parts(
        result.r.mat.clone(),
        OpFlags { hermitian: true, ..Default::default() },
    );
    let got = fresh.spectral()?;
    let want = sys.a2.spectral()?;
    let scale = want.eigenvalues.iter().fold(0.0f64, |m, &d| m.max(d.abs()));
    let mut worst = 0.0f64;
    for (a, b) in got.eigenvalues.iter().zip(want.eigenvalues.iter()) {
        worst = worst.max((a - b).abs());
    }
    Ok(worst / scale)
}

/// N -> A structure map: the symmetrized reflection
/// tau^ = (-1)^k [rho chi(R<0) sigma chi(S<0) + sigma chi(S<0) rho chi(R<0)]
/// equals nu = tau chi(T<0).  Pure projection/permutation algebra.
pub fn homomorphism_residual_n_to_a(sys: &BlockSystem) -> Result<f64> {
    let chi_r = spectral_projection_with(&sys.a1, SpecRegion::Negative, 0.0, 0.0)?;
    let chi_s = spectral_projection_with(&sys.a2, SpecRegion::Negative, 0.0, 0.0)?;
    let rx = sys.inv1.mat.dot(&chi_r.mat);
    let sx = sys.inv2.mat.dot(&chi_s.mat);
    let sym = (&rx.dot(&sx) + &sx.dot(&rx)).mapv(|z| z * sys.p.parity());
    Ok(rel_fro_residual(&sym, &sys.nu.mat))
}

/// The mapped quotient operator for both tensor homomorphisms: doubling by a
/// diag(1,-1) carrier leaves the quotient I_2 (x) T, since the carrier signs
/// cancel between the two legs.
fn doubled_quotient(sys: &BlockSystem) -> Result<LinOp> {
    kron_with_signs(&[1.0, 1.0], &sys.t)
}

/// N -> M block identity: the reflection of the mapped doubled system,
/// phi = (-1)^k beta delta chi(f < 0), equals I_2 (x) nu exactly.
pub fn n_to_m_block_identity_residual(sys: &BlockSystem) -> Result<f64> {
    let m1 = map_n_to_m(&sys.pair1_n())?;
    let m2 = map_n_to_m(&sys.pair2_n())?;
    let f = doubled_quotient(sys)?;
    let chi = spectral_projection_with(&f, SpecRegion::Negative, 0.0, 0.0)?;
    let phi = m1.beta.mat.dot(&m2.beta.mat).dot(&chi.mat).mapv(|z| z * sys.p.parity());
    let eye2 = Array2::eye(2);
    let want = kron(&eye2, &sys.nu.mat);
    Ok(rel_fro_residual(&phi, &want))
}

fn pair_residual_on_probes(
    lhs: (&Array2<C64>, &Array2<C64>),
    rhs: (&Array2<C64>, &Array2<C64>),
    probes: &[Array1<C64>],
) -> f64 {
    max_apply_residual(lhs.0, rhs.0, probes).max(max_apply_residual(lhs.1, rhs.1, probes))
}

/// N -> M homomorphism: mapping the op_n result equals performing the M-side
/// operation on the mapped legs, where the mapped extension is built with the
/// generic pair calculus F_h(f, phi).
pub fn homomorphism_residual_n_to_m(
    p: &PlanckParam,
    sys: &BlockSystem,
    result: &NPair,
    probes: &[StateVector],
    tol: f64,
) -> Result<f64> {
    let mapped = map_n_to_m(result)?;
    let m1 = map_n_to_m(&sys.pair1_n())?;
    let m2 = map_n_to_m(&sys.pair2_n())?;
    let f = doubled_quotient(sys)?;
    let chi = spectral_projection_with(&f, SpecRegion::Negative, 0.0, 0.0)?;
    let phi = LinOp::from_parts(
        m1.beta.mat.dot(&m2.beta.mat).dot(&chi.mat).mapv(|z| z * sys.p.parity()),
        OpFlags { hermitian: true, ..Default::default() },
    );
    let fh = fh_of_pair(p, &f, &phi, tol)?;
    let bd = conjugate_hermitian(&fh, &m2.b)?;
    let delta = conjugate_involution(&fh, &m2.beta);
    let lifted = lift_probes(probes, 8);
    Ok(pair_residual_on_probes(
        (&mapped.b.mat, &mapped.beta.mat),
        (&bd.mat, &delta.mat),
        &lifted,
    ))
}

/// M -> N homomorphism: tensoring the op_m result with the 2-dimensional
/// carrier (diag(1,-1), swap) equals performing the N-side operation on the
/// tensored legs.
pub fn homomorphism_residual_m_to_n(
    p: &PlanckParam,
    sys: &BlockSystem,
    result: &MPair,
    probes: &[StateVector],
    tol: f64,
) -> Result<f64> {
    let mapped = map_m_to_n_tensor(result)?;
    let n1 = map_m_to_n_tensor(&sys.pair1_m())?;
    let n2 = map_m_to_n_tensor(&sys.pair2_m())?;
    let t = doubled_quotient(sys)?;
    let chi = spectral_projection_with(&t, SpecRegion::Negative, 0.0, 0.0)?;
    let nu = LinOp::from_parts(
        n1.rho.mat.dot(&n2.rho.mat).dot(&chi.mat).mapv(|z| z * sys.p.parity()),
        OpFlags { hermitian: true, ..Default::default() },
    );
    let fh = fh_of_pair(p, &t, &nu, tol)?;
    let rs = conjugate_hermitian(&fh, &n2.r)?;
    let rho = conjugate_involution(&fh, &n2.rho);
    let lifted = lift_probes(probes, 8);
    Ok(pair_residual_on_probes(
        (&mapped.r.mat, &mapped.rho.mat),
        (&rs.mat, &rho.mat),
        &lifted,
    ))
}

/// Unitarity defect ||F^* F - I||_F / sqrt(n).
pub fn unitarity_residual(f: &LinOp) -> f64 {
    let prod = conj_transpose(&f.mat).dot(&f.mat);
    let eye: Array2<C64> = Array2::eye(f.dim());
    fro_norm(&(&prod - &eye)) / (f.dim() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{build_m2_standard, build_n2_standard, validate_m, validate_n, worst_residual};
    use crate::hilbert::{probes_equation, probes_standard, Grid};
    use crate::specfun::{fh_scalar, make_planck, DeltaRealPoint, DEFAULT_TOL};

    fn setup(n: usize) -> (PlanckParam, Grid) {
        (make_planck(0, 1).unwrap(), Grid::new(n, 24.0, -12.0).unwrap())
    }

    // window wide enough that e^{-|x-y|/2} kernel tails clear the boundary
    fn setup_wide(n: usize) -> (PlanckParam, Grid) {
        (make_planck(0, 1).unwrap(), Grid::new(n, 30.0, -15.0).unwrap())
    }

    #[test]
    fn block_form_is_unitary() {
        let (p, g) = setup(64);
        let sys = build_n2_standard(&p, &g).unwrap();
        let fh = fh_block(&p, &sys, DEFAULT_TOL).unwrap();
        assert!(unitarity_residual(&fh) < 1e-8, "{:.3e}", unitarity_residual(&fh));
    }

    #[test]
    fn block_form_matches_pair_calculus() {
        let (p, g) = setup(32);
        let sys = build_n2_standard(&p, &g).unwrap();
        let fh = fh_block(&p, &sys, DEFAULT_TOL).unwrap();
        let generic = fh_of_pair(&p, &sys.t, &sys.nu, DEFAULT_TOL).unwrap();
        let r = rel_fro_residual(&fh.mat, &generic.mat);
        assert!(r < 1e-10, "{:.3e}", r);
    }

    #[test]
    fn scaled_pair_matches_scalar_definition() {
        // 1x1 operator pair against the scalar oracle, both sign sectors and
        // both reflection eigenvalues, with nontrivial scale.
        let p = make_planck(0, 1).unwrap();
        for &r in &[0.7f64, -0.4, 2.3, -3.1] {
            for &rho in &[1i8, -1] {
                let a = LinOp::diagonal(&[r]);
                let nu = LinOp::diagonal(&[f64::from(rho)]);
                for &m in &[1.0f64, -0.5, 2.0] {
                    let f = fh_of_scaled_pair(&p, &a, &nu, m, 1.0, DEFAULT_TOL).unwrap();
                    let eff_rho = if m * r < 0.0 { rho } else { 0 };
                    let pt = DeltaRealPoint::new(m * r, eff_rho).unwrap();
                    let want = fh_scalar(&p, pt, DEFAULT_TOL).unwrap();
                    assert!(
                        (f.mat[[0, 0]] - want).norm() < 1e-9,
                        "r={r} rho={rho} m={m}: {} vs {}",
                        f.mat[[0, 0]],
                        want
                    );
                }
            }
        }
    }

    #[test]
    fn zero_operator_gives_identity() {
        let p = make_planck(0, 1).unwrap();
        let a = LinOp::diagonal(&[0.0, 0.0]);
        let nu = LinOp::diagonal(&[1.0, -1.0]);
        let f = fh_of_pair(&p, &a, &nu, DEFAULT_TOL).unwrap();
        let eye: Array2<C64> = Array2::eye(2);
        assert!(rel_fro_residual(&f.mat, &eye) < 1e-14);
    }

    #[test]
    fn op_n_result_is_valid_pair() {
        let (p, g) = setup(64);
        let sys = build_n2_standard(&p, &g).unwrap();
        let (pair, ext) = op_n(&p, &sys, DEFAULT_TOL).unwrap();
        let reports = validate_n(&pair).unwrap();
        let w = worst_residual(&reports);
        assert!(w < 1e-8, "worst N relation {:.3e}", w);
        assert!(unitarity_residual(&ext.fh_t) < 1e-8);
        let sp = spectrum_preservation_residual(&sys, &pair).unwrap();
        assert!(sp < 1e-8, "spectrum drift {:.3e}", sp);
    }

    #[test]
    fn op_m_result_is_valid_pair() {
        let (p, g) = setup(64);
        let sys = build_m2_standard(&p, &g).unwrap();
        let (pair, _) = op_m(&p, &sys, DEFAULT_TOL).unwrap();
        let reports = validate_m(&pair).unwrap();
        let w = worst_residual(&reports);
        assert!(w < 1e-8, "worst M relation {:.3e}", w);
    }

    #[test]
    fn op_n_rejects_m_flavor() {
        let (p, g) = setup(32);
        let sys = build_m2_standard(&p, &g).unwrap();
        assert!(op_n(&p, &sys, DEFAULT_TOL).is_err());
    }

    #[test]
    fn exponential_equation_holds_and_control_fails() {
        let (p, g) = setup_wide(128);
        let sys = build_n2_standard(&p, &g).unwrap();
        let (pair, _) = op_n(&p, &sys, DEFAULT_TOL).unwrap();
        let probes = probes_equation(&g, 4, 11);
        let res = exp_equation_residual(&p, &sys, &pair, &probes, DEFAULT_TOL).unwrap();
        assert!(res < 2e-5, "residual {:.3e}", res);
        let ctl = exp_equation_control_residual(&p, &sys, &probes, DEFAULT_TOL).unwrap();
        assert!(ctl > 1e-2, "control residual {:.3e}", ctl);
    }

    #[test]
    fn positive_parts_reduce_to_scalar_equation() {
        let (p, g) = setup_wide(256);
        let sys = build_n2_standard(&p, &g).unwrap();
        let probes = probes_equation(&g, 6, 13);
        let res = exp_equation_positive_residual(&p, &sys.rp, &sys.sp, &sys.tp, &probes, DEFAULT_TOL)
            .unwrap();
        assert!(res < 1e-7, "residual {:.3e}", res);
    }

    #[test]
    fn extension_form_matches_sum() {
        let (p, g) = setup_wide(128);
        let sys = build_n2_standard(&p, &g).unwrap();
        let (pair, _) = op_n(&p, &sys, DEFAULT_TOL).unwrap();
        let probes = probes_equation(&g, 6, 17);
        let res = extension_form_residual(&sys, &pair, &probes).unwrap();
        assert!(res < 1e-4, "form residual {:.3e}", res);
    }

    #[test]
    fn structure_map_residuals() {
        let (p, g) = setup(32);
        let sys = build_n2_standard(&p, &g).unwrap();
        let na = homomorphism_residual_n_to_a(&sys).unwrap();
        assert!(na < 1e-10, "N->A {:.3e}", na);
        let blk = n_to_m_block_identity_residual(&sys).unwrap();
        assert!(blk < 1e-12, "block identity {:.3e}", blk);
        let (pair, _) = op_n(&p, &sys, DEFAULT_TOL).unwrap();
        let probes = probes_standard(&g, 3, 19);
        let nm = homomorphism_residual_n_to_m(&p, &sys, &pair, &probes, DEFAULT_TOL).unwrap();
        assert!(nm < 1e-6, "N->M {:.3e}", nm);
        let msys = build_m2_standard(&p, &g).unwrap();
        let (mpair, _) = op_m(&p, &msys, DEFAULT_TOL).unwrap();
        let mn = homomorphism_residual_m_to_n(&p, &msys, &mpair, &probes, DEFAULT_TOL).unwrap();
        assert!(mn < 1e-6, "M->N {:.3e}", mn);
    }
}
