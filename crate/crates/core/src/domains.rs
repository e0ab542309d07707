//! The operator domains the braided construction acts on.
//!
//! An N-pair is (R, rho): R self-adjoint and invertible, rho a self-adjoint
//! reflection commuting with R with rho^2 = chi(R != 0).  An M-pair is
//! (b, beta) with beta *anti*commuting with b instead.  An A-pair is
//! (T, nu) with nu commuting, self-adjoint, nu^2 = chi(T < 0).
//!
//! The standard doubled systems live on C^4 (x) H: two signed copies of the
//! canonical Weyl pair with permutation involutions
//!   rho: (1<->2)(3<->4),  sigma: (1<->3)(2<->4),  tau = (-1)^k rho sigma,
//!   R = diag(R+, R+, -R+, -R+),  S = diag(S+, -S+, S+, -S+),
//!   T = diag(T+, -T+, -T+, T+).
//! The M-side system has the same matrices with (b, beta) = (R-like, sigma-
//! like) and (d, delta) = (S-like, rho-like) pairings, and reflection
//! phi = (-1)^k beta delta chi(f < 0).

use crate::error::{Error, Result};
use crate::hilbert::{
    canonical_t_op, canonical_zakrzewski_pair, conj_transpose, fro_norm, kron, kron_with_signs,
    rel_fro_residual, spectral_projection_with, Grid, LinOp, OpFlags, SpecRegion, C64,
};
use crate::specfun::PlanckParam;
use ndarray::Array2;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// (R, rho): rho commutes with R.
#[derive(Debug, Clone)]
pub struct NPair {
    pub r: LinOp,
    pub rho: LinOp,
}

/// (b, beta): beta anticommutes with b.
#[derive(Debug, Clone)]
pub struct MPair {
    pub b: LinOp,
    pub beta: LinOp,
}

/// (t, nu): nu commutes with t and nu^2 = chi(t < 0).
#[derive(Debug, Clone)]
pub struct APair {
    pub t: LinOp,
    pub nu: LinOp,
}

/// One named relation residual from a validator.
#[derive(Debug, Clone)]
pub struct RelationReport {
    pub name: String,
    pub residual: f64,
}

impl RelationReport {
    fn new(name: &str, residual: f64) -> Self {
        RelationReport { name: name.to_string(), residual }
    }
}

pub fn worst_residual(reports: &[RelationReport]) -> f64 {
    reports.iter().fold(0.0, |m, r| m.max(r.residual))
}

fn herm_residual(a: &LinOp) -> f64 {
    rel_fro_residual(&a.mat, &conj_transpose(&a.mat))
}

/// ||AB - s BA||_F / (||A|| ||B|| / sqrt(n)), s = +-1.
fn commute_residual(a: &LinOp, b: &LinOp, s: f64) -> f64 {
    let ab = a.matmul(b);
    let ba = b.matmul(a).mapv(|z| z * s);
    let scale = fro_norm(&a.mat) * fro_norm(&b.mat) / (a.dim() as f64).sqrt();
    fro_norm(&(&ab - &ba)) / scale.max(1e-300)
}

pub fn validate_n(pair: &NPair) -> Result<Vec<RelationReport>> {
    if pair.r.dim() != pair.rho.dim() {
        return Err(Error::DimensionMismatch("N-pair operands".into()));
    }
    let mut out = vec![
        RelationReport::new("r_selfadjoint", herm_residual(&pair.r)),
        RelationReport::new("rho_selfadjoint", herm_residual(&pair.rho)),
        RelationReport::new("rho_commutes_r", commute_residual(&pair.rho, &pair.r, 1.0)),
    ];
    let chi = spectral_projection_with(&pair.r, SpecRegion::NonZero, 0.0, 0.0)?;
    out.push(RelationReport::new(
        "rho_squared_is_support",
        rel_fro_residual(&pair.rho.matmul(&pair.rho), &chi.mat),
    ));
    Ok(out)
}

pub fn validate_m(pair: &MPair) -> Result<Vec<RelationReport>> {
    if pair.b.dim() != pair.beta.dim() {
        return Err(Error::DimensionMismatch("M-pair operands".into()));
    }
    let mut out = vec![
        RelationReport::new("b_selfadjoint", herm_residual(&pair.b)),
        RelationReport::new("beta_selfadjoint", herm_residual(&pair.beta)),
        RelationReport::new("beta_anticommutes_b", commute_residual(&pair.beta, &pair.b, -1.0)),
    ];
    let chi = spectral_projection_with(&pair.b, SpecRegion::NonZero, 0.0, 0.0)?;
    out.push(RelationReport::new(
        "beta_squared_is_support",
        rel_fro_residual(&pair.beta.matmul(&pair.beta), &chi.mat),
    ));
    Ok(out)
}

pub fn validate_a(pair: &APair) -> Result<Vec<RelationReport>> {
    if pair.t.dim() != pair.nu.dim() {
        return Err(Error::DimensionMismatch("A-pair operands".into()));
    }
    let mut out = vec![
        RelationReport::new("t_selfadjoint", herm_residual(&pair.t)),
        RelationReport::new("nu_selfadjoint", herm_residual(&pair.nu)),
        RelationReport::new("nu_commutes_t", commute_residual(&pair.nu, &pair.t, 1.0)),
    ];
    let chi_neg = spectral_projection_with(&pair.t, SpecRegion::Negative, 0.0, 0.0)?;
    out.push(RelationReport::new(
        "nu_squared_is_negative_support",
        rel_fro_residual(&pair.nu.matmul(&pair.nu), &chi_neg.mat),
    ));
    Ok(out)
}

/// Which doubled system a `BlockSystem` represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    /// (R, rho), (S, sigma): involutions commute with their own leg.
    N2,
    /// (b, beta), (d, delta): involutions anticommute with their own leg.
    M2,
}

/// The standard doubled system on C^4 (x) H.
///
/// Field names follow the N-side convention; for the M flavor read
/// a1 = b, a2 = d, t = f, inv1 = delta, inv2 = beta, nu = phi.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    pub p: PlanckParam,
    pub grid: Grid,
    /// positive n x n building blocks R+, S+, T+
    pub rp: LinOp,
    pub sp: LinOp,
    pub tp: LinOp,
    /// signed 4n x 4n operators
    pub a1: LinOp,
    pub a2: LinOp,
    pub t: LinOp,
    /// involutions: inv1 commutes with a1, inv2 with a2 (N flavor)
    pub inv1: LinOp,
    pub inv2: LinOp,
    /// signed antidiagonal reflection ((-1)^k rho sigma resp. (-1)^k beta delta)
    pub refl: LinOp,
    /// nu = refl * chi(t < 0): middle-block swap supported where t < 0
    pub nu: LinOp,
    pub flavor: Flavor,
}

pub(crate) fn perm_matrix(pairs: &[(usize, usize)], k: usize) -> Array2<C64> {
    let mut m = Array2::zeros((k, k));
    for &(i, j) in pairs {
        m[[i, j]] = c(1.0, 0.0);
        m[[j, i]] = c(1.0, 0.0);
    }
    m
}

fn build_standard(p: &PlanckParam, g: &Grid, flavor: Flavor) -> Result<BlockSystem> {
    let (rp, sp) = canonical_zakrzewski_pair(p, g)?;
    let tp = canonical_t_op(p, g)?;
    let a1 = kron_with_signs(&[1.0, 1.0, -1.0, -1.0], &rp)?;
    let a2 = kron_with_signs(&[1.0, -1.0, 1.0, -1.0], &sp)?;
    let t = kron_with_signs(&[1.0, -1.0, -1.0, 1.0], &tp)?;
    let n = g.n;
    let eye = Array2::eye(n);
    let inv1 = LinOp::new(
        kron(&perm_matrix(&[(0, 1), (2, 3)], 4), &eye),
        OpFlags { hermitian: true, unitary: true, ..Default::default() },
    )?;
    let inv2 = LinOp::new(
        kron(&perm_matrix(&[(0, 2), (1, 3)], 4), &eye),
        OpFlags { hermitian: true, unitary: true, ..Default::default() },
    )?;
    let par = p.parity();
    let refl_mat = kron(&perm_matrix(&[(0, 3), (1, 2)], 4), &eye).mapv(|z| z * par);
    let refl = LinOp::new(refl_mat, OpFlags { hermitian: true, unitary: true, ..Default::default() })?;
    // nu = refl * chi(t < 0): t is negative exactly on blocks 2 and 3, so nu
    // is the (-1)^k middle swap.
    let nu_mat = kron(&perm_matrix(&[(1, 2)], 4), &eye).mapv(|z| z * par);
    let nu = LinOp::new(nu_mat, OpFlags { hermitian: true, ..Default::default() })?;
    Ok(BlockSystem {
        p: *p,
        grid: *g,
        rp,
        sp,
        tp,
        a1,
        a2,
        t,
        inv1,
        inv2,
        refl,
        nu,
        flavor,
    })
}

pub fn build_n2_standard(p: &PlanckParam, g: &Grid) -> Result<BlockSystem> {
    build_standard(p, g, Flavor::N2)
}

pub fn build_m2_standard(p: &PlanckParam, g: &Grid) -> Result<BlockSystem> {
    build_standard(p, g, Flavor::M2)
}

impl BlockSystem {
    /// The two constituent pairs in their native domains.
    /// N flavor: (a1, inv1) and (a2, inv2) are N-pairs.
    /// M flavor: (a1, inv2) and (a2, inv1) are M-pairs.
    pub fn pair1_n(&self) -> NPair {
        NPair { r: self.a1.clone(), rho: self.inv1.clone() }
    }

    pub fn pair2_n(&self) -> NPair {
        NPair { r: self.a2.clone(), rho: self.inv2.clone() }
    }

    pub fn pair1_m(&self) -> MPair {
        MPair { b: self.a1.clone(), beta: self.inv2.clone() }
    }

    pub fn pair2_m(&self) -> MPair {
        MPair { b: self.a2.clone(), beta: self.inv1.clone() }
    }
}

/// Relations of the doubled system beyond per-pair membership: the cross
/// (anti)commutations, the involution algebra, and the reflection identities.
pub fn validate_doubled(sys: &BlockSystem) -> Result<Vec<RelationReport>> {
    let mut out = Vec::new();
    match sys.flavor {
        Flavor::N2 => {
            out.extend(validate_n(&sys.pair1_n())?.into_iter().map(|mut r| {
                r.name = format!("pair1.{}", r.name);
                r
            }));
            out.extend(validate_n(&sys.pair2_n())?.into_iter().map(|mut r| {
                r.name = format!("pair2.{}", r.name);
                r
            }));
        }
        Flavor::M2 => {
            out.extend(validate_m(&sys.pair1_m())?.into_iter().map(|mut r| {
                r.name = format!("pair1.{}", r.name);
                r
            }));
            out.extend(validate_m(&sys.pair2_m())?.into_iter().map(|mut r| {
                r.name = format!("pair2.{}", r.name);
                r
            }));
        }
    }
    // cross relations (same matrices in both flavors):
    // inv1 anticommutes with a2, inv2 anticommutes with a1, involutions commute
    out.push(RelationReport::new("inv1_anticommutes_a2", commute_residual(&sys.inv1, &sys.a2, -1.0)));
    out.push(RelationReport::new("inv2_anticommutes_a1", commute_residual(&sys.inv2, &sys.a1, -1.0)));
    out.push(RelationReport::new("involutions_commute", commute_residual(&sys.inv1, &sys.inv2, 1.0)));
    // refl = (-1)^k inv1 inv2
    let prod = sys.inv1.matmul(&sys.inv2).mapv(|z| z * sys.p.parity());
    out.push(RelationReport::new("refl_is_signed_product", rel_fro_residual(&prod, &sys.refl.mat)));
    // nu = refl chi(t < 0)
    let chi_neg = spectral_projection_with(&sys.t, SpecRegion::Negative, 0.0, 0.0)?;
    let nu_built = sys.refl.matmul(&chi_neg);
    out.push(RelationReport::new("nu_is_refl_on_negative_t", rel_fro_residual(&nu_built, &sys.nu.mat)));
    // (t, nu) is an A-pair
    out.extend(validate_a(&APair { t: sys.t.clone(), nu: sys.nu.clone() })?.into_iter().map(
        |mut r| {
            r.name = format!("apair.{}", r.name);
            r
        },
    ));
    Ok(out)
}

/// Zakrzewski commutation of the doubled legs, in bounded form on probes
/// lifted to C^4 (x) H.
pub fn validate_doubled_weyl(sys: &BlockSystem, probes: &[crate::hilbert::StateVector]) -> Result<f64> {
    let lifted: Vec<ndarray::Array1<C64>> = probes
        .iter()
        .flat_map(|w| {
            (0..4).map(move |b| {
                let mut v = ndarray::Array1::zeros(4 * w.data.len());
                for (i, &z) in w.data.iter().enumerate() {
                    v[b * w.data.len() + i] = z;
                }
                v
            })
        })
        .collect();
    let mut worst = 0.0f64;
    let ls = [-2.0, -1.0, 1.0, 2.0];
    for &l in &ls {
        let al = crate::hilbert::abs_imaginary_power(&sys.a1, l)?;
        for &k in &ls {
            let bk = crate::hilbert::abs_imaginary_power(&sys.a2, k)?;
            let phase = c(0.0, sys.p.hbar * l * k).exp();
            for w in &lifted {
                let lhs = al.apply(&bk.apply(w));
                let rhs = bk.apply(&al.apply(w)).mapv(|z| z * phase);
                let nw = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                let d = (&lhs - &rhs).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                worst = worst.max(d / nw);
            }
        }
    }
    Ok(worst)
}

/// N -> A: the target pair (T, tau chi(T < 0)).
pub fn map_n_to_a(sys: &BlockSystem) -> APair {
    APair { t: sys.t.clone(), nu: sys.nu.clone() }
}

/// N -> M on a single pair: b = diag(1,-1) (x) R, beta = swap (x) rho.
pub fn map_n_to_m(pair: &NPair) -> Result<MPair> {
    let mut gmat = Array2::zeros((2, 2));
    gmat[[0, 0]] = c(1.0, 0.0);
    gmat[[1, 1]] = c(-1.0, 0.0);
    let swap = perm_matrix(&[(0, 1)], 2);
    let b = LinOp::new(kron(&gmat, &pair.r.mat), OpFlags { hermitian: true, ..Default::default() })?;
    let beta =
        LinOp::new(kron(&swap, &pair.rho.mat), OpFlags { hermitian: true, ..Default::default() })?;
    Ok(MPair { b, beta })
}

/// M -> N by tensoring with a 2-dimensional carrier (g, gamma),
/// g = diag(1,-1), gamma = swap: r = g (x) b, rho = gamma (x) beta.
pub fn map_m_to_n_tensor(pair: &MPair) -> Result<NPair> {
    let mut gmat = Array2::zeros((2, 2));
    gmat[[0, 0]] = c(1.0, 0.0);
    gmat[[1, 1]] = c(-1.0, 0.0);
    let swap = perm_matrix(&[(0, 1)], 2);
    let r = LinOp::new(kron(&gmat, &pair.b.mat), OpFlags { hermitian: true, ..Default::default() })?;
    let rho =
        LinOp::new(kron(&swap, &pair.beta.mat), OpFlags { hermitian: true, ..Default::default() })?;
    Ok(NPair { r, rho })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::probes_tight;
    use crate::specfun::make_planck;

    fn setup() -> (PlanckParam, Grid) {
        (make_planck(0, 1).unwrap(), Grid::new(32, 24.0, -12.0).unwrap())
    }

    #[test]
    fn n2_standard_passes_validation() {
        let (p, g) = setup();
        let sys = build_n2_standard(&p, &g).unwrap();
        let reports = validate_doubled(&sys).unwrap();
        for r in &reports {
            assert!(r.residual < 1e-10, "{}: {:.3e}", r.name, r.residual);
        }
    }

    #[test]
    fn m2_standard_passes_validation() {
        let (p, g) = setup();
        let sys = build_m2_standard(&p, &g).unwrap();
        let reports = validate_doubled(&sys).unwrap();
        for r in &reports {
            assert!(r.residual < 1e-10, "{}: {:.3e}", r.name, r.residual);
        }
    }

    #[test]
    fn doubled_weyl_on_probes() {
        let p = make_planck(0, 1).unwrap();
        let g = Grid::new(256, 24.0, -12.0).unwrap();
        let sys = build_n2_standard(&p, &g).unwrap();
        let probes = probes_tight(&g, 2, 23);
        let resid = validate_doubled_weyl(&sys, &probes).unwrap();
        assert!(resid < 1e-8, "doubled weyl residual {resid:.3e}");
    }

    #[test]
    fn block_sign_patterns_are_as_specified() {
        let (p, g) = setup();
        let sys = build_n2_standard(&p, &g).unwrap();
        let n = g.n;
        // R = diag(+,+,-,-); S = diag(+,-,+,-); T = diag(+,-,-,+)
        for (block, (sr, ss, st)) in
            [(0usize, (1.0, 1.0, 1.0)), (1, (1.0, -1.0, -1.0)), (2, (-1.0, 1.0, -1.0)), (3, (-1.0, -1.0, 1.0))]
        {
            let i = block * n;
            assert!((sys.a1.mat[[i, i]] - sys.rp.mat[[0, 0]] * c(sr, 0.0)).norm() < 1e-12);
            assert!((sys.a2.mat[[i, i]] - sys.sp.mat[[0, 0]] * c(ss, 0.0)).norm() < 1e-12);
            assert!((sys.t.mat[[i, i]] - sys.tp.mat[[0, 0]] * c(st, 0.0)).norm() < 1e-12);
        }
        // involution block positions
        assert_eq!(sys.inv1.mat[[0, n]], c(1.0, 0.0)); // rho: 1 <-> 2
        assert_eq!(sys.inv2.mat[[0, 2 * n]], c(1.0, 0.0)); // sigma: 1 <-> 3
        assert_eq!(sys.refl.mat[[0, 3 * n]], c(p.parity(), 0.0)); // tau antidiagonal
        assert_eq!(sys.nu.mat[[n, 2 * n]], c(p.parity(), 0.0)); // middle swap
        assert_eq!(sys.nu.mat[[0, 0]], c(0.0, 0.0));
    }

    #[test]
    fn validators_catch_mutants() {
        let (p, g) = setup();
        let sys = build_n2_standard(&p, &g).unwrap();
        // halved involution: rho^2 != support
        let bad = NPair {
            r: sys.a1.clone(),
            rho: LinOp::from_parts(sys.inv1.mat.mapv(|z| z * 0.5), OpFlags { hermitian: true, ..Default::default() }),
        };
        let reports = validate_n(&bad).unwrap();
        let sq = reports.iter().find(|r| r.name == "rho_squared_is_support").unwrap();
        assert!(sq.residual > 0.5, "mutant rho^2 residual {:.3e}", sq.residual);
        // sigma paired with R anticommutes instead of commuting
        let wrong = NPair { r: sys.a1.clone(), rho: sys.inv2.clone() };
        let reports = validate_n(&wrong).unwrap();
        let cm = reports.iter().find(|r| r.name == "rho_commutes_r").unwrap();
        assert!(cm.residual > 0.1, "mutant commutation residual {:.3e}", cm.residual);
    }

    #[test]
    fn m_validator_distinguishes_flavors() {
        let (p, g) = setup();
        let sys = build_m2_standard(&p, &g).unwrap();
        // (a1, inv2) is an M-pair; (a1, inv1) is not (it commutes)
        let good = validate_m(&sys.pair1_m()).unwrap();
        assert!(worst_residual(&good) < 1e-10);
        let bad = validate_m(&MPair { b: sys.a1.clone(), beta: sys.inv1.clone() }).unwrap();
        assert!(worst_residual(&bad) > 0.1);
    }

    #[test]
    fn map_n_to_m_produces_m_pair() {
        let (p, g) = setup();
        let sys = build_n2_standard(&p, &g).unwrap();
        let m = map_n_to_m(&sys.pair1_n()).unwrap();
        let reports = validate_m(&m).unwrap();
        for r in &reports {
            assert!(r.residual < 1e-10, "{}: {:.3e}", r.name, r.residual);
        }
    }

    #[test]
    fn map_m_to_n_tensor_produces_n_pair() {
        let (p, g) = setup();
        let sys = build_m2_standard(&p, &g).unwrap();
        let n = map_m_to_n_tensor(&sys.pair1_m()).unwrap();
        let reports = validate_n(&n).unwrap();
        for r in &reports {
            assert!(r.residual < 1e-10, "{}: {:.3e}", r.name, r.residual);
        }
    }

    #[test]
    fn map_n_to_a_is_valid_a_pair() {
        let (p, g) = setup();
        let sys = build_n2_standard(&p, &g).unwrap();
        let a = map_n_to_a(&sys);
        let reports = validate_a(&a).unwrap();
        for r in &reports {
            assert!(r.residual < 1e-10, "{}: {:.3e}", r.name, r.residual);
        }
    }

    #[test]
    fn round_trip_extraction_is_exact() {
        let (p, g) = setup();
        let sys = build_n2_standard(&p, &g).unwrap();
        // rebuilding the signed operators from the stored positive blocks
        // reproduces them bit for bit
        let a1 = kron_with_signs(&[1.0, 1.0, -1.0, -1.0], &sys.rp).unwrap();
        assert_eq!(a1.mat, sys.a1.mat);
        let t = kron_with_signs(&[1.0, -1.0, -1.0, 1.0], &sys.tp).unwrap();
        assert_eq!(t.mat, sys.t.mat);
    }
}
