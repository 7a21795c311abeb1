//! Pointwise quasi-Hamiltonian data for matrix groups.
//!
//! Group tangent vectors are left-trivialized, `𝔤` carries a `B`-orthonormal
//! basis, and `𝔤* ≅ 𝔤` through `B`. At a point `m ∈ M` with `Φ(m) = g` the data
//! is a tangent space `T = T_mM ≅ R^m`, the differential `dΦ: T → 𝔤`, the
//! 2-form `ω` on `T` and the generators `ξ ↦ ξ_M ∈ T`. The axioms say that
//! `(dΦ, ω): (T ⊕ T*, T) ⇢ (𝔤 ⊕ 𝔤*, E_{Ad_g})` is a strong Dirac morphism.

use serde::{Deserialize, Serialize};

use crate::dirac_calculus::{compose, forward_image, DiracMorphism, DiracStructure, CERT_TOL};
use crate::linear_core::{block_diag, hstack, null_basis, range_basis, rank, singular_values, vstack, DEFAULT_TOL};
use crate::matfun::expm_antihermitian;
use crate::orthogonal_bridge::{
    exp_lift, graph_structure, lag_from_orth, multiplicative_morphism, product_structure, OrthogonalPoint, SkewPoint,
};
use crate::{random, CMat, Error, RMat, RVec, Result, C64};

/// Tolerance for group membership and `B`-orthogonality of `Ad_g`.
pub const GROUP_TOL: f64 = 1e-9;
/// Acceptance threshold for verification residuals.
pub const QHAM_TOL: f64 = 1e-9;
/// Certification threshold for the isotropy of `F′`.
pub const ISOTROPY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupTag {
    So3,
    Su2,
    Generic,
}

/// A compact matrix group with `B(X, Y) = −κ Re tr(XY)` and a
/// `B`-orthonormal basis of anti-Hermitian matrices.
#[derive(Clone, Debug)]
pub struct GroupContext {
    tag: GroupTag,
    kappa: f64,
    basis: Vec<CMat>,
    gram: RMat,
}

fn trace_form(kappa: f64, x: &CMat, y: &CMat) -> f64 {
    -kappa * (x * y).trace().re
}

fn bracket(x: &CMat, y: &CMat) -> CMat {
    x * y - y * x
}

impl GroupContext {
    /// `SO(3)` with `L_x, L_y, L_z` (`L_x v = e_x × v`) and `κ = ½`.
    pub fn so3() -> Self {
        let basis = [(1, 2), (2, 0), (0, 1)]
            .iter()
            .map(|&(i, j)| {
                let mut m = CMat::zeros(3, 3);
                m[(i, j)] = C64::new(-1.0, 0.0);
                m[(j, i)] = C64::new(1.0, 0.0);
                m
            })
            .collect();
        Self::build(GroupTag::So3, 0.5, basis).expect("so(3) basis is orthonormal")
    }

    /// `SU(2)` with `iσ_k/2` and `κ = 2`.
    pub fn su2() -> Self {
        let (o, i) = (C64::new(1.0, 0.0), C64::new(0.0, 1.0));
        let z = C64::new(0.0, 0.0);
        let pauli = [[z, o, o, z], [z, -i, i, z], [o, z, z, -o]];
        let basis = pauli
            .iter()
            .map(|p| CMat::from_row_slice(2, 2, p) * (i * 0.5))
            .collect();
        Self::build(GroupTag::Su2, 2.0, basis).expect("su(2) basis is orthonormal")
    }

    /// A matrix Lie algebra spanned by anti-Hermitian `basis`, orthonormalized
    /// for `B = −κ Re tr`.
    pub fn generic(kappa: f64, basis: Vec<CMat>) -> Result<Self> {
        if kappa <= 0.0 {
            return Err(Error::InvalidParameter("κ must be positive".into()));
        }
        let n = basis.len();
        let gram = RMat::from_fn(n, n, |i, j| trace_form(kappa, &basis[i], &basis[j]));
        let chol = gram
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidParameter("B is not positive definite on the basis".into()))?;
        let linv = chol
            .l()
            .try_inverse()
            .ok_or_else(|| Error::InvalidParameter("B is degenerate on the basis".into()))?;
        let ortho = (0..n)
            .map(|i| {
                (0..n).fold(CMat::zeros(basis[0].nrows(), basis[0].ncols()), |acc, j| {
                    acc + &basis[j] * C64::new(linv[(i, j)], 0.0)
                })
            })
            .collect();
        Self::build(GroupTag::Generic, kappa, ortho)
    }

    /// The torus `U(1)^n` as diagonal unitaries, basis `i E_kk`, `κ = 1`.
    pub fn torus(n: usize) -> Self {
        let basis = (0..n)
            .map(|k| {
                let mut m = CMat::zeros(n, n);
                m[(k, k)] = C64::new(0.0, 1.0);
                m
            })
            .collect();
        Self::build(GroupTag::Generic, 1.0, basis).expect("torus basis is orthonormal")
    }

    fn build(tag: GroupTag, kappa: f64, basis: Vec<CMat>) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::InvalidParameter("empty Lie algebra basis".into()));
        }
        let d = basis[0].nrows();
        for x in &basis {
            if x.shape() != (d, d) {
                return Err(Error::InvalidParameter("basis matrices must share one square shape".into()));
            }
            let ah = (x + x.adjoint()).norm();
            if ah > GROUP_TOL {
                return Err(Error::InvalidParameter(format!("basis element is not anti-Hermitian ({ah:e})")));
            }
        }
        let n = basis.len();
        let gram = RMat::from_fn(n, n, |i, j| trace_form(kappa, &basis[i], &basis[j]));
        Ok(GroupContext { tag, kappa, basis, gram })
    }

    pub fn tag(&self) -> GroupTag {
        self.tag
    }

    pub fn lie_dim(&self) -> usize {
        self.basis.len()
    }

    pub fn matrix_dim(&self) -> usize {
        self.basis[0].nrows()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn basis(&self) -> &[CMat] {
        &self.basis
    }

    /// Gram matrix of `B` on the basis; the identity after orthonormalization.
    pub fn b_matrix(&self) -> &RMat {
        &self.gram
    }

    pub fn b(&self, x: &CMat, y: &CMat) -> f64 {
        trace_form(self.kappa, x, y)
    }

    /// `Σ_k ξ_k X_k`.
    pub fn element(&self, xi: &RVec) -> CMat {
        self.basis
            .iter()
            .zip(xi.iter())
            .fold(CMat::zeros(self.matrix_dim(), self.matrix_dim()), |acc, (x, &c)| acc + x * C64::new(c, 0.0))
    }

    /// `B`-coordinates of a matrix in `𝔤`.
    pub fn coords(&self, x: &CMat) -> RVec {
        RVec::from_iterator(self.lie_dim(), self.basis.iter().map(|b| self.b(b, x)))
    }

    /// `max |B([x, y], z) + B(y, [x, z])|` over basis triples.
    pub fn invariance_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for x in &self.basis {
            for y in &self.basis {
                for z in &self.basis {
                    let r = self.b(&bracket(x, y), z) + self.b(y, &bracket(x, z));
                    worst = worst.max(r.abs());
                }
            }
        }
        worst
    }

    /// `exp(Σ ξ_k X_k)`.
    pub fn exp(&self, xi: &RVec) -> CMat {
        expm_antihermitian(&self.element(xi))
    }

    /// Matrix of `ad_μ` in the orthonormal basis.
    pub fn ad(&self, mu: &RVec) -> RMat {
        let m = self.element(mu);
        let n = self.lie_dim();
        RMat::from_fn(n, n, |i, j| self.b(&self.basis[i], &bracket(&m, &self.basis[j])))
    }

    /// An element `exp(ξ)` with Gaussian `ξ` of the given scale.
    pub fn random_element(&self, rng: &mut random::Rng, scale: f64) -> CMat {
        let xi = random::gaussian(rng, self.lie_dim(), 1).column(0) * scale;
        self.exp(&xi)
    }

    fn membership_residual(&self, g: &CMat) -> f64 {
        let d = self.matrix_dim();
        if g.shape() != (d, d) {
            return f64::INFINITY;
        }
        let unitary = (g.adjoint() * g - CMat::identity(d, d)).norm();
        match self.tag {
            GroupTag::Su2 => unitary.max((g.determinant() - C64::new(1.0, 0.0)).norm()),
            GroupTag::So3 => unitary
                .max(g.iter().map(|z| z.im.abs()).fold(0.0, f64::max))
                .max((g.determinant() - C64::new(1.0, 0.0)).norm()),
            GroupTag::Generic => unitary,
        }
    }
}

/// `Ad_g`, with entries `B(X_i, g X_j g⁻¹)`.
pub fn adjoint(ctx: &GroupContext, g: &CMat) -> Result<OrthogonalPoint> {
    let res = ctx.membership_residual(g);
    if res > GROUP_TOL {
        return Err(Error::NotInGroup(res));
    }
    let ginv = g.adjoint();
    let n = ctx.lie_dim();
    let conj: Vec<CMat> = ctx.basis.iter().map(|x| g * x * &ginv).collect();
    let a = RMat::from_fn(n, n, |i, j| ctx.b(&ctx.basis[i], &conj[j]));
    // Generic realizations may have g·𝔤·g⁻¹ ⊄ 𝔤.
    OrthogonalPoint::new(a).map_err(|e| match e {
        Error::NotOrthogonal(r) => Error::NotInGroup(r),
        other => other,
    })
}

/// `E_G|_g = E_{Ad_g}` in left trivialization.
pub fn cartan_dirac_at(ctx: &GroupContext, g: &CMat) -> Result<DiracStructure> {
    Ok(lag_from_orth(&adjoint(ctx, g)?))
}

/// The spanning sections `e(ξ) = (ξ^♯, ½B(θ^L + θ^R, ξ))` at `g`, computed
/// from the group matrices rather than from `Ad_g`.
pub fn cartan_dirac_sections(ctx: &GroupContext, g: &CMat) -> Result<DiracStructure> {
    let res = ctx.membership_residual(g);
    if res > GROUP_TOL {
        return Err(Error::NotInGroup(res));
    }
    let n = ctx.lie_dim();
    let ginv = g.adjoint();
    let mut frame = RMat::zeros(2 * n, n);
    for (k, x) in ctx.basis.iter().enumerate() {
        // ξ^♯ = ξ^L − ξ^R has left-trivialized value ξ − g⁻¹ξg.
        let sharp = x - &ginv * x * g;
        frame.view_mut((0, k), (n, 1)).copy_from(&ctx.coords(&sharp));
        // u ↦ ½B(u + g u g⁻¹, ξ) = ½B(u, ξ + g⁻¹ξg).
        let form = (x + &ginv * x * g) * C64::new(0.5, 0.0);
        frame.view_mut((n, k), (n, 1)).copy_from(&ctx.coords(&form));
    }
    DiracStructure::from_frame(&frame)
}

/// Pointwise data of a quasi-Hamiltonian space.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointedQHam {
    pub group: GroupTag,
    /// `Φ(m)` in the matrix realization.
    #[serde(with = "crate::json::cmat")]
    pub g: CMat,
    /// `dΦ: T → 𝔤`, `n × m`.
    #[serde(with = "crate::json::rmat")]
    pub dphi: RMat,
    /// Gram matrix of `ω` on `T`, `m × m`.
    #[serde(with = "crate::json::rmat")]
    pub omega: RMat,
    /// `ξ ↦ ξ_M`, an `m × n` matrix.
    #[serde(with = "crate::json::rmat")]
    pub generators: RMat,
}

impl PointedQHam {
    /// The one-point space at the identity.
    pub fn trivial(ctx: &GroupContext) -> Self {
        let n = ctx.lie_dim();
        let d = ctx.matrix_dim();
        PointedQHam {
            group: ctx.tag,
            g: CMat::identity(d, d),
            dphi: RMat::zeros(n, 0),
            omega: RMat::zeros(0, 0),
            generators: RMat::zeros(0, n),
        }
    }

    pub fn t_dim(&self) -> usize {
        self.omega.nrows()
    }

    pub fn lie_dim(&self) -> usize {
        self.dphi.nrows()
    }

    pub fn check_shapes(&self) -> Result<()> {
        let m = self.t_dim();
        let n = self.lie_dim();
        let shapes = [
            ("omega", self.omega.shape(), (m, m)),
            ("dphi", self.dphi.shape(), (n, m)),
            ("generators", self.generators.shape(), (m, n)),
        ];
        for (context, found, expected) in shapes {
            if found != expected {
                return Err(Error::DimensionMismatch {
                    context,
                    expected: expected.0 * expected.1,
                    found: found.0 * found.1,
                });
            }
        }
        Ok(())
    }

    fn morphism(&self) -> Result<DiracMorphism> {
        DiracMorphism::new(self.dphi.clone(), self.omega.clone())
    }

    fn check_context(&self, ctx: &GroupContext) -> Result<()> {
        if self.group != ctx.tag || self.lie_dim() != ctx.lie_dim() || self.g.nrows() != ctx.matrix_dim() {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QHamReport {
    pub t_dim: usize,
    pub det_ad: f64,
    pub is_dirac_morphism: bool,
    pub is_strong: bool,
    pub parity_ok: bool,
    /// Principal-angle gap between the forward image of `T` and `E_{Ad_g}`.
    pub dirac_residual: f64,
    /// Smallest singular value of `[ω; dΦ]`, zero when `ker ω ∩ ker dΦ ≠ 0`.
    pub strong_margin: f64,
    /// `‖ι(ξ_M)ω + ½B((I + Ad_g) dΦ ·, ξ)‖`.
    pub moment_residual: f64,
    /// `‖dΦ(ξ_M) − (I − Ad_g⁻¹)ξ‖`.
    pub action_residual: f64,
    pub tol: f64,
}

impl QHamReport {
    pub fn passed(&self) -> bool {
        self.is_dirac_morphism && self.is_strong && self.parity_ok
    }
}

/// Decides whether `(dΦ, ω)` is a strong Dirac morphism into `E_{Ad_g}`.
pub fn verify_qham(ctx: &GroupContext, p: &PointedQHam, tol: f64) -> Result<QHamReport> {
    p.check_shapes()?;
    p.check_context(ctx)?;
    let ad = adjoint(ctx, &p.g)?;
    let a = ad.matrix();
    let n = ctx.lie_dim();
    let m = p.t_dim();
    let id = RMat::identity(n, n);
    let target = lag_from_orth(&ad);
    let image = if m == 0 {
        // The forward image of the zero space is all of 𝔤*.
        DiracStructure::v_dual(n)
    } else {
        forward_image(&p.morphism()?, &DiracStructure::v_space(m))?
    };
    let dirac_residual = image.distance(&target).unwrap_or(f64::INFINITY);
    let strong_margin = if m == 0 {
        f64::INFINITY
    } else {
        singular_values(&vstack(&p.omega, &p.dphi)).last().copied().unwrap_or(0.0)
    };
    let scale = 1.0 + p.omega.norm() + p.dphi.norm();
    let is_strong = strong_margin > DEFAULT_TOL * scale;
    let det_ad = a.determinant();
    let parity_ok = (if m % 2 == 0 { 1.0 } else { -1.0 }) * det_ad > 0.0;
    let (moment_residual, action_residual) = if m == 0 {
        (0.0, 0.0)
    } else {
        (
            (p.generators.transpose() * &p.omega + (&id + a) * &p.dphi * 0.5).norm(),
            (&p.dphi * &p.generators - (&id - a.transpose())).norm(),
        )
    };
    Ok(QHamReport {
        t_dim: m,
        det_ad,
        is_dirac_morphism: dirac_residual <= tol,
        is_strong,
        parity_ok,
        dirac_residual,
        strong_margin,
        moment_residual,
        action_residual,
        tol,
    })
}

/// Least-squares skew `W` with `Gᵀ W ≈ R`; returns `(W, ‖GᵀW − R‖)`.
fn solve_skew(gm: &RMat, rhs: &RMat) -> (RMat, f64) {
    let m = gm.nrows();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect();
    let mut w = RMat::zeros(m, m);
    if !pairs.is_empty() {
        let rows = rhs.len();
        let mut lhs = RMat::zeros(rows, pairs.len());
        for (c, &(a, b)) in pairs.iter().enumerate() {
            let mut e = RMat::zeros(m, m);
            e[(a, b)] = 1.0;
            e[(b, a)] = -1.0;
            lhs.set_column(c, &RVec::from_column_slice((gm.transpose() * e).as_slice()));
        }
        let b = RVec::from_column_slice(rhs.as_slice());
        let x = lhs
            .svd(true, true)
            .solve(&b, 1e-13)
            .expect("SVD with both factors solves");
        for (c, &(a, b)) in pairs.iter().enumerate() {
            w[(a, b)] = x[c];
            w[(b, a)] = -x[c];
        }
    }
    let res = (gm.transpose() * &w - rhs).norm();
    (w, res)
}

/// The conjugacy class through `g`, moment map the inclusion.
///
/// `T = ran(I − Ad_g⁻¹)` with orthonormal frame `Q`, so `dΦ = Q`,
/// `ξ_M = Qᵀ(I − Ad_g⁻¹)ξ`, and `ω` solves `ι(ξ_M)ω = −½B((I + Ad_g)dΦ·, ξ)`.
pub fn conjugacy_class_data(ctx: &GroupContext, g: &CMat) -> Result<PointedQHam> {
    let ad = adjoint(ctx, g)?;
    let a = ad.matrix();
    let n = ctx.lie_dim();
    let id = RMat::identity(n, n);
    let lhs = &id - a.transpose();
    let q = if lhs.norm() <= GROUP_TOL {
        RMat::zeros(n, 0)
    } else {
        range_basis(&lhs, DEFAULT_TOL)
    };
    let gm = q.transpose() * &lhs;
    let rhs = (&id + a) * &q * -0.5;
    let (omega, res) = solve_skew(&gm, &rhs);
    if res > QHAM_TOL {
        return Err(Error::InconsistentMomentCondition(res));
    }
    Ok(PointedQHam {
        group: ctx.tag,
        g: g.clone(),
        dphi: q,
        omega,
        generators: gm,
    })
}

/// Sign of `σ` selected by the fusion self-test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SigmaConvention {
    AsStated,
    Flipped,
}

/// Picks the sign of `σ` for which `E_{A1} × E_{A2} ⇢ E_{A1A2}` under `(Σ, ±σ)`.
pub fn fusion_sigma_convention(a1: &OrthogonalPoint, a2: &OrthogonalPoint) -> Result<(DiracMorphism, SigmaConvention)> {
    let mm = multiplicative_morphism(a1, a2)?;
    let product = product_structure(a1, a2);
    let prod = OrthogonalPoint::new(a1.matrix() * a2.matrix())?;
    let target = lag_from_orth(&prod);
    let gap = forward_image(&mm, &product)?.distance(&target)?;
    if gap <= CERT_TOL {
        return Ok((mm, SigmaConvention::AsStated));
    }
    let flipped = DiracMorphism::new(mm.theta().clone(), -mm.omega())?;
    let gap2 = forward_image(&flipped, &product)?.distance(&target)?;
    if gap2 <= CERT_TOL {
        return Ok((flipped, SigmaConvention::Flipped));
    }
    Err(Error::InvalidParameter(format!(
        "no sign of σ maps E_A1 × E_A2 onto E_A1A2 (gaps {gap:e}, {gap2:e})"
    )))
}

/// Fusion product: `Φ = Φ1Φ2` and `(dΦ, ω) = (Σ, σ) ∘ (dΦ1 ⊕ dΦ2, ω1 ⊕ ω2)`.
pub fn fusion(ctx: &GroupContext, p1: &PointedQHam, p2: &PointedQHam) -> Result<PointedQHam> {
    p1.check_context(ctx)?;
    p2.check_context(ctx)?;
    p1.check_shapes()?;
    p2.check_shapes()?;
    let a1 = adjoint(ctx, &p1.g)?;
    let a2 = adjoint(ctx, &p2.g)?;
    let (mult, _) = fusion_sigma_convention(&a1, &a2)?;
    let inner = DiracMorphism::new(block_diag(&p1.dphi, &p2.dphi), block_diag(&p1.omega, &p2.omega))?;
    let fused = compose(&mult, &inner)?;
    Ok(PointedQHam {
        group: ctx.tag,
        g: &p1.g * &p2.g,
        dphi: fused.theta().clone(),
        omega: fused.omega().clone(),
        generators: vstack(&p1.generators, &p2.generators),
    })
}

/// Pointwise Hamiltonian data at `μ ∈ 𝔤 ≅ 𝔤*`.
#[derive(Clone, Debug, Serialize)]
pub struct HamiltonianPoint {
    #[serde(with = "crate::json::rmat")]
    pub mu: RMat,
    #[serde(with = "crate::json::rmat")]
    pub dphi: RMat,
    #[serde(with = "crate::json::rmat")]
    pub omega: RMat,
    #[serde(with = "crate::json::rmat")]
    pub generators: RMat,
    /// `‖ι(ξ_M)ω + B(dΦ·, ξ)‖`.
    pub moment_residual: f64,
}

impl HamiltonianPoint {
    fn morphism(&self) -> Result<DiracMorphism> {
        DiracMorphism::new(self.dphi.clone(), self.omega.clone())
    }

    /// Gap between the forward image of `T` and `Gr_{ad_μ}`.
    pub fn dirac_residual(&self, ctx: &GroupContext) -> Result<f64> {
        let mu = self.mu.column(0).into_owned();
        let target = graph_structure(&SkewPoint::new(ctx.ad(&mu))?);
        let n = ctx.lie_dim();
        let image = if self.omega.nrows() == 0 {
            DiracStructure::v_dual(n)
        } else {
            forward_image(&self.morphism()?, &DiracStructure::v_space(self.omega.nrows()))?
        };
        image.distance(&target)
    }
}

/// The coadjoint orbit through `μ`: `T = ran(ad_μ)`, `ξ_M = Qᵀ ad_μ ξ`, and
/// `ω` solves `ι(ξ_M)ω = −B(dΦ·, ξ)`.
pub fn hamiltonian_orbit_data(ctx: &GroupContext, mu: &RVec) -> Result<HamiltonianPoint> {
    let n = ctx.lie_dim();
    if mu.len() != n {
        return Err(Error::DimensionMismatch {
            context: "moment value",
            expected: n,
            found: mu.len(),
        });
    }
    let a = ctx.ad(mu);
    let q = if a.norm() <= GROUP_TOL {
        RMat::zeros(n, 0)
    } else {
        range_basis(&a, DEFAULT_TOL)
    };
    let gm = q.transpose() * &a;
    let (omega, moment_residual) = solve_skew(&gm, &(-&q));
    if moment_residual > QHAM_TOL {
        return Err(Error::InconsistentMomentCondition(moment_residual));
    }
    Ok(HamiltonianPoint {
        mu: RMat::from_column_slice(n, 1, mu.as_slice()),
        dphi: q,
        omega,
        generators: gm,
        moment_residual,
    })
}

/// `Φ = exp Φ_0`, `(dΦ, ω) = (Π_{ad_μ}, −ϖ_{ad_μ}) ∘ (dΦ_0, ω_0)`.
pub fn exponential_point(ctx: &GroupContext, h: &HamiltonianPoint) -> Result<PointedQHam> {
    let mu = h.mu.column(0).into_owned();
    let lift = exp_lift(&SkewPoint::new(ctx.ad(&mu))?);
    if !lift.is_strong {
        return Err(Error::NotRegular(format!(
            "exp is singular at μ (σ_min(Π) = {:e})",
            lift.min_singular_value
        )));
    }
    let g = ctx.exp(&mu);
    if h.omega.nrows() == 0 {
        let mut p = PointedQHam::trivial(ctx);
        p.g = g;
        return Ok(p);
    }
    let composed = compose(&lift.morphism, &h.morphism()?)?;
    Ok(PointedQHam {
        group: ctx.tag,
        g,
        dphi: composed.theta().clone(),
        omega: composed.omega().clone(),
        generators: h.generators.clone(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionResult {
    /// `ω_red` on the frame `basis`.
    #[serde(with = "crate::json::rmat")]
    pub omega_red: RMat,
    /// Orthonormal frame of the `ω`-orthogonal complement of `𝔤 ⊕ 𝔤*` in `T`.
    #[serde(with = "crate::json::rmat")]
    pub basis: RMat,
    /// `‖ω(F′, F′)‖`.
    pub isotropy_residual: f64,
    pub isotropic: bool,
    /// `‖φ(F)‖`, zero when `F` is already isotropic.
    pub correction_norm: f64,
    /// Off-diagonal block of `ω` in the splitting `T = W ⊕ 𝔤 ⊕ 𝔤*`.
    pub block_residual: f64,
    /// Distance of the `𝔤 ⊕ 𝔤*` block from `μ1(v2) − μ2(v1)`.
    pub standard_residual: f64,
}

/// Normal form `ω = π*ω_red ⊕ ω_{𝔤⊕𝔤*}` at a point with `Φ = e`.
pub fn reduction_normal_form(p: &PointedQHam) -> Result<ReductionResult> {
    p.check_shapes()?;
    let d = p.g.nrows();
    let at_e = (&p.g - CMat::identity(d, d)).norm();
    if at_e > GROUP_TOL {
        return Err(Error::InvalidParameter(format!("reduction needs Φ = e (‖g − I‖ = {at_e:e})")));
    }
    let n = p.lie_dim();
    let m = p.t_dim();
    let w = &p.omega;
    if rank(&p.dphi, DEFAULT_TOL) < n {
        return Err(Error::NotRegular("dΦ is not surjective".into()));
    }
    let grank = rank(&p.generators, DEFAULT_TOL);
    if grank < n {
        return Err(Error::NotFree { rank: grank, expected: n });
    }
    // F: a complement to TZ = ker dΦ, and its ω-orthogonal F^ω.
    let f = range_basis(&p.dphi.transpose(), DEFAULT_TOL);
    let f_omega = null_basis(&(f.transpose() * w), DEFAULT_TOL);
    let gd = range_basis(&p.generators, DEFAULT_TOL);
    let split = hstack(&gd, &f_omega);
    if split.ncols() != m || rank(&split, DEFAULT_TOL) < m {
        return Err(Error::NotRegular("𝔤-directions meet F^ω".into()));
    }
    // φ: projection onto the 𝔤-directions along F^ω.
    let coef = split
        .try_inverse()
        .ok_or_else(|| Error::NotRegular("𝔤 ⊕ F^ω is singular".into()))?;
    let phi = &gd * coef.rows(0, gd.ncols());
    let correction = &phi * &f;
    let fp = &f - &correction * 0.5;
    let isotropy_residual = (fp.transpose() * w * &fp).norm();
    // F′ ≅ 𝔤* through dΦ: the column f′_i satisfies dΦ f′_i = e_i.
    let fpb = &fp
        * (&p.dphi * &fp)
            .try_inverse()
            .ok_or_else(|| Error::NotRegular("dΦ is singular on F′".into()))?;
    let gens_fpb = hstack(&p.generators, &fpb);
    let wperp = range_basis(&null_basis(&(gens_fpb.transpose() * w), DEFAULT_TOL), DEFAULT_TOL);
    let omega_red = wperp.transpose() * w * &wperp;
    let full = hstack(&wperp, &gens_fpb);
    let om = full.transpose() * w * &full;
    let r = wperp.ncols();
    let block_residual = if r == 0 || r == m {
        0.0
    } else {
        om.view((0, r), (r, m - r)).norm()
    };
    let mut std = RMat::zeros(2 * n, 2 * n);
    std.view_mut((0, n), (n, n)).copy_from(&(-RMat::identity(n, n)));
    std.view_mut((n, 0), (n, n)).copy_from(&RMat::identity(n, n));
    let standard_residual = if m - r == 2 * n {
        (om.view((r, r), (2 * n, 2 * n)) - std).norm()
    } else {
        f64::INFINITY
    };
    Ok(ReductionResult {
        omega_red,
        basis: wperp,
        isotropic: isotropy_residual <= ISOTROPY_TOL * (1.0 + w.norm()),
        isotropy_residual,
        correction_norm: correction.norm(),
        block_residual,
        standard_residual,
    })
}

/// Reduction at a level `g` through the shifting trick: fuse with the
/// conjugacy class of `g⁻¹` and reduce at `e`.
pub fn reduce_at(ctx: &GroupContext, p: &PointedQHam) -> Result<ReductionResult> {
    let shift = conjugacy_class_data(ctx, &p.g.adjoint())?;
    let mut fused = fusion(ctx, p, &shift)?;
    // g·g⁻¹ is e up to rounding.
    let d = fused.g.nrows();
    fused.g = CMat::identity(d, d);
    reduction_normal_form(&fused)
}

/// A reduction instance built from a known `ω_red` in scrambled coordinates.
#[derive(Clone, Debug, Serialize)]
pub struct SyntheticReduction {
    pub instance: PointedQHam,
    #[serde(with = "crate::json::rmat")]
    pub omega_red: RMat,
    /// Coordinate change `x = P v` back to the block coordinates.
    #[serde(with = "crate::json::rmat")]
    pub scramble: RMat,
}

impl SyntheticReduction {
    /// `‖Lᵀ ω_red L − ω̃_red‖` with `L` the block-coordinate image of the
    /// recovered frame.
    pub fn recovery_residual(&self, result: &ReductionResult) -> f64 {
        let r = self.omega_red.nrows();
        if result.basis.ncols() != r {
            return f64::INFINITY;
        }
        let l = (&self.scramble * &result.basis).rows(0, r).into_owned();
        (l.transpose() * &self.omega_red * &l - &result.omega_red).norm()
    }
}

/// `T = R^r ⊕ 𝔤 ⊕ 𝔤*` with `ω = ω_red ⊕ ω_{𝔤⊕𝔤*}`, `dΦ` the projection to
/// `𝔤*`, `ξ_M` the inclusion of `𝔤`, all pulled through a random `P`.
/// The group is the torus `U(1)^n` at `e`; `scrambled = false` keeps `P = I`.
pub fn synthetic_reduction(rng: &mut random::Rng, r: usize, n: usize, scrambled: bool) -> Result<SyntheticReduction> {
    if r % 2 != 0 || n == 0 {
        return Err(Error::InvalidParameter(format!("need even r and n ≥ 1 (r = {r}, n = {n})")));
    }
    let m = r + 2 * n;
    let mut omega_red = random::skew(rng, r, 1.0);
    while r > 0 && singular_values(&omega_red).last().copied().unwrap_or(0.0) < 0.1 {
        omega_red = random::skew(rng, r, 1.0);
    }
    let mut w0 = RMat::zeros(m, m);
    w0.view_mut((0, 0), (r, r)).copy_from(&omega_red);
    w0.view_mut((r, r + n), (n, n)).copy_from(&(-RMat::identity(n, n)));
    w0.view_mut((r + n, r), (n, n)).copy_from(&RMat::identity(n, n));
    let mut dphi0 = RMat::zeros(n, m);
    dphi0.view_mut((0, r + n), (n, n)).copy_from(&RMat::identity(n, n));
    let mut g0 = RMat::zeros(m, n);
    g0.view_mut((r, 0), (n, n)).copy_from(&RMat::identity(n, n));
    let p = if scrambled {
        loop {
            let p = random::gaussian(rng, m, m);
            let sv = singular_values(&p);
            if sv[m - 1] > 0.05 * sv[0] {
                break p;
            }
        }
    } else {
        RMat::identity(m, m)
    };
    let pinv = p.clone().try_inverse().expect("conditioned scramble is invertible");
    let ctx = GroupContext::torus(n);
    Ok(SyntheticReduction {
        instance: PointedQHam {
            group: ctx.tag,
            g: CMat::identity(n, n),
            dphi: dphi0 * &p,
            omega: p.transpose() * w0 * &p,
            generators: pinv * g0,
        },
        omega_red,
        scramble: p,
    })
}
