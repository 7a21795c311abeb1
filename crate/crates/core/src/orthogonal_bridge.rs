//! The dictionary `O(V) ≅ Lag(V ⊕ V*)` fixed by the Euclidean metric, and the
//! constructions built on it: the multiplicative morphism over `O(V)`, Cayley
//! and exponential lifts, gauge transforms and the symplectic path.
//!
//! `E_A = {((I − A⁻¹)v, (I + A⁻¹)v/2)}`. In the coordinates
//! `a = α + v/2`, `b = α − v/2` it is the graph `b = A⁻¹a`.

use serde::{Deserialize, Serialize};

use crate::dirac_calculus::{
    compose, forward_image, is_strong, standard_path, DiracMorphism, DiracStructure, CERT_TOL,
};
use crate::linear_core::{hstack, singular_values, vstack, Subspace, DEFAULT_TOL};
use crate::matfun::{dexp_factor, expm_skew, phase, skew_function, varpi_factor};
use crate::{Error, RMat, RVec, Result};

/// Real-part margin below which the half-plane condition is declared violated.
pub const HALFPLANE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OrthogonalPoint {
    #[serde(with = "crate::json::rmat")]
    a: RMat,
}

impl OrthogonalPoint {
    pub fn new(a: RMat) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch {
                context: "orthogonal matrix",
                expected: n,
                found: a.ncols(),
            });
        }
        let resid = (a.transpose() * &a - RMat::identity(n, n)).norm();
        if resid > CERT_TOL {
            return Err(Error::NotOrthogonal(resid));
        }
        Ok(OrthogonalPoint { a })
    }

    pub fn identity(n: usize) -> Self {
        OrthogonalPoint {
            a: RMat::identity(n, n),
        }
    }

    pub fn validated(self) -> Result<Self> {
        Self::new(self.a)
    }

    pub fn matrix(&self) -> &RMat {
        &self.a
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn inverse(&self) -> Self {
        OrthogonalPoint {
            a: self.a.transpose(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SkewPoint {
    #[serde(with = "crate::json::rmat")]
    a: RMat,
}

impl SkewPoint {
    pub fn new(a: RMat) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch {
                context: "skew matrix",
                expected: a.nrows(),
                found: a.ncols(),
            });
        }
        let resid = (&a + a.transpose()).norm();
        if resid > DEFAULT_TOL * a.norm().max(1.0) {
            return Err(Error::NotSkew(resid));
        }
        Ok(SkewPoint { a })
    }

    pub fn validated(self) -> Result<Self> {
        Self::new(self.a)
    }

    pub fn matrix(&self) -> &RMat {
        &self.a
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }
}

/// `E_A`, certified Lagrangian.
pub fn lag_from_orth(a: &OrthogonalPoint) -> DiracStructure {
    lag_from_orth_matrix(a.matrix()).expect("E_A is Lagrangian for orthogonal A")
}

pub fn lag_from_orth_matrix(a: &RMat) -> Result<DiracStructure> {
    let n = a.nrows();
    let id = RMat::identity(n, n);
    let at = a.transpose();
    DiracStructure::from_frame(&vstack(&(&id - &at), &((&id + &at) * 0.5)))
}

/// Inverse of [`lag_from_orth`]: `A = P_a P_b⁻¹` with `P_a = X/2 + Y`, `P_b = −X/2 + Y`.
pub fn orth_from_lag(d: &DiracStructure) -> Result<OrthogonalPoint> {
    let n = d.n();
    if n == 0 {
        return Ok(OrthogonalPoint::identity(0));
    }
    let (x, y) = d.blocks();
    let pa = &x * 0.5 + &y;
    let pb = &x * -0.5 + &y;
    for (name, p) in [("P_a", &pa), ("P_b", &pb)] {
        let smin = singular_values(p).last().copied().unwrap_or(0.0);
        if smin < DEFAULT_TOL {
            return Err(Error::NonLagrangianInput(format!(
                "{name} is singular (σ_min = {smin:e})"
            )));
        }
    }
    // Aᵀ solves P_bᵀ Aᵀ = P_aᵀ.
    let at = pb
        .transpose()
        .lu()
        .solve(&pa.transpose())
        .ok_or_else(|| Error::NonLagrangianInput("P_b is singular".into()))?;
    OrthogonalPoint::new(at.transpose()).map_err(|e| Error::NonLagrangianInput(e.to_string()))
}

/// `E^op = {(v, −α)}`; `(E_A)^op = E_{A⁻¹}`.
pub fn opposite(d: &DiracStructure) -> DiracStructure {
    let (x, y) = d.blocks();
    DiracStructure::from_frame(&vstack(&x, &(-y))).expect("sign flip preserves Lagrangians")
}

/// `(v, α) ↦ (gv, gα)` for orthogonal `g` (so `g^{−T} = g`).
pub fn act(g: &OrthogonalPoint, d: &DiracStructure) -> DiracStructure {
    let (x, y) = d.blocks();
    DiracStructure::from_frame(&vstack(&(g.matrix() * x), &(g.matrix() * y)))
        .expect("orthogonal action preserves Lagrangians")
}

fn check_same_n(a: &OrthogonalPoint, b: &OrthogonalPoint) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            context: "orthogonal points",
            expected: a.n(),
            found: b.n(),
        });
    }
    Ok(())
}

/// `σ((ξ1, ξ2), (ζ1, ζ2)) = ½(B(ξ1, A2ζ2) − B(A2ξ2, ζ1))` as a `2n × 2n` Gram matrix.
pub fn sigma_form(a2: &RMat) -> RMat {
    let n = a2.nrows();
    let mut s = RMat::zeros(2 * n, 2 * n);
    s.view_mut((0, n), (n, n)).copy_from(&(a2 * 0.5));
    s.view_mut((n, 0), (n, n)).copy_from(&(a2.transpose() * -0.5));
    s
}

/// `(Σ, σ)` at `(A1, A2)`: `Σ(ξ1, ξ2) = A2⁻¹ξ1 + ξ2`, σ as in [`sigma_form`].
pub fn multiplicative_morphism(a1: &OrthogonalPoint, a2: &OrthogonalPoint) -> Result<DiracMorphism> {
    check_same_n(a1, a2)?;
    let n = a2.n();
    let theta = hstack(&a2.matrix().transpose(), &RMat::identity(n, n));
    DiracMorphism::new(theta, sigma_form(a2.matrix()))
}

/// `E_{A1} × E_{A2}` on `V ⊕ V`.
pub fn product_structure(a1: &OrthogonalPoint, a2: &OrthogonalPoint) -> DiracStructure {
    lag_from_orth(a1).direct_sum(&lag_from_orth(a2))
}

/// The spanning vector `e(ξ) = ((I − A⁻¹)ξ, (I + A⁻¹)ξ/2)` of `E_A`.
pub fn e_vector(a: &RMat, xi: &RVec) -> (RVec, RVec) {
    let ainv_xi = a.transpose() * xi;
    (xi - &ainv_xi, (xi + &ainv_xi) * 0.5)
}

/// Residual of the relation `(v, α) ~ (v′, α′)` under `m`.
pub fn relation_residual(m: &DiracMorphism, v: &RVec, alpha: &RVec, vp: &RVec, alphap: &RVec) -> f64 {
    let r1 = (m.theta() * v - vp).norm();
    let r2 = (alpha - (m.omega().transpose() * v + m.theta().transpose() * alphap)).norm();
    r1.max(r2)
}

/// Residual of `e_1(ξ) × e_2(ξ) ∼ e(ξ)` under the multiplicative morphism.
pub fn multiplicative_witness_residual(a1: &OrthogonalPoint, a2: &OrthogonalPoint, xi: &RVec) -> Result<f64> {
    let m = multiplicative_morphism(a1, a2)?;
    let (v1, al1) = e_vector(a1.matrix(), xi);
    let (v2, al2) = e_vector(a2.matrix(), xi);
    let (vp, alp) = e_vector(&(a1.matrix() * a2.matrix()), xi);
    let n = xi.len();
    let cat = |a: &RVec, b: &RVec| RVec::from_iterator(2 * n, a.iter().chain(b.iter()).copied());
    let v = cat(&v1, &v2);
    let al = cat(&al1, &al2);
    Ok(relation_residual(&m, &v, &al, &vp, &alp))
}

/// Both bracketings of the triple product morphism; returns `max(‖ΔΘ‖, ‖Δω‖)`.
pub fn associativity_check(a1: &OrthogonalPoint, a2: &OrthogonalPoint, a3: &OrthogonalPoint) -> Result<f64> {
    check_same_n(a1, a2)?;
    check_same_n(a2, a3)?;
    let n = a1.n();
    let a12 = OrthogonalPoint::new(a1.matrix() * a2.matrix())?;
    let a23 = OrthogonalPoint::new(a2.matrix() * a3.matrix())?;
    let id = DiracMorphism::identity(n);
    let zero = DiracMorphism::new(RMat::identity(n, n), RMat::zeros(n, n))?;

    // (Σ, σ) ∘ (Σ × id, σ × 0)
    let left_inner = multiplicative_morphism(a1, a2)?.product(&zero);
    let left = compose(&multiplicative_morphism(&a12, a3)?, &left_inner)?;
    // (Σ, σ) ∘ (id × Σ, 0 × σ)
    let right_inner = id.product(&multiplicative_morphism(a2, a3)?);
    let right = compose(&multiplicative_morphism(a1, &a23)?, &right_inner)?;

    let dt = (left.theta() - right.theta()).norm();
    let dw = (left.omega() - right.omega()).norm();
    Ok(dt.max(dw))
}

/// `Gr_a = {(ι_μ a, μ)} = {(aμ, μ)}`.
pub fn graph_structure(a: &SkewPoint) -> DiracStructure {
    let n = a.n();
    DiracStructure::from_frame(&vstack(a.matrix(), &RMat::identity(n, n)))
        .expect("graph of a skew map is Lagrangian")
}

pub fn cayley_transform(a: &SkewPoint) -> OrthogonalPoint {
    let n = a.n();
    let id = RMat::identity(n, n);
    let half = a.matrix() * 0.5;
    // (I + a/2)(I − a/2)⁻¹ = ((I − a/2)⁻ᵀ (I + a/2)ᵀ)ᵀ, and I − a/2 is never singular.
    let lhs = (&id - &half).transpose();
    let rhs = (&id + &half).transpose();
    let at = lhs.lu().solve(&rhs).expect("I − a/2 is invertible for skew a");
    OrthogonalPoint::new(at.transpose()).expect("Cayley transform of a skew matrix is orthogonal")
}

#[derive(Clone, Debug, Serialize)]
pub struct CayleyLift {
    pub morphism: DiracMorphism,
    pub point: OrthogonalPoint,
    pub graph: DiracStructure,
    pub is_strong: bool,
    /// Principal angle between the forward image of `Gr_a` and `E_A`.
    pub gap: f64,
}

/// `(id, 0): Gr_a ⇢ E_A` with `A` the Cayley transform of `a`.
pub fn cayley_morphism(a: &SkewPoint) -> CayleyLift {
    let morphism = DiracMorphism::identity(a.n());
    let point = cayley_transform(a);
    let graph = graph_structure(a);
    let is_strong = is_strong(&morphism, &graph).expect("dimensions agree");
    let image = forward_image(&morphism, &graph).expect("identity preserves Lagrangians");
    let gap = image
        .distance(&lag_from_orth(&point))
        .expect("same ambient space");
    CayleyLift {
        morphism,
        point,
        graph,
        is_strong,
        gap,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpLift {
    /// `(Π_a, −ϖ_a)`.
    pub morphism: DiracMorphism,
    pub point: OrthogonalPoint,
    pub is_strong: bool,
    /// Smallest singular value of `Π_a`.
    pub min_singular_value: f64,
}

/// `Π_a = (I − e^{−a})/a`.
pub fn dexp_matrix(a: &RMat) -> RMat {
    skew_function(a, dexp_factor)
}

/// Gram matrix of `ϖ_a`: `ϖ(ξ1, ξ2) = −B(f(a)ξ1, ξ2)`, `f(z) = (z − sinh z)/z²`.
/// Since `f` is odd and `a` skew, the Gram matrix is `f(a)` itself.
pub fn varpi_gram(a: &RMat) -> RMat {
    let f = skew_function(a, varpi_factor);
    (&f - f.transpose()) * 0.5
}

pub fn exp_lift(a: &SkewPoint) -> ExpLift {
    let pi = dexp_matrix(a.matrix());
    let omega = -varpi_gram(a.matrix());
    let min_singular_value = singular_values(&pi).last().copied().unwrap_or(f64::INFINITY);
    let point = OrthogonalPoint::new(expm_skew(a.matrix())).expect("exp of skew is orthogonal");
    ExpLift {
        morphism: DiracMorphism::new(pi, omega).expect("ϖ is skew"),
        point,
        is_strong: min_singular_value > DEFAULT_TOL,
        min_singular_value,
    }
}

/// Residual of `e_0(ξ) = (aξ, ξ) ∼ e(ξ)` under `(Π_a, −ϖ_a)`.
pub fn exp_witness_residual(a: &SkewPoint, xi: &RVec) -> f64 {
    let lift = exp_lift(a);
    let v = a.matrix() * xi;
    let (vp, alp) = e_vector(lift.point.matrix(), xi);
    relation_residual(&lift.morphism, &v, xi, &vp, &alp)
}

#[derive(Clone, Debug, Serialize)]
pub struct GaugeResult {
    pub structure: DiracStructure,
    /// `‖orth_from_lag(result) − A^ω‖` when `I − R(A − I)` is invertible.
    pub formula_residual: Option<f64>,
}

/// `(v, α) ↦ (v, α − ι_vω)`, cross-checked against
/// `A^ω = (A − R(A − I))(I − R(A − I))⁻¹` with `R = Wᵀ` the skew map `v ↦ ι_vω`.
pub fn gauge_transform(d: &DiracStructure, omega: &SkewPoint) -> Result<GaugeResult> {
    let n = d.n();
    if omega.n() != n {
        return Err(Error::DimensionMismatch {
            context: "gauge form",
            expected: n,
            found: omega.n(),
        });
    }
    let (x, y) = d.blocks();
    let r = omega.matrix().transpose();
    let structure = DiracStructure::from_frame(&vstack(&x, &(&y - &r * &x)))?;

    let formula_residual = (|| {
        let a = orth_from_lag(d).ok()?.matrix().clone();
        let id = RMat::identity(n, n);
        let k = &r * (&a - &id);
        let den = &id - &k;
        if singular_values(&den).last().copied().unwrap_or(0.0) < DEFAULT_TOL {
            return None;
        }
        let num = &a - &k;
        // num · den⁻¹ = (den⁻ᵀ numᵀ)ᵀ
        let closed = den.transpose().lu().solve(&num.transpose())?.transpose();
        let got = orth_from_lag(&structure).ok()?;
        Some((got.matrix() - closed).norm())
    })();
    Ok(GaugeResult {
        structure,
        formula_residual,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SymplecticPathPoint {
    pub t: f64,
    #[serde(with = "crate::json::rmat")]
    pub a_t: RMat,
    #[serde(with = "crate::json::rmat")]
    pub a_tilde: RMat,
    #[serde(with = "crate::json::rmat")]
    pub j: RMat,
    /// Minimum real part over `spec(J A_t) ∪ spec(J Ã_t)`.
    pub margin: f64,
    pub min_sv_a: f64,
    pub min_sv_tilde: f64,
    pub halfplane_ok: bool,
    /// `‖A_t − orth_from_lag(E_t)‖` for the standard path of `(0, ω)` from `V`.
    pub path_residual: f64,
}

/// `A_t = (tR_ω − c)(tR_ω + c)⁻¹`, `c = ½(1 − t)²`, and `Ã_t = −exp(tπJ)`.
///
/// `r` is the Gram matrix of the symplectic form ω and `J = r|r|⁻¹`. The skew
/// map in the path formula is `R_ω = v ↦ ι_vω = rᵀ = −r`; this is the choice
/// under which `A_t` is the standard path of `(0, ω)` starting at `V`.
pub fn symplectic_path(r: &SkewPoint, t: f64) -> Result<SymplecticPathPoint> {
    let n = r.n();
    let sv = singular_values(r.matrix());
    let smin = sv.last().copied().unwrap_or(0.0);
    if n == 0 || smin <= DEFAULT_TOL * sv[0] {
        return Err(Error::SingularForm(smin));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("t = {t} outside [0, 1]")));
    }
    let id = RMat::identity(n, n);
    let r_omega = r.matrix().transpose();
    let c = 0.5 * (1.0 - t) * (1.0 - t);
    let num = &r_omega * t - &id * c;
    let den = &r_omega * t + &id * c;
    let a_t = den
        .transpose()
        .lu()
        .solve(&num.transpose())
        .ok_or(Error::SingularForm(smin))?
        .transpose();
    let j = skew_function(r.matrix(), phase);
    let a_tilde = -expm_skew(&(&j * (t * std::f64::consts::PI)));

    let margin_of = |m: &RMat| {
        m.complex_eigenvalues()
            .iter()
            .map(|z| z.re)
            .fold(f64::INFINITY, f64::min)
    };
    let ja = &j * &a_t;
    let jt = &j * &a_tilde;
    let margin = margin_of(&ja).min(margin_of(&jt));
    let min_sv = |m: RMat| singular_values(&m).last().copied().unwrap_or(0.0);
    let min_sv_a = min_sv(&ja + &id);
    let min_sv_tilde = min_sv(&jt + &id);

    let m0 = DiracMorphism::new(RMat::zeros(0, n), r.matrix().clone())?;
    let e_t = standard_path(&m0, &DiracStructure::v_space(n), t)?;
    let path_residual = (orth_from_lag(&e_t)?.matrix() - &a_t).norm();

    Ok(SymplecticPathPoint {
        t,
        a_t,
        a_tilde,
        j,
        margin,
        min_sv_a,
        min_sv_tilde,
        halfplane_ok: margin >= -HALFPLANE_TOL,
        path_residual,
    })
}

/// `E_s = E_{exp(s·a)}`: `E_0 = V*`, `E_1 = E_{exp a}`.
pub fn exp_pullback_homotopy(a: &SkewPoint, s: f64) -> DiracStructure {
    lag_from_orth_matrix(&expm_skew(&(a.matrix() * s))).expect("exp of skew is orthogonal")
}

/// `dim(E_{A1} ∩ E_{A2})`.
pub fn intersection_dim(a1: &OrthogonalPoint, a2: &OrthogonalPoint) -> Result<usize> {
    Ok(lag_from_orth(a1)
        .subspace()
        .intersect(lag_from_orth(a2).subspace())?
        .dim())
}

/// `dim ker(A1 − A2)` by the same relative rank rule.
pub fn kernel_dim_difference(a1: &OrthogonalPoint, a2: &OrthogonalPoint) -> usize {
    Subspace::kernel_real(&(a1.matrix() - a2.matrix()), DEFAULT_TOL).dim()
}
