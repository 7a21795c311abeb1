//! Linear Dirac structures on `𝕍 = V ⊕ V*` and Dirac morphisms `(Θ, ω)`.
//!
//! Coordinates on `𝕍` are `(v, α)` with `v` in the first `n` slots. A morphism
//! `(Θ, ω): 𝕍 ⇢ 𝕍′` relates `(v, α) ~ (v′, α′)` iff `v′ = Θv` and
//! `α = ι_vω + Θᵀα′`.

use serde::{Deserialize, Serialize};

use crate::linear_core::{
    block_diag, isotropic_check, spectral_norm, vstack, BilinearPairing, Direction, Field,
    LinearRelation, Subspace, DEFAULT_TOL,
};
use crate::{Error, RMat, Result};

/// Isotropy residual and principal-angle threshold used to certify results.
pub const CERT_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiracMorphism {
    #[serde(with = "crate::json::rmat")]
    theta: RMat,
    #[serde(with = "crate::json::rmat")]
    omega: RMat,
}

impl DiracMorphism {
    /// `theta` is `n′ × n`, `omega` the `n × n` Gram matrix of a 2-form on `V`.
    pub fn new(theta: RMat, omega: RMat) -> Result<Self> {
        let n = theta.ncols();
        if omega.nrows() != n || omega.ncols() != n {
            return Err(Error::DimensionMismatch {
                context: "morphism omega",
                expected: n,
                found: omega.nrows().max(omega.ncols()),
            });
        }
        let skew = (&omega + omega.transpose()).norm();
        if skew > DEFAULT_TOL * omega.norm().max(1.0) {
            return Err(Error::NotSkew(skew));
        }
        Ok(DiracMorphism { theta, omega })
    }

    pub fn identity(n: usize) -> Self {
        DiracMorphism {
            theta: RMat::identity(n, n),
            omega: RMat::zeros(n, n),
        }
    }

    /// Re-validate after deserialization.
    pub fn validated(self) -> Result<Self> {
        Self::new(self.theta, self.omega)
    }

    pub fn theta(&self) -> &RMat {
        &self.theta
    }

    pub fn omega(&self) -> &RMat {
        &self.omega
    }

    pub fn source_dim(&self) -> usize {
        self.theta.ncols()
    }

    pub fn target_dim(&self) -> usize {
        self.theta.nrows()
    }

    /// `(Θ′, ω′) ∘ (Θ, ω) = (Θ′Θ, ω + Θᵀω′Θ)`.
    pub fn compose(m2: &DiracMorphism, m1: &DiracMorphism) -> Result<DiracMorphism> {
        compose(m2, m1)
    }

    /// Product morphism `(Θ1 × Θ2, ω1 ⊕ ω2)`.
    pub fn product(&self, other: &DiracMorphism) -> DiracMorphism {
        DiracMorphism {
            theta: block_diag(&self.theta, &other.theta),
            omega: block_diag(&self.omega, &other.omega),
        }
    }
}

pub fn compose(m2: &DiracMorphism, m1: &DiracMorphism) -> Result<DiracMorphism> {
    if m2.source_dim() != m1.target_dim() {
        return Err(Error::DimensionMismatch {
            context: "compose",
            expected: m1.target_dim(),
            found: m2.source_dim(),
        });
    }
    let theta = &m2.theta * &m1.theta;
    let omega = &m1.omega + m1.theta.transpose() * &m2.omega * &m1.theta;
    // Exact antisymmetrization removes rounding asymmetry from the triple product.
    let omega = (&omega - omega.transpose()) * 0.5;
    Ok(DiracMorphism { theta, omega })
}

/// The relation `∼_{(Θ,ω)}` as a graph in `𝕍 ⊕ 𝕍′`, parametrized by `(v, α′)`.
pub fn morphism_relation(m: &DiracMorphism) -> LinearRelation {
    let (n, np) = (m.source_dim(), m.target_dim());
    let mut basis = RMat::zeros(2 * n + 2 * np, n + np);
    basis.view_mut((0, 0), (n, n)).copy_from(&RMat::identity(n, n));
    basis.view_mut((n, 0), (n, n)).copy_from(&m.omega.transpose());
    basis.view_mut((n, n), (n, np)).copy_from(&m.theta.transpose());
    basis.view_mut((2 * n, 0), (np, n)).copy_from(&m.theta);
    basis
        .view_mut((2 * n + np, n), (np, np))
        .copy_from(&RMat::identity(np, np));
    LinearRelation::new(2 * n, 2 * np, Subspace::span_real(&basis, DEFAULT_TOL))
        .expect("graph dimensions are consistent by construction")
}

/// `ker(Θ, ω) = {(v, ι_vω) : v ∈ ker Θ}`.
pub fn kernel_of(m: &DiracMorphism) -> Subspace {
    // Rank of Θ is judged on the scale of the whole morphism, as in its graph
    // [I; ωᵀ; Θ]; a uniformly tiny Θ (Π_a at a = 2π·J) has full kernel.
    let smax = spectral_norm(&m.theta);
    let scale = 1f64.max(smax).max(spectral_norm(&m.omega));
    let tol = if smax > 0.0 { DEFAULT_TOL * scale / smax } else { DEFAULT_TOL };
    let k = Subspace::kernel_real(&m.theta, tol).real_frame();
    let frame = vstack(&k, &(m.omega.transpose() * &k));
    Subspace::span_real(&frame, DEFAULT_TOL)
}

/// A Lagrangian subspace `E ⊂ V ⊕ V*`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiracStructure {
    n: usize,
    #[serde(rename = "E")]
    e: Subspace,
}

impl DiracStructure {
    /// Certifies dimension `n` and isotropy (residual ≤ [`CERT_TOL`]).
    pub fn new(n: usize, e: Subspace) -> Result<Self> {
        if e.ambient_dim() != 2 * n {
            return Err(Error::DimensionMismatch {
                context: "Dirac structure ambient",
                expected: 2 * n,
                found: e.ambient_dim(),
            });
        }
        if e.field() != Field::Real {
            return Err(Error::FieldMismatch);
        }
        let iso = isotropic_check(&e, &BilinearPairing::canonical(n))?;
        if e.dim() != n || iso.residual > CERT_TOL {
            return Err(Error::NonLagrangianResult {
                dim: e.dim(),
                expected: n,
                residual: iso.residual,
            });
        }
        Ok(DiracStructure { n, e })
    }

    /// Span of the columns of a `2n × k` real matrix.
    pub fn from_frame(frame: &RMat) -> Result<Self> {
        if frame.nrows() % 2 != 0 {
            return Err(Error::InvalidParameter("odd ambient dimension".into()));
        }
        Self::new(frame.nrows() / 2, Subspace::span_real(frame, DEFAULT_TOL))
    }

    /// Re-certify after deserialization.
    pub fn validated(self) -> Result<Self> {
        Self::new(self.n, self.e)
    }

    /// `E = V = V ⊕ 0`.
    pub fn v_space(n: usize) -> Self {
        let frame = vstack(&RMat::identity(n, n), &RMat::zeros(n, n));
        DiracStructure {
            n,
            e: Subspace::span_real(&frame, DEFAULT_TOL),
        }
    }

    /// `E = V* = 0 ⊕ V*`.
    pub fn v_dual(n: usize) -> Self {
        let frame = vstack(&RMat::zeros(n, n), &RMat::identity(n, n));
        DiracStructure {
            n,
            e: Subspace::span_real(&frame, DEFAULT_TOL),
        }
    }

    /// Graph of a 2-form: `{(v, ι_vω)}`.
    pub fn graph_of_form(omega: &RMat) -> Result<Self> {
        let n = omega.nrows();
        Self::new(
            n,
            Subspace::span_real(&vstack(&RMat::identity(n, n), &omega.transpose()), DEFAULT_TOL),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn subspace(&self) -> &Subspace {
        &self.e
    }

    pub fn pairing(&self) -> BilinearPairing {
        BilinearPairing::canonical(self.n)
    }

    /// Real frame split as `(X, Y)`: the `V` rows and the `V*` rows.
    pub fn blocks(&self) -> (RMat, RMat) {
        let f = self.e.real_frame();
        (
            f.rows(0, self.n).into_owned(),
            f.rows(self.n, self.n).into_owned(),
        )
    }

    pub fn isotropy_residual(&self) -> f64 {
        isotropic_check(&self.e, &self.pairing())
            .map(|c| c.residual)
            .unwrap_or(f64::INFINITY)
    }

    /// Largest principal angle to another structure on the same space.
    pub fn distance(&self, other: &DiracStructure) -> Result<f64> {
        self.e.distance(&other.e)
    }

    /// `E1 ⊕ E2 ⊂ (V1 ⊕ V2) ⊕ (V1 ⊕ V2)*`, coordinates reordered to `(v1, v2, α1, α2)`.
    pub fn direct_sum(&self, other: &DiracStructure) -> DiracStructure {
        let (x1, y1) = self.blocks();
        let (x2, y2) = other.blocks();
        let frame = vstack(&block_diag(&x1, &x2), &block_diag(&y1, &y2));
        DiracStructure {
            n: self.n + other.n,
            e: Subspace::span_real(&frame, DEFAULT_TOL),
        }
    }

    /// `E ∩ V`.
    pub fn meet_v(&self) -> Subspace {
        self.e
            .intersect(DiracStructure::v_space(self.n).subspace())
            .expect("same ambient space")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(k: usize) -> Self {
        if k % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Parity of `dim(E ∩ V)`; the rank decision of [`Subspace::intersect`] is authoritative.
pub fn parity(d: &DiracStructure) -> Parity {
    Parity::of(d.meet_v().dim())
}

fn check_source(m: &DiracMorphism, d: &DiracStructure) -> Result<()> {
    if m.source_dim() != d.n() {
        return Err(Error::DimensionMismatch {
            context: "morphism source",
            expected: d.n(),
            found: m.source_dim(),
        });
    }
    Ok(())
}

/// Certified forward image of `E`.
pub fn forward_image(m: &DiracMorphism, d: &DiracStructure) -> Result<DiracStructure> {
    check_source(m, d)?;
    let img = morphism_relation(m).apply(d.subspace(), Direction::Forward)?;
    DiracStructure::new(m.target_dim(), img)
}

/// Backward image of a structure on the target.
pub fn backward_image(m: &DiracMorphism, d: &DiracStructure) -> Result<DiracStructure> {
    if m.target_dim() != d.n() {
        return Err(Error::DimensionMismatch {
            context: "morphism target",
            expected: d.n(),
            found: m.target_dim(),
        });
    }
    let img = morphism_relation(m).apply(d.subspace(), Direction::Backward)?;
    DiracStructure::new(m.source_dim(), img)
}

/// `E ∩ ker(Θ, ω) = 0`.
pub fn is_strong(m: &DiracMorphism, d: &DiracStructure) -> Result<bool> {
    check_source(m, d)?;
    Ok(d.subspace().intersect(&kernel_of(m))?.is_zero())
}

/// `j_t(v) = ((1 − t)v, tΘv)`, `ω_t = tω`, as a morphism `V → V ⊕ V′`.
pub fn standard_path_morphism(m: &DiracMorphism, t: f64) -> DiracMorphism {
    let n = m.source_dim();
    DiracMorphism {
        theta: vstack(&(RMat::identity(n, n) * (1.0 - t)), &(m.theta() * t)),
        omega: m.omega() * t,
    }
}

/// `E_t`: forward image of `E` under `(j_t, ω_t)`; `E_0 = E ⊕ (V′)*`, `E_1 = V* ⊕ E′`.
pub fn standard_path(m: &DiracMorphism, d: &DiracStructure, t: f64) -> Result<DiracStructure> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("t = {t} outside [0, 1]")));
    }
    if !is_strong(m, d)? {
        return Err(Error::NotStrong);
    }
    forward_image(&standard_path_morphism(m, t), d)
}

/// `j_{tt′}(v) = ((1 − t − t′)v, tΘv, t′Θ′Θv)`, `ω_{tt′} = tω + t′(ω + Θᵀω′Θ)`.
pub fn two_param_path_morphism(m1: &DiracMorphism, m2: &DiracMorphism, t: f64, tp: f64) -> Result<DiracMorphism> {
    let n = m1.source_dim();
    let c = compose(m2, m1)?;
    let theta = vstack(
        &vstack(&(RMat::identity(n, n) * (1.0 - t - tp)), &(m1.theta() * t)),
        &(c.theta() * tp),
    );
    let omega = m1.omega() * t + c.omega() * tp;
    Ok(DiracMorphism { theta, omega })
}

pub fn two_param_path(
    m1: &DiracMorphism,
    m2: &DiracMorphism,
    d: &DiracStructure,
    t: f64,
    tp: f64,
) -> Result<DiracStructure> {
    if t < 0.0 || tp < 0.0 || t + tp > 1.0 + 1e-15 {
        return Err(Error::InvalidParameter(format!(
            "(t, t′) = ({t}, {tp}) outside the simplex"
        )));
    }
    if !is_strong(m1, d)? {
        return Err(Error::NotStrong);
    }
    let mid = forward_image(m1, d)?;
    if !is_strong(m2, &mid)? {
        return Err(Error::NotStrong);
    }
    forward_image(&two_param_path_morphism(m1, m2, t, tp)?, d)
}

/// `j̃_t = (t² + (1 − t)²)^{−1/2} j_t` for `m = (id, 0)`.
pub fn normalized_path(d: &DiracStructure, t: f64) -> Result<DiracStructure> {
    let n = d.n();
    let c = 1.0 / (t * t + (1.0 - t) * (1.0 - t)).sqrt();
    let m = DiracMorphism {
        theta: vstack(
            &(RMat::identity(n, n) * ((1.0 - t) * c)),
            &(RMat::identity(n, n) * (t * c)),
        ),
        omega: RMat::zeros(n, n),
    };
    forward_image(&m, d)
}

/// `(0, 0): V → 0` as a morphism, used for `V′ = 0` examples.
pub fn to_point(n: usize) -> DiracMorphism {
    DiracMorphism {
        theta: RMat::zeros(0, n),
        omega: RMat::zeros(n, n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    fn omega_std() -> RMat {
        RMat::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])
    }

    #[test]
    fn compose_identities_and_zero() {
        let id = DiracMorphism::identity(3);
        let c = compose(&id, &id).unwrap();
        assert_eq!(c.theta(), &RMat::identity(3, 3));
        assert_eq!(c.omega(), &RMat::zeros(3, 3));

        let mut rng = random::rng(1);
        let m = DiracMorphism::new(random::gaussian(&mut rng, 4, 3), random::skew(&mut rng, 3, 1.0)).unwrap();
        let zero = DiracMorphism::new(RMat::zeros(2, 4), RMat::zeros(4, 4)).unwrap();
        let c = compose(&zero, &m).unwrap();
        assert_eq!(c.theta(), &RMat::zeros(2, 3));
        assert!((c.omega() - m.omega()).norm() < 1e-15);
    }

    #[test]
    fn compose_is_associative() {
        let mut rng = random::rng(2);
        let dims = [3, 4, 2, 5];
        let ms: Vec<DiracMorphism> = (0..3)
            .map(|i| {
                DiracMorphism::new(
                    random::gaussian(&mut rng, dims[i + 1], dims[i]),
                    random::skew(&mut rng, dims[i], 1.0),
                )
                .unwrap()
            })
            .collect();
        let left = compose(&ms[2], &compose(&ms[1], &ms[0]).unwrap()).unwrap();
        let right = compose(&compose(&ms[2], &ms[1]).unwrap(), &ms[0]).unwrap();
        assert!((left.theta() - right.theta()).norm() < 1e-12);
        assert!((left.omega() - right.omega()).norm() < 1e-12);
    }

    #[test]
    fn compose_dimension_mismatch() {
        let a = DiracMorphism::identity(2);
        let b = DiracMorphism::identity(3);
        assert!(matches!(compose(&a, &b), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(
            DiracMorphism::new(RMat::identity(2, 2), RMat::identity(2, 2)),
            Err(Error::NotSkew(_))
        ));
    }

    #[test]
    fn relation_of_identity_is_identity() {
        let r = morphism_relation(&DiracMorphism::identity(2));
        let id = LinearRelation::identity(4);
        assert!(r.graph().distance(id.graph()).unwrap() < 1e-14);
    }

    #[test]
    fn relation_to_point() {
        let r = morphism_relation(&to_point(3));
        assert_eq!(r.graph().dim(), 3);
        assert_eq!(r.target_dim(), 0);
        // ((v, 0), ()) are the members.
        let vs = DiracStructure::v_space(3);
        assert!(r.graph().contains(vs.subspace()).unwrap());
    }

    #[test]
    fn relation_membership_spot_check() {
        let m = DiracMorphism::new(RMat::identity(2, 2), omega_std()).unwrap();
        let r = morphism_relation(&m);
        assert_eq!(r.graph().dim(), 4);
        // ((e1, ι_{e1}ω), (e1, 0)) with ι_{e1}ω = ωᵀe1 = (0, 1).
        let x = RMat::from_column_slice(8, 1, &[1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
        let s = Subspace::span_real(&x, DEFAULT_TOL);
        assert!(r.graph().contains(&s).unwrap());
    }

    #[test]
    fn forward_image_of_v_under_symplectic_identity() {
        // Independent derivation: v′ = v and 0 = ι_vω + α′, so α′ = −ωᵀv.
        let m = DiracMorphism::new(RMat::identity(2, 2), omega_std()).unwrap();
        let img = forward_image(&m, &DiracStructure::v_space(2)).unwrap();
        let want = vstack(&RMat::identity(2, 2), &(-omega_std().transpose()));
        let want = Subspace::span_real(&want, DEFAULT_TOL);
        assert!(img.subspace().distance(&want).unwrap() < 1e-14);
    }

    #[test]
    fn forward_image_of_v_dual_is_v_dual() {
        let mut rng = random::rng(4);
        for (n, np) in [(3, 2), (2, 5), (4, 4)] {
            let m = DiracMorphism::new(random::gaussian(&mut rng, np, n), random::skew(&mut rng, n, 1.0)).unwrap();
            let img = forward_image(&m, &DiracStructure::v_dual(n)).unwrap();
            assert!(img.distance(&DiracStructure::v_dual(np)).unwrap() < 1e-12);
        }
    }

    #[test]
    fn forward_image_into_point() {
        let m = DiracMorphism::new(RMat::zeros(0, 2), omega_std()).unwrap();
        let img = forward_image(&m, &DiracStructure::v_space(2)).unwrap();
        assert_eq!(img.n(), 0);
        assert_eq!(img.subspace().dim(), 0);
    }

    #[test]
    fn kernel_examples() {
        let w = omega_std();
        assert!(kernel_of(&DiracMorphism::new(RMat::identity(2, 2), w.clone()).unwrap()).is_zero());
        let k = kernel_of(&DiracMorphism::new(RMat::zeros(0, 2), w.clone()).unwrap());
        assert_eq!(k.dim(), 2);
        let theta = RMat::from_row_slice(1, 2, &[1.0, 1.0]);
        let k = kernel_of(&DiracMorphism::new(theta, RMat::zeros(2, 2)).unwrap());
        assert_eq!(k.dim(), 1);
        let f = k.real_frame();
        assert!((f[(0, 0)] + f[(1, 0)]).abs() < 1e-14);
        assert!(f.rows(2, 2).norm() < 1e-14);
    }

    #[test]
    fn strongness_examples() {
        let v = DiracStructure::v_space(2);
        let nondeg = DiracMorphism::new(RMat::zeros(0, 2), omega_std()).unwrap();
        assert!(is_strong(&nondeg, &v).unwrap());
        let zero = to_point(2);
        assert!(!is_strong(&zero, &v).unwrap());
        assert!(is_strong(&zero, &DiracStructure::v_dual(2)).unwrap());
    }

    #[test]
    fn parity_examples() {
        assert_eq!(parity(&DiracStructure::v_space(3)), Parity::Odd);
        assert_eq!(parity(&DiracStructure::v_dual(3)), Parity::Even);
    }

    #[test]
    fn non_lagrangian_input_rejected() {
        let f = RMat::from_row_slice(2, 1, &[1.0, 1.0]);
        assert!(matches!(
            DiracStructure::from_frame(&f),
            Err(Error::NonLagrangianResult { .. })
        ));
    }

    fn random_strong(rng: &mut random::Rng, n: usize, np: usize) -> (DiracMorphism, DiracStructure) {
        loop {
            let a = random::orthogonal(rng, n);
            let d = crate::orthogonal_bridge::lag_from_orth_matrix(&a).unwrap();
            let m = DiracMorphism::new(random::gaussian(rng, np, n), random::skew(rng, n, 1.0)).unwrap();
            if is_strong(&m, &d).unwrap() {
                return (m, d);
            }
        }
    }

    #[test]
    fn standard_path_endpoints() {
        let mut rng = random::rng(7);
        let (m, d) = random_strong(&mut rng, 3, 2);
        let e0 = standard_path(&m, &d, 0.0).unwrap();
        let want0 = d.direct_sum(&DiracStructure::v_dual(2));
        assert!(e0.distance(&want0).unwrap() < 1e-10);
        let e1 = standard_path(&m, &d, 1.0).unwrap();
        let want1 = DiracStructure::v_dual(3).direct_sum(&forward_image(&m, &d).unwrap());
        assert!(e1.distance(&want1).unwrap() < 1e-10);
    }

    #[test]
    fn standard_path_requires_strong() {
        let zero = to_point(2);
        assert!(matches!(
            standard_path(&zero, &DiracStructure::v_space(2), 0.5),
            Err(Error::NotStrong)
        ));
    }

    #[test]
    fn standard_path_is_continuous() {
        let mut rng = random::rng(8);
        for (n, np) in [(2, 3), (4, 2), (5, 5)] {
            let (m, d) = random_strong(&mut rng, n, np);
            let mut prev = standard_path(&m, &d, 0.0).unwrap();
            let mut worst: f64 = 0.0;
            for i in 1..100 {
                let cur = standard_path(&m, &d, i as f64 / 99.0).unwrap();
                worst = worst.max(prev.distance(&cur).unwrap());
                prev = cur;
            }
            assert!(worst < 0.2, "gap {worst}");
        }
    }

    #[test]
    fn kernel_of_path_morphism_vanishes_before_one() {
        let mut rng = random::rng(9);
        let (m, _) = random_strong(&mut rng, 3, 1);
        for &t in &[0.0, 0.3, 0.9] {
            assert!(kernel_of(&standard_path_morphism(&m, t)).is_zero());
        }
        let k1 = kernel_of(&standard_path_morphism(&m, 1.0));
        assert_eq!(k1.dim(), kernel_of(&m).dim());
    }

    #[test]
    fn two_param_corners_and_edge() {
        let mut rng = random::rng(10);
        let (m1, d) = random_strong(&mut rng, 3, 2);
        let mid = forward_image(&m1, &d).unwrap();
        let m2 = loop {
            let m2 = DiracMorphism::new(random::gaussian(&mut rng, 2, 2), random::skew(&mut rng, 2, 1.0)).unwrap();
            if is_strong(&m2, &mid).unwrap() {
                break m2;
            }
        };
        let last = forward_image(&m2, &mid).unwrap();
        let (v1d, v2d) = (DiracStructure::v_dual(2), DiracStructure::v_dual(2));
        let e00 = two_param_path(&m1, &m2, &d, 0.0, 0.0).unwrap();
        assert!(e00.distance(&d.direct_sum(&v1d).direct_sum(&v2d)).unwrap() < 1e-10);
        let e10 = two_param_path(&m1, &m2, &d, 1.0, 0.0).unwrap();
        let want10 = DiracStructure::v_dual(3).direct_sum(&mid).direct_sum(&v2d);
        assert!(e10.distance(&want10).unwrap() < 1e-10);
        let e01 = two_param_path(&m1, &m2, &d, 0.0, 1.0).unwrap();
        let want01 = DiracStructure::v_dual(3).direct_sum(&v1d).direct_sum(&last);
        assert!(e01.distance(&want01).unwrap() < 1e-10);
        for &s in &[0.0, 0.25, 0.5, 0.75, 1.0] {
            let es0 = two_param_path(&m1, &m2, &d, s, 0.0).unwrap();
            let edge = standard_path(&m1, &d, s).unwrap().direct_sum(&v2d);
            assert!(es0.distance(&edge).unwrap() < 1e-10, "s = {s}");
        }
        assert!(matches!(
            two_param_path(&m1, &m2, &d, 0.7, 0.7),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn normalized_path_endpoints_and_midpoint() {
        let mut rng = random::rng(12);
        let a = random::orthogonal(&mut rng, 3);
        let d = crate::orthogonal_bridge::lag_from_orth_matrix(&a).unwrap();
        let vd = DiracStructure::v_dual(3);
        assert!(normalized_path(&d, 0.0).unwrap().distance(&d.direct_sum(&vd)).unwrap() < 1e-10);
        assert!(normalized_path(&d, 1.0).unwrap().distance(&vd.direct_sum(&d)).unwrap() < 1e-10);
        let half = normalized_path(&d, 0.5).unwrap();
        assert_eq!(half.n(), 6);
        assert!(half.isotropy_residual() < 1e-12);
        // Endpoints agree with the standard path of (id, 0).
        let id = DiracMorphism::identity(3);
        assert!(normalized_path(&d, 1.0).unwrap().distance(&standard_path(&id, &d, 1.0).unwrap()).unwrap() < 1e-10);
    }
}
