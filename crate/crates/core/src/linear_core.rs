//! Dense subspace and linear-relation calculus over `R` and `C`.
//!
//! Every subspace is held as an orthonormal frame. Rank decisions compare
//! singular values against `tol × σ_max`, so results do not depend on the
//! scale of the spanning vectors.

use nalgebra::{ComplexField, DMatrix};
use serde::{Deserialize, Serialize};

use crate::{CMat, Error, RMat, Result, C64};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

/// Singular values in descending order together with their original indices.
fn descending(values: &nalgebra::DVector<f64>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    order
}

fn numerical_rank(values: &nalgebra::DVector<f64>, order: &[usize], tol: f64) -> usize {
    let Some(&top) = order.first() else { return 0 };
    let smax = values[top];
    if !(smax > 0.0) {
        return 0;
    }
    order.iter().filter(|&&i| values[i] > tol * smax).count()
}

/// Column space of `m` keeping singular values above the absolute threshold `cut`.
fn range_basis_abs<T: ComplexField<RealField = f64>>(m: &DMatrix<T>, cut: f64) -> DMatrix<T> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return DMatrix::zeros(rows, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let order = descending(&svd.singular_values);
    let r = order.iter().filter(|&&i| svd.singular_values[i] > cut).count();
    DMatrix::from_fn(rows, r, |i, j| u[(i, order[j])].clone())
}

/// Orthonormal basis of the column space of `m`.
pub fn range_basis<T: ComplexField<RealField = f64>>(m: &DMatrix<T>, tol: f64) -> DMatrix<T> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return DMatrix::zeros(rows, 0);
    }
    // Left singular vectors of m are taken as right singular vectors of mᴴ: nalgebra's
    // U loses accuracy in directions with tiny singular values, Vᴴ does not.
    let svd = m.adjoint().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let order = descending(&svd.singular_values);
    let r = numerical_rank(&svd.singular_values, &order, tol);
    DMatrix::from_fn(rows, r, |i, j| v_t[(order[j], i)].clone().conjugate())
}

/// Orthonormal basis of `{x : m x = 0}`.
pub fn null_basis<T: ComplexField<RealField = f64>>(m: &DMatrix<T>, tol: f64) -> DMatrix<T> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    if rows == 0 {
        return DMatrix::identity(cols, cols);
    }
    // Thin SVD of a wide matrix drops part of the row space of Vᴴ; pad to square.
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.rows_mut(0, rows).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let order = descending(&svd.singular_values);
    let r = numerical_rank(&svd.singular_values, &order, tol);
    DMatrix::from_fn(cols, cols - r, |i, j| vt[(order[r + j], i)].clone().conjugate())
}

/// Numerical rank with the relative threshold `tol × σ_max`.
pub fn rank<T: ComplexField<RealField = f64>>(m: &DMatrix<T>, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().singular_values();
    let order = descending(&sv);
    numerical_rank(&sv, &order, tol)
}

/// Singular values in descending order.
pub fn singular_values<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Spectral norm (largest singular value); zero for empty matrices.
pub fn spectral_norm<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

pub fn real_part(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

/// Block-diagonal concatenation.
pub fn block_diag<T: ComplexField>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    let mut out = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    out
}

/// Horizontal concatenation `[a | b]`.
pub fn hstack<T: ComplexField>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    assert_eq!(a.nrows(), b.nrows(), "hstack row mismatch");
    let mut out = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

/// Vertical concatenation `[a; b]`.
pub fn vstack<T: ComplexField>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    assert_eq!(a.ncols(), b.ncols(), "vstack column mismatch");
    let mut out = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols());
    out.rows_mut(0, a.nrows()).copy_from(a);
    out.rows_mut(a.nrows(), b.nrows()).copy_from(b);
    out
}

fn span_in(field: Field, m: &CMat, tol: f64) -> CMat {
    match field {
        Field::Real => to_complex(&range_basis(&real_part(m), tol)),
        Field::Complex => range_basis(m, tol),
    }
}

fn null_in(field: Field, m: &CMat, tol: f64) -> CMat {
    match field {
        Field::Real => to_complex(&null_basis(&real_part(m), tol)),
        Field::Complex => null_basis(m, tol),
    }
}

/// A subspace of `R^d` or `C^d` held as an orthonormal frame.
///
/// Real subspaces keep an exactly real frame (zero imaginary parts) so they can
/// be passed to complex routines without conversion.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient_dim: usize,
    field: Field,
    frame: CMat,
    tol: f64,
}

impl Subspace {
    /// Span of the columns of a real matrix.
    pub fn span_real(m: &RMat, tol: f64) -> Self {
        Subspace {
            ambient_dim: m.nrows(),
            field: Field::Real,
            frame: to_complex(&range_basis(m, tol)),
            tol,
        }
    }

    /// Span of the columns of a complex matrix.
    pub fn span_complex(m: &CMat, tol: f64) -> Self {
        Subspace {
            ambient_dim: m.nrows(),
            field: Field::Complex,
            frame: range_basis(m, tol),
            tol,
        }
    }

    pub fn span(field: Field, m: &CMat, tol: f64) -> Self {
        Subspace {
            ambient_dim: m.nrows(),
            field,
            frame: span_in(field, m, tol),
            tol,
        }
    }

    pub fn zero(ambient_dim: usize, field: Field) -> Self {
        Subspace {
            ambient_dim,
            field,
            frame: CMat::zeros(ambient_dim, 0),
            tol: DEFAULT_TOL,
        }
    }

    pub fn full(ambient_dim: usize, field: Field) -> Self {
        Subspace {
            ambient_dim,
            field,
            frame: CMat::identity(ambient_dim, ambient_dim),
            tol: DEFAULT_TOL,
        }
    }

    /// Null space of a real matrix as a subspace of its domain.
    pub fn kernel_real(m: &RMat, tol: f64) -> Self {
        Subspace {
            ambient_dim: m.ncols(),
            field: Field::Real,
            frame: to_complex(&null_basis(m, tol)),
            tol,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn frame(&self) -> &CMat {
        &self.frame
    }

    /// Real part of the frame; exact for real subspaces.
    pub fn real_frame(&self) -> RMat {
        real_part(&self.frame)
    }

    /// Promote to a complex subspace with the same frame.
    pub fn to_complex(&self) -> Self {
        Subspace {
            field: Field::Complex,
            ..self.clone()
        }
    }

    pub fn projector(&self) -> CMat {
        &self.frame * self.frame.adjoint()
    }

    /// Deviation of the frame from orthonormality, `‖FᴴF − I‖`.
    pub fn orthonormality_residual(&self) -> f64 {
        let g = self.frame.adjoint() * &self.frame;
        (g - CMat::identity(self.dim(), self.dim())).norm()
    }

    fn check_compatible(&self, other: &Subspace, context: &'static str) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.ambient_dim,
                found: other.ambient_dim,
            });
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    /// Orthogonal complement for the standard (Hermitian) inner product.
    pub fn complement(&self) -> Self {
        let frame = if self.dim() == 0 {
            CMat::identity(self.ambient_dim, self.ambient_dim)
        } else {
            null_in(self.field, &self.frame.adjoint(), self.tol)
        };
        Subspace {
            frame,
            ..self.clone()
        }
    }

    /// `S1 ∩ S2 = (S1⊥ + S2⊥)⊥`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other, "intersect")?;
        let tol = self.tol.max(other.tol);
        let stacked = hstack(self.complement().frame(), other.complement().frame());
        let frame = if stacked.ncols() == 0 {
            CMat::identity(self.ambient_dim, self.ambient_dim)
        } else {
            null_in(self.field, &stacked.adjoint(), tol)
        };
        Ok(Subspace {
            ambient_dim: self.ambient_dim,
            field: self.field,
            frame,
            tol,
        })
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other, "sum")?;
        let tol = self.tol.max(other.tol);
        Ok(Subspace::span(self.field, &hstack(&self.frame, &other.frame), tol))
    }

    /// `S1 ⊕ S2` inside the concatenated ambient space.
    pub fn direct_sum(&self, other: &Subspace) -> Result<Subspace> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(Subspace {
            ambient_dim: self.ambient_dim + other.ambient_dim,
            field: self.field,
            frame: block_diag(&self.frame, &other.frame),
            tol: self.tol.max(other.tol),
        })
    }

    /// Largest principal angle; `π/2` when the dimensions differ.
    pub fn distance(&self, other: &Subspace) -> Result<f64> {
        self.check_compatible(other, "distance")?;
        if self.dim() != other.dim() {
            return Ok(std::f64::consts::FRAC_PI_2);
        }
        if self.dim() == 0 {
            return Ok(0.0);
        }
        // sin θ_max = ‖(I − P1) F2‖, accurate for small angles.
        let resid = &other.frame - &self.frame * (self.frame.adjoint() * &other.frame);
        let s = spectral_norm(&resid).min(1.0);
        Ok(s.asin())
    }

    /// Whether `other ⊆ self` up to the tolerance of `self`.
    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        self.check_compatible(other, "contains")?;
        if other.dim() == 0 {
            return Ok(true);
        }
        let resid = &other.frame - &self.frame * (self.frame.adjoint() * &other.frame);
        Ok(spectral_norm(&resid) <= self.tol.max(other.tol).sqrt())
    }

    /// Rows `start..start+len` of the frame, re-orthonormalized: the image
    /// under the coordinate projection onto that block.
    pub fn project_block(&self, start: usize, len: usize) -> Subspace {
        // Singular values of a block of an orthonormal frame lie in [0, 1], so the
        // rank cut is absolute: a block that is numerically zero has no image.
        let block = self.frame.rows(start, len).into_owned();
        let frame = match self.field {
            Field::Real => to_complex(&range_basis_abs(&real_part(&block), self.tol)),
            Field::Complex => range_basis_abs(&block, self.tol),
        };
        Subspace {
            ambient_dim: len,
            field: self.field,
            frame,
            tol: self.tol,
        }
    }
}

/// Symmetric bilinear pairing on a `dim`-dimensional space, given by its Gram matrix.
#[derive(Clone, Debug)]
pub struct BilinearPairing {
    gram: RMat,
}

impl BilinearPairing {
    pub fn new(gram: RMat) -> Result<Self> {
        if gram.nrows() != gram.ncols() {
            return Err(Error::DimensionMismatch {
                context: "pairing gram",
                expected: gram.nrows(),
                found: gram.ncols(),
            });
        }
        let asym = (&gram - gram.transpose()).norm();
        if asym > DEFAULT_TOL * gram.norm().max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "pairing gram is not symmetric (residual {asym:e})"
            )));
        }
        Ok(BilinearPairing { gram })
    }

    /// `⟨(v1, μ1), (v2, μ2)⟩ = μ1(v2) + μ2(v1)` on `V ⊕ V*`, `dim V = n`.
    pub fn canonical(n: usize) -> Self {
        let mut gram = RMat::zeros(2 * n, 2 * n);
        for i in 0..n {
            gram[(i, n + i)] = 1.0;
            gram[(n + i, i)] = 1.0;
        }
        BilinearPairing { gram }
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &RMat {
        &self.gram
    }

    /// Bilinear (not sesquilinear) evaluation `xᵀ G y`.
    pub fn eval(&self, x: &crate::CVec, y: &crate::CVec) -> C64 {
        (x.transpose() * to_complex(&self.gram) * y)[(0, 0)]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IsotropyCheck {
    pub isotropic: bool,
    pub residual: f64,
}

/// `‖Fᵀ G F‖_F ≤ tol` on the orthonormal frame `F` of `s`.
pub fn isotropic_check(s: &Subspace, p: &BilinearPairing) -> Result<IsotropyCheck> {
    if s.ambient_dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            context: "isotropic_check",
            expected: p.dim(),
            found: s.ambient_dim(),
        });
    }
    let f = s.frame();
    let residual = (f.transpose() * to_complex(p.gram()) * f).norm();
    Ok(IsotropyCheck {
        isotropic: residual <= s.tol(),
        residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

/// A linear relation stored as its graph in `source ⊕ target`.
#[derive(Clone, Debug)]
pub struct LinearRelation {
    source_dim: usize,
    target_dim: usize,
    graph: Subspace,
}

impl LinearRelation {
    pub fn new(source_dim: usize, target_dim: usize, graph: Subspace) -> Result<Self> {
        if graph.ambient_dim() != source_dim + target_dim {
            return Err(Error::DimensionMismatch {
                context: "relation graph",
                expected: source_dim + target_dim,
                found: graph.ambient_dim(),
            });
        }
        Ok(LinearRelation {
            source_dim,
            target_dim,
            graph,
        })
    }

    /// Graph of the linear map `x ↦ m x`.
    pub fn of_map(m: &RMat, tol: f64) -> Self {
        let basis = vstack(&RMat::identity(m.ncols(), m.ncols()), m);
        LinearRelation {
            source_dim: m.ncols(),
            target_dim: m.nrows(),
            graph: Subspace::span_real(&basis, tol),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::of_map(&RMat::identity(dim, dim), DEFAULT_TOL)
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn graph(&self) -> &Subspace {
        &self.graph
    }

    /// Image (forward) or preimage (backward) of `s` under the relation.
    pub fn apply(&self, s: &Subspace, direction: Direction) -> Result<Subspace> {
        let (own, other_dim, expected) = match direction {
            Direction::Forward => (self.source_dim, self.target_dim, self.source_dim),
            Direction::Backward => (self.target_dim, self.source_dim, self.target_dim),
        };
        if s.ambient_dim() != own {
            return Err(Error::DimensionMismatch {
                context: "relation_apply",
                expected,
                found: s.ambient_dim(),
            });
        }
        let field = self.graph.field();
        let s = if s.field() == field {
            s.clone()
        } else if field == Field::Complex {
            s.to_complex()
        } else {
            return Err(Error::FieldMismatch);
        };
        let full = Subspace::full(other_dim, field);
        let constraint = match direction {
            Direction::Forward => s.direct_sum(&full)?,
            Direction::Backward => full.direct_sum(&s)?,
        }
        .with_tol(self.graph.tol());
        let meet = self.graph.intersect(&constraint)?;
        Ok(match direction {
            Direction::Forward => meet.project_block(self.source_dim, self.target_dim),
            Direction::Backward => meet.project_block(0, self.source_dim),
        })
    }

    /// The range `{x' : ∃x, (x, x') ∈ graph}`.
    pub fn range(&self) -> Subspace {
        self.graph.project_block(self.source_dim, self.target_dim)
    }
}

pub fn relation_apply(r: &LinearRelation, s: &Subspace, direction: Direction) -> Result<Subspace> {
    r.apply(s, direction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn e(d: usize, i: usize) -> RMat {
        let mut m = RMat::zeros(d, 1);
        m[(i, 0)] = 1.0;
        m
    }

    #[test]
    fn intersect_idempotent_and_transverse() {
        let s1 = Subspace::span_real(&e(2, 0), DEFAULT_TOL);
        let s2 = Subspace::span_real(&e(2, 1), DEFAULT_TOL);
        let same = s1.intersect(&s1).unwrap();
        assert_eq!(same.dim(), 1);
        assert!(s1.distance(&same).unwrap() < 1e-12);
        assert_eq!(s1.intersect(&s2).unwrap().dim(), 0);
    }

    #[test]
    fn intersect_dimension_mismatch_is_an_error() {
        let s1 = Subspace::full(2, Field::Real);
        let s2 = Subspace::full(3, Field::Real);
        assert!(matches!(s1.intersect(&s2), Err(Error::DimensionMismatch { .. })));
        let c = Subspace::full(2, Field::Complex);
        assert!(matches!(s1.intersect(&c), Err(Error::FieldMismatch)));
    }

    #[test]
    fn zero_subspace_flows_through_every_operation() {
        let z = Subspace::zero(4, Field::Real);
        let f = Subspace::full(4, Field::Real);
        assert_eq!(z.intersect(&f).unwrap().dim(), 0);
        assert_eq!(z.sum(&f).unwrap().dim(), 4);
        assert_eq!(z.complement().dim(), 4);
        assert_eq!(f.complement().dim(), 0);
        assert_eq!(z.distance(&z).unwrap(), 0.0);
        assert!(f.contains(&z).unwrap());
        let r = LinearRelation::identity(4);
        assert_eq!(r.apply(&z, Direction::Forward).unwrap().dim(), 0);
    }

    #[test]
    fn canonical_pairing_examples() {
        let n = 3;
        let p = BilinearPairing::canonical(n);
        let mut v = RMat::zeros(2 * n, n);
        let mut vd = RMat::zeros(2 * n, n);
        for i in 0..n {
            v[(i, i)] = 1.0;
            vd[(n + i, i)] = 1.0;
        }
        let cv = isotropic_check(&Subspace::span_real(&v, DEFAULT_TOL), &p).unwrap();
        let cvd = isotropic_check(&Subspace::span_real(&vd, DEFAULT_TOL), &p).unwrap();
        assert!(cv.isotropic && cv.residual < 1e-15);
        assert!(cvd.isotropic && cvd.residual < 1e-15);
    }

    #[test]
    fn non_isotropic_line() {
        // (e1, ε1) pairs with itself to 2; the unit frame vector pairs to 1.
        let p = BilinearPairing::canonical(1);
        let x = crate::CVec::from_vec(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(close(p.eval(&x, &x).re, 2.0, 1e-15));
        let s = Subspace::span_real(&RMat::from_row_slice(2, 1, &[1.0, 1.0]), DEFAULT_TOL);
        let c = isotropic_check(&s, &p).unwrap();
        assert!(!c.isotropic);
        assert!(close(c.residual, 1.0, 1e-14));
    }

    #[test]
    fn relation_identity_and_zero_map() {
        let mut rng = random::rng(3);
        let s = Subspace::span_real(&random::gaussian(&mut rng, 5, 2), DEFAULT_TOL);
        let id = LinearRelation::identity(5);
        let img = id.apply(&s, Direction::Forward).unwrap();
        assert!(img.distance(&s).unwrap() < 1e-12);
        let zero = LinearRelation::of_map(&RMat::zeros(3, 5), DEFAULT_TOL);
        assert_eq!(zero.apply(&s, Direction::Forward).unwrap().dim(), 0);
        let pre = zero
            .apply(&Subspace::zero(3, Field::Real), Direction::Backward)
            .unwrap();
        assert_eq!(pre.dim(), 5);
    }

    #[test]
    fn complex_subspace_intersection() {
        let i = C64::new(0.0, 1.0);
        let one = C64::new(1.0, 0.0);
        let a = CMat::from_row_slice(2, 1, &[one, i]);
        let b = CMat::from_row_slice(2, 1, &[i, -one]);
        let sa = Subspace::span_complex(&a, DEFAULT_TOL);
        let sb = Subspace::span_complex(&b, DEFAULT_TOL);
        // b = i·a, so the complex lines coincide.
        assert_eq!(sa.intersect(&sb).unwrap().dim(), 1);
        assert!(sa.distance(&sb).unwrap() < 1e-12);
    }

    #[test]
    fn real_frames_stay_real() {
        let mut rng = random::rng(11);
        let s = Subspace::span_real(&random::gaussian(&mut rng, 6, 3), DEFAULT_TOL);
        let t = Subspace::span_real(&random::gaussian(&mut rng, 6, 4), DEFAULT_TOL);
        let m = s.intersect(&t).unwrap();
        assert_eq!(m.dim(), 1);
        assert!(m.frame().iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn rank_is_scale_invariant() {
        let mut rng = random::rng(5);
        let g = random::gaussian(&mut rng, 6, 3);
        let low = &g * random::gaussian(&mut rng, 3, 5);
        assert_eq!(rank(&low, DEFAULT_TOL), 3);
        assert_eq!(rank(&(low.clone() * 1e-12), DEFAULT_TOL), 3);
        assert_eq!(rank(&(low * 1e12), DEFAULT_TOL), 3);
    }

    #[test]
    fn null_basis_of_wide_matrix() {
        let m = RMat::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let k = null_basis(&m, DEFAULT_TOL);
        assert_eq!(k.ncols(), 2);
        assert!((&m * &k).norm() < 1e-14);
        assert!((k.transpose() * &k - RMat::identity(2, 2)).norm() < 1e-14);
    }
}
