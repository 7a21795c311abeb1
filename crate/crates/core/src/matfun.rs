//! Functions of normal matrices through unitary diagonalization.
//!
//! A real skew `a` is normal with imaginary spectrum; `i·a` is Hermitian, so
//! `f(a) = U f(−iΛ) Uᴴ` from the Hermitian eigendecomposition `i·a = U Λ Uᴴ`.

use nalgebra::SymmetricEigen;

use crate::linear_core::{real_part, to_complex};
use crate::{CMat, RMat, C64};

/// Below this modulus the removable singularities use their Taylor series.
pub const SERIES_CUTOFF: f64 = 1e-2;

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(h: &CMat) -> (Vec<f64>, CMat) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMat::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

/// `f(a)` for an anti-Hermitian `a` (eigenvalues `z = −iλ` of `a = −i·(i a)`).
pub fn antihermitian_function(a: &CMat, f: impl Fn(C64) -> C64) -> CMat {
    let n = a.nrows();
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    let h = a * C64::new(0.0, 1.0);
    let (vals, u) = hermitian_eigen(&h);
    let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        vals.iter().map(|&l| f(C64::new(0.0, -l))),
    ));
    &u * d * u.adjoint()
}

/// `f(a)` for a real skew `a`; `f` must map conjugate pairs to conjugate
/// pairs so the result is real.
pub fn skew_function(a: &RMat, f: impl Fn(C64) -> C64) -> RMat {
    real_part(&antihermitian_function(&to_complex(a), f))
}

pub fn expm_skew(a: &RMat) -> RMat {
    skew_function(a, |z| z.exp())
}

pub fn expm_antihermitian(a: &CMat) -> CMat {
    antihermitian_function(a, |z| z.exp())
}

/// `(1 − e^{−z})/z`, equal to 1 at 0.
pub fn dexp_factor(z: C64) -> C64 {
    if z.norm() < SERIES_CUTOFF {
        // Σ (−z)^k / (k+1)!, truncated where the next term is below 1e-18.
        let mut term = C64::new(1.0, 0.0);
        let mut sum = term;
        for k in 1..8 {
            term = -term * z / (k as f64 + 1.0);
            sum += term;
        }
        sum
    } else {
        (C64::new(1.0, 0.0) - (-z).exp()) / z
    }
}

/// `(z − sinh z)/z²`, odd, equal to 0 at 0.
pub fn varpi_factor(z: C64) -> C64 {
    if z.norm() < SERIES_CUTOFF {
        // −Σ z^{2k+1} / (2k+3)!
        let z2 = z * z;
        let mut term = z / 6.0;
        let mut sum = term;
        for k in 1..5 {
            term = term * z2 / ((2 * k + 2) as f64 * (2 * k + 3) as f64);
            sum += term;
        }
        -sum
    } else {
        (z - z.sinh()) / (z * z)
    }
}

/// `z/|z|`, the phase; used for `R|R|⁻¹`.
pub fn phase(z: C64) -> C64 {
    if z.norm() == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        z / z.norm()
    }
}
