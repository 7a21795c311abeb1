//! Seeded random instances. ChaCha8 keeps streams identical across platforms.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{CMat, RMat, C64};

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn uniform(rng: &mut Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

pub fn gaussian(rng: &mut Rng, rows: usize, cols: usize) -> RMat {
    RMat::from_fn(rows, cols, |_, _| normal(rng))
}

pub fn complex_gaussian(rng: &mut Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        C64::new(normal(rng), normal(rng)) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of `diag(R)` absorbed into `Q`.
pub fn orthogonal(rng: &mut Rng, n: usize) -> RMat {
    if n == 0 {
        return RMat::zeros(0, 0);
    }
    let qr = gaussian(rng, n, n).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

pub fn special_orthogonal(rng: &mut Rng, n: usize) -> RMat {
    let mut q = orthogonal(rng, n);
    if n > 0 && q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// Haar-distributed unitary matrix.
pub fn unitary(rng: &mut Rng, n: usize) -> CMat {
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    let qr = complex_gaussian(rng, n, n).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// `scale · (G − Gᵀ)/2` for a Gaussian `G`.
pub fn skew(rng: &mut Rng, n: usize, scale: f64) -> RMat {
    let g = gaussian(rng, n, n);
    (&g - g.transpose()) * (0.5 * scale)
}

/// `scale · (G − Gᴴ)/2` for a complex Gaussian `G`.
pub fn antihermitian(rng: &mut Rng, n: usize, scale: f64) -> CMat {
    let g = complex_gaussian(rng, n, n);
    (&g - g.adjoint()) * C64::new(0.5 * scale, 0.0)
}

/// `Q · diag(I_plus, −I_minus, R(θ_1), …) · Qᵀ` with Haar `Q`: an orthogonal
/// matrix with prescribed spectrum.
pub fn orthogonal_with_spectrum(rng: &mut Rng, plus: usize, minus: usize, angles: &[f64]) -> RMat {
    let n = plus + minus + 2 * angles.len();
    let mut d = RMat::zeros(n, n);
    for i in 0..plus {
        d[(i, i)] = 1.0;
    }
    for i in plus..plus + minus {
        d[(i, i)] = -1.0;
    }
    for (b, &t) in angles.iter().enumerate() {
        let i = plus + minus + 2 * b;
        d[(i, i)] = t.cos();
        d[(i, i + 1)] = -t.sin();
        d[(i + 1, i)] = t.sin();
        d[(i + 1, i + 1)] = t.cos();
    }
    let q = orthogonal(rng, n);
    &q * d * q.transpose()
}

/// `U · diag(i s_1, …, i s_d) · Uᴴ` with Haar `U` and `|s_j| ∈ [gap, gap + spread]`
/// of random sign: a skew-adjoint matrix whose spectrum stays `gap` away from 0.
pub fn antihermitian_with_gap(rng: &mut Rng, d: usize, gap: f64, spread: f64) -> CMat {
    let u = unitary(rng, d);
    let s = nalgebra::DVector::from_fn(d, |_, _| {
        let mag = gap + spread * rng.random::<f64>();
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        C64::new(0.0, sign * mag)
    });
    &u * CMat::from_diagonal(&s) * u.adjoint()
}
