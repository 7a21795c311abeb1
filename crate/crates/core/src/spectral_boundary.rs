//! Boundary operators `D_A = d/dt` on `L²([0,1], Cⁿ)` with `f(1) = −A f(0)`.
//!
//! `D_A` is skew-adjoint with eigenfunctions `φ_k^{(r)}(t) = e^{2πi(λ_r + k − ½)t} v_r`
//! where `A v_r = e^{2πiλ_r} v_r`. The finite-difference model is the centered
//! stencil on midpoints `t_j = (j + ½)/N` with the boundary condition entering
//! only through the wrap blocks, which keeps the matrix exactly skew-adjoint.
//!
//! The assembled matrix is block-diagonalized exactly by a unitary change of
//! basis: the eigenbasis of `A` splits it into `n` scalar channels, and in each
//! channel a diagonal phase gauge turns the twisted stencil into a circulant,
//! diagonalized by the DFT. Spectra and functions of the discretization are
//! evaluated through that factorization; [`DiscretizedOperator::dense`] keeps
//! the assembled matrix available for cross-checks.
//!
//! The centered stencil carries a doubler branch: every channel also has modes
//! near `θ = π` whose eigenvalues `i·sin θ/h` are small although they do not
//! approximate any eigenvalue of `D_A`. A mode `e^{iθj}` is *physical* when the
//! twisted average `(f_j + f_{j+1})/2` keeps more than half of its squared norm,
//! i.e. `cos θ > 0`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::Schur;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::linear_core::{singular_values, spectral_norm, to_complex, DEFAULT_TOL};
use crate::matfun::{expm_antihermitian, hermitian_eigen};
use crate::random::{self, Rng};
use crate::{CMat, CVec, Error, RMat, Result, C64};

/// Unitarity residual accepted for boundary matrices and gauge paths.
pub const UNITARY_TOL: f64 = 1e-8;
/// Smallest grid accepted by [`discretize`].
pub const MIN_GRID: usize = 8;
/// Discrete kernel threshold in units of `2πN`.
pub const KERNEL_EPS: f64 = 1e-6;

fn unitarity_residual(a: &CMat) -> f64 {
    (a.adjoint() * a - CMat::identity(a.nrows(), a.ncols())).norm()
}

fn check_square(a: &CMat, context: &'static str) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            context,
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryField {
    RealOrthogonal,
    ComplexUnitary,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryOperator {
    n: usize,
    #[serde(rename = "A", with = "crate::json::cmat")]
    a: CMat,
    field: BoundaryField,
}

impl BoundaryOperator {
    pub fn new(a: CMat) -> Result<Self> {
        check_square(&a, "boundary matrix")?;
        let resid = unitarity_residual(&a);
        if resid > UNITARY_TOL {
            return Err(Error::NotUnitary(resid));
        }
        Ok(BoundaryOperator {
            n: a.nrows(),
            a,
            field: BoundaryField::ComplexUnitary,
        })
    }

    pub fn real(a: &RMat) -> Result<Self> {
        let c = to_complex(a);
        check_square(&c, "boundary matrix")?;
        let resid = unitarity_residual(&c);
        if resid > UNITARY_TOL {
            return Err(Error::NotOrthogonal(resid));
        }
        Ok(BoundaryOperator {
            n: c.nrows(),
            a: c,
            field: BoundaryField::RealOrthogonal,
        })
    }

    /// The scalar case `A = e^{2πiλ}`.
    pub fn scalar(lambda: f64) -> Self {
        let z = C64::from_polar(1.0, 2.0 * PI * lambda);
        BoundaryOperator::new(CMat::from_element(1, 1, z)).expect("unit scalar is unitary")
    }

    pub fn identity(n: usize) -> Self {
        BoundaryOperator::real(&RMat::identity(n, n)).expect("identity is orthogonal")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMat {
        &self.a
    }

    pub fn field(&self) -> BoundaryField {
        self.field
    }

    /// `exp(a)·A` for anti-Hermitian `a`.
    pub fn perturbed(&self, a: &CMat) -> Result<Self> {
        check_square(a, "perturbation")?;
        if a.nrows() != self.n {
            return Err(Error::DimensionMismatch {
                context: "perturbation",
                expected: self.n,
                found: a.nrows(),
            });
        }
        let skew = (a + a.adjoint()).norm();
        if skew > DEFAULT_TOL * a.norm().max(1.0) {
            return Err(Error::NotSkew(skew));
        }
        BoundaryOperator::new(expm_antihermitian(a) * &self.a)
    }

    pub fn spectrum(&self) -> AnalyticSpectrum {
        AnalyticSpectrum::of(&self.a, DEFAULT_TOL)
    }

    pub fn kernel_dim(&self) -> usize {
        kernel_dim(self)
    }
}

/// `λ_r ∈ [0, 1)` with `A v_r = e^{2πiλ_r} v_r` and a unitary eigenbasis.
#[derive(Clone, Debug, Serialize)]
pub struct AnalyticSpectrum {
    pub lambdas: Vec<f64>,
    #[serde(with = "crate::json::cmat")]
    pub vectors: CMat,
}

/// Reduces `x` to `[0, 1)`, snapping values within `tol` of `½` to `½` and of
/// `0 ≡ 1` to `0`.
pub fn canonical_lambda(x: f64, tol: f64) -> f64 {
    let mut l = x.rem_euclid(1.0);
    if (l - 0.5).abs() <= tol {
        l = 0.5;
    }
    if l < tol || l > 1.0 - tol {
        l = 0.0;
    }
    l
}

impl AnalyticSpectrum {
    /// Complex Schur form of the unitary `a`; being normal, its triangular
    /// factor is diagonal and the Schur vectors are eigenvectors.
    pub fn of(a: &CMat, tol: f64) -> Self {
        let n = a.nrows();
        if n == 0 {
            return AnalyticSpectrum {
                lambdas: Vec::new(),
                vectors: CMat::zeros(0, 0),
            };
        }
        let (q, t) = Schur::new(a.clone()).unpack();
        let lambdas = (0..n)
            .map(|r| canonical_lambda(t[(r, r)].arg() / (2.0 * PI), tol))
            .collect();
        AnalyticSpectrum { lambdas, vectors: q }
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    /// `max_r ‖A v_r − e^{2πiλ_r} v_r‖`.
    pub fn residual(&self, a: &CMat) -> f64 {
        (0..self.n())
            .map(|r| {
                let v = self.vectors.column(r);
                (a * v - v * C64::from_polar(1.0, 2.0 * PI * self.lambdas[r])).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// An eigenvalue `i·value` of `D_A` with its descriptor `(λ, v_channel, k)`.
#[derive(Clone, Debug, Serialize)]
pub struct Eigenmode {
    /// Imaginary part `2π(λ + k − ½)`.
    pub value: f64,
    pub lambda: f64,
    pub channel: usize,
    pub k: i64,
}

pub fn analytic_spectrum(b: &BoundaryOperator, k_min: i64, k_max: i64) -> Vec<Eigenmode> {
    let spec = b.spectrum();
    let mut modes: Vec<Eigenmode> = (k_min..=k_max)
        .flat_map(|k| {
            spec.lambdas.iter().enumerate().map(move |(r, &lambda)| Eigenmode {
                value: 2.0 * PI * (lambda + k as f64 - 0.5),
                lambda,
                channel: r,
                k,
            })
        })
        .collect();
    modes.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.channel.cmp(&b.channel)));
    modes
}

/// `dim ker(A + I)` by the relative rank rule.
pub fn kernel_dim(b: &BoundaryOperator) -> usize {
    // A is unitary, so the cut on A + I is absolute: a relative rank test would
    // call a lone rounding residue like 1e-16·i full rank.
    let m = &b.a + CMat::identity(b.n, b.n);
    singular_values(&m).iter().filter(|&&s| s <= DEFAULT_TOL).count()
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscreteMode {
    /// Imaginary part of the eigenvalue, `sin θ / h`.
    pub value: f64,
    pub channel: usize,
    /// Continuum label: `θ ≈ 2π(λ + k − ½)/N`.
    pub k: i64,
    /// Representative of the mode's phase step in `(−π, π]`.
    pub theta: f64,
    pub physical: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscretizedOperator {
    boundary: BoundaryOperator,
    grid: usize,
    h: f64,
    #[serde(skip)]
    spectrum: AnalyticSpectrum,
}

pub fn discretize(b: &BoundaryOperator, grid: usize) -> Result<DiscretizedOperator> {
    if grid < MIN_GRID {
        return Err(Error::InvalidParameter(format!(
            "grid size {grid} below the minimum {MIN_GRID}"
        )));
    }
    Ok(DiscretizedOperator {
        boundary: b.clone(),
        grid,
        h: 1.0 / grid as f64,
        spectrum: b.spectrum(),
    })
}

fn wrap_phase(theta: f64) -> f64 {
    let t = theta - 2.0 * PI * (theta / (2.0 * PI)).round();
    if t <= -PI {
        t + 2.0 * PI
    } else {
        t
    }
}

impl DiscretizedOperator {
    pub fn boundary(&self) -> &BoundaryOperator {
        &self.boundary
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn dim(&self) -> usize {
        self.boundary.n * self.grid
    }

    pub fn grid_points(&self) -> Vec<f64> {
        (0..self.grid).map(|j| (j as f64 + 0.5) * self.h).collect()
    }

    /// The assembled `nN × nN` matrix; block `(j, k)` couples `f_j` and `f_k`.
    pub fn dense(&self) -> CMat {
        let (n, nn) = (self.boundary.n, self.grid);
        let w = C64::new(0.5 / self.h, 0.0);
        let mut m = CMat::zeros(n * nn, n * nn);
        for j in 0..nn - 1 {
            for i in 0..n {
                m[(j * n + i, (j + 1) * n + i)] = w;
                m[((j + 1) * n + i, j * n + i)] = -w;
            }
        }
        let a = &self.boundary.a;
        // f_N = −A f_0 in the last row, f_{−1} = −A⁻¹ f_{N−1} in the first.
        m.view_mut(((nn - 1) * n, 0), (n, n)).copy_from(&(a * -w));
        m.view_mut((0, (nn - 1) * n), (n, n)).copy_from(&(a.adjoint() * w));
        m
    }

    /// The twisted average `(Mf)_j = (f_j + f_{j+1})/2` with `f_N = −A f_0`.
    pub fn dense_averaging(&self) -> CMat {
        let (n, nn) = (self.boundary.n, self.grid);
        let half = C64::new(0.5, 0.0);
        let mut m = CMat::zeros(n * nn, n * nn);
        for j in 0..nn {
            for i in 0..n {
                m[(j * n + i, j * n + i)] = half;
                if j + 1 < nn {
                    m[(j * n + i, (j + 1) * n + i)] = half;
                }
            }
        }
        m.view_mut(((nn - 1) * n, 0), (n, n))
            .copy_from(&(&self.boundary.a * -half));
        m
    }

    /// Matrix-free application of the stencil.
    pub fn apply(&self, x: &CVec) -> CVec {
        let (n, nn) = (self.boundary.n, self.grid);
        assert_eq!(x.len(), n * nn, "vector length must be nN");
        let w = 0.5 / self.h;
        let a = &self.boundary.a;
        let block = |j: usize| x.rows(j * n, n).into_owned();
        let mut out = CVec::zeros(n * nn);
        for j in 0..nn {
            let next = if j + 1 < nn { block(j + 1) } else { -(a * block(0)) };
            let prev = if j > 0 {
                block(j - 1)
            } else {
                -(a.adjoint() * block(nn - 1))
            };
            out.rows_mut(j * n, n)
                .copy_from(&((next - prev) * C64::new(w, 0.0)));
        }
        out
    }

    /// `‖M + Mᴴ‖_F` of the assembled matrix.
    pub fn skewness_residual(&self) -> f64 {
        let m = self.dense();
        (&m + m.adjoint()).norm()
    }

    fn phase_offset(&self, r: usize) -> f64 {
        (PI + 2.0 * PI * self.spectrum.lambdas[r]) / self.grid as f64
    }

    pub fn transform(&self) -> StructuredTransform {
        StructuredTransform::new(self)
    }

    /// Every eigenvalue of the discretization, sorted by value.
    pub fn eigenvalues(&self) -> Vec<DiscreteMode> {
        self.transform().modes()
    }

    /// Dense cross-check: Hermitian eigensolve of `−iD`, with physical modes
    /// counted inside each eigenvalue cluster through the averaging operator.
    /// Returns `(value, physical)` sorted by value.
    pub fn dense_spectrum(&self) -> Vec<(f64, bool)> {
        let d = self.dense();
        let h = &d * C64::new(0.0, -1.0);
        let (vals, vecs) = hermitian_eigen(&h);
        let m = self.dense_averaging();
        let mm = m.adjoint() * &m;
        let cluster_tol = 1e-8 / self.h;
        let mut out = Vec::with_capacity(vals.len());
        let mut start = 0;
        while start < vals.len() {
            let mut end = start + 1;
            while end < vals.len() && vals[end] - vals[end - 1] <= cluster_tol {
                end += 1;
            }
            let x = vecs.columns(start, end - start);
            let g = x.adjoint() * &mm * x;
            let (w, _) = hermitian_eigen(&g);
            let physical = w.iter().filter(|&&v| v > 0.5).count();
            let total = end - start;
            for (i, &v) in vals[start..end].iter().enumerate() {
                out.push((v, i >= total - physical));
            }
            start = end;
        }
        out
    }

    fn kernel_threshold(&self) -> f64 {
        KERNEL_EPS * 2.0 * PI * self.grid as f64
    }

    /// Number of physical modes with `|eigenvalue| ≤ 1e-6·2πN`.
    pub fn kernel_dim(&self) -> usize {
        let thr = self.kernel_threshold();
        self.eigenvalues()
            .iter()
            .filter(|m| m.physical && m.value.abs() <= thr)
            .count()
    }

    /// The same count from [`DiscretizedOperator::dense_spectrum`].
    pub fn dense_kernel_dim(&self) -> usize {
        let thr = self.kernel_threshold();
        self.dense_spectrum()
            .iter()
            .filter(|(v, p)| *p && v.abs() <= thr)
            .count()
    }

    /// Largest relative error over the `count` physical modes whose continuum
    /// eigenvalue has the smallest nonzero modulus.
    pub fn convergence_error(&self, count: usize) -> ConvergenceRow {
        let mut modes: Vec<(f64, DiscreteMode)> = self
            .eigenvalues()
            .into_iter()
            .filter(|m| m.physical)
            .map(|m| {
                let exact = 2.0 * PI * (self.spectrum.lambdas[m.channel] + m.k as f64 - 0.5);
                (exact, m)
            })
            .filter(|(exact, _)| exact.abs() > 1e-12)
            .collect();
        modes.sort_by(|a, b| {
            a.0.abs()
                .total_cmp(&b.0.abs())
                .then(a.0.total_cmp(&b.0))
                .then(a.1.channel.cmp(&b.1.channel))
        });
        let max_rel_error = modes
            .iter()
            .take(count)
            .map(|(exact, m)| (m.value - exact).abs() / exact.abs())
            .fold(0.0, f64::max);
        ConvergenceRow {
            grid: self.grid,
            modes: count.min(modes.len()),
            max_rel_error,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub grid: usize,
    pub modes: usize,
    pub max_rel_error: f64,
}

/// Convergence of the smallest modes over a sequence of grids.
pub fn convergence_table(b: &BoundaryOperator, grids: &[usize], count: usize) -> Result<Vec<ConvergenceRow>> {
    grids
        .iter()
        .map(|&g| Ok(discretize(b, g)?.convergence_error(count)))
        .collect()
}

/// The exact unitary diagonalization of a discretization: channel basis of
/// `A`, per-channel phase gauge `f_j = e^{iφ_r j} g_j` with
/// `φ_r = (π + 2πλ_r)/N`, then the DFT of the resulting circulant.
pub struct StructuredTransform {
    n: usize,
    grid: usize,
    q: CMat,
    /// `e^{iφ_r j}` per channel.
    gauge: Vec<Vec<C64>>,
    phases: Vec<f64>,
    /// Eigenvalue imaginary parts per channel and DFT index.
    symbols: Vec<Vec<f64>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl StructuredTransform {
    fn new(d: &DiscretizedOperator) -> Self {
        let n = d.boundary.n;
        let nn = d.grid;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(nn);
        let inverse = planner.plan_fft_inverse(nn);
        let phases: Vec<f64> = (0..n).map(|r| d.phase_offset(r)).collect();
        let gauge = phases
            .iter()
            .map(|&phi| (0..nn).map(|j| C64::from_polar(1.0, phi * j as f64)).collect())
            .collect();
        // Circulant first row in the gauged channel: coefficient of g_{j+1} and g_{j−1}.
        let w = 0.5 / d.h;
        let symbols = phases
            .iter()
            .map(|&phi| {
                let mut row = vec![C64::new(0.0, 0.0); nn];
                row[1] += C64::from_polar(w, phi);
                row[nn - 1] -= C64::from_polar(w, -phi);
                inverse.process(&mut row);
                row.iter().map(|z| z.im).collect()
            })
            .collect();
        StructuredTransform {
            n,
            grid: nn,
            q: d.spectrum.vectors.clone(),
            gauge,
            phases,
            symbols,
            forward,
            inverse,
        }
    }

    pub fn modes(&self) -> Vec<DiscreteMode> {
        let nn = self.grid as f64;
        let mut out = Vec::with_capacity(self.n * self.grid);
        for r in 0..self.n {
            // φ_r N = π + 2πλ_r recovers λ_r.
            let lambda = (self.phases[r] * nn - PI) / (2.0 * PI);
            for m in 0..self.grid {
                let theta = wrap_phase(self.phases[r] + 2.0 * PI * m as f64 / nn);
                let k = (theta * nn / (2.0 * PI) - lambda + 0.5).round() as i64;
                out.push(DiscreteMode {
                    value: self.symbols[r][m],
                    channel: r,
                    k,
                    theta,
                    physical: theta.cos() > 0.0,
                });
            }
        }
        out.sort_by(|a, b| a.value.total_cmp(&b.value));
        out
    }

    /// `f(D)x` where `f` receives the imaginary part `s` of each eigenvalue `is`.
    pub fn apply(&self, x: &CVec, f: impl Fn(f64) -> C64) -> CVec {
        let (n, nn) = (self.n, self.grid);
        assert_eq!(x.len(), n * nn, "vector length must be nN");
        let scale = 1.0 / nn as f64;
        let mut out = CVec::zeros(n * nn);
        let mut buf = vec![C64::new(0.0, 0.0); nn];
        for r in 0..n {
            for (j, b) in buf.iter_mut().enumerate() {
                let mut y = C64::new(0.0, 0.0);
                for i in 0..n {
                    y += self.q[(i, r)].conj() * x[j * n + i];
                }
                *b = y * self.gauge[r][j].conj();
            }
            self.forward.process(&mut buf);
            for (m, b) in buf.iter_mut().enumerate() {
                *b *= f(self.symbols[r][m]) * scale;
            }
            self.inverse.process(&mut buf);
            for (j, b) in buf.iter().enumerate() {
                let y = b * self.gauge[r][j];
                for i in 0..n {
                    out[j * n + i] += self.q[(i, r)] * y;
                }
            }
        }
        out
    }
}

/// `R_1` on an eigenvalue `is`: `1/(is − 1)`.
fn resolvent_one(s: f64) -> C64 {
    C64::new(1.0, 0.0) / C64::new(-1.0, s)
}

fn resolvent_one_adjoint(s: f64) -> C64 {
    resolvent_one(s).conj()
}

/// Largest singular value of an operator given by its action and adjoint
/// action, by Golub-Kahan-Lanczos bidiagonalization with full
/// reorthogonalization.
pub fn top_singular_value(
    dim: usize,
    apply: impl Fn(&CVec) -> CVec,
    apply_adjoint: impl Fn(&CVec) -> CVec,
    rng: &mut Rng,
    max_steps: usize,
) -> f64 {
    if dim == 0 {
        return 0.0;
    }
    fn reorth(w: &mut CVec, basis: &[CVec]) {
        for _ in 0..2 {
            for b in basis {
                let c = b.dotc(w);
                *w -= b * c;
            }
        }
    }
    let start = random::complex_gaussian(rng, dim, 1).column(0).into_owned();
    let mut vs = vec![&start / C64::new(start.norm(), 0.0)];
    let mut us: Vec<CVec> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut estimate = 0.0;
    let steps = max_steps.min(dim);
    for j in 0..steps {
        let mut u = apply(&vs[j]);
        if j > 0 {
            u -= &us[j - 1] * C64::new(betas[j - 1], 0.0);
        }
        reorth(&mut u, &us);
        let alpha = u.norm();
        if alpha <= 1e-300 {
            break;
        }
        us.push(u / C64::new(alpha, 0.0));
        alphas.push(alpha);

        let k = alphas.len();
        let mut b = nalgebra::DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            b[(i, i)] = alphas[i];
            if i + 1 < k {
                b[(i, i + 1)] = betas[i];
            }
        }
        let next = b.singular_values().max();
        let converged = j >= 4 && (next - estimate).abs() <= 1e-13 * next;
        estimate = next;
        if converged {
            break;
        }

        let mut w = apply_adjoint(&us[j]) - &vs[j] * C64::new(alpha, 0.0);
        reorth(&mut w, &vs);
        let beta = w.norm();
        if beta <= 1e-14 * estimate || vs.len() == dim {
            break;
        }
        vs.push(w / C64::new(beta, 0.0));
        betas.push(beta);
    }
    estimate
}

#[derive(Clone, Debug, Serialize)]
pub struct ResolventReport {
    pub grid: usize,
    /// `‖R_1(D_a) − R_1(D_0)‖`.
    pub lhs: f64,
    /// `3‖a‖`.
    pub rhs: f64,
}

impl ResolventReport {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

/// Compares the discretizations of `D_{exp(a)A}` and `D_A` in the norm
/// resolvent sense.
pub fn resolvent_continuity(b: &BoundaryOperator, a: &CMat, grid: usize) -> Result<ResolventReport> {
    let ba = b.perturbed(a)?;
    let d0 = discretize(b, grid)?;
    let da = discretize(&ba, grid)?;
    let t0 = d0.transform();
    let ta = da.transform();
    let mut rng = random::rng(0x5eed);
    let lhs = top_singular_value(
        d0.dim(),
        |x| ta.apply(x, resolvent_one) - t0.apply(x, resolvent_one),
        |x| ta.apply(x, resolvent_one_adjoint) - t0.apply(x, resolvent_one_adjoint),
        &mut rng,
        300,
    );
    Ok(ResolventReport {
        grid,
        lhs,
        rhs: 3.0 * spectral_norm(a),
    })
}

/// The same quantity from dense inverses and a full SVD; small grids only.
pub fn resolvent_continuity_dense(b: &BoundaryOperator, a: &CMat, grid: usize) -> Result<ResolventReport> {
    let ba = b.perturbed(a)?;
    let r1 = |d: &DiscretizedOperator| -> Result<CMat> {
        let m = d.dense() - CMat::identity(d.dim(), d.dim());
        m.try_inverse().ok_or(Error::SingularOperator(0.0))
    };
    let diff = r1(&discretize(&ba, grid)?)? - r1(&discretize(b, grid)?)?;
    Ok(ResolventReport {
        grid,
        lhs: spectral_norm(&diff),
        rhs: 3.0 * spectral_norm(a),
    })
}

/// Centered finite differences with second-order one-sided ends.
fn derivative_samples(g: &[CMat], h: f64) -> Vec<CMat> {
    let nn = g.len();
    let inv2h = C64::new(0.5 / h, 0.0);
    (0..nn)
        .map(|j| {
            if j == 0 {
                (&g[0] * C64::new(-3.0, 0.0) + &g[1] * C64::new(4.0, 0.0) - &g[2]) * inv2h
            } else if j == nn - 1 {
                (&g[nn - 1] * C64::new(3.0, 0.0) - &g[nn - 2] * C64::new(4.0, 0.0) + &g[nn - 3]) * inv2h
            } else {
                (&g[j + 1] - &g[j - 1]) * inv2h
            }
        })
        .collect()
}

/// Residual of `M_γ D_{A′} M_γ⁻¹ = D_A + M_μ`, `μ = −γ̇γ⁻¹`, on the grid.
///
/// `gamma` is a pointwise unitary path with `γ(1)A′ = Aγ(0)`, so that `M_γ`
/// carries the boundary condition of `A′` to that of `A`. The residual is the
/// largest relative defect on the sampled continuum eigenfunctions of `D_A`
/// with `|k| ≤ 3`; it vanishes at the rate of the stencil's truncation error.
pub fn conjugation_identity(
    b: &BoundaryOperator,
    b_prime: &BoundaryOperator,
    gamma: &dyn Fn(f64) -> CMat,
    grid: usize,
) -> Result<f64> {
    let n = b.n;
    if b_prime.n != n {
        return Err(Error::DimensionMismatch {
            context: "conjugation_identity",
            expected: n,
            found: b_prime.n,
        });
    }
    let d = discretize(b, grid)?;
    let dp = discretize(b_prime, grid)?;
    let (g0, g1) = (gamma(0.0), gamma(1.0));
    for g in [&g0, &g1] {
        if g.nrows() != n || g.ncols() != n {
            return Err(Error::DimensionMismatch {
                context: "gamma sample",
                expected: n,
                found: g.nrows(),
            });
        }
    }
    let endpoint = (&g1 * &b_prime.a - &b.a * &g0).norm();
    if endpoint > UNITARY_TOL {
        return Err(Error::InvalidParameter(format!(
            "gamma does not intertwine the boundary conditions (residual {endpoint:e})"
        )));
    }
    let ts = d.grid_points();
    let samples: Vec<CMat> = ts.iter().map(|&t| gamma(t)).collect();
    for g in &samples {
        let r = unitarity_residual(g);
        if r > UNITARY_TOL {
            return Err(Error::NotUnitary(r));
        }
    }
    let gdot = derivative_samples(&samples, d.h);
    let mu: Vec<CMat> = gdot
        .iter()
        .zip(&samples)
        .map(|(gd, g)| -(gd * g.adjoint()))
        .collect();

    let blockwise = |mats: &[CMat], x: &CVec, adjoint: bool| {
        let mut out = CVec::zeros(x.len());
        for (j, m) in mats.iter().enumerate() {
            let blk = x.rows(j * n, n).into_owned();
            let y = if adjoint { m.adjoint() * blk } else { m * blk };
            out.rows_mut(j * n, n).copy_from(&y);
        }
        out
    };

    let spec = b.spectrum();
    let mut worst: f64 = 0.0;
    for r in 0..n {
        let v = spec.vectors.column(r);
        for k in -3i64..=3 {
            let freq = 2.0 * PI * (spec.lambdas[r] + k as f64 - 0.5);
            let mut phi = CVec::zeros(n * grid);
            for (j, &t) in ts.iter().enumerate() {
                let e = C64::from_polar(1.0, freq * t);
                for i in 0..n {
                    phi[j * n + i] = v[i] * e;
                }
            }
            let conj = blockwise(&samples, &dp.apply(&blockwise(&samples, &phi, true)), false);
            let rhs = d.apply(&phi) + blockwise(&mu, &phi, false);
            worst = worst.max((conj - rhs).norm() / phi.norm());
        }
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HsVerdict {
    Divergent,
    Bounded,
}

#[derive(Clone, Debug, Serialize)]
pub struct HsDiagnostic {
    pub truncations: Vec<usize>,
    pub partial_sums: Vec<f64>,
    /// Largest single term.
    pub first_term: f64,
    /// Least-squares slope of the partial sums against `ln M` over the last decade.
    pub final_slope: f64,
    /// The same over the decade before it.
    pub previous_slope: f64,
    pub verdict: HsVerdict,
}

/// Truncations `1, 2, 5, 10, 20, 50, …` up to `m_max`, with `m_max` appended.
pub fn truncation_grid(m_max: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut decade = 1usize;
    'outer: loop {
        for f in [1, 2, 5] {
            let m = f * decade;
            if m > m_max {
                break 'outer;
            }
            out.push(m);
        }
        decade *= 10;
    }
    if out.last() != Some(&m_max) {
        out.push(m_max);
    }
    out
}

/// Cross-term coefficients `c_{rs} = |⟨v_r, v′_s⟩|²·|e^{2πi(λ′_s − λ_r)} − 1|²`
/// with `Δ = λ′_s − λ_r`.
fn hs_pairs(s1: &AnalyticSpectrum, s2: &AnalyticSpectrum) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    for r in 0..s1.n() {
        for s in 0..s2.n() {
            let overlap = s1.vectors.column(r).dotc(&s2.vectors.column(s)).norm_sqr();
            let delta = s2.lambdas[s] - s1.lambdas[r];
            let jump = (C64::from_polar(1.0, 2.0 * PI * delta) - C64::new(1.0, 0.0)).norm_sqr();
            let c = overlap * jump;
            if c > 0.0 {
                out.push((c, s1.lambdas[r], s2.lambdas[s]));
            }
        }
    }
    out
}

/// `Σ |⟨φ_k^{(r)}, φ′_l^{(s)}⟩|²` over `λ_r + k − ½ > 0`, `λ′_s + l − ½ ≤ 0`,
/// `|k|, |l| ≤ m`. Each term is `c_{rs}/(4π²(Δ − d)²)` with `d = k − l`, so the
/// double sum is evaluated per `d` with an exact pair count.
fn hs_partial_sum(pairs: &[(f64, f64, f64)], m: usize) -> f64 {
    let m = m as i64;
    let mut total = 0.0;
    for &(c, lambda, lambda_p) in pairs {
        let k0 = (0.5 - lambda).floor() as i64 + 1;
        let l0 = (0.5 - lambda_p).floor() as i64;
        let delta = lambda_p - lambda;
        let mut sum = 0.0;
        // Largest terms last would lose nothing; sum from the far tail inward.
        let d_lo = k0 - l0;
        let d_hi = 2 * m;
        for d in (d_lo..=d_hi).rev() {
            let count = (m.min(l0 + d) - k0.max(d - m) + 1).max(0);
            if count > 0 {
                let x = delta - d as f64;
                sum += count as f64 / (x * x);
            }
        }
        total += c * sum / (4.0 * PI * PI);
    }
    total
}

fn ls_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return 0.0;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Log-slope of the partial sums over truncations in `[lo, hi]`.
pub fn log_slope(truncations: &[usize], sums: &[f64], lo: usize, hi: usize) -> f64 {
    let pts: Vec<(f64, f64)> = truncations
        .iter()
        .zip(sums)
        .filter(|(&m, _)| m >= lo && m <= hi)
        .map(|(&m, &s)| ((m as f64).ln(), s))
        .collect();
    ls_slope(&pts)
}

/// Partial sums of the cross terms between the polarizations of `D_A` and
/// `D_{A′}`. Logarithmic growth keeps the slope against `ln M` constant from
/// one decade to the next while a convergent tail loses about a factor 10 per
/// decade, so the verdict is divergent when the last-decade slope is positive
/// and at least half the slope of the decade before.
pub fn hs_divergence_diagnostic(b1: &BoundaryOperator, b2: &BoundaryOperator, m_max: usize) -> Result<HsDiagnostic> {
    if b1.n != b2.n {
        return Err(Error::DimensionMismatch {
            context: "hs_divergence_diagnostic",
            expected: b1.n,
            found: b2.n,
        });
    }
    if m_max < 100 {
        return Err(Error::InvalidParameter(format!(
            "M_max = {m_max} leaves fewer than two decades"
        )));
    }
    let pairs = hs_pairs(&b1.spectrum(), &b2.spectrum());
    let truncations = truncation_grid(m_max);
    let partial_sums: Vec<f64> = truncations.iter().map(|&m| hs_partial_sum(&pairs, m)).collect();
    let first_term = pairs
        .iter()
        .map(|&(c, lambda, lambda_p)| {
            let k0 = (0.5 - lambda).floor() as i64 + 1;
            let l0 = (0.5 - lambda_p).floor() as i64;
            let x = lambda_p - lambda - (k0 - l0) as f64;
            c / (4.0 * PI * PI * x * x)
        })
        .fold(0.0, f64::max);
    let final_slope = log_slope(&truncations, &partial_sums, m_max / 10, m_max);
    let previous_slope = log_slope(&truncations, &partial_sums, m_max / 100, m_max / 10);
    let verdict = if final_slope > 0.0 && final_slope >= 0.5 * previous_slope {
        HsVerdict::Divergent
    } else {
        HsVerdict::Bounded
    };
    Ok(HsDiagnostic {
        truncations,
        partial_sums,
        first_term,
        final_slope,
        previous_slope,
        verdict,
    })
}

/// Partial sums at explicit truncations (for reports at chosen `M`).
pub fn hs_partial_sums(b1: &BoundaryOperator, b2: &BoundaryOperator, truncations: &[usize]) -> Result<Vec<f64>> {
    if b1.n != b2.n {
        return Err(Error::DimensionMismatch {
            context: "hs_partial_sums",
            expected: b1.n,
            found: b2.n,
        });
    }
    let pairs = hs_pairs(&b1.spectrum(), &b2.spectrum());
    Ok(truncations.iter().map(|&m| hs_partial_sum(&pairs, m)).collect())
}

fn check_skew_adjoint(d: &CMat, context: &'static str) -> Result<()> {
    check_square(d, context)?;
    let r = (d + d.adjoint()).norm();
    if r > DEFAULT_TOL * d.norm().max(1.0) {
        return Err(Error::NotSkew(r));
    }
    Ok(())
}

/// `J_D = i·sign(−iD)` and the spectral gap `min |eigenvalue|`.
pub fn j_operator_with_gap(d: &CMat) -> Result<(CMat, f64)> {
    check_skew_adjoint(d, "J_D")?;
    let h = d * C64::new(0.0, -1.0);
    let (vals, u) = hermitian_eigen(&h);
    let gap = vals.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    if !(gap > DEFAULT_TOL * d.norm().max(1.0)) {
        return Err(Error::SingularOperator(gap));
    }
    let s = nalgebra::DVector::from_iterator(vals.len(), vals.iter().map(|&v| C64::new(0.0, v.signum())));
    Ok((&u * CMat::from_diagonal(&s) * u.adjoint(), gap))
}

pub fn j_operator(d: &CMat) -> Result<CMat> {
    Ok(j_operator_with_gap(d)?.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct HsBound {
    /// `‖J_{D+Q} − J_D‖_F`.
    pub lhs: f64,
    /// `‖Q‖_F / a`.
    pub rhs: f64,
    pub gap: f64,
}

impl HsBound {
    pub fn holds(&self) -> bool {
        self.lhs < self.rhs || (self.lhs == 0.0 && self.rhs == 0.0)
    }
}

pub fn finite_hs_bound(d: &CMat, q: &CMat) -> Result<HsBound> {
    check_skew_adjoint(q, "perturbation")?;
    if q.nrows() != d.nrows() {
        return Err(Error::DimensionMismatch {
            context: "finite_hs_bound",
            expected: d.nrows(),
            found: q.nrows(),
        });
    }
    let (j0, a0) = j_operator_with_gap(d)?;
    let (j1, a1) = j_operator_with_gap(&(d + q))?;
    let gap = a0.min(a1);
    Ok(HsBound {
        lhs: (j1 - j0).norm(),
        rhs: q.norm() / gap,
        gap,
    })
}

/// `J_D = −(1/π)∫ R_t(D) dt` by adaptive Simpson quadrature.
///
/// Pairing `t` with `−t` gives `∫_0^T 2D(D² − t²)⁻¹ dt`; the substitution
/// `t = tan θ` makes the integrand bounded on `[0, atan T]`, and the tail
/// beyond `T` is `−2D/T` to leading order.
pub fn j_by_quadrature(d: &CMat, t_max: f64, tol: f64) -> Result<CMat> {
    check_skew_adjoint(d, "J_D")?;
    let dim = d.nrows();
    let d2 = d * d;
    let two_d = d * C64::new(2.0, 0.0);
    let integrand = |theta: f64| -> Result<CMat> {
        let t = theta.tan();
        let sec2 = 1.0 + t * t;
        let m = &d2 - CMat::identity(dim, dim) * C64::new(t * t, 0.0);
        let sol = m.lu().solve(&two_d).ok_or(Error::SingularOperator(t))?;
        Ok(sol * C64::new(sec2, 0.0))
    };
    let a = 0.0;
    let b = t_max.atan();
    let fa = integrand(a)?;
    let fm = integrand(0.5 * (a + b))?;
    let fb = integrand(b)?;
    let whole = simpson(a, b, &fa, &fm, &fb);
    let integral = adaptive_simpson(&integrand, a, b, fa, fm, fb, whole, tol, 50)?;
    let tail = d * C64::new(-2.0 / t_max, 0.0);
    Ok((integral + tail) * C64::new(-1.0 / PI, 0.0))
}

fn simpson(a: f64, b: f64, fa: &CMat, fm: &CMat, fb: &CMat) -> CMat {
    (fa + fm * C64::new(4.0, 0.0) + fb) * C64::new((b - a) / 6.0, 0.0)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson(
    f: &dyn Fn(f64) -> Result<CMat>,
    a: f64,
    b: f64,
    fa: CMat,
    fm: CMat,
    fb: CMat,
    whole: CMat,
    tol: f64,
    depth: usize,
) -> Result<CMat> {
    let m = 0.5 * (a + b);
    let flm = f(0.5 * (a + m))?;
    let frm = f(0.5 * (m + b))?;
    let left = simpson(a, m, &fa, &flm, &fm);
    let right = simpson(m, b, &fm, &frm, &fb);
    let err = (&left + &right - &whole).norm();
    if depth == 0 || err <= 15.0 * tol {
        return Ok(&left + &right + (&left + &right - whole) * C64::new(1.0 / 15.0, 0.0));
    }
    let l = adaptive_simpson(f, a, m, fa, flm, fm.clone(), left, 0.5 * tol, depth - 1)?;
    let r = adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}
