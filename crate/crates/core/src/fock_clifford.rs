//! Clifford modules and the semi-infinite wedge.
//!
//! A complex structure `J` on even-dimensional `R^d` splits `C^d = V_+ ⊕ V_−`
//! into the `±i` eigenspaces. The spinor module is `∧V_+` with
//! `ρ(v) = √2(ε(v_+) + ι(v_−))`; in an orthonormal basis `f_j` of `V_+` this is
//! `√2 Σ_j ((f_jᴴv) a_j† + (f_jᵀv) a_j)` with Jordan-Wigner signs on bitmask
//! states.
//!
//! The semi-infinite wedge has basis `s_K` for `K ⊂ Z` agreeing with the Fermi
//! sea `{k ≤ 0}` far down. Windows `[−N, N]` hold the states that differ from
//! the sea only inside the window; a bitmask `S` stands for
//! `K = S ∪ {k < −N}`, so creation and annihilation are signed permutations
//! with the sign `(−1)^{#{j ∈ K : j > k}}`.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dirac_calculus::Parity;
use crate::linear_core::{null_basis, singular_values, to_complex, Subspace, DEFAULT_TOL};
use crate::matfun::{phase, skew_function};
use crate::spectral_boundary::{j_operator, BoundaryOperator};
use crate::{CMat, CVec, Error, RMat, Result, C64};

/// The `√2` in `ρ(v) = √2(ε + ι)`; window operators are kept unnormalized.
pub const CLIFFORD_NORMALIZATION: f64 = std::f64::consts::SQRT_2;
/// Largest wedge window, `2^{2N+1}` states.
pub const MAX_WINDOW: usize = 12;
/// Largest spinor module built densely, `d ≤ 20`.
pub const MAX_SPINOR_DIM: usize = 20;

#[derive(Clone, Debug, Serialize)]
pub struct ComplexStructure {
    d: usize,
    #[serde(with = "crate::json::rmat")]
    j: RMat,
}

impl ComplexStructure {
    pub fn new(j: RMat) -> Result<Self> {
        let d = j.nrows();
        if j.ncols() != d {
            return Err(Error::DimensionMismatch {
                context: "complex structure",
                expected: d,
                found: j.ncols(),
            });
        }
        if d % 2 != 0 {
            return Err(Error::InvalidParameter(format!("odd dimension {d}")));
        }
        let skew = (&j + j.transpose()).norm();
        if skew > 1e-8 {
            return Err(Error::NotSkew(skew));
        }
        let sq = (&j * &j + RMat::identity(d, d)).norm();
        if sq > 1e-8 {
            return Err(Error::InvalidParameter(format!("J² + I has norm {sq:e}")));
        }
        Ok(ComplexStructure { d, j })
    }

    /// The standard structure `[[0, −I], [I, 0]]`.
    pub fn standard(d: usize) -> Result<Self> {
        let m = d / 2;
        let mut j = RMat::zeros(d, d);
        for i in 0..m {
            j[(m + i, i)] = 1.0;
            j[(i, m + i)] = -1.0;
        }
        Self::new(j)
    }

    /// `J = D|D|⁻¹` for an invertible skew `D`.
    pub fn from_skew_operator(dmat: &RMat) -> Result<Self> {
        let sv = singular_values(dmat);
        let smin = sv.last().copied().unwrap_or(0.0);
        if sv.is_empty() || smin <= DEFAULT_TOL * sv[0] {
            return Err(Error::SingularOperator(smin));
        }
        if (dmat + dmat.transpose()).norm() > DEFAULT_TOL * dmat.norm() {
            return Err(Error::NotSkew((dmat + dmat.transpose()).norm()));
        }
        Self::new(skew_function(dmat, phase))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &RMat {
        &self.j
    }

    /// Orthonormal basis of `V_+ = ker(J − i)`.
    pub fn plus_basis(&self) -> CMat {
        let m = to_complex(&self.j) - CMat::identity(self.d, self.d) * C64::new(0.0, 1.0);
        null_basis(&m, DEFAULT_TOL)
    }
}

#[derive(Clone, Debug)]
pub struct SpinorModule {
    j: ComplexStructure,
    plus: CMat,
}

fn jw_sign(state: usize, j: usize) -> f64 {
    if (state & ((1usize << j) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl SpinorModule {
    pub fn new(j: ComplexStructure) -> Result<Self> {
        if j.d > MAX_SPINOR_DIM {
            return Err(Error::InvalidParameter(format!(
                "spinor module of R^{} exceeds the dense limit R^{MAX_SPINOR_DIM}",
                j.d
            )));
        }
        let plus = j.plus_basis();
        if plus.ncols() != j.d / 2 {
            return Err(Error::InvalidParameter("V_+ has the wrong dimension".into()));
        }
        Ok(SpinorModule { j, plus })
    }

    pub fn complex_structure(&self) -> &ComplexStructure {
        &self.j
    }

    pub fn plus_basis(&self) -> &CMat {
        &self.plus
    }

    pub fn modes(&self) -> usize {
        self.plus.ncols()
    }

    pub fn wedge_dim(&self) -> usize {
        1usize << self.modes()
    }

    /// `a_j†` on `∧V_+`, bitmask basis.
    pub fn creation(&self, j: usize) -> CMat {
        let dim = self.wedge_dim();
        let mut m = CMat::zeros(dim, dim);
        for s in 0..dim {
            if s & (1 << j) == 0 {
                m[(s | (1 << j), s)] = C64::new(jw_sign(s, j), 0.0);
            }
        }
        m
    }

    pub fn annihilation(&self, j: usize) -> CMat {
        self.creation(j).adjoint()
    }

    /// `ρ(v) = √2(ε(v_+) + ι(v_−))` for `v ∈ C^d`.
    pub fn clifford_action(&self, v: &CVec) -> Result<CMat> {
        if v.len() != self.j.d {
            return Err(Error::DimensionMismatch {
                context: "clifford_action",
                expected: self.j.d,
                found: v.len(),
            });
        }
        let dim = self.wedge_dim();
        let mut out = CMat::zeros(dim, dim);
        for j in 0..self.modes() {
            let f = self.plus.column(j);
            let c = f.dotc(v);
            let d = f.dot(v);
            let a = self.creation(j);
            out += &a * c + a.adjoint() * d;
        }
        Ok(out * C64::new(CLIFFORD_NORMALIZATION, 0.0))
    }

    /// `(−1)^{|subset|}` on the bitmask basis.
    pub fn grading(&self) -> CMat {
        let dim = self.wedge_dim();
        CMat::from_diagonal(&CVec::from_fn(dim, |s, _| {
            C64::new(if s.count_ones() % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
        }))
    }
}

/// Parity of `½ dim ker(J1 + J2)`.
pub fn ss_parity(j1: &ComplexStructure, j2: &ComplexStructure) -> Result<Parity> {
    if j1.d != j2.d {
        return Err(Error::DimensionMismatch {
            context: "ss_parity",
            expected: j1.d,
            found: j2.d,
        });
    }
    let kdim = kernel_dim_sum(j1, j2);
    if kdim % 2 != 0 {
        return Err(Error::OddKernel(kdim));
    }
    Ok(Parity::of(kdim / 2))
}

/// `dim ker(J1 + J2)`, absolute cut: both summands have unit singular values.
pub fn kernel_dim_sum(j1: &ComplexStructure, j2: &ComplexStructure) -> usize {
    let s = &j1.j + &j2.j;
    singular_values(&s)
        .iter()
        .filter(|&&v| v <= DEFAULT_TOL)
        .count()
}

/// A basis vector `s_K` stored as its difference from the Fermi sea:
/// `K = {k ≤ 0} ∪ added ∖ removed`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WedgeState {
    /// Positive, sorted descending.
    added: Vec<i64>,
    /// Nonpositive, sorted ascending.
    removed: Vec<i64>,
}

impl WedgeState {
    pub fn new(added: impl IntoIterator<Item = i64>, removed: impl IntoIterator<Item = i64>) -> Result<Self> {
        let a: BTreeSet<i64> = added.into_iter().collect();
        let r: BTreeSet<i64> = removed.into_iter().collect();
        if let Some(bad) = a.iter().find(|&&k| k <= 0) {
            return Err(Error::InvalidParameter(format!("added index {bad} is not positive")));
        }
        if let Some(bad) = r.iter().find(|&&k| k > 0) {
            return Err(Error::InvalidParameter(format!("removed index {bad} is positive")));
        }
        Ok(WedgeState {
            added: a.into_iter().rev().collect(),
            removed: r.into_iter().collect(),
        })
    }

    pub fn vacuum() -> Self {
        WedgeState {
            added: Vec::new(),
            removed: Vec::new(),
        }
    }

    pub fn added(&self) -> &[i64] {
        &self.added
    }

    pub fn removed(&self) -> &[i64] {
        &self.removed
    }

    pub fn contains(&self, k: i64) -> bool {
        if k > 0 {
            self.added.contains(&k)
        } else {
            !self.removed.contains(&k)
        }
    }

    /// `m_K = #{k ∈ K : k > 0} − #{k ∉ K : k ≤ 0}`.
    pub fn weight(&self) -> i64 {
        self.added.len() as i64 - self.removed.len() as i64
    }

    /// `τ(K) = {k + 1 : k ∈ K}`.
    pub fn shift(&self) -> WedgeState {
        let mut added: Vec<i64> = self.added.iter().map(|k| k + 1).collect();
        // 0 moves to 1 when it was occupied.
        if !self.removed.contains(&0) {
            added.push(1);
        }
        let removed = self.removed.iter().map(|k| k + 1).filter(|&k| k <= 0);
        WedgeState::new(added, removed).expect("shift preserves the encoding")
    }
}

pub fn weight(k: &WedgeState) -> i64 {
    k.weight()
}

pub fn shift(k: &WedgeState) -> WedgeState {
    k.shift()
}

/// Exterior multiplication and contraction on the window `[−N, N]`.
#[derive(Clone, Copy, Debug)]
pub struct WedgeWindow {
    n: usize,
}

impl WedgeWindow {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_WINDOW {
            return Err(Error::WindowTooLarge(n));
        }
        Ok(WedgeWindow { n })
    }

    pub fn window(&self) -> usize {
        self.n
    }

    pub fn sites(&self) -> usize {
        2 * self.n + 1
    }

    pub fn dim(&self) -> usize {
        1usize << self.sites()
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        -(self.n as i64)..=self.n as i64
    }

    fn bit(&self, k: i64) -> usize {
        (k + self.n as i64) as usize
    }

    /// `(−1)^{#{j ∈ K : j > k}}`; sites below the window are all smaller.
    fn sign(&self, state: usize, k: i64) -> i32 {
        let above = state >> (self.bit(k) + 1);
        if above.count_ones() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// `ε_k` (wedge with `f_k`): `None` when the result is zero.
    pub fn create(&self, k: i64, state: usize) -> Option<(i32, usize)> {
        let b = 1usize << self.bit(k);
        (state & b == 0).then(|| (self.sign(state, k), state | b))
    }

    /// `ι_k` (contraction with `f_k*`).
    pub fn annihilate(&self, k: i64, state: usize) -> Option<(i32, usize)> {
        let b = 1usize << self.bit(k);
        (state & b != 0).then(|| (self.sign(state, k), state & !b))
    }

    /// `τ` on the truncation: shift every site up, fill `−N` from the sea,
    /// and send states occupying `N` to zero.
    pub fn tau(&self, state: usize) -> Option<usize> {
        let top = 1usize << (self.sites() - 1);
        (state & top == 0).then_some((state << 1) | 1)
    }

    pub fn weight(&self, state: usize) -> i64 {
        let mut w = 0;
        for k in self.indices() {
            let occ = state & (1 << self.bit(k)) != 0;
            if k > 0 && occ {
                w += 1;
            } else if k <= 0 && !occ {
                w -= 1;
            }
        }
        w
    }

    /// `(−1)^{m_K}`.
    pub fn grading(&self, state: usize) -> i32 {
        if self.weight(state).rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }

    pub fn to_state(&self, state: usize) -> WedgeState {
        let mut added = Vec::new();
        let mut removed = Vec::new();
        for k in self.indices() {
            let occ = state & (1 << self.bit(k)) != 0;
            if k > 0 && occ {
                added.push(k);
            } else if k <= 0 && !occ {
                removed.push(k);
            }
        }
        WedgeState::new(added, removed).expect("window states are valid")
    }

    /// Dense integer matrix of `ε_k`; small windows only.
    pub fn creation_matrix(&self, k: i64) -> Result<RMat> {
        if self.n > 4 {
            return Err(Error::WindowTooLarge(self.n));
        }
        let dim = self.dim();
        let mut m = RMat::zeros(dim, dim);
        for s in 0..dim {
            if let Some((sg, t)) = self.create(k, s) {
                m[(t, s)] = sg as f64;
            }
        }
        Ok(m)
    }
}

type Term = Option<(i32, usize)>;

fn then(op: impl Fn(usize) -> Term, t: Term) -> Term {
    let (s1, x) = t?;
    let (s2, y) = op(x)?;
    Some((s1 * s2, y))
}

/// Adds two signed basis vectors and compares with `expected · e_state`.
fn anticommutator_ok(a: Term, b: Term, state: usize, expected: i32) -> bool {
    let mut acc: Vec<(usize, i32)> = Vec::new();
    for (s, t) in [a, b].into_iter().flatten() {
        match acc.iter_mut().find(|(x, _)| *x == t) {
            Some(e) => e.1 += s,
            None => acc.push((t, s)),
        }
    }
    acc.retain(|&(_, c)| c != 0);
    match expected {
        0 => acc.is_empty(),
        e => acc == vec![(state, e)],
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CarReport {
    pub window: usize,
    pub states: usize,
    pub checks: u64,
    /// `{ε_k, ι_l} = δ_kl`, `{ε_k, ε_l} = 0`, `{ι_k, ι_l} = 0`.
    pub violations: u64,
    /// `ε_k ε_k = 0` on every state.
    pub square_violations: u64,
    /// `ε_k` and `ι_k` flip the weight grading.
    pub grading_violations: u64,
}

impl CarReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.square_violations == 0 && self.grading_violations == 0
    }
}

/// Exhaustive check of the canonical anticommutation relations.
pub fn car_check(window: usize) -> Result<CarReport> {
    let w = WedgeWindow::new(window)?;
    let dim = w.dim();
    let mut checks = 0u64;
    let mut violations = 0u64;
    let mut square_violations = 0u64;
    let mut grading_violations = 0u64;
    let ks: Vec<i64> = w.indices().collect();
    for s in 0..dim {
        let g = w.grading(s);
        for &k in &ks {
            if then(|x| w.create(k, x), w.create(k, s)).is_some() {
                square_violations += 1;
            }
            for t in [w.create(k, s), w.annihilate(k, s)].into_iter().flatten() {
                if w.grading(t.1) != -g {
                    grading_violations += 1;
                }
            }
            for &l in &ks {
                checks += 3;
                let el = then(|x| w.annihilate(l, x), w.create(k, s));
                let le = then(|x| w.create(k, x), w.annihilate(l, s));
                if !anticommutator_ok(el, le, s, i32::from(k == l)) {
                    violations += 1;
                }
                let cc1 = then(|x| w.create(l, x), w.create(k, s));
                let cc2 = then(|x| w.create(k, x), w.create(l, s));
                if !anticommutator_ok(cc1, cc2, s, 0) {
                    violations += 1;
                }
                let aa1 = then(|x| w.annihilate(l, x), w.annihilate(k, s));
                let aa2 = then(|x| w.annihilate(k, x), w.annihilate(l, s));
                if !anticommutator_ok(aa1, aa2, s, 0) {
                    violations += 1;
                }
            }
        }
    }
    Ok(CarReport {
        window,
        states: dim,
        checks,
        violations,
        square_violations,
        grading_violations,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TauReport {
    pub window: usize,
    pub checks: u64,
    /// `τ ε_k = ε_{k+1} τ` and `τ ι_k = ι_{k+1} τ` for `k ∈ [−N, N−1]` on
    /// states where `τ` stays inside the window.
    pub violations: u64,
    /// `m_{τ(S)} = m_S + 1`.
    pub weight_violations: u64,
}

impl TauReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.weight_violations == 0
    }
}

pub fn tau_check(window: usize) -> Result<TauReport> {
    let w = WedgeWindow::new(window)?;
    let n = w.n as i64;
    let mut checks = 0;
    let mut violations = 0;
    let mut weight_violations = 0;
    let tau = |t: Term| -> Term {
        let (s, x) = t?;
        Some((s, w.tau(x)?))
    };
    for s in 0..w.dim() {
        let Some(ts) = w.tau(s) else { continue };
        if w.weight(ts) != w.weight(s) + 1 {
            weight_violations += 1;
        }
        for k in -n..n {
            for (lhs, rhs) in [
                (tau(w.create(k, s)), w.create(k + 1, ts)),
                (tau(w.annihilate(k, s)), w.annihilate(k + 1, ts)),
            ] {
                checks += 1;
                // τ of a state that reaches N is truncated; compare only where defined.
                let comparable = match (lhs, rhs) {
                    (None, Some((_, y))) => y & (1 << (w.sites() - 1)) == 0,
                    _ => true,
                };
                if comparable && lhs != rhs {
                    violations += 1;
                }
            }
        }
    }
    Ok(TauReport {
        window,
        checks,
        violations,
        weight_violations,
    })
}

/// Creation and annihilation on a window, as signed permutations.
pub fn wedge_operators(window: usize) -> Result<WedgeWindow> {
    WedgeWindow::new(window)
}

#[derive(Clone, Debug, Serialize)]
pub struct So2Report {
    pub s: f64,
    pub window: usize,
    /// Continuously unwrapped `λ(s)` of `A_s` on `u = (1, i)/√2`.
    pub lambda: f64,
    /// `ε_k(s) = k − ½ + λ(s)` for `k ∈ [−N+1, N]`.
    pub levels: Vec<f64>,
    pub kernel_modes: usize,
    pub kernel_parity: Parity,
    /// `#{k : ε_k(0) < 0 ≤ ε_k(s)} − #{k : ε_k(s) < 0 ≤ ε_k(0)}`.
    pub flow: i64,
    /// Weight of the state filling exactly the negative levels at `s`,
    /// counted in the `s = 0` polarization.
    pub vacuum_weight: i64,
    /// `(weight, multiplicity)` over all `2^{2N}` window states.
    pub histogram: Vec<(i64, usize)>,
}

fn rot(t: f64) -> RMat {
    let (s, c) = t.sin_cos();
    RMat::from_row_slice(2, 2, &[c, s, -s, c])
}

/// `u = (1, i)/√2`, the `+i` eigenvector of `[[0, 1], [−1, 0]]`.
fn u_vector() -> CVec {
    CVec::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)]) * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
}

/// `λ` of `A_s = exp(2πs[[0, 1], [−1, 0]])` on the channel through `u`,
/// from the boundary operator's eigenbasis, unwrapped continuously from `s = 0`.
pub fn so2_lambda(s: f64) -> f64 {
    let steps = ((s.abs() * 64.0).ceil() as usize).max(1);
    let u = u_vector();
    let mut lambda = 0.0;
    for i in 1..=steps {
        let si = s * i as f64 / steps as f64;
        let b = BoundaryOperator::real(&rot(2.0 * PI * si)).expect("rotation is orthogonal");
        let spec = b.spectrum();
        let r = (0..spec.n())
            .max_by(|&a, &c| {
                let oa = spec.vectors.column(a).dotc(&u).norm();
                let oc = spec.vectors.column(c).dotc(&u).norm();
                oa.total_cmp(&oc)
            })
            .expect("two channels");
        let l = spec.lambdas[r];
        lambda = l + (lambda - l).round();
    }
    lambda
}


/// Weights `m_K(s)` of every window state `K ⊂ [−N+1, N]`: occupied
/// nonnegative levels minus empty negative levels.
pub fn so2_weights(s: f64, window: usize) -> Result<Vec<i64>> {
    if window == 0 || window > MAX_WINDOW {
        return Err(Error::WindowTooLarge(window));
    }
    let levels = so2_levels(so2_lambda(s), window);
    let sites = levels.len();
    Ok((0..1usize << sites)
        .map(|state| {
            levels
                .iter()
                .enumerate()
                .map(|(b, &e)| {
                    let occ = state & (1 << b) != 0;
                    match (occ, e >= 0.0) {
                        (true, true) => 1,
                        (false, false) => -1,
                        _ => 0,
                    }
                })
                .sum()
        })
        .collect())
}

fn so2_levels(lambda: f64, window: usize) -> Vec<f64> {
    let n = window as i64;
    (-n + 1..=n).map(|k| k as f64 - 0.5 + lambda).collect()
}

/// The `SO(2)` family `A_s`: levels, spectral flow and weight ladder.
pub fn so2_model(s: f64, window: usize) -> Result<So2Report> {
    let weights = so2_weights(s, window)?;
    let lambda = so2_lambda(s);
    let levels = so2_levels(lambda, window);
    let base = so2_levels(0.0, window);
    let kernel_modes = levels.iter().filter(|e| e.abs() <= DEFAULT_TOL).count();
    let flow = base
        .iter()
        .zip(&levels)
        .map(|(&e0, &e)| match (e0 < 0.0, e < 0.0) {
            (true, false) => 1,
            (false, true) => -1,
            _ => 0,
        })
        .sum();
    let mut hist = std::collections::BTreeMap::new();
    for w in &weights {
        *hist.entry(*w).or_insert(0usize) += 1;
    }
    Ok(So2Report {
        s,
        window,
        lambda,
        levels,
        kernel_modes,
        kernel_parity: Parity::of(kernel_modes),
        flow,
        vacuum_weight: flow,
        histogram: hist.into_iter().collect(),
    })
}

/// `V_+ = ker(J_D − i)` for a skew-adjoint matrix `D`.
pub fn polarization(dmat: &CMat) -> Result<Subspace> {
    let j = j_operator(dmat)?;
    let d = j.nrows();
    let m = j - CMat::identity(d, d) * C64::new(0.0, 1.0);
    Ok(Subspace::span_complex(&null_basis(&m, DEFAULT_TOL), DEFAULT_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use crate::spectral_boundary::discretize;

    fn random_structure(rng: &mut random::Rng, d: usize) -> ComplexStructure {
        let q = random::orthogonal(rng, d);
        let j0 = ComplexStructure::standard(d).unwrap();
        ComplexStructure::new(&q * j0.matrix() * q.transpose()).unwrap()
    }

    fn real_vec(rng: &mut random::Rng, d: usize) -> CVec {
        to_complex(&random::gaussian(rng, d, 1)).column(0).into_owned()
    }

    fn anti(a: &CMat, b: &CMat) -> CMat {
        a * b + b * a
    }

    #[test]
    fn complex_structure_checks() {
        assert!(ComplexStructure::new(RMat::identity(2, 2)).is_err());
        assert!(ComplexStructure::new(RMat::zeros(3, 3)).is_err());
        let mut rng = random::rng(60);
        let dmat = random::skew(&mut rng, 6, 1.0);
        let j = ComplexStructure::from_skew_operator(&dmat).unwrap();
        assert!((j.matrix() * j.matrix() + RMat::identity(6, 6)).norm() < 1e-10);
        assert!(ComplexStructure::from_skew_operator(&RMat::zeros(2, 2)).is_err());
    }

    #[test]
    fn plus_space_is_isotropic_and_conjugate_to_minus() {
        let mut rng = random::rng(61);
        let j = random_structure(&mut rng, 6);
        let p = j.plus_basis();
        assert_eq!(p.ncols(), 3);
        assert!((p.transpose() * &p).norm() < 1e-12);
        let minus = to_complex(j.matrix()) + CMat::identity(6, 6) * C64::new(0.0, 1.0);
        assert!((minus * p.map(|z| z.conj())).norm() < 1e-12);
    }

    #[test]
    fn clifford_relation_for_real_vectors() {
        let mut rng = random::rng(62);
        for d in [2, 4, 6, 8] {
            let s = SpinorModule::new(random_structure(&mut rng, d)).unwrap();
            assert_eq!(s.wedge_dim(), 1 << (d / 2));
            let gamma = s.grading();
            let plus = (0..s.wedge_dim()).filter(|&i| gamma[(i, i)].re > 0.0).count();
            assert_eq!(2 * plus, s.wedge_dim());
            for _ in 0..12 {
                let v = real_vec(&mut rng, d);
                let r = s.clifford_action(&v).unwrap();
                let want = CMat::identity(s.wedge_dim(), s.wedge_dim()) * C64::new(v.norm_squared(), 0.0);
                assert!((&r * &r - want).norm() < 1e-10);
                assert!(anti(&gamma, &r).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn plus_basis_anticommutators() {
        let mut rng = random::rng(63);
        let s = SpinorModule::new(random_structure(&mut rng, 6)).unwrap();
        let dim = s.wedge_dim();
        let p = s.plus_basis().clone();
        for k in 0..3 {
            for l in 0..3 {
                let fk = s.clifford_action(&p.column(k).into_owned()).unwrap();
                let fl = s.clifford_action(&p.column(l).into_owned()).unwrap();
                let fl_star = s.clifford_action(&p.column(l).map(|z| z.conj())).unwrap();
                assert!(anti(&fk, &fl).norm() < 1e-12);
                let want = if k == l { 2.0 } else { 0.0 };
                let diff = anti(&fk, &fl_star) - CMat::identity(dim, dim) * C64::new(want, 0.0);
                assert!(diff.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn grading_examples() {
        let s = SpinorModule::new(ComplexStructure::standard(4).unwrap()).unwrap();
        let g = s.grading();
        assert_eq!(g[(0, 0)].re, 1.0);
        assert_eq!(g[(1, 1)].re, -1.0);
        assert_eq!(g[(2, 2)].re, -1.0);
        assert!(s.clifford_action(&CVec::zeros(3)).is_err());
    }

    #[test]
    fn ss_parity_examples() {
        let j = ComplexStructure::standard(2).unwrap();
        assert_eq!(ss_parity(&j, &j).unwrap(), Parity::Even);
        let mj = ComplexStructure::new(-j.matrix()).unwrap();
        assert_eq!(ss_parity(&j, &mj).unwrap(), Parity::Odd);

        // Shared 2-plane with opposite rotations, the rest aligned.
        let mut rng = random::rng(64);
        let q = random::orthogonal(&mut rng, 6);
        let j0 = ComplexStructure::standard(6).unwrap().matrix().clone();
        // standard(6) pairs coordinates (i, i+3); flip the pair (0, 3).
        let mut flip = RMat::identity(6, 6);
        flip[(0, 0)] = -1.0;
        let j1 = ComplexStructure::new(&q * &j0 * q.transpose()).unwrap();
        let j2 = ComplexStructure::new(&q * (&flip * &j0 * &flip) * q.transpose()).unwrap();
        assert_eq!(kernel_dim_sum(&j1, &j2), 2);
        assert_eq!(ss_parity(&j1, &j2).unwrap(), Parity::Odd);
    }

    #[test]
    fn kernel_of_sum_is_even() {
        let mut rng = random::rng(65);
        for d in [2, 4, 6, 8] {
            for _ in 0..25 {
                let a = random_structure(&mut rng, d);
                let b = random_structure(&mut rng, d);
                assert_eq!(kernel_dim_sum(&a, &b) % 2, 0);
                assert!(ss_parity(&a, &b).is_ok());
            }
        }
    }

    #[test]
    fn weight_and_shift_examples() {
        let v = WedgeState::vacuum();
        assert_eq!(v.weight(), 0);
        let t = v.shift();
        assert_eq!(t, WedgeState::new([1], []).unwrap());
        assert_eq!(t.weight(), 1);
        assert_eq!(t.shift(), WedgeState::new([1, 2], []).unwrap());
        let k = WedgeState::new([2], [0]).unwrap();
        assert_eq!(k.weight(), 0);
        // {2, −1, −2, …} shifts to {3, 0, −1, …}.
        assert_eq!(k.shift(), WedgeState::new([3], []).unwrap());
        assert_eq!(k.shift().weight(), 1);
        assert_eq!(k.added(), &[2]);
        assert!(WedgeState::new([0], []).is_err());
        assert!(WedgeState::new([], [1]).is_err());
    }

    #[test]
    fn shift_matches_set_arithmetic() {
        let mut rng = random::rng(66);
        for _ in 0..200 {
            let added: Vec<i64> = (1..8).filter(|_| random::uniform(&mut rng, 0.0, 1.0) < 0.4).collect();
            let removed: Vec<i64> = (-7..=0).filter(|_| random::uniform(&mut rng, 0.0, 1.0) < 0.4).collect();
            let k = WedgeState::new(added, removed).unwrap();
            let t = k.shift();
            for j in -10..10 {
                assert_eq!(t.contains(j + 1), k.contains(j));
            }
        }
    }

    #[test]
    fn car_relations_small_window() {
        let r = car_check(3).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(matches!(WedgeWindow::new(13), Err(Error::WindowTooLarge(13))));
    }

    #[test]
    fn creation_matrices_square_to_zero() {
        let w = WedgeWindow::new(2).unwrap();
        for k in w.indices() {
            let e = w.creation_matrix(k).unwrap();
            assert_eq!((&e * &e).norm(), 0.0);
            for l in w.indices() {
                let f = w.creation_matrix(l).unwrap();
                let acr = &e * f.transpose() + f.transpose() * &e;
                let want = if k == l { RMat::identity(w.dim(), w.dim()) } else { RMat::zeros(w.dim(), w.dim()) };
                assert_eq!(acr, want);
            }
        }
    }

    #[test]
    fn tau_conjugation() {
        let r = tau_check(3).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.checks > 0);
    }

    #[test]
    fn window_weight_agrees_with_state_encoding() {
        let w = WedgeWindow::new(3).unwrap();
        for s in 0..w.dim() {
            assert_eq!(w.weight(s), w.to_state(s).weight());
        }
    }

    #[test]
    fn so2_ladders() {
        let z = so2_model(0.0, 4).unwrap();
        assert_eq!(z.vacuum_weight, 0);
        let sym: Vec<(i64, usize)> = z.histogram.iter().rev().map(|&(w, c)| (-w, c)).collect();
        assert_eq!(sym, z.histogram);

        let w0 = so2_weights(0.0, 4).unwrap();
        let w1 = so2_weights(1.0, 4).unwrap();
        assert!(w0.iter().zip(&w1).all(|(a, b)| *b == a + 1));
        let one = so2_model(1.0, 4).unwrap();
        assert!((one.lambda - 1.0).abs() < 1e-12);
        assert_eq!(one.flow, 1);

        let half = so2_model(0.5, 4).unwrap();
        assert_eq!(half.kernel_modes, 1);
        assert_eq!(half.kernel_parity, Parity::Odd);
        assert_eq!(z.kernel_parity, Parity::Even);
    }

    #[test]
    fn v_plus_of_discretized_identity_matches_descriptors() {
        // R² with A = I, so both u and ū channels are present.
        let grid = 100;
        let b = BoundaryOperator::identity(2);
        let d = discretize(&b, grid).unwrap();
        let vplus = polarization(&d.dense()).unwrap();
        assert_eq!(vplus.dim(), grid);
        let proj = vplus.projector();
        let u = u_vector();
        for k in -10i64..=10 {
            let mut f = CVec::zeros(2 * grid);
            for (j, t) in d.grid_points().iter().enumerate() {
                let e = C64::from_polar(1.0, 2.0 * PI * (k as f64 - 0.5) * t);
                f[2 * j] = u[0] * e;
                f[2 * j + 1] = u[1] * e;
            }
            let fstar = f.map(|z| z.conj());
            // f_k ∈ V_+ for k ≥ 1, f_k* ∈ V_+ for k ≤ 0, and the others in V_−.
            let (inside, outside) = if k >= 1 { (&f, &fstar) } else { (&fstar, &f) };
            assert!((inside - &proj * inside).norm() / inside.norm() < 1e-9);
            assert!((&proj * outside).norm() / outside.norm() < 1e-9);
        }
    }
}
