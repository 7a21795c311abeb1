//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use dirac_core::dirac_calculus::{forward_image, is_strong, parity, DiracMorphism, DiracStructure};
use dirac_core::fock_clifford::{car_check, so2_weights, tau_check, WedgeState};
use dirac_core::group_moment::{
    conjugacy_class_data, fusion, reduction_normal_form, synthetic_reduction, verify_qham, GroupContext, PointedQHam,
    QHAM_TOL,
};
use dirac_core::linear_core::{singular_values, to_complex};
use dirac_core::orthogonal_bridge::{
    associativity_check, exp_lift, exp_witness_residual, graph_structure, intersection_dim, kernel_dim_difference,
    lag_from_orth, lag_from_orth_matrix, multiplicative_morphism, orth_from_lag, product_structure, symplectic_path,
    OrthogonalPoint, SkewPoint,
};
use dirac_core::random;
use dirac_core::spectral_boundary::{
    convergence_table, finite_hs_bound, hs_partial_sums, log_slope, resolvent_continuity, BoundaryOperator,
};
use dirac_core::{CMat, RMat, C64};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rot(t: f64) -> RMat {
    let (s, c) = t.sin_cos();
    RMat::from_row_slice(2, 2, &[c, -s, s, c])
}

fn within(start: Instant, limit: Duration) -> (bool, f64) {
    let e = start.elapsed();
    (e <= limit, e.as_secs_f64())
}

fn dictionary() -> Outcome {
    let start = Instant::now();
    let mut rng = random::rng(1);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let n = 2 + i % 5;
        let a = random::orthogonal(&mut rng, n);
        let back = orth_from_lag(&lag_from_orth_matrix(&a).unwrap()).unwrap();
        worst = worst.max((back.matrix() - &a).norm());
    }
    let mut rank_ok = true;
    for n in 2..=6 {
        let e_i = lag_from_orth(&OrthogonalPoint::identity(n));
        let e_m = lag_from_orth_matrix(&(-RMat::identity(n, n))).unwrap();
        let dual_meet = e_i.subspace().intersect(DiracStructure::v_dual(n).subspace()).unwrap();
        rank_ok &= e_i.meet_v().dim() == 0 && dual_meet.dim() == n;
        rank_ok &= e_m.meet_v().dim() == n;
    }
    let mut law_ok = true;
    for _ in 0..50 {
        let n = 6;
        let shared = (random::uniform(&mut rng, 0.0, 3.0)) as usize;
        let q = random::orthogonal(&mut rng, n);
        let mut d1 = RMat::identity(n, n);
        let mut d2 = RMat::identity(n, n);
        // Coordinates below `2 + shared` agree; a rotation plane and a sign flip differ.
        d1.view_mut((0, 0), (2, 2)).copy_from(&rot(random::uniform(&mut rng, 0.2, 3.0)));
        d2.view_mut((0, 0), (2, 2)).copy_from(&rot(random::uniform(&mut rng, 0.2, 3.0)));
        for k in 2 + shared..n {
            if k % 2 == 0 {
                d2[(k, k)] = -1.0;
            } else {
                d1[(k, k)] = -1.0;
            }
        }
        let a1 = OrthogonalPoint::new(&q * d1 * q.transpose()).unwrap();
        let a2 = OrthogonalPoint::new(&q * d2 * q.transpose()).unwrap();
        let want = shared;
        let got = intersection_dim(&a1, &a2).unwrap();
        law_ok &= got == kernel_dim_difference(&a1, &a2) && got == want;
    }
    let (fast, secs) = within(start, Duration::from_secs(5));
    outcome(
        worst <= 1e-9 && rank_ok && law_ok && fast,
        format!("round-trip {worst:.2e} (≤ 1e-9), E_I/E_-I rank {rank_ok}, intersection law {law_ok}, {secs:.2}s (< 5s)"),
    )
}

fn random_strong(rng: &mut random::Rng, n: usize, np: usize, kind: usize) -> (DiracMorphism, DiracStructure) {
    loop {
        let d = match kind % 3 {
            0 => lag_from_orth_matrix(&random::orthogonal(rng, n)).unwrap(),
            1 => DiracStructure::v_space(n),
            _ => graph_structure(&SkewPoint::new(random::skew(rng, n, 1.0)).unwrap()),
        };
        // A rank-deficient Θ keeps the V-part of the image nontrivial.
        let r = 1 + (random::uniform(rng, 0.0, np as f64) as usize).min(np - 1);
        let theta = random::gaussian(rng, np, r) * random::gaussian(rng, r, n);
        let omega = if random::uniform(rng, 0.0, 1.0) < 0.3 {
            RMat::zeros(n, n)
        } else {
            random::skew(rng, n, 1.0)
        };
        let m = DiracMorphism::new(theta, omega).unwrap();
        if is_strong(&m, &d).unwrap() {
            return (m, d);
        }
    }
}

fn parity_invariance() -> Outcome {
    let mut rng = random::rng(2);
    let mut failures = 0;
    let mut odd = 0;
    for i in 0..200 {
        let n = 1 + i % 8;
        let np = 1 + (i / 8) % 8;
        let (m, d) = random_strong(&mut rng, n, np, i);
        let img = forward_image(&m, &d).unwrap();
        if parity(&img) != parity(&d) {
            failures += 1;
        }
        if parity(&d) == dirac_core::dirac_calculus::Parity::Odd {
            odd += 1;
        }
    }
    outcome(
        failures == 0,
        format!("{failures} parity changes in 200 strong morphisms ({odd} odd inputs), dims 1-8"),
    )
}

fn multiplicativity() -> Outcome {
    let mut rng = random::rng(3);
    let mut worst_gap: f64 = 0.0;
    let mut all_strong = true;
    for i in 0..100 {
        let n = 2 + i % 4;
        let a1 = OrthogonalPoint::new(random::orthogonal(&mut rng, n)).unwrap();
        let a2 = OrthogonalPoint::new(random::orthogonal(&mut rng, n)).unwrap();
        let mm = multiplicative_morphism(&a1, &a2).unwrap();
        let src = product_structure(&a1, &a2);
        all_strong &= is_strong(&mm, &src).unwrap();
        let want = lag_from_orth_matrix(&(a1.matrix() * a2.matrix())).unwrap();
        worst_gap = worst_gap.max(forward_image(&mm, &src).unwrap().distance(&want).unwrap());
    }
    let mut worst_assoc: f64 = 0.0;
    for i in 0..50 {
        let n = 2 + i % 4;
        let a: Vec<_> = (0..3)
            .map(|_| OrthogonalPoint::new(random::orthogonal(&mut rng, n)).unwrap())
            .collect();
        worst_assoc = worst_assoc.max(associativity_check(&a[0], &a[1], &a[2]).unwrap());
    }
    outcome(
        worst_gap <= 1e-8 && all_strong && worst_assoc <= 1e-10,
        format!("gap {worst_gap:.2e} (≤ 1e-8), strong {all_strong}, associativity {worst_assoc:.2e} (≤ 1e-10)"),
    )
}

fn exponential_lift() -> Outcome {
    let j = RMat::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    let mut mismatches = 0;
    let mut flips = Vec::new();
    let mut prev: Option<bool> = None;
    for step in -100i64..=100 {
        let theta = 2.0 * PI + step as f64 * 1e-3;
        let a = SkewPoint::new(&j * theta).unwrap();
        let lift = exp_lift(&a);
        let verdict = is_strong(&lift.morphism, &graph_structure(&a)).unwrap();
        // Π has singular values |2 sin(θ/2)/θ| on the plane.
        let invertible = (2.0 * (theta / 2.0).sin() / theta).abs() > 1e-9;
        if verdict != invertible || verdict != lift.is_strong {
            mismatches += 1;
        }
        if let Some(p) = prev {
            if p != verdict {
                flips.push(theta);
            }
        }
        prev = Some(verdict);
    }
    let flip_ok = !flips.is_empty() && flips.iter().all(|t| (t - 2.0 * PI).abs() <= 1e-3 + 1e-12);
    let mut rng = random::rng(4);
    let mut worst: f64 = 0.0;
    for i in 0..60 {
        let n = 1 + i % 6;
        let a = SkewPoint::new(random::skew(&mut rng, n, 2.0)).unwrap();
        let xi = random::gaussian(&mut rng, n, 1).column(0).into_owned();
        worst = worst.max(exp_witness_residual(&a, &xi));
    }
    outcome(
        mismatches == 0 && flip_ok && worst <= 1e-10,
        format!(
            "{mismatches} verdict mismatches on 201-point sweep, flips at θ-2π = {:?}, witness {worst:.2e} (≤ 1e-10)",
            flips.iter().map(|t| format!("{:.0e}", t - 2.0 * PI)).collect::<Vec<_>>()
        ),
    )
}

fn boundary_spectra() -> Outcome {
    let start = Instant::now();
    let mut rng = random::rng(5);
    let cases = [
        BoundaryOperator::scalar(0.0),
        BoundaryOperator::scalar(0.3),
        BoundaryOperator::new(random::unitary(&mut rng, 2)).unwrap(),
        BoundaryOperator::real(&random::orthogonal(&mut rng, 2)).unwrap(),
    ];
    let mut worst_err: f64 = 0.0;
    let mut worst_ratio = f64::INFINITY;
    for b in &cases {
        let t = convergence_table(b, &[1000, 2000], 10).unwrap();
        worst_err = worst_err.max(t[1].max_rel_error);
        worst_ratio = worst_ratio.min(t[0].max_rel_error / t[1].max_rel_error);
    }
    let (fast, secs) = within(start, Duration::from_secs(60));
    outcome(
        worst_err <= 1e-3 && worst_ratio >= 3.5 && fast,
        format!("max rel error at N=2000 {worst_err:.2e} (≤ 1e-3), min ratio {worst_ratio:.3} (≥ 3.5), {secs:.2}s (< 60s)"),
    )
}

fn hs_dichotomy() -> Outcome {
    let ms = [1_000, 10_000, 100_000];
    let one = BoundaryOperator::scalar(0.0);
    let minus_one = BoundaryOperator::scalar(0.5);
    let sums = hs_partial_sums(&one, &minus_one, &ms).unwrap();
    let slope = log_slope(&ms, &sums, 1_000, 100_000);
    // Terms |e^{2πiΔ} − 1|²/(4π²(Δ − d)²) with about d pairs per offset d:
    // the sum grows like sin²(πΔ)/π² · ln M.
    let delta: f64 = 0.5;
    let coeff = (PI * delta).sin().powi(2) / (PI * PI);
    let rel = (slope - coeff).abs() / coeff;
    let growing = sums.windows(2).all(|w| w[1] > w[0]);
    let same = hs_partial_sums(&one, &one, &ms).unwrap();
    let zero = same.iter().all(|&s| s == 0.0);
    outcome(
        rel <= 0.25 && growing && zero,
        format!(
            "slope {slope:.5} vs 1/π² = {coeff:.5} (rel {rel:.3} ≤ 0.25), sums {:?}, A′ = A sum zero {zero}",
            sums.iter().map(|s| format!("{s:.4}")).collect::<Vec<_>>()
        ),
    )
}

fn finite_hs() -> Outcome {
    let mut rng = random::rng(7);
    let mut done = 0;
    let mut violations = 0;
    let mut worst_ratio: f64 = 0.0;
    while done < 200 {
        let dim = 1 + (random::uniform(&mut rng, 0.0, 20.0) as usize).min(19);
        let d = random::antihermitian_with_gap(&mut rng, dim, 0.1, 2.0);
        let scale = random::uniform(&mut rng, 0.001, 0.2);
        let q = random::antihermitian(&mut rng, dim, scale);
        let Ok(b) = finite_hs_bound(&d, &q) else { continue };
        if b.gap < 0.1 {
            continue;
        }
        if !b.holds() {
            violations += 1;
        }
        worst_ratio = worst_ratio.max(b.lhs / b.rhs);
        done += 1;
    }
    outcome(
        violations == 0,
        format!("{violations} violations in 200 instances, max lhs/rhs {worst_ratio:.3}"),
    )
}

fn resolvent() -> Outcome {
    let mut rng = random::rng(8);
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let n = 1 + i % 2;
        let b = BoundaryOperator::new(random::unitary(&mut rng, n)).unwrap();
        let scale = random::uniform(&mut rng, 0.01, 1.0);
        let a = random::antihermitian(&mut rng, n, scale);
        let r = resolvent_continuity(&b, &a, 512).unwrap();
        if !r.holds() {
            violations += 1;
        }
        worst = worst.max(r.lhs / r.rhs);
    }
    outcome(violations == 0, format!("{violations} violations in 50 instances at N=512, max lhs/(3‖a‖) {worst:.3}"))
}

fn fock_wedge() -> Outcome {
    let car = car_check(6).unwrap();
    let mut rng = random::rng(9);
    let mut weight_fail = 0;
    for _ in 0..1000 {
        let added: Vec<i64> = (1..=20).filter(|_| random::uniform(&mut rng, 0.0, 1.0) < 0.3).collect();
        let removed: Vec<i64> = (-19..=0).filter(|_| random::uniform(&mut rng, 0.0, 1.0) < 0.3).collect();
        let k = WedgeState::new(added, removed).unwrap();
        if k.shift().weight() != k.weight() + 1 {
            weight_fail += 1;
        }
    }
    let tau = tau_check(6).unwrap();
    let w0 = so2_weights(0.0, 6).unwrap();
    let w1 = so2_weights(1.0, 6).unwrap();
    let ladder = w0.iter().zip(&w1).all(|(a, b)| *b == a + 1);
    outcome(
        car.passed() && weight_fail == 0 && tau.passed() && ladder,
        format!(
            "CAR violations {} over {} checks, weight-shift failures {weight_fail}/1000, τ violations {}, s=1 ladder shifted {ladder}",
            car.violations + car.square_violations + car.grading_violations,
            car.checks,
            tau.violations + tau.weight_violations
        ),
    )
}

fn qham_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = random::rng(10);
    let su2 = GroupContext::su2();
    let so3 = GroupContext::so3();
    let mut verified: Vec<(GroupContext, PointedQHam)> = Vec::new();
    let mut class_fail = 0;
    let mut worst_res: f64 = 0.0;
    let mut check = |ctx: &GroupContext, p: PointedQHam, fails: &mut usize, worst: &mut f64| {
        let r = verify_qham(ctx, &p, QHAM_TOL).unwrap();
        *worst = worst.max(r.dirac_residual).max(r.moment_residual).max(r.action_residual);
        let ok = r.passed() && r.moment_residual <= 1e-9 && r.action_residual <= 1e-9;
        if ok {
            verified.push((ctx.clone(), p));
        } else {
            *fails += 1;
        }
    };
    let half_turn = to_complex(&RMat::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0]));
    check(&so3, conjugacy_class_data(&so3, &half_turn).unwrap(), &mut class_fail, &mut worst_res);
    let diag = CMat::from_diagonal(&dirac_core::CVec::from_vec(vec![C64::from_polar(1.0, 1.0), C64::from_polar(1.0, -1.0)]));
    check(&su2, conjugacy_class_data(&su2, &diag).unwrap(), &mut class_fail, &mut worst_res);
    for _ in 0..20 {
        for ctx in [&su2, &so3] {
            let g = ctx.random_element(&mut rng, 1.2);
            check(ctx, conjugacy_class_data(ctx, &g).unwrap(), &mut class_fail, &mut worst_res);
        }
    }
    let mut fusion_fail = 0;
    for _ in 0..10 {
        for ctx in [&su2, &so3] {
            let p1 = conjugacy_class_data(ctx, &ctx.random_element(&mut rng, 1.0)).unwrap();
            let p2 = conjugacy_class_data(ctx, &ctx.random_element(&mut rng, 1.0)).unwrap();
            check(ctx, fusion(ctx, &p1, &p2).unwrap(), &mut fusion_fail, &mut worst_res);
        }
    }
    let parity_fail = verified
        .iter()
        .filter(|(ctx, p)| {
            let det = dirac_core::group_moment::adjoint(ctx, &p.g).unwrap().matrix().determinant();
            (if p.t_dim() % 2 == 0 { 1.0 } else { -1.0 } - det).abs() > 1e-9
        })
        .count();
    let mut red_worst: f64 = 0.0;
    let mut red_fail = 0;
    for i in 0..100 {
        let n = 1 + i % 3;
        let r_max = (12 - 2 * n) / 2;
        let r = 2 * (random::uniform(&mut rng, 0.0, (r_max + 1) as f64) as usize).min(r_max);
        let s = synthetic_reduction(&mut rng, r, n, true).unwrap();
        let res = reduction_normal_form(&s.instance).unwrap();
        let worst = res.block_residual.max(s.recovery_residual(&res));
        red_worst = red_worst.max(worst);
        if !(res.isotropic && worst <= 1e-9 && res.standard_residual <= 1e-9) {
            red_fail += 1;
        }
    }
    let (fast, secs) = within(start, Duration::from_secs(30));
    outcome(
        class_fail == 0 && fusion_fail == 0 && parity_fail == 0 && red_fail == 0 && fast,
        format!(
            "class failures {class_fail}, fusion failures {fusion_fail}, worst residual {worst_res:.2e} (≤ 1e-9), parity failures {parity_fail}/{}, reduction failures {red_fail}/100 (worst {red_worst:.2e} ≤ 1e-9), {secs:.2}s (< 30s)",
            verified.len()
        ),
    )
}

fn symplectic() -> Outcome {
    let mut rng = random::rng(11);
    let mut margin = f64::INFINITY;
    let mut min_sv = f64::INFINITY;
    let mut done = 0;
    while done < 20 {
        let n = if done % 2 == 0 { 4 } else { 6 };
        let r = random::skew(&mut rng, n, 1.0);
        if singular_values(&r)[n - 1] < 1e-3 {
            continue;
        }
        let r = SkewPoint::new(r).unwrap();
        for i in 0..50 {
            let p = symplectic_path(&r, i as f64 / 49.0).unwrap();
            margin = margin.min(p.margin);
            min_sv = min_sv.min(p.min_sv_a).min(p.min_sv_tilde);
        }
        done += 1;
    }
    outcome(
        margin >= -1e-10 && min_sv >= 1e-6,
        format!("min margin {margin:.2e} (≥ -1e-10), min σ(JA+I) {min_sv:.2e} (≥ 1e-6)"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("E_A dictionary", dictionary),
        ("parity invariance", parity_invariance),
        ("multiplicativity", multiplicativity),
        ("exponential lift", exponential_lift),
        ("boundary spectra", boundary_spectra),
        ("HS dichotomy", hs_dichotomy),
        ("finite HS bound", finite_hs),
        ("resolvent bound", resolvent),
        ("Fock/wedge", fock_wedge),
        ("q-Hamiltonian suite", qham_suite),
        ("symplectic path", symplectic),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("{} {:>2}. {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
