use nfix_core::estimate::{contraction_constant, operator_norm, NormMethod, NormValue};
use nfix_core::harness::{
    check_axiom_suite, check_axiom_suite_with, check_banach_reduction, check_bounded_iff_continuous,
    check_bounded_sets, check_contractive_ratio, check_planar_determinant, check_product_ball_lemma,
    squared_gram_norm, FamilyMember, OperatorFamily, ProductBallLemma, ReductionProblem,
};
use nfix_core::nnorm::{AnchoredSpace, SequencePrefix};
use nfix_core::operator::{Matrix, OperatorSpec};
use nfix_core::solver::{
    ball_solve, edelstein_solve, kannan_solve, picard_solve, summable_solve, Coefficients, Regime,
    SolverConfig,
};
use nfix_core::{gram_nnorm, Error, Vector};

fn v(c: &[f64]) -> Vector {
    Vector::new(c.to_vec()).unwrap()
}

/// Determinant by cofactor expansion along the first row.
fn cofactor_det(m: &[Vec<f64>]) -> f64 {
    if m.len() == 1 {
        return m[0][0];
    }
    (0..m.len())
        .map(|j| {
            let minor: Vec<Vec<f64>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| *x).collect())
                .collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[0][j] * cofactor_det(&minor)
        })
        .sum()
}

fn gram_oracle(vs: &[Vector]) -> f64 {
    let g: Vec<Vec<f64>> = vs
        .iter()
        .map(|a| vs.iter().map(|b| a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y).sum()).collect())
        .collect();
    cofactor_det(&g).max(0.0).sqrt()
}

fn half_plus_e1() -> (OperatorSpec, AnchoredSpace) {
    let op = OperatorSpec::affine(Matrix::diagonal(&[0.5, 0.5, 0.5]), v(&[1.0, 0.0, 0.0])).unwrap();
    (op, AnchoredSpace::standard(3, 3).unwrap())
}

#[test]
fn gram_norm_matches_cofactor_oracle() {
    let cases: Vec<Vec<Vector>> = vec![
        vec![v(&[5.0, 1.0, 2.0]), v(&[0.0, 1.0, 0.0]), v(&[0.0, 0.0, 1.0])],
        vec![v(&[2.0, 0.0]), v(&[0.0, 3.0])],
        vec![v(&[1.0, 2.0, 3.0, 4.0]), v(&[-1.0, 0.5, 2.0, 0.0]), v(&[3.0, 1.0, -2.0, 1.0])],
        vec![v(&[1.0, 1.0, 0.0]), v(&[1.0, -1.0, 0.0])],
    ];
    for t in &cases {
        let (g, o) = (gram_nnorm(t).unwrap(), gram_oracle(t));
        assert!((g - o).abs() <= 1e-12 * o.max(1.0), "{g} vs {o}");
    }
    assert_eq!(gram_nnorm(&cases[0]).unwrap(), 5.0);
    assert_eq!(gram_nnorm(&cases[1]).unwrap(), 6.0);
}

#[test]
fn orthonormal_full_tuple_has_unit_norm() {
    let t: Vec<Vector> = (0..4).map(|i| Vector::basis(4, i)).collect();
    assert_eq!(gram_nnorm(&t).unwrap(), 1.0);
}

#[test]
fn cauchy_tail_and_limit_of_halving_sequence() {
    let space = AnchoredSpace::standard(3, 3).unwrap();
    let items: Vec<Vector> = (1..=10).map(|k| v(&[2f64.powi(1 - k), 7.0 * k as f64, 0.0])).collect();
    let mut oracle = 0.0_f64;
    for a in &items {
        for b in &items {
            oracle = oracle.max((a[0] - b[0]).abs());
        }
    }
    let seq = SequencePrefix::new(space, items).unwrap();
    assert_eq!(oracle, 0.998046875);
    assert_eq!(seq.b_cauchy_tail(1).unwrap(), oracle);
    assert_eq!(seq.b_limit_estimate(&Vector::zeros(3)).unwrap(), 2f64.powi(-9));
}

#[test]
fn picard_envelope_is_tight_on_half_plus_e1() {
    let (op, space) = half_plus_e1();
    let cfg = SolverConfig::new(Regime::Picard { alpha: Some(0.5) })
        .with_tol(1e-300)
        .with_max_iter(40)
        .recording_iterates();
    let report = picard_solve(&op, &space, &Vector::zeros(3), &cfg).unwrap();
    assert!(!report.converged);
    let star = v(&[2.0, 0.0, 0.0]);
    for row in &report.trace {
        let err = space.distance(&report.iterates[row.k], &star).unwrap();
        let closed = 2f64.powi(1 - row.k as i32);
        assert!((err - closed).abs() <= 1e-12, "k={}", row.k);
        assert!((row.apriori - closed).abs() <= 1e-12, "k={}", row.k);
    }
    let cfg = SolverConfig::new(Regime::Picard { alpha: Some(0.5) });
    let report = picard_solve(&op, &space, &Vector::zeros(3), &cfg).unwrap();
    assert!(report.converged);
    assert_eq!(report.iterations, 35);
    assert_eq!(report.trace.len(), 35);
    assert!(space.distance(&report.fixed_point, &star).unwrap() <= 1e-10);
}

#[test]
fn ball_solver_containment_and_precondition() {
    let (op, space) = half_plus_e1();
    let x0 = Vector::zeros(3);
    let cfg = SolverConfig::new(Regime::Ball { alpha: 0.5, radius: 3.0 }).recording_iterates();
    let report = ball_solve(&op, &space, &x0, &cfg).unwrap();
    for (k, x) in report.iterates.iter().enumerate() {
        let d = space.distance(&x0, x).unwrap();
        assert!(d <= (1.0 - 0.5f64.powi(k as i32)) * 3.0 + 1e-9);
    }
    let m = report.max_containment.unwrap();
    assert!(m < 2.0 && m > 2.0 - 1e-9);

    let cfg = SolverConfig::new(Regime::Ball { alpha: 0.5, radius: 1.5 });
    match ball_solve(&op, &space, &x0, &cfg) {
        Err(Error::BallPrecondition { lhs, rhs }) => {
            assert_eq!((lhs, rhs), (1.0, 0.75));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn kannan_quarter_scale_bound_and_beta_hat() {
    let space = AnchoredSpace::standard(3, 3).unwrap();
    let op = OperatorSpec::builtin("scale", &[0.25]).unwrap();
    // grid oracle for sup |a s - a t| / ((1-a)(|s| + |t|)) with a = 1/4
    let a = 0.25;
    let mut grid_sup = 0.0_f64;
    for i in -40..=40 {
        for j in -40..=40 {
            let (s, t) = (i as f64 / 8.0, j as f64 / 8.0);
            if s.abs() + t.abs() > 0.0 {
                grid_sup = grid_sup.max(a * (s - t).abs() / ((1.0 - a) * (s.abs() + t.abs())));
            }
        }
    }
    assert!((grid_sup - 1.0 / 3.0).abs() < 1e-15);
    let est = contraction_constant(&op, &space, 2000, 3).unwrap();
    assert!(est.beta_hat <= grid_sup + 1e-12);

    let x0 = v(&[1.0, 4.0, -2.0]);
    let cfg = SolverConfig::new(Regime::Kannan { beta: Some(1.0 / 3.0) })
        .with_tol(1e-12)
        .recording_iterates();
    let report = kannan_solve(&op, &space, &x0, &cfg).unwrap();
    assert!(report.converged);
    let s0 = space.seminorm(&x0).unwrap();
    for row in &report.trace {
        let err = space.seminorm(&report.iterates[row.k]).unwrap();
        let bound = 2.0 * 0.5f64.powi(row.k as i32) * 0.75 * s0;
        assert!((err - 0.25f64.powi(row.k as i32) * s0).abs() < 1e-15);
        assert!(err <= bound && (row.apriori - bound).abs() <= 1e-12 * bound.max(1.0));
    }
    for w in report.trace.windows(2) {
        assert!(w[1].residual <= 0.5 * w[0].residual + 1e-12);
    }
}

#[test]
fn kannan_slow_beta_iteration_count() {
    let space = AnchoredSpace::standard(3, 3).unwrap();
    let op = OperatorSpec::builtin("scale", &[0.25]).unwrap();
    let x0 = v(&[1.0, 0.0, 0.0]);
    let tol = 1e-10;
    let beta = 0.49;
    let r: f64 = beta / (1.0 - beta);
    let res0 = 0.75;
    let expected = ((tol * (1.0 - r) / res0).ln() / r.ln()).ceil() as usize;
    let cfg = SolverConfig::new(Regime::Kannan { beta: Some(beta) }).with_tol(tol);
    let report = kannan_solve(&op, &space, &x0, &cfg).unwrap();
    assert!(report.converged);
    assert_eq!(report.iterations, expected);
}

#[test]
fn summable_geometric_reproduces_picard_exactly() {
    let (op, space) = half_plus_e1();
    let problem = ReductionProblem { op: op.clone(), space: space.clone(), x0: Vector::zeros(3), alpha: 0.5 };
    assert!(check_banach_reduction(&problem, 1e-10, 0).unwrap().passed());

    let p = picard_solve(&op, &space, &Vector::zeros(3), &SolverConfig::new(Regime::Picard { alpha: Some(0.5) })).unwrap();
    let q = summable_solve(
        &op,
        &space,
        &Vector::zeros(3),
        &SolverConfig::new(Regime::Summable { coefficients: Coefficients::Geometric { ratio: 0.5 } }),
    )
    .unwrap();
    assert_eq!(p.trace, q.trace);
    assert_eq!(p.fixed_point, q.fixed_point);

    let slow = ReductionProblem {
        op: OperatorSpec::affine(Matrix::diagonal(&[0.99; 3]), v(&[1.0, 2.0, 0.0])).unwrap(),
        space,
        x0: v(&[3.0, -1.0, 5.0]),
        alpha: 0.99,
    };
    assert!(check_banach_reduction(&slow, 1e-10, 0).unwrap().passed());
}

#[test]
fn constant_map_solves_in_one_step() {
    let (_, space) = half_plus_e1();
    let op = OperatorSpec::builtin("constant", &[4.0, 1.0, 1.0]).unwrap();
    let x0 = v(&[-3.0, 0.0, 0.0]);
    let p = picard_solve(&op, &space, &x0, &SolverConfig::new(Regime::Picard { alpha: Some(0.5) })).unwrap();
    assert_eq!(p.fixed_point, v(&[4.0, 1.0, 1.0]));
    assert_eq!(p.fixed_point_residual, 0.0);
    let problem = ReductionProblem { op, space, x0, alpha: 0.5 };
    assert!(check_banach_reduction(&problem, 1e-10, 0).unwrap().passed());
}

#[test]
fn edelstein_saturating_closed_form() {
    let space = AnchoredSpace::standard(3, 3).unwrap();
    let op = OperatorSpec::builtin("saturating", &[]).unwrap();
    let cfg = SolverConfig::new(Regime::Edelstein).with_tol(1e-6).with_max_iter(1100);
    let report = edelstein_solve(&op, &space, &v(&[1.0, 0.0, 0.0]), &cfg).unwrap();
    // residual after k steps is 1/((1+k)(2+k)); first <= 1e-6 at k = 999
    let first = (0..).find(|k| 1.0 / ((1.0 + *k as f64) * (2.0 + *k as f64)) <= 1e-6).unwrap();
    assert_eq!(first, 999);
    assert!(report.converged);
    assert_eq!(report.iterations, first);
    assert!(report.certified_error.is_none());
    for (k, row) in report.trace.iter().enumerate().take(100) {
        let k = (k + 1) as f64;
        let closed = 1.0 / ((1.0 + k) * (2.0 + k));
        assert!((row.residual - closed).abs() <= 1e-15);
    }
}

fn isometry() -> (OperatorSpec, AnchoredSpace) {
    let space = AnchoredSpace::standard(4, 3).unwrap();
    let op = OperatorSpec::builtin("rotation-scale", &[0.0, 3.0, 1.0, 1.0]).unwrap();
    (op, space)
}

#[test]
fn edelstein_isometry_does_not_converge() {
    let (op, space) = isometry();
    let x0 = v(&[1.0, 0.0, 0.0, 0.0]);
    let cfg = SolverConfig::new(Regime::Edelstein).with_tol(1e-6).with_max_iter(100);
    let report = edelstein_solve(&op, &space, &x0, &cfg).unwrap();
    assert!(!report.converged);
    let r0 = report.trace[0].residual;
    assert!(report.trace.iter().all(|r| (r.residual - r0).abs() <= 1e-12));
    assert!(report.ratios.iter().all(|f| (f - 1.0).abs() <= 1e-12));
    let check = check_contractive_ratio(&op, &space, &x0, 200, 100, 9).unwrap();
    assert!(!check.passed());
    assert!(check.worst_violation >= -1e-12);
}

#[test]
fn contractive_ratio_on_saturating_and_half() {
    let space = AnchoredSpace::standard(3, 3).unwrap();
    let x0 = v(&[1.0, 0.0, 0.0]);
    let sat = OperatorSpec::builtin("saturating", &[]).unwrap();
    let r = check_contractive_ratio(&sat, &space, &x0, 500, 1100, 4).unwrap();
    assert!(r.passed(), "{r:?}");
    let half = OperatorSpec::builtin("scale", &[0.5]).unwrap();
    let r = check_contractive_ratio(&half, &space, &x0, 200, 1000, 4).unwrap();
    assert!(r.passed());
    assert!((r.worst_violation - (0.5 - 1.0 + 1e-9)).abs() < 1e-12);
}

#[test]
fn operator_norm_methods_on_diag_and_identity() {
    let space = AnchoredSpace::standard(3, 3).unwrap();
    let diag = OperatorSpec::linear(Matrix::diagonal(&[2.0, 1.0, 1.0]));
    let id = OperatorSpec::linear(Matrix::identity(3));
    for m in NormMethod::ALL {
        let d = operator_norm(&diag, &space, m, 10_000, 1).unwrap().value.finite().unwrap();
        assert!((d - 2.0).abs() <= 0.04, "{m:?} {d}");
        let i = operator_norm(&id, &space, m, 10_000, 1).unwrap().value.finite().unwrap();
        assert!((i - 1.0).abs() <= 1e-12 || m == NormMethod::I && (i - 1.0).abs() <= 0.02);
    }
}

#[test]
fn kernel_violator_is_infinite_and_flagged() {
    let space = AnchoredSpace::standard(3, 3).unwrap();
    let swap = OperatorSpec::linear(
        Matrix::from_rows(vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap(),
    );
    for m in NormMethod::ALL {
        assert_eq!(operator_norm(&swap, &space, m, 100, 0).unwrap().value, NormValue::Infinite);
    }
    let family = OperatorFamily::Fixed(vec![FamilyMember { op: swap, space, norm: None }]);
    let r = check_bounded_iff_continuous(&family, 3, 0).unwrap();
    assert_eq!(r.failures, 3);
    assert!(r.counterexample.is_some());
    let r = check_bounded_sets(&family, 3, 0).unwrap();
    assert_eq!(r.failures, 3);
}

#[test]
fn bounded_suites_pass_on_diag_zero_and_random() {
    let space = AnchoredSpace::standard(3, 3).unwrap();
    let family = OperatorFamily::Fixed(vec![
        FamilyMember { op: OperatorSpec::linear(Matrix::diagonal(&[2.0, 1.0, 1.0])), space: space.clone(), norm: Some(2.0) },
        FamilyMember { op: OperatorSpec::linear(Matrix::zeros(3)), space, norm: None },
    ]);
    assert!(check_bounded_iff_continuous(&family, 20, 1).unwrap().passed());
    assert!(check_bounded_sets(&family, 20, 1).unwrap().passed());
    let random = OperatorFamily::RandomKernelPreserving { dim: 4, order: 3 };
    assert!(check_bounded_iff_continuous(&random, 50, 2).unwrap().passed());
    assert!(check_bounded_sets(&random, 50, 2).unwrap().passed());
}

#[test]
fn product_ball_margins() {
    let left = AnchoredSpace::standard(3, 2).unwrap();
    let right = AnchoredSpace::new(3, 2, vec![v(&[0.0, 0.0, 1.0])]).unwrap();
    let lemma = |r: f64| ProductBallLemma {
        left: left.clone(),
        right: right.clone(),
        x0: v(&[1.0, 2.0, 3.0]),
        y0: v(&[-1.0, 0.0, 0.5]),
        r,
        r_prime: r,
        r1: 1.0,
    };
    let rep = check_product_ball_lemma(&lemma(0.4), 1000, 8).unwrap();
    assert!(rep.passed() && rep.worst_violation <= -0.2 + 1e-9);
    let eps = 1e-3;
    let rep = check_product_ball_lemma(&lemma(0.5 - eps), 1000, 8).unwrap();
    assert!(rep.passed() && rep.worst_violation <= -2.0 * eps + 1e-9);
    assert!(matches!(
        check_product_ball_lemma(&lemma(0.6), 10, 8),
        Err(Error::ProductRadii { .. })
    ));
}

#[test]
fn harness_reports_are_reproducible_and_catch_mutants() {
    let a = check_axiom_suite(5, 3, 300, 11).unwrap();
    let b = check_axiom_suite(5, 3, 300, 11).unwrap();
    assert_eq!(a, b);
    assert!(a.iter().all(|r| r.passed() && r.counterexample.is_none()));
    assert!(check_planar_determinant(500, 3).passed());
    let broken = check_axiom_suite_with(&squared_gram_norm, 4, 3, 50, 11).unwrap();
    assert!(broken[2].failures > 0);
    let cx = broken[2].counterexample.as_ref().unwrap();
    assert!(cx.note.contains("alpha"));
}
