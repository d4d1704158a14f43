//! Seeded property suites. Each suite samples instances, checks one
//! property on them and returns a [`PropertyReport`].
//!
//! A report is a pure function of its arguments and seed: rerunning with the
//! same seed reproduces `worst_violation` and the counterexample exactly.
//! `worst_violation` is the largest signed excess over the allowed bound, so
//! it is negative (a margin) when every trial passes.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::estimate::{contraction_ratio, continuity_probe, operator_norm, NormMethod};
use crate::linalg::orthonormalize;
use crate::nnorm::{product_nnorm, AnchoredSpace, ProductPoint};
use crate::operator::{apply, describe, Matrix, OperatorSpec};
use crate::sampling::Sampler;
use crate::solver::{
    edelstein_solve, picard_solve, summable_solve, Coefficients, Regime, SolverConfig,
};
use crate::{gram_determinant, gram_nnorm, Error, Result, Vector};

/// Default number of trials per property.
pub const DEFAULT_TRIALS: usize = 1000;

/// Relative tolerance for permutation symmetry and homogeneity.
pub const RELATIVE_TOL: f64 = 1e-12;
/// Absolute slack for triangle-type inequalities.
pub const ABSOLUTE_SLACK: f64 = 1e-9;
/// Dependent tuples must have n-norm at most this times the product of
/// their lengths.
pub const DEPENDENCE_TOL: f64 = 1e-9;
/// Contractive-ratio checks flag any `f >= 1 - RATIO_MARGIN`.
pub const RATIO_MARGIN: f64 = 1e-9;

/// Minimum normalised volume `||x_1..x_n|| / prod |x_i|` of the random
/// independent tuples fed to the tolerance-sensitive checks.
const CONDITION_FLOOR: f64 = 1e-2;

/// Sample budget for operator norms the harness has to estimate.
const NORM_BUDGET: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub note: String,
    pub inputs: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property_id: String,
    pub trials: usize,
    pub failures: usize,
    pub worst_violation: f64,
    pub counterexample: Option<Counterexample>,
    pub seed: u64,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

struct Tally {
    report: PropertyReport,
    worst_failure: f64,
}

impl Tally {
    fn new(id: &str, seed: u64) -> Self {
        Self {
            report: PropertyReport {
                property_id: String::from(id),
                trials: 0,
                failures: 0,
                worst_violation: f64::NEG_INFINITY,
                counterexample: None,
                seed,
            },
            worst_failure: f64::NEG_INFINITY,
        }
    }

    /// Records one trial; `failed` trials keep the counterexample of the
    /// largest violation.
    fn record(&mut self, violation: f64, failed: bool, witness: impl FnOnce() -> Counterexample) {
        let r = &mut self.report;
        r.trials += 1;
        r.worst_violation = r.worst_violation.max(violation);
        if failed {
            r.failures += 1;
            if r.counterexample.is_none() || violation > self.worst_failure {
                self.worst_failure = violation;
                r.counterexample = Some(witness());
            }
        }
    }

    fn check(&mut self, violation: f64, witness: impl FnOnce() -> Counterexample) {
        // NaN counts as a failure
        let failed = !(violation <= 0.0);
        self.record(violation, failed, witness);
    }

    fn finish(mut self) -> PropertyReport {
        if !self.report.worst_violation.is_finite() {
            self.report.worst_violation = if self.report.worst_violation > 0.0 {
                f64::MAX
            } else {
                0.0
            };
        }
        self.report
    }
}

fn witness(note: String, inputs: &[&[f64]]) -> Counterexample {
    Counterexample {
        note,
        inputs: inputs.iter().map(|v| v.to_vec()).collect(),
    }
}

fn product_len(vs: &[Vector]) -> f64 {
    vs.iter().map(Vector::norm2).product()
}

/// Random n-tuple in `R^d` whose normalised volume is at least the
/// condition floor.
fn conditioned_tuple(s: &mut Sampler, dim: usize, order: usize) -> Vec<Vector> {
    loop {
        let t: Vec<Vector> = (0..order).map(|_| s.gaussian_vector(dim)).collect();
        let g = gram_nnorm(&t).unwrap_or(0.0);
        if g >= CONDITION_FLOOR * product_len(&t) {
            return t;
        }
    }
}

fn slices(vs: &[Vector]) -> Vec<&[f64]> {
    vs.iter().map(Vector::as_slice).collect()
}

/// A candidate n-norm under test.
pub type NormFn<'a> = &'a dyn Fn(&[Vector]) -> f64;

/// The Gram n-norm as a [`NormFn`].
pub fn gram_norm(vs: &[Vector]) -> f64 {
    gram_nnorm(vs).expect("valid tuple")
}

/// A deliberately broken n-norm: the Gram determinant without the square
/// root. Fails homogeneity with `|α|^2` scaling.
pub fn squared_gram_norm(vs: &[Vector]) -> f64 {
    gram_determinant(vs).expect("valid tuple").max(0.0)
}

/// Axioms N1-N4 of the Gram n-norm on random tuples in `R^dim`.
pub fn check_axiom_suite(dim: usize, order: usize, trials: usize, seed: u64) -> Result<Vec<PropertyReport>> {
    check_axiom_suite_with(&gram_norm, dim, order, trials, seed)
}

/// Axioms N1-N4 for an arbitrary candidate norm.
///
/// * N1: a tuple whose last vector is a random combination of the others has
///   norm at most `1e-9 * prod |x_i|`; a conditioned random tuple has
///   positive norm.
/// * N2: a random permutation changes the norm by at most `1e-12` relative.
/// * N3: scaling `x_1` by `α ∈ [-10, 10]` scales the norm by `|α|` to `1e-12`
///   relative.
/// * N4: `||x + y, ...|| <= ||x, ...|| + ||y, ...|| + 1e-9`.
pub fn check_axiom_suite_with(
    norm: NormFn<'_>,
    dim: usize,
    order: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<PropertyReport>> {
    if order < 1 || order > dim {
        return Err(Error::InvalidOrder { order, dim });
    }
    let mut s = Sampler::new(seed);
    let mut n1 = Tally::new("N1-dependence", seed);
    let mut n2 = Tally::new("N2-permutation", seed);
    let mut n3 = Tally::new("N3-homogeneity", seed);
    let mut n4 = Tally::new("N4-triangle", seed);
    for _ in 0..trials {
        // N1
        let mut dependent: Vec<Vector> = (0..order - 1).map(|_| s.gaussian_vector(dim)).collect();
        let mut combo = Vector::zeros(dim);
        for v in &dependent {
            combo = combo.add_scaled(s.normal(), v);
        }
        dependent.push(combo);
        let independent = conditioned_tuple(&mut s, dim, order);
        let g_dep = norm(&dependent);
        let g_ind = norm(&independent);
        let dep_excess = g_dep - DEPENDENCE_TOL * product_len(&dependent).max(1.0);
        let ind_excess = if g_ind > 0.0 { -g_ind / product_len(&independent) } else { 1.0 };
        n1.check(dep_excess.max(ind_excess), || {
            if dep_excess > 0.0 {
                witness(format!("dependent tuple has norm {g_dep}"), &slices(&dependent))
            } else {
                witness(format!("independent tuple has norm {g_ind}"), &slices(&independent))
            }
        });

        // N2
        let t = conditioned_tuple(&mut s, dim, order);
        let perm = s.permutation(order);
        let permuted: Vec<Vector> = perm.iter().map(|&i| t[i].clone()).collect();
        let (g, gp) = (norm(&t), norm(&permuted));
        n2.check((g - gp).abs() - RELATIVE_TOL * g, || {
            witness(format!("norm {g} vs permuted {gp} (order {perm:?})"), &slices(&t))
        });

        // N3
        let t = conditioned_tuple(&mut s, dim, order);
        let alpha = s.uniform(-10.0, 10.0);
        let mut scaled = t.clone();
        scaled[0] = alpha * &t[0];
        let (g, ga) = (norm(&t), norm(&scaled));
        let expected = alpha.abs() * g;
        n3.check((ga - expected).abs() - RELATIVE_TOL * expected, || {
            witness(
                format!("alpha = {alpha}: ||alpha x_1, ...|| = {ga}, |alpha| ||x_1, ...|| = {expected}"),
                &slices(&t),
            )
        });

        // N4
        let rest = conditioned_tuple(&mut s, dim, order);
        let x = rest[0].clone();
        let y = s.gaussian_vector(dim);
        let with = |head: Vector| {
            let mut t = rest.clone();
            t[0] = head;
            norm(&t)
        };
        let (gxy, gx, gy) = (with(&x + &y), with(x.clone()), with(y.clone()));
        n4.check(gxy - gx - gy - ABSOLUTE_SLACK, || {
            let mut inputs = vec![x.as_slice(), y.as_slice()];
            inputs.extend(rest[1..].iter().map(Vector::as_slice));
            witness(format!("||x+y,..|| = {gxy} > {gx} + {gy}"), &inputs)
        });
    }
    Ok(vec![n1.finish(), n2.finish(), n3.finish(), n4.finish()])
}

/// For `n = d = 2`, the Gram n-norm equals `|ad - bc|` to `1e-12` relative.
pub fn check_planar_determinant(trials: usize, seed: u64) -> PropertyReport {
    let mut s = Sampler::new(seed);
    let mut tally = Tally::new("planar-determinant", seed);
    for _ in 0..trials {
        let t = conditioned_tuple(&mut s, 2, 2);
        let (a, b, c, d) = (t[0][0], t[0][1], t[1][0], t[1][1]);
        let det = (a * d - b * c).abs();
        let g = gram_norm(&t);
        tally.check((g - det).abs() - RELATIVE_TOL * det, || {
            witness(format!("gram {g} vs |ad - bc| {det}"), &slices(&t))
        });
    }
    tally.finish()
}

/// Random anchored space: `order - 1` Gaussian anchors in `R^dim`.
pub fn random_space(dim: usize, order: usize, seed: u64) -> Result<AnchoredSpace> {
    let mut s = Sampler::new(seed);
    loop {
        let anchors: Vec<Vector> = (0..order - 1).map(|_| s.gaussian_vector(dim)).collect();
        match AnchoredSpace::new(dim, order, anchors) {
            Err(Error::DependentAnchors) => continue,
            other => return other,
        }
    }
}

fn random_orthogonal(s: &mut Sampler, m: usize) -> Vec<Vec<f64>> {
    loop {
        let g: Vec<Vec<f64>> = (0..m).map(|_| s.gaussian_vector(m).into_inner()).collect();
        let refs: Vec<&[f64]> = g.iter().map(|v| v.as_slice()).collect();
        let q = orthonormalize(&refs, &[]);
        if q.len() == m {
            return q;
        }
    }
}

/// Random linear operator that maps the anchor span into itself, together
/// with its exact b-bounded norm.
///
/// In the orthonormal basis `[K | C]` (kernel, complement) the matrix is
/// block upper triangular with complement block `U diag(σ) V^T`, so the norm
/// is `max σ`.
pub fn random_kernel_preserving(space: &AnchoredSpace, seed: u64) -> (OperatorSpec, f64) {
    let mut s = Sampler::new(seed);
    let dim = space.dim();
    let basis: Vec<&Vector> = space
        .kernel_basis()
        .iter()
        .chain(space.complement_basis())
        .collect();
    let kdim = space.kernel_basis().len();
    let m = dim - kdim;
    let u = random_orthogonal(&mut s, m);
    let v = random_orthogonal(&mut s, m);
    let sigma: Vec<f64> = (0..m).map(|_| s.uniform(0.1, 3.0)).collect();
    // block matrix in basis coordinates, row-major
    let mut block = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            block[i * dim + j] = if i < kdim {
                s.normal()
            } else if j < kdim {
                0.0
            } else {
                let (a, b) = (i - kdim, j - kdim);
                (0..m).map(|l| u[l][a] * sigma[l] * v[l][b]).sum()
            };
        }
    }
    // A = Q B Q^T with Q's columns the basis vectors
    let mut rows = vec![vec![0.0; dim]; dim];
    for (r, row) in rows.iter_mut().enumerate() {
        for (c, entry) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    acc += basis[i][r] * block[i * dim + j] * basis[j][c];
                }
            }
            *entry = acc;
        }
    }
    let norm = sigma.iter().fold(0.0_f64, |a, b| a.max(*b));
    let matrix = Matrix::from_rows(rows).expect("finite square matrix");
    (OperatorSpec::linear(matrix), norm)
}

/// A linear operator on an anchored space, with its norm when known.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyMember {
    pub op: OperatorSpec,
    pub space: AnchoredSpace,
    pub norm: Option<f64>,
}

/// Source of linear operators for the boundedness suites.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorFamily {
    /// Fresh random space and kernel-preserving operator per trial.
    RandomKernelPreserving { dim: usize, order: usize },
    /// Cycles through the listed members.
    Fixed(Vec<FamilyMember>),
}

/// Per-trial instance: operator, space and its norm (`None` = unbounded).
fn draw_member(family: &OperatorFamily, trial: usize, seed: u64) -> Result<(OperatorSpec, AnchoredSpace, Option<f64>)> {
    match family {
        OperatorFamily::RandomKernelPreserving { dim, order } => {
            let space = random_space(*dim, *order, seed)?;
            let (op, norm) = random_kernel_preserving(&space, seed ^ 0x5eed);
            Ok((op, space, Some(norm)))
        }
        OperatorFamily::Fixed(members) => {
            let m = members.get(trial % members.len().max(1)).ok_or(Error::Empty)?;
            let norm = match m.norm {
                Some(n) => Some(n),
                None => operator_norm(&m.op, &m.space, NormMethod::III, NORM_BUDGET, seed)?
                    .value
                    .finite(),
            };
            Ok((m.op.clone(), m.space.clone(), norm))
        }
    }
}

/// Kernel-direction witness of unboundedness: the sequence `x_k = k b_j` has
/// zero semi-norm (it b-converges to `θ`) while `||T x_k - T θ, b||` grows.
fn kernel_escape(op: &OperatorSpec, space: &AnchoredSpace) -> Result<Option<(Vector, Vec<f64>)>> {
    let t0 = apply(op, &Vector::zeros(space.dim()))?;
    for b in space.anchors() {
        let residuals: Vec<f64> = (1..=8)
            .map(|k| {
                let xk = k as f64 * b;
                apply(op, &xk).and_then(|y| space.distance(&y, &t0))
            })
            .collect::<Result<_>>()?;
        if residuals.iter().any(|r| *r > ABSOLUTE_SLACK) {
            return Ok(Some((b.clone(), residuals)));
        }
    }
    Ok(None)
}

/// b-bounded operators are b-continuous: with `M` the operator norm, the
/// probe at `θ` (even trials) or a random point (odd trials) passes with
/// `delta = epsilon / (M + 1)`. Operators without a finite norm fail with a
/// kernel-direction sequence whose images do not b-converge.
pub fn check_bounded_iff_continuous(family: &OperatorFamily, trials: usize, seed: u64) -> Result<PropertyReport> {
    let mut s = Sampler::new(seed);
    let mut tally = Tally::new("bounded-iff-continuous", seed);
    for trial in 0..trials {
        let trial_seed = s.next_seed();
        let (op, space, norm) = draw_member(family, trial, trial_seed)?;
        match norm {
            Some(m) => {
                let x0 = if trial % 2 == 0 {
                    Vector::zeros(space.dim())
                } else {
                    s.gaussian_vector(space.dim())
                };
                let epsilon = s.log_uniform(-3.0, 1.0);
                let delta = epsilon / (m + 1.0);
                let probe = continuity_probe(&op, &space, &x0, epsilon, delta, 64, s.next_seed())?;
                tally.check(probe.worst_image_distance - epsilon, || {
                    let x = probe.counterexample.clone().unwrap_or_else(|| x0.clone());
                    witness(
                        format!("{}: M = {m}, epsilon = {epsilon}, delta = {delta}", describe(&op)),
                        &[x0.as_slice(), x.as_slice()],
                    )
                });
            }
            None => {
                let escape = kernel_escape(&op, &space)?;
                let (b, residuals) = escape.unwrap_or((Vector::zeros(space.dim()), vec![0.0]));
                let last = residuals.last().copied().unwrap_or(0.0);
                tally.record(last.max(ABSOLUTE_SLACK), true, || {
                    witness(
                        format!(
                            "{}: not b-bounded; x_k = k*b has ||x_k, b|| = 0 but ||T x_k - T 0, b|| = {residuals:?}",
                            describe(&op)
                        ),
                        &[b.as_slice()],
                    )
                });
            }
        }
    }
    Ok(tally.finish())
}

/// b-bounded operators map bounded sets to bounded sets: points with
/// semi-norm at most `R` have images with semi-norm at most `M R + 1e-9`.
pub fn check_bounded_sets(family: &OperatorFamily, trials: usize, seed: u64) -> Result<PropertyReport> {
    let mut s = Sampler::new(seed);
    let mut tally = Tally::new("bounded-sets", seed);
    for trial in 0..trials {
        let trial_seed = s.next_seed();
        let (op, space, norm) = draw_member(family, trial, trial_seed)?;
        let radius = s.log_uniform(-1.0, 1.0);
        match norm {
            Some(m) => {
                let mut worst = f64::NEG_INFINITY;
                let mut worst_x = Vector::zeros(space.dim());
                for _ in 0..16 {
                    let u = s.complement_direction(&space);
                    let r = radius * s.unit() / space.seminorm(&u)?;
                    let shift_scale = s_scale(&mut s);
                    let shift = s.kernel_component(&space, shift_scale);
                    let x = (r * &u).add_scaled(1.0, &shift);
                    let excess = space.seminorm(&apply(&op, &x)?)? - m * radius - ABSOLUTE_SLACK;
                    if excess > worst {
                        worst = excess;
                        worst_x = x;
                    }
                }
                tally.check(worst, || {
                    witness(
                        format!("{}: M = {m}, R = {radius}", describe(&op)),
                        &[worst_x.as_slice()],
                    )
                });
            }
            None => {
                // kernel points have semi-norm 0 <= R, yet their images grow
                let escape = kernel_escape(&op, &space)?;
                let (b, residuals) = escape.unwrap_or((Vector::zeros(space.dim()), vec![0.0]));
                let last = residuals.last().copied().unwrap_or(0.0);
                tally.record(last.max(ABSOLUTE_SLACK), true, || {
                    witness(
                        format!(
                            "{}: images of the bounded set {{k b}} have semi-norms {residuals:?}",
                            describe(&op)
                        ),
                        &[b.as_slice()],
                    )
                });
            }
        }
    }
    Ok(tally.finish())
}

fn s_scale(s: &mut Sampler) -> f64 {
    s.log_uniform(-2.0, 2.0)
}

/// Inputs of the product-ball inclusion check.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductBallLemma {
    /// Space of the first factor, anchors `e_2, ..., e_n`.
    pub left: AnchoredSpace,
    /// Space of the second factor, anchors `e'_2, ..., e'_n`.
    pub right: AnchoredSpace,
    pub x0: Vector,
    pub y0: Vector,
    pub r: f64,
    pub r_prime: f64,
    pub r1: f64,
}

/// `B(x0, r) x B(y0, r')` lies inside the product ball
/// `B((x0, y0), r1)` anchored at `(e_j, e'_j)`, checked on sampled pairs
/// under `r + r' < r1`.
pub fn check_product_ball_lemma(lemma: &ProductBallLemma, trials: usize, seed: u64) -> Result<PropertyReport> {
    let ProductBallLemma { left, right, x0, y0, r, r_prime, r1 } = lemma;
    if left.order() != right.order() || left.dim() != right.dim() {
        return Err(Error::DimensionMismatch {
            expected: left.order(),
            found: right.order(),
        });
    }
    x0.check_dim(left.dim())?;
    y0.check_dim(right.dim())?;
    if !(r + r_prime < *r1) || !(*r > 0.0 && *r_prime > 0.0) {
        return Err(Error::ProductRadii { sum: r + r_prime, r1: *r1 });
    }
    let anchor_pairs: Vec<ProductPoint> = left
        .anchors()
        .iter()
        .zip(right.anchors())
        .map(|(a, b)| ProductPoint::new(a.clone(), b.clone()))
        .collect::<Result<_>>()?;
    let mut s = Sampler::new(seed);
    let mut tally = Tally::new("product-ball", seed);
    let mut draw = |space: &AnchoredSpace, center: &Vector, radius: f64| -> Result<Vector> {
        let u = s.complement_direction(space);
        let scale = radius * s.unit() / space.seminorm(&u)?;
        let shift_scale = s_scale(&mut s);
        let shift = s.kernel_component(space, shift_scale);
        Ok(center.add_scaled(scale, &u).add_scaled(1.0, &shift))
    };
    for _ in 0..trials {
        let x = draw(left, x0, *r)?;
        let y = draw(right, y0, *r_prime)?;
        let mut points = vec![ProductPoint::new(&x - x0, &y - y0)?];
        points.extend(anchor_pairs.iter().cloned());
        let distance = product_nnorm(&points)?;
        let excess = distance - r1;
        tally.record(excess, excess >= 0.0, || {
            witness(
                format!("product distance {distance} >= r1 = {r1}"),
                &[x.as_slice(), y.as_slice()],
            )
        });
    }
    Ok(tally.finish())
}

/// A picard-eligible problem for the reduction check.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionProblem {
    pub op: OperatorSpec,
    pub space: AnchoredSpace,
    pub x0: Vector,
    pub alpha: f64,
}

impl ReductionProblem {
    /// `T(x) = α x + c` on a random anchored space with `α ∈ (0.1, 0.9)`.
    pub fn random(dim: usize, order: usize, seed: u64) -> Result<Self> {
        let mut s = Sampler::new(seed);
        let space = random_space(dim, order, s.next_seed())?;
        let alpha = s.uniform(0.1, 0.9);
        let c = s.gaussian_vector(dim);
        let x0 = s.gaussian_vector(dim);
        let op = OperatorSpec::affine(Matrix::diagonal(&vec![alpha; dim]), c)?;
        Ok(Self { op, space, x0, alpha })
    }
}

/// Largest deviation between the geometric-coefficient summable run and the
/// Picard run of `problem` beyond the allowed tolerances (positive means
/// failure).
fn reduction_excess(problem: &ReductionProblem, tol: f64) -> Result<(f64, String)> {
    let ReductionProblem { op, space, x0, alpha } = problem;
    let picard_cfg = SolverConfig::new(Regime::Picard { alpha: Some(*alpha) })
        .with_tol(tol)
        .recording_iterates();
    let summable_cfg = SolverConfig::new(Regime::Summable {
        coefficients: Coefficients::Geometric { ratio: *alpha },
    })
    .with_tol(tol)
    .recording_iterates();
    let p = picard_solve(op, space, x0, &picard_cfg)?;
    let q = summable_solve(op, space, x0, &summable_cfg)?;
    if p.iterations != q.iterations {
        return Ok((1.0, format!("iteration counts differ: {} vs {}", p.iterations, q.iterations)));
    }
    let iterate_gap = p
        .iterates
        .iter()
        .zip(&q.iterates)
        .map(|(a, b)| (a - b).as_slice().iter().fold(0.0_f64, |m, c| m.max(c.abs())))
        .fold(0.0_f64, f64::max);
    let bound_gap = p
        .trace
        .iter()
        .zip(&q.trace)
        .map(|(a, b)| (a.apriori - b.apriori).abs().max((a.aposteriori - b.aposteriori).abs()))
        .fold(0.0_f64, f64::max);
    let cert_gap = (p.certified_error.unwrap_or(0.0) - q.certified_error.unwrap_or(0.0)).abs();
    let point_gap = space.distance(&p.fixed_point, &q.fixed_point)?;
    let excess = (iterate_gap - 1e-12)
        .max(bound_gap - 1e-12)
        .max(cert_gap - 1e-12)
        .max(point_gap - 2.0 * tol);
    Ok((
        excess,
        format!(
            "alpha = {alpha}: iterate gap {iterate_gap}, bound gap {bound_gap}, certified gap {cert_gap}, point gap {point_gap}"
        ),
    ))
}

/// Summable iteration with `a_k = α^k` reproduces the Picard run: identical
/// iterates and bounds to `1e-12`, returned points within `2 tol`.
pub fn check_banach_reduction(problem: &ReductionProblem, tol: f64, seed: u64) -> Result<PropertyReport> {
    let mut tally = Tally::new("banach-reduction", seed);
    let (excess, note) = reduction_excess(problem, tol)?;
    tally.check(excess, || witness(note, &[problem.x0.as_slice()]));
    Ok(tally.finish())
}

/// [`check_banach_reduction`] over `trials` random `αx + c` problems.
pub fn check_reduction_suite(dim: usize, order: usize, trials: usize, tol: f64, seed: u64) -> Result<PropertyReport> {
    let mut s = Sampler::new(seed);
    let mut tally = Tally::new("banach-reduction", seed);
    for _ in 0..trials {
        let problem = ReductionProblem::random(dim, order, s.next_seed())?;
        let (excess, note) = reduction_excess(&problem, tol)?;
        tally.check(excess, || witness(note, &[problem.x0.as_slice()]));
    }
    Ok(tally.finish())
}

/// Contractive-type maps have `f(p, q) = ||Tp - Tq, b|| / ||p - q, b|| < 1`.
///
/// Checks `trials` sampled pairs, then runs the Edelstein iteration from `x0`
/// (tolerance `1e-6`, at most `max_iter` steps) and requires the largest ratio
/// in the last tenth of its trace to stay below `1 - 1e-9` as well. Each
/// pair and the trace window count as one trial.
pub fn check_contractive_ratio(
    op: &OperatorSpec,
    space: &AnchoredSpace,
    x0: &Vector,
    trials: usize,
    max_iter: usize,
    seed: u64,
) -> Result<PropertyReport> {
    let mut s = Sampler::new(seed);
    let mut tally = Tally::new("contractive-ratio", seed);
    let limit = 1.0 - RATIO_MARGIN;
    for i in 0..trials {
        let p = s.log_uniform(-1.0, 1.0) * &s.gaussian_vector(space.dim());
        let q = if i % 2 == 0 {
            s.log_uniform(-1.0, 1.0) * &s.gaussian_vector(space.dim())
        } else {
            p.add_scaled(p.norm2() * s.log_uniform(-3.0, 0.0), &s.gaussian_vector(space.dim()))
        };
        let Some(f) = contraction_ratio(op, space, &p, &q)? else {
            continue;
        };
        tally.check(f - limit, || {
            witness(format!("f(p, q) = {f}"), &[p.as_slice(), q.as_slice()])
        });
    }
    let cfg = SolverConfig::new(Regime::Edelstein).with_tol(1e-6).with_max_iter(max_iter);
    let run = edelstein_solve(op, space, x0, &cfg)?;
    if !run.ratios.is_empty() {
        let window = (run.ratios.len() / 10).max(1);
        let tail = &run.ratios[run.ratios.len() - window..];
        let r = tail.iter().fold(0.0_f64, |a, b| a.max(*b));
        tally.check(r - limit, || {
            witness(
                format!(
                    "terminal ratio R = {r} over the last {window} of {} Edelstein steps",
                    run.iterations
                ),
                &[run.fixed_point.as_slice()],
            )
        });
    }
    Ok(tally.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axiom_suite_passes_and_reproduces() {
        let a = check_axiom_suite(4, 3, 200, 42).unwrap();
        assert_eq!(a.len(), 4);
        assert!(a.iter().all(PropertyReport::passed), "{a:?}");
        assert!(a.iter().all(|r| r.counterexample.is_none()));
        assert_eq!(a, check_axiom_suite(4, 3, 200, 42).unwrap());
    }

    #[test]
    fn squared_norm_fails_homogeneity() {
        let a = check_axiom_suite_with(&squared_gram_norm, 4, 3, 100, 1).unwrap();
        let n3 = &a[2];
        assert_eq!(n3.property_id, "N3-homogeneity");
        assert!(n3.failures > 0);
        assert!(n3.counterexample.is_some());
    }

    #[test]
    fn random_kernel_preserving_has_stated_norm() {
        let space = random_space(4, 3, 5).unwrap();
        let (op, norm) = random_kernel_preserving(&space, 6);
        assert!(crate::operator::kernel_preserved(&op, &space, 8).unwrap());
        let est = operator_norm(&op, &space, NormMethod::II, 10_000, 1).unwrap();
        let v = est.value.finite().unwrap();
        assert!(v <= norm * (1.0 + 1e-9) && v >= 0.98 * norm, "{v} vs {norm}");
    }
}
