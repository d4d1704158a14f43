//! Fixed-point iterations with certified semi-norm error bounds.
//!
//! Every certified regime iterates `x_{k+1} = T(x_k)` and records, per step
//! `k >= 1`, the residual `||x_k - x_{k+1}, b||`, an a-priori bound rooted at
//! `x_0` and an a-posteriori bound rooted at `x_{k-1}`:
//!
//! | regime    | a-priori                         | a-posteriori                  | stop on |
//! |-----------|----------------------------------|-------------------------------|---------|
//! | picard    | `α^k/(1-α) · ||x0 - Tx0||`       | `α/(1-α) · ||x_{k-1} - x_k||` | min     |
//! | ball      | as picard                        | as picard                     | min     |
//! | summable  | `S(k) · ||x0 - x1||`             | `S(1) · ||x_{k-1} - x_k||`    | min     |
//! | kannan    | `r^k/(1-r) · ||x0 - Tx0||`       | `r/(1-r) · ||x_{k-1} - x_k||` | a-priori|
//!
//! with `S(q) = Σ_{v>=q} a_v` and `r = β/(1-β)`. The Edelstein regime has no
//! rate and reports best-effort evidence only.
//!
//! The iteration is seen only through the semi-norm, so every fixed point is
//! unique modulo the anchor span at best; reports say so explicitly.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::estimate::{contraction_constant, contraction_constant_in_ball};
use crate::nnorm::{AnchoredSpace, Ball};
use crate::operator::{apply, OperatorSpec};
use crate::{Error, Result, Vector};

/// Sampled constants may exceed declared ones by at most this much.
pub const CONSTANT_SLACK: f64 = 1e-6;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;

/// Coefficients `a_v` of the summable regime, indexed from `v = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coefficients {
    /// `a_v = ratio^v`, tail `S(q) = ratio^q / (1 - ratio)`.
    Geometric { ratio: f64 },
    /// `a_0, a_1, ...` followed by a declared bound `tail` on the sum of all
    /// later terms.
    Explicit { terms: Vec<f64>, tail: f64 },
}

impl Coefficients {
    pub fn validate(&self) -> Result<()> {
        match self {
            Coefficients::Geometric { ratio } => {
                if *ratio > 0.0 && *ratio < 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidSequence(alloc::format!(
                        "geometric ratio {ratio} is outside (0, 1)"
                    )))
                }
            }
            Coefficients::Explicit { terms, tail } => {
                if let Some(t) = terms.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
                    return Err(Error::InvalidSequence(alloc::format!(
                        "term {t} is not a nonnegative finite number"
                    )));
                }
                if !(tail.is_finite() && *tail >= 0.0) {
                    return Err(Error::InvalidSequence(alloc::format!(
                        "declared tail {tail} is not a nonnegative finite number"
                    )));
                }
                Ok(())
            }
        }
    }

    /// `S(q) = Σ_{v >= q} a_v`.
    pub fn tail_sum(&self, q: usize) -> f64 {
        match self {
            Coefficients::Geometric { ratio } => geometric_tail(*ratio, q),
            Coefficients::Explicit { terms, tail } => {
                terms.iter().skip(q).sum::<f64>() + tail
            }
        }
    }
}

/// `ratio^q / (1 - ratio)`.
fn geometric_tail(ratio: f64, q: usize) -> f64 {
    libm::pow(ratio, q as f64) / (1.0 - ratio)
}

/// Regime plus its constants. `None` constants are estimated by sampling.
#[derive(Debug, Clone, PartialEq)]
pub enum Regime {
    Picard { alpha: Option<f64> },
    Ball { alpha: f64, radius: f64 },
    Summable { coefficients: Coefficients },
    Kannan { beta: Option<f64> },
    Edelstein,
}

impl Regime {
    pub fn kind(&self) -> RegimeKind {
        match self {
            Regime::Picard { .. } => RegimeKind::Picard,
            Regime::Ball { .. } => RegimeKind::Ball,
            Regime::Summable { .. } => RegimeKind::Summable,
            Regime::Kannan { .. } => RegimeKind::Kannan,
            Regime::Edelstein => RegimeKind::Edelstein,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegimeKind {
    Picard,
    Ball,
    Summable,
    Kannan,
    Edelstein,
}

impl RegimeKind {
    pub fn name(self) -> &'static str {
        match self {
            RegimeKind::Picard => "picard",
            RegimeKind::Ball => "ball",
            RegimeKind::Summable => "summable",
            RegimeKind::Kannan => "kannan",
            RegimeKind::Edelstein => "edelstein",
        }
    }
}

/// Sampling budget for cross-checking (or estimating) the contraction
/// constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstantCheck {
    pub budget: usize,
    pub seed: u64,
}

impl Default for ConstantCheck {
    fn default() -> Self {
        Self {
            budget: 1000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub regime: Regime,
    /// Target certified semi-norm error.
    pub tol: f64,
    pub max_iter: usize,
    /// Cross-check declared constants against sampled ones.
    pub constant_check: Option<ConstantCheck>,
    /// Keep `x_0, x_1, ...` in the report.
    pub record_iterates: bool,
}

impl SolverConfig {
    pub fn new(regime: Regime) -> Self {
        Self {
            regime,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            constant_check: None,
            record_iterates: false,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_constant_check(mut self, check: ConstantCheck) -> Self {
        self.constant_check = Some(check);
        self
    }

    pub fn recording_iterates(mut self) -> Self {
        self.record_iterates = true;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "tol",
                value: self.tol,
            });
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter {
                name: "max_iter",
                value: 0.0,
            });
        }
        Ok(())
    }
}

/// One row of the iteration trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    /// `||x_k - x_{k+1}, b||`.
    pub residual: f64,
    pub apriori: f64,
    pub aposteriori: f64,
    /// The bound the stopping rule compares against `tol`.
    pub certified: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UniquenessNote {
    /// `{x*, b_2, ..., b_n}` is independent; the fixed point is unique
    /// modulo the anchor span.
    KernelModuloUnique,
    /// `x*` lies in the anchor span, so the independence hypothesis fails.
    IndependenceConditionFailed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub regime: RegimeKind,
    pub fixed_point: Vector,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<TraceRow>,
    /// Certified semi-norm distance to the fixed point; `None` for Edelstein.
    pub certified_error: Option<f64>,
    /// `||x* - T x*, b||` of the returned point.
    pub fixed_point_residual: f64,
    pub uniqueness_note: UniquenessNote,
    pub independence_ok: bool,
    /// The contraction rate actually used (`α`, `r = β/(1-β)`, or `S(1)`).
    pub rate: Option<f64>,
    /// Ball regime: largest `||x0 - x_k, b||` over the iterates.
    pub max_containment: Option<f64>,
    /// Edelstein regime: `f(x_k, T x_k)` along the trace.
    pub ratios: Vec<f64>,
    /// `x_0, x_1, ..., x_K` when requested.
    pub iterates: Vec<Vector>,
}

/// Dispatches on `cfg.regime`.
pub fn solve(
    op: &OperatorSpec,
    space: &AnchoredSpace,
    x0: &Vector,
    cfg: &SolverConfig,
) -> Result<SolverReport> {
    match cfg.regime {
        Regime::Picard { .. } => picard_solve(op, space, x0, cfg),
        Regime::Ball { .. } => ball_solve(op, space, x0, cfg),
        Regime::Summable { .. } => summable_solve(op, space, x0, cfg),
        Regime::Kannan { .. } => kannan_solve(op, space, x0, cfg),
        Regime::Edelstein => edelstein_solve(op, space, x0, cfg),
    }
}

fn mismatch(expected: RegimeKind, cfg: &SolverConfig) -> Error {
    Error::RegimeMismatch {
        expected: expected.name(),
        found: cfg.regime.kind().name(),
    }
}

fn step(op: &OperatorSpec, x: &Vector, k: usize) -> Result<Vector> {
    match apply(op, x) {
        Ok(y) => Ok(y),
        Err(Error::NonFinite(_)) => Err(Error::NonFiniteIterate(k)),
        Err(e) => Err(e),
    }
}

/// Bound formulas of one certified regime.
struct Bounds {
    kind: RegimeKind,
    rate: f64,
    apriori: fn(&Bounds, usize, f64) -> f64,
    aposteriori: fn(&Bounds, f64) -> f64,
    apriori_only: bool,
    coefficients: Option<Coefficients>,
}

fn contraction_bounds(kind: RegimeKind, alpha: f64) -> Bounds {
    Bounds {
        kind,
        rate: alpha,
        apriori: |b, k, res0| geometric_tail(b.rate, k) * res0,
        aposteriori: |b, last| b.rate / (1.0 - b.rate) * last,
        apriori_only: false,
        coefficients: None,
    }
}

/// Shared loop of the certified regimes. `observe` sees every new iterate
/// `x_k` (k >= 1) before its row is recorded.
fn iterate_certified(
    op: &OperatorSpec,
    space: &AnchoredSpace,
    x0: &Vector,
    cfg: &SolverConfig,
    bounds: &Bounds,
    mut observe: impl FnMut(usize, &Vector) -> Result<()>,
) -> Result<SolverReport> {
    x0.check_dim(space.dim())?;
    let mut iterates = Vec::new();
    if cfg.record_iterates {
        iterates.push(x0.clone());
    }
    let mut x = x0.clone();
    let mut tx = step(op, &x, 1)?;
    let res0 = space.distance(&x, &tx)?;
    let mut trace = Vec::new();
    let mut last_step = res0;
    let mut certified = 0.0;
    let mut residual = res0;
    let mut converged = res0 == 0.0;
    let mut k = 0;
    while !converged && k < cfg.max_iter {
        k += 1;
        x = tx;
        observe(k, &x)?;
        tx = step(op, &x, k + 1)?;
        residual = space.distance(&x, &tx)?;
        let apriori = (bounds.apriori)(bounds, k, res0);
        let aposteriori = (bounds.aposteriori)(bounds, last_step);
        certified = if bounds.apriori_only {
            apriori
        } else {
            apriori.min(aposteriori)
        };
        trace.push(TraceRow {
            k,
            residual,
            apriori,
            aposteriori,
            certified,
        });
        if cfg.record_iterates {
            iterates.push(x.clone());
        }
        last_step = residual;
        converged = certified <= cfg.tol;
    }
    let independence_ok = space.independent_of_anchors(&x)?;
    Ok(SolverReport {
        regime: bounds.kind,
        fixed_point: x,
        iterations: k,
        converged,
        trace,
        certified_error: Some(certified),
        fixed_point_residual: residual,
        uniqueness_note: if independence_ok {
            UniquenessNote::KernelModuloUnique
        } else {
            UniquenessNote::IndependenceConditionFailed
        },
        independence_ok,
        rate: Some(bounds.rate),
        max_containment: None,
        ratios: Vec::new(),
        iterates,
    })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}

fn cross_check(name: &'static str, declared: f64, sampled: f64) -> Result<()> {
    if sampled > declared + CONSTANT_SLACK {
        Err(Error::ConstantViolated {
            name,
            declared,
            sampled,
        })
    } else {
        Ok(())
    }
}

/// Banach iteration for a b-contraction with constant `α ∈ (0, 1)`.
pub fn picard_solve(
    op: &OperatorSpec,
    space: &AnchoredSpace,
    x0: &Vector,
    cfg: &SolverConfig,
) -> Result<SolverReport> {
    let Regime::Picard { alpha } = cfg.regime else {
        return Err(mismatch(RegimeKind::Picard, cfg));
    };
    cfg.validate()?;
    let alpha = match alpha {
        Some(alpha) => {
            check_alpha(alpha)?;
            if let Some(check) = cfg.constant_check {
                let est = contraction_constant(op, space, check.budget, check.seed)?;
                cross_check("alpha", alpha, est.alpha_hat)?;
            }
            alpha
        }
        None => {
            let check = cfg.constant_check.unwrap_or_default();
            let est = contraction_constant(op, space, check.budget, check.seed)?;
            if est.alpha_hat >= 1.0 {
                return Err(Error::AlphaOutOfRange(est.alpha_hat));
            }
            est.alpha_hat.max(f64::EPSILON)
        }
    };
    iterate_certified(
        op,
        space,
        x0,
        cfg,
        &contraction_bounds(RegimeKind::Picard, alpha),
        |_, _| Ok(()),
    )
}

/// Picard iteration for a map that contracts only on the closed ball
/// `B[x0, radius]`, under `||x0 - Tx0, b|| < (1 - α) radius`.
pub fn ball_solve(
    op: &OperatorSpec,
    space: &AnchoredSpace,
    x0: &Vector,
    cfg: &SolverConfig,
) -> Result<SolverReport> {
    let Regime::Ball { alpha, radius } = cfg.regime else {
        return Err(mismatch(RegimeKind::Ball, cfg));
    };
    cfg.validate()?;
    check_alpha(alpha)?;
    let ball = Ball::closed(space.clone(), x0.clone(), radius)?;
    let lhs = space.distance(x0, &apply(op, x0)?)?;
    let rhs = (1.0 - alpha) * radius;
    if !(lhs < rhs) {
        return Err(Error::BallPrecondition { lhs, rhs });
    }
    if let Some(check) = cfg.constant_check {
        let est = contraction_constant_in_ball(op, &ball, check.budget, check.seed)?;
        cross_check("alpha", alpha, est.alpha_hat)?;
    }
    let mut widest: f64 = 0.0;
    let mut report = iterate_certified(
        op,
        space,
        x0,
        cfg,
        &contraction_bounds(RegimeKind::Ball, alpha),
        |k, xk| {
            let distance = space.distance(x0, xk)?;
            if !ball.contains(xk)? {
                return Err(Error::ContainmentViolated {
                    step: k,
                    distance,
                    radius,
                });
            }
            widest = widest.max(distance);
            Ok(())
        },
    )?;
    report.max_containment = Some(widest);
    Ok(report)
}

/// Iteration for maps with `||T^k x - T^k y, b|| <= a_k ||x - y, b||` and
/// summable `a_k`.
pub fn summable_solve(
    op: &OperatorSpec,
    space: &AnchoredSpace,
    x0: &Vector,
    cfg: &SolverConfig,
) -> Result<SolverReport> {
    let Regime::Summable { ref coefficients } = cfg.regime else {
        return Err(mismatch(RegimeKind::Summable, cfg));
    };
    cfg.validate()?;
    coefficients.validate()?;
    let bounds = Bounds {
        kind: RegimeKind::Summable,
        rate: coefficients.tail_sum(1),
        apriori: |b, k, res0| b.coefficients.as_ref().expect("summable").tail_sum(k) * res0,
        // T^v x_{k-1} - T^v x_k summed over v >= 1
        aposteriori: |b, last| b.rate * last,
        apriori_only: false,
        coefficients: Some(coefficients.clone()),
    };
    iterate_certified(op, space, x0, cfg, &bounds, |_, _| Ok(()))
}

/// Iteration for Kannan-type maps
/// `||Tx - Ty, b|| <= β (||x - Tx, b|| + ||y - Ty, b||)`, `β ∈ (0, 1/2)`.
/// Stops on the a-priori bound with `r = β/(1-β)`.
pub fn kannan_solve(
    op: &OperatorSpec,
    space: &AnchoredSpace,
    x0: &Vector,
    cfg: &SolverConfig,
) -> Result<SolverReport> {
    let Regime::Kannan { beta } = cfg.regime else {
        return Err(mismatch(RegimeKind::Kannan, cfg));
    };
    cfg.validate()?;
    let beta = match beta {
        Some(beta) => {
            if !(beta > 0.0 && beta < 0.5) {
                return Err(Error::BetaOutOfRange(beta));
            }
            if let Some(check) = cfg.constant_check {
                let est = contraction_constant(op, space, check.budget, check.seed)?;
                cross_check("beta", beta, est.beta_hat)?;
            }
            beta
        }
        None => {
            let check = cfg.constant_check.unwrap_or_default();
            let est = contraction_constant(op, space, check.budget, check.seed)?;
            if est.beta_hat >= 0.5 {
                return Err(Error::BetaOutOfRange(est.beta_hat));
            }
            est.beta_hat.max(f64::EPSILON)
        }
    };
    let bounds = Bounds {
        apriori_only: true,
        ..contraction_bounds(RegimeKind::Kannan, beta / (1.0 - beta))
    };
    iterate_certified(op, space, x0, cfg, &bounds, |_, _| Ok(()))
}

/// Best-effort iteration for maps with `||Tx - Ty, b|| < ||x - y, b||`.
///
/// No rate exists, so no certificate is issued: the report carries the
/// iterate with the smallest residual `||x_k - T x_k, b||`, succeeds iff that
/// residual is at most `tol`, and lists the ratios
/// `f(x_k, T x_k) = ||T x_k - T^2 x_k, b|| / ||x_k - T x_k, b||`.
pub fn edelstein_solve(
    op: &OperatorSpec,
    space: &AnchoredSpace,
    x0: &Vector,
    cfg: &SolverConfig,
) -> Result<SolverReport> {
    if cfg.regime != Regime::Edelstein {
        return Err(mismatch(RegimeKind::Edelstein, cfg));
    }
    cfg.validate()?;
    x0.check_dim(space.dim())?;
    let mut iterates = Vec::new();
    if cfg.record_iterates {
        iterates.push(x0.clone());
    }
    let mut x = x0.clone();
    let mut tx = step(op, &x, 1)?;
    let mut residual = space.distance(&x, &tx)?;
    let (mut best, mut best_point) = (residual, x.clone());
    let mut trace = Vec::new();
    let mut ratios = Vec::new();
    let mut k = 0;
    while best > cfg.tol && k < cfg.max_iter {
        k += 1;
        x = tx;
        tx = step(op, &x, k + 1)?;
        let next = space.distance(&x, &tx)?;
        if residual >= crate::estimate::DENOMINATOR_FLOOR {
            ratios.push(next / residual);
        }
        residual = next;
        trace.push(TraceRow {
            k,
            residual,
            apriori: f64::INFINITY,
            aposteriori: f64::INFINITY,
            certified: f64::INFINITY,
        });
        if cfg.record_iterates {
            iterates.push(x.clone());
        }
        if residual < best {
            best = residual;
            best_point = x.clone();
        }
    }
    let independence_ok = space.independent_of_anchors(&best_point)?;
    Ok(SolverReport {
        regime: RegimeKind::Edelstein,
        fixed_point: best_point,
        iterations: k,
        converged: best <= cfg.tol,
        trace,
        certified_error: None,
        fixed_point_residual: best,
        uniqueness_note: if independence_ok {
            UniquenessNote::KernelModuloUnique
        } else {
            UniquenessNote::IndependenceConditionFailed
        },
        independence_ok,
        rate: None,
        max_containment: None,
        ratios,
        iterates,
    })
}
