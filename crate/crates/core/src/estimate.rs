//! Sampled suprema: b-bounded operator norms, contraction constants and
//! continuity probes.
//!
//! Every estimate is deterministic in `(inputs, budget, seed)` and is a lower
//! bound of the true supremum. Sample `i` depends only on the seed and `i`,
//! so a larger budget never lowers a reported value.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::nnorm::{AnchoredSpace, Ball};
use crate::operator::{apply, kernel_preserved, OperatorSpec};
use crate::sampling::Sampler;
use crate::{Error, Result, Vector};

/// Ratios with a denominator below this are skipped.
pub const DENOMINATOR_FLOOR: f64 = 1e-12;

/// Sample count used by the kernel-preservation gate for builtins.
const KERNEL_SAMPLES: usize = 64;

/// The three equivalent norm formulas for a b-bounded linear operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormMethod {
    /// `sup { ||Tx, b|| : ||x, b|| <= 1 }`
    I,
    /// `sup { ||Tx, b|| : ||x, b|| = 1 }`
    II,
    /// `sup { ||Tx, b|| / ||x, b|| : ||x, b|| != 0 }`
    III,
}

impl NormMethod {
    pub const ALL: [NormMethod; 3] = [NormMethod::I, NormMethod::II, NormMethod::III];

    pub fn label(self) -> &'static str {
        match self {
            NormMethod::I => "I",
            NormMethod::II => "II",
            NormMethod::III => "III",
        }
    }
}

/// A finite norm value or the marker for "no finite bound exists".
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormValue {
    Finite(f64),
    Infinite,
}

impl NormValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            NormValue::Finite(v) => Some(v),
            NormValue::Infinite => None,
        }
    }
}

impl core::fmt::Display for NormValue {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            NormValue::Finite(v) => write!(f, "{v}"),
            NormValue::Infinite => f.write_str("infinite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorNormEstimate {
    pub value: NormValue,
    pub method: NormMethod,
    pub samples: usize,
    pub kernel_preserved: bool,
}

/// Deterministic sample point of [`operator_norm`]: a unit direction of the
/// anchor-span complement, rescaled per method, plus an anchor-span shift.
#[derive(Debug, Clone, PartialEq)]
pub struct NormSample {
    /// The point `x` fed to `T`.
    pub point: Vector,
    /// `||x, b||` of that point.
    pub seminorm: f64,
}

/// Yields the sample points used by [`operator_norm`] for `method`.
pub struct NormSampler<'a> {
    space: &'a AnchoredSpace,
    method: NormMethod,
    sampler: Sampler,
}

impl<'a> NormSampler<'a> {
    pub fn new(space: &'a AnchoredSpace, method: NormMethod, seed: u64) -> Self {
        Self {
            space,
            method,
            sampler: Sampler::new(seed),
        }
    }

    pub fn next_sample(&mut self) -> Result<NormSample> {
        let u = self.sampler.complement_direction(self.space);
        let unit = 1.0 / self.space.seminorm(&u)?;
        let complement_dim = self.space.complement_basis().len() as f64;
        let scale = match self.method {
            NormMethod::I => unit * libm::pow(self.sampler.unit(), 1.0 / complement_dim),
            NormMethod::II => unit,
            NormMethod::III => unit * self.sampler.log_uniform(-3.0, 3.0),
        };
        let shift_scale = self.sampler.log_uniform(-2.0, 2.0);
        let shift = self.sampler.kernel_component(self.space, shift_scale);
        let point = (scale * &u).add_scaled(1.0, &shift);
        let seminorm = self.space.seminorm(&point)?;
        Ok(NormSample { point, seminorm })
    }
}

/// Sampled b-bounded norm of a linear operator by one of the three formulas.
///
/// Operators that do not preserve the semi-norm kernel admit no finite bound
/// and get [`NormValue::Infinite`].
pub fn operator_norm(
    op: &OperatorSpec,
    space: &AnchoredSpace,
    method: NormMethod,
    budget: usize,
    seed: u64,
) -> Result<OperatorNormEstimate> {
    if budget == 0 {
        return Err(Error::EmptyBudget);
    }
    let (_, offset) = op.affine_parts(space.dim()).ok_or(Error::NotLinear)?;
    if offset.as_slice().iter().any(|c| *c != 0.0) {
        return Err(Error::NotLinear);
    }
    if !kernel_preserved(op, space, KERNEL_SAMPLES)? {
        return Ok(OperatorNormEstimate {
            value: NormValue::Infinite,
            method,
            samples: budget,
            kernel_preserved: false,
        });
    }
    let mut sampler = NormSampler::new(space, method, seed);
    let mut sup: f64 = 0.0;
    for _ in 0..budget {
        let s = sampler.next_sample()?;
        let image = space.seminorm(&apply(op, &s.point)?)?;
        let objective = match method {
            NormMethod::I | NormMethod::II => image,
            NormMethod::III => {
                if s.seminorm < DENOMINATOR_FLOOR {
                    continue;
                }
                image / s.seminorm
            }
        };
        sup = sup.max(objective);
    }
    Ok(OperatorNormEstimate {
        value: NormValue::Finite(sup),
        method,
        samples: budget,
        kernel_preserved: true,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionEstimate {
    /// Sampled sup of `||Tx - Ty, b|| / ||x - y, b||`.
    pub alpha_hat: f64,
    /// Sampled sup of `||Tx - Ty, b|| / (||x - Tx, b|| + ||y - Ty, b||)`.
    pub beta_hat: f64,
    pub alpha_witness: Option<(Vector, Vector)>,
    pub beta_witness: Option<(Vector, Vector)>,
    pub pairs: usize,
}

/// `||Tx - Ty, b|| / ||x - y, b||`, or `None` below the denominator floor.
pub fn contraction_ratio(
    op: &OperatorSpec,
    space: &AnchoredSpace,
    x: &Vector,
    y: &Vector,
) -> Result<Option<f64>> {
    let den = space.distance(x, y)?;
    if den < DENOMINATOR_FLOOR {
        return Ok(None);
    }
    let num = space.distance(&apply(op, x)?, &apply(op, y)?)?;
    Ok(Some(num / den))
}

/// `||Tx - Ty, b|| / (||x - Tx, b|| + ||y - Ty, b||)`, or `None` below the
/// denominator floor.
pub fn kannan_ratio(
    op: &OperatorSpec,
    space: &AnchoredSpace,
    x: &Vector,
    y: &Vector,
) -> Result<Option<f64>> {
    let (tx, ty) = (apply(op, x)?, apply(op, y)?);
    let den = space.distance(x, &tx)? + space.distance(y, &ty)?;
    if den < DENOMINATOR_FLOOR {
        return Ok(None);
    }
    Ok(Some(space.distance(&tx, &ty)? / den))
}

fn estimate_pairs(
    op: &OperatorSpec,
    space: &AnchoredSpace,
    budget: usize,
    mut pair: impl FnMut(usize) -> (Vector, Vector),
) -> Result<ContractionEstimate> {
    if budget == 0 {
        return Err(Error::EmptyBudget);
    }
    let mut est = ContractionEstimate {
        alpha_hat: 0.0,
        beta_hat: 0.0,
        alpha_witness: None,
        beta_witness: None,
        pairs: budget,
    };
    for i in 0..budget {
        let (x, y) = pair(i);
        if let Some(r) = contraction_ratio(op, space, &x, &y)? {
            if est.alpha_witness.is_none() || r > est.alpha_hat {
                est.alpha_hat = r;
                est.alpha_witness = Some((x.clone(), y.clone()));
            }
        }
        if let Some(r) = kannan_ratio(op, space, &x, &y)? {
            if est.beta_witness.is_none() || r > est.beta_hat {
                est.beta_hat = r;
                est.beta_witness = Some((x, y));
            }
        }
    }
    Ok(est)
}

/// Sampled b-contraction and Kannan constants over `budget` seeded pairs.
///
/// Pairs cycle through three shapes: independent points of random
/// magnitude, nearby points, and a point against a near-origin partner.
pub fn contraction_constant(
    op: &OperatorSpec,
    space: &AnchoredSpace,
    budget: usize,
    seed: u64,
) -> Result<ContractionEstimate> {
    let dim = space.dim();
    let mut s = Sampler::new(seed);
    estimate_pairs(op, space, budget, |i| {
        let x = s.log_uniform(-2.0, 2.0) * &s.gaussian_vector(dim);
        let y = match i % 3 {
            0 => s.log_uniform(-2.0, 2.0) * &s.gaussian_vector(dim),
            1 => x.add_scaled(x.norm2() * s.log_uniform(-4.0, 0.0), &s.gaussian_vector(dim)),
            _ => s.log_uniform(-8.0, -2.0) * &s.gaussian_vector(dim),
        };
        (x, y)
    })
}

/// [`contraction_constant`] with both points drawn from `ball`.
pub fn contraction_constant_in_ball(
    op: &OperatorSpec,
    ball: &Ball,
    budget: usize,
    seed: u64,
) -> Result<ContractionEstimate> {
    let space = ball.space();
    let mut s = Sampler::new(seed);
    let draw = |s: &mut Sampler| -> Vector {
        let u = s.complement_direction(space);
        let unit = space.seminorm(&u).map(|n| 1.0 / n).unwrap_or(0.0);
        let r = ball.radius() * s.unit() * unit;
        let shift_scale = s.log_uniform(-2.0, 2.0);
        let shift = s.kernel_component(space, shift_scale);
        ball.center().add_scaled(r, &u).add_scaled(1.0, &shift)
    };
    estimate_pairs(op, space, budget, |_| {
        let x = draw(&mut s);
        let y = draw(&mut s);
        (x, y)
    })
}

/// Outcome of [`continuity_probe`].
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityProbe {
    /// No sampled point of the `delta` ball escaped the `epsilon` ball.
    pub continuous: bool,
    /// The sampled point with the largest image distance, when it violated.
    pub counterexample: Option<Vector>,
    /// Largest `||Tx - Tx0, b||` seen.
    pub worst_image_distance: f64,
    /// `||T x_k - T x0, b||` for the b-convergent sequence
    /// `x_k = x0 + (delta / k) u_k` with unit-semi-norm directions `u_k`.
    pub sequence_residuals: Vec<f64>,
}

/// Sampled epsilon-delta and sequential continuity check at `x0`.
pub fn continuity_probe(
    op: &OperatorSpec,
    space: &AnchoredSpace,
    x0: &Vector,
    epsilon: f64,
    delta: f64,
    samples: usize,
    seed: u64,
) -> Result<ContinuityProbe> {
    x0.check_dim(space.dim())?;
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            value: epsilon,
        });
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter {
            name: "delta",
            value: delta,
        });
    }
    let tx0 = apply(op, x0)?;
    let mut s = Sampler::new(seed);
    let mut probe = ContinuityProbe {
        continuous: true,
        counterexample: None,
        worst_image_distance: 0.0,
        sequence_residuals: Vec::new(),
    };
    for _ in 0..samples {
        let u = s.complement_direction(space);
        let unit = 1.0 / space.seminorm(&u)?;
        let r = delta * s.unit() * unit;
        let shift = s.kernel_component(space, 1.0);
        let x = x0.add_scaled(r, &u).add_scaled(1.0, &shift);
        if space.distance(&x, x0)? >= delta {
            continue;
        }
        let d = space.distance(&apply(op, &x)?, &tx0)?;
        if d > probe.worst_image_distance {
            probe.worst_image_distance = d;
            if d >= epsilon {
                probe.counterexample = Some(x.clone());
            }
        }
        if d >= epsilon {
            probe.continuous = false;
        }
    }
    let terms = samples.clamp(1, 64);
    for k in 1..=terms {
        let u = s.complement_direction(space);
        let unit = 1.0 / space.seminorm(&u)?;
        let x = x0.add_scaled(delta * unit / k as f64, &u);
        probe
            .sequence_residuals
            .push(space.distance(&apply(op, &x)?, &tx0)?);
    }
    Ok(probe)
}
