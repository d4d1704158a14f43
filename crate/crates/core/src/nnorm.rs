//! Gram n-norm, anchored semi-norms, balls, the product-space norm and
//! finite-prefix convergence estimators.
//!
//! All limits are estimated on finite prefixes and reported as residuals;
//! nothing here claims anything about infinite behaviour.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::linalg::{binary_scale, gram_nnorm_with_tol, normalized_dependent, orthonormalize};
use crate::vector::dot;
use crate::{gram_nnorm, Error, Result, Vector, RANK_TOLERANCE};

/// `R^d` with an n-norm of order `n` and the fixed anchors `b_2, ..., b_n`
/// that turn it into the semi-norm `||x, b_2, ..., b_n||`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchoredSpace {
    dim: usize,
    order: usize,
    anchors: Vec<Vector>,
    rank_tol: f64,
    kernel_basis: Vec<Vector>,
    complement_basis: Vec<Vector>,
    anchor_volume: f64,
}

impl AnchoredSpace {
    /// Validates `2 <= order <= dim`, `order - 1` anchors of length `dim`,
    /// and anchor independence.
    pub fn new(dim: usize, order: usize, anchors: Vec<Vector>) -> Result<Self> {
        Self::with_rank_tolerance(dim, order, anchors, RANK_TOLERANCE)
    }

    pub fn with_rank_tolerance(
        dim: usize,
        order: usize,
        anchors: Vec<Vector>,
        rank_tol: f64,
    ) -> Result<Self> {
        if order < 2 || order > dim {
            return Err(Error::InvalidOrder { order, dim });
        }
        if anchors.len() != order - 1 {
            return Err(Error::DimensionMismatch {
                expected: order - 1,
                found: anchors.len(),
            });
        }
        for a in &anchors {
            a.check_dim(dim)?;
        }
        let refs: Vec<&[f64]> = anchors.iter().map(|a| a.as_slice()).collect();
        if normalized_dependent(&refs, rank_tol) {
            return Err(Error::DependentAnchors);
        }
        let kernel: Vec<Vec<f64>> = orthonormalize(&refs, &[]);
        let standard: Vec<Vec<f64>> = (0..dim).map(|i| Vector::basis(dim, i).into_inner()).collect();
        let standard_refs: Vec<&[f64]> = standard.iter().map(|v| v.as_slice()).collect();
        let complement = orthonormalize(&standard_refs, &kernel);
        debug_assert_eq!(kernel.len() + complement.len(), dim);
        let anchor_volume = gram_nnorm_with_tol(&refs, rank_tol)?;
        Ok(Self {
            dim,
            order,
            anchors,
            rank_tol,
            kernel_basis: kernel.into_iter().map(Vector::from_raw).collect(),
            complement_basis: complement.into_iter().map(Vector::from_raw).collect(),
            anchor_volume,
        })
    }

    /// Anchors `e_2, ..., e_n` (the standard basis with `e_1` left free).
    pub fn standard(dim: usize, order: usize) -> Result<Self> {
        if order < 2 || order > dim {
            return Err(Error::InvalidOrder { order, dim });
        }
        let anchors = (1..order).map(|i| Vector::basis(dim, i)).collect();
        Self::new(dim, order, anchors)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn anchors(&self) -> &[Vector] {
        &self.anchors
    }

    pub fn rank_tolerance(&self) -> f64 {
        self.rank_tol
    }

    /// Orthonormal basis of the semi-norm kernel `span(b_2, ..., b_n)`.
    pub fn kernel_basis(&self) -> &[Vector] {
        &self.kernel_basis
    }

    /// Orthonormal basis of the orthogonal complement of the kernel.
    pub fn complement_basis(&self) -> &[Vector] {
        &self.complement_basis
    }

    /// `||x, b_2, ..., b_n||`, evaluated as `||b_2, ..., b_n||` times the
    /// length of the projection of `x` onto the complement of the anchor
    /// span. Exactly zero when `x` is numerically in that span.
    pub fn seminorm(&self, x: &Vector) -> Result<f64> {
        x.check_dim(self.dim)?;
        let mut rows: Vec<&[f64]> = Vec::with_capacity(self.order);
        rows.push(x.as_slice());
        rows.extend(self.anchors.iter().map(|a| a.as_slice()));
        if normalized_dependent(&rows, self.rank_tol) {
            return Ok(0.0);
        }
        let scale = binary_scale(x.as_slice());
        let coords: Vec<f64> = self
            .complement_basis
            .iter()
            .map(|c| dot(c.as_slice(), x.as_slice()) / scale)
            .collect();
        let len = libm::sqrt(dot(&coords, &coords));
        Ok(self.anchor_volume * len * scale)
    }

    /// `||b_2, ..., b_n||`.
    pub fn anchor_volume(&self) -> f64 {
        self.anchor_volume
    }

    /// `||x - y, b_2, ..., b_n||`.
    pub fn distance(&self, x: &Vector, y: &Vector) -> Result<f64> {
        x.check_dim(self.dim)?;
        y.check_dim(self.dim)?;
        self.seminorm(&(x - y))
    }

    /// Whether `{x, b_2, ..., b_n}` is linearly independent.
    pub fn independent_of_anchors(&self, x: &Vector) -> Result<bool> {
        x.check_dim(self.dim)?;
        let mut rows: Vec<&[f64]> = Vec::with_capacity(self.order);
        rows.push(x.as_slice());
        rows.extend(self.anchors.iter().map(|a| a.as_slice()));
        Ok(!normalized_dependent(&rows, self.rank_tol))
    }
}

/// The anchored semi-norm `||x, b_2, ..., b_n||` of `space`.
pub fn anchored_seminorm(space: &AnchoredSpace, x: &Vector) -> Result<f64> {
    space.seminorm(x)
}

/// Open or closed ball of the anchored semi-norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    space: AnchoredSpace,
    center: Vector,
    radius: f64,
    closed: bool,
}

impl Ball {
    pub fn new(space: AnchoredSpace, center: Vector, radius: f64, closed: bool) -> Result<Self> {
        center.check_dim(space.dim())?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "radius",
                value: radius,
            });
        }
        Ok(Self {
            space,
            center,
            radius,
            closed,
        })
    }

    pub fn open(space: AnchoredSpace, center: Vector, radius: f64) -> Result<Self> {
        Self::new(space, center, radius, false)
    }

    pub fn closed(space: AnchoredSpace, center: Vector, radius: f64) -> Result<Self> {
        Self::new(space, center, radius, true)
    }

    pub fn space(&self) -> &AnchoredSpace {
        &self.space
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn contains(&self, x: &Vector) -> Result<bool> {
        let d = self.space.distance(x, &self.center)?;
        Ok(if self.closed {
            d <= self.radius
        } else {
            d < self.radius
        })
    }
}

/// Free-function form of [`Ball::contains`].
pub fn ball_membership(ball: &Ball, x: &Vector) -> Result<bool> {
    ball.contains(x)
}

/// A finite prefix `x_1, ..., x_m` of a sequence in an anchored space.
#[derive(Debug, Clone, PartialEq)]
pub struct SequencePrefix {
    space: AnchoredSpace,
    items: Vec<Vector>,
}

impl SequencePrefix {
    pub fn new(space: AnchoredSpace, items: Vec<Vector>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::Empty);
        }
        for x in &items {
            x.check_dim(space.dim())?;
        }
        Ok(Self { space, items })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn items(&self) -> &[Vector] {
        &self.items
    }

    /// `max_{k, l >= from_index} ||x_l - x_k, b||` over the prefix
    /// (1-based `from_index`).
    pub fn b_cauchy_tail(&self, from_index: usize) -> Result<f64> {
        let len = self.items.len();
        if from_index == 0 || from_index > len {
            return Err(Error::IndexOutOfRange {
                index: from_index,
                len,
            });
        }
        let tail = &self.items[from_index - 1..];
        let mut worst: f64 = 0.0;
        for (i, xk) in tail.iter().enumerate() {
            for xl in &tail[i + 1..] {
                worst = worst.max(self.space.distance(xl, xk)?);
            }
        }
        Ok(worst)
    }

    /// `||x_m - candidate, b||` for the last element `x_m`.
    pub fn b_limit_estimate(&self, candidate: &Vector) -> Result<f64> {
        let last = self.items.last().expect("prefix is nonempty");
        self.space.distance(last, candidate)
    }
}

/// A point `(x, y)` of `X x X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductPoint {
    left: Vector,
    right: Vector,
}

impl ProductPoint {
    pub fn new(left: Vector, right: Vector) -> Result<Self> {
        right.check_dim(left.dim())?;
        Ok(Self { left, right })
    }

    pub fn left(&self) -> &Vector {
        &self.left
    }

    pub fn right(&self) -> &Vector {
        &self.right
    }
}

/// `||(x_1,y_1), ..., (x_n,y_n)||_1 = ||x_1, ..., x_n|| + ||y_1, ..., y_n||`.
pub fn product_nnorm(points: &[ProductPoint]) -> Result<f64> {
    let lefts: Vec<&[f64]> = points.iter().map(|p| p.left.as_slice()).collect();
    let rights: Vec<&[f64]> = points.iter().map(|p| p.right.as_slice()).collect();
    Ok(gram_nnorm(&lefts)? + gram_nnorm(&rights)?)
}
