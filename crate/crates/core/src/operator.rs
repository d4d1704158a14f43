//! Self-maps `T: R^d -> R^d`: affine maps `Ax + c` and a fixed catalog of
//! named builtins.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::nnorm::AnchoredSpace;
use crate::sampling::Sampler;
use crate::{is_linearly_dependent, Error, Result, Vector};

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Empty);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        if let Some(i) = data.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { dim, data })
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1.0; dim])
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut m = Self::zeros(dim);
        for (i, d) in diag.iter().enumerate() {
            m.data[i * dim + i] = *d;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim + col]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn mul_vec(&self, x: &Vector) -> Vector {
        debug_assert_eq!(x.dim(), self.dim);
        Vector::from_raw(
            self.data
                .chunks(self.dim)
                .map(|row| row.iter().zip(x.as_slice()).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = Matrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a != 0.0 {
                    for j in 0..d {
                        out.data[i * d + j] += a * other.get(k, j);
                    }
                }
            }
        }
        out
    }
}

/// Named maps with real parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Builtin {
    /// `x -> factor * x`.
    Scale { factor: f64 },
    /// `x -> value`.
    Constant { value: Vector },
    /// First coordinate `t -> t / (1 + |t|)`, the rest fixed.
    Saturating,
    /// Rotation by `angle` in the coordinate plane `(i, j)` followed by
    /// scaling the whole vector by `scale`.
    RotationScale {
        plane: (usize, usize),
        angle: f64,
        scale: f64,
    },
    /// First coordinate `t -> t + height` for `t >= threshold`, identity
    /// otherwise. Discontinuous on purpose.
    Step { threshold: f64, height: f64 },
}

impl Builtin {
    /// Catalog lookup. Parameter lists:
    ///
    /// | name             | params                          |
    /// |------------------|---------------------------------|
    /// | `scale`          | `[factor]`                      |
    /// | `constant`       | the constant vector             |
    /// | `saturating`     | `[]`                            |
    /// | `rotation-scale` | `[i, j, angle, scale]`          |
    /// | `step`           | `[threshold, height]`           |
    pub fn from_name(name: &str, params: &[f64]) -> Result<Self> {
        let bad = |reason: &str| Error::InvalidBuiltin {
            name: name.to_string(),
            reason: reason.to_string(),
        };
        if let Some(i) = params.iter().position(|p| !p.is_finite()) {
            return Err(bad(&format!("parameter {i} is not finite")));
        }
        match name {
            "scale" => match params {
                [factor] => Ok(Builtin::Scale { factor: *factor }),
                _ => Err(bad("expected [factor]")),
            },
            "constant" => Vector::new(params.to_vec())
                .map(|value| Builtin::Constant { value })
                .map_err(|_| bad("expected a nonempty vector")),
            "saturating" => {
                if params.is_empty() {
                    Ok(Builtin::Saturating)
                } else {
                    Err(bad("takes no parameters"))
                }
            }
            "rotation-scale" => match params {
                [i, j, angle, scale] => {
                    let index = |v: f64| {
                        if v >= 0.0 && libm::trunc(v) == v {
                            Ok(v as usize)
                        } else {
                            Err(bad("plane indices must be nonnegative integers"))
                        }
                    };
                    let (i, j) = (index(*i)?, index(*j)?);
                    if i == j {
                        return Err(bad("plane indices must differ"));
                    }
                    Ok(Builtin::RotationScale {
                        plane: (i, j),
                        angle: *angle,
                        scale: *scale,
                    })
                }
                _ => Err(bad("expected [i, j, angle, scale]")),
            },
            "step" => match params {
                [threshold, height] => Ok(Builtin::Step {
                    threshold: *threshold,
                    height: *height,
                }),
                _ => Err(bad("expected [threshold, height]")),
            },
            other => Err(Error::UnknownBuiltin(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Scale { .. } => "scale",
            Builtin::Constant { .. } => "constant",
            Builtin::Saturating => "saturating",
            Builtin::RotationScale { .. } => "rotation-scale",
            Builtin::Step { .. } => "step",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match self {
            Builtin::Scale { factor } => vec![*factor],
            Builtin::Constant { value } => value.as_slice().to_vec(),
            Builtin::Saturating => Vec::new(),
            Builtin::RotationScale {
                plane: (i, j),
                angle,
                scale,
            } => vec![*i as f64, *j as f64, *angle, *scale],
            Builtin::Step { threshold, height } => vec![*threshold, *height],
        }
    }
}

/// A self-map of `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorSpec {
    Affine { matrix: Matrix, offset: Vector },
    Builtin(Builtin),
}

impl OperatorSpec {
    pub fn affine(matrix: Matrix, offset: Vector) -> Result<Self> {
        offset.check_dim(matrix.dim())?;
        Ok(OperatorSpec::Affine { matrix, offset })
    }

    pub fn linear(matrix: Matrix) -> Self {
        let d = matrix.dim();
        OperatorSpec::Affine {
            matrix,
            offset: Vector::zeros(d),
        }
    }

    pub fn builtin(name: &str, params: &[f64]) -> Result<Self> {
        Builtin::from_name(name, params).map(OperatorSpec::Builtin)
    }

    /// `(A, c)` when the map is affine on `R^dim`, including the affine
    /// builtins.
    pub fn affine_parts(&self, dim: usize) -> Option<(Matrix, Vector)> {
        match self {
            OperatorSpec::Affine { matrix, offset } if matrix.dim() == dim => {
                Some((matrix.clone(), offset.clone()))
            }
            OperatorSpec::Affine { .. } => None,
            OperatorSpec::Builtin(Builtin::Scale { factor }) => {
                Some((Matrix::diagonal(&vec![*factor; dim]), Vector::zeros(dim)))
            }
            OperatorSpec::Builtin(Builtin::Constant { value }) if value.dim() == dim => {
                Some((Matrix::zeros(dim), value.clone()))
            }
            OperatorSpec::Builtin(Builtin::RotationScale {
                plane: (i, j),
                angle,
                scale,
            }) if *i < dim && *j < dim => {
                let mut m = Matrix::diagonal(&vec![*scale; dim]);
                let (c, s) = (libm::cos(*angle), libm::sin(*angle));
                m.data[i * dim + i] = scale * c;
                m.data[i * dim + j] = -scale * s;
                m.data[j * dim + i] = scale * s;
                m.data[j * dim + j] = scale * c;
                Some((m, Vector::zeros(dim)))
            }
            OperatorSpec::Builtin(_) => None,
        }
    }

    /// `self ∘ inner` for affine maps on `R^dim`.
    pub fn compose(&self, inner: &OperatorSpec, dim: usize) -> Option<OperatorSpec> {
        let (a, c) = self.affine_parts(dim)?;
        let (b, e) = inner.affine_parts(dim)?;
        let offset = &a.mul_vec(&e) + &c;
        Some(OperatorSpec::Affine {
            matrix: a.mul(&b),
            offset,
        })
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        apply(self, x)
    }
}

/// Evaluates `T(x)`. Fails on dimension disagreement or a non-finite image.
pub fn apply(op: &OperatorSpec, x: &Vector) -> Result<Vector> {
    let y = match op {
        OperatorSpec::Affine { matrix, offset } => {
            x.check_dim(matrix.dim())?;
            &matrix.mul_vec(x) + offset
        }
        OperatorSpec::Builtin(b) => match b {
            Builtin::Scale { factor } => *factor * x,
            Builtin::Constant { value } => {
                x.check_dim(value.dim())?;
                value.clone()
            }
            Builtin::Saturating => {
                let mut c = x.as_slice().to_vec();
                c[0] /= 1.0 + c[0].abs();
                Vector::from_raw(c)
            }
            Builtin::RotationScale {
                plane: (i, j),
                angle,
                scale,
            } => {
                let d = x.dim();
                if *i >= d || *j >= d {
                    return Err(Error::DimensionMismatch {
                        expected: (*i).max(*j) + 1,
                        found: d,
                    });
                }
                let mut c: Vec<f64> = x.as_slice().iter().map(|v| scale * v).collect();
                let (cs, sn) = (libm::cos(*angle), libm::sin(*angle));
                c[*i] = scale * (cs * x[*i] - sn * x[*j]);
                c[*j] = scale * (sn * x[*i] + cs * x[*j]);
                Vector::from_raw(c)
            }
            Builtin::Step { threshold, height } => {
                let mut c = x.as_slice().to_vec();
                if c[0] >= *threshold {
                    c[0] += height;
                }
                Vector::from_raw(c)
            }
        },
    };
    if let Some(i) = y.as_slice().iter().position(|c| !c.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    Ok(y)
}

const KERNEL_SEED: u64 = 0x6b65_726e_656c;

/// Whether `T` maps the semi-norm kernel `span(b_2, ..., b_n)` into itself.
///
/// Affine maps are decided exactly: every `A b_j` and the offset `c` must lie
/// in the anchor span (rank test). Builtins are sampled: `θ` and `samples`
/// random kernel points must map to semi-norm at most `1e-9`.
pub fn kernel_preserved(op: &OperatorSpec, space: &AnchoredSpace, samples: usize) -> Result<bool> {
    let tol = space.rank_tolerance();
    if let OperatorSpec::Affine { matrix, offset } = op {
        offset.check_dim(space.dim())?;
        let mut images: Vec<Vector> = space.anchors().iter().map(|b| matrix.mul_vec(b)).collect();
        images.push(offset.clone());
        for image in images {
            if image.norm2() == 0.0 {
                continue;
            }
            let mut rows: Vec<&[f64]> = space.anchors().iter().map(|b| b.as_slice()).collect();
            rows.push(image.as_slice());
            if !is_linearly_dependent(&rows, tol)? {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    let mut sampler = Sampler::new(KERNEL_SEED);
    let mut point = Vector::zeros(space.dim());
    for i in 0..=samples {
        if i > 0 {
            let scale = sampler.log_uniform(-3.0, 3.0);
            point = sampler.kernel_component(space, scale);
        }
        if space.seminorm(&apply(op, &point)?)? > 1e-9 {
            return Ok(false);
        }
    }
    Ok(true)
}

impl core::fmt::Display for OperatorSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            OperatorSpec::Affine { matrix, offset } => {
                write!(f, "affine(A = {:?}, c = {:?})", matrix.rows(), offset.as_slice())
            }
            OperatorSpec::Builtin(b) => write!(f, "{}{:?}", b.name(), b.params()),
        }
    }
}

/// Human-readable label used in reports.
pub fn describe(op: &OperatorSpec) -> String {
    format!("{op}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn apply_examples() {
        let half = OperatorSpec::affine(Matrix::diagonal(&[0.5; 3]), v(&[1., 0., 0.])).unwrap();
        assert_eq!(apply(&half, &Vector::zeros(3)).unwrap(), v(&[1., 0., 0.]));
        let scale = OperatorSpec::builtin("scale", &[0.5]).unwrap();
        assert_eq!(apply(&scale, &v(&[2., 4.])).unwrap(), v(&[1., 2.]));
        let diag = OperatorSpec::linear(Matrix::diagonal(&[2., 1., 1.]));
        assert_eq!(apply(&diag, &v(&[3., 0., 0.])).unwrap(), v(&[6., 0., 0.]));
    }

    #[test]
    fn apply_errors() {
        let diag = OperatorSpec::linear(Matrix::diagonal(&[2., 1., 1.]));
        assert!(matches!(
            apply(&diag, &v(&[1., 2.])),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(
            OperatorSpec::builtin("cube", &[]),
            Err(Error::UnknownBuiltin("cube".into()))
        );
        assert!(OperatorSpec::builtin("scale", &[]).is_err());
        assert!(OperatorSpec::builtin("rotation-scale", &[0., 0., 1., 1.]).is_err());
        let huge = OperatorSpec::builtin("scale", &[1e308]).unwrap();
        assert_eq!(apply(&huge, &v(&[10.0])), Err(Error::NonFinite(0)));
    }

    #[test]
    fn builtin_catalog_round_trips() {
        for (name, params) in [
            ("scale", vec![0.25]),
            ("constant", vec![1., 2.]),
            ("saturating", vec![]),
            ("rotation-scale", vec![0., 3., 0.7, 1.]),
            ("step", vec![0., 1.]),
        ] {
            let b = Builtin::from_name(name, &params).unwrap();
            assert_eq!(b.name(), name);
            assert_eq!(b.params(), params);
        }
    }

    #[test]
    fn builtins_behave() {
        let sat = OperatorSpec::builtin("saturating", &[]).unwrap();
        assert_eq!(apply(&sat, &v(&[1., 5.])).unwrap(), v(&[0.5, 5.]));
        let step = OperatorSpec::builtin("step", &[0., 1.]).unwrap();
        assert_eq!(apply(&step, &v(&[-0.1, 0.])).unwrap(), v(&[-0.1, 0.]));
        assert_eq!(apply(&step, &v(&[0., 0.])).unwrap(), v(&[1., 0.]));
        let rot = OperatorSpec::builtin("rotation-scale", &[0., 1., core::f64::consts::FRAC_PI_2, 2.]).unwrap();
        let y = apply(&rot, &v(&[1., 0., 3.])).unwrap();
        assert!((y[0]).abs() < 1e-15 && (y[1] - 2.).abs() < 1e-15 && y[2] == 6.);
        let (m, c) = rot.affine_parts(3).unwrap();
        let z = &m.mul_vec(&v(&[1., 0., 3.])) + &c;
        assert!((&z - &y).norm2() < 1e-15);
    }

    #[test]
    fn kernel_preservation_examples() {
        let s = AnchoredSpace::standard(3, 3).unwrap();
        let diag = OperatorSpec::linear(Matrix::diagonal(&[2., 1., 1.]));
        assert!(kernel_preserved(&diag, &s, 16).unwrap());
        let swap = OperatorSpec::linear(
            Matrix::from_rows(vec![vec![0., 1., 0.], vec![1., 0., 0.], vec![0., 0., 1.]]).unwrap(),
        );
        assert!(!kernel_preserved(&swap, &s, 16).unwrap());
        let constant = OperatorSpec::builtin("constant", &[1., 0., 0.]).unwrap();
        assert!(!kernel_preserved(&constant, &s, 16).unwrap());
        let in_span = OperatorSpec::builtin("constant", &[0., 4., 0.]).unwrap();
        assert!(kernel_preserved(&in_span, &s, 16).unwrap());
        let scale = OperatorSpec::builtin("scale", &[0.5]).unwrap();
        assert!(kernel_preserved(&scale, &s, 16).unwrap());
        let shifted = OperatorSpec::affine(Matrix::identity(3), v(&[1., 0., 0.])).unwrap();
        assert!(!kernel_preserved(&shifted, &s, 16).unwrap());
    }

    #[test]
    fn composition_is_affine_product() {
        let t = OperatorSpec::affine(Matrix::diagonal(&[2., 3.]), v(&[1., 1.])).unwrap();
        let s = OperatorSpec::builtin("scale", &[0.5]).unwrap();
        let ts = t.compose(&s, 2).unwrap();
        let x = v(&[4., -2.]);
        assert_eq!(apply(&ts, &x).unwrap(), apply(&t, &apply(&s, &x).unwrap()).unwrap());
    }
}
