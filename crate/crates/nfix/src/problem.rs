//! JSON problem files.

use std::fs;
use std::path::Path;

use nfix_core::nnorm::AnchoredSpace;
use nfix_core::operator::{Matrix, OperatorSpec};
use nfix_core::solver::{Coefficients, ConstantCheck, Regime, RegimeKind, SolverConfig, DEFAULT_MAX_ITER, DEFAULT_TOL};
use nfix_core::Vector;
use serde::{Deserialize, Serialize};

/// Sampling budget for cross-checking declared constants when the file does
/// not set `check_budget`.
pub const DEFAULT_CHECK_BUDGET: usize = 1000;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
}

fn field_error(field: impl Into<String>, message: impl ToString) -> ConfigError {
    ConfigError::Field {
        field: field.into(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum OperatorDecl {
    Affine {
        matrix: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        offset: Option<Vec<f64>>,
    },
    Builtin {
        name: String,
        #[serde(default)]
        params: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SequenceDecl {
    Geometric { geometric: f64 },
    Explicit { terms: Vec<f64>, tail: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverDecl {
    pub regime: RegimeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_seq: Option<SequenceDecl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    /// Pairs sampled to cross-check (or estimate) the constant; 0 disables
    /// the cross-check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check_budget: Option<usize>,
}

/// On-disk problem description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dimension: usize,
    pub order: usize,
    pub anchors: Vec<Vec<f64>>,
    pub operator: OperatorDecl,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverDecl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: u64,
}

/// A validated problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub space: AnchoredSpace,
    pub operator: OperatorSpec,
    pub solver: Option<SolverConfig>,
    pub x0: Option<Vector>,
    pub seed: u64,
}

fn vector(field: &str, coords: &[f64], dim: usize) -> Result<Vector, ConfigError> {
    if coords.len() != dim {
        return Err(field_error(
            field,
            format!("expected {dim} coordinates, found {}", coords.len()),
        ));
    }
    Vector::new(coords.to_vec()).map_err(|e| field_error(field, e))
}

fn positive(field: &str, value: Option<f64>) -> Result<f64, ConfigError> {
    match value {
        Some(v) => Ok(v),
        None => Err(field_error(field, "required for this regime")),
    }
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files serialize")
    }

    pub fn validate(&self) -> Result<Problem, ConfigError> {
        let dim = self.dimension;
        if dim == 0 {
            return Err(field_error("dimension", "must be at least 1"));
        }
        if self.order < 2 || self.order > dim {
            return Err(field_error(
                "order",
                format!("must satisfy 2 <= order <= dimension = {dim}, found {}", self.order),
            ));
        }
        if self.anchors.len() != self.order - 1 {
            return Err(field_error(
                "anchors",
                format!("expected order - 1 = {} anchors, found {}", self.order - 1, self.anchors.len()),
            ));
        }
        let anchors = self
            .anchors
            .iter()
            .enumerate()
            .map(|(i, a)| vector(&format!("anchors[{i}]"), a, dim))
            .collect::<Result<Vec<_>, _>>()?;
        let space = AnchoredSpace::new(dim, self.order, anchors).map_err(|e| field_error("anchors", e))?;
        let operator = self.operator.validate(dim)?;
        let x0 = self
            .x0
            .as_ref()
            .map(|x| vector("x0", x, dim))
            .transpose()?;
        let solver = self
            .solver
            .as_ref()
            .map(|s| s.validate(self.seed))
            .transpose()?;
        Ok(Problem {
            space,
            operator,
            solver,
            x0,
            seed: self.seed,
        })
    }
}

impl OperatorDecl {
    fn validate(&self, dim: usize) -> Result<OperatorSpec, ConfigError> {
        match self {
            OperatorDecl::Affine { matrix, offset } => {
                if matrix.len() != dim || matrix.iter().any(|r| r.len() != dim) {
                    return Err(field_error("operator.matrix", format!("must be {dim} x {dim}")));
                }
                let m = Matrix::from_rows(matrix.clone()).map_err(|e| field_error("operator.matrix", e))?;
                let offset = match offset {
                    Some(o) => vector("operator.offset", o, dim)?,
                    None => Vector::zeros(dim),
                };
                OperatorSpec::affine(m, offset).map_err(|e| field_error("operator", e))
            }
            OperatorDecl::Builtin { name, params } => {
                let op = OperatorSpec::builtin(name, params).map_err(|e| field_error("operator.name", e))?;
                if let OperatorSpec::Builtin(nfix_core::operator::Builtin::Constant { value }) = &op {
                    if value.dim() != dim {
                        return Err(field_error(
                            "operator.params",
                            format!("constant needs {dim} coordinates, found {}", value.dim()),
                        ));
                    }
                }
                if let OperatorSpec::Builtin(nfix_core::operator::Builtin::RotationScale { plane, .. }) = &op {
                    if plane.0 >= dim || plane.1 >= dim {
                        return Err(field_error("operator.params", format!("plane {plane:?} is outside dimension {dim}")));
                    }
                }
                Ok(op)
            }
        }
    }
}

impl SolverDecl {
    fn validate(&self, seed: u64) -> Result<SolverConfig, ConfigError> {
        let regime = match self.regime {
            RegimeKind::Picard => Regime::Picard { alpha: self.alpha },
            RegimeKind::Ball => Regime::Ball {
                alpha: positive("solver.alpha", self.alpha)?,
                radius: positive("solver.radius", self.radius)?,
            },
            RegimeKind::Summable => {
                let coefficients = match &self.a_seq {
                    Some(SequenceDecl::Geometric { geometric }) => Coefficients::Geometric { ratio: *geometric },
                    Some(SequenceDecl::Explicit { terms, tail }) => Coefficients::Explicit {
                        terms: terms.clone(),
                        tail: *tail,
                    },
                    None => return Err(field_error("solver.a_seq", "required for this regime")),
                };
                coefficients.validate().map_err(|e| field_error("solver.a_seq", e))?;
                Regime::Summable { coefficients }
            }
            RegimeKind::Kannan => Regime::Kannan { beta: self.beta },
            RegimeKind::Edelstein => Regime::Edelstein,
        };
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a < 1.0) {
                return Err(field_error("solver.alpha", format!("{a} is outside (0, 1)")));
            }
        }
        if let Some(b) = self.beta {
            if !(b > 0.0 && b < 0.5) {
                return Err(field_error("solver.beta", format!("{b} is outside (0, 1/2)")));
            }
        }
        if let Some(r) = self.radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(field_error("solver.radius", format!("{r} is not a positive number")));
            }
        }
        let tol = self.tol.unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(field_error("solver.tol", format!("{tol} is not a positive number")));
        }
        let max_iter = self.max_iter.unwrap_or(DEFAULT_MAX_ITER);
        if max_iter == 0 {
            return Err(field_error("solver.max_iter", "must be positive"));
        }
        let mut cfg = SolverConfig::new(regime).with_tol(tol).with_max_iter(max_iter);
        let budget = self.check_budget.unwrap_or(DEFAULT_CHECK_BUDGET);
        if budget > 0 {
            cfg = cfg.with_constant_check(ConstantCheck { budget, seed });
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HALF: &str = r#"{
        "dimension": 3,
        "order": 3,
        "anchors": [[0, 1, 0], [0, 0, 1]],
        "operator": {"kind": "affine", "matrix": [[0.5, 0, 0], [0, 0.5, 0], [0, 0, 0.5]], "offset": [1, 0, 0]},
        "solver": {"regime": "picard", "alpha": 0.5, "tol": 1e-10},
        "x0": [0, 0, 0],
        "seed": 3
    }"#;

    #[test]
    fn round_trip_preserves_validated_problem() {
        let file = ProblemFile::parse(HALF).unwrap();
        let again = ProblemFile::parse(&file.to_json()).unwrap();
        assert_eq!(file, again);
        assert_eq!(file.validate().unwrap(), again.validate().unwrap());
    }

    #[test]
    fn field_diagnostics() {
        let bad = HALF.replace("\"alpha\": 0.5", "\"alpha\": 1.5");
        let err = ProblemFile::parse(&bad).unwrap().validate().unwrap_err();
        assert_eq!(err.to_string(), "solver.alpha: 1.5 is outside (0, 1)");

        let bad = HALF.replace("[0, 0, 1]]", "[0, 1, 0]]");
        let err = ProblemFile::parse(&bad).unwrap().validate().unwrap_err();
        assert!(err.to_string().starts_with("anchors:"), "{err}");

        let bad = HALF.replace("\"x0\": [0, 0, 0]", "\"x0\": [0, 0]");
        let err = ProblemFile::parse(&bad).unwrap().validate().unwrap_err();
        assert_eq!(err.to_string(), "x0: expected 3 coordinates, found 2");

        let bad = HALF.replace("\"seed\": 3", "\"sed\": 3");
        let err = ProblemFile::parse(&bad).unwrap_err();
        assert!(err.to_string().contains("unknown field `sed`"), "{err}");
        assert!(err.to_string().contains("line 8"), "{err}");
    }

    #[test]
    fn sequences_and_builtins() {
        let file = ProblemFile::parse(
            r#"{"dimension": 2, "order": 2, "anchors": [[0, 1]],
                "operator": {"kind": "builtin", "name": "scale", "params": [0.5]},
                "solver": {"regime": "summable", "a_seq": {"terms": [0.9, 0.5], "tail": 0}},
                "x0": [1, 1]}"#,
        )
        .unwrap();
        let p = file.validate().unwrap();
        assert_eq!(
            p.solver.unwrap().regime,
            Regime::Summable {
                coefficients: Coefficients::Explicit { terms: vec![0.9, 0.5], tail: 0.0 }
            }
        );
        let missing = file.to_json().replace("\"a_seq\"", "\"unused\"");
        assert!(ProblemFile::parse(&missing).is_err());
    }
}
