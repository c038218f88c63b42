use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PatchError {
    #[error("duplicate variable name {0:?}")]
    DuplicateVar(String),
    #[error("expected {expected} variable names, got {got}")]
    VarCount { expected: usize, got: usize },
    #[error("collar variable {0:?} is not a patch variable")]
    UnknownCollarVar(String),
    #[error("region does not fit a {dim}-dimensional patch: {reason}")]
    Region { dim: usize, reason: String },
    #[error("unknown variable {0:?}")]
    UnknownVar(String),
}

/// Where the coordinates of a patch live.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Box { bounds: Vec<(f64, f64)> },
    Ball { radius: f64 },
    Annulus { inner: f64, outer: f64 },
    Simplex,
    /// Box on the boundary coordinates times `[t0, t1)`; `t1` may be infinite.
    Collar { boundary: Vec<(f64, f64)>, t0: f64, t1: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchSpec {
    pub dim: usize,
    pub varnames: Vec<String>,
    pub region: Region,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collar_var: Option<String>,
}

impl PatchSpec {
    pub fn new(varnames: &[&str], region: Region) -> Result<PatchSpec, PatchError> {
        let p = PatchSpec {
            dim: varnames.len(),
            varnames: varnames.iter().map(|s| s.to_string()).collect(),
            region,
            collar_var: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Euclidean patch with variables `x1..xn`.
    pub fn euclidean(dim: usize, region: Region) -> PatchSpec {
        let names: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
        PatchSpec {
            dim,
            varnames: names,
            region,
            collar_var: None,
        }
    }

    /// Collar patch: boundary variables followed by `t`.
    pub fn collar(boundary_vars: &[&str], boundary: Vec<(f64, f64)>, t0: f64) -> PatchSpec {
        let mut names: Vec<String> = boundary_vars.iter().map(|s| s.to_string()).collect();
        names.push("t".into());
        PatchSpec {
            dim: names.len(),
            varnames: names,
            region: Region::Collar {
                boundary,
                t0,
                t1: f64::INFINITY,
            },
            collar_var: Some("t".into()),
        }
    }

    pub fn validate(&self) -> Result<(), PatchError> {
        if self.varnames.len() != self.dim {
            return Err(PatchError::VarCount {
                expected: self.dim,
                got: self.varnames.len(),
            });
        }
        for (i, a) in self.varnames.iter().enumerate() {
            if self.varnames[..i].contains(a) {
                return Err(PatchError::DuplicateVar(a.clone()));
            }
        }
        if let Some(c) = &self.collar_var {
            if !self.varnames.contains(c) {
                return Err(PatchError::UnknownCollarVar(c.clone()));
            }
        }
        let bad = |reason: &str| {
            Err(PatchError::Region {
                dim: self.dim,
                reason: reason.into(),
            })
        };
        match &self.region {
            Region::Box { bounds } => {
                if bounds.len() != self.dim {
                    return bad("box needs one interval per axis");
                }
                if bounds.iter().any(|(a, b)| !(a.is_finite() && b.is_finite() && a < b)) {
                    return bad("box intervals must be finite and nonempty");
                }
            }
            Region::Ball { radius } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return bad("ball radius must be positive and finite");
                }
            }
            Region::Annulus { inner, outer } => {
                if !(inner.is_finite() && outer.is_finite() && 0.0 <= *inner && inner < outer) {
                    return bad("annulus needs 0 <= inner < outer < inf");
                }
            }
            Region::Simplex => {}
            Region::Collar { boundary, t0, t1 } => {
                if boundary.len() + 1 != self.dim {
                    return bad("collar needs one interval per boundary axis");
                }
                if boundary.iter().any(|(a, b)| !(a.is_finite() && b.is_finite() && a < b)) {
                    return bad("collar boundary intervals must be finite");
                }
                if !(t0.is_finite() && t0 < t1) {
                    return bad("collar needs finite t0 < t1");
                }
            }
        }
        Ok(())
    }

    pub fn var_index(&self, name: &str) -> Result<usize, PatchError> {
        self.varnames
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| PatchError::UnknownVar(name.into()))
    }

    pub fn collar_index(&self) -> Option<usize> {
        self.collar_var.as_ref().and_then(|c| self.var_index(c).ok())
    }
}
