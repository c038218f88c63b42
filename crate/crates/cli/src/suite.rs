//! Grid checks run by `verify` and the gallery.

use std::collections::BTreeMap;

use anyhow::Result;
use poisson_compact::exterior::MultivectorField;
use poisson_compact::verify::{jacobi_residual, rank_map, support_check, GridSpec, VerificationReport};
use serde::{Deserialize, Serialize};

use crate::artifact::Artifact;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Suite {
    pub jacobi: bool,
    pub support: bool,
    pub finite: bool,
    pub certificate: bool,
}

impl Suite {
    pub const ALL: Suite = Suite {
        jacobi: true,
        support: true,
        finite: true,
        certificate: true,
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub checks: Vec<VerificationReport>,
    pub rank_histogram: BTreeMap<usize, usize>,
    pub pass: bool,
}

/// Largest absolute component; infinite when any component is NaN or infinite.
pub fn finite_check(pi: &MultivectorField, points: &[Vec<f64>]) -> VerificationReport {
    let tape = pi.compile();
    for p in points {
        let v = tape.tape.eval(p);
        if v.iter().any(|x| !x.is_finite()) {
            return VerificationReport::new("finite", false, f64::INFINITY, Some(p.clone()));
        }
    }
    VerificationReport::new("finite", true, 0.0, None).with_detail(format!("{} points", points.len()))
}

pub fn run(a: &Artifact, suite: Suite, count: usize, seed: u64) -> Result<SuiteReport> {
    let pi = a.bivector.to_field()?;
    let points = GridSpec::random(a.domain.clone(), count, seed).points(pi.dim);
    let mut checks = Vec::new();
    if suite.finite {
        checks.push(finite_check(&pi, &points));
    }
    if suite.jacobi {
        checks.push(jacobi_residual(&pi, &points));
    }
    if suite.support {
        if let Some(s) = &a.support {
            checks.push(support_check(&pi, s, &points));
        }
    }
    if suite.certificate {
        checks.extend(a.certificate.iter().cloned());
    }
    let rank_histogram = rank_map(&pi, &points).histogram;
    let pass = checks.iter().all(|c| c.pass);
    Ok(SuiteReport {
        checks,
        rank_histogram,
        pass,
    })
}
