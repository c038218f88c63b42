use std::time::Instant;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{kappa_basis, sup_at, BoundaryData, BoundaryError, PfaffianData, PFAFF_TOL};
use crate::exterior::FormField;
use crate::linalg::sphere_directions;
use crate::symexpr::Expr;
use crate::verify::VerificationReport;

/// Directions sampled in `ker γ` per point for the taming check.
pub const TAMING_DIRECTIONS: usize = 200;
/// Required margin of `σ(V, J₀V)`.
pub const DELTA_POS: f64 = 1e-6;
/// Smallest `|det ω₀|` accepted as nondegenerate.
pub const NONDEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub k: usize,
    /// (a): regular Pfaffian distribution.
    pub regular: bool,
    /// (b): `σ^{n-k-1} ∧ (dγ)^k ∧ γ` nowhere zero on the samples.
    pub volume: bool,
    pub volume_min: f64,
    /// (c): `None` when no complex structure was supplied.
    pub taming: Option<bool>,
    pub taming_min: f64,
    pub semipositive_min: f64,
    pub witness: Option<Vec<f64>>,
}

impl ConvexityReport {
    pub fn pass(&self) -> bool {
        self.regular && self.volume && self.taming != Some(false)
    }
}

impl std::fmt::Display for ConvexityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c = match self.taming {
            None => "not checked",
            Some(true) => "certified",
            Some(false) => "not certified",
        };
        write!(
            f,
            "class {}: regular {}, volume {} (min {:.3e}), taming {c}",
            2 * self.k + 1,
            self.regular,
            self.volume,
            self.volume_min
        )
    }
}

fn power(w: &FormField, j: usize) -> FormField {
    (0..j).fold(FormField::scalar(w.dim, Expr::one()), |acc, _| acc.wedge(w).expect("same dim"))
}

pub fn check_pseudoconvex(bd: &BoundaryData, points: &[Vec<f64>]) -> Result<ConvexityReport, BoundaryError> {
    let m = bd.dim();
    let n = m.div_ceil(2);
    let pd = PfaffianData::new(bd.gamma.clone(), points)?;
    let mut witness = pd.witnesses.first().cloned();

    let top = power(&bd.sigma, n.saturating_sub(pd.k + 1))
        .wedge(&power(&pd.dgamma, pd.k))?
        .wedge(&bd.gamma)?;
    let mut volume_min = f64::INFINITY;
    for p in points {
        let v = sup_at(&top, p);
        if v < volume_min {
            volume_min = v;
            if v <= PFAFF_TOL && witness.is_none() {
                witness = Some(p.clone());
            }
        }
    }

    let (mut taming_min, mut semipositive_min) = (f64::INFINITY, f64::INFINITY);
    let taming = bd.j0.as_ref().map(|j0| {
        let sigma = bd.sigma.compile();
        let dgamma = pd.dgamma.compile();
        let dirs = sphere_directions(m - 1, TAMING_DIRECTIONS);
        let mut ok = true;
        for p in points {
            let kb = kappa_basis(&bd.gamma.eval_dense(p));
            let j = j0(p);
            let (s, d) = (sigma.matrix(p), dgamma.matrix(p));
            for v in &dirs {
                let v: DVector<f64> = &kb * v;
                let jv = &j * &v;
                let square = (&j * &jv + &v).amax();
                let tame = v.dot(&(&s * &jv));
                let semi = v.dot(&(&d * &jv));
                taming_min = taming_min.min(tame);
                semipositive_min = semipositive_min.min(semi);
                if tame <= DELTA_POS || semi < -PFAFF_TOL || square > PFAFF_TOL {
                    if ok && witness.is_none() {
                        witness = Some(p.clone());
                    }
                    ok = false;
                }
            }
        }
        ok
    });
    Ok(ConvexityReport {
        k: pd.k,
        regular: pd.regular,
        volume: volume_min > PFAFF_TOL,
        volume_min,
        taming,
        taming_min,
        semipositive_min,
        witness,
    })
}

/// `ω₀ = σ + dt∧γ + t dγ` on the collar, with `t` appended last, and a
/// nondegeneracy check at the samples `(y, t)`.
pub fn symplectic_extension_form(bd: &BoundaryData, points: &[Vec<f64>]) -> Result<(FormField, VerificationReport), BoundaryError> {
    let start = Instant::now();
    let m = bd.dim();
    let map: Vec<usize> = (0..m).collect();
    let sigma = bd.sigma.reindex(m + 1, &map);
    let gamma = bd.gamma.reindex(m + 1, &map);
    let t = Expr::var(m);
    let dt = FormField::basis(m + 1, &[m]);
    let omega = sigma.add(&dt.wedge(&gamma)?)?.add(&gamma.d().scale(&t))?;
    let tape = omega.compile();
    let mut worst = f64::INFINITY;
    let mut witness = None;
    for p in points {
        let det = tape.matrix(p).determinant().abs();
        if det < worst {
            worst = det;
            witness = Some(p.clone());
        }
    }
    let pass = worst > NONDEGENERACY_TOL;
    let report = VerificationReport::new("symplectic-extension", pass, worst, if pass { None } else { witness })
        .with_detail("smallest |det ω₀|")
        .timed(start.elapsed());
    Ok((omega, report))
}
