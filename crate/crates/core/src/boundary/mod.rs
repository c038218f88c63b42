//! Pfaffian distributions on boundary patches, convexity checks and the
//! Poisson extension across a collar.

mod convex;
mod extension;
mod models;

pub use convex::{check_pseudoconvex, symplectic_extension_form, ConvexityReport, DELTA_POS, TAMING_DIRECTIONS};
pub use extension::{dirac_interpolation, poisson_extension, DiracInterpolation, ExtensionCertificate, PoissonExtension};
pub use models::{contact_ball, cosymplectic, BoundaryModel};

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::exterior::{FormField, MultivectorField};
use crate::linalg::null_space;

/// Threshold below which a form coefficient counts as vanishing.
pub const PFAFF_TOL: f64 = 1e-10;
pub const INVOLUTIVITY_TOL: f64 = 1e-6;
const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum BoundaryError {
    #[error("γ vanishes at {0:?}")]
    GammaVanishes(Vec<f64>),
    #[error("γ is not regular: γ∧(dγ)^k vanishes at {0:?}")]
    Irregular(Vec<f64>),
    #[error("kernel has rank {got} instead of {expected} at {point:?}")]
    KernelRank { point: Vec<f64>, got: usize, expected: usize },
    #[error("odd boundary dimension required, got {0}")]
    EvenDimension(usize),
    #[error("the extension needs the double-exponential taper")]
    Regime,
    #[error("stage {stage}: {detail}")]
    Stage { stage: &'static str, detail: String },
    #[error(transparent)]
    Exterior(#[from] crate::exterior::ExteriorError),
}

/// Complex structure on `ker γ`, as an `m × m` matrix at each boundary point.
pub type ComplexStructure = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// `γ ∧ (dγ)^j` for `j = 0..=(m-1)/2`.
fn pfaff_powers(gamma: &FormField, dgamma: &FormField) -> Vec<FormField> {
    let m = gamma.dim;
    let mut out = vec![gamma.clone()];
    while out.last().expect("nonempty").degree + 2 <= m {
        let next = out.last().expect("nonempty").wedge(dgamma).expect("same dim");
        out.push(next);
    }
    out
}

pub(crate) fn sup_at(f: &FormField, p: &[f64]) -> f64 {
    f.eval_dense(p).iter().fold(0.0, |a, v| a.max(v.abs()))
}

/// A 1-form on a boundary patch with its Pfaffian class on a sample set.
#[derive(Debug, Clone)]
pub struct PfaffianData {
    pub gamma: FormField,
    pub dgamma: FormField,
    /// Class is `2k + 1`.
    pub k: usize,
    pub regular: bool,
    /// Samples where `γ ∧ (dγ)^k` vanishes.
    pub witnesses: Vec<Vec<f64>>,
}

impl PfaffianData {
    pub fn new(gamma: FormField, points: &[Vec<f64>]) -> Result<PfaffianData, BoundaryError> {
        let dgamma = gamma.d();
        let powers = pfaff_powers(&gamma, &dgamma);
        let mut k = 0;
        for p in points {
            if sup_at(&gamma, p) <= PFAFF_TOL {
                return Err(BoundaryError::GammaVanishes(p.clone()));
            }
            for (j, w) in powers.iter().enumerate().skip(k + 1) {
                if sup_at(w, p) > PFAFF_TOL {
                    k = j;
                }
            }
        }
        let witnesses: Vec<Vec<f64>> = points.iter().filter(|p| sup_at(&powers[k], p) <= PFAFF_TOL).cloned().collect();
        Ok(PfaffianData {
            gamma,
            dgamma,
            k,
            regular: witnesses.is_empty(),
            witnesses,
        })
    }

    pub fn dim(&self) -> usize {
        self.gamma.dim
    }

    pub fn class(&self) -> usize {
        2 * self.k + 1
    }

    /// Expected rank of the characteristic distribution.
    pub fn kernel_rank(&self) -> usize {
        self.dim() - 2 * self.k - 1
    }
}

/// `(k, regular, witnesses)` of `γ` on the samples.
pub fn pfaffian_class(gamma: &FormField, points: &[Vec<f64>]) -> Result<(usize, bool, Vec<Vec<f64>>), BoundaryError> {
    let pd = PfaffianData::new(gamma.clone(), points)?;
    Ok((pd.k, pd.regular, pd.witnesses))
}

/// Basis of `ker γ` at a point from the coefficient vector `g`: the pivot is
/// the largest coefficient and every other axis is corrected along it.
pub fn kappa_basis(g: &[f64]) -> DMatrix<f64> {
    let m = g.len();
    let pivot = (0..m).fold(0, |b, i| if g[i].abs() > g[b].abs() { i } else { b });
    let others: Vec<usize> = (0..m).filter(|&i| i != pivot).collect();
    DMatrix::from_fn(m, m - 1, |r, c| {
        let i = others[c];
        if r == i {
            1.0
        } else if r == pivot {
            -g[i] / g[pivot]
        } else {
            0.0
        }
    })
}

/// Characteristic distribution `ker(dγ|_κ) ⊂ κ`.
#[derive(Debug, Clone)]
pub struct KernelFrame {
    pub rank: usize,
    /// Coordinate frame, when one exists.
    pub symbolic: Option<Vec<MultivectorField>>,
    /// Column bases at the samples.
    pub frames: Vec<DMatrix<f64>>,
    /// Largest normal component of brackets of projected coordinate fields.
    pub involutivity: f64,
}

fn kernel_at(pd: &PfaffianData, p: &[f64]) -> Result<DMatrix<f64>, BoundaryError> {
    let g = pd.gamma.eval_dense(p);
    let kb = kappa_basis(&g);
    let a = pd.dgamma.compile().matrix(p);
    let s = kb.transpose() * &a * &kb;
    let null = null_space(&s, 1e-9);
    if null.len() != pd.kernel_rank() {
        return Err(BoundaryError::KernelRank {
            point: p.to_vec(),
            got: null.len(),
            expected: pd.kernel_rank(),
        });
    }
    let m = pd.dim();
    if null.is_empty() {
        return Ok(DMatrix::zeros(m, 0));
    }
    let c = DMatrix::from_columns(&null);
    Ok(kb * c)
}

fn projector(h: &DMatrix<f64>) -> DMatrix<f64> {
    if h.ncols() == 0 {
        return DMatrix::zeros(h.nrows(), h.nrows());
    }
    let gram = (h.transpose() * h).try_inverse().expect("frame columns are independent");
    h * gram * h.transpose()
}

pub fn pfaffian_kernel(pd: &PfaffianData, points: &[Vec<f64>]) -> Result<KernelFrame, BoundaryError> {
    if let Some(w) = pd.witnesses.first() {
        return Err(BoundaryError::Irregular(w.clone()));
    }
    let m = pd.dim();
    let coordinate: Vec<usize> = (0..m)
        .filter(|&i| pd.gamma.get(&[i]).is_zero() && pd.dgamma.entries().all(|(idx, _)| !idx.contains(&i)))
        .collect();
    let symbolic = (coordinate.len() == pd.kernel_rank())
        .then(|| coordinate.iter().map(|&i| MultivectorField::basis(m, &[i])).collect());
    let frames = points.iter().map(|p| kernel_at(pd, p)).collect::<Result<Vec<_>, _>>()?;

    let mut involutivity: f64 = 0.0;
    if pd.kernel_rank() >= 2 {
        let proj = |p: &[f64]| kernel_at(pd, p).map(|h| projector(&h));
        for p in points {
            let pm = proj(p)?;
            // dp[l] = ∂_l P at p
            let mut dp = Vec::with_capacity(m);
            for l in 0..m {
                let mut a = p.clone();
                let mut b = p.clone();
                a[l] += FD_STEP;
                b[l] -= FD_STEP;
                dp.push((proj(&a)? - proj(&b)?) / (2.0 * FD_STEP));
            }
            let field = |a: usize| pm.column(a).into_owned();
            let deriv = |a: usize, along: &DVector<f64>| -> DVector<f64> {
                let mut out = DVector::zeros(m);
                for l in 0..m {
                    out += dp[l].column(a) * along[l];
                }
                out
            };
            let normal = DMatrix::identity(m, m) - &pm;
            for a in 0..m {
                for b in a + 1..m {
                    let (xa, xb) = (field(a), field(b));
                    let bracket = deriv(b, &xa) - deriv(a, &xb);
                    involutivity = involutivity.max((&normal * bracket).amax());
                }
            }
        }
    }
    Ok(KernelFrame {
        rank: pd.kernel_rank(),
        symbolic,
        frames,
        involutivity,
    })
}

/// Boundary data of a collar: `σ` and `γ` on an odd-dimensional patch, with
/// an optional complex structure on `ker γ`.
#[derive(Clone)]
pub struct BoundaryData {
    pub sigma: FormField,
    pub gamma: FormField,
    pub j0: Option<ComplexStructure>,
}

impl std::fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BoundaryData")
            .field("sigma", &self.sigma)
            .field("gamma", &self.gamma)
            .field("j0", &self.j0.as_ref().map(|_| "<fn>"))
            .finish()
    }
}

impl BoundaryData {
    pub fn new(sigma: FormField, gamma: FormField, j0: Option<ComplexStructure>) -> Result<BoundaryData, BoundaryError> {
        let m = gamma.dim;
        if sigma.dim != m {
            return Err(crate::exterior::ExteriorError::Dim(sigma.dim, m).into());
        }
        if m.is_multiple_of(2) {
            return Err(BoundaryError::EvenDimension(m));
        }
        Ok(BoundaryData { sigma, gamma, j0 })
    }

    pub fn dim(&self) -> usize {
        self.gamma.dim
    }

    /// Pointwise splitting `dγ = α + β∧γ` with `α(R, ·) = 0` and `β(R) = 0`
    /// for `R = g/|g|²`; returns `(α, β, reconstruction residual)`.
    pub fn split_dgamma_at(&self, p: &[f64]) -> (DMatrix<f64>, DVector<f64>, f64) {
        let g = DVector::from_vec(self.gamma.eval_dense(p));
        let r = &g / g.norm_squared();
        let a = self.gamma.d().compile().matrix(p);
        let beta = -(a.transpose() * &r);
        let wedge = &beta * g.transpose() - &g * beta.transpose();
        let alpha = &a - &wedge;
        let residual = (&alpha + &wedge - &a).amax().max((alpha.transpose() * &r).amax());
        (alpha, beta, residual)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::Expr;

    fn darboux(m: usize, k: usize) -> FormField {
        let mut g = FormField::basis(m, &[0]);
        for i in 0..k {
            g.set(&[2 + 2 * i], Expr::var(1 + 2 * i));
        }
        g
    }

    fn samples(m: usize) -> Vec<Vec<f64>> {
        (0..20).map(|s| (0..m).map(|i| ((s * 7 + i * 3) % 11) as f64 / 11.0 - 0.4).collect()).collect()
    }

    #[test]
    fn darboux_class_is_detected() {
        for k in 0..=2 {
            let (got, regular, _) = pfaffian_class(&darboux(7, k), &samples(7)).unwrap();
            assert_eq!((got, regular), (k, true));
        }
    }

    #[test]
    fn darboux_kernel_is_a_coordinate_frame() {
        let pts = samples(5);
        let pd = PfaffianData::new(darboux(5, 1), &pts).unwrap();
        let kf = pfaffian_kernel(&pd, &pts).unwrap();
        let sym = kf.symbolic.unwrap();
        assert_eq!(sym.len(), 2);
        assert!(sym[0].get(&[3]).is_one() && sym[1].get(&[4]).is_one());
        assert!(kf.involutivity < INVOLUTIVITY_TOL);
        let contact = PfaffianData::new(darboux(3, 1), &samples(3)).unwrap();
        assert_eq!(pfaffian_kernel(&contact, &samples(3)).unwrap().rank, 0);
    }

    #[test]
    fn degenerate_contact_form_has_witnesses() {
        let mut g = FormField::basis(3, &[2]);
        g.set(&[1], Expr::var(0).powi(2));
        let mut pts = samples(3);
        pts.push(vec![0.0, 0.3, 0.1]);
        let pd = PfaffianData::new(g, &pts).unwrap();
        assert_eq!(pd.k, 1);
        assert!(!pd.regular);
        assert_eq!(pd.witnesses, vec![vec![0.0, 0.3, 0.1]]);
    }

    #[test]
    fn splitting_reconstructs() {
        let mut sigma = FormField::zero(3, 2);
        sigma.set(&[1, 2], Expr::one());
        let bd = BoundaryData::new(sigma, darboux(3, 1), None).unwrap();
        let (_, _, res) = bd.split_dgamma_at(&[0.2, -0.3, 0.5]);
        assert!(res < 1e-12);
    }
}
