use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{check_pseudoconvex, symplectic_extension_form, BoundaryData, BoundaryError, PfaffianData};
use crate::exterior::{annihilator_residual, FieldTape, FormField, MultivectorField, Spinor};
use crate::par::Exec;
use crate::symexpr::{Expr, LogNum};
use crate::taper::{CasimirBump, FlatTaper, Regime};
use crate::verify::{BivectorTape, VerificationReport, JACOBI_TOL, T_MAX};

/// Below this collar height the bivector is read from the unnormalized
/// spinor, above it from the normalized one.
pub const NORMALIZE_FROM: f64 = 0.5;
pub const GERM_REL_TOL: f64 = 1e-10;
pub const INVERSE_REL_TOL: f64 = 1e-9;
pub const LEAF_TOL: f64 = 1e-10;
/// Above this height `ln f` exceeds `10^6` in the double regime and its
/// last bit is worth more than the inverse tolerance; the normalized spinor
/// is used as the reference instead.
pub const INVERSE_SPLIT: f64 = 0.9;

/// `e^{d(fγ)}` on `N × R`, its normalization by `f' f^k`, and the limit
/// `(1/k!) dt∧γ∧(dγ)^k` reached at `t = 1`.
#[derive(Debug, Clone)]
pub struct DiracInterpolation {
    pub k: usize,
    pub raw: Spinor,
    pub normalized: Spinor,
    pub limit: Spinor,
}

fn factorial(j: usize) -> i64 {
    (1..=j as i64).product()
}

pub fn dirac_interpolation(pd: &PfaffianData, taper: &FlatTaper) -> Result<DiracInterpolation, BoundaryError> {
    if taper.regime != Regime::Double {
        return Err(BoundaryError::Regime);
    }
    if let Some(w) = pd.witnesses.first() {
        return Err(BoundaryError::Irregular(w.clone()));
    }
    let m = pd.dim();
    let k = pd.k;
    let map: Vec<usize> = (0..m).collect();
    let gamma = pd.gamma.reindex(m + 1, &map);
    let dgamma = pd.dgamma.reindex(m + 1, &map);
    let t = Expr::var(m);
    let dt_gamma = FormField::basis(m + 1, &[m]).wedge(&gamma)?;

    let mut powers = vec![FormField::scalar(m + 1, Expr::one())];
    for _ in 0..k + 2 {
        let next = powers.last().expect("nonempty").wedge(&dgamma)?;
        powers.push(next);
    }
    if !powers[k + 2].is_zero() {
        return Err(BoundaryError::Stage {
            stage: "dirac",
            detail: format!("(dγ)^{} does not vanish", k + 2),
        });
    }

    let (f, fp) = (taper.f(&t), taper.fp(&t));
    let mut raw = Spinor::zero(m + 1);
    let mut normalized = Spinor::from_form(FormField::scalar(m + 1, taper.inv_fp_f_pow(&t, k as i32)));
    for j in 0..=k {
        let inv_fact = Expr::frac(1, factorial(j));
        let fj = f.powi(j as i32) * &inv_fact;
        let tangential = dt_gamma.wedge(&powers[j])?;
        raw = raw
            .add(&Spinor::from_form(powers[j].scale(&fj)))?
            .add(&Spinor::from_form(tangential.scale(&(&fp * &fj))))?;

        let up = if j < k {
            taper.inv_fp_f_pow(&t, (k - j - 1) as i32)
        } else {
            taper.f_over_fp(&t)
        };
        let side = if j < k { taper.inv_f_pow(&t, (k - j) as i32) } else { Expr::one() };
        let up_coef = up * Expr::frac(1, factorial(j + 1));
        normalized = normalized
            .add(&Spinor::from_form(powers[j + 1].scale(&up_coef)))?
            .add(&Spinor::from_form(tangential.scale(&(side * &inv_fact))))?;
    }
    let limit = Spinor::from_form(dt_gamma.wedge(&powers[k])?.scale(&Expr::frac(1, factorial(k))));
    Ok(DiracInterpolation {
        k,
        raw,
        normalized,
        limit,
    })
}

/// Poisson structure on the collar with its certificate.
#[derive(Debug, Clone)]
pub struct PoissonExtension {
    pub bivector: MultivectorField,
    pub omega0: FormField,
    pub dirac: DiracInterpolation,
    pub certificate: ExtensionCertificate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionCertificate {
    pub checks: Vec<VerificationReport>,
    /// Expected rank on `t ∈ [1, 2)`.
    pub leaf_rank: usize,
    pub pass: bool,
}

fn collar_points(boundary: &[Vec<f64>], ts: &[f64]) -> Vec<Vec<f64>> {
    boundary
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut q = p.clone();
            q.push(ts[i % ts.len()]);
            q
        })
        .collect()
}

fn spread(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / count as f64).collect()
}

/// Full antisymmetric matrix of a compiled degree-2 field in log scale.
fn log_matrix(tape: &FieldTape, p: &[f64]) -> Vec<LogNum> {
    let n = tape.dim;
    let v = tape.tape.eval_log(p);
    let mut out = vec![LogNum::ZERO; n * n];
    for (k, ij) in tape.index.iter().enumerate() {
        out[ij[0] * n + ij[1]] = v[k];
        out[ij[1] * n + ij[0]] = LogNum { sign: -v[k].sign, ln: v[k].ln };
    }
    out
}

fn rel_gap(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax() / b.amax().max(1e-300)
}

fn worst<F: Fn(&[f64]) -> f64 + Sync + Send>(points: &[Vec<f64>], f: F) -> (f64, Option<Vec<f64>>) {
    let vals = Exec::available().map(points, f);
    let mut best = (0.0, None);
    for (v, p) in vals.iter().zip(points) {
        if v.is_nan() || *v > best.0 {
            best = (if v.is_nan() { f64::INFINITY } else { *v }, Some(p.clone()));
        }
    }
    best
}

/// Compactly supported Poisson structure on `∂M × [0, ∞)` extending `ω₀⁻¹`.
///
/// The bivector is read off from the spinor `e^σ ∧ e^{d(fγ)}`, normalized
/// away from the boundary so that it has a limit at `t = 1`, and cut off by
/// the bump in `t`. `boundary` samples the boundary patch; the certificate
/// pairs them with collar heights.
pub fn poisson_extension(
    bd: &BoundaryData,
    taper: &FlatTaper,
    bump: &CasimirBump,
    boundary: &[Vec<f64>],
) -> Result<PoissonExtension, BoundaryError> {
    let m = bd.dim();
    let stage = |stage: &'static str, detail: String| BoundaryError::Stage { stage, detail };
    let convexity = check_pseudoconvex(bd, boundary)?;
    if !convexity.pass() {
        return Err(stage("convexity", convexity.to_string()));
    }
    if bump.a < 1.0 {
        return Err(stage("bump", format!("plateau ends at {} before t = 1", bump.a)));
    }
    let sweep = collar_points(boundary, &spread(0.0, T_MAX, 16));
    let (omega0, nondegenerate) = symplectic_extension_form(bd, &sweep)?;
    if !nondegenerate.pass {
        return Err(stage("symplectic-extension", nondegenerate.to_string()));
    }

    let pd = PfaffianData::new(bd.gamma.clone(), boundary)?;
    let dirac = dirac_interpolation(&pd, taper)?;
    let map: Vec<usize> = (0..m).collect();
    let sigma = bd.sigma.reindex(m + 1, &map);
    let e_sigma = if sigma.is_zero() { Spinor::one(m + 1) } else { Spinor::exp(&sigma) };
    let near_spinor = e_sigma.wedge(&dirac.raw)?;
    let far_spinor = e_sigma.wedge(&dirac.normalized)?;
    let (near, far) = (near_spinor.to_poisson(), far_spinor.to_poisson());
    let t = Expr::var(m);
    let g = bump.at(&t);
    let mut bivector = MultivectorField::zero(m + 1, 2);
    for i in 0..=m {
        for j in i + 1..=m {
            let e = Expr::piecewise(&t, NORMALIZE_FROM, near.get(&[i, j]), far.get(&[i, j]));
            bivector.set(&[i, j], &g * e);
        }
    }

    let spinors = [&near_spinor, &far_spinor];
    let certificate = certify(bd, taper, &omega0, &bivector, &spinors, pd.k, boundary);
    Ok(PoissonExtension {
        bivector,
        omega0,
        dirac,
        certificate,
    })
}

fn certify(
    bd: &BoundaryData,
    taper: &FlatTaper,
    omega0: &FormField,
    pi: &MultivectorField,
    spinors: &[&Spinor; 2],
    k: usize,
    boundary: &[Vec<f64>],
) -> ExtensionCertificate {
    let m = bd.dim();
    let n = m + 1;
    let leaf_rank = n - 2 * k - 2;
    let tape = BivectorTape::new(pi);
    let mut checks = Vec::new();
    let timed = |name: &str, pass: bool, (w, at): (f64, Option<Vec<f64>>), detail: &str, start: Instant| {
        VerificationReport::new(name, pass, w, if pass { None } else { at })
            .with_detail(detail)
            .timed(start.elapsed())
    };

    let start = Instant::now();
    let inner = collar_points(boundary, &spread(0.0, 1.0 - 1e-2, 12));
    let (w, at) = worst(&inner, |p| {
        let rho = spinors[usize::from(p[m] >= NORMALIZE_FROM)];
        if rho.certified_rank_at(p) == Some(n) {
            0.0
        } else {
            1.0
        }
    });
    checks.push(timed("rank-symplectic", w == 0.0, (w, at), &format!("spinor-certified rank {n} for t < 1"), start));

    let start = Instant::now();
    let leaves = collar_points(boundary, &spread(1.0, 1.9, 12));
    let (w, at) = worst(&leaves, |p| if tape.rank_at(p) == leaf_rank { 0.0 } else { 1.0 });
    checks.push(timed("rank-leaves", w == 0.0, (w, at), &format!("rank {leaf_rank} on [1, 2)"), start));

    let start = Instant::now();
    let outer = collar_points(boundary, &spread(2.0, T_MAX, 12));
    let (w, at) = worst(&outer, |p| if pi.is_structural_zero_at(p) { 0.0 } else { 1.0 });
    checks.push(timed("support", w == 0.0, (w, at), "exact zero for t >= 2", start));

    let start = Instant::now();
    let all = collar_points(boundary, &spread(-0.1, 2.5, 26));
    let (w, at) = worst(&all, |p| tape.jacobi_at(p));
    checks.push(timed("jacobi", w <= JACOBI_TOL, (w, at), "forward-mode [π,π]", start));

    let start = Instant::now();
    let omega_tape = omega0.compile();
    let germ = collar_points(boundary, &spread(-0.1, taper.delta, 8));
    let (w, at) = worst(&germ, |p| match omega_tape.matrix(p).try_inverse() {
        Some(inv) => rel_gap(&tape.matrix(p), &(-inv)),
        None => f64::INFINITY,
    });
    checks.push(timed("germ", w <= GERM_REL_TOL, (w, at), "π = -ω₀⁻¹ for t <= δ", start));

    let start = Instant::now();
    let t = Expr::var(m);
    let map: Vec<usize> = (0..m).collect();
    let gamma = bd.gamma.reindex(n, &map);
    let pulled = bd
        .sigma
        .reindex(n, &map)
        .add(&FormField::basis(n, &[m]).wedge(&gamma).expect("same dim").scale(&taper.fp(&t)))
        .and_then(|w| w.add(&gamma.d().scale(&taper.f(&t))))
        .expect("same dim")
        .compile();
    let pi_tape = pi.compile();
    let residual = |p: &[f64]| {
        let a = log_matrix(&pi_tape, p);
        let b = log_matrix(&pulled, p);
        let mut gap: f64 = 0.0;
        for i in 0..n {
            for k in 0..n {
                let v = LogNum::sum((0..n).map(|j| a[i * n + j].mul(b[j * n + k]))).to_f64();
                gap = gap.max((v + if i == k { 1.0 } else { 0.0 }).abs());
            }
        }
        gap
    };
    let near_band = collar_points(boundary, &spread(0.0, INVERSE_SPLIT, 12));
    let (w, at) = worst(&near_band, residual);
    checks.push(timed("inverse", w <= INVERSE_REL_TOL, (w, at), "π (σ + d(fγ)) = -I for t <= 0.9", start));
    let start = Instant::now();
    let far_band = collar_points(boundary, &spread(INVERSE_SPLIT, 1.0 - 1e-2, 12));
    let (w, at) = worst(&far_band, |p| annihilator_residual(&spinors[1].eval_parts(p), &tape.matrix(p)));
    checks.push(timed("annihilator", w <= INVERSE_REL_TOL, (w, at), "π annihilates the normalized spinor for 0.9 < t < 0.99", start));

    let start = Instant::now();
    let gtape = gamma.compile();
    let (w, at) = worst(&leaves, |p| {
        let pm = tape.matrix(p);
        let g = nalgebra::DVector::from_vec(gtape.tape.eval(p));
        (&pm * g).amax().max(pm.row(m).amax())
    });
    checks.push(timed("leaves", w <= LEAF_TOL, (w, at), "π(γ) = π(dt) = 0 on [1, 2)", start));

    let pass = checks.iter().all(|c| c.pass);
    ExtensionCertificate { checks, leaf_rank, pass }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{contact_ball, cosymplectic};

    fn gadgets() -> (FlatTaper, CasimirBump) {
        (FlatTaper::new(Regime::Double, 0.1).unwrap(), CasimirBump::new(1.0, 2.0).unwrap())
    }

    #[test]
    fn single_regime_is_rejected() {
        let model = cosymplectic();
        let pd = PfaffianData::new(model.data.gamma.clone(), &model.samples(5, 0)).unwrap();
        let single = FlatTaper::new(Regime::Single, 0.1).unwrap();
        assert_eq!(dirac_interpolation(&pd, &single).unwrap_err(), BoundaryError::Regime);
    }

    #[test]
    fn models_extend_with_certificates() {
        let (taper, bump) = gadgets();
        for (model, leaf_rank) in [(cosymplectic(), 2), (contact_ball(), 0)] {
            let ext = poisson_extension(&model.data, &taper, &bump, &model.samples(40, 5)).unwrap();
            let c = &ext.certificate;
            assert_eq!(c.leaf_rank, leaf_rank);
            assert!(c.pass, "{}\n{}", model.name, crate::verify::table(&c.checks));
        }
    }
}
