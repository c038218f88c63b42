//! Simplex-to-ball maps and patchwork structures over triangulations.

mod assemble;

pub use assemble::{
    assemble_patchwork, conformance, ConformanceReport, FaceReport, Patchwork, PatchworkError, SimplexReport,
    TriangulationData, CONTINUITY_TOL, FACE_FLAT_ORDER, FACE_OFFSET, INTERIOR_MARGIN,
};

use nalgebra::DMatrix;

use crate::constructors::{ball_support, constant_rank, ConstructError, PolyPoisson};
use crate::exterior::{ExplicitMap, MultivectorField};
use crate::symexpr::Expr;
use crate::taper::{CasimirBump, FlatTaper};

/// Vertices of the pyramid realization of the standard `n`-simplex:
/// `V_1 = {-1, 1}`, `V_{n+1} = {(v, -1) : v in V_n} ∪ {(0, ..., 0, 1)}`.
pub fn pyramid_vertices(n: usize) -> Vec<Vec<f64>> {
    let mut v = vec![vec![-1.0], vec![1.0]];
    for k in 1..n {
        let mut next: Vec<Vec<f64>> = v
            .iter()
            .map(|p| {
                let mut q = p.clone();
                q.push(-1.0);
                q
            })
            .collect();
        let mut apex = vec![0.0; k];
        apex.push(1.0);
        next.push(apex);
        v = next;
    }
    v
}

/// Membership in the pyramid simplex, with `margin` distance-like slack
/// (negative margins shrink the simplex).
pub fn in_pyramid_simplex(p: &[f64], margin: f64) -> bool {
    let n = p.len();
    if n == 1 {
        return p[0].abs() <= 1.0 + margin;
    }
    let t = p[n - 1];
    if t < -1.0 - margin || t > 1.0 + margin {
        return false;
    }
    let scale = (1.0 - t) / 2.0;
    if scale <= 0.0 {
        return p[..n - 1].iter().all(|x| x.abs() <= margin);
    }
    let inner: Vec<f64> = p[..n - 1].iter().map(|x| x / scale).collect();
    in_pyramid_simplex(&inner, margin / scale)
}

/// Barycentric coordinates of the pyramid simplex as affine expressions in
/// `x_0..x_{n-1}`, in vertex order.
pub fn pyramid_barycentrics(n: usize) -> Vec<Expr> {
    let v = pyramid_vertices(n);
    let m = DMatrix::from_fn(n + 1, n + 1, |i, j| if i == n { 1.0 } else { v[j][i] });
    let inv = m.try_inverse().expect("pyramid vertices are affinely independent");
    (0..=n)
        .map(|k| {
            let mut terms: Vec<Expr> = (0..n).map(|j| Expr::real(inv[(k, j)]) * Expr::var(j)).collect();
            terms.push(Expr::real(inv[(k, n)]));
            Expr::add(terms)
        })
        .collect()
}

/// `e` inside the open simplex `{λ_k > 0}`, exactly 0 elsewhere.
pub fn restrict_to_simplex(e: &Expr, barycentrics: &[Expr]) -> Expr {
    barycentrics
        .iter()
        .fold(e.clone(), |acc, l| Expr::piecewise(&l.neg(), 0.0, acc, Expr::zero()))
}

/// The map `φ_n` from the pyramid simplex onto the closed unit ball:
/// `φ_1 = id`, `φ_{n+1}(z, t) = (√(1-t²) φ_n(2z/(1-t)), t)`.
pub fn simplex_ball_map(n: usize) -> ExplicitMap {
    assert!(n >= 1, "simplex dimension must be positive");
    let mut comps = vec![Expr::var(0)];
    for k in 1..n {
        let t = Expr::var(k);
        let one = Expr::one();
        let squeeze = (&one - &t).powi(-1) * Expr::int(2);
        let subs: Vec<Expr> = (0..k).map(|i| Expr::var(i) * &squeeze).collect();
        let root = (&one - t.powi(2)).sqrt();
        comps = comps.iter().map(|c| &root * c.substitute(&subs)).collect();
        comps.push(t);
    }
    ExplicitMap::new(n, comps)
}

/// Pullback of `ball_support(seed)` along `φ_n`, extended by zero outside
/// the pyramid simplex.
pub fn simplex_structure(
    seed: &PolyPoisson,
    taper: &FlatTaper,
    bump: &CasimirBump,
) -> Result<MultivectorField, ConstructError> {
    let n = seed.dim();
    if seed.bivector.is_zero() {
        return Ok(MultivectorField::zero(n, 2));
    }
    let ball = ball_support(seed, taper, bump)?.bivector;
    let pulled = simplex_ball_map(n).pullback_bivector(&ball)?;
    let lambdas = pyramid_barycentrics(n);
    Ok(pulled.map(|e| restrict_to_simplex(e, &lambdas)))
}

/// Constant rank `2r` structure on the interior of the pyramid simplex,
/// flat at its boundary.
pub fn simplex_poisson(n: usize, r: usize, taper: &FlatTaper, bump: &CasimirBump) -> Result<MultivectorField, ConstructError> {
    simplex_structure(&constant_rank(n, r)?, taper, bump)
}
