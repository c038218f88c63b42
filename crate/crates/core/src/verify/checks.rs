use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::grid::contains;
use super::VerificationReport;
use crate::exterior::{combinations, MultivectorField};
use crate::linalg;
use crate::par::Exec;
use crate::patch::Region;
use crate::symexpr::{est_flat_order_fn, Expr, FlatOrder, FlatProbe, Poly, Tape};

/// Largest admissible `|[π,π]|` component on a grid.
pub const JACOBI_TOL: f64 = 1e-8;
/// Value/derivative agreement for numeric germ comparison.
pub const GERM_TOL: f64 = 1e-8;

/// Compiled bivector for pointwise numerics.
#[derive(Debug, Clone)]
pub struct BivectorTape {
    pub n: usize,
    index: Vec<Vec<usize>>,
    tape: Tape,
}

impl BivectorTape {
    pub fn new(pi: &MultivectorField) -> BivectorTape {
        assert_eq!(pi.degree, 2);
        BivectorTape {
            n: pi.dim,
            index: combinations(pi.dim, 2),
            tape: Tape::compile(&pi.dense()),
        }
    }

    fn fill(&self, vals: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for (k, ij) in self.index.iter().enumerate() {
            m[ij[0] * n + ij[1]] = vals[k];
            m[ij[1] * n + ij[0]] = -vals[k];
        }
        m
    }

    pub fn matrix(&self, p: &[f64]) -> nalgebra::DMatrix<f64> {
        let v = self.tape.eval(p);
        nalgebra::DMatrix::from_row_slice(self.n, self.n, &self.fill(&v))
    }

    /// Largest component of `[π,π]` at `p`, from forward-mode derivatives.
    pub fn jacobi_at(&self, p: &[f64]) -> f64 {
        let n = self.n;
        let (v, g) = self.tape.eval_grad(p, n);
        let m = self.fill(&v);
        // dm[l][i][j] = ∂_l π^{ij}
        let mut dm = vec![0.0; n * n * n];
        for (k, ij) in self.index.iter().enumerate() {
            for l in 0..n {
                let d = g[k * n + l];
                dm[l * n * n + ij[0] * n + ij[1]] = d;
                dm[l * n * n + ij[1] * n + ij[0]] = -d;
            }
        }
        let pi = |a: usize, b: usize| m[a * n + b];
        let d = |l: usize, a: usize, b: usize| dm[l * n * n + a * n + b];
        let mut worst: f64 = 0.0;
        for ijk in combinations(n, 3) {
            let (i, j, k) = (ijk[0], ijk[1], ijk[2]);
            let mut s = 0.0;
            for l in 0..n {
                s += pi(l, i) * d(l, j, k) + pi(l, j) * d(l, k, i) + pi(l, k) * d(l, i, j);
            }
            let s = 2.0 * s;
            if s.is_nan() {
                return f64::NAN;
            }
            worst = worst.max(s.abs());
        }
        worst
    }

    /// Rank with entries rescaled in log space before thresholding.
    pub fn rank_at(&self, p: &[f64]) -> usize {
        let n = self.n;
        let v = self.tape.eval_log(p);
        let mut full = vec![crate::symexpr::LogNum::ZERO; n * n];
        for (k, ij) in self.index.iter().enumerate() {
            full[ij[0] * n + ij[1]] = v[k];
            full[ij[1] * n + ij[0]] = crate::symexpr::LogNum {
                sign: -v[k].sign,
                ln: v[k].ln,
            };
        }
        linalg::rank_log(&full, n)
    }
}

/// `[π,π]` computed over exact polynomials, or `None` if a coefficient is not
/// polynomial. Only nonzero components are returned.
pub fn poly_schouten(pi: &MultivectorField) -> Option<Vec<(Vec<usize>, Poly)>> {
    let n = pi.dim;
    let mut m: Vec<Vec<Poly>> = vec![vec![Poly::zero(n); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                m[i][j] = Poly::from_expr(&pi.get(&[i, j]), n)?;
            }
        }
    }
    let dm: Vec<Vec<Vec<Poly>>> = (0..n)
        .map(|l| (0..n).map(|i| (0..n).map(|j| m[i][j].diff(l)).collect()).collect())
        .collect();
    let mut out = Vec::new();
    for ijk in combinations(n, 3) {
        let (i, j, k) = (ijk[0], ijk[1], ijk[2]);
        let mut s = Poly::zero(n);
        for l in 0..n {
            s = s
                .add(&m[l][i].mul(&dm[l][j][k]))
                .add(&m[l][j].mul(&dm[l][k][i]))
                .add(&m[l][k].mul(&dm[l][i][j]));
        }
        let s = s.scale(&crate::symexpr::Rational::from_integer(2.into()));
        if !s.is_zero() {
            out.push((ijk, s));
        }
    }
    Some(out)
}

pub fn jacobi_residual(pi: &MultivectorField, points: &[Vec<f64>]) -> VerificationReport {
    jacobi_residual_with(pi, points, Exec::available())
}

/// Symbolic when every coefficient is polynomial, grid-based otherwise.
pub fn jacobi_residual_with(pi: &MultivectorField, points: &[Vec<f64>], exec: Exec) -> VerificationReport {
    let start = Instant::now();
    if let Some(bad) = poly_schouten(pi) {
        if bad.is_empty() {
            return VerificationReport::new("jacobi", true, 0.0, None)
                .with_detail("symbolic")
                .timed(start.elapsed());
        }
        let ones = vec![1.0; pi.dim];
        let tape = BivectorTape::new(pi);
        let mut witness = ones.clone();
        let mut worst = tape.jacobi_at(&ones);
        if worst == 0.0 {
            for p in points {
                let r = tape.jacobi_at(p);
                if r > worst {
                    worst = r;
                    witness = p.clone();
                }
            }
        }
        let listing: Vec<String> = bad
            .iter()
            .map(|(ijk, p)| format!("{:?}: {}", ijk, p.to_expr()))
            .collect();
        return VerificationReport::new("jacobi", false, worst, Some(witness))
            .with_detail(format!("symbolic: {}", listing.join("; ")))
            .timed(start.elapsed());
    }
    let tape = BivectorTape::new(pi);
    let res = exec.map(points, |p| tape.jacobi_at(p));
    let (worst, at) = worst_of(&res);
    let pass = worst <= JACOBI_TOL;
    VerificationReport::new("jacobi", pass, worst, at.map(|k| points[k].clone()))
        .with_detail(format!("grid, {} points", points.len()))
        .timed(start.elapsed())
}

/// Largest value (NaN counts as infinitely bad) and its index.
pub fn worst_of(vals: &[f64]) -> (f64, Option<usize>) {
    let mut worst = 0.0;
    let mut at = None;
    for (k, &v) in vals.iter().enumerate() {
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if at.is_none() || v > worst {
            worst = v;
            at = Some(k);
        }
    }
    (worst, at)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankMap {
    pub ranks: Vec<usize>,
    pub histogram: BTreeMap<usize, usize>,
}

impl RankMap {
    /// Histogram of ranks grouped by a label computed from each point.
    pub fn histogram_by<L: Ord + Clone>(
        &self,
        points: &[Vec<f64>],
        label: impl Fn(&[f64]) -> L,
    ) -> BTreeMap<L, BTreeMap<usize, usize>> {
        let mut out: BTreeMap<L, BTreeMap<usize, usize>> = BTreeMap::new();
        for (p, r) in points.iter().zip(&self.ranks) {
            *out.entry(label(p)).or_default().entry(*r).or_default() += 1;
        }
        out
    }
}

pub fn rank_map(pi: &MultivectorField, points: &[Vec<f64>]) -> RankMap {
    rank_map_with(pi, points, Exec::available())
}

pub fn rank_map_with(pi: &MultivectorField, points: &[Vec<f64>], exec: Exec) -> RankMap {
    let tape = BivectorTape::new(pi);
    let ranks = exec.map(points, |p| tape.rank_at(p));
    let mut histogram = BTreeMap::new();
    for r in &ranks {
        *histogram.entry(*r).or_default() += 1;
    }
    RankMap { ranks, histogram }
}

/// Every coefficient must be exactly zero by branch structure at each sample
/// outside `claimed`.
pub fn support_check(pi: &MultivectorField, claimed: &Region, points: &[Vec<f64>]) -> VerificationReport {
    let start = Instant::now();
    let outside: Vec<&Vec<f64>> = points.iter().filter(|p| !contains(claimed, p)).collect();
    for p in &outside {
        for (idx, e) in pi.entries() {
            if !e.is_structural_zero_at(p) {
                return VerificationReport::new("support", false, e.eval_f64(p).abs(), Some(p.to_vec()))
                    .with_detail(format!("component {idx:?} has a reachable nonzero branch"))
                    .timed(start.elapsed());
            }
        }
    }
    VerificationReport::new("support", true, 0.0, None)
        .with_detail(format!("{} outside samples, structural", outside.len()))
        .timed(start.elapsed())
}

fn branch_equal(a: &Expr, b: &Expr, p: &[f64], n: usize) -> bool {
    let a = a.resolve_branches(p).simplify();
    let b = b.resolve_branches(p).simplify();
    if a.structurally_eq(&b) {
        return true;
    }
    match (Poly::from_expr(&a, n), Poly::from_expr(&b, n)) {
        (Some(x), Some(y)) => x == y,
        _ => false,
    }
}

/// Germ comparison on the samples inside `region`: branch-level identity
/// when every sample resolves to equal expressions, otherwise agreement of
/// values and derivatives up to `order`.
pub fn germ_compare(
    a: &MultivectorField,
    b: &MultivectorField,
    region: &Region,
    order: usize,
    points: &[Vec<f64>],
) -> VerificationReport {
    let start = Instant::now();
    let n = a.dim;
    let inside: Vec<&Vec<f64>> = points.iter().filter(|p| contains(region, p)).collect();
    let idx = combinations(n, 2);
    let symbolic = inside
        .iter()
        .all(|p| idx.iter().all(|ij| branch_equal(&a.get(ij), &b.get(ij), p, n)));
    if symbolic {
        return VerificationReport::new("germ", true, 0.0, None)
            .with_detail(format!("symbolic on {} samples", inside.len()))
            .timed(start.elapsed());
    }
    // Numeric fallback: all partial derivatives up to `order`.
    let mut exprs = Vec::new();
    for ij in &idx {
        let mut layer = vec![a.get(ij) - b.get(ij)];
        exprs.extend(layer.iter().cloned());
        for _ in 0..order {
            layer = layer.iter().flat_map(|e| (0..n).map(move |l| e.diff(l))).collect();
            exprs.extend(layer.iter().cloned());
        }
    }
    let tape = Tape::compile(&exprs);
    let mut worst: f64 = 0.0;
    let mut witness = None;
    for p in &inside {
        for v in tape.eval(p) {
            let v = if v.is_nan() { f64::INFINITY } else { v.abs() };
            if v > worst {
                worst = v;
                witness = Some(p.to_vec());
            }
        }
    }
    let pass = worst <= GERM_TOL;
    VerificationReport::new("germ", pass, worst, if pass { None } else { witness })
        .with_detail(format!("numeric to order {order} on {} samples", inside.len()))
        .timed(start.elapsed())
}

/// Flat order of `e` along the line `base + s * dir` at `s = s0`.
pub fn flat_order_along(e: &Expr, base: &[f64], dir: &[f64], s0: f64, probe: &FlatProbe) -> FlatOrder {
    let tape = Tape::compile(std::slice::from_ref(e));
    let g = |s: f64| {
        let p: Vec<f64> = base.iter().zip(dir).map(|(b, d)| b + s * d).collect();
        tape.eval(&p)[0]
    };
    est_flat_order_fn(&g, s0, probe)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Expr {
        Expr::var(i)
    }

    fn so3() -> MultivectorField {
        MultivectorField::from_entries(3, 2, vec![(vec![0, 1], x(2)), (vec![1, 2], x(0)), (vec![2, 0], x(1))])
    }

    #[test]
    fn so3_is_symbolically_poisson() {
        let r = jacobi_residual(&so3(), &[]);
        assert!(r.pass && r.detail == "symbolic");
    }

    #[test]
    fn skewed_field_fails_at_ones() {
        let pi = MultivectorField::from_entries(3, 2, vec![(vec![1, 2], x(2)), (vec![2, 0], x(0)), (vec![0, 1], x(1))]);
        let r = jacobi_residual(&pi, &[]);
        assert!(!r.pass);
        assert_eq!(r.witness, Some(vec![1.0, 1.0, 1.0]));
        // grid path agrees with the symbolic one
        let t = BivectorTape::new(&pi);
        assert!(t.jacobi_at(&[1.0, 1.0, 1.0]) > 0.0);
        assert!(BivectorTape::new(&so3()).jacobi_at(&[0.3, -1.0, 2.0]) < 1e-12);
    }

    #[test]
    fn rank_of_zero_and_constant() {
        let z = MultivectorField::zero(3, 2);
        let pts = vec![vec![0.0; 3], vec![1.0, 2.0, 3.0]];
        assert_eq!(rank_map(&z, &pts).histogram.get(&0), Some(&2));
        let c = MultivectorField::basis(3, &[0, 1]);
        assert_eq!(rank_map(&c, &pts).ranks, vec![2, 2]);
    }
}
