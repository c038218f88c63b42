use std::collections::HashMap;

use nalgebra::DMatrix;

use super::{ExteriorError, FormField, MultivectorField, Spinor};
use crate::symexpr::{Expr, Tape};

/// A smooth map between coordinate patches given by component expressions.
#[derive(Debug, Clone)]
pub struct ExplicitMap {
    pub src_dim: usize,
    pub comps: Vec<Expr>,
    /// `jac[i][j] = d comps[i] / d x_j`.
    pub jac: Vec<Vec<Expr>>,
}

impl ExplicitMap {
    pub fn new(src_dim: usize, comps: Vec<Expr>) -> ExplicitMap {
        let jac = comps
            .iter()
            .map(|c| (0..src_dim).map(|j| c.diff(j)).collect())
            .collect();
        ExplicitMap { src_dim, comps, jac }
    }

    pub fn identity(n: usize) -> ExplicitMap {
        ExplicitMap::new(n, (0..n).map(Expr::var).collect())
    }

    pub fn tgt_dim(&self) -> usize {
        self.comps.len()
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &ExplicitMap) -> ExplicitMap {
        let comps = self.comps.iter().map(|c| c.substitute(&first.comps)).collect();
        ExplicitMap::new(first.src_dim, comps)
    }

    pub fn eval(&self, p: &[f64]) -> Vec<f64> {
        Tape::compile(&self.comps).eval(p)
    }

    pub fn jacobian_at(&self, p: &[f64]) -> DMatrix<f64> {
        let flat: Vec<Expr> = self.jac.iter().flatten().cloned().collect();
        let v = Tape::compile(&flat).eval(p);
        DMatrix::from_row_slice(self.tgt_dim(), self.src_dim, &v)
    }

    /// Pullback of a form: coefficients composed with the map, times wedges of
    /// the differentials of the components.
    pub fn pullback_form(&self, a: &FormField) -> Result<FormField, ExteriorError> {
        if a.dim != self.tgt_dim() {
            return Err(ExteriorError::Dim(a.dim, self.tgt_dim()));
        }
        let n = self.src_dim;
        let dphi: Vec<FormField> = self
            .jac
            .iter()
            .map(|row| {
                FormField::from_entries(
                    n,
                    1,
                    row.iter().enumerate().map(|(j, e)| (vec![j], e.clone())).collect(),
                )
            })
            .collect();
        let mut out = FormField::zero(n, a.degree);
        for (idx, coeff) in a.entries() {
            let mut w = FormField::scalar(n, coeff.substitute(&self.comps));
            for &i in idx {
                w = w.wedge(&dphi[i])?;
            }
            out = out.add(&w)?;
        }
        Ok(out)
    }

    pub fn pullback_spinor(&self, s: &Spinor) -> Result<Spinor, ExteriorError> {
        let mut out = Spinor::zero(self.src_dim);
        for part in s.parts() {
            out = out.add(&Spinor::from_form(self.pullback_form(part)?))?;
        }
        Ok(out)
    }

    /// Symbolic pullback of a bivector along a diffeomorphism:
    /// `J^{-1} π(m(x)) J^{-T}` with the inverse built from cofactors.
    pub fn pullback_bivector(&self, b: &MultivectorField) -> Result<MultivectorField, ExteriorError> {
        let n = self.src_dim;
        if self.tgt_dim() != n || b.dim != n {
            return Err(ExteriorError::Dim(n, b.dim));
        }
        let (adj, det) = adjugate(&self.jac);
        let inv: Vec<Vec<Expr>> = adj
            .iter()
            .map(|row| row.iter().map(|e| e.div(&det)).collect())
            .collect();
        let pi: Vec<Vec<Expr>> = b
            .to_matrix()
            .iter()
            .map(|row| row.iter().map(|e| e.substitute(&self.comps)).collect())
            .collect();
        let mut out = MultivectorField::zero(n, 2);
        for i in 0..n {
            for j in i + 1..n {
                let mut terms = Vec::new();
                for k in 0..n {
                    if inv[i][k].is_zero() {
                        continue;
                    }
                    for l in 0..n {
                        if k == l || inv[j][l].is_zero() || pi[k][l].is_zero() {
                            continue;
                        }
                        terms.push(Expr::mul(vec![inv[i][k].clone(), pi[k][l].clone(), inv[j][l].clone()]));
                    }
                }
                out.set(&[i, j], Expr::add(terms));
            }
        }
        Ok(out)
    }

    /// Numeric pullback at one point, used as an oracle for closed forms.
    pub fn pullback_bivector_at(&self, b: &MultivectorField, p: &[f64]) -> Result<DMatrix<f64>, ExteriorError> {
        let j = self.jacobian_at(p);
        let inv = j.try_inverse().ok_or_else(|| ExteriorError::Singular(p.to_vec()))?;
        let q = self.eval(p);
        let pi = b.compile().matrix(&q);
        Ok(&inv * pi * inv.transpose())
    }

    /// Fails on the first sample where the Jacobian determinant vanishes.
    pub fn check_diffeo(&self, samples: &[Vec<f64>], tol: f64) -> Result<(), ExteriorError> {
        for p in samples {
            let d = self.jacobian_at(p).determinant();
            if !(d.abs() > tol) {
                return Err(ExteriorError::Singular(p.clone()));
            }
        }
        Ok(())
    }
}

/// Adjugate and determinant of a square symbolic matrix by memoized
/// cofactor expansion.
pub fn adjugate(m: &[Vec<Expr>]) -> (Vec<Vec<Expr>>, Expr) {
    let n = m.len();
    let full = (1u32 << n) - 1;
    let mut memo: HashMap<(u32, u32), Expr> = HashMap::new();
    let det = minor(m, full, full, &mut memo);
    let mut adj = vec![vec![Expr::zero(); n]; n];
    for (i, row) in adj.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            // adj[i][j] = cofactor C_{ji}
            let c = minor(m, full & !(1 << j), full & !(1 << i), &mut memo);
            *slot = if (i + j) % 2 == 0 { c } else { c.neg() };
        }
    }
    (adj, det)
}

fn minor(m: &[Vec<Expr>], rows: u32, cols: u32, memo: &mut HashMap<(u32, u32), Expr>) -> Expr {
    if rows == 0 {
        return Expr::one();
    }
    if let Some(e) = memo.get(&(rows, cols)) {
        return e.clone();
    }
    let r = rows.trailing_zeros() as usize;
    let rest = rows & !(1 << r);
    let mut terms = Vec::new();
    let mut pos = 0;
    for c in 0..m.len() {
        if cols & (1 << c) == 0 {
            continue;
        }
        if !m[r][c].is_zero() {
            let sub = minor(m, rest, cols & !(1 << c), memo);
            if !sub.is_zero() {
                let t = &m[r][c] * &sub;
                terms.push(if pos % 2 == 0 { t } else { t.neg() });
            }
        }
        pos += 1;
    }
    let e = Expr::add(terms);
    memo.insert((rows, cols), e.clone());
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_scaling_quarter() {
        let m = ExplicitMap::new(2, vec![Expr::var(0) * Expr::int(2), Expr::var(1) * Expr::int(2)]);
        let p = m.pullback_bivector(&MultivectorField::basis(2, &[0, 1])).unwrap();
        assert_eq!(p.get(&[0, 1]).eval_f64(&[0.3, 0.4]), 0.25);
    }

    #[test]
    fn adjugate_inverts() {
        let x = Expr::var(0);
        let m = vec![
            vec![Expr::int(2), x.clone(), Expr::zero()],
            vec![Expr::one(), Expr::int(3), x.clone()],
            vec![x.clone(), Expr::zero(), Expr::int(1)],
        ];
        let (adj, det) = adjugate(&m);
        let p = [0.7];
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| m[i][k].eval_f64(&p) * adj[k][j].eval_f64(&p)).sum();
                let want = if i == j { det.eval_f64(&p) } else { 0.0 };
                assert!((s - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pullback_of_dy_along_collar_map() {
        // (x, t) -> (x, t^3): dy pulls back to 3 t^2 dt
        let t = Expr::var(1);
        let m = ExplicitMap::new(2, vec![Expr::var(0), t.powi(3)]);
        let dy = FormField::basis(2, &[1]);
        let p = m.pullback_form(&dy).unwrap();
        assert_eq!(p.get(&[1]).eval_f64(&[0.0, 2.0]), 12.0);
        assert!(p.get(&[0]).is_zero());
    }
}
