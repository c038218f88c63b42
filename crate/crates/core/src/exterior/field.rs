use std::collections::BTreeMap;
use std::marker::PhantomData;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::symexpr::{Expr, Tape};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ExteriorError {
    #[error("dimension mismatch: {0} vs {1}")]
    Dim(usize, usize),
    #[error("degree {degree} exceeds dimension {dim}")]
    Degree { degree: usize, dim: usize },
    #[error("expected degree {expected}, got {got}")]
    WrongDegree { expected: usize, got: usize },
    #[error("singular Jacobian at {0:?}")]
    Singular(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Covariant;
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Contravariant;

/// Antisymmetric coefficient table of a fixed degree.
///
/// Only strictly increasing index tuples are stored; zero coefficients are
/// dropped. The kind parameter separates forms from multivector fields.
#[derive(Debug)]
pub struct Field<K> {
    pub dim: usize,
    pub degree: usize,
    coeffs: BTreeMap<Vec<usize>, Expr>,
    _kind: PhantomData<K>,
}

impl<K> Clone for Field<K> {
    fn clone(&self) -> Self {
        Field {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.clone(),
            _kind: PhantomData,
        }
    }
}

pub type FormField = Field<Covariant>;
pub type MultivectorField = Field<Contravariant>;

/// Sorts an index tuple; returns the permutation sign, or `None` on repeats.
pub fn sort_sign(idx: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, sign))
    }
}

/// All strictly increasing `k`-tuples in `0..n`.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

impl<K> Field<K> {
    pub fn zero(dim: usize, degree: usize) -> Field<K> {
        Field {
            dim,
            degree,
            coeffs: BTreeMap::new(),
            _kind: PhantomData,
        }
    }

    /// Degree-0 field with the given value.
    pub fn scalar(dim: usize, value: Expr) -> Field<K> {
        let mut f = Field::zero(dim, 0);
        f.set(&[], value);
        f
    }

    /// The basis element `e_{i1} ^ ... ^ e_{ip}` (0-based indices).
    pub fn basis(dim: usize, idx: &[usize]) -> Field<K> {
        let mut f = Field::zero(dim, idx.len());
        f.set(idx, Expr::one());
        f
    }

    pub fn from_entries(dim: usize, degree: usize, entries: Vec<(Vec<usize>, Expr)>) -> Field<K> {
        let mut f = Field::zero(dim, degree);
        for (i, e) in entries {
            let cur = f.get(&i);
            f.set(&i, cur + e);
        }
        f
    }

    /// Signed coefficient at an arbitrary index tuple.
    pub fn get(&self, idx: &[usize]) -> Expr {
        match sort_sign(idx) {
            None => Expr::zero(),
            Some((s, sign)) => match self.coeffs.get(&s) {
                None => Expr::zero(),
                Some(e) if sign > 0 => e.clone(),
                Some(e) => e.neg(),
            },
        }
    }

    /// Sets the coefficient at `idx`, storing it under the sorted tuple.
    pub fn set(&mut self, idx: &[usize], value: Expr) {
        assert_eq!(idx.len(), self.degree, "index length must equal degree");
        assert!(idx.iter().all(|&i| i < self.dim), "index out of range");
        let Some((s, sign)) = sort_sign(idx) else {
            assert!(value.is_zero(), "repeated index with nonzero value");
            return;
        };
        let v = if sign > 0 { value } else { value.neg() };
        if v.is_zero() {
            self.coeffs.remove(&s);
        } else {
            self.coeffs.insert(s, v);
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Expr)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn map(&self, mut f: impl FnMut(&Expr) -> Expr) -> Field<K> {
        let mut out = Field::zero(self.dim, self.degree);
        for (i, e) in &self.coeffs {
            out.set(i, f(e));
        }
        out
    }

    pub fn scale(&self, c: &Expr) -> Field<K> {
        self.map(|e| e * c)
    }

    pub fn neg(&self) -> Field<K> {
        self.map(|e| e.neg())
    }

    pub fn add(&self, o: &Field<K>) -> Result<Field<K>, ExteriorError> {
        if self.dim != o.dim {
            return Err(ExteriorError::Dim(self.dim, o.dim));
        }
        if self.degree != o.degree {
            return Err(ExteriorError::WrongDegree {
                expected: self.degree,
                got: o.degree,
            });
        }
        let mut out = self.clone();
        for (i, e) in &o.coeffs {
            let cur = out.get(i);
            out.set(i, cur + e);
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Field<K>) -> Result<Field<K>, ExteriorError> {
        self.add(&o.neg())
    }

    /// Graded antisymmetric product.
    pub fn wedge(&self, o: &Field<K>) -> Result<Field<K>, ExteriorError> {
        if self.dim != o.dim {
            return Err(ExteriorError::Dim(self.dim, o.dim));
        }
        let deg = self.degree + o.degree;
        let mut out = Field::zero(self.dim, deg);
        if deg > self.dim {
            return Ok(out);
        }
        let mut acc: BTreeMap<Vec<usize>, Vec<Expr>> = BTreeMap::new();
        for (a, ea) in &self.coeffs {
            for (b, eb) in &o.coeffs {
                let mut idx = a.clone();
                idx.extend_from_slice(b);
                if let Some((s, sign)) = sort_sign(&idx) {
                    let term = ea * eb;
                    acc.entry(s).or_default().push(if sign > 0 { term } else { term.neg() });
                }
            }
        }
        for (i, terms) in acc {
            out.set(&i, Expr::add(terms));
        }
        Ok(out)
    }

    pub fn simplify(&self) -> Field<K> {
        self.map(|e| e.simplify())
    }

    /// Substitutes expressions for the patch variables in every coefficient,
    /// moving the field to a patch of dimension `dim` (indices unchanged).
    pub fn substitute(&self, subs: &[Expr]) -> Field<K> {
        let mut out = Field::zero(self.dim, self.degree);
        for (i, e) in &self.coeffs {
            out.set(i, e.substitute(subs));
        }
        out
    }

    /// Re-embeds the field in a patch of dimension `dim`, sending index `i` to
    /// `map[i]`.
    pub fn reindex(&self, dim: usize, map: &[usize]) -> Field<K> {
        let mut out = Field::zero(dim, self.degree);
        for (i, e) in &self.coeffs {
            let j: Vec<usize> = i.iter().map(|&k| map[k]).collect();
            let cur = out.get(&j);
            out.set(&j, cur + e.clone());
        }
        out
    }

    /// Coefficients in `combinations(dim, degree)` order.
    pub fn dense(&self) -> Vec<Expr> {
        combinations(self.dim, self.degree)
            .iter()
            .map(|i| self.get(i))
            .collect()
    }

    pub fn compile(&self) -> FieldTape {
        FieldTape {
            dim: self.dim,
            degree: self.degree,
            index: combinations(self.dim, self.degree),
            tape: Tape::compile(&self.dense()),
        }
    }

    pub fn eval_dense(&self, p: &[f64]) -> Vec<f64> {
        self.compile().tape.eval(p)
    }

    /// True when every coefficient is exactly zero at `p` by branch structure.
    pub fn is_structural_zero_at(&self, p: &[f64]) -> bool {
        self.coeffs.values().all(|e| e.is_structural_zero_at(p))
    }
}

/// Compiled coefficients of a field, in combination order.
#[derive(Debug, Clone)]
pub struct FieldTape {
    pub dim: usize,
    pub degree: usize,
    pub index: Vec<Vec<usize>>,
    pub tape: Tape,
}

impl FieldTape {
    /// Full antisymmetric matrix of a degree-2 field at `p`.
    pub fn matrix(&self, p: &[f64]) -> DMatrix<f64> {
        assert_eq!(self.degree, 2);
        let v = self.tape.eval(p);
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (k, ij) in self.index.iter().enumerate() {
            m[(ij[0], ij[1])] = v[k];
            m[(ij[1], ij[0])] = -v[k];
        }
        m
    }
}

impl FormField {
    /// Exterior derivative.
    pub fn d(&self) -> FormField {
        let mut out = FormField::zero(self.dim, self.degree + 1);
        if self.degree >= self.dim {
            return out;
        }
        let mut acc: BTreeMap<Vec<usize>, Vec<Expr>> = BTreeMap::new();
        for (i, e) in &self.coeffs {
            for l in 0..self.dim {
                if i.contains(&l) || !e.depends_on(l) {
                    continue;
                }
                let mut idx = vec![l];
                idx.extend_from_slice(i);
                let (s, sign) = sort_sign(&idx).expect("distinct");
                let de = e.diff(l);
                acc.entry(s).or_default().push(if sign > 0 { de } else { de.neg() });
            }
        }
        for (i, terms) in acc {
            out.set(&i, Expr::add(terms));
        }
        out
    }

    /// Contraction with a vector field in the first slot.
    pub fn interior(&self, x: &MultivectorField) -> FormField {
        assert_eq!(x.degree, 1);
        let mut out = FormField::zero(self.dim, self.degree.saturating_sub(1));
        if self.degree == 0 {
            return out;
        }
        for rest in combinations(self.dim, self.degree - 1) {
            let mut terms = Vec::new();
            for (l, xl) in &x.coeffs {
                let mut idx = vec![l[0]];
                idx.extend_from_slice(&rest);
                let a = self.get(&idx);
                if !a.is_zero() {
                    terms.push(xl * &a);
                }
            }
            out.set(&rest, Expr::add(terms));
        }
        out
    }

    /// Lie derivative along a vector field (Cartan's formula).
    pub fn lie_derivative(&self, x: &MultivectorField) -> FormField {
        let a = self.d().interior(x);
        let b = self.interior(x).d();
        a.add(&b).expect("same shape")
    }
}

impl MultivectorField {
    /// Vector field from its components.
    pub fn vector(comps: Vec<Expr>) -> MultivectorField {
        let dim = comps.len();
        let mut v = MultivectorField::zero(dim, 1);
        for (i, c) in comps.into_iter().enumerate() {
            v.set(&[i], c);
        }
        v
    }

    /// Bivector from the upper triangle of an antisymmetric matrix.
    pub fn from_matrix(m: &[Vec<Expr>]) -> MultivectorField {
        let n = m.len();
        let mut b = MultivectorField::zero(n, 2);
        for i in 0..n {
            for j in i + 1..n {
                b.set(&[i, j], m[i][j].clone());
            }
        }
        b
    }

    pub fn to_matrix(&self) -> Vec<Vec<Expr>> {
        assert_eq!(self.degree, 2);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(&[i, j])).collect())
            .collect()
    }

    /// Schouten bracket of two bivectors.
    pub fn schouten(&self, o: &MultivectorField) -> Result<MultivectorField, ExteriorError> {
        if self.dim != o.dim {
            return Err(ExteriorError::Dim(self.dim, o.dim));
        }
        for f in [self, o] {
            if f.degree != 2 {
                return Err(ExteriorError::WrongDegree {
                    expected: 2,
                    got: f.degree,
                });
            }
        }
        let n = self.dim;
        let da: Vec<Vec<Expr>> = self.to_matrix();
        let db: Vec<Vec<Expr>> = o.to_matrix();
        let mut out = MultivectorField::zero(n, 3);
        for ijk in combinations(n, 3) {
            let mut terms = Vec::new();
            for (i, j, k) in [
                (ijk[0], ijk[1], ijk[2]),
                (ijk[1], ijk[2], ijk[0]),
                (ijk[2], ijk[0], ijk[1]),
            ] {
                for l in 0..n {
                    let (ali, bli) = (&da[l][i], &db[l][i]);
                    if !ali.is_zero() && db[j][k].depends_on(l) {
                        terms.push(ali * &db[j][k].diff(l));
                    }
                    if !bli.is_zero() && da[j][k].depends_on(l) {
                        terms.push(bli * &da[j][k].diff(l));
                    }
                }
            }
            out.set(&ijk, Expr::add(terms));
        }
        Ok(out)
    }

    /// Lie derivative `[X, A]` of a multivector field along a vector field.
    pub fn lie_derivative(&self, x: &MultivectorField) -> MultivectorField {
        assert_eq!(x.degree, 1);
        let n = self.dim;
        let xs: Vec<Expr> = (0..n).map(|i| x.get(&[i])).collect();
        let mut out = MultivectorField::zero(n, self.degree);
        for idx in combinations(n, self.degree) {
            let mut terms = Vec::new();
            let a = self.get(&idx);
            for l in 0..n {
                if !xs[l].is_zero() && a.depends_on(l) {
                    terms.push(&xs[l] * &a.diff(l));
                }
            }
            for r in 0..idx.len() {
                for l in 0..n {
                    let dx = xs[idx[r]].diff(l);
                    if dx.is_zero() {
                        continue;
                    }
                    let mut j = idx.clone();
                    j[r] = l;
                    let al = self.get(&j);
                    if !al.is_zero() {
                        terms.push((al * dx).neg());
                    }
                }
            }
            out.set(&idx, Expr::add(terms));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Expr {
        Expr::var(i)
    }

    #[test]
    fn permuted_lookup_is_signed() {
        let mut b = MultivectorField::zero(3, 2);
        b.set(&[2, 0], x(1));
        assert!(b.get(&[0, 2]).structurally_eq(&x(1).neg()));
        assert!(b.get(&[2, 0]).structurally_eq(&x(1)));
        assert!(b.get(&[1, 1]).is_zero());
    }

    #[test]
    fn wedge_and_d_on_contact_form() {
        // gamma = dx1 + x2 dx3
        let g = FormField::from_entries(3, 1, vec![(vec![0], Expr::one()), (vec![2], x(1))]);
        let dg = g.d();
        assert!(dg.get(&[1, 2]).is_one());
        let top = g.wedge(&dg).unwrap();
        assert!(top.get(&[0, 1, 2]).is_one());
        assert!(g.wedge(&dg).unwrap().wedge(&dg).unwrap().is_zero());
        assert!(dg.d().is_zero());
    }

    #[test]
    fn d_of_x_dy() {
        let a = FormField::from_entries(2, 1, vec![(vec![1], x(0))]);
        assert!(a.d().get(&[0, 1]).is_one());
    }

    #[test]
    fn euler_weight_of_constant_bivector() {
        let e = MultivectorField::vector(vec![x(0), x(1)]);
        let p = MultivectorField::basis(2, &[0, 1]);
        let l = p.lie_derivative(&e);
        assert_eq!(l.get(&[0, 1]).as_const().map(crate::symexpr::rational_to_f64), Some(-2.0));
    }
}
