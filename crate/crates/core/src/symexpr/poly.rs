use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{Expr, Node, Rational};

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Keys are exponent vectors of length `nvars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Poly {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Poly {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Poly {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Poly::zero(nvars);
        p.terms.insert(e, Rational::one());
        p
    }

    pub fn monomial(exps: Vec<u32>, c: Rational) -> Poly {
        let mut p = Poly::zero(exps.len());
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            let entry = out.terms.entry(e.clone()).or_insert_with(Rational::zero);
            *entry += c;
            if entry.is_zero() {
                out.terms.remove(e);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(&-Rational::one()))
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let entry = out.terms.entry(e.clone()).or_insert_with(Rational::zero);
                *entry += c1 * c2;
                if entry.is_zero() {
                    out.terms.remove(&e);
                }
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::constant(self.nvars, Rational::one());
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn diff(&self, var: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out = out.add(&Poly::monomial(e2, c * Rational::from_integer(e[var].into())));
        }
        out
    }

    /// Part made of monomials of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Drops monomials of total degree above `d`.
    pub fn truncate(&self, d: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() <= d)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Substitutes polynomials for variables.
    pub fn compose(&self, subs: &[Poly]) -> Poly {
        let nv = subs.first().map_or(self.nvars, |s| s.nvars);
        let mut out = Poly::zero(nv);
        for (e, c) in &self.terms {
            let mut term = Poly::constant(nv, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = term.mul(&subs[i].pow(k));
                }
            }
            out = out.add(&term);
        }
        out
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                super::rational_to_f64(c)
                    * e.iter()
                        .zip(p)
                        .map(|(&k, &x)| x.powi(k as i32))
                        .product::<f64>()
            })
            .sum()
    }

    /// Canonical expression: a sum of coefficient-times-monomial products in
    /// exponent order.
    pub fn to_expr(&self) -> Expr {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut f = vec![Expr::rational(c.clone())];
                for (i, &k) in e.iter().enumerate() {
                    if k > 0 {
                        f.push(Expr::var(i).powi(k as i32));
                    }
                }
                Expr::mul(f)
            })
            .collect();
        Expr::add(terms)
    }

    /// Converts an expression built from constants, variables, sums, products,
    /// nonnegative integer powers and division by constants. Anything else
    /// yields `None`.
    pub fn from_expr(e: &Expr, nvars: usize) -> Option<Poly> {
        let mut memo = std::collections::HashMap::new();
        from_expr_memo(e, nvars, &mut memo)
    }
}

fn from_expr_memo(
    e: &Expr,
    nvars: usize,
    memo: &mut std::collections::HashMap<usize, Option<Poly>>,
) -> Option<Poly> {
    if let Some(p) = memo.get(&e.id()) {
        return p.clone();
    }
    let out = match e.node() {
        Node::Const(c) => Some(Poly::constant(nvars, c.clone())),
        Node::Var(i) => {
            if *i < nvars {
                Some(Poly::var(nvars, *i))
            } else {
                None
            }
        }
        Node::Add(v) => {
            let mut acc = Poly::zero(nvars);
            let mut ok = true;
            for t in v {
                match from_expr_memo(t, nvars, memo) {
                    Some(p) => acc = acc.add(&p),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            ok.then_some(acc)
        }
        Node::Mul(v) => {
            let mut acc = Poly::constant(nvars, Rational::one());
            let mut ok = true;
            for t in v {
                match from_expr_memo(t, nvars, memo) {
                    Some(p) => acc = acc.mul(&p),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            ok.then_some(acc)
        }
        Node::Pow(a, n) if *n >= 0 => from_expr_memo(a, nvars, memo).map(|p| p.pow(*n as u32)),
        Node::Div(a, b) => match b.as_const() {
            Some(c) if !c.is_zero() => {
                from_expr_memo(a, nvars, memo).map(|p| p.scale(&c.recip()))
            }
            _ => None,
        },
        _ => None,
    };
    memo.insert(e.id(), out.clone());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expression_round_trip_is_canonical() {
        let x = Expr::var(0);
        let y = Expr::var(1);
        let e = (&x + &y).powi(2) - (&x * &y) * Expr::int(2);
        let p = Poly::from_expr(&e, 2).unwrap();
        let q = Poly::from_expr(&(x.powi(2) + y.powi(2)), 2).unwrap();
        assert_eq!(p, q);
        assert_eq!(Poly::from_expr(&p.to_expr(), 2).unwrap(), q);
        assert!(Poly::from_expr(&x.exp(), 2).is_none());
    }

    #[test]
    fn composition_shifts_center() {
        let x = Poly::var(1, 0);
        let p = x.pow(2);
        let shifted = p.compose(&[x.add(&Poly::constant(1, Rational::one()))]);
        // (x+1)^2 = x^2 + 2x + 1
        assert_eq!(shifted.truncate(1).eval(&[2.0]), 5.0);
        assert_eq!(shifted.degree(), Some(2));
    }
}
