//! Scalar symbolic expressions over the coordinates of a patch.
//!
//! Expressions are immutable DAGs behind `Arc`, so they can be shared freely
//! between components of a field and across worker threads. Construction goes
//! through smart constructors that apply a small, conservative set of
//! simplifications (constant folding and 0/1 identities) and nothing else.

mod diff;
mod eval;
mod flat;
mod json;
mod poly;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub use eval::{EvalError, LogNum, Tape};
pub use flat::{est_flat_order, est_flat_order_fn, FlatOrder, FlatProbe};
pub use json::ExprBundle;
pub use poly::Poly;

pub type Rational = BigRational;

/// Node of an expression tree.
#[derive(Debug)]
pub enum Node {
    Const(Rational),
    Var(usize),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Div(Expr, Expr),
    Pow(Expr, i32),
    Exp(Expr),
    Ln(Expr),
    Sqrt(Expr),
    /// `e^{1/(1-u)}` for `u < 1`.
    FlatExp1(Expr),
    /// `e^{e^{1/(1-u)}}` for `u < 1`.
    FlatExp2(Expr),
    /// `left` where `arg < breakpoint`, `right` otherwise. All one-sided
    /// derivatives of the two branches are expected to agree at the breakpoint.
    Piecewise {
        arg: Expr,
        breakpoint: f64,
        left: Expr,
        right: Expr,
    },
}

#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Converts an `f64` into an exact rational close to it.
pub fn rational_from_f64(v: f64) -> Rational {
    assert!(v.is_finite(), "non-finite constant {v}");
    if v == v.trunc() && v.abs() < 1e15 {
        return BigRational::from_integer(BigInt::from(v as i64));
    }
    // Shortest decimal representation keeps user inputs like 0.1 exact as 1/10.
    let s = format!("{v:e}");
    let (mant, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("exponent");
    let neg = mant.starts_with('-');
    let mant = mant.trim_start_matches('-');
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    let digits: BigInt = format!("{int_part}{frac_part}").parse().expect("digits");
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    r
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl Expr {
    fn wrap(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    /// Builds a node without any simplification. Used by deserialization so
    /// that a round trip reproduces the stored tree exactly.
    pub fn raw(node: Node) -> Expr {
        Expr::wrap(node)
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn ptr_eq(&self, other: &Expr) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn rational(r: Rational) -> Expr {
        Expr::wrap(Node::Const(r))
    }

    pub fn int(v: i64) -> Expr {
        Expr::rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn frac(p: i64, q: i64) -> Expr {
        Expr::rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn real(v: f64) -> Expr {
        Expr::rational(rational_from_f64(v))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn var(index: usize) -> Expr {
        Expr::wrap(Node::Var(index))
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self.node() {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(|c| c.is_one())
    }

    pub fn add(terms: Vec<Expr>) -> Expr {
        let mut acc = Rational::zero();
        let mut rest = Vec::with_capacity(terms.len());
        for t in terms {
            match t.node() {
                Node::Const(c) => acc += c,
                Node::Add(inner) => {
                    for u in inner {
                        match u.node() {
                            Node::Const(c) => acc += c,
                            _ => rest.push(u.clone()),
                        }
                    }
                }
                _ => rest.push(t),
            }
        }
        if !acc.is_zero() {
            rest.push(Expr::rational(acc));
        }
        match rest.len() {
            0 => Expr::zero(),
            1 => rest.pop().unwrap(),
            _ => Expr::wrap(Node::Add(rest)),
        }
    }

    pub fn mul(factors: Vec<Expr>) -> Expr {
        let mut acc = Rational::one();
        let mut rest = Vec::with_capacity(factors.len());
        for f in factors {
            match f.node() {
                Node::Const(c) => acc *= c,
                Node::Mul(inner) => {
                    for u in inner {
                        match u.node() {
                            Node::Const(c) => acc *= c,
                            _ => rest.push(u.clone()),
                        }
                    }
                }
                _ => rest.push(f),
            }
            if acc.is_zero() {
                return Expr::zero();
            }
        }
        if !acc.is_one() {
            rest.insert(0, Expr::rational(acc));
        }
        match rest.len() {
            0 => Expr::one(),
            1 => rest.pop().unwrap(),
            _ => Expr::wrap(Node::Mul(rest)),
        }
    }

    pub fn neg(&self) -> Expr {
        Expr::mul(vec![Expr::int(-1), self.clone()])
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        Expr::add(vec![self.clone(), other.neg()])
    }

    pub fn scale(&self, c: &Rational) -> Expr {
        Expr::mul(vec![Expr::rational(c.clone()), self.clone()])
    }

    pub fn div(&self, other: &Expr) -> Expr {
        if self.is_zero() {
            return Expr::zero();
        }
        if other.is_one() {
            return self.clone();
        }
        if let (Some(a), Some(b)) = (self.as_const(), other.as_const()) {
            if !b.is_zero() {
                return Expr::rational(a / b);
            }
        }
        Expr::wrap(Node::Div(self.clone(), other.clone()))
    }

    pub fn powi(&self, n: i32) -> Expr {
        if n == 0 {
            return Expr::one();
        }
        if n == 1 {
            return self.clone();
        }
        if let Some(c) = self.as_const() {
            if c.is_zero() {
                return if n > 0 { Expr::zero() } else { Expr::wrap(Node::Pow(self.clone(), n)) };
            }
            let p = num_traits::pow(c.clone(), n.unsigned_abs() as usize);
            return Expr::rational(if n > 0 { p } else { p.recip() });
        }
        Expr::wrap(Node::Pow(self.clone(), n))
    }

    pub fn exp(&self) -> Expr {
        if self.is_zero() {
            return Expr::one();
        }
        Expr::wrap(Node::Exp(self.clone()))
    }

    pub fn ln(&self) -> Expr {
        if self.is_one() {
            return Expr::zero();
        }
        Expr::wrap(Node::Ln(self.clone()))
    }

    pub fn sqrt(&self) -> Expr {
        if self.is_zero() || self.is_one() {
            return self.clone();
        }
        Expr::wrap(Node::Sqrt(self.clone()))
    }

    pub fn flat_exp1(&self) -> Expr {
        Expr::wrap(Node::FlatExp1(self.clone()))
    }

    pub fn flat_exp2(&self) -> Expr {
        Expr::wrap(Node::FlatExp2(self.clone()))
    }

    pub fn piecewise(arg: &Expr, breakpoint: f64, left: Expr, right: Expr) -> Expr {
        if left.ptr_eq(&right) || (left.is_zero() && right.is_zero()) {
            return left;
        }
        if let Some(c) = arg.as_const() {
            return if rational_to_f64(c) < breakpoint { left } else { right };
        }
        Expr::wrap(Node::Piecewise {
            arg: arg.clone(),
            breakpoint,
            left,
            right,
        })
    }

    /// Direct children in a fixed order.
    pub fn children(&self) -> Vec<&Expr> {
        match self.node() {
            Node::Const(_) | Node::Var(_) => vec![],
            Node::Add(v) | Node::Mul(v) => v.iter().collect(),
            Node::Div(a, b) => vec![a, b],
            Node::Pow(a, _)
            | Node::Exp(a)
            | Node::Ln(a)
            | Node::Sqrt(a)
            | Node::FlatExp1(a)
            | Node::FlatExp2(a) => vec![a],
            Node::Piecewise {
                arg, left, right, ..
            } => vec![arg, left, right],
        }
    }

    /// Rebuilds this node with new children (same order as [`Expr::children`]),
    /// applying the smart constructors.
    pub fn rebuild(&self, kids: Vec<Expr>) -> Expr {
        let mut it = kids.into_iter();
        let mut next = || it.next().expect("child count");
        match self.node() {
            Node::Const(_) | Node::Var(_) => self.clone(),
            Node::Add(v) => Expr::add((0..v.len()).map(|_| next()).collect()),
            Node::Mul(v) => Expr::mul((0..v.len()).map(|_| next()).collect()),
            Node::Div(..) => {
                let a = next();
                a.div(&next())
            }
            Node::Pow(_, n) => next().powi(*n),
            Node::Exp(_) => next().exp(),
            Node::Ln(_) => next().ln(),
            Node::Sqrt(_) => next().sqrt(),
            Node::FlatExp1(_) => next().flat_exp1(),
            Node::FlatExp2(_) => next().flat_exp2(),
            Node::Piecewise { breakpoint, .. } => {
                let arg = next();
                let left = next();
                let right = next();
                Expr::piecewise(&arg, *breakpoint, left, right)
            }
        }
    }

    /// Bottom-up rewrite with memoization over shared subtrees. `f` sees the
    /// already-rewritten node and may return a replacement.
    pub fn rewrite(&self, f: &mut dyn FnMut(&Expr) -> Option<Expr>) -> Expr {
        fn go(
            e: &Expr,
            f: &mut dyn FnMut(&Expr) -> Option<Expr>,
            memo: &mut HashMap<usize, Expr>,
        ) -> Expr {
            if let Some(r) = memo.get(&e.id()) {
                return r.clone();
            }
            let kids: Vec<Expr> = e.children().into_iter().map(|c| go(c, f, memo)).collect();
            let same = kids
                .iter()
                .zip(e.children())
                .all(|(a, b)| a.ptr_eq(b));
            let rebuilt = if same { e.clone() } else { e.rebuild(kids) };
            let out = f(&rebuilt).unwrap_or(rebuilt);
            memo.insert(e.id(), out.clone());
            out
        }
        let mut memo = HashMap::new();
        go(self, f, &mut memo)
    }

    /// Re-applies the conservative simplification rules throughout the tree.
    pub fn simplify(&self) -> Expr {
        self.rewrite(&mut |_| None)
    }

    /// Substitutes expressions for variables (`subs[i]` replaces variable `i`).
    pub fn substitute(&self, subs: &[Expr]) -> Expr {
        self.rewrite(&mut |e| match e.node() {
            Node::Var(i) => Some(subs[*i].clone()),
            _ => None,
        })
    }

    /// Replaces every occurrence (by identity) of `target` with `with`.
    pub fn replace(&self, target: &Expr, with: &Expr) -> Expr {
        let mut memo = HashMap::new();
        fn go(e: &Expr, t: &Expr, w: &Expr, memo: &mut HashMap<usize, Expr>) -> Expr {
            if e.ptr_eq(t) {
                return w.clone();
            }
            if let Some(r) = memo.get(&e.id()) {
                return r.clone();
            }
            let kids: Vec<Expr> = e.children().into_iter().map(|c| go(c, t, w, memo)).collect();
            let same = kids.iter().zip(e.children()).all(|(a, b)| a.ptr_eq(b));
            let out = if same { e.clone() } else { e.rebuild(kids) };
            memo.insert(e.id(), out.clone());
            out
        }
        go(self, target, with, &mut memo)
    }

    /// Replaces each piecewise node by the branch it selects at `point`.
    pub fn resolve_branches(&self, point: &[f64]) -> Expr {
        self.rewrite(&mut |e| match e.node() {
            Node::Piecewise {
                arg,
                breakpoint,
                left,
                right,
            } => {
                let a = arg.eval_f64(point);
                Some(if a < *breakpoint {
                    left.clone()
                } else {
                    right.clone()
                })
            }
            _ => None,
        })
    }

    /// Largest variable index used plus one.
    pub fn var_bound(&self) -> usize {
        let mut bound = 0;
        self.visit(&mut |e| {
            if let Node::Var(i) = e.node() {
                bound = bound.max(i + 1);
            }
        });
        bound
    }

    pub fn depends_on(&self, var: usize) -> bool {
        let mut hit = false;
        self.visit(&mut |e| {
            if matches!(e.node(), Node::Var(i) if *i == var) {
                hit = true;
            }
        });
        hit
    }

    /// Visits every distinct node once.
    pub fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.id()) {
                continue;
            }
            f(&e);
            for c in e.children() {
                stack.push(c.clone());
            }
        }
    }

    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    pub fn has_piecewise(&self) -> bool {
        let mut hit = false;
        self.visit(&mut |e| {
            if matches!(e.node(), Node::Piecewise { .. }) {
                hit = true;
            }
        });
        hit
    }

    /// Deep structural comparison (constants compared exactly).
    pub fn structurally_eq(&self, other: &Expr) -> bool {
        if self.ptr_eq(other) {
            return true;
        }
        let same_head = match (self.node(), other.node()) {
            (Node::Const(a), Node::Const(b)) => a == b,
            (Node::Var(a), Node::Var(b)) => a == b,
            (Node::Add(a), Node::Add(b)) | (Node::Mul(a), Node::Mul(b)) => a.len() == b.len(),
            (Node::Div(..), Node::Div(..)) => true,
            (Node::Pow(_, a), Node::Pow(_, b)) => a == b,
            (Node::Exp(_), Node::Exp(_))
            | (Node::Ln(_), Node::Ln(_))
            | (Node::Sqrt(_), Node::Sqrt(_))
            | (Node::FlatExp1(_), Node::FlatExp1(_))
            | (Node::FlatExp2(_), Node::FlatExp2(_)) => true,
            (
                Node::Piecewise { breakpoint: a, .. },
                Node::Piecewise { breakpoint: b, .. },
            ) => a.to_bits() == b.to_bits(),
            _ => false,
        };
        same_head
            && self
                .children()
                .iter()
                .zip(other.children())
                .all(|(a, b)| a.structurally_eq(b))
    }

    /// True when the expression is the exact zero under the branch selection
    /// made at `point`: a zero constant, a product with a zero factor, a sum
    /// of zeros, or a piecewise node whose selected branch is zero.
    pub fn is_structural_zero_at(&self, point: &[f64]) -> bool {
        match self.node() {
            Node::Const(c) => c.is_zero(),
            Node::Add(v) => v.iter().all(|t| t.is_structural_zero_at(point)),
            Node::Mul(v) => v.iter().any(|t| t.is_structural_zero_at(point)),
            Node::Div(a, _) => a.is_structural_zero_at(point),
            Node::Pow(a, n) => *n > 0 && a.is_structural_zero_at(point),
            Node::Sqrt(a) => a.is_structural_zero_at(point),
            Node::Piecewise {
                arg,
                breakpoint,
                left,
                right,
            } => {
                if arg.eval_f64(point) < *breakpoint {
                    left.is_structural_zero_at(point)
                } else {
                    right.is_structural_zero_at(point)
                }
            }
            _ => false,
        }
    }

    /// True when the value at `point` is certainly nonzero, either because a
    /// strictly positive factor (an exponential) is involved or because the
    /// evaluated value is nonzero. Exponentials count as nonzero even when
    /// they underflow in double precision.
    pub fn is_certified_nonzero_at(&self, point: &[f64]) -> bool {
        match self.node() {
            Node::Const(c) => !c.is_zero(),
            Node::Exp(_) | Node::FlatExp1(_) | Node::FlatExp2(_) => true,
            Node::Mul(v) => v.iter().all(|t| t.is_certified_nonzero_at(point)),
            Node::Div(a, _) => a.is_certified_nonzero_at(point),
            Node::Pow(a, _) => a.is_certified_nonzero_at(point),
            Node::Piecewise {
                arg,
                breakpoint,
                left,
                right,
            } => {
                if arg.eval_f64(point) < *breakpoint {
                    left.is_certified_nonzero_at(point)
                } else {
                    right.is_certified_nonzero_at(point)
                }
            }
            _ => {
                let v = self.eval_f64(point);
                v.is_finite() && v != 0.0
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(f: &mut fmt::Formatter<'_>, v: &[Expr], sep: &str) -> fmt::Result {
            write!(f, "(")?;
            for (i, e) in v.iter().enumerate() {
                if i > 0 {
                    write!(f, "{sep}")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, ")")
        }
        match self.node() {
            Node::Const(c) => {
                if c.is_integer() {
                    write!(f, "{}", c.numer())
                } else {
                    write!(f, "({}/{})", c.numer(), c.denom())
                }
            }
            Node::Var(i) => write!(f, "x{i}"),
            Node::Add(v) => join(f, v, " + "),
            Node::Mul(v) => join(f, v, "*"),
            Node::Div(a, b) => write!(f, "({a}/{b})"),
            Node::Pow(a, n) => write!(f, "{a}^{n}"),
            Node::Exp(a) => write!(f, "exp({a})"),
            Node::Ln(a) => write!(f, "ln({a})"),
            Node::Sqrt(a) => write!(f, "sqrt({a})"),
            Node::FlatExp1(a) => write!(f, "flatexp1({a})"),
            Node::FlatExp2(a) => write!(f, "flatexp2({a})"),
            Node::Piecewise {
                arg,
                breakpoint,
                left,
                right,
            } => write!(f, "[{arg} < {breakpoint} ? {left} : {right}]"),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl std::ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl std::ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(&self, &rhs)
            }
        }
        impl std::ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(&self, rhs)
            }
        }
        impl std::ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::add(vec![a.clone(), b.clone()]));
binop!(Sub, sub, |a, b| a.sub(b));
binop!(Mul, mul, |a, b| Expr::mul(vec![a.clone(), b.clone()]));
binop!(Div, div, |a, b| a.div(b));

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_folding_and_identities() {
        let x = Expr::var(0);
        assert!(Expr::mul(vec![Expr::zero(), x.clone()]).is_zero());
        assert!(Expr::add(vec![x.clone(), Expr::zero()]).ptr_eq(&x));
        assert!((&Expr::int(2) * &Expr::frac(1, 2)).is_one());
        assert!(Expr::zero().exp().is_one());
        assert!(Expr::one().ln().is_zero());
        assert!((Expr::int(3) - Expr::int(3)).is_zero());
    }

    #[test]
    fn rational_from_decimal_is_exact() {
        assert_eq!(rational_from_f64(0.1), BigRational::new(1.into(), 10.into()));
        assert_eq!(rational_from_f64(-2.5), BigRational::new((-5).into(), 2.into()));
        assert_eq!(rational_from_f64(3.0), BigRational::from_integer(3.into()));
    }

    #[test]
    fn substitution_and_resolution() {
        let x = Expr::var(0);
        let y = Expr::var(1);
        let e = &x * &y;
        let s = e.substitute(&[Expr::int(2), Expr::var(0)]);
        assert_eq!(s.eval_f64(&[5.0, 0.0]), 10.0);
        let pw = Expr::piecewise(&x, 1.0, Expr::one(), Expr::zero());
        assert!(pw.resolve_branches(&[0.5]).is_one());
        assert!(pw.resolve_branches(&[1.0]).is_zero());
        assert!(pw.is_structural_zero_at(&[2.0]));
        assert!(!pw.is_structural_zero_at(&[0.0]));
    }

    #[test]
    fn certified_nonzero_survives_underflow() {
        let x = Expr::var(0);
        let e = (x.neg() * Expr::int(1000)).exp();
        assert_eq!(e.eval_f64(&[10.0]), 0.0);
        assert!(e.is_certified_nonzero_at(&[10.0]));
    }
}
