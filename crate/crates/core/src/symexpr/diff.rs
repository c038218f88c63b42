use std::collections::HashMap;

use super::{Expr, Node};

impl Expr {
    /// Exact partial derivative with respect to variable `var`.
    ///
    /// Shared subtrees are differentiated once per call.
    pub fn diff(&self, var: usize) -> Expr {
        let mut memo = HashMap::new();
        diff_memo(self, var, &mut memo)
    }
}

fn diff_memo(e: &Expr, var: usize, memo: &mut HashMap<usize, Expr>) -> Expr {
    if let Some(d) = memo.get(&e.id()) {
        return d.clone();
    }
    let d = match e.node() {
        Node::Const(_) => Expr::zero(),
        Node::Var(i) => {
            if *i == var {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Add(v) => Expr::add(v.iter().map(|t| diff_memo(t, var, memo)).collect()),
        Node::Mul(v) => {
            let mut terms = Vec::with_capacity(v.len());
            for i in 0..v.len() {
                let di = diff_memo(&v[i], var, memo);
                if di.is_zero() {
                    continue;
                }
                let mut factors: Vec<Expr> = Vec::with_capacity(v.len());
                for (j, f) in v.iter().enumerate() {
                    factors.push(if i == j { di.clone() } else { f.clone() });
                }
                terms.push(Expr::mul(factors));
            }
            Expr::add(terms)
        }
        Node::Div(a, b) => {
            let da = diff_memo(a, var, memo);
            let db = diff_memo(b, var, memo);
            let first = da.div(b);
            if db.is_zero() {
                first
            } else {
                first - Expr::mul(vec![a.clone(), db]).div(&b.powi(2))
            }
        }
        Node::Pow(a, n) => {
            let da = diff_memo(a, var, memo);
            Expr::mul(vec![Expr::int(*n as i64), a.powi(n - 1), da])
        }
        Node::Exp(a) => {
            let da = diff_memo(a, var, memo);
            Expr::mul(vec![e.clone(), da])
        }
        Node::Ln(a) => diff_memo(a, var, memo).div(a),
        Node::Sqrt(_) => {
            let Node::Sqrt(a) = e.node() else { unreachable!() };
            let da = diff_memo(a, var, memo);
            da.div(&Expr::mul(vec![Expr::int(2), e.clone()]))
        }
        Node::FlatExp1(u) => {
            let du = diff_memo(u, var, memo);
            Expr::mul(vec![e.clone(), du]).div(&(Expr::one() - u).powi(2))
        }
        Node::FlatExp2(u) => {
            let du = diff_memo(u, var, memo);
            Expr::mul(vec![e.clone(), u.flat_exp1(), du]).div(&(Expr::one() - u).powi(2))
        }
        Node::Piecewise {
            arg,
            breakpoint,
            left,
            right,
        } => {
            let dl = diff_memo(left, var, memo);
            let dr = diff_memo(right, var, memo);
            Expr::piecewise(arg, *breakpoint, dl, dr)
        }
    };
    memo.insert(e.id(), d.clone());
    d
}
