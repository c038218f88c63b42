use std::collections::HashMap;

use thiserror::Error;

use super::{rational_to_f64, Expr, Node};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EvalError {
    #[error("domain violation in {op} at node path {path}")]
    Domain { op: &'static str, path: String },
    #[error("point has {got} coordinates, expression needs {need}")]
    Arity { got: usize, need: usize },
}

#[derive(Debug, Clone)]
enum Op {
    Const(f64),
    Var(usize),
    Add(Vec<usize>),
    Mul(Vec<usize>),
    Div(usize, usize),
    Pow(usize, i32),
    Exp(usize),
    Ln(usize),
    Sqrt(usize),
    FlatExp1(usize),
    FlatExp2(usize),
    Piecewise(usize, f64, usize, usize),
}

/// A set of expressions compiled into a flat instruction list.
///
/// Shared subtrees are evaluated once per point. Evaluation is eager: both
/// branches of a piecewise node are computed and the selected one is kept.
/// Products and quotients with an exactly zero factor (numerator) are zero
/// even if another factor is infinite or NaN; this is what makes flat gadgets
/// like `exp(-f) * f'` evaluate to their true limit after underflow.
#[derive(Debug, Clone)]
pub struct Tape {
    ops: Vec<Op>,
    outputs: Vec<usize>,
    nvars: usize,
}

impl Tape {
    pub fn compile(exprs: &[Expr]) -> Tape {
        let mut ops = Vec::new();
        let mut slots: HashMap<usize, usize> = HashMap::new();
        let mut consts: HashMap<u64, usize> = HashMap::new();
        let mut vars: HashMap<usize, usize> = HashMap::new();
        let mut nvars = 0;
        let mut outputs = Vec::with_capacity(exprs.len());
        for e in exprs {
            let slot = emit(e, &mut ops, &mut slots, &mut consts, &mut vars, &mut nvars);
            outputs.push(slot);
        }
        Tape {
            ops,
            outputs,
            nvars,
        }
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn op_count(&self) -> usize {
        self.ops.len()
    }

    /// Evaluates all outputs at `point` into `out`.
    pub fn eval_into(&self, point: &[f64], scratch: &mut Vec<f64>, out: &mut [f64]) {
        debug_assert!(point.len() >= self.nvars);
        scratch.clear();
        scratch.reserve(self.ops.len());
        for op in &self.ops {
            let v = match op {
                Op::Const(c) => *c,
                Op::Var(i) => point[*i],
                Op::Add(args) => args.iter().map(|&a| scratch[a]).sum(),
                Op::Mul(args) => {
                    let mut p = 1.0;
                    let mut zero = false;
                    for &a in args {
                        let v = scratch[a];
                        if v == 0.0 {
                            zero = true;
                            break;
                        }
                        p *= v;
                    }
                    if zero {
                        0.0
                    } else {
                        p
                    }
                }
                Op::Div(a, b) => {
                    let n = scratch[*a];
                    if n == 0.0 {
                        0.0
                    } else {
                        n / scratch[*b]
                    }
                }
                Op::Pow(a, n) => scratch[*a].powi(*n),
                Op::Exp(a) => scratch[*a].exp(),
                Op::Ln(a) => scratch[*a].ln(),
                Op::Sqrt(a) => scratch[*a].sqrt(),
                Op::FlatExp1(a) => flat1(scratch[*a]),
                Op::FlatExp2(a) => flat1(scratch[*a]).exp(),
                Op::Piecewise(arg, b, l, r) => {
                    let a = scratch[*arg];
                    if a.is_nan() {
                        f64::NAN
                    } else if a < *b {
                        scratch[*l]
                    } else {
                        scratch[*r]
                    }
                }
            };
            scratch.push(v);
        }
        for (o, &s) in out.iter_mut().zip(&self.outputs) {
            *o = scratch[s];
        }
    }

    pub fn eval(&self, point: &[f64]) -> Vec<f64> {
        let mut scratch = Vec::new();
        let mut out = vec![0.0; self.outputs.len()];
        self.eval_into(point, &mut scratch, &mut out);
        out
    }

    /// Values and first partial derivatives (forward mode) with respect to
    /// the first `n` coordinates. `grad[k * n + i]` is the derivative of
    /// output `k` along coordinate `i`.
    pub fn eval_grad(&self, point: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
        let m = self.ops.len();
        let mut v = vec![0.0; m];
        let mut g = vec![0.0; m * n];
        let mut tmp = vec![0.0; n];
        for (slot, op) in self.ops.iter().enumerate() {
            tmp.iter_mut().for_each(|x| *x = 0.0);
            let val = match op {
                Op::Const(c) => *c,
                Op::Var(i) => {
                    if *i < n {
                        tmp[*i] = 1.0;
                    }
                    point[*i]
                }
                Op::Add(args) => {
                    for &a in args {
                        axpy(&mut tmp, 1.0, &g[a * n..(a + 1) * n]);
                    }
                    args.iter().map(|&a| v[a]).sum()
                }
                Op::Mul(args) => {
                    if args.iter().any(|&a| v[a] == 0.0 && is_flat(&g[a * n..(a + 1) * n])) {
                        0.0
                    } else {
                        for (i, &a) in args.iter().enumerate() {
                            let others: f64 = args
                                .iter()
                                .enumerate()
                                .filter(|&(j, _)| j != i)
                                .map(|(_, &b)| v[b])
                                .product();
                            axpy(&mut tmp, others, &g[a * n..(a + 1) * n]);
                        }
                        args.iter().map(|&a| v[a]).product()
                    }
                }
                Op::Div(a, b) => {
                    if v[*a] == 0.0 && is_flat(&g[*a * n..(*a + 1) * n]) {
                        0.0
                    } else {
                        let q = v[*a] / v[*b];
                        axpy(&mut tmp, 1.0 / v[*b], &g[*a * n..(*a + 1) * n]);
                        axpy(&mut tmp, -q / v[*b], &g[*b * n..(*b + 1) * n]);
                        q
                    }
                }
                Op::Pow(a, k) => {
                    if *k != 0 {
                        axpy(&mut tmp, *k as f64 * v[*a].powi(k - 1), &g[*a * n..(*a + 1) * n]);
                    }
                    v[*a].powi(*k)
                }
                Op::Exp(a) => {
                    let e = v[*a].exp();
                    axpy(&mut tmp, e, &g[*a * n..(*a + 1) * n]);
                    e
                }
                Op::Ln(a) => {
                    axpy(&mut tmp, 1.0 / v[*a], &g[*a * n..(*a + 1) * n]);
                    v[*a].ln()
                }
                Op::Sqrt(a) => {
                    let r = v[*a].sqrt();
                    axpy(&mut tmp, 0.5 / r, &g[*a * n..(*a + 1) * n]);
                    r
                }
                Op::FlatExp1(a) => {
                    let u = v[*a];
                    let f = flat1(u);
                    axpy(&mut tmp, f / ((1.0 - u) * (1.0 - u)), &g[*a * n..(*a + 1) * n]);
                    f
                }
                Op::FlatExp2(a) => {
                    let u = v[*a];
                    let f1 = flat1(u);
                    let f = f1.exp();
                    axpy(&mut tmp, f * f1 / ((1.0 - u) * (1.0 - u)), &g[*a * n..(*a + 1) * n]);
                    f
                }
                Op::Piecewise(arg, b, l, r) => {
                    let a = v[*arg];
                    let pick = if a.is_nan() {
                        None
                    } else if a < *b {
                        Some(*l)
                    } else {
                        Some(*r)
                    };
                    match pick {
                        Some(p) => {
                            tmp.copy_from_slice(&g[p * n..(p + 1) * n]);
                            v[p]
                        }
                        None => {
                            tmp.iter_mut().for_each(|x| *x = f64::NAN);
                            f64::NAN
                        }
                    }
                }
            };
            v[slot] = val;
            g[slot * n..(slot + 1) * n].copy_from_slice(&tmp);
        }
        let mut vals = Vec::with_capacity(self.outputs.len());
        let mut grad = Vec::with_capacity(self.outputs.len() * n);
        for &o in &self.outputs {
            vals.push(v[o]);
            grad.extend_from_slice(&g[o * n..(o + 1) * n]);
        }
        (vals, grad)
    }

    /// Log-domain evaluation: every intermediate is kept as sign and log
    /// magnitude, so flat factors far below the double-precision range keep
    /// their relative size.
    pub fn eval_log(&self, point: &[f64]) -> Vec<LogNum> {
        let mut s: Vec<LogNum> = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let v = match op {
                Op::Const(c) => LogNum::from_f64(*c),
                Op::Var(i) => LogNum::from_f64(point[*i]),
                Op::Add(args) => LogNum::sum(args.iter().map(|&a| s[a])),
                Op::Mul(args) => {
                    let mut acc = LogNum::ONE;
                    for &a in args {
                        if s[a].is_zero() {
                            acc = LogNum::ZERO;
                            break;
                        }
                        acc = acc.mul(s[a]);
                    }
                    acc
                }
                Op::Div(a, b) => {
                    if s[*a].is_zero() {
                        LogNum::ZERO
                    } else {
                        s[*a].div(s[*b])
                    }
                }
                Op::Pow(a, n) => s[*a].powi(*n),
                Op::Exp(a) => LogNum {
                    sign: 1,
                    ln: s[*a].to_f64(),
                },
                Op::Ln(a) => {
                    let x = s[*a];
                    if x.sign < 0 {
                        LogNum::NAN
                    } else {
                        LogNum::from_f64(x.ln)
                    }
                }
                Op::Sqrt(a) => {
                    let x = s[*a];
                    if x.sign < 0 {
                        LogNum::NAN
                    } else {
                        LogNum {
                            sign: x.sign,
                            ln: 0.5 * x.ln,
                        }
                    }
                }
                Op::FlatExp1(a) => {
                    let u = s[*a].to_f64();
                    if u >= 1.0 || u.is_nan() {
                        LogNum::NAN
                    } else {
                        LogNum {
                            sign: 1,
                            ln: 1.0 / (1.0 - u),
                        }
                    }
                }
                Op::FlatExp2(a) => {
                    let u = s[*a].to_f64();
                    if u >= 1.0 || u.is_nan() {
                        LogNum::NAN
                    } else {
                        LogNum {
                            sign: 1,
                            ln: (1.0 / (1.0 - u)).exp(),
                        }
                    }
                }
                Op::Piecewise(arg, b, l, r) => {
                    let a = s[*arg].to_f64();
                    if a.is_nan() {
                        LogNum::NAN
                    } else if a < *b {
                        s[*l]
                    } else {
                        s[*r]
                    }
                }
            };
            s.push(v);
        }
        self.outputs.iter().map(|&o| s[o]).collect()
    }
}

fn is_flat(g: &[f64]) -> bool {
    g.iter().all(|&x| x == 0.0)
}

/// `acc += c * x`. Exact zeros on either side contribute nothing, so an
/// underflowed outer derivative or a constant direction never produces NaN.
fn axpy(acc: &mut [f64], c: f64, x: &[f64]) {
    if c == 0.0 {
        return;
    }
    for (a, &xi) in acc.iter_mut().zip(x) {
        if xi != 0.0 {
            *a += c * xi;
        }
    }
}

fn flat1(u: f64) -> f64 {
    if u >= 1.0 {
        f64::NAN
    } else {
        (1.0 / (1.0 - u)).exp()
    }
}

fn emit(
    e: &Expr,
    ops: &mut Vec<Op>,
    slots: &mut HashMap<usize, usize>,
    consts: &mut HashMap<u64, usize>,
    vars: &mut HashMap<usize, usize>,
    nvars: &mut usize,
) -> usize {
    if let Some(&s) = slots.get(&e.id()) {
        return s;
    }
    let mut go = |c: &Expr, ops: &mut Vec<Op>| emit(c, ops, slots, consts, vars, nvars);
    let op = match e.node() {
        Node::Const(c) => {
            let v = rational_to_f64(c);
            if let Some(&s) = consts.get(&v.to_bits()) {
                return s;
            }
            Op::Const(v)
        }
        Node::Var(i) => {
            if let Some(&s) = vars.get(i) {
                return s;
            }
            Op::Var(*i)
        }
        Node::Add(v) => Op::Add(v.iter().map(|t| go(t, ops)).collect()),
        Node::Mul(v) => Op::Mul(v.iter().map(|t| go(t, ops)).collect()),
        Node::Div(a, b) => {
            let a = go(a, ops);
            Op::Div(a, go(b, ops))
        }
        Node::Pow(a, n) => Op::Pow(go(a, ops), *n),
        Node::Exp(a) => Op::Exp(go(a, ops)),
        Node::Ln(a) => Op::Ln(go(a, ops)),
        Node::Sqrt(a) => Op::Sqrt(go(a, ops)),
        Node::FlatExp1(a) => Op::FlatExp1(go(a, ops)),
        Node::FlatExp2(a) => Op::FlatExp2(go(a, ops)),
        Node::Piecewise {
            arg,
            breakpoint,
            left,
            right,
        } => {
            let a = go(arg, ops);
            let l = go(left, ops);
            let r = go(right, ops);
            Op::Piecewise(a, *breakpoint, l, r)
        }
    };
    let slot = ops.len();
    match (&op, e.node()) {
        (Op::Const(v), _) => {
            consts.insert(v.to_bits(), slot);
        }
        (Op::Var(i), _) => {
            vars.insert(*i, slot);
            *nvars = (*nvars).max(i + 1);
        }
        _ => {}
    }
    ops.push(op);
    slots.insert(e.id(), slot);
    slot
}

/// Sign and natural-log magnitude of a real number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNum {
    /// -1, 0 or 1; the value is NaN when `ln` is NaN.
    pub sign: i8,
    pub ln: f64,
}

impl LogNum {
    pub const ZERO: LogNum = LogNum {
        sign: 0,
        ln: f64::NEG_INFINITY,
    };
    pub const ONE: LogNum = LogNum { sign: 1, ln: 0.0 };
    pub const NAN: LogNum = LogNum {
        sign: 1,
        ln: f64::NAN,
    };

    pub fn from_f64(v: f64) -> LogNum {
        if v.is_nan() {
            LogNum::NAN
        } else if v == 0.0 {
            LogNum::ZERO
        } else {
            LogNum {
                sign: if v > 0.0 { 1 } else { -1 },
                ln: v.abs().ln(),
            }
        }
    }

    pub fn to_f64(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            self.sign as f64 * self.ln.exp()
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0 || self.ln == f64::NEG_INFINITY
    }

    pub fn is_nan(self) -> bool {
        self.ln.is_nan()
    }

    pub fn mul(self, o: LogNum) -> LogNum {
        if self.is_zero() || o.is_zero() {
            return LogNum::ZERO;
        }
        LogNum {
            sign: self.sign * o.sign,
            ln: self.ln + o.ln,
        }
    }

    fn div(self, o: LogNum) -> LogNum {
        if self.is_zero() {
            return LogNum::ZERO;
        }
        if o.is_zero() {
            return LogNum {
                sign: self.sign,
                ln: f64::INFINITY,
            };
        }
        LogNum {
            sign: self.sign * o.sign,
            ln: self.ln - o.ln,
        }
    }

    fn powi(self, n: i32) -> LogNum {
        if self.is_zero() {
            return if n > 0 {
                LogNum::ZERO
            } else if n == 0 {
                LogNum::ONE
            } else {
                LogNum {
                    sign: 1,
                    ln: f64::INFINITY,
                }
            };
        }
        LogNum {
            sign: if n % 2 == 0 { 1 } else { self.sign },
            ln: self.ln * n as f64,
        }
    }

    pub fn sum(terms: impl Iterator<Item = LogNum>) -> LogNum {
        let terms: Vec<LogNum> = terms.filter(|t| !t.is_zero()).collect();
        if terms.iter().any(|t| t.is_nan()) {
            return LogNum::NAN;
        }
        if terms.is_empty() {
            return LogNum::ZERO;
        }
        let m = terms.iter().map(|t| t.ln).fold(f64::NEG_INFINITY, f64::max);
        if m == f64::INFINITY {
            let signs: Vec<i8> = terms
                .iter()
                .filter(|t| t.ln == f64::INFINITY)
                .map(|t| t.sign)
                .collect();
            return if signs.iter().all(|&s| s == signs[0]) {
                LogNum {
                    sign: signs[0],
                    ln: f64::INFINITY,
                }
            } else {
                LogNum::NAN
            };
        }
        let s: f64 = terms
            .iter()
            .map(|t| t.sign as f64 * (t.ln - m).exp())
            .sum();
        if s == 0.0 {
            LogNum::ZERO
        } else {
            LogNum {
                sign: if s > 0.0 { 1 } else { -1 },
                ln: m + s.abs().ln(),
            }
        }
    }
}

impl Expr {
    /// Fast evaluation through a one-off tape. Never fails; domain problems
    /// show up as NaN.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        Tape::compile(std::slice::from_ref(self)).eval(point)[0]
    }

    /// Checked evaluation. Only the branch selected by each piecewise node is
    /// visited; a NaN produced on the selected path is reported together with
    /// the path of child indices that leads to the offending node.
    pub fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        let need = self.var_bound();
        if point.len() < need {
            return Err(EvalError::Arity {
                got: point.len(),
                need,
            });
        }
        let mut memo = HashMap::new();
        let mut path = Vec::new();
        eval_rec(self, point, &mut memo, &mut path)
    }
}

fn op_name(e: &Expr) -> &'static str {
    match e.node() {
        Node::Const(_) => "const",
        Node::Var(_) => "var",
        Node::Add(_) => "add",
        Node::Mul(_) => "mul",
        Node::Div(..) => "div",
        Node::Pow(..) => "pow",
        Node::Exp(_) => "exp",
        Node::Ln(_) => "ln",
        Node::Sqrt(_) => "sqrt",
        Node::FlatExp1(_) => "flat_exp1",
        Node::FlatExp2(_) => "flat_exp2",
        Node::Piecewise { .. } => "piecewise",
    }
}

fn eval_rec(
    e: &Expr,
    p: &[f64],
    memo: &mut HashMap<usize, f64>,
    path: &mut Vec<usize>,
) -> Result<f64, EvalError> {
    if let Some(&v) = memo.get(&e.id()) {
        return Ok(v);
    }
    let mut child = |i: usize, c: &Expr, memo: &mut HashMap<usize, f64>| {
        path.push(i);
        let r = eval_rec(c, p, memo, path);
        path.pop();
        r
    };
    let v = match e.node() {
        Node::Const(c) => rational_to_f64(c),
        Node::Var(i) => p[*i],
        Node::Add(v) => {
            let mut s = 0.0;
            for (i, t) in v.iter().enumerate() {
                s += child(i, t, memo)?;
            }
            s
        }
        Node::Mul(v) => {
            let mut s = 1.0;
            for (i, t) in v.iter().enumerate() {
                let x = child(i, t, memo)?;
                if x == 0.0 {
                    s = 0.0;
                    break;
                }
                s *= x;
            }
            s
        }
        Node::Div(a, b) => {
            let n = child(0, a, memo)?;
            if n == 0.0 {
                0.0
            } else {
                n / child(1, b, memo)?
            }
        }
        Node::Pow(a, n) => child(0, a, memo)?.powi(*n),
        Node::Exp(a) => child(0, a, memo)?.exp(),
        Node::Ln(a) => {
            let x = child(0, a, memo)?;
            if x < 0.0 {
                return Err(domain(e, path));
            }
            x.ln()
        }
        Node::Sqrt(a) => {
            let x = child(0, a, memo)?;
            if x < 0.0 {
                return Err(domain(e, path));
            }
            x.sqrt()
        }
        Node::FlatExp1(a) | Node::FlatExp2(a) => {
            let u = child(0, a, memo)?;
            if u >= 1.0 {
                return Err(domain(e, path));
            }
            let inner = (1.0 / (1.0 - u)).exp();
            if matches!(e.node(), Node::FlatExp2(_)) {
                inner.exp()
            } else {
                inner
            }
        }
        Node::Piecewise {
            arg,
            breakpoint,
            left,
            right,
        } => {
            let a = child(0, arg, memo)?;
            if a < *breakpoint {
                child(1, left, memo)?
            } else {
                child(2, right, memo)?
            }
        }
    };
    if v.is_nan() {
        return Err(domain(e, path));
    }
    memo.insert(e.id(), v);
    Ok(v)
}

fn domain(e: &Expr, path: &[usize]) -> EvalError {
    let p: Vec<String> = path.iter().map(|i| i.to_string()).collect();
    EvalError::Domain {
        op: op_name(e),
        path: format!("/{}", p.join("/")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_values() {
        let x = Expr::var(0);
        let y = Expr::var(1);
        assert_eq!((&x * &y).eval(&[2.0, 3.0]).unwrap(), 6.0);
        let t = Expr::var(0);
        assert!((t.flat_exp1().eval(&[0.0]).unwrap() - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn domain_error_reports_path() {
        let x = Expr::var(0);
        let e = Expr::add(vec![Expr::one(), x.ln()]);
        match e.eval(&[-1.0]) {
            Err(EvalError::Domain { op, path }) => {
                assert_eq!(op, "ln");
                assert_eq!(path, "/0");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn untaken_branch_is_not_evaluated() {
        let t = Expr::var(0);
        let e = Expr::piecewise(&t, 1.0, Expr::one().div(&t.flat_exp1()), Expr::zero());
        assert_eq!(e.eval(&[1.5]).unwrap(), 0.0);
        assert_eq!(e.eval_f64(&[1.5]), 0.0);
    }

    #[test]
    fn inverse_flat_exp2_decays_faster_than_powers() {
        let t = Expr::var(0);
        let e = Expr::one().div(&t.flat_exp2());
        let mut prev = f64::INFINITY;
        for j in 1..8 {
            let s = 1.0 - 0.5f64.powi(j);
            let v = e.eval(&[s]).unwrap();
            assert!(v < prev || v == 0.0);
            assert!(v <= (1.0 - s).powi(10) || v == 0.0);
            prev = v;
        }
    }

    #[test]
    fn forward_gradient_matches_symbolic_derivative() {
        let x = Expr::var(0);
        let y = Expr::var(1);
        let e = Expr::piecewise(
            &x,
            0.0,
            (&x * &y).exp(),
            (&y * Expr::frac(1, 3)).flat_exp2().div(&(&x + Expr::int(2))) + x.sqrt().ln(),
        );
        let tape = Tape::compile(std::slice::from_ref(&e));
        for p in [[-0.3, 0.4], [0.5, 0.2], [1.5, -0.7]] {
            let (v, g) = tape.eval_grad(&p, 2);
            assert!((v[0] - e.eval_f64(&p)).abs() < 1e-12);
            for i in 0..2 {
                let d = e.diff(i).eval_f64(&p);
                assert!((g[i] - d).abs() <= 1e-12 * d.abs().max(1.0), "{p:?} {i}");
            }
        }
    }

    #[test]
    fn zero_annihilates_infinity() {
        let t = Expr::var(0);
        let e = Expr::mul(vec![(t.neg() * Expr::int(1000)).exp(), (t.clone() * Expr::int(1000)).exp()]);
        assert_eq!(e.eval_f64(&[1.0]), 0.0);
    }

    #[test]
    fn log_domain_keeps_underflowed_magnitudes() {
        let t = Expr::var(0);
        let e = Expr::mul(vec![Expr::int(3), (t.neg() * Expr::int(2000)).exp()]);
        let tape = Tape::compile(&[e]);
        let l = tape.eval_log(&[1.0])[0];
        assert_eq!(l.sign, 1);
        assert!((l.ln - (3f64.ln() - 2000.0)).abs() < 1e-9);
        let s = Expr::add(vec![Expr::int(2), Expr::int(-5)]);
        let raw = Expr::raw(Node::Add(vec![Expr::int(2), Expr::int(-5)]));
        let v = Tape::compile(&[raw]).eval_log(&[])[0].to_f64();
        assert!((v + 3.0).abs() < 1e-14);
        assert_eq!(s.eval_f64(&[]), -3.0);
    }
}
