//! Flat diffeomorphisms `f: [0,1) -> [0,inf)`, Casimir bumps and separating
//! bumps.
//!
//! Every quotient that tends to zero at `t = 1` is built as a piecewise
//! expression whose right branch is the exact constant 0, and whose other
//! branches are written in log form so they never overflow.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::patch::Region;
use crate::symexpr::{Expr, Tape};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TaperError {
    #[error("taper half-width {0} outside (0, 0.2]")]
    Delta(f64),
    #[error("taper is not monotone near t = {0}")]
    NotMonotone(f64),
    #[error("bump needs a < b, got a = {0}, b = {1}")]
    BumpOrder(f64, f64),
    #[error("support region is not strictly inside the enclosing region")]
    NotNested,
    #[error("unsupported region pair for separating bumps")]
    Unsupported,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `f = e^{1/(1-t)}` near 1.
    Single,
    /// `f = e^{e^{1/(1-t)}}` near 1.
    Double,
}

impl std::str::FromStr for Regime {
    type Err = String;
    fn from_str(s: &str) -> Result<Regime, String> {
        match s {
            "single" => Ok(Regime::Single),
            "double" => Ok(Regime::Double),
            other => Err(format!("unknown taper regime {other:?}")),
        }
    }
}

/// Grid size of the monotonicity check run at construction.
pub const MONOTONE_GRID: usize = 10_000;

#[derive(Debug, Clone)]
pub struct FlatTaper {
    pub regime: Regime,
    pub delta: f64,
    tau: Expr,
    e: Expr,
    log_ep: Expr,
    s: Expr,
    log_f_blend: Expr,
    log_fp_blend: Expr,
}

impl FlatTaper {
    pub fn new(regime: Regime, delta: f64) -> Result<FlatTaper, TaperError> {
        if !(delta > 0.0 && delta <= 0.2) {
            return Err(TaperError::Delta(delta));
        }
        let tau = Expr::var(0);
        let one = Expr::one();
        let om = &one - &tau;
        let (e, ep, log_ep) = match regime {
            Regime::Single => (om.powi(-1), om.powi(-2), (om.ln() * Expr::int(-2))),
            Regime::Double => {
                let e = tau.flat_exp1();
                let ep = &e * &om.powi(-2);
                let log_ep = om.powi(-1) - om.ln() * Expr::int(2);
                (e, ep, log_ep)
            }
        };
        let d = Expr::real(delta);
        let v = (&tau - &d).div(&(&one - &d * Expr::int(2)));
        let psi = |u: &Expr| u.powi(-1).neg().exp();
        let s = psi(&v).div(&(psi(&v) + psi(&(&one - &v))));
        let sp = s.diff(0);
        let eneg = e.neg().exp();
        let r_f = (&s + &(&one - &s) * &tau * &eneg).ln();
        let r_fp = (&(&one - &s) * &eneg + &s * &ep + &sp * &(&one - &tau * &eneg)).ln();
        let taper = FlatTaper {
            regime,
            delta,
            log_f_blend: &e + &r_f,
            log_fp_blend: &e + &r_fp,
            tau,
            e,
            log_ep,
            s,
        };
        taper.check_monotone()?;
        Ok(taper)
    }

    fn regions(&self, id: Expr, blend: Expr, end: Expr, limit: Expr) -> Expr {
        let t = &self.tau;
        let tail = Expr::piecewise(t, 1.0, end, limit);
        let mid = Expr::piecewise(t, 1.0 - self.delta, blend, tail);
        Expr::piecewise(t, self.delta, id, mid)
    }

    fn log_fp_end(&self) -> Expr {
        &self.e + &self.log_ep
    }

    fn at(template: &Expr, t: &Expr) -> Expr {
        template.substitute(std::slice::from_ref(t))
    }

    /// Blend weight: 0 for `t <= δ`, 1 for `t >= 1-δ`.
    pub fn blend(&self, t: &Expr) -> Expr {
        let w = Expr::piecewise(
            &self.tau,
            self.delta,
            Expr::zero(),
            Expr::piecewise(&self.tau, 1.0 - self.delta, self.s.clone(), Expr::one()),
        );
        Self::at(&w, t)
    }

    /// `f(t)`, meaningful for `t < 1`.
    pub fn f(&self, t: &Expr) -> Expr {
        let big = match self.regime {
            Regime::Single => self.tau.flat_exp1(),
            Regime::Double => self.tau.flat_exp2(),
        };
        let one = Expr::one();
        let blend = &(&one - &self.s) * &self.tau + &self.s * &big;
        let w = Expr::piecewise(
            &self.tau,
            self.delta,
            self.tau.clone(),
            Expr::piecewise(&self.tau, 1.0 - self.delta, blend, big),
        );
        Self::at(&w, t)
    }

    /// `ln f(t)` for `0 < t < 1`.
    pub fn log_f(&self, t: &Expr) -> Expr {
        let w = Expr::piecewise(
            &self.tau,
            self.delta,
            self.tau.ln(),
            Expr::piecewise(&self.tau, 1.0 - self.delta, self.log_f_blend.clone(), self.e.clone()),
        );
        Self::at(&w, t)
    }

    /// `ln f'(t)` for `t < 1`.
    pub fn log_fp(&self, t: &Expr) -> Expr {
        let w = Expr::piecewise(
            &self.tau,
            self.delta,
            Expr::zero(),
            Expr::piecewise(&self.tau, 1.0 - self.delta, self.log_fp_blend.clone(), self.log_fp_end()),
        );
        Self::at(&w, t)
    }

    pub fn fp(&self, t: &Expr) -> Expr {
        self.log_fp(t).exp()
    }

    /// `1/f^i`, exactly 0 for `t >= 1`.
    pub fn inv_f_pow(&self, t: &Expr, i: i32) -> Expr {
        let k = Expr::int(-(i as i64));
        let w = self.regions(
            self.tau.powi(-i),
            (&k * &self.log_f_blend).exp(),
            (&k * &self.e).exp(),
            Expr::zero(),
        );
        Self::at(&w, t)
    }

    /// `1/(f' f^i)`, exactly 0 for `t >= 1`.
    pub fn inv_fp_f_pow(&self, t: &Expr, i: i32) -> Expr {
        let k = Expr::int(i as i64);
        let w = self.regions(
            self.tau.powi(-i),
            (&self.log_fp_blend + &k * &self.log_f_blend).neg().exp(),
            (self.log_fp_end() + &k * &self.e).neg().exp(),
            Expr::zero(),
        );
        Self::at(&w, t)
    }

    /// `f/f'`, exactly 0 for `t >= 1`. Only flat in the double regime.
    pub fn f_over_fp(&self, t: &Expr) -> Expr {
        let w = self.regions(
            self.tau.clone(),
            (&self.log_f_blend - &self.log_fp_blend).exp(),
            self.log_ep.neg().exp(),
            Expr::zero(),
        );
        Self::at(&w, t)
    }

    /// `1/f'`, exactly 0 for `t >= 1`.
    pub fn inv_fp(&self, t: &Expr) -> Expr {
        let w = self.regions(
            Expr::one(),
            self.log_fp_blend.neg().exp(),
            self.log_fp_end().neg().exp(),
            Expr::zero(),
        );
        Self::at(&w, t)
    }

    /// `e^{λ f}/f'` for `λ <= 0`; the limit past `t = 1` is 0.
    pub fn exp_lambda_f_over_fp(&self, t: &Expr, lambda: &Expr) -> Expr {
        if lambda.is_zero() {
            return self.inv_fp(t);
        }
        let w = self.regions(
            (lambda * &self.tau).exp(),
            (lambda * &self.log_f_blend.exp() - &self.log_fp_blend).exp(),
            (lambda * &self.e.exp() - self.log_fp_end()).exp(),
            Expr::zero(),
        );
        Self::at(&w, t)
    }

    /// `e^{λ f}` for `λ < 0`; the limit past `t = 1` is 0.
    pub fn exp_lambda_f(&self, t: &Expr, lambda: &Expr) -> Expr {
        let w = self.regions(
            (lambda * &self.tau).exp(),
            (lambda * &self.log_f_blend.exp()).exp(),
            (lambda * &self.e.exp()).exp(),
            Expr::zero(),
        );
        Self::at(&w, t)
    }

    /// `e^{-c (f - t)}` for `c > 0`; 1 where `f = t`, 0 past `t = 1`.
    pub fn exp_neg_c_f_minus_t(&self, t: &Expr, c: &Expr) -> Expr {
        let w = self.regions(
            Expr::one(),
            (c * &(self.log_f_blend.exp() - &self.tau)).neg().exp(),
            (c * &(self.e.exp() - &self.tau)).neg().exp(),
            Expr::zero(),
        );
        Self::at(&w, t)
    }

    fn check_monotone(&self) -> Result<(), TaperError> {
        let t = Expr::var(0);
        let tape = Tape::compile(&[self.log_f(&t), self.log_fp(&t)]);
        let mut prev = f64::NEG_INFINITY;
        for k in 1..MONOTONE_GRID {
            let s = k as f64 / MONOTONE_GRID as f64;
            let v = tape.eval(&[s]);
            let (lf, lfp) = (v[0], v[1]);
            // ln f overflows to +inf once e^{1/(1-t)} does in the double regime.
            let stalled = lf < prev || (lf == prev && lf.is_finite());
            if lf.is_nan() || lfp.is_nan() || lfp == f64::NEG_INFINITY || stalled {
                return Err(TaperError::NotMonotone(s));
            }
            prev = lf;
        }
        Ok(())
    }
}

/// Smooth non-increasing function of one variable: 1 up to `a`, 0 from `b`.
#[derive(Debug, Clone)]
pub struct CasimirBump {
    pub a: f64,
    pub b: f64,
    template: Expr,
}

impl CasimirBump {
    pub fn new(a: f64, b: f64) -> Result<CasimirBump, TaperError> {
        if !(a < b && a.is_finite() && b.is_finite()) {
            return Err(TaperError::BumpOrder(a, b));
        }
        let tau = Expr::var(0);
        let one = Expr::one();
        let v = (&tau - Expr::real(a)).div(&Expr::real(b - a));
        let psi = |u: &Expr| u.powi(-1).exp().neg().exp();
        let w = &one - &v;
        let mid = psi(&w).div(&(psi(&v) + psi(&w)));
        let template = Expr::piecewise(&tau, a, one.clone(), Expr::piecewise(&tau, b, mid, Expr::zero()));
        Ok(CasimirBump { a, b, template })
    }

    pub fn at(&self, t: &Expr) -> Expr {
        self.template.substitute(std::slice::from_ref(t))
    }
}

/// Bump equal to 1 on `support` and 0 outside `enclosing`, in the variables
/// `vars`. Boxes give a product of per-axis bumps, balls a radial bump in
/// `|x|^2`.
pub fn make_separating_bumps(support: &Region, enclosing: &Region, vars: &[Expr]) -> Result<Expr, TaperError> {
    match (support, enclosing) {
        (Region::Box { bounds: inner }, Region::Box { bounds: outer }) => {
            if inner.len() != vars.len() || outer.len() != vars.len() {
                return Err(TaperError::Unsupported);
            }
            let mut factors = Vec::new();
            for ((x, &(lo, hi)), &(lo2, hi2)) in vars.iter().zip(inner).zip(outer) {
                if !(lo2 < lo && hi < hi2) {
                    return Err(TaperError::NotNested);
                }
                factors.push(CasimirBump::new(hi, hi2)?.at(x));
                factors.push(CasimirBump::new(-lo, -lo2)?.at(&x.neg()));
            }
            Ok(Expr::mul(factors))
        }
        (Region::Ball { radius: r }, Region::Ball { radius: big }) => {
            if !(r < big) {
                return Err(TaperError::NotNested);
            }
            let r2 = Expr::add(vars.iter().map(|x| x.powi(2)).collect());
            Ok(CasimirBump::new(r * r, big * big)?.at(&r2))
        }
        _ => Err(TaperError::Unsupported),
    }
}
