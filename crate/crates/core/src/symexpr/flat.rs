use serde::{Deserialize, Serialize};

use super::Expr;

/// Settings for flat-order estimation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlatProbe {
    pub kmax: usize,
    pub steps: Vec<f64>,
    pub tol: f64,
}

impl Default for FlatProbe {
    fn default() -> Self {
        FlatProbe {
            kmax: 6,
            steps: vec![1e-1, 10f64.powf(-1.5), 1e-2],
            tol: 1e-7,
        }
    }
}

impl FlatProbe {
    pub fn with_kmax(kmax: usize) -> FlatProbe {
        FlatProbe {
            kmax,
            ..FlatProbe::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatOrder {
    /// Number of consecutive vanishing derivatives (orders `0..order`),
    /// capped at `kmax`.
    pub order: usize,
    /// Set when the difference quotients of the first non-vanishing order did
    /// not settle as the step shrank.
    pub warning: bool,
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Central difference estimate of the `k`-th derivative at `b`.
fn central(g: &dyn Fn(f64) -> f64, b: f64, k: usize, h: f64) -> f64 {
    let mut s = 0.0;
    for i in 0..=k {
        let x = b + (k as f64 / 2.0 - i as f64) * h;
        let w = binom(k, i) * if i % 2 == 0 { 1.0 } else { -1.0 };
        s += w * g(x);
    }
    s / h.powi(k as i32)
}

/// Neville extrapolation of `values[i] ~ D + c1 h^2 + c2 h^4 ...` to `h = 0`.
fn richardson(steps: &[f64], values: &[f64]) -> f64 {
    let xs: Vec<f64> = steps.iter().map(|h| h * h).collect();
    let mut p = values.to_vec();
    let n = p.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (xs[i + m] * p[i] - xs[i] * p[i + 1]) / (xs[i + m] - xs[i]);
        }
    }
    p[0]
}

/// Estimates how many derivatives of a scalar function vanish at `b`.
///
/// An order `j` counts as vanishing when either the finest-step central
/// difference or the Richardson extrapolation over the step sequence is below
/// the tolerance. Polynomial zeros are caught by the extrapolation; flat
/// zeros by the finest step.
pub fn est_flat_order_fn(g: &dyn Fn(f64) -> f64, b: f64, probe: &FlatProbe) -> FlatOrder {
    if !(g(b).abs() <= probe.tol) {
        return FlatOrder {
            order: 0,
            warning: false,
        };
    }
    for k in 1..probe.kmax {
        let values: Vec<f64> = probe.steps.iter().map(|&h| central(g, b, k, h)).collect();
        let finest = *values.last().expect("step sequence");
        let extrapolated = richardson(&probe.steps, &values);
        let vanishes = finest.abs() <= probe.tol || extrapolated.abs() <= probe.tol;
        if !vanishes {
            let settled = values.windows(2).all(|w| (w[1] - w[0]).abs() <= w[0].abs().max(1.0))
                && finest.is_finite();
            return FlatOrder {
                order: k,
                warning: !settled,
            };
        }
    }
    FlatOrder {
        order: probe.kmax,
        warning: false,
    }
}

/// Flat order of `e` along the coordinate `var`, with the other coordinates
/// fixed at `base`.
pub fn est_flat_order(e: &Expr, var: usize, base: &[f64], b: f64, probe: &FlatProbe) -> FlatOrder {
    let tape = super::Tape::compile(std::slice::from_ref(e));
    let mut p = base.to_vec();
    if p.len() <= var {
        p.resize(var + 1, 0.0);
    }
    let g = |s: f64| {
        let mut q = p.clone();
        q[var] = s;
        tape.eval(&q)[0]
    };
    est_flat_order_fn(&g, b, probe)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_zero_has_order_three() {
        let t = Expr::var(0);
        let e = (Expr::one() - &t).powi(3);
        let r = est_flat_order(&e, 0, &[0.0], 1.0, &FlatProbe::with_kmax(5));
        assert_eq!(r.order, 3);
    }

    #[test]
    fn nonvanishing_value_has_order_zero() {
        let t = Expr::var(0);
        let e = Expr::one() - &t;
        assert_eq!(est_flat_order(&e, 0, &[0.0], 0.0, &FlatProbe::default()).order, 0);
    }

    #[test]
    fn extension_by_zero_of_inverse_flat_exp_reaches_cap() {
        let t = Expr::var(0);
        for kmax in 1..=6 {
            let e = Expr::piecewise(&t, 1.0, Expr::one().div(&t.flat_exp1()), Expr::zero());
            let r = est_flat_order(&e, 0, &[0.0], 1.0, &FlatProbe::with_kmax(kmax));
            assert_eq!(r.order, kmax, "kmax {kmax}");
        }
    }

    #[test]
    fn simple_zero_has_order_one() {
        let t = Expr::var(0);
        let e = Expr::one() - &t;
        assert_eq!(est_flat_order(&e, 0, &[0.0], 1.0, &FlatProbe::default()).order, 1);
    }
}
