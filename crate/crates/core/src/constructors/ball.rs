use super::{ConstructError, PolyPoisson};
use crate::exterior::{ExplicitMap, MultivectorField};
use crate::patch::Region;
use crate::symexpr::Expr;
use crate::taper::{CasimirBump, FlatTaper};

/// Radius of the ball on which the output agrees with the input.
pub const INNER_RADIUS: f64 = 0.5;

/// Output of [`ball_support`] together with the radial parameters used.
#[derive(Debug, Clone)]
pub struct BallSupport {
    pub bivector: MultivectorField,
    /// Rate `L` in `t = ln(2|x|)/L`.
    pub rate: f64,
    /// Value of `t` at `|x| = 1`.
    pub t_end: f64,
    pub support: Region,
}

/// Compactly supported Poisson structure on `R^n` equal to `p` on the ball of
/// radius 1/2 and zero outside the unit ball.
///
/// Writing `p = π_0 + π_1 + π_2` by homogeneous degree, each part is pulled
/// back along the radial map `x ↦ x·e^{L(f(t)-t)}`, which multiplies `π_d` by
/// `e^{(d-2)L(f-t)}` and damps its radial components by `1/f'`. When `π_2 ≠ 0`
/// the sphere radius is a Casimir past `t = 1` and the bump in `t` cuts the
/// structure off.
pub fn ball_support(p: &PolyPoisson, taper: &FlatTaper, bump: &CasimirBump) -> Result<BallSupport, ConstructError> {
    let n = p.dim();
    if p.bivector.is_zero() {
        return Err(ConstructError::Zero);
    }
    let parts = p.degree_split();
    let quadratic = !parts[2].is_zero();
    if quadratic && bump.a < 1.0 {
        return Err(ConstructError::BumpPlateau(bump.a));
    }
    let t_end = if quadratic { bump.b } else { 1.0 };
    let rate = std::f64::consts::LN_2 / t_end;

    let xs: Vec<Expr> = (0..n).map(Expr::var).collect();
    let r2 = Expr::add(xs.iter().map(|x| x.powi(2)).collect());
    let t = (r2.clone() * Expr::int(4)).ln() / Expr::real(2.0 * rate);
    let radial = (taper.inv_fp(&t) - Expr::one()) / r2.clone();
    let cutoff = if quadratic { bump.at(&t) } else { Expr::one() };

    let mut weighted = Vec::new();
    for (d, part) in parts.iter().enumerate() {
        if part.is_zero() {
            continue;
        }
        let weight = if d < 2 {
            taper.exp_neg_c_f_minus_t(&t, &Expr::real((2 - d) as f64 * rate))
        } else {
            Expr::one()
        };
        weighted.push((weight, part));
    }

    let mut out = MultivectorField::zero(n, 2);
    for i in 0..n {
        for j in i + 1..n {
            let mut terms = Vec::new();
            for (weight, part) in &weighted {
                let v = |a: usize| Expr::add((0..n).map(|k| &xs[k] * part.get(&[k, a])).collect());
                let corr = &xs[i] * v(j) - v(i) * &xs[j];
                let inner = part.get(&[i, j]) + &radial * corr;
                terms.push(weight * inner);
            }
            let outer = &cutoff * Expr::add(terms);
            let annulus = Expr::piecewise(&r2, 1.0, outer, Expr::zero());
            let entry = Expr::piecewise(&r2, INNER_RADIUS * INNER_RADIUS, p.bivector.get(&[i, j]), annulus);
            out.set(&[i, j], entry);
        }
    }
    Ok(BallSupport {
        bivector: out,
        rate,
        t_end,
        support: Region::Ball { radius: 1.0 },
    })
}

/// The radial map `x ↦ x·e^{L(f(t)-t)}` with `t = ln(2|x|)/L`, valid on
/// `1/2 < |x| < 1` away from the end of the taper.
pub fn radial_map(n: usize, taper: &FlatTaper, rate: f64) -> ExplicitMap {
    let xs: Vec<Expr> = (0..n).map(Expr::var).collect();
    let r2 = Expr::add(xs.iter().map(|x| x.powi(2)).collect());
    let t = (r2 * Expr::int(4)).ln() / Expr::real(2.0 * rate);
    let s = ((taper.f(&t) - &t) * Expr::real(rate)).exp();
    ExplicitMap::new(n, xs.iter().map(|x| x * &s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{constant_rank, lie_linear, LieAlgebraData};
    use crate::taper::Regime;

    fn gadgets() -> (FlatTaper, CasimirBump) {
        (FlatTaper::new(Regime::Single, 0.1).unwrap(), CasimirBump::new(1.0, 2.0).unwrap())
    }

    #[test]
    fn symplectic_disk_values() {
        let (taper, bump) = gadgets();
        let b = ball_support(&constant_rank(2, 1).unwrap(), &taper, &bump).unwrap().bivector;
        let e = b.get(&[0, 1]);
        assert_eq!(e.eval(&[0.3, 0.1]).unwrap(), 1.0);
        assert_eq!(e.eval(&[0.8, 0.7]).unwrap(), 0.0);
        assert!(e.eval(&[0.7, 0.0]).unwrap() > 0.0);
    }

    #[test]
    fn closed_form_matches_generic_pullback() {
        let (taper, bump) = gadgets();
        let p = lie_linear(&LieAlgebraData::so3()).unwrap();
        let out = ball_support(&p, &taper, &bump).unwrap();
        let psi = radial_map(3, &taper, out.rate);
        let tape = out.bivector.compile();
        for &(r, dir) in &[(0.55, [0.6, 0.0, 0.8]), (0.7, [0.0, 0.6, 0.8]), (0.74, [0.48, 0.6, 0.64])] {
            let x: Vec<f64> = dir.iter().map(|d| d * r).collect();
            let generic = psi.pullback_bivector_at(&p.bivector, &x).unwrap();
            let closed = tape.matrix(&x);
            let err = (generic - closed).abs().max();
            assert!(err < 1e-9, "r = {r}: {err}");
        }
    }

    #[test]
    fn quadratic_needs_wide_plateau() {
        let taper = FlatTaper::new(Regime::Single, 0.1).unwrap();
        let mut b = MultivectorField::zero(2, 2);
        b.set(&[0, 1], Expr::var(0) * Expr::var(1));
        let p = PolyPoisson::new(b).unwrap();
        let narrow = CasimirBump::new(0.5, 2.0).unwrap();
        assert!(matches!(ball_support(&p, &taper, &narrow), Err(ConstructError::BumpPlateau(_))));
    }
}
