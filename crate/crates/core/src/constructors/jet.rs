use super::{ball_support, ConstructError, PolyPoisson};
use crate::exterior::MultivectorField;
use crate::symexpr::{rational_from_f64, Expr, Poly};
use crate::taper::{CasimirBump, FlatTaper};

/// Compactly supported structure around `center` sharing the first jet of
/// `p` there. The coefficients of `p` must be polynomial; the affine
/// truncation at `center` must itself be Poisson.
pub fn first_jet_extension(
    p: &MultivectorField,
    center: &[f64],
    taper: &FlatTaper,
    bump: &CasimirBump,
) -> Result<MultivectorField, ConstructError> {
    let n = p.dim;
    if center.len() != n {
        return Err(ConstructError::Exterior(crate::exterior::ExteriorError::Dim(n, center.len())));
    }
    let shift: Vec<Poly> = (0..n)
        .map(|i| Poly::var(n, i).add(&Poly::constant(n, rational_from_f64(center[i]))))
        .collect();
    let mut affine = MultivectorField::zero(n, 2);
    for (idx, e) in p.entries() {
        let poly = Poly::from_expr(e, n).ok_or_else(|| ConstructError::Degree(idx.clone()))?;
        affine.set(idx, poly.compose(&shift).truncate(1).to_expr());
    }
    let seed = PolyPoisson::new(affine)?;
    let out = ball_support(&seed, taper, bump)?.bivector;
    let back: Vec<Expr> = (0..n).map(|i| Expr::var(i) - Expr::real(center[i])).collect();
    Ok(out.substitute(&back))
}
