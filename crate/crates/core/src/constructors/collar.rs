use super::ConstructError;
use crate::exterior::MultivectorField;
use crate::symexpr::Expr;
use crate::taper::{CasimirBump, FlatTaper};

/// One weight space `e^{λt}(∂t ∧ V + W)` of a collar bivector.
#[derive(Debug, Clone)]
pub struct CollarComponent {
    pub lambda: f64,
    pub v: MultivectorField,
    pub w: MultivectorField,
}

/// Bivector `Σ e^{λ_i t}(∂t ∧ V_i + W_i)` on `N × [0, ∞)`, where `V_i`, `W_i`
/// live on the boundary patch. The collar coordinate `t` is appended last.
#[derive(Debug, Clone)]
pub struct CollarBivector {
    pub boundary_dim: usize,
    pub components: Vec<CollarComponent>,
}

impl CollarBivector {
    pub fn new(boundary_dim: usize, components: Vec<CollarComponent>) -> Result<CollarBivector, ConstructError> {
        for c in &components {
            let ok = c.v.dim == boundary_dim && c.v.degree == 1 && c.w.dim == boundary_dim && c.w.degree == 2;
            if !ok {
                return Err(ConstructError::Exterior(crate::exterior::ExteriorError::Dim(
                    boundary_dim,
                    c.v.dim.max(c.w.dim),
                )));
            }
        }
        Ok(CollarBivector {
            boundary_dim,
            components,
        })
    }

    /// The bivector as given, on `R^{m+1}` with `t` last.
    pub fn assemble(&self) -> MultivectorField {
        let m = self.boundary_dim;
        let t = Expr::var(m);
        self.assemble_with(|lambda| {
            let e = (Expr::real(lambda) * &t).exp();
            (e.clone(), e)
        })
    }

    fn assemble_with(&self, mut weights: impl FnMut(f64) -> (Expr, Expr)) -> MultivectorField {
        let m = self.boundary_dim;
        let mut out = MultivectorField::zero(m + 1, 2);
        for c in &self.components {
            let (wv, ww) = weights(c.lambda);
            for (idx, e) in c.v.entries() {
                let cur = out.get(&[m, idx[0]]);
                out.set(&[m, idx[0]], cur + &wv * e);
            }
            for (idx, e) in c.w.entries() {
                let cur = out.get(idx);
                out.set(idx, cur + &ww * e);
            }
        }
        out
    }
}

/// Compactly supported extension of a collar bivector with non-positive
/// weights: `t ↦ f(t)` is pulled back and the result is cut off by `g(t)`.
pub fn collar_extend(cb: &CollarBivector, taper: &FlatTaper, bump: &CasimirBump) -> Result<MultivectorField, ConstructError> {
    if let Some(c) = cb.components.iter().find(|c| c.lambda > 0.0) {
        return Err(ConstructError::PositiveWeight(c.lambda));
    }
    let t = Expr::var(cb.boundary_dim);
    let needs_cutoff = cb.components.iter().any(|c| c.lambda == 0.0 && !c.w.is_zero());
    if needs_cutoff && bump.a < 1.0 {
        return Err(ConstructError::BumpPlateau(bump.a));
    }
    let g = bump.at(&t);
    let raw = cb.assemble_with(|lambda| {
        if lambda == 0.0 {
            (taper.inv_fp(&t), Expr::one())
        } else {
            let l = Expr::real(lambda);
            (taper.exp_lambda_f_over_fp(&t, &l), taper.exp_lambda_f(&t, &l))
        }
    });
    Ok(raw.scale(&g))
}
