//! Seeds and the compact-support constructions built on them.

mod ball;
mod collar;
mod jet;
mod product;

pub use ball::{ball_support, radial_map, BallSupport, INNER_RADIUS};
pub use collar::{collar_extend, CollarBivector, CollarComponent};
pub use jet::first_jet_extension;
pub use product::{product, ProductInput};

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exterior::MultivectorField;
use crate::symexpr::{Expr, Poly, Rational};
use crate::verify::poly_schouten;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConstructError {
    #[error("structure constants violate antisymmetry at ({i}, {j}, {k})")]
    Antisymmetry { i: usize, j: usize, k: usize },
    #[error("structure constants violate the Jacobi identity at (i, j, k, l) = ({0}, {1}, {2}, {3})")]
    Jacobi(usize, usize, usize, usize),
    #[error("index {index} out of range for dimension {dim}")]
    Index { index: usize, dim: usize },
    #[error("2r = {0} exceeds n = {1}")]
    RankTooLarge(usize, usize),
    #[error("coefficient {0:?} is not a polynomial of degree at most 2")]
    Degree(Vec<usize>),
    #[error("input is not Poisson: {0}")]
    NotPoisson(String),
    #[error("input bivector is zero")]
    Zero,
    #[error("positive weight {0} is not supported")]
    PositiveWeight(f64),
    #[error("bump plateau ends at {0}, before the taper reaches its end at 1")]
    BumpPlateau(f64),
    #[error("support region is not strictly inside its enclosure")]
    Enclosure,
    #[error(transparent)]
    Taper(#[from] crate::taper::TaperError),
    #[error(transparent)]
    Exterior(#[from] crate::exterior::ExteriorError),
}

/// Structure constants `c^k_{ij}` of a Lie algebra, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebraData {
    pub dim: usize,
    /// `c[i][j][k] = c^k_{ij}` (0-based).
    pub c: Vec<Vec<Vec<Rational>>>,
}

/// JSON form: 1-based `(i, j, k, value)` quadruples meaning `c^k_{ij}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LieAlgebraJson {
    pub dim: usize,
    pub c: Vec<(usize, usize, usize, f64)>,
}

impl LieAlgebraData {
    /// Builds the table from 0-based entries and closes it under
    /// antisymmetry in `(i, j)`.
    pub fn from_entries(dim: usize, entries: &[(usize, usize, usize, Rational)]) -> Result<Self, ConstructError> {
        let mut c = vec![vec![vec![Rational::zero(); dim]; dim]; dim];
        for (i, j, k, v) in entries {
            for &index in [i, j, k] {
                if index >= dim {
                    return Err(ConstructError::Index { index, dim });
                }
            }
            c[*i][*j][*k] = v.clone();
            c[*j][*i][*k] = -v.clone();
        }
        let la = LieAlgebraData { dim, c };
        la.validate()?;
        Ok(la)
    }

    pub fn from_json(j: &LieAlgebraJson) -> Result<Self, ConstructError> {
        let mut entries = Vec::new();
        for &(i, j1, k, v) in &j.c {
            for index in [i, j1, k] {
                if index == 0 || index > j.dim {
                    return Err(ConstructError::Index { index, dim: j.dim });
                }
            }
            entries.push((i - 1, j1 - 1, k - 1, crate::symexpr::rational_from_f64(v)));
        }
        LieAlgebraData::from_entries(j.dim, &entries)
    }

    pub fn so3() -> LieAlgebraData {
        let one = Rational::from_integer(1.into());
        LieAlgebraData::from_entries(3, &[(0, 1, 2, one.clone()), (1, 2, 0, one.clone()), (2, 0, 1, one)])
            .expect("so(3) is a Lie algebra")
    }

    /// `[e1, e2] = e3`.
    pub fn heisenberg() -> LieAlgebraData {
        let one = Rational::from_integer(1.into());
        LieAlgebraData::from_entries(3, &[(0, 1, 2, one)]).expect("heisenberg is a Lie algebra")
    }

    /// `[e1, e2] = e2`.
    pub fn affine2() -> LieAlgebraData {
        let one = Rational::from_integer(1.into());
        LieAlgebraData::from_entries(2, &[(0, 1, 1, one)]).expect("aff(1) is a Lie algebra")
    }

    pub fn validate(&self) -> Result<(), ConstructError> {
        let n = self.dim;
        let c = &self.c;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if c[i][j][k] != -c[j][i][k].clone() {
                        return Err(ConstructError::Antisymmetry { i, j, k });
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut s = Rational::zero();
                        for m in 0..n {
                            s += &c[i][j][m] * &c[m][k][l] + &c[j][k][m] * &c[m][i][l] + &c[k][i][m] * &c[m][j][l];
                        }
                        if !s.is_zero() {
                            return Err(ConstructError::Jacobi(i, j, k, l));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Bivector on `R^n` with polynomial coefficients of degree at most 2 that
/// is symbolically Poisson.
#[derive(Debug, Clone)]
pub struct PolyPoisson {
    pub bivector: MultivectorField,
}

impl PolyPoisson {
    pub fn new(bivector: MultivectorField) -> Result<PolyPoisson, ConstructError> {
        let n = bivector.dim;
        for (idx, e) in bivector.entries() {
            match Poly::from_expr(e, n) {
                Some(p) if p.degree().unwrap_or(0) <= 2 => {}
                _ => return Err(ConstructError::Degree(idx.clone())),
            }
        }
        match poly_schouten(&bivector) {
            Some(bad) if bad.is_empty() => Ok(PolyPoisson { bivector }),
            Some(bad) => Err(ConstructError::NotPoisson(
                bad.iter()
                    .map(|(ijk, p)| format!("[π,π]{:?} = {}", ijk, p.to_expr()))
                    .collect::<Vec<_>>()
                    .join("; "),
            )),
            None => Err(ConstructError::NotPoisson("non-polynomial coefficient".into())),
        }
    }

    pub fn dim(&self) -> usize {
        self.bivector.dim
    }

    /// Homogeneous parts `[π_0, π_1, π_2]`, with canonical coefficients.
    pub fn degree_split(&self) -> [MultivectorField; 3] {
        let n = self.dim();
        let mut parts = [
            MultivectorField::zero(n, 2),
            MultivectorField::zero(n, 2),
            MultivectorField::zero(n, 2),
        ];
        for (idx, e) in self.bivector.entries() {
            let p = Poly::from_expr(e, n).expect("validated");
            for (d, part) in parts.iter_mut().enumerate() {
                part.set(idx, p.homogeneous_part(d as u32).to_expr());
            }
        }
        parts
    }

    pub fn to_json(&self) -> PolyPoissonJson {
        let n = self.dim();
        let entries = self
            .bivector
            .entries()
            .map(|(idx, e)| {
                let p = Poly::from_expr(e, n).expect("validated");
                PolyEntry {
                    i: idx[0] + 1,
                    j: idx[1] + 1,
                    poly: p
                        .terms
                        .iter()
                        .map(|(exps, c)| Monomial {
                            coef: c.to_string(),
                            exps: exps.clone(),
                        })
                        .collect(),
                }
            })
            .collect();
        PolyPoissonJson { dim: n, entries }
    }

    pub fn from_json(j: &PolyPoissonJson) -> Result<PolyPoisson, ConstructError> {
        PolyPoisson::new(j.to_field()?)
    }
}

/// Sum of monomials in `dim` variables.
pub fn poly_from_monomials(dim: usize, terms: &[Monomial]) -> Result<Expr, ConstructError> {
    let mut p = Poly::zero(dim);
    for m in terms {
        let c: Rational = m
            .coef
            .parse()
            .map_err(|_| ConstructError::NotPoisson(format!("bad coefficient {:?}", m.coef)))?;
        if m.exps.len() != dim {
            return Err(ConstructError::Index { index: m.exps.len(), dim });
        }
        p = p.add(&Poly::monomial(m.exps.clone(), c));
    }
    Ok(p.to_expr())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Monomial {
    pub coef: String,
    pub exps: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyEntry {
    pub i: usize,
    pub j: usize,
    pub poly: Vec<Monomial>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyPoissonJson {
    pub dim: usize,
    pub entries: Vec<PolyEntry>,
}

impl PolyPoissonJson {
    /// The bivector without the degree and Jacobi checks.
    pub fn to_field(&self) -> Result<MultivectorField, ConstructError> {
        let mut b = MultivectorField::zero(self.dim, 2);
        for e in &self.entries {
            for index in [e.i, e.j] {
                if index == 0 || index > self.dim {
                    return Err(ConstructError::Index { index, dim: self.dim });
                }
            }
            let cur = b.get(&[e.i - 1, e.j - 1]);
            b.set(&[e.i - 1, e.j - 1], cur + poly_from_monomials(self.dim, &e.poly)?);
        }
        Ok(b)
    }
}

/// Linear Poisson structure `π^{ij} = Σ_k c^k_{ij} x_k` on the dual.
pub fn lie_linear(la: &LieAlgebraData) -> Result<PolyPoisson, ConstructError> {
    la.validate()?;
    let n = la.dim;
    let mut b = MultivectorField::zero(n, 2);
    for i in 0..n {
        for j in i + 1..n {
            let terms = (0..n)
                .filter(|&k| !la.c[i][j][k].is_zero())
                .map(|k| Expr::rational(la.c[i][j][k].clone()) * Expr::var(k))
                .collect();
            b.set(&[i, j], Expr::add(terms));
        }
    }
    PolyPoisson::new(b)
}

/// `Σ_{i<r} ∂x_{2i+1} ∧ ∂x_{2i+2}`.
pub fn constant_rank(n: usize, r: usize) -> Result<PolyPoisson, ConstructError> {
    if 2 * r > n {
        return Err(ConstructError::RankTooLarge(2 * r, n));
    }
    let mut b = MultivectorField::zero(n, 2);
    for i in 0..r {
        b.set(&[2 * i, 2 * i + 1], Expr::one());
    }
    PolyPoisson::new(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn so3_constants_give_cross_product_structure() {
        let p = lie_linear(&LieAlgebraData::so3()).unwrap();
        let b = &p.bivector;
        assert!(b.get(&[0, 1]).structurally_eq(&Expr::var(2)));
        assert!(b.get(&[1, 2]).structurally_eq(&Expr::var(0)));
        assert!(b.get(&[2, 0]).structurally_eq(&Expr::var(1)));
    }

    #[test]
    fn jacobi_violation_is_named() {
        let one = Rational::from_integer(1.into());
        // [e1,e2]=e1, [e2,e3]=e2, [e3,e1]=e3 fails Jacobi
        let r = LieAlgebraData::from_entries(3, &[(0, 1, 0, one.clone()), (1, 2, 1, one.clone()), (2, 0, 2, one)]);
        assert!(matches!(r, Err(ConstructError::Jacobi(..))));
    }

    #[test]
    fn constant_rank_bounds() {
        assert!(constant_rank(3, 2).is_err());
        assert!(constant_rank(3, 0).unwrap().bivector.is_zero());
        assert_eq!(constant_rank(4, 2).unwrap().bivector.entries().count(), 2);
    }

    #[test]
    fn json_round_trip() {
        let p = lie_linear(&LieAlgebraData::affine2()).unwrap();
        let j = serde_json::to_string(&p.to_json()).unwrap();
        let back = PolyPoisson::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert!(back.bivector.get(&[0, 1]).structurally_eq(&p.bivector.get(&[0, 1])));
    }
}
