use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::field::combinations;
use super::{ExteriorError, FormField, MultivectorField};
use crate::symexpr::Expr;

/// Mixed-degree form, one part per degree.
#[derive(Debug, Clone)]
pub struct Spinor {
    pub dim: usize,
    parts: BTreeMap<usize, FormField>,
}

impl Spinor {
    pub fn zero(dim: usize) -> Spinor {
        Spinor {
            dim,
            parts: BTreeMap::new(),
        }
    }

    pub fn one(dim: usize) -> Spinor {
        Spinor::from_form(FormField::scalar(dim, Expr::one()))
    }

    pub fn from_form(f: FormField) -> Spinor {
        let mut s = Spinor::zero(f.dim);
        if !f.is_zero() {
            s.parts.insert(f.degree, f);
        }
        s
    }

    /// `exp(w) = sum_j w^j / j!` for an even form `w`; the sum terminates.
    pub fn exp(w: &FormField) -> Spinor {
        assert!(w.degree.is_multiple_of(2) && w.degree > 0, "exp needs a positive even degree");
        let mut out = Spinor::one(w.dim);
        let mut pow = FormField::scalar(w.dim, Expr::one());
        let mut j = 1i64;
        let mut fact = 1i64;
        while pow.degree + w.degree <= w.dim {
            pow = pow.wedge(w).expect("same dim");
            if pow.is_zero() {
                break;
            }
            fact *= j;
            out = out
                .add(&Spinor::from_form(pow.scale(&Expr::frac(1, fact))))
                .expect("same dim");
            j += 1;
        }
        out
    }

    pub fn part(&self, degree: usize) -> FormField {
        self.parts
            .get(&degree)
            .cloned()
            .unwrap_or_else(|| FormField::zero(self.dim, degree))
    }

    pub fn parts(&self) -> impl Iterator<Item = &FormField> {
        self.parts.values()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.parts.keys().cloned().collect()
    }

    pub fn add(&self, o: &Spinor) -> Result<Spinor, ExteriorError> {
        if self.dim != o.dim {
            return Err(ExteriorError::Dim(self.dim, o.dim));
        }
        let mut out = self.clone();
        for (d, f) in &o.parts {
            let sum = out.part(*d).add(f)?;
            if sum.is_zero() {
                out.parts.remove(d);
            } else {
                out.parts.insert(*d, sum);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Expr) -> Spinor {
        let mut out = Spinor::zero(self.dim);
        for f in self.parts.values() {
            out.parts.insert(f.degree, f.scale(c));
        }
        out.parts.retain(|_, f| !f.is_zero());
        out
    }

    pub fn wedge(&self, o: &Spinor) -> Result<Spinor, ExteriorError> {
        let mut out = Spinor::zero(self.dim);
        for a in self.parts.values() {
            for b in o.parts.values() {
                out = out.add(&Spinor::from_form(a.wedge(b)?))?;
            }
        }
        Ok(out)
    }

    pub fn map(&self, mut f: impl FnMut(&Expr) -> Expr) -> Spinor {
        let mut out = Spinor::zero(self.dim);
        for p in self.parts.values() {
            out = out.add(&Spinor::from_form(p.map(&mut f))).expect("same dim");
        }
        out
    }

    /// Bivector of the Dirac structure annihilating this spinor, assuming the
    /// top-degree part is nowhere zero:
    /// `π^{ij} = (-1)^{i+j+1} ρ_{n-2}[complement(i,j)] / ρ_n` (1-based i, j).
    pub fn to_poisson(&self) -> MultivectorField {
        let n = self.dim;
        let top = self.part(n).get(&(0..n).collect::<Vec<_>>());
        let sub = self.part(n.saturating_sub(2));
        let mut out = MultivectorField::zero(n, 2);
        if n < 2 {
            return out;
        }
        for i in 0..n {
            for j in i + 1..n {
                let comp: Vec<usize> = (0..n).filter(|&k| k != i && k != j).collect();
                let c = sub.get(&comp);
                if c.is_zero() {
                    continue;
                }
                // 0-based i, j: (i+1)+(j+1)+1 has the parity of i+j+1.
                let e = c.div(&top);
                out.set(&[i, j], if (i + j + 1) % 2 == 0 { e } else { e.neg() });
            }
        }
        out
    }

    /// Rank of the associated Poisson structure at `p`, read off from the
    /// lowest degree carrying a certified nonzero coefficient.
    pub fn certified_rank_at(&self, p: &[f64]) -> Option<usize> {
        for (d, f) in &self.parts {
            if f.entries().any(|(_, e)| e.is_certified_nonzero_at(p)) {
                return Some(self.dim - d);
            }
        }
        None
    }

    /// Numeric coefficients by degree, each in combination order.
    pub fn eval_parts(&self, p: &[f64]) -> Vec<Vec<f64>> {
        (0..=self.dim)
            .map(|d| self.part(d).eval_dense(p))
            .collect()
    }
}

/// Clifford action residual of `(π♯ξ + ξ)` on a numeric spinor for every
/// basis covector `ξ`: the largest coefficient of `ι_{π♯ξ} ρ + ξ ∧ ρ`.
pub fn annihilator_residual(rho: &[Vec<f64>], pi: &DMatrix<f64>) -> f64 {
    let n = pi.nrows();
    let idx: Vec<Vec<Vec<usize>>> = (0..=n).map(|d| combinations(n, d)).collect();
    let coeff = |d: usize, i: &[usize]| -> f64 {
        match super::field::sort_sign(i) {
            None => 0.0,
            Some((s, sign)) => {
                let k = idx[d].iter().position(|c| *c == s).expect("index");
                sign as f64 * rho[d][k]
            }
        }
    };
    let mut worst: f64 = 0.0;
    for kxi in 0..n {
        for d in 0..=n {
            for out in &idx[d] {
                // (ξ ∧ ρ) component in degree d
                let mut v = 0.0;
                if d >= 1 {
                    if let Some(pos) = out.iter().position(|&q| q == kxi) {
                        let rest: Vec<usize> = out.iter().filter(|&&q| q != kxi).cloned().collect();
                        let s = if pos % 2 == 0 { 1.0 } else { -1.0 };
                        v += s * coeff(d - 1, &rest);
                    }
                }
                // (ι_X ρ) component in degree d, X^j = π^{kj}
                if d < n {
                    for j in 0..n {
                        let xj = pi[(kxi, j)];
                        if xj == 0.0 {
                            continue;
                        }
                        let mut full = vec![j];
                        full.extend_from_slice(out);
                        v += xj * coeff(d + 1, &full);
                    }
                }
                worst = worst.max(v.abs());
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn area_form_gives_standard_bivector() {
        let w = FormField::basis(2, &[0, 1]);
        let pi = Spinor::exp(&w).to_poisson();
        assert!(pi.get(&[0, 1]).is_one());
    }

    #[test]
    fn inverse_matches_annihilator_oracle() {
        // Oracle: the Clifford annihilator of exp(w) for a random nondegenerate w.
        let x = |i| Expr::var(i);
        let w = FormField::from_entries(
            4,
            2,
            vec![
                (vec![0, 1], Expr::one() + x(2) * x(2)),
                (vec![0, 2], x(3)),
                (vec![1, 3], Expr::frac(1, 3)),
                (vec![2, 3], Expr::int(2) + x(0)),
                (vec![1, 2], x(1)),
            ],
        );
        let rho = Spinor::exp(&w);
        let pi = rho.to_poisson();
        for p in [[0.1, 0.2, 0.3, 0.4], [-0.5, 0.3, 1.2, -0.7]] {
            let r = annihilator_residual(&rho.eval_parts(&p), &pi.compile().matrix(&p));
            assert!(r < 1e-12, "{r}");
            let m = w.eval_dense(&p);
            let mut om = DMatrix::zeros(4, 4);
            for (k, ij) in combinations(4, 2).iter().enumerate() {
                om[(ij[0], ij[1])] = m[k];
                om[(ij[1], ij[0])] = -m[k];
            }
            let want = -om.try_inverse().unwrap();
            assert!((pi.compile().matrix(&p) - want).amax() < 1e-12);
        }
    }

    #[test]
    fn cosymplectic_limit_spinor() {
        // e^{dθ1∧dθ2} ∧ dt ∧ ds on (θ1, θ2, s, t)
        let s = Spinor::exp(&FormField::basis(4, &[0, 1]));
        let rho = s.wedge(&Spinor::from_form(FormField::basis(4, &[3, 2]))).unwrap();
        let pi = rho.to_poisson();
        let m = pi.compile().matrix(&[0.0; 4]);
        assert_eq!(m[(0, 1)], 1.0);
        assert_eq!(pi.entries().count(), 1);
        assert_eq!(rho.certified_rank_at(&[0.0; 4]), Some(2));
    }
}
