use super::ConstructError;
use crate::exterior::MultivectorField;
use crate::patch::Region;
use crate::symexpr::Expr;
use crate::taper::{make_separating_bumps, TaperError};

/// A compactly supported bivector with its declared support and an open
/// region strictly containing it.
#[derive(Debug, Clone)]
pub struct ProductInput {
    pub bivector: MultivectorField,
    pub support: Region,
    pub enclosure: Region,
}

/// `Π = χ_2(y) π_1(x) + χ_1(x) π_2(y)` on `R^{n_1 + n_2}`, where `χ_i` is 1 on
/// the support of `π_i` and 0 outside its enclosure.
pub fn product(a: &ProductInput, b: &ProductInput) -> Result<MultivectorField, ConstructError> {
    let (n1, n2) = (a.bivector.dim, b.bivector.dim);
    let xs: Vec<Expr> = (0..n1).map(Expr::var).collect();
    let ys: Vec<Expr> = (n1..n1 + n2).map(Expr::var).collect();
    let chi1 = make_separating_bumps(&a.support, &a.enclosure, &xs).map_err(enclosure)?;
    let chi2 = make_separating_bumps(&b.support, &b.enclosure, &ys).map_err(enclosure)?;
    let p1 = a.bivector.reindex(n1 + n2, &(0..n1).collect::<Vec<_>>());
    let p2 = b
        .bivector
        .substitute(&ys)
        .reindex(n1 + n2, &(n1..n1 + n2).collect::<Vec<_>>());
    Ok(p1.scale(&chi2).add(&p2.scale(&chi1))?)
}

fn enclosure(e: TaperError) -> ConstructError {
    match e {
        TaperError::NotNested => ConstructError::Enclosure,
        other => ConstructError::Taper(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_factor_leaves_scaled_first_factor() {
        let a = ProductInput {
            bivector: MultivectorField::basis(2, &[0, 1]),
            support: Region::Ball { radius: 1.0 },
            enclosure: Region::Ball { radius: 2.0 },
        };
        let b = ProductInput {
            bivector: MultivectorField::zero(1, 2),
            support: Region::Ball { radius: 1.0 },
            enclosure: Region::Ball { radius: 2.0 },
        };
        let p = product(&a, &b).unwrap();
        assert_eq!(p.entries().count(), 1);
        assert_eq!(p.get(&[0, 1]).eval(&[5.0, 5.0, 0.5]).unwrap(), 1.0);
        assert_eq!(p.get(&[0, 1]).eval(&[0.0, 0.0, 2.5]).unwrap(), 0.0);
    }

    #[test]
    fn second_factor_reads_its_own_coordinates() {
        let a = ProductInput {
            bivector: MultivectorField::basis(2, &[0, 1]),
            support: Region::Ball { radius: 1.0 },
            enclosure: Region::Ball { radius: 2.0 },
        };
        let mut lin = MultivectorField::zero(2, 2);
        lin.set(&[0, 1], Expr::var(0));
        let b = ProductInput {
            bivector: lin,
            support: Region::Ball { radius: 1.0 },
            enclosure: Region::Ball { radius: 2.0 },
        };
        let p = product(&a, &b).unwrap();
        assert_eq!(p.get(&[2, 3]).eval(&[0.1, 0.2, 0.5, 0.3]).unwrap(), 0.5);
    }

    #[test]
    fn enclosure_must_contain_support() {
        let a = ProductInput {
            bivector: MultivectorField::basis(2, &[0, 1]),
            support: Region::Ball { radius: 2.0 },
            enclosure: Region::Ball { radius: 1.0 },
        };
        assert_eq!(product(&a, &a.clone()).unwrap_err(), ConstructError::Enclosure);
    }
}
