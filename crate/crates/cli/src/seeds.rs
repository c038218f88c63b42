//! Input structures shared by the gallery, the construct command and the tests.

use poisson_compact::constructors::{constant_rank, lie_linear, CollarBivector, CollarComponent, LieAlgebraData, PolyPoisson};
use poisson_compact::exterior::MultivectorField;
use poisson_compact::symexpr::Expr;

pub fn symplectic_r2() -> PolyPoisson {
    constant_rank(2, 1).expect("rank fits")
}

pub fn rank2_r4() -> PolyPoisson {
    constant_rank(4, 1).expect("rank fits")
}

pub fn so3() -> PolyPoisson {
    lie_linear(&LieAlgebraData::so3()).expect("valid algebra")
}

pub fn heisenberg() -> PolyPoisson {
    lie_linear(&LieAlgebraData::heisenberg()).expect("valid algebra")
}

/// `[e1, e2] = e2` plus the constant `∂x1∧∂x2`.
pub fn affine_plus_constant() -> PolyPoisson {
    let lin = lie_linear(&LieAlgebraData::affine2()).expect("valid algebra");
    let e = lin.bivector.get(&[0, 1]) + Expr::one();
    let mut b = MultivectorField::zero(2, 2);
    b.set(&[0, 1], e);
    PolyPoisson::new(b).expect("every bivector on R^2 is Poisson")
}

/// Log-canonical `π^{ij} = x_i x_j` on `R^3`.
pub fn quadratic_r3() -> PolyPoisson {
    let x: Vec<Expr> = (0..3).map(Expr::var).collect();
    let mut b = MultivectorField::zero(3, 2);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        b.set(&[i, j], &x[i] * &x[j]);
    }
    PolyPoisson::new(b).expect("log-canonical structures are Poisson")
}

/// `π = z ∂y∧∂z + x ∂z∧∂x + y ∂x∧∂y`, which fails the Jacobi identity.
pub fn non_poisson_r3() -> MultivectorField {
    let mut b = MultivectorField::zero(3, 2);
    b.set(&[1, 2], Expr::var(2));
    b.set(&[0, 2], -Expr::var(0));
    b.set(&[0, 1], Expr::var(1));
    b
}

/// Polynomial structure on `R^2` used for the first-jet corollary.
pub fn cubic_r2() -> MultivectorField {
    let (x, y) = (Expr::var(0), Expr::var(1));
    let mut b = MultivectorField::zero(2, 2);
    b.set(&[0, 1], Expr::one() + x.powi(2) + y.powi(3));
    b
}

/// `∂θ1∧∂θ2 + e^{-t} ∂t∧∂θ1` on `T^2 × [0, ∞)`.
pub fn torus_collar() -> CollarBivector {
    CollarBivector::new(
        2,
        vec![
            CollarComponent {
                lambda: 0.0,
                v: MultivectorField::zero(2, 1),
                w: MultivectorField::basis(2, &[0, 1]),
            },
            CollarComponent {
                lambda: -1.0,
                v: MultivectorField::vector(vec![Expr::one(), Expr::zero()]),
                w: MultivectorField::zero(2, 2),
            },
        ],
    )
    .expect("dimensions match")
}
