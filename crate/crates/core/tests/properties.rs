use poisson_compact::exterior::{FormField, MultivectorField};
use poisson_compact::symexpr::Expr;
use poisson_compact::taper::{FlatTaper, Regime};
use proptest::prelude::*;

fn poly3(c: &[i64]) -> Expr {
    let x = |i| Expr::var(i);
    Expr::add(vec![
        Expr::int(c[0]),
        Expr::int(c[1]) * x(0),
        Expr::int(c[2]) * x(1) * x(2),
        Expr::int(c[3]) * x(2).powi(2),
    ])
}

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, 4)
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn swapped_indices_flip_sign(i in 0usize..4, j in 0usize..4, c in coeffs(), p in point()) {
        prop_assume!(i != j);
        let mut b = MultivectorField::zero(4, 2);
        b.set(&[i, j], poly3(&c));
        let q = [p[0], p[1], p[2], 0.5];
        let a = b.get(&[i, j]).eval(&q).unwrap();
        let r = b.get(&[j, i]).eval(&q).unwrap();
        prop_assert!((a + r).abs() < 1e-12);
    }

    #[test]
    fn d_squared_vanishes(a in coeffs(), b in coeffs(), c in coeffs(), p in point()) {
        let w = FormField::from_entries(3, 1, vec![(vec![0], poly3(&a)), (vec![1], poly3(&b)), (vec![2], poly3(&c))]);
        let dd = w.d().d();
        prop_assert!(dd.eval_dense(&p).iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn bivector_bracket_is_symmetric(a in coeffs(), b in coeffs(), p in point()) {
        let u = MultivectorField::from_entries(3, 2, vec![(vec![0, 1], poly3(&a)), (vec![1, 2], Expr::var(0))]);
        let v = MultivectorField::from_entries(3, 2, vec![(vec![0, 2], poly3(&b))]);
        let uv = u.schouten(&v).unwrap().eval_dense(&p);
        let vu = v.schouten(&u).unwrap().eval_dense(&p);
        for (x, y) in uv.iter().zip(&vu) {
            prop_assert!((x - y).abs() < 1e-10 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn json_round_trip_preserves_values(c in coeffs(), p in point()) {
        let e = Expr::piecewise(&Expr::var(0), 0.1, poly3(&c), poly3(&c).exp());
        let back: Expr = serde_json::from_str(&serde_json::to_string(&e).unwrap()).unwrap();
        prop_assert_eq!(back.eval(&p).unwrap(), e.eval(&p).unwrap());
    }

    #[test]
    fn taper_is_increasing(delta in 0.01f64..=0.2, t in 0.0f64..0.8) {
        let taper = FlatTaper::new(Regime::Single, delta).unwrap();
        let fp = taper.fp(&Expr::var(0)).eval(&[t]).unwrap();
        prop_assert!(fp > 0.0);
    }
}
