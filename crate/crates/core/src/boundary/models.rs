use std::sync::Arc;

use nalgebra::DMatrix;

use super::BoundaryData;
use crate::exterior::{ExplicitMap, FormField};
use crate::patch::Region;
use crate::symexpr::Expr;
use crate::verify::GridSpec;

/// Boundary data of a concrete collar together with its sample region.
#[derive(Debug, Clone)]
pub struct BoundaryModel {
    pub name: &'static str,
    pub data: BoundaryData,
    pub region: Region,
}

impl BoundaryModel {
    pub fn samples(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        GridSpec::random(self.region.clone(), count, seed).points(self.data.dim())
    }
}

/// Graph chart `y ↦ (y, √(1-|y|²))` of the upper unit 3-sphere in `R^4`.
fn sphere_chart() -> ExplicitMap {
    let y: Vec<Expr> = (0..3).map(Expr::var).collect();
    let r2 = Expr::add(y.iter().map(|v| v.powi(2)).collect());
    let mut comps = y.clone();
    comps.push((Expr::one() - r2).sqrt());
    ExplicitMap::new(3, comps)
}

/// Unit 4-ball with `ω = dx1∧dx2 + dx3∧dx4` and the radial Liouville field:
/// on the boundary `σ = ω|`, `γ = ι_X ω|`, a contact form.
pub fn contact_ball() -> BoundaryModel {
    let x: Vec<Expr> = (0..4).map(Expr::var).collect();
    let mut omega = FormField::zero(4, 2);
    omega.set(&[0, 1], Expr::one());
    omega.set(&[2, 3], Expr::one());
    let half = Expr::frac(1, 2);
    let mut lambda = FormField::zero(4, 1);
    lambda.set(&[0], -(&half * &x[1]));
    lambda.set(&[1], &half * &x[0]);
    lambda.set(&[2], -(&half * &x[3]));
    lambda.set(&[3], &half * &x[2]);
    let chart = sphere_chart();
    let sigma = chart.pullback_form(&omega).expect("chart lands in R^4");
    let gamma = chart.pullback_form(&lambda).expect("chart lands in R^4");
    let j_std = DMatrix::from_row_slice(4, 4, &[0., -1., 0., 0., 1., 0., 0., 0., 0., 0., 0., -1., 0., 0., 1., 0.]);
    let j0 = Arc::new(move |p: &[f64]| {
        let d = chart.jacobian_at(p);
        let dt = d.transpose();
        let pinv = (&dt * &d).try_inverse().expect("chart is an immersion") * dt;
        pinv * &j_std * d
    });
    BoundaryModel {
        name: "contact-ball",
        data: BoundaryData::new(sigma, gamma, Some(j0)).expect("odd boundary"),
        region: Region::Ball { radius: 0.8 },
    }
}

/// `[0,1] × S¹ × T²` with `ω = ds∧dθ + dθ₁∧dθ₂` and `X = ∂s`: on the boundary
/// `σ = dθ₁∧dθ₂` and `γ = dθ`, in coordinates `(θ, θ₁, θ₂)`.
pub fn cosymplectic() -> BoundaryModel {
    let sigma = FormField::basis(3, &[1, 2]);
    let gamma = FormField::basis(3, &[0]);
    let j = DMatrix::from_row_slice(3, 3, &[0., 0., 0., 0., 0., -1., 0., 1., 0.]);
    let j0 = Arc::new(move |_: &[f64]| j.clone());
    let tau = 2.0 * std::f64::consts::PI;
    BoundaryModel {
        name: "cosymplectic",
        data: BoundaryData::new(sigma, gamma, Some(j0)).expect("odd boundary"),
        region: Region::Box {
            bounds: vec![(0.0, tau); 3],
        },
    }
}

#[cfg(test)]
mod tests {
    use super::super::{check_pseudoconvex, symplectic_extension_form};
    use super::*;

    #[test]
    fn models_are_convex() {
        for model in [contact_ball(), cosymplectic()] {
            let pts = model.samples(50, 1);
            let r = check_pseudoconvex(&model.data, &pts).unwrap();
            assert!(r.pass() && r.taming == Some(true), "{}: {r}", model.name);
        }
        let r = check_pseudoconvex(&contact_ball().data, &contact_ball().samples(10, 2)).unwrap();
        assert_eq!(r.k, 1);
        assert_eq!(check_pseudoconvex(&cosymplectic().data, &cosymplectic().samples(10, 2)).unwrap().k, 0);
    }

    #[test]
    fn extension_form_is_nondegenerate() {
        let model = contact_ball();
        let pts: Vec<Vec<f64>> = model
            .samples(40, 3)
            .into_iter()
            .enumerate()
            .map(|(i, mut p)| {
                p.push(i as f64 / 4.0);
                p
            })
            .collect();
        let (_, report) = symplectic_extension_form(&model.data, &pts).unwrap();
        assert!(report.pass, "{report}");
    }
}
