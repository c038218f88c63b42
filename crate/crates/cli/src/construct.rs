//! Construction kinds behind `construct` and the gallery.

use std::f64::consts::TAU;

use anyhow::Result;
use poisson_compact::boundary::{poisson_extension, BoundaryModel};
use poisson_compact::constructors::{
    ball_support, collar_extend, first_jet_extension, product, CollarBivector, PolyPoisson, ProductInput,
};
use poisson_compact::exterior::MultivectorField;
use poisson_compact::patch::Region;
use poisson_compact::patchwork::{assemble_patchwork, TriangulationData};
use poisson_compact::verify::VerificationReport;

use crate::artifact::{Artifact, BivectorJson, Provenance};

pub const BALL_DOMAIN: f64 = 1.2;
pub const PRODUCT_ENCLOSURE: f64 = 1.25;
pub const COLLAR_T0: f64 = -0.1;
pub const COLLAR_T1: f64 = 2.5;
/// Boundary samples handed to the extension certificate.
pub const EXTENSION_SAMPLES: usize = 40;

fn artifact(prov: &Provenance, pi: &MultivectorField, support: Option<Region>, domain: Region) -> Artifact {
    Artifact {
        provenance: prov.clone(),
        support,
        domain,
        bivector: BivectorJson::from_field(pi),
        certificate: Vec::new(),
    }
}

pub fn ball(prov: &Provenance, seed: &PolyPoisson) -> Result<Artifact> {
    let out = ball_support(seed, &prov.taper()?, &prov.bump()?)?;
    Ok(artifact(prov, &out.bivector, Some(out.support), Region::Ball { radius: BALL_DOMAIN }))
}

/// Ball-supported structures on both factors, combined by the product rule.
pub fn product_of(prov: &Provenance, a: &PolyPoisson, b: &PolyPoisson) -> Result<Artifact> {
    let (taper, bump) = (prov.taper()?, prov.bump()?);
    let input = |p: &PolyPoisson| -> Result<ProductInput> {
        let out = ball_support(p, &taper, &bump)?;
        Ok(ProductInput {
            bivector: out.bivector,
            support: out.support,
            enclosure: Region::Ball { radius: PRODUCT_ENCLOSURE },
        })
    };
    let pi = product(&input(a)?, &input(b)?)?;
    let n = pi.dim;
    let domain = Region::Box {
        bounds: vec![(-PRODUCT_ENCLOSURE - 0.1, PRODUCT_ENCLOSURE + 0.1); n],
    };
    Ok(artifact(prov, &pi, None, domain))
}

fn torus_box(m: usize) -> Vec<(f64, f64)> {
    vec![(0.0, TAU); m]
}

pub fn collar(prov: &Provenance, cb: &CollarBivector) -> Result<Artifact> {
    let pi = collar_extend(cb, &prov.taper()?, &prov.bump()?)?;
    let m = cb.boundary_dim;
    let support = Region::Collar { boundary: torus_box(m), t0: COLLAR_T0, t1: prov.bump.1 };
    let domain = Region::Collar { boundary: torus_box(m), t0: COLLAR_T0, t1: COLLAR_T1 };
    Ok(artifact(prov, &pi, Some(support), domain))
}

/// Conformance samples are drawn per simplex; `samples` of them each.
pub fn patchwork(prov: &Provenance, tri: &TriangulationData, samples: usize) -> Result<Artifact> {
    let (pw, report) = assemble_patchwork(tri, &prov.taper()?, &prov.bump()?, samples, prov.seed)?;
    let n = tri.dim();
    let bounds = (0..n)
        .map(|k| {
            let lo = tri.vertices.iter().map(|v| v[k]).fold(f64::INFINITY, f64::min);
            let hi = tri.vertices.iter().map(|v| v[k]).fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        })
        .collect();
    let mut a = artifact(prov, &pw.global(), None, Region::Box { bounds });
    let worst = report.faces.iter().map(|f| f.continuity_worst).fold(0.0, f64::max);
    a.certificate.push(
        VerificationReport::new("patchwork-conformance", report.pass, worst, None)
            .with_detail(format!("{} simplices, {} shared faces", report.simplices.len(), report.faces.len())),
    );
    Ok(a)
}

pub fn extension(prov: &Provenance, model: &BoundaryModel) -> Result<Artifact> {
    let samples = model.samples(EXTENSION_SAMPLES, prov.seed);
    let ext = poisson_extension(&model.data, &prov.taper()?, &prov.bump()?, &samples)?;
    let boundary = match &model.region {
        Region::Box { bounds } => bounds.clone(),
        Region::Ball { radius } => vec![(-radius / 2.0, radius / 2.0); model.data.dim()],
        other => anyhow::bail!("unsupported boundary region {other:?}"),
    };
    let support = Region::Collar { boundary: boundary.clone(), t0: COLLAR_T0, t1: prov.bump.1 };
    let domain = Region::Collar { boundary, t0: COLLAR_T0, t1: COLLAR_T1 };
    let mut a = artifact(prov, &ext.bivector, Some(support), domain);
    a.certificate = ext.certificate.checks;
    Ok(a)
}

pub fn first_jet(prov: &Provenance, p: &MultivectorField, center: &[f64]) -> Result<Artifact> {
    let pi = first_jet_extension(p, center, &prov.taper()?, &prov.bump()?)?;
    Ok(artifact(prov, &pi, None, Region::Ball { radius: 1.5 }))
}
