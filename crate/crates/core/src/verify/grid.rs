use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::patch::Region;

/// Upper collar bound used when a collar region is open-ended.
pub const T_MAX: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Sampling {
    Lattice { per_axis: usize },
    Random { count: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub region: Region,
    pub sampling: Sampling,
}

impl GridSpec {
    pub fn random(region: Region, count: usize, seed: u64) -> GridSpec {
        GridSpec {
            region,
            sampling: Sampling::Random { count, seed },
        }
    }

    pub fn lattice(region: Region, per_axis: usize) -> GridSpec {
        GridSpec {
            region,
            sampling: Sampling::Lattice { per_axis },
        }
    }

    /// Sample points in `R^dim`. Identical specs give identical points.
    pub fn points(&self, dim: usize) -> Vec<Vec<f64>> {
        match &self.sampling {
            Sampling::Lattice { per_axis } => lattice(&self.region, dim, *per_axis),
            Sampling::Random { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..*count).map(|_| random_point(&self.region, dim, &mut rng)).collect()
            }
        }
    }
}

fn boxes(region: &Region, dim: usize) -> Vec<(f64, f64)> {
    match region {
        Region::Box { bounds } => bounds.clone(),
        Region::Ball { radius } => vec![(-radius, *radius); dim],
        Region::Annulus { outer, .. } => vec![(-outer, *outer); dim],
        Region::Simplex => simplex_box(dim),
        Region::Collar { boundary, t0, t1 } => {
            let mut b = boundary.clone();
            b.push((*t0, if t1.is_finite() { *t1 } else { T_MAX }));
            b
        }
    }
}

fn simplex_box(dim: usize) -> Vec<(f64, f64)> {
    let v = crate::patchwork::pyramid_vertices(dim);
    (0..dim)
        .map(|k| {
            let lo = v.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
            let hi = v.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        })
        .collect()
}

/// Whether `p` lies in the closed region.
pub fn contains(region: &Region, p: &[f64]) -> bool {
    let r2: f64 = p.iter().map(|x| x * x).sum();
    match region {
        Region::Box { bounds } => p.iter().zip(bounds).all(|(x, (a, b))| a <= x && x <= b),
        Region::Ball { radius } => r2 <= radius * radius,
        Region::Annulus { inner, outer } => inner * inner <= r2 && r2 <= outer * outer,
        Region::Simplex => crate::patchwork::in_pyramid_simplex(p, 0.0),
        Region::Collar { boundary, t0, t1 } => {
            let (x, t) = p.split_at(p.len() - 1);
            x.iter().zip(boundary).all(|(x, (a, b))| a <= x && x <= b) && *t0 <= t[0] && t[0] <= *t1
        }
    }
}

fn lattice(region: &Region, dim: usize, per_axis: usize) -> Vec<Vec<f64>> {
    let b = boxes(region, dim);
    let k = per_axis.max(1);
    let total = k.pow(dim as u32);
    let mut out = Vec::new();
    for mut code in 0..total {
        let mut p = Vec::with_capacity(dim);
        for (lo, hi) in &b {
            let i = code % k;
            code /= k;
            let s = if k == 1 { 0.5 } else { i as f64 / (k - 1) as f64 };
            p.push(lo + s * (hi - lo));
        }
        if contains(region, &p) {
            out.push(p);
        }
    }
    out
}

fn random_point(region: &Region, dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match region {
        Region::Ball { radius } => {
            let dir = unit(dim, rng);
            let r = radius * rng.gen::<f64>().powf(1.0 / dim as f64);
            dir.iter().map(|d| d * r).collect()
        }
        Region::Annulus { inner, outer } => {
            let dir = unit(dim, rng);
            let r = rng.gen_range(*inner..*outer);
            dir.iter().map(|d| d * r).collect()
        }
        Region::Simplex => {
            let v = crate::patchwork::pyramid_vertices(dim);
            let w: Vec<f64> = (0..v.len()).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
            let s: f64 = w.iter().sum();
            (0..dim)
                .map(|k| v.iter().zip(&w).map(|(p, wi)| p[k] * wi / s).sum())
                .collect()
        }
        _ => boxes(region, dim)
            .iter()
            .map(|(a, b)| rng.gen_range(*a..=*b))
            .collect(),
    }
}

fn unit(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_samples_repeat_and_stay_inside() {
        let g = GridSpec::random(Region::Ball { radius: 1.2 }, 500, 7);
        let a = g.points(3);
        assert_eq!(a, g.points(3));
        assert!(a.iter().all(|p| contains(&Region::Ball { radius: 1.2 }, p)));
        let l = GridSpec::lattice(Region::Box { bounds: vec![(0.0, 1.0); 2] }, 3).points(2);
        assert_eq!(l.len(), 9);
    }
}
