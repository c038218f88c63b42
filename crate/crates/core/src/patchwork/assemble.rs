use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{pyramid_vertices, simplex_structure};
use crate::constructors::{constant_rank, ConstructError, PolyPoisson};
use crate::exterior::{ExplicitMap, MultivectorField};
use crate::linalg::null_space;
use crate::par::Exec;
use crate::symexpr::{est_flat_order_fn, Expr, FlatProbe};
use crate::taper::{CasimirBump, FlatTaper};
use crate::verify::BivectorTape;

/// Interior samples stay this far (in barycentric terms) from every face.
pub const INTERIOR_MARGIN: f64 = 0.05;
/// Offset of the face-adjacent sample pairs.
pub const FACE_OFFSET: f64 = 1e-3;
pub const CONTINUITY_TOL: f64 = 1e-6;
/// Required flat order across shared faces.
pub const FACE_FLAT_ORDER: usize = 4;
/// Slack used when locating points on faces.
const LOCATE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PatchworkError {
    #[error("invalid triangulation: {0}")]
    Invalid(String),
    #[error("no simplex contains {0:?}")]
    Location(Vec<f64>),
    #[error(transparent)]
    Construct(#[from] ConstructError),
}

/// Simplices embedded in `R^n`, each with a target rank `2 r_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangulationData {
    pub vertices: Vec<Vec<f64>>,
    pub simplices: Vec<Vec<usize>>,
    pub ranks: Vec<usize>,
}

impl TriangulationData {
    pub fn dim(&self) -> usize {
        self.vertices.first().map_or(0, Vec::len)
    }

    /// The unit square `[0,1]^2` cut along its diagonal.
    pub fn square(ranks: [usize; 2]) -> TriangulationData {
        TriangulationData {
            vertices: vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]],
            simplices: vec![vec![0, 1, 2], vec![0, 2, 3]],
            ranks: ranks.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<(), PatchworkError> {
        let n = self.dim();
        let bad = |s: String| Err(PatchworkError::Invalid(s));
        if n == 0 || self.vertices.iter().any(|v| v.len() != n) {
            return bad("vertices must share a positive dimension".into());
        }
        if self.ranks.len() != self.simplices.len() {
            return bad(format!("{} ranks for {} simplices", self.ranks.len(), self.simplices.len()));
        }
        for (i, s) in self.simplices.iter().enumerate() {
            let distinct: BTreeSet<_> = s.iter().collect();
            if s.len() != n + 1 || distinct.len() != n + 1 || s.iter().any(|&v| v >= self.vertices.len()) {
                return bad(format!("simplex {i} needs {} distinct vertex indices", n + 1));
            }
            if 2 * self.ranks[i] > n {
                return bad(format!("simplex {i}: 2r = {} exceeds {n}", 2 * self.ranks[i]));
            }
            if self.edge_matrix(i).determinant().abs() < 1e-12 {
                return bad(format!("simplex {i} is degenerate"));
            }
        }
        let mut owners: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (i, s) in self.simplices.iter().enumerate() {
            for skip in 0..=n {
                let mut face: Vec<usize> = s.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &v)| v).collect();
                face.sort_unstable();
                owners.entry(face).or_default().push(i);
            }
        }
        for (face, who) in &owners {
            if who.len() > 2 {
                return bad(format!("face {face:?} is shared by {} simplices", who.len()));
            }
            if let [a, b] = who[..] {
                if self.overlap(a, b, face) {
                    return bad(format!("simplices {a} and {b} overlap across face {face:?}"));
                }
            }
        }
        Ok(())
    }

    fn opposite(&self, i: usize, face: &[usize]) -> usize {
        *self.simplices[i].iter().find(|v| !face.contains(v)).expect("simplex has a vertex off the face")
    }

    fn overlap(&self, a: usize, b: usize, face: &[usize]) -> bool {
        let lb = self.barycentric(a, &self.vertices[self.opposite(b, face)]);
        let k = self.simplices[a].iter().position(|&v| v == self.opposite(a, face)).expect("opposite vertex");
        lb[k] > 0.0
    }

    fn edge_matrix(&self, i: usize) -> DMatrix<f64> {
        let s = &self.simplices[i];
        let n = self.dim();
        let v0 = &self.vertices[s[0]];
        DMatrix::from_fn(n, n, |r, c| self.vertices[s[c + 1]][r] - v0[r])
    }

    /// Barycentric coordinates of `p` with respect to simplex `i`.
    pub fn barycentric(&self, i: usize, p: &[f64]) -> Vec<f64> {
        let s = &self.simplices[i];
        let v0 = &self.vertices[s[0]];
        let rhs = DVector::from_iterator(p.len(), p.iter().zip(v0).map(|(x, o)| x - o));
        let mu = self.edge_matrix(i).lu().solve(&rhs).expect("nondegenerate simplex");
        let mut l = vec![1.0 - mu.sum()];
        l.extend(mu.iter());
        l
    }

    /// Affine chart from simplex `i` to the pyramid simplex, vertex to vertex.
    pub fn chart(&self, i: usize) -> ExplicitMap {
        let n = self.dim();
        let s = &self.simplices[i];
        let p = pyramid_vertices(n);
        let q = DMatrix::from_fn(n, n, |r, c| p[c + 1][r] - p[0][r]);
        let m = q * self.edge_matrix(i).try_inverse().expect("nondegenerate simplex");
        let v0 = &self.vertices[s[0]];
        let comps = (0..n)
            .map(|r| {
                let mut terms: Vec<Expr> = (0..n).map(|c| Expr::real(m[(r, c)]) * (Expr::var(c) - Expr::real(v0[c]))).collect();
                terms.push(Expr::real(p[0][r]));
                Expr::add(terms)
            })
            .collect();
        ExplicitMap::new(n, comps)
    }

    /// Pairs of simplices sharing an `(n-1)`-face, with the face's vertices.
    pub fn shared_faces(&self) -> Vec<(usize, usize, Vec<usize>)> {
        let mut out = Vec::new();
        for a in 0..self.simplices.len() {
            for b in a + 1..self.simplices.len() {
                let face: Vec<usize> = self.simplices[a].iter().filter(|v| self.simplices[b].contains(v)).cloned().collect();
                if face.len() == self.dim() {
                    out.push((a, b, face));
                }
            }
        }
        out
    }
}

/// Per-simplex structures, each extended by zero outside its simplex.
#[derive(Debug, Clone)]
pub struct Patchwork {
    pub tri: TriangulationData,
    pub pieces: Vec<MultivectorField>,
    tapes: Vec<BivectorTape>,
}

impl Patchwork {
    pub fn new(tri: &TriangulationData, seeds: &[PolyPoisson], taper: &FlatTaper, bump: &CasimirBump) -> Result<Patchwork, PatchworkError> {
        tri.validate()?;
        if seeds.len() != tri.simplices.len() {
            return Err(PatchworkError::Invalid(format!("{} seeds for {} simplices", seeds.len(), tri.simplices.len())));
        }
        let pieces: Vec<Result<MultivectorField, PatchworkError>> = Exec::available().map_range(seeds.len(), |i| {
            let local = simplex_structure(&seeds[i], taper, bump)?;
            Ok(tri.chart(i).pullback_bivector(&local).map_err(ConstructError::from)?)
        });
        let pieces = pieces.into_iter().collect::<Result<Vec<_>, _>>()?;
        let tapes = pieces.iter().map(BivectorTape::new).collect();
        Ok(Patchwork {
            tri: tri.clone(),
            pieces,
            tapes,
        })
    }

    /// Lowest-index simplex containing `p`.
    pub fn locate(&self, p: &[f64]) -> Result<usize, PatchworkError> {
        (0..self.pieces.len())
            .find(|&i| self.tri.barycentric(i, p).iter().all(|&l| l >= -LOCATE_EPS))
            .ok_or_else(|| PatchworkError::Location(p.to_vec()))
    }

    pub fn eval(&self, p: &[f64]) -> Result<DMatrix<f64>, PatchworkError> {
        Ok(self.tapes[self.locate(p)?].matrix(p))
    }

    pub fn rank_at(&self, p: &[f64]) -> Result<usize, PatchworkError> {
        Ok(self.tapes[self.locate(p)?].rank_at(p))
    }

    /// Sum of all pieces: a single bivector on `R^n`, zero off the union.
    pub fn global(&self) -> MultivectorField {
        let n = self.tri.dim();
        self.pieces
            .iter()
            .fold(MultivectorField::zero(n, 2), |acc, p| acc.add(p).expect("same dimension"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexReport {
    pub index: usize,
    pub expected_rank: usize,
    pub rank_histogram: BTreeMap<usize, usize>,
    pub face_worst: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceReport {
    pub simplices: (usize, usize),
    pub continuity_worst: f64,
    pub min_flat_order: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformanceReport {
    pub simplices: Vec<SimplexReport>,
    pub faces: Vec<FaceReport>,
    pub pass: bool,
}

impl ConformanceReport {
    /// Indices of simplices that failed.
    pub fn failing(&self) -> Vec<usize> {
        self.simplices.iter().filter(|s| !s.pass).map(|s| s.index).collect()
    }
}

fn dirichlet(k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

fn combine(tri: &TriangulationData, verts: &[usize], weights: &[f64]) -> Vec<f64> {
    let n = tri.dim();
    (0..n)
        .map(|r| verts.iter().zip(weights).map(|(&v, w)| tri.vertices[v][r] * w).sum())
        .collect()
}

/// Rank, face and cross-face checks on seeded samples.
pub fn conformance(pw: &Patchwork, samples: usize, seed: u64) -> ConformanceReport {
    let tri = &pw.tri;
    let n = tri.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut simplices = Vec::new();
    for (i, s) in tri.simplices.iter().enumerate() {
        let mut interior = Vec::new();
        while interior.len() < samples {
            let w = dirichlet(n + 1, &mut rng);
            if w.iter().all(|&l| l >= INTERIOR_MARGIN) {
                interior.push(combine(tri, s, &w));
            }
        }
        let ranks = Exec::available().map(&interior, |p| pw.tapes[i].rank_at(p));
        let mut rank_histogram = BTreeMap::new();
        for r in &ranks {
            *rank_histogram.entry(*r).or_insert(0) += 1;
        }
        let mut face_pts = Vec::new();
        for k in 0..samples {
            let skip = k % (n + 1);
            let verts: Vec<usize> = s.iter().enumerate().filter(|(j, _)| *j != skip).map(|(_, &v)| v).collect();
            face_pts.push(combine(tri, &verts, &dirichlet(n, &mut rng)));
        }
        let face_worst = Exec::available()
            .map(&face_pts, |p| pw.tapes[i].matrix(p).abs().max())
            .into_iter()
            .fold(0.0, f64::max);
        let expected_rank = 2 * tri.ranks[i];
        simplices.push(SimplexReport {
            index: i,
            expected_rank,
            pass: ranks.iter().all(|&r| r == expected_rank) && face_worst == 0.0,
            rank_histogram,
            face_worst,
        });
    }

    let global = BivectorTape::new(&pw.global());
    let probe = FlatProbe::with_kmax(FACE_FLAT_ORDER + 1);
    let mut faces = Vec::new();
    for (a, b, face) in tri.shared_faces() {
        let normal = face_normal(tri, &face, tri.opposite(a, &face));
        let pts: Vec<Vec<f64>> = (0..samples).map(|_| combine(tri, &face, &dirichlet(n, &mut rng))).collect();
        let stats = Exec::available().map(&pts, |p| {
            let shift = |s: f64| -> Vec<f64> { p.iter().zip(normal.iter()).map(|(x, d)| x + s * d).collect() };
            let (pa, pb) = (shift(FACE_OFFSET), shift(-FACE_OFFSET));
            let gap = (pw.tapes[a].matrix(&pa) - pw.tapes[b].matrix(&pb)).abs().max();
            let mut order = usize::MAX;
            for i in 0..n {
                for j in i + 1..n {
                    let g = |s: f64| global.matrix(&shift(s))[(i, j)];
                    order = order.min(est_flat_order_fn(&g, 0.0, &probe).order);
                }
            }
            (gap, order)
        });
        let continuity_worst = stats.iter().map(|s| s.0).fold(0.0, f64::max);
        let min_flat_order = stats.iter().map(|s| s.1).min().unwrap_or(usize::MAX);
        faces.push(FaceReport {
            simplices: (a, b),
            continuity_worst,
            min_flat_order,
            pass: continuity_worst <= CONTINUITY_TOL && min_flat_order >= FACE_FLAT_ORDER,
        });
    }
    let pass = simplices.iter().all(|s| s.pass) && faces.iter().all(|f| f.pass);
    ConformanceReport { simplices, faces, pass }
}

/// Unit normal of a face, pointing toward `toward`.
fn face_normal(tri: &TriangulationData, face: &[usize], toward: usize) -> Vec<f64> {
    let n = tri.dim();
    let o = &tri.vertices[face[0]];
    let rows: Vec<f64> = face[1..]
        .iter()
        .flat_map(|&v| (0..n).map(move |r| tri.vertices[v][r] - o[r]))
        .collect();
    let nu = if n == 1 {
        DVector::from_element(1, 1.0)
    } else {
        null_space(&DMatrix::from_row_slice(n - 1, n, &rows), 1e-10)
            .into_iter()
            .next()
            .expect("face spans a hyperplane")
    };
    let dir: f64 = (0..n).map(|r| (tri.vertices[toward][r] - o[r]) * nu[r]).sum();
    nu.iter().map(|x| x * dir.signum()).collect()
}

/// Builds the constant-rank patchwork over `tri` and its conformance report.
pub fn assemble_patchwork(
    tri: &TriangulationData,
    taper: &FlatTaper,
    bump: &CasimirBump,
    samples: usize,
    seed: u64,
) -> Result<(Patchwork, ConformanceReport), PatchworkError> {
    tri.validate()?;
    let n = tri.dim();
    let seeds = tri.ranks.iter().map(|&r| constant_rank(n, r)).collect::<Result<Vec<_>, _>>()?;
    let pw = Patchwork::new(tri, &seeds, taper, bump)?;
    let report = conformance(&pw, samples, seed);
    Ok((pw, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taper::Regime;

    fn gadgets() -> (FlatTaper, CasimirBump) {
        (FlatTaper::new(Regime::Single, 0.1).unwrap(), CasimirBump::new(1.0, 2.0).unwrap())
    }

    #[test]
    fn split_square_conforms() {
        let (taper, bump) = gadgets();
        let (pw, report) = assemble_patchwork(&TriangulationData::square([1, 0]), &taper, &bump, 20, 3).unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(pw.rank_at(&[0.7, 0.2]).unwrap(), 2);
        assert_eq!(pw.rank_at(&[0.2, 0.7]).unwrap(), 0);
        assert_eq!(pw.rank_at(&[0.5, 0.5]).unwrap(), 0);
        assert!(matches!(pw.locate(&[2.0, 0.0]), Err(PatchworkError::Location(_))));
    }

    #[test]
    fn overlapping_simplices_are_rejected() {
        let mut tri = TriangulationData::square([1, 1]);
        tri.simplices[1] = vec![0, 2, 1];
        tri.vertices.push(vec![2.0, 0.0]);
        tri.simplices[1] = vec![0, 2, 4];
        assert!(matches!(tri.validate(), Err(PatchworkError::Invalid(_))));
    }
}
