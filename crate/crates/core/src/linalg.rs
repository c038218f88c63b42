use nalgebra::{DMatrix, DVector};

use crate::symexpr::LogNum;

/// Relative singular-value cutoff shared by every rank computation.
pub const RANK_REL_TOL: f64 = 1e-8;

/// Numerical rank with cutoff `RANK_REL_TOL * (sigma_max + 1)`.
pub fn rank(m: &DMatrix<f64>) -> usize {
    if m.iter().any(|v| !v.is_finite()) {
        return usize::MAX;
    }
    let sv = m.clone().singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let cut = RANK_REL_TOL * (smax + 1.0);
    sv.iter().filter(|&&s| s > cut).count()
}

/// Rank of a matrix given in log-magnitude form. Entries are divided by the
/// largest magnitude before the singular value decomposition, so structures
/// that are flat-small but nonzero keep their rank.
pub fn rank_log(entries: &[LogNum], n: usize) -> usize {
    let top = entries
        .iter()
        .filter(|e| !e.is_zero())
        .map(|e| e.ln)
        .fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return 0;
    }
    let m = DMatrix::from_fn(n, n, |i, j| {
        let e = entries[i * n + j];
        if e.is_zero() {
            0.0
        } else {
            e.sign as f64 * (e.ln - top).exp()
        }
    });
    rank(&m)
}

pub fn from_rows(n: usize, vals: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(n, vals.len() / n, vals)
}

/// Orthonormal basis of the null space of `m`, cut at `tol` relative to the
/// largest singular value.
pub fn null_space(m: &DMatrix<f64>, tol: f64) -> Vec<DVector<f64>> {
    let ncols = m.ncols();
    // Pad to a square matrix so the full right singular basis is available.
    let rows = m.nrows().max(ncols);
    let mut sq = DMatrix::zeros(rows, ncols);
    sq.view_mut((0, 0), (m.nrows(), ncols)).copy_from(m);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = tol * smax.max(1.0);
    (0..ncols)
        .filter(|&k| svd.singular_values[k] <= cut)
        .map(|k| vt.row(k).transpose())
        .collect()
}

/// Deterministic unit directions in `R^d`: equally spaced angles for `d = 2`,
/// a Fibonacci lattice for `d = 3`, and normalized quasi-random points
/// otherwise.
pub fn sphere_directions(d: usize, count: usize) -> Vec<DVector<f64>> {
    match d {
        0 => Vec::new(),
        1 => vec![DVector::from_element(1, 1.0), DVector::from_element(1, -1.0)],
        2 => (0..count)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
                DVector::from_vec(vec![a.cos(), a.sin()])
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let a = golden * i as f64;
                    DVector::from_vec(vec![r * a.cos(), r * a.sin(), z])
                })
                .collect()
        }
        _ => {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
            (0..count)
                .map(|_| {
                    let v = DVector::from_fn(d, |_, _| rng.gen_range(-1.0..1.0));
                    let n = v.norm();
                    v / n
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_standard_blocks() {
        let m = from_rows(4, &[0., 1., 0., 0., -1., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0.]);
        assert_eq!(rank(&m), 2);
        assert_eq!(rank(&DMatrix::zeros(3, 3)), 0);
    }

    #[test]
    fn log_rank_sees_tiny_structures() {
        let tiny = LogNum { sign: 1, ln: -5000.0 };
        let neg = LogNum { sign: -1, ln: -5000.0 };
        let z = LogNum::ZERO;
        assert_eq!(rank_log(&[z, tiny, neg, z], 2), 2);
        assert_eq!(rank_log(&[z, z, z, z], 2), 0);
    }

    #[test]
    fn null_space_of_a_row() {
        let m = from_rows(1, &[1.0, 0.0, 0.0]);
        let ns = null_space(&m, 1e-10);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(v[0].abs() < 1e-12);
        }
    }

    #[test]
    fn directions_are_unit() {
        for d in 1..6 {
            for v in sphere_directions(d, 50) {
                assert!((v.norm() - 1.0).abs() < 1e-12);
            }
        }
    }
}
