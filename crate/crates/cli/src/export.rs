//! Lattice export of components, rank and Jacobi residual.

use anyhow::Result;
use clap::ValueEnum;
use poisson_compact::par::Exec;
use poisson_compact::verify::{BivectorTape, GridSpec};
use serde::Serialize;

use crate::artifact::Artifact;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Field {
    Components,
    Rank,
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Serialize)]
struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

/// Rows in lattice order over the artifact domain, `per_axis` samples per axis.
pub fn table(a: &Artifact, fields: &[Field], per_axis: usize) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let pi = a.bivector.to_field()?;
    let n = pi.dim;
    let points = GridSpec::lattice(a.domain.clone(), per_axis).points(n);
    let mut columns: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    if fields.contains(&Field::Components) {
        columns.extend(pairs.iter().map(|(i, j)| format!("pi_{}_{}", i + 1, j + 1)));
    }
    if fields.contains(&Field::Rank) {
        columns.push("rank".into());
    }
    if fields.contains(&Field::Jacobi) {
        columns.push("jacobi".into());
    }
    let tape = BivectorTape::new(&pi);
    let rows = Exec::available().map(&points, |p| {
        let mut row = p.to_vec();
        if fields.contains(&Field::Components) {
            let m = tape.matrix(p);
            row.extend(pairs.iter().map(|&(i, j)| m[(i, j)]));
        }
        if fields.contains(&Field::Rank) {
            row.push(tape.rank_at(p) as f64);
        }
        if fields.contains(&Field::Jacobi) {
            row.push(tape.jacobi_at(p));
        }
        row
    });
    Ok((columns, rows))
}

pub fn export(a: &Artifact, fields: &[Field], format: Format, per_axis: usize) -> Result<String> {
    let (columns, rows) = table(a, fields, per_axis)?;
    Ok(match format {
        Format::Json => serde_json::to_string(&Table { columns, rows })? + "\n",
        Format::Csv => {
            let mut s = columns.join(",");
            s.push('\n');
            for r in rows {
                let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            s
        }
    })
}
