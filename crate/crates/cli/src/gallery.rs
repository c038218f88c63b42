//! Named examples, one per corollary, with the rank profile each must show.

use std::collections::BTreeMap;

use anyhow::Result;
use poisson_compact::boundary::{contact_ball, cosymplectic};
use poisson_compact::patchwork::TriangulationData;
use poisson_compact::taper::Regime;
use serde::{Deserialize, Serialize};

use crate::artifact::{Artifact, Provenance};
use crate::suite::{self, Suite};
use crate::{construct, seeds};

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Overrides the per-kind default regime.
    pub regime: Option<Regime>,
    pub delta: f64,
    pub bump: (f64, f64),
    pub seed: u64,
    pub grid: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            regime: None,
            delta: 0.1,
            bump: (1.0, 2.0),
            seed: 7,
            grid: 2000,
        }
    }
}

/// The extension pipeline needs the double regime; every other kind is
/// numerically better conditioned in the single one.
pub fn default_regime(kind: &str) -> Regime {
    if kind == "extension" {
        Regime::Double
    } else {
        Regime::Single
    }
}

impl Config {
    pub fn provenance(&self, kind: &str) -> Provenance {
        Provenance {
            kind: kind.to_string(),
            regime: self.regime.unwrap_or(default_regime(kind)),
            delta: self.delta,
            bump: self.bump,
            seed: self.seed,
        }
    }
}

pub struct GalleryEntry {
    pub name: &'static str,
    pub statement: &'static str,
    pub build: fn(&Config) -> Result<Artifact>,
    /// Ranks the grid may show; the largest must occur.
    pub ranks: &'static [usize],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryReport {
    pub name: String,
    pub statement: String,
    pub expected_ranks: Vec<usize>,
    pub rank_histogram: BTreeMap<usize, usize>,
    pub checks: Vec<poisson_compact::verify::VerificationReport>,
    pub pass: bool,
}

pub fn entries() -> Vec<GalleryEntry> {
    vec![
        GalleryEntry {
            name: "ball-symplectic-r2",
            statement: "symplectic on the open unit disk, equal to dx^dy on B_1/2, zero outside B_1",
            build: |c| construct::ball(&c.provenance("ball"), &seeds::symplectic_r2()),
            ranks: &[0, 2],
        },
        GalleryEntry {
            name: "ball-rank2-r4",
            statement: "constant rank 2 on the open unit ball in R^4",
            build: |c| construct::ball(&c.provenance("constant-rank"), &seeds::rank2_r4()),
            ranks: &[0, 2],
        },
        GalleryEntry {
            name: "ball-so3",
            statement: "so(3) structure on B_1/2, vanishing outside B_1",
            build: |c| construct::ball(&c.provenance("lie-algebra"), &seeds::so3()),
            ranks: &[0, 2],
        },
        GalleryEntry {
            name: "ball-heisenberg",
            statement: "Heisenberg structure on B_1/2, vanishing outside B_1",
            build: |c| construct::ball(&c.provenance("lie-algebra"), &seeds::heisenberg()),
            ranks: &[0, 2],
        },
        GalleryEntry {
            name: "ball-affine",
            statement: "affine algebra plus a constant term, compactly supported in B_1",
            build: |c| construct::ball(&c.provenance("ball"), &seeds::affine_plus_constant()),
            ranks: &[0, 2],
        },
        GalleryEntry {
            name: "ball-quadratic",
            statement: "log-canonical quadratic structure cut off by the Casimir bump",
            build: |c| construct::ball(&c.provenance("ball"), &seeds::quadratic_r3()),
            ranks: &[0, 2],
        },
        GalleryEntry {
            name: "product-r2-r3",
            statement: "product of the disk and so(3) ball structures",
            build: |c| construct::product_of(&c.provenance("product"), &seeds::symplectic_r2(), &seeds::so3()),
            ranks: &[0, 2, 4],
        },
        GalleryEntry {
            name: "collar-torus",
            statement: "collar structure on T^2 x [0, inf) vanishing for t >= 2",
            build: |c| construct::collar(&c.provenance("collar"), &seeds::torus_collar()),
            ranks: &[0, 2],
        },
        GalleryEntry {
            name: "patchwork-square-1-0",
            statement: "rank 2 inside one triangle, zero on the other and on the diagonal",
            build: |c| construct::patchwork(&c.provenance("patchwork"), &TriangulationData::square([1, 0]), 200),
            ranks: &[0, 2],
        },
        GalleryEntry {
            name: "patchwork-square-1-1",
            statement: "symplectic in both triangles, vanishing on the diagonal",
            build: |c| construct::patchwork(&c.provenance("patchwork"), &TriangulationData::square([1, 1]), 200),
            ranks: &[0, 2],
        },
        GalleryEntry {
            name: "extension-contact-ball",
            statement: "symplectic on M and the collar t < 1, zero for t >= 1",
            build: |c| construct::extension(&c.provenance("extension"), &contact_ball()),
            ranks: &[0, 2, 4],
        },
        GalleryEntry {
            name: "extension-cosymplectic",
            statement: "symplectic for t < 1, rank 2 leaves on [1, 2), zero for t >= 2",
            build: |c| construct::extension(&c.provenance("extension"), &cosymplectic()),
            ranks: &[0, 2, 4],
        },
        GalleryEntry {
            name: "first-jet-r2",
            statement: "compactly supported structure with the first jet of 1 + x^2 + y^3 at (0.2, 0.1)",
            build: |c| construct::first_jet(&c.provenance("first-jet"), &seeds::cubic_r2(), &[0.2, 0.1]),
            ranks: &[0, 2],
        },
    ]
}

pub fn run_entry(e: &GalleryEntry, cfg: &Config) -> Result<(Artifact, EntryReport)> {
    let art = (e.build)(cfg)?;
    let rep = suite::run(&art, Suite::ALL, cfg.grid, cfg.seed)?;
    let seen_ok = rep.rank_histogram.keys().all(|r| e.ranks.contains(r));
    let top = e.ranks.iter().max().is_some_and(|r| rep.rank_histogram.contains_key(r));
    Ok((
        art,
        EntryReport {
            name: e.name.to_string(),
            statement: e.statement.to_string(),
            expected_ranks: e.ranks.to_vec(),
            rank_histogram: rep.rank_histogram,
            checks: rep.checks,
            pass: rep.pass && seen_ok && top,
        },
    ))
}

pub fn run(cfg: &Config) -> Result<Vec<EntryReport>> {
    entries().iter().map(|e| run_entry(e, cfg).map(|(_, r)| r)).collect()
}
