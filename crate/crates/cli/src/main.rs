use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use poisson_compact::boundary::{contact_ball, cosymplectic};
use poisson_compact::constructors::{
    constant_rank, lie_linear, poly_from_monomials, CollarBivector, CollarComponent, LieAlgebraData, LieAlgebraJson,
    Monomial, PolyEntry, PolyPoisson, PolyPoissonJson,
};
use poisson_compact::exterior::MultivectorField;
use poisson_compact::patchwork::TriangulationData;
use poisson_compact::taper::Regime;
use poisson_compact::verify::table;
use poisson_compact_cli::artifact::{parse_json, write_json, Artifact};
use poisson_compact_cli::export::{export, Field, Format};
use poisson_compact_cli::gallery::{self, Config};
use poisson_compact_cli::suite::{self, Suite};
use poisson_compact_cli::construct;
use serde::Deserialize;

#[derive(Parser)]
#[command(name = "poisson-compact", version, about = "Compactly supported Poisson structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Defaults to double for `extension` and single otherwise.
    #[arg(long, value_enum)]
    taper_regime: Option<RegimeArg>,
    #[arg(long, default_value_t = 0.1)]
    taper_delta: f64,
    #[arg(long, num_args = 2, value_names = ["A", "B"], default_values_t = [1.0, 2.0])]
    bump: Vec<f64>,
    /// Number of grid samples (per axis for `export`).
    #[arg(long, default_value_t = 2000)]
    grid: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

impl Common {
    fn config(&self) -> Config {
        Config {
            regime: self.taper_regime.map(Into::into),
            delta: self.taper_delta,
            bump: (self.bump[0], self.bump[1]),
            seed: self.seed,
            grid: self.grid,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    Single,
    Double,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Regime {
        match r {
            RegimeArg::Single => Regime::Single,
            RegimeArg::Double => Regime::Double,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Ball,
    LieAlgebra,
    ConstantRank,
    Product,
    Collar,
    Patchwork,
    Extension,
    FirstJet,
}

#[derive(Subcommand)]
enum Command {
    /// Build a structure and write it as an artifact.
    Construct {
        #[arg(value_enum)]
        kind: Kind,
        /// Input JSON; `product` takes two.
        #[arg(long)]
        input: Vec<PathBuf>,
        /// Ambient dimension for `constant-rank`.
        #[arg(long)]
        dim: Option<usize>,
        /// Half-rank for `constant-rank`.
        #[arg(long)]
        rank: Option<usize>,
        /// Boundary model for `extension` when no input is given.
        #[arg(long)]
        model: Option<String>,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run checks on an artifact; exit 1 when any fails.
    Verify {
        artifact: PathBuf,
        #[arg(long)]
        all: bool,
        #[arg(long)]
        jacobi: bool,
        #[arg(long)]
        support: bool,
        #[arg(long)]
        finite: bool,
        #[arg(long)]
        certificate: bool,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate fields of an artifact on a lattice over its domain.
    Export {
        artifact: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "components")]
        fields: Vec<Field>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build and verify every gallery entry.
    Gallery {
        #[command(flatten)]
        common: Common,
        /// Report JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory receiving one artifact per entry.
        #[arg(long)]
        artifacts: Option<PathBuf>,
    },
}

/// Failure classes mapped to exit codes.
enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_json(&text, path)
}

fn one_input(input: &[PathBuf]) -> Result<&Path> {
    match input {
        [p] => Ok(p),
        _ => bail!("expected exactly one --input, got {}", input.len()),
    }
}

#[derive(Deserialize)]
struct CollarComponentJson {
    lambda: f64,
    #[serde(default)]
    v: Vec<Vec<Monomial>>,
    #[serde(default)]
    w: Vec<PolyEntry>,
}

/// Collar bivector: `v` lists the boundary components of `V`, `w` the
/// 1-based entries of `W`.
#[derive(Deserialize)]
struct CollarJson {
    boundary_dim: usize,
    components: Vec<CollarComponentJson>,
}

fn collar_from_json(j: &CollarJson) -> Result<CollarBivector> {
    let m = j.boundary_dim;
    let mut comps = Vec::new();
    for (k, c) in j.components.iter().enumerate() {
        let v = if c.v.is_empty() {
            MultivectorField::zero(m, 1)
        } else {
            anyhow::ensure!(c.v.len() == m, "components[{k}].v: expected {m} entries, got {}", c.v.len());
            MultivectorField::vector(c.v.iter().map(|t| poly_from_monomials(m, t)).collect::<Result<_, _>>()?)
        };
        let w = PolyPoissonJson { dim: m, entries: c.w.clone() }.to_field()?;
        comps.push(CollarComponent { lambda: c.lambda, v, w });
    }
    Ok(CollarBivector::new(m, comps)?)
}

#[derive(Deserialize)]
struct FirstJetJson {
    bivector: PolyPoissonJson,
    center: Vec<f64>,
}

#[derive(Deserialize)]
struct ModelJson {
    model: String,
}

fn build(kind: Kind, input: &[PathBuf], dim: Option<usize>, rank: Option<usize>, model: Option<String>, cfg: &Config) -> Result<Artifact> {
    let prov = |k: &str| cfg.provenance(k);
    Ok(match kind {
        Kind::Ball => {
            let p = PolyPoisson::from_json(&read(one_input(input)?)?)?;
            construct::ball(&prov("ball"), &p)?
        }
        Kind::LieAlgebra => {
            let j: LieAlgebraJson = read(one_input(input)?)?;
            construct::ball(&prov("lie-algebra"), &lie_linear(&LieAlgebraData::from_json(&j)?)?)?
        }
        Kind::ConstantRank => {
            let (n, r) = (dim.context("--dim is required")?, rank.context("--rank is required")?);
            construct::ball(&prov("constant-rank"), &constant_rank(n, r)?)?
        }
        Kind::Product => {
            let [a, b] = input else { bail!("product expects two --input files, got {}", input.len()) };
            let a = PolyPoisson::from_json(&read(a)?)?;
            let b = PolyPoisson::from_json(&read(b)?)?;
            construct::product_of(&prov("product"), &a, &b)?
        }
        Kind::Collar => {
            let j: CollarJson = read(one_input(input)?)?;
            construct::collar(&prov("collar"), &collar_from_json(&j)?)?
        }
        Kind::Patchwork => {
            let tri: TriangulationData = read(one_input(input)?)?;
            construct::patchwork(&prov("patchwork"), &tri, cfg.grid.max(1))?
        }
        Kind::Extension => {
            let name = match (model, input) {
                (Some(m), []) => m,
                (None, [p]) => read::<ModelJson>(p)?.model,
                _ => bail!("extension expects either --model or one --input"),
            };
            let model = match name.as_str() {
                "contact-ball" => contact_ball(),
                "cosymplectic" => cosymplectic(),
                other => bail!("unknown boundary model {other:?}; expected contact-ball or cosymplectic"),
            };
            construct::extension(&prov("extension"), &model)?
        }
        Kind::FirstJet => {
            let j: FirstJetJson = read(one_input(input)?)?;
            construct::first_jet(&prov("first-jet"), &j.bivector.to_field()?, &j.center)?
        }
    })
}

fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Construct { kind, input, dim, rank, model, common, out } => {
            let art = build(kind, &input, dim, rank, model, &common.config())?;
            art.write(&out)?;
            let pass = art.certificate.iter().all(|c| c.pass);
            if !art.certificate.is_empty() {
                print!("{}", table(&art.certificate));
            }
            Ok(if pass { Outcome::Pass } else { Outcome::Fail })
        }
        Command::Verify { artifact, all, jacobi, support, finite, certificate, common, out } => {
            let art = Artifact::read(&artifact)?;
            let none = !(jacobi || support || finite || certificate);
            let suite = if all || none {
                Suite::ALL
            } else {
                Suite { jacobi, support, finite, certificate }
            };
            let rep = suite::run(&art, suite, common.grid, common.seed)?;
            print!("{}", table(&rep.checks));
            println!("ranks {:?}", rep.rank_histogram);
            if let Some(out) = out {
                write_json(&rep, &out)?;
            }
            Ok(if rep.pass { Outcome::Pass } else { Outcome::Fail })
        }
        Command::Export { artifact, fields, format, common, out } => {
            let art = Artifact::read(&artifact)?;
            let text = export(&art, &fields, format, common.grid)?;
            std::fs::write(&out, text).with_context(|| format!("writing {}", out.display()))?;
            Ok(Outcome::Pass)
        }
        Command::Gallery { common, out, artifacts } => {
            let cfg = common.config();
            let mut reports = Vec::new();
            if let Some(dir) = &artifacts {
                std::fs::create_dir_all(dir)?;
            }
            for e in gallery::entries() {
                let (art, rep) = gallery::run_entry(&e, &cfg).with_context(|| format!("gallery entry {}", e.name))?;
                println!("{:<26} {}", rep.name, if rep.pass { "PASS" } else { "FAIL" });
                if let Some(dir) = &artifacts {
                    art.write(&dir.join(format!("{}.json", e.name)))?;
                }
                reports.push(rep);
            }
            if let Some(out) = out {
                write_json(&reports, &out)?;
            }
            Ok(if reports.iter().all(|r| r.pass) { Outcome::Pass } else { Outcome::Fail })
        }
    }
}
