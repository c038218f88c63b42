use std::path::Path;

use anyhow::{Context, Result};
use poisson_compact::exterior::MultivectorField;
use poisson_compact::patch::Region;
use poisson_compact::symexpr::ExprBundle;
use poisson_compact::taper::{CasimirBump, FlatTaper, Regime};
use poisson_compact::verify::VerificationReport;
use serde::{Deserialize, Serialize};

/// Settings a construction was run with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub kind: String,
    pub regime: Regime,
    pub delta: f64,
    pub bump: (f64, f64),
    pub seed: u64,
}

impl Provenance {
    pub fn taper(&self) -> Result<FlatTaper> {
        Ok(FlatTaper::new(self.regime, self.delta)?)
    }

    pub fn bump(&self) -> Result<CasimirBump> {
        Ok(CasimirBump::new(self.bump.0, self.bump.1)?)
    }
}

/// Bivector coefficients over one shared expression table; `pairs` are
/// 1-based `(i, j)` with `i < j`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BivectorJson {
    pub dim: usize,
    pub pairs: Vec<(usize, usize)>,
    pub coefficients: ExprBundle,
}

impl BivectorJson {
    pub fn from_field(pi: &MultivectorField) -> BivectorJson {
        let (pairs, exprs) = pi.entries().map(|(ij, e)| ((ij[0] + 1, ij[1] + 1), e.clone())).unzip();
        BivectorJson {
            dim: pi.dim,
            pairs,
            coefficients: ExprBundle(exprs),
        }
    }

    pub fn to_field(&self) -> Result<MultivectorField> {
        anyhow::ensure!(
            self.pairs.len() == self.coefficients.0.len(),
            "bivector: {} pairs but {} coefficients",
            self.pairs.len(),
            self.coefficients.0.len()
        );
        let mut pi = MultivectorField::zero(self.dim, 2);
        for (k, (&(i, j), e)) in self.pairs.iter().zip(&self.coefficients.0).enumerate() {
            anyhow::ensure!(
                i >= 1 && j >= 1 && i <= self.dim && j <= self.dim && i != j,
                "bivector.pairs[{k}]: ({i}, {j}) is not a pair of distinct indices in 1..={}",
                self.dim
            );
            pi.set(&[i - 1, j - 1], e.clone());
        }
        Ok(pi)
    }
}

/// Output file of `construct`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Artifact {
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Region>,
    /// Region the verification grid is drawn from.
    pub domain: Region,
    pub bivector: BivectorJson,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub certificate: Vec<VerificationReport>,
}

impl Artifact {
    pub fn read(path: &Path) -> Result<Artifact> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        parse_json(&text, path)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(self, path)
    }
}

/// Parses JSON, reporting line, column and field path on schema errors.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str, path: &Path) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.inner();
        anyhow::anyhow!(
            "{}:{}:{}: field `{}`: {}",
            path.display(),
            inner.line(),
            inner.column(),
            e.path(),
            inner
        )
    })
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use poisson_compact::symexpr::Expr;

    #[test]
    fn bivector_json_round_trips_with_one_based_pairs() {
        let mut pi = MultivectorField::zero(3, 2);
        let shared = Expr::var(1).exp();
        pi.set(&[0, 2], shared.clone());
        pi.set(&[1, 2], &shared * Expr::int(3));
        let j = BivectorJson::from_field(&pi);
        assert_eq!(j.pairs, vec![(1, 3), (2, 3)]);
        let text = serde_json::to_string(&j).unwrap();
        assert_eq!(text.matches("\"exp\"").count(), 1);
        let back: BivectorJson = serde_json::from_str(&text).unwrap();
        let p = [0.1, 0.2, 0.3];
        assert_eq!(back.to_field().unwrap().eval_dense(&p), pi.eval_dense(&p));
    }

    #[test]
    fn out_of_range_pairs_are_rejected() {
        let mut j = BivectorJson::from_field(&MultivectorField::basis(2, &[0, 1]));
        j.pairs[0] = (1, 3);
        assert!(j.to_field().is_err());
    }
}
