use std::collections::HashMap;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Expr, Node, Rational};

/// One node of the serialized DAG. Children refer to earlier nodes by index.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct JsonNode {
    op: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    args: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exp: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    breakpoint: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct JsonDag {
    nodes: Vec<JsonNode>,
    root: usize,
}

fn encode(e: &Expr, nodes: &mut Vec<JsonNode>, seen: &mut HashMap<usize, usize>) -> usize {
    if let Some(&i) = seen.get(&e.id()) {
        return i;
    }
    let args: Vec<usize> = e.children().into_iter().map(|c| encode(c, nodes, seen)).collect();
    let mut n = JsonNode {
        op: String::new(),
        args,
        value: None,
        index: None,
        exp: None,
        breakpoint: None,
    };
    n.op = match e.node() {
        Node::Const(c) => {
            n.value = Some(c.to_string());
            "const"
        }
        Node::Var(i) => {
            n.index = Some(*i);
            "var"
        }
        Node::Add(_) => "add",
        Node::Mul(_) => "mul",
        Node::Div(..) => "div",
        Node::Pow(_, k) => {
            n.exp = Some(*k);
            "pow"
        }
        Node::Exp(_) => "exp",
        Node::Ln(_) => "ln",
        Node::Sqrt(_) => "sqrt",
        Node::FlatExp1(_) => "flat_exp1",
        Node::FlatExp2(_) => "flat_exp2",
        Node::Piecewise { breakpoint, .. } => {
            n.breakpoint = Some(*breakpoint);
            "piecewise"
        }
    }
    .to_string();
    nodes.push(n);
    let i = nodes.len() - 1;
    seen.insert(e.id(), i);
    i
}

fn decode_nodes(nodes: &[JsonNode]) -> Result<Vec<Expr>, String> {
    let mut built: Vec<Expr> = Vec::with_capacity(nodes.len());
    for (k, n) in nodes.iter().enumerate() {
        let arg = |j: usize| -> Result<Expr, String> {
            let idx = *n.args.get(j).ok_or_else(|| format!("node {k}: missing argument {j}"))?;
            built
                .get(idx)
                .cloned()
                .ok_or_else(|| format!("node {k}: forward reference {idx}"))
        };
        let all = || -> Result<Vec<Expr>, String> { (0..n.args.len()).map(arg).collect() };
        let node = match n.op.as_str() {
            "const" => {
                let v = n.value.as_deref().ok_or_else(|| format!("node {k}: const without value"))?;
                Node::Const(Rational::from_str(v).map_err(|e| format!("node {k}: {e}"))?)
            }
            "var" => Node::Var(n.index.ok_or_else(|| format!("node {k}: var without index"))?),
            "add" => Node::Add(all()?),
            "mul" => Node::Mul(all()?),
            "div" => Node::Div(arg(0)?, arg(1)?),
            "pow" => Node::Pow(arg(0)?, n.exp.ok_or_else(|| format!("node {k}: pow without exp"))?),
            "exp" => Node::Exp(arg(0)?),
            "ln" => Node::Ln(arg(0)?),
            "sqrt" => Node::Sqrt(arg(0)?),
            "flat_exp1" => Node::FlatExp1(arg(0)?),
            "flat_exp2" => Node::FlatExp2(arg(0)?),
            "piecewise" => Node::Piecewise {
                arg: arg(0)?,
                breakpoint: n
                    .breakpoint
                    .ok_or_else(|| format!("node {k}: piecewise without breakpoint"))?,
                left: arg(1)?,
                right: arg(2)?,
            },
            other => return Err(format!("node {k}: unknown op {other:?}")),
        };
        built.push(Expr::raw(node));
    }
    Ok(built)
}

fn decode(dag: &JsonDag) -> Result<Expr, String> {
    decode_nodes(&dag.nodes)?
        .get(dag.root)
        .cloned()
        .ok_or_else(|| format!("root {} out of range", dag.root))
}

/// Several expressions serialized over one shared node table.
#[derive(Debug, Clone)]
pub struct ExprBundle(pub Vec<Expr>);

#[derive(Serialize, Deserialize)]
struct JsonBundle {
    nodes: Vec<JsonNode>,
    roots: Vec<usize>,
}

impl Serialize for ExprBundle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut nodes = Vec::new();
        let mut seen = HashMap::new();
        let roots = self.0.iter().map(|e| encode(e, &mut nodes, &mut seen)).collect();
        JsonBundle { nodes, roots }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExprBundle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<ExprBundle, D::Error> {
        let b = JsonBundle::deserialize(d)?;
        let built = decode_nodes(&b.nodes).map_err(serde::de::Error::custom)?;
        b.roots
            .iter()
            .map(|&r| built.get(r).cloned().ok_or_else(|| format!("root {r} out of range")))
            .collect::<Result<Vec<_>, _>>()
            .map(ExprBundle)
            .map_err(serde::de::Error::custom)
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut nodes = Vec::new();
        let root = encode(self, &mut nodes, &mut HashMap::new());
        JsonDag { nodes, root }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Expr, D::Error> {
        let dag = JsonDag::deserialize(d)?;
        decode(&dag).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_structure_and_sharing() {
        let t = Expr::var(0);
        let shared = (&t * Expr::frac(1, 3)).flat_exp1();
        let e = Expr::piecewise(&t, 0.25, &shared + &shared.powi(2), Expr::real(0.1).exp());
        let s = serde_json::to_string(&e).unwrap();
        let back: Expr = serde_json::from_str(&s).unwrap();
        assert!(back.structurally_eq(&e));
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
        let dag: JsonDag = serde_json::from_str(&s).unwrap();
        assert_eq!(dag.nodes.iter().filter(|n| n.op == "flat_exp1").count(), 1);
    }

    #[test]
    fn bundle_shares_nodes() {
        let t = Expr::var(0);
        let shared = t.flat_exp1();
        let b = ExprBundle(vec![&shared + Expr::one(), shared.powi(2)]);
        let s = serde_json::to_string(&b).unwrap();
        assert_eq!(s.matches("flat_exp1").count(), 1);
        let back: ExprBundle = serde_json::from_str(&s).unwrap();
        assert!(back.0[1].structurally_eq(&b.0[1]));
    }

    #[test]
    fn malformed_input_is_rejected() {
        let bad = r#"{"nodes":[{"op":"exp","args":[3]}],"root":0}"#;
        assert!(serde_json::from_str::<Expr>(bad).is_err());
        let bad = r#"{"nodes":[{"op":"frobnicate"}],"root":0}"#;
        assert!(serde_json::from_str::<Expr>(bad).is_err());
    }
}
