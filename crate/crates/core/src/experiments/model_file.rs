//! JSON model files.
//!
//! Two forms share a `kind` tag:
//!
//! * `"network"`: a weighted undirected graph. Node `i` has dynamics
//!   `x_i ← (1 − Σ_j α_ij) x_i + Σ_j α_ij x_j` and, by default, its own
//!   actuator `B(i) = e_i`. `q`, `q_terminal`, `r`, `w`, `w_init` are scalars
//!   multiplying the identity.
//! * `"generic"`: explicit matrices. Any per-stage field may be a single
//!   matrix (broadcast over the horizon) or a list of `horizon` matrices.
//!
//! Nodes and actuators are numbered from 1 in files.

use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, SymMatrix};
use crate::lqg::{ModelParts, Schedule, SystemModel};

type Rows = Vec<Vec<f64>>;

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum PerStage<X> {
    One(X),
    Many(Vec<X>),
}

impl<X: Clone> PerStage<X> {
    fn expand(&self, horizon: usize, path: &str) -> Result<Vec<X>> {
        match self {
            PerStage::One(x) => Ok(vec![x.clone(); horizon]),
            PerStage::Many(v) if v.len() == horizon => Ok(v.clone()),
            PerStage::Many(v) => Err(Error::model(
                path,
                format!("expected one value or {horizon} stages, got {}", v.len()),
            )),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub horizon: usize,
    #[serde(default = "one_group")]
    pub group_size: PerStage<usize>,
    pub nodes: usize,
    pub edges: Vec<Edge>,
    /// Nodes carrying an actuator; defaults to every node.
    #[serde(default)]
    pub actuators: Option<Vec<usize>>,
    pub q: f64,
    pub q_terminal: f64,
    pub r: f64,
    pub w: f64,
    pub w_init: f64,
    /// One cost per actuator, or a single cost for all.
    #[serde(default)]
    pub costs: Option<PerStage<f64>>,
}

fn one_group() -> PerStage<usize> {
    PerStage::One(1)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenericSpec {
    pub horizon: usize,
    #[serde(default = "one_group")]
    pub group_size: PerStage<usize>,
    pub a: PerStage<Rows>,
    #[serde(default)]
    pub a_terminal: Option<Rows>,
    /// Per actuator.
    pub b: Vec<PerStage<Rows>>,
    pub q: PerStage<Rows>,
    pub q_terminal: Rows,
    /// Per actuator.
    pub r: Vec<PerStage<Rows>>,
    pub w_init: Rows,
    pub w: PerStage<Rows>,
    /// Per actuator, each a single cost or one per stage. Defaults to zero.
    #[serde(default)]
    pub costs: Option<Vec<PerStage<f64>>>,
}

fn matrix(rows: &Rows, path: &str) -> Result<Matrix<f64>> {
    Matrix::from_rows(rows).map_err(|e| Error::model(path, e.to_string()))
}

fn symmetric(rows: &Rows, path: &str) -> Result<SymMatrix<f64>> {
    SymMatrix::from_rows(rows).map_err(|e| Error::model(path, e.to_string()))
}

fn scalar_identity(n: usize, s: f64, path: &str) -> Result<SymMatrix<f64>> {
    if !s.is_finite() {
        return Err(Error::model(path, "must be finite"));
    }
    Ok(SymMatrix::scaled_identity(n, s))
}

impl NetworkSpec {
    /// `A[i][j] = α_ij`, `A[i][i] = 1 − Σ_{j≠i} α_ij`.
    pub fn dynamics(&self) -> Result<Matrix<f64>> {
        let n = self.nodes;
        if n == 0 {
            return Err(Error::model("nodes", "network needs at least one node"));
        }
        let mut a = Matrix::zeros(n, n);
        for (k, e) in self.edges.iter().enumerate() {
            if !(e.weight >= 0.0) || !e.weight.is_finite() {
                return Err(Error::model(
                    format!("edges[{k}].weight"),
                    format!("link weight must be finite and non-negative, got {}", e.weight),
                ));
            }
            for (field, v) in [("from", e.from), ("to", e.to)] {
                if v == 0 || v > n {
                    return Err(Error::model(
                        format!("edges[{k}].{field}"),
                        format!("node {v} out of range 1..={n}"),
                    ));
                }
            }
            if e.from == e.to {
                return Err(Error::model(format!("edges[{k}]"), "self-loop"));
            }
            let (i, j) = (e.from - 1, e.to - 1);
            if a[(i, j)] != 0.0 {
                return Err(Error::model(format!("edges[{k}]"), "duplicate link"));
            }
            a[(i, j)] = e.weight;
            a[(j, i)] = e.weight;
        }
        for i in 0..n {
            let out: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)]).sum();
            if out > 1.0 + 1e-12 {
                return Err(Error::model(
                    "edges",
                    format!("link weights at node {} sum to {out}, above 1", i + 1),
                ));
            }
            a[(i, i)] = 1.0 - out;
        }
        Ok(a)
    }

    pub fn to_parts(&self) -> Result<ModelParts<f64>> {
        let n = self.nodes;
        let h = self.horizon;
        let a = self.dynamics()?;
        let actuators = self.actuators.clone().unwrap_or_else(|| (1..=n).collect());
        for (k, &node) in actuators.iter().enumerate() {
            if node == 0 || node > n {
                return Err(Error::model(
                    format!("actuators[{k}]"),
                    format!("node {node} out of range 1..={n}"),
                ));
            }
        }
        let na = actuators.len();
        let costs = match &self.costs {
            None => vec![0.0; na],
            Some(c) => c.expand(na, "costs")?,
        };
        let b = actuators
            .iter()
            .map(|&node| {
                let mut col = vec![0.0; n];
                col[node - 1] = 1.0;
                vec![Matrix::column(&col); h]
            })
            .collect();
        let r = vec![vec![scalar_identity(1, self.r, "r")?; h]; na];
        Ok(ModelParts {
            a: vec![a; h],
            a_terminal: None,
            b,
            q: vec![scalar_identity(n, self.q, "q")?; h],
            q_terminal: scalar_identity(n, self.q_terminal, "q_terminal")?,
            r,
            w_init: scalar_identity(n, self.w_init, "w_init")?,
            w: vec![scalar_identity(n, self.w, "w")?; h],
            costs: costs.into_iter().map(|c| vec![c; h]).collect(),
            group_size: self.group_size.expand(h, "group_size")?,
        })
    }
}

impl GenericSpec {
    pub fn to_parts(&self) -> Result<ModelParts<f64>> {
        let h = self.horizon;
        let per_stage_matrices = |v: &PerStage<Rows>, path: &str| -> Result<Vec<Matrix<f64>>> {
            v.expand(h, path)?
                .iter()
                .enumerate()
                .map(|(t, m)| matrix(m, &format!("{path}[{t}]")))
                .collect()
        };
        let per_stage_sym = |v: &PerStage<Rows>, path: &str| -> Result<Vec<SymMatrix<f64>>> {
            v.expand(h, path)?
                .iter()
                .enumerate()
                .map(|(t, m)| symmetric(m, &format!("{path}[{t}]")))
                .collect()
        };
        let na = self.b.len();
        let costs = match &self.costs {
            None => vec![vec![0.0; h]; na],
            Some(c) => c
                .iter()
                .enumerate()
                .map(|(j, cj)| cj.expand(h, &format!("costs[{j}]")))
                .collect::<Result<_>>()?,
        };
        Ok(ModelParts {
            a: per_stage_matrices(&self.a, "a")?,
            a_terminal: self
                .a_terminal
                .as_ref()
                .map(|m| matrix(m, "a_terminal"))
                .transpose()?,
            b: self
                .b
                .iter()
                .enumerate()
                .map(|(j, bj)| per_stage_matrices(bj, &format!("b[{j}]")))
                .collect::<Result<_>>()?,
            q: per_stage_sym(&self.q, "q")?,
            q_terminal: symmetric(&self.q_terminal, "q_terminal")?,
            r: self
                .r
                .iter()
                .enumerate()
                .map(|(j, rj)| per_stage_sym(rj, &format!("r[{j}]")))
                .collect::<Result<_>>()?,
            w_init: symmetric(&self.w_init, "w_init")?,
            w: per_stage_sym(&self.w, "w")?,
            costs,
            group_size: self.group_size.expand(h, "group_size")?,
        })
    }
}

#[derive(Clone, Debug)]
pub enum ModelSpec {
    Network(NetworkSpec),
    Generic(GenericSpec),
}

fn typed<T: for<'de> Deserialize<'de>>(value: Value, origin: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| Error::Parse {
        path: format!("{origin}: {}", e.path()),
        message: e.into_inner().to_string(),
    })
}

impl ModelSpec {
    /// `origin` names the source in error messages.
    pub fn from_json_str(text: &str, origin: &str) -> Result<Self> {
        let mut value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_string(),
            message: e.to_string(),
        })?;
        let kind = value
            .as_object_mut()
            .ok_or_else(|| Error::Parse {
                path: origin.to_string(),
                message: "model must be a JSON object".into(),
            })?
            .remove("kind");
        match kind.as_ref().and_then(Value::as_str) {
            Some("network") => Ok(ModelSpec::Network(typed(value, origin)?)),
            Some("generic") => Ok(ModelSpec::Generic(typed(value, origin)?)),
            other => Err(Error::Parse {
                path: format!("{origin}: kind"),
                message: format!(
                    "expected \"network\" or \"generic\", got {}",
                    other.map_or("nothing".to_string(), |s| format!("{s:?}"))
                ),
            }),
        }
    }

    pub fn build(&self) -> Result<SystemModel<f64>> {
        let parts = match self {
            ModelSpec::Network(n) => n.to_parts()?,
            ModelSpec::Generic(g) => g.to_parts()?,
        };
        SystemModel::new(parts)
    }
}

pub fn parse_model(text: &str, origin: &str) -> Result<SystemModel<f64>> {
    ModelSpec::from_json_str(text, origin)?.build()
}

pub fn load_model(path: impl AsRef<Path>) -> Result<SystemModel<f64>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_model(&text, &path.display().to_string())
}

/// Schedule file: a JSON array of per-stage arrays of 1-based actuator indices.
pub fn parse_schedule(text: &str, origin: &str) -> Result<Schedule> {
    let mut de = serde_json::Deserializer::from_str(text);
    let stages: Vec<Vec<usize>> = serde_path_to_error::deserialize(&mut de).map_err(|e| Error::Parse {
        path: format!("{origin}: {}", e.path()),
        message: e.into_inner().to_string(),
    })?;
    Schedule::from_one_based(stages)
}

pub fn load_schedule(path: impl AsRef<Path>) -> Result<Schedule> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_schedule(&text, &path.display().to_string())
}

/// The six-node network bundled with the crate.
pub const SECTION5_JSON: &str = include_str!("../../data/section5.json");

pub fn section5_model() -> SystemModel<f64> {
    parse_model(SECTION5_JSON, "section5.json").expect("bundled model is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn network(edges: &str) -> String {
        format!(
            r#"{{"kind": "network", "horizon": 2, "nodes": 3, "edges": {edges},
                "q": 1, "q_terminal": 1, "r": 1, "w": 1, "w_init": 1}}"#
        )
    }

    #[test]
    fn bundled_model_diagonals() {
        let m = section5_model();
        assert_eq!((m.state_dim(), m.num_actuators(), m.horizon()), (6, 6, 30));
        assert!((m.a(0)[(0, 0)] - 0.3).abs() < 1e-15);
        assert!((m.a(0)[(1, 1)] - 0.7).abs() < 1e-15);
        assert_eq!(m.cost(0, 5), 2.0);
    }

    #[test]
    fn empty_network_is_identity() {
        let m = parse_model(&network("[]"), "t").unwrap();
        assert_eq!(m.a(0), &Matrix::identity(3));
    }

    #[test]
    fn negative_weight_names_the_edge() {
        let text = network(r#"[{"from": 1, "to": 2, "weight": 0.1}, {"from": 2, "to": 3, "weight": -0.1}]"#);
        match parse_model(&text, "t") {
            Err(Error::InvalidModel { path, .. }) => assert_eq!(path, "edges[1].weight"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn schema_errors_carry_the_json_path() {
        let text = network(r#"[{"from": 1, "to": 2, "weight": "heavy"}]"#);
        match parse_model(&text, "t") {
            Err(Error::Parse { path, .. }) => assert_eq!(path, "t: edges[0].weight"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_model(r#"{"kind": "ring"}"#, "t"), Err(Error::Parse { .. })));
    }

    #[test]
    fn overweight_node_rejected() {
        let text = network(r#"[{"from": 1, "to": 2, "weight": 0.6}, {"from": 1, "to": 3, "weight": 0.6}]"#);
        assert!(matches!(parse_model(&text, "t"), Err(Error::InvalidModel { .. })));
    }

    #[test]
    fn generic_broadcasts_and_lists() {
        let text = r#"{"kind": "generic", "horizon": 2,
            "a": [[[1.0]], [[0.5]]], "b": [[[1.0]]], "q": [[1.0]], "q_terminal": [[2.0]],
            "r": [[[1.0]]], "w_init": [[1.0]], "w": [[0.5]], "costs": [0.25]}"#;
        let m = parse_model(text, "t").unwrap();
        assert_eq!(m.a(1)[(0, 0)], 0.5);
        assert_eq!(m.cost(1, 0), 0.25);
        assert_eq!(m.q_terminal().get(0, 0), 2.0);
    }

    #[test]
    fn generic_stage_count_is_checked() {
        let text = r#"{"kind": "generic", "horizon": 3,
            "a": [[[1.0]], [[0.5]]], "b": [[[1.0]]], "q": [[1.0]], "q_terminal": [[2.0]],
            "r": [[[1.0]]], "w_init": [[1.0]], "w": [[0.5]]}"#;
        match parse_model(text, "t") {
            Err(Error::InvalidModel { path, .. }) => assert_eq!(path, "a"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
