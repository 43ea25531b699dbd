//! The on-disk system description: one document describing a graph or
//! k-graph, a generating set with restriction words, and option defaults.
//! Two encodings of the same schema are accepted, JSON and TOML.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::action::{close_group, GeneratorSpec, Letter, Word};
use crate::graph::{Graph, GraphSpec, Multiplicity};
use crate::kgraph::{KGraphSkeleton, KGraphSpec, KSystem};
use crate::{Error, Result, SelfSimilarSystem};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    #[serde(default = "default_schema_version", rename = "schemaVersion")]
    pub schema_version: u32,
    #[serde(default = "default_rank")]
    pub rank: usize,
    pub vertices: Vec<String>,
    #[serde(default)]
    pub edges: Vec<EdgeSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factorizations: Vec<FactorizationSpec>,
    #[serde(default)]
    pub group: GroupSpec,
    #[serde(default)]
    pub options: Options,
}

fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

fn default_rank() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub name: String,
    pub range: String,
    pub source: String,
    /// 1-based color; only meaningful for rank ≥ 2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicity: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FactorizationSpec {
    pub left: [String; 2],
    pub right: [String; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    #[serde(default)]
    pub generators: Vec<GeneratorFileSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GeneratorFileSpec {
    pub name: String,
    #[serde(default, rename = "vertexPerm", skip_serializing_if = "BTreeMap::is_empty")]
    pub vertex_perm: BTreeMap<String, String>,
    #[serde(default, rename = "edgePerm", skip_serializing_if = "BTreeMap::is_empty")]
    pub edge_perm: BTreeMap<String, String>,
    /// Words in generator names; a trailing `'` marks the inverse. Edges not
    /// listed restrict to the identity.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub restrictions: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default = "default_cap", rename = "closureCap")]
    pub closure_cap: usize,
    #[serde(default = "default_per_box", rename = "perBox")]
    pub per_box: u32,
    #[serde(default = "default_oracle_depth", rename = "oracleDepth")]
    pub oracle_depth: usize,
    #[serde(default = "default_omega_window", rename = "omegaWindow")]
    pub omega_window: u32,
}

fn default_cap() -> usize {
    10_000
}
fn default_per_box() -> u32 {
    3
}
fn default_oracle_depth() -> usize {
    12
}
fn default_omega_window() -> u32 {
    3
}

impl Default for Options {
    fn default() -> Options {
        Options {
            closure_cap: default_cap(),
            per_box: default_per_box(),
            oracle_depth: default_oracle_depth(),
            omega_window: default_omega_window(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecFormat {
    Json,
    Toml,
}

impl SystemSpec {
    pub fn parse(text: &str, format: SpecFormat) -> Result<SystemSpec> {
        let spec: SystemSpec = match format {
            SpecFormat::Json => serde_json::from_str(text)
                .map_err(|e| Error::Schema(format!("json: {e}")))?,
            SpecFormat::Toml => {
                toml::from_str(text).map_err(|e| Error::Schema(format!("toml: {e}")))?
            }
        };
        if spec.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported schemaVersion {} (expected {})",
                spec.schema_version, SCHEMA_VERSION
            )));
        }
        if spec.rank == 0 {
            return Err(Error::Schema("rank must be at least 1".into()));
        }
        Ok(spec)
    }

    /// Canonical pretty JSON, stable across re-ingestion.
    pub fn canonical_json(&self) -> String {
        let mut spec = self.clone();
        spec.vertices.sort();
        spec.edges.sort_by(|a, b| a.name.cmp(&b.name));
        let mut s = serde_json::to_string_pretty(&spec).expect("serializable");
        s.push('\n');
        s
    }

    pub fn has_omega_edges(&self) -> bool {
        self.edges
            .iter()
            .any(|e| matches!(e.multiplicity.as_deref(), Some("omega")))
    }

    fn parse_multiplicity(m: Option<&str>, edge: &str) -> Result<Multiplicity> {
        match m {
            None | Some("one") => Ok(Multiplicity::One),
            Some("omega") => Ok(Multiplicity::Omega),
            Some(other) => Err(Error::Schema(format!(
                "edge `{edge}`: unknown multiplicity `{other}`"
            ))),
        }
    }

    pub fn to_graph_spec(&self) -> Result<GraphSpec> {
        if self.rank != 1 {
            return Err(Error::Schema(
                "rank-one operations need a rank 1 document".into(),
            ));
        }
        let mut edges = Vec::new();
        for e in &self.edges {
            edges.push((
                e.name.clone(),
                e.range.clone(),
                e.source.clone(),
                Self::parse_multiplicity(e.multiplicity.as_deref(), &e.name)?,
            ));
        }
        Ok(GraphSpec {
            vertices: self.vertices.clone(),
            edges,
        })
    }

    pub fn to_kgraph_spec(&self) -> Result<KGraphSpec> {
        let mut edges = Vec::new();
        for e in &self.edges {
            if matches!(e.multiplicity.as_deref(), Some("omega")) {
                return Err(Error::Schema(format!(
                    "edge `{}`: ω-edges are not supported in k-graphs",
                    e.name
                )));
            }
            let color = match (self.rank, e.color) {
                (1, None) => 0,
                (_, Some(c)) if c >= 1 && c <= self.rank => c - 1,
                (1, Some(1)) => 0,
                _ => {
                    return Err(Error::Schema(format!(
                        "edge `{}`: color must be in 1..={}",
                        e.name, self.rank
                    )))
                }
            };
            edges.push((e.name.clone(), color, e.range.clone(), e.source.clone()));
        }
        Ok(KGraphSpec {
            rank: self.rank,
            vertices: self.vertices.clone(),
            edges,
            factorizations: self
                .factorizations
                .iter()
                .map(|f| {
                    (
                        (f.left[0].clone(), f.left[1].clone()),
                        (f.right[0].clone(), f.right[1].clone()),
                    )
                })
                .collect(),
        })
    }

    fn parse_word(&self, word: &str, edge: &str) -> Result<Word> {
        let mut out = Vec::new();
        for token in word.split_whitespace() {
            let (name, inv) = match token.strip_suffix('\'') {
                Some(base) => (base, true),
                None => (token, false),
            };
            let gen = self
                .group
                .generators
                .iter()
                .position(|g| g.name == name)
                .ok_or_else(|| {
                    Error::Schema(format!(
                        "restriction at `{edge}` uses unknown generator `{name}`"
                    ))
                })?;
            out.push(Letter {
                gen: gen as u16,
                inv,
            });
        }
        Ok(out)
    }

    fn generator_specs<N, E>(&self, vertex_id: N, edge_id: E, n_vertices: usize, n_edges: usize) -> Result<Vec<GeneratorSpec>>
    where
        N: Fn(&str) -> Option<usize>,
        E: Fn(&str) -> Option<usize>,
    {
        let mut out = Vec::new();
        for g in &self.group.generators {
            let mut vperm: Vec<u32> = (0..n_vertices as u32).collect();
            for (a, b) in &g.vertex_perm {
                let ia = vertex_id(a)
                    .ok_or_else(|| Error::Schema(format!("unknown vertex `{a}` in vertexPerm")))?;
                let ib = vertex_id(b)
                    .ok_or_else(|| Error::Schema(format!("unknown vertex `{b}` in vertexPerm")))?;
                vperm[ia] = ib as u32;
            }
            let mut eperm: Vec<u32> = (0..n_edges as u32).collect();
            for (a, b) in &g.edge_perm {
                let ia = edge_id(a)
                    .ok_or_else(|| Error::Schema(format!("unknown edge `{a}` in edgePerm")))?;
                let ib = edge_id(b)
                    .ok_or_else(|| Error::Schema(format!("unknown edge `{b}` in edgePerm")))?;
                eperm[ia] = ib as u32;
            }
            let mut restrictions: Vec<Word> = vec![Vec::new(); n_edges];
            for (edge, word) in &g.restrictions {
                let ie = edge_id(edge)
                    .ok_or_else(|| Error::Schema(format!("unknown edge `{edge}` in restrictions")))?;
                restrictions[ie] = self.parse_word(word, edge)?;
            }
            out.push(GeneratorSpec {
                name: g.name.clone(),
                vertex_perm: vperm,
                edge_perm: eperm,
                restrictions,
            });
        }
        Ok(out)
    }

    /// Builds the rank-one system.
    pub fn build_rank1(&self) -> Result<SelfSimilarSystem> {
        let graph = Graph::build(&self.to_graph_spec()?)?;
        let gens = self.generator_specs(
            |n| graph.vertex_by_name(n).map(|v| v.idx()),
            |n| graph.edge_by_name(n).map(|e| e.idx()),
            graph.num_vertices(),
            graph.num_edges(),
        )?;
        close_group(&graph, &gens, self.options.closure_cap)
    }

    /// Builds the k-graph system (also valid for rank 1 without ω-edges).
    pub fn build_kgraph(&self) -> Result<KSystem> {
        let skel = KGraphSkeleton::validate(&self.to_kgraph_spec()?)?;
        let gens = self.generator_specs(
            |n| skel.vertex_by_name(n).map(|v| v.idx()),
            |n| skel.edge_by_name(n),
            skel.num_vertices(),
            skel.num_edges(),
        )?;
        KSystem::close(&skel, &gens, self.options.closure_cap)
    }
}
