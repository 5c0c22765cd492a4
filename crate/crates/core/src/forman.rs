//! Weighted Forman–Ricci curvature on graphs, and the lattice-side weights
//! that line the Forman formula up with the edge Ricci value.
//!
//! For an edge `e = v1 v2`,
//!
//! ```text
//! Rc_F(e) = ½ (ω(v1)/ω(e) + ω(v2)/ω(e))
//!         − Σ_{e'∼v1, e'≠e} ½ ω(v1)/√(ω(e) ω(e'))
//!         − Σ_{e'∼v2, e'≠e} ½ ω(v2)/√(ω(e) ω(e'))
//! ```
//!
//! With unit weights this is `(4 − d1 − d2)/2`.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Deserialize;

use crate::curvature::ricci_in;
use crate::error::{Error, Result};
use crate::geometry::{DualScheme, IncidentEdge, LatticeGeometry};
use crate::lattice::{EdgeClass, End, NeckpinchLattice, VertexClass};

/// Undirected simple graph with node and edge weights in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    ids: Vec<String>,
    node_weights: Vec<f64>,
    edges: Vec<(usize, usize, f64)>,
    incident: Vec<Vec<usize>>,
}

fn check_weight(what: &str, w: f64) -> Result<()> {
    if (0.0..=1.0).contains(&w) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what} weight {w} is outside [0, 1]")))
    }
}

impl WeightedGraph {
    /// Nodes are `0..node_weights.len()`; edges are `(u, v, ω(e))`.
    pub fn new(node_weights: Vec<f64>, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let ids = (0..node_weights.len()).map(|i| i.to_string()).collect();
        Self::with_ids(ids, node_weights, edges)
    }

    /// Unit node and edge weights.
    pub fn unweighted(nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(vec![1.0; nodes], edges.iter().map(|&(u, v)| (u, v, 1.0)).collect())
    }

    fn with_ids(
        ids: Vec<String>,
        node_weights: Vec<f64>,
        edges: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        let n = node_weights.len();
        for (id, &w) in ids.iter().zip(&node_weights) {
            check_weight(&format!("node {id}"), w)?;
        }
        let mut seen = BTreeSet::new();
        let mut incident = vec![Vec::new(); n];
        for (k, &(u, v, w)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::InvalidInput(format!("edge {k} names a missing node")));
            }
            if u == v {
                return Err(Error::InvalidInput(format!("edge {k} is a self-loop")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidInput(format!("edge {k} duplicates an earlier edge")));
            }
            check_weight(&format!("edge {k}"), w)?;
            incident[u].push(k);
            incident[v].push(k);
        }
        Ok(WeightedGraph {
            ids,
            node_weights,
            edges,
            incident,
        })
    }

    /// Parses `{ "nodes": [{"id", "w"}], "edges": [{"u", "v", "w"}] }`.
    ///
    /// Ids may be strings or integers. Missing weights are 1, and nodes only
    /// named by edges are added in order of first appearance.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: GraphSpec =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("graph JSON: {e}")))?;
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut ids = Vec::new();
        let mut weights = Vec::new();
        for node in spec.nodes {
            let id = node.id.key();
            if index.contains_key(&id) {
                return Err(Error::InvalidInput(format!("node {id} listed twice")));
            }
            index.insert(id.clone(), ids.len());
            ids.push(id);
            weights.push(node.w.unwrap_or(1.0));
        }
        let mut lookup = |id: &NodeId| {
            let key = id.key();
            *index.entry(key.clone()).or_insert_with(|| {
                ids.push(key);
                weights.push(1.0);
                ids.len() - 1
            })
        };
        let edges: Vec<(usize, usize, f64)> = spec
            .edges
            .iter()
            .map(|e| (lookup(&e.u), lookup(&e.v), e.w.unwrap_or(1.0)))
            .collect();
        Self::with_ids(ids, weights, edges)
    }

    pub fn node_count(&self) -> usize {
        self.node_weights.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn node_weight(&self, v: usize) -> f64 {
        self.node_weights[v]
    }

    /// `(u, v, ω(e))` of edge `k`.
    pub fn edge(&self, k: usize) -> (usize, usize, f64) {
        self.edges[k]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident[v].len()
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum NodeId {
    Int(i64),
    Str(String),
}

impl NodeId {
    fn key(&self) -> String {
        match self {
            NodeId::Int(i) => i.to_string(),
            NodeId::Str(s) => s.clone(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeSpec {
    id: NodeId,
    w: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeSpec {
    u: NodeId,
    v: NodeId,
    w: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphSpec {
    #[serde(default)]
    nodes: Vec<NodeSpec>,
    edges: Vec<EdgeSpec>,
}

/// Forman–Ricci curvature of edge `k`.
pub fn forman_curvature(graph: &WeightedGraph, k: usize) -> Result<f64> {
    let (v1, v2, we) = graph.edges[k];
    if we == 0.0 {
        return Err(Error::ZeroEdgeWeight { edge: k });
    }
    let side = |v: usize| -> Result<f64> {
        let wv = graph.node_weights[v];
        let mut total = 0.5 * wv / we;
        for &j in &graph.incident[v] {
            if j == k {
                continue;
            }
            let wj = graph.edges[j].2;
            if wj == 0.0 {
                return Err(Error::ZeroEdgeWeight { edge: j });
            }
            total -= 0.5 * wv / (we * wj).sqrt();
        }
        Ok(total)
    };
    Ok(side(v1)? + side(v2)?)
}

/// Curvature of every edge, in edge order.
pub fn forman_all(graph: &WeightedGraph) -> Result<Vec<f64>> {
    (0..graph.edge_count())
        .into_par_iter()
        .map(|k| forman_curvature(graph, k))
        .collect()
}

/// One `(edge, endpoint, neighbour)` entry of the lattice weight table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrespondenceRow {
    pub edge: EdgeClass,
    /// 1 or 2.
    pub side: u8,
    pub vertex: VertexClass,
    pub neighbour: EdgeClass,
    /// Position of the neighbour in the vertex star.
    pub slot: usize,
    pub theta: f64,
    /// `cos²θ · ε'`, the node-weight counterpart.
    pub cos2_eps: f64,
    /// `A'`, the counterpart of `√(ω(e) ω(e'))`.
    pub area: f64,
    pub rc_drf: f64,
    /// Forman value of the edge under the induced weights.
    pub rc_forman: f64,
}

fn endpoints(class: EdgeClass, n: usize) -> [(VertexClass, IncidentEdge); 2] {
    match class {
        EdgeClass::Section(i) => {
            let at = (VertexClass::Ring(i), IncidentEdge::Section { slot: 0 });
            [at, at]
        }
        EdgeClass::Axial(g) => [
            (VertexClass::Ring(g), IncidentEdge::Axial(g)),
            (VertexClass::Ring(g + 1), IncidentEdge::Axial(g)),
        ],
        EdgeClass::Spoke(end) => {
            let ring = match end {
                End::Left => 1,
                End::Right => n,
            };
            let spoke = IncidentEdge::Spoke { slot: 0 };
            [(VertexClass::Apex(end), spoke), (VertexClass::Ring(ring), spoke)]
        }
    }
}

/// Lattice-side Forman weights: for each edge class, each endpoint and each
/// other edge at that endpoint, the pair `(cos²θ ε', A')`.
///
/// The induced Forman value takes `ω(v) = ε` and `ω(e) = A` for the edge's
/// own terms, which gives `Rc_F = ε/A − K`.
pub fn correspondence_export(
    lattice: &NeckpinchLattice,
    scheme: DualScheme,
) -> Result<Vec<CorrespondenceRow>> {
    let field = ricci_in(lattice, scheme)?;
    let geom = LatticeGeometry::with_scheme(lattice, scheme)?;
    let data: HashMap<EdgeClass, (f64, f64)> = field
        .edges
        .iter()
        .map(|e| (e.class, (e.eps, e.dual_area)))
        .collect();
    let mut rows = Vec::new();
    for e in &field.edges {
        let mut per_edge = Vec::new();
        let mut neighbour_terms = 0.0;
        for (side, (vertex, incident)) in endpoints(e.class, lattice.n()).into_iter().enumerate() {
            let star = geom.star(vertex)?;
            let p = star.position(incident).ok_or(Error::NotIncident { vertex })?;
            let angles = star.fan_angles(p);
            for (q, (node, theta)) in star.nodes.iter().zip(angles).enumerate() {
                if q == p {
                    continue;
                }
                let (eps, area) = data[&node.class];
                let c = theta.cos();
                let cos2_eps = c * c * eps;
                neighbour_terms += 0.5 * cos2_eps / area;
                per_edge.push(CorrespondenceRow {
                    edge: e.class,
                    side: side as u8 + 1,
                    vertex,
                    neighbour: node.class,
                    slot: q,
                    theta,
                    cos2_eps,
                    area,
                    rc_drf: e.ricci,
                    rc_forman: 0.0,
                });
            }
        }
        let rc_forman = e.eps / e.dual_area - neighbour_terms;
        for row in &mut per_edge {
            row.rc_forman = rc_forman;
        }
        rows.extend(per_edge);
    }
    Ok(rows)
}
