//! Regge deficits, dual measures and the per-edge Ricci value.
//!
//! For an edge `e = v1 v2` with deficit `ε`, dual area `A` and neighbours
//! `e'` at either endpoint,
//!
//! ```text
//! K_e  = ½ [ Σ_{e'∼v1} cos²θ(e,e') ε_{e'}/A_{e'} + Σ_{e'∼v2} cos²θ(e,e') ε_{e'}/A_{e'} ]
//! R_v  = (1/V_v) Σ_{e∼v} ℓ_e ε_e
//! R_e  = ½ (R_{v1} + R_{v2})
//! Rc_e = ½ R_e − K_e
//! ```
//!
//! `e` itself never enters its own neighbour sum. The flow evolves edge
//! lengths by `dℓ/dt = −ℓ Rc`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{DualClass, Error, Result};
use crate::geometry::{DualScheme, IncidentEdge, LatticeGeometry, VertexStar};
use crate::lattice::{
    orbits, EdgeClass, End, NeckpinchLattice, VertexClass, ICOSA_EDGES, ICOSA_FACES,
    ICOSA_VERTICES,
};

/// Curvature data of one edge class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeCurvature {
    pub class: EdgeClass,
    pub multiplicity: usize,
    pub length: f64,
    /// Deficit angle `ε = 2π − Σ dihedrals`.
    pub eps: f64,
    /// Dual area.
    pub dual_area: f64,
    /// Sectional curvature `K` of the plane dual to the edge.
    pub sectional: f64,
    /// Edge scalar curvature `R_e`.
    pub scalar: f64,
    /// Ricci value `Rc = R_e/2 − K`.
    pub ricci: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexCurvature {
    pub class: VertexClass,
    pub multiplicity: usize,
    pub dual_volume: f64,
    pub scalar: f64,
}

/// Curvature of every edge and vertex class of a lattice.
///
/// Edge order: `s_1..s_n`, `a_1..a_{n−1}`, then spokes of capped ends (left
/// before right). Vertex order: rings `1..n`, then apexes.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureField {
    pub edges: Vec<EdgeCurvature>,
    pub vertices: Vec<VertexCurvature>,
}

impl CurvatureField {
    pub fn edge(&self, class: EdgeClass) -> Option<&EdgeCurvature> {
        self.edges.iter().find(|e| e.class == class)
    }

    pub fn vertex(&self, class: VertexClass) -> Option<&VertexCurvature> {
        self.vertices.iter().find(|v| v.class == class)
    }

    /// Classes carrying evolved degrees of freedom (sections and axial edges).
    pub fn dof_edges(&self) -> impl Iterator<Item = &EdgeCurvature> {
        self.edges
            .iter()
            .filter(|e| !matches!(e.class, EdgeClass::Spoke(_)))
    }

    pub fn max_abs_ricci(&self) -> f64 {
        self.dof_edges().map(|e| e.ricci.abs()).fold(0.0, f64::max)
    }
}

/// Edge-class slot layout shared by all assembly routines.
struct Layout {
    n: usize,
    spokes: Vec<End>,
}

impl Layout {
    fn new(lattice: &NeckpinchLattice) -> Self {
        Layout {
            n: lattice.n(),
            spokes: lattice.capped_ends().collect(),
        }
    }

    fn edge_classes(&self) -> Vec<EdgeClass> {
        (1..=self.n)
            .map(EdgeClass::Section)
            .chain((1..self.n).map(EdgeClass::Axial))
            .chain(self.spokes.iter().map(|&e| EdgeClass::Spoke(e)))
            .collect()
    }

    fn vertex_classes(&self) -> Vec<VertexClass> {
        (1..=self.n)
            .map(VertexClass::Ring)
            .chain(self.spokes.iter().map(|&e| VertexClass::Apex(e)))
            .collect()
    }

    fn edge_slot(&self, class: EdgeClass) -> usize {
        match class {
            EdgeClass::Section(i) => i - 1,
            EdgeClass::Axial(i) => self.n + i - 1,
            EdgeClass::Spoke(end) => {
                2 * self.n - 1 + self.spokes.iter().position(|&e| e == end).expect("capped end")
            }
        }
    }

    fn vertex_slot(&self, class: VertexClass) -> usize {
        match class {
            VertexClass::Ring(i) => i - 1,
            VertexClass::Apex(end) => {
                self.n + self.spokes.iter().position(|&e| e == end).expect("capped end")
            }
        }
    }
}

fn edge_deficit(geom: &LatticeGeometry, class: EdgeClass) -> f64 {
    match class {
        EdgeClass::Section(i) => {
            let mut total = 0.0;
            if let Some(f) = geom.gap(i - 1) {
                total += 2.0 * f.dihedral_top_lateral;
            }
            if let Some(f) = geom.gap(i) {
                total += 2.0 * f.dihedral_base_lateral;
            }
            if let Some((_, c)) = geom.cap_at_ring(i) {
                total += 2.0 * c.dihedral_rim;
            }
            2.0 * PI - total
        }
        EdgeClass::Axial(g) => {
            2.0 * PI - 5.0 * geom.gap(g).expect("real gap").dihedral_lateral_lateral
        }
        EdgeClass::Spoke(end) => 2.0 * PI - 5.0 * geom.cap(end).expect("capped").dihedral_spoke,
    }
}

fn edge_dual_area(geom: &LatticeGeometry, class: EdgeClass) -> f64 {
    match class {
        EdgeClass::Section(i) => {
            let mut total = 0.0;
            if let Some(f) = geom.gap(i - 1) {
                total += 2.0 * f.dual_area_top_edge;
            }
            if let Some(f) = geom.gap(i) {
                total += 2.0 * f.dual_area_base_edge;
            }
            if let Some((_, c)) = geom.cap_at_ring(i) {
                total += 2.0 * c.dual_area_rim_edge;
            }
            total
        }
        EdgeClass::Axial(g) => 5.0 * geom.gap(g).expect("real gap").dual_area_lateral_edge,
        EdgeClass::Spoke(end) => 5.0 * geom.cap(end).expect("capped").dual_area_spoke,
    }
}

fn vertex_dual_volume(geom: &LatticeGeometry, class: VertexClass) -> f64 {
    match class {
        VertexClass::Ring(i) => {
            let mut total = 0.0;
            if let Some(f) = geom.gap(i - 1) {
                total += 5.0 * f.dual_volume_top_vertex;
            }
            if let Some(f) = geom.gap(i) {
                total += 5.0 * f.dual_volume_base_vertex;
            }
            if let Some((_, c)) = geom.cap_at_ring(i) {
                total += 5.0 * c.dual_volume_rim_vertex;
            }
            total
        }
        VertexClass::Apex(end) => {
            ICOSA_FACES as f64 * geom.cap(end).expect("capped").dual_volume_apex
        }
    }
}

fn multiplicity(class: EdgeClass) -> usize {
    match class {
        EdgeClass::Section(_) => ICOSA_EDGES,
        EdgeClass::Axial(_) | EdgeClass::Spoke(_) => ICOSA_VERTICES,
    }
}

/// Deficit angle of every edge class, in the field's edge order.
pub fn deficits(lattice: &NeckpinchLattice) -> Result<Vec<(EdgeClass, f64)>> {
    let geom = LatticeGeometry::new(lattice)?;
    Ok(Layout::new(lattice)
        .edge_classes()
        .into_iter()
        .map(|c| (c, edge_deficit(&geom, c)))
        .collect())
}

/// Dual measures per edge and vertex class.
#[derive(Debug, Clone, PartialEq)]
pub struct Duals {
    pub areas: Vec<(EdgeClass, f64)>,
    pub volumes: Vec<(VertexClass, f64)>,
}

impl Duals {
    /// Multiplicity-weighted `Σ_v V_v`.
    pub fn total_volume(&self) -> f64 {
        self.volumes
            .iter()
            .map(|&(c, v)| {
                let m = match c {
                    VertexClass::Ring(_) => ICOSA_VERTICES,
                    VertexClass::Apex(_) => 1,
                };
                m as f64 * v
            })
            .sum()
    }
}

pub fn duals(lattice: &NeckpinchLattice) -> Result<Duals> {
    duals_in(lattice, DualScheme::default())
}

pub fn duals_in(lattice: &NeckpinchLattice, scheme: DualScheme) -> Result<Duals> {
    let geom = LatticeGeometry::with_scheme(lattice, scheme)?;
    let layout = Layout::new(lattice);
    Ok(Duals {
        areas: layout
            .edge_classes()
            .into_iter()
            .map(|c| (c, edge_dual_area(&geom, c)))
            .collect(),
        volumes: layout
            .vertex_classes()
            .into_iter()
            .map(|c| (c, vertex_dual_volume(&geom, c)))
            .collect(),
    })
}

/// Total volume of all blocks, multiplicity-weighted.
pub fn block_volume(lattice: &NeckpinchLattice) -> Result<f64> {
    let geom = LatticeGeometry::new(lattice)?;
    Ok(block_volume_of(&geom, lattice))
}

pub(crate) fn block_volume_of(geom: &LatticeGeometry, lattice: &NeckpinchLattice) -> f64 {
    let frustums: f64 = (1..lattice.n())
        .map(|g| geom.gap(g).expect("real gap").volume)
        .sum();
    let caps: f64 = lattice
        .capped_ends()
        .map(|e| geom.cap(e).expect("capped").volume)
        .sum();
    ICOSA_FACES as f64 * (frustums + caps)
}

/// `Σ_{e'≠from} cos²θ ε'/A'` over the star of one endpoint.
fn neighbour_sum(star: &VertexStar, from: IncidentEdge, ratio: impl Fn(EdgeClass) -> f64) -> f64 {
    let p = star.position(from).expect("edge in its own star");
    let angles = star.fan_angles(p);
    star.nodes
        .iter()
        .zip(angles)
        .enumerate()
        .filter(|&(q, _)| q != p)
        .map(|(_, (node, theta))| {
            let c = theta.cos();
            c * c * ratio(node.class)
        })
        .sum()
}

/// Full curvature field with positivity checks on the dual measures.
pub fn ricci(lattice: &NeckpinchLattice) -> Result<CurvatureField> {
    ricci_in(lattice, DualScheme::default())
}

pub fn ricci_in(lattice: &NeckpinchLattice, scheme: DualScheme) -> Result<CurvatureField> {
    let geom = LatticeGeometry::with_scheme(lattice, scheme)?;
    ricci_from(&geom, lattice)
}

pub(crate) fn ricci_from(geom: &LatticeGeometry, lattice: &NeckpinchLattice) -> Result<CurvatureField> {
    let layout = Layout::new(lattice);
    let edge_classes = layout.edge_classes();
    let vertex_classes = layout.vertex_classes();
    let n = layout.n;

    let eps: Vec<f64> = edge_classes.iter().map(|&c| edge_deficit(geom, c)).collect();
    let area: Vec<f64> = edge_classes.iter().map(|&c| edge_dual_area(geom, c)).collect();
    let volume: Vec<f64> = vertex_classes
        .iter()
        .map(|&c| vertex_dual_volume(geom, c))
        .collect();
    for (&c, &v) in edge_classes.iter().zip(&area) {
        if !(v > 0.0) {
            return Err(Error::NonPositiveDual {
                class: DualClass::Edge(c),
                value: v,
            });
        }
    }
    for (&c, &v) in vertex_classes.iter().zip(&volume) {
        if !(v > 0.0) {
            return Err(Error::NonPositiveDual {
                class: DualClass::Vertex(c),
                value: v,
            });
        }
    }

    let stars: Vec<VertexStar> = vertex_classes
        .iter()
        .map(|&v| geom.star(v))
        .collect::<Result<_>>()?;
    let star = |v: VertexClass| &stars[layout.vertex_slot(v)];
    let ratio = |c: EdgeClass| {
        let k = layout.edge_slot(c);
        eps[k] / area[k]
    };

    let scalar_v: Vec<f64> = stars
        .par_iter()
        .zip(volume.par_iter())
        .map(|(st, &vol)| {
            let weighted: f64 = st
                .nodes
                .iter()
                .map(|node| node.length * eps[layout.edge_slot(node.class)])
                .sum();
            weighted / vol
        })
        .collect();

    let sectional: Vec<f64> = edge_classes
        .par_iter()
        .map(|&c| match c {
            EdgeClass::Section(i) => {
                // both endpoints lie on ring i and see identical stars
                neighbour_sum(
                    star(VertexClass::Ring(i)),
                    IncidentEdge::Section { slot: 0 },
                    ratio,
                )
            }
            EdgeClass::Axial(g) => {
                let lower = neighbour_sum(star(VertexClass::Ring(g)), IncidentEdge::Axial(g), ratio);
                let upper =
                    neighbour_sum(star(VertexClass::Ring(g + 1)), IncidentEdge::Axial(g), ratio);
                0.5 * (lower + upper)
            }
            EdgeClass::Spoke(end) => {
                let ring = match end {
                    End::Left => 1,
                    End::Right => n,
                };
                let spoke = IncidentEdge::Spoke { slot: 0 };
                let apex = neighbour_sum(star(VertexClass::Apex(end)), spoke, ratio);
                let rim = neighbour_sum(star(VertexClass::Ring(ring)), spoke, ratio);
                0.5 * (apex + rim)
            }
        })
        .collect();

    let endpoints = |c: EdgeClass| -> (VertexClass, VertexClass) {
        match c {
            EdgeClass::Section(i) => (VertexClass::Ring(i), VertexClass::Ring(i)),
            EdgeClass::Axial(g) => (VertexClass::Ring(g), VertexClass::Ring(g + 1)),
            EdgeClass::Spoke(End::Left) => (VertexClass::Apex(End::Left), VertexClass::Ring(1)),
            EdgeClass::Spoke(End::Right) => (VertexClass::Apex(End::Right), VertexClass::Ring(n)),
        }
    };

    let edges = edge_classes
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let (v1, v2) = endpoints(c);
            let scalar = 0.5 * (scalar_v[layout.vertex_slot(v1)] + scalar_v[layout.vertex_slot(v2)]);
            EdgeCurvature {
                class: c,
                multiplicity: multiplicity(c),
                length: lattice.edge_length(c),
                eps: eps[k],
                dual_area: area[k],
                sectional: sectional[k],
                scalar,
                ricci: 0.5 * scalar - sectional[k],
            }
        })
        .collect();
    let table = orbits(lattice);
    let vertices = vertex_classes
        .iter()
        .enumerate()
        .map(|(k, &c)| VertexCurvature {
            class: c,
            multiplicity: table
                .vertices
                .iter()
                .find(|o| o.class == c)
                .map(|o| o.multiplicity)
                .unwrap_or(1),
            dual_volume: volume[k],
            scalar: scalar_v[k],
        })
        .collect();
    Ok(CurvatureField { edges, vertices })
}
