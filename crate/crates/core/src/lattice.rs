//! The axisymmetric icosahedral-frustum lattice.
//!
//! A lattice is a stack of `n` icosahedral cross-sections with edge lengths
//! `s[1..n]`, joined across each of the `n − 1` gaps by twenty congruent
//! triangle-based frustum blocks whose lateral edges have length `a[1..n−1]`.
//! The two open ends are either capped by a solid icosahedron (twenty
//! tetrahedra sharing an apex) or closed by an even reflection.
//!
//! Indices in the public class enums are 1-based; storage is 0-based.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cap_metrics, frustum_metrics, CAP_SPOKE_FACTOR};

/// Edges of one icosahedron.
pub const ICOSA_EDGES: usize = 30;
/// Vertices of one icosahedron.
pub const ICOSA_VERTICES: usize = 12;
/// Faces of one icosahedron, hence frustum blocks per gap.
pub const ICOSA_FACES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndTreatment {
    /// Solid icosahedron cap: 20 tetrahedra around an apex vertex.
    #[default]
    Cap,
    /// Even reflection through the end section (ghost section `s_0 = s_2`).
    Mirror,
}

/// One of the two ends of the tube.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    /// Section 1.
    Left,
    /// Section n.
    Right,
}

impl End {
    pub fn opposite(self) -> End {
        match self {
            End::Left => End::Right,
            End::Right => End::Left,
        }
    }
}

/// Treatment of the two ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ends {
    pub left: EndTreatment,
    pub right: EndTreatment,
}

impl Ends {
    pub fn both(t: EndTreatment) -> Self {
        Ends { left: t, right: t }
    }

    pub fn get(&self, end: End) -> EndTreatment {
        match end {
            End::Left => self.left,
            End::Right => self.right,
        }
    }

    pub fn set(&mut self, end: End, t: EndTreatment) {
        match end {
            End::Left => self.left = t,
            End::Right => self.right = t,
        }
    }

    pub fn reversed(self) -> Self {
        Ends {
            left: self.right,
            right: self.left,
        }
    }
}

/// Symmetry class of an edge. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeClass {
    /// Icosahedral edge of section `i`.
    Section(usize),
    /// Lateral frustum edge of gap `i` (between sections `i` and `i + 1`).
    Axial(usize),
    /// Apex-to-rim edge of the cap at one end.
    Spoke(End),
}

impl fmt::Display for EdgeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeClass::Section(i) => write!(f, "s{i}"),
            EdgeClass::Axial(i) => write!(f, "a{i}"),
            EdgeClass::Spoke(End::Left) => write!(f, "spoke-left"),
            EdgeClass::Spoke(End::Right) => write!(f, "spoke-right"),
        }
    }
}

/// Symmetry class of a vertex. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexClass {
    /// The twelve vertices of section `i`.
    Ring(usize),
    /// Cap apex at one end.
    Apex(End),
}

impl fmt::Display for VertexClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexClass::Ring(i) => write!(f, "ring{i}"),
            VertexClass::Apex(End::Left) => write!(f, "apex-left"),
            VertexClass::Apex(End::Right) => write!(f, "apex-right"),
        }
    }
}

/// Symmetry class of a 3-block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockClass {
    /// The twenty frustums of gap `i`.
    Frustum(usize),
    /// The twenty cap tetrahedra at one end.
    CapTet(End),
}

/// The axisymmetric PL 3-geometry evolved by the flow.
#[derive(Debug, Clone, PartialEq)]
pub struct NeckpinchLattice {
    s: Vec<f64>,
    a: Vec<f64>,
    ends: Ends,
    label: String,
}

impl NeckpinchLattice {
    /// Builds a lattice with the same treatment at both ends.
    pub fn new(
        s: Vec<f64>,
        a: Vec<f64>,
        end_treatment: EndTreatment,
        label: impl Into<String>,
    ) -> Result<Self> {
        Self::with_ends(s, a, Ends::both(end_treatment), label)
    }

    /// Builds a lattice, checking positivity and frustum realizability.
    pub fn with_ends(
        s: Vec<f64>,
        a: Vec<f64>,
        ends: Ends,
        label: impl Into<String>,
    ) -> Result<Self> {
        if s.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a lattice needs at least 2 sections, got {}",
                s.len()
            )));
        }
        if a.len() + 1 != s.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} axial lengths for {} sections, got {}",
                s.len() - 1,
                s.len(),
                a.len()
            )));
        }
        for (i, &v) in s.iter().enumerate() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::NonPositiveLength {
                    edge: EdgeClass::Section(i + 1),
                    value: v,
                });
            }
        }
        for (i, &v) in a.iter().enumerate() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::NonPositiveLength {
                    edge: EdgeClass::Axial(i + 1),
                    value: v,
                });
            }
        }
        for gap in 0..a.len() {
            let ds = s[gap + 1] - s[gap];
            let bound = ds * ds / 3.0;
            let a_sq = a[gap] * a[gap];
            if a_sq <= bound {
                return Err(Error::Realizability {
                    gap: gap + 1,
                    a_sq,
                    bound,
                });
            }
        }
        Ok(NeckpinchLattice {
            s,
            a,
            ends,
            label: label.into(),
        })
    }

    /// Number of icosahedral sections.
    pub fn n(&self) -> usize {
        self.s.len()
    }

    /// Icosahedral edge lengths, 0-based storage of `s_1..s_n`.
    pub fn s(&self) -> &[f64] {
        &self.s
    }

    /// Axial edge lengths, 0-based storage of `a_1..a_{n−1}`.
    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn ends(&self) -> Ends {
        self.ends
    }

    pub fn end_treatment(&self, end: End) -> EndTreatment {
        self.ends.get(end)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    /// Independent edge-length degrees of freedom: `n + (n − 1)`.
    pub fn dof(&self) -> usize {
        self.s.len() + self.a.len()
    }

    /// Edge length of `s_end` at one end.
    pub fn end_section(&self, end: End) -> f64 {
        match end {
            End::Left => self.s[0],
            End::Right => self.s[self.s.len() - 1],
        }
    }

    /// Total meridian length `Σ a_i`.
    pub fn meridian_length(&self) -> f64 {
        self.a.iter().sum()
    }

    /// Cumulative meridian positions `x_1 = 0, x_{i+1} = x_i + a_i`.
    pub fn knots(&self) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.s.len());
        let mut acc = 0.0;
        x.push(acc);
        for &ai in &self.a {
            acc += ai;
            x.push(acc);
        }
        x
    }

    /// Length of an edge class.
    pub fn edge_length(&self, class: EdgeClass) -> f64 {
        match class {
            EdgeClass::Section(i) => self.s[i - 1],
            EdgeClass::Axial(i) => self.a[i - 1],
            EdgeClass::Spoke(end) => CAP_SPOKE_FACTOR * self.end_section(end),
        }
    }

    /// The classes that carry evolved degrees of freedom, in state-vector order.
    pub fn dof_classes(&self) -> impl Iterator<Item = EdgeClass> + '_ {
        (1..=self.n())
            .map(EdgeClass::Section)
            .chain((1..self.n()).map(EdgeClass::Axial))
    }

    /// Concatenated state vector `(s_1..s_n, a_1..a_{n−1})`.
    pub fn state(&self) -> Vec<f64> {
        let mut v = self.s.clone();
        v.extend_from_slice(&self.a);
        v
    }

    /// Same topology and ends, new edge lengths from a state vector.
    pub fn with_state(&self, state: &[f64]) -> Result<Self> {
        let n = self.n();
        if state.len() != 2 * n - 1 {
            return Err(Error::InvalidInput(format!(
                "state has {} entries, expected {}",
                state.len(),
                2 * n - 1
            )));
        }
        Self::with_ends(
            state[..n].to_vec(),
            state[n..].to_vec(),
            self.ends,
            self.label.clone(),
        )
    }

    /// The lattice read from the other end (section order reversed).
    pub fn reversed(&self) -> Self {
        let mut s = self.s.clone();
        s.reverse();
        let mut a = self.a.clone();
        a.reverse();
        NeckpinchLattice {
            s,
            a,
            ends: self.ends.reversed(),
            label: self.label.clone(),
        }
    }

    /// Capped ends in left-to-right order.
    pub fn capped_ends(&self) -> impl Iterator<Item = End> + '_ {
        [End::Left, End::Right]
            .into_iter()
            .filter(|&e| self.ends.get(e) == EndTreatment::Cap)
    }
}

/// A symmetry class together with how many lattice elements it stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Orbit<C> {
    pub class: C,
    pub multiplicity: usize,
}

/// Symmetry classes of edges, vertices and blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitTable {
    pub edges: Vec<Orbit<EdgeClass>>,
    pub vertices: Vec<Orbit<VertexClass>>,
    pub blocks: Vec<Orbit<BlockClass>>,
}

impl OrbitTable {
    /// Edge count excluding cap spokes: `30n + 12(n − 1)`.
    pub fn non_cap_edges(&self) -> usize {
        self.edges
            .iter()
            .filter(|o| !matches!(o.class, EdgeClass::Spoke(_)))
            .map(|o| o.multiplicity)
            .sum()
    }

    pub fn total_edges(&self) -> usize {
        self.edges.iter().map(|o| o.multiplicity).sum()
    }

    /// Vertex count excluding cap apexes: `12n`.
    pub fn ring_vertices(&self) -> usize {
        self.vertices
            .iter()
            .filter(|o| matches!(o.class, VertexClass::Ring(_)))
            .map(|o| o.multiplicity)
            .sum()
    }

    pub fn total_vertices(&self) -> usize {
        self.vertices.iter().map(|o| o.multiplicity).sum()
    }

    /// Frustum block count: `20(n − 1)`.
    pub fn frustum_blocks(&self) -> usize {
        self.blocks
            .iter()
            .filter(|o| matches!(o.class, BlockClass::Frustum(_)))
            .map(|o| o.multiplicity)
            .sum()
    }

    pub fn total_blocks(&self) -> usize {
        self.blocks.iter().map(|o| o.multiplicity).sum()
    }
}

pub fn orbits(lattice: &NeckpinchLattice) -> OrbitTable {
    let n = lattice.n();
    let mut edges: Vec<_> = (1..=n)
        .map(|i| Orbit {
            class: EdgeClass::Section(i),
            multiplicity: ICOSA_EDGES,
        })
        .chain((1..n).map(|i| Orbit {
            class: EdgeClass::Axial(i),
            multiplicity: ICOSA_VERTICES,
        }))
        .collect();
    let mut vertices: Vec<_> = (1..=n)
        .map(|i| Orbit {
            class: VertexClass::Ring(i),
            multiplicity: ICOSA_VERTICES,
        })
        .collect();
    let mut blocks: Vec<_> = (1..n)
        .map(|i| Orbit {
            class: BlockClass::Frustum(i),
            multiplicity: ICOSA_FACES,
        })
        .collect();
    for end in lattice.capped_ends() {
        edges.push(Orbit {
            class: EdgeClass::Spoke(end),
            multiplicity: ICOSA_VERTICES,
        });
        vertices.push(Orbit {
            class: VertexClass::Apex(end),
            multiplicity: 1,
        });
        blocks.push(Orbit {
            class: BlockClass::CapTet(end),
            multiplicity: ICOSA_FACES,
        });
    }
    OrbitTable {
        edges,
        vertices,
        blocks,
    }
}

/// Per-gap realizability and circumcenter placement.
#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    /// 1-based gap index.
    pub gap: usize,
    pub realizable: bool,
    /// Block height, `None` when not realizable.
    pub height: Option<f64>,
    /// Circumcenter height above the base plane.
    pub circumcenter_height: Option<f64>,
    pub well_centered: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapReport {
    pub end: End,
    pub well_centered: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub gaps: Vec<GapReport>,
    pub caps: Vec<CapReport>,
    pub min_length: f64,
    pub max_length: f64,
    pub positive_lengths: bool,
}

impl ValidationReport {
    pub fn all_realizable(&self) -> bool {
        self.positive_lengths && self.gaps.iter().all(|g| g.realizable)
    }

    pub fn all_well_centered(&self) -> bool {
        self.gaps.iter().all(|g| g.well_centered) && self.caps.iter().all(|c| c.well_centered)
    }

    pub fn unrealizable_gaps(&self) -> Vec<usize> {
        self.gaps
            .iter()
            .filter(|g| !g.realizable)
            .map(|g| g.gap)
            .collect()
    }

    pub fn off_center_gaps(&self) -> Vec<usize> {
        self.gaps
            .iter()
            .filter(|g| !g.well_centered)
            .map(|g| g.gap)
            .collect()
    }
}

/// Checks raw `(s, a)` arrays without constructing a lattice, so that
/// failures are reported instead of raised.
pub fn validate_lengths(s: &[f64], a: &[f64], ends: Ends) -> ValidationReport {
    let all = s.iter().chain(a.iter()).copied();
    let min_length = all.clone().fold(f64::INFINITY, f64::min);
    let max_length = all.fold(f64::NEG_INFINITY, f64::max);
    let positive_lengths = s.iter().chain(a.iter()).all(|&v| v > 0.0 && v.is_finite());
    let gaps = a
        .iter()
        .enumerate()
        .map(|(g, &ag)| {
            let (s1, s2) = (s[g], s[g + 1]);
            match frustum_metrics(s1, s2, ag) {
                Ok(m) => GapReport {
                    gap: g + 1,
                    realizable: true,
                    height: Some(m.h),
                    circumcenter_height: Some(m.z_c),
                    well_centered: m.well_centered,
                },
                Err(_) => GapReport {
                    gap: g + 1,
                    realizable: false,
                    height: None,
                    circumcenter_height: None,
                    well_centered: false,
                },
            }
        })
        .collect();
    let caps = [End::Left, End::Right]
        .into_iter()
        .filter(|&e| ends.get(e) == EndTreatment::Cap)
        .filter_map(|end| {
            let se = match end {
                End::Left => *s.first()?,
                End::Right => *s.last()?,
            };
            Some(CapReport {
                end,
                well_centered: cap_metrics(se, CAP_SPOKE_FACTOR)
                    .map(|c| c.well_centered)
                    .unwrap_or(false),
            })
        })
        .collect();
    ValidationReport {
        gaps,
        caps,
        min_length,
        max_length,
        positive_lengths,
    }
}

pub fn validate(lattice: &NeckpinchLattice) -> ValidationReport {
    validate_lengths(lattice.s(), lattice.a(), lattice.ends())
}
