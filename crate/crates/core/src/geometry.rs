//! Euclidean metric data of the primitive blocks.
//!
//! Every block (triangle-based frustum or cap tetrahedron) is embedded in E³
//! with its symmetry axis along `z`, and all angles and circumcentric dual
//! measures are read off that embedding. The same routine feeds the
//! per-vertex edge stars used for the angles `θ` between neighbouring edges.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{EdgeClass, End, EndTreatment, NeckpinchLattice, VertexClass};

/// Circumradius of the unit-edge icosahedron, `√(10 + 2√5)/4`.
pub const CAP_SPOKE_FACTOR: f64 = 0.951_056_516_295_153_5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        let [a, b, c] = self.0;
        let [x, y, z] = o.0;
        Vec3([b * z - c * y, c * x - a * z, a * y - b * x])
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn unit(self) -> Vec3 {
        self * (1.0 / self.norm())
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3([self.0[0] * k, self.0[1] * k, self.0[2] * k])
    }
}

/// Angle between two vectors, robust near 0 and π.
pub(crate) fn angle(u: Vec3, v: Vec3) -> f64 {
    u.cross(v).norm().atan2(u.dot(v))
}

fn triangle_circumcenter(p0: Vec3, p1: Vec3, p2: Vec3) -> Vec3 {
    let a = p1 - p0;
    let b = p2 - p0;
    let axb = a.cross(b);
    let num = (b * a.dot(a) - a * b.dot(b)).cross(axb);
    p0 + num * (1.0 / (2.0 * axb.dot(axb)))
}

fn tetra_circumcenter(p: [Vec3; 4]) -> Vec3 {
    // 2 (p_i − p_0) · x = |p_i|² − |p_0|²
    let rows: Vec<Vec3> = (1..4).map(|i| (p[i] - p[0]) * 2.0).collect();
    let rhs: Vec<f64> = (1..4).map(|i| p[i].dot(p[i]) - p[0].dot(p[0])).collect();
    let det = rows[0].dot(rows[1].cross(rows[2]));
    let cx = Vec3([rhs[0], rhs[1], rhs[2]]);
    let col = |k: usize| Vec3([rows[0].0[k], rows[1].0[k], rows[2].0[k]]);
    let (c0, c1, c2) = (col(0), col(1), col(2));
    Vec3([
        cx.dot(c1.cross(c2)) / det,
        c0.dot(cx.cross(c2)) / det,
        c0.dot(c1.cross(cx)) / det,
    ])
}

/// Choice of block and face centers for the dual cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DualScheme {
    /// Circumcenters; signed when a center falls outside its block.
    Circumcentric,
    /// Vertex centroids of blocks and faces; positive on convex blocks.
    #[default]
    Barycentric,
}

/// A convex block embedded in E³ with cyclic (inscribable) faces.
pub(crate) struct Block {
    verts: Vec<Vec3>,
    faces: Vec<Vec<usize>>,
    centroid: Vec3,
    circumcenter: Vec3,
    scheme: DualScheme,
}

impl Block {
    fn new(verts: Vec<Vec3>, faces: Vec<Vec<usize>>, sphere: [usize; 4]) -> Self {
        let centroid = verts.iter().fold(Vec3::new(0.0, 0.0, 0.0), |acc, &v| acc + v)
            * (1.0 / verts.len() as f64);
        let circumcenter = tetra_circumcenter(sphere.map(|i| verts[i]));
        Block {
            verts,
            faces,
            centroid,
            circumcenter,
            scheme: DualScheme::Circumcentric,
        }
    }

    fn with_scheme(mut self, scheme: DualScheme) -> Self {
        self.scheme = scheme;
        self
    }

    fn dual_center(&self) -> Vec3 {
        match self.scheme {
            DualScheme::Circumcentric => self.circumcenter,
            DualScheme::Barycentric => self.centroid,
        }
    }

    fn face_dual_center(&self, f: usize) -> Vec3 {
        match self.scheme {
            DualScheme::Circumcentric => self.face_circumcenter(f),
            DualScheme::Barycentric => self.face_centroid(f),
        }
    }

    fn face_has_edge(face: &[usize], u: usize, v: usize) -> bool {
        let k = face.len();
        (0..k).any(|i| {
            let (p, q) = (face[i], face[(i + 1) % k]);
            (p == u && q == v) || (p == v && q == u)
        })
    }

    fn faces_of_edge(&self, u: usize, v: usize) -> Vec<usize> {
        (0..self.faces.len())
            .filter(|&f| Self::face_has_edge(&self.faces[f], u, v))
            .collect()
    }

    fn face_centroid(&self, f: usize) -> Vec3 {
        let face = &self.faces[f];
        face.iter().fold(Vec3::new(0.0, 0.0, 0.0), |acc, &i| acc + self.verts[i])
            * (1.0 / face.len() as f64)
    }

    fn face_circumcenter(&self, f: usize) -> Vec3 {
        let face = &self.faces[f];
        triangle_circumcenter(self.verts[face[0]], self.verts[face[1]], self.verts[face[2]])
    }

    fn inward_normal(&self, f: usize) -> Vec3 {
        let face = &self.faces[f];
        let p0 = self.verts[face[0]];
        let n = (self.verts[face[1]] - p0).cross(self.verts[face[2]] - p0).unit();
        if (self.centroid - p0).dot(n) < 0.0 {
            n * -1.0
        } else {
            n
        }
    }

    /// Unit vector in the plane of `f`, perpendicular to edge `uv`, pointing into `f`.
    fn in_face_perp(&self, f: usize, u: usize, v: usize) -> Vec3 {
        let (pu, pv) = (self.verts[u], self.verts[v]);
        let e = (pv - pu).unit();
        let w = self.face_centroid(f) - pu;
        (w - e * w.dot(e)).unit()
    }

    pub fn edge_length(&self, u: usize, v: usize) -> f64 {
        (self.verts[v] - self.verts[u]).norm()
    }

    pub fn dihedral(&self, u: usize, v: usize) -> f64 {
        let fs = self.faces_of_edge(u, v);
        angle(self.in_face_perp(fs[0], u, v), self.in_face_perp(fs[1], u, v))
    }

    /// Angle at vertex `at` between edges towards `p` and `q`.
    pub fn face_angle(&self, at: usize, p: usize, q: usize) -> f64 {
        angle(self.verts[p] - self.verts[at], self.verts[q] - self.verts[at])
    }

    /// Signed area of the dual flag `(m_e, c_f, c_b)` projected on the edge
    /// `uv`, oriented so that centers inside the block count positively.
    /// With circumcenters this is `½·h_f(e)·h_b(f)`.
    fn flag_area(&self, f: usize, u: usize, v: usize) -> f64 {
        let mid = (self.verts[u] + self.verts[v]) * 0.5;
        let cf = self.face_dual_center(f);
        let orient = self.in_face_perp(f, u, v).cross(self.inward_normal(f));
        0.5 * (cf - mid).cross(self.dual_center() - cf).dot(orient)
    }

    /// Dual area of edge `uv` restricted to this block.
    pub fn dual_area(&self, u: usize, v: usize) -> f64 {
        self.faces_of_edge(u, v)
            .into_iter()
            .map(|f| self.flag_area(f, u, v))
            .sum()
    }

    fn neighbours(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for face in &self.faces {
            let k = face.len();
            for i in 0..k {
                if face[i] == v {
                    for w in [face[(i + 1) % k], face[(i + k - 1) % k]] {
                        if !out.contains(&w) {
                            out.push(w);
                        }
                    }
                }
            }
        }
        out
    }

    /// Dual volume of vertex `v` restricted to this block: the signed flag
    /// tetrahedra `(v, m_e, c_f, c_b)` over all flags at `v`.
    pub fn dual_volume(&self, v: usize) -> f64 {
        let mut total = 0.0;
        for w in self.neighbours(v) {
            let half = 0.5 * self.edge_length(v, w);
            for f in self.faces_of_edge(v, w) {
                total += half * self.flag_area(f, v, w) / 3.0;
            }
        }
        total
    }
}

/// Metric data of one triangle-based frustum block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrustumMetrics {
    pub s1: f64,
    pub s2: f64,
    pub a: f64,
    pub h: f64,
    /// Dihedral at a base edge, between the base triangle and a lateral face.
    pub dihedral_base_lateral: f64,
    /// Dihedral at a top edge, between the top triangle and a lateral face.
    pub dihedral_top_lateral: f64,
    /// Dihedral at a lateral edge, between two lateral faces.
    pub dihedral_lateral_lateral: f64,
    pub volume: f64,
    /// Circumcenter height above the base plane, on the axis.
    pub z_c: f64,
    pub well_centered: bool,
    pub base_circumradius: f64,
    pub top_circumradius: f64,
    /// Signed in-face distance from the midpoint of the base edge to the
    /// circumcenter of the lateral trapezoid.
    pub lateral_circumcenter_offset: f64,
    pub lateral_circumradius: f64,
    /// Trapezoid angle at a base vertex between the base edge and the lateral edge.
    pub angle_base_lateral: f64,
    /// Trapezoid angle at a top vertex between the top edge and the lateral edge.
    pub angle_top_lateral: f64,
    pub dual_area_base_edge: f64,
    pub dual_area_top_edge: f64,
    pub dual_area_lateral_edge: f64,
    pub dual_volume_base_vertex: f64,
    pub dual_volume_top_vertex: f64,
}

fn check_realizable(s1: f64, s2: f64, a: f64) -> Result<f64> {
    for (edge, v) in [
        (EdgeClass::Section(1), s1),
        (EdgeClass::Section(2), s2),
        (EdgeClass::Axial(1), a),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::NonPositiveLength { edge, value: v });
        }
    }
    let ds = s1 - s2;
    let bound = ds * ds / 3.0;
    let a_sq = a * a;
    if a_sq <= bound {
        return Err(Error::Realizability {
            gap: 1,
            a_sq,
            bound,
        });
    }
    Ok((a_sq - bound).sqrt())
}

const TRI_PHASES: [f64; 3] = [PI / 2.0, PI / 2.0 + 2.0 * PI / 3.0, PI / 2.0 + 4.0 * PI / 3.0];

/// Embeds the frustum: base triangle in `z = 0`, top triangle concentric at
/// `z = h` with the same orientation. Vertices 0..3 are the base, 3..6 the top.
pub(crate) fn frustum_block(s1: f64, s2: f64, h: f64) -> Block {
    let r1 = s1 / 3f64.sqrt();
    let r2 = s2 / 3f64.sqrt();
    let mut verts = Vec::with_capacity(6);
    for &phi in &TRI_PHASES {
        verts.push(Vec3::new(r1 * phi.cos(), r1 * phi.sin(), 0.0));
    }
    for &phi in &TRI_PHASES {
        verts.push(Vec3::new(r2 * phi.cos(), r2 * phi.sin(), h));
    }
    let faces = vec![
        vec![0, 1, 2],
        vec![3, 4, 5],
        vec![0, 1, 4, 3],
        vec![1, 2, 5, 4],
        vec![2, 0, 3, 5],
    ];
    Block::new(verts, faces, [0, 1, 2, 3])
}

pub fn frustum_metrics(s1: f64, s2: f64, a: f64) -> Result<FrustumMetrics> {
    frustum_metrics_in(s1, s2, a, DualScheme::Circumcentric)
}

/// Frustum metrics with dual measures taken in the given scheme.
pub fn frustum_metrics_in(s1: f64, s2: f64, a: f64, scheme: DualScheme) -> Result<FrustumMetrics> {
    let h = check_realizable(s1, s2, a)?;
    let block = frustum_block(s1, s2, h).with_scheme(scheme);

    let area1 = 3f64.sqrt() / 4.0 * s1 * s1;
    let area2 = 3f64.sqrt() / 4.0 * s2 * s2;
    let volume = h / 3.0 * (area1 + area2 + (area1 * area2).sqrt());

    let z_c = block.circumcenter.0[2];
    let lateral = 2;
    let cf = block.face_circumcenter(lateral);
    let base_mid = (block.verts[0] + block.verts[1]) * 0.5;
    let lateral_circumcenter_offset = (cf - base_mid).dot(block.in_face_perp(lateral, 0, 1));

    Ok(FrustumMetrics {
        s1,
        s2,
        a,
        h,
        dihedral_base_lateral: block.dihedral(0, 1),
        dihedral_top_lateral: block.dihedral(3, 4),
        dihedral_lateral_lateral: block.dihedral(0, 3),
        volume,
        z_c,
        well_centered: z_c > 0.0 && z_c < h,
        base_circumradius: s1 / 3f64.sqrt(),
        top_circumradius: s2 / 3f64.sqrt(),
        lateral_circumcenter_offset,
        lateral_circumradius: (cf - block.verts[0]).norm(),
        angle_base_lateral: block.face_angle(0, 1, 3),
        angle_top_lateral: block.face_angle(3, 4, 0),
        dual_area_base_edge: block.dual_area(0, 1),
        dual_area_top_edge: block.dual_area(3, 4),
        dual_area_lateral_edge: block.dual_area(0, 3),
        dual_volume_base_vertex: block.dual_volume(0),
        dual_volume_top_vertex: block.dual_volume(3),
    })
}

/// Metric data of one cap tetrahedron: an equilateral rim face of edge `s`
/// joined to an apex by three spokes of length `λ·s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapMetrics {
    pub s: f64,
    pub lambda: f64,
    /// Height of the apex above the rim face.
    pub apex_height: f64,
    /// Dihedral at a rim edge, between the rim face and a spoke face.
    pub dihedral_rim: f64,
    /// Dihedral at a spoke, between two spoke faces.
    pub dihedral_spoke: f64,
    /// Angle at a rim vertex between a rim edge and a spoke.
    pub angle_rim_spoke: f64,
    /// Angle at the apex between two spokes.
    pub angle_apex: f64,
    pub volume: f64,
    /// Circumcenter height above the rim face.
    pub z_c: f64,
    pub well_centered: bool,
    pub dual_area_rim_edge: f64,
    pub dual_area_spoke: f64,
    pub dual_volume_rim_vertex: f64,
    pub dual_volume_apex: f64,
}

pub(crate) fn cap_block(s: f64, apex_height: f64) -> Block {
    let r = s / 3f64.sqrt();
    let mut verts: Vec<Vec3> = TRI_PHASES
        .iter()
        .map(|&phi| Vec3::new(r * phi.cos(), r * phi.sin(), 0.0))
        .collect();
    verts.push(Vec3::new(0.0, 0.0, apex_height));
    let faces = vec![vec![0, 1, 2], vec![0, 1, 3], vec![1, 2, 3], vec![2, 0, 3]];
    Block::new(verts, faces, [0, 1, 2, 3])
}

pub fn cap_metrics(s: f64, lambda: f64) -> Result<CapMetrics> {
    cap_metrics_in(s, lambda, DualScheme::Circumcentric)
}

pub fn cap_metrics_in(s: f64, lambda: f64, scheme: DualScheme) -> Result<CapMetrics> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::NonPositiveLength {
            edge: EdgeClass::Section(1),
            value: s,
        });
    }
    let spoke = lambda * s;
    let sq = spoke * spoke - s * s / 3.0;
    if !(lambda.is_finite() && sq > 0.0) {
        return Err(Error::DegenerateCap { s, lambda });
    }
    let apex_height = sq.sqrt();
    let block = cap_block(s, apex_height).with_scheme(scheme);
    let volume = 3f64.sqrt() / 4.0 * s * s * apex_height / 3.0;
    let z_c = block.circumcenter.0[2];
    Ok(CapMetrics {
        s,
        lambda,
        apex_height,
        dihedral_rim: block.dihedral(0, 1),
        dihedral_spoke: block.dihedral(0, 3),
        angle_rim_spoke: block.face_angle(0, 1, 3),
        angle_apex: block.face_angle(3, 0, 1),
        volume,
        z_c,
        well_centered: z_c > 0.0 && z_c < apex_height,
        dual_area_rim_edge: block.dual_area(0, 1),
        dual_area_spoke: block.dual_area(0, 3),
        dual_volume_rim_vertex: block.dual_volume(0),
        dual_volume_apex: block.dual_volume(3),
    })
}

/// An edge at a vertex, as seen from that vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IncidentEdge {
    /// One of the five icosahedral edges at a ring vertex, numbered
    /// cyclically so that slots `k` and `k + 1` bound a common triangle.
    Section { slot: usize },
    /// Lateral edge of gap `g`. At ring 1 under a mirror end, gap 0 is the
    /// reflected ghost edge; likewise gap `n` at ring `n`.
    Axial(usize),
    /// A spoke: slot 0 at a ring vertex, slots 0..12 at an apex (icosahedral
    /// vertex numbering).
    Spoke { slot: usize },
}

/// The edges meeting at one vertex class and the face angles between them.
#[derive(Debug, Clone)]
pub struct VertexStar {
    pub vertex: VertexClass,
    pub nodes: Vec<StarNode>,
    arcs: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarNode {
    pub edge: IncidentEdge,
    /// The class whose curvature data this edge carries (ghost edges carry
    /// the data of their mirror image).
    pub class: EdgeClass,
    pub length: f64,
}

impl VertexStar {
    pub fn degree(&self) -> usize {
        self.nodes.len()
    }

    pub fn position(&self, edge: IncidentEdge) -> Option<usize> {
        self.nodes.iter().position(|n| n.edge == edge)
    }

    /// Fan-development angles from node `from` to every node: the smallest
    /// sum of in-face angles over a chain of faces around the vertex.
    pub fn fan_angles(&self, from: usize) -> Vec<f64> {
        let k = self.nodes.len();
        let mut dist = vec![f64::INFINITY; k];
        let mut done = vec![false; k];
        dist[from] = 0.0;
        for _ in 0..k {
            let Some(u) = (0..k)
                .filter(|&i| !done[i] && dist[i].is_finite())
                .min_by(|&i, &j| dist[i].total_cmp(&dist[j]))
            else {
                break;
            };
            done[u] = true;
            for &(p, q, w) in &self.arcs {
                let other = if p == u {
                    q
                } else if q == u {
                    p
                } else {
                    continue;
                };
                if dist[u] + w < dist[other] {
                    dist[other] = dist[u] + w;
                }
            }
        }
        dist
    }
}

/// Icosahedron vertex adjacency: 0 top, 1..=5 upper ring, 6..=10 lower ring, 11 bottom.
pub(crate) fn icosahedron_edges() -> Vec<(usize, usize)> {
    let mut e = Vec::with_capacity(30);
    for k in 0..5 {
        let up = 1 + k;
        let up_next = 1 + (k + 1) % 5;
        let lo = 6 + k;
        let lo_next = 6 + (k + 1) % 5;
        e.push((0, up));
        e.push((up, up_next));
        e.push((up, lo));
        e.push((up_next, lo));
        e.push((lo, lo_next));
        e.push((lo, 11));
    }
    e
}

/// Block metrics for every gap and cap of a lattice.
///
/// `gaps[g]` holds gap `g` for `g ∈ 1..n`; `gaps[0]` and `gaps[n]` hold the
/// reflected ghost gaps of mirror ends.
#[derive(Debug, Clone)]
pub struct LatticeGeometry {
    n: usize,
    gaps: Vec<Option<FrustumMetrics>>,
    caps: [Option<CapMetrics>; 2],
    ends: crate::lattice::Ends,
    s: Vec<f64>,
    a: Vec<f64>,
    scheme: DualScheme,
}

impl LatticeGeometry {
    pub fn new(lattice: &NeckpinchLattice) -> Result<Self> {
        Self::with_scheme(lattice, DualScheme::default())
    }

    pub fn with_scheme(lattice: &NeckpinchLattice, scheme: DualScheme) -> Result<Self> {
        let n = lattice.n();
        let s = lattice.s();
        let a = lattice.a();
        let ends = lattice.ends();
        let mut specs: Vec<Option<(f64, f64, f64)>> = vec![None; n + 1];
        for g in 1..n {
            specs[g] = Some((s[g - 1], s[g], a[g - 1]));
        }
        if ends.left == EndTreatment::Mirror {
            specs[0] = Some((s[1], s[0], a[0]));
        }
        if ends.right == EndTreatment::Mirror {
            specs[n] = Some((s[n - 1], s[n - 2], a[n - 2]));
        }
        let gaps = specs
            .par_iter()
            .with_min_len(8)
            .enumerate()
            .map(|(g, spec)| match spec {
                None => Ok(None),
                Some((s1, s2, ag)) => frustum_metrics_in(*s1, *s2, *ag, scheme)
                    .map(Some)
                    .map_err(|e| relabel_gap(e, g.clamp(1, n - 1))),
            })
            .collect::<Result<Vec<_>>>()?;
        let cap = |end: End| -> Result<Option<CapMetrics>> {
            if ends.get(end) == EndTreatment::Cap {
                cap_metrics_in(lattice.end_section(end), CAP_SPOKE_FACTOR, scheme).map(Some)
            } else {
                Ok(None)
            }
        };
        Ok(LatticeGeometry {
            n,
            gaps,
            caps: [cap(End::Left)?, cap(End::Right)?],
            ends,
            s: s.to_vec(),
            a: a.to_vec(),
            scheme,
        })
    }

    pub fn scheme(&self) -> DualScheme {
        self.scheme
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Frustum of gap `g` (`0` and `n` are mirror ghosts).
    pub fn gap(&self, g: usize) -> Option<&FrustumMetrics> {
        self.gaps.get(g).and_then(|m| m.as_ref())
    }

    pub fn cap(&self, end: End) -> Option<&CapMetrics> {
        match end {
            End::Left => self.caps[0].as_ref(),
            End::Right => self.caps[1].as_ref(),
        }
    }

    /// Cap at ring `i`, if ring `i` is a capped end section.
    pub(crate) fn cap_at_ring(&self, i: usize) -> Option<(End, &CapMetrics)> {
        if i == 1 {
            if let Some(c) = self.cap(End::Left) {
                return Some((End::Left, c));
            }
        }
        if i == self.n {
            if let Some(c) = self.cap(End::Right) {
                return Some((End::Right, c));
            }
        }
        None
    }

    /// The real edge class carrying the data of the lateral edge of gap `g`.
    pub(crate) fn axial_class(&self, g: usize) -> EdgeClass {
        EdgeClass::Axial(g.clamp(1, self.n - 1))
    }

    pub fn ends(&self) -> crate::lattice::Ends {
        self.ends
    }

    pub fn star(&self, vertex: VertexClass) -> Result<VertexStar> {
        match vertex {
            VertexClass::Ring(i) => {
                if i == 0 || i > self.n {
                    return Err(Error::NotIncident { vertex });
                }
                Ok(self.ring_star(i))
            }
            VertexClass::Apex(end) => {
                let cap = self.cap(end).ok_or(Error::NotIncident { vertex })?;
                let spoke = CAP_SPOKE_FACTOR * cap.s;
                let nodes = (0..12)
                    .map(|slot| StarNode {
                        edge: IncidentEdge::Spoke { slot },
                        class: EdgeClass::Spoke(end),
                        length: spoke,
                    })
                    .collect();
                let arcs = icosahedron_edges()
                    .into_iter()
                    .map(|(p, q)| (p, q, cap.angle_apex))
                    .collect();
                Ok(VertexStar {
                    vertex,
                    nodes,
                    arcs,
                })
            }
        }
    }

    fn ring_star(&self, i: usize) -> VertexStar {
        let si = self.s[i - 1];
        let mut nodes: Vec<StarNode> = (0..5)
            .map(|slot| StarNode {
                edge: IncidentEdge::Section { slot },
                class: EdgeClass::Section(i),
                length: si,
            })
            .collect();
        let mut arcs: Vec<(usize, usize, f64)> =
            (0..5).map(|k| (k, (k + 1) % 5, PI / 3.0)).collect();
        // gap i − 1 has ring i as its top; gap i has it as its base
        if let Some(f) = self.gap(i - 1) {
            let class = self.axial_class(i - 1);
            let length = self.a[class_index(class)];
            let node = nodes.len();
            nodes.push(StarNode {
                edge: IncidentEdge::Axial(i - 1),
                class,
                length,
            });
            arcs.extend((0..5).map(|k| (k, node, f.angle_top_lateral)));
        }
        if let Some(f) = self.gap(i) {
            let class = self.axial_class(i);
            let length = self.a[class_index(class)];
            let node = nodes.len();
            nodes.push(StarNode {
                edge: IncidentEdge::Axial(i),
                class,
                length,
            });
            arcs.extend((0..5).map(|k| (k, node, f.angle_base_lateral)));
        }
        if let Some((end, cap)) = self.cap_at_ring(i) {
            let node = nodes.len();
            nodes.push(StarNode {
                edge: IncidentEdge::Spoke { slot: 0 },
                class: EdgeClass::Spoke(end),
                length: CAP_SPOKE_FACTOR * cap.s,
            });
            arcs.extend((0..5).map(|k| (k, node, cap.angle_rim_spoke)));
        }
        VertexStar {
            vertex: VertexClass::Ring(i),
            nodes,
            arcs,
        }
    }
}

fn class_index(class: EdgeClass) -> usize {
    match class {
        EdgeClass::Section(i) | EdgeClass::Axial(i) => i - 1,
        EdgeClass::Spoke(_) => 0,
    }
}

fn relabel_gap(e: Error, gap: usize) -> Error {
    match e {
        Error::Realizability { a_sq, bound, .. } => Error::Realizability { gap, a_sq, bound },
        other => other,
    }
}

/// Angle between two edges meeting at `vertex`: the in-face angle when they
/// bound a common face, otherwise the fan-development angle around the vertex.
pub fn angle_between(
    lattice: &NeckpinchLattice,
    first: IncidentEdge,
    second: IncidentEdge,
    vertex: VertexClass,
) -> Result<f64> {
    let geometry = LatticeGeometry::new(lattice)?;
    let star = geometry.star(vertex)?;
    let p = star.position(first).ok_or(Error::NotIncident { vertex })?;
    let q = star.position(second).ok_or(Error::NotIncident { vertex })?;
    Ok(star.fan_angles(p)[q])
}
