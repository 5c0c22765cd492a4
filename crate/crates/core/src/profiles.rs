//! Initial data: radial profiles sampled onto a lattice.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::CAP_SPOKE_FACTOR;
use crate::lattice::{EndTreatment, NeckpinchLattice};
use crate::remesh::fit_spline;

/// Area-equivalent radius factor: `4πρ² = 20·(√3/4)s²`.
pub const AREA_RADIUS_FACTOR: f64 = 0.830_157_285_866_503_7;

/// How an icosahedral edge length `s` is reported as a radius `ρ = c·s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RadiusConvention {
    /// Vertex circumradius, `c = √(10 + 2√5)/4`.
    #[default]
    Circumradius,
    /// Radius of the sphere with the icosahedron's surface area.
    Area,
}

impl RadiusConvention {
    pub fn factor(self) -> f64 {
        match self {
            RadiusConvention::Circumradius => CAP_SPOKE_FACTOR,
            RadiusConvention::Area => AREA_RADIUS_FACTOR,
        }
    }

    pub fn rho(self, s: f64) -> f64 {
        self.factor() * s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProfileKind {
    /// The lopsided dumbbell used for the neckpinch run.
    Paper,
    /// A round 3-sphere of radius `r0`, sampled pole to pole.
    #[serde(rename = "sphere")]
    RoundSphere { r0: f64 },
    Cylinder { s: f64, a: f64 },
    /// Tabulated `(x, s)` samples, resampled uniformly in `x`.
    Table { x: Vec<f64>, s: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub kind: ProfileKind,
    pub n: usize,
    #[serde(default)]
    pub end_treatment: EndTreatment,
}

impl ProfileSpec {
    pub fn paper(n: usize) -> Self {
        ProfileSpec {
            kind: ProfileKind::Paper,
            n,
            end_treatment: EndTreatment::Cap,
        }
    }

    pub fn round_sphere(r0: f64, n: usize) -> Self {
        ProfileSpec {
            kind: ProfileKind::RoundSphere { r0 },
            n,
            end_treatment: EndTreatment::Cap,
        }
    }

    pub fn cylinder(s: f64, a: f64, n: usize) -> Self {
        ProfileSpec {
            kind: ProfileKind::Cylinder { s, a },
            n,
            end_treatment: EndTreatment::Cap,
        }
    }

    pub fn with_ends(mut self, end_treatment: EndTreatment) -> Self {
        self.end_treatment = end_treatment;
        self
    }

    fn label(&self) -> &'static str {
        match self.kind {
            ProfileKind::Paper => "paper",
            ProfileKind::RoundSphere { .. } => "sphere",
            ProfileKind::Cylinder { .. } => "cylinder",
            ProfileKind::Table { .. } => "table",
        }
    }
}

/// Lopsided dumbbell: `s(ξ) = 105.15 (1 − 0.2 G(ξ; −0.4, 0.4) − 0.05 G(ξ; −0.6, 0.3) cos ξ − 0.7 cos⁴ξ)`
/// with Gaussian bumps `G(ξ; μ, w) = exp(−((ξ − μ)/w)²)`.
pub fn paper_section_length(xi: f64) -> f64 {
    let bump1 = (-((xi + 0.4) / 0.4).powi(2)).exp();
    let bump2 = (-((xi + 0.6) / 0.3).powi(2)).exp();
    105.15 * (1.0 - 0.2 * bump1 - 0.05 * bump2 * xi.cos() - 0.7 * xi.cos().powi(4))
}

/// Sample point `ξ_i = ((n − 2i + 1)/2)·Δξ`, `Δξ = π/(n + 1)`, for 1-based `i`.
pub fn paper_xi(i: usize, n: usize) -> f64 {
    let dxi = PI / (n as f64 + 1.0);
    (n as f64 - 2.0 * i as f64 + 1.0) / 2.0 * dxi
}

pub fn make_profile(spec: &ProfileSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = spec.n;
    if n < 3 {
        return Err(Error::InvalidInput(format!("profiles need n >= 3, got {n}")));
    }
    match &spec.kind {
        ProfileKind::Paper => {
            let dxi = PI / (n as f64 + 1.0);
            let s = (1..=n).map(|i| paper_section_length(paper_xi(i, n))).collect();
            Ok((s, vec![100.0 * dxi.sin(); n - 1]))
        }
        ProfileKind::RoundSphere { r0 } => {
            if !(*r0 > 0.0) {
                return Err(Error::InvalidInput(format!("sphere radius must be positive, got {r0}")));
            }
            let step = PI / (n as f64 + 1.0);
            let s = (1..=n)
                .map(|i| r0 * (i as f64 * step).sin() / CAP_SPOKE_FACTOR)
                .collect();
            Ok((s, vec![r0 * step; n - 1]))
        }
        ProfileKind::Cylinder { s, a } => Ok((vec![*s; n], vec![*a; n - 1])),
        ProfileKind::Table { x, s } => {
            if x.len() != s.len() || x.len() < 3 {
                return Err(Error::InvalidInput(
                    "table needs matching x and s columns with at least 3 rows".into(),
                ));
            }
            let spline = fit_spline(x, s)?;
            let (x0, x1) = (x[0], x[x.len() - 1]);
            let step = (x1 - x0) / (n as f64 - 1.0);
            let s = (0..n)
                .map(|k| {
                    if k == n - 1 {
                        spline.eval(x1)
                    } else {
                        spline.eval(x0 + k as f64 * step)
                    }
                })
                .collect();
            Ok((s, vec![step; n - 1]))
        }
    }
}

pub fn build_lattice(spec: &ProfileSpec) -> Result<NeckpinchLattice> {
    let (s, a) = make_profile(spec)?;
    NeckpinchLattice::new(s, a, spec.end_treatment, spec.label())
}
