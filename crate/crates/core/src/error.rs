use thiserror::Error;

use crate::lattice::{EdgeClass, VertexClass};

/// Errors raised by the lattice, geometry and flow routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Gap `gap` (1-based) cannot be realized as a frustum: `a² ≤ (Δs)²/3`.
    #[error("gap {gap} is not realizable: a^2 = {a_sq} <= (ds)^2/3 = {bound}")]
    Realizability { gap: usize, a_sq: f64, bound: f64 },

    #[error("non-positive or non-finite length {value} on {edge}")]
    NonPositiveLength { edge: EdgeClass, value: f64 },

    #[error("degenerate cap: spoke factor {lambda} gives no apex above a face of edge {s}")]
    DegenerateCap { s: f64, lambda: f64 },

    /// The assembled dual area or volume of a class came out non-positive.
    #[error("non-positive dual measure {value} at {class}")]
    NonPositiveDual { class: DualClass, value: f64 },

    #[error("edges are not incident on {vertex}")]
    NotIncident { vertex: VertexClass },

    #[error("spline knots must be strictly increasing (violated at knot {index})")]
    NonMonotoneKnots { index: usize },

    #[error("no spherical cap fits the profile near the cut: {reason}")]
    NoValidCircle { reason: String },

    #[error("edge {edge} has zero weight")]
    ZeroEdgeWeight { edge: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// Which class a dual measure belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualClass {
    Edge(EdgeClass),
    Vertex(VertexClass),
}

impl std::fmt::Display for DualClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DualClass::Edge(e) => write!(f, "edge {e}"),
            DualClass::Vertex(v) => write!(f, "vertex {v}"),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
