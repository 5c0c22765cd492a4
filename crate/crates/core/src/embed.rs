//! Meridian embedding of the vertex rings in the `(z, ρ)` half-plane.

use crate::geometry::CAP_SPOKE_FACTOR;
use crate::lattice::NeckpinchLattice;

/// Ring positions `(z_i, ρ_i)` with `ρ_i = c·s_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeridianPolyline {
    pub z: Vec<f64>,
    pub rho: Vec<f64>,
    /// `embeddable[g]` is false when gap `g + 1` has `a² < c²(Δs)²`.
    pub embeddable: Vec<bool>,
}

impl MeridianPolyline {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn all_embeddable(&self) -> bool {
        self.embeddable.iter().all(|&e| e)
    }

    /// Chord length between rings `i` and `i + 1` (0-based).
    pub fn chord(&self, i: usize) -> f64 {
        (self.z[i + 1] - self.z[i]).hypot(self.rho[i + 1] - self.rho[i])
    }
}

pub fn embed_meridian(lattice: &NeckpinchLattice) -> MeridianPolyline {
    let c = CAP_SPOKE_FACTOR;
    let s = lattice.s();
    let rho: Vec<f64> = s.iter().map(|&v| c * v).collect();
    let mut z = Vec::with_capacity(s.len());
    let mut embeddable = Vec::with_capacity(lattice.a().len());
    z.push(0.0);
    for (g, &ag) in lattice.a().iter().enumerate() {
        let dr = rho[g + 1] - rho[g];
        let radicand = ag * ag - dr * dr;
        embeddable.push(radicand >= 0.0);
        z.push(z[g] + radicand.max(0.0).sqrt());
    }
    MeridianPolyline { z, rho, embeddable }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::EndTreatment;
    use crate::profiles::{build_lattice, ProfileSpec};

    #[test]
    fn cylinder_is_straight() {
        let l = NeckpinchLattice::new(vec![10.0; 6], vec![1.5; 5], EndTreatment::Cap, "").unwrap();
        let m = embed_meridian(&l);
        for i in 0..6 {
            assert!((m.z[i] - 1.5 * i as f64).abs() < 1e-12);
            assert!((m.rho[i] - 10.0 * CAP_SPOKE_FACTOR).abs() < 1e-12);
        }
        assert!(m.all_embeddable());
    }

    #[test]
    fn sphere_lies_near_a_semicircle() {
        let r0 = 30.0;
        let l = build_lattice(&ProfileSpec::round_sphere(r0, 80)).unwrap();
        let m = embed_meridian(&l);
        // the poles sit one spacing beyond the end rings
        let half = (m.z[79] + m.z[0]) / 2.0;
        for i in 0..80 {
            let r = (m.z[i] - half).hypot(m.rho[i]);
            assert!((r - r0).abs() / r0 < 0.01, "ring {} at radius {r}", i + 1);
        }
    }

    #[test]
    fn steep_gaps_are_flagged() {
        let l = NeckpinchLattice::new(vec![1.0, 3.0, 3.1], vec![1.2, 1.0], EndTreatment::Cap, "")
            .unwrap();
        let m = embed_meridian(&l);
        assert_eq!(m.embeddable, vec![false, true]);
        assert_eq!(m.z[1], 0.0);
    }

    #[test]
    fn chords_reproduce_axial_lengths() {
        let l = build_lattice(&ProfileSpec::paper(80)).unwrap();
        let m = embed_meridian(&l);
        // the steep shoulders of the dumbbell do not embed with vertex rings
        assert!(!m.all_embeddable());
        for (i, &ag) in l.a().iter().enumerate() {
            if m.embeddable[i] {
                assert!((m.chord(i) - ag).abs() < 1e-9);
            }
        }
    }
}
