//! Neckpinch detection, splitting into capped lobes, and the spherical-cap
//! refinement of a freshly cut end.

use serde::{Deserialize, Serialize};

use crate::embed::embed_meridian;
use crate::error::{Error, Result};
use crate::geometry::CAP_SPOKE_FACTOR;
use crate::lattice::{End, EndTreatment, Ends, NeckpinchLattice};
use crate::remesh::resample;

/// Sections a waist must keep from either end to count as a neck.
pub const END_GUARD: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurgeryMethod {
    /// Cap each cut end with a solid icosahedron of the cut section.
    #[default]
    IcosaCap,
    /// As `IcosaCap`, then bend the last sections onto a matching circle.
    SphericalCap,
}

impl SurgeryMethod {
    pub fn name(self) -> &'static str {
        match self {
            SurgeryMethod::IcosaCap => "icosacap",
            SurgeryMethod::SphericalCap => "sphericalcap",
        }
    }
}

/// A detected neck.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pinch {
    /// Section with the smallest `s` (1-based).
    pub section: usize,
    /// Axial edge between the minimizing section and its smaller neighbour.
    pub waist_a_index: usize,
}

/// Finds a neck narrower than `threshold` at least [`END_GUARD`] sections
/// from both ends.
pub fn detect_pinch(lattice: &NeckpinchLattice, threshold: f64) -> Option<Pinch> {
    let s = lattice.s();
    let n = s.len();
    if n < 2 * END_GUARD + 1 {
        return None;
    }
    // interior sections with both neighbours present; ties go to the lower index
    let mut best = 1;
    for i in 2..n - 1 {
        if s[i] < s[best] {
            best = i;
        }
    }
    let section = best + 1;
    if s[best] > threshold || section <= END_GUARD || section > n - END_GUARD {
        return None;
    }
    let waist_a_index = if s[best + 1] < s[best - 1] {
        section
    } else {
        section - 1
    };
    Some(Pinch {
        section,
        waist_a_index,
    })
}

/// Removes axial edge `k` and caps both open ends.
///
/// The left child keeps sections `1..=k` and is capped with `s_k`; the right
/// child keeps `k+1..=n` and is capped with `s_{k+1}`. Far ends keep their
/// treatment. No remeshing is done here.
pub fn split(lattice: &NeckpinchLattice, k: usize) -> Result<(NeckpinchLattice, NeckpinchLattice)> {
    let n = lattice.n();
    if k < 1 || k >= n {
        return Err(Error::InvalidInput(format!(
            "waist index {k} outside 1..{}",
            n - 1
        )));
    }
    let (s, a) = (lattice.s(), lattice.a());
    let ends = lattice.ends();
    let child = |s: &[f64], a: &[f64], ends: Ends, side: &str| {
        if s.len() < 3 {
            return Err(Error::InvalidInput(format!(
                "{side} child would have {} sections; at least 3 are needed",
                s.len()
            )));
        }
        NeckpinchLattice::with_ends(s.to_vec(), a.to_vec(), ends, side)
    };
    let left = child(
        &s[..k],
        &a[..k - 1],
        Ends {
            left: ends.left,
            right: EndTreatment::Cap,
        },
        "left",
    )?;
    let right = child(
        &s[k..],
        &a[k..],
        Ends {
            left: EndTreatment::Cap,
            right: ends.right,
        },
        "right",
    )?;
    Ok((left, right))
}

/// Result of a surgery: two remeshed children and any non-fatal notes.
#[derive(Debug, Clone, PartialEq)]
pub struct SurgeryOutcome {
    pub waist_a_index: usize,
    pub method: SurgeryMethod,
    pub left: NeckpinchLattice,
    pub right: NeckpinchLattice,
    pub warnings: Vec<String>,
}

/// Split at `k`, optionally refine the cut ends, then remesh each child at
/// its own section count.
pub fn split_and_cap(
    lattice: &NeckpinchLattice,
    k: usize,
    method: SurgeryMethod,
) -> Result<SurgeryOutcome> {
    let (mut left, mut right) = split(lattice, k)?;
    let mut warnings = Vec::new();
    if method == SurgeryMethod::SphericalCap {
        for (child, side) in [(&mut left, End::Right), (&mut right, End::Left)] {
            match spherical_cap_refine(child, side) {
                Ok(refined) => *child = refined,
                Err(e) => warnings.push(format!("{} child kept its icosahedral cap: {e}", child.label())),
            }
        }
    }
    let left = resample(&left, left.n())?;
    let right = resample(&right, right.n())?;
    Ok(SurgeryOutcome {
        waist_a_index: k,
        method,
        left,
        right,
        warnings,
    })
}

/// Reassigns the last three sections and last two axial edges at the capped
/// end `side` so that the rings lie on a circle centred on the axis,
/// matching position and slope of the meridian at the third section from
/// the cap. The ring angles from the pole are spaced so that the cap apex
/// closes the circle: `φ_n = φ_{n−2}/3`, `φ_{n−1} = 2φ_{n−2}/3`.
pub fn spherical_cap_refine(lattice: &NeckpinchLattice, side: End) -> Result<NeckpinchLattice> {
    if side == End::Left {
        let mut out = spherical_cap_refine(&lattice.reversed(), End::Right)?.reversed();
        out.set_label(lattice.label());
        return Ok(out);
    }
    let fail = |reason: &str| Error::NoValidCircle {
        reason: reason.to_string(),
    };
    if lattice.end_treatment(End::Right) != EndTreatment::Cap {
        return Err(fail("the end is not capped"));
    }
    let n = lattice.n();
    if n < 5 {
        return Err(fail("fewer than 5 sections"));
    }
    let m = embed_meridian(lattice);
    // matching ring (0-based) and its central-difference tangent
    let j = n - 4;
    if !m.embeddable[j - 1..].iter().all(|&e| e) {
        return Err(fail("the meridian does not embed near the cap"));
    }
    let (tz, tr) = (m.z[j + 1] - m.z[j - 1], m.rho[j + 1] - m.rho[j - 1]);
    if !(tz > 0.0 && tr < 0.0) {
        return Err(fail("the profile does not close towards the cap"));
    }
    let slope = tr / tz;
    let radius = m.rho[j] * (1.0 + slope * slope).sqrt();
    // the centre sits behind the matching ring, so its polar angle is below π/2
    let phi_m = (m.rho[j] / radius).asin();
    let a_keep = lattice.a()[j];
    if a_keep >= 2.0 * radius * (phi_m / 2.0).sin() {
        return Err(fail("the circle is too small for the kept axial edge"));
    }
    let phi1 = phi_m - 2.0 * (a_keep / (2.0 * radius)).asin();
    let phis = [phi1, 2.0 * phi1 / 3.0, phi1 / 3.0];
    let chord = |p: f64, q: f64| 2.0 * radius * ((p - q) / 2.0).sin();

    let mut s = lattice.s().to_vec();
    let mut a = lattice.a().to_vec();
    for (k, &phi) in phis.iter().enumerate() {
        s[n - 3 + k] = radius * phi.sin() / CAP_SPOKE_FACTOR;
    }
    a[n - 3] = chord(phis[0], phis[1]);
    a[n - 2] = chord(phis[1], phis[2]);
    NeckpinchLattice::with_ends(s, a, lattice.ends(), lattice.label())
}
