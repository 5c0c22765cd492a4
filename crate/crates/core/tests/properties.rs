use drf_core::curvature::{block_volume, duals, duals_in, ricci};
use drf_core::forman::{forman_all, WeightedGraph};
use drf_core::geometry::DualScheme;
use drf_core::io::{lattice_from_json, lattice_to_json};
use drf_core::lattice::{validate, End, EndTreatment, Ends, NeckpinchLattice};
use drf_core::remesh::resample;
use proptest::prelude::*;

/// Gently varying lattices whose axial edges dominate the section steps,
/// so most draws are well-centered.
fn lattice_strategy() -> impl Strategy<Value = NeckpinchLattice> {
    (4usize..=40, 1.0f64..20.0, any::<bool>(), any::<bool>())
        .prop_flat_map(|(n, scale, left_cap, right_cap)| {
            (
                prop::collection::vec(-0.04f64..0.04, n),
                prop::collection::vec(0.6f64..1.2, n - 1),
                Just((scale, left_cap, right_cap)),
            )
        })
        .prop_map(|(steps, axial, (scale, left_cap, right_cap))| {
            let mut s = Vec::with_capacity(steps.len());
            let mut x = scale;
            for d in steps {
                x *= 1.0 + d;
                s.push(x);
            }
            let a = axial.iter().map(|f| f * scale).collect();
            let end = |cap: bool| if cap { EndTreatment::Cap } else { EndTreatment::Mirror };
            let mut ends = Ends::both(end(left_cap));
            ends.set(End::Right, end(right_cap));
            NeckpinchLattice::with_ends(s, a, ends, "p").unwrap()
        })
}

fn scaled(l: &NeckpinchLattice, c: f64) -> NeckpinchLattice {
    let s = l.s().iter().map(|v| v * c).collect();
    let a = l.a().iter().map(|v| v * c).collect();
    NeckpinchLattice::with_ends(s, a, l.ends(), l.label()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn dual_volumes_partition_the_blocks(l in lattice_strategy()) {
        // mirror-end rings own their ghost halves, so only closed lattices partition
        let l = NeckpinchLattice::new(l.s().to_vec(), l.a().to_vec(), EndTreatment::Cap, "").unwrap();
        let total = block_volume(&l).unwrap();
        for scheme in [DualScheme::Barycentric, DualScheme::Circumcentric] {
            if scheme == DualScheme::Circumcentric && !validate(&l).all_well_centered() {
                continue;
            }
            let v = duals_in(&l, scheme).unwrap().total_volume();
            prop_assert!(((v - total) / total).abs() < 1e-9, "{scheme:?}: {v} vs {total}");
        }
    }

    #[test]
    fn curvature_scales_inverse_square(l in lattice_strategy(), c in 0.2f64..5.0) {
        let f = ricci(&l).unwrap();
        let g = ricci(&scaled(&l, c)).unwrap();
        let d0 = duals(&l).unwrap();
        let d1 = duals(&scaled(&l, c)).unwrap();
        for (e, h) in f.edges.iter().zip(&g.edges) {
            prop_assert!((e.eps - h.eps).abs() < 1e-12);
            prop_assert!((h.dual_area - c * c * e.dual_area).abs() <= 1e-10 * h.dual_area.abs());
            let tol = 1e-9 * (e.ricci.abs() + f.max_abs_ricci());
            prop_assert!((h.ricci * c * c - e.ricci).abs() <= tol, "{}: {} vs {}", e.class, h.ricci * c * c, e.ricci);
            prop_assert!((h.sectional * c * c - e.sectional).abs() <= 1e-9 * (e.sectional.abs() + 1e-300).max(f.max_abs_ricci()));
        }
        for ((_, v0), (_, v1)) in d0.volumes.iter().zip(&d1.volumes) {
            prop_assert!((v1 - c.powi(3) * v0).abs() <= 1e-10 * v1.abs());
        }
    }

    #[test]
    fn reversal_mirrors_the_field(l in lattice_strategy()) {
        let n = l.n();
        let f = ricci(&l).unwrap();
        let g = ricci(&l.reversed()).unwrap();
        let tol = 1e-12 * f.max_abs_ricci().max(1e-300) * 10.0;
        for i in 0..n {
            prop_assert!((f.edges[i].ricci - g.edges[n - 1 - i].ricci).abs() <= tol);
        }
        for k in 0..n - 1 {
            prop_assert!((f.edges[n + k].ricci - g.edges[2 * n - 2 - k].ricci).abs() <= tol);
        }
    }

    #[test]
    fn palindromes_give_palindromic_fields(l in lattice_strategy(), cap in any::<bool>()) {
        let half = l.n();
        let mut s = l.s().to_vec();
        s.extend(l.s().iter().rev());
        let mut a = l.a().to_vec();
        a.push(l.a()[0]);
        a.extend(l.a().iter().rev());
        let ends = if cap { EndTreatment::Cap } else { EndTreatment::Mirror };
        let p = NeckpinchLattice::new(s, a, ends, "pal").unwrap();
        let f = ricci(&p).unwrap();
        let n = 2 * half;
        let tol = 1e-12 * f.max_abs_ricci() * 10.0;
        for i in 0..n {
            prop_assert!((f.edges[i].ricci - f.edges[n - 1 - i].ricci).abs() <= tol);
        }
        for k in 0..n - 1 {
            prop_assert!((f.edges[n + k].ricci - f.edges[2 * n - 2 - k].ricci).abs() <= tol);
        }
    }

    #[test]
    fn json_round_trip_is_exact(l in lattice_strategy(), t in 0.0f64..1e3) {
        let back = lattice_from_json(&lattice_to_json(&l, t)).unwrap();
        prop_assert_eq!(back.t, t);
        prop_assert_eq!(back.lattice, l);
    }

    #[test]
    fn resample_preserves_length(l in lattice_strategy(), m in 5usize..60) {
        if let Ok(r) = resample(&l, m) {
            let (a, b) = (l.meridian_length(), r.meridian_length());
            prop_assert!(((a - b) / a).abs() < 1e-9);
            prop_assert_eq!(r.s()[0], l.s()[0]);
            prop_assert_eq!(r.s()[m - 1], l.s()[l.n() - 1]);
            // a uniform grid is a fixed point
            let again = resample(&r, m).unwrap();
            for (x, y) in r.s().iter().zip(again.s()) {
                prop_assert!((x - y).abs() <= 1e-12 * x.abs());
            }
        }
    }

    #[test]
    fn unit_forman_is_the_degree_formula(
        n in 2usize..50,
        edges in prop::collection::vec((0usize..50, 0usize..50), 0..200),
    ) {
        let mut seen = std::collections::BTreeSet::new();
        let edges: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(u, v)| (u % n, v % n))
            .filter(|&(u, v)| u != v && seen.insert((u.min(v), u.max(v))))
            .collect();
        let g = WeightedGraph::unweighted(n, &edges).unwrap();
        let rc = forman_all(&g).unwrap();
        for (k, &(u, v)) in edges.iter().enumerate() {
            let expected = (4.0 - g.degree(u) as f64 - g.degree(v) as f64) / 2.0;
            prop_assert_eq!(rc[k], expected);
        }
    }
}
