//! Acceptance criteria: one PASS/FAIL line each, non-zero exit on any FAIL.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use drf_core::curvature::{block_volume, deficits, duals_in, ricci};
use drf_core::flow::{evolve, Event, FlowConfig, LobeOutcome, RunResult};
use drf_core::forman::{forman_all, WeightedGraph};
use drf_core::geometry::{frustum_metrics, DualScheme};
use drf_core::io::{lattice_to_json, series_csv};
use drf_core::lattice::{validate, EdgeClass, EndTreatment, NeckpinchLattice};
use drf_core::profiles::{build_lattice, ProfileSpec};
use drf_core::remesh::resample;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Check {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(id: u32, name: &'static str, pass: bool, detail: String) -> Check {
    Check { id, name, pass, detail }
}

fn dumbbell_config() -> FlowConfig {
    FlowConfig {
        snapshot_every: 1,
        ..FlowConfig::default()
    }
}

fn cylinder_exactness() -> Check {
    let clock = Instant::now();
    let s = 10.0;
    let l = NeckpinchLattice::new(vec![s; 20], vec![1.0; 19], EndTreatment::Mirror, "cyl").unwrap();
    let eps = deficits(&l).unwrap();
    let f = ricci(&l).unwrap();
    let elapsed = clock.elapsed().as_secs_f64();
    let rc_s = 4.0 * PI / (5.0 * 3f64.sqrt() * s * s);
    let mut worst = [0.0f64; 4];
    for (c, e) in &eps {
        match c {
            EdgeClass::Axial(_) => worst[0] = worst[0].max((e - PI / 3.0).abs()),
            EdgeClass::Section(_) => worst[1] = worst[1].max(e.abs()),
            EdgeClass::Spoke(_) => {}
        }
    }
    for e in f.dof_edges() {
        match e.class {
            EdgeClass::Axial(_) => worst[2] = worst[2].max(e.ricci.abs()),
            _ => worst[3] = worst[3].max((e.ricci - rc_s).abs()),
        }
    }
    let pass = worst[0] <= 1e-12
        && worst[1] <= 1e-12
        && worst[2] <= 1e-12
        && worst[3] <= 1e-9
        && elapsed < 1.0;
    check(
        1,
        "cylinder exactness",
        pass,
        format!(
            "|eps_a - pi/3| {:.1e}, |eps_s| {:.1e}, |Rc_a| {:.1e}, |Rc_s - 4pi/(5 sqrt3 s^2)| {:.1e}, {elapsed:.3} s",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

/// Least-squares slope of `y` against `x`.
fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn round_sphere_collapse() -> Check {
    let clock = Instant::now();
    let start = build_lattice(&ProfileSpec::round_sphere(30.0, 80)).unwrap();
    let cfg = FlowConfig {
        snapshot_every: 50,
        ..FlowConfig::default()
    };
    let run = evolve(&start, &cfg).unwrap();
    let elapsed = clock.elapsed().as_secs_f64();
    let outcome = &run.lobes[0].outcome;

    // per-class shape: ρ_i/ρ_max against the initial profile
    let shape = |l: &NeckpinchLattice| {
        let m = l.s().iter().copied().fold(0.0, f64::max);
        l.s().iter().map(|v| v / m).collect::<Vec<_>>()
    };
    let s0 = shape(&start);
    let shape_change = run
        .snapshots
        .iter()
        .filter(|sn| sn.lattice.n() == start.n())
        .flat_map(|sn| shape(&sn.lattice).into_iter().zip(&s0).map(|(a, b)| (a / b - 1.0).abs()).collect::<Vec<_>>())
        .fold(0.0, f64::max);

    // ρ_eff from the enclosed volume, V = 2π²ρ³; slopes over ten equal windows
    let rows: Vec<_> = run.series.iter().filter(|r| r.volume.is_finite()).collect();
    let t: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let r2: Vec<f64> = rows.iter().map(|r| (r.volume / (2.0 * PI * PI)).powf(2.0 / 3.0)).collect();
    let w = (t.len() / 10).max(2);
    let slopes: Vec<f64> = (0..t.len() / w).map(|k| slope(&t[k * w..(k + 1) * w], &r2[k * w..(k + 1) * w])).collect();
    let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
    let spread = slopes.iter().map(|s| (s / mean - 1.0).abs()).fold(0.0, f64::max);

    let extinct = matches!(outcome, LobeOutcome::Extinct);
    let pass = extinct
        && shape_change <= 0.02
        && spread <= 0.10
        && (-6.0..=-2.5).contains(&mean)
        && elapsed < 10.0;
    check(
        2,
        "round-sphere self-similar collapse",
        pass,
        format!(
            "outcome {outcome:?} at t = {:.2}, max shape change {:.1}%, d(rho_eff^2)/dt mean {mean:.3} with spread {:.1}%, {elapsed:.2} s",
            run.lobes[0].t_end,
            100.0 * shape_change,
            100.0 * spread
        ),
    )
}

fn pinch(run: &RunResult, elapsed: f64) -> Check {
    let Some(Event::Surgery { t: big_t, waist_a_index, lobe, .. }) = run.surgeries().next() else {
        return check(3, "dumbbell pinch", false, "no surgery".into());
    };
    let (lo, hi) = run
        .series_of(lobe)
        .filter(|r| r.t >= 0.8 * big_t && r.t < *big_t)
        .map(|r| r.rho_min * r.rho_min / (big_t - r.t))
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), m| (lo.min(m), hi.max(m)));
    let pass = (155.0..=210.0).contains(big_t)
        && (43..=47).contains(waist_a_index)
        && lo >= 0.5
        && hi <= 3.0
        && elapsed < 60.0;
    check(
        3,
        "dumbbell pinch",
        pass,
        format!("surgery t = {big_t:.2} on a{waist_a_index}, monitor in [{lo:.3}, {hi:.3}], run {elapsed:.2} s"),
    )
}

fn interior_spread(l: &NeckpinchLattice) -> Option<f64> {
    let f = ricci(l).ok()?;
    let n = l.n();
    let rc: Vec<f64> = f
        .dof_edges()
        .filter(|e| match e.class {
            EdgeClass::Section(i) => i > 1 && i < n,
            EdgeClass::Axial(g) => g > 1 && g < n - 1,
            EdgeClass::Spoke(_) => false,
        })
        .map(|e| e.ricci)
        .collect();
    let mean = rc.iter().sum::<f64>() / rc.len() as f64;
    let (lo, hi) = rc.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    Some((hi - lo) / mean.abs())
}

fn lobes(run: &RunResult, elapsed: f64) -> Check {
    let children: Vec<_> = run.lobes.iter().filter(|l| l.lobe == "left" || l.lobe == "right").collect();
    let extinct: Vec<_> = children.iter().filter(|l| l.outcome == LobeOutcome::Extinct).collect();
    let ratio = if extinct.len() == 2 {
        let (a, b) = (extinct[0].steps as f64, extinct[1].steps as f64);
        Some(a.max(b) / a.min(b))
    } else {
        None
    };
    let mut rounding = Vec::new();
    for lobe in &children {
        let spreads: Vec<Option<f64>> = run
            .snapshots
            .iter()
            .filter(|s| s.lattice.label() == lobe.lobe)
            .take(201)
            .map(|s| interior_spread(&s.lattice))
            .collect();
        let monotone = spreads.len() == 201
            && spreads.iter().all(Option::is_some)
            && spreads.windows(2).all(|w| w[1].unwrap() <= w[0].unwrap());
        let first = spreads.first().copied().flatten().unwrap_or(f64::NAN);
        let last = spreads.last().copied().flatten().unwrap_or(f64::NAN);
        rounding.push((lobe.lobe.as_str(), monotone, first, last));
    }
    let outcomes: Vec<String> = children
        .iter()
        .map(|l| match &l.outcome {
            LobeOutcome::Aborted { .. } => format!("{} aborted at t = {:.2} after {} steps", l.lobe, l.t_end, l.steps),
            o => format!("{} {:?} after {} steps", l.lobe, o, l.steps),
        })
        .collect();
    let pass = children.len() == 2
        && ratio.is_some_and(|r| (1.02..=1.55).contains(&r))
        && rounding.iter().all(|r| r.1)
        && elapsed < 90.0;
    let rounding: Vec<String> = rounding
        .iter()
        .map(|(l, m, a, b)| format!("{l} spread {a:.3} -> {b:.3} monotone {m}"))
        .collect();
    check(
        4,
        "dumbbell lobes",
        pass,
        format!(
            "{}; step ratio {}; {}; run {elapsed:.2} s",
            outcomes.join(", "),
            ratio.map_or("n/a".into(), |r| format!("{r:.3}")),
            rounding.join(", ")
        ),
    )
}

fn random_lattice(rng: &mut StdRng, well_centered: bool) -> NeckpinchLattice {
    loop {
        let n = rng.gen_range(4..=40);
        let scale = rng.gen_range(1.0..20.0);
        let mut x = scale;
        let s: Vec<f64> = (0..n)
            .map(|_| {
                x *= 1.0 + rng.gen_range(-0.04..0.04);
                x
            })
            .collect();
        let a: Vec<f64> = (1..n).map(|_| scale * rng.gen_range(0.6..1.2)).collect();
        let Ok(l) = NeckpinchLattice::new(s, a, EndTreatment::Cap, "r") else { continue };
        if !well_centered || validate(&l).all_well_centered() {
            return l;
        }
    }
}

fn partition_of_unity() -> Check {
    let mut rng = StdRng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let l = random_lattice(&mut rng, true);
        let total = block_volume(&l).unwrap();
        for scheme in [DualScheme::Barycentric, DualScheme::Circumcentric] {
            let v = duals_in(&l, scheme).unwrap().total_volume();
            worst = worst.max(((v - total) / total).abs());
        }
    }
    check(5, "dual partition of unity", worst <= 1e-9, format!("50 lattices, both dual schemes, max relative error {worst:.1e}"))
}

fn golden_frustum() -> Check {
    // regular tetrahedron of edge 2 cut at mid-height
    let h = (2.0f64 / 3.0).sqrt();
    let p = |x: f64, y: f64, z: f64| [x, y, z];
    let b = [p(-1.0, 0.0, 0.0), p(1.0, 0.0, 0.0), p(0.0, 3f64.sqrt(), 0.0)];
    let t = [p(-0.5, 3f64.sqrt() / 6.0, h), p(0.5, 3f64.sqrt() / 6.0, h), p(0.0, 2.0 / 3f64.sqrt(), h)];
    let sub = |a: [f64; 3], b: [f64; 3]| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let cross = |a: [f64; 3], b: [f64; 3]| [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let dihedral = |p: [f64; 3], q: [f64; 3], r1: [f64; 3], r2: [f64; 3]| {
        let e = sub(q, p);
        let (n1, n2) = (cross(e, sub(r1, p)), cross(e, sub(r2, p)));
        (dot(n1, n2) / (dot(n1, n1) * dot(n2, n2)).sqrt()).acos()
    };
    let tet = |a, b, c, d| dot(sub(b, a), cross(sub(c, a), sub(d, a))).abs() / 6.0;
    let volume = tet(b[0], b[1], b[2], t[0]) + tet(b[1], b[2], t[0], t[1]) + tet(b[2], t[0], t[1], t[2]);
    let m = frustum_metrics(2.0, 1.0, 1.0).unwrap();
    let errs = [
        (m.h - h).abs(),
        (m.dihedral_base_lateral - dihedral(b[0], b[1], b[2], t[0])).abs(),
        (m.dihedral_top_lateral - dihedral(t[0], t[1], t[2], b[0])).abs(),
        (m.dihedral_lateral_lateral - dihedral(b[0], t[0], b[1], b[2])).abs(),
        (m.volume - volume).abs(),
    ];
    let worst = errs.iter().copied().fold(0.0, f64::max);
    check(
        6,
        "frustum(2,1,1) golden values",
        worst <= 1e-9,
        format!(
            "h {:.7}, dihedrals {:.6}/{:.6}/{:.6}, V {:.7} (oracle {volume:.7}), max error {worst:.1e}",
            m.h, m.dihedral_base_lateral, m.dihedral_top_lateral, m.dihedral_lateral_lateral, m.volume
        ),
    )
}

fn remesh_conservation(run: &RunResult) -> Check {
    let mut rng = StdRng::seed_from_u64(7);
    let (mut length_err, mut idem_err) = (0.0f64, 0.0f64);
    let mut samples = 0;
    while samples < 50 {
        let l = random_lattice(&mut rng, false);
        let m = rng.gen_range(5..60);
        let Ok(r) = resample(&l, m) else { continue };
        samples += 1;
        length_err = length_err.max(((r.meridian_length() - l.meridian_length()) / l.meridian_length()).abs());
        let again = resample(&r, m).unwrap();
        for (x, y) in r.s().iter().zip(again.s()) {
            idem_err = idem_err.max((x - y).abs() / x.abs());
        }
    }
    let mut post = 0;
    let mut off_center = 0;
    let mut first_bad = None;
    for e in &run.events {
        if let Event::Remesh { step, lobe, .. } = e {
            let snap = run.snapshots.iter().find(|s| s.step == *step && s.lattice.label() == lobe);
            if let Some(snap) = snap {
                post += 1;
                if !validate(&snap.lattice).all_well_centered() {
                    off_center += 1;
                    first_bad.get_or_insert((*lobe == "main", snap.t, validate(&snap.lattice).off_center_gaps().len()));
                }
            }
        }
    }
    let pass = length_err <= 1e-9 && idem_err <= 1e-12 && post > 0 && off_center == 0;
    let bad = first_bad.map_or(String::new(), |(_, t, g)| format!(" (first at t = {t:.2} with {g} off-center gaps)"));
    check(
        7,
        "remesh conservation",
        pass,
        format!(
            "length error {length_err:.1e}, idempotence error {idem_err:.1e}, {off_center} of {post} post-remesh lattices not well-centered{bad}"
        ),
    )
}

fn forman_degree_formula() -> Check {
    let mut rng = StdRng::seed_from_u64(8);
    let mut mismatches = 0;
    let mut edges_seen = 0;
    for _ in 0..100 {
        let n = rng.gen_range(2..=50);
        let p = rng.gen_range(0.0..0.5);
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|_| rng.gen_bool(p))
            .collect();
        let g = WeightedGraph::unweighted(n, &edges).unwrap();
        let rc = forman_all(&g).unwrap();
        for (k, &(u, v)) in edges.iter().enumerate() {
            edges_seen += 1;
            if rc[k] != (4.0 - g.degree(u) as f64 - g.degree(v) as f64) / 2.0 {
                mismatches += 1;
            }
        }
    }
    check(8, "Forman specialization", mismatches == 0, format!("100 graphs, {edges_seen} edges, {mismatches} mismatches"))
}

fn determinism() -> Check {
    let start = build_lattice(&ProfileSpec::paper(80)).unwrap();
    let cfg = FlowConfig::default();
    let outputs: Vec<(usize, String, Vec<String>)> = [1usize, 2, 8]
        .into_iter()
        .map(|threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            let run = pool.install(|| evolve(&start, &cfg)).unwrap();
            let snaps = run.snapshots.iter().map(|s| lattice_to_json(&s.lattice, s.t)).collect();
            (threads, series_csv(&run.series), snaps)
        })
        .collect();
    let same = outputs.windows(2).all(|w| w[0].1 == w[1].1 && w[0].2 == w[1].2);
    check(
        9,
        "determinism",
        same,
        format!(
            "1/2/8 threads: {} series bytes, {} snapshots each, identical {same}",
            outputs[0].1.len(),
            outputs[0].2.len()
        ),
    )
}

fn main() -> ExitCode {
    let mut checks = vec![cylinder_exactness(), round_sphere_collapse()];
    let clock = Instant::now();
    let start = build_lattice(&ProfileSpec::paper(80)).unwrap();
    let run = evolve(&start, &dumbbell_config()).unwrap();
    let elapsed = clock.elapsed().as_secs_f64();
    checks.push(pinch(&run, elapsed));
    checks.push(lobes(&run, elapsed));
    checks.push(partition_of_unity());
    checks.push(golden_frustum());
    checks.push(remesh_conservation(&run));
    checks.push(forman_degree_formula());
    checks.push(determinism());

    for c in &checks {
        println!("criterion {} {}: {}: {}", c.id, if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
