//! Runs the default dumbbell with a range of surgery thresholds and prints
//! the surgery time, waist edge and lobe step counts for each.

use std::time::Instant;

use drf_core::flow::{evolve, Event, FlowConfig};
use drf_core::profiles::{build_lattice, ProfileSpec};

fn main() {
    let thresholds: Vec<f64> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let thresholds = if thresholds.is_empty() { vec![1.0, 2.0, 3.0] } else { thresholds };
    let t_max = std::env::var("T_MAX").ok().and_then(|v| v.parse().ok()).unwrap_or(FlowConfig::default().t_max);
    let lattice = build_lattice(&ProfileSpec::paper(80)).expect("paper profile");
    for eps in thresholds {
        let cfg = FlowConfig {
            surgery_threshold: eps,
            snapshot_every: 0,
            t_max,
            ..FlowConfig::default()
        };
        let clock = Instant::now();
        let run = evolve(&lattice, &cfg).expect("valid config");
        let elapsed = clock.elapsed().as_secs_f64();
        print!("eps {eps:6.3}  wall {elapsed:6.2}s");
        for e in &run.events {
            match e {
                Event::Surgery { t, waist_a_index, lobe, .. } => {
                    print!("  surgery[{lobe}] t={t:.2} a{waist_a_index}")
                }
                Event::Extinction { lobe, lobe_steps, t, .. } => {
                    print!("  {lobe}: {lobe_steps} steps (t={t:.2})")
                }
                Event::Abort { lobe, error, t, .. } => print!("  ABORT[{lobe}] t={t:.2} {error}"),
                Event::Stop { lobe, reason, .. } => print!("  stop[{lobe}] {reason}"),
                _ => {}
            }
        }
        if let Some(Event::Surgery { t: big_t, lobe, .. }) = run.surgeries().next() {
            let (lo, hi) = run
                .series_of(lobe)
                .filter(|r| r.t >= 0.8 * big_t && r.t < *big_t)
                .map(|r| r.rho_min * r.rho_min / (big_t - r.t))
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), m| (lo.min(m), hi.max(m)));
            print!("  monitor [{lo:.3}, {hi:.3}]");
        }
        for f in &run.finals {
            let smax = f.s().iter().cloned().fold(0.0, f64::max);
            print!("  final[{}] n={} smax={smax:.3} s_end={:?}", f.label(), f.n(), &f.s()[..3]);
        }
        println!();
    }
}
