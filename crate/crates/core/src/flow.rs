//! Fixed-step RK4 integration of `dℓ/dt = −ℓ Rc`, with periodic remeshing,
//! neckpinch surgery and per-lobe extinction.

use serde::{Deserialize, Serialize};

use crate::curvature::{block_volume, ricci_in, CurvatureField};
use crate::error::{Error, Result};
use crate::geometry::DualScheme;
use crate::lattice::NeckpinchLattice;
use crate::profiles::RadiusConvention;
use crate::remesh::resample;
use crate::surgery::{detect_pinch, split_and_cap, SurgeryMethod};

/// Default neck width at which surgery is performed.
///
/// Calibrated on the default dumbbell (`n = 80`, `dt = 0.25`, remesh every
/// 50 steps); see the `calibrate` example.
pub const DEFAULT_PINCH_THRESHOLD: f64 = 0.8;

/// Default whole-lobe size at which a lobe is considered collapsed.
pub const DEFAULT_EXTINCTION_THRESHOLD: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowConfig {
    pub dt: f64,
    /// Remesh after this many steps of a lobe.
    pub remesh_every: usize,
    pub t_max: f64,
    pub step_max: usize,
    /// Surgery when the narrowest interior section has `s ≤` this.
    pub surgery_threshold: f64,
    /// A lobe stops once every section has `s ≤` this.
    pub extinction_threshold: f64,
    /// Snapshot cadence in global steps; 0 keeps only lobe boundaries.
    pub snapshot_every: usize,
    pub surgery_method: SurgeryMethod,
    pub duals: DualScheme,
    pub radius: RadiusConvention,
    /// When set, remeshing lowers the section count so that the axial
    /// spacing stays at least this long. Off by default.
    pub min_axial: Option<f64>,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            dt: 0.25,
            remesh_every: 50,
            t_max: 2000.0,
            step_max: 20_000,
            surgery_threshold: DEFAULT_PINCH_THRESHOLD,
            extinction_threshold: DEFAULT_EXTINCTION_THRESHOLD,
            snapshot_every: 100,
            surgery_method: SurgeryMethod::IcosaCap,
            duals: DualScheme::default(),
            radius: RadiusConvention::default(),
            min_axial: None,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if self.remesh_every == 0 {
            return bad("remesh_every must be at least 1".into());
        }
        if !(self.t_max >= 0.0) {
            return bad(format!("t_max must be non-negative, got {}", self.t_max));
        }
        if !(self.surgery_threshold >= 0.0 && self.extinction_threshold >= 0.0) {
            return bad("thresholds must be non-negative".into());
        }
        if let Some(m) = self.min_axial {
            if !(m > 0.0) {
                return bad(format!("min_axial must be positive, got {m}"));
            }
        }
        Ok(())
    }
}

/// Time derivatives of the evolved lengths, with the field they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Rates {
    pub ds: Vec<f64>,
    pub da: Vec<f64>,
    pub field: CurvatureField,
}

impl Rates {
    /// Concatenated `(ds, da)` in state-vector order.
    pub fn state(&self) -> Vec<f64> {
        let mut v = self.ds.clone();
        v.extend_from_slice(&self.da);
        v
    }
}

/// `dℓ/dt = −ℓ Rc` for every section and axial class. Spokes follow their
/// end section and are not evolved separately.
pub fn rhs(lattice: &NeckpinchLattice, duals: DualScheme) -> Result<Rates> {
    let field = ricci_in(lattice, duals)?;
    let n = lattice.n();
    let rate = |k: usize| {
        let e = &field.edges[k];
        -e.length * e.ricci
    };
    Ok(Rates {
        ds: (0..n).map(rate).collect(),
        da: (n..2 * n - 1).map(rate).collect(),
        field,
    })
}

/// One classical RK4 step of `y′ = f(y)` given `k1 = f(y)`.
pub fn rk4_step_with<F>(y: &[f64], k1: &[f64], dt: f64, mut f: F) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let axpy = |k: &[f64], h: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + h * b).collect() };
    let k2 = f(&axpy(k1, dt / 2.0))?;
    let k3 = f(&axpy(&k2, dt / 2.0))?;
    let k4 = f(&axpy(&k3, dt))?;
    Ok((0..y.len())
        .map(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

pub fn rk4_step<F>(y: &[f64], dt: f64, mut f: F) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let k1 = f(y)?;
    rk4_step_with(y, &k1, dt, f)
}

fn lattice_rhs(lattice: &NeckpinchLattice, duals: DualScheme) -> impl FnMut(&[f64]) -> Result<Vec<f64>> + '_ {
    move |y: &[f64]| rhs(&lattice.with_state(y)?, duals).map(|r| r.state())
}

/// Advances a lattice by one RK4 step.
pub fn step_rk4(lattice: &NeckpinchLattice, dt: f64, duals: DualScheme) -> Result<NeckpinchLattice> {
    let y = rk4_step(&lattice.state(), dt, lattice_rhs(lattice, duals))?;
    lattice.with_state(&y)
}

/// Integrator state of one lobe.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub t: f64,
    /// Global step counter (continues across surgery).
    pub step: usize,
    /// Steps taken by this lobe.
    pub lobe_steps: usize,
    pub lattice: NeckpinchLattice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub t: f64,
    pub lobe: String,
    pub s_min: f64,
    pub rho_min: f64,
    /// Section of the minimum (1-based).
    pub argmin: usize,
    pub volume: f64,
    pub max_abs_rc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub lattice: NeckpinchLattice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RemeshTrigger {
    Cadence,
    OnDemand,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Event {
    Remesh {
        t: f64,
        step: usize,
        lobe: String,
        n: usize,
        trigger: RemeshTrigger,
    },
    Surgery {
        t: f64,
        step: usize,
        lobe: String,
        waist_a_index: usize,
        s_min: f64,
        method: String,
        children: Vec<String>,
    },
    Extinction {
        t: f64,
        step: usize,
        lobe: String,
        lobe_steps: usize,
    },
    Stop {
        t: f64,
        step: usize,
        lobe: String,
        reason: String,
    },
    Warning {
        t: f64,
        lobe: String,
        message: String,
    },
    Abort {
        t: f64,
        step: usize,
        lobe: String,
        error: String,
    },
}

impl Event {
    pub fn t(&self) -> f64 {
        match self {
            Event::Remesh { t, .. }
            | Event::Surgery { t, .. }
            | Event::Extinction { t, .. }
            | Event::Stop { t, .. }
            | Event::Warning { t, .. }
            | Event::Abort { t, .. } => *t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LobeOutcome {
    Surgery { waist_a_index: usize },
    Extinct,
    Limit,
    Aborted { error: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LobeSummary {
    pub lobe: String,
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
    pub outcome: LobeOutcome,
}

/// Everything produced by [`evolve`], in a fixed order: each lobe's records
/// precede those of its left child, which precede those of its right child.
/// Events are additionally stable-sorted by time.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub series: Vec<SeriesRow>,
    pub snapshots: Vec<Snapshot>,
    pub events: Vec<Event>,
    pub lobes: Vec<LobeSummary>,
    /// Final lattices of lobes that did not undergo surgery.
    pub finals: Vec<NeckpinchLattice>,
}

impl RunResult {
    pub fn lobe(&self, label: &str) -> Option<&LobeSummary> {
        self.lobes.iter().find(|l| l.lobe == label)
    }

    pub fn series_of<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a SeriesRow> + 'a {
        self.series.iter().filter(move |r| r.lobe == label)
    }

    pub fn surgeries(&self) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(|e| matches!(e, Event::Surgery { .. }))
    }

    pub fn aborted(&self) -> Option<&LobeSummary> {
        self.lobes
            .iter()
            .find(|l| matches!(l.outcome, LobeOutcome::Aborted { .. }))
    }
}

struct LobeRun {
    series: Vec<SeriesRow>,
    snapshots: Vec<Snapshot>,
    events: Vec<Event>,
    summary: LobeSummary,
    last: NeckpinchLattice,
    children: Option<Box<(LobeRun, LobeRun)>>,
}

impl LobeRun {
    fn flatten_into(self, out: &mut RunResult) {
        out.series.extend(self.series);
        out.snapshots.extend(self.snapshots);
        out.events.extend(self.events);
        out.lobes.push(self.summary);
        match self.children {
            Some(pair) => {
                let (left, right) = *pair;
                left.flatten_into(out);
                right.flatten_into(out);
            }
            None => out.finals.push(self.last),
        }
    }
}

fn child_label(parent: &str, side: &str, root: bool) -> String {
    if root {
        side.to_string()
    } else {
        format!("{parent}.{side}")
    }
}

fn remesh_size(lattice: &NeckpinchLattice, config: &FlowConfig) -> usize {
    let n = lattice.n();
    match config.min_axial {
        Some(min_a) => {
            let fit = (lattice.meridian_length() / min_a).floor() as usize + 1;
            fit.clamp(3, n)
        }
        None => n,
    }
}

/// Evolves a lattice until every lobe is extinct or a limit is hit.
///
/// The lattice's own label names the first lobe; surgery children are named
/// `left` and `right` (nested as `left.right` and so on).
pub fn evolve(lattice: &NeckpinchLattice, config: &FlowConfig) -> Result<RunResult> {
    config.validate()?;
    let label = if lattice.label().is_empty() {
        "main".to_string()
    } else {
        lattice.label().to_string()
    };
    let mut start = lattice.clone();
    start.set_label(label);
    let state = FlowState {
        t: 0.0,
        step: 0,
        lobe_steps: 0,
        lattice: start,
    };
    let run = run_lobe(state, config, true);
    let mut out = RunResult {
        series: Vec::new(),
        snapshots: Vec::new(),
        events: Vec::new(),
        lobes: Vec::new(),
        finals: Vec::new(),
    };
    run.flatten_into(&mut out);
    out.events.sort_by(|x, y| x.t().total_cmp(&y.t()));
    Ok(out)
}

fn run_lobe(mut st: FlowState, config: &FlowConfig, root: bool) -> LobeRun {
    let label = st.lattice.label().to_string();
    let t_start = st.t;
    let mut series = Vec::new();
    let mut snapshots = Vec::new();
    let mut events = Vec::new();
    let mut remeshed_now = false;

    let finish = |st: &FlowState,
                  outcome: LobeOutcome,
                  series: Vec<SeriesRow>,
                  mut snapshots: Vec<Snapshot>,
                  events: Vec<Event>,
                  children: Option<Box<(LobeRun, LobeRun)>>| {
        if snapshots.last().map(|s| s.step) != Some(st.step) {
            snapshots.push(Snapshot {
                step: st.step,
                t: st.t,
                lattice: st.lattice.clone(),
            });
        }
        LobeRun {
            series,
            snapshots,
            events,
            summary: LobeSummary {
                lobe: st.lattice.label().to_string(),
                t_start,
                t_end: st.t,
                steps: st.lobe_steps,
                outcome,
            },
            last: st.lattice.clone(),
            children,
        }
    };

    loop {
        // curvature at the current state; doubles as the first RK4 stage
        let rates = match rhs(&st.lattice, config.duals) {
            Ok(r) => r,
            Err(e) => {
                if !remeshed_now {
                    if let Ok(l) = resample(&st.lattice, remesh_size(&st.lattice, config)) {
                        st.lattice = l;
                        remeshed_now = true;
                        events.push(Event::Remesh {
                            t: st.t,
                            step: st.step,
                            lobe: label.clone(),
                            n: st.lattice.n(),
                            trigger: RemeshTrigger::OnDemand,
                        });
                        continue;
                    }
                }
                events.push(Event::Abort {
                    t: st.t,
                    step: st.step,
                    lobe: label.clone(),
                    error: e.to_string(),
                });
                let outcome = LobeOutcome::Aborted {
                    error: e.to_string(),
                };
                return finish(&st, outcome, series, snapshots, events, None);
            }
        };

        let s = st.lattice.s();
        let (argmin, s_min) = s
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        let volume = block_volume(&st.lattice).unwrap_or(f64::NAN);
        series.push(SeriesRow {
            t: st.t,
            lobe: label.clone(),
            s_min,
            rho_min: config.radius.rho(s_min),
            argmin: argmin + 1,
            volume,
            max_abs_rc: rates.field.max_abs_ricci(),
        });
        if config.snapshot_every > 0 && st.step % config.snapshot_every == 0 {
            snapshots.push(Snapshot {
                step: st.step,
                t: st.t,
                lattice: st.lattice.clone(),
            });
        }

        let s_max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if s_max <= config.extinction_threshold {
            events.push(Event::Extinction {
                t: st.t,
                step: st.step,
                lobe: label.clone(),
                lobe_steps: st.lobe_steps,
            });
            return finish(&st, LobeOutcome::Extinct, series, snapshots, events, None);
        }

        if let Some(pinch) = detect_pinch(&st.lattice, config.surgery_threshold) {
            match split_and_cap(&st.lattice, pinch.waist_a_index, config.surgery_method) {
                Ok(outcome) => {
                    let left_label = child_label(&label, "left", root);
                    let right_label = child_label(&label, "right", root);
                    events.push(Event::Surgery {
                        t: st.t,
                        step: st.step,
                        lobe: label.clone(),
                        waist_a_index: pinch.waist_a_index,
                        s_min,
                        method: config.surgery_method.name().to_string(),
                        children: vec![left_label.clone(), right_label.clone()],
                    });
                    for message in outcome.warnings {
                        events.push(Event::Warning {
                            t: st.t,
                            lobe: label.clone(),
                            message,
                        });
                    }
                    let mut left = outcome.left;
                    left.set_label(left_label);
                    let mut right = outcome.right;
                    right.set_label(right_label);
                    let child = |lattice: NeckpinchLattice| FlowState {
                        t: st.t,
                        step: st.step,
                        lobe_steps: 0,
                        lattice,
                    };
                    let (l_state, r_state) = (child(left), child(right));
                    let (l_run, r_run) = rayon::join(
                        || run_lobe(l_state, config, false),
                        || run_lobe(r_state, config, false),
                    );
                    let done = LobeOutcome::Surgery {
                        waist_a_index: pinch.waist_a_index,
                    };
                    return finish(
                        &st,
                        done,
                        series,
                        snapshots,
                        events,
                        Some(Box::new((l_run, r_run))),
                    );
                }
                Err(e) => {
                    events.push(Event::Abort {
                        t: st.t,
                        step: st.step,
                        lobe: label.clone(),
                        error: format!("surgery failed: {e}"),
                    });
                    let outcome = LobeOutcome::Aborted {
                        error: e.to_string(),
                    };
                    return finish(&st, outcome, series, snapshots, events, None);
                }
            }
        }

        if st.t >= config.t_max - 1e-9 || st.step >= config.step_max {
            events.push(Event::Stop {
                t: st.t,
                step: st.step,
                lobe: label.clone(),
                reason: if st.step >= config.step_max {
                    "step_max".into()
                } else {
                    "t_max".into()
                },
            });
            return finish(&st, LobeOutcome::Limit, series, snapshots, events, None);
        }

        let y = st.lattice.state();
        let stepped = rk4_step_with(&y, &rates.state(), config.dt, lattice_rhs(&st.lattice, config.duals))
            .and_then(|y1| st.lattice.with_state(&y1));
        match stepped {
            Ok(next) => {
                st.lattice = next;
                st.step += 1;
                st.lobe_steps += 1;
                st.t = t_start + st.lobe_steps as f64 * config.dt;
                remeshed_now = false;
            }
            Err(e) => {
                if !remeshed_now {
                    if let Ok(l) = resample(&st.lattice, remesh_size(&st.lattice, config)) {
                        st.lattice = l;
                        remeshed_now = true;
                        events.push(Event::Remesh {
                            t: st.t,
                            step: st.step,
                            lobe: label.clone(),
                            n: st.lattice.n(),
                            trigger: RemeshTrigger::OnDemand,
                        });
                        // the series row for this state is emitted again after the remesh
                        series.pop();
                        if snapshots.last().map(|s| s.step) == Some(st.step) {
                            snapshots.pop();
                        }
                        continue;
                    }
                }
                events.push(Event::Abort {
                    t: st.t,
                    step: st.step,
                    lobe: label.clone(),
                    error: e.to_string(),
                });
                let outcome = LobeOutcome::Aborted {
                    error: e.to_string(),
                };
                return finish(&st, outcome, series, snapshots, events, None);
            }
        }

        if st.lobe_steps % config.remesh_every == 0 {
            match resample(&st.lattice, remesh_size(&st.lattice, config)) {
                Ok(l) => {
                    st.lattice = l;
                    remeshed_now = true;
                    events.push(Event::Remesh {
                        t: st.t,
                        step: st.step,
                        lobe: label.clone(),
                        n: st.lattice.n(),
                        trigger: RemeshTrigger::Cadence,
                    });
                }
                Err(e) => events.push(Event::Warning {
                    t: st.t,
                    lobe: label.clone(),
                    message: format!("remesh skipped: {e}"),
                }),
            }
        }
    }
}
