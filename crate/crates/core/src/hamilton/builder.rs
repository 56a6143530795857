use std::fmt;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::{HamiltonFailure, HamiltonInstance, Location};
use crate::rng::SimRng;

/// What one reveal did.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StepCase {
    /// `y = s_P` in the main phase.
    Skip,
    Extend,
    Merge,
    Rotate,
    /// Rotation that also pulls an unused vertex onto the path.
    RotateAbsorb,
    Advance,
    EndClose,
    EndRotate,
    EndMerge,
}

impl StepCase {
    pub const ALL: [StepCase; 9] = [
        StepCase::Skip,
        StepCase::Extend,
        StepCase::Merge,
        StepCase::Rotate,
        StepCase::RotateAbsorb,
        StepCase::Advance,
        StepCase::EndClose,
        StepCase::EndRotate,
        StepCase::EndMerge,
    ];

    pub fn label(self) -> &'static str {
        match self {
            StepCase::Skip => "SKIP",
            StepCase::Extend => "1",
            StepCase::Merge => "2a",
            StepCase::Rotate => "2b",
            StepCase::RotateAbsorb => "2c",
            StepCase::Advance => "ADV",
            StepCase::EndClose => "END-CLOSE",
            StepCase::EndRotate => "END-ROT",
            StepCase::EndMerge => "END-MERGE",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for StepCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepOutcome {
    pub case: StepCase,
    /// `f_P` before the step.
    pub f: usize,
    /// The revealed `out(f_P)`.
    pub y: usize,
    /// Vertex taken from U by a 2c rotation.
    pub absorbed: Option<usize>,
}

/// One main-phase reveal (U ≠ ∅). The first applicable case fires.
pub fn step(inst: &mut HamiltonInstance, rng: &mut SimRng) -> Result<StepOutcome, HamiltonFailure> {
    let st = &inst.state;
    debug_assert!(st.unused_count() > 0, "main phase needs U ≠ ∅");
    let f = st.finish();
    let y = inst
        .lists
        .next(f, rng)
        .ok_or(HamiltonFailure::ListExhausted { vertex: f })?;
    let st = &mut inst.state;
    let threshold = st.two_alpha_n();
    let mut absorbed = None;
    let case = if y == st.start() {
        StepCase::Skip
    } else if st.unused_count() as f64 >= threshold {
        if st.in_unused(y) {
            st.extend(y, &inst.ins);
            StepCase::Extend
        } else {
            StepCase::Advance
        }
    } else {
        match st.location(y) {
            Location::Cycle(_) => {
                st.merge(y);
                StepCase::Merge
            }
            Location::Path(_)
                if st.cycle().is_empty() && far_enough(st.distance_to_finish(y), threshold) =>
            {
                let x = st.pi(y).expect("y is not s_P");
                if st.in_ubar(x) {
                    let u = inst
                        .ins
                        .holders(x)
                        .iter()
                        .map(|&u| u as usize)
                        .find(|&u| st.in_unused(u))
                        .expect("x ∈ Ū* has an unused holder");
                    st.rotate(y, Some(u), &inst.ins);
                    absorbed = Some(u);
                    StepCase::RotateAbsorb
                } else {
                    st.rotate(y, None, &inst.ins);
                    StepCase::Rotate
                }
            }
            _ => StepCase::Advance,
        }
    };
    Ok(StepOutcome {
        case,
        f,
        y,
        absorbed,
    })
}

fn far_enough(distance: Option<usize>, threshold: f64) -> bool {
    distance.is_some_and(|d| d as f64 >= threshold)
}

/// One reveal once P ∪ C covers every vertex. With C ≠ Λ a hit on C merges;
/// with C = Λ a hit on `s_P` closes the cycle and a hit elsewhere on P
/// rotates, subject to the 2αn distance rule when `strict`.
///
/// With C = Λ and `f_P ∈ IN(s_P)` the edge `(f_P, s_P)` is already available
/// and the cycle closes without a reveal; that step still counts as a trial.
pub fn endgame_step(
    inst: &mut HamiltonInstance,
    strict: bool,
    rng: &mut SimRng,
) -> Result<StepOutcome, HamiltonFailure> {
    let st = &inst.state;
    debug_assert_eq!(st.unused_count(), 0, "endgame needs U = ∅");
    let f = st.finish();
    if st.cycle().is_empty() && inst.ins.contains(st.start(), f) {
        let y = st.start();
        return Ok(StepOutcome {
            case: StepCase::EndClose,
            f,
            y,
            absorbed: None,
        });
    }
    let y = inst
        .lists
        .next(f, rng)
        .ok_or(HamiltonFailure::ListExhausted { vertex: f })?;
    let st = &mut inst.state;
    let case = if !st.cycle().is_empty() {
        if matches!(st.location(y), Location::Cycle(_)) {
            st.merge(y);
            StepCase::EndMerge
        } else {
            StepCase::Advance
        }
    } else if y == st.start() {
        StepCase::EndClose
    } else if !strict || far_enough(st.distance_to_finish(y), st.two_alpha_n()) {
        st.rotate(y, None, &inst.ins);
        StepCase::EndRotate
    } else {
        StepCase::Advance
    };
    Ok(StepOutcome {
        case,
        f,
        y,
        absorbed: None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuilderOptions {
    /// Keep the 2αn distance rule for endgame rotations.
    pub strict_endgame: bool,
    /// Maximum number of reveals.
    pub budget: u64,
    /// Check every invariant after every step and panic on failure; slow.
    pub verify_each_step: bool,
    /// Check the partition, the cycle floor and the reveal cap after every
    /// step, recording failures in the stats. O(n) per step.
    pub check_structure: bool,
    pub trace: bool,
}

impl BuilderOptions {
    pub const DEFAULT_BUDGET_FACTOR: f64 = 20.0;

    pub fn new(n: usize) -> Self {
        Self::with_budget_factor(n, Self::DEFAULT_BUDGET_FACTOR)
    }

    pub fn with_budget_factor(n: usize, factor: f64) -> Self {
        BuilderOptions {
            strict_endgame: true,
            budget: (factor * n as f64).ceil() as u64,
            verify_each_step: false,
            check_structure: true,
            trace: false,
        }
    }
}

/// Reveal counts. `per_level[i]` counts reveals made while |P| + |C| = i.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub per_level: Vec<u64>,
    pub endgame_trials: u64,
    pub total: u64,
    /// Indexed like [`StepCase::ALL`].
    pub case_counts: [u64; 9],
    /// (|U|, |Ū*|) at the start and after every change of U.
    pub snapshots: Vec<(usize, usize)>,
    /// Steps after which a structural check failed.
    pub structure_failures: u64,
    /// Message of the first such failure.
    pub first_failure: Option<String>,
}

impl TrialStats {
    pub fn new(n: usize) -> Self {
        TrialStats {
            per_level: vec![0; n + 1],
            ..Default::default()
        }
    }

    pub fn count(&self, case: StepCase) -> u64 {
        self.case_counts[case.slot()]
    }

    /// Total equals the per-level reveals plus the endgame reveals.
    pub fn is_consistent(&self) -> bool {
        self.total == self.per_level.iter().sum::<u64>() + self.endgame_trials
            && self.total == self.case_counts.iter().sum::<u64>()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub t: u64,
    pub f: usize,
    pub y: usize,
    pub case: StepCase,
    pub u: usize,
    pub c: usize,
    pub p: usize,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {} {} {}",
            self.t, self.f, self.y, self.case, self.u, self.c, self.p
        )
    }
}

#[derive(Clone, Debug)]
pub struct BuilderRun {
    /// The Hamilton cycle as a vertex order starting at `s_P`.
    pub result: Result<Vec<usize>, HamiltonFailure>,
    pub stats: TrialStats,
    pub trace: Vec<TraceEntry>,
}

impl BuilderRun {
    pub fn succeeded(&self) -> bool {
        self.result.is_ok()
    }

    /// Trace lines followed by snapshot lines.
    pub fn write_trace(&self, mut w: impl Write) -> io::Result<()> {
        for e in &self.trace {
            writeln!(w, "{e}")?;
        }
        for (u, ubar) in &self.stats.snapshots {
            writeln!(w, "{u} {ubar}")?;
        }
        Ok(())
    }
}

/// Runs until the cycle closes, a list runs out, or the budget is spent.
pub fn run_builder(
    inst: &mut HamiltonInstance,
    opts: &BuilderOptions,
    rng: &mut SimRng,
) -> BuilderRun {
    let n = inst.state.n();
    let mut stats = TrialStats::new(n);
    let mut trace = Vec::new();
    stats
        .snapshots
        .push((inst.state.unused_count(), inst.state.ubar_size()));
    let result = loop {
        if stats.total >= opts.budget {
            break Err(HamiltonFailure::BudgetExceeded {
                budget: opts.budget,
            });
        }
        let level = inst.state.progress();
        let main_phase = inst.state.unused_count() > 0;
        let outcome = if main_phase {
            step(inst, rng)
        } else {
            endgame_step(inst, opts.strict_endgame, rng)
        };
        let outcome = match outcome {
            Ok(o) => o,
            Err(e) => break Err(e),
        };
        stats.total += 1;
        if main_phase {
            stats.per_level[level] += 1;
        } else {
            stats.endgame_trials += 1;
        }
        stats.case_counts[outcome.case.slot()] += 1;
        let st = &inst.state;
        if st.progress() != level {
            stats.snapshots.push((st.unused_count(), st.ubar_size()));
        }
        if opts.trace {
            trace.push(TraceEntry {
                t: stats.total,
                f: outcome.f,
                y: outcome.y,
                case: outcome.case,
                u: st.unused_count(),
                c: st.cycle().len(),
                p: st.path().len(),
            });
        }
        if opts.check_structure {
            let floor = main_phase || opts.strict_endgame;
            let capped = match inst.lists.cap() {
                Some(cap) if inst.lists.revealed(outcome.f).len() > cap => {
                    Err(format!("list of {} over its cap", outcome.f))
                }
                _ => Ok(()),
            };
            if let Err(e) = inst.state.check_structure(floor).and(capped) {
                stats.structure_failures += 1;
                stats.first_failure.get_or_insert(e);
            }
        }
        if opts.verify_each_step {
            verify_step(inst, opts, main_phase, level, &outcome);
        }
        if outcome.case == StepCase::EndClose {
            let cycle = inst.state.hamilton_cycle().expect("closing needs P = [n]");
            break Ok(cycle);
        }
    };
    BuilderRun {
        result,
        stats,
        trace,
    }
}

fn verify_step(
    inst: &HamiltonInstance,
    opts: &BuilderOptions,
    main_phase: bool,
    level: usize,
    out: &StepOutcome,
) {
    let st = &inst.state;
    let floor = main_phase || opts.strict_endgame;
    if let Err(e) = st.check_invariants(&inst.ins, floor) {
        panic!("builder invariant broken after {:?}: {e}", out.case);
    }
    let grew = matches!(out.case, StepCase::Extend | StepCase::RotateAbsorb);
    let expect = level + usize::from(grew);
    assert_eq!(st.progress(), expect, "progress after {:?}", out.case);
    let path = st.path();
    for w in path.windows(2) {
        assert!(
            inst.edge_allowed(w[0] as usize, w[1] as usize),
            "illegal path edge {w:?}"
        );
    }
    let c = st.cycle();
    for i in 0..c.len() {
        let (a, b) = (c[i] as usize, c[(i + 1) % c.len()] as usize);
        assert!(inst.edge_allowed(a, b), "illegal cycle edge ({a},{b})");
    }
    if let Some(cap) = inst.lists.cap() {
        for v in 0..st.n() {
            let r = inst.lists.revealed(v);
            assert!(r.len() <= cap, "list of {v} over its cap");
            if let Some(sets) = inst.lists.candidate_sets() {
                assert!(
                    r.iter().all(|&w| sets.in_b(v, w as usize)),
                    "reveal outside B({v})"
                );
            }
        }
    }
}

/// `order` visits every vertex of `0..n` exactly once and each hop, including
/// the one back to the start, is allowed.
pub fn validate_hamilton_cycle(
    order: &[usize],
    n: usize,
    allowed: impl Fn(usize, usize) -> bool,
) -> Result<(), String> {
    if order.len() != n {
        return Err(format!("cycle has {} vertices, expected {n}", order.len()));
    }
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n {
            return Err(format!("vertex {v} out of range"));
        }
        if std::mem::replace(&mut seen[v], true) {
            return Err(format!("vertex {v} visited twice"));
        }
    }
    for i in 0..n {
        let (a, b) = (order[i], order[(i + 1) % n]);
        if !allowed(a, b) {
            return Err(format!("hop ({a},{b}) is not an allowed edge"));
        }
    }
    Ok(())
}
