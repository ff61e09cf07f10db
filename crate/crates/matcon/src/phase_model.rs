//! Phase-count characterization of gapless schedules.
//!
//! Jobs sharing one requirement vector form a class; within a class only the
//! number of scheduled jobs matters, with the longest members used first. A
//! gapless schedule is then fully described by how many jobs of each class
//! start in each phase (the interval between consecutive supply dates). This
//! module provides the class decomposition, a dynamic program over per-phase
//! count vectors deciding whether a gapless schedule exists, a decoder turning
//! count tables back into schedules, and a certificate builder/verifier for
//! the algebraic constraint families the count characterization satisfies.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{check_feasible, Instance, Qty, Schedule, Start, Time};

/// Jobs grouped by requirement vector, longest first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequirementClass {
    /// Requirement vector shared by all members.
    pub key: Vec<Qty>,
    /// Job indices sorted by processing time non-increasing, ties by index.
    pub members: Vec<usize>,
    /// `tau_prefix[y]` is the total processing time of the `y` longest members.
    pub tau_prefix: Vec<Time>,
}

/// One class per distinct requirement vector, ordered lexicographically by key.
pub fn requirement_classes(inst: &Instance) -> Vec<RequirementClass> {
    let mut by_key: Vec<(Vec<Qty>, Vec<usize>)> = Vec::new();
    for (j, job) in inst.jobs().iter().enumerate() {
        match by_key.iter_mut().find(|(k, _)| *k == job.a) {
            Some((_, members)) => members.push(j),
            None => by_key.push((job.a.clone(), vec![j])),
        }
    }
    by_key.sort_by(|(a, _), (b, _)| a.cmp(b));
    by_key
        .into_iter()
        .map(|(key, mut members)| {
            members.sort_by_key(|&j| (std::cmp::Reverse(inst.jobs()[j].p), j));
            let mut tau_prefix = Vec::with_capacity(members.len() + 1);
            tau_prefix.push(0);
            let mut acc = 0;
            for &j in &members {
                acc += inst.jobs()[j].p;
                tau_prefix.push(acc);
            }
            RequirementClass {
                key,
                members,
                tau_prefix,
            }
        })
        .collect()
}

/// Per-phase class counts: `x[w][s]` jobs of class `s` start in phase `w`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseCounts {
    pub x: Vec<Vec<u64>>,
}

/// The full variable assignment of the phase-count constraint system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseCertificate {
    /// Per-phase class counts, phase-major.
    pub x: Vec<Vec<u64>>,
    /// Prefix counts: `x_sigma[w][s] = sum over w' <= w of x[w'][s]`.
    pub x_sigma: Vec<Vec<u64>>,
    /// Resources available at the beginning of each phase, per resource.
    pub alpha: Vec<Vec<Qty>>,
    /// End time of the last job started in each phase (carried forward for
    /// empty phases).
    pub d: Vec<Time>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhaseError {
    #[error("dynamic program exceeds the state cap of {cap} states")]
    StateSpaceExceeded { cap: u64 },
    #[error("counts for class {class} exceed the class size {size}")]
    CountOverflow { class: usize, size: usize },
    #[error("schedule has idle time before {time}")]
    ScheduleHasIdle { time: Time },
    #[error("schedule is not feasible")]
    ScheduleInfeasible,
    #[error("phase count table has wrong shape")]
    ShapeMismatch,
}

/// Default cap on the number of DP states.
pub const DEFAULT_STATE_CAP: u64 = 10_000_000;

/// Estimated DP state count: product over classes of (size + 1), times the
/// number of phases. Saturates at `u64::MAX`.
pub fn state_space_estimate(inst: &Instance) -> u64 {
    let classes = requirement_classes(inst);
    let per_layer = classes.iter().fold(1u64, |acc, c| {
        acc.saturating_mul(c.members.len() as u64 + 1)
    });
    per_layer.saturating_mul(inst.supply_count().max(1) as u64)
}

/// Decides whether a gapless (non-idling from 0) schedule exists and returns
/// the witnessing per-phase class counts.
///
/// The state after phase `w` is the cumulative count vector over classes; the
/// jobs represented by a state are always the longest members of each class.
/// A transition into phase `w` is valid when (a) the cumulative consumption is
/// covered by the supply accumulated at the phase start, (b) the new jobs
/// start no earlier than the phase start, and (c) with the longest new job
/// placed last, every new job starts before the next supply date.
pub fn dp_gapless(inst: &Instance, state_cap: u64) -> Result<Option<PhaseCounts>, PhaseError> {
    if inst.job_count() == 0 {
        return Ok(Some(PhaseCounts {
            x: vec![Vec::new(); inst.supply_count()],
        }));
    }
    if inst.supply_count() == 0 {
        // Jobs exist but nothing is ever supplied.
        return Ok(None);
    }
    if state_space_estimate(inst) > state_cap {
        return Err(PhaseError::StateSpaceExceeded { cap: state_cap });
    }

    let classes = requirement_classes(inst);
    let q = inst.supply_count();
    let u = |w: usize| inst.supplies()[w].u; // 0-based phase start dates
    let r = inst.resources();
    // Cumulative supply at the start of each phase.
    let avail: Vec<Vec<Qty>> = (0..q).map(|w| inst.cumulative_supply_vec(u(w))).collect();

    // elapsed(x) and demand(x) follow from the counts alone.
    let elapsed = |x: &[u64]| -> Time {
        x.iter()
            .zip(&classes)
            .map(|(&c, cl)| cl.tau_prefix[c as usize])
            .sum()
    };
    let demand = |x: &[u64]| -> Vec<Qty> {
        let mut d = vec![0; r];
        for (&c, cl) in x.iter().zip(&classes) {
            for (di, ki) in d.iter_mut().zip(&cl.key) {
                *di += c * ki;
            }
        }
        d
    };

    type State = Vec<u64>;
    let zero: State = vec![0; classes.len()];
    let full: State = classes.iter().map(|c| c.members.len() as u64).collect();

    // Parent links for decoding: state in layer w -> predecessor in layer w-1.
    let mut layers: Vec<HashMap<State, State>> = Vec::with_capacity(q);
    let mut frontier: Vec<State> = vec![zero.clone()];

    for w in 0..q {
        let mut layer: HashMap<State, State> = HashMap::new();
        let mut order: Vec<State> = Vec::new();
        let mut prev = frontier.clone();
        prev.sort();
        for y in prev {
            let e_y = elapsed(&y);
            // Enumerate supersets x >= y by recursive extension per class.
            let mut stack = vec![(0usize, y.clone())];
            while let Some((k, x)) = stack.pop() {
                if k == classes.len() {
                    if x == y {
                        // Empty phase: always allowed.
                        if !layer.contains_key(&x) {
                            layer.insert(x.clone(), y.clone());
                            order.push(x);
                        }
                        continue;
                    }
                    // Resource availability during phase w is constant.
                    let need = demand(&x);
                    if need.iter().zip(&avail[w]).any(|(n, a)| n > a) {
                        continue;
                    }
                    // New jobs start at or after the phase start.
                    if e_y < u(w) {
                        continue;
                    }
                    // With the longest new job last, every new start precedes
                    // the next supply date.
                    if w + 1 < q {
                        let max_new_p = x
                            .iter()
                            .zip(&y)
                            .zip(&classes)
                            .filter(|((xc, yc), _)| xc > yc)
                            .map(|((_, &yc), cl)| inst.jobs()[cl.members[yc as usize]].p)
                            .max()
                            .expect("x != y");
                        if elapsed(&x) - max_new_p >= u(w + 1) {
                            continue;
                        }
                    }
                    if !layer.contains_key(&x) {
                        layer.insert(x.clone(), y.clone());
                        order.push(x);
                    }
                    continue;
                }
                let max = classes[k].members.len() as u64;
                for c in x[k]..=max {
                    let mut next = x.clone();
                    next[k] = c;
                    stack.push((k + 1, next));
                }
            }
        }
        frontier = order;
        layers.push(layer);
    }

    if !layers[q - 1].contains_key(&full) {
        return Ok(None);
    }

    // Walk parents back to recover per-phase increments.
    let mut cum: Vec<State> = vec![full.clone()];
    let mut cur = full;
    for w in (0..q).rev() {
        let parent = layers[w][&cur].clone();
        if w > 0 {
            cum.push(parent.clone());
        }
        cur = parent;
    }
    cum.push(zero);
    cum.reverse(); // cum[w] = cumulative counts after phase w, cum[0] = zero
    let x: Vec<Vec<u64>> = (0..q)
        .map(|w| {
            cum[w + 1]
                .iter()
                .zip(&cum[w])
                .map(|(a, b)| a - b)
                .collect()
        })
        .collect();
    let counts = PhaseCounts { x };
    debug_assert!({
        let sched = decode_counts(inst, &counts).expect("witness decodes");
        check_feasible(inst, &sched).unwrap().feasible
    });
    Ok(Some(counts))
}

/// Turns per-phase class counts into the concrete back-to-back schedule: class
/// members are drawn longest-first across phases; within a phase the selected
/// jobs run in class order with the phase's single longest selected job moved
/// to the end; phases concatenate without idle.
pub fn decode_counts(inst: &Instance, counts: &PhaseCounts) -> Result<Schedule, PhaseError> {
    let classes = requirement_classes(inst);
    let mut taken = vec![0usize; classes.len()];
    for row in &counts.x {
        if row.len() != classes.len() {
            return Err(PhaseError::ShapeMismatch);
        }
    }
    for (s, cl) in classes.iter().enumerate() {
        let total: u64 = counts.x.iter().map(|row| row[s]).sum();
        if total > cl.members.len() as u64 {
            return Err(PhaseError::CountOverflow {
                class: s,
                size: cl.members.len(),
            });
        }
    }

    let mut t: Time = 0;
    let mut starts: Vec<Start> = Vec::with_capacity(inst.job_count());
    for row in &counts.x {
        let mut phase_jobs: Vec<usize> = Vec::new();
        for (s, &c) in row.iter().enumerate() {
            for _ in 0..c {
                phase_jobs.push(classes[s].members[taken[s]]);
                taken[s] += 1;
            }
        }
        if let Some(pos) = phase_jobs
            .iter()
            .enumerate()
            .max_by_key(|(i, &j)| (inst.jobs()[j].p, std::cmp::Reverse(*i)))
            .map(|(i, _)| i)
        {
            let longest = phase_jobs.remove(pos);
            phase_jobs.push(longest);
        }
        for j in phase_jobs {
            starts.push(Start { job: j, start: t });
            t += inst.jobs()[j].p;
        }
    }
    Ok(Schedule::new(starts))
}

/// Extracts the full certificate from a feasible non-idling-from-0 schedule:
/// counts by start-based phase attribution, balance recurrences, and phase
/// endpoints.
pub fn build_certificate(
    inst: &Instance,
    sched: &Schedule,
) -> Result<PhaseCertificate, PhaseError> {
    let report = check_feasible(inst, sched).map_err(|_| PhaseError::ScheduleInfeasible)?;
    if !report.feasible {
        return Err(PhaseError::ScheduleInfeasible);
    }
    let mut by_start: Vec<Start> = sched.starts.clone();
    by_start.sort_by_key(|s| s.start);
    let mut t = 0;
    for s in &by_start {
        if s.start != t {
            return Err(PhaseError::ScheduleHasIdle { time: s.start });
        }
        t += inst.jobs()[s.job].p;
    }

    let classes = requirement_classes(inst);
    let class_of: HashMap<usize, usize> = classes
        .iter()
        .enumerate()
        .flat_map(|(s, c)| c.members.iter().map(move |&j| (j, s)))
        .collect();
    let q = inst.supply_count();
    let r = inst.resources();

    let mut x = vec![vec![0u64; classes.len()]; q];
    let mut d = vec![0u64; q];
    let mut seen = vec![false; q];
    for s in &by_start {
        // Phase of a start time: last supply date <= start.
        let w = inst
            .supplies()
            .iter()
            .rposition(|sup| sup.u <= s.start)
            .expect("normalized instances supply at time 0");
        x[w][class_of[&s.job]] += 1;
        let end = s.start + inst.jobs()[s.job].p;
        if end > d[w] {
            d[w] = end;
        }
        seen[w] = true;
    }
    for w in 0..q {
        if !seen[w] {
            d[w] = if w == 0 { 0 } else { d[w - 1] };
        }
    }

    let mut x_sigma = vec![vec![0u64; classes.len()]; q];
    for w in 0..q {
        for s in 0..classes.len() {
            x_sigma[w][s] = x[w][s] + if w > 0 { x_sigma[w - 1][s] } else { 0 };
        }
    }

    let mut alpha = vec![vec![0u64; r]; q];
    for w in 0..q {
        for i in 0..r {
            let consumed: u64 = if w > 0 {
                x[w - 1]
                    .iter()
                    .zip(&classes)
                    .map(|(&c, cl)| c * cl.key[i])
                    .sum()
            } else {
                0
            };
            alpha[w][i] = if w == 0 {
                inst.supplies()[0].b[i]
            } else {
                alpha[w - 1][i] + inst.supplies()[w].b[i] - consumed
            };
        }
    }

    Ok(PhaseCertificate { x, x_sigma, alpha, d })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintFamily {
    PrefixConsistency,
    Coverage,
    Balance,
    Availability,
    Endpoint,
    NoGap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintViolation {
    pub family: ConstraintFamily,
    /// 1-based phase index.
    pub phase: usize,
    /// Class index for count families, resource index for balance and
    /// availability.
    pub index: Option<usize>,
}

/// Checks the six constraint families of the phase-count system. Returns true
/// together with an empty violation list iff every family holds.
pub fn verify_certificate(
    inst: &Instance,
    cert: &PhaseCertificate,
) -> (bool, Vec<ConstraintViolation>) {
    let classes = requirement_classes(inst);
    let q = inst.supply_count();
    let r = inst.resources();
    let nc = classes.len();
    let mut violations = Vec::new();

    let shape_ok = cert.x.len() == q
        && cert.x_sigma.len() == q
        && cert.alpha.len() == q
        && cert.d.len() == q
        && cert.x.iter().all(|row| row.len() == nc)
        && cert.x_sigma.iter().all(|row| row.len() == nc)
        && cert.alpha.iter().all(|row| row.len() == r);
    if !shape_ok {
        violations.push(ConstraintViolation {
            family: ConstraintFamily::Coverage,
            phase: 0,
            index: None,
        });
        return (false, violations);
    }

    // Prefix consistency.
    for w in 0..q {
        for s in 0..nc {
            let expected: u64 = (0..=w).map(|w2| cert.x[w2][s]).sum();
            if cert.x_sigma[w][s] != expected {
                violations.push(ConstraintViolation {
                    family: ConstraintFamily::PrefixConsistency,
                    phase: w + 1,
                    index: Some(s),
                });
            }
        }
    }
    // Coverage.
    for (s, cl) in classes.iter().enumerate() {
        let total: u64 = (0..q).map(|w| cert.x[w][s]).sum();
        if total != cl.members.len() as u64 {
            violations.push(ConstraintViolation {
                family: ConstraintFamily::Coverage,
                phase: q,
                index: Some(s),
            });
        }
    }
    // Balance recurrence.
    for w in 0..q {
        for i in 0..r {
            let expected = if w == 0 {
                inst.supplies()[0].b[i]
            } else {
                let consumed: u64 = cert.x[w - 1]
                    .iter()
                    .zip(&classes)
                    .map(|(&c, cl)| c * cl.key[i])
                    .sum();
                match (cert.alpha[w - 1][i] + inst.supplies()[w].b[i]).checked_sub(consumed) {
                    Some(v) => v,
                    None => {
                        violations.push(ConstraintViolation {
                            family: ConstraintFamily::Balance,
                            phase: w + 1,
                            index: Some(i),
                        });
                        continue;
                    }
                }
            };
            if cert.alpha[w][i] != expected {
                violations.push(ConstraintViolation {
                    family: ConstraintFamily::Balance,
                    phase: w + 1,
                    index: Some(i),
                });
            }
        }
    }
    // Availability: alpha_w >= supplied quantity for phases 2..q.
    for w in 1..q {
        for i in 0..r {
            if cert.alpha[w][i] < inst.supplies()[w].b[i] {
                violations.push(ConstraintViolation {
                    family: ConstraintFamily::Availability,
                    phase: w + 1,
                    index: Some(i),
                });
            }
        }
    }
    // Endpoint equation: d_w equals the total processing time of the selected
    // prefix, using the concave per-class tau tables.
    for w in 0..q {
        let expected: Option<Time> = (0..nc)
            .map(|s| {
                let y = cert.x_sigma[w][s] as usize;
                classes[s].tau_prefix.get(y).copied()
            })
            .sum();
        if expected != Some(cert.d[w]) && !(cert.d[w] == if w == 0 { 0 } else { cert.d[w - 1] }
            && cert.x[w].iter().all(|&c| c == 0))
        {
            violations.push(ConstraintViolation {
                family: ConstraintFamily::Endpoint,
                phase: w + 1,
                index: None,
            });
        }
    }
    // No-gap relaxation, checked up to the last non-empty phase.
    let last_nonempty = (0..q).rev().find(|&w| cert.x[w].iter().any(|&c| c > 0));
    if let Some(last) = last_nonempty {
        for w in 0..last {
            if cert.d[w] + 1 < inst.supplies()[w + 1].u {
                violations.push(ConstraintViolation {
                    family: ConstraintFamily::NoGap,
                    phase: w + 1,
                    index: None,
                });
            }
        }
    }

    (violations.is_empty(), violations)
}

/// [`NiSolver`] over [`dp_gapless`] + [`decode_counts`]. Shifting supplies
/// only merges phases, so checking [`state_space_estimate`] once against the
/// cap covers every probe of the front-idle search; the solver panics if the
/// cap is exceeded anyway.
#[derive(Debug, Clone, Copy)]
pub struct PhaseDpSolver {
    pub state_cap: u64,
}

impl Default for PhaseDpSolver {
    fn default() -> Self {
        Self {
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

impl crate::gapless::NiSolver for PhaseDpSolver {
    fn solve_ni(&self, inst: &Instance) -> Option<Schedule> {
        dp_gapless(inst, self.state_cap)
            .expect("state space checked against the cap")
            .map(|counts| decode_counts(inst, &counts).expect("dp witness decodes"))
    }

    fn name(&self) -> &'static str {
        "phase-dp"
    }
}
