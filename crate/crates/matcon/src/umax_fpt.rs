//! Non-idling feasibility for a single resource by enumerating break points.
//!
//! A gapless schedule is determined, up to exchanges, by the set of times in
//! `{1, ..., u_max}` at which jobs start. For every candidate break set the
//! solver greedily fills each gap with the cheapest job of matching length,
//! places one job long enough to bridge past `u_max`, appends the rest, and
//! lets the feasibility checker arbitrate.

use std::collections::HashMap;

use thiserror::Error;

use crate::gapless::NiSolver;
use crate::model::{check_feasible, Instance, Schedule, Time};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UmaxError {
    #[error("the break-set solver requires exactly one resource, got {resources}")]
    MultiResource { resources: usize },
}

/// Visits all subsets of `{1, ..., u_max}` in increasing cardinality, then
/// lexicographic order, stopping early when `f` returns true.
fn for_each_break_set(u_max: Time, mut f: impl FnMut(&[Time]) -> bool) {
    let m = u_max;
    for k in 0..=m as usize {
        let mut combo: Vec<Time> = (1..=k as Time).collect();
        'subsets: loop {
            if f(&combo) {
                return;
            }
            // Advance to the next k-combination of {1..m} in lex order.
            let mut i = k;
            while i > 0 {
                i -= 1;
                if combo[i] < m - (k - 1 - i) as Time {
                    combo[i] += 1;
                    for j in i + 1..k {
                        combo[j] = combo[j - 1] + 1;
                    }
                    continue 'subsets;
                }
            }
            break;
        }
    }
}

/// Finds a feasible non-idling-from-0 schedule for a single-resource instance
/// iff one exists, in `O(2^{u_max} poly(n))` time.
pub fn solve_ni_subsets(inst: &Instance) -> Result<Option<Schedule>, UmaxError> {
    if inst.resources() != 1 {
        return Err(UmaxError::MultiResource {
            resources: inst.resources(),
        });
    }
    if inst.job_count() == 0 {
        return Ok(Some(Schedule::default()));
    }

    let u_max = inst.u_max();
    // Jobs bucketed by processing time, each bucket sorted by requirement
    // ascending, ties by index.
    let mut buckets: HashMap<Time, Vec<usize>> = HashMap::new();
    for (j, job) in inst.jobs().iter().enumerate() {
        buckets.entry(job.p).or_default().push(j);
    }
    for bucket in buckets.values_mut() {
        bucket.sort_by_key(|&j| (inst.jobs()[j].a[0], j));
    }
    // Fixed tail order for the jobs left after the break points.
    let mut tail_sorted: Vec<usize> = (0..inst.job_count()).collect();
    tail_sorted.sort_by_key(|&j| (inst.jobs()[j].a[0], j));

    let mut witness: Option<Schedule> = None;
    for_each_break_set(u_max, |breaks| {
        let mut scheduled = vec![false; inst.job_count()];
        let mut order: Vec<usize> = Vec::with_capacity(inst.job_count());
        let mut prev: Time = 0;
        let mut ok = true;
        for &r_i in breaks {
            let gap = r_i - prev;
            let pick = buckets
                .get(&gap)
                .and_then(|b| b.iter().copied().find(|&j| !scheduled[j]));
            match pick {
                Some(j) => {
                    scheduled[j] = true;
                    order.push(j);
                    prev = r_i;
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            return false;
        }
        // One job must bridge from the last break point past u_max.
        if order.len() < inst.job_count() {
            let needed = u_max - prev;
            let bridge = tail_sorted
                .iter()
                .copied()
                .find(|&j| !scheduled[j] && inst.jobs()[j].p >= needed);
            match bridge {
                Some(j) => {
                    scheduled[j] = true;
                    order.push(j);
                }
                None => return false,
            }
        }
        for &j in &tail_sorted {
            if !scheduled[j] {
                order.push(j);
            }
        }
        let sched = Schedule::gapless(inst, &order, 0);
        if check_feasible(inst, &sched).expect("order covers all jobs").feasible {
            witness = Some(sched);
            true
        } else {
            false
        }
    });
    Ok(witness)
}

/// [`NiSolver`] over [`solve_ni_subsets`]; panics on multi-resource input.
#[derive(Debug, Default, Clone, Copy)]
pub struct SubsetSolver;

impl NiSolver for SubsetSolver {
    fn solve_ni(&self, inst: &Instance) -> Option<Schedule> {
        solve_ni_subsets(inst).expect("subset solver requires a single resource")
    }

    fn name(&self) -> &'static str {
        "umax-fpt"
    }
}
