//! Ground-truth solvers for tiny instances.
//!
//! Three independent routes: permutation search with front idle (the
//! reference optimum), an exhaustive start-time search allowing arbitrary
//! interior idle (validating that front-idle-only schedules suffice), and a
//! memoized depth-first prefix search for non-idling feasibility.

use std::collections::HashSet;

use thiserror::Error;

use crate::gapless::{NiSolver, SolveResult};
use crate::model::{makespan, Instance, Qty, Schedule, Start, Time};
use crate::phase_model::requirement_classes;

#[derive(Debug, Clone, Copy)]
pub struct Caps {
    /// Maximum job count for the permutation oracle.
    pub permutation_jobs: usize,
    /// Maximum job count for the start-time oracle.
    pub timepoint_jobs: usize,
    /// Maximum search horizon (u_max + total processing) for the start-time
    /// oracle.
    pub timepoint_horizon: Time,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            permutation_jobs: 8,
            timepoint_jobs: 5,
            timepoint_horizon: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance exceeds the oracle cap: {what}")]
    CapExceeded { what: String },
}

/// Minimal feasible front idle for a fixed job order, or `None` when the order
/// cannot be completed at any idle (total supply short on some resource).
fn min_idle_for_order(inst: &Instance, order: &[usize]) -> Option<Time> {
    let r = inst.resources();
    let mut demand = vec![0u64; r];
    let mut offset: Time = 0;
    let mut g: Time = 0;
    for &j in order {
        for (d, a) in demand.iter_mut().zip(&inst.jobs()[j].a) {
            *d += a;
        }
        // Earliest time at which cumulative supply covers the demand so far.
        let mut covered_at: Option<Time> = if demand.iter().all(|&d| d == 0) {
            Some(0)
        } else {
            None
        };
        if covered_at.is_none() {
            let mut acc = vec![0u64; r];
            for s in inst.supplies() {
                for (a, q) in acc.iter_mut().zip(&s.b) {
                    *a += q;
                }
                if acc.iter().zip(&demand).all(|(a, d)| a >= d) {
                    covered_at = Some(s.u);
                    break;
                }
            }
        }
        match covered_at {
            None => return None,
            Some(t) => g = g.max(t.saturating_sub(offset)),
        }
        offset += inst.jobs()[j].p;
    }
    Some(g)
}

/// All orderings of `0..n` in lexicographic order.
pub fn all_orders(n: usize) -> Vec<Vec<usize>> {
    let mut result = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let mut used = vec![false; n];
    fn rec(
        n: usize,
        current: &mut Vec<usize>,
        used: &mut Vec<bool>,
        result: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == n {
            result.push(current.clone());
            return;
        }
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                current.push(j);
                rec(n, current, used, result);
                current.pop();
                used[j] = false;
            }
        }
    }
    rec(n, &mut current, &mut used, &mut result);
    result
}

/// Minimizes the makespan over all job orders, each paired with its minimal
/// feasible front idle. Orders are scanned in lexicographic index order and
/// only strict improvements are kept, so the witness carries the
/// lexicographically smallest optimal order.
pub fn solve_exact_permutations(
    inst: &Instance,
    caps: &Caps,
) -> Result<Option<SolveResult>, OracleError> {
    let n = inst.job_count();
    if n > caps.permutation_jobs {
        return Err(OracleError::CapExceeded {
            what: format!("{n} jobs > permutation cap {}", caps.permutation_jobs),
        });
    }
    if n == 0 {
        return Ok(Some(SolveResult {
            makespan: 0,
            schedule: Schedule::default(),
            front_idle: 0,
            algorithm: "oracle-permutations".to_string(),
        }));
    }
    let total_p = inst.total_processing();
    let mut best: Option<(Time, Vec<usize>)> = None;
    for order in all_orders(n) {
        if let Some(g) = min_idle_for_order(inst, &order) {
            let cmax = g + total_p;
            if best.as_ref().map_or(true, |(b, _)| cmax < *b) {
                best = Some((cmax, order));
            }
        }
    }
    Ok(best.map(|(cmax, order)| {
        let g = cmax - total_p;
        let schedule = Schedule::gapless(inst, &order, g);
        SolveResult {
            makespan: cmax,
            schedule,
            front_idle: g,
            algorithm: "oracle-permutations".to_string(),
        }
    }))
}

/// Exhaustive search over integer start times in `[0, u_max + total
/// processing]`, allowing arbitrary interior idle. Implemented as a reachable
/// set over (scheduled-jobs mask, busy-until time) explored in start order.
pub fn solve_exact_timepoints(
    inst: &Instance,
    caps: &Caps,
) -> Result<Option<SolveResult>, OracleError> {
    let n = inst.job_count();
    if n > caps.timepoint_jobs {
        return Err(OracleError::CapExceeded {
            what: format!("{n} jobs > timepoint cap {}", caps.timepoint_jobs),
        });
    }
    if n == 0 {
        return Ok(Some(SolveResult {
            makespan: 0,
            schedule: Schedule::default(),
            front_idle: 0,
            algorithm: "oracle-timepoints".to_string(),
        }));
    }
    let horizon = inst.u_max() + inst.total_processing();
    if horizon > caps.timepoint_horizon {
        return Err(OracleError::CapExceeded {
            what: format!("horizon {horizon} > cap {}", caps.timepoint_horizon),
        });
    }

    let r = inst.resources();
    let full: u32 = (1 << n) - 1;
    let demand_of = |mask: u32| -> Vec<Qty> {
        let mut d = vec![0; r];
        for j in 0..n {
            if mask & (1 << j) != 0 {
                for (di, a) in d.iter_mut().zip(&inst.jobs()[j].a) {
                    *di += a;
                }
            }
        }
        d
    };

    // parent[(mask, end)] = (previous mask, previous end, job, start)
    let mut parents: std::collections::HashMap<(u32, Time), (u32, Time, usize, Time)> =
        std::collections::HashMap::new();
    let mut frontier: Vec<(u32, Time)> = vec![(0, 0)];
    let mut seen: HashSet<(u32, Time)> = frontier.iter().copied().collect();
    let mut best_full: Option<(u32, Time)> = None;

    while let Some((mask, end)) = frontier.pop() {
        if mask == full {
            if best_full.map_or(true, |(_, b)| end < b) {
                best_full = Some((mask, end));
            }
            continue;
        }
        let base_demand = demand_of(mask);
        for j in 0..n {
            if mask & (1 << j) != 0 {
                continue;
            }
            let mut need = base_demand.clone();
            for (ni, a) in need.iter_mut().zip(&inst.jobs()[j].a) {
                *ni += a;
            }
            for t in end..=horizon {
                let supply = inst.cumulative_supply_vec(t);
                if need.iter().zip(&supply).all(|(n, s)| n <= s) {
                    let next = (mask | (1 << j), t + inst.jobs()[j].p);
                    if seen.insert(next) {
                        parents.insert(next, (mask, end, j, t));
                        frontier.push(next);
                    }
                }
            }
        }
    }

    Ok(best_full.map(|(mask, end)| {
        let mut starts = Vec::with_capacity(n);
        let mut cur = (mask, end);
        while let Some(&(pmask, pend, job, start)) = parents.get(&cur) {
            starts.push(Start { job, start });
            cur = (pmask, pend);
        }
        starts.reverse();
        let schedule = Schedule::new(starts);
        let first_start = schedule.starts.iter().map(|s| s.start).min().unwrap_or(0);
        SolveResult {
            makespan: makespan(inst, &schedule),
            schedule,
            front_idle: first_start,
            algorithm: "oracle-timepoints".to_string(),
        }
    }))
}

/// Depth-first search for a non-idling-from-0 schedule.
///
/// Within a requirement class only the longest unscheduled member is ever
/// tried (exchange-safe), so states collapse to per-class consumed counts,
/// which also determine the elapsed time. Once the elapsed time reaches
/// `u_max` all supplies have arrived and the remaining jobs are appended in a
/// fixed order (requirement vector lexicographic, then index).
pub fn solve_ni_prefix_search(inst: &Instance) -> Option<Schedule> {
    let n = inst.job_count();
    if n == 0 {
        return Some(Schedule::default());
    }
    // Total-supply precheck; with it, any gapless prefix reaching u_max
    // extends to a full schedule.
    for i in 0..inst.resources() {
        if inst.total_supply(i) < inst.total_demand(i) {
            return None;
        }
    }

    let classes = requirement_classes(inst);
    let u_max = inst.u_max();
    let r = inst.resources();

    struct Ctx<'a> {
        inst: &'a Instance,
        classes: &'a [crate::phase_model::RequirementClass],
        u_max: Time,
        r: usize,
        failed: HashSet<Vec<u64>>,
    }

    fn tail_order(ctx: &Ctx, counts: &[u64]) -> Vec<usize> {
        let mut rest: Vec<usize> = ctx
            .classes
            .iter()
            .zip(counts)
            .flat_map(|(cl, &c)| cl.members[c as usize..].iter().copied())
            .collect();
        rest.sort_by(|&a, &b| {
            ctx.inst.jobs()[a]
                .a
                .cmp(&ctx.inst.jobs()[b].a)
                .then(a.cmp(&b))
        });
        rest
    }

    fn dfs(
        ctx: &mut Ctx,
        counts: &mut Vec<u64>,
        elapsed: Time,
        demand: &mut Vec<Qty>,
        order: &mut Vec<usize>,
    ) -> bool {
        if order.len() == ctx.inst.job_count() {
            return true;
        }
        if elapsed >= ctx.u_max {
            order.extend(tail_order(ctx, counts));
            return true;
        }
        if ctx.failed.contains(counts.as_slice()) {
            return false;
        }
        let supply = ctx.inst.cumulative_supply_vec(elapsed);
        for s in 0..ctx.classes.len() {
            let cl = &ctx.classes[s];
            if counts[s] as usize >= cl.members.len() {
                continue;
            }
            let job = cl.members[counts[s] as usize];
            let fits = (0..ctx.r).all(|i| demand[i] + ctx.inst.jobs()[job].a[i] <= supply[i]);
            if !fits {
                continue;
            }
            counts[s] += 1;
            for (d, a) in demand.iter_mut().zip(&ctx.inst.jobs()[job].a) {
                *d += a;
            }
            order.push(job);
            if dfs(ctx, counts, elapsed + ctx.inst.jobs()[job].p, demand, order) {
                return true;
            }
            order.pop();
            counts[s] -= 1;
            for (d, a) in demand.iter_mut().zip(&ctx.inst.jobs()[job].a) {
                *d -= a;
            }
        }
        ctx.failed.insert(counts.clone());
        false
    }

    let mut ctx = Ctx {
        inst,
        classes: &classes,
        u_max,
        r,
        failed: HashSet::new(),
    };
    let mut counts = vec![0u64; classes.len()];
    let mut demand = vec![0u64; r];
    let mut order = Vec::with_capacity(n);
    if dfs(&mut ctx, &mut counts, 0, &mut demand, &mut order) {
        Some(Schedule::gapless(inst, &order, 0))
    } else {
        None
    }
}

/// [`NiSolver`] wrapper around [`solve_ni_prefix_search`].
#[derive(Debug, Default, Clone, Copy)]
pub struct PrefixSearchSolver;

impl NiSolver for PrefixSearchSolver {
    fn solve_ni(&self, inst: &Instance) -> Option<Schedule> {
        solve_ni_prefix_search(inst)
    }

    fn name(&self) -> &'static str {
        "prefix"
    }
}
