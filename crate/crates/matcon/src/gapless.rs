//! Turning non-idling feasibility solvers into makespan minimizers.
//!
//! Any optimal schedule can be rearranged so that all idle time forms a single
//! block before the busy period. Minimizing the makespan therefore reduces to
//! finding the smallest front idle `g` for which a back-to-back schedule from
//! `g` exists, which is a non-idling feasibility question on the instance with
//! all supply dates shifted down by `g`. Feasibility is monotone in `g`
//! (supplies only arrive earlier), so `g` is found by binary search over
//! `[0, u_max]`.

use crate::model::{makespan, Instance, Schedule, Supply, Time};

/// Contract for non-idling solvers: return a feasible back-to-back schedule
/// starting at time 0, or `None` when no such schedule exists. Implementations
/// must be exact and deterministic.
pub trait NiSolver {
    fn solve_ni(&self, inst: &Instance) -> Option<Schedule>;
    fn name(&self) -> &'static str;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontIdleSolution {
    /// Initial idle time.
    pub g: Time,
    /// Witness on the shifted instance, running back-to-back from 0.
    pub schedule: Schedule,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub makespan: Time,
    /// Witness on the instance the solver was given.
    pub schedule: Schedule,
    pub front_idle: Time,
    pub algorithm: String,
}

/// Each supply date becomes `max(0, u - g)`; supplies landing at 0 merge into
/// a single time-0 supply.
pub fn shift_supplies(inst: &Instance, g: Time) -> Instance {
    let supplies: Vec<Supply> = inst
        .supplies()
        .iter()
        .map(|s| Supply {
            u: s.u.saturating_sub(g),
            b: s.b.clone(),
        })
        .collect();
    Instance::new(inst.resources(), inst.jobs().to_vec(), supplies)
        .expect("shifting preserves structural validity")
}

/// Smallest `g` in `[0, u_max]` for which `solver` finds a non-idling schedule
/// on the shifted instance, together with the witness. `None` means even
/// `g = u_max` is infeasible, in which case no feasible schedule exists.
pub fn min_front_idle<S: NiSolver>(inst: &Instance, solver: &S) -> Option<FrontIdleSolution> {
    let u_max = inst.u_max();
    // Binary search on the monotone feasibility predicate.
    let mut lo = 0; // untested lower bound
    let mut hi = u_max;
    let mut best: Option<(Time, Schedule)> = match solver.solve_ni(&shift_supplies(inst, u_max)) {
        Some(s) => Some((u_max, s)),
        None => return None,
    };
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match solver.solve_ni(&shift_supplies(inst, mid)) {
            Some(s) => {
                best = Some((mid, s));
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    let (g, schedule) = best.expect("u_max probe succeeded");
    Some(FrontIdleSolution { g, schedule })
}

/// Minimizes the makespan via the front-idle search. The returned schedule is
/// the witness shifted back onto the input instance, so its makespan equals
/// `g + sum of processing times`.
pub fn solve_cmax<S: NiSolver>(inst: &Instance, solver: &S) -> Option<SolveResult> {
    let sol = min_front_idle(inst, solver)?;
    let schedule = sol.schedule.shifted(sol.g);
    Some(SolveResult {
        makespan: makespan(inst, &schedule),
        schedule,
        front_idle: sol.g,
        algorithm: solver.name().to_string(),
    })
}
