//! Domination relation and the weak-order solver.
//!
//! A job dominates another when it is at least as long and requires at most
//! as much of every resource. Dominating jobs may always be processed first
//! without loss, so whenever every pair of jobs is comparable (the relation is
//! a weak order), scheduling jobs in domination order and checking the result
//! is a complete non-idling solver.

use thiserror::Error;

use crate::gapless::NiSolver;
use crate::model::{check_feasible, Instance, Job, Schedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DominationVerdict {
    FirstDominates,
    SecondDominates,
    /// Mutual domination: equal processing time and requirement vector.
    Equal,
    Incomparable,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DominationError {
    #[error("jobs have requirement vectors of different lengths")]
    DimensionMismatch,
    #[error("the domination relation is not a weak order on this instance")]
    NotWeaklyOrdered,
}

pub fn dominates(first: &Job, second: &Job) -> Result<DominationVerdict, DominationError> {
    if first.a.len() != second.a.len() {
        return Err(DominationError::DimensionMismatch);
    }
    let fwd = first.p >= second.p && first.a.iter().zip(&second.a).all(|(x, y)| x <= y);
    let bwd = second.p >= first.p && second.a.iter().zip(&first.a).all(|(x, y)| x <= y);
    Ok(match (fwd, bwd) {
        (true, true) => DominationVerdict::Equal,
        (true, false) => DominationVerdict::FirstDominates,
        (false, true) => DominationVerdict::SecondDominates,
        (false, false) => DominationVerdict::Incomparable,
    })
}

/// A total ranking of the jobs by domination, dominating jobs first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakOrderCertificate {
    /// Permutation of job indices, dominating jobs first, ties by input index.
    pub ordering: Vec<usize>,
    /// Consecutive blocks of mutually dominating jobs, in ordering order.
    pub tie_classes: Vec<Vec<usize>>,
}

/// Sorts by (processing time descending, requirement vector lexicographic,
/// input index) and verifies that every adjacent pair is ordered. The sort
/// key agrees with domination wherever jobs are comparable, and domination is
/// transitive, so adjacent comparability already certifies the whole order;
/// total cost is `O(n (log n + r))` instead of all-pairs.
pub fn weak_order(inst: &Instance) -> Option<WeakOrderCertificate> {
    let jobs = inst.jobs();
    let n = jobs.len();
    let mut ordering: Vec<usize> = (0..n).collect();
    ordering.sort_by(|&i, &j| {
        jobs[j]
            .p
            .cmp(&jobs[i].p)
            .then_with(|| jobs[i].a.cmp(&jobs[j].a))
            .then_with(|| i.cmp(&j))
    });

    let mut tie_classes: Vec<Vec<usize>> = Vec::new();
    for (pi, &j) in ordering.iter().enumerate() {
        if pi > 0 {
            let i = ordering[pi - 1];
            match dominates(&jobs[i], &jobs[j]).expect("same instance, same dimension") {
                DominationVerdict::FirstDominates => tie_classes.push(vec![j]),
                DominationVerdict::Equal => {
                    tie_classes.last_mut().expect("predecessor exists").push(j)
                }
                _ => return None,
            }
        } else {
            tie_classes.push(vec![j]);
        }
    }
    Some(WeakOrderCertificate {
        ordering,
        tie_classes,
    })
}

/// Schedules the jobs back-to-back from 0 in domination order and accepts iff
/// the result is feasible; rejection means no non-idling-from-0 schedule
/// exists at all.
pub fn solve_weak_order_ni(inst: &Instance) -> Result<Option<Schedule>, DominationError> {
    let cert = weak_order(inst).ok_or(DominationError::NotWeaklyOrdered)?;
    let sched = Schedule::gapless(inst, &cert.ordering, 0);
    let report = check_feasible(inst, &sched).expect("ordering covers every job");
    Ok(if report.feasible { Some(sched) } else { None })
}

/// [`NiSolver`] over [`solve_weak_order_ni`]. Callers must establish that the
/// instance is weakly ordered before composing this with the front-idle
/// search.
#[derive(Debug, Default, Clone, Copy)]
pub struct WeakOrderSolver;

impl NiSolver for WeakOrderSolver {
    fn solve_ni(&self, inst: &Instance) -> Option<Schedule> {
        solve_weak_order_ni(inst).expect("instance must be weakly ordered")
    }

    fn name(&self) -> &'static str {
        "domination"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gapless::solve_cmax;
    use crate::model::{Instance, Job, Supply};
    use crate::oracle::{self, Caps};
    use crate::testutil::fig1;

    fn job(p: u64, a: &[u64]) -> Job {
        Job { p, a: a.to_vec() }
    }

    #[test]
    fn verdicts() {
        assert_eq!(
            dominates(&job(2, &[1]), &job(1, &[2])).unwrap(),
            DominationVerdict::FirstDominates
        );
        assert_eq!(
            dominates(&job(1, &[1]), &job(1, &[1])).unwrap(),
            DominationVerdict::Equal
        );
        assert_eq!(
            dominates(&job(2, &[3]), &job(1, &[1])).unwrap(),
            DominationVerdict::Incomparable
        );
        assert_eq!(
            dominates(&job(1, &[1]), &job(2, &[1])).unwrap(),
            DominationVerdict::SecondDominates
        );
        assert_eq!(
            dominates(&job(1, &[1]), &job(1, &[1, 2])).unwrap_err(),
            DominationError::DimensionMismatch
        );
    }

    #[test]
    fn unit_processing_times_sort_by_requirement() {
        let inst = Instance::new(
            1,
            vec![job(1, &[3]), job(1, &[1]), job(1, &[2])],
            vec![Supply { u: 0, b: vec![6] }],
        )
        .unwrap();
        let cert = weak_order(&inst).expect("unit-p instances are weakly ordered");
        assert_eq!(cert.ordering, vec![1, 2, 0]);
    }

    #[test]
    fn unit_requirements_sort_by_length_descending() {
        let inst = Instance::new(
            1,
            vec![job(3, &[1]), job(1, &[1])],
            vec![Supply { u: 0, b: vec![2] }],
        )
        .unwrap();
        let cert = weak_order(&inst).unwrap();
        assert_eq!(cert.ordering, vec![0, 1]);
        let sched = solve_weak_order_ni(&inst).unwrap().unwrap();
        assert_eq!(sched.start_of(0), Some(0));
        assert_eq!(sched.start_of(1), Some(3));
    }

    #[test]
    fn fig1_is_not_weakly_ordered() {
        // (p=1, a=1) and (p=2, a=3) are incomparable.
        assert!(weak_order(&fig1()).is_none());
        assert_eq!(
            solve_weak_order_ni(&fig1()).unwrap_err(),
            DominationError::NotWeaklyOrdered
        );
    }

    #[test]
    fn greedy_order_can_be_infeasible() {
        let inst = Instance::new(
            1,
            vec![job(1, &[1]), job(1, &[3]), job(1, &[2])],
            vec![Supply { u: 0, b: vec![2] }, Supply { u: 2, b: vec![4] }],
        )
        .unwrap();
        // Domination order needs 3 units by time 1 but only 2 are supplied.
        assert_eq!(solve_weak_order_ni(&inst).unwrap(), None);
        let up_front = Instance::new(
            1,
            vec![job(1, &[1]), job(1, &[3]), job(1, &[2])],
            vec![Supply { u: 0, b: vec![6] }],
        )
        .unwrap();
        let sched = solve_weak_order_ni(&up_front).unwrap().unwrap();
        assert_eq!(sched.start_of(0), Some(0));
        assert_eq!(sched.start_of(2), Some(1));
        assert_eq!(sched.start_of(1), Some(2));
    }

    #[test]
    fn ties_keep_input_order() {
        let inst = Instance::new(
            1,
            vec![job(2, &[1]), job(2, &[1]), job(1, &[2])],
            vec![Supply { u: 0, b: vec![4] }],
        )
        .unwrap();
        let cert = weak_order(&inst).unwrap();
        assert_eq!(cert.ordering, vec![0, 1, 2]);
        assert_eq!(cert.tie_classes, vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn completeness_against_permutation_oracle() {
        let mut checked = 0;
        let mut seed = 0u64;
        while checked < 500 {
            seed += 1;
            let inst = crate::reductions::random_instance(&crate::reductions::RandomParams {
                n: (seed % 6 + 1) as usize,
                r: 1,
                max_p: if seed % 2 == 0 { 1 } else { 3 },
                max_a: if seed % 2 == 0 { 3 } else { 1 },
                q: 3,
                max_gap: 3,
                seed: seed + 2000,
            });
            let norm = crate::model::normalize(&inst).unwrap().normalized;
            if weak_order(&norm).is_none() {
                continue;
            }
            checked += 1;
            let ours = solve_cmax(&norm, &WeakOrderSolver).unwrap();
            let oracle = oracle::solve_exact_permutations(&norm, &Caps::default())
                .unwrap()
                .unwrap();
            assert_eq!(ours.makespan, oracle.makespan, "seed {seed}");
        }
    }

    #[test]
    fn exchange_of_dominated_adjacent_pair_preserves_feasibility() {
        assert!(exchange_cases(0..60, 200) >= 200);
    }

    /// Runs the exchange check over random instances and returns how many
    /// (feasible gapless schedule, dominated adjacent pair) cases were
    /// exercised; panics if any swap breaks feasibility.
    pub(crate) fn exchange_cases(seeds: std::ops::Range<u64>, target: usize) -> usize {
        use crate::model::check_feasible;
        let mut cases = 0;
        for seed in seeds {
            if cases >= target {
                break;
            }
            let inst = crate::reductions::random_instance(&crate::reductions::RandomParams {
                n: 5,
                r: 1 + (seed % 2) as usize,
                max_p: 3,
                max_a: 3,
                q: 3,
                max_gap: 3,
                seed: seed + 3000,
            });
            let norm = match crate::model::normalize(&inst) {
                Ok(out) => out.normalized,
                Err(_) => continue,
            };
            let n = norm.job_count();
            if n < 2 {
                continue;
            }
            // Every feasible gapless permutation is a candidate schedule.
            for order in crate::oracle::all_orders(n) {
                let sched = Schedule::gapless(&norm, &order, 0);
                if !check_feasible(&norm, &sched).unwrap().feasible {
                    continue;
                }
                let mut order = order;
                for i in 0..n - 1 {
                    let earlier = &norm.jobs()[order[i]];
                    let later = &norm.jobs()[order[i + 1]];
                    if dominates(later, earlier).unwrap() == DominationVerdict::FirstDominates {
                        order.swap(i, i + 1);
                        let swapped = Schedule::gapless(&norm, &order, 0);
                        assert!(
                            check_feasible(&norm, &swapped).unwrap().feasible,
                            "seed {seed}, swap at {i}"
                        );
                        order.swap(i, i + 1);
                        cases += 1;
                    }
                }
            }
        }
        cases
    }
}
