//! Instance and schedule data model.
//!
//! An instance consists of jobs that consume non-renewable resources at their
//! start instant and of dated supplies that replenish those resources. A
//! schedule assigns integer start times; it is feasible when job intervals do
//! not overlap and, at every start time, the cumulative supply of each
//! resource covers the cumulative demand of all jobs started so far.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Time = u64;
pub type Qty = u64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    /// Processing time, at least 1.
    pub p: Time,
    /// Requirement per resource; length equals the instance resource count.
    pub a: Vec<Qty>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Supply {
    /// Supply date.
    pub u: Time,
    /// Supplied quantity per resource.
    pub b: Vec<Qty>,
}

/// A validated problem instance. Supplies are sorted by date and dates are
/// strictly increasing (equal dates are merged by vector addition at
/// construction time).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    resources: usize,
    jobs: Vec<Job>,
    supplies: Vec<Supply>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("job {job}: requirement vector has length {found}, expected {expected}")]
    DimensionMismatch {
        job: usize,
        expected: usize,
        found: usize,
    },
    #[error("job {job}: processing time must be at least 1")]
    NonPositiveProcessingTime { job: usize },
    #[error("supply {supply}: quantity vector has length {found}, expected {expected}")]
    SupplyDimensionMismatch {
        supply: usize,
        expected: usize,
        found: usize,
    },
    #[error("resource count must be at least 1")]
    NoResources,
}

impl Instance {
    /// Validates the raw data and builds an instance. Supplies sharing a date
    /// are merged by summing their quantity vectors; the result is sorted by
    /// date.
    pub fn new(
        resources: usize,
        jobs: Vec<Job>,
        supplies: Vec<Supply>,
    ) -> Result<Self, ModelError> {
        if resources == 0 {
            return Err(ModelError::NoResources);
        }
        for (j, job) in jobs.iter().enumerate() {
            if job.a.len() != resources {
                return Err(ModelError::DimensionMismatch {
                    job: j,
                    expected: resources,
                    found: job.a.len(),
                });
            }
            if job.p < 1 {
                return Err(ModelError::NonPositiveProcessingTime { job: j });
            }
        }
        for (l, s) in supplies.iter().enumerate() {
            if s.b.len() != resources {
                return Err(ModelError::SupplyDimensionMismatch {
                    supply: l,
                    expected: resources,
                    found: s.b.len(),
                });
            }
        }
        let mut supplies = supplies;
        supplies.sort_by_key(|s| s.u);
        let mut merged: Vec<Supply> = Vec::with_capacity(supplies.len());
        for s in supplies {
            match merged.last_mut() {
                Some(last) if last.u == s.u => {
                    for (acc, q) in last.b.iter_mut().zip(&s.b) {
                        *acc += q;
                    }
                }
                _ => merged.push(s),
            }
        }
        Ok(Instance {
            resources,
            jobs,
            supplies: merged,
        })
    }

    pub fn resources(&self) -> usize {
        self.resources
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn supplies(&self) -> &[Supply] {
        &self.supplies
    }

    pub fn job_count(&self) -> usize {
        self.jobs.len()
    }

    pub fn supply_count(&self) -> usize {
        self.supplies.len()
    }

    /// Time of the last supply; 0 when there are no supplies.
    pub fn u_max(&self) -> Time {
        self.supplies.last().map_or(0, |s| s.u)
    }

    pub fn a_max(&self) -> Qty {
        self.jobs
            .iter()
            .flat_map(|j| j.a.iter().copied())
            .max()
            .unwrap_or(0)
    }

    pub fn b_max(&self) -> Qty {
        self.supplies
            .iter()
            .flat_map(|s| s.b.iter().copied())
            .max()
            .unwrap_or(0)
    }

    pub fn p_max(&self) -> Time {
        self.jobs.iter().map(|j| j.p).max().unwrap_or(0)
    }

    pub fn total_processing(&self) -> Time {
        self.jobs.iter().map(|j| j.p).sum()
    }

    pub fn total_demand(&self, resource: usize) -> Qty {
        self.jobs.iter().map(|j| j.a[resource]).sum()
    }

    pub fn total_supply(&self, resource: usize) -> Qty {
        self.supplies.iter().map(|s| s.b[resource]).sum()
    }

    /// Cumulative supply of `resource` over all supplies dated at or before `t`.
    pub fn cumulative_supply(&self, resource: usize, t: Time) -> Qty {
        assert!(resource < self.resources, "resource index out of range");
        self.supplies
            .iter()
            .take_while(|s| s.u <= t)
            .map(|s| s.b[resource])
            .sum()
    }

    /// Cumulative supply of every resource at time `t`.
    pub fn cumulative_supply_vec(&self, t: Time) -> Vec<Qty> {
        let mut acc = vec![0; self.resources];
        for s in self.supplies.iter().take_while(|s| s.u <= t) {
            for (a, q) in acc.iter_mut().zip(&s.b) {
                *a += q;
            }
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Start {
    pub job: usize,
    pub start: Time,
}

/// An assignment of start times covering every job of an instance exactly once.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub starts: Vec<Start>,
}

impl Schedule {
    pub fn new(starts: Vec<Start>) -> Self {
        Schedule { starts }
    }

    /// Back-to-back schedule from `from` following the given job order.
    pub fn gapless(inst: &Instance, order: &[usize], from: Time) -> Self {
        let mut t = from;
        let mut starts = Vec::with_capacity(order.len());
        for &j in order {
            starts.push(Start { job: j, start: t });
            t += inst.jobs()[j].p;
        }
        Schedule { starts }
    }

    /// All starts delayed by `delta`.
    pub fn shifted(&self, delta: Time) -> Self {
        Schedule {
            starts: self
                .starts
                .iter()
                .map(|s| Start {
                    job: s.job,
                    start: s.start + delta,
                })
                .collect(),
        }
    }

    pub fn start_of(&self, job: usize) -> Option<Time> {
        self.starts.iter().find(|s| s.job == job).map(|s| s.start)
    }
}

/// Maximum completion time over all jobs; 0 for the empty schedule.
pub fn makespan(inst: &Instance, sched: &Schedule) -> Time {
    sched
        .starts
        .iter()
        .map(|s| s.start + inst.jobs()[s.job].p)
        .max()
        .unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Overlap,
    ResourceDeficit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub job: usize,
    pub time: Time,
    /// Set for resource deficits only.
    pub resource: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub first_violation: Option<Violation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("schedule does not cover job {job}")]
    MissingJob { job: usize },
    #[error("schedule lists job {job} more than once")]
    DuplicateJob { job: usize },
    #[error("schedule references unknown job {job}")]
    UnknownJob { job: usize },
}

/// Checks the two feasibility conditions: pairwise disjoint job intervals and
/// cumulative supply covering cumulative demand at every start time. The
/// report pinpoints the earliest violation by time.
pub fn check_feasible(inst: &Instance, sched: &Schedule) -> Result<FeasibilityReport, ScheduleError> {
    let n = inst.job_count();
    let mut seen = vec![false; n];
    for s in &sched.starts {
        if s.job >= n {
            return Err(ScheduleError::UnknownJob { job: s.job });
        }
        if seen[s.job] {
            return Err(ScheduleError::DuplicateJob { job: s.job });
        }
        seen[s.job] = true;
    }
    if let Some(job) = seen.iter().position(|&c| !c) {
        return Err(ScheduleError::MissingJob { job });
    }

    let mut by_start: Vec<Start> = sched.starts.clone();
    by_start.sort_by_key(|s| (s.start, s.job));

    // Overlap scan: each interval must end before the next one starts.
    let mut overlap: Option<Violation> = None;
    for pair in by_start.windows(2) {
        let end = pair[0].start + inst.jobs()[pair[0].job].p;
        if pair[1].start < end {
            overlap = Some(Violation {
                kind: ViolationKind::Overlap,
                job: pair[1].job,
                time: pair[1].start,
                resource: None,
            });
            break;
        }
    }

    // Resource scan in start order; demand is charged at the start instant.
    let mut deficit: Option<Violation> = None;
    let mut demand = vec![0u64; inst.resources()];
    'outer: for s in &by_start {
        for (d, a) in demand.iter_mut().zip(&inst.jobs()[s.job].a) {
            *d += a;
        }
        for i in 0..inst.resources() {
            if demand[i] > inst.cumulative_supply(i, s.start) {
                deficit = Some(Violation {
                    kind: ViolationKind::ResourceDeficit,
                    job: s.job,
                    time: s.start,
                    resource: Some(i),
                });
                break 'outer;
            }
        }
    }

    // Earliest violation by time wins; ties go to the overlap.
    let first = match (overlap, deficit) {
        (Some(o), Some(d)) => Some(if o.time <= d.time { o } else { d }),
        (Some(o), None) => Some(o),
        (None, Some(d)) => Some(d),
        (None, None) => None,
    };
    Ok(FeasibilityReport {
        feasible: first.is_none(),
        first_violation: first,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizationOutcome {
    pub normalized: Instance,
    /// Optimal makespan of the original equals the optimum of the normalized
    /// instance plus this offset.
    pub makespan_offset: Time,
    /// Indices (in the original instance) of removed zero-requirement jobs.
    pub removed_jobs: Vec<usize>,
    /// Original index of each job in the normalized instance.
    pub kept_jobs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("total supply of resource {resource} is below total demand; no feasible schedule")]
    InsufficientTotalSupply { resource: usize },
}

/// Brings an instance into the normal form every solver expects: total supply
/// covers total demand, every job has a positive requirement, and the first
/// supply arrives at time 0 with a positive quantity.
///
/// Zero-requirement jobs of total length `T0` are removed and scheduled up
/// front conceptually; supply dates shift down by `T0` and then by the first
/// remaining positive supply date, clamping at 0 and merging clamped supplies
/// into a single time-0 supply.
pub fn normalize(inst: &Instance) -> Result<NormalizationOutcome, NormalizeError> {
    for i in 0..inst.resources() {
        if inst.total_supply(i) < inst.total_demand(i) {
            return Err(NormalizeError::InsufficientTotalSupply { resource: i });
        }
    }

    let mut removed = Vec::new();
    let mut kept = Vec::new();
    let mut jobs = Vec::new();
    let mut t0: Time = 0;
    for (j, job) in inst.jobs().iter().enumerate() {
        if job.a.iter().all(|&a| a == 0) {
            removed.push(j);
            t0 += job.p;
        } else {
            kept.push(j);
            jobs.push(job.clone());
        }
    }

    // Drop supplies with an all-zero vector; they carry no information.
    let shifted: Vec<Supply> = inst
        .supplies()
        .iter()
        .filter(|s| s.b.iter().any(|&q| q > 0))
        .map(|s| Supply {
            u: s.u.saturating_sub(t0),
            b: s.b.clone(),
        })
        .collect();
    let first_date = shifted.first().map_or(0, |s| s.u);
    let supplies: Vec<Supply> = shifted
        .into_iter()
        .map(|s| Supply {
            u: s.u - first_date,
            b: s.b,
        })
        .collect();

    // With no kept jobs nothing waits for supplies, so the date shift must
    // not contribute to the offset.
    let offset_shift = if jobs.is_empty() { 0 } else { first_date };
    let normalized = Instance::new(inst.resources(), jobs, supplies)
        .expect("normalization preserves structural validity");
    Ok(NormalizationOutcome {
        normalized,
        makespan_offset: t0 + offset_shift,
        removed_jobs: removed,
        kept_jobs: kept,
    })
}

impl NormalizationOutcome {
    /// Maps a schedule of the normalized instance back to the original
    /// instance: removed jobs run back-to-back from 0 and every kept job is
    /// delayed by the makespan offset.
    pub fn schedule_for_original(&self, original: &Instance, sched: &Schedule) -> Schedule {
        let mut starts = Vec::with_capacity(original.job_count());
        let mut t = 0;
        for &j in &self.removed_jobs {
            starts.push(Start { job: j, start: t });
            t += original.jobs()[j].p;
        }
        for s in &sched.starts {
            starts.push(Start {
                job: self.kept_jobs[s.job],
                start: s.start + self.makespan_offset,
            });
        }
        Schedule { starts }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::fig1;

    #[test]
    fn validate_fig1() {
        let inst = fig1();
        assert_eq!(inst.resources(), 1);
        assert_eq!(inst.job_count(), 6);
        assert_eq!(inst.supply_count(), 4);
        assert_eq!(inst.u_max(), 9);
        assert_eq!(inst.a_max(), 6);
        assert_eq!(inst.b_max(), 6);
        assert_eq!(inst.p_max(), 3);
    }

    #[test]
    fn validate_rejects_zero_processing_time() {
        let err = Instance::new(
            1,
            vec![Job { p: 0, a: vec![1] }],
            vec![Supply { u: 0, b: vec![1] }],
        )
        .unwrap_err();
        assert_eq!(err, ModelError::NonPositiveProcessingTime { job: 0 });
    }

    #[test]
    fn validate_rejects_dimension_mismatch() {
        let err = Instance::new(
            2,
            vec![Job { p: 1, a: vec![1] }],
            vec![Supply {
                u: 0,
                b: vec![1, 1],
            }],
        )
        .unwrap_err();
        assert_eq!(
            err,
            ModelError::DimensionMismatch {
                job: 0,
                expected: 2,
                found: 1
            }
        );
    }

    #[test]
    fn validate_merges_equal_supply_dates() {
        let inst = Instance::new(
            1,
            vec![Job { p: 1, a: vec![1] }],
            vec![
                Supply { u: 3, b: vec![2] },
                Supply { u: 0, b: vec![1] },
                Supply { u: 3, b: vec![4] },
            ],
        )
        .unwrap();
        assert_eq!(
            inst.supplies(),
            &[Supply { u: 0, b: vec![1] }, Supply { u: 3, b: vec![6] }]
        );
    }

    #[test]
    fn cumulative_supply_fig1() {
        let inst = fig1();
        assert_eq!(inst.cumulative_supply(0, 4), 9);
        assert_eq!(inst.cumulative_supply(0, 0), 3);
        assert_eq!(inst.cumulative_supply(0, 9), 17);
    }

    #[test]
    fn cumulative_supply_before_first_date() {
        let inst = Instance::new(
            1,
            vec![Job { p: 1, a: vec![1] }],
            vec![Supply { u: 5, b: vec![3] }],
        )
        .unwrap();
        assert_eq!(inst.cumulative_supply(0, 4), 0);
    }

    #[test]
    fn fig1_solution_feasible_with_makespan_12() {
        let inst = fig1();
        // J3@0, J2@1, J1@3, J5@4, J4@6, J6@9 (0-based job indices).
        let sched = Schedule::new(vec![
            Start { job: 2, start: 0 },
            Start { job: 1, start: 1 },
            Start { job: 0, start: 3 },
            Start { job: 4, start: 4 },
            Start { job: 3, start: 6 },
            Start { job: 5, start: 9 },
        ]);
        let report = check_feasible(&inst, &sched).unwrap();
        assert!(report.feasible, "{:?}", report.first_violation);
        assert_eq!(makespan(&inst, &sched), 12);
    }

    #[test]
    fn fig1_early_j6_is_resource_deficient() {
        let inst = fig1();
        let sched = Schedule::new(vec![
            Start { job: 2, start: 0 },
            Start { job: 1, start: 1 },
            Start { job: 0, start: 3 },
            Start { job: 4, start: 4 },
            Start { job: 3, start: 6 },
            Start { job: 5, start: 8 },
        ]);
        let report = check_feasible(&inst, &sched).unwrap();
        assert!(!report.feasible);
        let v = report.first_violation.unwrap();
        assert_eq!(v.kind, ViolationKind::ResourceDeficit);
        assert_eq!(v.time, 8);
        assert_eq!(v.job, 5);
    }

    #[test]
    fn empty_instance_is_feasible_with_makespan_zero() {
        let inst = Instance::new(1, vec![], vec![]).unwrap();
        let sched = Schedule::default();
        assert!(check_feasible(&inst, &sched).unwrap().feasible);
        assert_eq!(makespan(&inst, &sched), 0);
    }

    #[test]
    fn check_reports_missing_and_duplicate_jobs() {
        let inst = Instance::new(
            1,
            vec![Job { p: 1, a: vec![1] }, Job { p: 1, a: vec![1] }],
            vec![Supply { u: 0, b: vec![2] }],
        )
        .unwrap();
        let missing = Schedule::new(vec![Start { job: 0, start: 0 }]);
        assert_eq!(
            check_feasible(&inst, &missing).unwrap_err(),
            ScheduleError::MissingJob { job: 1 }
        );
        let dup = Schedule::new(vec![Start { job: 0, start: 0 }, Start { job: 0, start: 1 }]);
        assert_eq!(
            check_feasible(&inst, &dup).unwrap_err(),
            ScheduleError::DuplicateJob { job: 0 }
        );
    }

    #[test]
    fn normalize_removes_zero_requirement_jobs_and_shifts() {
        let inst = Instance::new(
            1,
            vec![Job { p: 2, a: vec![0] }, Job { p: 1, a: vec![1] }],
            vec![Supply { u: 3, b: vec![1] }],
        )
        .unwrap();
        let out = normalize(&inst).unwrap();
        assert_eq!(out.makespan_offset, 3);
        assert_eq!(out.removed_jobs, vec![0]);
        assert_eq!(out.normalized.jobs(), &[Job { p: 1, a: vec![1] }]);
        assert_eq!(out.normalized.supplies(), &[Supply { u: 0, b: vec![1] }]);
    }

    #[test]
    fn normalize_fig1_is_identity() {
        let inst = fig1();
        let out = normalize(&inst).unwrap();
        assert_eq!(out.makespan_offset, 0);
        assert!(out.removed_jobs.is_empty());
        assert_eq!(out.normalized, inst);
    }

    #[test]
    fn normalize_detects_insufficient_supply() {
        let inst = Instance::new(
            1,
            vec![Job { p: 1, a: vec![5] }],
            vec![Supply { u: 0, b: vec![4] }],
        )
        .unwrap();
        assert_eq!(
            normalize(&inst).unwrap_err(),
            NormalizeError::InsufficientTotalSupply { resource: 0 }
        );
    }

    #[test]
    fn normalize_is_idempotent() {
        let inst = Instance::new(
            1,
            vec![Job { p: 2, a: vec![0] }, Job { p: 1, a: vec![2] }],
            vec![Supply { u: 4, b: vec![2] }, Supply { u: 6, b: vec![1] }],
        )
        .unwrap();
        let once = normalize(&inst).unwrap();
        let twice = normalize(&once.normalized).unwrap();
        assert_eq!(twice.makespan_offset, 0);
        assert_eq!(twice.normalized, once.normalized);
    }
}
