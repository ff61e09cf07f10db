//! Acceptance gate: one test per release criterion, each printing a pass/fail
//! line. All comparisons are exact integer equalities.

use std::time::{Duration, Instant};

use matcon::domination::{dominates, weak_order, DominationVerdict, WeakOrderSolver};
use matcon::gapless::{min_front_idle, shift_supplies, solve_cmax};
use matcon::model::{check_feasible, normalize, Instance, Job, Schedule, Supply, Time};
use matcon::oracle::{
    all_orders, solve_exact_permutations, solve_exact_timepoints, Caps, PrefixSearchSolver,
};
use matcon::phase_model::{
    build_certificate, decode_counts, dp_gapless, verify_certificate, PhaseDpSolver,
    DEFAULT_STATE_CAP,
};
use matcon::reductions::{
    bp_oracle, is_oracle, random_instance, reduce_binpacking_bmax, reduce_binpacking_q,
    reduce_binpacking_two_resources, reduce_independent_set, BinPackingInstance, GraphInstance,
    RandomParams, ReductionError,
};
use matcon::umax_fpt::SubsetSolver;

mod common;
use common::fig1;

fn report(criterion: u32, name: &str, pass: bool) {
    println!(
        "criterion {criterion} ({name}): {}",
        if pass { "pass" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} ({name}) failed");
}

/// Exact optimum via front-idle search composed with the complete prefix
/// search; used where the permutation oracle's cap is too small.
fn optimum(inst: &Instance) -> Option<Time> {
    solve_cmax(inst, &PrefixSearchSolver).map(|r| r.makespan)
}

#[test]
fn criterion_1_figure_reproduction() {
    let inst = fig1();
    let mut pass = true;
    let timed = |pass: &mut bool, f: &dyn Fn() -> Option<Time>| {
        let started = Instant::now();
        let m = f();
        *pass &= m == Some(12) && started.elapsed() < Duration::from_secs(1);
    };
    timed(&mut pass, &|| {
        solve_exact_permutations(&inst, &Caps::default())
            .unwrap()
            .map(|r| r.makespan)
    });
    timed(&mut pass, &|| {
        let caps = Caps {
            timepoint_jobs: 6,
            ..Caps::default()
        };
        solve_exact_timepoints(&inst, &caps)
            .unwrap()
            .map(|r| r.makespan)
    });
    timed(&mut pass, &|| optimum(&inst));
    timed(&mut pass, &|| {
        solve_cmax(&inst, &PhaseDpSolver::default()).map(|r| r.makespan)
    });
    report(1, "figure reproduction, all algorithms", pass);
}

#[test]
fn criterion_2_front_idle_form_equivalence() {
    let started = Instant::now();
    let caps = Caps {
        timepoint_jobs: 5,
        ..Caps::default()
    };
    let mut pass = true;
    for seed in 0..200u64 {
        let inst = random_instance(&RandomParams {
            n: (seed % 5 + 1) as usize,
            r: 1 + (seed % 2) as usize,
            max_p: 3,
            max_a: 3,
            q: 3,
            max_gap: 2,
            seed: seed + 10_000,
        });
        assert!(inst.u_max() <= 6);
        let inst = normalize(&inst).unwrap().normalized;
        let free = solve_exact_timepoints(&inst, &caps)
            .unwrap()
            .map(|r| r.makespan);
        let front_idle_only = solve_exact_permutations(&inst, &caps)
            .unwrap()
            .map(|r| r.makespan);
        pass &= free == front_idle_only;
    }
    pass &= started.elapsed() < Duration::from_secs(60);
    report(2, "interior idle never beats front idle, 200 instances", pass);
}

#[test]
fn criterion_3_exchange_preserves_feasibility() {
    let started = Instant::now();
    let mut cases = 0usize;
    let mut pass = true;
    let mut seed = 0u64;
    while cases < 1000 && seed < 500 {
        seed += 1;
        let inst = random_instance(&RandomParams {
            n: 5,
            r: 1 + (seed % 2) as usize,
            max_p: 3,
            max_a: 3,
            q: 3,
            max_gap: 3,
            seed: seed + 20_000,
        });
        let norm = match normalize(&inst) {
            Ok(out) => out.normalized,
            Err(_) => continue,
        };
        let n = norm.job_count();
        if n < 2 {
            continue;
        }
        for order in all_orders(n) {
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
                    pass &= check_feasible(&norm, &swapped).unwrap().feasible;
                    order.swap(i, i + 1);
                    cases += 1;
                }
            }
        }
    }
    pass &= cases >= 1000;
    pass &= started.elapsed() < Duration::from_secs(30);
    report(3, "dominated-pair exchange, >=1000 cases", pass);
}

fn agreement_corpus() -> impl Iterator<Item = Instance> {
    (0..u64::MAX)
        .map(|seed| {
            random_instance(&RandomParams {
                n: (seed % 6 + 1) as usize,
                r: 1 + (seed % 2) as usize,
                max_p: 3,
                max_a: 3,
                q: (seed % 4 + 1) as usize,
                max_gap: 3,
                seed: seed + 30_000,
            })
        })
        .filter_map(|inst| normalize(&inst).ok().map(|out| out.normalized))
        .take(500)
}

#[test]
fn criterion_4_solver_agreement() {
    let started = Instant::now();
    let mut pass = true;
    for norm in agreement_corpus() {
        let reference = solve_exact_permutations(&norm, &Caps::default())
            .unwrap()
            .map(|r| r.makespan);
        pass &= optimum(&norm) == reference;
        pass &= solve_cmax(&norm, &PhaseDpSolver::default()).map(|r| r.makespan) == reference;
        if weak_order(&norm).is_some() {
            pass &= solve_cmax(&norm, &WeakOrderSolver).map(|r| r.makespan) == reference;
        }
        if norm.resources() == 1 {
            pass &= solve_cmax(&norm, &SubsetSolver).map(|r| r.makespan) == reference;
        }
    }
    pass &= started.elapsed() < Duration::from_secs(300);
    report(4, "all solvers equal the oracle, 500 instances", pass);
}

/// Non-decreasing positive size vectors of length `n` summing to `total`.
fn size_multisets(n: usize, total: u64, min: u64) -> Vec<Vec<u64>> {
    if n == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut result = Vec::new();
    for first in min..=total / n as u64 {
        for mut rest in size_multisets(n - 1, total - first, first) {
            rest.insert(0, first);
            result.push(rest);
        }
    }
    result
}

#[test]
fn criterion_5_reduction_ground_truth() {
    let started = Instant::now();
    let mut pass = true;
    let mut bp_cases = 0usize;

    for k in 1..=3u64 {
        for b in 1..=5u64 {
            let total = k * b;
            for n in 1..=(total.min(6) as usize) {
                for sizes in size_multisets(n, total, 1) {
                    let bp = BinPackingInstance {
                        bins: k,
                        bin_size: b,
                        sizes,
                    };
                    let yes = bp_oracle(&bp).unwrap();
                    bp_cases += 1;

                    let gen = reduce_binpacking_bmax(&bp).unwrap();
                    pass &= (optimum(&gen.instance) == Some(gen.target_makespan)) == yes;

                    let gen = reduce_binpacking_q(&bp).unwrap();
                    pass &= (optimum(&gen.instance) == Some(gen.target_makespan)) == yes;

                    match reduce_binpacking_two_resources(&bp) {
                        Ok(gen) => {
                            pass &=
                                (optimum(&gen.instance) == Some(gen.target_makespan)) == yes;
                        }
                        // Oversized objects are outside this construction's
                        // domain (their base is trivially NO).
                        Err(ReductionError::ObjectExceedsBinSize { .. }) => {
                            pass &= !yes;
                        }
                        Err(e) => panic!("unexpected generator error: {e}"),
                    }
                }
            }
        }
    }
    pass &= bp_cases > 100;

    let mut graph_cases = 0usize;
    for v in 1..=5usize {
        let pairs: Vec<(usize, usize)> = (0..v)
            .flat_map(|a| ((a + 1)..v).map(move |b| (a, b)))
            .collect();
        for mask in 1u32..(1 << pairs.len()) {
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &e)| e)
                .collect();
            for k in 1..=v {
                let g = GraphInstance {
                    vertices: v,
                    edges: edges.clone(),
                    k,
                };
                let yes = is_oracle(&g).unwrap();
                let gen = reduce_independent_set(&g).unwrap();
                pass &= (optimum(&gen.instance) == Some(gen.target_makespan)) == yes;
                graph_cases += 1;
            }
        }
    }
    pass &= graph_cases > 1000;
    pass &= started.elapsed() < Duration::from_secs(600);
    report(5, "generator targets match base decisions", pass);
}

#[test]
fn criterion_6_certificate_soundness() {
    let mut pass = true;
    let mut witnesses = 0usize;
    for norm in agreement_corpus() {
        let solver = PhaseDpSolver::default();
        let Some(sol) = min_front_idle(&norm, &solver) else {
            continue;
        };
        let shifted = shift_supplies(&norm, sol.g);
        let counts = dp_gapless(&shifted, DEFAULT_STATE_CAP)
            .unwrap()
            .expect("front-idle witness exists");
        let sched = decode_counts(&shifted, &counts).unwrap();
        let cert = build_certificate(&shifted, &sched).unwrap();
        let (ok, violations) = verify_certificate(&shifted, &cert);
        pass &= ok && violations.is_empty();
        witnesses += 1;
    }
    pass &= witnesses >= 400;
    report(6, "every dp witness certificate verifies", pass);
}

#[test]
fn criterion_7_weak_order_specialization() {
    let mut pass = true;
    // Unit processing times.
    for seed in 0..300u64 {
        let base = random_instance(&RandomParams {
            n: (seed % 6 + 1) as usize,
            r: 1,
            max_p: 1,
            max_a: 3,
            q: 3,
            max_gap: 3,
            seed: seed + 40_000,
        });
        let norm = normalize(&base).unwrap().normalized;
        pass &= weak_order(&norm).is_some();
        let reference = solve_exact_permutations(&norm, &Caps::default())
            .unwrap()
            .map(|r| r.makespan);
        pass &= solve_cmax(&norm, &WeakOrderSolver).map(|r| r.makespan) == reference;
    }
    // Unit requirements.
    for seed in 0..300u64 {
        let base = random_instance(&RandomParams {
            n: (seed % 6 + 1) as usize,
            r: 1,
            max_p: 3,
            max_a: 1,
            q: 3,
            max_gap: 3,
            seed: seed + 50_000,
        });
        let norm = normalize(&base).unwrap().normalized;
        if weak_order(&norm).is_none() {
            // A zero-requirement job can slip through max_a = 1; normalization
            // removes it, so this should not happen.
            pass = false;
            continue;
        }
        let reference = solve_exact_permutations(&norm, &Caps::default())
            .unwrap()
            .map(|r| r.makespan);
        pass &= solve_cmax(&norm, &WeakOrderSolver).map(|r| r.makespan) == reference;
    }

    // Scale: 100_000 unit-time jobs solved in under a second.
    let n = 100_000usize;
    let jobs: Vec<Job> = (0..n)
        .map(|j| Job {
            p: 1,
            a: vec![(j as u64 * 7919) % 3 + 1],
        })
        .collect();
    let demand: u64 = jobs.iter().map(|j| j.a[0]).sum();
    let inst = Instance::new(
        1,
        jobs,
        vec![
            Supply {
                u: 0,
                b: vec![demand / 2],
            },
            Supply {
                u: 4,
                b: vec![demand - demand / 2],
            },
        ],
    )
    .unwrap();
    let started = Instant::now();
    let res = solve_cmax(&inst, &WeakOrderSolver).expect("feasible");
    let elapsed = started.elapsed();
    pass &= res.makespan >= n as u64;
    pass &= check_feasible(&inst, &res.schedule).unwrap().feasible;
    pass &= elapsed < Duration::from_secs(1);
    report(7, "weak-order fast path matches oracle and scales", pass);
}

#[test]
fn criterion_8_normalization_offset() {
    let mut pass = true;
    let mut checked = 0usize;
    let mut seed = 0u64;
    while checked < 200 && seed < 2000 {
        seed += 1;
        let inst = random_instance(&RandomParams {
            n: (seed % 5 + 1) as usize,
            r: 1 + (seed % 2) as usize,
            max_p: 3,
            max_a: 2,
            q: 3,
            max_gap: 3,
            seed: seed + 60_000,
        });
        let out = match normalize(&inst) {
            Ok(out) => out,
            Err(_) => continue,
        };
        let first_supply = inst.supplies().first().map_or(0, |s| s.u);
        let violates = !out.removed_jobs.is_empty() || first_supply > 0;
        if !violates {
            continue;
        }
        checked += 1;
        let caps = Caps::default();
        // The original instance may need interior idle (a zero-requirement
        // job can run between staggered supplies), so only the
        // free-start-time oracle is exact on it.
        let original = solve_exact_timepoints(&inst, &caps)
            .unwrap()
            .map(|r| r.makespan);
        let normalized = solve_exact_permutations(&out.normalized, &caps)
            .unwrap()
            .map(|r| r.makespan + out.makespan_offset);
        pass &= original == normalized;
    }
    pass &= checked >= 200;
    report(8, "offset maps normalized optimum back exactly", pass);
}
