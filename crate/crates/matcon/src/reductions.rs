//! Benchmark instance generators built from hardness constructions.
//!
//! Each generator maps a base problem (Unary Bin Packing or Independent Set)
//! to a scheduling instance whose optimum hits a known target makespan iff
//! the base instance is a yes-instance. Tiny exhaustive solvers for the base
//! problems supply ground truth, and a seeded random generator produces test
//! corpora.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use thiserror::Error;

use crate::model::{Instance, Job, Qty, Supply, Time};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinPackingInstance {
    pub bins: u64,
    pub bin_size: u64,
    pub sizes: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphInstance {
    pub vertices: usize,
    /// Undirected edges as vertex index pairs, no self-loops.
    pub edges: Vec<(usize, usize)>,
    /// Target independent-set size.
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedInstance {
    pub instance: Instance,
    /// Total processing time; the optimum equals it iff the base is a
    /// yes-instance.
    pub target_makespan: Time,
    pub decision_meaning: String,
    pub provenance: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("object sizes sum to {found}, expected bins * bin_size = {expected}")]
    SizeSumMismatch { expected: u64, found: u64 },
    #[error("{n} objects exceed the {max} unit-job slots of the construction")]
    TooManyObjects { n: usize, max: u64 },
    #[error("object {index} of size {size} exceeds the bin size {bin_size}")]
    ObjectExceedsBinSize {
        index: usize,
        size: u64,
        bin_size: u64,
    },
    #[error("degenerate base instance: {0}")]
    DegenerateBase(String),
    #[error("invalid base parameters: {0}")]
    BadParams(String),
    #[error("base oracle cap exceeded: {what}")]
    CapExceeded { what: String },
}

fn check_bp(bp: &BinPackingInstance) -> Result<(), ReductionError> {
    if bp.bins == 0 || bp.bin_size == 0 {
        return Err(ReductionError::BadParams(
            "bins and bin_size must be positive".to_string(),
        ));
    }
    if bp.sizes.iter().any(|&s| s == 0) {
        return Err(ReductionError::BadParams(
            "object sizes must be positive".to_string(),
        ));
    }
    let total: u64 = bp.sizes.iter().sum();
    let expected = bp.bins * bp.bin_size;
    if total != expected {
        return Err(ReductionError::SizeSumMismatch {
            expected,
            found: total,
        });
    }
    Ok(())
}

/// Single resource, one unit per supply: object jobs `(2B s_i; 2s_i)`, a
/// special job `(2B; 1)` gated by a lone supply at time 0, and bursts of unit
/// supplies just before each multiple of `2B^2` shifted by `2B`.
pub fn reduce_binpacking_bmax(
    bp: &BinPackingInstance,
) -> Result<GeneratedInstance, ReductionError> {
    check_bp(bp)?;
    let b = bp.bin_size;
    let k = bp.bins;
    let mut jobs: Vec<Job> = bp
        .sizes
        .iter()
        .map(|&s| Job {
            p: 2 * b * s,
            a: vec![2 * s],
        })
        .collect();
    jobs.push(Job {
        p: 2 * b,
        a: vec![1],
    });
    let mut supplies = vec![Supply { u: 0, b: vec![1] }];
    let mut supply_labels = Vec::new();
    for i in 0..k {
        for x in 0..2 * b {
            supplies.push(Supply {
                u: (2 * b + i * 2 * b * b) - x,
                b: vec![1],
            });
            supply_labels.push(json!([i, x]));
        }
    }
    let instance = Instance::new(1, jobs, supplies).expect("construction is structurally valid");
    let target_makespan = instance.total_processing();
    Ok(GeneratedInstance {
        instance,
        target_makespan,
        decision_meaning: "optimal = target iff the objects fit into the bins exactly"
            .to_string(),
        provenance: json!({
            "family": "bp-bmax",
            "bins": k,
            "bin_size": b,
            "sizes": bp.sizes,
            "special_job": bp.sizes.len(),
            "supply_labels": supply_labels,
        }),
    })
}

/// Jobs with `p_i = a_i = s_i` and one supply of `B` units at every multiple
/// of `B` below `kB`.
pub fn reduce_binpacking_q(bp: &BinPackingInstance) -> Result<GeneratedInstance, ReductionError> {
    check_bp(bp)?;
    let jobs: Vec<Job> = bp
        .sizes
        .iter()
        .map(|&s| Job { p: s, a: vec![s] })
        .collect();
    let supplies: Vec<Supply> = (0..bp.bins)
        .map(|i| Supply {
            u: i * bp.bin_size,
            b: vec![bp.bin_size],
        })
        .collect();
    let instance = Instance::new(1, jobs, supplies).expect("construction is structurally valid");
    let target_makespan = instance.total_processing();
    Ok(GeneratedInstance {
        instance,
        target_makespan,
        decision_meaning: "optimal = target iff the objects fit into the bins exactly"
            .to_string(),
        provenance: json!({
            "family": "bp-q",
            "bins": bp.bins,
            "bin_size": bp.bin_size,
            "sizes": bp.sizes,
        }),
    })
}

/// Two resources and unit jobs: object jobs `(1; s_i, B - s_i)`, `kB - n`
/// dummy jobs `(1; 0, B)`, and a supply of `(B, B(B-1))` at every multiple of
/// `B` below `kB`.
pub fn reduce_binpacking_two_resources(
    bp: &BinPackingInstance,
) -> Result<GeneratedInstance, ReductionError> {
    check_bp(bp)?;
    let b = bp.bin_size;
    let slots = bp.bins * b;
    if (bp.sizes.len() as u64) > slots {
        return Err(ReductionError::TooManyObjects {
            n: bp.sizes.len(),
            max: slots,
        });
    }
    if let Some((index, &size)) = bp.sizes.iter().enumerate().find(|(_, &s)| s > b) {
        return Err(ReductionError::ObjectExceedsBinSize {
            index,
            size,
            bin_size: b,
        });
    }
    let mut jobs: Vec<Job> = bp
        .sizes
        .iter()
        .map(|&s| Job {
            p: 1,
            a: vec![s, b - s],
        })
        .collect();
    let dummies = slots - bp.sizes.len() as u64;
    for _ in 0..dummies {
        jobs.push(Job {
            p: 1,
            a: vec![0, b],
        });
    }
    let supplies: Vec<Supply> = (0..bp.bins)
        .map(|i| Supply {
            u: i * b,
            b: vec![b, b * (b - 1)],
        })
        .collect();
    let instance = Instance::new(2, jobs, supplies).expect("construction is structurally valid");
    let target_makespan = instance.total_processing();
    Ok(GeneratedInstance {
        instance,
        target_makespan,
        decision_meaning: "optimal = target iff the objects fit into the bins exactly"
            .to_string(),
        provenance: json!({
            "family": "bp-2r",
            "bins": bp.bins,
            "bin_size": b,
            "sizes": bp.sizes,
            "dummy_jobs": dummies,
        }),
    })
}

/// One resource per edge, one unit job per vertex requiring every incident
/// edge resource, and one unit of every resource at times 0 and `k`.
pub fn reduce_independent_set(g: &GraphInstance) -> Result<GeneratedInstance, ReductionError> {
    if g.k == 0 || g.k > g.vertices {
        return Err(ReductionError::BadParams(format!(
            "k must lie in 1..={}, got {}",
            g.vertices, g.k
        )));
    }
    for &(a, b) in &g.edges {
        if a == b {
            return Err(ReductionError::BadParams(format!("self-loop at vertex {a}")));
        }
        if a >= g.vertices || b >= g.vertices {
            return Err(ReductionError::BadParams(format!(
                "edge ({a}, {b}) out of range"
            )));
        }
    }
    let m = g.edges.len();
    if m == 0 {
        return Err(ReductionError::DegenerateBase(
            "edgeless graph yields jobs without resource requirements".to_string(),
        ));
    }
    let jobs: Vec<Job> = (0..g.vertices)
        .map(|v| Job {
            p: 1,
            a: g
                .edges
                .iter()
                .map(|&(a, b)| u64::from(a == v || b == v))
                .collect(),
        })
        .collect();
    let supplies = vec![
        Supply {
            u: 0,
            b: vec![1; m],
        },
        Supply {
            u: g.k as Time,
            b: vec![1; m],
        },
    ];
    let instance = Instance::new(m, jobs, supplies).expect("construction is structurally valid");
    let target_makespan = instance.total_processing();
    Ok(GeneratedInstance {
        instance,
        target_makespan,
        decision_meaning: format!(
            "optimal = target iff the graph has an independent set of size {}",
            g.k
        ),
        provenance: json!({
            "family": "indepset",
            "vertices": g.vertices,
            "edges": g.edges.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
            "k": g.k,
        }),
    })
}

/// Exhaustive bin packing decision for up to 12 objects.
pub fn bp_oracle(bp: &BinPackingInstance) -> Result<bool, ReductionError> {
    if bp.sizes.len() > 12 {
        return Err(ReductionError::CapExceeded {
            what: format!("{} objects > 12", bp.sizes.len()),
        });
    }
    let mut sizes = bp.sizes.clone();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let mut free = vec![bp.bin_size; bp.bins as usize];
    fn place(sizes: &[u64], free: &mut [u64]) -> bool {
        let Some((&s, rest)) = sizes.split_first() else {
            return true;
        };
        let mut tried: Vec<u64> = Vec::new();
        for i in 0..free.len() {
            if free[i] >= s && !tried.contains(&free[i]) {
                tried.push(free[i]);
                free[i] -= s;
                if place(rest, free) {
                    return true;
                }
                free[i] += s;
            }
        }
        false
    }
    Ok(place(&sizes, &mut free))
}

/// Exhaustive independent-set decision for up to 16 vertices.
pub fn is_oracle(g: &GraphInstance) -> Result<bool, ReductionError> {
    if g.vertices > 16 {
        return Err(ReductionError::CapExceeded {
            what: format!("{} vertices > 16", g.vertices),
        });
    }
    if g.k > g.vertices {
        return Ok(false);
    }
    let mut adj = vec![0u32; g.vertices];
    for &(a, b) in &g.edges {
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    for mask in 0u32..(1 << g.vertices) {
        if mask.count_ones() as usize != g.k {
            continue;
        }
        let independent = (0..g.vertices)
            .all(|v| mask & (1 << v) == 0 || adj[v] & mask == 0);
        if independent {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomParams {
    pub n: usize,
    pub r: usize,
    pub max_p: Time,
    pub max_a: Qty,
    pub q: usize,
    pub max_gap: Time,
    pub seed: u64,
}

/// Deterministic random instance. Jobs may have all-zero requirements and the
/// first supply may arrive late, so outputs exercise normalization; supplies
/// are topped up so total supply covers total demand on every resource.
pub fn random_instance(params: &RandomParams) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let r = params.r.max(1);
    let jobs: Vec<Job> = (0..params.n)
        .map(|_| Job {
            p: rng.gen_range(1..=params.max_p.max(1)),
            a: (0..r).map(|_| rng.gen_range(0..=params.max_a)).collect(),
        })
        .collect();

    let mut supplies: Vec<Supply> = Vec::with_capacity(params.q);
    let mut t: Time = rng.gen_range(0..=params.max_gap);
    for _ in 0..params.q {
        supplies.push(Supply {
            u: t,
            b: (0..r).map(|_| rng.gen_range(0..=params.max_a.max(1))).collect(),
        });
        t += rng.gen_range(1..=params.max_gap.max(1));
    }

    // Top up deficits so the instance is always normalizable.
    for i in 0..r {
        let demand: Qty = jobs.iter().map(|j| j.a[i]).sum();
        let supply: Qty = supplies.iter().map(|s| s.b[i]).sum();
        if demand > supply {
            if supplies.is_empty() {
                supplies.push(Supply {
                    u: 0,
                    b: vec![0; r],
                });
            }
            let idx = rng.gen_range(0..supplies.len());
            supplies[idx].b[i] += demand - supply;
        }
    }
    Instance::new(r, jobs, supplies).expect("generated data is structurally valid")
}
