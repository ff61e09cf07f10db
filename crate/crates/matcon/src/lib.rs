//! Exact solvers for single-machine scheduling with non-renewable resources:
//! jobs consume raw materials at their start, materials arrive at fixed supply
//! dates, and the objective is the makespan.

pub mod cli;
pub mod domination;
pub mod gapless;
pub mod io;
pub mod model;
pub mod oracle;
pub mod phase_model;
pub mod reductions;
pub mod umax_fpt;

#[cfg(test)]
pub(crate) mod testutil {
    use crate::model::{Instance, Job, Supply};

    /// Six jobs, one resource, four supplies; optimum makespan 12 with two
    /// units of front idle.
    pub fn fig1() -> Instance {
        Instance::new(
            1,
            vec![
                Job { p: 1, a: vec![3] },
                Job { p: 1, a: vec![1] },
                Job { p: 1, a: vec![2] },
                Job { p: 2, a: vec![3] },
                Job { p: 2, a: vec![2] },
                Job { p: 3, a: vec![6] },
            ],
            vec![
                Supply { u: 0, b: vec![3] },
                Supply { u: 3, b: vec![6] },
                Supply { u: 5, b: vec![2] },
                Supply { u: 9, b: vec![6] },
            ],
        )
        .unwrap()
    }
}
