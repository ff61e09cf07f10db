use matcon::model::{Instance, Job, Supply};

/// Six jobs, one resource, four supplies; optimum makespan 12 with two units
/// of front idle.
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
