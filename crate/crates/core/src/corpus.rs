//! The bundled example models.

use crate::format::load_problem;
use crate::model::ControlProblem;

pub const EX1_PLANT: &str = include_str!("../models/ex1_plant.json");
pub const EX1_SPEC: &str = include_str!("../models/ex1_spec.json");
pub const EX2_PLANT: &str = include_str!("../models/ex2_plant.json");
pub const EX2_SPEC: &str = include_str!("../models/ex2_spec.json");
pub const EX3_PLANT: &str = include_str!("../models/ex3_plant.crisp.json");
pub const EX3_SPEC: &str = include_str!("../models/ex3_spec.crisp.json");
pub const EX4_PLANT: &str = include_str!("../models/ex4_plant.json");
pub const EX4_SPEC: &str = include_str!("../models/ex4_spec.json");

/// `(name, plant, spec)` for every bundled example.
pub const ALL: [(&str, &str, &str); 4] = [
    ("example1", EX1_PLANT, EX1_SPEC),
    ("example2", EX2_PLANT, EX2_SPEC),
    ("example3", EX3_PLANT, EX3_SPEC),
    ("example4", EX4_PLANT, EX4_SPEC),
];

fn load(plant: &str, spec: &str) -> ControlProblem {
    load_problem(plant, spec).expect("bundled model is valid")
}

/// Fuzzy controllability counterexample (two crisp states, three events).
pub fn example1() -> ControlProblem {
    load(EX1_PLANT, EX1_SPEC)
}

/// Fuzzy observability counterexample with an unobservable event `d`.
pub fn example2() -> ControlProblem {
    load(EX2_PLANT, EX2_SPEC)
}

/// Classical automata embedded as 0/1 fuzzy automata.
pub fn example3() -> ControlProblem {
    load(EX3_PLANT, EX3_SPEC)
}

/// Two-state treatment model with fuzzy observability.
pub fn example4() -> ControlProblem {
    load(EX4_PLANT, EX4_SPEC)
}

pub fn all() -> Vec<(&'static str, ControlProblem)> {
    ALL.iter().map(|(n, p, s)| (*n, load(p, s))).collect()
}
