#![allow(dead_code)]

use fdes::algebra::{Degree, EventMatrix, StateVector};
use fdes::oracle::{brute_force_check, observability_row, OracleConfig};
use fdes::reach::{build_obs_product, explore_augmented_pairs};
use fdes::verify::{check_controllability, check_lm_closed, check_observability, RowMode};
use fdes::model::{Attributes, ControlProblem, EventAttr, FuzzyAutomaton, NamedEvent};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const GRID: [&str; 8] = ["0", "0.2", "0.4", "0.5", "0.7", "0.8", "0.9", "1"];

/// Seeds of the random model set; fixed so failures reproduce.
pub const SEEDS: std::ops::Range<u64> = 1000..1120;

fn grid(rng: &mut ChaCha8Rng) -> Degree {
    GRID.choose(rng).unwrap().parse().unwrap()
}

fn sparse(rng: &mut ChaCha8Rng) -> Degree {
    if rng.gen_bool(0.4) {
        Degree::ZERO
    } else {
        grid(rng)
    }
}

/// A plant and specification with 2–3 crisp states and 2–3 events, degrees
/// from `GRID`. The specification is the plant with entries lowered at
/// random, so it stays below the plant in most instances.
pub fn random_problem(seed: u64) -> ControlProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=3);
    let m = rng.gen_range(2..=3);
    let names: Vec<String> = ["a", "b", "c"][..m].iter().map(|s| s.to_string()).collect();
    let initial = if rng.gen_bool(0.5) {
        StateVector::unit(n, 0)
    } else {
        let mut v = vec![Degree::ZERO; n];
        v[0] = grid(&mut rng).max("0.2".parse().unwrap());
        StateVector::new(v)
    };
    let mut plant_events = Vec::new();
    let mut spec_events = Vec::new();
    for name in &names {
        let rows: Vec<Vec<Degree>> = (0..n).map(|_| (0..n).map(|_| sparse(&mut rng)).collect()).collect();
        let lowered: Vec<Vec<Degree>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&x| if rng.gen_bool(0.3) { x.min(grid(&mut rng)) } else { x })
                    .collect()
            })
            .collect();
        plant_events.push(NamedEvent {
            name: name.clone(),
            matrix: EventMatrix::from_rows(rows).unwrap(),
        });
        spec_events.push(NamedEvent {
            name: name.clone(),
            matrix: EventMatrix::from_rows(lowered).unwrap(),
        });
    }
    let spec_initial = if rng.gen_bool(0.7) {
        initial.clone()
    } else {
        StateVector::new(initial.entries().iter().map(|&x| x.min(grid(&mut rng))).collect())
    };
    let attrs = names
        .iter()
        .map(|_| {
            let obs = if rng.gen_bool(0.3) { Degree::ZERO } else { grid(&mut rng) };
            EventAttr::new(obs, grid(&mut rng))
        })
        .collect();
    let plant = FuzzyAutomaton::new(initial, plant_events, None).unwrap();
    let spec = FuzzyAutomaton::new(spec_initial, spec_events, None).unwrap();
    ControlProblem::new(plant, spec, Attributes::new(names, attrs)).unwrap()
}

pub fn random_set() -> Vec<(u64, ControlProblem)> {
    SEEDS.map(|s| (s, random_problem(s))).collect()
}

/// Longest representative over the augmented pairs and the product: every
/// node, and so every distinct row, is reached within this length.
pub fn depth(p: &ControlProblem) -> usize {
    let prod = build_obs_product(p);
    let aug = explore_augmented_pairs(p);
    let d_obs = prod.reps.iter().map(|(s, t)| s.len().max(t.len())).max().unwrap();
    let d_aug = aug.reps.iter().map(|s| s.len()).max().unwrap();
    d_obs.max(d_aug)
}

/// Whether the oracle can enumerate every string up to `d + 1`.
pub fn feasible(p: &ControlProblem, d: usize) -> bool {
    p.event_count().pow(d as u32 + 1) <= 200_000
}

/// Full agreement at bound `d`: verdicts equal; controllability and
/// closedness witnesses identical (both are shortlex-first); the checker's
/// observability witness fails with the same values when re-evaluated on
/// strings.
pub fn agree(label: &str, p: &ControlProblem, d: usize) -> Result<(), String> {
    let oracle = brute_force_check(p, &OracleConfig::new(d, d));
    let ctrl = check_controllability(p, RowMode::Failures);
    let obs = check_observability(p, RowMode::Failures);
    let lm = check_lm_closed(p, RowMode::Failures);
    let fail = |what: &str| Err(format!("{label}: {what} disagrees"));
    if ctrl.verdict != oracle[0].verdict || ctrl.witness != oracle[0].witness {
        return fail("controllability");
    }
    if obs.verdict != oracle[1].verdict {
        return fail("observability");
    }
    if let Some(w) = &obs.witness {
        if observability_row(p, &w.s, w.t.as_ref().unwrap(), w.sigma.unwrap()) != *w {
            return fail("observability witness");
        }
    }
    if lm.verdict != oracle[2].verdict || lm.witness != oracle[2].witness {
        return fail("closedness");
    }
    Ok(())
}
