//! Supervisor synthesis from the observer of the plant/specification pair,
//! closed-loop evaluation and the nonblocking check.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Degree, StateVector};
use crate::model::{ControlProblem, EventId, EventString, FuzzyAutomaton, ObsFactor};
use crate::verify::{theorem1_decision, Condition, ConditionRow, RowMode, VerificationReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SupervisorError {
    #[error("supervisor events {found:?} do not match plant events {expected:?}")]
    Alphabet {
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("observation `{0}` is outside the supervisor's domain")]
    Domain(String),
    #[error("invalid supervisor file: {0}")]
    Invalid(String),
}

/// Which construction produced the policies.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthesisCase {
    /// Some event has observability 0, so every string shares its
    /// observation with another string.
    SharedObservations,
    /// Every event is observable and each observation has one string.
    FullyObservable,
}

/// One observer node: the observation that first reaches it, its
/// projection factor, the enable degree per event, and the successor per
/// observable event.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupervisorNode {
    pub observation: EventString,
    pub factor: ObsFactor,
    pub policy: Vec<Degree>,
    pub next: Vec<Option<usize>>,
}

/// Two consistent strings that would give different enable degrees for the
/// same observation and event; the supervisor keeps the larger.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Divergence {
    pub observation: String,
    pub event: String,
    pub low: Degree,
    pub high: Degree,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Supervisor {
    names: Vec<String>,
    observable: Vec<bool>,
    pub case: SynthesisCase,
    /// Whether the existence check passed for the inputs it was built from.
    pub conditions_met: bool,
    pub nodes: Vec<SupervisorNode>,
    pub divergences: Vec<Divergence>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct ObserverKey {
    parts: Vec<(StateVector, StateVector)>,
    factor: ObsFactor,
    root: bool,
}

fn closure(problem: &ControlProblem, seed: Vec<(StateVector, StateVector)>) -> Vec<(StateVector, StateVector)> {
    let mut seen: HashSet<(StateVector, StateVector)> = seed.iter().cloned().collect();
    let mut queue: VecDeque<_> = seed.into();
    while let Some((q, p)) = queue.pop_front() {
        for e in (0..problem.event_count()).filter(|&e| !problem.attrs.observable(e)) {
            let next = (problem.plant.step(&q, e), problem.spec.step(&p, e));
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    let mut parts: Vec<_> = seen.into_iter().collect();
    parts.sort();
    parts
}

fn root_policy(problem: &ControlProblem) -> Vec<Degree> {
    let p0 = problem.spec.initial();
    (0..problem.event_count())
        .map(|e| {
            let f = ObsFactor::Empty.step(problem.attrs.attr(e));
            f.scale(problem.spec.step(p0, e).height())
        })
        .collect()
}

/// Enable degree for one `(q, p)` part with the best alternative spec
/// degree of the class.
fn shared_policy(
    problem: &ControlProblem,
    q: &StateVector,
    p: &StateVector,
    best_alt: Degree,
    factor: ObsFactor,
    e: EventId,
) -> Degree {
    let attr = problem.attrs.attr(e);
    let next = factor.step(attr);
    let uc = next.scale(attr.unctrl);
    let y = problem.spec.step(p, e).height();
    if y <= best_alt {
        let gen = next.scale(problem.plant.step(q, e).height());
        uc.max(next.scale(best_alt).min(gen))
    } else {
        uc.max(next.scale(y))
    }
}

fn single_policy(problem: &ControlProblem, q: &StateVector, p: &StateVector, factor: ObsFactor, e: EventId) -> Degree {
    let attr = problem.attrs.attr(e);
    let next = factor.step(attr);
    let y = problem.spec.step(p, e).height();
    if y <= attr.unctrl {
        let gen = next.scale(problem.plant.step(q, e).height());
        next.scale(attr.unctrl).min(gen)
    } else {
        next.scale(y)
    }
}

/// Builds the supervisor on the observer of `(plant, spec)`: one node per
/// distinct set of state pairs consistent with an observation.
pub fn synthesize(problem: &ControlProblem) -> Supervisor {
    let n = problem.event_count();
    let names = problem.names().to_vec();
    let case = if problem.attrs.all_observable() {
        SynthesisCase::FullyObservable
    } else {
        SynthesisCase::SharedObservations
    };
    let conditions_met = theorem1_decision(problem, RowMode::Failures).exists;

    let root = ObserverKey {
        parts: closure(
            problem,
            vec![(problem.plant.initial().clone(), problem.spec.initial().clone())],
        ),
        factor: ObsFactor::Empty,
        root: true,
    };
    let mut index: HashMap<ObserverKey, usize> = HashMap::new();
    index.insert(root.clone(), 0);
    let mut keys = vec![root];
    let mut nodes = vec![SupervisorNode {
        observation: EventString::empty(),
        factor: ObsFactor::Empty,
        policy: Vec::new(),
        next: vec![None; n],
    }];
    let mut divergences = Vec::new();
    let mut head = 0;
    while head < keys.len() {
        let key = keys[head].clone();
        nodes[head].policy = if key.root {
            root_policy(problem)
        } else {
            let obs = nodes[head].observation.render(&names);
            (0..n)
                .map(|e| {
                    let values: Vec<Degree> = match case {
                        SynthesisCase::FullyObservable => key
                            .parts
                            .iter()
                            .map(|(q, p)| single_policy(problem, q, p, key.factor, e))
                            .collect(),
                        SynthesisCase::SharedObservations => {
                            let best_alt = key
                                .parts
                                .iter()
                                .map(|(_, p)| problem.spec.step(p, e).height())
                                .max()
                                .unwrap_or(Degree::ZERO);
                            key.parts
                                .iter()
                                .map(|(q, p)| shared_policy(problem, q, p, best_alt, key.factor, e))
                                .collect()
                        }
                    };
                    let high = values.iter().copied().max().unwrap_or(Degree::ZERO);
                    let low = values.iter().copied().min().unwrap_or(Degree::ZERO);
                    if low != high {
                        divergences.push(Divergence {
                            observation: obs.clone(),
                            event: names[e].clone(),
                            low,
                            high,
                        });
                    }
                    high
                })
                .collect()
        };
        for e in (0..n).filter(|&e| problem.attrs.observable(e)) {
            let stepped = key
                .parts
                .iter()
                .map(|(q, p)| (problem.plant.step(q, e), problem.spec.step(p, e)))
                .collect();
            let next_key = ObserverKey {
                parts: closure(problem, stepped),
                factor: key.factor.step(problem.attrs.attr(e)),
                root: false,
            };
            let id = match index.get(&next_key) {
                Some(&id) => id,
                None => {
                    let id = keys.len();
                    index.insert(next_key.clone(), id);
                    keys.push(next_key);
                    nodes.push(SupervisorNode {
                        observation: nodes[head].observation.extended(e),
                        factor: ObsFactor::Empty,
                        policy: Vec::new(),
                        next: vec![None; n],
                    });
                    id
                }
            };
            nodes[id].factor = keys[id].factor;
            nodes[head].next[e] = Some(id);
        }
        head += 1;
    }
    Supervisor {
        names,
        observable: (0..n).map(|e| problem.attrs.observable(e)).collect(),
        case,
        conditions_met,
        nodes,
        divergences,
    }
}

impl Supervisor {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Parses a comma-separated list of this supervisor's event names; the
    /// empty string is ε.
    pub fn parse_string(&self, text: &str) -> Result<EventString, SupervisorError> {
        let text = text.trim();
        if text.is_empty() || text == "ε" {
            return Ok(EventString::empty());
        }
        text.split(',')
            .map(|name| {
                let name = name.trim();
                self.names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| SupervisorError::Invalid(format!("unknown event `{name}`")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(EventString::new)
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Observer node for a projected string.
    pub fn node_of(&self, observation: &EventString) -> Option<usize> {
        let mut cur = 0;
        for &e in observation.events() {
            cur = (*self.nodes.get(cur)?.next.get(e)?)?;
        }
        Some(cur)
    }

    pub fn policy(&self, observation: &EventString) -> Option<&[Degree]> {
        self.node_of(observation).map(|i| self.nodes[i].policy.as_slice())
    }

    /// A supervisor with a single observer node enabling every event at
    /// `degree`; observable events loop back to it.
    pub fn constant(problem: &ControlProblem, degree: Degree) -> Supervisor {
        let n = problem.event_count();
        Supervisor {
            names: problem.names().to_vec(),
            observable: (0..n).map(|e| problem.attrs.observable(e)).collect(),
            case: SynthesisCase::SharedObservations,
            conditions_met: false,
            nodes: vec![SupervisorNode {
                observation: EventString::empty(),
                factor: ObsFactor::Empty,
                policy: vec![degree; n],
                next: (0..n).map(|e| problem.attrs.observable(e).then_some(0)).collect(),
            }],
            divergences: Vec::new(),
        }
    }

    fn check_plant(&self, plant: &FuzzyAutomaton) -> Result<(), SupervisorError> {
        let expected = plant.event_names();
        if expected != self.names {
            return Err(SupervisorError::Alphabet {
                expected,
                found: self.names.clone(),
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let file = SupervisorFile {
            events: self.names.clone(),
            observable: self
                .names
                .iter()
                .zip(&self.observable)
                .filter(|(_, &o)| o)
                .map(|(n, _)| n.clone())
                .collect(),
            case: self.case,
            conditions_met: self.conditions_met,
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeFile {
                    observation: render_names(&n.observation, &self.names),
                    factor: match n.factor {
                        ObsFactor::Empty => None,
                        ObsFactor::Factor(d) => Some(d),
                    },
                    policy: self
                        .names
                        .iter()
                        .cloned()
                        .zip(n.policy.iter().copied())
                        .collect(),
                    next: n
                        .next
                        .iter()
                        .enumerate()
                        .filter_map(|(e, t)| t.map(|t| (self.names[e].clone(), t)))
                        .collect(),
                })
                .collect(),
            divergences: self.divergences.clone(),
        };
        serde_json::to_string_pretty(&file).expect("supervisor serializes")
    }

    pub fn from_json(text: &str) -> Result<Supervisor, SupervisorError> {
        let file: SupervisorFile =
            serde_json::from_str(text).map_err(|e| SupervisorError::Invalid(e.to_string()))?;
        let names = file.events;
        let id_of = |name: &str| {
            names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| SupervisorError::Invalid(format!("unknown event `{name}`")))
        };
        let count = file.nodes.len();
        let mut nodes = Vec::with_capacity(count);
        for (i, nf) in file.nodes.into_iter().enumerate() {
            let mut policy = vec![Degree::ZERO; names.len()];
            for (name, d) in &nf.policy {
                policy[id_of(name)?] = *d;
            }
            if nf.policy.len() != names.len() {
                return Err(SupervisorError::Invalid(format!(
                    "node {i} does not give a degree for every event"
                )));
            }
            let mut next = vec![None; names.len()];
            for (name, &t) in &nf.next {
                if t >= count {
                    return Err(SupervisorError::Invalid(format!("node {i} points to missing node {t}")));
                }
                next[id_of(name)?] = Some(t);
            }
            let observation = if nf.observation.is_empty() {
                EventString::empty()
            } else {
                EventString::new(
                    nf.observation
                        .split(',')
                        .map(|n| id_of(n.trim()))
                        .collect::<Result<_, _>>()?,
                )
            };
            nodes.push(SupervisorNode {
                observation,
                factor: nf.factor.map_or(ObsFactor::Empty, ObsFactor::Factor),
                policy,
                next,
            });
        }
        if nodes.is_empty() {
            return Err(SupervisorError::Invalid("no nodes".into()));
        }
        let mut observable = vec![false; names.len()];
        for name in &file.observable {
            observable[id_of(name)?] = true;
        }
        Ok(Supervisor {
            observable,
            names,
            case: file.case,
            conditions_met: file.conditions_met,
            nodes,
            divergences: file.divergences,
        })
    }
}

fn render_names(s: &EventString, names: &[String]) -> String {
    s.events()
        .iter()
        .map(|&e| names[e].as_str())
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Serialize, Deserialize)]
struct NodeFile {
    observation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    factor: Option<Degree>,
    policy: BTreeMap<String, Degree>,
    #[serde(default)]
    next: BTreeMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct SupervisorFile {
    events: Vec<String>,
    observable: Vec<String>,
    case: SynthesisCase,
    #[serde(default)]
    conditions_met: bool,
    nodes: Vec<NodeFile>,
    #[serde(default)]
    divergences: Vec<Divergence>,
}

/// Running and marked closed-loop degree at every prefix of a string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedLoopTrace {
    pub prefixes: Vec<EventString>,
    pub running: Vec<Degree>,
    pub marked: Vec<Degree>,
}

/// One step of the closed loop from observer node `node`, plant state `q`
/// and running degree `cl`. `None` when the observation leaves the
/// supervisor's domain.
fn loop_step(
    plant: &FuzzyAutomaton,
    sup: &Supervisor,
    node: usize,
    q: &StateVector,
    cl: Degree,
    e: EventId,
) -> Option<(usize, StateVector, Degree)> {
    let n = &sup.nodes[node];
    // Unobservable events leave the observation, and so the factor, as is.
    let next = if sup.observable[e] { n.next[e]? } else { node };
    let q2 = plant.step(q, e);
    let cl2 = cl.min(sup.nodes[next].factor.scale(q2.height())).min(n.policy[e]);
    Some((next, q2, cl2))
}

pub fn closed_loop_trace(
    plant: &FuzzyAutomaton,
    sup: &Supervisor,
    s: &EventString,
) -> Result<ClosedLoopTrace, SupervisorError> {
    sup.check_plant(plant)?;
    let mut trace = ClosedLoopTrace {
        prefixes: vec![EventString::empty()],
        running: vec![Degree::ONE],
        marked: vec![Degree::ONE.min(plant.marked_at(plant.initial()))],
    };
    let (mut node, mut q, mut cl) = (0, plant.initial().clone(), Degree::ONE);
    let mut prefix = EventString::empty();
    for &e in s.events() {
        if e >= sup.names.len() {
            return Err(SupervisorError::Domain(format!("event index {e}")));
        }
        prefix.push(e);
        let Some((next, q2, cl2)) = loop_step(plant, sup, node, &q, cl, e) else {
            return Err(SupervisorError::Domain(render_names(&prefix, &sup.names)));
        };
        (node, q, cl) = (next, q2, cl2);
        trace.prefixes.push(prefix.clone());
        trace.running.push(cl);
        trace.marked.push(cl.min(plant.marked_at(&q)));
    }
    Ok(trace)
}

pub fn closed_loop_degree(plant: &FuzzyAutomaton, sup: &Supervisor, s: &EventString) -> Result<Degree, SupervisorError> {
    Ok(*closed_loop_trace(plant, sup, s)?.running.last().expect("trace has ε"))
}

pub fn closed_loop_marked(plant: &FuzzyAutomaton, sup: &Supervisor, s: &EventString) -> Result<Degree, SupervisorError> {
    Ok(*closed_loop_trace(plant, sup, s)?.marked.last().expect("trace has ε"))
}

/// Largest closed-loop marked degree over all extensions of the
/// configuration `(node, q, cl)`, found by exhausting the finitely many
/// reachable configurations.
fn best_marked_extension(plant: &FuzzyAutomaton, sup: &Supervisor, node: usize, q: StateVector, cl: Degree) -> Degree {
    let start = (node, q, cl);
    let mut seen: HashSet<(usize, StateVector, Degree)> = HashSet::new();
    seen.insert(start.clone());
    let mut queue = VecDeque::from([start]);
    let mut best = Degree::ZERO;
    while let Some((node, q, cl)) = queue.pop_front() {
        best = best.max(cl.min(plant.marked_at(&q)));
        if cl.is_zero() {
            continue;
        }
        for e in 0..sup.names.len() {
            let Some(cfg) = loop_step(plant, sup, node, &q, cl, e) else {
                continue;
            };
            if seen.insert(cfg.clone()) {
                queue.push_back(cfg);
            }
        }
    }
    best
}

/// Compares the running closed-loop degree of every string up to `depth`
/// with `D(P(s))` times the best marked degree among its extensions (1 at ε).
/// The supremum over extensions is computed exactly on the finite
/// configuration space, not up to a length bound.
pub fn check_nonblocking(
    plant: &FuzzyAutomaton,
    sup: &Supervisor,
    depth: usize,
    mode: RowMode,
) -> Result<VerificationReport, SupervisorError> {
    sup.check_plant(plant)?;
    let n = sup.names.len();
    let mut rows = Vec::new();
    // Walk strings in shortlex order carrying their closed-loop configuration.
    let mut layer = vec![(EventString::empty(), Some((0usize, plant.initial().clone(), Degree::ONE)))];
    for len in 0..=depth {
        let mut next_layer = Vec::new();
        for (s, cfg) in layer {
            let Some((node, q, cl)) = cfg else {
                return Err(SupervisorError::Domain(render_names(&s, &sup.names)));
            };
            let sup_m = best_marked_extension(plant, sup, node, q.clone(), cl);
            let rhs = if s.is_empty() {
                Degree::ONE
            } else {
                sup.nodes[node].factor.scale(sup_m)
            };
            rows.push(ConditionRow {
                s: s.clone(),
                t: None,
                sigma: None,
                x1: Some(cl),
                x2: Some(sup_m),
                x3: None,
                y: None,
                v: cl,
                w: rhs,
                pass: cl == rhs,
            });
            if len < depth {
                for e in 0..n {
                    next_layer.push((s.extended(e), loop_step(plant, sup, node, &q, cl, e)));
                }
            }
        }
        layer = next_layer;
    }
    let mut kept = Vec::new();
    let mut witness = None;
    let checked = rows.len();
    for r in rows {
        if !r.pass && witness.is_none() {
            witness = Some(r.clone());
        }
        if mode == RowMode::All || !r.pass {
            kept.push(r);
        }
    }
    Ok(VerificationReport {
        condition: Condition::Nonblocking,
        verdict: witness.is_none(),
        rows: kept,
        witness,
        rows_checked: checked,
        nodes: sup.len(),
        visits: 0,
    })
}
