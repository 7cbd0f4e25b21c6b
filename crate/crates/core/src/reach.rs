//! Reachable fuzzy states, state pairs and the observation-compatible
//! product.
//!
//! All graphs are built by breadth-first search from the initial state with
//! events expanded in declaration order, so each node's representative is
//! the shortlex-least string reaching it. Successors whose specification
//! component is the zero vector are not materialized: every string through
//! such a node has `pr(K)` degree zero, the zero vector is absorbing, and
//! all condition rows there hold trivially.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::hash::Hash;

use serde::Serialize;

use crate::algebra::StateVector;
use crate::model::{ControlProblem, EventId, EventString, FuzzyAutomaton, ObsFactor};

/// Generic BFS result: nodes in discovery order with parent links.
#[derive(Clone, Debug)]
struct Bfs<S, L> {
    nodes: Vec<S>,
    parent: Vec<Option<(usize, L)>>,
    edges: Vec<(usize, L, usize)>,
    visits: usize,
}

fn bfs<S, L>(root: S, events: usize, mut expand: impl FnMut(&S, EventId, &mut Vec<(L, S)>)) -> Bfs<S, L>
where
    S: Clone + Eq + Hash,
    L: Copy,
{
    let mut index: HashMap<S, usize> = HashMap::new();
    index.insert(root.clone(), 0);
    let mut g = Bfs {
        nodes: vec![root],
        parent: vec![None],
        edges: Vec::new(),
        visits: 0,
    };
    let mut out = Vec::new();
    let mut head = 0;
    while head < g.nodes.len() {
        let cur = g.nodes[head].clone();
        for e in 0..events {
            g.visits += 1;
            out.clear();
            expand(&cur, e, &mut out);
            for (label, next) in out.drain(..) {
                let id = match index.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = g.nodes.len();
                        index.insert(next.clone(), id);
                        g.nodes.push(next);
                        g.parent.push(Some((head, label)));
                        id
                    }
                };
                g.edges.push((head, label, id));
            }
        }
        head += 1;
    }
    g
}

fn path<S, L: Copy>(g: &Bfs<S, L>, mut node: usize) -> Vec<L> {
    let mut labels = Vec::new();
    while let Some((p, l)) = g.parent[node] {
        labels.push(l);
        node = p;
    }
    labels.reverse();
    labels
}

fn event_reps<S>(g: &Bfs<S, EventId>) -> Vec<EventString> {
    (0..g.nodes.len()).map(|i| EventString::new(path(g, i))).collect()
}

/// Reachable fuzzy states of the specification.
#[derive(Clone, Debug)]
pub struct ReachGraphH {
    pub nodes: Vec<StateVector>,
    pub reps: Vec<EventString>,
    pub edges: Vec<(usize, EventId, usize)>,
    pub visits: usize,
}

impl ReachGraphH {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn find(&self, v: &StateVector) -> Option<usize> {
        self.nodes.iter().position(|n| n == v)
    }
}

pub fn explore_states(h: &FuzzyAutomaton) -> ReachGraphH {
    let g = bfs(h.initial().clone(), h.events().len(), |p, e, out| {
        let next = h.step(p, e);
        if !next.is_zero() {
            out.push((e, next));
        }
    });
    ReachGraphH {
        reps: event_reps(&g),
        nodes: g.nodes,
        edges: g.edges,
        visits: g.visits,
    }
}

/// Reachable `(plant state, spec state)` pairs.
#[derive(Clone, Debug)]
pub struct PairGraph {
    pub nodes: Vec<(StateVector, StateVector)>,
    pub reps: Vec<EventString>,
    pub edges: Vec<(usize, EventId, usize)>,
    pub visits: usize,
}

impl PairGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn find(&self, q: &StateVector, p: &StateVector) -> Option<usize> {
        self.nodes.iter().position(|(a, b)| a == q && b == p)
    }
}

fn pair_successor(
    problem: &ControlProblem,
    q: &StateVector,
    p: &StateVector,
    e: EventId,
) -> Option<(StateVector, StateVector)> {
    let p2 = problem.spec.step(p, e);
    if p2.is_zero() {
        return None;
    }
    Some((problem.plant.step(q, e), p2))
}

pub fn explore_pairs(problem: &ControlProblem) -> PairGraph {
    let root = (problem.plant.initial().clone(), problem.spec.initial().clone());
    let g = bfs(root, problem.event_count(), |(q, p), e, out| {
        if let Some(next) = pair_successor(problem, q, p, e) {
            out.push((e, next));
        }
    });
    PairGraph {
        reps: event_reps(&g),
        nodes: g.nodes,
        edges: g.edges,
        visits: g.visits,
    }
}

/// A state pair extended with the projection factor of the string reaching
/// it and whether that string is ε.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PairState {
    pub q: StateVector,
    pub p: StateVector,
    pub factor: ObsFactor,
    pub is_epsilon: bool,
}

#[derive(Clone, Debug)]
pub struct AugmentedPairGraph {
    pub nodes: Vec<PairState>,
    pub reps: Vec<EventString>,
    pub edges: Vec<(usize, EventId, usize)>,
    pub visits: usize,
}

impl AugmentedPairGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

pub fn explore_augmented_pairs(problem: &ControlProblem) -> AugmentedPairGraph {
    let root = PairState {
        q: problem.plant.initial().clone(),
        p: problem.spec.initial().clone(),
        factor: ObsFactor::Empty,
        is_epsilon: true,
    };
    let attrs = &problem.attrs;
    let g = bfs(root, problem.event_count(), |n: &PairState, e, out| {
        if let Some((q, p)) = pair_successor(problem, &n.q, &n.p, e) {
            out.push((
                e,
                PairState {
                    q,
                    p,
                    factor: n.factor.step(attrs.attr(e)),
                    is_epsilon: false,
                },
            ));
        }
    });
    AugmentedPairGraph {
        reps: event_reps(&g),
        nodes: g.nodes,
        edges: g.edges,
        visits: g.visits,
    }
}

/// Edge kinds of the observation-compatible product.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Move {
    /// An unobservable event appended to `s` only.
    S(EventId),
    /// An unobservable event appended to `t` only.
    T(EventId),
    /// An observable event appended to both.
    Sync(EventId),
}

/// A node of the product: `q = q₀⊙s`, `p = p₀⊙s`, `t = p₀⊙t` for strings with
/// `P(s) = P(t)`, the shared projection factor, and whether `s` is ε.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ObsNode {
    pub q: StateVector,
    pub p: StateVector,
    pub t: StateVector,
    pub factor: ObsFactor,
    pub s_is_epsilon: bool,
}

#[derive(Clone, Debug)]
pub struct ObsProductGraph {
    pub nodes: Vec<ObsNode>,
    /// Representative `(s, t)` per node.
    pub reps: Vec<(EventString, EventString)>,
    pub edges: Vec<(usize, Move, usize)>,
    pub visits: usize,
}

impl ObsProductGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

pub fn build_obs_product(problem: &ControlProblem) -> ObsProductGraph {
    let (g_aut, h_aut, attrs) = (&problem.plant, &problem.spec, &problem.attrs);
    let root = ObsNode {
        q: g_aut.initial().clone(),
        p: h_aut.initial().clone(),
        t: h_aut.initial().clone(),
        factor: ObsFactor::Empty,
        s_is_epsilon: true,
    };
    let g = bfs(root, problem.event_count(), |n: &ObsNode, e, out| {
        let attr = attrs.attr(e);
        if attr.observable() {
            let p = h_aut.step(&n.p, e);
            let t = h_aut.step(&n.t, e);
            if !p.is_zero() && !t.is_zero() {
                out.push((
                    Move::Sync(e),
                    ObsNode {
                        q: g_aut.step(&n.q, e),
                        p,
                        t,
                        factor: n.factor.step(attr),
                        s_is_epsilon: false,
                    },
                ));
            }
        } else {
            let p = h_aut.step(&n.p, e);
            if !p.is_zero() {
                out.push((
                    Move::S(e),
                    ObsNode {
                        q: g_aut.step(&n.q, e),
                        p,
                        t: n.t.clone(),
                        factor: n.factor,
                        s_is_epsilon: false,
                    },
                ));
            }
            let t = h_aut.step(&n.t, e);
            if !t.is_zero() {
                out.push((
                    Move::T(e),
                    ObsNode {
                        t,
                        ..n.clone()
                    },
                ));
            }
        }
    });
    let reps = (0..g.nodes.len())
        .map(|i| {
            let mut s = EventString::empty();
            let mut t = EventString::empty();
            for m in path(&g, i) {
                match m {
                    Move::S(e) => s.push(e),
                    Move::T(e) => t.push(e),
                    Move::Sync(e) => {
                        s.push(e);
                        t.push(e);
                    }
                }
            }
            (s, t)
        })
        .collect();
    ObsProductGraph {
        reps,
        nodes: g.nodes,
        edges: g.edges,
        visits: g.visits,
    }
}

/// Node counts and exploration effort of one run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ExplorationStats {
    /// Reachable specification states.
    pub m1: usize,
    /// Reachable state pairs.
    pub m2: usize,
    pub augmented_pairs: usize,
    pub product_nodes: usize,
    pub events: usize,
    /// Node-event expansions summed over all graphs.
    pub visits: usize,
}

impl ExplorationStats {
    pub fn collect(problem: &ControlProblem) -> ExplorationStats {
        let h = explore_states(&problem.spec);
        let pairs = explore_pairs(problem);
        let aug = explore_augmented_pairs(problem);
        let prod = build_obs_product(problem);
        ExplorationStats {
            m1: h.len(),
            m2: pairs.len(),
            augmented_pairs: aug.len(),
            product_nodes: prod.len(),
            events: problem.event_count(),
            visits: h.visits + pairs.visits + aug.visits + prod.visits,
        }
    }

    /// `(m₁ + m₂ + augmented + product) · |E|`, the bound on `visits`.
    pub fn visit_bound(&self) -> usize {
        (self.m1 + self.m2 + self.augmented_pairs + self.product_nodes) * self.events
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum TreeMode {
    /// Computing tree, a branch ends where a node repeats one of its ancestors.
    Paper,
    /// Deduplicated reachability graph.
    Graph,
}

/// A node of a computing tree. Sibling events leading to the same node are
/// merged into one child.
#[derive(Clone, Debug)]
pub struct TreeNode<S> {
    pub events: Vec<EventId>,
    pub value: S,
    pub leaf: bool,
    pub children: Vec<TreeNode<S>>,
}

/// Expands the computing tree from `root`. Expansion stops after `limit`
/// nodes; the second component reports whether that happened.
pub fn computing_tree<S: Clone + Eq>(
    root: S,
    events: usize,
    limit: usize,
    step: impl Fn(&S, EventId) -> Option<S>,
) -> (TreeNode<S>, bool) {
    fn grow<S: Clone + Eq>(
        node: &mut TreeNode<S>,
        ancestors: &mut Vec<S>,
        events: usize,
        budget: &mut usize,
        step: &dyn Fn(&S, EventId) -> Option<S>,
    ) -> bool {
        let mut children: Vec<TreeNode<S>> = Vec::new();
        for e in 0..events {
            let Some(v) = step(&node.value, e) else {
                continue;
            };
            if let Some(c) = children.iter_mut().find(|c| c.value == v) {
                c.events.push(e);
                continue;
            }
            let leaf = v == node.value || ancestors.contains(&v);
            children.push(TreeNode {
                events: vec![e],
                value: v,
                leaf,
                children: Vec::new(),
            });
        }
        ancestors.push(node.value.clone());
        let mut truncated = false;
        for c in children.iter_mut().filter(|c| !c.leaf) {
            if *budget == 0 {
                truncated = true;
                break;
            }
            *budget -= 1;
            truncated |= grow(c, ancestors, events, budget, step);
        }
        ancestors.pop();
        node.children = children;
        truncated
    }
    let mut tree = TreeNode {
        events: Vec::new(),
        value: root,
        leaf: false,
        children: Vec::new(),
    };
    let mut budget = limit;
    let truncated = grow(&mut tree, &mut Vec::new(), events, &mut budget, &step);
    (tree, truncated)
}

pub fn pair_tree(problem: &ControlProblem, limit: usize) -> (TreeNode<(StateVector, StateVector)>, bool) {
    let root = (problem.plant.initial().clone(), problem.spec.initial().clone());
    computing_tree(root, problem.event_count(), limit, |(q, p), e| {
        pair_successor(problem, q, p, e)
    })
}

pub fn state_tree(h: &FuzzyAutomaton, limit: usize) -> (TreeNode<StateVector>, bool) {
    computing_tree(h.initial().clone(), h.events().len(), limit, |p, e| {
        let n = h.step(p, e);
        (!n.is_zero()).then_some(n)
    })
}

fn pair_label((q, p): &(StateVector, StateVector)) -> String {
    format!("({q}, {p})")
}

fn render_tree<S>(node: &TreeNode<S>, names: &[String], label: &dyn Fn(&S) -> String, depth: usize, out: &mut String) {
    let text = label(&node.value);
    let text = if node.leaf { format!("_{text}_") } else { text };
    if depth == 0 {
        let _ = writeln!(out, "{text}");
    } else {
        let evs: Vec<&str> = node.events.iter().map(|&e| names[e].as_str()).collect();
        let _ = writeln!(out, "{}{} -> {text}", "  ".repeat(depth), evs.join("|"));
    }
    for c in &node.children {
        render_tree(c, names, label, depth + 1, out);
    }
}

/// Indented text rendering of the pair computing tree (`Paper`) or of the
/// pair graph (`Graph`). Leaves of the computing tree are wrapped in `_`.
pub fn dump_tree(problem: &ControlProblem, mode: TreeMode) -> String {
    let names = problem.names();
    let mut out = String::new();
    match mode {
        TreeMode::Paper => {
            let (tree, truncated) = pair_tree(problem, 20_000);
            render_tree(&tree, names, &pair_label, 0, &mut out);
            if truncated {
                out.push_str("... (truncated)\n");
            }
        }
        TreeMode::Graph => {
            let g = explore_pairs(problem);
            for (i, (node, rep)) in g.nodes.iter().zip(&g.reps).enumerate() {
                let _ = writeln!(out, "n{i} {} s={}", pair_label(node), rep.render(names));
            }
            for (a, e, b) in &g.edges {
                let _ = writeln!(out, "n{a} -{}-> n{b}", names[*e]);
            }
        }
    }
    out
}

/// DOT rendering of the pair graph.
pub fn dump_dot(problem: &ControlProblem) -> String {
    let names = problem.names();
    let g = explore_pairs(problem);
    let mut out = String::from("digraph pairs {\n");
    for (i, (node, rep)) in g.nodes.iter().zip(&g.reps).enumerate() {
        let _ = writeln!(
            out,
            "  n{i} [label=\"{}\\ns={}\"];",
            pair_label(node),
            rep.render(names)
        );
    }
    for (a, e, b) in &g.edges {
        let _ = writeln!(out, "  n{a} -> n{b} [label=\"{}\"];", names[*e]);
    }
    out.push_str("}\n");
    out
}

/// Replays the representatives of a product node.
pub fn replay(problem: &ControlProblem, s: &EventString, t: &EventString) -> (StateVector, StateVector, StateVector) {
    let run = |a: &FuzzyAutomaton, w: &EventString| a.run(w).expect("representative uses the alphabet");
    (run(&problem.plant, s), run(&problem.spec, s), run(&problem.spec, t))
}
