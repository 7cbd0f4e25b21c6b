//! Decision procedures for controllability, observability, L_m-closedness
//! and admissibility, with per-row V/W values and witnesses.

use serde::Serialize;

use crate::algebra::{Degree, StateVector};
use crate::model::{
    eff_generated, eff_unctrl, project, ControlProblem, EventId, EventString, FuzzyAutomaton,
    ObsFactor,
};
use crate::reach::{
    build_obs_product, explore_augmented_pairs, explore_pairs, explore_states, ExplorationStats,
};
use crate::supervisor::Supervisor;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Controllability,
    Observability,
    LmClosed,
    Admissibility,
    Nonblocking,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::Controllability => "controllability",
            Condition::Observability => "observability",
            Condition::LmClosed => "lm_closed",
            Condition::Admissibility => "admissibility",
            Condition::Nonblocking => "nonblocking",
        }
    }
}

/// One instance of a condition inequality. The `x` columns are the bracketed
/// heights; which ones are used depends on the condition. For `LmClosed`
/// rows `pass` means `V == W`, for every other condition `V <= W`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionRow {
    pub s: EventString,
    pub t: Option<EventString>,
    pub sigma: Option<EventId>,
    pub x1: Option<Degree>,
    pub x2: Option<Degree>,
    pub x3: Option<Degree>,
    pub y: Option<Degree>,
    pub v: Degree,
    pub w: Degree,
    pub pass: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum RowMode {
    #[default]
    All,
    Failures,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub condition: Condition,
    pub verdict: bool,
    /// Rows kept according to the requested `RowMode`, in exploration order.
    pub rows: Vec<ConditionRow>,
    /// First failing row in exploration order.
    pub witness: Option<ConditionRow>,
    pub rows_checked: usize,
    pub nodes: usize,
    pub visits: usize,
}

impl VerificationReport {
    fn collect(
        condition: Condition,
        mode: RowMode,
        nodes: usize,
        visits: usize,
        all: impl IntoIterator<Item = ConditionRow>,
    ) -> VerificationReport {
        let mut rows = Vec::new();
        let mut witness = None;
        let mut rows_checked = 0;
        for row in all {
            rows_checked += 1;
            if !row.pass && witness.is_none() {
                witness = Some(row.clone());
            }
            if mode == RowMode::All || !row.pass {
                rows.push(row);
            }
        }
        VerificationReport {
            condition,
            verdict: witness.is_none(),
            rows,
            witness,
            rows_checked,
            nodes,
            visits,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionRow> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

/// `1` for the empty string, otherwise `d · x`.
fn scaled_or_one(is_epsilon: bool, factor: ObsFactor, x: Degree) -> Degree {
    if is_epsilon {
        Degree::ONE
    } else {
        factor.scale(x)
    }
}

fn ctrl_row(
    problem: &ControlProblem,
    s: EventString,
    q: &StateVector,
    p: &StateVector,
    factor: ObsFactor,
    is_epsilon: bool,
    sigma: EventId,
) -> ConditionRow {
    let attr = problem.attrs.attr(sigma);
    let next = factor.step(attr);
    let x1 = p.height();
    let x2 = attr.unctrl;
    let x3 = problem.plant.step(q, sigma).height();
    let y = problem.spec.step(p, sigma).height();
    let v = scaled_or_one(is_epsilon, factor, x1)
        .min(next.scale(x2))
        .min(next.scale(x3));
    let w = next.scale(y);
    ConditionRow {
        s,
        t: None,
        sigma: Some(sigma),
        x1: Some(x1),
        x2: Some(x2),
        x3: Some(x3),
        y: Some(y),
        v,
        w,
        pass: v <= w,
    }
}

/// `min{pr(K)^f(s), Σ_uc^f(sσ), L^f(sσ)} <= pr(K)^f(sσ)` at every reachable
/// `(q, p, d)` node.
pub fn check_controllability(problem: &ControlProblem, mode: RowMode) -> VerificationReport {
    let g = explore_augmented_pairs(problem);
    let rows = g.nodes.iter().zip(&g.reps).flat_map(|(n, s)| {
        (0..problem.event_count())
            .map(move |e| ctrl_row(problem, s.clone(), &n.q, &n.p, n.factor, n.is_epsilon, e))
    });
    VerificationReport::collect(Condition::Controllability, mode, g.len(), g.visits, rows)
}

#[allow(clippy::too_many_arguments)]
fn obs_row(
    problem: &ControlProblem,
    s: EventString,
    t: EventString,
    q: &StateVector,
    p: &StateVector,
    p_t: &StateVector,
    factor: ObsFactor,
    s_is_epsilon: bool,
    sigma: EventId,
) -> ConditionRow {
    let next = factor.step(problem.attrs.attr(sigma));
    let x1 = p.height();
    let x2 = problem.spec.step(p_t, sigma).height();
    let x3 = problem.plant.step(q, sigma).height();
    let y = problem.spec.step(p, sigma).height();
    let v = scaled_or_one(s_is_epsilon, factor, x1)
        .min(next.scale(x2))
        .min(next.scale(x3));
    let w = next.scale(y);
    ConditionRow {
        s,
        t: Some(t),
        sigma: Some(sigma),
        x1: Some(x1),
        x2: Some(x2),
        x3: Some(x3),
        y: Some(y),
        v,
        w,
        pass: v <= w,
    }
}

/// `min{pr(K)^f(s), pr(K)^f(tσ), L^f(sσ)} <= pr(K)^f(sσ)` for all `s, t`
/// with equal projections, decided on the observation-compatible product.
pub fn check_observability(problem: &ControlProblem, mode: RowMode) -> VerificationReport {
    let g = build_obs_product(problem);
    let rows = g.nodes.iter().zip(&g.reps).flat_map(|(n, (s, t))| {
        (0..problem.event_count()).map(move |e| {
            obs_row(
                problem,
                s.clone(),
                t.clone(),
                &n.q,
                &n.p,
                &n.t,
                n.factor,
                n.s_is_epsilon,
                e,
            )
        })
    });
    VerificationReport::collect(Condition::Observability, mode, g.len(), g.visits, rows)
}

/// `K(s) == min{pr(K)^f(s), L_m(s)}` at every reachable `(q, p, d)` node.
pub fn check_lm_closed(problem: &ControlProblem, mode: RowMode) -> VerificationReport {
    let g = explore_augmented_pairs(problem);
    let rows = g.nodes.iter().zip(&g.reps).map(|(n, s)| {
        let x1 = n.p.height();
        let x3 = problem.plant.marked_at(&n.q);
        let v = problem.spec.marked_at(&n.p);
        let w = scaled_or_one(n.is_epsilon, n.factor, x1).min(x3);
        ConditionRow {
            s: s.clone(),
            t: None,
            sigma: None,
            x1: Some(x1),
            x2: None,
            x3: Some(x3),
            y: None,
            v,
            w,
            pass: v == w,
        }
    });
    VerificationReport::collect(Condition::LmClosed, mode, g.len(), g.visits, rows)
}

/// `min{Σ_uc^f(sσ), L^f(sσ)} <= S(P(s))(σ)` for every `s` with `|s| <= depth`.
/// Strings whose observation is outside the supervisor's domain fail with
/// `W = 0`.
pub fn check_admissibility(
    problem: &ControlProblem,
    sup: &Supervisor,
    depth: usize,
    mode: RowMode,
) -> VerificationReport {
    let n = problem.event_count();
    let rows = EventString::all_up_to(n, depth).flat_map(|s| {
        let obs = project(&problem.attrs, &s);
        let policy = sup.policy(&obs).map(<[Degree]>::to_vec);
        (0..n).map(move |e| {
            let sigma_s = s.extended(e);
            let x2 = eff_unctrl(&problem.attrs, &s, e);
            let x3 = eff_generated(&problem.plant, &problem.attrs, &sigma_s)
                .expect("enumerated strings use the alphabet");
            let v = x2.min(x3);
            let w = policy.as_ref().map_or(Degree::ZERO, |p| p[e]);
            ConditionRow {
                s: s.clone(),
                t: None,
                sigma: Some(e),
                x1: None,
                x2: Some(x2),
                x3: Some(x3),
                y: None,
                v,
                w,
                pass: v <= w,
            }
        })
    });
    VerificationReport::collect(Condition::Admissibility, mode, sup.len(), 0, rows)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ContainmentKind {
    /// `K(s) <= L_m(s)`.
    Marked,
    /// `pr(K)(s) <= L_m(s)`.
    Prefix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContainmentViolation {
    pub kind: ContainmentKind,
    pub s: EventString,
    pub lhs: Degree,
    pub rhs: Degree,
}

/// The standing assumptions of the existence theorem, checked at the
/// reachable `(q, p)` pairs (every value the languages take is realized at
/// one of them).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisReport {
    pub k_epsilon: Degree,
    pub violations: Vec<ContainmentViolation>,
}

impl HypothesisReport {
    pub fn holds(&self) -> bool {
        self.k_epsilon == Degree::ONE && self.violations.is_empty()
    }
}

pub fn check_hypotheses(problem: &ControlProblem) -> HypothesisReport {
    let g = explore_pairs(problem);
    let mut violations = Vec::new();
    for ((q, p), s) in g.nodes.iter().zip(&g.reps) {
        let lm = problem.plant.marked_at(q);
        let k = problem.spec.marked_at(p);
        let pr = p.height();
        if k > lm {
            violations.push(ContainmentViolation {
                kind: ContainmentKind::Marked,
                s: s.clone(),
                lhs: k,
                rhs: lm,
            });
        }
        if pr > lm {
            violations.push(ContainmentViolation {
                kind: ContainmentKind::Prefix,
                s: s.clone(),
                lhs: pr,
                rhs: lm,
            });
        }
    }
    HypothesisReport {
        k_epsilon: problem.spec.marked_at(problem.spec.initial()),
        violations,
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionStatus {
    /// Hypotheses hold and all three conditions pass.
    Exists,
    /// Hypotheses hold and at least one condition fails.
    ConditionsFail,
    /// A standing assumption is violated; the condition reports are still
    /// computed for diagnosis.
    HypothesisViolated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decision {
    pub status: DecisionStatus,
    pub exists: bool,
    pub hypotheses: HypothesisReport,
    pub controllability: VerificationReport,
    pub observability: VerificationReport,
    pub lm_closed: VerificationReport,
    pub stats: ExplorationStats,
}

impl Decision {
    pub fn reports(&self) -> [&VerificationReport; 3] {
        [&self.controllability, &self.observability, &self.lm_closed]
    }

    pub fn conditions_pass(&self) -> bool {
        self.reports().iter().all(|r| r.verdict)
    }
}

pub fn theorem1_decision(problem: &ControlProblem, mode: RowMode) -> Decision {
    let hypotheses = check_hypotheses(problem);
    let controllability = check_controllability(problem, mode);
    let observability = check_observability(problem, mode);
    let lm_closed = check_lm_closed(problem, mode);
    let pass = controllability.verdict && observability.verdict && lm_closed.verdict;
    let status = if !hypotheses.holds() {
        DecisionStatus::HypothesisViolated
    } else if pass {
        DecisionStatus::Exists
    } else {
        DecisionStatus::ConditionsFail
    };
    Decision {
        status,
        exists: status == DecisionStatus::Exists,
        hypotheses,
        controllability,
        observability,
        lm_closed,
        stats: ExplorationStats::collect(problem),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrefixClosureWarning {
    pub s: EventString,
    pub generated: Degree,
    pub best_marked: Degree,
}

/// Nodes of the specification whose generated degree differs from the best
/// marked degree reachable from them. Empty when the generated language is
/// the prefix closure of the marked one.
pub fn validate_prefix_closure(h: &FuzzyAutomaton) -> Vec<PrefixClosureWarning> {
    let g = explore_states(h);
    let n = g.len();
    // best[i] = max marked degree over nodes reachable from i, by fixpoint.
    let mut best: Vec<Degree> = g.nodes.iter().map(|v| h.marked_at(v)).collect();
    loop {
        let mut changed = false;
        for &(a, _, b) in &g.edges {
            if best[b] > best[a] {
                best[a] = best[b];
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (0..n)
        .filter(|&i| g.nodes[i].height() != best[i])
        .map(|i| PrefixClosureWarning {
            s: g.reps[i].clone(),
            generated: g.nodes[i].height(),
            best_marked: best[i],
        })
        .collect()
}

/// Observability rows in the layout of a hand-computed table: for each
/// shortest string `s` reaching a state pair, every `t` with
/// `P(t) = P(s)` and `|t| <= max(|s|, 1)`, evaluated on strings. The verdict
/// still comes from `check_observability`; this only reproduces rows.
pub fn tabulate_observability(problem: &ControlProblem) -> Vec<ConditionRow> {
    let attrs = &problem.attrs;
    let n = problem.event_count();
    let run = |a: &FuzzyAutomaton, w: &EventString| a.run(w).expect("alphabet string");
    let mut rows = Vec::new();
    for s in explore_pairs(problem).reps {
        let ps = project(attrs, &s);
        let (q, p) = (run(&problem.plant, &s), run(&problem.spec, &s));
        let factor = ObsFactor::along(attrs, &s);
        for t in EventString::all_up_to(n, s.len().max(1)) {
            if project(attrs, &t) != ps {
                continue;
            }
            let p_t = run(&problem.spec, &t);
            for e in 0..n {
                rows.push(obs_row(
                    problem,
                    s.clone(),
                    t.clone(),
                    &q,
                    &p,
                    &p_t,
                    factor,
                    s.is_empty(),
                    e,
                ));
            }
        }
    }
    rows
}
