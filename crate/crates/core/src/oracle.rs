//! Brute-force reference checker. Enumerates strings explicitly and
//! evaluates every degree from its string definition; it shares no code
//! with the graph explorations in `reach`.

use std::collections::HashMap;

use crate::algebra::Degree;
use crate::model::{
    eff_generated, eff_prefix, eff_unctrl, generated_degree, marked_degree, project,
    ControlProblem, EventString,
};
use crate::verify::{Condition, ConditionRow, RowMode, VerificationReport};

#[derive(Clone, Debug)]
pub struct OracleConfig {
    /// Longest `s` enumerated.
    pub max_len: usize,
    /// Longest `t` enumerated for observability.
    pub max_t_len: usize,
    pub conditions: Vec<Condition>,
    pub rows: RowMode,
}

impl OracleConfig {
    pub fn new(max_len: usize, max_t_len: usize) -> OracleConfig {
        OracleConfig {
            max_len,
            max_t_len,
            conditions: vec![
                Condition::Controllability,
                Condition::Observability,
                Condition::LmClosed,
            ],
            rows: RowMode::Failures,
        }
    }
}

fn finish(condition: Condition, mode: RowMode, rows: impl Iterator<Item = ConditionRow>) -> VerificationReport {
    let mut kept = Vec::new();
    let mut witness = None;
    let mut checked = 0;
    for r in rows {
        checked += 1;
        if !r.pass && witness.is_none() {
            witness = Some(r.clone());
        }
        if mode == RowMode::All || !r.pass {
            kept.push(r);
        }
    }
    VerificationReport {
        condition,
        verdict: witness.is_none(),
        rows: kept,
        witness,
        rows_checked: checked,
        nodes: 0,
        visits: 0,
    }
}

/// Degree evaluations on strings, all unwrapped: enumerated strings only use
/// the problem's alphabet.
struct Eval<'a>(&'a ControlProblem);

impl Eval<'_> {
    fn l_g(&self, s: &EventString) -> Degree {
        generated_degree(&self.0.plant, s).unwrap()
    }
    fn l_h(&self, s: &EventString) -> Degree {
        generated_degree(&self.0.spec, s).unwrap()
    }
    fn pr_f(&self, s: &EventString) -> Degree {
        eff_prefix(&self.0.spec, &self.0.attrs, s).unwrap()
    }
    fn gen_f(&self, s: &EventString) -> Degree {
        eff_generated(&self.0.plant, &self.0.attrs, s).unwrap()
    }
}

/// Controllability row for `(s, σ)` evaluated on strings.
pub fn controllability_row(problem: &ControlProblem, s: &EventString, sigma: usize) -> ConditionRow {
    let ev = Eval(problem);
    let ss = s.extended(sigma);
    let v = ev
        .pr_f(s)
        .min(eff_unctrl(&problem.attrs, s, sigma))
        .min(ev.gen_f(&ss));
    let w = ev.pr_f(&ss);
    ConditionRow {
        s: s.clone(),
        t: None,
        sigma: Some(sigma),
        x1: Some(ev.l_h(s)),
        x2: Some(problem.attrs.attr(sigma).unctrl),
        x3: Some(ev.l_g(&ss)),
        y: Some(ev.l_h(&ss)),
        v,
        w,
        pass: v <= w,
    }
}

/// Observability row for `(s, t, σ)` evaluated on strings.
pub fn observability_row(problem: &ControlProblem, s: &EventString, t: &EventString, sigma: usize) -> ConditionRow {
    let ev = Eval(problem);
    let ss = s.extended(sigma);
    let ts = t.extended(sigma);
    let v = ev.pr_f(s).min(ev.pr_f(&ts)).min(ev.gen_f(&ss));
    let w = ev.pr_f(&ss);
    ConditionRow {
        s: s.clone(),
        t: Some(t.clone()),
        sigma: Some(sigma),
        x1: Some(ev.l_h(s)),
        x2: Some(ev.l_h(&ts)),
        x3: Some(ev.l_g(&ss)),
        y: Some(ev.l_h(&ss)),
        v,
        w,
        pass: v <= w,
    }
}

pub fn lm_closed_row(problem: &ControlProblem, s: &EventString) -> ConditionRow {
    let ev = Eval(problem);
    let lm = marked_degree(&problem.plant, s).unwrap();
    let v = marked_degree(&problem.spec, s).unwrap();
    let w = ev.pr_f(s).min(lm);
    ConditionRow {
        s: s.clone(),
        t: None,
        sigma: None,
        x1: Some(ev.l_h(s)),
        x2: None,
        x3: Some(lm),
        y: None,
        v,
        w,
        pass: v == w,
    }
}

/// Degrees of every string up to a length, indexed in length-lexicographic
/// order: strings of length `k` occupy `start[k]..start[k+1]` and the
/// extension of the `j`-th one by `σ` is the `(j·n + σ)`-th of length `k+1`.
struct StringTable {
    n: usize,
    start: Vec<usize>,
    strings: Vec<EventString>,
    l_g: Vec<Degree>,
    l_h: Vec<Degree>,
    pr_f: Vec<Degree>,
    gen_f: Vec<Degree>,
    k: Vec<Degree>,
    lm: Vec<Degree>,
    unctrl_f: Vec<Vec<Degree>>,
    projection: Vec<EventString>,
}

impl StringTable {
    fn new(problem: &ControlProblem, max_len: usize) -> StringTable {
        let n = problem.event_count();
        let ev = Eval(problem);
        let strings: Vec<EventString> = EventString::all_up_to(n, max_len).collect();
        let mut start = vec![0];
        for len in 0..=max_len {
            let count = strings[*start.last().unwrap()..]
                .iter()
                .take_while(|s| s.len() == len)
                .count();
            start.push(start[len] + count);
        }
        StringTable {
            n,
            start,
            l_g: strings.iter().map(|s| ev.l_g(s)).collect(),
            l_h: strings.iter().map(|s| ev.l_h(s)).collect(),
            pr_f: strings.iter().map(|s| ev.pr_f(s)).collect(),
            gen_f: strings.iter().map(|s| ev.gen_f(s)).collect(),
            k: strings.iter().map(|s| marked_degree(&problem.spec, s).unwrap()).collect(),
            lm: strings.iter().map(|s| marked_degree(&problem.plant, s).unwrap()).collect(),
            unctrl_f: strings
                .iter()
                .map(|s| (0..n).map(|e| eff_unctrl(&problem.attrs, s, e)).collect())
                .collect(),
            projection: strings.iter().map(|s| project(&problem.attrs, s)).collect(),
            strings,
        }
    }

    fn child(&self, i: usize, e: usize) -> usize {
        let len = self.strings[i].len();
        self.start[len + 1] + (i - self.start[len]) * self.n + e
    }

    /// Indices of the strings of length at most `len`.
    fn up_to(&self, len: usize) -> std::ops::Range<usize> {
        0..self.start[len + 1]
    }
}

fn row(s: &EventString, t: Option<&EventString>, sigma: Option<usize>, x: [Option<Degree>; 4], v: Degree, w: Degree, pass: bool) -> ConditionRow {
    ConditionRow {
        s: s.clone(),
        t: t.cloned(),
        sigma,
        x1: x[0],
        x2: x[1],
        x3: x[2],
        y: x[3],
        v,
        w,
        pass,
    }
}

/// Checks the requested conditions over every `s` with `|s| <= max_len`
/// (and, for observability, every `t` with `|t| <= max_t_len` and the same
/// projection), in length-lexicographic order of `s`, then `t`, then `σ`.
///
/// With `RowMode::Failures`, `t` is only enumerated for `(s, σ)` where
/// `min{pr(K)^f(s), L^f(sσ)} > pr(K)^f(sσ)`; otherwise every `t` passes.
pub fn brute_force_check(problem: &ControlProblem, cfg: &OracleConfig) -> Vec<VerificationReport> {
    let n = problem.event_count();
    let tab = StringTable::new(problem, cfg.max_len.max(cfg.max_t_len) + 1);
    let attrs = &problem.attrs;
    let mut reports = Vec::new();
    for &cond in &cfg.conditions {
        let mut rows: Vec<ConditionRow> = Vec::new();
        match cond {
            Condition::Controllability => {
                for i in tab.up_to(cfg.max_len) {
                    let s = &tab.strings[i];
                    for e in 0..n {
                        let c = tab.child(i, e);
                        let v = tab.pr_f[i].min(tab.unctrl_f[i][e]).min(tab.gen_f[c]);
                        let w = tab.pr_f[c];
                        let x = [Some(tab.l_h[i]), Some(attrs.attr(e).unctrl), Some(tab.l_g[c]), Some(tab.l_h[c])];
                        rows.push(row(s, None, Some(e), x, v, w, v <= w));
                    }
                }
            }
            Condition::Observability => {
                let mut classes: HashMap<&EventString, Vec<usize>> = HashMap::new();
                for j in tab.up_to(cfg.max_t_len) {
                    classes.entry(&tab.projection[j]).or_default().push(j);
                }
                for i in tab.up_to(cfg.max_len) {
                    let s = &tab.strings[i];
                    let open: Vec<usize> = (0..n)
                        .filter(|&e| {
                            let c = tab.child(i, e);
                            cfg.rows == RowMode::All || tab.pr_f[i].min(tab.gen_f[c]) > tab.pr_f[c]
                        })
                        .collect();
                    if open.is_empty() {
                        continue;
                    }
                    let Some(ts) = classes.get(&tab.projection[i]) else {
                        continue;
                    };
                    for &j in ts {
                        let t = &tab.strings[j];
                        for &e in &open {
                            let (c, tc) = (tab.child(i, e), tab.child(j, e));
                            let v = tab.pr_f[i].min(tab.pr_f[tc]).min(tab.gen_f[c]);
                            let w = tab.pr_f[c];
                            let x = [Some(tab.l_h[i]), Some(tab.l_h[tc]), Some(tab.l_g[c]), Some(tab.l_h[c])];
                            rows.push(row(s, Some(t), Some(e), x, v, w, v <= w));
                        }
                    }
                }
            }
            Condition::LmClosed => {
                for i in tab.up_to(cfg.max_len) {
                    let v = tab.k[i];
                    let w = tab.pr_f[i].min(tab.lm[i]);
                    let x = [Some(tab.l_h[i]), None, Some(tab.lm[i]), None];
                    rows.push(row(&tab.strings[i], None, None, x, v, w, v == w));
                }
            }
            Condition::Admissibility | Condition::Nonblocking => continue,
        }
        reports.push(finish(cond, cfg.rows, rows.into_iter()));
    }
    reports
}
