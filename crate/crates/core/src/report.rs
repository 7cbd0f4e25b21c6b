//! Text table, CSV and JSON renderings of verification reports.

use std::fmt::Write as _;

use serde::Serialize;

use crate::algebra::Degree;
use crate::verify::{ConditionRow, Decision, VerificationReport};

pub const CSV_HEADER: &str = "s,t,sigma,x1,x2,x3,y,V,W,pass";

/// A row with event names resolved, as written to CSV and JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowRecord {
    pub s: String,
    pub t: String,
    pub sigma: String,
    pub x1: String,
    pub x2: String,
    pub x3: String,
    pub y: String,
    #[serde(rename = "V")]
    pub v: String,
    #[serde(rename = "W")]
    pub w: String,
    pub pass: bool,
}

fn opt(d: Option<Degree>) -> String {
    d.map(|d| d.to_string()).unwrap_or_default()
}

impl RowRecord {
    pub fn new(row: &ConditionRow, names: &[String]) -> RowRecord {
        RowRecord {
            s: row.s.render(names),
            t: row.t.as_ref().map(|t| t.render(names)).unwrap_or_default(),
            sigma: row.sigma.map(|e| names[e].clone()).unwrap_or_default(),
            x1: opt(row.x1),
            x2: opt(row.x2),
            x3: opt(row.x3),
            y: opt(row.y),
            v: row.v.to_string(),
            w: row.w.to_string(),
            pass: row.pass,
        }
    }

    fn cells(&self) -> [&str; 10] {
        [
            &self.s,
            &self.t,
            &self.sigma,
            &self.x1,
            &self.x2,
            &self.x3,
            &self.y,
            &self.v,
            &self.w,
            if self.pass { "T" } else { "F" },
        ]
    }
}

/// Aligned text table of the report's rows with a one-line summary.
pub fn render_table(report: &VerificationReport, names: &[String]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{}: {} ({} rows checked, {} nodes)",
        report.condition.name(),
        if report.verdict { "pass" } else { "FAIL" },
        report.rows_checked,
        report.nodes
    );
    if let Some(w) = &report.witness {
        let r = RowRecord::new(w, names);
        let _ = write!(out, "  witness: s={}", r.s);
        if !r.t.is_empty() {
            let _ = write!(out, " t={}", r.t);
        }
        if !r.sigma.is_empty() {
            let _ = write!(out, " σ={}", r.sigma);
        }
        let _ = writeln!(out, " V={} W={}", r.v, r.w);
    }
    if report.rows.is_empty() {
        return out;
    }
    let header = ["s", "t", "σ", "x1", "x2", "x3", "y", "V", "W", "pass"];
    let records: Vec<RowRecord> = report.rows.iter().map(|r| RowRecord::new(r, names)).collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in &records {
        for (w, c) in widths.iter_mut().zip(r.cells()) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: [&str; 10], out: &mut String| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        let _ = writeln!(out, "  {}", parts.join("  ").trim_end());
    };
    line(header, &mut out);
    for r in &records {
        line(r.cells(), &mut out);
    }
    out
}

fn csv_cell(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

/// CSV rows with the fixed header; several reports can be concatenated by
/// passing them together.
pub fn render_csv<'a>(reports: impl IntoIterator<Item = &'a VerificationReport>, names: &[String]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for report in reports {
        for row in &report.rows {
            let r = RowRecord::new(row, names);
            let mut cells: Vec<String> = r.cells()[..9].iter().map(|c| csv_cell(c)).collect();
            cells.push(r.pass.to_string());
            out.push_str(&cells.join(","));
            out.push('\n');
        }
    }
    out
}

#[derive(Serialize)]
struct ReportRecord {
    condition: &'static str,
    verdict: bool,
    witness: Option<RowRecord>,
    rows_checked: usize,
    nodes: usize,
    visits: usize,
    rows: Vec<RowRecord>,
}

fn report_record(report: &VerificationReport, names: &[String]) -> ReportRecord {
    ReportRecord {
        condition: report.condition.name(),
        verdict: report.verdict,
        witness: report.witness.as_ref().map(|w| RowRecord::new(w, names)),
        rows_checked: report.rows_checked,
        nodes: report.nodes,
        visits: report.visits,
        rows: report.rows.iter().map(|r| RowRecord::new(r, names)).collect(),
    }
}

pub fn render_json(report: &VerificationReport, names: &[String]) -> String {
    serde_json::to_string_pretty(&report_record(report, names)).expect("report serializes")
}

/// Full decision as JSON: status, hypotheses, the three reports and
/// exploration statistics.
pub fn decision_json(decision: &Decision, names: &[String]) -> serde_json::Value {
    let hyp = &decision.hypotheses;
    serde_json::json!({
        "status": decision.status,
        "exists": decision.exists,
        "hypotheses": {
            "k_epsilon": hyp.k_epsilon,
            "holds": hyp.holds(),
            "violations": hyp.violations.iter().map(|v| serde_json::json!({
                "kind": v.kind,
                "s": v.s.render(names),
                "lhs": v.lhs,
                "rhs": v.rhs,
            })).collect::<Vec<_>>(),
        },
        "reports": decision.reports().iter().map(|r| report_record(r, names)).collect::<Vec<_>>(),
        "stats": {
            "spec_states": decision.stats.m1,
            "pairs": decision.stats.m2,
            "augmented_pairs": decision.stats.augmented_pairs,
            "product_nodes": decision.stats.product_nodes,
            "events": decision.stats.events,
            "visits": decision.stats.visits,
            "visit_bound": decision.stats.visit_bound(),
        },
    })
}

/// Human-readable decision summary followed by each report's table.
pub fn decision_table(decision: &Decision, names: &[String]) -> String {
    let mut out = String::new();
    let hyp = &decision.hypotheses;
    let _ = writeln!(out, "status: {:?}", decision.status);
    let _ = writeln!(
        out,
        "hypotheses: K(ε)={}{}",
        hyp.k_epsilon,
        if hyp.holds() { "" } else { " (violated)" }
    );
    for v in &hyp.violations {
        let _ = writeln!(
            out,
            "  {:?} containment fails at s={}: {} > {}",
            v.kind,
            v.s.render(names),
            v.lhs,
            v.rhs
        );
    }
    let s = &decision.stats;
    let _ = writeln!(
        out,
        "explored: {} spec states, {} pairs, {} augmented pairs, {} product nodes; {} visits (bound {})",
        s.m1,
        s.m2,
        s.augmented_pairs,
        s.product_nodes,
        s.visits,
        s.visit_bound()
    );
    for r in decision.reports() {
        out.push('\n');
        out.push_str(&render_table(r, names));
    }
    out
}
