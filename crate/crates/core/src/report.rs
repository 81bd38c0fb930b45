//! Machine-readable (sorted-key JSON) and text renderings of decision results.

use crate::consistency::{check_scc, SccReport};
use crate::counterfactual::{check_cfd_with, check_gcfd_with, CfdMode, CfdReport};
use crate::cyclic::{as_cyclic3, cyclic3_contextual, Cyclic3Criterion, Cyclic3View, CyclicShape};
use crate::lp::{decide_noncontextual_with, Encoding, Evidence, NoncontextualityVerdict, RowLabel, SolverConfig};
use crate::model::{validate_system, Coupling, System, Violation};
use crate::rational::{format_rational, Rational};
use serde_json::{json, Map, Value};
use std::fmt::Write as _;

fn r(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

pub fn violations_json(violations: &[String]) -> Value {
    json!({ "valid": violations.is_empty(), "violations": violations })
}

pub fn scc_json(report: &SccReport) -> Value {
    json!({
        "holds": report.holds,
        "violations": report.violations.iter().map(|v| json!({
            "contents": v.contents,
            "contexts": [v.context_a, v.context_b],
            "tv_distance": r(&v.tv_distance),
        })).collect::<Vec<_>>(),
    })
}

pub fn coupling_json(c: &Coupling) -> Value {
    json!({
        "variables": c.variables.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "table": c.table.iter().map(|(k, p)| json!({
            "values": k.iter().zip(&c.supports).map(|(&v, s)| s.label(v).to_string()).collect::<Vec<_>>(),
            "p": r(p),
        })).collect::<Vec<_>>(),
    })
}

fn row_label_json(sys: Option<&System>, row: &RowLabel) -> Value {
    match row {
        RowLabel::ContextCell { context, values } => {
            let labels: Vec<String> = match sys.and_then(|s| s.block(context)) {
                Some(b) => values.iter().zip(&b.supports).map(|(&v, s)| s.label(v).to_string()).collect(),
                None => values.iter().map(|v| v.to_string()).collect(),
            };
            json!({ "kind": "context", "context": context, "values": labels })
        }
        RowLabel::Coincidence { content, context_a, context_b } => {
            json!({ "kind": "coincidence", "content": content, "contexts": [context_a, context_b] })
        }
    }
}

pub fn verdict_json(sys: Option<&System>, v: &NoncontextualityVerdict, with_evidence: bool) -> Value {
    let mut m = Map::new();
    m.insert("encoding".into(), json!(v.encoding.to_string()));
    m.insert("noncontextual".into(), json!(v.is_noncontextual()));
    if with_evidence {
        match &v.evidence {
            Evidence::Witness(c) => {
                m.insert("witness".into(), coupling_json(c));
            }
            Evidence::Certificate(cert) => {
                let rows: Vec<Value> = cert
                    .rows
                    .iter()
                    .zip(&cert.multipliers)
                    .filter(|(_, y)| !num_traits::Zero::is_zero(*y))
                    .map(|(row, y)| json!({ "row": row_label_json(sys, row), "multiplier": r(y) }))
                    .collect();
                m.insert("certificate".into(), Value::Array(rows));
            }
        }
    }
    Value::Object(m)
}

pub fn cfd_json(sys: &System, report: &CfdReport, with_evidence: bool) -> Value {
    let per: Map<String, Value> = report
        .per_context
        .iter()
        .map(|(c, v)| {
            let sub = crate::counterfactual::fcf_subsystem(sys, c).ok().map(|f| f.system);
            (c.clone(), verdict_json(sub.as_ref(), v, with_evidence))
        })
        .collect();
    json!({ "holds": report.holds, "per_context": per })
}

pub fn cyclic_json(view: &Cyclic3View, c: &Cyclic3Criterion) -> Value {
    json!({
        "contents": view.contents,
        "contexts": view.contexts,
        "correlations": view.correlations.iter().map(r).collect::<Vec<_>>(),
        "lhs": r(&c.lhs),
        "rhs": r(&c.rhs),
        "contextual": c.contextual,
    })
}

pub fn summary_json(sys: &System) -> Value {
    json!({
        "contents": sys.contents().collect::<Vec<_>>(),
        "contexts": sys.blocks().map(|b| json!({ "id": b.context, "contents": b.contents })).collect::<Vec<_>>(),
        "variables": sys.variables().len(),
    })
}

/// Everything the crate can say about one system.
#[derive(Debug, Clone)]
pub struct Report {
    pub system: System,
    pub violations: Vec<Violation>,
    pub scc: SccReport,
    pub scc_verdict: Option<Result<NoncontextualityVerdict, String>>,
    pub cbd_verdict: Result<NoncontextualityVerdict, String>,
    pub cfd: Option<Result<CfdReport, String>>,
    pub gcfd: Result<CfdReport, String>,
    pub cyclic3: Option<(Cyclic3View, Cyclic3Criterion)>,
}

pub fn build_report(sys: &System, config: &SolverConfig) -> Report {
    let scc = check_scc(sys);
    let scc_verdict = scc
        .holds
        .then(|| decide_noncontextual_with(sys, Encoding::Scc, config).map_err(|e| e.to_string()));
    let cfd = scc
        .holds
        .then(|| check_cfd_with(sys, CfdMode::Constructive, config).map_err(|e| e.to_string()));
    let cyclic3 = match as_cyclic3(sys) {
        Ok(CyclicShape::Cyclic3(view)) => {
            let c = cyclic3_contextual(&view);
            Some((*view, c))
        }
        _ => None,
    };
    Report {
        system: sys.clone(),
        violations: validate_system(sys),
        scc,
        scc_verdict,
        cbd_verdict: decide_noncontextual_with(sys, Encoding::Cbd, config).map_err(|e| e.to_string()),
        cfd,
        gcfd: check_gcfd_with(sys, config).map_err(|e| e.to_string()),
        cyclic3,
    }
}

impl Report {
    pub fn to_json(&self, with_evidence: bool) -> Value {
        let sys = &self.system;
        let wrap = |res: &Result<Value, String>| match res {
            Ok(v) => v.clone(),
            Err(e) => json!({ "error": e }),
        };
        let mut contextuality = Map::new();
        if let Some(v) = &self.scc_verdict {
            contextuality.insert(
                "scc".into(),
                wrap(&v.as_ref().map(|v| verdict_json(Some(sys), v, with_evidence)).map_err(Clone::clone)),
            );
        }
        contextuality.insert(
            "cbd".into(),
            wrap(&self.cbd_verdict.as_ref().map(|v| verdict_json(Some(sys), v, with_evidence)).map_err(Clone::clone)),
        );
        let mut m = Map::new();
        m.insert("system".into(), summary_json(sys));
        m.insert(
            "validation".into(),
            violations_json(&self.violations.iter().map(ToString::to_string).collect::<Vec<_>>()),
        );
        m.insert("scc".into(), scc_json(&self.scc));
        m.insert("contextuality".into(), Value::Object(contextuality));
        if let Some(cfd) = &self.cfd {
            m.insert(
                "cfd".into(),
                wrap(&cfd.as_ref().map(|c| cfd_json(sys, c, with_evidence)).map_err(Clone::clone)),
            );
        }
        m.insert(
            "gcfd".into(),
            wrap(&self.gcfd.as_ref().map(|c| cfd_json(sys, c, with_evidence)).map_err(Clone::clone)),
        );
        if let Some((view, c)) = &self.cyclic3 {
            m.insert("cyclic3".into(), cyclic_json(view, c));
        }
        Value::Object(m)
    }

    pub fn to_text(&self) -> String {
        let mut out = render_system(&self.system);
        let yes = |b: bool| if b { "yes" } else { "no" };
        let _ = writeln!(out, "\nvalid: {}", yes(self.violations.is_empty()));
        let _ = writeln!(out, "strongly consistently connected: {}", yes(self.scc.holds));
        for v in &self.scc.violations {
            let _ = writeln!(
                out,
                "  contexts {} and {} differ on {{{}}} (total variation {})",
                v.context_a,
                v.context_b,
                v.contents.join(", "),
                format_rational(&v.tv_distance)
            );
        }
        let verdict_line = |v: &Result<NoncontextualityVerdict, String>| match v {
            Ok(v) if v.is_noncontextual() => "noncontextual".to_string(),
            Ok(_) => "contextual".to_string(),
            Err(e) => format!("error: {e}"),
        };
        if let Some(v) = &self.scc_verdict {
            let _ = writeln!(out, "reduced coupling (scc): {}", verdict_line(v));
        }
        let _ = writeln!(out, "multimaximal coupling (cbd): {}", verdict_line(&self.cbd_verdict));
        let cfd_lines = |name: &str, rep: &Result<CfdReport, String>, out: &mut String| match rep {
            Ok(rep) => {
                let _ = writeln!(out, "{name}: {}", if rep.holds { "holds" } else { "fails" });
                for (c, v) in &rep.per_context {
                    let _ = writeln!(
                        out,
                        "  factual context {c}: {}",
                        if v.is_noncontextual() { "noncontextual" } else { "contextual" }
                    );
                }
            }
            Err(e) => {
                let _ = writeln!(out, "{name}: error: {e}");
            }
        };
        if let Some(cfd) = &self.cfd {
            cfd_lines("counterfactual definiteness", cfd, &mut out);
        }
        cfd_lines("generalized counterfactual definiteness", &self.gcfd, &mut out);
        if let Some((_, c)) = &self.cyclic3 {
            out.push_str(&render_cyclic(c));
        }
        out
    }
}

pub fn render_cyclic(c: &Cyclic3Criterion) -> String {
    format!(
        "cyclic rank 3: lhs {} {} rhs {} -> {}\n",
        format_rational(&c.lhs),
        if c.contextual { ">" } else { "<=" },
        format_rational(&c.rhs),
        if c.contextual { "contextual" } else { "noncontextual" }
    )
}

/// Contexts as rows, contents as columns, followed by each context's table.
pub fn render_system(sys: &System) -> String {
    let contents: Vec<&String> = sys.contents().collect();
    let width = contents.iter().map(|q| q.len()).max().unwrap_or(1).max(3) + 2;
    let ctx_width = sys.contexts().map(|c| c.len()).max().unwrap_or(1) + 4;
    let mut out = String::new();
    let _ = write!(out, "{:ctx_width$}", "");
    for q in &contents {
        let _ = write!(out, "|{:^width$}", format!("q={q}"));
    }
    out.push_str("|\n");
    for b in sys.blocks() {
        let _ = write!(out, "{:ctx_width$}", format!("c={}", b.context));
        for q in &contents {
            let cell = if b.contains(q) { format!("R{q}") } else { String::new() };
            let _ = write!(out, "|{cell:^width$}");
        }
        out.push_str("|\n");
    }
    for b in sys.blocks() {
        let _ = writeln!(out, "\ncontext {} ({}):", b.context, b.contents.join(", "));
        for (k, p) in &b.table {
            let labels: Vec<&str> = k.iter().zip(&b.supports).map(|(&v, s)| s.label(v)).collect();
            let _ = writeln!(out, "  ({})  {}", labels.join(", "), format_rational(p));
        }
    }
    out
}

pub fn render_coupling(c: &Coupling) -> String {
    let mut out = String::new();
    let names: Vec<String> = c.variables.iter().map(|v| v.to_string()).collect();
    let _ = writeln!(out, "coupling over {}:", names.join(", "));
    for (k, p) in &c.table {
        let labels: Vec<&str> = k.iter().zip(&c.supports).map(|(&v, s)| s.label(v)).collect();
        let _ = writeln!(out, "  ({})  {}", labels.join(", "), format_rational(p));
    }
    out
}
