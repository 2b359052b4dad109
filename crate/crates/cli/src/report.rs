use std::fmt::Write;

use clap::ValueEnum;
use serde_json::json;

use crate::task::{Row, TaskResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Table,
    JsonLines,
}

fn millis(t: &TaskResult) -> u128 {
    t.time.as_millis()
}

/// Aligned table with one line per row, followed by witnesses, reasons and
/// consistency warnings.
pub fn render_table(rows: &[Row]) -> String {
    let mut cells: Vec<[String; 7]> = vec![[
        "program".into(),
        "property".into(),
        "phi".into(),
        "time".into(),
        "neg-phi".into(),
        "time".into(),
        "engine".into(),
    ]];
    for r in rows {
        let (neg, neg_t) = match &r.neg {
            Some(n) => (n.outcome.label().to_string(), format!("{}ms", millis(n))),
            None => ("-".to_string(), "-".to_string()),
        };
        let engine = serde_json::to_value(r.phi.engine).unwrap();
        cells.push([
            r.program.clone(),
            r.property.clone(),
            r.phi.outcome.label().to_string(),
            format!("{}ms", millis(&r.phi)),
            neg,
            neg_t,
            engine.as_str().unwrap_or("").to_string(),
        ]);
    }
    let widths: Vec<usize> =
        (0..7).map(|i| cells.iter().map(|c| c[i].chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for c in &cells {
        let line: Vec<String> = c.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}", w = *w)).collect();
        writeln!(out, "{}", line.join("  ").trim_end()).unwrap();
    }
    for r in rows {
        let tasks = std::iter::once(("phi", &r.phi)).chain(r.neg.as_ref().map(|n| ("neg-phi", n)));
        for (name, t) in tasks {
            if let Some(c) = &t.candidate {
                if !c.is_empty() {
                    writeln!(out, "{} / {} / {name}: witness", r.program, r.property).unwrap();
                    for l in c {
                        writeln!(out, "    {l}").unwrap();
                    }
                }
            }
            if let Some(reason) = &t.reason {
                writeln!(out, "{} / {} / {name}: {reason}", r.program, r.property).unwrap();
            }
        }
        if r.inconsistent() {
            writeln!(out, "{} / {}: INCONSISTENT, both phi and neg-phi hold", r.program, r.property).unwrap();
        }
    }
    out
}

/// One JSON object per task, in row order.
pub fn render_json_lines(rows: &[Row]) -> String {
    let mut out = String::new();
    for r in rows {
        let tasks = std::iter::once(("phi", &r.phi)).chain(r.neg.as_ref().map(|n| ("neg-phi", n)));
        for (name, t) in tasks {
            let obj = json!({
                "program": r.program,
                "property": r.property,
                "task": name,
                "verdict": t.outcome,
                "time-ms": millis(t) as u64,
                "candidate": t.candidate,
                "engine": t.engine,
                "reason": t.reason,
            });
            writeln!(out, "{obj}").unwrap();
        }
    }
    out
}

pub fn render(rows: &[Row], format: ReportFormat) -> String {
    match format {
        ReportFormat::Table => render_table(rows),
        ReportFormat::JsonLines => render_json_lines(rows),
    }
}
