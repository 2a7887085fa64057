use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

use cotlar_core::psl2::ProjMat;
use cotlar_core::quadring::RingParam;
use cotlar_core::report::ReportDocument;

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "text",
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ReplayRow {
    pub check: String,
    pub inputs: Vec<String>,
    pub matches: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

pub fn write_output(path: Option<&Path>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| e.to_string())
        }
    }
}

fn to_json(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// One document as an object, several as an array.
pub fn render_reports(docs: &[ReportDocument], format: Format) -> String {
    match format {
        Format::Json if docs.len() == 1 => to_json(&docs[0]),
        Format::Json => to_json(&docs),
        Format::Csv => csv_text(
            &["check", "passed", "total_checked", "violation_count", "witness", "elapsed_ms", "universe"],
            docs.iter().map(|d| {
                vec![
                    d.check.clone(),
                    d.passed().to_string(),
                    d.total_checked.to_string(),
                    d.violation_count.to_string(),
                    d.witness.as_ref().map(|w| w.inputs.join(" | ")).unwrap_or_default(),
                    d.elapsed_ms.to_string(),
                    d.universe.description.clone(),
                ]
            }),
        ),
        Format::Text => {
            let mut s = String::new();
            for d in docs {
                let verdict = if d.passed() { "PASS" } else { "FAIL" };
                let _ =
                    writeln!(s, "{verdict} {}: {} checked, {} violations", d.check, d.total_checked, d.violation_count);
                let _ = writeln!(s, "  universe: {}", d.universe.description);
                if let Some(w) = &d.witness {
                    for input in &w.inputs {
                        let _ = writeln!(s, "  witness: {input}");
                    }
                    let _ = writeln!(s, "  observed: {}", json!(w.observed));
                }
                for v in d.violations.iter().take(5) {
                    let _ = writeln!(s, "  violation: {} -> {}", v.inputs.join(" | "), json!(v.observed));
                }
                for (k, v) in &d.stats {
                    let _ = writeln!(s, "  {k} = {v}");
                }
            }
            s
        }
    }
}

pub fn render_enumeration(ring: RingParam, bound: u32, elements: &[ProjMat], format: Format) -> String {
    let texts: Vec<String> = elements.iter().map(ProjMat::to_string).collect();
    match format {
        Format::Json => to_json(&json!({
            "ring": ring.to_string(),
            "bound": bound,
            "count": elements.len(),
            "elements": texts,
        })),
        Format::Csv => csv_text(&["matrix"], texts.into_iter().map(|t| vec![t])),
        Format::Text => texts.into_iter().map(|t| t + "\n").collect(),
    }
}

pub fn render_replay(rows: &[ReplayRow], format: Format) -> String {
    match format {
        Format::Json => to_json(&rows),
        Format::Csv => csv_text(
            &["check", "matches", "inputs"],
            rows.iter().map(|r| vec![r.check.clone(), r.matches.to_string(), r.inputs.join(" | ")]),
        ),
        Format::Text => rows
            .iter()
            .map(|r| {
                let verdict = if r.matches { "MATCH" } else { "MISMATCH" };
                match &r.detail {
                    Some(d) => format!("{verdict} {} {} {d}\n", r.check, r.inputs.join(" | ")),
                    None => format!("{verdict} {} {}\n", r.check, r.inputs.join(" | ")),
                }
            })
            .collect(),
    }
}
