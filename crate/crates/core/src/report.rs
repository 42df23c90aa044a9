//! Rendering of labeled numeric reports as human tables, CSV, or JSON.
//!
//! Table output prints values to 9 significant digits. CSV and JSON print
//! the shortest decimal form that parses back to the identical bits, so
//! machine-readable output round-trips every numeric field exactly.

use serde_json::{Map, Number, Value};

use crate::bounds::BoundReport;
use crate::erm::ErmEstimate;
use crate::experiments::ExperimentReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// A flat label-to-number report with an optional pass verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub title: String,
    pub fields: Vec<(String, f64)>,
    pub pass: Option<bool>,
    /// Extra context shown only in table mode (target descriptions etc.).
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(title: &str) -> Self {
        Report {
            title: title.to_owned(),
            fields: Vec::new(),
            pass: None,
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, label: &str, value: f64) {
        self.fields.push((label.to_owned(), value));
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.render_table(),
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{}\n", self.title));
        let width = self
            .fields
            .iter()
            .map(|(l, _)| l.len())
            .max()
            .unwrap_or(0)
            .max(4);
        for (label, value) in &self.fields {
            out.push_str(&format!("  {label:width$}  {}\n", sig9(*value)));
        }
        for note in &self.notes {
            out.push_str(&format!("  {note}\n"));
        }
        if let Some(pass) = self.pass {
            out.push_str(&format!("  pass{:pad$}  {pass}\n", "", pad = width - 4));
        }
        out
    }

    fn render_csv(&self) -> String {
        let mut out = String::from("label,value\n");
        for (label, value) in &self.fields {
            out.push_str(&format!("{label},{value}\n"));
        }
        if let Some(pass) = self.pass {
            out.push_str(&format!("pass,{pass}\n"));
        }
        out
    }

    fn render_json(&self) -> String {
        let mut map = Map::new();
        for (label, value) in &self.fields {
            let num = Number::from_f64(*value).expect("report values are finite");
            map.insert(label.clone(), Value::Number(num));
        }
        if let Some(pass) = self.pass {
            map.insert("pass".into(), Value::Bool(pass));
        }
        serde_json::to_string_pretty(&Value::Object(map)).expect("serialization cannot fail")
    }
}

/// 9 significant digits, trimmed of trailing zeros.
fn sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    // Prefer plain notation for moderate magnitudes.
    let abs = x.abs();
    if (1e-4..1e9).contains(&abs) {
        let digits = (8 - abs.log10().floor() as i32).max(0) as usize;
        let plain = format!("{x:.digits$}");
        let trimmed = if plain.contains('.') {
            plain.trim_end_matches('0').trim_end_matches('.')
        } else {
            &plain
        };
        return trimmed.to_owned();
    }
    format!("{x:.*e}", 8)
}

impl From<&ExperimentReport> for Report {
    fn from(exp: &ExperimentReport) -> Self {
        let mut report = Report::new(&exp.name);
        for (label, value) in &exp.computed {
            report.fields.push((label.clone(), *value));
        }
        for t in &exp.targets {
            report.notes.push(format!(
                "target {:10} {:?} {} (tol {})  [{}]",
                t.label,
                t.relation,
                sig9(t.target),
                t.tolerance,
                t.note
            ));
        }
        report.pass = Some(exp.pass);
        report
    }
}

impl From<&BoundReport> for Report {
    fn from(b: &BoundReport) -> Self {
        let mut report = Report::new("bounds");
        report.push("q_star", b.q_star);
        report.push("delta", b.delta);
        report.push("gamma", b.gamma);
        report.push("bound_r", b.bound_r);
        report.push("bound_l", b.bound_l);
        report.push("bound_b", b.bound_b);
        report.push("combined", b.combined);
        report
    }
}

impl From<&ErmEstimate> for Report {
    fn from(est: &ErmEstimate) -> Self {
        let mut report = Report::new(&format!("erm ({})", est.method.as_str()));
        report.push("value", est.value);
        report.push("std_error", est.std_error);
        report.push("trials", est.trials as f64);
        report.push("n_samples", est.n_samples as f64);
        report
    }
}
