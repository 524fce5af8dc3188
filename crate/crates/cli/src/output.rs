//! Output records and rendering.
//!
//! Every subcommand produces one flat record (schema_version "1") rendered
//! as a human table, CSV (RFC 4180 quoting), or JSON. Machine formats write
//! floats as `{:.16e}` — 17 significant digits — so CSV and JSON carry
//! byte-identical values and round-trip exactly to the same f64.

use std::fmt::Write as _;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Human,
    Csv,
    Json,
}

/// 17-significant-digit rendering used by both machine formats.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

// Minimal JSON tree with controlled float formatting.
pub enum JVal {
    Str(String),
    Num(f64),
    Int(u64),
    Bool(bool),
    Null,
    Arr(Vec<JVal>),
    Obj(Vec<(&'static str, JVal)>),
}

impl JVal {
    pub fn opt_num(x: Option<f64>) -> JVal {
        x.map(JVal::Num).unwrap_or(JVal::Null)
    }

    fn render_into(&self, out: &mut String) {
        match self {
            JVal::Str(s) => {
                out.push('"');
                for ch in s.chars() {
                    match ch {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        '\r' => out.push_str("\\r"),
                        '\t' => out.push_str("\\t"),
                        c if (c as u32) < 0x20 => {
                            let _ = write!(out, "\\u{:04x}", c as u32);
                        }
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            JVal::Num(x) => out.push_str(&fmt_f64(*x)),
            JVal::Int(n) => {
                let _ = write!(out, "{n}");
            }
            JVal::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            JVal::Null => out.push_str("null"),
            JVal::Arr(items) => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    item.render_into(out);
                }
                out.push(']');
            }
            JVal::Obj(fields) => {
                out.push('{');
                for (i, (key, value)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    let _ = write!(out, "\"{key}\":");
                    value.render_into(out);
                }
                out.push('}');
            }
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out);
        out.push('\n');
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') || s.contains('\r') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_line(fields: &[String]) -> String {
    let quoted: Vec<String> = fields.iter().map(|f| csv_field(f)).collect();
    format!("{}\r\n", quoted.join(","))
}

// ── bound ────────────────────────────────────────────────────────────────

pub struct BoundRecord {
    /// "bound" for tail probabilities, "mgf-bound" for MGF-domination
    /// results whose value may exceed 1.
    pub kind: &'static str,
    pub method: String,
    pub value: f64,
    pub log_value: f64,
    pub clamped: bool,
    pub optimal_param: Option<f64>,
}

impl BoundRecord {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Human => {
                let mut s = format!(
                    "{}: value {:.6e}   log {:.6}",
                    self.method, self.value, self.log_value
                );
                if self.clamped {
                    s.push_str("   (clamped from above 1)");
                }
                if let Some(p) = self.optimal_param {
                    let _ = write!(s, "   optimal parameter {p:.10}");
                }
                s.push('\n');
                s
            }
            Format::Csv => {
                let header = "schema_version,kind,method,value,log_value,clamped,optimal_param";
                format!(
                    "{header}\r\n{}",
                    csv_line(&[
                        SCHEMA_VERSION.to_string(),
                        self.kind.to_string(),
                        self.method.clone(),
                        fmt_f64(self.value),
                        fmt_f64(self.log_value),
                        self.clamped.to_string(),
                        fmt_opt(self.optimal_param),
                    ])
                )
            }
            Format::Json => JVal::Obj(vec![
                ("schema_version", JVal::Str(SCHEMA_VERSION.into())),
                ("kind", JVal::Str(self.kind.into())),
                ("method", JVal::Str(self.method.clone())),
                ("value", JVal::Num(self.value)),
                ("log_value", JVal::Num(self.log_value)),
                ("clamped", JVal::Bool(self.clamped)),
                ("optimal_param", JVal::opt_num(self.optimal_param)),
            ])
            .render(),
        }
    }
}

// ── compare ──────────────────────────────────────────────────────────────

pub struct CompareRow {
    pub method: String,
    pub value: f64,
    pub log_value: f64,
    pub clamped: bool,
    pub optimal_param: Option<f64>,
    pub expected: Option<f64>,
    pub tolerance: Option<f64>,
    pub within: Option<bool>,
}

pub struct CompareRecord {
    pub scenario: String,
    pub rows: Vec<CompareRow>,
    pub omissions: Vec<(String, String)>,
}

impl CompareRecord {
    pub fn all_within(&self) -> bool {
        self.rows.iter().all(|r| r.within != Some(false))
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Human => {
                let mut s = format!("scenario: {}\n", self.scenario);
                let _ = writeln!(
                    s,
                    "{:<28} {:>14} {:>14}  regression",
                    "method", "value", "log-value"
                );
                for r in &self.rows {
                    let check = match r.within {
                        Some(true) => format!("ok (expected {:.6e})", r.expected.unwrap()),
                        Some(false) => format!("MISS (expected {:.6e})", r.expected.unwrap()),
                        None => String::new(),
                    };
                    let _ = writeln!(
                        s,
                        "{:<28} {:>14.6e} {:>14.6}  {}",
                        r.method, r.value, r.log_value, check
                    );
                }
                for (method, reason) in &self.omissions {
                    let _ = writeln!(s, "omitted: {method} ({reason})");
                }
                s
            }
            Format::Csv => {
                let mut s = String::from(
                    "schema_version,kind,scenario,method,value,log_value,clamped,optimal_param,expected,tolerance,within\r\n",
                );
                for r in &self.rows {
                    s.push_str(&csv_line(&[
                        SCHEMA_VERSION.to_string(),
                        "comparison-row".to_string(),
                        self.scenario.clone(),
                        r.method.clone(),
                        fmt_f64(r.value),
                        fmt_f64(r.log_value),
                        r.clamped.to_string(),
                        fmt_opt(r.optimal_param),
                        fmt_opt(r.expected),
                        fmt_opt(r.tolerance),
                        r.within.map(|b| b.to_string()).unwrap_or_default(),
                    ]));
                }
                s
            }
            Format::Json => JVal::Obj(vec![
                ("schema_version", JVal::Str(SCHEMA_VERSION.into())),
                ("kind", JVal::Str("comparison".into())),
                ("scenario", JVal::Str(self.scenario.clone())),
                (
                    "rows",
                    JVal::Arr(
                        self.rows
                            .iter()
                            .map(|r| {
                                JVal::Obj(vec![
                                    ("method", JVal::Str(r.method.clone())),
                                    ("value", JVal::Num(r.value)),
                                    ("log_value", JVal::Num(r.log_value)),
                                    ("clamped", JVal::Bool(r.clamped)),
                                    ("optimal_param", JVal::opt_num(r.optimal_param)),
                                    ("expected", JVal::opt_num(r.expected)),
                                    ("tolerance", JVal::opt_num(r.tolerance)),
                                    ("within", r.within.map(JVal::Bool).unwrap_or(JVal::Null)),
                                ])
                            })
                            .collect(),
                    ),
                ),
                (
                    "omissions",
                    JVal::Arr(
                        self.omissions
                            .iter()
                            .map(|(m, reason)| {
                                JVal::Obj(vec![
                                    ("method", JVal::Str(m.clone())),
                                    ("reason", JVal::Str(reason.clone())),
                                ])
                            })
                            .collect(),
                    ),
                ),
            ])
            .render(),
        }
    }
}

// ── samplesize ───────────────────────────────────────────────────────────

pub struct SampleSizeRecord {
    pub alpha: f64,
    pub half_width: f64,
    pub n: u64,
    pub achieved_alpha: f64,
}

impl SampleSizeRecord {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Human => format!(
                "n = {} samples for a two-sided level {} interval of half-width {} (achieved level {:.6e})\n",
                self.n, self.alpha, self.half_width, self.achieved_alpha
            ),
            Format::Csv => format!(
                "schema_version,kind,alpha,half_width,n,achieved_alpha\r\n{}",
                csv_line(&[
                    SCHEMA_VERSION.to_string(),
                    "sample-size".to_string(),
                    fmt_f64(self.alpha),
                    fmt_f64(self.half_width),
                    self.n.to_string(),
                    fmt_f64(self.achieved_alpha),
                ])
            ),
            Format::Json => JVal::Obj(vec![
                ("schema_version", JVal::Str(SCHEMA_VERSION.into())),
                ("kind", JVal::Str("sample-size".into())),
                ("alpha", JVal::Num(self.alpha)),
                ("half_width", JVal::Num(self.half_width)),
                ("n", JVal::Int(self.n)),
                ("achieved_alpha", JVal::Num(self.achieved_alpha)),
            ])
            .render(),
        }
    }
}

// ── verify ───────────────────────────────────────────────────────────────

pub struct VerifyRow {
    pub method: String,
    pub bound_value: f64,
    pub bound_log_value: f64,
    pub oracle_kind: &'static str,
    pub oracle_point: f64,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    pub pass: bool,
}

pub struct VerifyRecord {
    pub scenario: String,
    pub samples: u64,
    pub seed: u64,
    pub rows: Vec<VerifyRow>,
    pub passed: bool,
    pub note: Option<String>,
}

impl VerifyRecord {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Human => {
                let mut s = format!(
                    "scenario: {} (samples {}, seed {})\n",
                    self.scenario, self.samples, self.seed
                );
                if let Some(note) = &self.note {
                    let _ = writeln!(s, "note: {note}");
                }
                for r in &self.rows {
                    let ci = match (r.ci_lo, r.ci_hi) {
                        (Some(lo), Some(hi)) => format!(" in [{lo:.3e}, {hi:.3e}]"),
                        _ => String::new(),
                    };
                    let _ = writeln!(
                        s,
                        "{:<28} bound {:>12.6e}  {} oracle {:>12.6e}{}  {}",
                        r.method,
                        r.bound_value,
                        r.oracle_kind,
                        r.oracle_point,
                        ci,
                        if r.pass { "pass" } else { "FAIL" }
                    );
                }
                let _ = writeln!(s, "verdict: {}", if self.passed { "PASS" } else { "FAIL" });
                s
            }
            Format::Csv => {
                let mut s = String::from(
                    "schema_version,kind,scenario,samples,seed,method,bound_value,bound_log_value,oracle_kind,oracle_point,ci_lo,ci_hi,pass\r\n",
                );
                for r in &self.rows {
                    s.push_str(&csv_line(&[
                        SCHEMA_VERSION.to_string(),
                        "verification-row".to_string(),
                        self.scenario.clone(),
                        self.samples.to_string(),
                        self.seed.to_string(),
                        r.method.clone(),
                        fmt_f64(r.bound_value),
                        fmt_f64(r.bound_log_value),
                        r.oracle_kind.to_string(),
                        fmt_f64(r.oracle_point),
                        fmt_opt(r.ci_lo),
                        fmt_opt(r.ci_hi),
                        r.pass.to_string(),
                    ]));
                }
                s
            }
            Format::Json => JVal::Obj(vec![
                ("schema_version", JVal::Str(SCHEMA_VERSION.into())),
                ("kind", JVal::Str("verification".into())),
                ("scenario", JVal::Str(self.scenario.clone())),
                ("samples", JVal::Int(self.samples)),
                ("seed", JVal::Int(self.seed)),
                ("passed", JVal::Bool(self.passed)),
                (
                    "note",
                    self.note.clone().map(JVal::Str).unwrap_or(JVal::Null),
                ),
                (
                    "rows",
                    JVal::Arr(
                        self.rows
                            .iter()
                            .map(|r| {
                                JVal::Obj(vec![
                                    ("method", JVal::Str(r.method.clone())),
                                    ("bound_value", JVal::Num(r.bound_value)),
                                    ("bound_log_value", JVal::Num(r.bound_log_value)),
                                    ("oracle_kind", JVal::Str(r.oracle_kind.into())),
                                    ("oracle_point", JVal::Num(r.oracle_point)),
                                    ("ci_lo", JVal::opt_num(r.ci_lo)),
                                    ("ci_hi", JVal::opt_num(r.ci_hi)),
                                    ("pass", JVal::Bool(r.pass)),
                                ])
                            })
                            .collect(),
                    ),
                ),
            ])
            .render(),
        }
    }
}

// ── catalog ──────────────────────────────────────────────────────────────

pub struct CatalogRow {
    pub name: String,
    pub data_kind: String,
    pub direction: String,
    pub threshold_kind: String,
    pub threshold: f64,
    pub methods: Vec<String>,
    pub oracle: Option<&'static str>,
    pub expected_count: usize,
}

pub struct CatalogRecord {
    pub rows: Vec<CatalogRow>,
}

impl CatalogRecord {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Human => {
                let mut s = String::new();
                for r in &self.rows {
                    let _ = writeln!(
                        s,
                        "{:<20} {:<19} {} {} {}  methods: {}{}",
                        r.name,
                        r.data_kind,
                        r.direction,
                        r.threshold_kind,
                        r.threshold,
                        r.methods.join(", "),
                        match r.oracle {
                            Some(kind) => format!("  oracle: {kind}"),
                            None => String::new(),
                        }
                    );
                }
                s
            }
            Format::Csv => {
                let mut s = String::from(
                    "schema_version,kind,name,data_kind,direction,threshold_kind,threshold,methods,oracle,expected_count\r\n",
                );
                for r in &self.rows {
                    s.push_str(&csv_line(&[
                        SCHEMA_VERSION.to_string(),
                        "catalog-row".to_string(),
                        r.name.clone(),
                        r.data_kind.clone(),
                        r.direction.clone(),
                        r.threshold_kind.clone(),
                        fmt_f64(r.threshold),
                        r.methods.join(";"),
                        r.oracle.unwrap_or("").to_string(),
                        r.expected_count.to_string(),
                    ]));
                }
                s
            }
            Format::Json => JVal::Obj(vec![
                ("schema_version", JVal::Str(SCHEMA_VERSION.into())),
                ("kind", JVal::Str("catalog".into())),
                (
                    "scenarios",
                    JVal::Arr(
                        self.rows
                            .iter()
                            .map(|r| {
                                JVal::Obj(vec![
                                    ("name", JVal::Str(r.name.clone())),
                                    ("data_kind", JVal::Str(r.data_kind.clone())),
                                    ("direction", JVal::Str(r.direction.clone())),
                                    ("threshold_kind", JVal::Str(r.threshold_kind.clone())),
                                    ("threshold", JVal::Num(r.threshold)),
                                    (
                                        "methods",
                                        JVal::Arr(
                                            r.methods
                                                .iter()
                                                .map(|m| JVal::Str(m.clone()))
                                                .collect(),
                                        ),
                                    ),
                                    (
                                        "oracle",
                                        r.oracle.map(|k| JVal::Str(k.into())).unwrap_or(JVal::Null),
                                    ),
                                    ("expected_count", JVal::Int(r.expected_count as u64)),
                                ])
                            })
                            .collect(),
                    ),
                ),
            ])
            .render(),
        }
    }
}
