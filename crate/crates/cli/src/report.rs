use std::fmt::Write as _;

use num_bigint::BigUint;
use serde_json::{json, Value};

use ispwr_core::counting::{self, DClassStats};
use ispwr_core::error::Result;
use ispwr_core::green;
use ispwr_core::subtree_types::TypeTable;
use ispwr_core::verify::{self, VerifyConfig};
use ispwr_core::wreath::enumerate_wreath;
use ispwr_core::Error;

use crate::{Format, RunConfig};

fn to_json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

pub fn count(cfg: &RunConfig) -> String {
    let (d, k) = (cfg.degree(), cfg.levels());
    let rows: [(&str, BigUint); 4] = [
        ("order", counting::order_formula(d, k)),
        ("idempotents", counting::idempotent_count(d, k)),
        ("dclasses", counting::dclass_count(d, k)),
        ("aut", counting::full_tree_aut_order(d, k)),
    ];
    match cfg.format {
        Format::Text => {
            let mut out = format!("degree       {d}\nlevels       {k}\n");
            for (name, v) in &rows {
                writeln!(out, "{name:<12} {v}").unwrap();
            }
            out
        }
        Format::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("degree".into(), json!(d));
            obj.insert("levels".into(), json!(k));
            for (name, v) in &rows {
                obj.insert((*name).into(), Value::String(v.to_string()));
            }
            to_json_text(&Value::Object(obj))
        }
        Format::Csv => {
            let mut out = String::from("degree,levels,order,idempotents,dclasses,aut\n");
            write!(out, "{d},{k}").unwrap();
            for (_, v) in &rows {
                write!(out, ",{v}").unwrap();
            }
            out.push('\n');
            out
        }
    }
}

pub fn enumerate(cfg: &RunConfig) -> Result<String> {
    let elements = enumerate_wreath(cfg.degree(), cfg.levels(), cfg.max_elements)?;
    Ok(match cfg.format {
        Format::Text => elements.map(|e| format!("{e}\n")).collect(),
        Format::Json => to_json_text(&Value::Array(elements.map(|e| e.to_json()).collect())),
        Format::Csv => {
            let mut out = String::from("index,element\n");
            for (i, e) in elements.enumerate() {
                writeln!(out, "{i},{}", csv_field(&e.to_string())).unwrap();
            }
            out
        }
    })
}

struct ClassRow {
    index: usize,
    stats: DClassStats,
    matches: Option<bool>,
}

const CLASS_COLUMNS: [&str; 7] = [
    "type",
    "index",
    "num_idempotents",
    "num_r_classes",
    "num_l_classes",
    "h_class_size",
    "d_class_size",
];

impl ClassRow {
    fn cells(&self) -> Vec<String> {
        let s = &self.stats;
        let mut cells = vec![
            s.subtree_type.to_string(),
            self.index.to_string(),
            s.num_idempotents.to_string(),
            s.num_r_classes.to_string(),
            s.num_l_classes.to_string(),
            s.h_class_size.to_string(),
            s.d_class_size.to_string(),
        ];
        if let Some(m) = self.matches {
            cells.push(m.to_string());
        }
        cells
    }

    fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(&self.stats).expect("serializable");
        v["index"] = json!(self.index);
        if let Some(m) = self.matches {
            v["match"] = json!(m);
        }
        v
    }
}

/// Returns the report and whether every observed row matched its formula.
pub fn classify(cfg: &RunConfig) -> Result<(String, bool)> {
    let (d, k) = (cfg.degree(), cfg.levels());
    let table = TypeTable::new(d, k, cfg.max_elements)?;
    let mut rows: Vec<ClassRow> = table
        .types()
        .iter()
        .enumerate()
        .map(|(index, t)| {
            Ok(ClassRow {
                index,
                stats: counting::dclass_stats(t, d, k)?,
                matches: None,
            })
        })
        .collect::<Result<_>>()?;

    if cfg.observed {
        match green::classify(d, k, cfg.max_elements) {
            Ok(observed) => {
                for row in &mut rows {
                    let seen = observed.iter().find(|o| o.index == row.index);
                    row.matches = Some(
                        seen.is_some_and(|o| o.stats == row.stats && o.h_class_sizes.len() == 1),
                    );
                }
            }
            Err(e @ Error::EnumerationLimit { .. }) => {
                eprintln!("ispwr: warning: {e}; reporting formula values only");
            }
            Err(e) => return Err(e),
        }
    }
    let all_match = rows.iter().all(|r| r.matches != Some(false));

    let mut columns: Vec<&str> = CLASS_COLUMNS.to_vec();
    if rows.iter().any(|r| r.matches.is_some()) {
        columns.push("match");
    }
    let out = match cfg.format {
        Format::Text => {
            let cells: Vec<Vec<String>> = rows.iter().map(ClassRow::cells).collect();
            let widths: Vec<usize> = (0..columns.len())
                .map(|c| {
                    cells
                        .iter()
                        .map(|r| r[c].len())
                        .chain([columns[c].len()])
                        .max()
                        .unwrap()
                })
                .collect();
            let line = |fields: Vec<&str>| -> String {
                let mut s = fields
                    .iter()
                    .zip(&widths)
                    .map(|(f, w)| format!("{f:<w$}"))
                    .collect::<Vec<_>>()
                    .join("  ");
                s.truncate(s.trim_end().len());
                s.push('\n');
                s
            };
            let mut out = line(columns.clone());
            for r in &cells {
                out.push_str(&line(r.iter().map(String::as_str).collect()));
            }
            out
        }
        Format::Json => to_json_text(&Value::Array(rows.iter().map(ClassRow::to_json).collect())),
        Format::Csv => {
            let mut out = columns.join(",");
            out.push('\n');
            for r in &rows {
                out.push_str(
                    &r.cells()
                        .iter()
                        .map(|c| csv_field(c))
                        .collect::<Vec<_>>()
                        .join(","),
                );
                out.push('\n');
            }
            out
        }
    };
    Ok((out, all_match))
}

pub fn verify(cfg: &RunConfig) -> Result<(String, bool)> {
    let mut vc = VerifyConfig::new(cfg.degree(), cfg.levels());
    vc.max_elements = cfg.max_elements;
    vc.oracle_cap = cfg.oracle_cap;
    let report = verify::verify(&vc)?;
    let passed = report.passed();
    let out = match cfg.format {
        Format::Text => {
            let mut out = String::new();
            for c in &report.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                writeln!(out, "{tag} {}: {}", c.name, c.detail).unwrap();
                for m in &c.mismatches {
                    writeln!(out, "  mismatch {m}").unwrap();
                }
            }
            writeln!(
                out,
                "{}",
                if passed {
                    "all checks passed"
                } else {
                    "verification FAILED"
                }
            )
            .unwrap();
            out
        }
        Format::Csv => {
            let mut out = String::from("check,passed,detail\n");
            for c in &report.checks {
                writeln!(
                    out,
                    "{},{},{}",
                    csv_field(&c.name),
                    c.passed,
                    csv_field(&c.detail)
                )
                .unwrap();
            }
            out
        }
        Format::Json => {
            let checks: Vec<Value> = report
                .checks
                .iter()
                .map(|c| {
                    json!({
                        "name": c.name,
                        "passed": c.passed,
                        "detail": c.detail,
                        "mismatches": c.mismatches.iter().map(|m| json!({
                            "relation": m.relation,
                            "pair": m.pair,
                            "expected": m.expected,
                            "observed": m.observed,
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            to_json_text(&json!({
                "degree": cfg.degree(),
                "levels": cfg.levels(),
                "passed": passed,
                "checks": checks,
            }))
        }
    };
    Ok((out, passed))
}
