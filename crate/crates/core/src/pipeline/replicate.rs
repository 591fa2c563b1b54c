use serde::{Deserialize, Serialize};

use super::tables::{tables, Table};
use super::ReportBundle;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceKind {
    /// Same sign as `expected` (zero matches only zero).
    Sign,
    /// `|actual - expected| <= tolerance`.
    Abs,
    /// `|actual - expected| <= tolerance * |expected|`.
    Rel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    pub table: String,
    pub row: String,
    pub column: String,
    pub kind: ToleranceKind,
    pub expected: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub expectation: Expectation,
    pub actual: Option<f64>,
    pub passed: bool,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationReport {
    pub checks: Vec<CheckOutcome>,
}

impl ReplicationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// One line per failed check; empty when everything matches.
    pub fn diff(&self) -> String {
        self.failures()
            .map(|c| {
                let e = &c.expectation;
                format!("{} / {} / {}: {}\n", e.table, e.row, e.column, c.message)
            })
            .collect()
    }
}

/// Parse an expectations CSV: `table,row,column,kind,expected,tolerance`.
/// For `sign` rows `expected` may be `+`/`-` or any number; `tolerance` may be empty.
pub fn parse_expectations(text: &str) -> Result<Vec<Expectation>> {
    let bad = |line: usize, m: String| Error::MalformedExpectations(format!("line {line}: {m}"));
    let mut r = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).comment(Some(b'#')).from_reader(text.as_bytes());
    let header: Vec<String> = r.headers().map_err(|e| bad(1, e.to_string()))?.iter().map(String::from).collect();
    if header != ["table", "row", "column", "kind", "expected", "tolerance"] {
        return Err(bad(1, format!("expected header table,row,column,kind,expected,tolerance, found {}", header.join(","))));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::MalformedExpectations(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != 6 {
            return Err(bad(line, format!("{} fields instead of 6", rec.len())));
        }
        let kind = match &rec[3] {
            "sign" => ToleranceKind::Sign,
            "abs" => ToleranceKind::Abs,
            "rel" => ToleranceKind::Rel,
            k => return Err(bad(line, format!("unknown tolerance kind {k}"))),
        };
        let expected = match (kind, &rec[4]) {
            (ToleranceKind::Sign, "+") => 1.0,
            (ToleranceKind::Sign, "-") => -1.0,
            (_, v) => v.parse::<f64>().map_err(|_| bad(line, format!("expected value {v} is not a number")))?,
        };
        let tolerance = match (kind, &rec[5]) {
            (ToleranceKind::Sign, "") => 0.0,
            (_, v) => v.parse::<f64>().map_err(|_| bad(line, format!("tolerance {v} is not a number")))?,
        };
        if !expected.is_finite() || !(tolerance >= 0.0) || !tolerance.is_finite() {
            return Err(bad(line, "expected value and tolerance must be finite, tolerance non-negative".into()));
        }
        if rec[0].is_empty() || rec[1].is_empty() || rec[2].is_empty() {
            return Err(bad(line, "table, row and column are required".into()));
        }
        out.push(Expectation { table: rec[0].into(), row: rec[1].into(), column: rec[2].into(), kind, expected, tolerance });
    }
    Ok(out)
}

fn check(tables: &[Table], e: &Expectation) -> CheckOutcome {
    let fail = |actual, message: String| CheckOutcome { expectation: e.clone(), actual, passed: false, message };
    let Some(table) = tables.iter().find(|t| t.id == e.table) else {
        return fail(None, "table not in bundle".into());
    };
    let Some(cell) = table.cell(&e.row, &e.column) else {
        return fail(None, "cell not in table".into());
    };
    let Some(actual) = cell.value() else {
        return fail(None, format!("cell is not numeric ({:?})", cell.display()));
    };
    let (passed, message) = match e.kind {
        ToleranceKind::Sign => {
            let ok = actual.signum() == e.expected.signum() && (actual == 0.0) == (e.expected == 0.0);
            let s = |v: f64| if v > 0.0 { "positive" } else if v < 0.0 { "negative" } else { "zero" };
            (ok, format!("expected {}, got {actual:.6} ({})", s(e.expected), s(actual)))
        }
        ToleranceKind::Abs => {
            let d = (actual - e.expected).abs();
            (d <= e.tolerance, format!("expected {} +/- {}, got {actual:.6} (off by {d:.6})", e.expected, e.tolerance))
        }
        ToleranceKind::Rel => {
            let d = (actual - e.expected).abs();
            let lim = e.tolerance * e.expected.abs();
            (d <= lim, format!("expected {} within {}%, got {actual:.6} (off by {d:.6})", e.expected, e.tolerance * 100.0))
        }
    };
    CheckOutcome { expectation: e.clone(), actual: Some(actual), passed, message }
}

/// Compare every expectation against the bundle's tables.
pub fn replicate(bundle: &ReportBundle, expectations: &[Expectation]) -> ReplicationReport {
    let t = tables(bundle);
    ReplicationReport { checks: expectations.iter().map(|e| check(&t, e)).collect() }
}
