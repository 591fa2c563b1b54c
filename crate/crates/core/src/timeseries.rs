//! Annual time series, aligned datasets, and the transformations the tests
//! and estimators are built from.
//!
//! Break indices are 1-based positions of the *last* pre-break observation:
//! a break at `tb` switches the intercept dummy on from observation `tb + 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The bundled Türkiye snapshot (1980-2022).
pub const TURKIYE_SNAPSHOT: &str = include_str!("../data/turkiye_1980_2022.csv");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub name: String,
    pub start_year: i32,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(name: impl Into<String>, start_year: i32, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::SeriesTooShort { needed: 1, have: 0 });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("series contains non-finite values".into()));
        }
        Ok(TimeSeries { name: name.into(), start_year, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Calendar year of 1-based observation `index`.
    pub fn year_of(&self, index: usize) -> i32 {
        self.start_year + index as i32 - 1
    }

    pub fn end_year(&self) -> i32 {
        self.year_of(self.len())
    }

    pub fn transform(&self, spec: Transform) -> Result<TimeSeries> {
        transform(self, spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    Diff,
    Lag(usize),
    Lead(usize),
    Trend,
}

/// Apply a transformation, trimming the sample so the output has no gaps.
///
/// `lag(k)` keeps the values `y_1..y_{T-k}` aligned to years `k+1..T`;
/// `lead(k)` keeps `y_{k+1}..y_T` aligned to years `1..T-k`.
pub fn transform(s: &TimeSeries, spec: Transform) -> Result<TimeSeries> {
    let t = s.len();
    match spec {
        Transform::Diff => {
            if t < 2 {
                return Err(Error::SeriesTooShort { needed: 2, have: t });
            }
            let values = s.values.windows(2).map(|w| w[1] - w[0]).collect();
            Ok(TimeSeries { name: format!("D({})", s.name), start_year: s.start_year + 1, values })
        }
        Transform::Lag(k) | Transform::Lead(k) if k == 0 => {
            Err(Error::InvalidArgument("lag/lead order must be at least 1".into()))
        }
        Transform::Lag(k) => {
            if t <= k {
                return Err(Error::SeriesTooShort { needed: k + 1, have: t });
            }
            Ok(TimeSeries {
                name: format!("{}(-{k})", s.name),
                start_year: s.start_year + k as i32,
                values: s.values[..t - k].to_vec(),
            })
        }
        Transform::Lead(k) => {
            if t <= k {
                return Err(Error::SeriesTooShort { needed: k + 1, have: t });
            }
            Ok(TimeSeries {
                name: format!("{}(+{k})", s.name),
                start_year: s.start_year,
                values: s.values[k..].to_vec(),
            })
        }
        Transform::Trend => Ok(TimeSeries {
            name: "TREND".into(),
            start_year: s.start_year,
            values: (1..=t).map(|i| i as f64).collect(),
        }),
    }
}

/// Shift dummies: which columns a break contributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum BreakModel {
    /// intercept shift
    A,
    /// trend shift
    B,
    /// intercept and trend shift
    C,
}

impl std::fmt::Display for BreakModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            BreakModel::A => "Model A",
            BreakModel::B => "Model B",
            BreakModel::C => "Model C",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BreakDummies {
    /// `1{t > tb}`; `None` under Model B
    pub du: Option<Vec<f64>>,
    /// `(t - tb) 1{t > tb}`; `None` under Model A
    pub dt: Option<Vec<f64>>,
    pub tb: usize,
}

impl BreakDummies {
    /// The dummy columns in (du, dt) order.
    pub fn columns(&self) -> Vec<Vec<f64>> {
        self.du.iter().chain(self.dt.iter()).cloned().collect()
    }
}

pub fn level_dummy(t: usize, tb: usize) -> Vec<f64> {
    (1..=t).map(|i| if i > tb { 1.0 } else { 0.0 }).collect()
}

pub fn trend_dummy(t: usize, tb: usize) -> Vec<f64> {
    (1..=t).map(|i| if i > tb { (i - tb) as f64 } else { 0.0 }).collect()
}

pub fn break_dummies(t: usize, tb: usize, model: BreakModel) -> Result<BreakDummies> {
    if tb < 1 || tb >= t {
        return Err(Error::BreakOutOfRange { tb, t });
    }
    let du = matches!(model, BreakModel::A | BreakModel::C).then(|| level_dummy(t, tb));
    let dt = matches!(model, BreakModel::B | BreakModel::C).then(|| trend_dummy(t, tb));
    Ok(BreakDummies { du, dt, tb })
}

/// Elementwise product of two aligned series, named `TERM`.
pub fn interaction(a: &TimeSeries, b: &TimeSeries) -> Result<TimeSeries> {
    if a.start_year != b.start_year || a.len() != b.len() {
        return Err(Error::AlignmentMismatch(format!(
            "{} covers {}..{}, {} covers {}..{}",
            a.name,
            a.start_year,
            a.end_year(),
            b.name,
            b.start_year,
            b.end_year()
        )));
    }
    Ok(TimeSeries {
        name: "TERM".into(),
        start_year: a.start_year,
        values: a.values.iter().zip(&b.values).map(|(x, y)| x * y).collect(),
    })
}

/// Named columns sharing one contiguous range of years.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub start_year: i32,
    pub columns: Vec<TimeSeries>,
}

impl Dataset {
    pub fn new(columns: Vec<TimeSeries>) -> Result<Self> {
        let first = columns.first().ok_or(Error::EmptyFile)?;
        let (start, len) = (first.start_year, first.len());
        for (i, c) in columns.iter().enumerate() {
            if c.start_year != start || c.len() != len {
                return Err(Error::AlignmentMismatch(format!("column `{}` is not aligned with `{}`", c.name, first.name)));
            }
            if columns[..i].iter().any(|o| o.name == c.name) {
                return Err(Error::DuplicateColumn(c.name.clone()));
            }
        }
        Ok(Dataset { start_year: start, columns })
    }

    pub fn len(&self) -> usize {
        self.columns.first().map_or(0, |c| c.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn years(&self) -> std::ops::RangeInclusive<i32> {
        self.start_year..=self.start_year + self.len() as i32 - 1
    }

    pub fn names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn column(&self, name: &str) -> Result<&TimeSeries> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    /// New dataset with the named columns in the given order.
    pub fn select(&self, names: &[&str]) -> Result<Dataset> {
        let cols = names.iter().map(|n| self.column(n).cloned()).collect::<Result<Vec<_>>>()?;
        Dataset::new(cols)
    }

    pub fn with_column(mut self, s: TimeSeries) -> Result<Dataset> {
        self.columns.push(s);
        Dataset::new(self.columns)
    }

    /// Column values in column order.
    pub fn values(&self) -> Vec<Vec<f64>> {
        self.columns.iter().map(|c| c.values.clone()).collect()
    }

    /// CSV with a `year` column followed by every series.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("year");
        for c in &self.columns {
            out.push(',');
            out.push_str(&c.name);
        }
        out.push('\n');
        for (i, year) in self.years().enumerate() {
            out.push_str(&year.to_string());
            for c in &self.columns {
                out.push(',');
                out.push_str(&format_value(c.values[i]));
            }
            out.push('\n');
        }
        out
    }
}

/// Shortest representation that parses back to the same value.
fn format_value(v: f64) -> String {
    format!("{v}")
}

/// Parse `year,<name>...` CSV text into a dataset.
pub fn load_dataset(bytes: &[u8]) -> Result<Dataset> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::MalformedCsv(e.to_string()))?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    if text.trim().is_empty() {
        return Err(Error::EmptyFile);
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::MalformedCsv(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.first().map(|h| h.to_ascii_lowercase()) != Some("year".into()) {
        return Err(Error::MalformedCsv("first header must be `year`".into()));
    }
    let names = &headers[1..];
    if names.is_empty() {
        return Err(Error::MalformedCsv("no data columns".into()));
    }
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) || n.eq_ignore_ascii_case("year") {
            return Err(Error::DuplicateColumn(n.clone()));
        }
    }

    let mut years: Vec<i32> = Vec::new();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (row, rec) in reader.records().enumerate() {
        let line = row + 2;
        let rec = rec.map_err(|e| Error::MalformedCsv(e.to_string()))?;
        if rec.len() != headers.len() {
            return Err(Error::MalformedCsv(format!("line {line} has {} fields, expected {}", rec.len(), headers.len())));
        }
        let year: i32 = rec[0].parse().map_err(|_| Error::NonNumericCell {
            line,
            column: "year".into(),
            value: rec[0].to_string(),
        })?;
        if let Some(&prev) = years.last() {
            if year != prev + 1 {
                return Err(Error::GapInYears { previous: prev, next: year });
            }
        }
        years.push(year);
        for (j, cell) in rec.iter().skip(1).enumerate() {
            let v: f64 = cell.parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| Error::NonNumericCell {
                line,
                column: names[j].clone(),
                value: cell.to_string(),
            })?;
            cols[j].push(v);
        }
    }
    let start = *years.first().ok_or(Error::EmptyFile)?;
    let columns = names
        .iter()
        .zip(cols)
        .map(|(n, v)| TimeSeries::new(n.clone(), start, v))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(columns)
}

/// Load the bundled snapshot.
pub fn snapshot() -> Dataset {
    load_dataset(TURKIYE_SNAPSHOT.as_bytes()).expect("bundled snapshot parses")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Descriptive {
    pub name: String,
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

/// Mean, sample standard deviation (T-1 divisor), min and max per column.
pub fn describe(d: &Dataset) -> Vec<Descriptive> {
    d.columns
        .iter()
        .map(|c| {
            let n = c.len();
            let mean = c.values.iter().sum::<f64>() / n as f64;
            let var = if n > 1 {
                c.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
            } else {
                0.0
            };
            Descriptive {
                name: c.name.clone(),
                n,
                mean,
                sd: var.sqrt(),
                min: c.values.iter().copied().fold(f64::INFINITY, f64::min),
                max: c.values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ts(v: &[f64]) -> TimeSeries {
        TimeSeries::new("x", 2000, v.to_vec()).unwrap()
    }

    #[test]
    fn minimal_file() {
        let d = load_dataset(b"year,a,b\n1980,1,2\n1981,3,4\n").unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.names(), vec!["a", "b"]);
        assert_eq!(d.column("b").unwrap().values, vec![2.0, 4.0]);
    }

    #[test]
    fn crlf_accepted() {
        let d = load_dataset(b"year,a\r\n1980,1.5\r\n1981,2\r\n").unwrap();
        assert_eq!(d.column("a").unwrap().values, vec![1.5, 2.0]);
    }

    #[test]
    fn gap_in_years() {
        assert_eq!(load_dataset(b"year,a\n1980,1\n1982,2\n"), Err(Error::GapInYears { previous: 1980, next: 1982 }));
    }

    #[test]
    fn bad_cells() {
        assert!(matches!(load_dataset(b"year,a\n1980,x\n"), Err(Error::NonNumericCell { line: 2, .. })));
        assert!(matches!(load_dataset(b"year,a\n1980,\n"), Err(Error::NonNumericCell { .. })));
        assert!(matches!(load_dataset(b"year,a\n1980,1,000\n"), Err(Error::MalformedCsv(_))));
        assert_eq!(load_dataset(b"year,a,a\n1980,1,2\n"), Err(Error::DuplicateColumn("a".into())));
        assert_eq!(load_dataset(b""), Err(Error::EmptyFile));
        assert_eq!(load_dataset(b"year,a\n"), Err(Error::EmptyFile));
    }

    #[test]
    fn snapshot_shape() {
        let d = snapshot();
        assert_eq!(d.len(), 43);
        assert_eq!(d.names(), vec!["INF", "IMP", "REN", "EXC"]);
        assert_eq!(d.years(), 1980..=2022);
    }

    #[test]
    fn transforms() {
        assert!(ts(&[5.0; 4]).transform(Transform::Diff).unwrap().values.iter().all(|v| *v == 0.0));
        let d = ts(&[1.0, 3.0, 6.0, 10.0]).transform(Transform::Diff).unwrap();
        assert_eq!(d.values, vec![2.0, 3.0, 4.0]);
        assert_eq!(d.start_year, 2001);
        let tr = ts(&[4.0, 4.0, 4.0]).transform(Transform::Trend).unwrap();
        assert_eq!(tr.values, vec![1.0, 2.0, 3.0]);
        assert!(matches!(ts(&[1.0]).transform(Transform::Diff), Err(Error::SeriesTooShort { .. })));
        assert!(matches!(ts(&[1.0, 2.0]).transform(Transform::Lag(2)), Err(Error::SeriesTooShort { .. })));
        assert!(matches!(ts(&[1.0, 2.0]).transform(Transform::Lead(0)), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn lead_then_lag_roundtrip() {
        let s = ts(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let back = s.transform(Transform::Lead(1)).unwrap().transform(Transform::Lag(1)).unwrap();
        assert_eq!(back.start_year, 2001);
        assert_eq!(back.values, vec![2.0, 3.0, 4.0]);
        assert_eq!(back.values, s.values[1..4]);
    }

    #[test]
    fn dummies() {
        let a = break_dummies(10, 4, BreakModel::A).unwrap();
        assert_eq!(a.du.unwrap(), vec![0., 0., 0., 0., 1., 1., 1., 1., 1., 1.]);
        assert!(a.dt.is_none());
        let c = break_dummies(10, 4, BreakModel::C).unwrap();
        assert_eq!(c.dt.unwrap(), vec![0., 0., 0., 0., 1., 2., 3., 4., 5., 6.]);
        assert!(break_dummies(10, 4, BreakModel::B).unwrap().du.is_none());
        assert_eq!(break_dummies(10, 10, BreakModel::A), Err(Error::BreakOutOfRange { tb: 10, t: 10 }));
        assert_eq!(break_dummies(10, 0, BreakModel::A), Err(Error::BreakOutOfRange { tb: 0, t: 10 }));
    }

    #[test]
    fn dummy_invariants_exhaustive() {
        for t in 2..=50 {
            for tb in 1..t {
                let d = break_dummies(t, tb, BreakModel::C).unwrap();
                let du = d.du.unwrap();
                let dt = d.dt.unwrap();
                assert_eq!(du.iter().sum::<f64>() as usize, t - tb);
                for i in 1..=t {
                    let expect = if i > tb { (i - tb) as f64 } else { 0.0 };
                    assert_eq!(dt[i - 1], expect);
                    assert_eq!(du[i - 1], if i > tb { 1.0 } else { 0.0 });
                }
            }
        }
    }

    #[test]
    fn interaction_examples() {
        let r = TimeSeries::new("REN", 1980, vec![19.88]).unwrap();
        let i = TimeSeries::new("IMP", 1980, vec![62.1]).unwrap();
        let term = interaction(&r, &i).unwrap();
        assert_eq!(term.name, "TERM");
        assert!((term.values[0] - 1234.548).abs() < 1e-9);
        assert_eq!(interaction(&ts(&[0.0, 0.0]), &ts(&[3.0, 7.0])).unwrap().values, vec![0.0, 0.0]);
        assert_eq!(interaction(&ts(&[2.0, 3.0]), &ts(&[2.0, 3.0])).unwrap().values, vec![4.0, 9.0]);
        let shifted = TimeSeries::new("y", 2001, vec![1.0, 2.0]).unwrap();
        assert!(matches!(interaction(&ts(&[1.0, 2.0]), &shifted), Err(Error::AlignmentMismatch(_))));
    }

    #[test]
    fn describe_constant_column() {
        let d = Dataset::new(vec![ts(&[3.0, 3.0, 3.0])]).unwrap();
        let s = &describe(&d)[0];
        assert_eq!((s.mean, s.sd, s.min, s.max), (3.0, 0.0, 3.0, 3.0));
    }

    #[test]
    fn csv_roundtrip_snapshot() {
        let d = snapshot();
        assert_eq!(load_dataset(d.to_csv().as_bytes()).unwrap(), d);
    }

    proptest! {
        #[test]
        fn diff_then_cumsum_reconstructs(v in prop::collection::vec(-1e3f64..1e3, 2..40)) {
            let s = ts(&v);
            let d = s.transform(Transform::Diff).unwrap();
            let mut acc = v[0];
            let mut rebuilt = vec![acc];
            for x in &d.values {
                acc += x;
                rebuilt.push(acc);
            }
            for (a, b) in rebuilt.iter().zip(&v) {
                prop_assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0));
            }
        }

        #[test]
        fn interaction_commutes_and_distributes(
            a in prop::collection::vec(-100f64..100.0, 5),
            b in prop::collection::vec(-100f64..100.0, 5),
            c in prop::collection::vec(-100f64..100.0, 5),
        ) {
            let (sa, sb, sc) = (ts(&a), ts(&b), ts(&c));
            prop_assert_eq!(interaction(&sa, &sb).unwrap().values, interaction(&sb, &sa).unwrap().values);
            let bc = ts(&b.iter().zip(&c).map(|(x, y)| x + y).collect::<Vec<_>>());
            let lhs = interaction(&sa, &bc).unwrap().values;
            let ab = interaction(&sa, &sb).unwrap().values;
            let ac = interaction(&sa, &sc).unwrap().values;
            for i in 0..5 {
                prop_assert!((lhs[i] - (ab[i] + ac[i])).abs() <= 1e-9 * (1.0 + lhs[i].abs()));
            }
        }
    }
}
