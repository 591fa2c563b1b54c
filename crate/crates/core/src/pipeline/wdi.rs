//! World Development Indicators API: request URLs and payload parsing.
//! The HTTP transport lives in the command-line crate.

use crate::error::{Error, Result};

pub const WDI_BASE: &str = "https://api.worldbank.org/v2";

/// URL for one page of an indicator for one country over `years`.
pub fn wdi_url(indicator: &str, country: &str, first_year: i32, last_year: i32, page: usize) -> Result<String> {
    if indicator.trim().is_empty() || country.trim().is_empty() {
        return Err(Error::Validation("indicator and country must be non-empty".into()));
    }
    if first_year > last_year {
        return Err(Error::Validation(format!("year range {first_year}:{last_year} is empty")));
    }
    let ok = |s: &str| s.chars().all(|c| c.is_ascii_alphanumeric() || c == '.' || c == '_');
    if !ok(indicator) || !ok(country) {
        return Err(Error::Validation("indicator and country may only contain letters, digits, '.' and '_'".into()));
    }
    Ok(format!("{WDI_BASE}/country/{country}/indicator/{indicator}?format=json&per_page=1000&date={first_year}:{last_year}&page={page}"))
}

/// One page of the payload: total page count and `(year, value)` pairs;
/// missing values are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct WdiPage {
    pub pages: usize,
    pub observations: Vec<(i32, Option<f64>)>,
}

pub fn parse_wdi_page(body: &str) -> Result<WdiPage> {
    let bad = |m: &str| Error::MalformedPayload(m.into());
    let v: serde_json::Value = serde_json::from_str(body).map_err(|e| Error::MalformedPayload(e.to_string()))?;
    let arr = v.as_array().ok_or_else(|| bad("top level is not an array"))?;
    let meta = arr.first().ok_or_else(|| bad("empty payload"))?;
    if let Some(msg) = meta.get("message") {
        return Err(Error::MalformedPayload(format!("API error: {msg}")));
    }
    let pages = match &meta["pages"] {
        serde_json::Value::Number(n) => n.as_u64().ok_or_else(|| bad("page count is not an integer"))? as usize,
        serde_json::Value::String(s) => s.parse().map_err(|_| bad("page count is not an integer"))?,
        _ => return Err(bad("missing page count")),
    };
    let mut observations = Vec::new();
    if let Some(rows) = arr.get(1).and_then(|r| r.as_array()) {
        for row in rows {
            let year: i32 = row["date"].as_str().and_then(|d| d.parse().ok()).ok_or_else(|| bad("observation without a numeric date"))?;
            let value = match &row["value"] {
                serde_json::Value::Null => None,
                serde_json::Value::Number(n) => n.as_f64(),
                _ => return Err(bad("non-numeric value")),
            };
            observations.push((year, value));
        }
    }
    Ok(WdiPage { pages, observations })
}

/// `year,value` CSV sorted by year; missing values are dropped.
pub fn observations_to_csv(mut obs: Vec<(i32, Option<f64>)>) -> Result<String> {
    obs.sort_by_key(|(y, _)| *y);
    let mut s = String::from("year,value\n");
    let mut last = None;
    for (y, v) in obs {
        if last == Some(y) {
            return Err(Error::MalformedPayload(format!("year {y} appears twice")));
        }
        last = Some(y);
        if let Some(v) = v {
            s += &format!("{y},{v}\n");
        }
    }
    Ok(s)
}
