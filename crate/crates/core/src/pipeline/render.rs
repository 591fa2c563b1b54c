use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::tables::tables;
use super::ReportBundle;
use crate::diagnostics::StabilityPath;
use crate::error::Result;
use crate::montecarlo::summaries_to_csv;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Markdown,
    Csv,
    Svg,
}

impl std::str::FromStr for OutputFormat {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "md" | "markdown" => Ok(OutputFormat::Markdown),
            "csv" => Ok(OutputFormat::Csv),
            "svg" | "svg_plots" => Ok(OutputFormat::Svg),
            other => Err(crate::Error::InvalidArgument(format!("unknown format {other}; expected md, csv or svg"))),
        }
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 40.0;

/// Line chart of a CUSUM or CUSUMSQ path between its two band lines:
/// exactly three polylines (path, lower band, upper band).
pub fn svg_stability_chart(path: &StabilityPath, title: &str) -> String {
    let all = path.values.iter().chain(&path.lower).chain(&path.upper);
    let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 1.0, hi + 1.0) };
    let (t0, t1) = (*path.t.first().unwrap_or(&0) as f64, *path.t.last().unwrap_or(&1) as f64);
    let span = if t1 > t0 { t1 - t0 } else { 1.0 };
    let sx = |t: usize| MARGIN + (t as f64 - t0) / span * (WIDTH - 2.0 * MARGIN);
    let sy = |v: f64| HEIGHT - MARGIN - (v - lo) / (hi - lo) * (HEIGHT - 2.0 * MARGIN);
    let points = |vals: &[f64]| {
        path.t.iter().zip(vals).map(|(t, v)| format!("{:.2},{:.2}", sx(*t), sy(*v))).collect::<Vec<_>>().join(" ")
    };
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="24" font-family="sans-serif" font-size="14">{title} ({:?})</text>"#, path.verdict);
    let _ = writeln!(
        s,
        r##"<line x1="{MARGIN}" y1="{y}" x2="{x2}" y2="{y}" stroke="#999"/>"##,
        y = HEIGHT - MARGIN,
        x2 = WIDTH - MARGIN
    );
    let _ = writeln!(s, r##"<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{y}" stroke="#999"/>"##, y = HEIGHT - MARGIN);
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="{y}" font-family="sans-serif" font-size="11">{}</text>"#, path.t.first().unwrap_or(&0), y = HEIGHT - MARGIN + 14.0);
    let _ = writeln!(s, r#"<text x="{x}" y="{y}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#, path.t.last().unwrap_or(&0), x = WIDTH - MARGIN, y = HEIGHT - MARGIN + 14.0);
    for (id, vals, style) in [
        ("path", &path.values, r##"stroke="#1f4e9c" stroke-width="2""##),
        ("lower_band", &path.lower, r##"stroke="#c0392b" stroke-dasharray="6 4""##),
        ("upper_band", &path.upper, r##"stroke="#c0392b" stroke-dasharray="6 4""##),
    ] {
        let _ = writeln!(s, r#"<polyline id="{id}" fill="none" {style} points="{}"/>"#, points(vals));
    }
    s.push_str("</svg>\n");
    s
}

fn stability_paths(bundle: &ReportBundle) -> Vec<(String, &StabilityPath)> {
    let mut out = Vec::new();
    for d in bundle.diagnostics.iter().flatten() {
        let stem = format!("{}_{}", d.variant.label(), d.estimator.to_string().to_lowercase());
        out.push((format!("{stem}_cusum"), &d.bundle.cusum));
        out.push((format!("{stem}_cusumsq"), &d.bundle.cusumsq));
    }
    out
}

fn report_markdown(bundle: &ReportBundle) -> String {
    let v = &bundle.variables;
    let mut s = format!(
        "# Replication report\n\nDependent variable {}; regressors {}; sample {}-{}.\n\n",
        v.dependent,
        v.regressors.join(", "),
        bundle.sample.0,
        bundle.sample.1
    );
    if let Some(i) = &v.interaction {
        s += &format!("{} = {} x {}.\n\n", i.name, i.factors.0, i.factors.1);
    }
    s += &format!(
        "Config SHA-256 `{}`, data SHA-256 `{}`, version {}, seed {}.\n\n",
        bundle.provenance.config_sha256, bundle.provenance.data_sha256, bundle.provenance.crate_version, bundle.provenance.seed
    );
    if let Some(f) = &bundle.failure {
        s += &format!("**Incomplete:** stage `{}` failed: {}\n\n", f.stage.name(), f.error);
    }
    for t in tables(bundle) {
        s += &t.to_markdown();
        s.push('\n');
    }
    s
}

/// Files for one output format, as paths relative to the output directory.
/// The same bundle always yields the same bytes.
pub fn render(bundle: &ReportBundle, format: OutputFormat) -> Result<Vec<(PathBuf, Vec<u8>)>> {
    let mut files = Vec::new();
    match format {
        OutputFormat::Markdown => {
            files.push((PathBuf::from("report.md"), report_markdown(bundle).into_bytes()));
            for t in tables(bundle) {
                files.push((PathBuf::from(format!("tables/{}.md", t.id)), t.to_markdown().into_bytes()));
            }
        }
        OutputFormat::Csv => {
            for t in tables(bundle) {
                files.push((PathBuf::from(format!("tables/{}.csv", t.id)), t.to_csv()?.into_bytes()));
            }
            for (stem, p) in stability_paths(bundle) {
                files.push((PathBuf::from(format!("plots/{stem}.csv")), p.to_csv().into_bytes()));
            }
            if let Some(s) = &bundle.finite_sample_critical_values {
                files.push((PathBuf::from("simulated_critical_values.csv"), summaries_to_csv(s)?.into_bytes()));
            }
        }
        OutputFormat::Svg => {
            for (stem, p) in stability_paths(bundle) {
                files.push((PathBuf::from(format!("plots/{stem}.svg")), svg_stability_chart(p, &stem).into_bytes()));
            }
        }
    }
    Ok(files)
}
