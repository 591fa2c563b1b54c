use serde::{Deserialize, Serialize};

use super::{ArdlReport, EstimatorDiagnostics, ModelVariant, ReportBundle, UnitRootRow, VariantHatemiJ, VariantLongRun};
use crate::cointegration::JohansenResult;
use crate::diagnostics::{DiagnosticsBundle, Stability};
use crate::error::{Error, Result};
use crate::longrun::{Estimator, LongRunEstimate, Term};
use crate::montecarlo::{CriticalValueTest, SimulationSummary};
use crate::unit_root::{ls_critical_values, za_critical_values, BreakTestReport, LsModel};
use crate::timeseries::BreakModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cell {
    Empty,
    Number { value: f64, decimals: usize, stars: String },
    Text(String),
}

impl Cell {
    pub fn num(value: f64) -> Cell {
        Cell::Number { value, decimals: 3, stars: String::new() }
    }

    fn starred(value: f64, stars: &str) -> Cell {
        Cell::Number { value, decimals: 3, stars: stars.into() }
    }

    fn int(value: usize) -> Cell {
        Cell::Number { value: value as f64, decimals: 0, stars: String::new() }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Cell::Number { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn display(&self) -> String {
        match self {
            Cell::Empty => String::new(),
            Cell::Number { value, decimals, stars } => format!("{value:.decimals$}{stars}"),
            Cell::Text(t) => t.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub label: String,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub id: String,
    pub title: String,
    /// Operation and tuning that produced the numbers.
    pub source: String,
    pub row_header: String,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
    pub notes: Vec<String>,
}

impl Table {
    pub fn cell(&self, row: &str, column: &str) -> Option<&Cell> {
        let c = self.columns.iter().position(|h| h == column)?;
        self.rows.iter().find(|r| r.label == row)?.cells.get(c)
    }

    fn push(&mut self, label: impl Into<String>, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(Row { label: label.into(), cells });
    }

    /// CSV with a leading row-label column; numbers at full precision.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        let mut header = vec![self.row_header.clone()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header).map_err(io)?;
        for r in &self.rows {
            let mut rec = vec![r.label.clone()];
            rec.extend(r.cells.iter().map(|c| match c {
                Cell::Empty => String::new(),
                Cell::Number { value, .. } => format!("{value:?}"),
                Cell::Text(t) => t.clone(),
            }));
            w.write_record(&rec).map_err(io)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_markdown(&self) -> String {
        let esc = |v: &str| v.replace('|', "\\|");
        let mut s = format!("### {}\n\n", self.title);
        s += &format!("Produced by `{}`.\n\n", self.source);
        let header: Vec<String> = self.columns.iter().map(|c| esc(c)).collect();
        s += &format!("| {} | {} |\n", esc(&self.row_header), header.join(" | "));
        s += &format!("|---|{}\n", "---:|".repeat(self.columns.len()));
        for r in &self.rows {
            let cells: Vec<String> = r.cells.iter().map(|c| esc(&c.display())).collect();
            s += &format!("| {} | {} |\n", esc(&r.label), cells.join(" | "));
        }
        for n in &self.notes {
            s += &format!("\n{n}\n");
        }
        s
    }
}

/// Parse a table CSV written by [`Table::to_csv`]. Cells that parse as
/// numbers come back as numbers, empty cells as [`Cell::Empty`].
pub fn load_table_csv(text: &str) -> Result<(Vec<String>, Vec<Row>)> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header: Vec<String> = r.headers().map_err(|e| Error::MalformedCsv(e.to_string()))?.iter().skip(1).map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::MalformedCsv(e.to_string()))?;
        let mut it = rec.iter();
        let label = it.next().unwrap_or_default().to_string();
        let cells = it
            .map(|c| match c {
                "" => Cell::Empty,
                c => c.parse::<f64>().map(Cell::num).unwrap_or_else(|_| Cell::Text(c.into())),
            })
            .collect();
        rows.push(Row { label, cells });
    }
    Ok((header, rows))
}

fn p_stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.10 {
        "*"
    } else {
        ""
    }
}

fn term_cells(t: Option<&Term>) -> [Cell; 2] {
    match t {
        Some(t) => [Cell::starred(t.coefficient, p_stars(t.p_value)), Cell::num(t.std_error)],
        None => [Cell::Empty, Cell::Empty],
    }
}

const STARS_NOTE: &str = "***, ** and * denote significance at the 1%, 5% and 10% levels.";

fn break_cell(r: &BreakTestReport) -> Cell {
    match r.break_years.as_slice() {
        [y] => Cell::Number { value: *y as f64, decimals: 0, stars: String::new() },
        ys => Cell::Text(format!("({})", ys.iter().map(|y| y.to_string()).collect::<Vec<_>>().join(", "))),
    }
}

fn model_label(m: BreakModel) -> String {
    m.to_string()
}

fn unit_root_table(rows: &[UnitRootRow], test: &str, bundle: &ReportBundle) -> Table {
    let (id, title, source) = match test {
        "ZA" => ("table2_zivot_andrews", "Zivot-Andrews unit root test", "za_test"),
        _ => ("table3_lee_strazicich", "Lee-Strazicich two-break LM unit root test", "ls_test(n_breaks = 2)"),
    };
    let u = &bundle.tuning.unit_root;
    let mut t = Table {
        id: id.into(),
        title: title.into(),
        source: format!("{source}, trim = {}, max_lag = {:?}, lag_rule = {:?}", u.trim, u.max_lag, u.lag_rule),
        row_header: "Variable".into(),
        columns: ["Level breakpoints", "Level t", "Difference breakpoints", "Difference t"].map(String::from).to_vec(),
        rows: vec![],
        notes: vec![],
    };
    for r in rows.iter().filter(|r| r.test == test) {
        t.push(
            format!("{} ({})", r.variable, model_label(r.model)),
            vec![
                break_cell(&r.level),
                Cell::starred(r.level.statistic, r.level.reject_at.stars()),
                break_cell(&r.difference),
                Cell::starred(r.difference.statistic, r.difference.reject_at.stars()),
            ],
        );
    }
    for m in [BreakModel::A, BreakModel::C] {
        let cv = if test == "ZA" {
            za_critical_values(m)
        } else {
            ls_critical_values(if m == BreakModel::A { LsModel::A } else { LsModel::C }, 2)
        };
        t.notes.push(format!("Critical values, {}: 10% {:.3}, 5% {:.3}, 1% {:.3}.", model_label(m), cv.pct10, cv.pct5, cv.pct1));
    }
    t.notes.push(STARS_NOTE.into());
    t
}

/// Trace and maximum-eigenvalue statistics with their 5% critical values.
pub(crate) fn johansen_table(j: &JohansenResult) -> Table {
    let k = j.variables.len();
    let mut t = Table {
        id: format!("table4_johansen_{k}"),
        title: format!("Johansen cointegration test ({})", j.variables.join(", ")),
        source: format!("johansen_test(lag_order = {}, case = {:?})", j.lag_order, j.det_case),
        row_header: "H0".into(),
        columns: ["Trace", "Trace 5% CV", "Max-eigenvalue", "Max-eigenvalue 5% CV"].map(String::from).to_vec(),
        rows: vec![],
        notes: vec![],
    };
    let stars = |s: f64, cv: &crate::cointegration::RankCriticalValues| {
        if s > cv.pct1 {
            "***"
        } else if s > cv.pct5 {
            "**"
        } else if s > cv.pct10 {
            "*"
        } else {
            ""
        }
    };
    for r in 0..k {
        let (ct, cm) = (&j.critical_values_trace[r], &j.critical_values_maxeig[r]);
        t.push(
            if r == 0 { "r = 0".to_string() } else { format!("r <= {r}") },
            vec![
                Cell::starred(j.trace_stats[r], stars(j.trace_stats[r], ct)),
                Cell::num(ct.pct5),
                Cell::starred(j.maxeig_stats[r], stars(j.maxeig_stats[r], cm)),
                Cell::num(cm.pct5),
            ],
        );
    }
    t.notes.push(format!(
        "Effective sample {} observations. Selected rank at 5%: trace {}, maximum eigenvalue {}.",
        j.effective_t, j.selected_rank.pct5, j.selected_rank_maxeig.pct5
    ));
    t.notes.push(STARS_NOTE.into());
    t
}

fn hatemi_j_table(v: &VariantHatemiJ) -> Table {
    let r = &v.result;
    let mut t = Table {
        id: format!("table5_hatemi_j_{}", v.variant.label()),
        title: format!("Hatemi-J cointegration test with two regime shifts ({} on {})", r.dependent, r.regressors.join(", ")),
        source: format!("hatemi_j_test(shift = {:?}, adf_lag = {})", r.shift, r.adf_lag),
        row_header: "Test".into(),
        columns: ["Statistic", "Breakpoints", "1%", "5%", "10%"].map(String::from).to_vec(),
        rows: vec![],
        notes: vec![STARS_NOTE.into()],
    };
    let cv = &r.critical_values;
    for (name, stat, rej, br, c) in [
        ("ADF", r.adf_star, r.reject_at.adf, r.breaks_adf, cv.adf),
        ("Zt", r.zt_star, r.reject_at.zt, r.breaks_zt, cv.zt),
        ("Za", r.za_star, r.reject_at.za, r.breaks_za, cv.za),
    ] {
        t.push(
            name,
            vec![
                Cell::starred(stat, rej.stars()),
                Cell::Text(format!("({}, {})", br.0, br.1)),
                Cell::num(c.pct1),
                Cell::num(c.pct5),
                Cell::num(c.pct10),
            ],
        );
    }
    t
}

/// Label of the derived magnitude-comparison row, when the variant has an interaction.
fn magnitude_row(bundle: &ReportBundle, variant: ModelVariant) -> Option<(String, String, String)> {
    let i = bundle.variables.interaction.as_ref()?;
    (variant == ModelVariant::WithTerm).then(|| (format!("|{}| - |{}|", i.name, i.factors.0), i.name.clone(), i.factors.0.clone()))
}

fn magnitude_gap(e: &LongRunEstimate, a: &str, b: &str) -> Cell {
    match (e.coefficient(a), e.coefficient(b)) {
        (Some(x), Some(y)) => Cell::num(x.abs() - y.abs()),
        _ => Cell::Empty,
    }
}

fn regressor_list(e: &LongRunEstimate) -> String {
    e.names().into_iter().filter(|n| *n != "C").collect::<Vec<_>>().join(", ")
}

const DIAGNOSTIC_ROWS: [&str; 6] = ["Serial correlation", "Heteroskedasticity", "Normality", "Functional form", "CUSUM", "CUSUMSQ"];

fn diagnostic_cell(d: Option<&DiagnosticsBundle>, row: usize) -> Cell {
    let Some(d) = d else { return Cell::Empty };
    let verdict = |s: Stability| Cell::Text(if s == Stability::Stable { "Stable".into() } else { "Unstable".into() });
    match row {
        0 => Cell::num(d.serial_correlation.p_value),
        1 => Cell::num(d.heteroskedasticity.p_value),
        2 => Cell::num(d.normality.p_value),
        3 => Cell::num(d.functional_form.p_value),
        4 => verdict(d.cusum.verdict),
        _ => verdict(d.cusumsq.verdict),
    }
}

fn find_diag(diags: Option<&Vec<EstimatorDiagnostics>>, v: ModelVariant, e: Estimator) -> Option<&DiagnosticsBundle> {
    diags?.iter().find(|d| d.variant == v && d.estimator == e).map(|d| &d.bundle)
}

fn diagnostics_note(bundle: &ReportBundle) -> String {
    let d = &bundle.tuning.diagnostics;
    format!(
        "Diagnostic rows are p-values: Breusch-Godfrey LM ({} lags), {:?}, Jarque-Bera, RESET LM (powers {:?}).",
        d.serial_lags, d.heteroskedasticity, d.reset_powers
    )
}

fn long_run_table(v: &VariantLongRun, bundle: &ReportBundle) -> Table {
    let (d, f) = (&v.dols, &v.fmols);
    let mut t = Table {
        id: format!("table5_long_run_{}", v.variant.label()),
        title: format!("DOLS and FMOLS long-run estimates, {} on {}", d.dependent, regressor_list(d)),
        source: format!(
            "dols(leads = {}, lags = {}), fmols(kernel = Bartlett, bandwidth = {})",
            d.tuning.leads.unwrap_or(0),
            d.tuning.lags.unwrap_or(0),
            f.tuning.bandwidth.map_or("auto".into(), |b| b.to_string())
        ),
        row_header: "Variable".into(),
        columns: ["DOLS", "DOLS s.e.", "FMOLS", "FMOLS s.e."].map(String::from).to_vec(),
        rows: vec![],
        notes: vec![],
    };
    for name in d.names() {
        let mut cells = term_cells(d.term(name)).to_vec();
        cells.extend(term_cells(f.term(name)));
        t.push(name, cells);
    }
    if let Some((label, a, b)) = magnitude_row(bundle, v.variant) {
        t.push(label, vec![magnitude_gap(d, &a, &b), Cell::Empty, magnitude_gap(f, &a, &b), Cell::Empty]);
    }
    let dd = find_diag(bundle.diagnostics.as_ref(), v.variant, Estimator::Dols);
    let fd = find_diag(bundle.diagnostics.as_ref(), v.variant, Estimator::Fmols);
    for (i, name) in DIAGNOSTIC_ROWS.iter().enumerate() {
        t.push(*name, vec![diagnostic_cell(dd, i), Cell::Empty, diagnostic_cell(fd, i), Cell::Empty]);
    }
    t.notes.push(format!("Effective samples: DOLS {}, FMOLS {}.", d.effective_t, f.effective_t));
    for w in d.warnings.iter().chain(&f.warnings) {
        t.notes.push(format!("Warning: {w}"));
    }
    t.notes.push(diagnostics_note(bundle));
    t.notes.push(STARS_NOTE.into());
    t
}

fn ardl_table(a: &ArdlReport, bundle: &ReportBundle) -> Table {
    let lr = &a.long_run;
    let mut t = Table {
        id: format!("table6_ardl_{}", a.variant.label()),
        title: format!("{} short-run and long-run estimates, {} on {}", a.order, lr.dependent, regressor_list(lr)),
        source: format!(
            "ardl_select(p_max = {}, q_max = {}, criterion = {:?}), ecm_reparameterize, ardl_longrun",
            bundle.tuning.ardl.p_max, bundle.tuning.ardl.q_max, bundle.tuning.ardl.criterion
        ),
        row_header: "Variable".into(),
        columns: ["Short-run", "Short-run s.e.", "Long-run", "Long-run s.e."].map(String::from).to_vec(),
        rows: vec![],
        notes: vec![],
    };
    for name in lr.names() {
        let short = a.ecm.short_run_term(&if name == "C" { "C".to_string() } else { format!("D({name})") }).cloned();
        let mut cells = term_cells(short.as_ref()).to_vec();
        cells.extend(term_cells(lr.term(name)));
        t.push(name, cells);
    }
    let mut ect = term_cells(Some(&a.ecm.adjustment)).to_vec();
    ect.extend([Cell::Empty, Cell::Empty]);
    t.push("ECT(-1)", ect);
    if let Some((label, x, y)) = magnitude_row(bundle, a.variant) {
        t.push(label, vec![Cell::Empty, Cell::Empty, magnitude_gap(lr, &x, &y), Cell::Empty]);
    }
    t.push("Bounds F", vec![Cell::Empty, Cell::Empty, Cell::num(a.bounds.f_statistic), Cell::Empty]);
    let dg = find_diag(bundle.diagnostics.as_ref(), a.variant, Estimator::Ardl);
    for (i, name) in DIAGNOSTIC_ROWS.iter().enumerate() {
        t.push(*name, vec![Cell::Empty, Cell::Empty, diagnostic_cell(dg, i), Cell::Empty]);
    }
    t.notes.push(format!(
        "Bounds test (k = {}): F = {:.3}, 5% bounds [{:.2}, {:.2}], verdict {:?}.",
        a.bounds.k, a.bounds.f_statistic, a.bounds.lower_bound_5pct, a.bounds.upper_bound_5pct, a.bounds.verdict
    ));
    t.notes.push(format!("Effective sample {} observations.", lr.effective_t));
    t.notes.push(diagnostics_note(bundle));
    t.notes.push(STARS_NOTE.into());
    t
}

fn simulation_table(sims: &[SimulationSummary], bundle: &ReportBundle) -> Table {
    let mut t = Table {
        id: "critical_values_finite_sample".into(),
        title: "Asymptotic and simulated finite-sample critical values".into(),
        source: format!("simulate_critical_values(reps = {}, seed = {})", bundle.tuning.simulation.reps, bundle.provenance.seed),
        row_header: "Test".into(),
        columns: ["T", "Tabulated 5%", "Simulated 1%", "Simulated 5%", "Simulated 10%", "MC s.e. (5%)"].map(String::from).to_vec(),
        rows: vec![],
        notes: vec!["Tabulated values are asymptotic except the Dickey-Fuller response surface, evaluated at T.".into()],
    };
    for s in sims {
        let test = match s.test_id.as_str() {
            "DF" => Some(CriticalValueTest::DfConstant),
            "ZA" => Some(CriticalValueTest::ZaModelA),
            "LS2" => Some(CriticalValueTest::LsTwoBreakModelA),
            "JOHANSEN_TRACE" => s.model.strip_prefix("k-r=").and_then(|k| k.parse().ok()).map(|k| CriticalValueTest::JohansenTrace { k }),
            _ => None,
        };
        let tab = test.and_then(|c| c.embedded_5pct(s.t)).map_or(Cell::Empty, Cell::num);
        t.push(
            format!("{} ({})", s.test_id, s.model),
            vec![Cell::int(s.t), tab, Cell::num(s.quantiles.pct1), Cell::num(s.quantiles.pct5), Cell::num(s.quantiles.pct10), Cell::num(s.mc_stderr.pct5)],
        );
    }
    t
}

/// Every table the bundle supports, in report order.
pub fn tables(bundle: &ReportBundle) -> Vec<Table> {
    let mut out = Vec::new();
    if let Some(desc) = &bundle.descriptives {
        let mut t = Table {
            id: "table1_descriptives".into(),
            title: format!("Descriptive statistics, {}-{}", bundle.sample.0, bundle.sample.1),
            source: "describe".into(),
            row_header: "Variable".into(),
            columns: ["Obs", "Mean", "SD", "Min", "Max"].map(String::from).to_vec(),
            rows: vec![],
            notes: vec!["SD uses the T - 1 divisor.".into()],
        };
        for d in desc {
            t.push(d.name.clone(), vec![Cell::int(d.n), Cell::num(d.mean), Cell::num(d.sd), Cell::num(d.min), Cell::num(d.max)]);
        }
        out.push(t);
    }
    if let Some(rows) = &bundle.unit_roots {
        out.push(unit_root_table(rows, "ZA", bundle));
        out.push(unit_root_table(rows, "LS", bundle));
    }
    for j in bundle.johansen.iter().flatten() {
        out.push(johansen_table(j));
    }
    for h in bundle.hatemi_j.iter().flatten() {
        out.push(hatemi_j_table(h));
    }
    for v in bundle.long_run.iter().flatten() {
        out.push(long_run_table(v, bundle));
    }
    for a in bundle.ardl.iter().flatten() {
        out.push(ardl_table(a, bundle));
    }
    if let Some(d) = &bundle.diagnostics {
        out.push(diagnostics_table(d, bundle));
    }
    if let Some(s) = &bundle.finite_sample_critical_values {
        out.push(simulation_table(s, bundle));
    }
    out
}

fn diagnostics_table(diags: &[EstimatorDiagnostics], bundle: &ReportBundle) -> Table {
    let mut t = Table {
        id: "diagnostics_summary".into(),
        title: "Residual diagnostics and parameter stability".into(),
        source: "diagnose".into(),
        row_header: "Model".into(),
        columns: DIAGNOSTIC_ROWS.map(String::from).to_vec(),
        rows: vec![],
        notes: vec![diagnostics_note(bundle)],
    };
    for d in diags {
        let cells = (0..DIAGNOSTIC_ROWS.len()).map(|i| diagnostic_cell(Some(&d.bundle), i)).collect();
        t.push(format!("{} {}", d.estimator, d.variant.label()), cells);
    }
    for d in diags {
        t.notes.push(format!("{} {}: {}.", d.estimator, d.variant.label(), d.regression));
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table {
            id: "x".into(),
            title: "X".into(),
            source: "op".into(),
            row_header: "Variable".into(),
            columns: vec!["a".into(), "b, c".into(), "d".into()],
            rows: vec![],
            notes: vec![],
        };
        t.push("IMP", vec![Cell::starred(1.0 / 3.0, "**"), Cell::Text("(1990, 2001)".into()), Cell::Empty]);
        t.push("|a| - |b|", vec![Cell::Empty, Cell::Empty, Cell::Empty]);
        t.push("REN", vec![Cell::num(-123456.789012345678), Cell::num(1e-300), Cell::num(f64::MIN_POSITIVE)]);
        t
    }

    #[test]
    fn csv_round_trip_keeps_twelve_significant_digits() {
        let t = sample();
        let (header, rows) = load_table_csv(&t.to_csv().unwrap()).unwrap();
        assert_eq!(header, t.columns);
        for (a, b) in t.rows.iter().zip(&rows) {
            assert_eq!(a.label, b.label);
            for (x, y) in a.cells.iter().zip(&b.cells) {
                match (x.value(), y.value()) {
                    (Some(x), Some(y)) => assert!(((x - y) / x).abs() < 1e-12, "{x} {y}"),
                    (None, None) => assert_eq!(x.display(), y.display()),
                    _ => panic!("{x:?} {y:?}"),
                }
            }
        }
    }

    #[test]
    fn markdown_layout() {
        let md = sample().to_markdown();
        assert!(md.contains("| Variable | a | b, c | d |\n|---|---:|---:|---:|\n| IMP | 0.333** | (1990, 2001) |  |\n| \\|a\\| - \\|b\\| |  |  |  |\n"));
    }

    fn johansen_fixture() -> JohansenResult {
        use crate::cointegration::{maxeig_critical_values, trace_critical_values, JohansenCase, SelectedRank};
        let trace = vec![53.586, 33.770, 19.262, 6.807];
        let maxeig = vec![19.816, 14.508, 12.455, 6.807];
        JohansenResult {
            variables: ["INF", "IMP", "REN", "EXC"].map(String::from).to_vec(),
            eigenvalues: vec![0.38, 0.29, 0.26, 0.15],
            trace_stats: trace,
            maxeig_stats: maxeig,
            critical_values_trace: (0..4).map(|r| trace_critical_values(4 - r).unwrap()).collect(),
            critical_values_maxeig: (0..4).map(|r| maxeig_critical_values(4 - r).unwrap()).collect(),
            selected_rank: SelectedRank { pct1: 0, pct5: 4, pct10: 4 },
            selected_rank_maxeig: SelectedRank { pct1: 0, pct5: 0, pct10: 0 },
            lag_order: 1,
            det_case: JohansenCase::UnrestrictedConstant,
            effective_t: 42,
        }
    }

    #[test]
    fn johansen_markdown_matches_golden_file() {
        let md = johansen_table(&johansen_fixture()).to_markdown();
        assert_eq!(md, include_str!("../../tests/golden/johansen_table4.md"));
    }

    #[test]
    fn cell_lookup() {
        let t = sample();
        assert_eq!(t.cell("REN", "a").and_then(Cell::value), Some(-123456.789012345678));
        assert!(t.cell("REN", "zz").is_none());
        assert!(t.cell("EXC", "a").is_none());
    }
}
