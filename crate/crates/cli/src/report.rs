//! The analysis report and its renderings.
//!
//! Every rational is a string. Fields that do not apply to the pair are
//! `null` rather than absent, so the key set is the same for every report.

use conelim_core::filtration::Filtration;
use conelim_core::flow::{run_flow, FlowReport};
use conelim_core::limits::{check_slope_constraints, classify, limit_data, ConstraintReport, HodgeBundle, Inequality, LimitCase, Slopes, Window};
use conelim_core::stability::{is_stable, StabilityVerdict, SubbundleCheck};
use conelim_core::{Error, Matrix, Pair, Rational};
use serde::Serialize;

use crate::instance::form_cell;

type Cell = Option<Vec<String>>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub valid: bool,
    pub rank: usize,
    pub degree: i64,
    pub l_degree: i64,
    pub coprime: bool,
    /// Coefficients of `det(x - Φ)` up to sign, by degree `kℓ`.
    pub hitchin_image: Vec<Cell>,
    pub nilpotent: bool,
    pub nilpotency_order: Option<usize>,
    pub stable: Option<bool>,
    pub stability_checks: Vec<CheckJson>,
    pub classification: Option<String>,
    pub slopes: Option<SlopesJson>,
    pub filtration: Option<FiltrationJson>,
    pub constraints: Option<ConstraintsJson>,
    pub limit: Option<LimitJson>,
    pub flow: Option<FlowJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckJson {
    pub subbundle: String,
    pub degree: i64,
    pub rank: usize,
    pub slope: String,
    pub bound: String,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopesJson {
    pub bundle: String,
    pub e2: Option<String>,
    pub e3: Option<String>,
    pub quotient: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiltrationJson {
    pub kind: String,
    pub ranks: Vec<usize>,
    pub degrees: Vec<i64>,
    pub splitting_types: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowJson {
    pub lower: String,
    pub value: String,
    pub upper: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityJson {
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstraintsJson {
    pub quotient_slope_window: WindowJson,
    pub image_line_bound: InequalityJson,
    pub kernel_bound: InequalityJson,
    pub induced_map_bound: InequalityJson,
    pub all_hold: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatrixJson {
    pub row_twists: Vec<i64>,
    pub col_twists: Vec<i64>,
    pub entries: Vec<Vec<Cell>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitJson {
    pub type_vector: Vec<usize>,
    pub piece_twists: Vec<Vec<i64>>,
    pub piece_degrees: Vec<i64>,
    pub maps: Vec<MatrixJson>,
    pub stable: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowJson {
    pub exponent_table: Vec<Vec<Option<i64>>>,
    pub diverges: bool,
    pub matches_prediction: bool,
}

fn q(v: &Rational) -> String {
    v.to_string()
}

pub fn check_json(c: &SubbundleCheck<Rational>) -> CheckJson {
    CheckJson {
        subbundle: c.description.clone(),
        degree: c.degree,
        rank: c.rank,
        slope: q(&c.slope),
        bound: q(&c.bound),
        passes: c.passes,
    }
}

fn slopes_json(s: &Slopes<Rational>) -> SlopesJson {
    SlopesJson { bundle: q(&s.bundle), e2: s.e2.as_ref().map(q), e3: s.e3.as_ref().map(q), quotient: s.quotient.as_ref().map(q) }
}

fn filtration_json(f: &Filtration<Rational>) -> Result<FiltrationJson, Error> {
    Ok(FiltrationJson {
        kind: format!("{:?}", f.kind),
        ranks: f.ranks(),
        degrees: f.degrees(),
        splitting_types: f.steps.iter().map(|s| s.splitting_type()).collect::<Result<_, _>>()?,
    })
}

fn inequality_json(i: &Inequality<Rational>) -> InequalityJson {
    InequalityJson { lhs: q(&i.lhs), rhs: q(&i.rhs), holds: i.holds }
}

fn window_json(w: &Window<Rational>) -> WindowJson {
    WindowJson { lower: q(&w.lower), value: q(&w.value), upper: q(&w.upper), holds: w.holds }
}

pub fn constraints_json(c: &ConstraintReport<Rational>) -> ConstraintsJson {
    ConstraintsJson {
        quotient_slope_window: window_json(&c.quotient_slope_window),
        image_line_bound: inequality_json(&c.image_line_bound),
        kernel_bound: inequality_json(&c.kernel_bound),
        induced_map_bound: inequality_json(&c.induced_map_bound),
        all_hold: c.all_hold(),
    }
}

pub fn matrix_json(m: &Matrix) -> MatrixJson {
    MatrixJson {
        row_twists: m.row_twists().to_vec(),
        col_twists: m.col_twists().to_vec(),
        entries: m.entries().iter().map(|row| row.iter().map(form_cell).collect()).collect(),
    }
}

pub fn limit_json(h: &HodgeBundle<Rational>) -> LimitJson {
    LimitJson {
        type_vector: h.type_vector(),
        piece_twists: h.pieces.clone(),
        piece_degrees: h.piece_degrees(),
        maps: h.maps.iter().map(matrix_json).collect(),
        stable: conelim_core::stability::is_stable_hodge(h).ok().map(|v| v.stable),
    }
}

pub fn flow_json(f: &FlowReport<Rational>) -> FlowJson {
    FlowJson { exponent_table: f.exponent_table.clone(), diverges: f.diverges, matches_prediction: f.matches_prediction }
}

/// Run every analysis that applies. The error, if any, is the first contract
/// failure met along the way (unsupported shape, boundary case, …); the
/// report still carries everything computed before it.
pub fn analyze(pair: &Pair) -> (Report, Option<Error>) {
    let mut report = Report {
        valid: true,
        rank: pair.rank(),
        degree: pair.degree(),
        l_degree: pair.l_degree(),
        coprime: pair.is_coprime(),
        hitchin_image: pair.hitchin_map().coefficients.iter().map(form_cell).collect(),
        nilpotent: false,
        nilpotency_order: None,
        stable: None,
        stability_checks: Vec::new(),
        classification: None,
        slopes: None,
        filtration: None,
        constraints: None,
        limit: None,
        flow: None,
    };
    let Ok(p) = pair.nilpotency_order() else { return (report, None) };
    report.nilpotent = true;
    report.nilpotency_order = Some(p);
    let mut error = None;
    match is_stable(pair) {
        Ok(v) => fill_stability(&mut report, &v),
        Err(e) => error = Some(e),
    }
    if pair.rank() == 3 && p == 2 {
        match check_slope_constraints(pair) {
            Ok(c) => report.constraints = Some(constraints_json(&c)),
            Err(e) => error = error.or(Some(e)),
        }
    }
    let c = match classify(pair) {
        Ok(c) => c,
        Err(e) => {
            if e == Error::BoundaryCase {
                report.classification = Some(e.name().to_string());
            }
            return (report, error.or(Some(e)));
        }
    };
    report.classification = Some(c.case.to_string());
    report.slopes = Some(slopes_json(&c.slopes));
    match filtration_json(&c.filtration) {
        Ok(f) => report.filtration = Some(f),
        Err(e) => return (report, error.or(Some(e))),
    }
    if let LimitCase::Unsupported(reason) = &c.case {
        return (report, error.or(Some(Error::Unsupported(reason.clone()))));
    }
    match limit_data(pair) {
        Ok(data) => report.limit = Some(limit_json(&data.hodge)),
        Err(e) => return (report, error.or(Some(e))),
    }
    match run_flow(pair) {
        Ok((_, _, f)) => report.flow = Some(flow_json(&f)),
        Err(e) => return (report, error.or(Some(e))),
    }
    (report, error)
}

fn fill_stability(report: &mut Report, v: &StabilityVerdict<Rational>) {
    report.stable = Some(v.stable);
    report.stability_checks = v.checks.iter().map(check_json).collect();
}

/// Pretty JSON with a trailing newline.
pub fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Two columns, keys padded to a common width.
pub fn key_value_table(rows: &[(String, String)]) -> String {
    let w = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<w$}  {v}\n")).collect()
}

/// Columns padded to their widest cell; the first row is the header.
pub fn grid(rows: &[Vec<String>]) -> String {
    let ncols = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..ncols).map(|j| rows.iter().filter_map(|r| r.get(j)).map(|c| c.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r.iter().enumerate().map(|(j, c)| format!("{c:<w$}", w = widths[j])).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), |x| x.to_string())
}

fn list<T: std::fmt::Debug>(v: &[T]) -> String {
    format!("{v:?}")
}

pub fn cell_text(cell: &Cell) -> String {
    match cell {
        None => "0".to_string(),
        Some(c) => format!("[{}]", c.join(", ")),
    }
}

pub fn render_text(r: &Report) -> String {
    let mut rows: Vec<(String, String)> = vec![
        ("rank".into(), r.rank.to_string()),
        ("degree".into(), r.degree.to_string()),
        ("l_degree".into(), r.l_degree.to_string()),
        ("coprime".into(), r.coprime.to_string()),
        ("hitchin image".into(), r.hitchin_image.iter().map(cell_text).collect::<Vec<_>>().join("; ")),
        ("nilpotent".into(), r.nilpotent.to_string()),
        ("nilpotency order".into(), opt(&r.nilpotency_order)),
        ("stable".into(), opt(&r.stable)),
        ("classification".into(), opt(&r.classification)),
    ];
    if let Some(s) = &r.slopes {
        rows.push(("slope E".into(), s.bundle.clone()));
        rows.push(("slope E_2".into(), opt(&s.e2)));
        rows.push(("slope E_3".into(), opt(&s.e3)));
        rows.push(("slope E/E_2 + E_3".into(), opt(&s.quotient)));
    }
    if let Some(f) = &r.filtration {
        rows.push(("filtration".into(), f.kind.clone()));
        rows.push(("filtration ranks".into(), list(&f.ranks)));
        rows.push(("filtration degrees".into(), list(&f.degrees)));
    }
    if let Some(c) = &r.constraints {
        let w = &c.quotient_slope_window;
        rows.push(("quotient slope window".into(), format!("{} < {} < {}: {}", w.lower, w.value, w.upper, w.holds)));
        for (name, i, op) in [
            ("image line bound", &c.image_line_bound, "<"),
            ("kernel bound", &c.kernel_bound, "<"),
            ("induced map bound", &c.induced_map_bound, ">="),
        ] {
            rows.push((name.into(), format!("{} {op} {}: {}", i.lhs, i.rhs, i.holds)));
        }
    }
    if let Some(l) = &r.limit {
        rows.push(("limit type".into(), list(&l.type_vector)));
        rows.push(("limit pieces".into(), list(&l.piece_twists)));
        rows.push(("limit piece degrees".into(), list(&l.piece_degrees)));
        for (k, m) in l.maps.iter().enumerate() {
            let entries: Vec<String> = m.entries.iter().map(|row| row.iter().map(cell_text).collect::<Vec<_>>().join(" ")).collect();
            rows.push((format!("limit map {}", k + 1), entries.join(" | ")));
        }
        rows.push(("limit stable".into(), opt(&l.stable)));
    }
    if let Some(f) = &r.flow {
        rows.push(("flow diverges".into(), f.diverges.to_string()));
        rows.push(("flow matches".into(), f.matches_prediction.to_string()));
    }
    let mut out = key_value_table(&rows);
    if !r.stability_checks.is_empty() {
        out.push('\n');
        out.push_str(&checks_table(&r.stability_checks));
    }
    out
}

pub fn checks_table(checks: &[CheckJson]) -> String {
    let mut rows = vec![["subbundle", "degree", "rank", "slope", "bound", "passes"].map(String::from).to_vec()];
    for c in checks {
        rows.push(vec![
            c.subbundle.clone(),
            c.degree.to_string(),
            c.rank.to_string(),
            c.slope.clone(),
            c.bound.clone(),
            c.passes.to_string(),
        ]);
    }
    grid(&rows)
}

pub fn exponent_grid(table: &[Vec<Option<i64>>]) -> String {
    let k = table.len();
    let mut rows = vec![std::iter::once("block".to_string()).chain((1..=k).map(|j| j.to_string())).collect::<Vec<_>>()];
    for (i, row) in table.iter().enumerate() {
        rows.push(std::iter::once((i + 1).to_string()).chain(row.iter().map(opt)).collect());
    }
    grid(&rows)
}
