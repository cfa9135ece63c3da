//! Command bodies. Each returns what to print and the exit status, so the
//! binary is a thin shell and tests can run commands in-process.

use conelim_core::flow::run_flow;
use conelim_core::limits::classify;
use conelim_core::stability::is_stable;
use conelim_core::testkit::{pointwise_nilpotency_oracle, random_pair, splitting_from_h0, GenParams, Shape};
use conelim_core::{Error, Pair};
use serde::Serialize;

use crate::instance::{emit, parse_pair, LoadError};
use crate::report::{self, analyze, check_json, exponent_grid, flow_json, grid, key_value_table, limit_json, to_json, CheckJson, FlowJson, LimitJson};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_CONTRACT: i32 = 2;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, stderr: String::new(), code: EXIT_OK }
    }

    fn contract(stdout: String, e: &Error) -> Self {
        Outcome { stdout, stderr: format!("{}: {e}\n", e.name()), code: EXIT_CONTRACT }
    }
}

fn load(text: &str) -> Result<Pair, Outcome> {
    parse_pair(text).map_err(|e| match e {
        LoadError::Input(e) => Outcome { stdout: String::new(), stderr: format!("input error: {e}\n"), code: EXIT_INPUT },
        LoadError::Model(e) => Outcome::contract(String::new(), &e),
    })
}

pub fn validate(text: &str) -> Outcome {
    match load(text) {
        Ok(p) => Outcome::ok(format!("valid: rank {}, degree {}, l_degree {}\n", p.rank(), p.degree(), p.l_degree())),
        Err(o) => o,
    }
}

pub fn analyze_cmd(text: &str, json: bool) -> Outcome {
    let pair = match load(text) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let (r, err) = analyze(&pair);
    let out = if json { to_json(&r) } else { report::render_text(&r) };
    match err {
        None => Outcome::ok(out),
        Some(e) => Outcome::contract(out, &e),
    }
}

#[derive(Serialize)]
struct FlowDoc {
    limit: LimitJson,
    flow: FlowJson,
}

pub fn flow(text: &str, json: bool) -> Outcome {
    let pair = match load(text) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let (h, _, f) = match run_flow(&pair) {
        Ok(v) => v,
        Err(e) => return Outcome::contract(String::new(), &e),
    };
    let doc = FlowDoc { limit: limit_json(&h), flow: flow_json(&f) };
    if json {
        return Outcome::ok(to_json(&doc));
    }
    let rows = vec![
        ("limit type".to_string(), format!("{:?}", doc.limit.type_vector)),
        ("limit pieces".to_string(), format!("{:?}", doc.limit.piece_twists)),
        ("diverges".to_string(), doc.flow.diverges.to_string()),
        ("matches prediction".to_string(), doc.flow.matches_prediction.to_string()),
    ];
    let mut out = key_value_table(&rows);
    out.push('\n');
    out.push_str(&exponent_grid(&doc.flow.exponent_table));
    Outcome::ok(out)
}

#[derive(Serialize)]
struct StabilityDoc {
    stable: bool,
    semistable: bool,
    bundle_slope: String,
    coprime: bool,
    checks: Vec<CheckJson>,
    witness: Option<CheckJson>,
}

pub fn stability(text: &str, json: bool) -> Outcome {
    let pair = match load(text) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let v = match is_stable(&pair) {
        Ok(v) => v,
        Err(e) => return Outcome::contract(String::new(), &e),
    };
    let doc = StabilityDoc {
        stable: v.stable,
        semistable: v.semistable,
        bundle_slope: v.bundle_slope.to_string(),
        coprime: v.coprime,
        checks: v.checks.iter().map(check_json).collect(),
        witness: v.witness.as_ref().map(check_json),
    };
    if json {
        return Outcome::ok(to_json(&doc));
    }
    let rows = vec![
        ("stable".to_string(), doc.stable.to_string()),
        ("semistable".to_string(), doc.semistable.to_string()),
        ("slope".to_string(), doc.bundle_slope.clone()),
        ("coprime".to_string(), doc.coprime.to_string()),
        ("witness".to_string(), doc.witness.as_ref().map_or("-".to_string(), |w| w.subbundle.clone())),
    ];
    let mut out = key_value_table(&rows);
    out.push('\n');
    out.push_str(&report::checks_table(&doc.checks));
    Outcome::ok(out)
}

/// Cross-check the pair against the independent oracles: pointwise
/// nilpotency, and h⁰-recovered splitting types of every filtration step.
pub fn oracle(text: &str) -> Outcome {
    let pair = match load(text) {
        Ok(p) => p,
        Err(o) => return o,
    };
    let symbolic = pair.nilpotency_order().is_ok();
    let pointwise = pointwise_nilpotency_oracle(&pair, 8, 0);
    let mut rows = vec![vec!["check".to_string(), "symbolic".to_string(), "oracle".to_string(), "agree".to_string()]];
    rows.push(vec!["nilpotent".into(), symbolic.to_string(), pointwise.to_string(), (symbolic == pointwise).to_string()]);
    let mut agree = symbolic == pointwise;
    if symbolic {
        let filt = match classify(&pair) {
            Ok(c) => Ok(c.filtration),
            Err(Error::BoundaryCase) => conelim_core::filtration::rank3_filtration(&pair),
            Err(e) => Err(e),
        };
        let filt = match filt {
            Ok(f) => f,
            Err(e) => return Outcome::contract(grid(&rows), &e),
        };
        for (k, step) in filt.steps.iter().enumerate() {
            let (a, b) = match (step.splitting_type(), splitting_from_h0(step)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return Outcome::contract(grid(&rows), &e),
            };
            agree &= a == b;
            rows.push(vec![format!("E_{} splitting", k + 1), format!("{a:?}"), format!("{b:?}"), (a == b).to_string()]);
        }
    }
    let out = grid(&rows);
    if agree {
        Outcome::ok(out)
    } else {
        Outcome::contract(out, &Error::Internal("oracle disagreement".into()))
    }
}

pub struct RandomArgs {
    pub seed: u64,
    pub rank: usize,
    pub shape: String,
    pub stable: bool,
    pub twist_min: i64,
    pub twist_max: i64,
    pub l: Option<i64>,
}

pub fn random(args: &RandomArgs) -> Outcome {
    let bad = |m: String| Outcome { stdout: String::new(), stderr: format!("input error: {m}\n"), code: EXIT_INPUT };
    let shape: Shape = match args.shape.parse() {
        Ok(s) => s,
        Err(e) => return bad(e.to_string()),
    };
    let defaults = GenParams::default();
    let params = GenParams {
        seed: args.seed,
        rank: args.rank,
        twist_range: (args.twist_min, args.twist_max),
        l_range: args.l.map_or(defaults.l_range, |l| (l, l)),
        shape,
        require_stable: args.stable,
        ..defaults
    };
    match random_pair(&params) {
        Ok(p) => Outcome::ok(emit(&p)),
        Err(e @ Error::InvalidParams(_)) => bad(e.to_string()),
        Err(e) => Outcome::contract(String::new(), &e),
    }
}
