//! Command dispatch behind the hahnlab binary and the C bindings.
//!
//! Exit codes: 0 success, 1 certified unsolvable (certificate printed),
//! 2 unknown or precision exhausted, 3 parse/config error, 4 unsupported
//! spec. Json output is canonical: sorted keys, rationals as strings.

use crate::cmap::{classify_constants, AdditiveMap, CMapError, ConstantGroup};
use crate::coeff::{CoeffField, FieldError};
use crate::dhensel::{dhensel_lift, hensel_nth_root, LiftError};
use crate::factor::FactorError;
use crate::group::{FgSubgroup, GroupElement, ValueGroup};
use crate::hahn::{DaggerSolveOutcome, FieldSpec, HahnError, Valuation};
use crate::linop::{solve_linear, SolveError};
use crate::parse::{
    eval_coeff, eval_diffpoly, eval_operator, eval_series, parse_cmap, parse_coeff_field,
    parse_group_element, parse_value_group, EvalError,
};
use crate::suite::{run_example_suite_with, ExampleReport};
use serde_json::{json, Value};
use std::collections::BTreeMap;

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNSAT: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone)]
pub struct SessionConfig {
    pub field: CoeffField,
    pub group: ValueGroup,
    pub cmap_text: String,
    pub bound_text: Option<String>,
    pub format: OutputFormat,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            field: CoeffField::Qx,
            group: ValueGroup::Z,
            cmap_text: "0".to_string(),
            bound_text: None,
            format: OutputFormat::Text,
        }
    }
}

pub struct Session {
    pub spec: FieldSpec,
    pub cmap: AdditiveMap,
    pub format: OutputFormat,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit: i32,
    pub stdout: String,
    pub stderr: String,
}

fn default_bound(group: ValueGroup) -> GroupElement {
    match group {
        ValueGroup::Z => GroupElement::int(10),
        ValueGroup::Q | ValueGroup::FracZ(_) => GroupElement::rat(10, 1),
        ValueGroup::ZnLex(n) => {
            let mut v = vec![0i64; n];
            v[0] = 10;
            GroupElement::tuple(&v)
        }
    }
}

impl SessionConfig {
    pub fn build(&self) -> Result<Session, EvalError> {
        let bound = match &self.bound_text {
            Some(t) => {
                let b = parse_group_element(t, self.group)?;
                if !b.is_positive() {
                    return Err(EvalError::Config(
                        "truncation bound must be positive".to_string(),
                    ));
                }
                b
            }
            None => default_bound(self.group),
        };
        // a provisional spec with the zero map evaluates the c-map images
        let zero = AdditiveMap::zero_map(self.group, self.field);
        let proto = FieldSpec::new(&zero, bound.clone());
        let cmap = parse_cmap(&self.cmap_text, self.group, self.field, &proto)?;
        let spec = FieldSpec::new(&cmap, bound);
        Ok(Session {
            spec,
            cmap,
            format: self.format,
        })
    }
}

// ---------------------------------------------------------------------------
// error -> exit code mapping
// ---------------------------------------------------------------------------

fn eval_error_exit(e: &EvalError) -> i32 {
    match e {
        EvalError::Parse(_) => EXIT_INVALID,
        EvalError::Hahn(h) => hahn_error_exit(h),
        EvalError::CMap(c) => cmap_error_exit(c),
        EvalError::NoXOverQ => EXIT_INVALID,
        EvalError::ExponentOutsideGroup(..) => EXIT_INVALID,
        EvalError::NotASeries | EvalError::NotACoefficient | EvalError::NotAnOperator(_) => {
            EXIT_INVALID
        }
        EvalError::DivisionByPolynomial | EvalError::NegativePolynomialPower => EXIT_INVALID,
        EvalError::Config(_) => EXIT_INVALID,
    }
}

fn hahn_error_exit(e: &HahnError) -> i32 {
    match e {
        HahnError::NeedsPrecision(_) => EXIT_UNKNOWN,
        HahnError::UnsupportedGroup(_) => EXIT_UNSUPPORTED,
        HahnError::Field(FieldError::Factor(FactorError::DegreeLimit(_))) => EXIT_UNSUPPORTED,
        HahnError::Field(FieldError::NeedsPrecision) => EXIT_UNKNOWN,
        _ => EXIT_INVALID,
    }
}

fn cmap_error_exit(e: &CMapError) -> i32 {
    match e {
        CMapError::InfinitelyGenerated => EXIT_UNSUPPORTED,
        CMapError::Factor(FactorError::DegreeLimit(_)) => EXIT_UNSUPPORTED,
        CMapError::Factor(FactorError::TooHard) => EXIT_UNSUPPORTED,
        _ => EXIT_INVALID,
    }
}

fn lift_error_outcome(e: &LiftError, format: OutputFormat) -> Outcome {
    let (exit, status) = match e {
        LiftError::LinearSurjectivityFailure { .. } => (EXIT_UNSAT, "unsolvable"),
        LiftError::NoRootInResidue => (EXIT_UNSAT, "unsolvable"),
        LiftError::NotQuasiLinear => (EXIT_UNSUPPORTED, "unsupported"),
        LiftError::UnsupportedValueGroup(_) => (EXIT_UNSUPPORTED, "unsupported"),
        LiftError::PrecisionExhausted | LiftError::IterationLimit => (EXIT_UNKNOWN, "unknown"),
        LiftError::NotConstant | LiftError::ValuationMismatch => (EXIT_INVALID, "invalid"),
        LiftError::Hahn(h) => (hahn_error_exit(h), "error"),
        LiftError::Solve(SolveError::Factor(FactorError::DegreeLimit(_))) => {
            (EXIT_UNSUPPORTED, "unsupported")
        }
        LiftError::Solve(_) => (EXIT_INVALID, "invalid"),
    };
    failure(exit, status, &e.to_string(), format)
}

fn failure(exit: i32, status: &str, message: &str, format: OutputFormat) -> Outcome {
    match format {
        OutputFormat::Json => Outcome {
            exit,
            stdout: to_json_line(&json!({"status": status, "error": message})),
            stderr: String::new(),
        },
        OutputFormat::Text => Outcome {
            exit,
            stdout: String::new(),
            stderr: format!("error: {}\n", message),
        },
    }
}

fn success_json(v: Value) -> Outcome {
    Outcome {
        exit: EXIT_OK,
        stdout: to_json_line(&v),
        stderr: String::new(),
    }
}

fn success_text(text: String) -> Outcome {
    Outcome {
        exit: EXIT_OK,
        stdout: format!("{}\n", text),
        stderr: String::new(),
    }
}

fn to_json_line(v: &Value) -> String {
    format!("{}\n", serde_json::to_string(v).expect("json values serialize"))
}

fn valuation_json(v: &Valuation) -> Value {
    match v {
        Valuation::Finite(g) => json!({"kind": "finite", "value": g.to_string()}),
        Valuation::PlusInfinity => json!({"kind": "plus_infinity"}),
        Valuation::AboveTruncation(b) => {
            json!({"kind": "above_truncation", "bound": b.to_string()})
        }
    }
}

fn report_json(r: &ExampleReport) -> Value {
    let mut m = BTreeMap::new();
    m.insert("id".to_string(), Value::String(r.id.clone()));
    m.insert("anchor".to_string(), Value::String(r.anchor.clone()));
    m.insert(
        "status".to_string(),
        Value::String(if r.passed() { "pass" } else { "fail" }.to_string()),
    );
    if let Some(w) = &r.witness {
        m.insert("witness".to_string(), Value::String(w.clone()));
    }
    if let Some(c) = &r.certificate {
        m.insert("certificate".to_string(), Value::String(c.clone()));
    }
    if let Some(s) = r.seed {
        m.insert("seed".to_string(), Value::String(s.to_string()));
    }
    Value::Object(m.into_iter().collect())
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

/// Extra per-command options.
#[derive(Debug, Clone, Default)]
pub struct CommandOptions {
    pub search_bound: Option<u64>,
    pub root_degree: Option<u32>,
    pub only: Option<String>,
    pub lift_bound: Option<String>,
}

pub fn dispatch(session: &Session, command: &str, args: &[String], opts: &CommandOptions) -> Outcome {
    let fmt = session.format;
    let need_arg = |n: usize| -> Option<Outcome> {
        if args.len() < n {
            Some(failure(
                EXIT_INVALID,
                "invalid",
                &format!("command '{}' needs {} argument(s)", command, n),
                fmt,
            ))
        } else {
            None
        }
    };
    match command {
        "eval" | "derive" | "dagger" | "valuation" | "residue" | "constant?" => {
            if let Some(o) = need_arg(1) {
                return o;
            }
            let series = match eval_series(&args[0], &session.spec) {
                Ok(s) => s,
                Err(e) => return failure(eval_error_exit(&e), "invalid", &e.to_string(), fmt),
            };
            match command {
                "eval" => {
                    let rendered = session.spec.render(&series);
                    match fmt {
                        OutputFormat::Json => {
                            success_json(json!({"status": "ok", "value": rendered}))
                        }
                        OutputFormat::Text => success_text(rendered),
                    }
                }
                "derive" => {
                    let rendered = session.spec.render(&session.spec.derive(&series));
                    match fmt {
                        OutputFormat::Json => {
                            success_json(json!({"status": "ok", "value": rendered}))
                        }
                        OutputFormat::Text => success_text(rendered),
                    }
                }
                "dagger" => match session.spec.dagger(&series) {
                    Ok(d) => {
                        let rendered = session.spec.render(&d);
                        match fmt {
                            OutputFormat::Json => {
                                success_json(json!({"status": "ok", "value": rendered}))
                            }
                            OutputFormat::Text => success_text(rendered),
                        }
                    }
                    Err(e) => failure(hahn_error_exit(&e), "error", &e.to_string(), fmt),
                },
                "valuation" => {
                    let v = session.spec.valuation(&series);
                    match fmt {
                        OutputFormat::Json => {
                            success_json(json!({"status": "ok", "valuation": valuation_json(&v)}))
                        }
                        OutputFormat::Text => success_text(v.to_string()),
                    }
                }
                "residue" => match session.spec.residue(&series) {
                    Ok(r) => match fmt {
                        OutputFormat::Json => {
                            success_json(json!({"status": "ok", "value": r.to_string()}))
                        }
                        OutputFormat::Text => success_text(r.to_string()),
                    },
                    Err(e) => failure(hahn_error_exit(&e), "error", &e.to_string(), fmt),
                },
                "constant?" => {
                    let c = session.spec.is_constant(&series);
                    match fmt {
                        OutputFormat::Json => success_json(
                            json!({"status": "ok", "constant": c.constant, "exact": c.exact}),
                        ),
                        OutputFormat::Text => success_text(format!(
                            "{}{}",
                            if c.constant { "constant" } else { "not constant" },
                            if c.exact { "" } else { " (up to truncation)" }
                        )),
                    }
                }
                _ => unreachable!(),
            }
        }
        "solve-linear" => {
            if let Some(o) = need_arg(2) {
                return o;
            }
            let op = match eval_operator(&args[0], &session.spec) {
                Ok(o) => o,
                Err(e) => return failure(eval_error_exit(&e), "invalid", &e.to_string(), fmt),
            };
            let rhs = match eval_coeff(&args[1], &session.spec) {
                Ok(r) => r,
                Err(e) => return failure(eval_error_exit(&e), "invalid", &e.to_string(), fmt),
            };
            match solve_linear(session.spec.coeff, &op, &rhs) {
                Ok(sol) => {
                    let kernel: Vec<String> = sol.kernel.iter().map(|k| k.to_string()).collect();
                    match fmt {
                        OutputFormat::Json => success_json(json!({
                            "status": "ok",
                            "particular": sol.particular.as_ref().map(|p| p.to_string()),
                            "kernel": kernel,
                        })),
                        OutputFormat::Text => success_text(format!(
                            "particular: {}; kernel: [{}]",
                            sol.particular
                                .map(|p| p.to_string())
                                .unwrap_or_else(|| "none".to_string()),
                            kernel.join(", ")
                        )),
                    }
                }
                Err(e) => failure(EXIT_INVALID, "invalid", &e.to_string(), fmt),
            }
        }
        "solve-dagger" => {
            if let Some(o) = need_arg(1) {
                return o;
            }
            let u = match eval_coeff(&args[0], &session.spec) {
                Ok(u) => u,
                Err(e) => return failure(eval_error_exit(&e), "invalid", &e.to_string(), fmt),
            };
            let k_bound = opts.search_bound.unwrap_or(50);
            match session.spec.solve_dagger(&u, k_bound) {
                Ok(DaggerSolveOutcome::Solution(a)) => {
                    let rendered = session.spec.render(&a);
                    match fmt {
                        OutputFormat::Json => {
                            success_json(json!({"status": "solution", "witness": rendered}))
                        }
                        OutputFormat::Text => success_text(format!("a = {}", rendered)),
                    }
                }
                Ok(DaggerSolveOutcome::Unsat(cert)) => match fmt {
                    OutputFormat::Json => Outcome {
                        exit: EXIT_UNSAT,
                        stdout: to_json_line(
                            &json!({"status": "unsat", "certificate": cert.to_string()}),
                        ),
                        stderr: String::new(),
                    },
                    OutputFormat::Text => Outcome {
                        exit: EXIT_UNSAT,
                        stdout: format!("unsat: {}\n", cert),
                        stderr: String::new(),
                    },
                },
                Ok(DaggerSolveOutcome::Unknown { searched }) => match fmt {
                    OutputFormat::Json => Outcome {
                        exit: EXIT_UNKNOWN,
                        stdout: to_json_line(
                            &json!({"status": "unknown", "searched": searched.to_string()}),
                        ),
                        stderr: String::new(),
                    },
                    OutputFormat::Text => Outcome {
                        exit: EXIT_UNKNOWN,
                        stdout: format!("unknown after searching {} valuations\n", searched),
                        stderr: String::new(),
                    },
                },
                Err(e) => failure(hahn_error_exit(&e), "error", &e.to_string(), fmt),
            }
        }
        "lift" => {
            if let Some(o) = need_arg(1) {
                return o;
            }
            let p = match eval_diffpoly(&args[0], &session.spec) {
                Ok(p) => p,
                Err(e) => return failure(eval_error_exit(&e), "invalid", &e.to_string(), fmt),
            };
            let bound = match &opts.lift_bound {
                Some(t) => match parse_group_element(t, session.spec.group) {
                    Ok(b) => b,
                    Err(e) => {
                        return failure(eval_error_exit(&e), "invalid", &e.to_string(), fmt)
                    }
                },
                None => session.spec.default_bound.clone(),
            };
            match dhensel_lift(&session.spec, &p, &bound) {
                Ok(res) => {
                    let trace: Vec<Value> = res
                        .steps
                        .iter()
                        .map(|s| {
                            json!({
                                "gamma": s.gamma.to_string(),
                                "operator": s.operator.render_y(),
                                "rhs": s.rhs.to_string(),
                                "solution": s.solution.to_string(),
                            })
                        })
                        .collect();
                    let rendered = session.spec.render(&res.witness);
                    match fmt {
                        OutputFormat::Json => success_json(json!({
                            "status": "ok",
                            "witness": rendered,
                            "exact": res.exact,
                            "residual_valuation": valuation_json(&res.residual_valuation),
                            "trace": trace,
                        })),
                        OutputFormat::Text => success_text(rendered),
                    }
                }
                Err(e) => lift_error_outcome(&e, fmt),
            }
        }
        "nth-root" => {
            if let Some(o) = need_arg(1) {
                return o;
            }
            let u = match eval_series(&args[0], &session.spec) {
                Ok(s) => s,
                Err(e) => return failure(eval_error_exit(&e), "invalid", &e.to_string(), fmt),
            };
            let n = opts.root_degree.unwrap_or(2);
            let bound = match &opts.lift_bound {
                Some(t) => match parse_group_element(t, session.spec.group) {
                    Ok(b) => b,
                    Err(e) => {
                        return failure(eval_error_exit(&e), "invalid", &e.to_string(), fmt)
                    }
                },
                None => session.spec.default_bound.clone(),
            };
            match hensel_nth_root(&session.spec, &u, n, &bound) {
                Ok(y) => {
                    let rendered = session.spec.render(&y);
                    match fmt {
                        OutputFormat::Json => {
                            success_json(json!({"status": "ok", "value": rendered}))
                        }
                        OutputFormat::Text => success_text(rendered),
                    }
                }
                Err(e) => lift_error_outcome(&e, fmt),
            }
        }
        "kernel" => match session.cmap.kernel() {
            Ok(k) => {
                let gens: Vec<String> = k.basis().iter().map(|g| g.to_string()).collect();
                match fmt {
                    OutputFormat::Json => {
                        success_json(json!({"status": "ok", "generators": gens}))
                    }
                    OutputFormat::Text => success_text(format!("<{}>", gens.join(", "))),
                }
            }
            Err(e) => failure(cmap_error_exit(&e), "unsupported", &e.to_string(), fmt),
        },
        "classify" => match classify_constants(&session.cmap) {
            Ok(cls) => {
                let imd = cls
                    .image_meets_dagger
                    .as_ref()
                    .map(|(g, f)| json!({"gamma": g.to_string(), "witness": f.to_string()}));
                let cw = cls
                    .constant_witness
                    .as_ref()
                    .map(|(g, d)| json!({"gamma": g.to_string(), "coefficient": d.to_string()}));
                let delta = match &cls.delta_c {
                    ConstantGroup::Whole(g) => json!({"whole": true, "group": g.name()}),
                    ConstantGroup::Sub(s) => json!({
                        "whole": s.is_whole_ambient(),
                        "generators": s.basis().iter().map(|b| b.to_string()).collect::<Vec<_>>(),
                    }),
                };
                match fmt {
                    OutputFormat::Json => success_json(json!({
                        "status": "ok",
                        "verdict": cls.verdict.name(),
                        "delta_c": delta,
                        "injective": cls.injective,
                        "image_meets_dagger": imd,
                        "constant_witness": cw,
                    })),
                    OutputFormat::Text => success_text(format!(
                        "{} (delta_C = {})",
                        cls.verdict.name(),
                        cls.delta_c.describe()
                    )),
                }
            }
            Err(e) => failure(cmap_error_exit(&e), "unsupported", &e.to_string(), fmt),
        },
        "purity" => {
            if let Some(o) = need_arg(1) {
                return o;
            }
            let mut gens = Vec::new();
            for part in split_top_level(&args[0]) {
                match parse_group_element(part.trim(), session.spec.group) {
                    Ok(g) => gens.push(g),
                    Err(e) => {
                        return failure(eval_error_exit(&e), "invalid", &e.to_string(), fmt)
                    }
                }
            }
            let sub = match FgSubgroup::new(session.spec.group, gens) {
                Ok(s) => s,
                Err(e) => return failure(EXIT_INVALID, "invalid", &e.to_string(), fmt),
            };
            let (pure, witness) = sub.is_pure();
            let wjson = witness
                .as_ref()
                .map(|(g, n)| json!({"gamma": g.to_string(), "n": n.to_string()}));
            match fmt {
                OutputFormat::Json => {
                    success_json(json!({"status": "ok", "pure": pure, "witness": wjson}))
                }
                OutputFormat::Text => success_text(match &witness {
                    None => "pure".to_string(),
                    Some((g, n)) => format!("not pure: witness gamma = {}, n = {}", g, n),
                }),
            }
        }
        "examples" => {
            if args.first().map(String::as_str) != Some("run") {
                return failure(
                    EXIT_INVALID,
                    "invalid",
                    "usage: examples run [--only ID]",
                    fmt,
                );
            }
            let scan_bound = opts
                .lift_bound
                .as_deref()
                .and_then(|t| t.parse::<i64>().ok())
                .unwrap_or(6);
            let mut reports = run_example_suite_with(scan_bound);
            if let Some(only) = &opts.only {
                reports.retain(|r| &r.id == only);
                if reports.is_empty() {
                    return failure(
                        EXIT_INVALID,
                        "invalid",
                        &format!("no example named '{}'", only),
                        fmt,
                    );
                }
            }
            let all_pass = reports.iter().all(|r| r.passed());
            let body: Vec<Value> = reports.iter().map(report_json).collect();
            let exit = if all_pass { EXIT_OK } else { EXIT_UNSAT };
            match fmt {
                OutputFormat::Json => Outcome {
                    exit,
                    stdout: to_json_line(&json!({
                        "status": if all_pass { "ok" } else { "fail" },
                        "reports": body,
                    })),
                    stderr: String::new(),
                },
                OutputFormat::Text => {
                    let mut out = String::new();
                    for r in &reports {
                        out.push_str(&format!(
                            "{}: {} [{}]\n",
                            r.id,
                            if r.passed() { "pass" } else { "FAIL" },
                            r.witness
                                .clone()
                                .or_else(|| r.certificate.clone())
                                .unwrap_or_default()
                        ));
                    }
                    Outcome {
                        exit,
                        stdout: out,
                        stderr: String::new(),
                    }
                }
            }
        }
        other => failure(
            EXIT_INVALID,
            "invalid",
            &format!("unknown command '{}'", other),
            fmt,
        ),
    }
}

/// Splits on commas that are not inside parentheses, for tuple generators.
fn split_top_level(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

// ---------------------------------------------------------------------------
// argument / config-file handling for the binary
// ---------------------------------------------------------------------------

const USAGE: &str = "usage: hahnlab [--field Q|Qx] [--group Z|Q|Z/d|Z^nlex] [--cmap SPEC]\n\
       [--bound B] [--format text|json] [--config FILE] COMMAND [ARGS]\n\
commands: eval derive dagger valuation residue constant? solve-linear\n\
          solve-dagger lift nth-root kernel classify purity 'examples run'\n";

/// Full entry point: parses flags (allowed anywhere), an optional config
/// file, the HAHNLAB_BOUND environment variable, then dispatches.
pub fn run(args: &[String], env_bound: Option<String>) -> Outcome {
    let mut flags: BTreeMap<String, String> = BTreeMap::new();
    let mut positionals: Vec<String> = Vec::new();
    let mut i = 0;
    while i < args.len() {
        let a = &args[i];
        if let Some(name) = a.strip_prefix("--") {
            match name {
                "field" | "group" | "cmap" | "bound" | "format" | "config" | "search-bound"
                | "only" | "n" => {
                    if i + 1 >= args.len() {
                        return failure(
                            EXIT_INVALID,
                            "invalid",
                            &format!("flag --{} needs a value", name),
                            OutputFormat::Text,
                        );
                    }
                    flags.insert(name.to_string(), args[i + 1].clone());
                    i += 2;
                }
                "help" => {
                    return Outcome {
                        exit: EXIT_OK,
                        stdout: USAGE.to_string(),
                        stderr: String::new(),
                    }
                }
                other => {
                    return failure(
                        EXIT_INVALID,
                        "invalid",
                        &format!("unknown flag --{}", other),
                        OutputFormat::Text,
                    )
                }
            }
        } else {
            positionals.push(a.clone());
            i += 1;
        }
    }

    // config file values fill holes; flags win
    let mut file_values: BTreeMap<String, String> = BTreeMap::new();
    if let Some(path) = flags.get("config") {
        match std::fs::read_to_string(path) {
            Ok(body) => {
                for line in body.lines() {
                    let line = line.trim();
                    if line.is_empty() || line.starts_with('#') {
                        continue;
                    }
                    if let Some((k, v)) = line.split_once('=') {
                        file_values.insert(k.trim().to_string(), v.trim().to_string());
                    } else {
                        return failure(
                            EXIT_INVALID,
                            "invalid",
                            &format!("bad config line: {}", line),
                            OutputFormat::Text,
                        );
                    }
                }
            }
            Err(e) => {
                return failure(
                    EXIT_INVALID,
                    "invalid",
                    &format!("cannot read config {}: {}", path, e),
                    OutputFormat::Text,
                )
            }
        }
    }
    let get = |key: &str| -> Option<String> {
        flags.get(key).cloned().or_else(|| file_values.get(key).cloned())
    };

    let format = match get("format").as_deref() {
        None | Some("text") => OutputFormat::Text,
        Some("json") => OutputFormat::Json,
        Some(other) => {
            return failure(
                EXIT_INVALID,
                "invalid",
                &format!("unknown format '{}'", other),
                OutputFormat::Text,
            )
        }
    };
    let field = match get("field") {
        None => CoeffField::Qx,
        Some(t) => match parse_coeff_field(&t) {
            Ok(f) => f,
            Err(e) => return failure(EXIT_INVALID, "invalid", &e.to_string(), format),
        },
    };
    let group = match get("group") {
        None => ValueGroup::Z,
        Some(t) => match parse_value_group(&t) {
            Ok(g) => g,
            Err(e) => return failure(EXIT_INVALID, "invalid", &e.to_string(), format),
        },
    };
    let config = SessionConfig {
        field,
        group,
        cmap_text: get("cmap").unwrap_or_else(|| "0".to_string()),
        bound_text: get("bound").or(env_bound),
        format,
    };
    let session = match config.build() {
        Ok(s) => s,
        Err(e) => return failure(eval_error_exit(&e), "invalid", &e.to_string(), format),
    };

    if positionals.is_empty() {
        return Outcome {
            exit: EXIT_INVALID,
            stdout: String::new(),
            stderr: USAGE.to_string(),
        };
    }
    let command = positionals[0].clone();
    let rest: Vec<String> = positionals[1..].to_vec();
    let opts = CommandOptions {
        search_bound: flags.get("search-bound").and_then(|t| t.parse().ok()),
        root_degree: flags.get("n").and_then(|t| t.parse().ok()),
        only: flags.get("only").cloned(),
        lift_bound: flags.get("bound").cloned(),
    };
    dispatch(&session, &command, &rest, &opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        let v: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        run(&v, None)
    }

    #[test]
    fn dagger_of_t_with_unit_cmap() {
        let out = run_args(&["--field", "Qx", "--group", "Z", "--cmap", "1 -> 1", "dagger", "t"]);
        assert_eq!(out.exit, EXIT_OK);
        assert_eq!(out.stdout, "1\n");
    }

    #[test]
    fn solve_dagger_unsat_exit_code() {
        let out = run_args(&[
            "--field", "Qx", "--group", "Z", "--cmap", "1 -> x", "solve-dagger", "1",
        ]);
        assert_eq!(out.exit, EXIT_UNSAT);
        assert!(out.stdout.contains("unsat"));
    }

    #[test]
    fn lift_example() {
        let out = run_args(&[
            "--field", "Qx", "--group", "Z", "--cmap", "1 -> 0", "lift", "--bound", "10",
            "Y' + Y - 1 - t",
        ]);
        assert_eq!(out.exit, EXIT_OK);
        assert_eq!(out.stdout, "1 + t\n");
    }

    #[test]
    fn parse_error_exit_code() {
        let out = run_args(&["eval", "t^"]);
        assert_eq!(out.exit, EXIT_INVALID);
    }

    #[test]
    fn unsupported_group_for_lift() {
        let out = run_args(&[
            "--group", "Z^2lex", "--bound", "(10,0)", "lift", "Y' - 1",
        ]);
        assert_eq!(out.exit, EXIT_UNSUPPORTED);
    }

    #[test]
    fn json_is_sorted_and_stable() {
        let out = run_args(&[
            "--format", "json", "--cmap", "1 -> 1", "dagger", "t",
        ]);
        assert_eq!(out.exit, EXIT_OK);
        assert_eq!(out.stdout, "{\"status\":\"ok\",\"value\":\"1\"}\n");
    }

    #[test]
    fn env_bound_override() {
        let v: Vec<String> = ["--field", "Q", "eval", "1/(1-t)"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let out = run(&v, Some("3".to_string()));
        assert_eq!(out.exit, EXIT_OK);
        assert_eq!(out.stdout, "1 + t + t^2 + O(t^3)\n");
        // an explicit flag beats the environment
        let v2: Vec<String> = ["--field", "Q", "--bound", "2", "eval", "1/(1-t)"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let out2 = run(&v2, Some("3".to_string()));
        assert_eq!(out2.stdout, "1 + t + O(t^2)\n");
    }

    #[test]
    fn config_file_flags_win() {
        let dir = std::env::temp_dir().join("hahnlab-cli-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("conf.txt");
        std::fs::write(&path, "field = Qx\ncmap = 1 -> x\nformat = json\n").unwrap();
        // flag --cmap overrides the file
        let out = run_args(&[
            "--config",
            path.to_str().unwrap(),
            "--cmap",
            "1 -> 1",
            "dagger",
            "t",
        ]);
        assert_eq!(out.exit, EXIT_OK);
        assert_eq!(out.stdout, "{\"status\":\"ok\",\"value\":\"1\"}\n");
    }
}
