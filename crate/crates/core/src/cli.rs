//! The `schauder` command line: one JSON document in, one JSON report out.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::basis::{BasisDescriptor, BasisFamily};
use crate::compactness::{analyze_set, SetDescriptor};
use crate::config::CheckConfig;
use crate::convergence::{analyze, Decider};
use crate::element::{SeqElement, Slack};
use crate::error::Error;
use crate::family::{Family, Generator};
use crate::opnorm::{estimate_operator_norm, Operator};
use crate::space::SpaceKind;
use crate::tail::TailModel;

pub const EXIT_POSITIVE: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

const DEFAULT_TRIALS: usize = 1000;

#[derive(Debug, Parser)]
#[command(name = "schauder", version, about = "Certified convergence and precompactness checks in sequence spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Comma-separated, strictly descending tolerances.
    #[arg(long, global = true, value_delimiter = ',')]
    pub eps_grid: Option<Vec<f64>>,

    /// Largest coordinate index examined.
    #[arg(long, global = true)]
    pub k_max: Option<usize>,

    /// Smallest coordinate gap reported as a failure.
    #[arg(long, global = true)]
    pub delta: Option<f64>,

    /// Additive slack on upper bounds.
    #[arg(long, global = true)]
    pub slack: Option<f64>,

    /// Seed for sampled operator-norm estimates.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Report file (fixture directory for `fixtures`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Decide whether a family converges to a candidate.
    CheckConvergence { input: PathBuf },
    /// Decide whether a described set is precompact.
    CheckCompactness { input: PathBuf },
    /// Basis coordinates, partial sums and operator-norm estimates.
    Expand { input: PathBuf },
    /// Norm, tail norms and Y-norm of an element.
    Norms { input: PathBuf },
    /// Write the canonical fixtures.
    Fixtures,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckConvergence { .. } => "check-convergence",
            Command::CheckCompactness { .. } => "check-compactness",
            Command::Expand { .. } => "expand",
            Command::Norms { .. } => "norms",
            Command::Fixtures => "fixtures",
        }
    }

    fn input(&self) -> Option<&Path> {
        match self {
            Command::CheckConvergence { input }
            | Command::CheckCompactness { input }
            | Command::Expand { input }
            | Command::Norms { input } => Some(input),
            Command::Fixtures => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub check: CheckConfig,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Cli {
    pub fn run_config(&self) -> RunConfig {
        let defaults = CheckConfig::default();
        let check = CheckConfig {
            eps_grid: self.eps_grid.clone().unwrap_or(defaults.eps_grid),
            k_max: self.k_max.unwrap_or(defaults.k_max),
            delta: self.delta.unwrap_or(defaults.delta),
            slack: match self.slack {
                Some(v) => Slack::new(v).unwrap_or(Slack::DEFAULT),
                None => defaults.slack,
            },
        };
        RunConfig {
            command: self.command.clone(),
            check,
            seed: self.seed,
            out: self.out.clone(),
        }
    }
}

/// A failure that maps to exit status 3.
#[derive(Debug)]
struct InputError {
    kind: &'static str,
    message: String,
    path: Option<String>,
}

impl InputError {
    fn to_json(&self) -> Value {
        let mut v = json!({ "kind": self.kind, "message": self.message });
        if let Some(p) = &self.path {
            v["path"] = json!(p);
        }
        v
    }
}

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        let kind = match e {
            Error::SpaceMismatch { .. } => "space_mismatch",
            Error::Undetermined { .. } => "undetermined",
            _ => "validation",
        };
        InputError {
            kind,
            message: e.to_string(),
            path: None,
        }
    }
}

fn read_document(path: &Path) -> Result<Value, InputError> {
    let text = fs::read_to_string(path).map_err(|e| InputError {
        kind: "io",
        message: format!("{}: {e}", path.display()),
        path: None,
    })?;
    serde_json::from_str(&text).map_err(|e| InputError {
        kind: "parse",
        message: e.to_string(),
        path: None,
    })
}

fn typed<T: DeserializeOwned>(value: Value) -> Result<T, InputError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        InputError {
            kind: "schema",
            message: e.into_inner().to_string(),
            path: Some(path),
        }
    })
}

/// Splits off the optional `"expected"` field.
fn take_expected(doc: &mut Value) -> Option<String> {
    doc.as_object_mut()?
        .remove("expected")
        .and_then(|v| v.as_str().map(str::to_string))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DeciderChoice {
    #[default]
    General,
    Auto,
    Lp,
    C0,
    Hilbert,
    C,
}

impl DeciderChoice {
    fn resolve(self, space: SpaceKind) -> Decider {
        match self {
            DeciderChoice::General => Decider::General,
            DeciderChoice::Auto => Decider::for_space(space),
            DeciderChoice::Lp => Decider::Lp,
            DeciderChoice::C0 => Decider::C0,
            DeciderChoice::Hilbert => Decider::Hilbert,
            DeciderChoice::C => Decider::C,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceInput {
    pub family: Family,
    /// Defaults to the zero element of the family's space.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate: Option<SeqElement>,
    #[serde(default)]
    pub decider: DeciderChoice,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExpandInput {
    element: SeqElement,
    #[serde(default)]
    basis: Option<BasisFamily>,
    #[serde(default)]
    k: Option<usize>,
    #[serde(default)]
    trials: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct NormsInput {
    element: SeqElement,
    #[serde(default)]
    basis: Option<BasisFamily>,
}

fn basis_for(space: SpaceKind, family: Option<BasisFamily>) -> Result<BasisDescriptor, InputError> {
    Ok(match family {
        Some(f) => BasisDescriptor::new(space, f)?,
        None => BasisDescriptor::standard(space),
    })
}

struct Outcome {
    code: i32,
    body: Value,
}

fn check_convergence(mut doc: Value, config: &RunConfig) -> Result<Outcome, InputError> {
    let expected = take_expected(&mut doc);
    let input: ConvergenceInput = typed(doc)?;
    let space = input.family.space();
    let candidate = input.candidate.unwrap_or_else(|| SeqElement::zero(space));
    let decider = input.decider.resolve(space);
    let report = analyze(decider, &input.family, &candidate, &config.check)?;
    let code = match report.verdict.tag() {
        "converges" => EXIT_POSITIVE,
        "diverges" => EXIT_NEGATIVE,
        _ => EXIT_INCONCLUSIVE,
    };
    let mut body = serde_json::to_value(&report).expect("reports serialize");
    with_expected(&mut body, expected, report.verdict.tag());
    Ok(Outcome { code, body })
}

fn check_compactness(mut doc: Value, config: &RunConfig) -> Result<Outcome, InputError> {
    let expected = take_expected(&mut doc);
    let set: SetDescriptor = typed(doc)?;
    let report = analyze_set(&set, &config.check)?;
    let code = match report.verdict.tag() {
        "precompact" => EXIT_POSITIVE,
        "not_precompact" => EXIT_NEGATIVE,
        _ => EXIT_INCONCLUSIVE,
    };
    let mut body = serde_json::to_value(&report).expect("reports serialize");
    body["closedness"] = json!("not decided; precompactness only");
    with_expected(&mut body, expected, report.verdict.tag());
    Ok(Outcome { code, body })
}

fn with_expected(body: &mut Value, expected: Option<String>, tag: &str) {
    if let Some(e) = expected {
        body["matches_expected"] = json!(e == tag);
        body["expected"] = json!(e);
    }
}

fn expand(doc: Value, config: &RunConfig) -> Result<Outcome, InputError> {
    let input: ExpandInput = typed(doc)?;
    let x = input.element;
    let slack = config.check.slack;
    let basis = basis_for(x.space(), input.basis)?;
    let k = input.k.unwrap_or(x.prefix_len());
    let trials = input.trials.unwrap_or(DEFAULT_TRIALS);
    let s = basis.apply_s(&x, k)?;
    let r = basis.apply_r(&x, k)?;
    let mut estimates = serde_json::Map::new();
    for (name, op, bound) in [
        ("partial_sum", Operator::PartialSum(k), 1.0),
        ("remainder", Operator::Remainder(k), 2.0),
    ] {
        let est = estimate_operator_norm(op, &basis, trials, config.seed, slack)?;
        estimates.insert(name.to_string(), json!({ "estimate": est, "bound": bound }));
    }
    let mut body = json!({
        "basis": basis.family(),
        "k": k,
        "first_index": x.space().first_coordinate(),
        "partial_sum": s,
        "remainder": r,
        "norms": {
            "element": x.norm_bounds(slack),
            "partial_sum": s.norm_bounds(slack),
            "remainder": r.norm_bounds(slack),
        },
        "operator_norm_estimates": {
            "trials": trials,
            "seed": config.seed,
            "basis_constant": basis.constant().0,
            "operators": estimates,
        },
    });
    let code = match basis.expand(&x, k, slack) {
        Ok(coords) => {
            body["coordinates"] = json!(coords);
            EXIT_POSITIVE
        }
        Err(e @ Error::Undetermined { .. }) => {
            body["coordinates"] = Value::Null;
            body["undetermined"] = json!(e.to_string());
            EXIT_INCONCLUSIVE
        }
        Err(e) => return Err(e.into()),
    };
    Ok(Outcome { code, body })
}

fn norms(mut doc: Value, config: &RunConfig) -> Result<Outcome, InputError> {
    // a bare element is accepted as well as {"element": ...}
    if doc.get("element").is_none() {
        doc = json!({ "element": doc });
    }
    let input: NormsInput = typed(doc)?;
    let x = input.element;
    let slack = config.check.slack;
    let basis = basis_for(x.space(), input.basis)?;
    let n = x.prefix_len().max(1);
    let tails: Vec<Value> = (0..=config.check.k_max)
        .map(|k| {
            let t = x.tail_norm_bounds(k, slack);
            json!({ "k": k, "lo": t.lo, "hi": t.hi })
        })
        .collect();
    let body = json!({
        "space": x.space().to_string(),
        "norm": x.norm_bounds(slack),
        "tails": tails,
        "y_norm": { "n": n, "bounds": basis.y_norm(&x, n, slack)? },
    });
    Ok(Outcome {
        code: EXIT_POSITIVE,
        body,
    })
}

/// A canonical input document with its documented verdict.
pub struct Fixture {
    pub name: &'static str,
    pub command: &'static str,
    pub document: Value,
}

fn convergence_fixture(name: &'static str, family: Family, candidate: SeqElement, decider: DeciderChoice, expected: &str) -> Fixture {
    let input = ConvergenceInput {
        family,
        candidate: Some(candidate),
        decider,
    };
    let mut document = serde_json::to_value(input).expect("fixtures serialize");
    document["expected"] = json!(expected);
    Fixture {
        name,
        command: "check-convergence",
        document,
    }
}

fn set_fixture(name: &'static str, set: SetDescriptor, expected: &str) -> Fixture {
    let mut document = serde_json::to_value(set).expect("fixtures serialize");
    document["expected"] = json!(expected);
    Fixture {
        name,
        command: "check-compactness",
        document,
    }
}

pub fn fixtures() -> Vec<Fixture> {
    let l2 = SpaceKind::Lp { p: 2.0 };
    let zero = SeqElement::zero(l2);
    let v = SeqElement::new(l2, vec![1.0, -0.5], None, TailModel::Geometric { c: 0.5, r: 0.5 })
        .expect("valid fixture element");
    let family = |g| Family::parametric(l2, g).expect("valid fixture family");
    vec![
        convergence_fixture(
            "constant",
            family(Generator::Constant(v.clone())),
            v,
            DeciderChoice::General,
            "converges",
        ),
        convergence_fixture(
            "basis_shift",
            family(Generator::BasisShift { scale: 1.0 }),
            zero.clone(),
            DeciderChoice::General,
            "diverges",
        ),
        convergence_fixture(
            "alternating",
            family(Generator::Alternating(SeqElement::unit(l2, 1))),
            zero.clone(),
            DeciderChoice::General,
            "diverges",
        ),
        convergence_fixture(
            "geometric_ramp",
            family(Generator::GeometricRamp {
                a: 0.5,
                scale: 1.0,
                limit: 0.0,
            }),
            zero,
            DeciderChoice::General,
            "converges",
        ),
        convergence_fixture(
            "plateau_shift",
            Family::parametric(SpaceKind::C, Generator::PlateauShift).expect("valid fixture family"),
            SeqElement::zero(SpaceKind::C),
            DeciderChoice::C,
            "diverges",
        ),
        set_fixture(
            "hilbert_cube",
            SetDescriptor::hilbert_cube(l2, TailModel::Geometric { c: 1.0, r: 0.5 }).expect("valid fixture set"),
            "precompact",
        ),
        set_fixture(
            "basis_vectors",
            SetDescriptor::basis_vectors(l2, 1.0).expect("valid fixture set"),
            "not_precompact",
        ),
        set_fixture("ball", SetDescriptor::ball(l2, 1.0).expect("valid fixture set"), "not_precompact"),
        set_fixture(
            "finite_set",
            SetDescriptor::finite(
                l2,
                vec![
                    SeqElement::unit(l2, 1),
                    SeqElement::unit(l2, 2).scaled(2.0),
                    SeqElement::new(l2, vec![0.5], None, TailModel::Power { c: 1.0, s: 1.0 }).expect("valid"),
                ],
            )
            .expect("valid fixture set"),
            "precompact",
        ),
    ]
}

fn write_fixtures(dir: &Path) -> Result<Outcome, InputError> {
    let io = |e: std::io::Error| InputError {
        kind: "io",
        message: format!("{}: {e}", dir.display()),
        path: None,
    };
    fs::create_dir_all(dir).map_err(io)?;
    let mut written = Vec::new();
    for f in fixtures() {
        let file = dir.join(format!("{}.json", f.name));
        let text = serde_json::to_string_pretty(&f.document).expect("fixtures serialize");
        fs::write(&file, text + "\n").map_err(io)?;
        written.push(json!({
            "file": file.display().to_string(),
            "checker": f.command,
            "expected": f.document["expected"],
        }));
    }
    Ok(Outcome {
        code: EXIT_POSITIVE,
        body: json!({ "written": written }),
    })
}

fn dispatch(config: &RunConfig) -> Result<Outcome, InputError> {
    config.check.validate()?;
    if let Command::Fixtures = config.command {
        let dir = config.out.clone().unwrap_or_else(|| PathBuf::from("fixtures"));
        return write_fixtures(&dir);
    }
    let path = config.command.input().expect("non-fixture commands take an input");
    let doc = read_document(path)?;
    match config.command {
        Command::CheckConvergence { .. } => check_convergence(doc, config),
        Command::CheckCompactness { .. } => check_compactness(doc, config),
        Command::Expand { .. } => expand(doc, config),
        Command::Norms { .. } => norms(doc, config),
        Command::Fixtures => unreachable!(),
    }
}

/// Runs one command: exit status plus the JSON report.
pub fn run(config: &RunConfig) -> (i32, Value) {
    let (code, body) = match dispatch(config) {
        Ok(o) => (o.code, o.body),
        Err(e) => (EXIT_INPUT, json!({ "error": e.to_json() })),
    };
    let mut report = json!({
        "tool": "schauder",
        "version": env!("CARGO_PKG_VERSION"),
        "command": config.command.name(),
        "config": {
            "eps_grid": config.check.eps_grid,
            "k_max": config.check.k_max,
            "delta": config.check.delta,
            "slack": config.check.slack,
            "seed": config.seed,
        },
        "exit_code": code,
    });
    if let Some(input) = config.command.input() {
        report["input"] = json!(input.display().to_string());
    }
    if let (Value::Object(r), Value::Object(b)) = (&mut report, body) {
        r.extend(b);
    }
    (code, report)
}

/// Parses arguments, runs, and prints (or writes) the report.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_POSITIVE };
            let _ = e.print();
            return code;
        }
    };
    if let Some(s) = cli.slack {
        if let Err(e) = Slack::new(s) {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    }
    let config = cli.run_config();
    let (code, report) = run(&config);
    let text = serde_json::to_string_pretty(&report).expect("reports serialize") + "\n";
    match (&config.command, &config.out) {
        (Command::Fixtures, _) | (_, None) => print!("{text}"),
        (_, Some(path)) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: {}: {e}", path.display());
                return EXIT_INPUT;
            }
        }
    }
    code
}
