use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Value as Json};

use lookahead_core::corpus;
use lookahead_core::lambda::{
    beta_eta_normalize, bridge_term, eval_term, parse_term, parse_type, Assignment, Constants, SimpleType,
    Term, Value, BRIDGE_TERMS,
};
use lookahead_core::operators::{self, build_filr_machine, build_iteration_machine};
use lookahead_core::otm::{
    check_step_count_ks, check_step_count_plain, metrics, parse_machine_text, run, BuiltinRule, Machine,
    Oracle, RunError, RunMetrics, Trace,
};
use lookahead_core::sopoly::{eval_sop, SizeFunction, Sop, UnaryPolynomial};
use lookahead_core::strings::{tuple_encode, BitString};
use lookahead_core::transforms::{
    budgeted_compose, factorize, filr_adversary_with, inline_compose, is_budget_violation,
    iteration_adversary, mtilde_oracle, run_factored, selfcomp_adversary, spt_to_mpt, FilrReading,
};

const DEFAULT_SEED: u64 = 0x5eed;
const DEFAULT_FUEL: u64 = 100_000_000;

const EXIT_USAGE: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "lookahead", version, about = "Run, factor and stress oracle machines")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a machine against an oracle and report revision metrics.
    Run(RunArgs),
    /// Split a machine into M̃ and N and check N ∘ M̃ against the original.
    Factorize(FactorArgs),
    /// Build an adversarial oracle family and report the revisions it forces.
    Adversary(AdversaryArgs),
    /// Evaluate a typed λ-term over the functional constants.
    Lambda(LambdaArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Library machine name or path to a machine text file.
    #[arg(long)]
    machine: String,
    /// Builtin oracle (empty, identity, doubling, append_one, hash:SEED) or oracle JSON file.
    #[arg(long, default_value = "empty")]
    oracle: String,
    /// Answer queries by running this machine against --oracle instead.
    #[arg(long)]
    inner: Option<String>,
    /// Input bits.
    #[arg(long, default_value = "", conflicts_with = "tuple")]
    input: String,
    /// Comma-separated components, encoded as a right-nested tuple.
    #[arg(long)]
    tuple: Option<String>,
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    fuel: u64,
    /// Check a step-count polynomial, e.g. "3n^2+6n+3".
    #[arg(long)]
    step_count: Option<UnaryPolynomial>,
    /// Check a second-order bound, e.g. "(n+1)*(l(n)+1)".
    #[arg(long)]
    sop: Option<Sop>,
    /// Run the machine under a step-count budget p; overruns halt as budget violations.
    #[arg(long, value_name = "P")]
    budget: Option<UnaryPolynomial>,
    /// Write the trace (sizes only) to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct FactorArgs {
    #[arg(long)]
    machine: String,
    /// Plain step-count of the machine.
    #[arg(long)]
    p: UnaryPolynomial,
    /// Bound on lookahead revisions.
    #[arg(long, default_value_t = 1)]
    r: usize,
    #[arg(long)]
    out_dir: PathBuf,
    /// Number of corpus cases to compare against the original machine.
    #[arg(long, default_value_t = 50)]
    cases: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    fuel: u64,
}

#[derive(Args)]
struct AdversaryArgs {
    #[command(subcommand)]
    kind: AdversaryKind,
    /// Directory for the generated oracle files.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = DEFAULT_FUEL)]
    fuel: u64,
}

#[derive(Subcommand)]
enum AdversaryKind {
    /// Iteration operator on 0^n.
    Iteration {
        #[arg(long)]
        n: u64,
        /// Step-count of the iteration machine.
        #[arg(long, default_value = "5n+5")]
        t: UnaryPolynomial,
    },
    /// zeromax ∘ selfcomp, inline and budgeted, on 0^k.
    Selfcomp {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "5n^2+20n+20")]
        outer_p: UnaryPolynomial,
        #[arg(long, default_value = "3")]
        inner_p: UnaryPolynomial,
    },
    /// The filr family ψ_0..ψ_k on 1^k.
    Filr {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "n^2+7n+6")]
        p: UnaryPolynomial,
        /// Answer a_j with 1^((p+1)^j(m)) instead of 1^((p+1)^(j-1)(m)).
        #[arg(long)]
        chained: bool,
    },
}

#[derive(Args)]
struct LambdaArgs {
    /// Bridge term name or path to a term file.
    #[arg(long)]
    term: String,
    /// Type of a free variable, NAME:TYPE (repeatable).
    #[arg(long = "free", value_name = "NAME:TYPE")]
    free: Vec<String>,
    /// Value of a free variable, NAME=VALUE (repeatable).
    #[arg(long = "bind", value_name = "NAME=VALUE")]
    bind: Vec<String>,
    /// Argument for the term's next parameter: bits, or an oracle for a function parameter.
    #[arg(long = "arg", value_name = "VALUE", allow_hyphen_values = true)]
    args: Vec<String>,
    /// Report the βη-normal form.
    #[arg(long)]
    normalize: bool,
}

struct Failure {
    code: u8,
    msg: String,
}

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_USAGE, msg: msg.to_string() }
}

fn internal(msg: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_INTERNAL, msg: msg.to_string() }
}

type Outcome = Result<(Json, u8), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let res = match cli.cmd {
        Cmd::Run(a) => cmd_run(a),
        Cmd::Factorize(a) => cmd_factorize(a),
        Cmd::Adversary(a) => cmd_adversary(a),
        Cmd::Lambda(a) => cmd_lambda(a),
    };
    match res {
        Ok((report, code)) => {
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn load_machine(spec: &str) -> Result<Machine, Failure> {
    if let Some(m) = operators::machine_by_name(spec) {
        return Ok(m);
    }
    let text = fs::read_to_string(spec)
        .map_err(|e| usage(format!("{spec}: not a library machine and not readable ({e})")))?;
    let name = Path::new(spec).file_stem().and_then(|s| s.to_str()).unwrap_or("machine");
    parse_machine_text(&text).map(|m| m.with_name(name)).map_err(|e| usage(format!("{spec}: {e}")))
}

fn load_oracle(spec: &str) -> Result<Oracle, Failure> {
    if let Some(r) = BuiltinRule::by_name(spec) {
        return Ok(Oracle::Rule(r));
    }
    if let Some(seed) = spec.strip_prefix("hash:") {
        let seed = seed.parse().map_err(|e| usage(format!("{spec}: {e}")))?;
        return Ok(corpus::hash_oracle(seed, 8));
    }
    let text = fs::read_to_string(spec)
        .map_err(|e| usage(format!("{spec}: not a builtin oracle and not readable ({e})")))?;
    let v: Json = serde_json::from_str(&text).map_err(|e| usage(format!("{spec}: {e}")))?;
    Oracle::from_json(&v).map_err(|e| usage(format!("{spec}: {e}")))
}

fn parse_bits(s: &str) -> Result<BitString, Failure> {
    s.parse().map_err(|e| usage(format!("{s:?}: {e}")))
}

/// `|φ|` where it has a closed form.
fn size_function(o: &Oracle) -> Option<Box<dyn SizeFunction + '_>> {
    let lin = |k: u32, c: u32| -> Box<dyn SizeFunction> { Box::new(move |n: &BigUint| n * k + c) };
    match o {
        Oracle::Table(t) => Some(Box::new(t.size_function())),
        Oracle::Rule(BuiltinRule::Empty) => Some(lin(0, 0)),
        Oracle::Rule(BuiltinRule::Identity) => Some(lin(1, 0)),
        Oracle::Rule(BuiltinRule::Doubling) => Some(lin(2, 0)),
        Oracle::Rule(BuiltinRule::AppendOne) => Some(lin(1, 1)),
        _ => None,
    }
}

#[derive(Serialize)]
struct RunReport {
    machine: String,
    oracle: String,
    input: BitString,
    status: &'static str,
    output: BitString,
    metrics: RunMetrics,
    #[serde(skip_serializing_if = "Option::is_none")]
    step_count: Option<Json>,
    #[serde(skip_serializing_if = "Option::is_none")]
    second_order: Option<Json>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn cmd_run(a: RunArgs) -> Outcome {
    let mut machine = load_machine(&a.machine)?;
    if let Some(p) = &a.budget {
        machine = spt_to_mpt(&machine, p, 0);
    }
    let base = load_oracle(&a.oracle)?;
    let oracle = match &a.inner {
        Some(spec) => mtilde_oracle(Arc::new(load_machine(spec)?), base.clone(), a.fuel),
        None => base.clone(),
    };
    let input = match &a.tuple {
        Some(t) => {
            let parts = t.split(',').map(parse_bits).collect::<Result<Vec<_>, _>>()?;
            tuple_encode(&parts).map_err(usage)?
        }
        None => parse_bits(&a.input)?,
    };

    let (trace, status, error) = match run(&machine, &oracle, &input, a.fuel) {
        Ok(t) if is_budget_violation(&machine, &t) => (t, "budget_violation", None),
        Ok(t) => (t, "halted", None),
        Err(e) => {
            let status = match e {
                RunError::FuelExhausted { .. } => "fuel_exhausted",
                RunError::FellOff { .. } => "fell_off",
                RunError::Oracle { .. } => "oracle_error",
            };
            (e.partial().clone(), status, Some(e.to_string()))
        }
    };
    if let Some(path) = &a.trace {
        let text = serde_json::to_string_pretty(&trace.to_file()).map_err(internal)?;
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(|e| usage(format!("{}: {e}", parent.display())))?;
        }
        fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    }
    let m = metrics(&trace);
    let step_count = a.step_count.as_ref().map(|p| {
        json!({
            "polynomial": p.to_string(),
            "plain": check_step_count_plain(&trace, p),
            "ks": check_step_count_ks(&trace, p),
        })
    });
    // the bound refers to the oracle the machine actually queries
    let second_order = a.sop.as_ref().map(|p| match size_function(&oracle) {
        Some(l) => {
            let limit = eval_sop(p, l.as_ref(), &BigUint::from(input.len()));
            json!({
                "bound": p.to_string(),
                "limit": limit.to_string(),
                "holds": BigUint::from(trace.steps) <= limit,
            })
        }
        None => json!({ "bound": p.to_string(), "limit": null, "holds": null }),
    });
    let code = match status {
        "halted" | "fuel_exhausted" => 0,
        "budget_violation" => EXIT_BUDGET,
        _ => EXIT_INTERNAL,
    };
    let report = RunReport {
        machine: machine.name().to_string(),
        oracle: oracle.descriptor(),
        input,
        status,
        output: trace.output.clone(),
        metrics: m,
        step_count,
        second_order,
        error,
    };
    Ok((serde_json::to_value(report).map_err(internal)?, code))
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<String, Failure> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok(path.display().to_string())
}

fn cmd_factorize(a: FactorArgs) -> Outcome {
    let machine = load_machine(&a.machine)?;
    let f = factorize(&machine, &a.p, a.r);
    fs::create_dir_all(&a.out_dir).map_err(|e| usage(format!("{}: {e}", a.out_dir.display())))?;
    let manifest = json!({
        "machine": machine.name(),
        "p": a.p.to_string(),
        "r": a.r,
        "tupling": "dbl-11",
        "hash_encoding": "00/01/11",
        "seed": a.seed,
    });
    let files = vec![
        write_file(&a.out_dir, "Mtilde.otm", &f.mtilde.to_text())?,
        write_file(&a.out_dir, "N.otm", &f.n.to_text())?,
        write_file(&a.out_dir, "manifest.json", &serde_json::to_string_pretty(&manifest).map_err(internal)?)?,
    ];

    let cases: Vec<(Oracle, BitString)> = if machine.name().eq_ignore_ascii_case("R") {
        corpus::rec_corpus(a.seed, a.cases, 6)
            .into_iter()
            .map(|c| (Oracle::Table(c.table().clone()), c.input()))
            .collect()
    } else {
        corpus::unary_corpus(a.seed, a.cases, 8)
            .into_iter()
            .map(|c| (Oracle::Table(c.table().clone()), c.a.clone()))
            .collect()
    };
    let mut mismatches = Vec::new();
    for (i, (o, x)) in cases.iter().enumerate() {
        let direct = run(&machine, o, x, a.fuel).map_err(internal)?;
        let (outer, _) = run_factored(&f, o, x, a.fuel).map_err(internal)?;
        if outer.output != direct.output {
            mismatches.push(json!({ "case": i, "input": x, "expected": direct.output, "got": outer.output }));
        }
    }
    let passed = mismatches.is_empty();
    let report = json!({
        "machine": machine.name(),
        "manifest": manifest,
        "files": files,
        "check": {
            "cases": cases.len(),
            "status": if passed { "passed" } else { "failed" },
            "mismatches": mismatches,
        },
    });
    Ok((report, if passed { 0 } else { EXIT_INTERNAL }))
}

fn save_oracle(dir: Option<&Path>, name: &str, o: &Oracle) -> Result<Option<String>, Failure> {
    let Some(dir) = dir else { return Ok(None) };
    fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    let v = o.to_json().ok_or_else(|| internal("oracle is not serializable"))?;
    let text = serde_json::to_string_pretty(&v).map_err(internal)?;
    write_file(dir, name, &text).map(Some)
}

fn revisions(t: &Trace) -> usize {
    metrics(t).lookahead_revisions
}

fn cmd_adversary(a: AdversaryArgs) -> Outcome {
    let dir = a.out_dir.as_deref();
    let report = match a.kind {
        AdversaryKind::Iteration { n, t } => {
            let o = iteration_adversary(&t, n);
            let input = BitString::zeros(n as usize);
            let tr = run(&build_iteration_machine(), &o, &input, a.fuel).map_err(internal)?;
            json!({
                "adversary": "iteration",
                "n": n,
                "t": t.to_string(),
                "oracle_file": save_oracle(dir, &format!("iteration_n{n}.json"), &o)?,
                "input": input,
                "lookahead_revisions": revisions(&tr),
                "steps": tr.steps,
            })
        }
        AdversaryKind::Selfcomp { k, outer_p, inner_p } => {
            let zm = operators::build_zeromax_machine();
            let sc = operators::build_selfcomp_machine();
            let o = selfcomp_adversary(k);
            let input = BitString::zeros(k);
            let x = run(&inline_compose(&zm, &sc), &o, &input, a.fuel).map_err(internal)?;
            let y =
                run(&budgeted_compose(&zm, &outer_p, &sc, &inner_p), &o, &input, a.fuel).map_err(internal)?;
            json!({
                "adversary": "selfcomp",
                "k": k,
                "oracle_file": save_oracle(dir, &format!("selfcomp_k{k}.json"), &o)?,
                "input": input,
                "inline": { "output": x.output, "lookahead_revisions": revisions(&x), "steps": x.steps },
                "budgeted": { "output": y.output, "lookahead_revisions": revisions(&y), "steps": y.steps },
                "outputs_agree": x.output == y.output,
            })
        }
        AdversaryKind::Filr { k, p, chained } => {
            let reading = if chained { FilrReading::Chained } else { FilrReading::Literal };
            let filr = build_filr_machine();
            let adv = filr_adversary_with(&filr, &p, k, a.fuel, reading).map_err(internal)?;
            let input = BitString::ones(k);
            let mut members = Vec::new();
            for (i, o) in adv.oracles.iter().enumerate() {
                let tr = run(&filr, o, &input, a.fuel).map_err(internal)?;
                members.push(json!({
                    "index": i,
                    "oracle_file": save_oracle(dir, &format!("psi_{i}.json"), o)?,
                    "lookahead_revisions": revisions(&tr),
                    "steps": tr.steps,
                }));
            }
            json!({
                "adversary": "filr",
                "k": k,
                "p": p.to_string(),
                "reading": if chained { "chained" } else { "literal" },
                "m": adv.m,
                "strings": adv.strings,
                "lengths": adv.lengths.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
                "members": members,
            })
        }
    };
    Ok((report, 0))
}

/// A value for a parameter of type `ty`: bits for ground types, an oracle for
/// `0→0` and a paired oracle for `0→0→0`.
fn lambda_value(spec: &str, ty: &SimpleType) -> Result<Value, Failure> {
    if ty.is_ground() {
        return Ok(Value::Str(parse_bits(spec)?));
    }
    let o = load_oracle(spec)?;
    if *ty == SimpleType::first_order(1) {
        Ok(Value::oracle(o))
    } else if *ty == SimpleType::first_order(2) {
        Ok(Value::paired_oracle(o))
    } else {
        Err(usage(format!("cannot supply a value of type {ty} from the command line")))
    }
}

fn load_term(spec: &str, free: &BTreeMap<String, SimpleType>) -> Result<Term, Failure> {
    if BRIDGE_TERMS.contains(&spec) {
        return bridge_term(spec).map_err(internal);
    }
    let src = fs::read_to_string(spec).map_err(|e| {
        usage(format!("{spec}: not a bridge term ({}) and not readable ({e})", BRIDGE_TERMS.join(", ")))
    })?;
    parse_term(&src, Constants::library(), free).map_err(|e| usage(format!("{spec}: {e}")))
}

fn cmd_lambda(a: LambdaArgs) -> Outcome {
    let mut free = BTreeMap::new();
    for f in &a.free {
        let (x, ty) = f.split_once(':').ok_or_else(|| usage(format!("--free {f}: expected NAME:TYPE")))?;
        free.insert(x.trim().to_string(), parse_type(ty).map_err(|e| usage(format!("--free {f}: {e}")))?);
    }
    let term = load_term(&a.term, &free)?;
    let ty = term.type_of().map_err(usage)?;

    let mut env = Assignment::new();
    for b in &a.bind {
        let (x, v) = b.split_once('=').ok_or_else(|| usage(format!("--bind {b}: expected NAME=VALUE")))?;
        let Some(xty) = term.free_vars().get(x).cloned() else {
            return Err(usage(format!("--bind {b}: {x} is not free in the term")));
        };
        env.bind(x, xty.clone(), lambda_value(v, &xty)?).map_err(usage)?;
    }

    let params = ty.args();
    if a.args.len() > params.len() {
        return Err(usage(format!("{} arguments given, the term takes {}", a.args.len(), params.len())));
    }
    let mut value = eval_term(&term, &env).map_err(usage)?;
    for (spec, pty) in a.args.iter().zip(&params) {
        value = value.apply(lambda_value(spec, pty)?).map_err(usage)?;
    }
    let result = match &value {
        Value::Str(s) => json!(s),
        Value::Fun(_) => Json::Null,
    };
    let mut report = json!({
        "term": term.to_string(),
        "type": ty.to_string(),
        "applied": a.args.len(),
        "value": result,
    });
    if a.normalize {
        report["normal_form"] = json!(beta_eta_normalize(&term).to_string());
    }
    Ok((report, 0))
}
