//! `mpcc`: check, lower, optimize, estimate, run and emit circuits.
//!
//! Exit codes: 0 success, 1 program or usage error, 2 I/O error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use mpcc_core::backends::{
    emit_gatelist, interpret_clear, outputs_to_json, simulate_shared_with, InputValues,
};
use mpcc_core::estimator::{estimate_at_model_level, rank_backends, CostModel};
use mpcc_core::frontend::parse_source;
use mpcc_core::hir::{validate, Circuit, Level};
use mpcc_core::lowering::{bitblast, lower_program, LowerConfig, TargetLevel};
use mpcc_core::optimizer::{optimize, Pass, PassList};
use mpcc_core::typecheck::{check_program, Scheme, TypedProgram};

#[derive(Parser)]
#[command(
    name = "mpcc",
    version,
    about = "Compile ownership-annotated programs to secure-computation circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Type-check a program.
    Check(Opts),
    /// Lower a program to circuit JSON without optimizing.
    Lower(Opts),
    /// Optimize a program or circuit JSON.
    Opt(Opts),
    /// Price a program or circuit under one or more cost models.
    Estimate(Opts),
    /// Execute on a backend.
    Run(Opts),
    /// Write the boolean gate list (needs `--level bool`).
    Emit(Opts),
}

#[derive(Args)]
struct Opts {
    /// Source program, or circuit JSON for opt/estimate/run/emit.
    source: PathBuf,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    #[arg(long)]
    bitwidth: Option<u32>,
    #[arg(long, value_enum)]
    level: Option<LevelArg>,
    /// Comma-separated pass names.
    #[arg(long, conflicts_with = "no_opt")]
    passes: Option<String>,
    #[arg(long)]
    no_opt: bool,
    /// Model JSON path or builtin name (arith, secret-sharing, boolean).
    #[arg(long = "cost-model")]
    cost_models: Vec<String>,
    /// Resource to rank models by.
    #[arg(long)]
    objective: Option<String>,
    #[arg(long)]
    inputs: Option<PathBuf>,
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    /// Number of share-holding parties.
    #[arg(short = 'n')]
    parties: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(short = 'o')]
    output: Option<PathBuf>,
    /// JSON file of defaults; flags take precedence.
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum SchemeArg {
    Generic,
    Tfhe,
    Additive,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum LevelArg {
    Arith,
    Bool,
}

#[derive(Clone, Copy, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum BackendArg {
    Clear,
    Shares,
}

/// Contents of `--spec`.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    scheme: Option<SchemeArg>,
    bitwidth: Option<u32>,
    level: Option<LevelArg>,
    passes: Option<String>,
    no_opt: Option<bool>,
    #[serde(default)]
    cost_models: Vec<String>,
    objective: Option<String>,
    backend: Option<BackendArg>,
    parties: Option<usize>,
    seed: Option<u64>,
}

/// Flags merged over the spec file over defaults.
struct Config {
    scheme: Scheme,
    bitwidth: u32,
    level: LevelArg,
    passes: PassList,
    models: Vec<CostModel>,
    objective: Option<String>,
    backend: BackendArg,
    parties: usize,
    seed: u64,
}

enum Failure {
    /// Bad program, bad flags, or a failing pipeline stage.
    User(Vec<String>),
    /// Unreadable or unwritable files.
    Env(String),
}

impl Failure {
    fn user(msg: impl Into<String>) -> Failure {
        Failure::User(vec![msg.into()])
    }
}

type Res<T> = Result<T, Failure>;

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| Failure::Env(format!("{}: {e}", path.display())))
}

fn load_model(arg: &str) -> Res<CostModel> {
    let path = Path::new(arg);
    if path.exists() {
        return CostModel::from_json(&read(path)?)
            .map_err(|e| Failure::user(format!("cost model {arg}: {e}")));
    }
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or(arg);
    CostModel::builtin(name)
        .ok_or_else(|| Failure::Env(format!("{arg}: no such file or builtin cost model")))
}

fn config(o: &Opts) -> Res<Config> {
    let spec: SpecFile = match &o.spec {
        Some(p) => serde_json::from_str(&read(p)?)
            .map_err(|e| Failure::user(format!("spec {}: {e}", p.display())))?,
        None => SpecFile::default(),
    };
    let parties = o.parties.or(spec.parties).unwrap_or(3);
    let scheme = match o.scheme.or(spec.scheme).unwrap_or(SchemeArg::Generic) {
        SchemeArg::Generic => Scheme::Generic,
        SchemeArg::Tfhe => Scheme::Tfhe,
        SchemeArg::Additive => Scheme::AdditiveShare(parties as u32),
    };
    let no_opt = o.no_opt || (o.passes.is_none() && spec.no_opt.unwrap_or(false));
    let passes = match o.passes.clone().or(spec.passes) {
        _ if no_opt => PassList::none(),
        Some(list) => list
            .parse()
            .map_err(|e| Failure::user(format!("--passes: {e}")))?,
        None => PassList::default(),
    };
    let model_args = if o.cost_models.is_empty() {
        spec.cost_models
    } else {
        o.cost_models.clone()
    };
    let models = model_args
        .iter()
        .map(|m| load_model(m))
        .collect::<Res<Vec<_>>>()?;
    Ok(Config {
        scheme,
        bitwidth: o.bitwidth.or(spec.bitwidth).unwrap_or(64),
        level: o.level.or(spec.level).unwrap_or(LevelArg::Arith),
        passes,
        models,
        objective: o.objective.clone().or(spec.objective),
        backend: o.backend.or(spec.backend).unwrap_or(BackendArg::Clear),
        parties,
        seed: o.seed.or(spec.seed).unwrap_or(0),
    })
}

/// Diagnostics read `file:line:col: error[rule]: message`.
fn typecheck(path: &Path, src: &str, scheme: Scheme) -> Res<TypedProgram> {
    let file = path.display();
    let program = parse_source(src).map_err(|e| Failure::user(format!("{file}:{e}")))?;
    check_program(&program, scheme)
        .map_err(|errs| Failure::User(errs.iter().map(|e| format!("{file}:{e}")).collect()))
}

fn lower(path: &Path, src: &str, cfg: &Config, level: TargetLevel) -> Res<Circuit> {
    let tp = typecheck(path, src, cfg.scheme)?;
    let lc = LowerConfig {
        bitwidth: cfg.bitwidth,
        target_level: level,
        scheme: cfg.scheme,
        pow_by_squaring: cfg.passes.contains(Pass::PowRewrite),
        ..LowerConfig::default()
    };
    lower_program(&tp, &lc).map_err(|e| Failure::user(format!("lower: {e}")))
}

fn is_circuit_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

/// The model `cmp_rewrite` consults: the first Arith-level model given.
fn rewrite_model(cfg: &Config) -> CostModel {
    cfg.models
        .iter()
        .find(|m| m.level == Level::Arith)
        .cloned()
        .unwrap_or_else(CostModel::default_secret_sharing)
}

/// Source or circuit JSON, optimized at the Arith level, then bit-blasted
/// for a Bool target.
fn compile(path: &Path, cfg: &Config) -> Res<Circuit> {
    let text = read(path)?;
    let c = if is_circuit_json(&text) {
        let c = Circuit::from_json(&text).map_err(|e| Failure::user(format!("circuit: {e}")))?;
        if let Err(v) = validate(&c) {
            return Err(Failure::User(
                v.iter().map(|v| format!("circuit: {v}")).collect(),
            ));
        }
        c
    } else {
        lower(path, &text, cfg, TargetLevel::Arith)?
    };
    let c = optimize(&c, &cfg.passes, &rewrite_model(cfg));
    match (cfg.level, c.level) {
        (LevelArg::Bool, Level::Arith) => {
            bitblast(&c).map_err(|e| Failure::user(format!("bitblast: {e}")))
        }
        _ => Ok(c),
    }
}

fn estimate_json(c: &Circuit, cfg: &Config) -> Res<String> {
    let models = if cfg.models.is_empty() {
        vec![CostModel::default_secret_sharing()]
    } else {
        cfg.models.clone()
    };
    let fail = |e: mpcc_core::estimator::EstimateError| Failure::user(format!("estimate: {e}"));
    let reports = models
        .iter()
        .map(|m| estimate_at_model_level(c, m).map_err(fail))
        .collect::<Res<Vec<_>>>()?;
    if reports.len() == 1 && cfg.objective.is_none() {
        return Ok(reports[0].to_json());
    }
    let mut out = serde_json::json!({ "reports": reports });
    if let Some(obj) = &cfg.objective {
        let ranking = rank_backends(c, &models, obj).map_err(fail)?;
        let ranking: Vec<_> = ranking
            .iter()
            .map(|(name, cost)| serde_json::json!({ "model": name, obj.as_str(): cost }))
            .collect();
        out["ranking"] = serde_json::Value::from(ranking);
    }
    Ok(serde_json::to_string_pretty(&out).expect("JSON values serialize"))
}

fn run(cmd: Command) -> Res<String> {
    match cmd {
        Command::Check(o) => {
            let cfg = config(&o)?;
            typecheck(&o.source, &read(&o.source)?, cfg.scheme)?;
            Ok(String::new())
        }
        Command::Lower(o) => {
            let cfg = config(&o)?;
            let level = if cfg.level == LevelArg::Bool {
                TargetLevel::Bool
            } else {
                TargetLevel::Arith
            };
            Ok(lower(&o.source, &read(&o.source)?, &cfg, level)?.to_json())
        }
        Command::Opt(o) => {
            let cfg = config(&o)?;
            Ok(compile(&o.source, &cfg)?.to_json())
        }
        Command::Estimate(o) => {
            let cfg = config(&o)?;
            estimate_json(&compile(&o.source, &cfg)?, &cfg)
        }
        Command::Run(o) => {
            let cfg = config(&o)?;
            let c = compile(&o.source, &cfg)?;
            let inputs = match &o.inputs {
                Some(p) => {
                    InputValues::from_json(&read(p)?).map_err(|e| Failure::user(e.to_string()))?
                }
                None => InputValues::new(),
            };
            let outputs = match cfg.backend {
                BackendArg::Clear => {
                    interpret_clear(&c, &inputs).map_err(|e| Failure::user(format!("run: {e}")))?
                }
                BackendArg::Shares => {
                    let r = simulate_shared_with(
                        &c,
                        &inputs,
                        cfg.parties,
                        cfg.seed,
                        &rewrite_model(&cfg),
                    )
                    .map_err(|e| Failure::user(format!("run: {e}")))?;
                    eprintln!(
                        "trace: {}",
                        serde_json::to_string(&r.trace).expect("trace serializes")
                    );
                    r.outputs
                }
            };
            Ok(outputs_to_json(&outputs).to_string())
        }
        Command::Emit(o) => {
            let cfg = config(&o)?;
            if cfg.level != LevelArg::Bool {
                return Err(Failure::user("emit: requires --level bool"));
            }
            emit_gatelist(&compile(&o.source, &cfg)?)
                .map_err(|e| Failure::user(format!("emit: {e}")))
        }
    }
}

fn output_path(cmd: &Command) -> Option<&Path> {
    match cmd {
        Command::Check(o)
        | Command::Lower(o)
        | Command::Opt(o)
        | Command::Estimate(o)
        | Command::Run(o)
        | Command::Emit(o) => o.output.as_deref(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let out_path = output_path(&cli.command).map(Path::to_path_buf);
    let result = run(cli.command).and_then(|mut text| {
        if text.is_empty() {
            return Ok(());
        }
        if !text.ends_with('\n') {
            text.push('\n');
        }
        match out_path {
            Some(p) => {
                fs::write(&p, text).map_err(|e| Failure::Env(format!("{}: {e}", p.display())))
            }
            None => {
                print!("{text}");
                Ok(())
            }
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::User(msgs)) => {
            for m in msgs {
                eprintln!("{m}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Env(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
