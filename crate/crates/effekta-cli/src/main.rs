//! Command-line front end: configuration loading, type checking, execution,
//! approximant inspection, meta-theory verification, and law suites.
//!
//! Exit codes: 0 success, 1 type error (or failed verification), 2 parse or
//! configuration error, 3 undecided effect inclusion.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use effekta_core::core_lang::ast::{OpSig, Program, SignatureTable};
use effekta_core::core_lang::parser::parse_program;
use effekta_core::effect_algebra::include::InclusionBounds;
use effekta_core::harness::{
    self, check_finitary_soundness, check_infinitary_soundness, check_progress,
    check_run_compat, check_step_sr, HarnessVerdict, SuiteStats, TermGenerator, Verdict,
};
use effekta_core::interp::{kleisli_law_suite, lifting_axiom_suite, InterpKind, LawReport};
use effekta_core::monad_kernel::MonadTag;
use effekta_core::step_semantics::{
    approximant_chain, finitary_sem_traced, OpTable, SemanticsOutcome,
};
use effekta_core::type_system::{check_program, effect_display, infer_program, Type, TypeError};

#[derive(Parser)]
#[command(name = "effekta", about = "Effectful language workbench", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct CommonArgs {
    /// Program file in the surface grammar.
    program: PathBuf,
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Emit machine-readable JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Type-and-effect check a program.
    Check {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run a program to a monadic result.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Step budget (overrides the config).
        #[arg(long)]
        budget: Option<usize>,
        /// Print the step-by-step trace.
        #[arg(long)]
        trace: bool,
        /// Skip the well-typedness gate.
        #[arg(long = "unsafe")]
        unsafe_run: bool,
    },
    /// Print the approximant chain of a program.
    Approx {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of approximants (overrides the config).
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Run the meta-theory verification suites on a program.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Which suites: progress, sr, run, fin, inf, or all.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Additionally verify this many generated well-typed terms.
        #[arg(long)]
        random: Option<usize>,
        /// Seed for the term generator.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Check the monad and lifting laws for the configured monad.
    Laws {
        /// Run configuration (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Payload universe size (at most 4).
        #[arg(long, default_value_t = 2)]
        universe: usize,
        /// Emit machine-readable JSON instead of text.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    monad: String,
    #[serde(default)]
    params: ConfigParams,
    operations: Vec<String>,
    interpretation: String,
    #[serde(default)]
    budgets: ConfigBudgets,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ConfigParams {
    #[serde(default)]
    exceptions: Vec<String>,
    #[serde(default)]
    locations: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigBudgets {
    #[serde(default = "default_steps")]
    steps: usize,
    #[serde(default = "default_approx")]
    approx: usize,
    #[serde(default)]
    inclusion: Option<ConfigInclusion>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigInclusion {
    max_stem: usize,
    max_period: usize,
    max_len: usize,
}

fn default_steps() -> usize {
    64
}

fn default_approx() -> usize {
    30
}

impl Default for ConfigBudgets {
    fn default() -> ConfigBudgets {
        ConfigBudgets {
            steps: default_steps(),
            approx: default_approx(),
            inclusion: None,
        }
    }
}

/// A fully-resolved run configuration.
struct RunConfig {
    tag: MonadTag,
    sigs: SignatureTable,
    ops: OpTable,
    kind: InterpKind,
    steps: usize,
    approx: usize,
    bounds: InclusionBounds,
}

/// Loads and validates a configuration. Operation signatures are forced by
/// the operation's kind: raises return the empty type, choose returns a
/// boolean, writes take a natural and return unit.
fn load_config(path: &PathBuf) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let cfg: ConfigFile =
        serde_json::from_str(&text).map_err(|e| format!("invalid config: {e}"))?;
    let tag = match cfg.monad.as_str() {
        "exception" => MonadTag::Exception {
            exc_names: cfg.params.exceptions.iter().cloned().collect(),
        },
        "nondet-list" => MonadTag::NondetList,
        "distribution" => MonadTag::Distribution,
        "pointed-output" => MonadTag::PointedOutput {
            locations: cfg.params.locations.iter().cloned().collect(),
        },
        other => return Err(format!("unknown monad `{other}`")),
    };
    let kind = InterpKind::from_name(&cfg.interpretation)
        .ok_or_else(|| format!("unknown interpretation `{}`", cfg.interpretation))?;
    if !kind.compatible(&tag) {
        return Err(format!(
            "interpretation `{}` is not compatible with monad `{}`",
            cfg.interpretation, cfg.monad
        ));
    }
    let mut sigs = SignatureTable::new();
    for name in &cfg.operations {
        let sig = if let Some(e) = name.strip_prefix("raise_") {
            if !cfg.params.exceptions.iter().any(|x| x == e) {
                return Err(format!(
                    "operation `{name}` names exception `{e}` not listed in params.exceptions"
                ));
            }
            OpSig {
                arg_types: vec![],
                return_type: Type::Bot,
            }
        } else if name == "choose" {
            OpSig {
                arg_types: vec![],
                return_type: Type::Bool,
            }
        } else if let Some(loc) = name.strip_prefix("write_") {
            if !cfg.params.locations.iter().any(|x| x == loc) {
                return Err(format!(
                    "operation `{name}` names location `{loc}` not listed in params.locations"
                ));
            }
            OpSig {
                arg_types: vec![Type::Nat],
                return_type: Type::Unit,
            }
        } else {
            return Err(format!(
                "operation `{name}` must be raise_<exc>, choose, or write_<loc>"
            ));
        };
        sigs.insert(name.clone(), sig);
    }
    let ops = harness::op_table_from_signatures(&sigs);
    for imp in ops.values() {
        if !imp.kind.compatible(&tag) {
            return Err(format!(
                "operation `{}` is not compatible with monad `{}`",
                imp.op, cfg.monad
            ));
        }
    }
    let mut bounds = InclusionBounds::default();
    if let Some(inc) = &cfg.budgets.inclusion {
        bounds = InclusionBounds {
            max_stem: inc.max_stem,
            max_period: inc.max_period,
            max_len: inc.max_len,
        };
    }
    Ok(RunConfig {
        tag,
        sigs,
        ops,
        kind,
        steps: cfg.budgets.steps,
        approx: cfg.budgets.approx,
        bounds,
    })
}

fn load_program_file(path: &PathBuf, cfg: &RunConfig) -> Result<Program, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read program {}: {e}", path.display()))?;
    parse_program(&text, &cfg.sigs).map_err(|e| e.to_string())
}

const EXIT_TYPE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_UNDECIDED: u8 = 3;

fn config_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_CONFIG)
}

fn type_error_exit(err: &TypeError) -> ExitCode {
    if err.is_undecided() {
        ExitCode::from(EXIT_UNDECIDED)
    } else {
        ExitCode::from(EXIT_TYPE)
    }
}

fn cmd_check(common: &CommonArgs) -> ExitCode {
    let cfg = match load_config(&common.config) {
        Ok(c) => c,
        Err(e) => return config_error(&e),
    };
    let program = match load_program_file(&common.program, &cfg) {
        Ok(p) => p,
        Err(e) => return config_error(&e),
    };
    if common.json {
        let report = check_program(&program, cfg.bounds);
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    }
    match infer_program(&program, cfg.bounds) {
        Ok(te) => {
            if !common.json {
                println!("type: {}", te.ty);
                println!("effect: {}", effect_display(&te.eff));
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            if !common.json {
                eprintln!("type error: {err}");
            }
            type_error_exit(&err)
        }
    }
}

fn cmd_run(common: &CommonArgs, budget: Option<usize>, trace: bool, unsafe_run: bool) -> ExitCode {
    let cfg = match load_config(&common.config) {
        Ok(c) => c,
        Err(e) => return config_error(&e),
    };
    let program = match load_program_file(&common.program, &cfg) {
        Ok(p) => p,
        Err(e) => return config_error(&e),
    };
    let budget = budget.unwrap_or(cfg.steps);
    if budget == 0 {
        return config_error("step budget must be positive");
    }
    if !unsafe_run {
        if let Err(err) = infer_program(&program, cfg.bounds) {
            eprintln!("type error: {err}");
            return type_error_exit(&err);
        }
    }
    let mut trace_lines = Vec::new();
    let outcome = finitary_sem_traced(
        &program.main,
        budget,
        &cfg.tag,
        &cfg.ops,
        trace.then_some(&mut trace_lines),
    );
    if trace {
        for line in &trace_lines {
            println!("{line}");
        }
    }
    match outcome {
        SemanticsOutcome::Converged { result, steps } => {
            if common.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "outcome": "converged",
                        "result": result.to_string(),
                        "steps": steps,
                    })
                );
            } else {
                println!("result: {result} ({steps} steps)");
            }
            ExitCode::SUCCESS
        }
        SemanticsOutcome::Diverged { budget } => {
            if common.json {
                println!(
                    "{}",
                    serde_json::json!({ "outcome": "diverged", "budget": budget })
                );
            } else {
                println!("diverged within {budget}");
            }
            ExitCode::SUCCESS
        }
        SemanticsOutcome::Chain { .. } => unreachable!(),
    }
}

fn cmd_approx(common: &CommonArgs, steps: Option<usize>) -> ExitCode {
    let cfg = match load_config(&common.config) {
        Ok(c) => c,
        Err(e) => return config_error(&e),
    };
    let program = match load_program_file(&common.program, &cfg) {
        Ok(p) => p,
        Err(e) => return config_error(&e),
    };
    if let Err(err) = infer_program(&program, cfg.bounds) {
        eprintln!("type error: {err}");
        return type_error_exit(&err);
    }
    let max_n = steps.unwrap_or(cfg.approx);
    let SemanticsOutcome::Chain { entries, converged } =
        approximant_chain(&program.main, max_n, &cfg.tag, &cfg.ops)
    else {
        unreachable!();
    };
    if common.json {
        println!(
            "{}",
            serde_json::json!({
                "entries": entries.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                "converged": converged,
            })
        );
    } else {
        for (n, entry) in entries.iter().enumerate() {
            println!("{n}: {entry}");
        }
        println!("converged: {converged}");
    }
    ExitCode::SUCCESS
}

fn emit_verdict(v: &HarnessVerdict, json: bool) {
    if json {
        println!("{}", serde_json::to_string(v).unwrap());
    } else {
        println!("{v}");
    }
}

fn cmd_verify(
    common: &CommonArgs,
    suite: &str,
    random: Option<usize>,
    seed: u64,
) -> ExitCode {
    let cfg = match load_config(&common.config) {
        Ok(c) => c,
        Err(e) => return config_error(&e),
    };
    let program = match load_program_file(&common.program, &cfg) {
        Ok(p) => p,
        Err(e) => return config_error(&e),
    };
    if let Err(err) = infer_program(&program, cfg.bounds) {
        eprintln!("type error: {err}");
        return type_error_exit(&err);
    }
    let suites: Vec<&str> = if suite == "all" {
        vec!["progress", "sr", "run", "fin", "inf"]
    } else {
        vec![suite]
    };
    for s in &suites {
        if !["progress", "sr", "run", "fin", "inf"].contains(s) {
            return config_error(&format!("unknown suite `{s}`"));
        }
    }
    let mut stats = SuiteStats::default();
    let mut any_fail = false;
    let mut subjects = vec![program.main.clone()];
    if let Some(n) = random {
        let mut gen = TermGenerator::new(seed, 12, cfg.sigs.clone(), cfg.tag.clone());
        for _ in 0..n {
            subjects.push(harness::generate_well_typed(&mut gen, cfg.bounds).0);
        }
    }
    for s in &suites {
        match *s {
            "run" => {
                let v = check_run_compat(&cfg.sigs, &cfg.ops, &cfg.tag, cfg.kind, cfg.bounds);
                stats.record(&v);
                any_fail |= v.verdict == Verdict::Fail;
                emit_verdict(&v, common.json);
            }
            _ => {
                for e in &subjects {
                    let v = match *s {
                        "progress" => check_progress(e, &cfg.sigs, &cfg.tag, &cfg.ops, cfg.bounds),
                        "sr" => {
                            check_step_sr(e, &cfg.sigs, &cfg.tag, &cfg.ops, cfg.kind, cfg.bounds)
                        }
                        "fin" => check_finitary_soundness(
                            e, cfg.steps, &cfg.sigs, &cfg.tag, &cfg.ops, cfg.kind, cfg.bounds,
                        ),
                        "inf" => check_infinitary_soundness(
                            e, cfg.approx, &cfg.sigs, &cfg.tag, &cfg.ops, cfg.kind, cfg.bounds,
                        ),
                        _ => unreachable!(),
                    };
                    stats.record(&v);
                    any_fail |= v.verdict == Verdict::Fail;
                    emit_verdict(&v, common.json);
                }
            }
        }
    }
    if common.json {
        println!("{}", serde_json::to_string(&stats).unwrap());
    } else {
        println!(
            "checks: {}, passes: {}, fails: {}, undecided: {}, vacuous: {}",
            stats.checks, stats.passes, stats.fails, stats.undecided, stats.vacuous
        );
    }
    if any_fail {
        ExitCode::from(EXIT_TYPE)
    } else {
        ExitCode::SUCCESS
    }
}

fn emit_law_report(report: &LawReport, json: bool) {
    if json {
        println!("{}", serde_json::to_string_pretty(report).unwrap());
    } else {
        for v in &report.verdicts {
            let status = if v.pass { "pass" } else { "FAIL" };
            match &v.counterexample {
                Some(cx) => println!("{} / {}: {status} [{cx}]", report.kind, v.condition),
                None => println!("{} / {}: {status}", report.kind, v.condition),
            }
        }
    }
}

fn cmd_laws(config: &PathBuf, universe: usize, json: bool) -> ExitCode {
    if universe == 0 || universe > 4 {
        return config_error("universe size must be between 1 and 4");
    }
    let cfg = match load_config(config) {
        Ok(c) => c,
        Err(e) => return config_error(&e),
    };
    let kleisli = kleisli_law_suite(&cfg.tag, universe);
    emit_law_report(&kleisli, json);
    let samples: Vec<_> = cfg
        .sigs
        .keys()
        .map(|op| effekta_core::effect_algebra::automaton::EffectAutomaton::atom(op.clone()))
        .chain([effekta_core::effect_algebra::automaton::EffectAutomaton::eps()])
        .collect();
    let lifting = match lifting_axiom_suite(cfg.kind, &cfg.tag, universe, &samples, cfg.bounds) {
        Ok(r) => r,
        Err(e) => return config_error(&e.to_string()),
    };
    emit_law_report(&lifting, json);
    // The existential interpretation's failures of the flattening and
    // image-closure laws are intrinsic and expected; anything else failing
    // is an error.
    let expected_failures: BTreeSet<&str> = if cfg.kind == InterpKind::NondetEx01 {
        BTreeSet::from(["mult", "image-closure"])
    } else {
        BTreeSet::new()
    };
    let mut unexpected = false;
    for v in kleisli.verdicts.iter().chain(&lifting.verdicts) {
        if !v.pass && !expected_failures.contains(v.condition.as_str()) {
            unexpected = true;
        }
    }
    for name in &expected_failures {
        let observed = lifting
            .verdicts
            .iter()
            .any(|v| v.condition == *name && !v.pass);
        if observed {
            println!("expected failure observed: {name}");
        } else {
            println!("expected failure NOT observed: {name}");
            unexpected = true;
        }
    }
    if unexpected {
        ExitCode::from(EXIT_TYPE)
    } else {
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.cmd {
        Cmd::Check { common } => cmd_check(common),
        Cmd::Run {
            common,
            budget,
            trace,
            unsafe_run,
        } => cmd_run(common, *budget, *trace, *unsafe_run),
        Cmd::Approx { common, steps } => cmd_approx(common, *steps),
        Cmd::Verify {
            common,
            suite,
            random,
            seed,
        } => cmd_verify(common, suite, random.as_ref().copied(), *seed),
        Cmd::Laws {
            config,
            universe,
            json,
        } => cmd_laws(config, *universe, *json),
    }
}
