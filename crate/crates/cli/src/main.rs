//! `ctlhorn`: verify CTL properties of guarded-command programs, emit CHC
//! scripts and run the self-test battery.

use std::fs;
use std::ops::ControlFlow;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use ctlhorn::chc::{emit_chc, for_each_candidate, prepare, InfiniteConfig};
use ctlhorn::finite::DEFAULT_STATE_CAP;
use ctlhorn::frontend::parse_system;
use ctlhorn::TransitionSystem;
use ctlhorn_cli::args::{parse_bounds, parse_range};
use ctlhorn_cli::manifest;
use ctlhorn_cli::report::{render, ReportFormat};
use ctlhorn_cli::selftest::{self, SelftestConfig};
use ctlhorn_cli::task::{run_batch, Engine, Job, Outcome, VerifyOptions};

#[derive(Parser)]
#[command(name = "ctlhorn", version, about = "CTL verification through forall-exists Horn constraints")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify properties of programs, optionally with their negations.
    Verify(VerifyArgs),
    /// Write the CHC script of one candidate, or of every candidate.
    Emit(EmitArgs),
    /// Run every fixture of a manifest and compare with its expected verdicts.
    Bench(BenchArgs),
    /// Run the seeded oracle-agreement battery.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct EngineArgs {
    #[arg(long, value_enum, default_value = "auto")]
    engine: Engine,
    /// Variable bounds for the finite engine, e.g. `w=-3..8,x=0..5`.
    #[arg(long)]
    bounds: Option<String>,
    #[arg(long, default_value = "z3")]
    solver_cmd: String,
    /// Range of ranking coefficients.
    #[arg(long, default_value = "-5..5", allow_hyphen_values = true)]
    coeff_range: String,
    /// Solver timeout per candidate, in seconds.
    #[arg(long, default_value_t = 60)]
    timeout: u64,
    /// Budget of candidates per task on the CHC path.
    #[arg(long, default_value_t = InfiniteConfig::default().max_candidates)]
    max_candidates: usize,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    state_cap: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, required = true, num_args = 1..)]
    program: Vec<PathBuf>,
    #[arg(long, required = true, num_args = 1..)]
    prop: Vec<String>,
    /// Also run the dual task on the negated property.
    #[arg(long)]
    negate: bool,
    #[command(flatten)]
    engine: EngineArgs,
    /// Worker threads for independent tasks.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value = "table")]
    report: ReportFormat,
    /// Write the CHC script of the certified (or first) candidate for the
    /// property; needs exactly one program and property.
    #[arg(long)]
    emit_chc: Option<PathBuf>,
}

#[derive(Args)]
struct EmitArgs {
    #[arg(long)]
    program: PathBuf,
    #[arg(long)]
    prop: String,
    /// Emit for the negated property.
    #[arg(long)]
    negate: bool,
    /// Output file, or directory with `--enumerate`.
    #[arg(long)]
    out: PathBuf,
    /// 1-based candidate index.
    #[arg(long, default_value_t = 1)]
    candidate: usize,
    /// Emit one script per candidate, up to `--cap`.
    #[arg(long)]
    enumerate: bool,
    #[arg(long, default_value_t = 64)]
    cap: usize,
    #[arg(long, default_value = "-5..5", allow_hyphen_values = true)]
    coeff_range: String,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[command(flatten)]
    engine: EngineArgs,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value = "table")]
    report: ReportFormat,
    /// Recompute the expected verdicts with the model checker and rewrite
    /// the manifest.
    #[arg(long)]
    regenerate: bool,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 500)]
    cases: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, hide = true)]
    inject_mutant: bool,
}

/// Errors mapped to exit codes: 2 for bad input, 3 for internal failures.
enum Failure {
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

type CmdResult = Result<ExitCode, Failure>;

fn input<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Input(e.into())
}

fn load_system(path: &Path) -> anyhow::Result<Arc<TransitionSystem>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let ts = parse_system(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(Arc::new(ts))
}

fn display_name(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn options(a: &EngineArgs) -> anyhow::Result<VerifyOptions> {
    Ok(VerifyOptions {
        engine: a.engine,
        bounds: a.bounds.as_deref().map(parse_bounds).transpose()?.unwrap_or_default(),
        solver_cmd: a.solver_cmd.clone(),
        timeout: Duration::from_secs(a.timeout),
        infinite: InfiniteConfig {
            rank_range: parse_range(&a.coeff_range)?,
            max_candidates: a.max_candidates,
            ..InfiniteConfig::default()
        },
        state_cap: a.state_cap,
    })
}

fn write_candidate_script(
    ts: Arc<TransitionSystem>,
    f: &ctlhorn::CtlFormula,
    cfg: &InfiniteConfig,
    index: usize,
    out: &Path,
) -> Result<Vec<String>, Failure> {
    let cs = prepare(ts, f).map_err(input)?;
    let found = for_each_candidate(&cs, cfg, |i, desc, u| {
        if i == index {
            ControlFlow::Break((desc, emit_chc(&u)))
        } else {
            ControlFlow::Continue(())
        }
    })
    .map_err(input)?;
    let (desc, script) = found.ok_or_else(|| input(anyhow!("there is no candidate {index}")))?;
    let script = script.map_err(input)?;
    fs::write(out, script).with_context(|| format!("writing {}", out.display())).map_err(input)?;
    Ok(desc)
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let opts = options(&a.engine).map_err(input)?;
    if a.emit_chc.is_some() && (a.program.len() != 1 || a.prop.len() != 1) {
        return Err(input(anyhow!("--emit-chc needs exactly one program and one property")));
    }
    let mut batch = Vec::new();
    for p in &a.program {
        let ts = load_system(p).map_err(input)?;
        for prop in &a.prop {
            let job = Job::new(display_name(p), ts.clone(), prop, a.negate)
                .with_context(|| format!("property `{prop}`"))
                .map_err(input)?;
            batch.push(job);
        }
    }
    let rows = run_batch(&batch, &opts, a.jobs);
    print!("{}", render(&rows, a.report));
    if let Some(out) = &a.emit_chc {
        let index = rows[0].phi.candidate_index.unwrap_or(1);
        let desc =
            write_candidate_script(batch[0].system.clone(), &batch[0].phi, &opts.infinite, index, out)?;
        eprintln!("wrote candidate {index} to {}", out.display());
        for l in desc {
            eprintln!("    {l}");
        }
    }
    if rows.iter().any(|r| r.inconsistent()) {
        return Err(Failure::Internal(anyhow!("both a property and its negation were proven")));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_emit(a: EmitArgs) -> CmdResult {
    let ts = load_system(&a.program).map_err(input)?;
    let job = Job::new(display_name(&a.program), ts.clone(), &a.prop, a.negate).map_err(input)?;
    let f = match job.neg {
        Some(n) => n.map_err(|e| input(anyhow!(e)))?,
        None => job.phi,
    };
    let cfg = InfiniteConfig {
        rank_range: parse_range(&a.coeff_range).map_err(input)?,
        max_candidates: if a.enumerate { a.cap } else { usize::MAX },
        ..InfiniteConfig::default()
    };
    if !a.enumerate {
        let desc = write_candidate_script(ts, &f, &cfg, a.candidate, &a.out)?;
        println!("candidate {} -> {}", a.candidate, a.out.display());
        for l in desc {
            println!("    {l}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display())).map_err(input)?;
    let cs = prepare(ts, &f).map_err(input)?;
    let mut failure = None;
    for_each_candidate(&cs, &cfg, |i, desc, u| {
        let path = a.out.join(format!("candidate-{i:04}.smt2"));
        let res = emit_chc(&u).map_err(input).and_then(|s| {
            fs::write(&path, s).with_context(|| format!("writing {}", path.display())).map_err(input)
        });
        match res {
            Ok(()) => {
                println!("candidate {i} -> {}", path.display());
                for l in desc {
                    println!("    {l}");
                }
                ControlFlow::Continue(())
            }
            Err(e) => {
                failure = Some(e);
                ControlFlow::Break(())
            }
        }
    })
    .map_err(input)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(ExitCode::SUCCESS),
    }
}

fn cmd_bench(a: BenchArgs) -> CmdResult {
    let opts = options(&a.engine).map_err(input)?;
    let mut loaded = manifest::load(&a.manifest).map_err(input)?;
    if a.regenerate {
        loaded.derive_expected().map_err(input)?;
        let text = serde_json::to_string_pretty(&loaded.manifest).map_err(|e| Failure::Internal(e.into()))?;
        fs::write(&a.manifest, text + "\n").map_err(input)?;
        eprintln!("rewrote {}", a.manifest.display());
    }
    let jobs = loaded.jobs().map_err(input)?;
    let rows = run_batch(&jobs, &opts, a.jobs);
    print!("{}", render(&rows, a.report));
    if rows.iter().any(|r| r.inconsistent()) {
        return Err(Failure::Internal(anyhow!("both a property and its negation were proven")));
    }
    if opts.resolved_engine() == Engine::Finite {
        let bad = manifest::mismatches(&rows, &loaded.expected());
        for b in &bad {
            eprintln!("mismatch: {b}");
        }
        if !bad.is_empty() {
            return Ok(ExitCode::from(1));
        }
    } else {
        // Proofs on the unbounded system must agree with the bounded oracle
        // for these fixtures, whose reachable values stay inside the bounds.
        for (r, e) in rows.iter().zip(loaded.expected()) {
            let Some(e) = e else { continue };
            let wrong = (r.phi.outcome == Outcome::Holds && !e.phi)
                || r.neg.as_ref().is_some_and(|n| n.outcome == Outcome::Holds && !e.neg_phi);
            if wrong {
                eprintln!("mismatch: {} / {}: proof contradicts the model checker", r.program, r.property);
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_selftest(a: SelftestArgs) -> CmdResult {
    let rep = selftest::run(&SelftestConfig { cases: a.cases, seed: a.seed, inject_mutant: a.inject_mutant });
    for w in &rep.warnings {
        eprintln!("warning: {w}");
    }
    for l in &rep.lines {
        println!("{l}");
    }
    Ok(if rep.failures == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Emit(a) => cmd_emit(a),
        Cmd::Bench(a) => cmd_bench(a),
        Cmd::Selftest(a) => cmd_selftest(a),
    };
    match res {
        Ok(code) => code,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(3)
        }
    }
}
