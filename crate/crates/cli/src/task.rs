use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use clap::ValueEnum;
use ctlhorn::chc::{verify_infinite, Certifier, InfiniteConfig, Verdict};
use ctlhorn::finite::{solve_finite, FiniteInstance, DEFAULT_STATE_CAP};
use ctlhorn::frontend::{check_formula_vars, negate, normalize, parse_ctl};
use ctlhorn::proofsys::generate;
use ctlhorn::{CtlFormula, TransitionSystem};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    /// Exact decision on a bounded instance.
    Finite,
    /// Candidate loop with an external CHC solver.
    Chc,
    /// `finite` when bounds are given, `chc` otherwise.
    Auto,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub engine: Engine,
    pub bounds: BTreeMap<String, (i64, i64)>,
    pub solver_cmd: String,
    pub timeout: Duration,
    pub infinite: InfiniteConfig,
    pub state_cap: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            engine: Engine::Auto,
            bounds: BTreeMap::new(),
            solver_cmd: "z3".to_string(),
            timeout: ctlhorn::chc::DEFAULT_TIMEOUT,
            infinite: InfiniteConfig::default(),
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

impl VerifyOptions {
    pub fn resolved_engine(&self) -> Engine {
        match self.engine {
            Engine::Auto if self.bounds.is_empty() => Engine::Chc,
            Engine::Auto => Engine::Finite,
            e => e,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Holds,
    /// Refuted by the finite engine on the bounded instance.
    False,
    NotProven,
    /// Not proven, and the dual task holds.
    Disproven,
    Error,
}

impl Outcome {
    pub fn label(self) -> &'static str {
        match self {
            Outcome::Holds => "holds",
            Outcome::False => "false",
            Outcome::NotProven => "not-proven",
            Outcome::Disproven => "disproven",
            Outcome::Error => "error",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TaskResult {
    pub outcome: Outcome,
    pub reason: Option<String>,
    pub candidate: Option<Vec<String>>,
    /// 1-based index of the certified candidate on the CHC path.
    pub candidate_index: Option<usize>,
    pub time: Duration,
    pub engine: Engine,
}

impl TaskResult {
    fn error(engine: Engine, msg: impl Into<String>) -> Self {
        TaskResult {
            outcome: Outcome::Error,
            reason: Some(msg.into()),
            candidate: None,
            candidate_index: None,
            time: Duration::ZERO,
            engine,
        }
    }
}

/// One program/property pair, with the property already parsed.
#[derive(Debug, Clone)]
pub struct Job {
    pub program: String,
    pub system: Arc<TransitionSystem>,
    pub property: String,
    pub phi: CtlFormula,
    /// `None` when the dual task was not requested.
    pub neg: Option<Result<CtlFormula, String>>,
    /// Bounds that override the batch-wide ones for this job.
    pub bounds: BTreeMap<String, (i64, i64)>,
}

impl Job {
    /// Parse, check and normalize `property`; the negation is computed when
    /// `negate` is set, and a failure there becomes an error row later.
    pub fn new(
        program: impl Into<String>,
        system: Arc<TransitionSystem>,
        property: &str,
        negate_too: bool,
    ) -> Result<Job, ctlhorn::frontend::FrontendError> {
        let parsed = parse_ctl(property)?;
        check_formula_vars(&system, &parsed)?;
        let phi = normalize(&parsed);
        let neg = negate_too.then(|| negate(&phi).map(|f| normalize(&f)).map_err(|e| e.to_string()));
        Ok(Job {
            program: program.into(),
            system,
            property: property.to_string(),
            phi,
            neg,
            bounds: BTreeMap::new(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct Row {
    pub program: String,
    pub property: String,
    pub phi: TaskResult,
    pub neg: Option<TaskResult>,
}

impl Row {
    /// Both φ and ¬φ proven on the same initial states.
    pub fn inconsistent(&self) -> bool {
        self.phi.outcome == Outcome::Holds && self.neg.as_ref().is_some_and(|n| n.outcome == Outcome::Holds)
    }
}

fn finite_instance(ts: &Arc<TransitionSystem>, opts: &VerifyOptions) -> Result<Arc<FiniteInstance>, String> {
    FiniteInstance::with_inferred_bounds(ts.clone(), &opts.bounds, true, opts.state_cap)
        .map(Arc::new)
        .map_err(|e| e.to_string())
}

fn run_formula(
    ts: &Arc<TransitionSystem>,
    f: &CtlFormula,
    opts: &VerifyOptions,
    inst: Option<&Result<Arc<FiniteInstance>, String>>,
) -> TaskResult {
    let engine = opts.resolved_engine();
    let start = Instant::now();
    let mut res = match engine {
        Engine::Finite => {
            let inst = match inst.expect("finite instance") {
                Ok(i) => i,
                Err(e) => return TaskResult::error(engine, e.clone()),
            };
            match generate(ts.clone(), f) {
                Err(e) => TaskResult::error(engine, e.to_string()),
                Ok(cs) => {
                    let holds = solve_finite(inst, &cs).is_solvable();
                    TaskResult {
                        outcome: if holds { Outcome::Holds } else { Outcome::False },
                        reason: None,
                        candidate: None,
                        candidate_index: None,
                        time: Duration::ZERO,
                        engine,
                    }
                }
            }
        }
        _ => {
            let cert = Certifier::External { command: opts.solver_cmd.clone(), timeout: opts.timeout };
            match verify_infinite(ts.clone(), f, &opts.infinite, &cert) {
                Err(e) => TaskResult::error(engine, e.to_string()),
                Ok(Verdict::Holds(w)) => TaskResult {
                    outcome: Outcome::Holds,
                    reason: None,
                    candidate: Some(w.candidate),
                    candidate_index: Some(w.index),
                    time: Duration::ZERO,
                    engine,
                },
                Ok(Verdict::NotProven(reason)) => TaskResult {
                    outcome: Outcome::NotProven,
                    reason: Some(reason),
                    candidate: None,
                    candidate_index: None,
                    time: Duration::ZERO,
                    engine,
                },
            }
        }
    };
    res.time = start.elapsed();
    res
}

pub fn run_job(job: &Job, opts: &VerifyOptions) -> Row {
    let merged;
    let opts = if job.bounds.is_empty() {
        opts
    } else {
        let mut o = opts.clone();
        o.bounds.extend(job.bounds.iter().map(|(k, v)| (k.clone(), *v)));
        merged = o;
        &merged
    };
    let inst = (opts.resolved_engine() == Engine::Finite).then(|| finite_instance(&job.system, opts));
    let mut phi = run_formula(&job.system, &job.phi, opts, inst.as_ref());
    let mut neg = job.neg.as_ref().map(|n| match n {
        Ok(f) => run_formula(&job.system, f, opts, inst.as_ref()),
        Err(e) => TaskResult::error(opts.resolved_engine(), e.clone()),
    });
    if let Some(n) = &mut neg {
        if n.outcome == Outcome::Holds && phi.outcome == Outcome::NotProven {
            phi.outcome = Outcome::Disproven;
        }
        if phi.outcome == Outcome::Holds && n.outcome == Outcome::NotProven {
            n.outcome = Outcome::Disproven;
        }
    }
    Row { program: job.program.clone(), property: job.property.clone(), phi, neg }
}

/// Run jobs on up to `jobs` threads; rows come back in input order.
pub fn run_batch(batch: &[Job], opts: &VerifyOptions, jobs: Option<usize>) -> Vec<Row> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n.max(1));
    }
    match builder.build() {
        Ok(pool) => pool.install(|| batch.par_iter().map(|j| run_job(j, opts)).collect()),
        Err(_) => batch.iter().map(|j| run_job(j, opts)).collect(),
    }
}
