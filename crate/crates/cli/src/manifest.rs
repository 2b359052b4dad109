//! Fixture manifest: programs, per-program bounds and property variants,
//! with expected verdicts computed by the explicit-state model checker.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{Context, Result};
use ctlhorn::finite::{holds, FiniteInstance, DEFAULT_STATE_CAP};
use ctlhorn::frontend::parse_system;
use ctlhorn::TransitionSystem;
use serde::{Deserialize, Serialize};

use crate::task::{Job, Outcome, Row};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    pub phi: bool,
    #[serde(rename = "neg-phi")]
    pub neg_phi: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyCase {
    pub shape: String,
    pub prop: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Expected>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fixture {
    /// Path relative to the manifest.
    pub program: String,
    #[serde(default)]
    pub bounds: BTreeMap<String, (i64, i64)>,
    pub properties: Vec<PropertyCase>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub fixtures: Vec<Fixture>,
}

pub struct Loaded {
    pub manifest: Manifest,
    pub dir: PathBuf,
    pub systems: Vec<Arc<TransitionSystem>>,
}

pub fn load(path: &Path) -> Result<Loaded> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let manifest: Manifest =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let systems = manifest
        .fixtures
        .iter()
        .map(|f| {
            let p = dir.join(&f.program);
            let src = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
            let ts = parse_system(&src).with_context(|| format!("parsing {}", p.display()))?;
            Ok(Arc::new(ts))
        })
        .collect::<Result<_>>()?;
    Ok(Loaded { manifest, dir, systems })
}

impl Loaded {
    /// One job per fixture and property, dual task included.
    pub fn jobs(&self) -> Result<Vec<Job>> {
        let mut out = Vec::new();
        for (f, ts) in self.manifest.fixtures.iter().zip(&self.systems) {
            for case in &f.properties {
                let mut job = Job::new(&f.program, ts.clone(), &case.prop, true)
                    .with_context(|| format!("{}: `{}`", f.program, case.prop))?;
                job.bounds = f.bounds.clone();
                out.push(job);
            }
        }
        Ok(out)
    }

    /// Expected verdicts from the model checker on the bounded instance.
    pub fn derive_expected(&mut self) -> Result<()> {
        let jobs = self.jobs()?;
        let mut it = jobs.iter();
        for (f, ts) in self.manifest.fixtures.iter_mut().zip(&self.systems) {
            let inst = FiniteInstance::with_inferred_bounds(ts.clone(), &f.bounds, true, DEFAULT_STATE_CAP)
                .with_context(|| f.program.clone())?;
            for case in &mut f.properties {
                let job = it.next().expect("one job per case");
                let neg = job.neg.as_ref().expect("dual requested");
                let neg = neg.as_ref().map_err(|e| anyhow::anyhow!("{}: {e}", case.prop))?;
                case.expected = Some(Expected { phi: holds(&inst, &job.phi), neg_phi: holds(&inst, neg) });
            }
        }
        Ok(())
    }

    pub fn expected(&self) -> Vec<Option<Expected>> {
        self.manifest.fixtures.iter().flat_map(|f| f.properties.iter().map(|c| c.expected.clone())).collect()
    }
}

/// Rows whose finite-engine verdicts disagree with the manifest.
pub fn mismatches(rows: &[Row], expected: &[Option<Expected>]) -> Vec<String> {
    let mut out = Vec::new();
    for (r, e) in rows.iter().zip(expected) {
        let Some(e) = e else {
            out.push(format!("{} / {}: no expected verdict", r.program, r.property));
            continue;
        };
        let neg = r.neg.as_ref().map(|n| n.outcome);
        let agrees = |got: Option<Outcome>, want: bool| match got {
            Some(Outcome::Holds) => want,
            Some(Outcome::False) => !want,
            _ => false,
        };
        if !agrees(Some(r.phi.outcome), e.phi) || !agrees(neg, e.neg_phi) {
            out.push(format!(
                "{} / {}: got {}/{}, expected {}/{}",
                r.program,
                r.property,
                r.phi.outcome.label(),
                neg.map_or("-", Outcome::label),
                e.phi,
                e.neg_phi
            ));
        }
    }
    out
}
