//! Audits over generated instance streams.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::audit::{audit, AuditLimits, AuditReport, SpMode, SpSemantics};
use crate::instances::{generate, GeneratorSpec};
use crate::mechanisms::Mechanism;
use crate::model::{AgentId, ItemId};
use crate::rational::Rational;

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub spec: GeneratorSpec,
    pub count: u64,
    pub mechanisms: Vec<Mechanism>,
    pub mode: SpMode,
    pub semantics: SpSemantics,
    pub limits: AuditLimits,
    /// Worker threads; `None` uses every available core.
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WorstViolation {
    pub instance_id: String,
    pub agent: AgentId,
    pub hidden: BTreeSet<ItemId>,
    pub gain: Rational,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MechanismSummary {
    pub mechanism: String,
    pub instances: usize,
    pub violations: usize,
    pub degenerate_findings: usize,
    pub min_ratio: Option<Rational>,
    pub min_ratio_instance: Option<String>,
    pub worst_violation: Option<WorstViolation>,
    pub floor_breaches: usize,
    pub errors: usize,
}

impl MechanismSummary {
    pub fn is_clean(&self) -> bool {
        self.violations == 0 && self.floor_breaches == 0 && self.errors == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepResult {
    /// Ordered by instance index, then by mechanism as configured.
    pub reports: Vec<AuditReport>,
    pub summaries: Vec<MechanismSummary>,
}

impl SweepResult {
    pub fn is_clean(&self) -> bool {
        self.summaries.iter().all(MechanismSummary::is_clean)
    }
}

pub fn instance_id(spec: &GeneratorSpec, index: u64) -> String {
    format!("{}-{}-{}", spec.kind, spec.seed, index)
}

fn audit_index(config: &SweepConfig, index: u64) -> Vec<AuditReport> {
    let id = instance_id(&config.spec, index);
    match generate(&config.spec, index) {
        Ok(inst) => config
            .mechanisms
            .iter()
            .map(|m| audit(m, &inst, &id, config.mode, config.semantics, config.limits))
            .collect(),
        Err(e) => config
            .mechanisms
            .iter()
            .map(|m| AuditReport {
                instance_id: id.clone(),
                mechanism: m.to_string(),
                beta: m.beta().cloned(),
                sp_mode: config.mode,
                sp_semantics: config.semantics,
                violations: Vec::new(),
                degenerate_findings: Vec::new(),
                mechanism_value: Rational::zero(),
                opt_value: Rational::zero(),
                ratio: Rational::zero(),
                floor: m.ratio_floor(1),
                degenerate: false,
                error: Some(e.to_string()),
                size_guard: false,
            })
            .collect(),
    }
}

/// Audits `count` generated instances against every mechanism. The result
/// does not depend on the thread count.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult, rayon::ThreadPoolBuildError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = config.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build()?;
    let reports: Vec<AuditReport> = pool.install(|| {
        (0..config.count)
            .into_par_iter()
            .map(|index| audit_index(config, index))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    });
    let summaries = config
        .mechanisms
        .iter()
        .map(|m| summarize(&m.to_string(), &reports))
        .collect();
    Ok(SweepResult { reports, summaries })
}

pub fn summarize(mechanism: &str, reports: &[AuditReport]) -> MechanismSummary {
    let mut s = MechanismSummary {
        mechanism: mechanism.to_string(),
        instances: 0,
        violations: 0,
        degenerate_findings: 0,
        min_ratio: None,
        min_ratio_instance: None,
        worst_violation: None,
        floor_breaches: 0,
        errors: 0,
    };
    for r in reports.iter().filter(|r| r.mechanism == mechanism) {
        s.instances += 1;
        if r.error.is_some() {
            s.errors += 1;
            continue;
        }
        s.violations += r.violations.len();
        s.degenerate_findings += r.degenerate_findings.len();
        if r.below_floor() {
            s.floor_breaches += 1;
        }
        if s.min_ratio.as_ref().is_none_or(|m| r.ratio < *m) {
            s.min_ratio = Some(r.ratio.clone());
            s.min_ratio_instance = Some(r.instance_id.clone());
        }
        if let Some(w) = r.worst() {
            let better = s.worst_violation.as_ref().is_none_or(|cur| w.gain > cur.gain);
            if better {
                s.worst_violation = Some(WorstViolation {
                    instance_id: r.instance_id.clone(),
                    agent: w.deviation.agent,
                    hidden: w.deviation.hidden.clone(),
                    gain: w.gain.clone(),
                    degenerate: r.degenerate,
                });
            }
        }
    }
    s
}
