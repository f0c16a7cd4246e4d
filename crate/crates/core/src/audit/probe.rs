//! Running a mechanism on a witness pair and reporting how close it gets
//! to the impossibility ceiling.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::audit::{audit_approximation, ParseEnumError};
use crate::instances::{lb_det_family, lb_rand_family, GoldenRatioApprox, InstancesError};
use crate::mechanisms::{Mechanism, MechanismError};
use crate::rational::Rational;
use crate::solver::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Det,
    Rand,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Det => "det",
            Family::Rand => "rand",
        })
    }
}

impl FromStr for Family {
    type Err = ParseEnumError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "det" => Ok(Family::Det),
            "rand" => Ok(Family::Rand),
            _ => Err(ParseEnumError(s.to_string())),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ProbeError {
    #[error("the det family needs an epsilon")]
    MissingEpsilon,
    #[error(transparent)]
    Instances(#[from] InstancesError),
    #[error(transparent)]
    Audit(#[from] crate::audit::AuditError),
    #[error(transparent)]
    Mechanism(#[from] MechanismError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub family: Family,
    pub k: u32,
    pub epsilon: Option<Rational>,
    pub phi_k: Rational,
    pub mechanism: String,
    pub ratio_truthful: Rational,
    pub ratio_deviant: Rational,
    pub min_ratio: Rational,
    /// Agent 0's expected value before and after hiding.
    pub agent_value_truthful: Rational,
    pub agent_value_deviant: Rational,
    /// Agent 0 does not gain by hiding.
    pub sp_consistent: bool,
    /// 1/φ_k for the det family, 1/(5φ_k − 7) for the rand family.
    pub ceiling: Rational,
    /// The mechanism's own guaranteed ratio.
    pub floor: Rational,
    pub degenerate: bool,
}

pub fn lower_bound_probe(
    mechanism: &Mechanism,
    family: Family,
    k: u32,
    epsilon: Option<&Rational>,
) -> Result<ProbeReport, ProbeError> {
    let golden = GoldenRatioApprox::new(k)?;
    let (pair, ceiling) = match family {
        Family::Det => {
            let eps = epsilon.ok_or(ProbeError::MissingEpsilon)?;
            (lb_det_family(k, eps)?, golden.inverse())
        }
        Family::Rand => (lb_rand_family(k)?, golden.randomized_ceiling()),
    };
    let limits = Limits::default();
    let t = audit_approximation(mechanism, &pair.truthful, limits)?;
    let d = audit_approximation(mechanism, &pair.deviant, limits)?;
    let agent_value_truthful = mechanism.run(&pair.truthful)?.agent_expected_value(&pair.truthful, 0);
    let agent_value_deviant = mechanism.run(&pair.deviant)?.agent_expected_value(&pair.truthful, 0);
    let min_ratio = if t.ratio < d.ratio {
        t.ratio.clone()
    } else {
        d.ratio.clone()
    };
    Ok(ProbeReport {
        family,
        k,
        epsilon: epsilon.filter(|_| family == Family::Det).cloned(),
        phi_k: golden.phi,
        mechanism: mechanism.to_string(),
        ratio_truthful: t.ratio,
        ratio_deviant: d.ratio,
        min_ratio,
        sp_consistent: agent_value_deviant <= agent_value_truthful,
        agent_value_truthful,
        agent_value_deviant,
        ceiling,
        floor: mechanism.ratio_floor(2),
        degenerate: pair.truthful.is_degenerate(),
    })
}
