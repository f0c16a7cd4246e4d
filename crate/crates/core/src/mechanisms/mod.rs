//! Packing mechanisms and their outcome lotteries.

pub mod general;
pub mod unit_density;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::model::{AgentId, Instance, ItemId, Outcome};
use crate::rational::{ParseRationalError, Rational};
use crate::solver::{Limits, SolverError};

pub use general::{best_individual, greedy, naive_greedy, randomized_greedy, single_greedy};
pub use unit_density::{
    a_dominates, compute_fit_sets, compute_large_sets, fit_two, large_fit, randomized_fit, restricted_greedy, FitSets,
    LargeFitSets,
};

pub const DETERMINISTIC: &str = "deterministic";
pub const GREEDY_BRANCH: &str = "greedy-branch";
pub const MAX_ITEM_BRANCH: &str = "max-item-branch";
pub const FIT_TWO_BRANCH: &str = "fit-two-branch";
pub const LARGE_FIT_BRANCH: &str = "large-fit-branch";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MechanismError {
    #[error("{0} requires a unit-density instance (every value equal to its size)")]
    NotUnitDensity(&'static str),
    #[error("beta must lie in [1/2, 2/3], got {0}")]
    BetaOutOfRange(Rational),
    #[error("operation needs at least one item")]
    EmptyInstance,
    #[error("subset names an item outside the instance")]
    UnknownSubset,
    #[error("instances differ in capacity or agent count")]
    MismatchedInstances,
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Branch {
    pub probability: Rational,
    pub outcome: Outcome,
    pub label: &'static str,
}

/// A finite lottery over packed outcomes. Probabilities are positive and
/// sum to one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutcomeDistribution {
    pub branches: Vec<Branch>,
}

impl OutcomeDistribution {
    pub fn certain(outcome: Outcome) -> Self {
        OutcomeDistribution {
            branches: vec![Branch {
                probability: Rational::one(),
                outcome,
                label: DETERMINISTIC,
            }],
        }
    }

    pub fn lottery(branches: Vec<(Rational, Outcome, &'static str)>) -> Self {
        OutcomeDistribution {
            branches: branches
                .into_iter()
                .map(|(probability, outcome, label)| Branch {
                    probability,
                    outcome,
                    label,
                })
                .collect(),
        }
    }

    pub fn expected_value(&self) -> Rational {
        self.branches.iter().map(|b| &b.probability * &b.outcome.value).sum()
    }

    pub fn agent_expected_value(&self, instance: &Instance, agent: AgentId) -> Rational {
        self.branches
            .iter()
            .map(|b| &b.probability * instance.agent_value(agent, &b.outcome.packed))
            .sum()
    }

    pub fn branch(&self, label: &str) -> Option<&Branch> {
        self.branches.iter().find(|b| b.label == label)
    }

    /// Probability that `id` is packed.
    pub fn inclusion(&self, id: ItemId) -> Rational {
        self.branches
            .iter()
            .filter(|b| b.outcome.contains(id))
            .map(|b| &b.probability)
            .sum()
    }

    pub fn is_deterministic(&self) -> bool {
        self.branches.len() == 1
    }
}

/// A mechanism selector, with the threshold parameter where one applies.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Mechanism {
    NaiveGreedy,
    Greedy,
    SingleGreedy,
    BestIndividual,
    RandomizedGreedy,
    FitTwo { beta: Rational },
    LargeFit,
    RandomizedFit,
}

/// 987/1597, the ratio of consecutive Fibonacci numbers closest to 1/φ
/// that the defaults use.
pub fn default_beta() -> Rational {
    Rational::new(987, 1597)
}

impl Mechanism {
    pub const ALL_NAMES: [&'static str; 8] = [
        "naive_greedy",
        "greedy",
        "single_greedy",
        "best_individual",
        "randomized_greedy",
        "fit_two",
        "large_fit",
        "randomized_fit",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Mechanism::NaiveGreedy => "naive_greedy",
            Mechanism::Greedy => "greedy",
            Mechanism::SingleGreedy => "single_greedy",
            Mechanism::BestIndividual => "best_individual",
            Mechanism::RandomizedGreedy => "randomized_greedy",
            Mechanism::FitTwo { .. } => "fit_two",
            Mechanism::LargeFit => "large_fit",
            Mechanism::RandomizedFit => "randomized_fit",
        }
    }

    pub fn beta(&self) -> Option<&Rational> {
        match self {
            Mechanism::FitTwo { beta } => Some(beta),
            _ => None,
        }
    }

    pub fn requires_unit_density(&self) -> bool {
        matches!(
            self,
            Mechanism::FitTwo { .. } | Mechanism::LargeFit | Mechanism::RandomizedFit
        )
    }

    pub fn is_randomized(&self) -> bool {
        matches!(self, Mechanism::RandomizedGreedy | Mechanism::RandomizedFit)
    }

    /// Whether the mechanism is claimed to resist hiding deviations.
    pub fn is_strategyproof(&self) -> bool {
        !matches!(self, Mechanism::NaiveGreedy)
    }

    /// Guaranteed worst-case ratio of (expected) value to the optimum.
    pub fn ratio_floor(&self, agent_count: usize) -> Rational {
        match self {
            Mechanism::NaiveGreedy | Mechanism::Greedy => Rational::zero(),
            Mechanism::SingleGreedy => Rational::new(1, 3),
            Mechanism::BestIndividual => Rational::new(1, agent_count.max(1) as i64),
            Mechanism::RandomizedGreedy | Mechanism::LargeFit => Rational::new(1, 2),
            Mechanism::FitTwo { beta } => fit_two_floor(beta),
            Mechanism::RandomizedFit => Rational::new(2, 3),
        }
    }

    pub fn run(&self, instance: &Instance) -> Result<OutcomeDistribution, MechanismError> {
        self.run_with(instance, Limits::default())
    }

    pub fn run_with(&self, instance: &Instance, limits: Limits) -> Result<OutcomeDistribution, MechanismError> {
        match self {
            Mechanism::NaiveGreedy => Ok(naive_greedy(instance)),
            Mechanism::Greedy => greedy(instance, limits),
            Mechanism::SingleGreedy => single_greedy(instance, limits),
            Mechanism::BestIndividual => best_individual(instance, limits),
            Mechanism::RandomizedGreedy => randomized_greedy(instance, limits),
            Mechanism::FitTwo { beta } => fit_two(instance, beta, limits),
            Mechanism::LargeFit => large_fit(instance, limits),
            Mechanism::RandomizedFit => randomized_fit(instance, limits),
        }
    }
}

/// min{β, (1−β)/β}.
pub fn fit_two_floor(beta: &Rational) -> Rational {
    let other = (Rational::one() - beta) / beta;
    if *beta < other {
        beta.clone()
    } else {
        other
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mechanism::FitTwo { beta } => write!(f, "fit_two:{beta}"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseMechanismError {
    #[error("unknown mechanism {name:?}; expected one of {known}", name = .0, known = Mechanism::ALL_NAMES.join(", "))]
    Unknown(String),
    #[error("mechanism {0} takes no parameter")]
    UnexpectedParameter(String),
    #[error("bad beta: {0}")]
    Beta(#[from] ParseRationalError),
}

impl FromStr for Mechanism {
    type Err = ParseMechanismError;

    /// Accepts names such as `greedy` or `fit_two:987/1597`. Hyphens may
    /// replace underscores. A bare `fit_two` uses [`default_beta`].
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let name = name.to_ascii_lowercase().replace('-', "_");
        let mech = match name.as_str() {
            "naive_greedy" => Mechanism::NaiveGreedy,
            "greedy" => Mechanism::Greedy,
            "single_greedy" => Mechanism::SingleGreedy,
            "best_individual" => Mechanism::BestIndividual,
            "randomized_greedy" => Mechanism::RandomizedGreedy,
            "fit_two" => {
                let beta = match param {
                    Some(p) => p.parse::<Rational>()?,
                    None => default_beta(),
                };
                return Ok(Mechanism::FitTwo { beta });
            }
            "large_fit" => Mechanism::LargeFit,
            "randomized_fit" => Mechanism::RandomizedFit,
            _ => return Err(ParseMechanismError::Unknown(s.to_string())),
        };
        if param.is_some() {
            return Err(ParseMechanismError::UnexpectedParameter(name));
        }
        Ok(mech)
    }
}
