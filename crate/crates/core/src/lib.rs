//! Strategyproof knapsack mechanisms over exact rationals.
//!
//! Agents own items with a value and a size; a mechanism sees the items the
//! agents report and packs a feasible subset. The crate provides the
//! mechanisms, an exact optimum oracle, instance generators, and an audit
//! harness that checks strategyproofness and approximation ratios by
//! exhaustive enumeration of hiding deviations.

pub mod audit;
pub mod cli;
pub mod greedy;
pub mod instances;
pub mod mechanisms;
pub mod model;
pub mod rational;
pub mod solver;

pub use mechanisms::{Mechanism, MechanismError, OutcomeDistribution};
pub use model::{AgentId, Instance, InstanceError, Item, ItemId, Outcome};
pub use rational::{ParseRationalError, Rational};
