//! Instance sources: seeded generators, named instances, witness families,
//! and files.

pub mod catalog;
pub mod families;
pub mod io;

use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::model::{Instance, InstanceError, Item};
use crate::rational::Rational;

pub use catalog::{fig3_hidden_item, paper_instance, CATALOG};
pub use families::{fibonacci, lb_det_family, lb_rand_family, FamilyPair, GoldenRatioApprox};
pub use io::{parse_instance, read_instance, render_instance, write_instance};

#[derive(Debug, thiserror::Error)]
pub enum InstancesError {
    #[error("unknown catalog instance {name:?}; known: {known}", name = .0, known = CATALOG.join(", "))]
    UnknownName(String),
    #[error("Fibonacci index k = {0} is out of range")]
    InvalidK(u32),
    #[error("epsilon {0} must be positive and keep the near item above 1")]
    InvalidEpsilon(Rational),
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Schema(#[from] InstanceError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    GeneralRandom,
    UnitDensityRandom,
    TieHeavy,
    PaperNamed,
    LbDet,
    LbRand,
}

impl GeneratorKind {
    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::GeneralRandom => "general-random",
            GeneratorKind::UnitDensityRandom => "unit-density-random",
            GeneratorKind::TieHeavy => "tie-heavy",
            GeneratorKind::PaperNamed => "paper-named",
            GeneratorKind::LbDet => "lb-det",
            GeneratorKind::LbRand => "lb-rand",
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorKind {
    type Err = InstancesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.replace('_', "-").as_str() {
            "general-random" => GeneratorKind::GeneralRandom,
            "unit-density-random" => GeneratorKind::UnitDensityRandom,
            "tie-heavy" => GeneratorKind::TieHeavy,
            "paper-named" => GeneratorKind::PaperNamed,
            "lb-det" => GeneratorKind::LbDet,
            "lb-rand" => GeneratorKind::LbRand,
            _ => return Err(InstancesError::InvalidSpec(format!("unknown kind {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CapacityRule {
    Fixed(Rational),
    /// Capacity is this fraction of the total size, exactly.
    FractionOfTotal(Rational),
    /// A fraction drawn per instance from {1/4, 1/3, 1/2, 2/3, 3/4, 1},
    /// raised to the largest size when needed.
    RandomFraction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    /// Inclusive item-count range.
    pub items: (usize, usize),
    /// Inclusive agent-count range.
    pub agents: (usize, usize),
    pub value_max: Rational,
    pub size_max: Rational,
    pub capacity: CapacityRule,
    /// Force sizes equal to values (implied by `UnitDensityRandom`).
    pub unit_density: bool,
    pub max_denominator: u32,
    pub seed: u64,
}

pub const DEFAULT_MAX_DENOMINATOR: u32 = 64;

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, seed: u64) -> Self {
        let base = GeneratorSpec {
            kind,
            items: (1, 7),
            agents: (1, 3),
            value_max: Rational::from_integer(10),
            size_max: Rational::from_integer(10),
            capacity: CapacityRule::RandomFraction,
            unit_density: false,
            max_denominator: DEFAULT_MAX_DENOMINATOR,
            seed,
        };
        match kind {
            GeneratorKind::UnitDensityRandom => GeneratorSpec {
                unit_density: true,
                ..base
            },
            GeneratorKind::TieHeavy => GeneratorSpec {
                value_max: Rational::from_integer(4),
                size_max: Rational::from_integer(4),
                max_denominator: 1,
                ..base
            },
            _ => base,
        }
    }

    pub fn is_unit_density(&self) -> bool {
        self.unit_density || self.kind == GeneratorKind::UnitDensityRandom
    }

    pub fn validate(&self) -> Result<(), InstancesError> {
        let bad = |m: &str| Err(InstancesError::InvalidSpec(m.to_string()));
        if self.items.0 > self.items.1 {
            return bad("item-count range is empty");
        }
        if self.agents.0 > self.agents.1 || self.agents.0 == 0 {
            return bad("agent-count range must be non-empty and start at 1 or more");
        }
        if !self.value_max.is_positive() || !self.size_max.is_positive() {
            return bad("value and size bounds must be positive");
        }
        if self.max_denominator == 0 {
            return bad("denominator bound must be at least 1");
        }
        match &self.capacity {
            CapacityRule::Fixed(c) if !c.is_positive() => return bad("capacity must be positive"),
            CapacityRule::FractionOfTotal(f) => {
                if !f.is_positive() || *f > Rational::one() {
                    return bad("capacity fraction must lie in (0, 1]");
                }
                // Every item must fit: need item_count · f ≥ 1.
                if self.items.0 == 0 || Rational::from(self.items.0) * f < Rational::one() {
                    return bad("minimum item count too small for the capacity fraction");
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Deterministic in `(spec, index)`.
pub fn generate(spec: &GeneratorSpec, index: u64) -> Result<Instance, InstancesError> {
    spec.validate()?;
    match spec.kind {
        GeneratorKind::PaperNamed => paper_instance(CATALOG[(index % CATALOG.len() as u64) as usize]),
        GeneratorKind::LbDet => {
            let k = 2 + (index / 2 % 24) as u32;
            let eps = Rational::new(1, [100, 1000, 10_000][(index / 48 % 3) as usize]);
            let fam = lb_det_family(k, &eps)?;
            Ok(if index.is_multiple_of(2) {
                fam.truthful
            } else {
                fam.deviant
            })
        }
        GeneratorKind::LbRand => {
            let fam = lb_rand_family(2 + (index / 2 % 24) as u32)?;
            Ok(if index.is_multiple_of(2) {
                fam.truthful
            } else {
                fam.deviant
            })
        }
        _ => random_instance(spec, index),
    }
}

fn draw(rng: &mut ChaCha8Rng, max: &Rational, max_den: u32) -> Rational {
    let den = rng.gen_range(1..=max_den as i64);
    let top = (max * Rational::from_integer(den))
        .floor()
        .to_i64()
        .unwrap_or(i64::MAX)
        .max(1);
    Rational::new(rng.gen_range(1..=top), den)
}

fn random_instance(spec: &GeneratorSpec, index: u64) -> Result<Instance, InstancesError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index);
    let m = rng.gen_range(spec.items.0..=spec.items.1);
    let n = rng.gen_range(spec.agents.0..=spec.agents.1);
    let unit = spec.is_unit_density();
    let mut owners = Vec::with_capacity(m);
    let mut values = Vec::with_capacity(m);
    let mut sizes = Vec::with_capacity(m);
    for _ in 0..m {
        owners.push(rng.gen_range(0..n));
        let v = draw(&mut rng, &spec.value_max, spec.max_denominator);
        let s = if unit {
            v.clone()
        } else {
            draw(&mut rng, &spec.size_max, spec.max_denominator)
        };
        values.push(v);
        sizes.push(s);
    }
    let capacity = match &spec.capacity {
        CapacityRule::Fixed(c) => {
            for s in sizes.iter_mut() {
                if *s > *c {
                    *s = c.clone();
                }
            }
            c.clone()
        }
        CapacityRule::FractionOfTotal(f) => {
            let total: Rational = sizes.iter().sum();
            let c = &total * f;
            water_fill(&mut sizes, &c);
            c
        }
        CapacityRule::RandomFraction => {
            const FRACTIONS: [(i64, i64); 6] = [(1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (1, 1)];
            let (a, b) = FRACTIONS[rng.gen_range(0..FRACTIONS.len())];
            let total: Rational = sizes.iter().sum();
            let c = total * Rational::new(a, b);
            match sizes.iter().max() {
                Some(big) if *big > c => big.clone(),
                _ if c.is_zero() => Rational::one(),
                _ => c,
            }
        }
    };
    if unit {
        values.clone_from(&sizes);
    }
    let items = (0..m)
        .map(|k| Item::new(k as u32, owners[k], values[k].clone(), sizes[k].clone()))
        .collect();
    Ok(Instance::new(items, capacity, n)?)
}

/// Clamp sizes to `cap` and hand the excess to the items with room, in
/// index order, keeping the total unchanged.
fn water_fill(sizes: &mut [Rational], cap: &Rational) {
    let mut excess = Rational::zero();
    for s in sizes.iter_mut() {
        if *s > *cap {
            excess += &*s - cap;
            *s = cap.clone();
        }
    }
    for s in sizes.iter_mut() {
        if !excess.is_positive() {
            break;
        }
        let room = cap - &*s;
        let add = if room < excess { room } else { excess.clone() };
        *s += &add;
        excess -= &add;
    }
}
