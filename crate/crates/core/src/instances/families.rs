//! Fibonacci approximations of the golden ratio and the two-instance
//! witness families built on them.

use num_bigint::BigInt;
use serde::Serialize;

use crate::instances::InstancesError;
use crate::model::{Instance, Item};
use crate::rational::Rational;

/// F(k+1)/F(k) for the Fibonacci numbers F(1) = F(2) = 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoldenRatioApprox {
    pub k: u32,
    pub phi: Rational,
}

pub const DEFAULT_K: u32 = 16;

pub fn fibonacci(k: u32) -> BigInt {
    let (mut a, mut b) = (BigInt::from(0), BigInt::from(1));
    for _ in 0..k {
        let next = &a + &b;
        a = b;
        b = next;
    }
    a
}

impl GoldenRatioApprox {
    pub fn new(k: u32) -> Result<Self, InstancesError> {
        if k == 0 {
            return Err(InstancesError::InvalidK(k));
        }
        Ok(GoldenRatioApprox {
            k,
            phi: Rational::from_bigs(fibonacci(k + 1), fibonacci(k)),
        })
    }

    /// φ_k² − φ_k − 1, which is ±1/F(k)².
    pub fn defect(&self) -> Rational {
        &self.phi * &self.phi - &self.phi - Rational::one()
    }

    /// 1/φ_k.
    pub fn inverse(&self) -> Rational {
        self.phi.recip()
    }

    /// 1/(5φ_k − 7), the randomized ceiling.
    pub fn randomized_ceiling(&self) -> Rational {
        (Rational::from_integer(5) * &self.phi - Rational::from_integer(7)).recip()
    }
}

/// A pair of instances where agent 0 hides one item to go from the first
/// to the second.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyPair {
    pub truthful: Instance,
    pub deviant: Instance,
    /// The item agent 0 hides.
    pub hidden: u32,
}

const BIG: u32 = 0;
const NEAR: u32 = 1;
const OTHER: u32 = 2;

/// Agent 0 owns φ_k and φ_k − ε, agent 1 owns 1, capacity φ_k + 1 − ε.
/// The second instance drops φ_k − ε.
pub fn lb_det_family(k: u32, epsilon: &Rational) -> Result<FamilyPair, InstancesError> {
    let g = GoldenRatioApprox::new(k)?;
    let near = &g.phi - epsilon;
    // ε must be positive and keep φ_k − ε strictly above the other item.
    if !epsilon.is_positive() || near <= Rational::one() {
        return Err(InstancesError::InvalidEpsilon(epsilon.clone()));
    }
    let capacity = &g.phi + Rational::one() - epsilon;
    let items = vec![
        Item::unit(BIG, 0, g.phi.clone()),
        Item::unit(NEAR, 0, near),
        Item::unit(OTHER, 1, Rational::one()),
    ];
    pair(items, capacity, NEAR)
}

/// Agent 0 owns φ_k and 1, agent 1 owns 1, capacity 2. The second instance
/// drops agent 0's unit item. The two unit items tie on purpose.
pub fn lb_rand_family(k: u32) -> Result<FamilyPair, InstancesError> {
    if k < 2 {
        return Err(InstancesError::InvalidK(k));
    }
    let g = GoldenRatioApprox::new(k)?;
    let items = vec![
        Item::unit(BIG, 0, g.phi.clone()),
        Item::unit(NEAR, 0, Rational::one()),
        Item::unit(OTHER, 1, Rational::one()),
    ];
    pair(items, Rational::from_integer(2), NEAR)
}

fn pair(items: Vec<Item>, capacity: Rational, hidden: u32) -> Result<FamilyPair, InstancesError> {
    let truthful = Instance::new(items, capacity, 2)?;
    let deviant = truthful.without(&[hidden].into());
    Ok(FamilyPair {
        truthful,
        deviant,
        hidden,
    })
}
