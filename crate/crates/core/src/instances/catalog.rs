//! Named instances: the funding story, the greedy manipulation example, the
//! dominance cases, and the restricted-set comparison.

use crate::instances::InstancesError;
use crate::model::{AgentId, Instance, Item};
use crate::rational::Rational;

pub const CATALOG: [&str; 8] = [
    "figure1",
    "intro_funding",
    "fig3a",
    "fig3b",
    "fig3c",
    "fig3d",
    "fig4_left",
    "fig4_right",
];

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// Unit-density items listed as (value, owner), ids assigned in order.
fn unit(entries: &[(Rational, AgentId)], capacity: Rational, agents: usize) -> Instance {
    let items = entries
        .iter()
        .enumerate()
        .map(|(id, (v, owner))| Item::unit(id as u32, *owner, v.clone()))
        .collect();
    Instance::new(items, capacity, agents).expect("catalog instance is valid")
}

pub fn paper_instance(name: &str) -> Result<Instance, InstancesError> {
    let inst = match name {
        // Agents: 0 blue, 1 green, 2 orange.
        "figure1" => {
            let raw = [
                (10, 1, 0),
                (6, 1, 0),
                (25, 3, 1),
                (5, 5, 1),
                (20, 3, 2),
                (15, 3, 2),
                (8, 2, 2),
            ];
            let items = raw
                .iter()
                .enumerate()
                .map(|(id, &(v, s, o))| Item::new(id as u32, o, q(v), q(s)))
                .collect();
            Instance::new(items, q(10), 3).expect("catalog instance is valid")
        }
        // Agent 0 proposes 1/2 and 2/3, agent 1 proposes 1/2.
        "intro_funding" => unit(&[(r(1, 2), 0), (r(2, 3), 0), (r(1, 2), 1)], q(1), 2),
        // Agents: 0 blue, 1 orange, 2 violet, 3 green.
        "fig3a" => unit(
            &[
                (q(6), 0),
                (r(51, 10), 1),
                (q(5), 1),
                (r(9, 2), 0),
                (r(31, 10), 2),
                (q(3), 2),
                (q(2), 3),
                (q(1), 1),
            ],
            q(10),
            4,
        ),
        "fig3b" => unit(
            &[
                (q(6), 0),
                (r(11, 2), 1),
                (r(24, 5), 0),
                (q(4), 2),
                (r(7, 2), 3),
                (q(2), 3),
            ],
            q(10),
            4,
        ),
        // Agents: 0 blue, 1 orange, 2 green.
        "fig3c" => unit(
            &[
                (q(6), 0),
                (r(51, 10), 1),
                (r(21, 5), 0),
                (r(7, 2), 2),
                (r(5, 2), 2),
                (q(1), 1),
            ],
            q(10),
            3,
        ),
        "fig3d" => unit(
            &[
                (q(6), 0),
                (r(11, 2), 1),
                (r(24, 5), 1),
                (r(21, 5), 0),
                (q(4), 2),
                (q(2), 2),
            ],
            q(10),
            3,
        ),
        // Agents: 0 blue, 1 orange, 2 green.
        "fig4_left" => unit(
            &[(q(6), 0), (r(11, 2), 0), (q(5), 1), (q(1), 1), (q(4), 2), (r(5, 2), 2)],
            q(10),
            3,
        ),
        "fig4_right" => unit(&[(r(13, 2), 1), (q(4), 2), (q(1), 0)], q(10), 3),
        other => return Err(InstancesError::UnknownName(other.to_string())),
    };
    Ok(inst)
}

/// The item each dominance case hides, all owned by the orange agent 1.
pub fn fig3_hidden_item(name: &str) -> Option<u32> {
    match name {
        "fig3a" => Some(2),
        "fig3b" | "fig3c" | "fig3d" => Some(1),
        _ => None,
    }
}
