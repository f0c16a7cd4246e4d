//! Shared oracles, strategies and property checks for the integration
//! tests. The oracles are deliberately naive: subset enumeration, LP duality,
//! direct transcriptions of set definitions.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use mechlab::mechanisms::{a_dominates, compute_fit_sets, compute_large_sets, restricted_greedy};
use mechlab::solver::{solve_opt, Limits};
use mechlab::{AgentId, Instance, Item, ItemId, Mechanism, Rational};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub fn q(n: i64) -> Rational {
    Rational::from_integer(n)
}

pub fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

// ---------------------------------------------------------------- oracles

/// Best value over every subset of `items` whose total size fits.
pub fn brute_opt(items: &[Item], capacity: &Rational) -> Rational {
    assert!(items.len() <= 16, "oracle is exponential");
    let mut best = Rational::zero();
    for mask in 0u32..(1 << items.len()) {
        let (mut v, mut s) = (Rational::zero(), Rational::zero());
        for (k, it) in items.iter().enumerate() {
            if mask >> k & 1 == 1 {
                v += &it.value;
                s += &it.size;
            }
        }
        if s <= *capacity && v > best {
            best = v;
        }
    }
    best
}

pub fn agent_opt_value(inst: &Instance, agent: AgentId) -> Rational {
    brute_opt(&inst.agent_items(agent), inst.capacity())
}

/// Every agent's own optimum is strictly below `beta·C`.
pub fn all_agents_below(inst: &Instance, beta: &Rational) -> bool {
    let bar = beta * inst.capacity();
    (0..inst.agent_count()).all(|a| agent_opt_value(inst, a) < bar)
}

/// LP relaxation optimum through its dual: the minimum over the
/// breakpoints λ ∈ {0} ∪ densities of C·λ + Σ max(0, v − λ·s).
pub fn lp_opt(inst: &Instance) -> Rational {
    let mut lambdas = vec![Rational::zero()];
    lambdas.extend(inst.items().iter().map(|it| &it.value / &it.size));
    lambdas
        .iter()
        .map(|l| {
            let mut g = l * inst.capacity();
            for it in inst.items() {
                let slack = &it.value - &(l * &it.size);
                if slack.is_positive() {
                    g += slack;
                }
            }
            g
        })
        .min()
        .expect("at least λ = 0")
}

/// Items by density descending, then value descending, then id.
pub fn reference_order(inst: &Instance) -> Vec<Item> {
    let mut items = inst.items().to_vec();
    items.sort_by(|a, b| {
        let da = &a.value / &a.size;
        let db = &b.value / &b.size;
        db.cmp(&da).then(b.value.cmp(&a.value)).then(a.id.cmp(&b.id))
    });
    items
}

/// Fractional greedy fractions and the count of whole items.
pub fn reference_fractions(inst: &Instance) -> (BTreeMap<ItemId, Rational>, usize) {
    let mut room = inst.capacity().clone();
    let mut whole = 0;
    let mut x = BTreeMap::new();
    let mut open = true;
    for it in reference_order(inst) {
        let f = if open && it.size <= room {
            whole += 1;
            room -= &it.size;
            Rational::one()
        } else if open {
            open = false;
            &room / &it.size
        } else {
            Rational::zero()
        };
        x.insert(it.id, f);
    }
    (x, whole)
}

/// Σ v·x over the items satisfying `keep`.
pub fn weighted_share(inst: &Instance, keep: impl Fn(&Item) -> bool) -> Rational {
    let (x, _) = reference_fractions(inst);
    inst.items()
        .iter()
        .filter(|it| keep(it))
        .map(|it| &it.value * &x[&it.id])
        .sum()
}

/// Size of the items ahead of `id` in the greedy order.
pub fn prefix_size(inst: &Instance, id: ItemId) -> Rational {
    reference_order(inst)
        .iter()
        .take_while(|it| it.id != id)
        .map(|it| it.size.clone())
        .sum()
}

/// Candidate set, pivot and restricted set, straight from their definitions.
pub fn reference_fit_sets(inst: &Instance) -> (BTreeSet<ItemId>, ItemId, BTreeSet<ItemId>) {
    let cap = inst.capacity();
    let candidates: BTreeSet<ItemId> = inst
        .items()
        .iter()
        .filter(|i| {
            inst.items()
                .iter()
                .filter(|j| j.owner != i.owner && i.value > j.value)
                .all(|j| &i.value + &j.value <= *cap)
        })
        .map(|i| i.id)
        .collect();
    let pivot = largest(inst, &candidates);
    let pv = inst.item(pivot).unwrap().value.clone();
    let mut restricted: BTreeSet<ItemId> = inst
        .items()
        .iter()
        .filter(|i| &pv + &i.value <= *cap)
        .map(|i| i.id)
        .collect();
    restricted.insert(pivot);
    (candidates, pivot, restricted)
}

/// The most valuable item's owner keeps everything; others keep what fits
/// beside that item.
pub fn reference_large_set(inst: &Instance) -> BTreeSet<ItemId> {
    let all: BTreeSet<ItemId> = inst.ids().into_iter().collect();
    let top = inst.item(largest(inst, &all)).unwrap();
    inst.items()
        .iter()
        .filter(|i| i.owner == top.owner || &top.value + &i.value <= *inst.capacity())
        .map(|i| i.id)
        .collect()
}

/// Highest value in `ids`, lowest id on ties.
pub fn largest(inst: &Instance, ids: &BTreeSet<ItemId>) -> ItemId {
    *ids.iter()
        .max_by(|a, b| {
            let (va, vb) = (&inst.item(**a).unwrap().value, &inst.item(**b).unwrap().value);
            va.cmp(vb).then(b.cmp(a))
        })
        .expect("non-empty set")
}

pub fn reference_dominates(first: &Instance, second: &Instance, agent: AgentId) -> bool {
    let split = |inst: &Instance, own: bool| {
        let mut v: Vec<Rational> = inst
            .items()
            .iter()
            .filter(|it| (it.owner == agent) == own)
            .map(|it| it.value.clone())
            .collect();
        v.sort_by(|a, b| b.cmp(a));
        v
    };
    let (a1, a2) = (split(first, true), split(second, true));
    let (o1, o2) = (split(first, false), split(second, false));
    a1.len() >= a2.len()
        && o1.len() <= o2.len()
        && (0..a2.len()).all(|k| a1[k] >= a2[k])
        && (0..o1.len()).all(|k| o1[k] <= o2[k])
}

pub fn value_of(inst: &Instance, ids: &BTreeSet<ItemId>) -> Rational {
    ids.iter().map(|i| inst.item(*i).unwrap().value.clone()).sum()
}

pub fn subset_from_mask(inst: &Instance, mask: u32) -> BTreeSet<ItemId> {
    inst.items()
        .iter()
        .enumerate()
        .filter(|(k, _)| mask >> k & 1 == 1)
        .map(|(_, it)| it.id)
        .collect()
}

// ------------------------------------------------------------- generators

/// Every unit-density instance with up to `max_items` items, integer
/// values in 1..=`max_value` and `agents` agents, one per value multiset
/// and owner assignment. Ids follow ascending value.
pub fn exhaustive_unit_density(max_items: usize, max_value: i64, agents: usize, capacity: i64) -> Vec<Instance> {
    fn multisets(len: usize, min: i64, max: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        for v in min..=max {
            prefix.push(v);
            multisets(len, v, max, prefix, out);
            prefix.pop();
        }
    }
    let mut all = Vec::new();
    for m in 1..=max_items {
        let mut values = Vec::new();
        multisets(m, 1, max_value.min(capacity), &mut Vec::new(), &mut values);
        let assignments = agents.pow(m as u32);
        for vals in &values {
            for code in 0..assignments {
                let mut c = code;
                let items = vals
                    .iter()
                    .enumerate()
                    .map(|(k, v)| {
                        let owner = c % agents;
                        c /= agents;
                        Item::unit(k as ItemId, owner, q(*v))
                    })
                    .collect();
                all.push(Instance::new(items, q(capacity), agents).expect("valid by construction"));
            }
        }
    }
    all
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (1i64..=60, prop::sample::select(vec![1i64, 2, 3, 4, 5, 6, 8])).prop_map(|(n, d)| r(n, d))
}

/// Capacity between the largest size and the total size, in eighths.
fn capacity_for(sizes: &[Rational], step: i64) -> Rational {
    let max = sizes.iter().max().cloned().unwrap_or_else(Rational::one);
    let total: Rational = sizes.iter().cloned().sum();
    &max + &((&total - &max) * r(step, 8))
}

fn build(raw: Vec<(Rational, Rational, usize)>, agents: usize, step: i64) -> Instance {
    let sizes: Vec<Rational> = raw.iter().map(|(_, s, _)| s.clone()).collect();
    let cap = capacity_for(&sizes, step);
    let items = raw
        .into_iter()
        .enumerate()
        .map(|(k, (v, s, o))| Item::new(k as ItemId, o, v, s))
        .collect();
    Instance::new(items, cap, agents).expect("valid by construction")
}

pub fn general_instance(max_items: usize) -> impl Strategy<Value = Instance> {
    (1usize..=3)
        .prop_flat_map(move |n| {
            (
                Just(n),
                prop::collection::vec((small_rational(), small_rational(), 0..n), 1..=max_items),
                0i64..=8,
            )
        })
        .prop_map(|(n, raw, step)| build(raw, n, step))
}

pub fn unit_density_instance(max_items: usize) -> impl Strategy<Value = Instance> {
    (1usize..=4)
        .prop_flat_map(move |n| {
            (
                Just(n),
                prop::collection::vec((small_rational(), 0..n), 1..=max_items),
                0i64..=8,
            )
        })
        .prop_map(|(n, raw, step)| build(raw.into_iter().map(|(v, o)| (v.clone(), v, o)).collect(), n, step))
}

/// Many agents with items below two thirds of a fixed capacity, so that
/// often no agent reaches the threshold alone. Mixed with the generic
/// unit-density strategy.
pub fn spread_instance() -> BoxedStrategy<Instance> {
    let spread = (2usize..=5, 48i64..=72)
        .prop_flat_map(|(n, cap)| {
            let value = (1i64..=cap * 2 / 3, prop::sample::select(vec![1i64, 2, 3])).prop_map(|(num, den)| r(num, den));
            (Just(n), Just(cap), prop::collection::vec((value, 0..n), 2..=7))
        })
        .prop_map(|(n, cap, raw)| {
            let items = raw
                .into_iter()
                .enumerate()
                .map(|(k, (v, o))| Item::unit(k as ItemId, o, v))
                .collect();
            Instance::new(items, q(cap), n).expect("valid by construction")
        });
    prop_oneof![unit_density_instance(7), spread].boxed()
}

/// An instance with a threshold. Part of the samples draw every value from
/// [C/4, β·C), where pairs often fail to fit and no single item reaches
/// the threshold.
pub fn threshold_case() -> BoxedStrategy<(Instance, Rational)> {
    let near = (beta(), 2usize..=5, prop::sample::select(vec![60i64, 90, 120]))
        .prop_flat_map(|(b, n, cap)| {
            let hi = (b.to_f64() * cap as f64 * 2.0).ceil() as i64;
            let values = prop::collection::vec((cap / 2..hi, 0..n), 2..=7);
            (Just(b), Just(n), Just(cap), values)
        })
        .prop_map(|(b, n, cap, raw)| {
            let items = raw
                .into_iter()
                .enumerate()
                .map(|(k, (halves, o))| Item::unit(k as ItemId, o, r(halves, 2)))
                .collect();
            (Instance::new(items, q(cap), n).expect("valid by construction"), b)
        });
    prop_oneof![1 => (spread_instance(), beta()), 3 => near].boxed()
}

pub fn beta() -> impl Strategy<Value = Rational> {
    prop::sample::select(vec![r(1, 2), r(4, 7), r(3, 5), r(987, 1597), r(5, 8), r(2, 3)])
}

fn scales() -> impl Strategy<Value = Rational> {
    prop::sample::select(vec![r(1, 3), r(1, 2), r(3, 4), q(1), r(5, 4), r(3, 2), q(2)])
}

// ----------------------------------------------------------------- running

pub type Check = Result<(), TestCaseError>;

/// Runs `test` until `cases` samples satisfy its hypothesis. Deterministic.
pub fn check<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Check) -> Result<(), String> {
    let config = Config {
        cases,
        max_global_rejects: cases.saturating_mul(100),
        max_local_rejects: 1 << 20,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

pub struct Property {
    pub name: &'static str,
    pub run: fn(u32) -> Result<(), String>,
}

fn distinct(inst: &Instance) -> Check {
    prop_assume!(!inst.is_degenerate());
    Ok(())
}

fn pick_item(inst: &Instance, k: usize) -> Item {
    inst.items()[k % inst.len()].clone()
}

pub const PROPERTIES: &[Property] = &[
    Property {
        name: "fractional fill equals min(capacity, total size)",
        run: fill_equals_min,
    },
    Property {
        name: "fractional greedy solves the relaxation",
        run: fractional_solves_relaxation,
    },
    Property {
        name: "fractional greedy bounds the optimum",
        run: fractional_bounds_opt,
    },
    Property {
        name: "smaller prefix never lowers a fraction",
        run: smaller_prefix,
    },
    Property {
        name: "hiding never lowers another agent's share",
        run: hiding_other_share,
    },
    Property {
        name: "hiding never raises the hider's share",
        run: hiding_own_share,
    },
    Property {
        name: "pivot tops the restricted set",
        run: pivot_tops_restricted,
    },
    Property {
        name: "items above the pivot never fit with it",
        run: above_pivot_never_fits,
    },
    Property {
        name: "two large items of one agent never fit",
        run: large_pair_never_fits,
    },
    Property {
        name: "two deleted items never fit",
        run: deleted_pair_never_fits,
    },
    Property {
        name: "restricted greedy covers a fitting subset",
        run: covers_fitting_subset,
    },
    Property {
        name: "restricted greedy ratio on an overfull subset",
        run: overfull_subset_ratio,
    },
    Property {
        name: "deletion keeps restricted sets dominated",
        run: deletion_dominance,
    },
    Property {
        name: "dominance preserves the fractional share",
        run: dominance_share,
    },
    Property {
        name: "raising a group's items raises its share",
        run: raising_group_share,
    },
    Property {
        name: "large sets shift toward the other agents",
        run: large_sets_shift,
    },
    Property {
        name: "dominance is reflexive",
        run: dominance_reflexive,
    },
    Property {
        name: "large fit easy cases match fit two at 2/3",
        run: large_fit_easy_cases,
    },
];

fn fill_equals_min(cases: u32) -> Result<(), String> {
    check(cases, general_instance(7), |inst| {
        let sol = mechlab::greedy::fractional_greedy(&inst);
        let total = inst.total_size();
        let expect = if total < *inst.capacity() {
            total
        } else {
            inst.capacity().clone()
        };
        prop_assert_eq!(sol.size(&inst), expect);
        let (x, whole) = reference_fractions(&inst);
        prop_assert_eq!(sol.ell, whole);
        for (id, f) in &x {
            prop_assert_eq!(sol.fraction(*id), Some(f));
        }
        Ok(())
    })
}

fn fractional_solves_relaxation(cases: u32) -> Result<(), String> {
    check(cases, general_instance(7), |inst| {
        let sol = mechlab::greedy::fractional_greedy(&inst);
        prop_assert!(sol.fractions.iter().all(|f| !f.is_negative() && *f <= Rational::one()));
        prop_assert!(sol.size(&inst) <= *inst.capacity());
        prop_assert_eq!(sol.value(&inst), lp_opt(&inst));
        Ok(())
    })
}

fn fractional_bounds_opt(cases: u32) -> Result<(), String> {
    check(cases, general_instance(7), |inst| {
        let opt = brute_opt(inst.items(), inst.capacity());
        let solved = solve_opt(inst.items(), inst.capacity()).unwrap();
        prop_assert_eq!(&solved.value, &opt);
        prop_assert!(solved.is_feasible_for(&inst));
        prop_assert!(mechlab::greedy::fractional_greedy(&inst).value(&inst) >= opt);
        Ok(())
    })
}

fn smaller_prefix(cases: u32) -> Result<(), String> {
    let strategy = (
        general_instance(6),
        any::<u32>(),
        any::<usize>(),
        prop::collection::vec((small_rational(), small_rational(), any::<usize>()), 0..=3),
    );
    check(cases, strategy, |(inst, hide, pick, extra)| {
        let item = pick_item(&inst, pick);
        let mut hidden = subset_from_mask(&inst, hide);
        hidden.remove(&item.id);
        let mut items: Vec<Item> = inst.without(&hidden).items().to_vec();
        for (k, (v, s, o)) in extra.into_iter().enumerate() {
            prop_assume!(s <= *inst.capacity());
            items.push(Item::new(100 + k as ItemId, o % inst.agent_count(), v, s));
        }
        let other = Instance::new(items, inst.capacity().clone(), inst.agent_count()).unwrap();
        prop_assume!(prefix_size(&inst, item.id) >= prefix_size(&other, item.id));
        let x = reference_fractions(&inst).0[&item.id].clone();
        let x_other = reference_fractions(&other).0[&item.id].clone();
        prop_assert!(x <= x_other, "{} > {}", x, x_other);
        Ok(())
    })
}

fn hiding_shares(inst: &Instance, pick: usize) -> Result<(Instance, Item), TestCaseError> {
    distinct(inst)?;
    prop_assume!(inst.len() >= 2);
    let item = pick_item(inst, pick);
    Ok((inst.without(&BTreeSet::from([item.id])), item))
}

fn hiding_other_share(cases: u32) -> Result<(), String> {
    check(cases, (general_instance(7), any::<usize>()), |(inst, pick)| {
        let (after, item) = hiding_shares(&inst, pick)?;
        let total = weighted_share(&inst, |_| true);
        let total_after = weighted_share(&after, |_| true);
        for b in (0..inst.agent_count()).filter(|b| *b != item.owner) {
            let before = weighted_share(&inst, |it| it.owner == b) / &total;
            let later = weighted_share(&after, |it| it.owner == b) / &total_after;
            prop_assert!(before <= later, "agent {}: {} > {}", b, before, later);
        }
        Ok(())
    })
}

fn hiding_own_share(cases: u32) -> Result<(), String> {
    check(cases, (general_instance(7), any::<usize>()), |(inst, pick)| {
        let (after, item) = hiding_shares(&inst, pick)?;
        let a = item.owner;
        let before = weighted_share(&inst, |it| it.owner == a) / weighted_share(&inst, |_| true);
        let later = weighted_share(&after, |it| it.owner == a) / weighted_share(&after, |_| true);
        prop_assert!(before >= later, "{} < {}", before, later);
        Ok(())
    })
}

/// A distinct unit-density instance where no agent reaches `beta·C` alone.
fn below_threshold(inst: &Instance, beta: &Rational) -> Check {
    distinct(inst)?;
    prop_assume!(all_agents_below(inst, beta));
    Ok(())
}

fn fit_sets_agree(inst: &Instance) -> Result<(BTreeSet<ItemId>, ItemId, BTreeSet<ItemId>), TestCaseError> {
    let reference = reference_fit_sets(inst);
    let sets = compute_fit_sets(inst).unwrap();
    prop_assert_eq!(&sets.candidates, &reference.0);
    prop_assert_eq!(sets.pivot, reference.1);
    prop_assert_eq!(&sets.restricted, &reference.2);
    Ok(reference)
}

fn pivot_tops_restricted(cases: u32) -> Result<(), String> {
    check(cases, threshold_case(), |(inst, beta)| {
        below_threshold(&inst, &beta)?;
        let (_, pivot, restricted) = fit_sets_agree(&inst)?;
        prop_assert_eq!(largest(&inst, &restricted), pivot);
        Ok(())
    })
}

fn above_pivot_never_fits(cases: u32) -> Result<(), String> {
    check(cases, threshold_case(), |(inst, beta)| {
        below_threshold(&inst, &beta)?;
        let (_, pivot, _) = fit_sets_agree(&inst)?;
        let pv = inst.item(pivot).unwrap().value.clone();
        let above: Vec<&Item> = inst.items().iter().filter(|j| j.value > pv).collect();
        prop_assume!(!above.is_empty());
        for j in above {
            prop_assert!(&pv + &j.value > *inst.capacity());
        }
        Ok(())
    })
}

fn large_pair_never_fits(cases: u32) -> Result<(), String> {
    check(cases, threshold_case(), |(inst, beta)| {
        below_threshold(&inst, &beta)?;
        let bar = (Rational::one() - &beta) * inst.capacity();
        let mut pairs = 0;
        for a in 0..inst.agent_count() {
            let big: Vec<Item> = inst.agent_items(a).into_iter().filter(|it| it.value >= bar).collect();
            for (k, i) in big.iter().enumerate() {
                for j in &big[k + 1..] {
                    pairs += 1;
                    prop_assert!(&i.value + &j.value > *inst.capacity());
                }
            }
        }
        prop_assume!(pairs > 0);
        Ok(())
    })
}

fn deleted_pair_never_fits(cases: u32) -> Result<(), String> {
    check(cases, threshold_case(), |(inst, beta)| {
        below_threshold(&inst, &beta)?;
        let (_, _, restricted) = fit_sets_agree(&inst)?;
        let out: Vec<&Item> = inst.items().iter().filter(|it| !restricted.contains(&it.id)).collect();
        prop_assume!(out.len() >= 2);
        for (k, i) in out.iter().enumerate() {
            for j in &out[k + 1..] {
                prop_assert!(&i.value + &j.value > *inst.capacity());
            }
        }
        Ok(())
    })
}

fn covers_fitting_subset(cases: u32) -> Result<(), String> {
    check(cases, (unit_density_instance(7), any::<u32>()), |(inst, mask)| {
        let subset = subset_from_mask(&inst, mask);
        let v = value_of(&inst, &subset);
        prop_assume!(!subset.is_empty() && v <= *inst.capacity());
        let out = restricted_greedy(&inst, &subset, Limits::default()).unwrap();
        prop_assert!(out.is_feasible_for(&inst));
        prop_assert!(out.value >= v, "{} < {}", out.value, v);
        Ok(())
    })
}

fn overfull_subset_ratio(cases: u32) -> Result<(), String> {
    check(cases, (unit_density_instance(7), any::<u32>()), |(inst, mask)| {
        distinct(&inst)?;
        let subset = subset_from_mask(&inst, mask);
        prop_assume!(value_of(&inst, &subset) > *inst.capacity());
        let sub = inst.restrict_to(&subset).unwrap();
        let (_, whole) = reference_fractions(&sub);
        prop_assume!(whole >= 2);
        let top = inst.item(largest(&inst, &subset)).unwrap().value.clone();
        let c = inst.capacity();
        let first = Rational::one() - &(&top / c);
        let second = r(1, 2) + &top / &(c * q(2));
        let factor = if first > second { first } else { second };
        let opt = brute_opt(inst.items(), c);
        let out = restricted_greedy(&inst, &subset, Limits::default()).unwrap();
        prop_assert!(out.is_feasible_for(&inst));
        prop_assert!(out.value >= &factor * &opt, "{} < {}·{}", out.value, factor, opt);
        Ok(())
    })
}

fn restricted_instance(inst: &Instance, ids: &BTreeSet<ItemId>) -> Instance {
    inst.restrict_to(ids).unwrap()
}

fn deletion_dominance(cases: u32) -> Result<(), String> {
    check(cases, threshold_case(), |(inst, beta)| {
        below_threshold(&inst, &beta)?;
        let (_, _, restricted) = fit_sets_agree(&inst)?;
        let before = restricted_instance(&inst, &restricted);
        for item in inst.items() {
            let after_all = inst.without(&BTreeSet::from([item.id]));
            let after_ids = if after_all.is_empty() {
                BTreeSet::new()
            } else {
                reference_fit_sets(&after_all).2
            };
            let after = restricted_instance(&inst, &after_ids);
            let lib = a_dominates(&before, &after, item.owner).unwrap();
            prop_assert_eq!(lib, reference_dominates(&before, &after, item.owner));
            prop_assert!(lib, "hiding item {} of agent {}", item.id, item.owner);
        }
        Ok(())
    })
}

/// A dominated partner for `inst`: the agent keeps a subset of their items
/// at lower values, everyone else keeps theirs at higher values and may
/// gain items.
fn dominated_partner(
    inst: &Instance,
    agent: AgentId,
    keep: u32,
    down: &[Rational],
    up: &[Rational],
    extra: &[(Rational, usize)],
) -> Instance {
    let c = inst.capacity();
    let cap = |v: Rational| if v > *c { c.clone() } else { v };
    let mut items = Vec::new();
    for (k, it) in inst.items().iter().enumerate() {
        if it.owner == agent {
            if keep >> k & 1 == 1 {
                items.push(Item::unit(
                    it.id,
                    agent,
                    &it.value * &down[k % down.len()].clone().min(Rational::one()),
                ));
            }
        } else {
            items.push(Item::unit(
                it.id,
                it.owner,
                cap(&it.value * &up[k % up.len()].clone().max(Rational::one())),
            ));
        }
    }
    if inst.agent_count() > 1 {
        for (k, (v, o)) in extra.iter().enumerate() {
            let mut owner = o % inst.agent_count();
            if owner == agent {
                owner = (owner + 1) % inst.agent_count();
            }
            items.push(Item::unit(100 + k as ItemId, owner, cap(v.clone())));
        }
    }
    Instance::new(items, c.clone(), inst.agent_count()).unwrap()
}

fn dominance_share(cases: u32) -> Result<(), String> {
    let strategy = (
        unit_density_instance(6),
        any::<usize>(),
        any::<u32>(),
        prop::collection::vec(scales(), 1..=6),
        prop::collection::vec(scales(), 1..=6),
        prop::collection::vec((small_rational(), any::<usize>()), 0..=2),
    );
    check(cases, strategy, |(inst, agent, keep, down, up, extra)| {
        let agent = agent % inst.agent_count();
        let other = dominated_partner(&inst, agent, keep, &down, &up, &extra);
        distinct(&inst)?;
        distinct(&other)?;
        prop_assert!(reference_dominates(&inst, &other, agent));
        prop_assert!(a_dominates(&inst, &other, agent).unwrap());
        let mine = weighted_share(&inst, |it| it.owner == agent);
        let theirs = weighted_share(&other, |it| it.owner == agent);
        prop_assert!(mine >= theirs, "{} < {}", mine, theirs);
        Ok(())
    })
}

fn raising_group_share(cases: u32) -> Result<(), String> {
    let strategy = (
        unit_density_instance(6),
        any::<u32>(),
        prop::collection::vec(scales(), 1..=6),
        prop::collection::vec((small_rational(), any::<usize>()), 0..=2),
    );
    check(cases, strategy, |(inst, group_mask, up, extra)| {
        let group: BTreeSet<AgentId> = (0..inst.agent_count()).filter(|a| group_mask >> a & 1 == 1).collect();
        prop_assume!(!group.is_empty());
        let c = inst.capacity();
        let cap = |v: Rational| if v > *c { c.clone() } else { v };
        let members: Vec<AgentId> = group.iter().copied().collect();
        let mut items = Vec::new();
        for (k, it) in inst.items().iter().enumerate() {
            let value = if group.contains(&it.owner) {
                cap(&it.value * &up[k % up.len()].clone().max(Rational::one()))
            } else {
                it.value.clone()
            };
            items.push(Item::unit(it.id, it.owner, value));
        }
        for (k, (v, o)) in extra.iter().enumerate() {
            items.push(Item::unit(
                100 + k as ItemId,
                members[o % members.len()],
                cap(v.clone()),
            ));
        }
        let raised = Instance::new(items, c.clone(), inst.agent_count()).unwrap();
        distinct(&inst)?;
        distinct(&raised)?;
        let before = weighted_share(&inst, |it| group.contains(&it.owner));
        let after = weighted_share(&raised, |it| group.contains(&it.owner));
        prop_assert!(before <= after, "{} > {}", before, after);
        Ok(())
    })
}

fn large_sets_shift(cases: u32) -> Result<(), String> {
    check(
        cases,
        prop_oneof![spread_instance(), threshold_case().prop_map(|(inst, _)| inst)],
        |inst| {
            below_threshold(&inst, &r(2, 3))?;
            let set = reference_large_set(&inst);
            prop_assert_eq!(&compute_large_sets(&inst).unwrap().restricted, &set);
            for item in inst.items() {
                let a = item.owner;
                let after_all = inst.without(&BTreeSet::from([item.id]));
                let after = if after_all.is_empty() {
                    BTreeSet::new()
                } else {
                    reference_large_set(&after_all)
                };
                let owned = |ids: &BTreeSet<ItemId>, mine: bool| -> BTreeSet<ItemId> {
                    ids.iter()
                        .copied()
                        .filter(|i| (inst.item(*i).unwrap().owner == a) == mine)
                        .collect()
                };
                prop_assert!(owned(&after, true).is_subset(&owned(&set, true)));
                prop_assert!(owned(&set, false).is_subset(&owned(&after, false)));
            }
            Ok(())
        },
    )
}

fn dominance_reflexive(cases: u32) -> Result<(), String> {
    check(cases, (general_instance(7), any::<usize>()), |(inst, agent)| {
        let agent = agent % inst.agent_count();
        prop_assert!(a_dominates(&inst, &inst, agent).unwrap());
        prop_assert!(reference_dominates(&inst, &inst, agent));
        Ok(())
    })
}

fn large_fit_easy_cases(cases: u32) -> Result<(), String> {
    check(cases, unit_density_instance(7), |inst| {
        distinct(&inst)?;
        let c = inst.capacity();
        let top = inst.items().iter().map(|it| it.value.clone()).max().unwrap();
        let large = Mechanism::LargeFit.run(&inst).unwrap().expected_value();
        prop_assert!(large >= top);
        let opt = brute_opt(inst.items(), c);
        prop_assert!(&large * &q(2) >= opt);
        if top <= c * r(1, 2) || top >= c * r(2, 3) {
            let fit = Mechanism::FitTwo { beta: r(2, 3) }.run(&inst).unwrap().expected_value();
            prop_assert_eq!(&large, &fit);
            prop_assert!(&large * &q(3) >= &opt * &q(2));
        }
        Ok(())
    })
}
