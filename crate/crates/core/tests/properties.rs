//! Structural properties of the greedy solution and the unit-density
//! mechanisms, each against a naive oracle. The acceptance target runs the
//! same checks with more samples.

mod support;

use support::PROPERTIES;

const CASES: u32 = 500;

fn run(name: &str) {
    let prop = PROPERTIES.iter().find(|p| p.name == name).expect("registered property");
    if let Err(e) = (prop.run)(CASES) {
        panic!("{name}: {e}");
    }
}

macro_rules! property_tests {
    ($($test:ident => $name:literal,)*) => {
        $(#[test] fn $test() { run($name); })*

        #[test]
        fn every_property_has_a_test() {
            let named = [$($name),*];
            for p in PROPERTIES {
                assert!(named.contains(&p.name), "{} has no test", p.name);
            }
        }
    };
}

property_tests! {
    fill_equals_min => "fractional fill equals min(capacity, total size)",
    fractional_solves_relaxation => "fractional greedy solves the relaxation",
    fractional_bounds_opt => "fractional greedy bounds the optimum",
    smaller_prefix => "smaller prefix never lowers a fraction",
    hiding_other_share => "hiding never lowers another agent's share",
    hiding_own_share => "hiding never raises the hider's share",
    pivot_tops_restricted => "pivot tops the restricted set",
    above_pivot_never_fits => "items above the pivot never fit with it",
    large_pair_never_fits => "two large items of one agent never fit",
    deleted_pair_never_fits => "two deleted items never fit",
    covers_fitting_subset => "restricted greedy covers a fitting subset",
    overfull_subset_ratio => "restricted greedy ratio on an overfull subset",
    deletion_dominance => "deletion keeps restricted sets dominated",
    dominance_share => "dominance preserves the fractional share",
    raising_group_share => "raising a group's items raises its share",
    large_sets_shift => "large sets shift toward the other agents",
    dominance_reflexive => "dominance is reflexive",
    large_fit_easy_cases => "large fit easy cases match fit two at 2/3",
}
