//! Worked economies, valuations, and vector sets used throughout the test
//! suites and exposed by the command-line tool's `fixtures` command.
//!
//! Each fixture is generated from code constants (never parsed from disk),
//! so documentation, tests, and serialized output cannot drift apart.

use crate::model::{
    Agent, Bundle, ConsumptionBundle, Economy, EndowmentAllocation, UtilityModel, Valuation,
};
use crate::rational::int;
use crate::unimodular::DemandTypeVectorSet;

/// Shorthand for building a bundle from literal coordinates.
pub fn bundle(coords: &[i64]) -> Bundle {
    Bundle(coords.to_vec())
}

/// Shorthand for building a valuation from literal integer (bundle, value)
/// pairs; panics on empty or dimension-inconsistent input.
pub fn valuation(pairs: &[(&[i64], i64)]) -> Valuation {
    Valuation::from_pairs(pairs.iter().map(|&(x, v)| (x.to_vec(), int(v))))
        .expect("fixture valuations are nonempty and dimension-consistent")
}

/// The unit-demand substitutes valuation shared by the two pair economies:
/// one agent choosing at most one of two goods, valued 4 and 3.
pub fn unit_demand_pair_valuation() -> Valuation {
    valuation(&[(&[0, 0], 0), (&[1, 0], 4), (&[0, 1], 3)])
}

/// Two goods, two quasilinear agents, total endowment (1,1). The first agent
/// values only the full pair (strict complements, value 5); the second is a
/// unit-demand substitutes agent valuing the goods at 4 and 3. No
/// competitive equilibrium exists: supporting the welfare-maximizing
/// allocation would need prices summing to at most 5 with each price at
/// least 3.
pub fn complements_pair_economy() -> (Economy, EndowmentAllocation) {
    let vj = valuation(&[(&[0, 0], 0), (&[0, 1], 0), (&[1, 0], 0), (&[1, 1], 5)]);
    let economy = Economy {
        goods: vec!["good1".into(), "good2".into()],
        agents: vec![
            Agent::new("j", UtilityModel::Quasilinear(vj)),
            Agent::new("k", UtilityModel::Quasilinear(unit_demand_pair_valuation())),
        ],
        total_endowment: bundle(&[1, 1]),
    };
    let endowments = EndowmentAllocation(vec![
        ConsumptionBundle::new(int(3), bundle(&[0, 1])),
        ConsumptionBundle::new(int(3), bundle(&[1, 0])),
    ]);
    (economy, endowments)
}

/// Two goods, total endowment (1,1): a quasilog agent whose demand for the
/// pair collapses to nothing as the first price rises (a gross
/// complementarity that is purely an income effect — the quasivaluation
/// itself treats the goods as substitutes), trading with the same
/// unit-demand substitutes agent as in [`complements_pair_economy`]. A
/// competitive equilibrium exists: prices (3,2) with goods going to
/// ((1,0),(0,1)).
pub fn income_effects_pair_economy() -> (Economy, EndowmentAllocation) {
    let vj = valuation(&[
        (&[0, 0], -11),
        (&[0, 1], -7),
        (&[1, 0], -4),
        (&[1, 1], -1),
    ]);
    let economy = Economy {
        goods: vec!["good1".into(), "good2".into()],
        agents: vec![
            Agent::new("j", UtilityModel::Quasilog(vj)),
            Agent::new("k", UtilityModel::Quasilinear(unit_demand_pair_valuation())),
        ],
        total_endowment: bundle(&[1, 1]),
    };
    let endowments = EndowmentAllocation(vec![
        ConsumptionBundle::new(int(3), bundle(&[0, 1])),
        ConsumptionBundle::new(int(3), bundle(&[1, 0])),
    ]);
    (economy, endowments)
}

/// Three houses, three quasilog agents, each endowed with one house and some
/// money. Every agent consumes at most one house (unit demand), but their
/// feasible sets differ and incomes shape which house they chase. Unit
/// demand makes every Hicksian economy an assignment market, so equilibrium
/// exists for every endowment allocation despite the income effects.
pub fn housing_market_economy() -> (Economy, EndowmentAllocation) {
    let martine = valuation(&[
        (&[0, 0, 0], -12),
        (&[1, 0, 0], -6),
        (&[0, 1, 0], -4),
        (&[0, 0, 1], -2),
    ]);
    let ben = valuation(&[(&[0, 0, 0], -10), (&[1, 0, 0], -5), (&[0, 1, 0], -3)]);
    let chloe = valuation(&[(&[0, 0, 0], -8), (&[0, 1, 0], -2), (&[0, 0, 1], -5)]);
    let economy = Economy {
        goods: vec!["house1".into(), "house2".into(), "house3".into()],
        agents: vec![
            Agent::new("martine", UtilityModel::Quasilog(martine)),
            Agent::new("ben", UtilityModel::Quasilog(ben)),
            Agent::new("chloe", UtilityModel::Quasilog(chloe)),
        ],
        total_endowment: bundle(&[1, 1, 1]),
    };
    let endowments = EndowmentAllocation(vec![
        ConsumptionBundle::new(int(2), bundle(&[1, 0, 0])),
        ConsumptionBundle::new(int(3), bundle(&[0, 1, 0])),
        ConsumptionBundle::new(int(4), bundle(&[0, 0, 1])),
    ]);
    (economy, endowments)
}

/// A two-good valuation whose demand regions trace a staircase: the domain
/// is {0,…,3}² with the three outer corner bundles removed and the value of
/// a bundle is the total number of units. Its uniquely demanded bundles are
/// the five staircase corners and its minimal demand type is
/// ±{(1,0), (0,1), (1,−1)}.
pub fn staircase_valuation() -> Valuation {
    let mut pairs = Vec::new();
    for x1 in 0..=3i64 {
        for x2 in 0..=3i64 {
            if (x1, x2) == (2, 3) || (x1, x2) == (3, 2) || (x1, x2) == (3, 3) {
                continue;
            }
            pairs.push((vec![x1, x2], int(x1 + x2)));
        }
    }
    Valuation::from_pairs(pairs).expect("staircase domain is nonempty")
}

/// A five-good demand type allowing independent demand changes for each good
/// plus substitution from any good to its two neighbors around a circle.
/// Unimodular, yet not a relabeling of the strong-substitutes type.
pub fn cyclic_demand_type() -> DemandTypeVectorSet {
    DemandTypeVectorSet::new(vec![
        vec![1, 0, 0, 0, 0],
        vec![0, 1, 0, 0, 0],
        vec![0, 0, 1, 0, 0],
        vec![0, 0, 0, 1, 0],
        vec![0, 0, 0, 0, 1],
        vec![1, -1, 1, 0, 0],
        vec![0, 1, -1, 1, 0],
        vec![0, 0, 1, -1, 1],
        vec![1, 0, 0, 1, -1],
        vec![-1, 1, 0, 0, 1],
    ])
    .expect("cycle vectors are primitive")
}
