//! Seeded random generators shared by the integration suites. Everything is
//! deterministic: each suite fixes its seeds, so every run exercises the
//! same instances.

#![allow(dead_code)]

use indivisible::model::{
    Agent, Bundle, ConsumptionBundle, PriceVector, TabulatedFamily, UtilityModel, Valuation,
};
use indivisible::rational::{int, rat, Rat};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every bundle of the box `[0, bound]^dim`, in lexicographic order.
pub fn box_bundles(dim: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..dim {
        let mut next = Vec::new();
        for prefix in &out {
            for c in 0..=bound {
                let mut item = prefix.clone();
                item.push(c);
                next.push(item);
            }
        }
        out = next;
    }
    out
}

/// Random integer-valued valuation on the full box `[0, bound]^dim` with
/// values in `0..=max_value`.
pub fn random_box_valuation(
    rng: &mut ChaCha8Rng,
    dim: usize,
    bound: i64,
    max_value: i64,
) -> Valuation {
    let pairs: Vec<(Vec<i64>, Rat)> = box_bundles(dim, bound)
        .into_iter()
        .map(|b| (b, int(rng.gen_range(0..=max_value))))
        .collect();
    Valuation::from_pairs(pairs).expect("box domains are valid")
}

/// Random quasilinear agent on the 0/1 box.
pub fn random_quasilinear_agent(rng: &mut ChaCha8Rng, dim: usize, max_value: i64) -> Agent {
    Agent::new(
        "ql",
        UtilityModel::Quasilinear(random_box_valuation(rng, dim, 1, max_value)),
    )
}

/// Random quasilog agent: strictly negative quasivaluation on the 0/1 box
/// with depths in `-max_depth..=-1`.
pub fn random_quasilog_agent(rng: &mut ChaCha8Rng, dim: usize, max_depth: i64) -> Agent {
    let pairs: Vec<(Vec<i64>, Rat)> = box_bundles(dim, 1)
        .into_iter()
        .map(|b| (b, int(-rng.gen_range(1..=max_depth))))
        .collect();
    Agent::new(
        "qlog",
        UtilityModel::Quasilog(Valuation::from_pairs(pairs).expect("box domains are valid")),
    )
}

/// Random tabulated agent on the 0/1 box: three grid levels with pointwise
/// strictly decreasing valuations and no money floor (a reachable floor
/// would break the Marshallian/Hicksian correspondence by design).
pub fn random_tabulated_agent(rng: &mut ChaCha8Rng, dim: usize) -> Agent {
    let mut current: Vec<(Vec<i64>, Rat)> = box_bundles(dim, 1)
        .into_iter()
        .map(|b| (b, int(rng.gen_range(0..=8))))
        .collect();
    let mut valuations = Vec::new();
    for _ in 0..3 {
        valuations.push(
            Valuation::from_pairs(current.clone()).expect("box domains are valid"),
        );
        current = current
            .into_iter()
            .map(|(b, v)| {
                let drop = int(rng.gen_range(1..=4));
                (b, v - drop)
            })
            .collect();
    }
    let family = TabulatedFamily::new(vec![int(0), int(1), int(3)], valuations, None)
        .expect("generated families are valid");
    Agent::new("tab", UtilityModel::Tabulated(family))
}

/// Random price with numerators in `0..=max_numer` and denominators up to 4.
pub fn random_price(rng: &mut ChaCha8Rng, dim: usize, max_numer: i64) -> PriceVector {
    PriceVector(
        (0..dim)
            .map(|_| rat(rng.gen_range(0..=max_numer), rng.gen_range(1..=4)))
            .collect(),
    )
}

/// A uniformly random bundle from the agent's feasible set.
pub fn random_domain_bundle(rng: &mut ChaCha8Rng, agent: &Agent) -> Bundle {
    let all: Vec<&Bundle> = agent.feasible_set().collect();
    all[rng.gen_range(0..all.len())].clone()
}

/// A random feasible endowment for the agent: a domain bundle plus integer
/// money in `1..=max_money` (always above every model's money floor).
pub fn random_endowment(rng: &mut ChaCha8Rng, agent: &Agent, max_money: i64) -> ConsumptionBundle {
    ConsumptionBundle::new(
        int(rng.gen_range(1..=max_money)),
        random_domain_bundle(rng, agent),
    )
}
