//! Randomized consistency checks for the equilibrium machinery: the
//! transferable-utility solver against direct demand verification, the
//! pseudo-equilibrium extension property for unimodular (strong-substitutes)
//! valuations, the income-effects search against the exact per-allocation
//! decision, and the welfare theorems on found equilibria.

mod common;

use common::*;
use indivisible::demand::quasilinear_demand;
use indivisible::equilibrium::{
    decide_marshallian_ce, is_pareto_efficient, is_pseudo_equilibrium, solve_income_ce,
    solve_tu_ce, support_pareto, verify_ce, CEOutcome, IncomeParams, MarshallianDecision,
    Refutation, TuOutcome,
};
use indivisible::model::{
    Bundle, ConsumptionBundle, Economy, EndowmentAllocation, PriceVector, TuAgent, TuEconomy,
};
use indivisible::rational::{int, rat, Rat};
use indivisible::structure::is_strong_substitutes;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn random_tu_economy(rng: &mut ChaCha8Rng) -> TuEconomy {
    let v1 = random_box_valuation(rng, 2, 1, 10);
    let v2 = random_box_valuation(rng, 2, 1, 10);
    let pick = |rng: &mut ChaCha8Rng, v: &indivisible::model::Valuation| -> Bundle {
        let all: Vec<&Bundle> = v.domain().collect();
        all[rng.gen_range(0..all.len())].clone()
    };
    let total = pick(rng, &v1).add(&pick(rng, &v2));
    TuEconomy {
        goods: vec!["a".into(), "b".into()],
        agents: vec![
            TuAgent {
                name: "one".into(),
                valuation: v1,
            },
            TuAgent {
                name: "two".into(),
                valuation: v2,
            },
        ],
        total_endowment: total,
    }
}

#[test]
fn tu_outcomes_are_internally_verified_on_random_economies() {
    let mut rng = rng(31);
    let mut found = 0;
    for _ in 0..80 {
        let h = random_tu_economy(&mut rng);
        match solve_tu_ce(&h).unwrap() {
            TuOutcome::Found {
                price,
                allocation,
                system,
            } => {
                found += 1;
                assert_eq!(allocation.total(h.dim()), h.total_endowment);
                assert!(system.satisfied_by(&price.0));
                for (agent, x) in h.agents.iter().zip(&allocation.0) {
                    assert!(
                        quasilinear_demand(&agent.valuation, &price).contains(x),
                        "supported bundles must be demanded"
                    );
                }
                assert!(is_pseudo_equilibrium(&h, &price));
            }
            TuOutcome::NotFound {
                certificate,
                system,
                ..
            } => {
                assert!(certificate.verify(&system));
            }
        }
    }
    assert!(found > 0, "the sample should contain solvable economies");
    assert!(found < 80, "the sample should contain unsolvable economies");
}

/// Whether some split of the total endowment is demanded coordinate-wise at
/// price `p` — i.e. whether `p` is an equilibrium price, decided by brute
/// force over the (at most four) splits of a two-good 0/1 endowment.
fn supports_some_allocation(h: &TuEconomy, p: &PriceVector) -> bool {
    let demands: Vec<_> = h
        .agents
        .iter()
        .map(|a| quasilinear_demand(&a.valuation, p))
        .collect();
    for x1 in demands[0].iter() {
        for x2 in demands[1].iter() {
            if x1.add(x2) == h.total_endowment {
                return true;
            }
        }
    }
    false
}

#[test]
fn pseudo_equilibrium_prices_extend_under_strong_substitutes() {
    let mut rng = rng(32);
    let mut economies = 0;
    while economies < 12 {
        let h = random_tu_economy(&mut rng);
        if !h
            .agents
            .iter()
            .all(|a| is_strong_substitutes(&a.valuation).unwrap())
        {
            continue;
        }
        economies += 1;
        let has_ce = solve_tu_ce(&h).unwrap().is_found();
        for n1 in 0..=8 {
            for n2 in 0..=8 {
                let p = PriceVector(vec![rat(n1, 2), rat(n2, 2)]);
                let pseudo = is_pseudo_equilibrium(&h, &p);
                let clears = supports_some_allocation(&h, &p);
                // An equilibrium price is always a pseudo-equilibrium price.
                if clears {
                    assert!(pseudo);
                }
                // Under concave valuations of unimodular demand type, the
                // converse holds whenever any equilibrium exists.
                if pseudo && has_ce {
                    assert!(
                        clears,
                        "pseudo-equilibrium price must clear the market when an equilibrium exists"
                    );
                }
            }
        }
    }
}

fn random_income_economy(rng: &mut ChaCha8Rng) -> (Economy, EndowmentAllocation) {
    let mut agents = Vec::new();
    for _ in 0..2 {
        agents.push(if rng.gen_bool(0.5) {
            random_quasilinear_agent(rng, 2, 8)
        } else {
            random_quasilog_agent(rng, 2, 10)
        });
    }
    let endowments: Vec<ConsumptionBundle> = agents
        .iter()
        .map(|a| {
            let goods = {
                let all: Vec<&Bundle> = a.feasible_set().collect();
                all[rng.gen_range(0..all.len())].clone()
            };
            ConsumptionBundle::new(int(rng.gen_range(1..=6)), goods)
        })
        .collect();
    let total = endowments[0].goods.add(&endowments[1].goods);
    let economy = Economy {
        goods: vec!["a".into(), "b".into()],
        agents,
        total_endowment: total,
    };
    (economy, EndowmentAllocation(endowments))
}

#[test]
fn income_search_agrees_with_the_exact_decision() {
    let mut rng = rng(33);
    let params = IncomeParams::default();
    let mut found = 0;
    for _ in 0..40 {
        let (economy, endow) = random_income_economy(&mut rng);
        let outcome = solve_income_ce(&economy, &endow, &params).unwrap();
        let decision = decide_marshallian_ce(&economy, &endow).unwrap();
        match (&outcome, &decision) {
            (
                CEOutcome::Found {
                    price,
                    allocation,
                    money,
                },
                MarshallianDecision::Exists { .. },
            ) => {
                found += 1;
                assert!(verify_ce(&economy, &endow, price, allocation).unwrap());
                // Walras' law: trade conserves total money.
                let before: Rat = endow.0.iter().map(|c| c.money.clone()).sum();
                let after: Rat = money.iter().cloned().sum();
                assert_eq!(before, after);
            }
            (
                CEOutcome::NotFound(Refutation::AllAllocationsRefuted { .. }),
                MarshallianDecision::Refuted { .. },
            ) => {}
            (o, d) => panic!("search and exact decision disagree: {o:?} vs {d:?}"),
        }
    }
    assert!(found > 0, "the sample should contain solvable economies");
}

#[test]
fn found_equilibria_are_pareto_efficient_and_supportable() {
    let mut rng = rng(34);
    let params = IncomeParams::default();
    let mut checked = 0;
    for _ in 0..40 {
        let (economy, endow) = random_income_economy(&mut rng);
        if let CEOutcome::Found {
            allocation, money, ..
        } = solve_income_ce(&economy, &endow, &params).unwrap()
        {
            checked += 1;
            let profile: Vec<ConsumptionBundle> = money
                .iter()
                .zip(&allocation.0)
                .map(|(m, x)| ConsumptionBundle::new(m.clone(), x.clone()))
                .collect();
            assert!(
                is_pareto_efficient(&economy, &profile).unwrap(),
                "equilibrium consumption must be Pareto efficient"
            );
            assert!(
                support_pareto(&economy, &profile).unwrap().is_some(),
                "equilibrium consumption must be supportable"
            );
        }
    }
    assert!(checked > 0, "the sample should contain solvable economies");
}
