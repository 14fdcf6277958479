//! Demand correspondences: quasilinear, Marshallian, and Hicksian demand,
//! plus indirect utility, expenditure, and the duality check tying the
//! Marshallian and Hicksian sides together.
//!
//! All demand problems here are finite argmax/argmin problems over an
//! agent's feasible set, solved exactly in rational arithmetic; demand is
//! returned as the full set of optimizers, with no tie-breaking.

use std::collections::BTreeSet;
use std::fmt;

use crate::hicksian::hicksian_valuation;
use crate::model::{Agent, Bundle, ConsumptionBundle, Level, PriceVector, Valuation};
use crate::rational::Rat;
use crate::{Error, Result};

/// The set of optimal bundles of a demand problem. Nonempty by construction:
/// a finite argmax is always attained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandSet {
    bundles: BTreeSet<Bundle>,
}

impl DemandSet {
    pub fn contains(&self, x: &Bundle) -> bool {
        self.bundles.contains(x)
    }

    pub fn len(&self) -> usize {
        self.bundles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bundles.is_empty()
    }

    pub fn is_singleton(&self) -> bool {
        self.bundles.len() == 1
    }

    /// The unique element, when single-valued.
    pub fn singleton(&self) -> Option<&Bundle> {
        if self.is_singleton() {
            self.bundles.iter().next()
        } else {
            None
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Bundle> {
        self.bundles.iter()
    }

    pub fn bundles(&self) -> &BTreeSet<Bundle> {
        &self.bundles
    }
}

impl FromIterator<Bundle> for DemandSet {
    fn from_iter<T: IntoIterator<Item = Bundle>>(iter: T) -> Self {
        DemandSet {
            bundles: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a DemandSet {
    type Item = &'a Bundle;
    type IntoIter = std::collections::btree_set::Iter<'a, Bundle>;

    fn into_iter(self) -> Self::IntoIter {
        self.bundles.iter()
    }
}

impl fmt::Display for DemandSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.bundles.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

/// Collects all bundles attaining the maximum score.
fn argmax<I>(scored: I) -> DemandSet
where
    I: IntoIterator<Item = (Bundle, Rat)>,
{
    let mut best: Option<Rat> = None;
    let mut bundles = BTreeSet::new();
    for (x, score) in scored {
        match &best {
            Some(b) if *b > score => {}
            Some(b) if *b == score => {
                bundles.insert(x);
            }
            _ => {
                best = Some(score);
                bundles.clear();
                bundles.insert(x);
            }
        }
    }
    DemandSet { bundles }
}

/// Quasilinear demand `D(p)`: all bundles maximizing `V(x) - p·x`.
pub fn quasilinear_demand(v: &Valuation, p: &PriceVector) -> DemandSet {
    assert_eq!(
        v.dim(),
        p.dim(),
        "price dimension must match the valuation's"
    );
    argmax(v.pairs().map(|(x, value)| (x.clone(), value - p.dot(x))))
}

/// The money left after trading from `endow` to hold bundle `x` at prices
/// `p`: `m - p · (x - endowed goods)`.
fn residual_money(p: &PriceVector, endow: &ConsumptionBundle, x: &Bundle) -> Rat {
    &endow.money - p.dot(x) + p.dot(&endow.goods)
}

/// Marshallian demand `D_M(p, endow)`: all bundles maximizing utility over
/// the budget set. A bundle is affordable when the money left after trading
/// to it stays strictly above the agent's floor.
///
/// Errors with [`Error::EmptyFeasibleSet`] only when no bundle is affordable,
/// which cannot happen if `endow` is itself feasible for the agent.
pub fn marshallian_demand(
    agent: &Agent,
    p: &PriceVector,
    endow: &ConsumptionBundle,
) -> Result<DemandSet> {
    let mut scored = Vec::new();
    for x in agent.feasible_set() {
        let money = residual_money(p, endow, x);
        if !agent.money_feasible(&money) {
            continue;
        }
        let key = agent.utility_key(&ConsumptionBundle::new(money, x.clone()))?;
        scored.push((x.clone(), key));
    }
    if scored.is_empty() {
        return Err(Error::EmptyFeasibleSet);
    }
    Ok(argmax(scored))
}

/// Indirect utility: the level attained by Marshallian demand at `(p, endow)`
/// (quasilog levels are reported as the scale `w = e^u`).
pub fn indirect_utility(agent: &Agent, p: &PriceVector, endow: &ConsumptionBundle) -> Result<Level> {
    let demand = marshallian_demand(agent, p, endow)?;
    let x = demand.iter().next().expect("demand sets are nonempty");
    let money = residual_money(p, endow, x);
    agent.level_of(&ConsumptionBundle::new(money, x.clone()))
}

/// Hicksian demand `D_H(p, u)`: all bundles minimizing the expenditure
/// `s(x, u) + p·x` needed to reach utility level `u` — equivalently, the
/// quasilinear demand of the Hicksian valuation at `u`.
pub fn hicksian_demand(agent: &Agent, p: &PriceVector, level: &Level) -> Result<DemandSet> {
    Ok(quasilinear_demand(&hicksian_valuation(agent, level)?, p))
}

/// The expenditure function: `min_x s(x, u) + p·x`, attained exactly by the
/// members of [`hicksian_demand`].
pub fn expenditure(agent: &Agent, p: &PriceVector, level: &Level) -> Result<Rat> {
    let mut best: Option<Rat> = None;
    for x in agent.feasible_set() {
        let cost = agent.compensation(x, level)? + p.dot(x);
        if best.as_ref().is_none_or(|b| cost < *b) {
            best = Some(cost);
        }
    }
    best.ok_or(Error::EmptyFeasibleSet)
}

/// Checks the duality between the Marshallian and Hicksian sides at one
/// price/endowment pair: with `u` the indirect utility, Marshallian demand
/// must equal Hicksian demand at `u`, and the minimized expenditure must
/// exactly exhaust the endowment's market value `m + p·(endowed goods)`.
pub fn verify_demand_duality(
    agent: &Agent,
    p: &PriceVector,
    endow: &ConsumptionBundle,
) -> Result<bool> {
    let marshallian = marshallian_demand(agent, p, endow)?;
    let level = indirect_utility(agent, p, endow)?;
    let hicksian = hicksian_demand(agent, p, &level)?;
    let spend = expenditure(agent, p, &level)?;
    let wealth = &endow.money + p.dot(&endow.goods);
    Ok(marshallian == hicksian && spend == wealth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{
        complements_pair_economy, income_effects_pair_economy, staircase_valuation,
    };
    use crate::rational::{int, rat};

    fn bundle(coords: &[i64]) -> Bundle {
        Bundle(coords.to_vec())
    }

    fn prices(coords: &[(i64, i64)]) -> PriceVector {
        PriceVector(coords.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    fn set(coords: &[&[i64]]) -> DemandSet {
        coords.iter().map(|c| bundle(c)).collect()
    }

    #[test]
    fn staircase_demand_along_the_cheap_axis() {
        // At p = (1, 3/2) the whole first-good axis is optimal.
        let v = staircase_valuation();
        let d = quasilinear_demand(&v, &prices(&[(1, 1), (3, 2)]));
        assert_eq!(d, set(&[&[0, 0], &[1, 0], &[2, 0], &[3, 0]]));
    }

    #[test]
    fn unit_demand_tie_between_the_two_goods() {
        let (economy, _) = complements_pair_economy();
        let vk = economy.agents[1].domain_valuation();
        let d = quasilinear_demand(vk, &prices(&[(3, 1), (2, 1)]));
        assert_eq!(d, set(&[&[0, 1], &[1, 0]]));
        // At huge prices only the zero bundle survives.
        let d = quasilinear_demand(vk, &prices(&[(100, 1), (100, 1)]));
        assert_eq!(d, set(&[&[0, 0]]));
    }

    #[test]
    fn quasilog_marshallian_demand_flips_with_own_price() {
        let (economy, endow) = income_effects_pair_economy();
        let j = &economy.agents[0];
        let at = |p: &PriceVector| marshallian_demand(j, p, &endow.0[0]).unwrap();
        assert_eq!(at(&prices(&[(2, 1), (2, 1)])), set(&[&[1, 1]]));
        assert_eq!(at(&prices(&[(4, 1), (2, 1)])), set(&[&[0, 0]]));
        assert_eq!(at(&prices(&[(3, 1), (2, 1)])), set(&[&[1, 0]]));
    }

    #[test]
    fn quasilog_indirect_utility_as_scale() {
        let (economy, endow) = income_effects_pair_economy();
        let j = &economy.agents[0];
        let u = indirect_utility(j, &prices(&[(4, 1), (2, 1)]), &endow.0[0]).unwrap();
        assert_eq!(u, Level::Scale(rat(5, 11)));
        let u = indirect_utility(j, &prices(&[(3, 1), (2, 1)]), &endow.0[0]).unwrap();
        assert_eq!(u, Level::Scale(rat(1, 2)));
    }

    #[test]
    fn quasilinear_indirect_utility_with_no_goods_value() {
        let v = Valuation::from_pairs(vec![(vec![0, 0], int(0)), (vec![1, 0], int(0))]).unwrap();
        let agent = Agent::new("z", crate::model::UtilityModel::Quasilinear(v));
        let endow = ConsumptionBundle::new(int(5), bundle(&[0, 0]));
        let u = indirect_utility(&agent, &prices(&[(1, 1), (1, 1)]), &endow).unwrap();
        assert_eq!(u, Level::Utility(int(5)));
    }

    #[test]
    fn hicksian_demand_at_the_compensated_level() {
        let (economy, _) = income_effects_pair_economy();
        let j = &economy.agents[0];
        let w = Level::Scale(rat(5, 11));
        let d = hicksian_demand(j, &prices(&[(2, 1), (2, 1)]), &w).unwrap();
        assert_eq!(d, set(&[&[1, 0]]));
        let d = hicksian_demand(j, &prices(&[(4, 1), (2, 1)]), &w).unwrap();
        assert_eq!(d, set(&[&[0, 0]]));
    }

    #[test]
    fn hicksian_demand_of_quasilinear_agents_ignores_the_level() {
        let (economy, _) = complements_pair_economy();
        let j = &economy.agents[0];
        let p = prices(&[(5, 2), (5, 2)]);
        let base = quasilinear_demand(j.domain_valuation(), &p);
        for u in [int(-3), int(0), int(7)] {
            let d = hicksian_demand(j, &p, &Level::Utility(u)).unwrap();
            assert_eq!(d, base);
        }
    }

    #[test]
    fn expenditure_matches_worked_values() {
        let (economy, _) = income_effects_pair_economy();
        let j = &economy.agents[0];
        let w = Level::Scale(rat(5, 11));
        assert_eq!(
            expenditure(j, &prices(&[(2, 1), (2, 1)]), &w).unwrap(),
            rat(42, 11)
        );
        assert_eq!(
            expenditure(j, &prices(&[(4, 1), (2, 1)]), &w).unwrap(),
            int(5)
        );
    }

    #[test]
    fn expenditure_is_attained_by_hicksian_demand() {
        let (economy, _) = income_effects_pair_economy();
        let j = &economy.agents[0];
        let w = Level::Scale(rat(3, 7));
        let p = prices(&[(3, 1), (2, 1)]);
        let spend = expenditure(j, &p, &w).unwrap();
        for x in hicksian_demand(j, &p, &w).unwrap().iter() {
            assert_eq!(j.compensation(x, &w).unwrap() + p.dot(x), spend);
        }
    }

    #[test]
    fn duality_holds_at_worked_prices() {
        let (economy, endow) = income_effects_pair_economy();
        let j = &economy.agents[0];
        for p in [
            prices(&[(3, 1), (2, 1)]),
            prices(&[(2, 1), (2, 1)]),
            prices(&[(4, 1), (2, 1)]),
            prices(&[(7, 2), (1, 3)]),
        ] {
            assert!(verify_demand_duality(j, &p, &endow.0[0]).unwrap());
        }
    }

    #[test]
    fn duality_holds_for_quasilinear_agents() {
        let (economy, endow) = complements_pair_economy();
        for (agent, e) in economy.agents.iter().zip(&endow.0) {
            for p in [prices(&[(1, 1), (1, 2)]), prices(&[(9, 2), (4, 1)])] {
                assert!(verify_demand_duality(agent, &p, e).unwrap());
            }
        }
    }

    #[test]
    fn infeasible_endowment_money_is_rejected() {
        let (economy, _) = income_effects_pair_economy();
        let j = &economy.agents[0];
        // A quasilog agent with no money and no endowed goods can afford
        // nothing strictly above the floor.
        let broke = ConsumptionBundle::new(int(0), bundle(&[0, 0]));
        let err = marshallian_demand(j, &prices(&[(1, 1), (1, 1)]), &broke);
        assert_eq!(err, Err(Error::EmptyFeasibleSet));
    }

    #[test]
    fn budget_infeasible_bundles_are_excluded() {
        // At p' = (4,2) the bundle (1,1) would need money -1 < 0: excluded
        // for the quasilog agent even though it has the best quasivaluation.
        let (economy, endow) = income_effects_pair_economy();
        let j = &economy.agents[0];
        let d = marshallian_demand(j, &prices(&[(4, 1), (2, 1)]), &endow.0[0]).unwrap();
        assert!(!d.contains(&bundle(&[1, 1])));
    }
}
