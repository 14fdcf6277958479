//! Hicksian valuations: the bridge from income effects to transferable
//! utility.
//!
//! Fixing a utility level `u` turns an agent's expenditure-minimization
//! problem into a quasilinear maximization problem: the *Hicksian valuation*
//! `V_H(x) = -s(x, u)` (negated compensation) values each bundle by how little
//! money it needs to reach `u`. Replacing every agent's utility function by
//! their Hicksian valuation at a fixed level yields a transferable-utility
//! economy — the *Hicksian economy* — on which equilibrium questions with
//! income effects can be studied level by level.

use crate::model::{
    Agent, Economy, Level, TabulatedFamily, TuAgent, TuEconomy, UtilityModel, Valuation,
};
use crate::rational::Rat;
use crate::{Error, Result};

/// A transferable-utility economy whose agents carry Hicksian valuations at
/// fixed utility levels.
pub type HicksianEconomy = TuEconomy;

/// The Hicksian valuation `V_H(x) = -s(x, u)` of `agent` at `level`.
///
/// For a quasilinear agent at level `u` this is `V - u`; for a quasilog agent
/// at scale `w` it is `w · v` (a positive rescaling of the quasivaluation);
/// for a tabulated family at grid index `i` it is the stored valuation, with
/// fractional indices interpolated piecewise linearly.
pub fn hicksian_valuation(agent: &Agent, level: &Level) -> Result<Valuation> {
    let mut pairs = Vec::with_capacity(agent.domain_valuation().len());
    for x in agent.feasible_set() {
        let s = agent.compensation(x, level)?;
        pairs.push((x.0.clone(), -s));
    }
    Valuation::from_pairs(pairs)
}

/// The Hicksian economy of `economy` at one fixed utility level per agent
/// (in agent order). Goods and total endowment carry over unchanged.
pub fn build_hicksian_economy(economy: &Economy, levels: &[Level]) -> Result<HicksianEconomy> {
    if levels.len() != economy.agents.len() {
        return Err(Error::DimensionMismatch {
            expected: economy.agents.len(),
            got: levels.len(),
        });
    }
    let mut agents = Vec::with_capacity(economy.agents.len());
    for (agent, level) in economy.agents.iter().zip(levels) {
        agents.push(TuAgent {
            name: agent.name.clone(),
            valuation: hicksian_valuation(agent, level)?,
        });
    }
    Ok(TuEconomy {
        goods: economy.goods.clone(),
        agents,
        total_endowment: economy.total_endowment.clone(),
    })
}

/// Builds a tabulated utility model from explicit per-level valuations.
///
/// The grid must be strictly increasing, the valuations must share one
/// domain, and raising the level must strictly lower every value (more
/// utility always costs more money); violations are rejected. The resulting
/// model's Hicksian valuation at grid index `i` is exactly `valuations[i]`.
/// Between and beyond grid points the family interpolates and extrapolates
/// linearly, approximating a continuum of levels.
pub fn family_from_grid(
    levels: Vec<Rat>,
    valuations: Vec<Valuation>,
    money_floor: Option<Rat>,
) -> Result<UtilityModel> {
    Ok(UtilityModel::Tabulated(TabulatedFamily::new(
        levels,
        valuations,
        money_floor,
    )?))
}
