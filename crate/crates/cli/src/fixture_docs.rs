//! The worked examples as serializable documents, generated from the core
//! library's code constants so emitted files can never drift from the
//! objects the tests exercise.

use serde_json::Value;

use indivisible::fixtures as fx;
use indivisible::model::{Agent, Bundle, ConsumptionBundle, Economy, EndowmentAllocation};
use indivisible::model::UtilityModel;
use indivisible::rational::int;

use crate::document::{EconomyDocument, VectorSetDocument};

/// Names accepted by the `fixtures` command, in emission order.
pub const FIXTURE_NAMES: [&str; 5] = [
    "complements_pair",
    "income_effects_pair",
    "housing_market",
    "staircase",
    "cyclic_demand_type",
];

/// The staircase valuation wrapped as a one-agent quasilinear economy, so
/// the document commands (demand, check) can address it.
fn staircase_economy() -> (Economy, EndowmentAllocation) {
    let v = fx::staircase_valuation();
    let economy = Economy {
        goods: vec!["good1".into(), "good2".into()],
        agents: vec![Agent::new("j", UtilityModel::Quasilinear(v))],
        total_endowment: Bundle(vec![3, 1]),
    };
    let endowments =
        EndowmentAllocation(vec![ConsumptionBundle::new(int(0), Bundle(vec![3, 1]))]);
    (economy, endowments)
}

/// The document for one fixture name, or `None` for an unknown name.
pub fn fixture_document(name: &str) -> Option<Value> {
    let econ_doc = |pair: (Economy, EndowmentAllocation)| {
        let (economy, endowments) = pair;
        serde_json::to_value(EconomyDocument::from_economy(&economy, Some(&endowments)))
            .expect("fixture documents serialize")
    };
    match name {
        "complements_pair" => Some(econ_doc(fx::complements_pair_economy())),
        "income_effects_pair" => Some(econ_doc(fx::income_effects_pair_economy())),
        "housing_market" => Some(econ_doc(fx::housing_market_economy())),
        "staircase" => Some(econ_doc(staircase_economy())),
        "cyclic_demand_type" => Some(
            serde_json::to_value(VectorSetDocument::from_set(&fx::cyclic_demand_type()))
                .expect("fixture documents serialize"),
        ),
        _ => None,
    }
}
