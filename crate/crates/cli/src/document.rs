//! On-disk economy documents: a JSON layout with exact rationals as
//! `"p/q"` strings (plain integers accepted as shorthand), bundles as
//! integer arrays, and value tables keyed by comma-separated coordinates.
//!
//! The parse -> build -> serialize -> parse cycle is the identity on the
//! built objects, so documents can be regenerated from code without drift.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use indivisible::model::{
    validate_economy, Agent, Bundle, ConsumptionBundle, Economy, EndowmentAllocation,
    TabulatedFamily, UtilityModel, Valuation,
};
use indivisible::rational::{format_rat, parse_rat};
use indivisible::{DemandTypeVectorSet, Rat};

use crate::CliError;

/// A rational in a document: either an integer shorthand or a `"p/q"` string.
/// Serialization always emits the string form.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RatText {
    Int(i64),
    Text(String),
}

impl RatText {
    pub fn to_rat(&self) -> Result<Rat, CliError> {
        match self {
            RatText::Int(n) => Ok(indivisible::rational::int(*n)),
            RatText::Text(s) => {
                parse_rat(s).map_err(|e| CliError::input(format!("bad rational: {e}")))
            }
        }
    }

    pub fn from_rat(r: &Rat) -> RatText {
        RatText::Text(format_rat(r))
    }
}

/// Top-level document for an exchange economy, with optional per-agent
/// endowments (money plus goods).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconomyDocument {
    pub goods: Vec<String>,
    pub total_endowment: Vec<i64>,
    pub agents: Vec<AgentDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentDocument {
    pub name: String,
    pub utility: UtilityDocument,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub endowment: Option<EndowmentDocument>,
}

/// A utility model. `kind` selects the shape:
/// - `"quasilinear"`: money plus the valuation in `values`;
/// - `"quasilog"`: log money minus log of the (negative) table in `values`;
/// - `"tabulated"`: one table per entry of `levels`, optional `money_floor`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilityDocument {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<BTreeMap<String, RatText>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<RatText>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tables: Option<Vec<BTreeMap<String, RatText>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub money_floor: Option<RatText>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndowmentDocument {
    pub money: RatText,
    pub goods: Vec<i64>,
}

/// A bare set of demand-type vectors (for the unimodularity commands).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorSetDocument {
    pub vectors: Vec<Vec<i64>>,
}

/// Parses `"q1,q2,..."` into a bundle of the economy's dimension.
pub fn parse_bundle_key(key: &str, dim: usize) -> Result<Bundle, CliError> {
    let coords: Result<Vec<i64>, _> = key.split(',').map(|c| c.trim().parse::<i64>()).collect();
    let coords =
        coords.map_err(|_| CliError::input(format!("bad bundle key '{key}' (want q1,q2,...)")))?;
    if coords.len() != dim {
        return Err(CliError::input(format!(
            "bundle key '{key}' has {} coordinates, economy has {dim} goods",
            coords.len()
        )));
    }
    Ok(Bundle(coords))
}

/// Formats a bundle as a `"q1,q2,..."` table key.
pub fn bundle_key(x: &Bundle) -> String {
    x.0.iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn table_to_valuation(
    table: &BTreeMap<String, RatText>,
    dim: usize,
) -> Result<Valuation, CliError> {
    let mut pairs = Vec::with_capacity(table.len());
    for (key, value) in table {
        pairs.push((parse_bundle_key(key, dim)?.0, value.to_rat()?));
    }
    Valuation::from_pairs(pairs).map_err(CliError::from)
}

fn valuation_to_table(v: &Valuation) -> BTreeMap<String, RatText> {
    v.pairs()
        .map(|(x, val)| (bundle_key(x), RatText::from_rat(val)))
        .collect()
}

impl UtilityDocument {
    fn to_model(&self, dim: usize) -> Result<UtilityModel, CliError> {
        let values = || -> Result<Valuation, CliError> {
            let table = self.values.as_ref().ok_or_else(|| {
                CliError::input(format!("utility kind '{}' needs a 'values' table", self.kind))
            })?;
            table_to_valuation(table, dim)
        };
        match self.kind.as_str() {
            "quasilinear" => Ok(UtilityModel::Quasilinear(values()?)),
            "quasilog" => Ok(UtilityModel::Quasilog(values()?)),
            "tabulated" => {
                let levels = self
                    .levels
                    .as_ref()
                    .ok_or_else(|| CliError::input("tabulated utility needs 'levels'"))?
                    .iter()
                    .map(|r| r.to_rat())
                    .collect::<Result<Vec<_>, _>>()?;
                let tables = self
                    .tables
                    .as_ref()
                    .ok_or_else(|| CliError::input("tabulated utility needs 'tables'"))?
                    .iter()
                    .map(|t| table_to_valuation(t, dim))
                    .collect::<Result<Vec<_>, _>>()?;
                let floor = self.money_floor.as_ref().map(|r| r.to_rat()).transpose()?;
                let family = TabulatedFamily::new(levels, tables, floor)?;
                Ok(UtilityModel::Tabulated(family))
            }
            other => Err(CliError::input(format!(
                "unknown utility kind '{other}' (want quasilinear, quasilog, or tabulated)"
            ))),
        }
    }

    fn from_model(model: &UtilityModel) -> UtilityDocument {
        let (kind, values, levels, tables, money_floor) = match model {
            UtilityModel::Quasilinear(v) => {
                ("quasilinear", Some(valuation_to_table(v)), None, None, None)
            }
            UtilityModel::Quasilog(v) => ("quasilog", Some(valuation_to_table(v)), None, None, None),
            UtilityModel::Tabulated(fam) => (
                "tabulated",
                None,
                Some(fam.levels().iter().map(RatText::from_rat).collect()),
                Some(
                    (0..fam.grid_len())
                        .map(|i| valuation_to_table(fam.valuation_at(i)))
                        .collect(),
                ),
                fam.money_floor().map(RatText::from_rat),
            ),
        };
        UtilityDocument {
            kind: kind.to_string(),
            values,
            levels,
            tables,
            money_floor,
        }
    }
}

impl EconomyDocument {
    /// Builds and validates the economy; endowments are returned only when
    /// every agent carries one (a partial set is an input error).
    pub fn to_economy(&self) -> Result<(Economy, Option<EndowmentAllocation>), CliError> {
        let dim = self.goods.len();
        if self.total_endowment.len() != dim {
            return Err(CliError::input(format!(
                "total_endowment has {} coordinates, economy has {dim} goods",
                self.total_endowment.len()
            )));
        }
        let mut agents = Vec::with_capacity(self.agents.len());
        let mut endowments = Vec::new();
        for a in &self.agents {
            agents.push(Agent::new(a.name.clone(), a.utility.to_model(dim)?));
            if let Some(e) = &a.endowment {
                if e.goods.len() != dim {
                    return Err(CliError::input(format!(
                        "endowment of '{}' has {} coordinates, economy has {dim} goods",
                        a.name,
                        e.goods.len()
                    )));
                }
                endowments.push(ConsumptionBundle::new(
                    e.money.to_rat()?,
                    Bundle(e.goods.clone()),
                ));
            }
        }
        let economy = Economy {
            goods: self.goods.clone(),
            agents,
            total_endowment: Bundle(self.total_endowment.clone()),
        };
        validate_economy(&economy)?;
        let endowments = match endowments.len() {
            0 => None,
            n if n == economy.agents.len() => {
                let alloc = EndowmentAllocation(endowments);
                alloc.validate(&economy)?;
                Some(alloc)
            }
            n => {
                return Err(CliError::input(format!(
                    "{n} of {} agents carry endowments; give all or none",
                    economy.agents.len()
                )))
            }
        };
        Ok((economy, endowments))
    }

    pub fn from_economy(
        economy: &Economy,
        endowments: Option<&EndowmentAllocation>,
    ) -> EconomyDocument {
        let agents = economy
            .agents
            .iter()
            .enumerate()
            .map(|(j, agent)| AgentDocument {
                name: agent.name.clone(),
                utility: UtilityDocument::from_model(&agent.utility),
                endowment: endowments.map(|e| EndowmentDocument {
                    money: RatText::from_rat(&e.0[j].money),
                    goods: e.0[j].goods.0.clone(),
                }),
            })
            .collect();
        EconomyDocument {
            goods: economy.goods.clone(),
            total_endowment: economy.total_endowment.0.clone(),
            agents,
        }
    }
}

impl VectorSetDocument {
    pub fn to_set(&self) -> Result<DemandTypeVectorSet, CliError> {
        DemandTypeVectorSet::new(self.vectors.clone()).map_err(CliError::from)
    }

    pub fn from_set(d: &DemandTypeVectorSet) -> VectorSetDocument {
        VectorSetDocument {
            vectors: d.representatives(),
        }
    }
}

/// Reads and parses an economy document from a file path.
pub fn load_economy(path: &str) -> Result<(Economy, Option<EndowmentAllocation>), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read '{path}': {e}")))?;
    let doc: EconomyDocument = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("cannot parse '{path}': {e}")))?;
    doc.to_economy()
}

/// Reads a document that may be either a bare vector set or an economy; for
/// an economy, `agent` selects whose base valuation supplies the vectors via
/// the minimal demand type.
pub fn load_vectors(path: &str, agent: Option<&str>) -> Result<DemandTypeVectorSet, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read '{path}': {e}")))?;
    let parsed: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("cannot parse '{path}': {e}")))?;
    if parsed.get("vectors").is_some() {
        let doc: VectorSetDocument = serde_json::from_value(parsed)
            .map_err(|e| CliError::input(format!("cannot parse '{path}': {e}")))?;
        doc.to_set()
    } else {
        let doc: EconomyDocument = serde_json::from_value(parsed)
            .map_err(|e| CliError::input(format!("cannot parse '{path}': {e}")))?;
        let (economy, _) = doc.to_economy()?;
        let agent = select_agent(&economy, agent)?;
        Ok(indivisible::structure::minimal_demand_type(
            agent.domain_valuation(),
        ))
    }
}

/// Resolves `--agent`: a named lookup, or the unique agent when unnamed.
pub fn select_agent<'e>(economy: &'e Economy, name: Option<&str>) -> Result<&'e Agent, CliError> {
    match name {
        Some(n) => economy.agent(n).ok_or_else(|| {
            let known: Vec<&str> = economy.agents.iter().map(|a| a.name.as_str()).collect();
            CliError::input(format!("no agent '{n}' (agents: {})", known.join(", ")))
        }),
        None if economy.agents.len() == 1 => Ok(&economy.agents[0]),
        None => Err(CliError::input(
            "several agents in the document; pick one with --agent",
        )),
    }
}
