//! Subcommand definitions and handlers.
//!
//! Every handler returns an [`Outcome`]: a JSON report, its text rendering,
//! and the exit code (0 computed, 1 property fails / no equilibrium,
//! 2 input error, 3 search stopped without a verdict).

use std::collections::BTreeSet;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use indivisible::counterexample::{counterexample_substitutes, counterexample_unimodular};
use indivisible::demand::{
    expenditure, hicksian_demand, indirect_utility, marshallian_demand, quasilinear_demand,
};
use indivisible::equilibrium::{
    duality_probe, is_pareto_efficient, solve_income_ce, solve_tu_ce, support_pareto, verify_ce,
    Allocation, CEOutcome, IncomeParams, Refutation, TuOutcome,
};
use indivisible::hicksian::{build_hicksian_economy, hicksian_valuation};
use indivisible::model::{
    for_each_allocation, Agent, Bundle, ConsumptionBundle, Economy, EndowmentAllocation, Level,
    PriceVector, TuAgent, TuEconomy, UtilityModel,
};
use indivisible::rational::{format_rat, int, parse_rat, rat};
use indivisible::structure::{
    boundary_prices, gross_violation_from_net, is_concave, is_gross_substitutes_at,
    is_of_demand_type, is_quasiconcave, is_strong_substitutes, minimal_demand_type,
    net_substitutes_violation, substitutes_violation, uniquely_demanded,
};
use indivisible::unimodular::{check_unimodularity, UnimodularityOutcome};
use indivisible::{Counterexample, DemandTypeVectorSet, Rat};

use crate::document::{load_economy, load_vectors, select_agent};
use crate::fixture_docs::{fixture_document, FIXTURE_NAMES};
use crate::render::{
    allocation_json, braces, bundle_json, ce_outcome_json, demand_json, level_json, price_json,
    rat_json, tu_outcome_json, valuation_json,
};
use crate::{CliError, Outcome};

/// Exact equilibrium computation for markets of indivisible goods and money.
#[derive(Debug, Parser)]
#[command(name = "indivisible", version, max_term_width = 100)]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Computes a demand set at a price vector.
    #[command(subcommand)]
    Demand(DemandKind),
    /// Prints the valuation whose quasilinear demand reproduces compensated
    /// demand at a fixed utility level.
    HicksianValuation {
        doc: String,
        #[arg(long)]
        agent: Option<String>,
        /// Utility level key (model-appropriate: utility for quasilinear,
        /// positive scale for quasilog, grid index for tabulated).
        #[arg(long)]
        level: String,
    },
    /// Checks a structural property of preferences, exiting 1 when it fails.
    #[command(subcommand)]
    Check(CheckProperty),
    /// Solves for a competitive equilibrium or refutes its existence.
    #[command(subcommand)]
    Solve(SolveKind),
    /// Verifies a claimed equilibrium price and goods allocation exactly.
    VerifyCe {
        doc: String,
        /// Prices, comma-separated rationals: "3,2".
        #[arg(long)]
        price: String,
        /// Goods bundles per agent, semicolon-separated: "1,0;0,1".
        #[arg(long)]
        alloc: String,
    },
    /// Pareto-efficiency checks for consumption profiles.
    #[command(subcommand)]
    Pareto(ParetoKind),
    /// Cross-checks fixed-utility and income-effects equilibrium
    /// computations on one economy, reporting exact contradictions.
    DualityProbe {
        doc: String,
        /// Number of utility levels probed per agent.
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// Number of endowment allocations sampled (the document's own
        /// endowment is always the first).
        #[arg(long, default_value_t = 3)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        epsilon: Option<String>,
    },
    /// Builds an economy witnessing equilibrium failure.
    #[command(subcommand)]
    Counterexample(CounterexampleKind),
    /// Emits the built-in worked examples as documents.
    Fixtures {
        /// A fixture name; omit to list all names.
        name: Option<String>,
        /// Write documents into this directory instead of stdout.
        #[arg(long)]
        dir: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum DemandKind {
    /// Demand of the agent's base valuation under quasilinear utility.
    Quasilinear {
        doc: String,
        #[arg(long)]
        agent: Option<String>,
        #[arg(long)]
        price: String,
    },
    /// Demand at the document's endowment (money and goods overridable).
    Marshallian {
        doc: String,
        #[arg(long)]
        agent: Option<String>,
        #[arg(long)]
        price: String,
        #[arg(long)]
        money: Option<String>,
        #[arg(long)]
        goods: Option<String>,
    },
    /// Compensated demand at a fixed utility level.
    Hicksian {
        doc: String,
        #[arg(long)]
        agent: Option<String>,
        #[arg(long)]
        price: String,
        #[arg(long)]
        level: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum CheckProperty {
    /// Concavity of the agent's base valuation.
    Concave {
        doc: String,
        #[arg(long)]
        agent: Option<String>,
    },
    /// Quasiconcavity of the agent's utility in (money, goods).
    Quasiconcave {
        doc: String,
        #[arg(long)]
        agent: Option<String>,
    },
    /// The substitutes property of the agent's base valuation.
    Substitutes {
        doc: String,
        #[arg(long)]
        agent: Option<String>,
    },
    /// Substitutes property of every probed compensated valuation.
    NetSubstitutes {
        doc: String,
        #[arg(long)]
        agent: Option<String>,
    },
    /// Grid-sampled gross substitutability around a goods endowment; a pass
    /// only means no violation was found on the sampled grid.
    GrossSubstitutes {
        doc: String,
        #[arg(long)]
        agent: Option<String>,
        /// Goods endowment, comma-separated integers (default: the
        /// document's endowment, else all zeros).
        #[arg(long)]
        goods: Option<String>,
        /// Money holdings to sample, comma-separated rationals.
        #[arg(long)]
        money_grid: Option<String>,
        /// Price increments to try, comma-separated rationals.
        #[arg(long)]
        deltas: Option<String>,
    },
    /// The strong-substitutes property (every unit treated as a good).
    StrongSubstitutes {
        doc: String,
        #[arg(long)]
        agent: Option<String>,
    },
    /// Reports the minimal demand type; with --vectors, additionally exits 1
    /// unless the valuation is of that demand type.
    DemandType {
        doc: String,
        #[arg(long)]
        agent: Option<String>,
        /// Vectors, semicolon-separated integer tuples: "1,0;0,1;1,-1".
        #[arg(long)]
        vectors: Option<String>,
    },
    /// Unimodularity of a demand-type vector set.
    Unimodular {
        /// Economy document (with --agent: the agent's minimal demand type)
        /// or a vector-set document.
        doc: Option<String>,
        #[arg(long)]
        agent: Option<String>,
        #[arg(long)]
        vectors: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SolveKind {
    /// Transferable-utility equilibrium at fixed utility levels.
    Tu {
        doc: String,
        /// Per-agent utility level keys, comma-separated (defaults to level
        /// 0 for every agent; required for non-quasilinear agents).
        #[arg(long)]
        levels: Option<String>,
    },
    /// Income-effects equilibrium via the utility-level search.
    Income {
        doc: String,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        epsilon: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ParetoKind {
    /// Is the profile Pareto-efficient?
    Check {
        doc: String,
        /// Per-agent consumption "money:goods", semicolon-separated:
        /// "2:1,0;4:0,1".
        #[arg(long)]
        profile: String,
    },
    /// Finds a price making the profile an equilibrium from its own
    /// endowments (second welfare property).
    Support {
        doc: String,
        #[arg(long)]
        profile: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum CounterexampleKind {
    /// A two-agent economy without equilibrium, built from a substitutes
    /// violation of the agent's base valuation.
    Substitutes {
        doc: String,
        #[arg(long)]
        agent: Option<String>,
    },
    /// A two-agent economy without equilibrium, built from a non-unimodular
    /// demand-type vector set.
    Unimodular {
        doc: Option<String>,
        #[arg(long)]
        agent: Option<String>,
        #[arg(long)]
        vectors: Option<String>,
    },
}

// ---------------------------------------------------------------------------
// Argument parsing helpers
// ---------------------------------------------------------------------------

fn parse_rats_arg(s: &str) -> Result<Vec<Rat>, CliError> {
    s.split(',')
        .map(|t| parse_rat(t).map_err(CliError::from))
        .collect()
}

fn parse_price_arg(s: &str) -> Result<PriceVector, CliError> {
    Ok(PriceVector(parse_rats_arg(s)?))
}

fn parse_ints_arg(s: &str) -> Result<Vec<i64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| CliError::input(format!("bad integer '{}'", t.trim())))
        })
        .collect()
}

fn parse_goods_arg(s: &str) -> Result<Bundle, CliError> {
    Ok(Bundle(parse_ints_arg(s)?))
}

fn parse_vectors_arg(s: &str) -> Result<Vec<Vec<i64>>, CliError> {
    s.split(';').map(parse_ints_arg).collect()
}

fn parse_bundles_arg(s: &str) -> Result<Vec<Bundle>, CliError> {
    s.split(';').map(parse_goods_arg).collect()
}

/// Parses "money:goods" pairs: "2:1,0;4:0,1".
fn parse_profile_arg(s: &str) -> Result<Vec<ConsumptionBundle>, CliError> {
    s.split(';')
        .map(|part| {
            let (money, goods) = part.split_once(':').ok_or_else(|| {
                CliError::input(format!("bad profile entry '{part}' (want money:goods)"))
            })?;
            Ok(ConsumptionBundle::new(
                parse_rat(money)?,
                parse_goods_arg(goods)?,
            ))
        })
        .collect()
}

/// Wraps a parsed level key in the agent's level tag.
fn parse_level_arg(agent: &Agent, s: &str) -> Result<Level, CliError> {
    Ok(agent.level_from_key(parse_rat(s)?))
}

fn income_params(max_iter: Option<usize>, epsilon: Option<&String>) -> Result<IncomeParams, CliError> {
    let mut params = IncomeParams::default();
    if let Some(n) = max_iter {
        params.max_iter = n;
    }
    if let Some(e) = epsilon {
        params.epsilon = parse_rat(e)?;
        if !params.epsilon.is_positive() {
            return Err(CliError::input("--epsilon must be positive"));
        }
    }
    Ok(params)
}

/// Endowments are required by equilibrium commands; fail with guidance
/// otherwise.
fn require_endowments(
    endowments: Option<EndowmentAllocation>,
) -> Result<EndowmentAllocation, CliError> {
    endowments.ok_or_else(|| {
        CliError::input("this command needs per-agent endowments in the document")
    })
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Demand(kind) => run_demand(kind),
        Command::HicksianValuation { doc, agent, level } => {
            run_hicksian_valuation(doc, agent.as_deref(), level)
        }
        Command::Check(property) => run_check(property),
        Command::Solve(kind) => run_solve(kind),
        Command::VerifyCe { doc, price, alloc } => run_verify_ce(doc, price, alloc),
        Command::Pareto(kind) => run_pareto(kind),
        Command::DualityProbe {
            doc,
            levels,
            samples,
            seed,
            max_iter,
            epsilon,
        } => run_duality_probe(doc, *levels, *samples, *seed, *max_iter, epsilon.as_ref()),
        Command::Counterexample(kind) => run_counterexample(kind),
        Command::Fixtures { name, dir } => run_fixtures(name.as_deref(), dir.as_deref()),
    }
}

// ---------------------------------------------------------------------------
// demand
// ---------------------------------------------------------------------------

fn run_demand(kind: &DemandKind) -> Result<Outcome, CliError> {
    match kind {
        DemandKind::Quasilinear { doc, agent, price } => {
            let (economy, _) = load_economy(doc)?;
            let agent = select_agent(&economy, agent.as_deref())?;
            let p = parse_price_arg(price)?;
            let v = agent.domain_valuation();
            let demand = quasilinear_demand(v, &p);
            let star = demand.iter().next().expect("demand sets are nonempty");
            let payoff = v.value(star).expect("demanded bundles are in the domain") - p.dot(star);
            let json = json!({
                "command": "demand",
                "kind": "quasilinear",
                "agent": agent.name,
                "price": price_json(&p),
                "demand": demand_json(&demand),
                "payoff": rat_json(&payoff),
            });
            let text = format!("demand = {demand}\npayoff = {}", format_rat(&payoff));
            Ok(Outcome::new(json, text, 0))
        }
        DemandKind::Marshallian {
            doc,
            agent,
            price,
            money,
            goods,
        } => {
            let (economy, endowments) = load_economy(doc)?;
            let agent_ref = select_agent(&economy, agent.as_deref())?;
            let index = economy
                .agents
                .iter()
                .position(|a| a.name == agent_ref.name)
                .expect("selected agent is in the economy");
            let p = parse_price_arg(price)?;
            let base = endowments.as_ref().map(|e| &e.0[index]);
            let money = match money {
                Some(m) => parse_rat(m)?,
                None => base
                    .map(|c| c.money.clone())
                    .ok_or_else(|| CliError::input("no endowment in document; give --money"))?,
            };
            let goods = match goods {
                Some(g) => parse_goods_arg(g)?,
                None => base
                    .map(|c| c.goods.clone())
                    .ok_or_else(|| CliError::input("no endowment in document; give --goods"))?,
            };
            let endow = ConsumptionBundle::new(money, goods);
            let demand = marshallian_demand(agent_ref, &p, &endow)?;
            let level = indirect_utility(agent_ref, &p, &endow)?;
            let wealth = &endow.money + p.dot(&endow.goods);
            let json = json!({
                "command": "demand",
                "kind": "marshallian",
                "agent": agent_ref.name,
                "price": price_json(&p),
                "endowment": { "money": rat_json(&endow.money), "goods": bundle_json(&endow.goods) },
                "wealth": rat_json(&wealth),
                "demand": demand_json(&demand),
                "level": level_json(&level),
            });
            let text = format!("demand = {demand}\nattained level: {level}");
            Ok(Outcome::new(json, text, 0))
        }
        DemandKind::Hicksian {
            doc,
            agent,
            price,
            level,
        } => {
            let (economy, _) = load_economy(doc)?;
            let agent = select_agent(&economy, agent.as_deref())?;
            let p = parse_price_arg(price)?;
            let level = parse_level_arg(agent, level)?;
            let demand = hicksian_demand(agent, &p, &level)?;
            let spend = expenditure(agent, &p, &level)?;
            let json = json!({
                "command": "demand",
                "kind": "hicksian",
                "agent": agent.name,
                "price": price_json(&p),
                "level": level_json(&level),
                "demand": demand_json(&demand),
                "expenditure": rat_json(&spend),
            });
            let text = format!("demand = {demand}\nexpenditure = {}", format_rat(&spend));
            Ok(Outcome::new(json, text, 0))
        }
    }
}

fn run_hicksian_valuation(
    doc: &str,
    agent: Option<&str>,
    level: &str,
) -> Result<Outcome, CliError> {
    let (economy, _) = load_economy(doc)?;
    let agent = select_agent(&economy, agent)?;
    let level = parse_level_arg(agent, level)?;
    let v = hicksian_valuation(agent, &level)?;
    let json = json!({
        "command": "hicksian-valuation",
        "agent": agent.name,
        "level": level_json(&level),
        "values": valuation_json(&v),
    });
    let text = v
        .pairs()
        .map(|(x, value)| format!("{x} -> {}", format_rat(value)))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Outcome::new(json, text, 0))
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

/// Report scaffold shared by the property checks: `holds` drives the exit
/// code, `witness` is an optional JSON description of the failure.
fn check_outcome(
    property: &str,
    agent: Option<&str>,
    holds: bool,
    witness: Option<serde_json::Value>,
    witness_text: Option<String>,
) -> Outcome {
    let mut json = json!({
        "command": "check",
        "property": property,
        "holds": holds,
    });
    if let Some(a) = agent {
        json["agent"] = json!(a);
    }
    if let Some(w) = witness {
        json["witness"] = w;
    }
    let mut text = format!(
        "{property}: {}",
        if holds { "holds" } else { "fails" }
    );
    if let Some(t) = witness_text {
        text.push('\n');
        text.push_str(&t);
    }
    Outcome::new(json, text, if holds { 0 } else { 1 })
}

fn run_check(property: &CheckProperty) -> Result<Outcome, CliError> {
    match property {
        CheckProperty::Concave { doc, agent } => {
            let (economy, _) = load_economy(doc)?;
            let agent = select_agent(&economy, agent.as_deref())?;
            let holds = is_concave(agent.domain_valuation());
            Ok(check_outcome("concave", Some(&agent.name), holds, None, None))
        }
        CheckProperty::Quasiconcave { doc, agent } => {
            let (economy, _) = load_economy(doc)?;
            let agent = select_agent(&economy, agent.as_deref())?;
            let holds = is_quasiconcave(agent)?;
            Ok(check_outcome(
                "quasiconcave",
                Some(&agent.name),
                holds,
                None,
                None,
            ))
        }
        CheckProperty::Substitutes { doc, agent } => {
            let (economy, _) = load_economy(doc)?;
            let agent = select_agent(&economy, agent.as_deref())?;
            let violation = substitutes_violation(agent.domain_valuation())?;
            let (witness, text) = match &violation {
                None => (None, None),
                Some(v) => (
                    Some(json!({
                        "pair": [bundle_json(&v.pair.0), bundle_json(&v.pair.1)],
                        "price": price_json(&v.price),
                    })),
                    Some(format!(
                        "demand jumps between {} and {} at price {}",
                        v.pair.0, v.pair.1, v.price
                    )),
                ),
            };
            Ok(check_outcome(
                "substitutes",
                Some(&agent.name),
                violation.is_none(),
                witness,
                text,
            ))
        }
        CheckProperty::NetSubstitutes { doc, agent } => {
            let (economy, _) = load_economy(doc)?;
            let agent = select_agent(&economy, agent.as_deref())?;
            let violation = net_substitutes_violation(agent)?;
            let (witness, text) = match &violation {
                None => (None, None),
                Some((level, v)) => (
                    Some(json!({
                        "level": level_json(level),
                        "pair": [bundle_json(&v.pair.0), bundle_json(&v.pair.1)],
                        "price": price_json(&v.price),
                    })),
                    Some(format!(
                        "at level {level}, compensated demand jumps between {} and {} at price {}",
                        v.pair.0, v.pair.1, v.price
                    )),
                ),
            };
            Ok(check_outcome(
                "net-substitutes",
                Some(&agent.name),
                violation.is_none(),
                witness,
                text,
            ))
        }
        CheckProperty::GrossSubstitutes {
            doc,
            agent,
            goods,
            money_grid,
            deltas,
        } => run_check_gross(doc, agent.as_deref(), goods.as_deref(), money_grid.as_deref(), deltas.as_deref()),
        CheckProperty::StrongSubstitutes { doc, agent } => {
            let (economy, _) = load_economy(doc)?;
            let agent = select_agent(&economy, agent.as_deref())?;
            let holds = is_strong_substitutes(agent.domain_valuation())?;
            Ok(check_outcome(
                "strong-substitutes",
                Some(&agent.name),
                holds,
                None,
                None,
            ))
        }
        CheckProperty::DemandType { doc, agent, vectors } => {
            let (economy, _) = load_economy(doc)?;
            let agent = select_agent(&economy, agent.as_deref())?;
            let v = agent.domain_valuation();
            let minimal = minimal_demand_type(v);
            let unique = uniquely_demanded(v);
            let mut json = json!({
                "command": "check",
                "property": "demand-type",
                "agent": agent.name,
                "vectors": minimal.representatives(),
                "uniquely_demanded": unique.iter().map(bundle_json).collect::<Vec<_>>(),
            });
            let mut text = format!(
                "minimal demand type: {minimal}\nuniquely demanded: {}",
                braces(unique.iter().map(|x| x.to_string()))
            );
            let mut code = 0;
            if let Some(arg) = vectors {
                let given = DemandTypeVectorSet::new(parse_vectors_arg(arg)?)?;
                let member = is_of_demand_type(v, &given);
                json["of_given_type"] = json!(member);
                text.push_str(&format!(
                    "\nof the given type: {}",
                    if member { "yes" } else { "no" }
                ));
                if !member {
                    code = 1;
                }
            }
            Ok(Outcome::new(json, text, code))
        }
        CheckProperty::Unimodular { doc, agent, vectors } => {
            let set = vector_set_from(doc.as_deref(), agent.as_deref(), vectors.as_deref())?;
            let outcome = check_unimodularity(&set);
            let (witness, text) = match &outcome {
                UnimodularityOutcome::Unimodular => (None, None),
                UnimodularityOutcome::NonUnimodular { subset, minor_gcd } => (
                    Some(json!({
                        "subset": subset,
                        "minor_gcd": minor_gcd.to_string(),
                    })),
                    Some(format!(
                        "the subset {} has maximal-minor gcd {minor_gcd}",
                        braces(subset.iter().map(|v| format!("{v:?}"))),
                    )),
                ),
            };
            Ok(check_outcome(
                "unimodular",
                None,
                outcome.is_unimodular(),
                witness,
                text,
            ))
        }
    }
}

/// Resolves the vector set for the unimodularity commands: inline
/// `--vectors` wins, else a document (vector-set or economy + agent).
fn vector_set_from(
    doc: Option<&str>,
    agent: Option<&str>,
    vectors: Option<&str>,
) -> Result<DemandTypeVectorSet, CliError> {
    match (vectors, doc) {
        (Some(arg), _) => Ok(DemandTypeVectorSet::new(parse_vectors_arg(arg)?)?),
        (None, Some(path)) => load_vectors(path, agent),
        (None, None) => Err(CliError::input("give --vectors or a document path")),
    }
}

fn run_check_gross(
    doc: &str,
    agent: Option<&str>,
    goods: Option<&str>,
    money_grid: Option<&str>,
    deltas: Option<&str>,
) -> Result<Outcome, CliError> {
    let (economy, endowments) = load_economy(doc)?;
    let agent_ref = select_agent(&economy, agent)?;
    let index = economy
        .agents
        .iter()
        .position(|a| a.name == agent_ref.name)
        .expect("selected agent is in the economy");
    let goods_endow = match goods {
        Some(g) => parse_goods_arg(g)?,
        None => endowments
            .as_ref()
            .map(|e| e.0[index].goods.clone())
            .unwrap_or_else(|| Bundle::zeros(economy.dim())),
    };

    // A violation constructed from the compensated side is exact; confirm it
    // before reporting.
    if let Some(v) = gross_violation_from_net(agent_ref, &goods_endow)? {
        if v.confirm(agent_ref)? {
            let witness = json!({
                "money": rat_json(&v.money),
                "goods_endow": bundle_json(&v.goods_endow),
                "base_price": price_json(&v.base_price),
                "good": v.good,
                "lambda": rat_json(&v.lambda),
                "dropped_good": v.dropped_good,
                "before": bundle_json(&v.before),
                "after": bundle_json(&v.after),
            });
            let text = format!(
                "with money {} and goods {}, raising the price of good {} by {} from {} moves demand from {} to {}, dropping good {}",
                format_rat(&v.money),
                v.goods_endow,
                v.good + 1,
                format_rat(&v.lambda),
                v.base_price,
                v.before,
                v.after,
                v.dropped_good + 1,
            );
            return Ok(check_outcome(
                "gross-substitutes",
                Some(&agent_ref.name),
                false,
                Some(witness),
                Some(text),
            ));
        }
    }

    // Sampled sweep: a small money grid, a few price increments, and prices
    // built from the coordinates of compensated-demand boundary prices at
    // several utility levels. Taking the coordinate-wise product (rather
    // than the boundary prices themselves) also lands on mixed prices where
    // only income effects flip demand.
    let money_grid = match money_grid {
        Some(m) => parse_rats_arg(m)?,
        None => {
            let mut grid: Vec<Rat> = (1..=5).map(int).collect();
            if let Some(e) = &endowments {
                grid.push(e.0[index].money.clone());
            }
            grid
        }
    };
    let deltas = match deltas {
        Some(d) => parse_rats_arg(d)?,
        None => vec![rat(1, 2), int(1), int(2)],
    };
    let dim = economy.dim();
    let mut axes: Vec<BTreeSet<Rat>> = vec![BTreeSet::new(); dim];
    for level in level_spread(agent_ref, 5) {
        for p in boundary_prices(&hicksian_valuation(agent_ref, &level)?) {
            for (axis, coordinate) in axes.iter_mut().zip(p.0) {
                axis.insert(coordinate);
            }
        }
    }
    let axes: Vec<Vec<Rat>> = axes
        .into_iter()
        .map(|axis| {
            if axis.is_empty() {
                vec![int(1)]
            } else {
                evenly_trim(axis.into_iter().collect(), 8)
            }
        })
        .collect();
    let mut price_grid: Vec<PriceVector> = Vec::new();
    let mut counters = vec![0usize; dim];
    'grid: loop {
        price_grid.push(PriceVector(
            counters
                .iter()
                .zip(&axes)
                .map(|(&i, axis)| axis[i].clone())
                .collect(),
        ));
        if price_grid.len() >= 1000 {
            break;
        }
        let mut carry = 0;
        loop {
            if carry == dim {
                break 'grid;
            }
            counters[carry] += 1;
            if counters[carry] < axes[carry].len() {
                break;
            }
            counters[carry] = 0;
            carry += 1;
        }
    }
    let holds = is_gross_substitutes_at(agent_ref, &goods_endow, &money_grid, &price_grid, &deltas)?;
    let detail = json!({
        "goods_endow": bundle_json(&goods_endow),
        "sampled_prices": price_grid.len(),
        "sampled_money_levels": money_grid.len(),
        "sampled_deltas": deltas.len(),
    });
    let text = if holds {
        Some(format!(
            "no violation found on grid ({} prices x {} money levels x {} increments)",
            price_grid.len(),
            money_grid.len(),
            deltas.len()
        ))
    } else {
        Some("a sampled price rise reduced demand for another good".into())
    };
    let mut outcome = check_outcome("gross-substitutes", Some(&agent_ref.name), holds, None, text);
    outcome.json["sample"] = detail;
    Ok(outcome)
}

// ---------------------------------------------------------------------------
// solve / verify
// ---------------------------------------------------------------------------

fn tu_outcome_text(outcome: &TuOutcome) -> String {
    match outcome {
        TuOutcome::Found {
            price, allocation, ..
        } => format!("equilibrium found\nprice = {price}\nallocation = {allocation}"),
        TuOutcome::NotFound {
            allocation,
            certificate,
            system,
        } => {
            let mut lines = vec![
                "no equilibrium exists".to_string(),
                format!("welfare-maximal allocation: {allocation}"),
                "refutation certificate (multiplier x row):".to_string(),
            ];
            for (mult, row) in certificate.multipliers.iter().zip(&system.rows) {
                if !mult.is_zero() {
                    lines.push(format!("  {} x [{}]  ({})", format_rat(mult), row, row.label));
                }
            }
            lines.join("\n")
        }
    }
}

fn run_solve(kind: &SolveKind) -> Result<Outcome, CliError> {
    match kind {
        SolveKind::Tu { doc, levels } => {
            let (economy, _) = load_economy(doc)?;
            let tu: TuEconomy = match levels {
                Some(arg) => {
                    let keys = parse_rats_arg(arg)?;
                    if keys.len() != economy.agents.len() {
                        return Err(CliError::input(format!(
                            "--levels has {} entries, economy has {} agents",
                            keys.len(),
                            economy.agents.len()
                        )));
                    }
                    let levels: Vec<Level> = economy
                        .agents
                        .iter()
                        .zip(keys)
                        .map(|(a, k)| a.level_from_key(k))
                        .collect();
                    build_hicksian_economy(&economy, &levels)?
                }
                None => {
                    if let Some(a) = economy
                        .agents
                        .iter()
                        .find(|a| !matches!(a.utility, UtilityModel::Quasilinear(_)))
                    {
                        return Err(CliError::input(format!(
                            "agent '{}' is not quasilinear; give --levels",
                            a.name
                        )));
                    }
                    TuEconomy {
                        goods: economy.goods.clone(),
                        agents: economy
                            .agents
                            .iter()
                            .map(|a| TuAgent {
                                name: a.name.clone(),
                                valuation: a.domain_valuation().clone(),
                            })
                            .collect(),
                        total_endowment: economy.total_endowment.clone(),
                    }
                }
            };
            let outcome = solve_tu_ce(&tu)?;
            let code = if outcome.is_found() { 0 } else { 1 };
            let mut json = tu_outcome_json(&outcome);
            json["command"] = json!("solve");
            json["kind"] = json!("tu");
            Ok(Outcome::new(json, tu_outcome_text(&outcome), code))
        }
        SolveKind::Income {
            doc,
            max_iter,
            epsilon,
        } => {
            let (economy, endowments) = load_economy(doc)?;
            let endowments = require_endowments(endowments)?;
            let params = income_params(*max_iter, epsilon.as_ref())?;
            let outcome = solve_income_ce(&economy, &endowments, &params)?;
            let code = match &outcome {
                CEOutcome::Found { .. } => 0,
                CEOutcome::NotFound(Refutation::SearchExhausted { .. }) => 3,
                CEOutcome::NotFound(_) => 1,
            };
            let text = match &outcome {
                CEOutcome::Found {
                    price,
                    allocation,
                    money,
                } => format!(
                    "equilibrium found\nprice = {price}\nallocation = {allocation}\nmoney = {}",
                    braces(money.iter().map(format_rat))
                ),
                CEOutcome::NotFound(Refutation::AllAllocationsRefuted { allocations }) => format!(
                    "no equilibrium exists: the joint optimality system of each of the {allocations} goods allocations is infeasible"
                ),
                CEOutcome::NotFound(Refutation::HicksianCertificate { levels, .. }) => format!(
                    "no equilibrium found: the fixed-utility economy at levels ({}) carries a refutation certificate",
                    levels
                        .iter()
                        .map(Level::to_string)
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
                CEOutcome::NotFound(Refutation::SearchExhausted { details }) => {
                    format!("no verdict: {details}")
                }
            };
            let mut json = ce_outcome_json(&outcome);
            json["command"] = json!("solve");
            json["kind"] = json!("income");
            Ok(Outcome::new(json, text, code))
        }
    }
}

fn run_verify_ce(doc: &str, price: &str, alloc: &str) -> Result<Outcome, CliError> {
    let (economy, endowments) = load_economy(doc)?;
    let endowments = require_endowments(endowments)?;
    let p = parse_price_arg(price)?;
    let allocation = Allocation(parse_bundles_arg(alloc)?);
    let verified = verify_ce(&economy, &endowments, &p, &allocation)?;
    let json = json!({
        "command": "verify-ce",
        "price": price_json(&p),
        "allocation": allocation_json(&allocation),
        "verified": verified,
    });
    let text = format!("{verified}");
    Ok(Outcome::new(json, text, if verified { 0 } else { 1 }))
}

// ---------------------------------------------------------------------------
// pareto
// ---------------------------------------------------------------------------

fn run_pareto(kind: &ParetoKind) -> Result<Outcome, CliError> {
    match kind {
        ParetoKind::Check { doc, profile } => {
            let (economy, _) = load_economy(doc)?;
            let profile = parse_profile_arg(profile)?;
            let efficient = is_pareto_efficient(&economy, &profile)?;
            let json = json!({
                "command": "pareto",
                "kind": "check",
                "efficient": efficient,
            });
            let text = format!(
                "the profile is {}Pareto-efficient",
                if efficient { "" } else { "not " }
            );
            Ok(Outcome::new(json, text, if efficient { 0 } else { 1 }))
        }
        ParetoKind::Support { doc, profile } => {
            let (economy, _) = load_economy(doc)?;
            let profile = parse_profile_arg(profile)?;
            match support_pareto(&economy, &profile) {
                Ok(Some(price)) => {
                    let json = json!({
                        "command": "pareto",
                        "kind": "support",
                        "supported": true,
                        "price": price_json(&price),
                    });
                    let text = format!("supporting price = {price}");
                    Ok(Outcome::new(json, text, 0))
                }
                Ok(None) => {
                    let json = json!({
                        "command": "pareto",
                        "kind": "support",
                        "supported": false,
                    });
                    Ok(Outcome::new(json, "no supporting price exists", 1))
                }
                Err(indivisible::Error::NotParetoEfficient) => {
                    let json = json!({
                        "command": "pareto",
                        "kind": "support",
                        "supported": false,
                        "reason": "the profile is not Pareto-efficient",
                    });
                    Ok(Outcome::new(json, "the profile is not Pareto-efficient", 1))
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// duality-probe
// ---------------------------------------------------------------------------

/// Keeps at most `cap` values from a sorted list, spread evenly through it.
fn evenly_trim(sorted: Vec<Rat>, cap: usize) -> Vec<Rat> {
    let n = sorted.len();
    if n <= cap {
        return sorted;
    }
    (0..cap)
        .map(|i| sorted[i * (n - 1) / (cap - 1)].clone())
        .collect()
}

/// `count` level keys for one agent, spread model-appropriately: integers
/// around zero for quasilinear utility, positive scales around one for
/// quasilog, and an even spread over the grid for tabulated families.
fn level_spread(agent: &Agent, count: usize) -> Vec<Level> {
    let n = count.max(1);
    let keys: Vec<Rat> = match &agent.utility {
        UtilityModel::Quasilinear(_) => (0..n)
            .map(|i| int(i as i64) - rat(n as i64 - 1, 2))
            .collect(),
        UtilityModel::Quasilog(_) => (0..n).map(|i| rat(2 * (i as i64 + 1), n as i64 + 1)).collect(),
        UtilityModel::Tabulated(fam) => {
            let top = fam.grid_len() as i64 - 1;
            if n == 1 || top == 0 {
                vec![int(0); 1]
            } else {
                (0..n).map(|i| rat(i as i64 * top, n as i64 - 1)).collect()
            }
        }
    };
    keys.into_iter().map(|k| agent.level_from_key(k)).collect()
}

/// All splits of the total goods endowment across the agents' feasible sets
/// (capped; the cap only trims the sampling pool, not correctness).
fn goods_splits(economy: &Economy, cap: usize) -> Result<Vec<Vec<Bundle>>, CliError> {
    let domains: Vec<Vec<Bundle>> = economy
        .agents
        .iter()
        .map(|a| a.feasible_set().cloned().collect())
        .collect();
    let mut splits = Vec::new();
    for_each_allocation(&domains, &economy.total_endowment, &mut |split| {
        splits.push(split.to_vec());
        splits.len() >= cap
    })?;
    Ok(splits)
}

fn run_duality_probe(
    doc: &str,
    levels: usize,
    samples: usize,
    seed: u64,
    max_iter: Option<usize>,
    epsilon: Option<&String>,
) -> Result<Outcome, CliError> {
    let (economy, endowments) = load_economy(doc)?;
    let endowments = require_endowments(endowments)?;
    let params = income_params(max_iter, epsilon)?;

    let grid: Vec<Vec<Level>> = economy
        .agents
        .iter()
        .map(|a| level_spread(a, levels))
        .collect();

    // The document's endowment seeds the sample; further samples redistribute
    // the same totals randomly (goods across feasible splits, money by
    // random positive shares).
    let total_money: Rat = endowments.0.iter().map(|c| c.money.clone()).sum();
    let splits = goods_splits(&economy, 5000)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampled = vec![endowments.clone()];
    let mut attempts = 0;
    while sampled.len() < samples.max(1) && attempts < 50 * samples.max(1) {
        attempts += 1;
        let split = &splits[rng.gen_range(0..splits.len())];
        let weights: Vec<i64> = (0..economy.agents.len())
            .map(|_| rng.gen_range(1..=9))
            .collect();
        let total_weight: i64 = weights.iter().sum();
        let candidate = EndowmentAllocation(
            split
                .iter()
                .zip(&weights)
                .map(|(goods, &w)| {
                    ConsumptionBundle::new(
                        &total_money * rat(w, total_weight),
                        goods.clone(),
                    )
                })
                .collect(),
        );
        if candidate.validate(&economy).is_ok() {
            sampled.push(candidate);
        }
    }

    let report = duality_probe(&economy, &grid, &sampled, &params)?;
    let hicksian: Vec<serde_json::Value> = report
        .hicksian_outcomes
        .iter()
        .map(|(levels, outcome)| {
            json!({
                "levels": levels.iter().map(level_json).collect::<Vec<_>>(),
                "found": outcome.is_found(),
            })
        })
        .collect();
    let marshallian: Vec<serde_json::Value> =
        report.marshallian_outcomes.iter().map(ce_outcome_json).collect();
    let clean = report.violations.is_empty();
    let json = json!({
        "command": "duality-probe",
        "hicksian": hicksian,
        "marshallian": marshallian,
        "violations": report.violations,
    });
    let found = report
        .hicksian_outcomes
        .iter()
        .filter(|(_, o)| o.is_found())
        .count();
    let cleared = report
        .marshallian_outcomes
        .iter()
        .filter(|o| o.is_found())
        .count();
    let mut text = format!(
        "fixed-utility economies probed: {} ({} with equilibrium)\nendowment samples solved: {} ({} with equilibrium)",
        report.hicksian_outcomes.len(),
        found,
        report.marshallian_outcomes.len(),
        cleared,
    );
    if clean {
        text.push_str("\nno contradictions between the two computations");
    } else {
        for v in &report.violations {
            text.push_str(&format!("\ncontradiction: {v}"));
        }
    }
    Ok(Outcome::new(json, text, if clean { 0 } else { 1 }))
}

// ---------------------------------------------------------------------------
// counterexample
// ---------------------------------------------------------------------------

fn counterexample_report(c: &Counterexample) -> (serde_json::Value, String) {
    let economy = json!({
        "goods": c.economy.goods,
        "agents": c.economy.agents.iter().map(|a| json!({
            "name": a.name,
            "values": valuation_json(&a.valuation),
        })).collect::<Vec<_>>(),
        "total_endowment": bundle_json(&c.economy.total_endowment),
    });
    let json = json!({
        "command": "counterexample",
        "economy": economy,
        "price": price_json(&c.price),
        "endowments": c.endowments.iter().map(bundle_json).collect::<Vec<_>>(),
        "outcome": tu_outcome_json(&c.outcome),
    });
    let text = format!(
        "constructed a {}-agent economy with no equilibrium\npseudo-equilibrium price = {}\nendowments = {}\n{}",
        c.economy.agents.len(),
        c.price,
        braces(c.endowments.iter().map(|b| b.to_string())),
        tu_outcome_text(&c.outcome),
    );
    (json, text)
}

fn run_counterexample(kind: &CounterexampleKind) -> Result<Outcome, CliError> {
    match kind {
        CounterexampleKind::Substitutes { doc, agent } => {
            let (economy, _) = load_economy(doc)?;
            let agent = select_agent(&economy, agent.as_deref())?;
            match counterexample_substitutes(agent.domain_valuation()) {
                Ok(c) => {
                    let (json, text) = counterexample_report(&c);
                    Ok(Outcome::new(json, text, 0))
                }
                Err(indivisible::Error::IsActuallySubstitutes) => {
                    let json = json!({
                        "command": "counterexample",
                        "constructed": false,
                        "reason": "the valuation is a substitutes valuation",
                    });
                    Ok(Outcome::new(
                        json,
                        "no counterexample: the valuation is a substitutes valuation",
                        1,
                    ))
                }
                Err(e) => Err(e.into()),
            }
        }
        CounterexampleKind::Unimodular { doc, agent, vectors } => {
            let set = vector_set_from(doc.as_deref(), agent.as_deref(), vectors.as_deref())?;
            match counterexample_unimodular(&set) {
                Ok(c) => {
                    let (json, text) = counterexample_report(&c);
                    Ok(Outcome::new(json, text, 0))
                }
                Err(indivisible::Error::SubsetUnimodular) => {
                    let json = json!({
                        "command": "counterexample",
                        "constructed": false,
                        "reason": "every linearly independent subset is unimodular",
                    });
                    Ok(Outcome::new(
                        json,
                        "no counterexample: the vector set is unimodular",
                        1,
                    ))
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// fixtures
// ---------------------------------------------------------------------------

fn run_fixtures(name: Option<&str>, dir: Option<&str>) -> Result<Outcome, CliError> {
    let selected: Vec<&str> = match name {
        Some(n) => {
            if !FIXTURE_NAMES.contains(&n) {
                return Err(CliError::input(format!(
                    "unknown fixture '{n}' (have: {})",
                    FIXTURE_NAMES.join(", ")
                )));
            }
            vec![n]
        }
        None => FIXTURE_NAMES.to_vec(),
    };
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::input(format!("cannot create '{dir}': {e}")))?;
            let mut written = Vec::new();
            for n in selected {
                let doc = fixture_document(n).expect("selected names exist");
                let path = format!("{dir}/{n}.json");
                let body = serde_json::to_string_pretty(&doc).expect("fixtures serialize");
                std::fs::write(&path, body + "\n")
                    .map_err(|e| CliError::input(format!("cannot write '{path}': {e}")))?;
                written.push(path);
            }
            let json = json!({ "command": "fixtures", "written": written });
            let text = written.join("\n");
            Ok(Outcome::new(json, text, 0))
        }
        None => match name {
            Some(n) => {
                let doc = fixture_document(n).expect("selected names exist");
                let text = serde_json::to_string_pretty(&doc).expect("fixtures serialize");
                Ok(Outcome::new(doc, text, 0))
            }
            None => {
                let json = json!({ "command": "fixtures", "fixtures": FIXTURE_NAMES });
                Ok(Outcome::new(json, FIXTURE_NAMES.join("\n"), 0))
            }
        },
    }
}
