//! Competitive equilibrium: welfare maximization and supporting prices for
//! transferable-utility (quasilinear) economies, exact verification and
//! refutation for economies with income effects, Pareto efficiency, and the
//! utility-level search that connects the two through Hicksian valuations.
//!
//! The transferable-utility solver is complete: an equilibrium exists if and
//! only if the lexicographically first welfare-maximal allocation admits a
//! supporting price, so a Farkas certificate for that allocation's system
//! refutes existence outright. The income-effects solver runs a fixed-point
//! search over utility levels (each step solves a transferable-utility
//! economy of Hicksian valuations and reads off net-expenditure ranges); for
//! economies whose agents are all quasilinear or quasilog it can also decide
//! existence exactly, allocation by allocation, because each agent's
//! Marshallian optimality at a fixed bundle is a finite set of linear
//! price constraints.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::demand::{marshallian_demand, quasilinear_demand};
use crate::error::{Error, Result};
use crate::hicksian::build_hicksian_economy;
use crate::linsys::{
    Bound, Constraint, FarkasCertificate, Interval, LinearSystem, SolveOutcome,
};
use crate::model::{
    for_each_allocation, Bundle, ConsumptionBundle, Economy, EndowmentAllocation, Level,
    PriceVector, TuEconomy, UtilityModel,
};
use crate::rational::{int, rat, Rat};
use crate::structure::{in_convex_hull, optimality_rows};

/// A split of a goods total across agents, in agent order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Allocation(pub Vec<Bundle>);

impl Allocation {
    /// Component-wise sum of the allocated bundles.
    pub fn total(&self, dim: usize) -> Bundle {
        let mut acc = Bundle::zeros(dim);
        for x in &self.0 {
            acc = acc.add(x);
        }
        acc
    }
}

impl fmt::Display for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Outcome of the exact transferable-utility equilibrium computation.
#[derive(Debug, Clone)]
pub enum TuOutcome {
    /// An equilibrium price supporting a welfare-maximal allocation,
    /// together with the supporting-price system it solves.
    Found {
        price: PriceVector,
        allocation: Allocation,
        system: LinearSystem,
    },
    /// No equilibrium exists: the supporting-price system of a
    /// welfare-maximal allocation is infeasible, with a recheckable
    /// certificate.
    NotFound {
        allocation: Allocation,
        certificate: FarkasCertificate,
        system: LinearSystem,
    },
}

impl TuOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, TuOutcome::Found { .. })
    }
}

/// Whether a fixed allocation admits a supporting price.
#[derive(Debug, Clone)]
pub enum SupportOutcome {
    Supported {
        price: PriceVector,
        system: LinearSystem,
    },
    Unsupported {
        certificate: FarkasCertificate,
        system: LinearSystem,
    },
}

/// Evidence that an income-effects economy has no verified equilibrium.
#[derive(Debug, Clone)]
pub enum Refutation {
    /// Exact refutation: the joint optimality system of every goods
    /// allocation is infeasible, so no price clears the market.
    AllAllocationsRefuted { allocations: usize },
    /// The Hicksian economy at the recorded utility levels has no
    /// equilibrium price; the certificate refutes its supporting system.
    HicksianCertificate {
        levels: Vec<Level>,
        certificate: FarkasCertificate,
    },
    /// The level search stopped without a verdict.
    SearchExhausted { details: String },
}

/// Outcome of the income-effects equilibrium search.
#[derive(Debug, Clone)]
pub enum CEOutcome {
    /// A verified equilibrium: at `price`, each agent Marshallian-demands
    /// its allocated bundle, and `money` lists post-trade money holdings.
    Found {
        price: PriceVector,
        allocation: Allocation,
        money: Vec<Rat>,
    },
    NotFound(Refutation),
}

impl CEOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, CEOutcome::Found { .. })
    }
}

/// Tuning knobs for the income-effects equilibrium search.
#[derive(Debug, Clone)]
pub struct IncomeParams {
    /// Maximum number of utility-level iterations.
    pub max_iter: usize,
    /// Stop once every agent's level bracket is narrower than this.
    pub epsilon: Rat,
}

impl Default for IncomeParams {
    fn default() -> Self {
        IncomeParams {
            max_iter: 200,
            epsilon: rat(1, 1i64 << 32),
        }
    }
}

/// Per-agent net-expenditure ranges over the supporting-price polyhedron of
/// the Hicksian economy at fixed utility levels.
#[derive(Debug, Clone)]
pub enum ExpenditureBoxes {
    /// The welfare-maximal allocation is supported; `intervals[j]` is the
    /// exact range of agent `j`'s net expenditure
    /// `s_j(x^j) - m^j + p.(x^j - w^j)` as `p` varies over the system.
    Boxes {
        allocation: Allocation,
        price_system: LinearSystem,
        intervals: Vec<Interval>,
    },
    /// No supporting price exists at these levels.
    Infeasible {
        certificate: FarkasCertificate,
        system: LinearSystem,
    },
}

/// Exact existence decision for economies whose agents all have price-linear
/// optimality conditions (quasilinear or quasilog utility).
#[derive(Debug, Clone)]
pub enum MarshallianDecision {
    Exists {
        price: PriceVector,
        allocation: Allocation,
        money: Vec<Rat>,
    },
    /// Every goods allocation's joint system is infeasible.
    Refuted { allocations_checked: usize },
    /// The economy contains an agent whose optimality conditions are not
    /// linear in prices.
    Undecided { reason: String },
}

/// Side-by-side record of Hicksian and Marshallian equilibrium computations
/// on one economy, with any exact contradictions between them.
#[derive(Debug, Clone)]
pub struct DualityReport {
    /// Transferable-utility outcome for each probed utility-level profile.
    pub hicksian_outcomes: Vec<(Vec<Level>, TuOutcome)>,
    /// Income-effects outcome for each sampled endowment.
    pub marshallian_outcomes: Vec<CEOutcome>,
    /// Human-readable descriptions of outcome patterns that contradict the
    /// correspondence between the two computations.
    pub violations: Vec<String>,
}

/// All splits of the total endowment with maximal total valuation, in
/// lexicographic order of the bundle sequence (first agent most
/// significant). Errors when no split of the endowment exists at all.
pub fn welfare_max_allocations(h: &TuEconomy) -> Result<Vec<Allocation>> {
    h.validate()?;
    let domains: Vec<Vec<Bundle>> = h
        .agents
        .iter()
        .map(|a| a.valuation.domain().cloned().collect())
        .collect();
    let mut best: Option<Rat> = None;
    let mut winners: Vec<Allocation> = Vec::new();
    for_each_allocation(&domains, &h.total_endowment, &mut |alloc| {
        let mut welfare = Rat::zero();
        for (agent, x) in h.agents.iter().zip(alloc) {
            welfare += agent
                .valuation
                .value(x)
                .expect("allocation bundles lie in the domain");
        }
        match &best {
            Some(b) if welfare < *b => {}
            Some(b) if welfare == *b => winners.push(Allocation(alloc.to_vec())),
            _ => {
                best = Some(welfare);
                winners.clear();
                winners.push(Allocation(alloc.to_vec()));
            }
        }
        false
    })?;
    if winners.is_empty() {
        return Err(Error::NoEndowmentAllocation);
    }
    Ok(winners)
}

/// The prices at which every agent simultaneously quasilinear-demands its
/// bundle in `alloc`, decided exactly. Each agent contributes one weak
/// optimality row per alternative bundle in its domain.
pub fn supporting_prices(h: &TuEconomy, alloc: &Allocation) -> Result<SupportOutcome> {
    if alloc.0.len() != h.agents.len() {
        return Err(Error::DimensionMismatch {
            expected: h.agents.len(),
            got: alloc.0.len(),
        });
    }
    let mut system = LinearSystem::new(h.dim());
    for (agent, x) in h.agents.iter().zip(&alloc.0) {
        agent.valuation.value_or_err(x)?;
        for row in optimality_rows(&agent.valuation, x, &agent.name) {
            system.push(row);
        }
    }
    Ok(match system.solve() {
        SolveOutcome::Feasible(p) => SupportOutcome::Supported {
            price: PriceVector(p),
            system,
        },
        SolveOutcome::Infeasible(certificate) => SupportOutcome::Unsupported {
            certificate,
            system },
    })
}

/// Complete equilibrium computation for a transferable-utility economy.
///
/// Any equilibrium allocation is welfare-maximal, and if any equilibrium
/// exists then every welfare-maximal allocation is supported by its price
/// (summing per-agent optimality over a welfare tie forces each inequality
/// to bind). Solving the supporting system of one welfare-maximal
/// allocation therefore decides existence, and its Farkas certificate is a
/// proof of nonexistence.
pub fn solve_tu_ce(h: &TuEconomy) -> Result<TuOutcome> {
    let allocation = welfare_max_allocations(h)?
        .into_iter()
        .next()
        .expect("welfare maximizers are nonempty");
    Ok(match supporting_prices(h, &allocation)? {
        SupportOutcome::Supported { price, system } => TuOutcome::Found {
            price,
            allocation,
            system,
        },
        SupportOutcome::Unsupported {
            certificate,
            system,
        } => TuOutcome::NotFound {
            allocation,
            certificate,
            system,
        },
    })
}

/// Whether `p` is a pseudo-equilibrium price of the transferable-utility
/// economy: the total endowment lies in the convex hull of the Minkowski
/// sum of the agents' demand sets at `p`.
pub fn is_pseudo_equilibrium(h: &TuEconomy, p: &PriceVector) -> bool {
    let dim = h.dim();
    let mut sums: BTreeSet<Bundle> = BTreeSet::new();
    sums.insert(Bundle::zeros(dim));
    for agent in &h.agents {
        let demand = quasilinear_demand(&agent.valuation, p);
        let mut next = BTreeSet::new();
        for s in &sums {
            for d in demand.iter() {
                next.insert(s.add(d));
            }
        }
        sums = next;
    }
    let points: Vec<&Bundle> = sums.iter().collect();
    in_convex_hull(&points, &h.total_endowment)
}

/// Exact equilibrium check for an economy with income effects: the
/// endowment must be valid, the allocation must exhaust the total
/// endowment, and each agent's bundle must lie in its Marshallian demand at
/// `p` from its endowment.
pub fn verify_ce(
    e: &Economy,
    endow: &EndowmentAllocation,
    p: &PriceVector,
    alloc: &Allocation,
) -> Result<bool> {
    endow.validate(e)?;
    if p.dim() != e.dim() {
        return Err(Error::DimensionMismatch {
            expected: e.dim(),
            got: p.dim(),
        });
    }
    if alloc.0.len() != e.agents.len() {
        return Err(Error::DimensionMismatch {
            expected: e.agents.len(),
            got: alloc.0.len(),
        });
    }
    if alloc.total(e.dim()) != e.total_endowment {
        return Ok(false);
    }
    for ((agent, x), w) in e.agents.iter().zip(&alloc.0).zip(&endow.0) {
        let demand = marshallian_demand(agent, p, w)?;
        if !demand.contains(x) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether the consumption profile is Pareto efficient. A profile is
/// dominated exactly when some reallocation of its goods can hold every
/// agent at its current utility level for strictly less total money (the
/// savings can then be split to make everyone strictly better off), so the
/// check minimizes total compensation over goods reallocations. The profile
/// need not exhaust the economy's endowment; its own totals are used.
pub fn is_pareto_efficient(e: &Economy, profile: &[ConsumptionBundle]) -> Result<bool> {
    if profile.len() != e.agents.len() {
        return Err(Error::DimensionMismatch {
            expected: e.agents.len(),
            got: profile.len(),
        });
    }
    let dim = e.dim();
    let mut total_money = Rat::zero();
    let mut target = Bundle::zeros(dim);
    for c in profile {
        total_money += &c.money;
        target = target.add(&c.goods);
    }
    let mut tables: Vec<BTreeMap<Bundle, Rat>> = Vec::with_capacity(e.agents.len());
    let mut domains: Vec<Vec<Bundle>> = Vec::with_capacity(e.agents.len());
    for (agent, c) in e.agents.iter().zip(profile) {
        let level = agent.level_of(c)?;
        let mut table = BTreeMap::new();
        for x in agent.feasible_set() {
            table.insert(x.clone(), agent.compensation(x, &level)?);
        }
        domains.push(table.keys().cloned().collect());
        tables.push(table);
    }
    let mut dominated = false;
    for_each_allocation(&domains, &target, &mut |alloc| {
        let mut needed = Rat::zero();
        for (table, x) in tables.iter().zip(alloc) {
            needed += table.get(x).expect("allocation bundles lie in the domain");
        }
        if needed < total_money {
            dominated = true;
            return true;
        }
        false
    })?;
    Ok(!dominated)
}

/// A price at which the profile is an equilibrium of the economy re-endowed
/// at the profile itself. Requires Pareto efficiency (the profile is then a
/// welfare-maximal allocation of the Hicksian economy at its own utility
/// levels, with each agent's wealth equal to its expenditure); returns
/// `None` when no supporting price exists.
pub fn support_pareto(e: &Economy, profile: &[ConsumptionBundle]) -> Result<Option<PriceVector>> {
    if !is_pareto_efficient(e, profile)? {
        return Err(Error::NotParetoEfficient);
    }
    let mut levels = Vec::with_capacity(e.agents.len());
    for (agent, c) in e.agents.iter().zip(profile) {
        levels.push(agent.level_of(c)?);
    }
    let mut hicks = build_hicksian_economy(e, &levels)?;
    let allocation = Allocation(profile.iter().map(|c| c.goods.clone()).collect());
    hicks.total_endowment = allocation.total(e.dim());
    match supporting_prices(&hicks, &allocation)? {
        SupportOutcome::Supported { price, .. } => {
            if hicks.total_endowment == e.total_endowment {
                let endow = EndowmentAllocation(profile.to_vec());
                let ok = verify_ce(e, &endow, &price, &allocation)?;
                debug_assert!(ok, "supporting price must clear the re-endowed economy");
            }
            Ok(Some(price))
        }
        SupportOutcome::Unsupported { .. } => Ok(None),
    }
}

fn shift_interval(iv: Interval, c: &Rat) -> Interval {
    let shift = |b: Option<Bound>| {
        b.map(|b| Bound {
            value: b.value + c,
            strict: b.strict,
        })
    };
    Interval {
        lower: shift(iv.lower),
        upper: shift(iv.upper),
    }
}

/// Net-expenditure ranges at fixed utility levels: supports the Hicksian
/// welfare-maximal allocation and, over its supporting-price polyhedron,
/// computes each agent's exact range of `s_j(x^j) - m^j + p.(x^j - w^j)`.
/// An equilibrium delivering exactly these levels from `endow` requires
/// every interval to contain zero.
pub fn net_expenditure_box(
    e: &Economy,
    endow: &EndowmentAllocation,
    levels: &[Level],
) -> Result<ExpenditureBoxes> {
    endow.validate(e)?;
    if levels.len() != e.agents.len() {
        return Err(Error::DimensionMismatch {
            expected: e.agents.len(),
            got: levels.len(),
        });
    }
    let hicks = build_hicksian_economy(e, levels)?;
    let allocation = welfare_max_allocations(&hicks)?
        .into_iter()
        .next()
        .expect("welfare maximizers are nonempty");
    match supporting_prices(&hicks, &allocation)? {
        SupportOutcome::Unsupported {
            certificate,
            system,
        } => Ok(ExpenditureBoxes::Infeasible {
            certificate,
            system,
        }),
        SupportOutcome::Supported { system, .. } => {
            let mut intervals = Vec::with_capacity(e.agents.len());
            for (((agent, x), w), level) in e
                .agents
                .iter()
                .zip(&allocation.0)
                .zip(&endow.0)
                .zip(levels)
            {
                let s = agent.compensation(x, level)?;
                let constant = &s - &w.money;
                let objective = x.sub(&w.goods).rationals();
                let raw = system
                    .range(&objective)
                    .expect("system known feasible");
                intervals.push(shift_interval(raw, &constant));
            }
            Ok(ExpenditureBoxes::Boxes {
                allocation,
                price_system: system,
                intervals,
            })
        }
    }
}

/// The joint optimality system, in price variables only, for every agent to
/// Marshallian-demand its bundle in `alloc` from its endowment.
///
/// Quasilinear agents contribute their quasilinear optimality rows (their
/// Marshallian demand ignores wealth). A quasilog agent with money `m` and
/// goods endowment `w` holding `x` contributes the strict affordability row
/// `p.(w - x) > -m` and, for every alternative `y`, the cross-multiplied
/// utility comparison
/// `(-v(y)).(m + p.(w - x)) >= (-v(x)).(m + p.(w - y))`,
/// which is linear in `p`; for unaffordable `y` the right side is
/// nonpositive while the left is positive, so the row never binds wrongly.
/// Returns `None` if any agent's utility is a tabulated family.
fn joint_ce_system(
    e: &Economy,
    endow: &EndowmentAllocation,
    alloc: &Allocation,
) -> Option<LinearSystem> {
    let mut system = LinearSystem::new(e.dim());
    for ((agent, x), wc) in e.agents.iter().zip(&alloc.0).zip(&endow.0) {
        match &agent.utility {
            UtilityModel::Quasilinear(v) => {
                for row in optimality_rows(v, x, &agent.name) {
                    system.push(row);
                }
            }
            UtilityModel::Quasilog(vhat) => {
                let w = &wc.goods;
                let m = &wc.money;
                system.push(
                    Constraint::gt(w.sub(x).rationals(), -m.clone())
                        .with_label(format!("{}: {} affordable", agent.name, x)),
                );
                let c_x = -vhat.value(x).expect("allocation bundle lies in the domain");
                let wx = w.sub(x);
                for y in vhat.domain() {
                    if y == x {
                        continue;
                    }
                    let c_y = -vhat.value(y).expect("domain bundle has a value");
                    let wy = w.sub(y);
                    let coeffs: Vec<Rat> = wx
                        .0
                        .iter()
                        .zip(&wy.0)
                        .map(|(&a, &b)| &c_y * int(a) - &c_x * int(b))
                        .collect();
                    let rhs = (&c_x - &c_y) * m;
                    system.push(
                        Constraint::ge(coeffs, rhs)
                            .with_label(format!("{}: {} vs {}", agent.name, x, y)),
                    );
                }
            }
            UtilityModel::Tabulated(_) => return None,
        }
    }
    Some(system)
}

/// Solves the joint optimality system at one allocation. On success returns
/// the price and each agent's post-trade money `m^j + p.(w^j - x^j)`.
fn try_allocation(
    e: &Economy,
    endow: &EndowmentAllocation,
    alloc: &Allocation,
) -> Option<(PriceVector, Vec<Rat>)> {
    let system = joint_ce_system(e, endow, alloc)?;
    match system.solve() {
        SolveOutcome::Feasible(p) => {
            let price = PriceVector(p);
            let money = endow
                .0
                .iter()
                .zip(&alloc.0)
                .map(|(wc, x)| &wc.money + price.dot(&wc.goods.sub(x)))
                .collect();
            Some((price, money))
        }
        SolveOutcome::Infeasible(_) => None,
    }
}

/// Complete equilibrium decision for economies whose agents all have
/// quasilinear or quasilog utility: enumerate every split of the total
/// endowment and solve its joint optimality system exactly. An equilibrium
/// exists if and only if some split's system is feasible.
pub fn decide_marshallian_ce(
    e: &Economy,
    endow: &EndowmentAllocation,
) -> Result<MarshallianDecision> {
    endow.validate(e)?;
    if e.agents
        .iter()
        .any(|a| matches!(a.utility, UtilityModel::Tabulated(_)))
    {
        return Ok(MarshallianDecision::Undecided {
            reason: "optimality of a tabulated-family agent is not linear in prices".into(),
        });
    }
    let domains: Vec<Vec<Bundle>> = e
        .agents
        .iter()
        .map(|a| a.feasible_set().cloned().collect())
        .collect();
    let mut checked = 0usize;
    let mut found: Option<(PriceVector, Allocation, Vec<Rat>)> = None;
    for_each_allocation(&domains, &e.total_endowment, &mut |alloc| {
        checked += 1;
        let allocation = Allocation(alloc.to_vec());
        if let Some((price, money)) = try_allocation(e, endow, &allocation) {
            found = Some((price, allocation, money));
            return true;
        }
        false
    })?;
    Ok(match found {
        Some((price, allocation, money)) => {
            let ok = verify_ce(e, endow, &price, &allocation)?;
            debug_assert!(ok, "a joint-system solution must verify as an equilibrium");
            MarshallianDecision::Exists {
                price,
                allocation,
                money,
            }
        }
        None => MarshallianDecision::Refuted {
            allocations_checked: checked,
        },
    })
}

/// Equilibrium search for an economy with income effects.
///
/// Iterates on candidate utility levels: build the Hicksian economy, take
/// its first welfare-maximal allocation and supporting-price polyhedron,
/// and read each agent's net-expenditure range over it. All ranges
/// containing zero suggests the levels are consistent with market clearing,
/// so the search then pins prices with exact zero-net-expenditure rows and
/// verifies; otherwise each agent whose range has a strict sign bisects its
/// level bracket in the indicated direction (positive net expenditure means
/// the level is unaffordably high). For quasilinear/quasilog economies the
/// per-allocation joint systems also give a complete decision, so the
/// outcome is then exact (`Found` or `AllAllocationsRefuted`); with
/// tabulated-family agents the search can end `SearchExhausted` or report
/// the infeasibility certificate of the last Hicksian economy probed.
pub fn solve_income_ce(
    e: &Economy,
    endow: &EndowmentAllocation,
    params: &IncomeParams,
) -> Result<CEOutcome> {
    endow.validate(e)?;
    let n = e.agents.len();
    let exact_models = !e
        .agents
        .iter()
        .any(|a| matches!(a.utility, UtilityModel::Tabulated(_)));

    // Level-key brackets. Autarky utility is a lower bound on equilibrium
    // utility; for the upper bound, hand each agent its own money plus the
    // whole economy's surplus over subsistence on its best bundle.
    let mut lo: Vec<Rat> = Vec::with_capacity(n);
    for (agent, wc) in e.agents.iter().zip(&endow.0) {
        lo.push(agent.utility_key(wc)?);
    }
    let mut slack = Rat::one();
    for ((agent, wc), key) in e.agents.iter().zip(&endow.0).zip(&lo) {
        let level = agent.level_from_key(key.clone());
        let mut min_s: Option<Rat> = None;
        for x in agent.feasible_set() {
            let s = agent.compensation(x, &level)?;
            if min_s.as_ref().is_none_or(|m| s < *m) {
                min_s = Some(s);
            }
        }
        let min_s = min_s.ok_or(Error::EmptyFeasibleSet)?;
        slack += &wc.money - min_s;
    }
    let mut hi: Vec<Rat> = Vec::with_capacity(n);
    for (agent, wc) in e.agents.iter().zip(&endow.0) {
        let mut best: Option<Rat> = None;
        for x in agent.feasible_set() {
            let key =
                agent.utility_key(&ConsumptionBundle::new(&wc.money + &slack, x.clone()))?;
            if best.as_ref().is_none_or(|b| key > *b) {
                best = Some(key);
            }
        }
        hi.push(best.ok_or(Error::EmptyFeasibleSet)?);
    }

    let mut cur = lo.clone();
    let mut hicksian_failure: Option<(Vec<Level>, FarkasCertificate)> = None;
    let zero = Rat::zero();

    for _ in 0..params.max_iter {
        let levels: Vec<Level> = e
            .agents
            .iter()
            .zip(&cur)
            .map(|(a, k)| a.level_from_key(k.clone()))
            .collect();
        let hicks = build_hicksian_economy(e, &levels)?;
        let candidates = welfare_max_allocations(&hicks)?;

        if exact_models {
            for allocation in &candidates {
                if let Some((price, money)) = try_allocation(e, endow, allocation) {
                    let ok = verify_ce(e, endow, &price, allocation)?;
                    debug_assert!(ok, "a joint-system solution must verify as an equilibrium");
                    if ok {
                        return Ok(CEOutcome::Found {
                            price,
                            allocation: allocation.clone(),
                            money,
                        });
                    }
                }
            }
        }

        let allocation = candidates
            .into_iter()
            .next()
            .expect("welfare maximizers are nonempty");
        let (system, vertex_price) = match supporting_prices(&hicks, &allocation)? {
            SupportOutcome::Unsupported { certificate, .. } => {
                hicksian_failure = Some((levels, certificate));
                break;
            }
            SupportOutcome::Supported { price, system } => (system, price),
        };

        let mut intervals = Vec::with_capacity(n);
        for (((agent, x), wc), level) in e
            .agents
            .iter()
            .zip(&allocation.0)
            .zip(&endow.0)
            .zip(&levels)
        {
            let s = agent.compensation(x, level)?;
            let constant = &s - &wc.money;
            let objective = x.sub(&wc.goods).rationals();
            let raw = system
                .range(&objective)
                .expect("system known feasible");
            intervals.push(shift_interval(raw, &constant));
        }

        if intervals.iter().all(|iv| iv.contains(&zero)) {
            // Pin a price making every net expenditure exactly zero. Such a
            // price hands each agent wealth equal to its expenditure at its
            // level, so supporting the Hicksian allocation clears the
            // Marshallian market too.
            let mut pinned = system.clone();
            for (((agent, x), wc), level) in e
                .agents
                .iter()
                .zip(&allocation.0)
                .zip(&endow.0)
                .zip(&levels)
            {
                let s = agent.compensation(x, level)?;
                let coeffs = x.sub(&wc.goods).rationals();
                let rhs = &wc.money - &s;
                pinned.push(
                    Constraint::eq(coeffs, rhs)
                        .with_label(format!("{}: zero net expenditure", agent.name)),
                );
            }
            if let SolveOutcome::Feasible(p) = pinned.solve() {
                let price = PriceVector(p);
                if verify_ce(e, endow, &price, &allocation)? {
                    let money = endow
                        .0
                        .iter()
                        .zip(&allocation.0)
                        .map(|(wc, x)| &wc.money + price.dot(&wc.goods.sub(x)))
                        .collect();
                    return Ok(CEOutcome::Found {
                        price,
                        allocation,
                        money,
                    });
                }
            }
            if !exact_models && verify_ce(e, endow, &vertex_price, &allocation)? {
                let money = endow
                    .0
                    .iter()
                    .zip(&allocation.0)
                    .map(|(wc, x)| &wc.money + vertex_price.dot(&wc.goods.sub(x)))
                    .collect();
                return Ok(CEOutcome::Found {
                    price: vertex_price,
                    allocation,
                    money,
                });
            }
        }

        let mut moved = false;
        let mut next = cur.clone();
        for (j, iv) in intervals.iter().enumerate() {
            if iv.strictly_above(&zero) {
                // Reaching this level costs more than wealth at every
                // supporting price: bisect downward.
                hi[j] = cur[j].clone();
                let candidate = (&lo[j] + &cur[j]) / int(2);
                if candidate != cur[j] {
                    next[j] = candidate;
                    moved = true;
                }
            } else if iv.strictly_below(&zero) {
                lo[j] = cur[j].clone();
                let candidate = (&cur[j] + &hi[j]) / int(2);
                if candidate != cur[j] {
                    next[j] = candidate;
                    moved = true;
                }
            }
        }
        let brackets_narrow = lo
            .iter()
            .zip(&hi)
            .all(|(l, h)| h - l < params.epsilon);
        cur = next;
        if !moved || brackets_narrow {
            break;
        }
    }

    if exact_models {
        return Ok(match decide_marshallian_ce(e, endow)? {
            MarshallianDecision::Exists {
                price,
                allocation,
                money,
            } => CEOutcome::Found {
                price,
                allocation,
                money,
            },
            MarshallianDecision::Refuted {
                allocations_checked,
            } => CEOutcome::NotFound(Refutation::AllAllocationsRefuted {
                allocations: allocations_checked,
            }),
            MarshallianDecision::Undecided { reason } => {
                CEOutcome::NotFound(Refutation::SearchExhausted { details: reason })
            }
        });
    }
    Ok(CEOutcome::NotFound(match hicksian_failure {
        Some((levels, certificate)) => Refutation::HicksianCertificate {
            levels,
            certificate,
        },
        None => Refutation::SearchExhausted {
            details: format!(
                "no verified equilibrium after {} iterations",
                params.max_iter
            ),
        },
    }))
}

fn level_profiles(level_grid: &[Vec<Level>]) -> Vec<Vec<Level>> {
    let mut out: Vec<Vec<Level>> = vec![Vec::new()];
    for options in level_grid {
        let mut next = Vec::with_capacity(out.len() * options.len());
        for prefix in &out {
            for level in options {
                let mut item = prefix.clone();
                item.push(level.clone());
                next.push(item);
            }
        }
        out = next;
    }
    out
}

/// Cross-checks the Hicksian and Marshallian equilibrium computations on
/// one economy: solves the transferable-utility problem at every profile
/// from the per-agent level grid, solves the income-effects problem from
/// every sampled endowment, and reports exact contradictions (every probed
/// Hicksian economy clears, yet an income-effects instance is refuted
/// allocation by allocation).
pub fn duality_probe(
    e: &Economy,
    level_grid: &[Vec<Level>],
    samples: &[EndowmentAllocation],
    params: &IncomeParams,
) -> Result<DualityReport> {
    if level_grid.len() != e.agents.len() {
        return Err(Error::DimensionMismatch {
            expected: e.agents.len(),
            got: level_grid.len(),
        });
    }
    let mut hicksian_outcomes = Vec::new();
    for levels in level_profiles(level_grid) {
        let hicks = build_hicksian_economy(e, &levels)?;
        let outcome = solve_tu_ce(&hicks)?;
        hicksian_outcomes.push((levels, outcome));
    }
    let mut marshallian_outcomes = Vec::new();
    for endow in samples {
        marshallian_outcomes.push(solve_income_ce(e, endow, params)?);
    }
    let mut violations = Vec::new();
    let all_hicksian_found =
        !hicksian_outcomes.is_empty() && hicksian_outcomes.iter().all(|(_, o)| o.is_found());
    if all_hicksian_found {
        for (i, outcome) in marshallian_outcomes.iter().enumerate() {
            if let CEOutcome::NotFound(Refutation::AllAllocationsRefuted { .. }) = outcome {
                violations.push(format!(
                    "sample {i}: every probed Hicksian economy has an equilibrium, but the \
                     income-effects equilibrium is exactly refuted"
                ));
            }
        }
    }
    Ok(DualityReport {
        hicksian_outcomes,
        marshallian_outcomes,
        violations,
    })
}
