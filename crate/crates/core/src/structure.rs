//! Structural classification of valuations and utility models.
//!
//! This module answers questions about the *shape* of demand rather than its
//! value at a single price: which bundles are ever demanded uniquely, which
//! pairs trade off against each other under small price moves (the demand
//! type), whether goods are substitutes in the gross, net, or strong sense,
//! and whether a valuation is concave. All existence-of-price questions are
//! decided exactly by rational linear systems; only gross substitutability,
//! which quantifies over a continuum of incomes, is checked on sampled grids.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::demand::{marshallian_demand, quasilinear_demand};
use crate::error::{Error, Result};
use crate::hicksian::hicksian_valuation;
use crate::linsys::{Constraint, LinearSystem, SolveOutcome};
use crate::model::{Agent, Bundle, ConsumptionBundle, Level, PriceVector, UtilityModel, Valuation};
use crate::rational::{int, Rat};
use crate::unimodular::DemandTypeVectorSet;

/// Largest number of unpacked single-unit bundles `unpack_units` will build.
const UNPACK_CAP: u128 = 1_000_000;

/// Coefficients and right-hand side of the comparison "`a` is at least as
/// good as `y` at price `p`": `V(a) - p·a >= V(y) - p·y`, rearranged to
/// `p·(y - a) >= V(y) - V(a)`. Combine with `ge`/`gt`/`eq` as needed.
fn comparison_parts(v: &Valuation, a: &Bundle, y: &Bundle) -> (Vec<Rat>, Rat) {
    let coeffs = y.sub(a).rationals();
    let rhs = v.value(y).expect("bundle in domain") - v.value(a).expect("bundle in domain");
    (coeffs, rhs)
}

/// Rows stating that `chosen` is weakly demanded at `p`: it weakly dominates
/// every other bundle in the domain of `v`. Labels carry `owner` so that
/// infeasibility certificates for multi-agent systems stay readable.
pub(crate) fn optimality_rows(v: &Valuation, chosen: &Bundle, owner: &str) -> Vec<Constraint> {
    v.domain()
        .filter(|y| *y != chosen)
        .map(|y| {
            let (coeffs, rhs) = comparison_parts(v, chosen, y);
            Constraint::ge(coeffs, rhs).with_label(format!("{owner}: {chosen} vs {y}"))
        })
        .collect()
}

/// The bundles demanded uniquely at some price: all `x` with `D(p) = {x}`
/// for some `p`, decided by the feasibility of the strict-dominance system
/// `p·(y - x) > V(y) - V(x)` for every other `y` in the domain.
pub fn uniquely_demanded(v: &Valuation) -> BTreeSet<Bundle> {
    let mut out = BTreeSet::new();
    for x in v.domain() {
        let mut system = LinearSystem::new(v.dim());
        for y in v.domain().filter(|y| *y != x) {
            let (coeffs, rhs) = comparison_parts(v, x, y);
            system.push(Constraint::gt(coeffs, rhs));
        }
        if system.is_feasible() {
            out.insert(x.clone());
        }
    }
    out
}

/// Divides out the gcd of the components, preserving direction.
fn primitive_vector(d: &Bundle) -> Vec<i64> {
    let mut g: i64 = 0;
    for &c in &d.0 {
        g = g.gcd(&c);
    }
    assert!(g > 0, "difference of distinct bundles is nonzero");
    d.0.iter().map(|&c| c / g).collect()
}

/// Prices making both `x` and `xp` demanded, every other uniquely demanded
/// bundle strictly worse, and everything else weakly worse.
fn adjacency_system(
    v: &Valuation,
    x: &Bundle,
    xp: &Bundle,
    unique: &BTreeSet<Bundle>,
) -> LinearSystem {
    let mut system = LinearSystem::new(v.dim());
    let (coeffs, rhs) = comparison_parts(v, x, xp);
    system.push(Constraint::eq(coeffs, rhs));
    for y in v.domain().filter(|y| *y != x && *y != xp) {
        let (coeffs, rhs) = comparison_parts(v, x, y);
        if unique.contains(y) {
            system.push(Constraint::gt(coeffs, rhs));
        } else {
            system.push(Constraint::ge(coeffs, rhs));
        }
    }
    system
}

/// The minimal demand type vector set of `v`: the primitive directions
/// `x' - x` over all adjacently demanded pairs, closed under negation. A
/// pair of uniquely demanded bundles is adjacently demanded when some price
/// makes both demanded while every other uniquely demanded bundle is
/// strictly worse.
pub fn minimal_demand_type(v: &Valuation) -> DemandTypeVectorSet {
    let unique = uniquely_demanded(v);
    let list: Vec<&Bundle> = unique.iter().collect();
    let mut vectors = Vec::new();
    for (i, x) in list.iter().enumerate() {
        for xp in list.iter().skip(i + 1) {
            if adjacency_system(v, x, xp, &unique).is_feasible() {
                vectors.push(primitive_vector(&xp.sub(x)));
            }
        }
    }
    DemandTypeVectorSet::new(vectors).expect("primitive differences of distinct bundles")
}

/// True when every adjacently demanded difference of `v` is a multiple of a
/// vector in `dtype`.
pub fn is_of_demand_type(v: &Valuation, dtype: &DemandTypeVectorSet) -> bool {
    minimal_demand_type(v).subset_of(dtype)
}

/// Prices at which demand is exactly `{x, xp}`: indifference between the two
/// and strict dominance over every other bundle in the domain.
fn exact_pair_system(v: &Valuation, x: &Bundle, xp: &Bundle) -> LinearSystem {
    let mut system = LinearSystem::new(v.dim());
    let (coeffs, rhs) = comparison_parts(v, x, xp);
    system.push(Constraint::eq(coeffs, rhs).with_label(format!("{x} tied with {xp}")));
    for y in v.domain().filter(|y| *y != x && *y != xp) {
        let (coeffs, rhs) = comparison_parts(v, x, y);
        system.push(Constraint::gt(coeffs, rhs).with_label(format!("{x} beats {y}")));
    }
    system
}

/// One witness price per pair of bundles that can be demanded together with
/// nothing else: the points of the price space where demand is about to flip
/// between two optima. These are natural probe points for sampled checks.
pub fn boundary_prices(v: &Valuation) -> Vec<PriceVector> {
    let bundles: Vec<&Bundle> = v.domain().collect();
    let mut out = Vec::new();
    for (i, x) in bundles.iter().enumerate() {
        for xp in bundles.iter().skip(i + 1) {
            if let SolveOutcome::Feasible(w) = exact_pair_system(v, x, xp).solve() {
                out.push(PriceVector(w));
            }
        }
    }
    out
}

/// A two-bundle demand set witnessing failure of the substitutes property:
/// at `price`, demand is exactly the recorded pair, whose difference has two
/// or more components of the same sign.
#[derive(Debug, Clone)]
pub struct SubstitutesViolation {
    pub pair: (Bundle, Bundle),
    pub price: PriceVector,
    /// The price region with demand exactly equal to the pair.
    pub system: LinearSystem,
}

fn same_sign_count(d: &Bundle) -> (usize, usize) {
    let pos = d.0.iter().filter(|&&c| c > 0).count();
    let neg = d.0.iter().filter(|&&c| c < 0).count();
    (pos, neg)
}

/// Searches for a price at which demand is exactly a pair of bundles whose
/// difference has at least two positive or at least two negative components.
/// For unit-demand valuations the absence of such a price characterizes the
/// substitutes property.
pub fn substitutes_violation(v: &Valuation) -> Result<Option<SubstitutesViolation>> {
    if !v.is_unit_bounded() {
        return Err(Error::NotUnitBounded);
    }
    let bundles: Vec<&Bundle> = v.domain().collect();
    for (i, x) in bundles.iter().enumerate() {
        for xp in bundles.iter().skip(i + 1) {
            let (pos, neg) = same_sign_count(&xp.sub(x));
            if pos < 2 && neg < 2 {
                continue;
            }
            let system = exact_pair_system(v, x, xp);
            if let SolveOutcome::Feasible(w) = system.solve() {
                let price = PriceVector(w);
                let demanded = quasilinear_demand(v, &price);
                debug_assert!(
                    demanded.len() == 2 && demanded.contains(x) && demanded.contains(xp),
                    "witness price must demand exactly the violating pair"
                );
                return Ok(Some(SubstitutesViolation {
                    pair: ((*x).clone(), (*xp).clone()),
                    price,
                    system,
                }));
            }
        }
    }
    Ok(None)
}

/// True when no two-bundle demand set of `v` mixes gains and losses of two
/// or more goods at once. Requires a unit-demand (0/1) domain.
pub fn is_substitutes(v: &Valuation) -> Result<bool> {
    Ok(substitutes_violation(v)?.is_none())
}

/// The utility levels at which Hicksian valuations must be inspected to
/// decide a property across all levels. One level suffices for quasilinear
/// agents (levels shift the valuation by a constant) and for quasilog agents
/// (levels rescale it positively, relabelling prices without changing the
/// demand regions); tabulated families are probed at every grid level.
pub fn probe_levels(agent: &Agent) -> Vec<Level> {
    match &agent.utility {
        UtilityModel::Quasilinear(_) => vec![Level::Utility(Rat::zero())],
        UtilityModel::Quasilog(_) => vec![Level::Scale(Rat::one())],
        UtilityModel::Tabulated(family) => (0..family.grid_len())
            .map(|i| Level::Grid(int(i as i64)))
            .collect(),
    }
}

/// Searches the agent's Hicksian valuations for a substitutes violation,
/// returning the level at which it occurs.
pub fn net_substitutes_violation(agent: &Agent) -> Result<Option<(Level, SubstitutesViolation)>> {
    for level in probe_levels(agent) {
        let hicksian = hicksian_valuation(agent, &level)?;
        if let Some(violation) = substitutes_violation(&hicksian)? {
            return Ok(Some((level, violation)));
        }
    }
    Ok(None)
}

/// True when every Hicksian valuation of the agent is a substitutes
/// valuation: price rises never reduce compensated demand for other goods.
pub fn is_net_substitutes(agent: &Agent) -> Result<bool> {
    Ok(net_substitutes_violation(agent)?.is_none())
}

/// Grid-sampled check of gross substitutability around a goods endowment:
/// for every sampled money holding, base price, price increase, and good,
/// if demand is single-valued before and after raising that good's price,
/// demand for every *other* good must not fall. Returns `false` on any
/// violation; `true` only means no violation was found in the sample.
pub fn is_gross_substitutes_at(
    agent: &Agent,
    goods_endow: &Bundle,
    money_grid: &[Rat],
    price_grid: &[PriceVector],
    deltas: &[Rat],
) -> Result<bool> {
    for money in money_grid {
        for price in price_grid {
            let endow = ConsumptionBundle::new(money.clone(), goods_endow.clone());
            let before = match marshallian_demand(agent, price, &endow) {
                Ok(d) => d,
                Err(Error::EmptyFeasibleSet) => continue,
                Err(e) => return Err(e),
            };
            let Some(x) = before.singleton() else {
                continue;
            };
            for delta in deltas.iter().filter(|d| d.is_positive()) {
                for good in 0..agent.dim() {
                    let raised = price.add_scaled_unit(good, delta);
                    let after = match marshallian_demand(agent, &raised, &endow) {
                        Ok(d) => d,
                        Err(Error::EmptyFeasibleSet) => continue,
                        Err(e) => return Err(e),
                    };
                    let Some(xp) = after.singleton() else {
                        continue;
                    };
                    let dropped_other = (0..agent.dim())
                        .any(|k| k != good && xp.0[k] < x.0[k]);
                    if dropped_other {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// An exact witness that an agent's preferences violate gross
/// substitutability at some endowment: raising the price of `good` by
/// `lambda` from `base_price` flips demand from `before` to `after`, losing
/// a unit of `dropped_good` as well.
#[derive(Debug, Clone)]
pub struct GrossViolation {
    pub money: Rat,
    pub goods_endow: Bundle,
    pub base_price: PriceVector,
    pub good: usize,
    pub lambda: Rat,
    pub dropped_good: usize,
    pub before: Bundle,
    pub after: Bundle,
}

impl GrossViolation {
    /// Recomputes both demand sets and confirms the recorded flip.
    pub fn confirm(&self, agent: &Agent) -> Result<bool> {
        let endow = ConsumptionBundle::new(self.money.clone(), self.goods_endow.clone());
        let before = marshallian_demand(agent, &self.base_price, &endow)?;
        let raised = self.base_price.add_scaled_unit(self.good, &self.lambda);
        let after = marshallian_demand(agent, &raised, &endow)?;
        Ok(self.good != self.dropped_good
            && before.singleton() == Some(&self.before)
            && after.singleton() == Some(&self.after)
            && self.after.0[self.dropped_good] < self.before.0[self.dropped_good])
    }
}

/// Builds an exact gross-substitutes violation from a net one. A failing
/// Hicksian valuation has a price at which compensated demand is exactly a
/// pair losing two goods at once; endowing the agent with the money that
/// makes that level affordable, a small price move on one lost good drags
/// the other down with it. Returns `None` when no Hicksian level admits an
/// affordable two-bundle region (then no witness arises this way).
pub fn gross_violation_from_net(
    agent: &Agent,
    goods_endow: &Bundle,
) -> Result<Option<GrossViolation>> {
    for level in probe_levels(agent) {
        let hicksian = hicksian_valuation(agent, &level)?;
        if !hicksian.is_unit_bounded() {
            return Err(Error::NotUnitBounded);
        }
        let bundles: Vec<&Bundle> = hicksian.domain().collect();
        for (i, a) in bundles.iter().enumerate() {
            for b in bundles.iter().skip(i + 1) {
                let (pos, neg) = same_sign_count(&b.sub(a));
                if pos < 2 && neg < 2 {
                    continue;
                }
                // Orient the pair so the move from `x` to `xp` loses two
                // goods: x holds them, xp holds neither.
                let (x, xp) = if neg >= 2 { (*a, *b) } else { (*b, *a) };
                if let Some(violation) =
                    affordable_flip(agent, &level, &hicksian, goods_endow, x, xp)?
                {
                    return Ok(Some(violation));
                }
            }
        }
    }
    Ok(None)
}

/// Looks for a price making demand exactly `{x, xp}` while keeping the
/// implied money holding above the agent's floor, then narrows a price step
/// on the first lost good until Marshallian demand flips cleanly.
fn affordable_flip(
    agent: &Agent,
    level: &Level,
    hicksian: &Valuation,
    goods_endow: &Bundle,
    x: &Bundle,
    xp: &Bundle,
) -> Result<Option<GrossViolation>> {
    let diff = xp.sub(x);
    let lost: Vec<usize> = (0..diff.dim()).filter(|&k| diff.0[k] < 0).collect();
    let (good, dropped_good) = (lost[0], lost[1]);

    let compensation_x = agent.compensation(x, level)?;
    let mut system = exact_pair_system(hicksian, x, xp);
    if let Some(floor) = agent.money_floor() {
        // The money endowment that puts the agent at `level` while holding
        // `x` is s(x) + p·(x - w); it must exceed the floor to be feasible.
        let coeffs = x.sub(goods_endow).rationals();
        let rhs = floor - &compensation_x;
        system.push(Constraint::gt(coeffs, rhs).with_label("money above floor"));
    }
    let SolveOutcome::Feasible(w) = system.solve() else {
        return Ok(None);
    };
    let base = PriceVector(w);
    let money = &compensation_x + base.dot(x) - base.dot(goods_endow);
    let endow = ConsumptionBundle::new(money.clone(), goods_endow.clone());

    let mut step = Rat::one();
    for _ in 0..64 {
        let low = base.add_scaled_unit(good, &-step.clone());
        let high = base.add_scaled_unit(good, &step);
        let before = marshallian_demand(agent, &low, &endow)?;
        let after = marshallian_demand(agent, &high, &endow)?;
        if before.singleton() == Some(x) && after.singleton() == Some(xp) {
            return Ok(Some(GrossViolation {
                money,
                goods_endow: goods_endow.clone(),
                base_price: low,
                good,
                lambda: &step * int(2),
                dropped_good,
                before: x.clone(),
                after: xp.clone(),
            }));
        }
        step /= int(2);
    }
    Ok(None)
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut out: u128 = 1;
    for i in 0..k.min(n - k) {
        out = out * (n - i) as u128 / (i + 1) as u128;
    }
    out
}

/// All ways to place `count` ones among `slots` positions, appended to each
/// partial profile in `prefixes`.
fn extend_profiles(prefixes: Vec<Vec<i64>>, slots: usize, count: usize) -> Vec<Vec<i64>> {
    let mut placements: Vec<Vec<i64>> = Vec::new();
    let mut choose = vec![0i64; slots];
    place_ones(&mut choose, 0, count, &mut placements);
    let mut out = Vec::new();
    for prefix in &prefixes {
        for placement in &placements {
            let mut profile = prefix.clone();
            profile.extend_from_slice(placement);
            out.push(profile);
        }
    }
    out
}

fn place_ones(slots: &mut [i64], from: usize, count: usize, out: &mut Vec<Vec<i64>>) {
    if count == 0 {
        out.push(slots.to_vec());
        return;
    }
    if slots.len() - from < count {
        return;
    }
    slots[from] = 1;
    place_ones(slots, from + 1, count - 1, out);
    slots[from] = 0;
    place_ones(slots, from + 1, count, out);
}

/// Re-expresses a multi-unit valuation over one 0/1 coordinate per unit of
/// each good, symmetric across the copies of a good: holding `q` units
/// becomes holding any `q` of that good's unit slots. The slot count per
/// good is the largest quantity appearing in the domain.
pub fn unpack_units(v: &Valuation) -> Result<Valuation> {
    if v.has_negative_quantities() {
        return Err(Error::NegativeQuantities);
    }
    let (_, caps) = v.bounding_box();
    let mut total: u128 = 0;
    for x in v.domain() {
        let mut count: u128 = 1;
        for (i, &q) in x.0.iter().enumerate() {
            count = count.saturating_mul(binomial(caps[i] as usize, q as usize));
        }
        total = total.saturating_add(count);
        if total > UNPACK_CAP {
            return Err(Error::EnumerationCap {
                size: total,
                cap: UNPACK_CAP,
            });
        }
    }
    let mut pairs = Vec::new();
    for (x, value) in v.pairs() {
        let mut profiles = vec![Vec::new()];
        for (i, &q) in x.0.iter().enumerate() {
            profiles = extend_profiles(profiles, caps[i] as usize, q as usize);
        }
        for profile in profiles {
            pairs.push((profile, value.clone()));
        }
    }
    Valuation::from_pairs(pairs)
}

/// Substitutes after splitting every unit into its own good.
pub fn is_strong_substitutes(v: &Valuation) -> Result<bool> {
    is_substitutes(&unpack_units(v)?)
}

/// Net substitutes after splitting every unit into its own good, at every
/// probe level of the agent.
pub fn is_strong_net_substitutes(agent: &Agent) -> Result<bool> {
    for level in probe_levels(agent) {
        let hicksian = hicksian_valuation(agent, &level)?;
        if !is_strong_substitutes(&hicksian)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Membership of `z` in the convex hull of `points`, decided by the
/// (in)feasibility of a separating functional: `a·x <= b` on every point
/// with `a·z >= b + 1`. By homogeneity a separator exists iff one with
/// margin 1 does, so infeasibility is exactly membership.
pub(crate) fn in_convex_hull(points: &[&Bundle], z: &Bundle) -> bool {
    let dim = z.dim();
    let mut system = LinearSystem::new(dim + 1);
    for x in points {
        let mut coeffs = x.rationals();
        coeffs.push(int(-1));
        system.push(Constraint::le(coeffs, Rat::zero()));
    }
    let mut coeffs = z.rationals();
    coeffs.push(int(-1));
    system.push(Constraint::ge(coeffs, Rat::one()));
    !system.is_feasible()
}

/// True when some price makes `z` (weakly) demanded: the weak-dominance
/// system over the rest of the domain is feasible.
fn demanded_at_some_price(v: &Valuation, z: &Bundle) -> bool {
    let mut system = LinearSystem::new(v.dim());
    for y in v.domain().filter(|y| *y != z) {
        let (coeffs, rhs) = comparison_parts(v, z, y);
        system.push(Constraint::ge(coeffs, rhs));
    }
    system.is_feasible()
}

/// Visits every integer point of the box `[lo, hi]`, stopping early if the
/// visitor returns `false`.
/// Visits every integer point of the box `[lo, hi]` until `visit` returns
/// `false`.
pub(crate) fn for_each_box_point(lo: &[i64], hi: &[i64], visit: &mut impl FnMut(&Bundle) -> bool) {
    let dim = lo.len();
    let mut cur = lo.to_vec();
    loop {
        if !visit(&Bundle(cur.clone())) {
            return;
        }
        let mut i = 0;
        loop {
            if i == dim {
                return;
            }
            if cur[i] < hi[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = lo[i];
            i += 1;
        }
    }
}

/// Concavity of a valuation: every integer point of the convex hull of the
/// domain belongs to the domain and is demanded at some price. Equivalently,
/// demand sets are convex-hull-closed at every price.
pub fn is_concave(v: &Valuation) -> bool {
    if v.is_empty() {
        return true;
    }
    let points: Vec<&Bundle> = v.domain().collect();
    let (lo, hi) = v.bounding_box();
    let mut concave = true;
    for_each_box_point(&lo, &hi, &mut |z| {
        if !in_convex_hull(&points, z) {
            return true;
        }
        if !v.contains(z) || !demanded_at_some_price(v, z) {
            concave = false;
            return false;
        }
        true
    });
    concave
}

/// Concavity of every Hicksian valuation of the agent, probed at the levels
/// that decide the property for its utility model.
pub fn is_quasiconcave(agent: &Agent) -> Result<bool> {
    for level in probe_levels(agent) {
        if !is_concave(&hicksian_valuation(agent, &level)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The valuation `x -> t·x` on the given domain. Its demand at price `t - s`
/// is the set of maximizers of `s·x` over the domain, which makes these
/// valuations convenient building blocks for demand sets with prescribed
/// shapes.
pub fn linear_on_domain(domain: &[Bundle], t: &PriceVector) -> Result<Valuation> {
    Valuation::from_pairs(domain.iter().map(|x| (x.0.clone(), t.dot(x))))
}
