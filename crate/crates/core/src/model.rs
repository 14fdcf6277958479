//! Core market model: bundles, prices, valuations, utility models with money,
//! agents, and economies.
//!
//! Utility is always quasiseparable in money. The three supported families are
//! quasilinear utility `m + V(x)` (money floor `-inf`), quasilog utility
//! `log m - log(-v(x))` over strictly negative quasivaluations `v` (money floor
//! `0`), and tabulated families given by a finite grid of utility levels with
//! strictly pointwise-decreasing valuations. Quasilog utility levels are
//! carried multiplicatively (as `w = e^u > 0`) so that every computation stays
//! in exact rational arithmetic.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rat, int, Rat};

/// An integer bundle of goods. Coordinates may be negative in intermediate
/// arithmetic (differences), but feasible sets of quasilog agents and all
/// unit-unpacking operations require nonnegative quantities.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bundle(pub Vec<i64>);

impl Bundle {
    pub fn zeros(dim: usize) -> Bundle {
        Bundle(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, other: &Bundle) -> Bundle {
        Bundle(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Bundle) -> Bundle {
        Bundle(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    /// Unit vector `e_i`.
    pub fn unit(dim: usize, i: usize) -> Bundle {
        let mut v = vec![0; dim];
        v[i] = 1;
        Bundle(v)
    }

    /// The coordinates as exact rationals, for use in linear systems.
    pub fn rationals(&self) -> Vec<Rat> {
        self.0.iter().map(|&c| int(c)).collect()
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A price per good, in units of money. Money itself always has price one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PriceVector(pub Vec<Rat>);

impl PriceVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Inner product `p . x`.
    pub fn dot(&self, x: &Bundle) -> Rat {
        let mut acc = Rat::zero();
        for (p, &q) in self.0.iter().zip(&x.0) {
            if q != 0 {
                acc += p * Rat::from_integer(BigInt::from(q));
            }
        }
        acc
    }

    pub fn add_scaled_unit(&self, i: usize, delta: &Rat) -> PriceVector {
        let mut p = self.0.clone();
        p[i] += delta;
        PriceVector(p)
    }
}

impl fmt::Display for PriceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rat).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A finite valuation: an exact rational value for every bundle of a finite,
/// nonempty feasible set. The domain of the value map *is* the feasible set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation {
    dim: usize,
    values: BTreeMap<Bundle, Rat>,
}

impl Valuation {
    pub fn new(values: BTreeMap<Bundle, Rat>) -> Result<Valuation> {
        let mut dims = values.keys().map(Bundle::dim);
        let dim = dims.next().ok_or(Error::EmptyFeasibleSet)?;
        if let Some(got) = dims.find(|&d| d != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got });
        }
        Ok(Valuation { dim, values })
    }

    /// Convenience constructor from `(coordinates, value)` pairs.
    pub fn from_pairs<I>(pairs: I) -> Result<Valuation>
    where
        I: IntoIterator<Item = (Vec<i64>, Rat)>,
    {
        let values: BTreeMap<Bundle, Rat> =
            pairs.into_iter().map(|(x, v)| (Bundle(x), v)).collect();
        Valuation::new(values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Bundle> + Clone {
        self.values.keys()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Bundle, &Rat)> + Clone {
        self.values.iter()
    }

    pub fn contains(&self, x: &Bundle) -> bool {
        self.values.contains_key(x)
    }

    pub fn value(&self, x: &Bundle) -> Option<&Rat> {
        self.values.get(x)
    }

    pub fn value_or_err(&self, x: &Bundle) -> Result<&Rat> {
        self.values
            .get(x)
            .ok_or_else(|| Error::InfeasibleBundle(x.to_string()))
    }

    /// Pointwise positive scaling `c * V` (demand regions rescale with `c`).
    pub fn scale(&self, c: &Rat) -> Valuation {
        Valuation {
            dim: self.dim,
            values: self.values.iter().map(|(x, v)| (x.clone(), v * c)).collect(),
        }
    }

    /// Pointwise shift `V + c` (demand is unchanged).
    pub fn offset(&self, c: &Rat) -> Valuation {
        Valuation {
            dim: self.dim,
            values: self.values.iter().map(|(x, v)| (x.clone(), v + c)).collect(),
        }
    }

    pub fn is_unit_bounded(&self) -> bool {
        self.domain().all(|x| x.0.iter().all(|&q| q == 0 || q == 1))
    }

    pub fn has_negative_quantities(&self) -> bool {
        self.domain().any(|x| x.0.iter().any(|&q| q < 0))
    }

    pub fn all_values_negative(&self) -> bool {
        self.values.values().all(|v| v.is_negative())
    }

    /// Componentwise bounding box of the feasible set.
    pub fn bounding_box(&self) -> (Vec<i64>, Vec<i64>) {
        let mut lo = vec![i64::MAX; self.dim];
        let mut hi = vec![i64::MIN; self.dim];
        for x in self.domain() {
            for i in 0..self.dim {
                lo[i] = lo[i].min(x.0[i]);
                hi[i] = hi[i].max(x.0[i]);
            }
        }
        (lo, hi)
    }
}

/// A finite grid of utility levels with one valuation per level. Valuations
/// share one domain and decrease strictly, pointwise, as the level rises.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TabulatedFamily {
    levels: Vec<Rat>,
    valuations: Vec<Valuation>,
    money_floor: Option<Rat>,
}

impl TabulatedFamily {
    /// Validating constructor; see also [`crate::hicksian::family_from_grid`].
    pub fn new(
        levels: Vec<Rat>,
        valuations: Vec<Valuation>,
        money_floor: Option<Rat>,
    ) -> Result<TabulatedFamily> {
        if levels.is_empty() || levels.len() != valuations.len() {
            return Err(Error::DimensionMismatch {
                expected: levels.len(),
                got: valuations.len(),
            });
        }
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::LevelsNotIncreasing);
        }
        let first = &valuations[0];
        for v in &valuations[1..] {
            if v.len() != first.len() || !v.domain().eq(first.domain()) {
                return Err(Error::MismatchedDomains);
            }
        }
        for pair in valuations.windows(2) {
            for (x, value) in pair[0].pairs() {
                if pair[1].value(x).unwrap() >= value {
                    return Err(Error::NotStrictlyDecreasing);
                }
            }
        }
        Ok(TabulatedFamily {
            levels,
            valuations,
            money_floor,
        })
    }

    pub fn grid_len(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Rat] {
        &self.levels
    }

    pub fn valuation_at(&self, index: usize) -> &Valuation {
        &self.valuations[index]
    }

    pub fn money_floor(&self) -> Option<&Rat> {
        self.money_floor.as_ref()
    }

    /// Compensation `s(x, t)` at fractional grid index `t`: the grid values
    /// `s(x, i) = -V_i(x)` joined piecewise linearly (and extended beyond the
    /// grid with the end segments' slopes), which makes compensation the exact
    /// inverse of the utility key in the money coordinate.
    fn compensation_at_index(&self, x: &Bundle, t: &Rat) -> Result<Rat> {
        let s = |i: usize| -> Result<Rat> { Ok(-self.valuations[i].value_or_err(x)?.clone()) };
        let n = self.levels.len();
        if n == 1 {
            // A single level behaves like a quasilinear scale in money.
            return Ok(s(0)? + t);
        }
        // Clamp the segment index to [0, n-2]; the first and last segments
        // extrapolate beyond the grid.
        let floor_t = t.floor().to_integer();
        let seg: usize = if floor_t.is_negative() {
            0
        } else {
            use num_traits::ToPrimitive;
            floor_t.to_usize().map_or(n - 2, |f| f.min(n - 2))
        };
        let s_lo = s(seg)?;
        let s_hi = s(seg + 1)?;
        let slope = &s_hi - &s_lo;
        Ok(&s_lo + (t - int(seg as i64)) * slope)
    }

    /// Inverse of [`Self::compensation_at_index`] in `money`: the fractional
    /// grid index achieved by consuming `(money, x)`.
    fn index_of(&self, x: &Bundle, money: &Rat) -> Result<Rat> {
        let s = |i: usize| -> Result<Rat> { Ok(-self.valuations[i].value_or_err(x)?.clone()) };
        let n = self.levels.len();
        if n == 1 {
            return Ok(money - s(0)?);
        }
        // Find the segment whose compensation range contains `money`.
        let mut seg = 0usize;
        while seg + 2 < n && money > &s(seg + 1)? {
            seg += 1;
        }
        let s_lo = s(seg)?;
        let s_hi = s(seg + 1)?;
        let slope = &s_hi - &s_lo;
        Ok(int(seg as i64) + (money - s_lo) / slope)
    }
}

/// The supported utility models over (money, goods).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UtilityModel {
    /// `U(m, x) = m + V(x)`; money floor `-inf`.
    Quasilinear(Valuation),
    /// `U(m, x) = log m - log(-v(x))` with `v < 0`; money floor `0`.
    Quasilog(Valuation),
    /// Utility known on a finite grid of levels.
    Tabulated(TabulatedFamily),
}

/// A utility level, tagged by the model it belongs to.
///
/// Quasilog levels are stored multiplicatively: `Scale(w)` stands for the
/// utility level `log w`, so valid levels have `w > 0`. Tabulated levels are
/// fractional grid indices; index `i` (an integer) is the `i`-th grid level.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Level {
    Utility(Rat),
    Scale(Rat),
    Grid(Rat),
}

impl Level {
    /// The underlying scalar key, regardless of tag.
    pub fn key(&self) -> &Rat {
        match self {
            Level::Utility(r) | Level::Scale(r) | Level::Grid(r) => r,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Utility(r) => write!(f, "u={}", format_rat(r)),
            Level::Scale(r) => write!(f, "w={}", format_rat(r)),
            Level::Grid(r) => write!(f, "grid={}", format_rat(r)),
        }
    }
}

/// Consumption of money together with a bundle of goods.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ConsumptionBundle {
    pub money: Rat,
    pub goods: Bundle,
}

impl ConsumptionBundle {
    pub fn new(money: Rat, goods: Bundle) -> ConsumptionBundle {
        ConsumptionBundle { money, goods }
    }
}

impl fmt::Display for ConsumptionBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[money={}, goods={}]", format_rat(&self.money), self.goods)
    }
}

/// An agent: a name and a utility model over (money, goods).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agent {
    pub name: String,
    pub utility: UtilityModel,
}

impl Agent {
    pub fn new(name: impl Into<String>, utility: UtilityModel) -> Agent {
        Agent {
            name: name.into(),
            utility,
        }
    }

    /// The valuation object whose domain is this agent's feasible set of
    /// goods bundles (for tabulated families: the shared domain).
    pub fn domain_valuation(&self) -> &Valuation {
        match &self.utility {
            UtilityModel::Quasilinear(v) | UtilityModel::Quasilog(v) => v,
            UtilityModel::Tabulated(fam) => fam.valuation_at(0),
        }
    }

    pub fn feasible_set(&self) -> impl Iterator<Item = &Bundle> + Clone {
        self.domain_valuation().domain()
    }

    pub fn dim(&self) -> usize {
        self.domain_valuation().dim()
    }

    /// The open lower bound on money consumption; `None` means unbounded.
    pub fn money_floor(&self) -> Option<Rat> {
        match &self.utility {
            UtilityModel::Quasilinear(_) => None,
            UtilityModel::Quasilog(_) => Some(Rat::zero()),
            UtilityModel::Tabulated(fam) => fam.money_floor().cloned(),
        }
    }

    /// True when `money` is strictly above this agent's floor.
    pub fn money_feasible(&self, money: &Rat) -> bool {
        match self.money_floor() {
            None => true,
            Some(f) => money > &f,
        }
    }

    fn check_consumption(&self, c: &ConsumptionBundle) -> Result<()> {
        self.domain_valuation().value_or_err(&c.goods)?;
        if !self.money_feasible(&c.money) {
            return Err(Error::InfeasibleConsumption {
                money: format_rat(&c.money),
                floor: self
                    .money_floor()
                    .map(|f| format_rat(&f))
                    .unwrap_or_else(|| "-inf".into()),
            });
        }
        Ok(())
    }

    /// A scalar strictly increasing in utility, comparable across bundles:
    /// `m + V(x)` for quasilinear agents, `m / (-v(x))` for quasilog agents
    /// (the scale `w = e^u`), and the interpolated grid index for tabulated
    /// families.
    pub fn utility_key(&self, c: &ConsumptionBundle) -> Result<Rat> {
        self.check_consumption(c)?;
        match &self.utility {
            UtilityModel::Quasilinear(v) => Ok(&c.money + v.value(&c.goods).unwrap()),
            UtilityModel::Quasilog(v) => Ok(&c.money / -v.value(&c.goods).unwrap()),
            UtilityModel::Tabulated(fam) => fam.index_of(&c.goods, &c.money),
        }
    }

    /// The utility level attained by consuming `c`, tagged for this model.
    pub fn level_of(&self, c: &ConsumptionBundle) -> Result<Level> {
        let key = self.utility_key(c)?;
        Ok(match &self.utility {
            UtilityModel::Quasilinear(_) => Level::Utility(key),
            UtilityModel::Quasilog(_) => Level::Scale(key),
            UtilityModel::Tabulated(_) => Level::Grid(key),
        })
    }

    /// Compensation `s(x, u)`: the money that makes bundle `x` reach utility
    /// level `u`. Exact inverse of [`Self::utility_key`] in money:
    /// `s(x, level_of(m, x)) = m`.
    pub fn compensation(&self, x: &Bundle, level: &Level) -> Result<Rat> {
        match (&self.utility, level) {
            (UtilityModel::Quasilinear(v), Level::Utility(u)) => Ok(u - v.value_or_err(x)?),
            (UtilityModel::Quasilog(v), Level::Scale(w)) => {
                if !w.is_positive() {
                    return Err(Error::LevelOutOfRange(level.to_string()));
                }
                Ok(w * -v.value_or_err(x)?)
            }
            (UtilityModel::Tabulated(fam), Level::Grid(t)) => fam.compensation_at_index(x, t),
            _ => Err(Error::LevelOutOfRange(level.to_string())),
        }
    }

    /// Wraps a raw scalar in this model's level tag (no range validation).
    pub fn level_from_key(&self, key: Rat) -> Level {
        match &self.utility {
            UtilityModel::Quasilinear(_) => Level::Utility(key),
            UtilityModel::Quasilog(_) => Level::Scale(key),
            UtilityModel::Tabulated(_) => Level::Grid(key),
        }
    }
}

/// An exchange economy: named goods, agents, and the total goods endowment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Economy {
    pub goods: Vec<String>,
    pub agents: Vec<Agent>,
    pub total_endowment: Bundle,
}

impl Economy {
    pub fn dim(&self) -> usize {
        self.goods.len()
    }

    pub fn agent(&self, name: &str) -> Option<&Agent> {
        self.agents.iter().find(|a| a.name == name)
    }
}

/// Per-agent endowments of money and goods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndowmentAllocation(pub Vec<ConsumptionBundle>);

impl EndowmentAllocation {
    /// Checks per-agent feasibility and that the goods sum to the economy's
    /// total endowment.
    pub fn validate(&self, economy: &Economy) -> Result<()> {
        if self.0.len() != economy.agents.len() {
            return Err(Error::DimensionMismatch {
                expected: economy.agents.len(),
                got: self.0.len(),
            });
        }
        let mut total = Bundle::zeros(economy.dim());
        for (agent, c) in economy.agents.iter().zip(&self.0) {
            agent.check_consumption(c)?;
            total = total.add(&c.goods);
        }
        if total != economy.total_endowment {
            return Err(Error::NoEndowmentAllocation);
        }
        Ok(())
    }
}

/// A transferable-utility (quasilinear) economy: one valuation per agent and a
/// total goods endowment. Hicksian economies take this form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuAgent {
    pub name: String,
    pub valuation: Valuation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuEconomy {
    pub goods: Vec<String>,
    pub agents: Vec<TuAgent>,
    pub total_endowment: Bundle,
}

impl TuEconomy {
    pub fn dim(&self) -> usize {
        self.goods.len()
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        if self.total_endowment.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: self.total_endowment.dim(),
            });
        }
        for a in &self.agents {
            if a.valuation.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: a.valuation.dim(),
                });
            }
        }
        let domains: Vec<Vec<Bundle>> = self
            .agents
            .iter()
            .map(|a| a.valuation.domain().cloned().collect())
            .collect();
        if !allocation_exists(&domains, &self.total_endowment) {
            return Err(Error::NoEndowmentAllocation);
        }
        Ok(())
    }
}

/// Validates an economy: dimensions agree, quasilog quasivaluations are
/// strictly negative, and the total endowment splits across the agents'
/// feasible sets (decided by exact enumeration of partial sums).
pub fn validate_economy(economy: &Economy) -> Result<()> {
    let dim = economy.dim();
    if economy.total_endowment.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: economy.total_endowment.dim(),
        });
    }
    for agent in &economy.agents {
        if agent.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: agent.dim(),
            });
        }
        match &agent.utility {
            UtilityModel::Quasilog(v) => {
                if !v.all_values_negative() {
                    return Err(Error::NotNegativeValued);
                }
                if v.has_negative_quantities() {
                    return Err(Error::NegativeQuantities);
                }
            }
            UtilityModel::Quasilinear(_) | UtilityModel::Tabulated(_) => {}
        }
    }
    let domains: Vec<Vec<Bundle>> = economy
        .agents
        .iter()
        .map(|a| a.feasible_set().cloned().collect())
        .collect();
    if !allocation_exists(&domains, &economy.total_endowment) {
        return Err(Error::NoEndowmentAllocation);
    }
    Ok(())
}

/// Whether some choice of one bundle per domain sums to `target`.
/// Dynamic program over reachable partial sums, pruned by suffix bounds.
pub fn allocation_exists(domains: &[Vec<Bundle>], target: &Bundle) -> bool {
    if domains.iter().any(|d| d.is_empty()) {
        return false;
    }
    let dim = target.dim();
    let (min_suffix, max_suffix) = suffix_bounds(domains, dim);
    let mut reachable = vec![Bundle::zeros(dim)];
    for (k, domain) in domains.iter().enumerate() {
        let mut next = std::collections::BTreeSet::new();
        for partial in &reachable {
            for x in domain {
                let s = partial.add(x);
                let ok = (0..dim).all(|i| {
                    s.0[i] + min_suffix[k + 1][i] <= target.0[i]
                        && target.0[i] <= s.0[i] + max_suffix[k + 1][i]
                });
                if ok {
                    next.insert(s);
                }
            }
        }
        if next.is_empty() {
            return false;
        }
        reachable = next.into_iter().collect();
    }
    reachable.iter().any(|s| s == target)
}

fn suffix_bounds(domains: &[Vec<Bundle>], dim: usize) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let n = domains.len();
    let mut min_suffix = vec![vec![0i64; dim]; n + 1];
    let mut max_suffix = vec![vec![0i64; dim]; n + 1];
    for k in (0..n).rev() {
        for i in 0..dim {
            let lo = domains[k].iter().map(|x| x.0[i]).min().unwrap_or(0);
            let hi = domains[k].iter().map(|x| x.0[i]).max().unwrap_or(0);
            min_suffix[k][i] = min_suffix[k + 1][i].saturating_add(lo);
            max_suffix[k][i] = max_suffix[k + 1][i].saturating_add(hi);
        }
    }
    (min_suffix, max_suffix)
}

/// Hard cap on allocation enumeration (product of feasible-set sizes).
pub const ALLOCATION_CAP: u128 = 10_000_000;

/// Visits every allocation (one bundle per domain) summing to `target`,
/// stopping early when `f` returns `true`. Errors when the unpruned product
/// of domain sizes exceeds [`ALLOCATION_CAP`].
pub fn for_each_allocation<F>(domains: &[Vec<Bundle>], target: &Bundle, f: &mut F) -> Result<bool>
where
    F: FnMut(&[Bundle]) -> bool,
{
    let product: u128 = domains.iter().map(|d| d.len() as u128).product();
    if product > ALLOCATION_CAP {
        return Err(Error::EnumerationCap {
            size: product,
            cap: ALLOCATION_CAP,
        });
    }
    let dim = target.dim();
    let (min_suffix, max_suffix) = suffix_bounds(domains, dim);
    let mut chosen: Vec<Bundle> = Vec::with_capacity(domains.len());
    let mut partial = Bundle::zeros(dim);
    #[allow(clippy::too_many_arguments)]
    fn recurse<F>(
        domains: &[Vec<Bundle>],
        target: &Bundle,
        min_suffix: &[Vec<i64>],
        max_suffix: &[Vec<i64>],
        k: usize,
        partial: &mut Bundle,
        chosen: &mut Vec<Bundle>,
        f: &mut F,
    ) -> bool
    where
        F: FnMut(&[Bundle]) -> bool,
    {
        if k == domains.len() {
            return partial == target && f(chosen);
        }
        for x in &domains[k] {
            let s = partial.add(x);
            let ok = (0..target.dim()).all(|i| {
                s.0[i] + min_suffix[k + 1][i] <= target.0[i]
                    && target.0[i] <= s.0[i] + max_suffix[k + 1][i]
            });
            if !ok {
                continue;
            }
            chosen.push(x.clone());
            let old = std::mem::replace(partial, s);
            if recurse(domains, target, min_suffix, max_suffix, k + 1, partial, chosen, f) {
                return true;
            }
            *partial = old;
            chosen.pop();
        }
        false
    }
    Ok(recurse(
        domains,
        target,
        &min_suffix,
        &max_suffix,
        0,
        &mut partial,
        &mut chosen,
        f,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn unit_square_valuation(vals: [i64; 4]) -> Valuation {
        Valuation::from_pairs([
            (vec![0, 0], int(vals[0])),
            (vec![0, 1], int(vals[1])),
            (vec![1, 0], int(vals[2])),
            (vec![1, 1], int(vals[3])),
        ])
        .unwrap()
    }

    #[test]
    fn valuation_rejects_empty_and_mismatched() {
        assert_eq!(
            Valuation::new(BTreeMap::new()).unwrap_err(),
            Error::EmptyFeasibleSet
        );
        let mixed = Valuation::from_pairs([(vec![0], int(0)), (vec![0, 1], int(1))]);
        assert!(matches!(mixed, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn quasilinear_key_and_compensation_invert() {
        let v = unit_square_valuation([0, 0, 0, 5]);
        let agent = Agent::new("j", UtilityModel::Quasilinear(v));
        let c = ConsumptionBundle::new(rat(7, 2), Bundle(vec![1, 1]));
        let key = agent.utility_key(&c).unwrap();
        assert_eq!(key, rat(17, 2));
        let level = agent.level_of(&c).unwrap();
        let money = agent.compensation(&c.goods, &level).unwrap();
        assert_eq!(money, c.money);
    }

    #[test]
    fn quasilog_keys_match_worked_example() {
        // Quasivaluation (-11, -7, -4, -1); endowed with good 2 and money 3.
        let v = Valuation::from_pairs([
            (vec![0, 0], int(-11)),
            (vec![0, 1], int(-7)),
            (vec![1, 0], int(-4)),
            (vec![1, 1], int(-1)),
        ])
        .unwrap();
        let agent = Agent::new("j", UtilityModel::Quasilog(v));
        let key = |m: Rat, goods: Vec<i64>| {
            agent
                .utility_key(&ConsumptionBundle::new(m, Bundle(goods)))
                .unwrap()
        };
        assert_eq!(key(int(5), vec![0, 0]), rat(5, 11));
        assert_eq!(key(int(3), vec![0, 1]), rat(3, 7));
        assert_eq!(key(int(3), vec![1, 0]), rat(3, 4));
        assert_eq!(key(int(1), vec![1, 1]), int(1));
        // Compensation at the scale w = 5/11 is (5/11) * (-v).
        let lvl = Level::Scale(rat(5, 11));
        assert_eq!(
            agent.compensation(&Bundle(vec![1, 0]), &lvl).unwrap(),
            rat(20, 11)
        );
        assert_eq!(
            agent.compensation(&Bundle(vec![0, 0]), &lvl).unwrap(),
            int(5)
        );
    }

    #[test]
    fn quasilog_floor_is_strict() {
        let v = Valuation::from_pairs([(vec![0], int(-1))]).unwrap();
        let agent = Agent::new("a", UtilityModel::Quasilog(v));
        let at_floor = ConsumptionBundle::new(int(0), Bundle(vec![0]));
        assert!(matches!(
            agent.utility_key(&at_floor),
            Err(Error::InfeasibleConsumption { .. })
        ));
        let above = ConsumptionBundle::new(rat(1, 100), Bundle(vec![0]));
        assert!(agent.utility_key(&above).is_ok());
    }

    #[test]
    fn compensation_rejects_nonpositive_scale() {
        let v = Valuation::from_pairs([(vec![0], int(-2))]).unwrap();
        let agent = Agent::new("a", UtilityModel::Quasilog(v));
        let err = agent
            .compensation(&Bundle(vec![0]), &Level::Scale(int(0)))
            .unwrap_err();
        assert!(matches!(err, Error::LevelOutOfRange(_)));
        let wrong_tag = agent
            .compensation(&Bundle(vec![0]), &Level::Utility(int(1)))
            .unwrap_err();
        assert!(matches!(wrong_tag, Error::LevelOutOfRange(_)));
    }

    #[test]
    fn tabulated_family_validation() {
        let v0 = Valuation::from_pairs([(vec![0], int(4)), (vec![1], int(6))]).unwrap();
        let v1 = Valuation::from_pairs([(vec![0], int(1)), (vec![1], int(5))]).unwrap();
        assert!(TabulatedFamily::new(vec![int(0), int(1)], vec![v0.clone(), v1.clone()], None).is_ok());
        // Levels must strictly increase.
        assert_eq!(
            TabulatedFamily::new(vec![int(1), int(1)], vec![v0.clone(), v1.clone()], None)
                .unwrap_err(),
            Error::LevelsNotIncreasing
        );
        // Valuations must strictly decrease pointwise.
        assert_eq!(
            TabulatedFamily::new(vec![int(0), int(1)], vec![v1.clone(), v0.clone()], None)
                .unwrap_err(),
            Error::NotStrictlyDecreasing
        );
        // Domains must agree.
        let other = Valuation::from_pairs([(vec![0], int(0))]).unwrap();
        assert_eq!(
            TabulatedFamily::new(vec![int(0), int(1)], vec![v0, other], None).unwrap_err(),
            Error::MismatchedDomains
        );
    }

    #[test]
    fn tabulated_key_round_trips_through_compensation() {
        // Grid compensations at x=(1): s = (-6, -5) -> wait: s_i = -V_i.
        let v0 = Valuation::from_pairs([(vec![0], int(4)), (vec![1], int(6))]).unwrap();
        let v1 = Valuation::from_pairs([(vec![0], int(1)), (vec![1], int(5))]).unwrap();
        let fam = TabulatedFamily::new(vec![int(0), int(1)], vec![v0, v1], None).unwrap();
        let agent = Agent::new("t", UtilityModel::Tabulated(fam));
        for (money, goods) in [
            (int(-4), vec![0]),  // exactly grid level 0
            (int(-1), vec![0]),  // exactly grid level 1
            (int(0), vec![0]),   // beyond the grid
            (rat(-9, 2), vec![1]),
            (int(2), vec![1]),
        ] {
            let c = ConsumptionBundle::new(money.clone(), Bundle(goods));
            let level = agent.level_of(&c).unwrap();
            assert_eq!(agent.compensation(&c.goods, &level).unwrap(), money);
        }
        // Integer indices hit the grid compensations exactly.
        let s0 = agent
            .compensation(&Bundle(vec![1]), &Level::Grid(int(0)))
            .unwrap();
        assert_eq!(s0, int(-6));
        let s1 = agent
            .compensation(&Bundle(vec![1]), &Level::Grid(int(1)))
            .unwrap();
        assert_eq!(s1, int(-5));
    }

    #[test]
    fn allocation_existence() {
        let d1 = vec![Bundle(vec![0, 0]), Bundle(vec![1, 1])];
        let d2 = vec![Bundle(vec![0, 0]), Bundle(vec![1, 0]), Bundle(vec![0, 1])];
        assert!(allocation_exists(&[d1.clone(), d2.clone()], &Bundle(vec![1, 1])));
        assert!(!allocation_exists(&[d1.clone(), d2.clone()], &Bundle(vec![2, 2])));
        let mut seen = Vec::new();
        for_each_allocation(&[d1, d2], &Bundle(vec![1, 1]), &mut |alloc| {
            seen.push(alloc.to_vec());
            false
        })
        .unwrap();
        assert_eq!(seen.len(), 1); // only (1,1)+(0,0); (1,1) is unavailable to agent 2
        assert_eq!(seen[0], vec![Bundle(vec![1, 1]), Bundle(vec![0, 0])]);
    }

    #[test]
    fn economy_validation_catches_bad_totals() {
        let v = unit_square_valuation([0, 0, 0, 5]);
        let economy = Economy {
            goods: vec!["a".into(), "b".into()],
            agents: vec![Agent::new("j", UtilityModel::Quasilinear(v))],
            total_endowment: Bundle(vec![2, 0]),
        };
        assert_eq!(
            validate_economy(&economy).unwrap_err(),
            Error::NoEndowmentAllocation
        );
    }
}
