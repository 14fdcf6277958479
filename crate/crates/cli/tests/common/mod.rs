//! Shared support for the acceptance suite: seeded random generators for
//! agents, economies, and vector sets, plus independent recomputations of
//! demand and equilibrium existence used to cross-check the library.
//!
//! The oracle side deliberately avoids the library's demand and equilibrium
//! code: demand is recomputed straight from the utility definitions, and
//! existence is decided by enumerating one exact representative price inside
//! every face of the demand-boundary arrangement (for one- and two-good
//! economies). Agreement between the two sides is therefore evidence about
//! the library, not a tautology.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use indivisible::hicksian::hicksian_valuation;
use indivisible::model::{for_each_allocation, validate_economy};
use indivisible::rational::{int, rat};
use indivisible::structure::{
    boundary_prices, gross_violation_from_net, is_gross_substitutes_at, substitutes_violation,
};
use indivisible::{
    Agent, Bundle, ConsumptionBundle, DemandTypeVectorSet, Economy, EndowmentAllocation, Level,
    PriceVector, Rat, UtilityModel, Valuation,
};
use num_traits::{Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Random generators
// ---------------------------------------------------------------------------

/// All 0/1 bundles with `dim` coordinates; the empty bundle comes first.
pub fn unit_cube(dim: usize) -> Vec<Bundle> {
    (0..1u32 << dim)
        .map(|mask| Bundle((0..dim).map(|i| i64::from(mask >> i & 1)).collect()))
        .collect()
}

fn quasilog_agent(name: String, pairs: Vec<(Vec<i64>, Rat)>) -> Agent {
    let v = Valuation::from_pairs(pairs).expect("generated domains are nonempty");
    Agent::new(name, UtilityModel::Quasilog(v))
}

/// The empty bundle plus up to `max_bundles - 1` random nonzero 0/1 bundles.
fn random_cube_domain(r: &mut ChaCha8Rng, dim: usize, max_bundles: usize) -> Vec<Bundle> {
    let cube = unit_cube(dim);
    let mut pool: Vec<Bundle> = cube[1..].to_vec();
    let extras = r.gen_range(1..=(max_bundles - 1).min(pool.len()));
    let mut domain = vec![cube[0].clone()];
    for _ in 0..extras {
        let k = r.gen_range(0..pool.len());
        domain.push(pool.swap_remove(k));
    }
    domain
}

/// A quasilog agent on a random 0/1 domain (always containing the empty
/// bundle, at most `max_bundles` bundles), values integer in -12..=-1.
pub fn random_quasilog_agent(
    r: &mut ChaCha8Rng,
    name: String,
    dim: usize,
    max_bundles: usize,
) -> Agent {
    let pairs = random_cube_domain(r, dim, max_bundles)
        .into_iter()
        .map(|x| (x.0, int(-r.gen_range(1i64..=12))))
        .collect();
    quasilog_agent(name, pairs)
}

/// Like [`random_quasilog_agent`] but with generic values `-(k + j/97)`, so
/// indifference boundaries sit in general position and any
/// compensated-substitutes failure is exposed by a cleanly co-demanded pair.
pub fn random_generic_quasilog_agent(
    r: &mut ChaCha8Rng,
    name: String,
    dim: usize,
    max_bundles: usize,
) -> Agent {
    let pairs = random_cube_domain(r, dim, max_bundles)
        .into_iter()
        .map(|x| {
            let value = int(-r.gen_range(1i64..=12)) - rat(r.gen_range(0i64..=96), 97);
            (x.0, value)
        })
        .collect();
    quasilog_agent(name, pairs)
}

/// A unit-demand quasilog agent: the empty bundle plus a nonempty random
/// subset of single units. With `desirable`, going without strictly costs
/// more than any unit.
pub fn random_unit_demand_agent(
    r: &mut ChaCha8Rng,
    name: String,
    dim: usize,
    desirable: bool,
) -> Agent {
    let mut units: Vec<usize> = (0..dim).collect();
    let take = r.gen_range(1..=dim);
    let mut pairs: Vec<(Vec<i64>, Rat)> = Vec::new();
    for _ in 0..take {
        let k = r.gen_range(0..units.len());
        pairs.push((
            Bundle::unit(dim, units.swap_remove(k)).0,
            int(-r.gen_range(1i64..=9)),
        ));
    }
    let zero_value = if desirable {
        pairs
            .iter()
            .map(|(_, v)| v.clone())
            .min()
            .expect("at least one unit")
            - int(r.gen_range(1i64..=3))
    } else {
        int(-r.gen_range(1i64..=9))
    };
    pairs.push((Bundle::zeros(dim).0, zero_value));
    quasilog_agent(name, pairs)
}

/// A two-good quasilog agent that wants the goods together: holding both
/// needs far less money than holding either one alone.
fn complements_leaning_agent(r: &mut ChaCha8Rng, name: String) -> Agent {
    let pairs = vec![
        (vec![0, 0], int(-12)),
        (vec![1, 0], int(-r.gen_range(8i64..=11))),
        (vec![0, 1], int(-r.gen_range(8i64..=11))),
        (vec![1, 1], int(-r.gen_range(1i64..=3))),
    ];
    quasilog_agent(name, pairs)
}

/// Every split of the total endowment into one domain bundle per agent
/// (capped), in enumeration order.
pub fn goods_splits(economy: &Economy, cap: usize) -> Vec<Vec<Bundle>> {
    let domains: Vec<Vec<Bundle>> = economy
        .agents
        .iter()
        .map(|a| a.feasible_set().cloned().collect())
        .collect();
    let mut splits: Vec<Vec<Bundle>> = Vec::new();
    for_each_allocation(
        &domains,
        &economy.total_endowment,
        &mut |alloc: &[Bundle]| {
            splits.push(alloc.to_vec());
            splits.len() >= cap
        },
    )
    .expect("generated economies stay far below the enumeration cap");
    splits
}

/// One random feasible endowment allocation: a uniformly chosen goods split
/// with independent half-integer money endowments in (0, 16].
pub fn random_endowment(
    r: &mut ChaCha8Rng,
    splits: &[Vec<Bundle>],
) -> EndowmentAllocation {
    let split = &splits[r.gen_range(0..splits.len())];
    EndowmentAllocation(
        split
            .iter()
            .map(|x| {
                ConsumptionBundle::new(
                    rat(r.gen_range(1i64..=16), r.gen_range(1i64..=2)),
                    x.clone(),
                )
            })
            .collect(),
    )
}

/// A random quasilog exchange economy (one or two goods, up to three agents,
/// at most four bundles each) and a batch of random endowment allocations.
/// A third of the two-good agents lean complementary, so clashes with
/// unit-demand rivals — and genuine nonexistence — occur in the sample.
pub fn random_quasilog_economy(
    r: &mut ChaCha8Rng,
    samples: usize,
) -> (Economy, Vec<EndowmentAllocation>) {
    let dim = r.gen_range(1..=2);
    let n = r.gen_range(1..=3);
    let mut agents: Vec<Agent> = Vec::with_capacity(n);
    for j in 0..n {
        let name = format!("a{}", j + 1);
        if dim == 2 && r.gen_bool(1.0 / 3.0) {
            agents.push(complements_leaning_agent(r, name));
        } else {
            agents.push(random_quasilog_agent(r, name, dim, 4));
        }
    }
    let mut total = Bundle::zeros(dim);
    for a in &agents {
        let dom: Vec<&Bundle> = a.feasible_set().collect();
        total = total.add(dom[r.gen_range(0..dom.len())]);
    }
    let economy = Economy {
        goods: (1..=dim).map(|i| format!("good{i}")).collect(),
        agents,
        total_endowment: total,
    };
    validate_economy(&economy).expect("generated economies validate");
    let splits = goods_splits(&economy, 500);
    let endows = (0..samples).map(|_| random_endowment(r, &splits)).collect();
    (economy, endows)
}

/// A random housing economy: one or two house types, two or three
/// unit-demand quasilog agents who all prefer housing to none, and one
/// random endowment allocation.
pub fn random_housing_economy(r: &mut ChaCha8Rng) -> (Economy, EndowmentAllocation) {
    let dim = r.gen_range(1..=2);
    let n = r.gen_range(2..=3);
    let mut agents: Vec<Agent> = Vec::with_capacity(n);
    for j in 0..n {
        agents.push(random_unit_demand_agent(r, format!("a{}", j + 1), dim, true));
    }
    let mut total = Bundle::zeros(dim);
    for a in &agents {
        let dom: Vec<&Bundle> = a.feasible_set().collect();
        total = total.add(dom[r.gen_range(0..dom.len())]);
    }
    let economy = Economy {
        goods: (1..=dim).map(|i| format!("house{i}")).collect(),
        agents,
        total_endowment: total,
    };
    validate_economy(&economy).expect("generated economies validate");
    let splits = goods_splits(&economy, 500);
    let endow = random_endowment(r, &splits);
    (economy, endow)
}

fn gcd64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// A random direction set of at most `max_vectors` primitive nonzero vectors
/// with coordinates in -2..=2.
pub fn random_vector_set(r: &mut ChaCha8Rng, dim: usize, max_vectors: usize) -> DemandTypeVectorSet {
    let count = r.gen_range(1..=max_vectors);
    let mut vectors: Vec<Vec<i64>> = Vec::with_capacity(count);
    while vectors.len() < count {
        let v: Vec<i64> = (0..dim).map(|_| r.gen_range(-2i64..=2)).collect();
        let g = v.iter().fold(0, |acc, &c| gcd64(acc, c));
        if g == 0 {
            continue;
        }
        vectors.push(v.into_iter().map(|c| c / g).collect());
    }
    DemandTypeVectorSet::new(vectors).expect("sampled vectors are primitive")
}

/// A random valuation on a full 0/1 cube that fails the substitutes
/// property, found by rejection sampling integer values in 0..=10.
pub fn random_non_substitutes_valuation(r: &mut ChaCha8Rng) -> Valuation {
    loop {
        let dim = r.gen_range(2..=3);
        let pairs: Vec<(Vec<i64>, Rat)> = unit_cube(dim)
            .into_iter()
            .map(|x| {
                let value = if x.is_zero() {
                    Rat::zero()
                } else {
                    int(r.gen_range(0i64..=10))
                };
                (x.0, value)
            })
            .collect();
        let v = Valuation::from_pairs(pairs).expect("cube domains are nonempty");
        if substitutes_violation(&v)
            .expect("cube domains are unit-bounded")
            .is_some()
        {
            return v;
        }
    }
}

// ---------------------------------------------------------------------------
// Utility-level grids
// ---------------------------------------------------------------------------

/// `n` utility levels spread around an agent's natural reference: centered
/// integers for quasilinear utility, scales straddling one for quasilog, and
/// evenly spaced grid indices for tabulated families.
pub fn spread_levels(agent: &Agent, n: usize) -> Vec<Level> {
    match &agent.utility {
        UtilityModel::Quasilinear(_) => (0..n)
            .map(|i| Level::Utility(int(i as i64) - rat(n as i64 - 1, 2)))
            .collect(),
        UtilityModel::Quasilog(_) => (0..n)
            .map(|i| Level::Scale(rat(2 * (i as i64 + 1), n as i64 + 1)))
            .collect(),
        UtilityModel::Tabulated(fam) => {
            let top = (fam.grid_len() - 1) as i64;
            (0..n)
                .map(|i| Level::Grid(rat(i as i64 * top, (n as i64 - 1).max(1))))
                .collect()
        }
    }
}

/// All per-agent combinations of the given level lists.
pub fn level_profiles(per_agent: &[Vec<Level>]) -> Vec<Vec<Level>> {
    let mut out: Vec<Vec<Level>> = vec![Vec::new()];
    for levels in per_agent {
        let mut next = Vec::with_capacity(out.len() * levels.len());
        for prefix in &out {
            for level in levels {
                let mut profile = prefix.clone();
                profile.push(level.clone());
                next.push(profile);
            }
        }
        out = next;
    }
    out
}

// ---------------------------------------------------------------------------
// Sampled gross-substitutes screen
// ---------------------------------------------------------------------------

/// Picks at most `cap` entries evenly across a sorted list, keeping the
/// endpoints.
fn evenly_spaced(sorted: Vec<Rat>, cap: usize) -> Vec<Rat> {
    if sorted.len() <= cap {
        return sorted;
    }
    (0..cap)
        .map(|i| sorted[i * (sorted.len() - 1) / (cap - 1)].clone())
        .collect()
}

/// The sampled gross-substitutes screen: money levels 1..=5 crossed with
/// base prices recombined coordinate-wise from the boundary prices of the
/// agent's compensated demand at five spread levels, price increments
/// {1/2, 1, 2}, and goods endowments running over nothing and each single
/// unit. A recipe that lifts any compensated-substitutes failure into an
/// affordable Marshallian flip runs first, so purely income-driven
/// violations are caught even when no single boundary price exhibits them.
pub fn sampled_gross_check(agent: &Agent) -> bool {
    let dim = agent.dim();
    let money: Vec<Rat> = (1..=5).map(int).collect();
    let deltas = vec![rat(1, 2), int(1), int(2)];
    let mut axes: Vec<BTreeSet<Rat>> = vec![BTreeSet::new(); dim];
    for level in spread_levels(agent, 5) {
        let vh = hicksian_valuation(agent, &level).expect("spread levels are valid");
        for p in boundary_prices(&vh) {
            for (i, c) in p.0.into_iter().enumerate() {
                axes[i].insert(c);
            }
        }
    }
    let axes: Vec<Vec<Rat>> = axes
        .into_iter()
        .map(|set| evenly_spaced(set.into_iter().collect(), 8))
        .collect();
    let mut prices: Vec<PriceVector> = Vec::new();
    if dim > 0 && axes.iter().all(|a| !a.is_empty()) {
        let mut counter = vec![0usize; dim];
        'grid: loop {
            prices.push(PriceVector(
                counter
                    .iter()
                    .zip(&axes)
                    .map(|(&i, axis)| axis[i].clone())
                    .collect(),
            ));
            if prices.len() >= 1000 {
                break;
            }
            let mut k = 0;
            loop {
                counter[k] += 1;
                if counter[k] < axes[k].len() {
                    break;
                }
                counter[k] = 0;
                k += 1;
                if k == dim {
                    break 'grid;
                }
            }
        }
    }
    let mut endows = vec![Bundle::zeros(dim)];
    for i in 0..dim {
        endows.push(Bundle::unit(dim, i));
    }
    for goods_endow in &endows {
        if let Some(violation) =
            gross_violation_from_net(agent, goods_endow).expect("domains are unit-bounded")
        {
            if violation.confirm(agent).expect("recorded flips re-evaluate") {
                return false;
            }
        }
        if !prices.is_empty()
            && !is_gross_substitutes_at(agent, goods_endow, &money, &prices, &deltas)
                .expect("grid demand evaluates")
        {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Independent demand and the price-arrangement existence oracle
// ---------------------------------------------------------------------------

/// An agent restated for independent evaluation: quasilinear values, or
/// quasilog costs (the negated quasivaluation), plus the endowment.
pub enum Tastes {
    Values(BTreeMap<Bundle, Rat>),
    Costs(BTreeMap<Bundle, Rat>),
}

pub struct OracleAgent {
    pub tastes: Tastes,
    pub money: Rat,
    pub goods: Bundle,
}

pub fn oracle_agent(agent: &Agent, endow: &ConsumptionBundle) -> OracleAgent {
    let tastes = match &agent.utility {
        UtilityModel::Quasilinear(v) => {
            Tastes::Values(v.pairs().map(|(x, val)| (x.clone(), val.clone())).collect())
        }
        UtilityModel::Quasilog(v) => {
            Tastes::Costs(v.pairs().map(|(x, val)| (x.clone(), -val)).collect())
        }
        UtilityModel::Tabulated(_) => panic!("the oracle covers quasilinear and quasilog agents"),
    };
    OracleAgent {
        tastes,
        money: endow.money.clone(),
        goods: endow.goods.clone(),
    }
}

fn dot(p: &[Rat], x: &Bundle) -> Rat {
    p.iter()
        .zip(&x.0)
        .fold(Rat::zero(), |acc, (pi, &xi)| acc + pi * int(xi))
}

/// Marshallian demand recomputed from the utility definitions alone.
/// Quasilog utilities are ranked by cross-multiplied residual/cost ratios.
/// An empty result means no affordable consumption exists at `p`.
pub fn oracle_demand(a: &OracleAgent, p: &[Rat]) -> Vec<Bundle> {
    let wealth = &a.money + dot(p, &a.goods);
    let mut arg: Vec<Bundle> = Vec::new();
    match &a.tastes {
        Tastes::Values(values) => {
            let mut best: Option<Rat> = None;
            for (x, v) in values {
                let u = v + &wealth - dot(p, x);
                let verdict = match &best {
                    None => Ordering::Greater,
                    Some(b) => u.cmp(b),
                };
                match verdict {
                    Ordering::Greater => {
                        best = Some(u);
                        arg = vec![x.clone()];
                    }
                    Ordering::Equal => arg.push(x.clone()),
                    Ordering::Less => {}
                }
            }
        }
        Tastes::Costs(costs) => {
            let mut best: Option<(Rat, Rat)> = None;
            for (x, c) in costs {
                let residual = &wealth - dot(p, x);
                if !residual.is_positive() {
                    continue;
                }
                let verdict = match &best {
                    None => Ordering::Greater,
                    Some((br, bc)) => (&residual * bc).cmp(&(br * c)),
                };
                match verdict {
                    Ordering::Greater => {
                        best = Some((residual, c.clone()));
                        arg = vec![x.clone()];
                    }
                    Ordering::Equal => arg.push(x.clone()),
                    Ordering::Less => {}
                }
            }
        }
    }
    arg
}

fn pick_selection(
    demands: &[Vec<Bundle>],
    total: &Bundle,
    k: usize,
    acc: Bundle,
    picked: &mut Vec<Bundle>,
) -> bool {
    if k == demands.len() {
        return &acc == total;
    }
    for x in &demands[k] {
        picked.push(x.clone());
        if pick_selection(demands, total, k + 1, acc.add(x), picked) {
            return true;
        }
        picked.pop();
    }
    false
}

/// One bundle per agent from the recomputed demand sets summing to the
/// total endowment, if the market clears at `p`.
pub fn market_clears_at(agents: &[OracleAgent], total: &Bundle, p: &[Rat]) -> Option<Vec<Bundle>> {
    let mut demands = Vec::with_capacity(agents.len());
    for a in agents {
        let d = oracle_demand(a, p);
        if d.is_empty() {
            return None;
        }
        demands.push(d);
    }
    let mut picked = Vec::with_capacity(agents.len());
    if pick_selection(&demands, total, 0, Bundle::zeros(total.dim()), &mut picked) {
        Some(picked)
    } else {
        None
    }
}

/// A hyperplane `a · p = c` in price space, leading coefficient normalized
/// to one for deduplication.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Line {
    pub a: Vec<Rat>,
    pub c: Rat,
}

fn normalized_line(a: Vec<Rat>, c: Rat) -> Option<Line> {
    let lead = a.iter().find(|x| !x.is_zero())?.clone();
    Some(Line {
        a: a.iter().map(|x| x / &lead).collect(),
        c: &c / &lead,
    })
}

/// Every hyperplane across which some agent's recomputed demand can change:
/// pairwise indifference between feasible bundles, plus each quasilog budget
/// boundary.
pub fn demand_boundaries(agents: &[OracleAgent]) -> Vec<Line> {
    let mut set: BTreeSet<Line> = BTreeSet::new();
    for ag in agents {
        let dim = ag.goods.dim();
        match &ag.tastes {
            Tastes::Values(values) => {
                let items: Vec<(&Bundle, &Rat)> = values.iter().collect();
                for (i, (x, vx)) in items.iter().enumerate() {
                    for (y, vy) in items.iter().skip(i + 1) {
                        // value(x) - p.x = value(y) - p.y
                        let a: Vec<Rat> = (0..dim).map(|k| int(y.0[k] - x.0[k])).collect();
                        if let Some(line) = normalized_line(a, *vy - *vx) {
                            set.insert(line);
                        }
                    }
                }
            }
            Tastes::Costs(costs) => {
                let items: Vec<(&Bundle, &Rat)> = costs.iter().collect();
                for (i, (x, cx)) in items.iter().enumerate() {
                    for (y, cy) in items.iter().skip(i + 1) {
                        // equal ratio: cy (W - p.x) = cx (W - p.y), where the
                        // wealth W = money + p.goods also depends on p
                        let gap = *cy - *cx;
                        let a: Vec<Rat> = (0..dim)
                            .map(|k| {
                                &gap * int(ag.goods.0[k]) - *cy * int(x.0[k]) + *cx * int(y.0[k])
                            })
                            .collect();
                        if let Some(line) = normalized_line(a, -(&gap * &ag.money)) {
                            set.insert(line);
                        }
                    }
                }
                for (x, _) in &items {
                    // budget boundary: money + p.goods - p.x = 0
                    let a: Vec<Rat> = (0..dim).map(|k| int(ag.goods.0[k] - x.0[k])).collect();
                    if let Some(line) = normalized_line(a, -ag.money.clone()) {
                        set.insert(line);
                    }
                }
            }
        }
    }
    set.into_iter().collect()
}

fn line_value(l: &Line, p: &[Rat]) -> Rat {
    l.a.iter()
        .zip(p)
        .fold(-l.c.clone(), |acc, (ai, pi)| acc + ai * pi)
}

fn intersection(l1: &Line, l2: &Line) -> Option<Vec<Rat>> {
    let det = &l1.a[0] * &l2.a[1] - &l2.a[0] * &l1.a[1];
    if det.is_zero() {
        return None;
    }
    let p1 = (&l1.c * &l2.a[1] - &l2.c * &l1.a[1]) / &det;
    let p2 = (&l1.a[0] * &l2.c - &l2.a[0] * &l1.c) / &det;
    Some(vec![p1, p2])
}

/// Exact representatives of every face of the line arrangement: all
/// vertices, one interior point per edge, and one interior point per cell,
/// so any demand pattern occurring anywhere in the price plane occurs at one
/// of these points.
pub fn representative_prices(lines: &[Line], dim: usize) -> Vec<Vec<Rat>> {
    match dim {
        1 => representatives_on_a_line(lines),
        2 => representatives_in_the_plane(lines),
        other => panic!("the arrangement oracle supports one or two goods, got {other}"),
    }
}

fn representatives_on_a_line(lines: &[Line]) -> Vec<Vec<Rat>> {
    let pts: BTreeSet<Rat> = lines.iter().map(|l| &l.c / &l.a[0]).collect();
    let pts: Vec<Rat> = pts.into_iter().collect();
    let mut reps: BTreeSet<Rat> = BTreeSet::new();
    reps.insert(Rat::zero());
    for w in pts.windows(2) {
        reps.insert((&w[0] + &w[1]) / int(2));
    }
    if let (Some(first), Some(last)) = (pts.first(), pts.last()) {
        reps.insert(first - int(1));
        reps.insert(last + int(1));
    }
    reps.extend(pts);
    reps.into_iter().map(|p| vec![p]).collect()
}

fn representatives_in_the_plane(lines: &[Line]) -> Vec<Vec<Rat>> {
    let mut reps: BTreeSet<Vec<Rat>> = BTreeSet::new();
    reps.insert(vec![Rat::zero(), Rat::zero()]);
    let mut vertices: BTreeSet<Vec<Rat>> = BTreeSet::new();
    for (i, l1) in lines.iter().enumerate() {
        for l2 in lines.iter().skip(i + 1) {
            if let Some(v) = intersection(l1, l2) {
                vertices.insert(v);
            }
        }
    }
    reps.extend(vertices.iter().cloned());
    for (li, l) in lines.iter().enumerate() {
        let norm2 = &l.a[0] * &l.a[0] + &l.a[1] * &l.a[1];
        // crossing points of other lines, by position along this line
        let mut stops: BTreeSet<Rat> = BTreeSet::new();
        for v in &vertices {
            if line_value(l, v).is_zero() {
                stops.insert(&l.a[0] * &v[1] - &l.a[1] * &v[0]);
            }
        }
        let stops: Vec<Rat> = stops.into_iter().collect();
        let point_at = |t: &Rat| -> Vec<Rat> {
            vec![
                (&l.c * &l.a[0] - t * &l.a[1]) / &norm2,
                (&l.c * &l.a[1] + t * &l.a[0]) / &norm2,
            ]
        };
        let mut edge_reps: Vec<Vec<Rat>> = Vec::new();
        if stops.is_empty() {
            edge_reps.push(point_at(&Rat::zero()));
        } else {
            for w in stops.windows(2) {
                edge_reps.push(point_at(&((&w[0] + &w[1]) / int(2))));
            }
            edge_reps.push(point_at(&(stops.first().expect("nonempty") - int(1))));
            edge_reps.push(point_at(&(stops.last().expect("nonempty") + int(1))));
        }
        for q in edge_reps {
            // step off the edge into both adjacent cells, staying closer to
            // this line than to any other
            let mut limit: Option<Rat> = None;
            let mut on_another_line = false;
            for (mi, m) in lines.iter().enumerate() {
                if mi == li {
                    continue;
                }
                let value = line_value(m, &q);
                if value.is_zero() {
                    on_another_line = true;
                    break;
                }
                let rate = &m.a[0] * &l.a[0] + &m.a[1] * &l.a[1];
                if rate.is_zero() {
                    continue;
                }
                let bound = (value / rate).abs();
                limit = Some(match limit {
                    None => bound,
                    Some(b) => b.min(bound),
                });
            }
            reps.insert(q.clone());
            if on_another_line {
                continue;
            }
            let step = match limit {
                None => int(1),
                Some(b) => b / int(2),
            };
            for sign in [1i64, -1] {
                reps.insert(vec![
                    &q[0] + int(sign) * &step * &l.a[0],
                    &q[1] + int(sign) * &step * &l.a[1],
                ]);
            }
        }
    }
    reps.into_iter().collect()
}

/// Decides competitive-equilibrium existence for a one- or two-good economy
/// by checking the market at one representative price in every arrangement
/// face. Returns a clearing price and per-agent selection when one exists.
pub fn arrangement_ce_decision(
    economy: &Economy,
    endow: &EndowmentAllocation,
) -> Option<(Vec<Rat>, Vec<Bundle>)> {
    let agents: Vec<OracleAgent> = economy
        .agents
        .iter()
        .zip(&endow.0)
        .map(|(a, c)| oracle_agent(a, c))
        .collect();
    let lines = demand_boundaries(&agents);
    for p in representative_prices(&lines, economy.dim()) {
        if let Some(selection) = market_clears_at(&agents, &economy.total_endowment, &p) {
            return Some((p, selection));
        }
    }
    None
}

/// Confirms a claimed equilibrium with recomputed demand: every agent is
/// allocated a bundle it demands at `price`, the allocation exhausts the
/// total endowment, and the reported money holdings respect the budget
/// identity.
pub fn confirm_equilibrium(
    economy: &Economy,
    endow: &EndowmentAllocation,
    price: &PriceVector,
    allocation: &[Bundle],
    money_after: &[Rat],
) -> bool {
    let p = &price.0;
    let mut total = Bundle::zeros(economy.dim());
    for ((agent, c), x) in economy.agents.iter().zip(&endow.0).zip(allocation) {
        let demand = oracle_demand(&oracle_agent(agent, c), p);
        if !demand.contains(x) {
            return false;
        }
        total = total.add(x);
    }
    if total != economy.total_endowment {
        return false;
    }
    endow
        .0
        .iter()
        .zip(allocation)
        .zip(money_after)
        .all(|((c, x), m)| &c.money + dot(p, &c.goods) - dot(p, x) == *m)
}
