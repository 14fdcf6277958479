//! Constructive nonexistence: two-agent transferable-utility economies with
//! no competitive equilibrium, built either from a substitutes failure of a
//! single valuation or from a non-unimodular demand type. Both constructions
//! also exhibit a pseudo-equilibrium price — the endowment lies in the convex
//! hull of aggregate demand there — so they witness that the respective
//! structural condition cannot be dropped from the existence theory.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::equilibrium::{is_pseudo_equilibrium, solve_tu_ce, TuOutcome};
use crate::error::{Error, Result};
use crate::linalg::{nullspace, solve_columns, to_rational_rows};
use crate::model::{Bundle, PriceVector, TuAgent, TuEconomy, Valuation};
use crate::rational::Rat;
use crate::structure::{for_each_box_point, substitutes_violation};
use crate::unimodular::{minimal_interior_subset, DemandTypeVectorSet};

/// A two-agent transferable-utility economy with no competitive equilibrium.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub economy: TuEconomy,
    /// A pseudo-equilibrium price: the total endowment lies in the convex
    /// hull of aggregate demand at this price, yet no equilibrium exists.
    pub price: PriceVector,
    /// A split of the total endowment across the two agents' domains.
    pub endowments: Vec<Bundle>,
    /// The exact refutation (`NotFound`, with a recheckable certificate).
    pub outcome: TuOutcome,
}

fn generic_goods(dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("good{i}")).collect()
}

/// Builds a no-equilibrium economy around a substitutes failure of `v`.
///
/// A failure exhibits a price at which demand is exactly a pair of bundles
/// whose difference drops two goods at once. The partner agent consumes at
/// most one of those two goods and values each good at its failure price,
/// plus one extra unit of money on each of the two dropped goods; its demand
/// is then every bundle carrying exactly one dropped good. The all-ones
/// endowment ends up a convex combination of aggregate demands without any
/// price clearing the market. Errors with `IsActuallySubstitutes` when `v`
/// is substitutes, and `NotUnitBounded` when the domain is not contained in
/// `{0,1}^n`.
pub fn counterexample_substitutes(v: &Valuation) -> Result<Counterexample> {
    let violation = substitutes_violation(v)?.ok_or(Error::IsActuallySubstitutes)?;
    let (a, b) = &violation.pair;
    let p_hat = violation.price;
    let dim = v.dim();
    let d = b.sub(a);
    // Orient the pair so `x_prime` holds both dropped goods: the difference
    // toward the other bundle is -1 on the two marked coordinates.
    let negatives: Vec<usize> = (0..dim).filter(|&i| d.0[i] < 0).collect();
    let (x_prime, marked) = if negatives.len() >= 2 {
        (a.clone(), [negatives[0], negatives[1]])
    } else {
        let positives: Vec<usize> = (0..dim).filter(|&i| d.0[i] > 0).collect();
        (b.clone(), [positives[0], positives[1]])
    };

    // Partner valuation: linear with slope `p_hat + e_{i1} + e_{i2}` over the
    // 0/1 bundles carrying at most one of the two marked goods.
    let mut slope = p_hat.0.clone();
    for &i in &marked {
        slope[i] += Rat::one();
    }
    let slope = PriceVector(slope);
    let mut partner_pairs = Vec::new();
    for mask in 0..(1usize << dim) {
        let coords: Vec<i64> = (0..dim).map(|i| ((mask >> i) & 1) as i64).collect();
        if coords[marked[0]] + coords[marked[1]] > 1 {
            continue;
        }
        let x = Bundle(coords);
        let value = slope.dot(&x);
        partner_pairs.push((x.0, value));
    }
    let partner = Valuation::from_pairs(partner_pairs)?;

    let total = Bundle(vec![1; dim]);
    let economy = TuEconomy {
        goods: generic_goods(dim),
        agents: vec![
            TuAgent {
                name: "violator".into(),
                valuation: v.clone(),
            },
            TuAgent {
                name: "partner".into(),
                valuation: partner,
            },
        ],
        total_endowment: total.clone(),
    };
    let endowments = vec![x_prime.clone(), total.sub(&x_prime)];
    let outcome = solve_tu_ce(&economy)?;
    debug_assert!(is_pseudo_equilibrium(&economy, &p_hat));
    debug_assert!(!outcome.is_found());
    Ok(Counterexample {
        economy,
        price: p_hat,
        endowments,
        outcome,
    })
}

/// Scales a rational vector to a primitive integer vector with the same
/// direction.
fn primitive_price(vec: Vec<Rat>) -> Vec<Rat> {
    let mut lcm = BigInt::one();
    for x in &vec {
        lcm = lcm.lcm(x.denom());
    }
    let scale = Rat::from_integer(lcm);
    let ints: Vec<BigInt> = vec.iter().map(|x| (x * &scale).to_integer()).collect();
    let mut g = BigInt::zero();
    for i in &ints {
        g = g.gcd(i);
    }
    if g.is_zero() {
        g = BigInt::one();
    }
    ints.into_iter()
        .map(|i| Rat::from_integer(i / &g))
        .collect()
}

/// Builds a no-equilibrium economy from a non-unimodular demand type.
///
/// Takes a smallest linearly independent subset of the type's directions
/// whose parallelepiped hides an interior lattice point `z`. One agent
/// values all lattice points of the parallelepiped at zero; the partner can
/// consume nothing or the subset's last direction, valued by a price `s`
/// orthogonal to every earlier direction and positive on the last. At `s`
/// the convex hull of aggregate demand contains `z`, but the unique split
/// of `z` is unsupportable: holding `z` demanded forces the price to vanish
/// on every direction, whereupon the partner strictly prefers its nonzero
/// bundle. Errors with `SubsetUnimodular` when the type is unimodular.
pub fn counterexample_unimodular(d: &DemandTypeVectorSet) -> Result<Counterexample> {
    let (subset, z, _alpha) = minimal_interior_subset(d).ok_or(Error::SubsetUnimodular)?;
    let dim = d.dim();
    let n = subset.len();
    debug_assert!(
        n >= 2,
        "a single primitive direction spans no interior lattice point"
    );
    let last = &subset[n - 1];

    let rows = to_rational_rows(&subset[..n - 1]);
    let mut price = None;
    for candidate in nullspace(&rows, dim) {
        let inner: Rat = candidate
            .iter()
            .zip(last)
            .map(|(ci, &li)| ci * Rat::from_integer(BigInt::from(li)))
            .sum();
        if !inner.is_zero() {
            let oriented = if inner.is_negative() {
                candidate.into_iter().map(|x| -x).collect()
            } else {
                candidate
            };
            price = Some(primitive_price(oriented));
            break;
        }
    }
    let price = PriceVector(price.expect("the last direction is independent of the rest"));

    // Lattice points of the parallelepiped: box points whose (unique)
    // coefficients in the subset all lie in [0, 1].
    let mut lo = vec![0i64; dim];
    let mut hi = vec![0i64; dim];
    for v in &subset {
        for i in 0..dim {
            if v[i] < 0 {
                lo[i] += v[i];
            } else {
                hi[i] += v[i];
            }
        }
    }
    let one = Rat::one();
    let mut lattice_pairs = Vec::new();
    for_each_box_point(&lo, &hi, &mut |point| {
        if let Some(alpha) = solve_columns(&subset, &point.0) {
            if alpha.iter().all(|a| !a.is_negative() && *a <= one) {
                lattice_pairs.push((point.0.clone(), Rat::zero()));
            }
        }
        true
    });
    let parallelepiped = Valuation::from_pairs(lattice_pairs)?;

    let partner = Valuation::from_pairs(vec![
        (vec![0; dim], Rat::zero()),
        (last.clone(), price.dot(&Bundle(last.clone()))),
    ])?;

    let economy = TuEconomy {
        goods: generic_goods(dim),
        agents: vec![
            TuAgent {
                name: "parallelepiped".into(),
                valuation: parallelepiped,
            },
            TuAgent {
                name: "partner".into(),
                valuation: partner,
            },
        ],
        total_endowment: Bundle(z.clone()),
    };
    let endowments = vec![Bundle(z), Bundle(vec![0; dim])];
    let outcome = solve_tu_ce(&economy)?;
    debug_assert!(is_pseudo_equilibrium(&economy, &price));
    debug_assert!(!outcome.is_found());
    Ok(Counterexample {
        economy,
        price,
        endowments,
        outcome,
    })
}
