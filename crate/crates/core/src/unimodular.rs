//! Demand type vector sets and exact unimodularity checking.
//!
//! A demand type vector set collects the primitive integer directions along
//! which an agent's demand can change under small generic price changes.
//! Unimodularity of that set — every linearly independent subset extends to
//! an integer basis of determinant ±1 — is exactly the condition under which
//! concave valuations of the type always admit market-clearing prices.
//!
//! The check here is exact: a linearly independent set of integer vectors
//! extends to such a basis if and only if the greatest common divisor of the
//! maximal-order minors of its column matrix is 1. An independent
//! cross-check, [`interior_lattice_point`], looks for an integer point
//! strictly inside the parallelepiped spanned by a subset — such a point
//! exists for some independent subset exactly when the set fails
//! unimodularity.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::linalg::det_bigint;
use crate::rational::Rat;
use crate::{Error, Result};

/// A finite set of primitive integer vectors, closed under negation, with no
/// duplicates. Stored fully (each vector and its negation both present).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandTypeVectorSet {
    dim: usize,
    vectors: BTreeSet<Vec<i64>>,
}

fn is_primitive(v: &[i64]) -> bool {
    let mut g: i64 = 0;
    for &c in v {
        g = g.gcd(&c);
    }
    g == 1
}

fn negate(v: &[i64]) -> Vec<i64> {
    v.iter().map(|&c| -c).collect()
}

/// True when the first nonzero component is positive: picks one canonical
/// representative out of each `{v, -v}` pair.
fn is_sign_representative(v: &[i64]) -> bool {
    v.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

impl DemandTypeVectorSet {
    /// Builds the negation closure of `vectors`, rejecting zero or imprimitive
    /// vectors and mismatched dimensions.
    pub fn new(vectors: Vec<Vec<i64>>) -> Result<DemandTypeVectorSet> {
        let dim = match vectors.first() {
            Some(v) => v.len(),
            None => 0,
        };
        let mut set = BTreeSet::new();
        for v in vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            if !is_primitive(&v) {
                return Err(Error::NotPrimitive(format!("{v:?}")));
            }
            set.insert(negate(&v));
            set.insert(v);
        }
        Ok(DemandTypeVectorSet { dim, vectors: set })
    }

    /// The strong-substitutes set: every vector with at most one `+1`
    /// component, at most one `-1` component, and no other nonzero entries.
    pub fn strong_substitutes(dim: usize) -> DemandTypeVectorSet {
        let mut vectors = Vec::new();
        for i in 0..dim {
            let mut e = vec![0i64; dim];
            e[i] = 1;
            vectors.push(e);
            for j in (i + 1)..dim {
                let mut d = vec![0i64; dim];
                d[i] = 1;
                d[j] = -1;
                vectors.push(d);
            }
        }
        DemandTypeVectorSet::new(vectors).expect("unit differences are primitive")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of vectors, counting each direction and its negation.
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.vectors.contains(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.vectors.iter()
    }

    /// One vector per `{v, -v}` pair (the one whose leading nonzero entry is
    /// positive), in sorted order.
    pub fn representatives(&self) -> Vec<Vec<i64>> {
        self.vectors
            .iter()
            .filter(|v| is_sign_representative(v))
            .cloned()
            .collect()
    }

    /// True when every vector of `self` lies in `other` (both sets being
    /// negation-closed, this is containment up to sign).
    pub fn subset_of(&self, other: &DemandTypeVectorSet) -> bool {
        self.is_empty() || (self.dim == other.dim && self.vectors.is_subset(&other.vectors))
    }
}

impl fmt::Display for DemandTypeVectorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "±{{")?;
        for (i, v) in self.representatives().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "(")?;
            for (k, c) in v.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "}}")
    }
}

/// The outcome of a unimodularity check; failures carry an exact witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnimodularityOutcome {
    Unimodular,
    /// A linearly independent subset whose maximal-order minors have a
    /// common divisor greater than one.
    NonUnimodular {
        subset: Vec<Vec<i64>>,
        minor_gcd: BigInt,
    },
}

impl UnimodularityOutcome {
    pub fn is_unimodular(&self) -> bool {
        matches!(self, UnimodularityOutcome::Unimodular)
    }
}

/// The gcd of all `r × r` minors of the matrix whose columns are the `r`
/// vectors of `subset` (assumed linearly independent, so some minor is
/// nonzero).
fn maximal_minor_gcd(subset: &[&Vec<i64>], dim: usize) -> BigInt {
    let r = subset.len();
    let mut rows_choice: Vec<usize> = (0..r).collect();
    let mut g = BigInt::zero();
    loop {
        let minor: Vec<Vec<BigInt>> = rows_choice
            .iter()
            .map(|&i| subset.iter().map(|v| BigInt::from(v[i])).collect())
            .collect();
        g = g.gcd(&det_bigint(&minor).abs());
        if g.is_one() {
            return g;
        }
        // Advance to the next r-subset of rows in lexicographic order.
        let mut k = r;
        loop {
            if k == 0 {
                return g;
            }
            k -= 1;
            if rows_choice[k] < dim - (r - k) {
                rows_choice[k] += 1;
                for t in (k + 1)..r {
                    rows_choice[t] = rows_choice[t - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Reduces `v` against the echelonized rational `basis`; returns the residual
/// if nonzero (i.e. `v` is independent of the basis) and appends nothing.
fn residual(basis: &[Vec<Rat>], v: &[i64]) -> Option<Vec<Rat>> {
    let mut row: Vec<Rat> = v.iter().map(|&c| Rat::from_integer(c.into())).collect();
    for b in basis {
        let lead = b
            .iter()
            .position(|c| !c.is_zero())
            .expect("basis rows are nonzero");
        if !row[lead].is_zero() {
            let factor = &row[lead] / &b[lead];
            for (rc, bc) in row.iter_mut().zip(b) {
                *rc -= &factor * bc;
            }
        }
    }
    if row.iter().all(|c| c.is_zero()) {
        None
    } else {
        Some(row)
    }
}

/// Visits every linearly independent subset of `vectors` (in index order),
/// calling `visit` with the chosen indices; stops early when `visit` returns
/// `true` and propagates that.
fn for_each_independent_subset<F>(vectors: &[Vec<i64>], visit: &mut F) -> bool
where
    F: FnMut(&[usize]) -> bool,
{
    fn recurse<F>(
        vectors: &[Vec<i64>],
        start: usize,
        chosen: &mut Vec<usize>,
        basis: &mut Vec<Vec<Rat>>,
        visit: &mut F,
    ) -> bool
    where
        F: FnMut(&[usize]) -> bool,
    {
        for i in start..vectors.len() {
            if let Some(row) = residual(basis, &vectors[i]) {
                chosen.push(i);
                basis.push(row);
                if visit(chosen)
                    || recurse(vectors, i + 1, chosen, basis, visit)
                {
                    return true;
                }
                basis.pop();
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::new();
    let mut basis = Vec::new();
    recurse(vectors, 0, &mut chosen, &mut basis, visit)
}

/// Exact unimodularity check via minor gcds over all linearly independent
/// subsets of sign representatives (sign flips do not change the gcd, and a
/// subset containing a vector twice up to sign is dependent). Exponential in
/// the number of directions; intended for small sets (tens of directions).
pub fn check_unimodularity(d: &DemandTypeVectorSet) -> UnimodularityOutcome {
    let reps = d.representatives();
    let mut found: Option<(Vec<Vec<i64>>, BigInt)> = None;
    for_each_independent_subset(&reps, &mut |chosen| {
        let subset: Vec<&Vec<i64>> = chosen.iter().map(|&i| &reps[i]).collect();
        let g = maximal_minor_gcd(&subset, d.dim());
        if g.is_one() {
            false
        } else {
            found = Some((subset.into_iter().cloned().collect(), g));
            true
        }
    });
    match found {
        Some((subset, minor_gcd)) => UnimodularityOutcome::NonUnimodular { subset, minor_gcd },
        None => UnimodularityOutcome::Unimodular,
    }
}

pub fn is_unimodular(d: &DemandTypeVectorSet) -> bool {
    check_unimodularity(d).is_unimodular()
}

/// Searches the open parallelepiped `{Σ α_ℓ d^ℓ : 0 < α_ℓ < 1}` spanned by
/// the linearly independent `subset` for an integer point; returns the point
/// and its coefficients. Errors if the subset is linearly dependent.
pub fn interior_lattice_point(subset: &[Vec<i64>]) -> Result<Option<(Vec<i64>, Vec<Rat>)>> {
    let dim = match subset.first() {
        Some(v) => v.len(),
        None => return Ok(None),
    };
    {
        let rows: Vec<Vec<Rat>> = subset
            .iter()
            .map(|v| v.iter().map(|&c| Rat::from_integer(c.into())).collect())
            .collect();
        if crate::linalg::rank(&rows) != subset.len() {
            return Err(Error::NotLinearlyIndependent);
        }
    }
    // z_i must lie strictly between the sums of negative and of positive
    // column entries in coordinate i.
    let mut lo = vec![0i64; dim];
    let mut hi = vec![0i64; dim];
    for v in subset {
        for (i, &c) in v.iter().enumerate() {
            if c < 0 {
                lo[i] += c;
            } else {
                hi[i] += c;
            }
        }
    }
    let mut z = lo.clone();
    let one = Rat::one();
    loop {
        if let Some(alpha) = crate::linalg::solve_columns(subset, &z) {
            if alpha.iter().all(|a| a.is_positive() && *a < one) {
                return Ok(Some((z, alpha)));
            }
        }
        // Advance z through the integer box [lo, hi].
        let mut i = 0;
        loop {
            if i == dim {
                return Ok(None);
            }
            if z[i] < hi[i] {
                z[i] += 1;
                break;
            }
            z[i] = lo[i];
            i += 1;
        }
    }
}

/// Independent unimodularity decision: true iff no linearly independent
/// subset's parallelepiped contains an interior integer point. Used to
/// cross-check [`check_unimodularity`].
pub fn oracle_unimodular(d: &DemandTypeVectorSet) -> bool {
    let reps = d.representatives();
    !for_each_independent_subset(&reps, &mut |chosen| {
        let subset: Vec<Vec<i64>> = chosen.iter().map(|&i| reps[i].clone()).collect();
        interior_lattice_point(&subset)
            .expect("enumerated subsets are independent")
            .is_some()
    })
}

/// A linearly independent subset, an integer point strictly inside its
/// parallelepiped, and the point's coefficients in the subset.
pub type InteriorWitness = (Vec<Vec<i64>>, Vec<i64>, Vec<Rat>);

/// The smallest (by cardinality, then index order) linearly independent
/// subset whose parallelepiped has an interior integer point, together with
/// that point and its coefficients; `None` when the set is unimodular.
pub fn minimal_interior_subset(d: &DemandTypeVectorSet) -> Option<InteriorWitness> {
    let reps = d.representatives();
    let max_size = reps.len().min(d.dim());
    for size in 1..=max_size {
        let mut found = None;
        for_each_independent_subset(&reps, &mut |chosen| {
            if chosen.len() != size {
                return false;
            }
            let subset: Vec<Vec<i64>> = chosen.iter().map(|&i| reps[i].clone()).collect();
            match interior_lattice_point(&subset)
                .expect("enumerated subsets are independent")
            {
                Some((z, alpha)) => {
                    found = Some((subset, z, alpha));
                    true
                }
                None => false,
            }
        });
        if found.is_some() {
            return found;
        }
    }
    None
}
