//! Exact linear systems over rationals, decided by Fourier-Motzkin
//! elimination.
//!
//! Systems mix weak (`<=`), strict (`<`), and equality rows. Elimination
//! tracks, for every derived row, the multipliers over the original rows that
//! produce it; an infeasible system therefore yields an exactly recheckable
//! certificate: multipliers `l` with `sum l_i a_i = 0`, `l_i >= 0` on
//! inequality rows (free on equality rows), and either `sum l_i b_i < 0` or
//! `sum l_i b_i = 0` with positive weight on a strict row. Feasible systems
//! yield an exact witness by back-substitution through the elimination
//! stages, preferring integer coordinates when the stage interval allows one.
//!
//! Worst-case behaviour is exponential in the number of variables; every use
//! in this crate keeps the variable count at the number of goods plus a few
//! level parameters, which is small by construction.

use std::collections::HashMap;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::{format_rat, round_to_integer, Rat};

/// Relation of a constraint row `coeffs . x (rel) rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Le,
    Lt,
    Eq,
}

/// One linear constraint over the system's variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub rel: Rel,
    pub rhs: Rat,
    /// Optional human-readable origin of the row (used in reports).
    pub label: String,
}

impl Constraint {
    pub fn le(coeffs: Vec<Rat>, rhs: Rat) -> Constraint {
        Constraint {
            coeffs,
            rel: Rel::Le,
            rhs,
            label: String::new(),
        }
    }

    pub fn lt(coeffs: Vec<Rat>, rhs: Rat) -> Constraint {
        Constraint {
            coeffs,
            rel: Rel::Lt,
            rhs,
            label: String::new(),
        }
    }

    pub fn eq(coeffs: Vec<Rat>, rhs: Rat) -> Constraint {
        Constraint {
            coeffs,
            rel: Rel::Eq,
            rhs,
            label: String::new(),
        }
    }

    /// `coeffs . x >= rhs`, stored as `-coeffs . x <= -rhs`.
    pub fn ge(coeffs: Vec<Rat>, rhs: Rat) -> Constraint {
        Constraint::le(coeffs.into_iter().map(|c| -c).collect(), -rhs)
    }

    /// `coeffs . x > rhs`, stored strictly.
    pub fn gt(coeffs: Vec<Rat>, rhs: Rat) -> Constraint {
        Constraint::lt(coeffs.into_iter().map(|c| -c).collect(), -rhs)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Constraint {
        self.label = label.into();
        self
    }

    /// Whether `point` satisfies this row.
    pub fn satisfied_by(&self, point: &[Rat]) -> bool {
        let lhs: Rat = self
            .coeffs
            .iter()
            .zip(point)
            .map(|(c, x)| c * x)
            .fold(Rat::zero(), |a, b| a + b);
        match self.rel {
            Rel::Le => lhs <= self.rhs,
            Rel::Lt => lhs < self.rhs,
            Rel::Eq => lhs == self.rhs,
        }
    }
}

impl std::fmt::Display for Constraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                terms.push(format!("{}*x{}", format_rat(c), i));
            }
        }
        if terms.is_empty() {
            terms.push("0".into());
        }
        let rel = match self.rel {
            Rel::Le => "<=",
            Rel::Lt => "<",
            Rel::Eq => "=",
        };
        write!(f, "{} {} {}", terms.join(" + "), rel, format_rat(&self.rhs))
    }
}

/// A finite system of linear constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    pub num_vars: usize,
    pub rows: Vec<Constraint>,
}

impl LinearSystem {
    pub fn new(num_vars: usize) -> LinearSystem {
        LinearSystem {
            num_vars,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, c: Constraint) {
        debug_assert_eq!(c.coeffs.len(), self.num_vars);
        self.rows.push(c);
    }

    pub fn satisfied_by(&self, point: &[Rat]) -> bool {
        self.rows.iter().all(|r| r.satisfied_by(point))
    }

    /// Decides feasibility, producing a witness or a certificate.
    pub fn solve(&self) -> SolveOutcome {
        Solver::new(self).run()
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self.solve(), SolveOutcome::Feasible(_))
    }

    /// Exact range of `objective . x` over the solution set (`None` when the
    /// system is infeasible). Bounds are `None` when unbounded on that side.
    pub fn range(&self, objective: &[Rat]) -> Option<Interval> {
        debug_assert_eq!(objective.len(), self.num_vars);
        Solver::new(self).project(objective)
    }
}

/// Nonnegative-combination proof that a system has no solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarkasCertificate {
    /// One multiplier per row of the refuted system, in row order.
    pub multipliers: Vec<Rat>,
}

impl FarkasCertificate {
    /// Exact recheck: multipliers have admissible signs, the combined left
    /// side vanishes identically, and the combined right side is negative
    /// (or zero with positive weight on a strict row).
    pub fn verify(&self, system: &LinearSystem) -> bool {
        if self.multipliers.len() != system.rows.len() {
            return false;
        }
        let mut combined = vec![Rat::zero(); system.num_vars];
        let mut rhs = Rat::zero();
        let mut strict_weight = false;
        for (l, row) in self.multipliers.iter().zip(&system.rows) {
            match row.rel {
                Rel::Le | Rel::Lt => {
                    if l.is_negative() {
                        return false;
                    }
                }
                Rel::Eq => {}
            }
            if l.is_zero() {
                continue;
            }
            if row.rel == Rel::Lt && l.is_positive() {
                strict_weight = true;
            }
            for (acc, c) in combined.iter_mut().zip(&row.coeffs) {
                *acc += l * c;
            }
            rhs += l * &row.rhs;
        }
        if combined.iter().any(|c| !c.is_zero()) {
            return false;
        }
        rhs.is_negative() || (rhs.is_zero() && strict_weight)
    }
}

#[derive(Debug, Clone)]
pub enum SolveOutcome {
    Feasible(Vec<Rat>),
    Infeasible(FarkasCertificate),
}

/// One-sided bound; `strict` means the bound itself is not attained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bound {
    pub value: Rat,
    pub strict: bool,
}

/// Exact interval of a linear functional over a polyhedron.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lower: Option<Bound>,
    pub upper: Option<Bound>,
}

impl Interval {
    /// Whether `value` lies inside the interval.
    pub fn contains(&self, value: &Rat) -> bool {
        let above = match &self.lower {
            None => true,
            Some(b) => {
                if b.strict {
                    value > &b.value
                } else {
                    value >= &b.value
                }
            }
        };
        let below = match &self.upper {
            None => true,
            Some(b) => {
                if b.strict {
                    value < &b.value
                } else {
                    value <= &b.value
                }
            }
        };
        above && below
    }

    /// Whether the whole interval is strictly above `value`.
    pub fn strictly_above(&self, value: &Rat) -> bool {
        match &self.lower {
            None => false,
            Some(b) => b.value > *value || (b.value == *value && b.strict),
        }
    }

    /// Whether the whole interval is strictly below `value`.
    pub fn strictly_below(&self, value: &Rat) -> bool {
        match &self.upper {
            None => false,
            Some(b) => b.value < *value || (b.value == *value && b.strict),
        }
    }
}

/// Working row: `c . x <= b` (strict when `strict`), derived from the original
/// rows by the tracked multipliers.
#[derive(Debug, Clone)]
struct Row {
    c: Vec<Rat>,
    b: Rat,
    strict: bool,
    mult: Vec<Rat>,
}

impl Row {
    /// Scales by the positive factor `1/g` where `g` is the gcd of the
    /// coefficients, keeping hyperplane representations canonical so that
    /// duplicate rows collide during pruning.
    fn normalize(&mut self) {
        let mut g: Option<Rat> = None;
        for c in self.c.iter().filter(|c| !c.is_zero()) {
            let abs = c.abs();
            g = Some(match g {
                None => abs,
                Some(prev) => rat_gcd(&prev, &abs),
            });
        }
        if let Some(g) = g {
            if !g.is_one() {
                for c in &mut self.c {
                    *c /= &g;
                }
                self.b /= &g;
                for m in &mut self.mult {
                    *m /= &g;
                }
            }
        }
    }

    fn combine(upper: &Row, lower: &Row, var: usize) -> Row {
        // upper.c[var] > 0, lower.c[var] < 0.
        let a = -&lower.c[var]; // > 0
        let b = upper.c[var].clone(); // > 0
        let c = upper
            .c
            .iter()
            .zip(&lower.c)
            .map(|(u, l)| &a * u + &b * l)
            .collect();
        let rhs = &a * &upper.b + &b * &lower.b;
        let mult = upper
            .mult
            .iter()
            .zip(&lower.mult)
            .map(|(u, l)| &a * u + &b * l)
            .collect();
        let mut row = Row {
            c,
            b: rhs,
            strict: upper.strict || lower.strict,
            mult,
        };
        row.c[var] = Rat::zero(); // exact by construction; clear any residue
        row.normalize();
        row
    }
}

/// gcd of two positive rationals: the largest rational dividing both to an
/// integer quotient.
fn rat_gcd(a: &Rat, b: &Rat) -> Rat {
    let num = (a.numer() * b.denom()).gcd(&(b.numer() * a.denom()));
    Rat::new(num, a.denom() * b.denom())
}

struct Solver<'a> {
    system: &'a LinearSystem,
    n: usize,
    /// Recheck derived certificates against the original system. Disabled
    /// during projection, whose synthetic objective rows are untracked.
    verify_certs: bool,
}

enum Reduced {
    Contradiction(FarkasCertificate),
    Done { stages: Vec<(usize, Vec<Row>)> },
}

impl<'a> Solver<'a> {
    fn new(system: &'a LinearSystem) -> Solver<'a> {
        Solver {
            system,
            n: system.num_vars,
            verify_certs: true,
        }
    }

    fn run(self) -> SolveOutcome {
        let nrows = self.system.rows.len();
        let mut ineqs: Vec<Row> = Vec::new();
        let mut eqs: Vec<Row> = Vec::new();
        for (i, row) in self.system.rows.iter().enumerate() {
            let mut mult = vec![Rat::zero(); nrows];
            mult[i] = Rat::one();
            let r = Row {
                c: row.coeffs.clone(),
                b: row.rhs.clone(),
                strict: row.rel == Rel::Lt,
                mult,
            };
            match row.rel {
                Rel::Eq => eqs.push(r),
                Rel::Le | Rel::Lt => ineqs.push(r),
            }
        }

        let mut active: Vec<usize> = (0..self.n).collect();
        let mut substitutions: Vec<(usize, Row)> = Vec::new();

        // Equality presolve: use each equality row to substitute one variable
        // out of every other row.
        for mut eq in eqs {
            for (var, sub) in &substitutions {
                apply_substitution(&mut eq, *var, sub);
            }
            match active.iter().position(|&v| !eq.c[v].is_zero()) {
                None => {
                    if eq.b.is_zero() {
                        continue;
                    }
                    // 0 = b with b != 0: flip sign if needed for a valid
                    // certificate (equality multipliers are free).
                    let mult = if eq.b.is_positive() {
                        eq.mult.iter().map(|m| -m).collect()
                    } else {
                        eq.mult
                    };
                    return SolveOutcome::Infeasible(self.certify(FarkasCertificate {
                        multipliers: mult,
                    }));
                }
                Some(pos) => {
                    let var = active.remove(pos);
                    for row in &mut ineqs {
                        apply_substitution(row, var, &eq);
                    }
                    substitutions.push((var, eq));
                }
            }
        }

        match self.eliminate(ineqs, active) {
            Reduced::Contradiction(cert) => SolveOutcome::Infeasible(cert),
            Reduced::Done { stages } => {
                let mut x = vec![Rat::zero(); self.n];
                for (var, rows) in stages.iter().rev() {
                    if *var == SENTINEL {
                        continue;
                    }
                    x[*var] = pick_from_interval(&stage_interval(rows, *var, &x));
                }
                for (var, eq) in substitutions.iter().rev() {
                    let mut residual = eq.b.clone();
                    for (j, c) in eq.c.iter().enumerate() {
                        if j != *var && !c.is_zero() {
                            residual -= c * &x[j];
                        }
                    }
                    x[*var] = residual / &eq.c[*var];
                }
                debug_assert!(
                    self.system.satisfied_by(&x),
                    "witness violates the system"
                );
                SolveOutcome::Feasible(x)
            }
        }
    }

    /// Eliminates every variable, or every variable with a nonzero objective
    /// coefficient, returning the final one-dimensional interval of the
    /// objective. Equality rows are split rather than presolved so that the
    /// objective direction survives to the end.
    fn project(self, objective: &[Rat]) -> Option<Interval> {
        let nrows = self.system.rows.len();
        let mut rows: Vec<Row> = Vec::new();
        // Extended space: x variables plus a trailing objective variable t.
        let ext = self.n + 1;
        let mut push = |c: Vec<Rat>, b: Rat, strict: bool, mult: Vec<Rat>| {
            let mut row = Row { c, b, strict, mult };
            row.normalize();
            rows.push(row);
        };
        for (i, row) in self.system.rows.iter().enumerate() {
            let mut mult = vec![Rat::zero(); nrows];
            mult[i] = Rat::one();
            let mut c = row.coeffs.clone();
            c.push(Rat::zero());
            match row.rel {
                Rel::Le => push(c, row.rhs.clone(), false, mult),
                Rel::Lt => push(c, row.rhs.clone(), true, mult),
                Rel::Eq => {
                    let neg: Vec<Rat> = c.iter().map(|v| -v).collect();
                    let neg_mult: Vec<Rat> = mult.iter().map(|m| -m).collect();
                    push(c, row.rhs.clone(), false, mult);
                    push(neg, -row.rhs.clone(), false, neg_mult);
                }
            }
        }
        // t - objective . x = 0, as two inequalities (untracked rows: the
        // certificate is irrelevant for projection).
        let zero_mult = vec![Rat::zero(); nrows];
        let mut c1: Vec<Rat> = objective.iter().map(|c| -c).collect();
        c1.push(Rat::one());
        let c2: Vec<Rat> = c1.iter().map(|c| -c).collect();
        push(c1, Rat::zero(), false, zero_mult.clone());
        push(c2, Rat::zero(), false, zero_mult);

        let active: Vec<usize> = (0..self.n).collect();
        let solver = Solver {
            system: self.system,
            n: ext,
            verify_certs: false,
        };
        match solver.eliminate(rows, active) {
            Reduced::Contradiction(_) => None,
            Reduced::Done { stages } => {
                // All x variables eliminated; `stages` ends with rows over t
                // only. The rows remaining after the last stage are over t
                // alone... they were captured by eliminate's final prune; we
                // recover the interval from a synthetic final stage.
                let final_rows = stages_final_rows(&stages);
                let x = vec![Rat::zero(); ext];
                Some(stage_interval(&final_rows, ext - 1, &x))
            }
        }
    }

    fn eliminate(&self, mut rows: Vec<Row>, mut active: Vec<usize>) -> Reduced {
        let mut stages: Vec<(usize, Vec<Row>)> = Vec::new();
        loop {
            if let Some(cert) = prune(&mut rows) {
                return Reduced::Contradiction(self.certify(cert));
            }
            let Some(&var) = active.iter().min_by_key(|&&v| {
                let pos = rows.iter().filter(|r| r.c[v].is_positive()).count();
                let neg = rows.iter().filter(|r| r.c[v].is_negative()).count();
                (pos * neg, pos + neg)
            }) else {
                stages.push((SENTINEL, rows));
                return Reduced::Done { stages };
            };
            active.retain(|&v| v != var);
            stages.push((var, rows.clone()));
            let mut next: Vec<Row> = Vec::new();
            let (with_var, without_var): (Vec<Row>, Vec<Row>) =
                rows.into_iter().partition(|r| !r.c[var].is_zero());
            next.extend(without_var);
            let (uppers, lowers): (Vec<Row>, Vec<Row>) =
                with_var.into_iter().partition(|r| r.c[var].is_positive());
            for u in &uppers {
                for l in &lowers {
                    next.push(Row::combine(u, l, var));
                }
            }
            rows = next;
        }
    }

    /// Rechecks a derived certificate against the original system.
    fn certify(&self, cert: FarkasCertificate) -> FarkasCertificate {
        debug_assert!(
            !self.verify_certs || cert.verify(self.system),
            "derived certificate fails recheck"
        );
        cert
    }
}

/// Marks the final stage, after every variable has been eliminated.
const SENTINEL: usize = usize::MAX;

/// Rows stored by the sentinel final stage (no variable eliminated).
fn stages_final_rows(stages: &[(usize, Vec<Row>)]) -> Vec<Row> {
    match stages.last() {
        Some((var, rows)) if *var == SENTINEL => rows.clone(),
        _ => Vec::new(),
    }
}

fn apply_substitution(row: &mut Row, var: usize, eq: &Row) {
    if row.c[var].is_zero() {
        return;
    }
    let factor = &row.c[var] / &eq.c[var];
    for (rc, ec) in row.c.iter_mut().zip(&eq.c) {
        *rc -= &factor * ec;
    }
    row.c[var] = Rat::zero();
    row.b -= &factor * &eq.b;
    for (rm, em) in row.mult.iter_mut().zip(&eq.mult) {
        *rm -= &factor * em;
    }
}

/// Drops tautologies and dominated duplicates; reports a contradiction row's
/// certificate if one appears.
fn prune(rows: &mut Vec<Row>) -> Option<FarkasCertificate> {
    for row in rows.iter() {
        if row.c.iter().all(|c| c.is_zero())
            && (row.b.is_negative() || (row.strict && row.b.is_zero()))
        {
            return Some(FarkasCertificate {
                multipliers: row.mult.clone(),
            });
        }
    }
    let mut best: HashMap<Vec<Rat>, usize> = HashMap::new();
    let mut keep: Vec<Row> = Vec::new();
    for row in rows.drain(..) {
        if row.c.iter().all(|c| c.is_zero()) {
            continue; // tautology: 0 <= b with b >= 0 (contradictions handled)
        }
        match best.get(&row.c) {
            None => {
                best.insert(row.c.clone(), keep.len());
                keep.push(row);
            }
            Some(&idx) => {
                let cur = &keep[idx];
                let stronger = row.b < cur.b || (row.b == cur.b && row.strict && !cur.strict);
                if stronger {
                    keep[idx] = row;
                }
            }
        }
    }
    *rows = keep;
    None
}

/// Interval available to `var` in `rows` once every other variable appearing
/// in them has been assigned in `x`.
fn stage_interval(rows: &[Row], var: usize, x: &[Rat]) -> Interval {
    let mut lower: Option<Bound> = None;
    let mut upper: Option<Bound> = None;
    for row in rows {
        if row.c[var].is_zero() {
            continue;
        }
        let mut residual = row.b.clone();
        for (j, c) in row.c.iter().enumerate() {
            if j != var && !c.is_zero() {
                residual -= c * &x[j];
            }
        }
        let bound = &residual / &row.c[var];
        if row.c[var].is_positive() {
            let tighter = match &upper {
                None => true,
                Some(u) => bound < u.value || (bound == u.value && row.strict && !u.strict),
            };
            if tighter {
                upper = Some(Bound {
                    value: bound,
                    strict: row.strict,
                });
            }
        } else {
            let tighter = match &lower {
                None => true,
                Some(l) => bound > l.value || (bound == l.value && row.strict && !l.strict),
            };
            if tighter {
                lower = Some(Bound {
                    value: bound,
                    strict: row.strict,
                });
            }
        }
    }
    Interval { lower, upper }
}

/// A point of a (nonempty) interval, preferring integers, then midpoints.
fn pick_from_interval(interval: &Interval) -> Rat {
    match (&interval.lower, &interval.upper) {
        (None, None) => Rat::zero(),
        (Some(l), None) => {
            let candidate = if l.strict {
                l.value.floor() + Rat::one()
            } else {
                l.value.ceil()
            };
            if interval.contains(&candidate) {
                candidate
            } else {
                &l.value + Rat::one()
            }
        }
        (None, Some(u)) => {
            let candidate = if u.strict {
                u.value.ceil() - Rat::one()
            } else {
                u.value.floor()
            };
            if interval.contains(&candidate) {
                candidate
            } else {
                &u.value - Rat::one()
            }
        }
        (Some(l), Some(u)) => {
            let mid = (&l.value + &u.value) / Rat::from_integer(2.into());
            let rounded = round_to_integer(&mid);
            if interval.contains(&rounded) {
                rounded
            } else {
                mid
            }
        }
    }
}
