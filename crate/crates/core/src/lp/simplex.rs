//! Exact phase-one / phase-two simplex over the rationals.
//!
//! Revised form with an explicit dense basis inverse. Entering and leaving
//! variables follow Bland's rule, so the method terminates on degenerate
//! programs. Every answer is re-checked by substitution before it is returned.

use crate::rational::Rational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::HashSet;

pub const DEFAULT_MAX_COLUMNS: usize = 1 << 20;

/// `Σ terms = rhs`, with implicit zero coefficients for unknowns not listed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub terms: Vec<(usize, Rational)>,
    pub rhs: Rational,
}

/// Equality-constrained feasibility program over nonnegative unknowns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    pub num_vars: usize,
    pub constraints: Vec<Constraint>,
}

impl LpProblem {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            constraints: Vec::new(),
        }
    }

    /// Adds a row; repeated indices are merged and zero coefficients dropped.
    pub fn add_constraint(&mut self, terms: impl IntoIterator<Item = (usize, Rational)>, rhs: Rational) {
        let mut merged: Vec<(usize, Rational)> = Vec::new();
        let mut sorted: Vec<(usize, Rational)> = terms.into_iter().collect();
        sorted.sort_by_key(|(j, _)| *j);
        for (j, a) in sorted {
            match merged.last_mut() {
                Some((k, acc)) if *k == j => *acc += a,
                _ => merged.push((j, a)),
            }
        }
        merged.retain(|(_, a)| !a.is_zero());
        self.constraints.push(Constraint { terms: merged, rhs });
    }

    /// Row `i` with all `num_vars` coefficients spelled out.
    pub fn dense_row(&self, i: usize) -> Vec<Rational> {
        let mut row = vec![Rational::zero(); self.num_vars];
        for (j, a) in &self.constraints[i].terms {
            row[*j] += a;
        }
        row
    }

    fn check_shape(&self) -> Result<(), LpError> {
        for (row, c) in self.constraints.iter().enumerate() {
            if let Some((index, _)) = c.terms.iter().find(|(j, _)| *j >= self.num_vars) {
                return Err(LpError::MalformedRow { row, index: *index });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    /// A nonnegative point satisfying every equality.
    Feasible { witness: Vec<Rational> },
    /// Multipliers `y` with `yᵀA ≥ 0` and `yᵀb < 0`, one per constraint.
    Infeasible { certificate: Vec<Rational> },
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpOutcome::Feasible { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOptimum {
    Optimal {
        value: Rational,
        solution: Vec<Rational>,
        /// Dual point proving optimality: `yᵀA_j ≥ c_j` for every column, `yᵀb = value`.
        dual: Vec<Rational>,
    },
    Infeasible {
        certificate: Vec<Rational>,
    },
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("program has {num_vars} unknowns ({description}), above the limit of {cap}; raise the limit to proceed")]
    TooLarge {
        num_vars: u128,
        cap: usize,
        description: String,
    },
    #[error("constraint {row} references unknown {index}, outside the declared range")]
    MalformedRow { row: usize, index: usize },
    #[error("internal error: {0}")]
    Unsound(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    pub max_columns: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_columns: DEFAULT_MAX_COLUMNS,
        }
    }
}

impl SolverConfig {
    /// Refuses programs whose unknown count exceeds the cap.
    pub fn guard(&self, num_vars: u128, description: impl FnOnce() -> String) -> Result<(), LpError> {
        if num_vars > self.max_columns as u128 {
            Err(LpError::TooLarge {
                num_vars,
                cap: self.max_columns,
                description: description(),
            })
        } else {
            Ok(())
        }
    }
}

pub fn solve_feasibility(lp: &LpProblem) -> Result<LpOutcome, LpError> {
    solve_feasibility_with(lp, &SolverConfig::default())
}

pub fn solve_feasibility_with(lp: &LpProblem, config: &SolverConfig) -> Result<LpOutcome, LpError> {
    config.guard(lp.num_vars as u128, || format!("{} columns", lp.num_vars))?;
    lp.check_shape()?;
    let mut tab = Revised::new(lp);
    let outcome = match tab.phase_one() {
        PhaseOne::Feasible => LpOutcome::Feasible {
            witness: tab.primal(),
        },
        PhaseOne::Infeasible(y) => LpOutcome::Infeasible {
            certificate: tab.certificate(&y),
        },
    };
    let sound = match &outcome {
        LpOutcome::Feasible { witness } => check_witness(lp, witness),
        LpOutcome::Infeasible { certificate } => check_certificate(lp, certificate),
    };
    if !sound {
        return Err(LpError::Unsound("solver answer failed exact re-verification".into()));
    }
    Ok(outcome)
}

/// Maximizes `objective · x` over the program's feasible set.
pub fn maximize(lp: &LpProblem, objective: &[(usize, Rational)]) -> Result<LpOptimum, LpError> {
    SolverConfig::default().guard(lp.num_vars as u128, || format!("{} columns", lp.num_vars))?;
    lp.check_shape()?;
    let mut tab = Revised::new(lp);
    if let PhaseOne::Infeasible(y) = tab.phase_one() {
        let certificate = tab.certificate(&y);
        debug_assert!(check_certificate(lp, &certificate));
        return Ok(LpOptimum::Infeasible { certificate });
    }
    tab.drive_out_artificials();
    let mut costs = vec![Rational::zero(); tab.n + tab.m];
    for (j, c) in objective {
        if *j >= lp.num_vars {
            return Err(LpError::MalformedRow { row: usize::MAX, index: *j });
        }
        // minimize −c·x
        costs[*j] -= c;
    }
    match tab.optimize(&costs) {
        Step::Optimal(y) => {
            let solution = tab.primal();
            let value = objective
                .iter()
                .fold(Rational::zero(), |acc, (j, c)| acc + c * &solution[*j]);
            let dual = tab.unscale_dual(&y.iter().map(|v| -v).collect::<Vec<_>>());
            if !check_witness(lp, &solution) || !check_optimality(lp, objective, &dual, &value) {
                return Err(LpError::Unsound("optimum failed exact re-verification".into()));
            }
            Ok(LpOptimum::Optimal { value, solution, dual })
        }
        Step::Unbounded => Ok(LpOptimum::Unbounded),
    }
}

/// True iff `x ≥ 0` and every constraint holds exactly.
pub fn check_witness(lp: &LpProblem, x: &[Rational]) -> bool {
    x.len() == lp.num_vars
        && x.iter().all(|v| !v.is_negative())
        && lp.constraints.iter().all(|c| {
            c.terms
                .iter()
                .fold(Rational::zero(), |acc, (j, a)| acc + a * &x[*j])
                == c.rhs
        })
}

/// True iff `yᵀA ≥ 0` componentwise and `yᵀb < 0`.
pub fn check_certificate(lp: &LpProblem, y: &[Rational]) -> bool {
    if y.len() != lp.constraints.len() {
        return false;
    }
    let mut combo = vec![Rational::zero(); lp.num_vars];
    let mut rhs = Rational::zero();
    for (c, yi) in lp.constraints.iter().zip(y) {
        if yi.is_zero() {
            continue;
        }
        for (j, a) in &c.terms {
            combo[*j] += a * yi;
        }
        rhs += &c.rhs * yi;
    }
    rhs.is_negative() && combo.iter().all(|v| !v.is_negative())
}

fn check_optimality(lp: &LpProblem, objective: &[(usize, Rational)], y: &[Rational], value: &Rational) -> bool {
    let mut combo = vec![Rational::zero(); lp.num_vars];
    let mut rhs = Rational::zero();
    for (c, yi) in lp.constraints.iter().zip(y) {
        for (j, a) in &c.terms {
            combo[*j] += a * yi;
        }
        rhs += &c.rhs * yi;
    }
    for (j, c) in objective {
        combo[*j] -= c;
    }
    &rhs == value && combo.iter().all(|v| !v.is_negative())
}

enum PhaseOne {
    Feasible,
    Infeasible(Vec<Rational>),
}

enum Step {
    Optimal(Vec<Rational>),
    Unbounded,
}

/// Working state. Rows are deduplicated, sign-normalized to `b ≥ 0` and
/// scaled to integer coefficients; `row_map` and `row_scale` undo that.
struct Revised {
    m: usize,
    n: usize,
    orig_rows: usize,
    /// kept row index for each original row, `None` for exact duplicates
    row_map: Vec<Option<usize>>,
    /// signed positive scaling applied to each kept row
    row_scale: Vec<Rational>,
    cols: Vec<Vec<(usize, BigInt)>>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: Vec<Vec<Rational>>,
    xb: Vec<Rational>,
}

impl Revised {
    fn new(lp: &LpProblem) -> Self {
        let mut seen: HashSet<&Constraint> = HashSet::new();
        let mut row_map = Vec::with_capacity(lp.constraints.len());
        let mut kept: Vec<&Constraint> = Vec::new();
        for c in &lp.constraints {
            if seen.insert(c) {
                row_map.push(Some(kept.len()));
                kept.push(c);
            } else {
                row_map.push(None);
            }
        }
        let m = kept.len();
        let n = lp.num_vars;
        let mut cols: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); n];
        let mut row_scale = Vec::with_capacity(m);
        let mut xb = Vec::with_capacity(m);
        for (i, c) in kept.iter().enumerate() {
            let lcm = c
                .terms
                .iter()
                .map(|(_, a)| a.denom().clone())
                .chain(std::iter::once(c.rhs.denom().clone()))
                .fold(BigInt::one(), |acc, d| acc.lcm(&d));
            let sign = if c.rhs.is_negative() { -BigInt::one() } else { BigInt::one() };
            let scale = Rational::from_integer(lcm * sign);
            for (j, a) in &c.terms {
                let v = a * &scale;
                debug_assert!(v.is_integer());
                cols[*j].push((i, v.to_integer()));
            }
            xb.push(&c.rhs * &scale);
            row_scale.push(scale);
        }
        let mut binv = vec![vec![Rational::zero(); m]; m];
        for (i, row) in binv.iter_mut().enumerate() {
            row[i] = Rational::one();
        }
        let mut is_basic = vec![false; n + m];
        for flag in &mut is_basic[n..] {
            *flag = true;
        }
        Self {
            m,
            n,
            orig_rows: lp.constraints.len(),
            row_map,
            row_scale,
            cols,
            basis: (n..n + m).collect(),
            is_basic,
            binv,
            xb,
        }
    }

    fn phase_one(&mut self) -> PhaseOne {
        let mut costs = vec![Rational::zero(); self.n + self.m];
        for c in &mut costs[self.n..] {
            *c = Rational::one();
        }
        let y = match self.optimize(&costs) {
            Step::Optimal(y) => y,
            Step::Unbounded => unreachable!("phase-one objective is bounded below by zero"),
        };
        let infeasibility = self
            .basis
            .iter()
            .zip(&self.xb)
            .filter(|(j, _)| **j >= self.n)
            .fold(Rational::zero(), |acc, (_, x)| acc + x);
        if infeasibility.is_zero() {
            PhaseOne::Feasible
        } else {
            PhaseOne::Infeasible(y)
        }
    }

    /// Minimizes `costs · x` from the current basis. Artificial columns never enter.
    fn optimize(&mut self, costs: &[Rational]) -> Step {
        loop {
            let y = self.duals(costs);
            let Some(entering) = self.entering(&y, costs) else {
                return Step::Optimal(y);
            };
            let w = self.ftran(entering);
            let Some(leave) = self.leaving(&w) else {
                return Step::Unbounded;
            };
            self.pivot(leave, entering, &w);
        }
    }

    fn duals(&self, costs: &[Rational]) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); self.m];
        for (i, &j) in self.basis.iter().enumerate() {
            let c = &costs[j];
            if c.is_zero() {
                continue;
            }
            for (yk, bik) in y.iter_mut().zip(&self.binv[i]) {
                if !bik.is_zero() {
                    *yk += c * bik;
                }
            }
        }
        y
    }

    /// Bland: lowest-index column with negative reduced cost.
    fn entering(&self, y: &[Rational], costs: &[Rational]) -> Option<usize> {
        // Price in integers: with y = Y / d, reduced cost < 0 iff Y·A_j > d·c_j.
        let d = y.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let scaled: Vec<BigInt> = y
            .iter()
            .map(|v| v.numer() * (&d / v.denom()))
            .collect();
        let d = Rational::from_integer(d);
        (0..self.n).find(|&j| {
            if self.is_basic[j] {
                return false;
            }
            let mut s = BigInt::zero();
            for (i, a) in &self.cols[j] {
                if a.is_one() {
                    s += &scaled[*i];
                } else {
                    s += &scaled[*i] * a;
                }
            }
            let c = &costs[j];
            if c.is_zero() {
                s.is_positive()
            } else {
                Rational::from_integer(s) > c * &d
            }
        })
    }

    /// `B⁻¹ A_j`.
    fn ftran(&self, j: usize) -> Vec<Rational> {
        let mut w = vec![Rational::zero(); self.m];
        if j >= self.n {
            let k = j - self.n;
            for (wi, row) in w.iter_mut().zip(&self.binv) {
                *wi = row[k].clone();
            }
            return w;
        }
        for (wi, row) in w.iter_mut().zip(&self.binv) {
            for (k, a) in &self.cols[j] {
                let b = &row[*k];
                if !b.is_zero() {
                    *wi += b * Rational::from_integer(a.clone());
                }
            }
        }
        w
    }

    /// Bland: minimum ratio, ties to the lowest basic variable index.
    fn leaving(&self, w: &[Rational]) -> Option<usize> {
        let mut best: Option<(usize, Rational)> = None;
        for (i, wi) in w.iter().enumerate() {
            if !wi.is_positive() {
                continue;
            }
            let ratio = &self.xb[i] / wi;
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    if ratio < br || (ratio == br && self.basis[i] < self.basis[bi]) {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    fn pivot(&mut self, r: usize, entering: usize, w: &[Rational]) {
        let piv = w[r].clone();
        for v in &mut self.binv[r] {
            if !v.is_zero() {
                *v /= &piv;
            }
        }
        self.xb[r] /= &piv;
        let pivot_row = self.binv[r].clone();
        let pivot_x = self.xb[r].clone();
        for (i, f) in w.iter().enumerate() {
            if i == r || f.is_zero() {
                continue;
            }
            for (v, p) in self.binv[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= f * p;
                }
            }
            self.xb[i] -= f * &pivot_x;
        }
        self.is_basic[self.basis[r]] = false;
        self.is_basic[entering] = true;
        self.basis[r] = entering;
    }

    /// Degenerate pivots replacing basic artificials by original columns where possible.
    fn drive_out_artificials(&mut self) {
        for r in 0..self.m {
            if self.basis[r] < self.n {
                continue;
            }
            let found = (0..self.n)
                .filter(|&j| !self.is_basic[j])
                .find_map(|j| {
                    let w = self.ftran(j);
                    (!w[r].is_zero()).then_some((j, w))
                });
            if let Some((j, w)) = found {
                self.pivot(r, j, &w);
            }
        }
    }

    fn primal(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.n];
        for (i, &j) in self.basis.iter().enumerate() {
            if j < self.n {
                x[j] = self.xb[i].clone();
            }
        }
        x
    }

    /// Maps transformed-row multipliers back onto the original rows.
    fn unscale_dual(&self, z: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.orig_rows];
        for (orig, kept) in self.row_map.iter().enumerate() {
            if let Some(k) = kept {
                out[orig] = &z[*k] * &self.row_scale[*k];
            }
        }
        out
    }

    /// Phase-one duals `y` satisfy `yᵀA ≤ 0`, `yᵀb > 0`; the certificate is `−y`.
    fn certificate(&self, y: &[Rational]) -> Vec<Rational> {
        let neg: Vec<Rational> = y.iter().map(|v| -v).collect();
        let mut cert = self.unscale_dual(&neg);
        // Present with a common denominator cleared.
        let d = cert.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let d = Rational::from_integer(d);
        for v in &mut cert {
            *v *= &d;
        }
        cert
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn one_row(lp: &mut LpProblem, terms: &[(usize, i64)], rhs: i64) {
        lp.add_constraint(terms.iter().map(|&(j, a)| (j, int(a))), int(rhs));
    }

    #[test]
    fn single_constraint_is_feasible() {
        let mut lp = LpProblem::new(2);
        one_row(&mut lp, &[(0, 1), (1, 1)], 1);
        let out = solve_feasibility(&lp).unwrap();
        let LpOutcome::Feasible { witness } = out else { panic!("expected feasible") };
        assert!(check_witness(&lp, &witness));
    }

    #[test]
    fn contradictory_equalities_give_certificate() {
        let mut lp = LpProblem::new(1);
        one_row(&mut lp, &[(0, 1)], 1);
        one_row(&mut lp, &[(0, 1)], 0);
        let out = solve_feasibility(&lp).unwrap();
        let LpOutcome::Infeasible { certificate } = out else { panic!("expected infeasible") };
        assert!(check_certificate(&lp, &certificate));
    }

    #[test]
    fn negative_rhs_and_fractional_coefficients() {
        let mut lp = LpProblem::new(3);
        lp.add_constraint([(0, rat(-1, 2)), (1, rat(1, 3))], rat(-1, 6));
        lp.add_constraint([(0, int(1)), (1, int(1)), (2, int(1))], int(1));
        let LpOutcome::Feasible { witness } = solve_feasibility(&lp).unwrap() else {
            panic!("expected feasible")
        };
        assert!(check_witness(&lp, &witness));

        let mut lp = LpProblem::new(2);
        lp.add_constraint([(0, int(-1)), (1, int(-1))], int(1));
        assert!(!solve_feasibility(&lp).unwrap().is_feasible());
    }

    #[test]
    fn duplicate_and_redundant_rows() {
        let mut lp = LpProblem::new(3);
        for _ in 0..3 {
            one_row(&mut lp, &[(0, 1), (1, 1)], 1);
        }
        one_row(&mut lp, &[(0, 2), (1, 2)], 2);
        one_row(&mut lp, &[(1, 1), (2, 1)], 1);
        let out = solve_feasibility(&lp).unwrap();
        assert!(out.is_feasible());
        one_row(&mut lp, &[(2, 1)], 2);
        let LpOutcome::Infeasible { certificate } = solve_feasibility(&lp).unwrap() else {
            panic!("expected infeasible")
        };
        assert_eq!(certificate.len(), 6);
        assert!(check_certificate(&lp, &certificate));
    }

    #[test]
    fn empty_program_is_feasible() {
        let lp = LpProblem::new(0);
        assert_eq!(
            solve_feasibility(&lp).unwrap(),
            LpOutcome::Feasible { witness: vec![] }
        );
    }

    #[test]
    fn guard_refuses_large_programs() {
        let lp = LpProblem::new(10);
        let err = solve_feasibility_with(&lp, &SolverConfig { max_columns: 4 }).unwrap_err();
        assert!(matches!(err, LpError::TooLarge { num_vars: 10, cap: 4, .. }));
    }

    #[test]
    fn malformed_row_rejected() {
        let mut lp = LpProblem::new(1);
        one_row(&mut lp, &[(3, 1)], 1);
        assert_eq!(
            solve_feasibility(&lp),
            Err(LpError::MalformedRow { row: 0, index: 3 })
        );
    }

    #[test]
    fn maximize_small_program() {
        // max x0 + 2 x1 s.t. x0 + x1 + x2 = 4, x1 + x3 = 3
        let mut lp = LpProblem::new(4);
        one_row(&mut lp, &[(0, 1), (1, 1), (2, 1)], 4);
        one_row(&mut lp, &[(1, 1), (3, 1)], 3);
        let LpOptimum::Optimal { value, .. } = maximize(&lp, &[(0, int(1)), (1, int(2))]).unwrap() else {
            panic!("expected optimum")
        };
        assert_eq!(value, int(7));

        let mut unb = LpProblem::new(2);
        one_row(&mut unb, &[(0, 1), (1, -1)], 0);
        assert_eq!(maximize(&unb, &[(0, int(1))]).unwrap(), LpOptimum::Unbounded);
    }

    #[test]
    fn maximize_with_redundant_rows() {
        let mut lp = LpProblem::new(2);
        one_row(&mut lp, &[(0, 1), (1, 1)], 1);
        one_row(&mut lp, &[(0, 2), (1, 2)], 2);
        let LpOptimum::Optimal { value, solution, .. } = maximize(&lp, &[(1, int(3))]).unwrap() else {
            panic!("expected optimum")
        };
        assert_eq!(value, int(3));
        assert_eq!(solution, vec![int(0), int(1)]);
    }
}
