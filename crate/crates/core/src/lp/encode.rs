//! Polytope encodings of noncontextuality.
//!
//! Reduced coupling: one unknown per joint assignment of the contents, rows
//! pin every context's joint table. Multimaximal coupling: one unknown per
//! joint assignment of every content-context variable, rows pin every
//! context's joint table and every same-content pair's coincidence mass to
//! its maximum.

use super::simplex::{solve_feasibility_with, LpError, LpOutcome, LpProblem, SolverConfig};
use crate::consistency::{check_scc, max_coincidence};
use crate::model::{marginal, ContentId, ContextId, Coupling, Support, System, Variable};
use crate::rational::Rational;
use num_traits::Zero;
use std::fmt;

/// What a row of an encoded program pins down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowLabel {
    /// `P_c(values)` for the context's contents in block order.
    ContextCell { context: ContextId, values: Vec<usize> },
    /// `P(S_q^c = S_q^{c'})` at its maximum.
    Coincidence {
        content: ContentId,
        context_a: ContextId,
        context_b: ContextId,
    },
}

impl fmt::Display for RowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowLabel::ContextCell { context, values } => {
                let values: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                write!(f, "P_{context}({})", values.join(","))
            }
            RowLabel::Coincidence { content, context_a, context_b } => {
                write!(f, "P(S[{content}@{context_a}] = S[{content}@{context_b}])")
            }
        }
    }
}

/// An encoded program together with the meaning of its unknowns and rows.
#[derive(Debug, Clone)]
pub struct CouplingProgram {
    pub lp: LpProblem,
    pub variables: Vec<Variable>,
    pub supports: Vec<Support>,
    pub rows: Vec<RowLabel>,
    radix: Radix,
}

impl CouplingProgram {
    /// Reads a feasible point as a coupling over the program's variables.
    pub fn coupling_from(&self, witness: &[Rational]) -> Coupling {
        let vars = self.variables.iter().cloned().zip(self.supports.iter().cloned()).collect();
        let entries = witness
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(i, p)| (self.radix.decode(i), p.clone()));
        Coupling::new(vars, entries)
    }
}

/// Mixed-radix numbering of joint assignments, first variable most significant.
#[derive(Debug, Clone)]
struct Radix {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl Radix {
    fn new(sizes: Vec<usize>) -> Self {
        let mut strides = vec![1; sizes.len()];
        for i in (0..sizes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * sizes[i + 1];
        }
        let total = sizes.iter().product();
        Self { sizes, strides, total }
    }

    fn decode(&self, mut index: usize) -> Vec<usize> {
        self.strides
            .iter()
            .map(|s| {
                let v = index / s;
                index %= s;
                v
            })
            .collect()
    }

    #[cfg(test)]
    fn encode(&self, values: &[usize]) -> usize {
        values.iter().zip(&self.strides).map(|(v, s)| v * s).sum()
    }

    /// Calls `f` on every assignment in index order.
    fn for_each(&self, mut f: impl FnMut(usize, &[usize])) {
        let mut digits = vec![0usize; self.sizes.len()];
        for index in 0..self.total {
            f(index, &digits);
            for k in (0..digits.len()).rev() {
                digits[k] += 1;
                if digits[k] < self.sizes[k] {
                    break;
                }
                digits[k] = 0;
            }
        }
    }
}

fn guarded_radix(sizes: Vec<usize>, config: &SolverConfig) -> Result<Radix, LpError> {
    let total = sizes
        .iter()
        .try_fold(1u128, |acc, &s| acc.checked_mul(s as u128))
        .unwrap_or(u128::MAX);
    config.guard(total, || {
        let factors: Vec<String> = sizes.iter().map(|s| s.to_string()).collect();
        format!("{} = {}", factors.join(" × "), total)
    })?;
    Ok(Radix::new(sizes))
}

/// Rows pinning each block's table: positions map block contents to program variables.
fn context_rows(
    sys: &System,
    radix: &Radix,
    positions: impl Fn(&str, &str) -> usize,
    rows: &mut Vec<RowLabel>,
    rhs: &mut Vec<Rational>,
    terms: &mut Vec<Vec<usize>>,
) {
    for block in sys.blocks() {
        let local = Radix::new(block.supports.iter().map(Support::len).collect());
        let offset = rows.len();
        let pos: Vec<usize> = block.contents.iter().map(|q| positions(q, &block.context)).collect();
        local.for_each(|_, values| {
            rows.push(RowLabel::ContextCell {
                context: block.context.clone(),
                values: values.to_vec(),
            });
            rhs.push(block.probability(values));
            terms.push(Vec::new());
        });
        radix.for_each(|index, digits| {
            let local_index: usize = pos.iter().zip(&local.strides).map(|(&p, s)| digits[p] * s).sum();
            terms[offset + local_index].push(index);
        });
    }
}

fn assemble(num_vars: usize, rhs: Vec<Rational>, terms: Vec<Vec<usize>>) -> LpProblem {
    let mut lp = LpProblem::new(num_vars);
    let one = Rational::from_integer(1.into());
    for (r, t) in rhs.into_iter().zip(terms) {
        lp.add_constraint(t.into_iter().map(|j| (j, one.clone())), r);
    }
    lp
}

/// Reduced-coupling program: does a joint `{S_q : q ∈ Q}` reproduce every context?
pub fn encode_reduced_coupling(sys: &System, config: &SolverConfig) -> Result<CouplingProgram, LpError> {
    let contents: Vec<&ContentId> = sys.contents().collect();
    let supports: Vec<Support> = contents.iter().map(|q| sys.support(q).unwrap().clone()).collect();
    let radix = guarded_radix(supports.iter().map(Support::len).collect(), config)?;
    let (mut rows, mut rhs, mut terms) = (Vec::new(), Vec::new(), Vec::new());
    let index_of = |q: &str, _c: &str| contents.iter().position(|x| *x == q).expect("declared content");
    context_rows(sys, &radix, index_of, &mut rows, &mut rhs, &mut terms);
    Ok(CouplingProgram {
        lp: assemble(radix.total, rhs, terms),
        variables: contents.iter().map(|q| Variable::Content((*q).clone())).collect(),
        supports,
        rows,
        radix,
    })
}

/// Multimaximal-coupling program over all variables `S_q^c`.
pub fn encode_multimaximal(sys: &System, config: &SolverConfig) -> Result<CouplingProgram, LpError> {
    let variables = sys.variables();
    let supports: Vec<Support> = sys
        .blocks()
        .flat_map(|b| b.supports.iter().cloned())
        .collect();
    let radix = guarded_radix(supports.iter().map(Support::len).collect(), config)?;
    let (mut rows, mut rhs, mut terms) = (Vec::new(), Vec::new(), Vec::new());
    let index_of = |q: &str, c: &str| {
        variables
            .iter()
            .position(|(vq, vc)| vq == q && vc == c)
            .expect("system variable")
    };
    context_rows(sys, &radix, index_of, &mut rows, &mut rhs, &mut terms);
    for q in sys.contents() {
        let ctxs = sys.contexts_of(q);
        for (i, a) in ctxs.iter().enumerate() {
            for b in &ctxs[i + 1..] {
                let ma = marginal(sys.block(a).unwrap(), &[q]).map_err(|e| LpError::Unsound(e.to_string()))?;
                let mb = marginal(sys.block(b).unwrap(), &[q]).map_err(|e| LpError::Unsound(e.to_string()))?;
                let target = max_coincidence(&ma, &mb).map_err(|e| LpError::Unsound(e.to_string()))?;
                let (pa, pb) = (index_of(q, a), index_of(q, b));
                let mut t = Vec::new();
                radix.for_each(|index, digits| {
                    if digits[pa] == digits[pb] {
                        t.push(index);
                    }
                });
                rows.push(RowLabel::Coincidence {
                    content: q.clone(),
                    context_a: (*a).clone(),
                    context_b: (*b).clone(),
                });
                rhs.push(target);
                terms.push(t);
            }
        }
    }
    Ok(CouplingProgram {
        lp: assemble(radix.total, rhs, terms),
        variables: variables
            .into_iter()
            .map(|(content, context)| Variable::Contextual { content, context })
            .collect(),
        supports,
        rows,
        radix,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Encoding {
    /// Reduced coupling; only meaningful for strongly consistently connected systems.
    Scc,
    /// Multimaximally connected coupling; any system.
    Cbd,
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Encoding::Scc => "scc",
            Encoding::Cbd => "cbd",
        })
    }
}

impl std::str::FromStr for Encoding {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "scc" => Ok(Encoding::Scc),
            "cbd" => Ok(Encoding::Cbd),
            other => Err(format!("unknown encoding `{other}` (expected scc or cbd)")),
        }
    }
}

/// Farkas multipliers, aligned with the rows of the encoded program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub rows: Vec<RowLabel>,
    pub multipliers: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evidence {
    Witness(Coupling),
    Certificate(FarkasCertificate),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoncontextualityVerdict {
    pub encoding: Encoding,
    pub evidence: Evidence,
}

impl NoncontextualityVerdict {
    pub fn is_noncontextual(&self) -> bool {
        matches!(self.evidence, Evidence::Witness(_))
    }

    pub fn witness(&self) -> Option<&Coupling> {
        match &self.evidence {
            Evidence::Witness(c) => Some(c),
            Evidence::Certificate(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&FarkasCertificate> {
        match &self.evidence {
            Evidence::Certificate(c) => Some(c),
            Evidence::Witness(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecideError {
    #[error("the reduced-coupling encoding requires a strongly consistently connected system; use the cbd encoding")]
    NotScc,
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("witness coupling does not reproduce the system")]
    WitnessRejected,
}

pub fn decide_noncontextual(sys: &System, encoding: Encoding) -> Result<NoncontextualityVerdict, DecideError> {
    decide_noncontextual_with(sys, encoding, &SolverConfig::default())
}

/// Builds the requested encoding, solves it exactly and re-checks the witness
/// against the system.
pub fn decide_noncontextual_with(
    sys: &System,
    encoding: Encoding,
    config: &SolverConfig,
) -> Result<NoncontextualityVerdict, DecideError> {
    let program = match encoding {
        Encoding::Scc => {
            if !check_scc(sys).holds {
                return Err(DecideError::NotScc);
            }
            encode_reduced_coupling(sys, config)?
        }
        Encoding::Cbd => encode_multimaximal(sys, config)?,
    };
    let evidence = match solve_feasibility_with(&program.lp, config)? {
        LpOutcome::Feasible { witness } => {
            let coupling = program.coupling_from(&witness);
            let ok = match encoding {
                Encoding::Scc => verify_reduced_coupling(sys, &coupling),
                Encoding::Cbd => verify_multimaximal_coupling(sys, &coupling),
            };
            if !ok {
                return Err(DecideError::WitnessRejected);
            }
            Evidence::Witness(coupling)
        }
        LpOutcome::Infeasible { certificate } => Evidence::Certificate(FarkasCertificate {
            rows: program.rows,
            multipliers: certificate,
        }),
    };
    Ok(NoncontextualityVerdict { encoding, evidence })
}

/// Every context's joint equals the coupling's joint of `{S_q : q ≺ c}`.
pub fn verify_reduced_coupling(sys: &System, coupling: &Coupling) -> bool {
    coupling.is_distribution()
        && sys.blocks().all(|b| {
            let vars: Vec<Variable> = b.contents.iter().map(|q| Variable::Content(q.clone())).collect();
            coupling.marginal_table(&vars).as_ref() == Some(&b.table)
        })
}

/// Every context's joint is reproduced by `{S_q^c}` and every same-content
/// pair coincides with its maximal probability.
pub fn verify_multimaximal_coupling(sys: &System, coupling: &Coupling) -> bool {
    if !coupling.is_distribution() {
        return false;
    }
    let contextual = |q: &str, c: &str| Variable::Contextual {
        content: q.to_string(),
        context: c.to_string(),
    };
    let blocks_ok = sys.blocks().all(|b| {
        let vars: Vec<Variable> = b.contents.iter().map(|q| contextual(q, &b.context)).collect();
        coupling.marginal_table(&vars).as_ref() == Some(&b.table)
    });
    blocks_ok
        && sys.contents().all(|q| {
            let ctxs = sys.contexts_of(q);
            ctxs.iter().enumerate().all(|(i, a)| {
                ctxs[i + 1..].iter().all(|b| {
                    let target = max_coincidence(
                        &marginal(sys.block(a).unwrap(), &[q]).unwrap(),
                        &marginal(sys.block(b).unwrap(), &[q]).unwrap(),
                    );
                    match target {
                        Ok(t) => coupling.coincidence(&contextual(q, a), &contextual(q, b)) == Some(t),
                        Err(_) => false,
                    }
                })
            })
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::simplex::check_certificate;
    use crate::model::ContextBlock;
    use crate::rational::{int, rat};

    fn pm_block(c: &str, qs: &[&str], table: &[(&[usize], Rational)]) -> ContextBlock {
        ContextBlock::new(
            c,
            qs.iter().map(|q| (q.to_string(), Support::plus_minus())).collect(),
            table.iter().map(|(k, p)| (k.to_vec(), p.clone())),
        )
    }

    fn pm_supports(qs: &[&str]) -> Vec<(String, Support)> {
        qs.iter().map(|q| (q.to_string(), Support::plus_minus())).collect()
    }

    fn magic() -> System {
        let anti = [(&[0usize, 1][..], rat(1, 2)), (&[1usize, 0][..], rat(1, 2))];
        System::checked(
            pm_supports(&["1", "2", "3"]),
            [
                pm_block("1", &["1", "2"], &anti),
                pm_block("2", &["2", "3"], &anti),
                pm_block("3", &["1", "3"], &anti),
            ],
        )
        .unwrap()
    }

    #[test]
    fn radix_round_trip() {
        let r = Radix::new(vec![2, 3, 2]);
        assert_eq!(r.total, 12);
        let mut seen = 0;
        r.for_each(|i, d| {
            assert_eq!(r.decode(i), d);
            assert_eq!(r.encode(d), i);
            seen += 1;
        });
        assert_eq!(seen, 12);
    }

    #[test]
    fn magic_box_reduced_program_is_infeasible() {
        let program = encode_reduced_coupling(&magic(), &SolverConfig::default()).unwrap();
        assert_eq!(program.lp.num_vars, 8);
        assert_eq!(program.lp.constraints.len(), 12);
        let verdict = decide_noncontextual(&magic(), Encoding::Scc).unwrap();
        let cert = verdict.certificate().expect("contextual");
        assert!(check_certificate(&program.lp, &cert.multipliers));
        assert!(!decide_noncontextual(&magic(), Encoding::Cbd).unwrap().is_noncontextual());
    }

    #[test]
    fn single_context_is_its_own_coupling() {
        let sys = System::checked(
            pm_supports(&["a", "b"]),
            [pm_block("c", &["a", "b"], &[(&[0, 0], rat(1, 3)), (&[1, 0], rat(2, 3))])],
        )
        .unwrap();
        for enc in [Encoding::Scc, Encoding::Cbd] {
            let v = decide_noncontextual(&sys, enc).unwrap();
            let w = v.witness().expect("noncontextual");
            assert_eq!(w.table, sys.block("c").unwrap().table);
        }
    }

    #[test]
    fn disturbed_cycle_is_cbd_noncontextual() {
        let quarter = [[0, 0], [0, 1], [1, 0], [1, 1]].map(|k| (k, rat(1, 4)));
        let q: Vec<(&[usize], Rational)> = quarter.iter().map(|(k, p)| (&k[..], p.clone())).collect();
        let sys = System::checked(
            pm_supports(&["1", "2", "3"]),
            [
                pm_block("1", &["1", "2"], &[(&[0, 0], rat(1, 2)), (&[0, 1], rat(1, 2))]),
                pm_block("2", &["2", "3"], &q),
                pm_block("3", &["1", "3"], &[(&[1, 0], rat(1, 2)), (&[1, 1], rat(1, 2))]),
            ],
        )
        .unwrap();
        assert_eq!(decide_noncontextual(&sys, Encoding::Scc), Err(DecideError::NotScc));
        let v = decide_noncontextual(&sys, Encoding::Cbd).unwrap();
        let w = v.witness().expect("noncontextual");
        let s11 = Variable::Contextual { content: "1".into(), context: "1".into() };
        let s13 = Variable::Contextual { content: "1".into(), context: "3".into() };
        assert_eq!(w.coincidence(&s11, &s13), Some(int(0)));
    }

    #[test]
    fn guard_names_the_product() {
        let err = encode_reduced_coupling(&magic(), &SolverConfig { max_columns: 4 }).unwrap_err();
        match err {
            LpError::TooLarge { description, .. } => assert_eq!(description, "2 × 2 × 2 = 8"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
