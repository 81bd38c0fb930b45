//! Factual-counterfactual subsystems, counterfactual definiteness and its
//! generalization to systems with disturbance.
//!
//! Choosing a factual context `c0` keeps, from every context, only the
//! variables whose content is also measured in `c0`. For strongly
//! consistently connected systems the factual block itself is a reduced
//! coupling of that subsystem, which [`construct_ic_coupling`] builds directly.

use crate::consistency::check_scc;
use crate::lp::{
    decide_noncontextual_with, verify_reduced_coupling, DecideError, Encoding, Evidence,
    NoncontextualityVerdict, SolverConfig,
};
use crate::model::{
    marginal, ContentId, ContextBlock, ContextId, Coupling, ModelError, Support, System,
    Table, Variable,
};
use crate::rational::Rational;
use num_traits::Zero;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CfdError {
    #[error("system is not strongly consistently connected; counterfactual definiteness is defined for such systems only, use gcfd instead")]
    NotScc,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Decide(#[from] DecideError),
    #[error("linear program disagrees with the constructive coupling for factual context `{0}`")]
    Disagreement(ContextId),
    #[error("constructed coupling fails to reproduce context `{0}`")]
    ConstructionFailed(ContextId),
    #[error("coupling would have {0} variables' joint support above the size limit")]
    TooLarge(String),
}

/// The subsystem seen from one factual context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FcfSubsystem {
    pub factual_context: ContextId,
    pub system: System,
}

pub fn fcf_subsystem(sys: &System, c0: &str) -> Result<FcfSubsystem, ModelError> {
    let factual = sys
        .block(c0)
        .ok_or_else(|| ModelError::UnknownContext(c0.to_string()))?;
    let mut blocks = Vec::new();
    for block in sys.blocks() {
        let retained: Vec<&str> = block
            .contents
            .iter()
            .filter(|q| factual.contains(q))
            .map(String::as_str)
            .collect();
        if retained.is_empty() {
            continue;
        }
        let m = marginal(block, &retained)?;
        blocks.push(ContextBlock {
            context: block.context.clone(),
            contents: m.contents,
            supports: m.supports,
            table: m.table,
        });
    }
    let supports: Vec<(ContentId, Support)> = factual
        .contents
        .iter()
        .filter_map(|q| sys.support(q).map(|s| (q.clone(), s.clone())))
        .collect();
    Ok(FcfSubsystem {
        factual_context: c0.to_string(),
        system: System::new(supports, blocks)?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CfdReport {
    pub holds: bool,
    pub per_context: BTreeMap<ContextId, NoncontextualityVerdict>,
}

impl CfdReport {
    fn from_verdicts(per_context: BTreeMap<ContextId, NoncontextualityVerdict>) -> Self {
        Self {
            holds: per_context.values().all(NoncontextualityVerdict::is_noncontextual),
            per_context,
        }
    }
}

/// How [`check_cfd_with`] decides each subsystem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CfdMode {
    /// Use the factual block as the reduced coupling and check it exactly.
    #[default]
    Constructive,
    /// Additionally solve the reduced-coupling program and require agreement.
    Verify,
}

pub fn check_cfd(sys: &System) -> Result<CfdReport, CfdError> {
    check_cfd_with(sys, CfdMode::Constructive, &SolverConfig::default())
}

pub fn check_cfd_with(sys: &System, mode: CfdMode, config: &SolverConfig) -> Result<CfdReport, CfdError> {
    if !check_scc(sys).holds {
        return Err(CfdError::NotScc);
    }
    let mut per_context = BTreeMap::new();
    for c0 in sys.contexts() {
        let sub = fcf_subsystem(sys, c0)?;
        let factual = sys.block(c0).expect("listed context");
        let witness = Coupling::new(
            factual
                .contents
                .iter()
                .zip(&factual.supports)
                .map(|(q, s)| (Variable::Content(q.clone()), s.clone()))
                .collect(),
            factual.table.clone(),
        );
        if !verify_reduced_coupling(&sub.system, &witness) {
            return Err(CfdError::ConstructionFailed(c0.clone()));
        }
        let verdict = match mode {
            CfdMode::Constructive => NoncontextualityVerdict {
                encoding: Encoding::Scc,
                evidence: Evidence::Witness(witness),
            },
            CfdMode::Verify => {
                let v = decide_noncontextual_with(&sub.system, Encoding::Scc, config)?;
                if !v.is_noncontextual() {
                    return Err(CfdError::Disagreement(c0.clone()));
                }
                v
            }
        };
        per_context.insert(c0.clone(), verdict);
    }
    Ok(CfdReport::from_verdicts(per_context))
}

pub fn check_gcfd(sys: &System) -> Result<CfdReport, CfdError> {
    check_gcfd_with(sys, &SolverConfig::default())
}

/// Decides every F-CF subsystem with the multimaximal encoding.
pub fn check_gcfd_with(sys: &System, config: &SolverConfig) -> Result<CfdReport, CfdError> {
    let mut per_context = BTreeMap::new();
    for c0 in sys.contexts() {
        let sub = fcf_subsystem(sys, c0)?;
        per_context.insert(c0.clone(), decide_noncontextual_with(&sub.system, Encoding::Cbd, config)?);
    }
    Ok(CfdReport::from_verdicts(per_context))
}

fn contextual(q: &str, c: &str) -> Variable {
    Variable::Contextual {
        content: q.to_string(),
        context: c.to_string(),
    }
}

/// Each context's joint equals the coupling's joint of its `S_q^c`.
fn reproduces_blocks(sys: &System, coupling: &Coupling) -> Result<(), CfdError> {
    for b in sys.blocks() {
        let vars: Vec<Variable> = b.contents.iter().map(|q| contextual(q, &b.context)).collect();
        if coupling.marginal_table(&vars).as_ref() != Some(&b.table) {
            return Err(CfdError::ConstructionFailed(b.context.clone()));
        }
    }
    Ok(())
}

/// The identically connected coupling of the F-CF subsystem for `c0`: every
/// counterfactual variable with content `q` is set equal to `R_q^{c0}`.
pub fn construct_ic_coupling(sys: &System, c0: &str) -> Result<Coupling, CfdError> {
    if !check_scc(sys).holds {
        return Err(CfdError::NotScc);
    }
    let sub = fcf_subsystem(sys, c0)?;
    let factual = sys.block(c0).expect("checked by fcf_subsystem");
    let variables = sub.system.variables();
    let source: Vec<usize> = variables
        .iter()
        .map(|(q, _)| factual.position(q).expect("retained contents are factual"))
        .collect();
    let vars = variables
        .iter()
        .map(|(q, c)| (contextual(q, c), sys.support(q).expect("declared").clone()))
        .collect();
    let table = factual
        .table
        .iter()
        .map(|(v, p)| (source.iter().map(|&i| v[i]).collect(), p.clone()));
    let coupling = Coupling::new(vars, table);
    reproduces_blocks(&sub.system, &coupling)?;
    Ok(coupling)
}

/// Conditional table of `rest` given `shared = given` within one block.
/// A null conditioning event yields the point mass on the first value of each support.
fn conditional(block: &ContextBlock, shared: &[usize], rest: &[usize], given: &[usize]) -> Vec<(Vec<usize>, Rational)> {
    let mut joint: Table = Table::new();
    for (k, p) in &block.table {
        if shared.iter().zip(given).all(|(&i, &v)| k[i] == v) {
            let r: Vec<usize> = rest.iter().map(|&i| k[i]).collect();
            *joint.entry(r).or_insert_with(Rational::zero) += p;
        }
    }
    let total: Rational = joint.values().fold(Rational::zero(), |a, p| a + p);
    if total.is_zero() {
        return vec![(vec![0; rest.len()], Rational::from_integer(1.into()))];
    }
    joint.into_iter().map(|(r, p)| (r, p / &total)).collect()
}

/// A coupling of the whole system in which every variable sharing its content
/// with the factual context is identified with the factual one; remaining
/// variables of a context follow their conditional law given the shared part.
pub fn extend_full_coupling(sys: &System, c0: &str) -> Result<Coupling, CfdError> {
    if !check_scc(sys).holds {
        return Err(CfdError::NotScc);
    }
    let factual = sys
        .block(c0)
        .ok_or_else(|| ModelError::UnknownContext(c0.to_string()))?;
    let variables = sys.variables();
    let index = |q: &str, c: &str| variables.iter().position(|(vq, vc)| vq == q && vc == c).unwrap();

    let mut entries: Vec<(Vec<usize>, Rational)> = factual
        .table
        .iter()
        .map(|(v, p)| {
            let mut full = vec![0usize; variables.len()];
            for (k, q) in factual.contents.iter().enumerate() {
                full[index(q, c0)] = v[k];
            }
            (full, p.clone())
        })
        .collect();

    for block in sys.blocks().filter(|b| b.context != c0) {
        let (shared, rest): (Vec<usize>, Vec<usize>) =
            (0..block.contents.len()).partition(|&k| factual.contains(&block.contents[k]));
        let shared_src: Vec<usize> = shared
            .iter()
            .map(|&k| index(&block.contents[k], c0))
            .collect();
        let shared_dst: Vec<usize> = shared
            .iter()
            .map(|&k| index(&block.contents[k], &block.context))
            .collect();
        let rest_dst: Vec<usize> = rest
            .iter()
            .map(|&k| index(&block.contents[k], &block.context))
            .collect();
        let mut cache: BTreeMap<Vec<usize>, Vec<(Vec<usize>, Rational)>> = BTreeMap::new();
        let mut next = Vec::with_capacity(entries.len());
        for (full, p) in entries {
            let given: Vec<usize> = shared_src.iter().map(|&i| full[i]).collect();
            let cond = cache
                .entry(given.clone())
                .or_insert_with(|| conditional(block, &shared, &rest, &given));
            for (r, pr) in cond.iter() {
                let mut ext = full.clone();
                for (&dst, &v) in shared_dst.iter().zip(&given) {
                    ext[dst] = v;
                }
                for (&dst, &v) in rest_dst.iter().zip(r) {
                    ext[dst] = v;
                }
                next.push((ext, &p * pr));
            }
        }
        entries = next;
        if entries.len() > crate::lp::DEFAULT_MAX_COLUMNS {
            return Err(CfdError::TooLarge(entries.len().to_string()));
        }
    }

    let vars = variables
        .iter()
        .map(|(q, c)| (contextual(q, c), sys.support(q).expect("declared").clone()))
        .collect();
    let coupling = Coupling::new(vars, entries);
    reproduces_blocks(sys, &coupling)?;
    Ok(coupling)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn pm_block(c: &str, qs: &[&str], table: Vec<(Vec<usize>, Rational)>) -> ContextBlock {
        ContextBlock::new(
            c,
            qs.iter().map(|q| (q.to_string(), Support::plus_minus())).collect(),
            table,
        )
    }

    fn anti(c: &str, a: &str, b: &str) -> ContextBlock {
        pm_block(c, &[a, b], vec![(vec![0, 1], rat(1, 2)), (vec![1, 0], rat(1, 2))])
    }

    fn magic() -> System {
        System::checked(
            ["1", "2", "3"].map(|q| (q.to_string(), Support::plus_minus())),
            [anti("1", "1", "2"), anti("2", "2", "3"), anti("3", "1", "3")],
        )
        .unwrap()
    }

    #[test]
    fn magic_box_fcf_for_context_two() {
        let sub = fcf_subsystem(&magic(), "2").unwrap().system;
        assert_eq!(sub.contents().collect::<Vec<_>>(), ["2", "3"]);
        assert_eq!(sub.block("1").unwrap().contents, ["2"]);
        assert_eq!(sub.block("3").unwrap().contents, ["3"]);
        assert_eq!(sub.block("2").unwrap(), magic().block("2").unwrap());
        assert!(fcf_subsystem(&magic(), "9").is_err());
    }

    #[test]
    fn magic_box_has_cfd() {
        let report = check_cfd(&magic()).unwrap();
        assert!(report.holds);
        assert_eq!(report.per_context.len(), 3);
        let verified = check_cfd_with(&magic(), CfdMode::Verify, &SolverConfig::default()).unwrap();
        assert!(verified.holds);
        assert!(check_gcfd(&magic()).unwrap().holds);
    }

    #[test]
    fn ic_coupling_copies_factual_values() {
        let c = construct_ic_coupling(&magic(), "2").unwrap();
        assert_eq!(c.variables.len(), 4);
        let x1 = contextual("2", "1");
        let x2 = contextual("2", "2");
        let y2 = contextual("3", "2");
        let y3 = contextual("3", "3");
        assert_eq!(c.coincidence(&x1, &x2), Some(int(1)));
        assert_eq!(c.coincidence(&y2, &y3), Some(int(1)));
        assert_eq!(c.coincidence(&x2, &y2), Some(int(0)));
    }

    #[test]
    fn full_coupling_of_magic_box() {
        let c = extend_full_coupling(&magic(), "2").unwrap();
        assert_eq!(c.table.len(), 2);
        // column q=1 holds −X in context 1 and X in context 3
        assert_eq!(c.coincidence(&contextual("1", "1"), &contextual("1", "3")), Some(int(0)));
        assert_eq!(c.coincidence(&contextual("1", "1"), &contextual("2", "2")), Some(int(0)));
        assert_eq!(c.coincidence(&contextual("1", "3"), &contextual("2", "2")), Some(int(1)));
    }

    #[test]
    fn non_scc_is_refused() {
        let sys = System::checked(
            ["1", "2"].map(|q| (q.to_string(), Support::plus_minus())),
            [
                pm_block("a", &["1", "2"], vec![(vec![0, 0], int(1))]),
                pm_block("b", &["1"], vec![(vec![1], int(1))]),
            ],
        )
        .unwrap();
        assert_eq!(check_cfd(&sys), Err(CfdError::NotScc));
        assert_eq!(construct_ic_coupling(&sys, "a"), Err(CfdError::NotScc));
        assert!(check_gcfd(&sys).unwrap().holds);
    }

    #[test]
    fn null_conditioning_event_uses_first_value() {
        let b = pm_block("x", &["1", "2"], vec![(vec![0, 0], int(1))]);
        assert_eq!(conditional(&b, &[0], &[1], &[1]), vec![(vec![0], int(1))]);
        assert_eq!(conditional(&b, &[0], &[1], &[0]), vec![(vec![0], int(1))]);
    }

    #[test]
    fn same_contents_different_label_is_a_full_counterfactual_context() {
        let sys = System::checked(
            ["1", "2"].map(|q| (q.to_string(), Support::plus_minus())),
            [anti("a", "1", "2"), anti("b", "1", "2")],
        )
        .unwrap();
        let sub = fcf_subsystem(&sys, "a").unwrap().system;
        assert_eq!(sub, sys);
        assert!(check_cfd(&sys).unwrap().holds);
    }
}
