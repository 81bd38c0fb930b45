//! Strong consistent connectedness and maximal coincidence probabilities.

use crate::model::{marginal, tv_distance, ContentId, ContextId, Marginal, ModelError, System};
use crate::rational::{self, Rational};
use std::cmp::min;

/// Shared contents on which two contexts disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccViolation {
    pub contents: Vec<ContentId>,
    pub context_a: ContextId,
    pub context_b: ContextId,
    pub tv_distance: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccReport {
    pub holds: bool,
    pub violations: Vec<SccViolation>,
}

/// Compares every pair of overlapping contexts on their full content intersection.
///
/// Equality on the intersection implies equality on each of its subsets, so
/// one comparison per pair is enough.
pub fn check_scc(sys: &System) -> SccReport {
    let blocks: Vec<_> = sys.blocks().collect();
    let mut violations = Vec::new();
    for (i, a) in blocks.iter().enumerate() {
        for b in &blocks[i + 1..] {
            let mut shared: Vec<&str> = a
                .contents
                .iter()
                .filter(|q| b.contains(q))
                .map(String::as_str)
                .collect();
            if shared.is_empty() {
                continue;
            }
            shared.sort_unstable();
            let (ma, mb) = match (marginal(a, &shared), marginal(b, &shared)) {
                (Ok(ma), Ok(mb)) => (ma, mb),
                _ => continue,
            };
            // Mismatched supports make the marginals incomparable; validation reports them.
            if let Ok(tv) = tv_distance(&ma, &mb) {
                if tv != rational::int(0) {
                    violations.push(SccViolation {
                        contents: shared.iter().map(|s| s.to_string()).collect(),
                        context_a: a.context.clone(),
                        context_b: b.context.clone(),
                        tv_distance: tv,
                    });
                }
            }
        }
    }
    SccReport {
        holds: violations.is_empty(),
        violations,
    }
}

/// Largest achievable `P(S = S')` over couplings of two single-content
/// marginals: `Σ_v min(p1(v), p2(v))`, attained by the maximal coupling.
pub fn max_coincidence(m1: &Marginal, m2: &Marginal) -> Result<Rational, ModelError> {
    if m1.contents.len() != 1 || m2.contents.len() != 1 || m1.supports != m2.supports {
        return Err(ModelError::MismatchedSupports);
    }
    Ok((0..m1.supports[0].len())
        .map(|v| min(m1.probability(&[v]), m2.probability(&[v])))
        .fold(rational::int(0), |acc, x| acc + x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ContextBlock, Support};
    use crate::rational::{int, rat};

    fn pm(q: &str, p_plus: Rational) -> Marginal {
        let minus = int(1) - &p_plus;
        Marginal::single(q, Support::plus_minus(), vec![p_plus, minus])
    }

    fn uniform_pair(c: &str, q1: &str, q2: &str) -> ContextBlock {
        ContextBlock::new(
            c,
            vec![(q1.into(), Support::plus_minus()), (q2.into(), Support::plus_minus())],
            [[0, 0], [0, 1], [1, 0], [1, 1]].map(|k| (k.to_vec(), rat(1, 4))),
        )
    }

    fn point_and_uniform(c: &str, point_q: &str, point_v: usize, other: &str) -> ContextBlock {
        ContextBlock::new(
            c,
            vec![(point_q.into(), Support::plus_minus()), (other.into(), Support::plus_minus())],
            [(vec![point_v, 0], rat(1, 2)), (vec![point_v, 1], rat(1, 2))],
        )
    }

    fn supports(n: usize) -> Vec<(String, Support)> {
        (1..=n).map(|q| (q.to_string(), Support::plus_minus())).collect()
    }

    #[test]
    fn disjoint_contexts_are_vacuously_scc() {
        let blocks = (1..=3).map(|i| {
            let q = i.to_string();
            ContextBlock::new(q.clone(), vec![(q, Support::plus_minus())], [(vec![0], int(1))])
        });
        let sys = System::checked(supports(3), blocks).unwrap();
        assert!(check_scc(&sys).holds);
    }

    #[test]
    fn disturbed_cycle_reports_content_one() {
        let sys = System::checked(
            supports(3),
            [
                point_and_uniform("1", "1", 0, "2"),
                uniform_pair("2", "2", "3"),
                point_and_uniform("3", "1", 1, "3"),
            ],
        )
        .unwrap();
        let report = check_scc(&sys);
        assert!(!report.holds);
        assert_eq!(
            report.violations,
            vec![SccViolation {
                contents: vec!["1".into()],
                context_a: "1".into(),
                context_b: "3".into(),
                tv_distance: int(1),
            }]
        );
    }

    #[test]
    fn coincidence_examples() {
        assert_eq!(max_coincidence(&pm("q", rat(1, 2)), &pm("q", rat(1, 2))).unwrap(), int(1));
        assert_eq!(
            max_coincidence(&pm("q", rat(7, 10)), &pm("q", rat(2, 5))).unwrap(),
            rat(7, 10)
        );
        assert_eq!(max_coincidence(&pm("q", int(1)), &pm("q", int(0))).unwrap(), int(0));
        let three = Marginal::single("q", Support::integers(3), vec![int(1), int(0), int(0)]);
        assert!(max_coincidence(&pm("q", int(1)), &three).is_err());
    }
}
