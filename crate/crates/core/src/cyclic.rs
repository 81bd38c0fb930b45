//! Cyclic systems of rank 3 and their closed-form contextuality criterion.
//!
//! Three contents `q1, q2, q3` are measured pairwise in contexts
//! `c1 = {q1, q2}`, `c2 = {q2, q3}`, `c3 = {q3, q1}`. With `±1` variables the
//! system is contextual exactly when
//!
//! ```text
//! max_odd(±⟨R_q1 R_q2⟩_c1 ± ⟨R_q2 R_q3⟩_c2 ± ⟨R_q3 R_q1⟩_c3)
//!     > 1 + |⟨R_q1⟩_c1 − ⟨R_q1⟩_c3| + |⟨R_q2⟩_c2 − ⟨R_q2⟩_c1| + |⟨R_q3⟩_c3 − ⟨R_q3⟩_c2|
//! ```
//!
//! where `max_odd` ranges over sign patterns with an odd number of minus signs.

use crate::model::{correlation, expectation, marginal, ContentId, ContextId, ModelError, System};
use crate::rational::{int, Rational};
use num_traits::Signed;
use std::collections::BTreeMap;

/// A system recognized as a rank-3 cycle, with the moments the criterion needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cyclic3View {
    /// `q1, q2, q3`
    pub contents: [ContentId; 3],
    /// `ci` measures `qi` and `q(i+1)`
    pub contexts: [ContextId; 3],
    /// `⟨R_qi R_q(i+1)⟩` in context `ci`
    pub correlations: [Rational; 3],
    /// `⟨R_q^c⟩` for the six variables
    pub expectations: BTreeMap<(ContentId, ContextId), Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CyclicError {
    #[error("content `{0}` does not have a binary ±1 support")]
    NonBinary(ContentId),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Either the cyclic view or the reason the incidence structure does not fit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CyclicShape {
    Cyclic3(Box<Cyclic3View>),
    NotCyclic3(String),
}

/// Recognizes the rank-3 cyclic incidence structure up to relabeling.
pub fn as_cyclic3(sys: &System) -> Result<CyclicShape, CyclicError> {
    let not = |why: &str| Ok(CyclicShape::NotCyclic3(why.to_string()));
    if sys.num_contents() != 3 || sys.num_contexts() != 3 {
        return not("needs exactly 3 contents and 3 contexts");
    }
    if sys.blocks().any(|b| b.contents.len() != 2) {
        return not("every context must measure exactly 2 contents");
    }
    if sys.contents().any(|q| sys.contexts_of(q).len() != 2) {
        return not("every content must appear in exactly 2 contexts");
    }
    for q in sys.contents() {
        if !sys.support(q).is_some_and(|s| s.is_plus_minus()) {
            return Err(CyclicError::NonBinary(q.clone()));
        }
    }
    let q1 = sys.contents().next().expect("three contents").clone();
    let c1 = sys.contexts_of(&q1)[0].clone();
    let other = |ctx: &str, q: &str| -> ContentId {
        let b = sys.block(ctx).expect("listed");
        b.contents.iter().find(|x| *x != q).expect("two contents").clone()
    };
    let next_context = |q: &str, ctx: &str| -> ContextId {
        sys.contexts_of(q).into_iter().find(|c| *c != ctx).expect("two contexts").clone()
    };
    let q2 = other(&c1, &q1);
    let c2 = next_context(&q2, &c1);
    let q3 = other(&c2, &q2);
    let c3 = next_context(&q3, &c2);
    if !sys.block(&c3).expect("listed").contains(&q1) {
        return not("contexts do not close a cycle");
    }

    let corr = |c: &str, a: &str, b: &str| correlation(sys.block(c).expect("listed"), a, b);
    let correlations = [corr(&c1, &q1, &q2)?, corr(&c2, &q2, &q3)?, corr(&c3, &q3, &q1)?];
    let mut expectations = BTreeMap::new();
    for b in sys.blocks() {
        for q in &b.contents {
            expectations.insert((q.clone(), b.context.clone()), expectation(&marginal(b, &[q])?)?);
        }
    }
    Ok(CyclicShape::Cyclic3(Box::new(Cyclic3View {
        contents: [q1, q2, q3],
        contexts: [c1, c2, c3],
        correlations,
        expectations,
    })))
}

/// Both sides of the criterion and the verdict (`lhs > rhs`, strictly).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cyclic3Criterion {
    pub lhs: Rational,
    pub rhs: Rational,
    pub contextual: bool,
}

/// The four sign patterns with an odd number of minus signs.
pub const ODD_SIGN_PATTERNS: [[i64; 3]; 4] = [[-1, 1, 1], [1, -1, 1], [1, 1, -1], [-1, -1, -1]];

pub fn cyclic3_contextual(view: &Cyclic3View) -> Cyclic3Criterion {
    let lhs = ODD_SIGN_PATTERNS
        .iter()
        .map(|signs| {
            signs
                .iter()
                .zip(&view.correlations)
                .fold(int(0), |acc, (s, r)| acc + int(*s) * r)
        })
        .max()
        .expect("four patterns");
    let [q1, q2, q3] = &view.contents;
    let [c1, c2, c3] = &view.contexts;
    let e = |q: &ContentId, c: &ContextId| view.expectations[&(q.clone(), c.clone())].clone();
    let rhs = int(1)
        + (e(q1, c1) - e(q1, c3)).abs()
        + (e(q2, c2) - e(q2, c1)).abs()
        + (e(q3, c3) - e(q3, c2)).abs();
    Cyclic3Criterion {
        contextual: lhs > rhs,
        lhs,
        rhs,
    }
}
