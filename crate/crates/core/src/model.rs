//! Systems of random variables: contents, contexts, per-context joint tables.
//!
//! A value is stored as an index into the support of its content. Supports
//! carry symbolic labels and, optionally, an exact numeric embedding used by
//! [`expectation`] and [`correlation`].

use crate::rational::{self, Rational};
use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub type ContentId = String;
pub type ContextId = String;

/// A joint probability table keyed by value tuples. Absent keys have probability 0.
pub type Table = BTreeMap<Vec<usize>, Rational>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("content `{content}` is not measured in context `{context}`")]
    UnknownContent { context: String, content: String },
    #[error("content `{0}` listed twice in a marginal request")]
    RepeatedContent(String),
    #[error("unknown context `{0}`")]
    UnknownContext(String),
    #[error("context `{0}` defined twice")]
    DuplicateContext(String),
    #[error("content `{0}` has no numeric embedding")]
    MissingEmbedding(String),
    #[error("expectation needs a single-content marginal, got {0} contents")]
    NotSingleContent(usize),
    #[error("marginals are over different contents or supports")]
    MismatchedSupports,
    #[error("system is invalid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

/// The finite set of values a content can take.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Support {
    labels: Vec<String>,
    embedding: Option<Vec<Rational>>,
}

impl Support {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Self {
        Self {
            labels: labels.into_iter().map(Into::into).collect(),
            embedding: None,
        }
    }

    pub fn with_embedding(mut self, embedding: Vec<Rational>) -> Self {
        self.embedding = Some(embedding);
        self
    }

    /// The `+1`/`-1` support with its natural embedding.
    pub fn plus_minus() -> Self {
        Self::new(["+1", "-1"]).with_embedding(vec![rational::int(1), rational::int(-1)])
    }

    /// Labels `0..n` embedded as the integers `0..n`.
    pub fn integers(n: usize) -> Self {
        Self::new((0..n).map(|i| i.to_string()))
            .with_embedding((0..n).map(|i| rational::int(i as i64)).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn embedding(&self) -> Option<&[Rational]> {
        self.embedding.as_deref()
    }

    pub fn embed(&self, index: usize) -> Option<&Rational> {
        self.embedding.as_ref().and_then(|e| e.get(index))
    }

    /// True for the two-point support embedded as `{+1, -1}` in some order.
    pub fn is_plus_minus(&self) -> bool {
        match &self.embedding {
            Some(e) if e.len() == 2 && self.labels.len() == 2 => {
                let a = &e[0];
                let b = &e[1];
                a.abs() == rational::int(1) && b == &-a.clone()
            }
            _ => false,
        }
    }
}

/// The joint distribution of the variables recorded in one context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextBlock {
    pub context: ContextId,
    pub contents: Vec<ContentId>,
    pub supports: Vec<Support>,
    pub table: Table,
}

impl ContextBlock {
    /// Builds a block without checking invariants; zero entries are dropped.
    pub fn new(
        context: impl Into<String>,
        contents: Vec<(ContentId, Support)>,
        table: impl IntoIterator<Item = (Vec<usize>, Rational)>,
    ) -> Self {
        let (contents, supports) = contents.into_iter().unzip();
        Self {
            context: context.into(),
            contents,
            supports,
            table: strip_zeros(table),
        }
    }

    pub fn position(&self, content: &str) -> Option<usize> {
        self.contents.iter().position(|q| q == content)
    }

    pub fn contains(&self, content: &str) -> bool {
        self.position(content).is_some()
    }

    pub fn probability(&self, tuple: &[usize]) -> Rational {
        self.table.get(tuple).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn mass(&self) -> Rational {
        rational::sum(self.table.values())
    }

    pub fn as_marginal(&self) -> Marginal {
        Marginal {
            contents: self.contents.clone(),
            supports: self.supports.clone(),
            table: self.table.clone(),
        }
    }
}

fn strip_zeros(table: impl IntoIterator<Item = (Vec<usize>, Rational)>) -> Table {
    let mut out = Table::new();
    for (k, v) in table {
        *out.entry(k).or_insert_with(Rational::zero) += v;
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Distribution of an ordered subset of a context's contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Marginal {
    pub contents: Vec<ContentId>,
    pub supports: Vec<Support>,
    pub table: Table,
}

impl Marginal {
    /// Single-content marginal from explicit probabilities, one per support value.
    pub fn single(content: impl Into<String>, support: Support, probs: Vec<Rational>) -> Self {
        let table = probs.into_iter().enumerate().map(|(i, p)| (vec![i], p));
        Self {
            contents: vec![content.into()],
            supports: vec![support],
            table: strip_zeros(table),
        }
    }

    pub fn probability(&self, tuple: &[usize]) -> Rational {
        self.table.get(tuple).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn mass(&self) -> Rational {
        rational::sum(self.table.values())
    }

    /// Sums out every content not in `subset`; the result follows `subset`'s order.
    pub fn marginalize(&self, subset: &[&str]) -> Result<Marginal, ModelError> {
        let mut seen = BTreeSet::new();
        let mut positions = Vec::with_capacity(subset.len());
        for q in subset {
            if !seen.insert(*q) {
                return Err(ModelError::RepeatedContent(q.to_string()));
            }
            let pos = self.contents.iter().position(|c| c == q).ok_or_else(|| {
                ModelError::UnknownContent {
                    context: "<marginal>".into(),
                    content: q.to_string(),
                }
            })?;
            positions.push(pos);
        }
        Ok(Marginal {
            contents: positions.iter().map(|&p| self.contents[p].clone()).collect(),
            supports: positions.iter().map(|&p| self.supports[p].clone()).collect(),
            table: project(&self.table, &positions),
        })
    }
}

/// Sums a table onto the given key positions (in that order).
pub fn project(table: &Table, positions: &[usize]) -> Table {
    let mut out = Table::new();
    for (key, p) in table {
        let sub: Vec<usize> = positions.iter().map(|&i| key[i]).collect();
        *out.entry(sub).or_insert_with(Rational::zero) += p;
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Marginal of `block` on the ordered `subset` of its contents.
pub fn marginal(block: &ContextBlock, subset: &[&str]) -> Result<Marginal, ModelError> {
    for q in subset {
        if !block.contains(q) {
            return Err(ModelError::UnknownContent {
                context: block.context.clone(),
                content: q.to_string(),
            });
        }
    }
    block.as_marginal().marginalize(subset)
}

/// `Σ p(v)·embed(v)` for a single-content marginal.
pub fn expectation(m: &Marginal) -> Result<Rational, ModelError> {
    if m.contents.len() != 1 {
        return Err(ModelError::NotSingleContent(m.contents.len()));
    }
    let support = &m.supports[0];
    let mut acc = Rational::zero();
    for (key, p) in &m.table {
        let x = support
            .embed(key[0])
            .ok_or_else(|| ModelError::MissingEmbedding(m.contents[0].clone()))?;
        acc += p * x;
    }
    Ok(acc)
}

/// `Σ p(v,v')·embed(v)·embed(v')` for two contents of one block.
pub fn correlation(block: &ContextBlock, q: &str, q2: &str) -> Result<Rational, ModelError> {
    let m = marginal(block, &[q, q2])?;
    let mut acc = Rational::zero();
    for (key, p) in &m.table {
        let x = m.supports[0]
            .embed(key[0])
            .ok_or_else(|| ModelError::MissingEmbedding(q.to_string()))?;
        let y = m.supports[1]
            .embed(key[1])
            .ok_or_else(|| ModelError::MissingEmbedding(q2.to_string()))?;
        acc += p * x * y;
    }
    Ok(acc)
}

/// Total variation distance `½ Σ |p1(v) − p2(v)|`.
pub fn tv_distance(m1: &Marginal, m2: &Marginal) -> Result<Rational, ModelError> {
    if m1.contents != m2.contents || m1.supports != m2.supports {
        return Err(ModelError::MismatchedSupports);
    }
    let keys: BTreeSet<&Vec<usize>> = m1.table.keys().chain(m2.table.keys()).collect();
    let mut acc = Rational::zero();
    for k in keys {
        acc += (m1.probability(k) - m2.probability(k)).abs();
    }
    Ok(acc / rational::int(2))
}

/// A content-context system `{R_q^c : q ≺ c}`.
///
/// Contexts are kept sorted by identifier; construction does not validate,
/// see [`validate_system`] and [`System::checked`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct System {
    supports: BTreeMap<ContentId, Support>,
    blocks: BTreeMap<ContextId, ContextBlock>,
}

impl System {
    pub fn new(
        supports: impl IntoIterator<Item = (ContentId, Support)>,
        blocks: impl IntoIterator<Item = ContextBlock>,
    ) -> Result<Self, ModelError> {
        let mut map = BTreeMap::new();
        for b in blocks {
            if map.contains_key(&b.context) {
                return Err(ModelError::DuplicateContext(b.context));
            }
            map.insert(b.context.clone(), b);
        }
        Ok(Self {
            supports: supports.into_iter().collect(),
            blocks: map,
        })
    }

    /// [`System::new`] followed by [`validate_system`].
    pub fn checked(
        supports: impl IntoIterator<Item = (ContentId, Support)>,
        blocks: impl IntoIterator<Item = ContextBlock>,
    ) -> Result<Self, ModelError> {
        let sys = Self::new(supports, blocks)?;
        let violations = validate_system(&sys);
        if violations.is_empty() {
            Ok(sys)
        } else {
            Err(ModelError::Invalid(violations))
        }
    }

    pub fn contents(&self) -> impl Iterator<Item = &ContentId> {
        self.supports.keys()
    }

    pub fn contexts(&self) -> impl Iterator<Item = &ContextId> {
        self.blocks.keys()
    }

    pub fn support(&self, content: &str) -> Option<&Support> {
        self.supports.get(content)
    }

    pub fn supports(&self) -> &BTreeMap<ContentId, Support> {
        &self.supports
    }

    pub fn block(&self, context: &str) -> Option<&ContextBlock> {
        self.blocks.get(context)
    }

    pub fn blocks(&self) -> impl Iterator<Item = &ContextBlock> {
        self.blocks.values()
    }

    pub fn num_contents(&self) -> usize {
        self.supports.len()
    }

    pub fn num_contexts(&self) -> usize {
        self.blocks.len()
    }

    /// Contexts that measure `content`, in sorted order.
    pub fn contexts_of(&self, content: &str) -> Vec<&ContextId> {
        self.blocks
            .values()
            .filter(|b| b.contains(content))
            .map(|b| &b.context)
            .collect()
    }

    /// Every variable `(q, c)`, contexts in sorted order and contents in block order.
    pub fn variables(&self) -> Vec<(ContentId, ContextId)> {
        self.blocks
            .values()
            .flat_map(|b| b.contents.iter().map(|q| (q.clone(), b.context.clone())))
            .collect()
    }
}

/// One failed invariant of a [`System`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub context: Option<ContextId>,
    pub content: Option<ContentId>,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    MassNotOne(Rational),
    NegativeProbability(Vec<usize>),
    TupleArity(Vec<usize>),
    ValueOutOfRange(Vec<usize>),
    DuplicateContent,
    EmptyContext,
    UndeclaredContent,
    SupportMismatch,
    ContentNeverMeasured,
    SupportTooSmall,
    DuplicateLabel,
    EmbeddingLength,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = &self.context {
            write!(f, "context `{c}`: ")?;
        }
        if let Some(q) = &self.content {
            write!(f, "content `{q}`: ")?;
        }
        match &self.kind {
            ViolationKind::MassNotOne(m) => write!(f, "mass ≠ 1 (total {})", rational::Display(m)),
            ViolationKind::NegativeProbability(t) => write!(f, "negative probability at {t:?}"),
            ViolationKind::TupleArity(t) => write!(f, "tuple {t:?} has the wrong length"),
            ViolationKind::ValueOutOfRange(t) => write!(f, "tuple {t:?} has a value outside the support"),
            ViolationKind::DuplicateContent => write!(f, "duplicate content"),
            ViolationKind::EmptyContext => write!(f, "context has no contents"),
            ViolationKind::UndeclaredContent => write!(f, "content is not declared by the system"),
            ViolationKind::SupportMismatch => write!(f, "support differs from the declared support"),
            ViolationKind::ContentNeverMeasured => write!(f, "content appears in no context"),
            ViolationKind::SupportTooSmall => write!(f, "support has fewer than 2 values"),
            ViolationKind::DuplicateLabel => write!(f, "support repeats a value label"),
            ViolationKind::EmbeddingLength => write!(f, "numeric embedding does not cover the support"),
        }
    }
}

/// Lists every violated invariant; empty iff the system is valid.
pub fn validate_system(sys: &System) -> Vec<Violation> {
    let mut out = Vec::new();
    let v = |context: Option<&str>, content: Option<&str>, kind| Violation {
        context: context.map(str::to_string),
        content: content.map(str::to_string),
        kind,
    };
    for (q, support) in &sys.supports {
        if support.len() < 2 {
            out.push(v(None, Some(q), ViolationKind::SupportTooSmall));
        }
        let distinct: BTreeSet<&String> = support.labels.iter().collect();
        if distinct.len() != support.len() {
            out.push(v(None, Some(q), ViolationKind::DuplicateLabel));
        }
        if let Some(e) = &support.embedding {
            if e.len() != support.len() {
                out.push(v(None, Some(q), ViolationKind::EmbeddingLength));
            }
        }
        if !sys.blocks.values().any(|b| b.contains(q)) {
            out.push(v(None, Some(q), ViolationKind::ContentNeverMeasured));
        }
    }
    for (c, block) in &sys.blocks {
        let c = Some(c.as_str());
        if block.contents.is_empty() {
            out.push(v(c, None, ViolationKind::EmptyContext));
        }
        let mut seen = BTreeSet::new();
        for (q, support) in block.contents.iter().zip(&block.supports) {
            if !seen.insert(q) {
                out.push(v(c, Some(q), ViolationKind::DuplicateContent));
            }
            match sys.supports.get(q) {
                None => out.push(v(c, Some(q), ViolationKind::UndeclaredContent)),
                Some(s) if s != support => out.push(v(c, Some(q), ViolationKind::SupportMismatch)),
                Some(_) => {}
            }
        }
        for (key, p) in &block.table {
            if key.len() != block.contents.len() {
                out.push(v(c, None, ViolationKind::TupleArity(key.clone())));
            } else if key.iter().zip(&block.supports).any(|(&i, s)| i >= s.len()) {
                out.push(v(c, None, ViolationKind::ValueOutOfRange(key.clone())));
            }
            if p.is_negative() {
                out.push(v(c, None, ViolationKind::NegativeProbability(key.clone())));
            }
        }
        let mass = block.mass();
        if mass != rational::int(1) {
            out.push(v(c, None, ViolationKind::MassNotOne(mass)));
        }
    }
    out
}

/// A variable of a coupling: a bare content (reduced coupling) or a content-context pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variable {
    Content(ContentId),
    Contextual { content: ContentId, context: ContextId },
}

impl Variable {
    pub fn content(&self) -> &str {
        match self {
            Variable::Content(q) => q,
            Variable::Contextual { content, .. } => content,
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variable::Content(q) => write!(f, "S[{q}]"),
            Variable::Contextual { content, context } => write!(f, "S[{content}@{context}]"),
        }
    }
}

/// A single joint distribution over an indexed set of variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coupling {
    pub variables: Vec<Variable>,
    pub supports: Vec<Support>,
    pub table: Table,
}

impl Coupling {
    pub fn new(
        variables: Vec<(Variable, Support)>,
        table: impl IntoIterator<Item = (Vec<usize>, Rational)>,
    ) -> Self {
        let (variables, supports) = variables.into_iter().unzip();
        Self {
            variables,
            supports,
            table: strip_zeros(table),
        }
    }

    pub fn index_of(&self, var: &Variable) -> Option<usize> {
        self.variables.iter().position(|v| v == var)
    }

    pub fn mass(&self) -> Rational {
        rational::sum(self.table.values())
    }

    /// Table of the listed variables, in the listed order.
    pub fn marginal_table(&self, vars: &[Variable]) -> Option<Table> {
        let positions: Option<Vec<usize>> = vars.iter().map(|v| self.index_of(v)).collect();
        Some(project(&self.table, &positions?))
    }

    /// `P(a = b)` for two variables sharing a support.
    pub fn coincidence(&self, a: &Variable, b: &Variable) -> Option<Rational> {
        let (i, j) = (self.index_of(a)?, self.index_of(b)?);
        Some(rational::sum(
            self.table.iter().filter(|(k, _)| k[i] == k[j]).map(|(_, p)| p),
        ))
    }

    /// Nonnegative entries summing to exactly one.
    pub fn is_distribution(&self) -> bool {
        self.table.values().all(|p| !p.is_negative()) && self.mass() == rational::int(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn anti_block(c: &str, q1: &str, q2: &str) -> ContextBlock {
        ContextBlock::new(
            c,
            vec![(q1.into(), Support::plus_minus()), (q2.into(), Support::plus_minus())],
            [(vec![0, 1], rat(1, 2)), (vec![1, 0], rat(1, 2))],
        )
    }

    fn magic() -> System {
        let s = Support::plus_minus();
        System::new(
            ["1", "2", "3"].map(|q| (q.to_string(), s.clone())),
            [anti_block("1", "1", "2"), anti_block("2", "2", "3"), anti_block("3", "1", "3")],
        )
        .unwrap()
    }

    #[test]
    fn magic_box_is_valid() {
        assert!(validate_system(&magic()).is_empty());
    }

    #[test]
    fn short_mass_is_reported() {
        let b = ContextBlock::new(
            "1",
            vec![("1".into(), Support::plus_minus())],
            [(vec![0], rat(1, 2)), (vec![1], rat(2, 5))],
        );
        let sys = System::new([("1".to_string(), Support::plus_minus())], [b]).unwrap();
        let v = validate_system(&sys);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::MassNotOne(rat(9, 10)));
        assert!(v[0].to_string().contains("mass ≠ 1"));
    }

    #[test]
    fn duplicate_content_is_reported() {
        let b = ContextBlock::new(
            "1",
            vec![("1".into(), Support::plus_minus()), ("1".into(), Support::plus_minus())],
            [(vec![0, 0], int(1))],
        );
        let sys = System::new([("1".to_string(), Support::plus_minus())], [b]).unwrap();
        let v = validate_system(&sys);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::DuplicateContent);
        assert_eq!(v[0].context.as_deref(), Some("1"));
    }

    #[test]
    fn structural_violations() {
        let b = ContextBlock::new(
            "1",
            vec![("1".into(), Support::new(["a", "b", "c"]))],
            [(vec![0, 1], rat(1, 2)), (vec![7], rat(1, 2))],
        );
        let sys = System::new(
            [
                ("1".to_string(), Support::plus_minus()),
                ("2".to_string(), Support::new(["x"])),
            ],
            [b, ContextBlock::new("2", vec![], [])],
        )
        .unwrap();
        let kinds: Vec<_> = validate_system(&sys).into_iter().map(|v| v.kind).collect();
        assert!(kinds.contains(&ViolationKind::SupportTooSmall));
        assert!(kinds.contains(&ViolationKind::ContentNeverMeasured));
        assert!(kinds.contains(&ViolationKind::SupportMismatch));
        assert!(kinds.contains(&ViolationKind::TupleArity(vec![0, 1])));
        assert!(kinds.contains(&ViolationKind::ValueOutOfRange(vec![7])));
        assert!(kinds.contains(&ViolationKind::EmptyContext));
    }

    #[test]
    fn marginals_of_magic_box() {
        let sys = magic();
        let b = sys.block("1").unwrap();
        let half = Marginal::single("1", Support::plus_minus(), vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(marginal(b, &["1"]).unwrap(), half);
        let m2 = marginal(b, &["2"]).unwrap();
        assert_eq!(m2.table, half.table);
        assert_eq!(marginal(b, &["1", "2"]).unwrap(), b.as_marginal());
        assert!(matches!(
            marginal(b, &["3"]),
            Err(ModelError::UnknownContent { .. })
        ));
    }

    #[test]
    fn reordered_marginal_permutes_keys() {
        let b = ContextBlock::new(
            "c",
            vec![("a".into(), Support::plus_minus()), ("b".into(), Support::plus_minus())],
            [(vec![0, 0], rat(1, 4)), (vec![0, 1], rat(3, 4))],
        );
        let m = marginal(&b, &["b", "a"]).unwrap();
        assert_eq!(m.probability(&[1, 0]), rat(3, 4));
        assert_eq!(m.probability(&[0, 1]), rat(0, 1));
    }

    #[test]
    fn expectations_and_correlations() {
        let sys = magic();
        let b = sys.block("1").unwrap();
        assert_eq!(expectation(&marginal(b, &["1"]).unwrap()).unwrap(), int(0));
        assert_eq!(correlation(b, "1", "2").unwrap(), int(-1));
        let det = ContextBlock::new(
            "d",
            vec![("1".into(), Support::plus_minus()), ("2".into(), Support::plus_minus())],
            [(vec![0, 0], int(1))],
        );
        assert_eq!(correlation(&det, "1", "2").unwrap(), int(1));
        let bare = Marginal::single("x", Support::new(["a", "b"]), vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(
            expectation(&bare),
            Err(ModelError::MissingEmbedding("x".into()))
        );
    }

    #[test]
    fn tv_examples() {
        let pm = Support::plus_minus();
        let up = Marginal::single("q", pm.clone(), vec![int(1), int(0)]);
        let down = Marginal::single("q", pm.clone(), vec![int(0), int(1)]);
        assert_eq!(tv_distance(&up, &up).unwrap(), int(0));
        assert_eq!(tv_distance(&up, &down).unwrap(), int(1));
        let a = Marginal::single("q", pm.clone(), vec![rat(3, 4), rat(1, 4)]);
        let b = Marginal::single("q", pm.clone(), vec![rat(1, 4), rat(3, 4)]);
        assert_eq!(tv_distance(&a, &b).unwrap(), rat(1, 2));
        let other = Marginal::single("q", Support::integers(2), vec![int(1), int(0)]);
        assert_eq!(tv_distance(&up, &other), Err(ModelError::MismatchedSupports));
    }

    #[test]
    fn duplicate_context_rejected() {
        let err = System::new(
            [("1".to_string(), Support::plus_minus())],
            [anti_block("1", "1", "2"), anti_block("1", "1", "2")],
        );
        assert_eq!(err, Err(ModelError::DuplicateContext("1".into())));
    }
}
