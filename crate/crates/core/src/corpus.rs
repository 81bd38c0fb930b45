//! Fixture systems and seeded random-system generators.

use crate::model::{ContentId, ContextBlock, ContextId, Support, System, Table};
use crate::rational::{rat, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// Three boxes opened two at a time; exactly one of the two holds the gem,
/// each with probability one half.
pub fn magic_box() -> System {
    let anti = |c: &str, a: &str, b: &str| {
        ContextBlock::new(
            c,
            vec![(a.into(), Support::plus_minus()), (b.into(), Support::plus_minus())],
            [(vec![0, 1], rat(1, 2)), (vec![1, 0], rat(1, 2))],
        )
    };
    System::new(
        ["1", "2", "3"].map(|q| (q.to_string(), Support::plus_minus())),
        [anti("1", "1", "2"), anti("2", "2", "3"), anti("3", "1", "3")],
    )
    .expect("distinct contexts")
}

/// Rank-3 cycle with `R_1^1 ≡ +1`, `R_1^3 ≡ −1` and every other variable
/// uniform and independent within its context.
pub fn disturbed_cycle() -> System {
    let pm = Support::plus_minus();
    let cols = |a: &str, b: &str| vec![(a.to_string(), pm.clone()), (b.to_string(), pm.clone())];
    let quarter = [[0, 0], [0, 1], [1, 0], [1, 1]].map(|k| (k.to_vec(), rat(1, 4)));
    System::new(
        ["1", "2", "3"].map(|q| (q.to_string(), pm.clone())),
        [
            ContextBlock::new("1", cols("1", "2"), [(vec![0, 0], rat(1, 2)), (vec![0, 1], rat(1, 2))]),
            ContextBlock::new("2", cols("2", "3"), quarter),
            ContextBlock::new("3", cols("1", "3"), [(vec![1, 0], rat(1, 2)), (vec![1, 1], rat(1, 2))]),
        ],
    )
    .expect("distinct contexts")
}

/// One context measuring two binary contents.
pub fn single_context() -> System {
    let pm = Support::plus_minus();
    System::new(
        ["1", "2"].map(|q| (q.to_string(), pm.clone())),
        [ContextBlock::new(
            "1",
            vec![("1".into(), pm.clone()), ("2".into(), pm.clone())],
            [(vec![0, 0], rat(1, 3)), (vec![0, 1], rat(1, 6)), (vec![1, 1], rat(1, 2))],
        )],
    )
    .expect("one context")
}

/// The generic four-context layout filled by the noncontextual-by-construction regime.
pub fn generic_example(seed: u64) -> System {
    generate(&GeneratorSpec::new(Shape::Generic4x5, Regime::NoncontextualByConstruction, seed))
        .expect("generic shape generates")
}

/// First seed in `seeds` whose disturbed rank-3 cycle is contextual under the
/// multimaximal encoding.
pub fn find_disturbed_contextual_cycle(seeds: std::ops::Range<u64>) -> Option<(u64, System)> {
    use crate::lp::{decide_noncontextual, Encoding};
    seeds.into_iter().find_map(|seed| {
        let sys = generate(&GeneratorSpec::new(Shape::Cyclic(3), Regime::DisturbedRandom, seed)).ok()?;
        let verdict = decide_noncontextual(&sys, Encoding::Cbd).ok()?;
        (!verdict.is_noncontextual()).then_some((seed, sys))
    })
}

/// Which contents each context measures, without distributions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Incidence {
    pub contexts: Vec<(ContextId, Vec<ContentId>)>,
}

impl Incidence {
    pub fn new<C: Into<String>, Q: Into<String>>(
        contexts: impl IntoIterator<Item = (C, Vec<Q>)>,
    ) -> Self {
        Self {
            contexts: contexts
                .into_iter()
                .map(|(c, qs)| (c.into(), qs.into_iter().map(Into::into).collect()))
                .collect(),
        }
    }

    pub fn contents(&self) -> BTreeSet<&ContentId> {
        self.contexts.iter().flat_map(|(_, qs)| qs).collect()
    }

    pub fn contexts_of(&self, content: &str) -> Vec<&ContextId> {
        self.contexts
            .iter()
            .filter(|(_, qs)| qs.iter().any(|q| q == content))
            .map(|(c, _)| c)
            .collect()
    }

    /// First pair of contexts sharing two or more contents.
    pub fn multi_content_overlap(&self) -> Option<(&ContextId, &ContextId)> {
        for (i, (a, qa)) in self.contexts.iter().enumerate() {
            for (b, qb) in &self.contexts[i + 1..] {
                if qa.iter().filter(|q| qb.contains(q)).count() > 1 {
                    return Some((a, b));
                }
            }
        }
        None
    }
}

/// The four-context, five-content layout `c1:{1,2,3} c2:{2,3,4} c3:{1,3} c4:{1,2,3,5}`.
pub fn generic_shape() -> Incidence {
    Incidence::new([
        ("1", vec!["1", "2", "3"]),
        ("2", vec!["2", "3", "4"]),
        ("3", vec!["1", "3"]),
        ("4", vec!["1", "2", "3", "5"]),
    ])
}

/// Rank-`n` cycle: context `i` measures contents `i` and `i+1` (mod `n`).
pub fn cyclic_shape(n: usize) -> Incidence {
    Incidence::new((1..=n).map(|i| {
        let j = i % n + 1;
        let mut pair = [i, j];
        pair.sort_unstable();
        (i.to_string(), pair.iter().map(|q| q.to_string()).collect::<Vec<_>>())
    }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    Cyclic(usize),
    Generic4x5,
    Explicit(Incidence),
}

impl Shape {
    pub fn incidence(&self) -> Incidence {
        match self {
            Shape::Cyclic(n) => cyclic_shape(*n),
            Shape::Generic4x5 => generic_shape(),
            Shape::Explicit(i) => i.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Marginalize one random joint over all contents onto every context.
    NoncontextualByConstruction,
    /// Fix one marginal per content, then draw each block with those marginals.
    SccRandom,
    /// Draw every block independently.
    DisturbedRandom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub shape: Shape,
    pub regime: Regime,
    pub seed: u64,
    pub support_size: usize,
    /// Probabilities are drawn as integers over this grid before normalizing.
    pub denominator: u32,
}

impl GeneratorSpec {
    pub fn new(shape: Shape, regime: Regime, seed: u64) -> Self {
        Self {
            shape,
            regime,
            seed,
            support_size: 2,
            denominator: 360,
        }
    }

    pub fn with_support_size(mut self, n: usize) -> Self {
        self.support_size = n;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenerateError {
    #[error("contexts `{0}` and `{1}` share several contents; independent block sampling cannot keep such a system consistently connected")]
    MultiContentOverlap(ContextId, ContextId),
    #[error("support size must be at least 2")]
    SupportTooSmall,
    #[error("grid denominator must be positive")]
    ZeroDenominator,
    #[error("shape has an empty context or duplicate context identifiers")]
    BadShape,
}

fn support_of(n: usize) -> Support {
    if n == 2 {
        Support::plus_minus()
    } else {
        Support::integers(n)
    }
}

/// Deterministic system generation; identical specs give identical systems.
pub fn generate(spec: &GeneratorSpec) -> Result<System, GenerateError> {
    if spec.support_size < 2 {
        return Err(GenerateError::SupportTooSmall);
    }
    if spec.denominator == 0 {
        return Err(GenerateError::ZeroDenominator);
    }
    let incidence = spec.shape.incidence();
    let ids: BTreeSet<&ContextId> = incidence.contexts.iter().map(|(c, _)| c).collect();
    if ids.len() != incidence.contexts.len() || incidence.contexts.iter().any(|(_, qs)| qs.is_empty()) {
        return Err(GenerateError::BadShape);
    }
    if spec.regime == Regime::SccRandom {
        if let Some((a, b)) = incidence.multi_content_overlap() {
            return Err(GenerateError::MultiContentOverlap(a.clone(), b.clone()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let support = support_of(spec.support_size);
    let contents: Vec<ContentId> = incidence.contents().into_iter().cloned().collect();
    let grid = Grid {
        denominator: spec.denominator,
    };

    let blocks: Vec<ContextBlock> = match spec.regime {
        Regime::NoncontextualByConstruction => {
            let sizes = vec![spec.support_size; contents.len()];
            let joint = grid.random_table(&mut rng, &sizes);
            incidence
                .contexts
                .iter()
                .map(|(c, qs)| {
                    let pos: Vec<usize> = qs
                        .iter()
                        .map(|q| contents.iter().position(|x| x == q).expect("listed"))
                        .collect();
                    let table = crate::model::project(&joint, &pos);
                    ContextBlock::new(c.clone(), qs.iter().map(|q| (q.clone(), support.clone())).collect(), table)
                })
                .collect()
        }
        Regime::SccRandom => {
            let marginals: Vec<Vec<Rational>> = contents
                .iter()
                .map(|_| grid.random_marginal(&mut rng, spec.support_size))
                .collect();
            incidence
                .contexts
                .iter()
                .map(|(c, qs)| {
                    let ms: Vec<&Vec<Rational>> = qs
                        .iter()
                        .map(|q| &marginals[contents.iter().position(|x| x == q).expect("listed")])
                        .collect();
                    let table = grid.block_with_marginals(&mut rng, &ms);
                    ContextBlock::new(c.clone(), qs.iter().map(|q| (q.clone(), support.clone())).collect(), table)
                })
                .collect()
        }
        Regime::DisturbedRandom => incidence
            .contexts
            .iter()
            .map(|(c, qs)| {
                let table = grid.random_table(&mut rng, &vec![spec.support_size; qs.len()]);
                ContextBlock::new(c.clone(), qs.iter().map(|q| (q.clone(), support.clone())).collect(), table)
            })
            .collect(),
    };
    Ok(System::new(contents.into_iter().map(|q| (q, support.clone())), blocks).expect("distinct contexts"))
}

struct Grid {
    denominator: u32,
}

impl Grid {
    fn fraction(&self, k: u32) -> Rational {
        Rational::new(BigInt::from(k), BigInt::from(self.denominator))
    }

    /// Integer weights over the grid, normalized; about a quarter of the cells are zeroed.
    fn random_table(&self, rng: &mut ChaCha8Rng, sizes: &[usize]) -> Table {
        let cells: usize = sizes.iter().product();
        loop {
            let weights: Vec<u32> = (0..cells)
                .map(|_| {
                    if rng.gen_ratio(1, 4) {
                        0
                    } else {
                        rng.gen_range(0..=self.denominator)
                    }
                })
                .collect();
            let total: u64 = weights.iter().map(|&w| u64::from(w)).sum();
            if total == 0 {
                continue;
            }
            let mut table = Table::new();
            for (index, w) in weights.into_iter().enumerate() {
                if w > 0 {
                    table.insert(digits(index, sizes), Rational::new(BigInt::from(w), BigInt::from(total)));
                }
            }
            return table;
        }
    }

    fn random_marginal(&self, rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
        if n == 2 {
            // Uniform marginals are common in the fixtures; favour them.
            let k = if rng.gen_ratio(1, 5) {
                self.denominator / 2
            } else {
                rng.gen_range(0..=self.denominator)
            };
            let p = self.fraction(k);
            return vec![p.clone(), Rational::one() - p];
        }
        let table = self.random_table(rng, &[n]);
        (0..n).map(|v| table.get(&vec![v]).cloned().unwrap_or_else(Rational::zero)).collect()
    }

    /// A joint table whose one-dimensional marginals are `ms`.
    fn block_with_marginals(&self, rng: &mut ChaCha8Rng, ms: &[&Vec<Rational>]) -> Table {
        if ms.len() == 2 && ms[0].len() == 2 && ms[1].len() == 2 {
            // p(+,+) ranges over the Fréchet interval of the two marginals.
            let (a, b) = (&ms[0][0], &ms[1][0]);
            let lo = std::cmp::max(Rational::zero(), a + b - Rational::one());
            let hi = std::cmp::min(a.clone(), b.clone());
            let t = match rng.gen_range(0..5) {
                0 => Rational::zero(),
                1 => Rational::one(),
                _ => self.fraction(rng.gen_range(0..=self.denominator)),
            };
            let pp = &lo + (&hi - &lo) * t;
            return binary_pair_table(a, b, &pp);
        }
        let sizes: Vec<usize> = ms.iter().map(|m| m.len()).collect();
        let lambda = self.fraction(rng.gen_range(0..=self.denominator));
        let mut table = Table::new();
        for (k, p) in product_table(ms) {
            *table.entry(k).or_insert_with(Rational::zero) += (Rational::one() - &lambda) * p;
        }
        let reversed = ms.len() == 2 && rng.gen_bool(0.5);
        for (k, p) in monotone_table(ms, reversed) {
            *table.entry(k).or_insert_with(Rational::zero) += &lambda * p;
        }
        table.retain(|k, p| !p.is_zero() && k.len() == sizes.len());
        table
    }
}

fn digits(mut index: usize, sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for (d, &s) in out.iter_mut().zip(sizes).rev() {
        *d = index % s;
        index /= s;
    }
    out
}

/// Two binary variables with `P(first = +) = a`, `P(second = +) = b`, `P(+,+) = pp`.
pub fn binary_pair_table(a: &Rational, b: &Rational, pp: &Rational) -> Table {
    let one = Rational::one();
    let cells = [
        (vec![0, 0], pp.clone()),
        (vec![0, 1], a - pp),
        (vec![1, 0], b - pp),
        (vec![1, 1], one - a - b + pp),
    ];
    cells.into_iter().filter(|(_, p)| !p.is_zero()).collect()
}

fn product_table(ms: &[&Vec<Rational>]) -> Table {
    let sizes: Vec<usize> = ms.iter().map(|m| m.len()).collect();
    let cells: usize = sizes.iter().product();
    (0..cells)
        .map(|i| {
            let k = digits(i, &sizes);
            let p = k.iter().zip(ms).fold(Rational::one(), |acc, (&v, m)| acc * &m[v]);
            (k, p)
        })
        .filter(|(_, p)| !p.is_zero())
        .collect()
}

/// Quantile coupling: all variables driven by one uniform; with `reverse_second`
/// the second variable runs through its support backwards.
fn monotone_table(ms: &[&Vec<Rational>], reverse_second: bool) -> Table {
    let orders: Vec<Vec<usize>> = ms
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let mut o: Vec<usize> = (0..m.len()).collect();
            if reverse_second && i == 1 {
                o.reverse();
            }
            o
        })
        .collect();
    let mut cuts: BTreeSet<Rational> = BTreeSet::new();
    for (m, order) in ms.iter().zip(&orders) {
        let mut acc = Rational::zero();
        for &v in order {
            acc += &m[v];
            cuts.insert(acc.clone());
        }
    }
    cuts.insert(Rational::zero());
    let cuts: Vec<Rational> = cuts.into_iter().collect();
    let mut table = Table::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        if hi <= lo || hi > &Rational::one() {
            continue;
        }
        let key: Vec<usize> = ms
            .iter()
            .zip(&orders)
            .map(|(m, order)| {
                let mut acc = Rational::zero();
                for &v in order {
                    acc += &m[v];
                    if &acc >= hi {
                        return v;
                    }
                }
                *order.last().expect("nonempty support")
            })
            .collect();
        *table.entry(key).or_insert_with(Rational::zero) += hi - lo;
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consistency::check_scc;
    use crate::model::{marginal, validate_system};
    use crate::rational::int;

    #[test]
    fn generic_shape_incidence() {
        let g = generic_shape();
        assert_eq!(g.contexts_of("3").len(), 4);
        assert_eq!(g.contexts_of("4"), ["2"]);
        assert_eq!(g.contexts_of("5"), ["4"]);
        assert_eq!(g.contents().len(), 5);
        assert!(g.multi_content_overlap().is_some());
    }

    #[test]
    fn magic_box_from_uniform_anticorrelated_pairs() {
        let half = rat(1, 2);
        let table = binary_pair_table(&half, &half, &int(0));
        assert_eq!(table, magic_box().block("1").unwrap().table);
        assert!(validate_system(&magic_box()).is_empty());
    }

    #[test]
    fn generation_is_deterministic() {
        for regime in [Regime::NoncontextualByConstruction, Regime::SccRandom, Regime::DisturbedRandom] {
            let spec = GeneratorSpec::new(Shape::Cyclic(3), regime, 42);
            assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        }
    }

    #[test]
    fn regimes_hold_their_guarantees() {
        for seed in 0..40 {
            for (shape, regime) in [
                (Shape::Generic4x5, Regime::NoncontextualByConstruction),
                (Shape::Cyclic(3), Regime::SccRandom),
                (Shape::Cyclic(4), Regime::SccRandom),
                (Shape::Cyclic(3), Regime::DisturbedRandom),
            ] {
                let sys = generate(&GeneratorSpec::new(shape, regime, seed)).unwrap();
                assert!(validate_system(&sys).is_empty(), "{regime:?} seed {seed}");
                if regime != Regime::DisturbedRandom {
                    assert!(check_scc(&sys).holds, "{regime:?} seed {seed}");
                }
            }
        }
    }

    #[test]
    fn multivalued_scc_blocks_keep_marginals() {
        let shape = Shape::Explicit(Incidence::new([
            ("a", vec!["x", "y", "z"]),
            ("b", vec!["z", "w"]),
        ]));
        for seed in 0..20 {
            let spec = GeneratorSpec::new(shape.clone(), Regime::SccRandom, seed).with_support_size(3);
            let sys = generate(&spec).unwrap();
            assert!(validate_system(&sys).is_empty());
            assert!(check_scc(&sys).holds);
            let za = marginal(sys.block("a").unwrap(), &["z"]).unwrap();
            let zb = marginal(sys.block("b").unwrap(), &["z"]).unwrap();
            assert_eq!(za, zb);
        }
    }

    #[test]
    fn scc_random_refuses_multi_content_overlaps() {
        let spec = GeneratorSpec::new(Shape::Generic4x5, Regime::SccRandom, 0);
        assert!(matches!(generate(&spec), Err(GenerateError::MultiContentOverlap(_, _))));
    }
}
