//! Exact bijection between propositions and arbitrary-precision naturals.
//!
//! For a fixed number of internal nodes `n` and atom bound `p` there are
//! `C_n · 3^n · (p+2)^(n+1)` propositions (`C_n` the n-th Catalan number:
//! full binary tree shapes; `3^n` connective choices; `(p+2)^(n+1)` leaf
//! choices). A proposition's id is `3^n (p+2)^(n+1) · shape_number +
//! assignment_number`, where `shape_number` ranks the tree skeleton among all
//! shapes with `n` internal nodes (left-subtree size ascending) and
//! `assignment_number` reads the node labels as mixed-radix digits in inorder
//! (leaves base `p+2`, connectives base 3, left subtree most significant).
//!
//! Ids at interesting sizes (`n = 16`, `p = 5` gives ≈ 3.5·10^29 cases)
//! exceed machine words, so all id arithmetic is `BigUint`.

use crate::prop::Proposition;
use crate::rng;
use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::RangeInclusive;
use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Fixed enumeration parameters: internal-node count and atom bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CodecParams {
    pub n: usize,
    pub p: u32,
}

impl CodecParams {
    pub fn new(n: usize, p: u32) -> Self {
        assert!(p >= 1, "atom bound p must be at least 1");
        CodecParams { n, p }
    }
}

/// Rank of a proposition under its `CodecParams`; always below
/// `count_propositions`. Serializes as a decimal string.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PropositionId(pub BigUint);

impl fmt::Display for PropositionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for PropositionId {
    fn from(v: u64) -> Self {
        PropositionId(BigUint::from(v))
    }
}

impl core::str::FromStr for PropositionId {
    type Err = num_bigint::ParseBigIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(PropositionId(s.parse()?))
    }
}

/// Full-binary-tree skeleton without node labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeShape {
    children: Option<Box<(TreeShape, TreeShape)>>,
}

impl TreeShape {
    pub fn leaf() -> Self {
        TreeShape { children: None }
    }

    pub fn node(left: TreeShape, right: TreeShape) -> Self {
        TreeShape {
            children: Some(Box::new((left, right))),
        }
    }

    pub fn of(prop: &Proposition) -> Self {
        match prop.children() {
            None => TreeShape::leaf(),
            Some((l, r)) => TreeShape::node(TreeShape::of(l), TreeShape::of(r)),
        }
    }

    pub fn children(&self) -> Option<(&TreeShape, &TreeShape)> {
        self.children.as_ref().map(|b| (&b.0, &b.1))
    }

    pub fn internal_nodes(&self) -> usize {
        match self.children() {
            None => 0,
            Some((l, r)) => 1 + l.internal_nodes() + r.internal_nodes(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodecError {
    NodeCountMismatch { expected: usize, actual: usize },
    AtomOutOfRange { index: u32, bound: u32 },
    IdOutOfRange { id: String },
    NodeCountOutsideRange { actual: usize },
}

impl fmt::Display for CodecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodecError::NodeCountMismatch { expected, actual } => write!(
                f,
                "proposition has {actual} internal nodes, codec expects {expected}"
            ),
            CodecError::AtomOutOfRange { index, bound } => {
                write!(f, "atom p{index} exceeds the bound p{bound}")
            }
            CodecError::IdOutOfRange { id } => write!(f, "id {id} is out of range"),
            CodecError::NodeCountOutsideRange { actual } => {
                write!(f, "internal-node count {actual} outside the merged range")
            }
        }
    }
}

impl core::error::Error for CodecError {}

/// Memoized Catalan numbers `C_0..=C_max`, computed by the recursion
/// `C_n = Σ_{i=1..n} C_{i-1} C_{n-i}`. Immutable once built, so a table can
/// be shared freely across threads.
#[derive(Clone, Debug)]
pub struct CatalanTable {
    values: Vec<BigUint>,
}

impl CatalanTable {
    pub fn up_to(max: usize) -> Self {
        let mut values: Vec<BigUint> = Vec::with_capacity(max + 1);
        values.push(BigUint::one());
        for n in 1..=max {
            let mut sum = BigUint::zero();
            for i in 1..=n {
                sum += &values[i - 1] * &values[n - i];
            }
            values.push(sum);
        }
        CatalanTable { values }
    }

    pub fn get(&self, k: usize) -> &BigUint {
        &self.values[k]
    }
}

/// The k-th Catalan number.
pub fn catalan(k: usize) -> BigUint {
    CatalanTable::up_to(k).get(k).clone()
}

/// Digit value of a node's label: `∧`/`T` → 0, `∨`/`F` → 1, `→` → 2,
/// `P_i` → i+1. Only the root label of `prop` is inspected.
pub fn node_number(prop: &Proposition) -> u32 {
    prop.label_rank()
}

/// Rank of `shape` among all full binary trees with the same internal-node
/// count: shapes with a smaller left subtree rank first, then recursively by
/// left and right subtree shape. A single node ranks 0.
pub fn shape_number(shape: &TreeShape) -> BigUint {
    let table = CatalanTable::up_to(shape.internal_nodes());
    shape_number_with(shape, &table)
}

fn shape_number_with(shape: &TreeShape, table: &CatalanTable) -> BigUint {
    let Some((l, r)) = shape.children() else {
        return BigUint::zero();
    };
    let nl = l.internal_nodes();
    let nr = r.internal_nodes();
    let n = nl + nr + 1;
    let mut rank = BigUint::zero();
    for i in 1..=nl {
        rank += table.get(i - 1) * table.get(n - i);
    }
    rank += table.get(nr) * shape_number_with(l, table);
    rank + shape_number_with(r, table)
}

/// Mixed-radix label value of `prop` (inorder digits, left subtree most
/// significant). Fails on atoms above `params.p`.
pub fn assignment_number(prop: &Proposition, params: &CodecParams) -> Result<BigUint, CodecError> {
    if let Proposition::Atom(i) = prop {
        if *i > params.p {
            return Err(CodecError::AtomOutOfRange {
                index: *i,
                bound: params.p,
            });
        }
    }
    let digit = BigUint::from(node_number(prop));
    let Some((l, r)) = prop.children() else {
        return Ok(digit);
    };
    let ar = assignment_capacity(r.internal_nodes(), params.p);
    let left = assignment_number(l, params)?;
    let right = assignment_number(r, params)?;
    Ok(BigUint::from(3u32) * &ar * left + ar * digit + right)
}

/// `3^n (p+2)^(n+1)`: number of label assignments of a shape with `n`
/// internal nodes.
fn assignment_capacity(n: usize, p: u32) -> BigUint {
    BigUint::from(3u32).pow(n as u32) * BigUint::from(p + 2).pow(n as u32 + 1)
}

/// `C_n · 3^n · (p+2)^(n+1)`: number of propositions under `params`.
pub fn count_propositions(params: &CodecParams) -> BigUint {
    catalan(params.n) * assignment_capacity(params.n, params.p)
}

/// Encoder/decoder for one `(n, p)` block, holding the Catalan table and the
/// derived capacities. Immutable after construction; share by reference.
#[derive(Clone, Debug)]
pub struct Codec {
    params: CodecParams,
    table: CatalanTable,
    assignment_capacity: BigUint,
    count: BigUint,
}

impl Codec {
    pub fn new(params: CodecParams) -> Self {
        let table = CatalanTable::up_to(params.n);
        let assignment_capacity = assignment_capacity(params.n, params.p);
        let count = table.get(params.n) * &assignment_capacity;
        Codec {
            params,
            table,
            assignment_capacity,
            count,
        }
    }

    pub fn params(&self) -> CodecParams {
        self.params
    }

    /// Total number of propositions in this block.
    pub fn count(&self) -> &BigUint {
        &self.count
    }

    /// Rank of `prop` within the block. The proposition must have exactly
    /// `params.n` internal nodes and atoms within bound.
    pub fn encode(&self, prop: &Proposition) -> Result<PropositionId, CodecError> {
        let actual = prop.internal_nodes();
        if actual != self.params.n {
            return Err(CodecError::NodeCountMismatch {
                expected: self.params.n,
                actual,
            });
        }
        let shape = shape_number_with(&TreeShape::of(prop), &self.table);
        let assignment = assignment_number(prop, &self.params)?;
        Ok(PropositionId(
            shape * &self.assignment_capacity + assignment,
        ))
    }

    /// The unique proposition with `encode(result) == id`.
    pub fn decode(&self, id: &PropositionId) -> Result<Proposition, CodecError> {
        if id.0 >= self.count {
            return Err(CodecError::IdOutOfRange {
                id: alloc::format!("{}", id.0),
            });
        }
        let shape_rank = &id.0 / &self.assignment_capacity;
        let assignment = &id.0 % &self.assignment_capacity;
        let shape = self.tree_shape(&shape_rank, self.params.n);
        Ok(self.tree_assignment(&shape, &assignment))
    }

    /// Inverse of `shape_number`: the shape with rank `rank` among all shapes
    /// with `n` internal nodes. `n` is small (≤ ~32), so the left-subtree
    /// size is found by a linear scan over the cached Catalan products.
    fn tree_shape(&self, rank: &BigUint, n: usize) -> TreeShape {
        if n == 0 {
            debug_assert!(rank.is_zero());
            return TreeShape::leaf();
        }
        let mut nl = 0;
        let mut prefix = BigUint::zero();
        // Largest nl whose prefix sum still fits under rank.
        loop {
            if nl + 1 > n - 1 {
                break;
            }
            let next = &prefix + self.table.get(nl) * self.table.get(n - 1 - nl);
            if &next <= rank {
                prefix = next;
                nl += 1;
            } else {
                break;
            }
        }
        let nr = n - nl - 1;
        let remaining = rank - prefix;
        let cat_nr = self.table.get(nr);
        let left_rank = &remaining / cat_nr;
        let right_rank = &remaining % cat_nr;
        TreeShape::node(
            self.tree_shape(&left_rank, nl),
            self.tree_shape(&right_rank, nr),
        )
    }

    /// Inverse of `assignment_number` over a fixed shape.
    fn tree_assignment(&self, shape: &TreeShape, value: &BigUint) -> Proposition {
        match shape.children() {
            None => {
                let digit = u32::try_from(value).expect("leaf digit fits in u32");
                match digit {
                    0 => Proposition::Top,
                    1 => Proposition::Bot,
                    i => Proposition::Atom(i - 1),
                }
            }
            Some((l, r)) => {
                let ar = assignment_capacity(r.internal_nodes(), self.params.p);
                let right_value = value % &ar;
                let rest = value / &ar;
                let root_digit = u32::try_from(&rest % BigUint::from(3u32)).unwrap();
                let left_value = rest / BigUint::from(3u32);
                let left = self.tree_assignment(l, &left_value);
                let right = self.tree_assignment(r, &right_value);
                match root_digit {
                    0 => Proposition::and(left, right),
                    1 => Proposition::or(left, right),
                    _ => Proposition::imp(left, right),
                }
            }
        }
    }

    /// `count` ids drawn independently and uniformly from the block;
    /// deterministic for a fixed seed.
    pub fn sample_ids(&self, seed: u64, count: usize) -> Vec<PropositionId> {
        let mut rng = rng::chacha(seed);
        (0..count)
            .map(|_| PropositionId(rng::uniform_biguint(&mut rng, &self.count)))
            .collect()
    }

    /// Decoded uniform sample; every draw has exactly `params.n` internal
    /// nodes.
    pub fn sample_uniform(&self, seed: u64, count: usize) -> Vec<Proposition> {
        self.sample_ids(seed, count)
            .iter()
            .map(|id| self.decode(id).expect("sampled id is in range"))
            .collect()
    }
}

/// Convenience wrappers over a freshly built [`Codec`].
pub fn encode(prop: &Proposition, params: &CodecParams) -> Result<PropositionId, CodecError> {
    Codec::new(*params).encode(prop)
}

pub fn decode(id: &PropositionId, params: &CodecParams) -> Result<Proposition, CodecError> {
    Codec::new(*params).decode(id)
}

pub fn sample_uniform(params: &CodecParams, seed: u64, count: usize) -> Vec<Proposition> {
    Codec::new(*params).sample_uniform(seed, count)
}

/// Bijection over the union of blocks `n = n_range.start()..=n_range.end()`
/// at a fixed `p`: block ids are concatenated in ascending `n`, offset by the
/// cumulative block counts.
pub fn encode_merged(
    prop: &Proposition,
    n_range: RangeInclusive<usize>,
    p: u32,
) -> Result<BigUint, CodecError> {
    let n = prop.internal_nodes();
    if !n_range.contains(&n) {
        return Err(CodecError::NodeCountOutsideRange { actual: n });
    }
    let mut offset = BigUint::zero();
    for m in *n_range.start()..n {
        offset += count_propositions(&CodecParams::new(m, p));
    }
    let id = encode(prop, &CodecParams::new(n, p))?;
    Ok(offset + id.0)
}

pub fn decode_merged(
    id: &BigUint,
    n_range: RangeInclusive<usize>,
    p: u32,
) -> Result<Proposition, CodecError> {
    let mut rest = id.clone();
    for n in n_range {
        let params = CodecParams::new(n, p);
        let count = count_propositions(&params);
        if rest < count {
            return decode(&PropositionId(rest), &params);
        }
        rest -= count;
    }
    Err(CodecError::IdOutOfRange {
        id: alloc::format!("{id}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn id(v: u64) -> PropositionId {
        PropositionId::from(v)
    }

    fn p(text: &str) -> Proposition {
        Proposition::parse(text).unwrap()
    }

    /// Independent Catalan oracle: C_n = (2n choose n) / (n+1) over u128.
    fn catalan_binomial(n: u128) -> u128 {
        let mut binom: u128 = 1;
        for k in 1..=n {
            binom = binom * (n + k) / k;
        }
        binom / (n + 1)
    }

    #[test]
    fn catalan_values() {
        let expected: Vec<u64> = alloc::vec![1, 1, 2, 5, 14];
        for (k, want) in expected.iter().enumerate() {
            assert_eq!(catalan(k), BigUint::from(*want));
        }
        assert_eq!(catalan(10), BigUint::from(16796u64));
        assert_eq!(catalan(16), BigUint::from(35_357_670u64));
        for k in 0..=16 {
            assert_eq!(catalan(k), BigUint::from(catalan_binomial(k as u128)));
        }
    }

    #[test]
    fn node_numbers() {
        assert_eq!(node_number(&p("True ∧ True")), 0);
        assert_eq!(node_number(&p("True → True")), 2);
        assert_eq!(node_number(&Proposition::Atom(3)), 4);
        assert_eq!(node_number(&Proposition::Top), 0);
        assert_eq!(node_number(&Proposition::Bot), 1);
        assert_eq!(node_number(&p("True ∨ True")), 1);
    }

    #[test]
    fn shape_ranks() {
        assert_eq!(shape_number(&TreeShape::leaf()), BigUint::zero());
        assert_eq!(shape_number(&TreeShape::of(&p("True ∧ True"))), BigUint::zero());
        // The two shapes with two internal nodes: right-heavy ranks 0.
        let right_heavy = TreeShape::of(&p("True ∧ (True ∧ True)"));
        let left_heavy = TreeShape::of(&p("(True ∧ True) ∧ True"));
        assert_eq!(shape_number(&right_heavy), BigUint::zero());
        assert_eq!(shape_number(&left_heavy), BigUint::one());
    }

    #[test]
    fn assignment_numbers() {
        let params = CodecParams::new(0, 2);
        assert_eq!(
            assignment_number(&Proposition::Top, &params).unwrap(),
            BigUint::zero()
        );
        let params1 = CodecParams::new(1, 2);
        assert_eq!(
            assignment_number(&p("True ∧ True"), &params1).unwrap(),
            BigUint::zero()
        );
        // 3·4·2 + 4·2 + 3 = 35
        assert_eq!(
            assignment_number(&p("p1 → p2"), &params1).unwrap(),
            BigUint::from(35u32)
        );
        assert!(matches!(
            assignment_number(&p("p3"), &params).unwrap_err(),
            CodecError::AtomOutOfRange { index: 3, bound: 2 }
        ));
    }

    #[test]
    fn encode_examples() {
        assert_eq!(
            encode(&Proposition::Top, &CodecParams::new(0, 2)).unwrap(),
            id(0)
        );
        assert_eq!(
            encode(&Proposition::Atom(1), &CodecParams::new(0, 2)).unwrap(),
            id(2)
        );
        assert_eq!(
            encode(&p("True ∧ True"), &CodecParams::new(1, 2)).unwrap(),
            id(0)
        );
        assert!(matches!(
            encode(&p("p1 ∧ p2"), &CodecParams::new(3, 2)).unwrap_err(),
            CodecError::NodeCountMismatch { expected: 3, actual: 1 }
        ));
    }

    #[test]
    fn decode_examples() {
        let params = CodecParams::new(0, 2);
        assert_eq!(decode(&id(0), &params).unwrap(), Proposition::Top);
        assert_eq!(decode(&id(3), &params).unwrap(), Proposition::Atom(2));
        assert!(matches!(
            decode(&id(4), &params).unwrap_err(),
            CodecError::IdOutOfRange { .. }
        ));
    }

    /// Regression ids derived by hand-executing the ranking formulas and
    /// cross-checked with an independent implementation.
    #[test]
    fn reference_ids() {
        // (p1 → (p1 ∨ p2)) at n=2, p=2.
        assert_eq!(
            encode(&p("p1 → p1 ∨ p2"), &CodecParams::new(2, 2)).unwrap(),
            id(415)
        );
        // (((p1 ∨ p2) → False) → ((p1 → False) ∧ (p2 → False))) at n=6, p=2.
        let theorem = p("((p1 ∨ p2) → False) → ((p1 → False) ∧ (p2 → False))");
        let got = encode(&theorem, &CodecParams::new(6, 2)).unwrap();
        assert_eq!(got, id(760_387_005));
        assert_eq!(
            decode(&got, &CodecParams::new(6, 2)).unwrap(),
            theorem
        );
    }

    /// All propositions with exactly `n` internal nodes and atoms ≤ `p`.
    fn enumerate_all(n: usize, p: u32) -> Vec<Proposition> {
        if n == 0 {
            let mut leaves = alloc::vec![Proposition::Top, Proposition::Bot];
            leaves.extend((1..=p).map(Proposition::Atom));
            return leaves;
        }
        let mut out = Vec::new();
        for nl in 0..n {
            for l in enumerate_all(nl, p) {
                for r in enumerate_all(n - 1 - nl, p) {
                    out.push(Proposition::and(l.clone(), r.clone()));
                    out.push(Proposition::or(l.clone(), r.clone()));
                    out.push(Proposition::imp(l.clone(), r.clone()));
                }
            }
        }
        out
    }

    #[test]
    fn counts_match_brute_force_enumeration() {
        assert_eq!(
            count_propositions(&CodecParams::new(0, 2)),
            BigUint::from(4u32)
        );
        assert_eq!(
            count_propositions(&CodecParams::new(1, 2)),
            BigUint::from(48u32)
        );
        assert_eq!(
            count_propositions(&CodecParams::new(2, 2)),
            BigUint::from(1152u32)
        );
        for n in 0..=2 {
            for pb in 1..=3 {
                let params = CodecParams::new(n, pb);
                assert_eq!(
                    count_propositions(&params),
                    BigUint::from(enumerate_all(n, pb).len()),
                    "count mismatch at n={n}, p={pb}"
                );
            }
        }
    }

    #[test]
    fn exhaustive_bijection_small() {
        for n in 0..=2 {
            for pb in 1..=2 {
                let codec = Codec::new(CodecParams::new(n, pb));
                let count = u64::try_from(codec.count()).unwrap();
                for v in 0..count {
                    let prop = codec.decode(&id(v)).unwrap();
                    assert_eq!(prop.internal_nodes(), n);
                    assert_eq!(codec.encode(&prop).unwrap(), id(v));
                }
            }
        }
    }

    #[test]
    fn ids_sort_like_compare() {
        // At fixed (n, p) the id order and the proposition order agree.
        let codec = Codec::new(CodecParams::new(2, 2));
        let all = enumerate_all(2, 2);
        for a in all.iter().take(120) {
            for b in all.iter().take(120) {
                let ia = codec.encode(a).unwrap();
                let ib = codec.encode(b).unwrap();
                assert_eq!(a.compare(b), ia.cmp(&ib), "order mismatch: {a} vs {b}");
            }
        }
    }

    #[test]
    fn merged_encoding() {
        assert_eq!(
            encode_merged(&Proposition::Top, 0..=1, 2).unwrap(),
            BigUint::zero()
        );
        assert_eq!(
            encode_merged(&p("True ∧ True"), 0..=1, 2).unwrap(),
            BigUint::from(4u32)
        );
        // Round-trip over the full merged range (4 + 48 = 52 ids).
        for v in 0..52u64 {
            let prop = decode_merged(&BigUint::from(v), 0..=1, 2).unwrap();
            assert_eq!(encode_merged(&prop, 0..=1, 2).unwrap(), BigUint::from(v));
        }
        assert!(decode_merged(&BigUint::from(52u64), 0..=1, 2).is_err());
        assert!(matches!(
            encode_merged(&p("p1 ∧ p1 ∧ p1"), 0..=1, 2).unwrap_err(),
            CodecError::NodeCountOutsideRange { actual: 2 }
        ));
    }

    #[test]
    fn sampling_is_deterministic_and_in_range() {
        let codec = Codec::new(CodecParams::new(4, 3));
        let a = codec.sample_uniform(99, 50);
        let b = codec.sample_uniform(99, 50);
        assert_eq!(a, b);
        assert!(codec.sample_uniform(99, 0).is_empty());
        for prop in &a {
            assert_eq!(prop.internal_nodes(), 4);
            assert!(codec.encode(prop).unwrap().0 < *codec.count());
        }
    }

    #[test]
    fn sampling_is_uniform_chi_squared() {
        // 48 cells (n=1, p=2), 48,000 draws, expected 1000 per cell.
        // Critical value of chi-squared with 47 degrees of freedom at
        // significance 0.001 is 82.720.
        let codec = Codec::new(CodecParams::new(1, 2));
        let draws = codec.sample_ids(20_240_517, 48_000);
        let mut counts = [0u64; 48];
        for d in &draws {
            counts[usize::try_from(&d.0).unwrap()] += 1;
        }
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let diff = c as f64 - 1000.0;
                diff * diff / 1000.0
            })
            .sum();
        assert!(chi2 < 82.720, "chi-squared statistic too large: {chi2}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn random_bijection_large(seed in any::<u64>()) {
            let codec = Codec::new(CodecParams::new(16, 5));
            for pid in codec.sample_ids(seed, 4) {
                let prop = codec.decode(&pid).unwrap();
                prop_assert_eq!(prop.internal_nodes(), 16);
                prop_assert_eq!(codec.encode(&prop).unwrap(), pid);
            }
        }
    }
}
