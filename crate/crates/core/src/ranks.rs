//! Rank functions and hyperdeterminant-based rank certificates.
//!
//! Four rank functions share one framework: a tensor's rank is the least
//! number of "simple" tensors summing to it, where simple means
//!
//! * tensor rank: an outer product of d nonzero vectors,
//! * slice rank: a vector in some direction times an order-(d-1) tensor,
//! * partition rank: a product of two tensors over a bipartition of the
//!   coordinates,
//! * odd partition rank: partition rank where the block not containing
//!   coordinate 1 has odd size.
//!
//! Simplicity of a given tensor is decidable by rank-1 tests on matrix
//! flattenings, which also recover the factors. Exact ranks at tiny scale
//! come from iterative-deepening search over canonically normalized simple
//! tensors ([`brute_force_rank`]) or from level-set tables over a whole
//! tensor space ([`rank_table`]). Lower bounds at any scale come from a
//! nonzero hyperdeterminant: full odd partition rank always, and partition
//! rank at least n/(p-1) in characteristic p.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::hyperdet::{hyperdet_dp_budgeted, HyperdetError};
use crate::ring::{RingError, RingSpec, RingValue};
use crate::rng::SplitMix64;
use crate::tensor::{pow_len, IndexIter, Tensor, TensorError};
use crate::Budget;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RankKind {
    TensorRank,
    SliceRank,
    PartitionRank,
    OddPartitionRank,
}

impl fmt::Display for RankKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankKind::TensorRank => write!(f, "rank"),
            RankKind::SliceRank => write!(f, "srank"),
            RankKind::PartitionRank => write!(f, "prank"),
            RankKind::OddPartitionRank => write!(f, "oprank"),
        }
    }
}

impl RankKind {
    pub fn parse(s: &str) -> Option<RankKind> {
        match s {
            "rank" => Some(RankKind::TensorRank),
            "srank" => Some(RankKind::SliceRank),
            "prank" => Some(RankKind::PartitionRank),
            "oprank" => Some(RankKind::OddPartitionRank),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RankError {
    UnsupportedRing { spec: RingSpec, reason: String },
    BudgetExceeded { needed: u64, budget: u64 },
    ShapeMismatch(String),
    OddOrder { d: usize },
    /// A theorem's hypothesis could not be certified for the given input.
    HypothesisNotMet(String),
    Hyperdet(HyperdetError),
    Tensor(TensorError),
    Ring(RingError),
}

impl fmt::Display for RankError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankError::UnsupportedRing { spec, reason } => {
                write!(f, "unsupported ring {}: {}", spec, reason)
            }
            RankError::BudgetExceeded { needed, budget } => {
                write!(f, "budget exceeded: needs about {} units, limit {}", needed, budget)
            }
            RankError::ShapeMismatch(msg) => write!(f, "shape mismatch: {}", msg),
            RankError::OddOrder { d } => {
                write!(f, "identity requires even order, tensor has order {}", d)
            }
            RankError::HypothesisNotMet(msg) => write!(f, "hypothesis not met: {}", msg),
            RankError::Hyperdet(e) => write!(f, "{}", e),
            RankError::Tensor(e) => write!(f, "{}", e),
            RankError::Ring(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for RankError {}

impl From<HyperdetError> for RankError {
    fn from(e: HyperdetError) -> Self {
        match e {
            HyperdetError::BudgetExceeded { needed, budget } => {
                RankError::BudgetExceeded { needed, budget }
            }
            other => RankError::Hyperdet(other),
        }
    }
}

impl From<TensorError> for RankError {
    fn from(e: TensorError) -> Self {
        RankError::Tensor(e)
    }
}

impl From<RingError> for RankError {
    fn from(e: RingError) -> Self {
        RankError::Ring(e)
    }
}

/// A bipartition of `[d]` into the block containing coordinate 1 and its
/// complement, both sorted and nonempty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bipartition {
    block_a: Vec<usize>,
    block_b: Vec<usize>,
}

impl Bipartition {
    pub fn new(d: usize, block_a: Vec<usize>) -> Result<Self, RankError> {
        if !block_a.contains(&1) {
            return Err(RankError::ShapeMismatch("block_a must contain coordinate 1".into()));
        }
        if block_a.windows(2).any(|w| w[0] >= w[1]) {
            return Err(RankError::ShapeMismatch("block_a must be sorted strictly".into()));
        }
        if block_a.iter().any(|&a| a < 1 || a > d) {
            return Err(RankError::ShapeMismatch("block_a out of range".into()));
        }
        let block_b: Vec<usize> = (1..=d).filter(|i| !block_a.contains(i)).collect();
        if block_b.is_empty() {
            return Err(RankError::ShapeMismatch("bipartition blocks must be nonempty".into()));
        }
        Ok(Bipartition { block_a, block_b })
    }

    pub fn block_a(&self) -> &[usize] {
        &self.block_a
    }

    pub fn block_b(&self) -> &[usize] {
        &self.block_b
    }

    /// Whether the block not containing 1 has odd size.
    pub fn is_odd(&self) -> bool {
        self.block_b.len() % 2 == 1
    }
}

/// One simple tensor, in the factored form of its rank kind.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SimpleTerm {
    /// Outer product of d nonzero vectors (tensor rank).
    Vectors { factors: Vec<Tensor> },
    /// `v(i_k) * rest(i_1, ..., ^i_k, ..., i_d)` (slice rank).
    Slice { direction: usize, vector: Tensor, rest: Tensor },
    /// `fa(block_a coords) * fb(block_b coords)` (partition kinds).
    Split { bipartition: Bipartition, factor_a: Tensor, factor_b: Tensor },
}

impl SimpleTerm {
    /// Whether this term is a valid simple tensor for `kind`.
    pub fn is_valid_for(&self, kind: RankKind) -> bool {
        match (self, kind) {
            (SimpleTerm::Vectors { factors }, RankKind::TensorRank) => {
                !factors.is_empty() && factors.iter().all(|v| v.order() == 1 && !v.is_zero())
            }
            (SimpleTerm::Slice { vector, rest, .. }, RankKind::SliceRank) => {
                vector.order() == 1 && !vector.is_zero() && !rest.is_zero()
            }
            (SimpleTerm::Split { bipartition, factor_a, factor_b }, RankKind::PartitionRank) => {
                !factor_a.is_zero()
                    && !factor_b.is_zero()
                    && factor_a.order() == bipartition.block_a.len()
                    && factor_b.order() == bipartition.block_b.len()
            }
            (SimpleTerm::Split { bipartition, .. }, RankKind::OddPartitionRank) => {
                self.is_valid_for(RankKind::PartitionRank) && bipartition.is_odd()
            }
            _ => false,
        }
    }

    /// Reconstructs the order-d tensor this term denotes.
    pub fn expand(&self) -> Result<Tensor, RankError> {
        match self {
            SimpleTerm::Vectors { factors } => {
                let mut it = factors.iter();
                let first = it
                    .next()
                    .ok_or_else(|| RankError::ShapeMismatch("no factors".into()))?;
                let mut acc = first.clone();
                for v in it {
                    acc = acc.outer_product(v)?;
                }
                Ok(acc)
            }
            SimpleTerm::Slice { direction, vector, rest } => {
                let d = rest.order() + 1;
                let n = vector.side();
                let spec = vector.spec();
                if rest.side() != n || rest.spec() != spec {
                    return Err(RankError::ShapeMismatch("slice factors disagree".into()));
                }
                if *direction < 1 || *direction > d {
                    return Err(RankError::ShapeMismatch("slice direction out of range".into()));
                }
                let mut out = Tensor::zeros(d, n, spec);
                for idx in IndexIter::new(d, n) {
                    let v = vector.get(&[idx[*direction - 1]])?;
                    if v.is_zero() {
                        continue;
                    }
                    let sub: Vec<usize> = idx
                        .iter()
                        .enumerate()
                        .filter(|(m, _)| *m != *direction - 1)
                        .map(|(_, &i)| i)
                        .collect();
                    let w = rest.get(&sub)?;
                    out = out.set(&idx, v.mul(w))?;
                }
                Ok(out)
            }
            SimpleTerm::Split { bipartition, factor_a, factor_b } => {
                let d = bipartition.block_a.len() + bipartition.block_b.len();
                let n = factor_a.side();
                let spec = factor_a.spec();
                if factor_b.side() != n || factor_b.spec() != spec {
                    return Err(RankError::ShapeMismatch("split factors disagree".into()));
                }
                let mut out = Tensor::zeros(d, n, spec);
                for idx in IndexIter::new(d, n) {
                    let ia: Vec<usize> = bipartition.block_a.iter().map(|&a| idx[a - 1]).collect();
                    let ib: Vec<usize> = bipartition.block_b.iter().map(|&b| idx[b - 1]).collect();
                    let v = factor_a.get(&ia)?.mul(factor_b.get(&ib)?);
                    if !v.is_zero() {
                        out = out.set(&idx, v)?;
                    }
                }
                Ok(out)
            }
        }
    }
}

/// How a certified lower bound was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    /// A nonzero hyperdeterminant of the tensor itself or of a witness
    /// minor (for direct sums, of the sum of witness minors).
    DetNonzero { det: RingValue },
    /// Echelon form with nonzero diagonal.
    Echelon,
    /// Exhaustive search ruled out all smaller ranks.
    BruteForce,
}

impl Justification {
    pub fn label(&self) -> &'static str {
        match self {
            Justification::DetNonzero { .. } => "det-nonzero",
            Justification::Echelon => "echelon",
            Justification::BruteForce => "brute-force",
        }
    }
}

/// A proven lower bound for one rank function, optionally with an exact
/// upper witness decomposition.
#[derive(Debug, Clone)]
pub struct RankCertificate {
    pub kind: RankKind,
    pub lower: usize,
    pub justification: Justification,
    pub upper: Option<RankWitness>,
}

/// An explicit decomposition certifying `rank <= terms.len()`.
#[derive(Debug, Clone)]
pub struct RankWitness {
    pub rank: usize,
    pub terms: Vec<SimpleTerm>,
}

// ---------------------------------------------------------------------------
// simplicity testing
// ---------------------------------------------------------------------------

/// All bipartitions `(A, B)` of `[d]` with `1 in A`, both blocks nonempty,
/// ordered by (|A|, lex A). With `odd_only`, restricts to odd |B|.
fn bipartitions(d: usize, odd_only: bool) -> Vec<Bipartition> {
    let mut out = Vec::new();
    // subsets of {2, ..., d} joining coordinate 1
    for mask in 0u32..(1 << (d - 1)) {
        let mut block_a = vec![1usize];
        for j in 2..=d {
            if mask >> (j - 2) & 1 == 1 {
                block_a.push(j);
            }
        }
        if block_a.len() == d {
            continue;
        }
        let bp = Bipartition::new(d, block_a).expect("constructed blocks are valid");
        if !odd_only || bp.is_odd() {
            out.push(bp);
        }
    }
    out.sort_by(|x, y| (x.block_a.len(), &x.block_a).cmp(&(y.block_a.len(), &y.block_a)));
    out
}

/// Flattens `t` into the `(block_a) x (block_b)` matrix, rows and columns
/// in lexicographic order of the block coordinates.
fn flatten(t: &Tensor, block_a: &[usize], block_b: &[usize]) -> Vec<Vec<RingValue>> {
    let n = t.side();
    let rows = pow_len(n, block_a.len());
    let cols = pow_len(n, block_b.len());
    let mut m = vec![vec![t.spec().zero(); cols]; rows];
    let mut idx = vec![1usize; t.order()];
    for (r, ra) in IndexIter::new(block_a.len(), n).enumerate() {
        for (a, &coord) in block_a.iter().enumerate() {
            idx[coord - 1] = ra[a];
        }
        for (c, cb) in IndexIter::new(block_b.len(), n).enumerate() {
            for (b, &coord) in block_b.iter().enumerate() {
                idx[coord - 1] = cb[b];
            }
            m[r][c] = t.get(&idx).expect("index in bounds").clone();
        }
    }
    debug_assert_eq!(m.len(), rows);
    m
}

/// Rank-1 factor recovery: if `m = u w^T` exactly, returns `(u, w)`.
///
/// Over the fields ℚ and 𝔽_p the pivot column/row construction is
/// complete. Over ℤ the first nonzero column is made primitive (content 1,
/// positive leading entry) and the column multipliers must divide exactly.
/// Composite moduli are rejected: factor recovery would need division.
type FactorPair = (Vec<RingValue>, Vec<RingValue>);

fn rank1_factors(m: &[Vec<RingValue>], spec: RingSpec) -> Result<Option<FactorPair>, RankError> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivot = None;
    'scan: for (r, row) in m.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            if !v.is_zero() {
                pivot = Some((r, c));
                break 'scan;
            }
        }
    }
    let Some((r0, c0)) = pivot else {
        return Ok(None); // the zero matrix is not simple
    };
    let (u, w) = match spec {
        RingSpec::Rationals | RingSpec::PrimeField(_) => {
            let pinv = m[r0][c0].inverse()?;
            let u: Vec<RingValue> = (0..rows).map(|r| m[r][c0].clone()).collect();
            let w: Vec<RingValue> = (0..cols).map(|c| m[r0][c].mul(&pinv)).collect();
            (u, w)
        }
        RingSpec::Integers => {
            let col: Vec<BigInt> = (0..rows)
                .map(|r| m[r][c0].to_rational().expect("integer payload").to_integer())
                .collect();
            let mut g = BigInt::zero();
            for v in &col {
                g = g.gcd(v);
            }
            if col[r0].is_negative() {
                g = -g;
            }
            let u_int: Vec<BigInt> = col.iter().map(|v| v / &g).collect();
            let lead = u_int[r0].clone();
            let mut w = Vec::with_capacity(cols);
            for v in &m[r0] {
                let num = v.to_rational().expect("integer payload").to_integer();
                let (quot, rem) = num.div_rem(&lead);
                if !rem.is_zero() {
                    return Ok(None);
                }
                w.push(spec.from_bigint(&quot));
            }
            let u = u_int.iter().map(|v| spec.from_bigint(v)).collect();
            (u, w)
        }
        RingSpec::IntegersMod(_) => {
            return Err(RankError::UnsupportedRing {
                spec,
                reason: "rank factor recovery needs a field or Z".into(),
            });
        }
    };
    // full verification: recovery alone does not imply rank 1
    for (r, row) in m.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            if *v != u[r].mul(&w[c]) {
                return Ok(None);
            }
        }
    }
    Ok(Some((u, w)))
}

/// Searches for a witness that `t` is simple of the given kind: a single
/// direction for slice rank, a bipartition for the partition kinds, or a
/// full outer-product factorization for tensor rank. Directions and
/// bipartitions are tried in a fixed (size, lex) order, so the witness is
/// deterministic.
pub fn is_simple(t: &Tensor, kind: RankKind) -> Result<Option<SimpleTerm>, RankError> {
    let d = t.order();
    let n = t.side();
    let spec = t.spec();
    if d > 16 {
        return Err(RankError::BudgetExceeded { needed: u64::MAX, budget: 1 << 16 });
    }
    if t.is_zero() {
        return Ok(None);
    }
    match kind {
        RankKind::TensorRank => {
            if d == 0 {
                return Err(RankError::ShapeMismatch("tensor rank needs order >= 1".into()));
            }
            if d == 1 {
                return Ok(Some(SimpleTerm::Vectors { factors: vec![t.clone()] }));
            }
            let rest: Vec<usize> = (2..=d).collect();
            let m = flatten(t, &[1], &rest);
            let Some((u, w)) = rank1_factors(&m, spec)? else {
                return Ok(None);
            };
            let head = Tensor::new(1, n, spec, u)?;
            let tail = Tensor::new(d - 1, n, spec, w)?;
            match is_simple(&tail, RankKind::TensorRank)? {
                Some(SimpleTerm::Vectors { mut factors }) => {
                    factors.insert(0, head);
                    Ok(Some(SimpleTerm::Vectors { factors }))
                }
                _ => Ok(None),
            }
        }
        RankKind::SliceRank => {
            if d < 2 {
                return Err(RankError::ShapeMismatch("slice rank needs order >= 2".into()));
            }
            for k in 1..=d {
                let rest: Vec<usize> = (1..=d).filter(|&i| i != k).collect();
                let m = flatten(t, &[k], &rest);
                if let Some((u, w)) = rank1_factors(&m, spec)? {
                    return Ok(Some(SimpleTerm::Slice {
                        direction: k,
                        vector: Tensor::new(1, n, spec, u)?,
                        rest: Tensor::new(d - 1, n, spec, w)?,
                    }));
                }
            }
            Ok(None)
        }
        RankKind::PartitionRank | RankKind::OddPartitionRank => {
            if d < 2 {
                return Err(RankError::ShapeMismatch("partition ranks need order >= 2".into()));
            }
            for bp in bipartitions(d, kind == RankKind::OddPartitionRank) {
                let m = flatten(t, &bp.block_a, &bp.block_b);
                if let Some((u, w)) = rank1_factors(&m, spec)? {
                    return Ok(Some(SimpleTerm::Split {
                        factor_a: Tensor::new(bp.block_a.len(), n, spec, u)?,
                        factor_b: Tensor::new(bp.block_b.len(), n, spec, w)?,
                        bipartition: bp,
                    }));
                }
            }
            Ok(None)
        }
    }
}

/// Checks that every term is a valid simple tensor of `kind` with the
/// right shape and that the terms sum to `t` exactly.
pub fn verify_decomposition(
    t: &Tensor,
    terms: &[SimpleTerm],
    kind: RankKind,
) -> Result<bool, RankError> {
    let mut acc = Tensor::zeros(t.order(), t.side(), t.spec());
    for term in terms {
        if !term.is_valid_for(kind) {
            return Ok(false);
        }
        let expanded = term.expand()?;
        if expanded.order() != t.order() || expanded.side() != t.side() || expanded.spec() != t.spec()
        {
            return Err(RankError::ShapeMismatch("term shape disagrees with target".into()));
        }
        acc = acc.add(&expanded)?;
    }
    Ok(acc == *t)
}

// ---------------------------------------------------------------------------
// canonical enumeration of simple tensors over small prime fields
// ---------------------------------------------------------------------------

/// One enumeration block: the factor lengths and which factors are
/// scale-normalized (leading nonzero digit forced to 1).
struct SimpleConfig {
    kind: RankKind,
    direction: Option<usize>,
    bipartition: Option<Bipartition>,
    lens: Vec<usize>,
    normalized: Vec<bool>,
}

fn simple_configs(kind: RankKind, d: usize, n: usize) -> Vec<SimpleConfig> {
    match kind {
        RankKind::TensorRank => {
            let mut normalized = vec![true; d];
            normalized[d - 1] = false;
            vec![SimpleConfig {
                kind,
                direction: None,
                bipartition: None,
                lens: vec![n; d],
                normalized,
            }]
        }
        RankKind::SliceRank => (1..=d)
            .map(|k| SimpleConfig {
                kind,
                direction: Some(k),
                bipartition: None,
                lens: vec![n, pow_len(n, d - 1)],
                normalized: vec![true, false],
            })
            .collect(),
        RankKind::PartitionRank | RankKind::OddPartitionRank => {
            bipartitions(d, kind == RankKind::OddPartitionRank)
                .into_iter()
                .map(|bp| SimpleConfig {
                    kind,
                    direction: None,
                    lens: vec![pow_len(n, bp.block_a.len()), pow_len(n, bp.block_b.len())],
                    normalized: vec![true, false],
                    bipartition: Some(bp),
                })
                .collect()
        }
    }
}

/// Odometer over tuples of nonzero digit vectors, the last factor moving
/// fastest; normalized factors skip vectors whose leading nonzero digit
/// is not 1.
struct FactorOdometer {
    factors: Vec<Vec<u64>>,
    normalized: Vec<bool>,
    p: u64,
}

impl FactorOdometer {
    fn new(lens: &[usize], normalized: &[bool], p: u64) -> Option<Self> {
        let mut odo = FactorOdometer {
            factors: lens.iter().map(|&l| vec![0; l]).collect(),
            normalized: normalized.to_vec(),
            p,
        };
        for f in 0..odo.factors.len() {
            if !odo.advance_factor(f) {
                return None; // a factor has no admissible value
            }
        }
        Some(odo)
    }

    /// Advances factor `f` to its next admissible vector; false on wrap
    /// (leaving the factor all-zero).
    fn advance_factor(&mut self, f: usize) -> bool {
        loop {
            // base-p odometer increment, last digit fastest
            let digits = &mut self.factors[f];
            let mut pos = digits.len();
            let mut carried = true;
            while pos > 0 {
                pos -= 1;
                if digits[pos] + 1 < self.p {
                    digits[pos] += 1;
                    for dd in &mut digits[pos + 1..] {
                        *dd = 0;
                    }
                    carried = false;
                    break;
                }
            }
            if carried {
                for dd in digits.iter_mut() {
                    *dd = 0;
                }
                return false;
            }
            let lead = self.factors[f].iter().find(|&&v| v != 0);
            let admissible = match lead {
                None => false,
                Some(&v) => !self.normalized[f] || v == 1,
            };
            if admissible {
                return true;
            }
        }
    }

    /// Advances the whole tuple; false when exhausted.
    fn advance(&mut self) -> bool {
        let mut f = self.factors.len();
        while f > 0 {
            f -= 1;
            if self.advance_factor(f) {
                return true;
            }
            // factor f wrapped; restore its first admissible value and
            // carry into the previous factor
            let restored = self.advance_factor(f);
            debug_assert!(restored, "every factor has an admissible value");
        }
        false
    }
}

fn term_from_digits(
    config: &SimpleConfig,
    odo: &FactorOdometer,
    d: usize,
    n: usize,
    spec: RingSpec,
) -> SimpleTerm {
    let to_tensor = |digits: &[u64], order: usize| -> Tensor {
        let entries = digits.iter().map(|&v| spec.from_i64(v as i64)).collect();
        Tensor::new(order, n, spec, entries).expect("factor shape")
    };
    match config.kind {
        RankKind::TensorRank => SimpleTerm::Vectors {
            factors: odo.factors.iter().map(|f| to_tensor(f, 1)).collect(),
        },
        RankKind::SliceRank => SimpleTerm::Slice {
            direction: config.direction.expect("slice config"),
            vector: to_tensor(&odo.factors[0], 1),
            rest: to_tensor(&odo.factors[1], d - 1),
        },
        RankKind::PartitionRank | RankKind::OddPartitionRank => {
            let bp = config.bipartition.clone().expect("partition config");
            SimpleTerm::Split {
                factor_a: to_tensor(&odo.factors[0], bp.block_a.len()),
                factor_b: to_tensor(&odo.factors[1], bp.block_b.len()),
                bipartition: bp,
            }
        }
    }
}

/// Calls `f` for every canonically normalized simple tensor of the kind,
/// in deterministic (config, factor-odometer) order, until `f` returns
/// `Ok(true)` or the enumeration ends.
fn for_each_simple<F>(
    kind: RankKind,
    d: usize,
    n: usize,
    spec: RingSpec,
    f: &mut F,
) -> Result<bool, RankError>
where
    F: FnMut(SimpleTerm) -> Result<bool, RankError>,
{
    let p = prime_of(spec)?;
    for config in simple_configs(kind, d, n) {
        let Some(mut odo) = FactorOdometer::new(&config.lens, &config.normalized, p) else {
            continue;
        };
        loop {
            let term = term_from_digits(&config, &odo, d, n, spec);
            if f(term)? {
                return Ok(true);
            }
            if !odo.advance() {
                break;
            }
        }
    }
    Ok(false)
}

fn prime_of(spec: RingSpec) -> Result<u64, RankError> {
    match spec {
        RingSpec::PrimeField(p) => Ok(p),
        _ => Err(RankError::UnsupportedRing {
            spec,
            reason: "exhaustive rank search needs a small prime field".into(),
        }),
    }
}

/// Upper bound on the number of canonical simple tensors, for budgeting.
fn count_simples(kind: RankKind, d: usize, n: usize, p: u64) -> Option<u64> {
    let nonzero = |len: usize| -> Option<u64> {
        let mut t = 1u64;
        for _ in 0..len {
            t = t.checked_mul(p)?;
        }
        Some(t - 1)
    };
    let mut total = 0u64;
    for config in simple_configs(kind, d, n) {
        let mut prod = 1u64;
        for &len in &config.lens {
            prod = prod.checked_mul(nonzero(len)?)?;
        }
        total = total.checked_add(prod)?;
    }
    Some(total)
}

// ---------------------------------------------------------------------------
// exact ranks at tiny scale
// ---------------------------------------------------------------------------

/// The Kronecker-delta expansion of `t` along `direction`, dropping zero
/// slices. Each term is slice-simple in that direction.
pub fn delta_expansion(t: &Tensor, direction: usize) -> Result<Vec<SimpleTerm>, RankError> {
    let n = t.side();
    let spec = t.spec();
    let mut terms = Vec::new();
    for layer in 1..=n {
        let rest = t.slice(direction, layer)?;
        if rest.is_zero() {
            continue;
        }
        let mut digits = vec![spec.zero(); n];
        digits[layer - 1] = spec.one();
        terms.push(SimpleTerm::Slice {
            direction,
            vector: Tensor::new(1, n, spec, digits)?,
            rest,
        });
    }
    Ok(terms)
}

/// The delta expansion repackaged as terms of the requested kind. For the
/// partition kinds it expands along direction 2, whose singleton block
/// avoids coordinate 1 and has odd size, so the terms are simple for both
/// at every order. For tensor rank this is only available at d = 2.
fn delta_terms_as_kind(t: &Tensor, kind: RankKind) -> Result<Vec<SimpleTerm>, RankError> {
    let d = t.order();
    match kind {
        RankKind::SliceRank => delta_expansion(t, 1),
        RankKind::PartitionRank | RankKind::OddPartitionRank => {
            let slice_terms = delta_expansion(t, 2)?;
            slice_terms
                .into_iter()
                .map(|term| match term {
                    SimpleTerm::Slice { vector, rest, .. } => {
                        let bp = Bipartition::new(d, (1..=d).filter(|&i| i != 2).collect())?;
                        Ok(SimpleTerm::Split {
                            bipartition: bp,
                            factor_a: rest,
                            factor_b: vector,
                        })
                    }
                    _ => unreachable!("delta expansion yields slice terms"),
                })
                .collect()
        }
        RankKind::TensorRank => {
            if d != 2 {
                return Err(RankError::ShapeMismatch(
                    "delta terms are tensor-simple only at order 2".into(),
                ));
            }
            let slice_terms = delta_expansion(t, 2)?;
            slice_terms
                .into_iter()
                .map(|term| match term {
                    SimpleTerm::Slice { vector, rest, .. } => Ok(SimpleTerm::Vectors {
                        factors: vec![rest, vector],
                    }),
                    _ => unreachable!("delta expansion yields slice terms"),
                })
                .collect()
        }
    }
}

/// Least `r <= r_max` admitting an r-term decomposition into simple
/// tensors of `kind`, with a witness, by iterative deepening over the
/// canonical enumeration with memoized refuted residuals.
///
/// Supported over small prime fields only (p <= 7; tensor rank at order
/// above 2 needs p <= 3 and n*d <= 8). The slice and partition ranks are
/// capped at n, where the delta expansion supplies the witness once every
/// smaller depth is refuted, so complete searches only run below n.
pub fn brute_force_rank(
    t: &Tensor,
    kind: RankKind,
    r_max: usize,
    budget: &Budget,
) -> Result<Option<RankWitness>, RankError> {
    let d = t.order();
    let n = t.side();
    let spec = t.spec();
    let p = prime_of(spec)?;
    if p > 7 {
        return Err(RankError::UnsupportedRing {
            spec,
            reason: "exhaustive search is limited to p <= 7".into(),
        });
    }
    if kind == RankKind::TensorRank && d > 2 && (p > 3 || n * d > 8) {
        return Err(RankError::UnsupportedRing {
            spec,
            reason: "tensor-rank search is limited to p <= 3 with n*d <= 8".into(),
        });
    }
    if d < 2 {
        return Err(RankError::ShapeMismatch("rank search needs order >= 2".into()));
    }
    if t.is_zero() {
        return Ok(Some(RankWitness { rank: 0, terms: Vec::new() }));
    }
    // slice/partition ranks never exceed n; tensor rank agrees at d = 2
    let cap = if kind != RankKind::TensorRank || d == 2 { Some(n) } else { None };
    let mut nodes = 0u64;
    let mut memo: HashSet<(Tensor, usize)> = HashSet::new();
    for r in 1..=r_max {
        if cap == Some(r) {
            let terms = delta_terms_as_kind(t, kind)?;
            debug_assert_eq!(terms.len(), r, "all slices nonzero at the cap");
            return Ok(Some(RankWitness { rank: r, terms }));
        }
        if let Some(terms) = search_depth(t, kind, r, &mut memo, &mut nodes, budget)? {
            return Ok(Some(RankWitness { rank: r, terms }));
        }
    }
    Ok(None)
}

fn search_depth(
    t: &Tensor,
    kind: RankKind,
    r: usize,
    memo: &mut HashSet<(Tensor, usize)>,
    nodes: &mut u64,
    budget: &Budget,
) -> Result<Option<Vec<SimpleTerm>>, RankError> {
    if r == 0 {
        return Ok(if t.is_zero() { Some(Vec::new()) } else { None });
    }
    if t.is_zero() {
        return Ok(None); // simple terms are nonzero, so zero needs zero terms
    }
    if r == 1 {
        return Ok(is_simple(t, kind)?.map(|term| vec![term]));
    }
    if memo.contains(&(t.clone(), r)) {
        return Ok(None);
    }
    let mut result: Option<Vec<SimpleTerm>> = None;
    for_each_simple(kind, t.order(), t.side(), t.spec(), &mut |term| {
        *nodes += 1;
        if *nodes > budget.terms {
            return Err(RankError::BudgetExceeded { needed: *nodes, budget: budget.terms });
        }
        let residual = t.sub(&term.expand()?)?;
        if let Some(mut rest) = search_depth(&residual, kind, r - 1, memo, nodes, budget)? {
            rest.insert(0, term);
            result = Some(rest);
            return Ok(true);
        }
        Ok(false)
    })?;
    if result.is_none() {
        memo.insert((t.clone(), r));
    }
    Ok(result)
}

// ---------------------------------------------------------------------------
// full rank tables over a whole tiny tensor space
// ---------------------------------------------------------------------------

/// Exact ranks for every tensor of shape `(d, n)` over 𝔽_p (p = 2 or 3),
/// indexed by the base-p code of the entry vector in lexicographic entry
/// order (first entry most significant). Computed as breadth-first level
/// sets: level r is everything reachable from level r-1 by adding one
/// simple tensor.
pub fn rank_table(
    p: u64,
    d: usize,
    n: usize,
    kind: RankKind,
    budget: &Budget,
) -> Result<Vec<u8>, RankError> {
    if p != 2 && p != 3 {
        return Err(RankError::UnsupportedRing {
            spec: RingSpec::prime_field(p)?,
            reason: "rank tables support p in {2, 3}".into(),
        });
    }
    let spec = RingSpec::prime_field(p)?;
    let len = pow_len(n, d);
    let space_big = (p as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
    if space_big > 1 << 17 {
        return Err(RankError::BudgetExceeded { needed: u64::MAX, budget: budget.terms });
    }
    let space = space_big as usize;
    let simple_count = count_simples(kind, d, n, p).unwrap_or(u64::MAX);
    let work = simple_count.saturating_mul(space as u64);
    if work > budget.terms {
        return Err(RankError::BudgetExceeded { needed: work, budget: budget.terms });
    }

    let mut simples: Vec<usize> = Vec::new();
    for_each_simple(kind, d, n, spec, &mut |term| {
        let expanded = term.expand()?;
        simples.push(code_of(&expanded, p));
        Ok(false)
    })?;
    simples.sort_unstable();
    simples.dedup();

    let mut dist = vec![u8::MAX; space];
    dist[0] = 0;
    let mut frontier: Vec<usize> = vec![0];
    let mut level = 0u8;
    while !frontier.is_empty() {
        level += 1;
        let mut next = Vec::new();
        for &t in &frontier {
            for &s in &simples {
                let u = if p == 2 { t ^ s } else { add_codes_base3(t, s, len) };
                if dist[u] == u8::MAX {
                    dist[u] = level;
                    next.push(u);
                }
            }
        }
        frontier = next;
    }
    Ok(dist)
}

/// Base-p code of a tensor's entry vector (first entry most significant).
pub fn code_of(t: &Tensor, p: u64) -> usize {
    let mut code = 0usize;
    for e in t.entries() {
        code = code * p as usize + e.residue().expect("prime-field entry") as usize;
    }
    code
}

/// Tensor from a base-p code, inverse of [`code_of`].
pub fn tensor_of_code(code: usize, p: u64, d: usize, n: usize) -> Tensor {
    let spec = RingSpec::prime_field(p).expect("small prime");
    let len = pow_len(n, d);
    let mut digits = vec![0u64; len];
    let mut c = code;
    for i in (0..len).rev() {
        digits[i] = (c % p as usize) as u64;
        c /= p as usize;
    }
    let entries = digits.iter().map(|&v| spec.from_i64(v as i64)).collect();
    Tensor::new(d, n, spec, entries).expect("shape from code")
}

fn add_codes_base3(a: usize, b: usize, len: usize) -> usize {
    let mut out = 0usize;
    let mut mult = 1usize;
    let (mut x, mut y) = (a, b);
    for _ in 0..len {
        let da = x % 3;
        let db = y % 3;
        out += ((da + db) % 3) * mult;
        x /= 3;
        y /= 3;
        mult *= 3;
    }
    out
}

// ---------------------------------------------------------------------------
// hyperdeterminant-based certificates
// ---------------------------------------------------------------------------

/// Full odd-partition-rank certificate: a nonzero hyperdeterminant forces
/// `oprank(T) = n` (both parities of d), so the tensor rank is at least n
/// and, at even d, the slice rank is exactly n as well. Returns `None`
/// when the hyperdeterminant vanishes.
pub fn certify_oprank_full(t: &Tensor, budget: &Budget) -> Result<Option<RankCertificate>, RankError> {
    let det = hyperdet_dp_budgeted(t, budget)?;
    if det.is_zero() {
        return Ok(None);
    }
    let n = t.side();
    let upper = if t.order() >= 2 && n >= 1 {
        let terms = delta_terms_as_kind(t, RankKind::OddPartitionRank)?;
        debug_assert_eq!(terms.len(), n, "nonzero det forbids zero slices");
        Some(RankWitness { rank: terms.len(), terms })
    } else {
        None
    };
    Ok(Some(RankCertificate {
        kind: RankKind::OddPartitionRank,
        lower: n,
        justification: Justification::DetNonzero { det },
        upper,
    }))
}

/// Partition-rank bound in positive characteristic: a nonzero
/// hyperdeterminant forces `prank(T) >= n/(p-1)`.
pub fn certify_prank_bound(t: &Tensor, budget: &Budget) -> Result<Option<RankCertificate>, RankError> {
    let p = t.spec().characteristic();
    if p == 0 {
        return Err(RankError::UnsupportedRing {
            spec: t.spec(),
            reason: "the partition-rank bound needs positive characteristic".into(),
        });
    }
    let det = hyperdet_dp_budgeted(t, budget)?;
    if det.is_zero() {
        return Ok(None);
    }
    let lower = if p == 1 { t.side() } else { t.side().div_ceil((p - 1) as usize) };
    Ok(Some(RankCertificate {
        kind: RankKind::PartitionRank,
        lower,
        justification: Justification::DetNonzero { det },
        upper: None,
    }))
}

/// Generic nullity bound (even d): if every simple tensor of a rank
/// function is k-null and `det(T) != 0`, that rank is at least n/(k-1).
/// The caller names the rank kind the k-nullity belongs to.
pub fn generic_null_bound(
    t: &Tensor,
    k: usize,
    kind: RankKind,
    budget: &Budget,
) -> Result<Option<RankCertificate>, RankError> {
    let d = t.order();
    if !d.is_multiple_of(2) {
        return Err(RankError::OddOrder { d });
    }
    if k < 2 {
        return Err(RankError::HypothesisNotMet("the nullity bound needs k > 1".into()));
    }
    let det = hyperdet_dp_budgeted(t, budget)?;
    if det.is_zero() {
        return Ok(None);
    }
    Ok(Some(RankCertificate {
        kind,
        lower: t.side().div_ceil(k - 1),
        justification: Justification::DetNonzero { det },
        upper: None,
    }))
}

/// Hyperdeterminant-based lower bound for any rank kind, as exposed on the
/// command line. `None` means the hyperdeterminant gave no information.
pub fn det_rank_bound(
    t: &Tensor,
    kind: RankKind,
    budget: &Budget,
) -> Result<Option<RankCertificate>, RankError> {
    let d = t.order();
    let n = t.side();
    match kind {
        RankKind::OddPartitionRank => certify_oprank_full(t, budget),
        RankKind::TensorRank => {
            let det = hyperdet_dp_budgeted(t, budget)?;
            if det.is_zero() {
                return Ok(None);
            }
            Ok(Some(RankCertificate {
                kind,
                lower: n,
                justification: Justification::DetNonzero { det },
                upper: None,
            }))
        }
        RankKind::SliceRank => {
            if d.is_multiple_of(2) {
                let det = hyperdet_dp_budgeted(t, budget)?;
                if det.is_zero() {
                    return Ok(None);
                }
                let upper = if d >= 2 && n >= 1 {
                    let terms = delta_terms_as_kind(t, RankKind::SliceRank)?;
                    Some(RankWitness { rank: terms.len(), terms })
                } else {
                    None
                };
                Ok(Some(RankCertificate {
                    kind,
                    lower: n,
                    justification: Justification::DetNonzero { det },
                    upper,
                }))
            } else if t.spec().characteristic() > 0 {
                // odd order: prank <= srank still transfers the bound
                Ok(certify_prank_bound(t, budget)?.map(|cert| RankCertificate {
                    kind,
                    lower: cert.lower,
                    justification: cert.justification,
                    upper: None,
                }))
            } else {
                Ok(None) // slice rank 1 with nonzero det is possible at odd d
            }
        }
        RankKind::PartitionRank => {
            if t.spec().characteristic() == 0 {
                return Ok(None); // partition rank 1 with nonzero det exists over Q
            }
            certify_prank_bound(t, budget)
        }
    }
}

/// Certified additivity of the odd partition rank under direct sums, in
/// the det-certifiable regime: each summand must have a nonzero
/// hyperdeterminant (full odd partition rank, not n-null) or be zero.
/// Returns the certificate for `oprank(X ⊕ Y) = r + s`.
pub fn oprank_direct_sum_check(
    x: &Tensor,
    y: &Tensor,
    budget: &Budget,
) -> Result<RankCertificate, RankError> {
    let d = x.order();
    if y.order() != d {
        return Err(RankError::ShapeMismatch("summands must share the order".into()));
    }
    if !d.is_multiple_of(2) {
        return Err(RankError::OddOrder { d });
    }
    let det_x = hyperdet_dp_budgeted(x, budget)?;
    let det_y = hyperdet_dp_budgeted(y, budget)?;
    let certified = |t: &Tensor, det: &RingValue| -> Result<usize, RankError> {
        if !det.is_zero() {
            Ok(t.side())
        } else if t.is_zero() {
            Ok(0)
        } else {
            Err(RankError::HypothesisNotMet(
                "summand is nonzero with zero hyperdeterminant; its odd partition rank is not certified"
                    .into(),
            ))
        }
    };
    let r = certified(x, &det_x)?;
    let s = certified(y, &det_y)?;
    let sum = x.direct_sum(y)?;
    // witness: the direct sum of the det-full blocks (zero summands
    // contribute the empty minor with det 1)
    let minor_det = match (x.is_zero(), y.is_zero()) {
        (true, true) => x.spec().one(),
        (true, false) => det_y,
        (false, true) => det_x,
        (false, false) => hyperdet_dp_budgeted(&sum, budget)?,
    };
    if minor_det.is_zero() {
        return Err(RankError::HypothesisNotMet(
            "direct sum of witness minors has zero hyperdeterminant".into(),
        ));
    }
    let upper = if sum.order() >= 2 && !sum.is_zero() {
        let terms = delta_terms_as_kind(&sum, RankKind::OddPartitionRank)?;
        debug_assert_eq!(terms.len(), r + s, "certified summands have nonzero slices");
        Some(RankWitness { rank: terms.len(), terms })
    } else {
        Some(RankWitness { rank: 0, terms: Vec::new() })
    };
    Ok(RankCertificate {
        kind: RankKind::OddPartitionRank,
        lower: r + s,
        justification: Justification::DetNonzero { det: minor_det },
        upper,
    })
}

// ---------------------------------------------------------------------------
// seeded random instances for the identity and theorem suites
// ---------------------------------------------------------------------------

/// Seeded random simple tensor of the kind: a uniformly chosen admissible
/// direction or bipartition with nonzero random factors.
pub fn random_simple_term(
    kind: RankKind,
    d: usize,
    n: usize,
    spec: RingSpec,
    rng: &mut SplitMix64,
) -> SimpleTerm {
    let nonzero_tensor = |order: usize, rng: &mut SplitMix64| -> Tensor {
        loop {
            let t = Tensor::random(order, n, spec, rng);
            if !t.is_zero() {
                return t;
            }
        }
    };
    match kind {
        RankKind::TensorRank => SimpleTerm::Vectors {
            factors: (0..d).map(|_| nonzero_tensor(1, rng)).collect(),
        },
        RankKind::SliceRank => {
            let direction = rng.next_below(d as u64) as usize + 1;
            SimpleTerm::Slice {
                direction,
                vector: nonzero_tensor(1, rng),
                rest: nonzero_tensor(d - 1, rng),
            }
        }
        RankKind::PartitionRank | RankKind::OddPartitionRank => {
            let pool = bipartitions(d, kind == RankKind::OddPartitionRank);
            let bp = pool[rng.next_below(pool.len() as u64) as usize].clone();
            SimpleTerm::Split {
                factor_a: nonzero_tensor(bp.block_a.len(), rng),
                factor_b: nonzero_tensor(bp.block_b.len(), rng),
                bipartition: bp,
            }
        }
    }
}

/// Sum of `r` seeded random simple tensors of the kind.
pub fn random_sum_of_simples(
    kind: RankKind,
    r: usize,
    d: usize,
    n: usize,
    spec: RingSpec,
    rng: &mut SplitMix64,
) -> Result<Tensor, RankError> {
    let mut acc = Tensor::zeros(d, n, spec);
    for _ in 0..r {
        acc = acc.add(&random_simple_term(kind, d, n, spec, rng).expand()?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperdet::hyperdet_naive;

    fn q() -> RingSpec {
        RingSpec::Rationals
    }

    fn f(p: u64) -> RingSpec {
        RingSpec::prime_field(p).unwrap()
    }

    fn diag_outer(k: usize, l: usize, n: usize, spec: RingSpec) -> Tensor {
        Tensor::diagonal_identity(k, n, spec)
            .outer_product(&Tensor::diagonal_identity(l, n, spec))
            .unwrap()
    }

    #[test]
    fn bipartition_validation() {
        assert!(Bipartition::new(4, vec![1, 3]).is_ok());
        assert!(Bipartition::new(4, vec![2, 3]).is_err()); // must contain 1
        assert!(Bipartition::new(4, vec![1, 2, 3, 4]).is_err()); // block_b empty
        let bp = Bipartition::new(5, vec![1, 2]).unwrap();
        assert!(bp.is_odd());
        assert_eq!(bp.block_b(), &[3, 4, 5]);
    }

    #[test]
    fn outer_of_identities_partition_simple_blocks() {
        // I_2 (x) I_4: partition simple with blocks {1,2} | {3,...,6},
        // but not odd-partition simple
        let x = diag_outer(2, 4, 2, q());
        let witness = is_simple(&x, RankKind::PartitionRank).unwrap().unwrap();
        match &witness {
            SimpleTerm::Split { bipartition, .. } => {
                assert_eq!(bipartition.block_a(), &[1, 2]);
                assert_eq!(bipartition.block_b(), &[3, 4, 5, 6]);
            }
            other => panic!("unexpected witness {:?}", other),
        }
        assert!(verify_decomposition(&x, &[witness], RankKind::PartitionRank).unwrap());
        assert!(is_simple(&x, RankKind::OddPartitionRank).unwrap().is_none());
    }

    #[test]
    fn outer_of_odd_identities_is_odd_partition_simple() {
        let x = diag_outer(3, 3, 2, q());
        let witness = is_simple(&x, RankKind::OddPartitionRank).unwrap().unwrap();
        match &witness {
            SimpleTerm::Split { bipartition, .. } => {
                assert_eq!(bipartition.block_a(), &[1, 2, 3]);
                assert_eq!(bipartition.block_b(), &[4, 5, 6]);
            }
            other => panic!("unexpected witness {:?}", other),
        }
    }

    /// The order-6 side-2 indicator of "exactly one coordinate equals 2".
    fn single_two_indicator(spec: RingSpec) -> Tensor {
        let mut t = Tensor::zeros(6, 2, spec);
        for idx in IndexIter::new(6, 2) {
            if idx.iter().filter(|&&i| i == 2).count() == 1 {
                t = t.set(&idx, spec.one()).unwrap();
            }
        }
        t
    }

    #[test]
    fn single_two_indicator_is_not_partition_simple() {
        let x = single_two_indicator(q());
        assert!(hyperdet_naive(&x).unwrap().is_zero());
        assert!(is_simple(&x, RankKind::PartitionRank).unwrap().is_none());
    }

    #[test]
    fn single_two_indicator_partition_rank_two() {
        let x = single_two_indicator(f(3));
        let witness = brute_force_rank(&x, RankKind::PartitionRank, 6, &Budget::default())
            .unwrap()
            .unwrap();
        assert_eq!(witness.rank, 2);
        assert!(verify_decomposition(&x, &witness.terms, RankKind::PartitionRank).unwrap());
    }

    #[test]
    fn identity_matrix_brute_force_all_kinds() {
        for kind in [
            RankKind::TensorRank,
            RankKind::SliceRank,
            RankKind::PartitionRank,
            RankKind::OddPartitionRank,
        ] {
            let i = Tensor::diagonal_identity(2, 2, f(2));
            let w = brute_force_rank(&i, kind, 4, &Budget::default()).unwrap().unwrap();
            assert_eq!(w.rank, 2, "kind {:?}", kind);
            assert!(verify_decomposition(&i, &w.terms, kind).unwrap());
        }
    }

    #[test]
    fn slice_rank_of_diagonal_identity_over_f2() {
        let i = Tensor::diagonal_identity(3, 2, f(2));
        let w = brute_force_rank(&i, RankKind::SliceRank, 3, &Budget::default())
            .unwrap()
            .unwrap();
        assert_eq!(w.rank, 2);
        assert!(verify_decomposition(&i, &w.terms, RankKind::SliceRank).unwrap());
    }

    #[test]
    fn delta_expansion_verifies() {
        let mut rng = SplitMix64::new(0xDE17A);
        let t = Tensor::random(3, 3, f(5), &mut rng);
        for kind in [RankKind::SliceRank, RankKind::PartitionRank, RankKind::OddPartitionRank] {
            let terms = delta_terms_as_kind(&t, kind).unwrap();
            assert!(verify_decomposition(&t, &terms, kind).unwrap(), "kind {:?}", kind);
        }
    }

    #[test]
    fn verify_rejects_zero_factors_and_wrong_sums() {
        let t = Tensor::diagonal_identity(2, 2, q());
        // right shape, one zero factor: invalid
        let zero_vec = Tensor::zeros(1, 2, q());
        let bad = SimpleTerm::Vectors { factors: vec![zero_vec.clone(), zero_vec] };
        assert!(!verify_decomposition(&t, &[bad], RankKind::TensorRank).unwrap());
        // valid terms, wrong sum
        let e1 = Tensor::new(1, 2, q(), vec![q().one(), q().zero()]).unwrap();
        let term = SimpleTerm::Vectors { factors: vec![e1.clone(), e1] };
        assert!(!verify_decomposition(&t, &[term], RankKind::TensorRank).unwrap());
    }

    #[test]
    fn simple_term_reconstruction_round_trip() {
        let mut rng = SplitMix64::new(0x0DD5);
        for kind in [
            RankKind::TensorRank,
            RankKind::SliceRank,
            RankKind::PartitionRank,
            RankKind::OddPartitionRank,
        ] {
            for _ in 0..20 {
                let term = random_simple_term(kind, 4, 2, f(3), &mut rng);
                let expanded = term.expand().unwrap();
                let found = is_simple(&expanded, kind).unwrap();
                assert!(found.is_some(), "kind {:?} expansion must be simple", kind);
                assert!(verify_decomposition(&expanded, &[found.unwrap()], kind).unwrap());
            }
        }
    }

    #[test]
    fn is_simple_over_integers() {
        let z = RingSpec::Integers;
        // content spread across both factors
        let u = Tensor::new(1, 2, z, vec![z.from_i64(2), z.from_i64(4)]).unwrap();
        let v = Tensor::new(1, 2, z, vec![z.from_i64(3), z.from_i64(5)]).unwrap();
        let t = u.outer_product(&v).unwrap();
        let w = is_simple(&t, RankKind::TensorRank).unwrap().unwrap();
        assert!(verify_decomposition(&t, &[w], RankKind::TensorRank).unwrap());
        // a rank-2 integer matrix is rejected
        let m = Tensor::diagonal_identity(2, 2, z);
        assert!(is_simple(&m, RankKind::TensorRank).unwrap().is_none());
    }

    #[test]
    fn composite_modulus_is_unsupported() {
        let spec = RingSpec::integers_mod(6).unwrap();
        let t = Tensor::diagonal_identity(2, 2, spec);
        assert!(matches!(
            is_simple(&t, RankKind::SliceRank),
            Err(RankError::UnsupportedRing { .. })
        ));
    }

    #[test]
    fn certify_full_oprank_from_nonzero_det() {
        // det(I_2 (x) I_4) = n! over Q
        for n in [2usize, 3] {
            let x = diag_outer(2, 4, n, q());
            let cert = certify_oprank_full(&x, &Budget::default()).unwrap().unwrap();
            assert_eq!(cert.lower, n);
            let upper = cert.upper.unwrap();
            assert_eq!(upper.rank, n);
            assert!(verify_decomposition(&x, &upper.terms, RankKind::OddPartitionRank).unwrap());
        }
        // det(I_3 (x) I_3) = 0: no certificate
        let y = diag_outer(3, 3, 2, q());
        assert!(certify_oprank_full(&y, &Budget::default()).unwrap().is_none());
    }

    #[test]
    fn odd_order_slice_rank_one_with_full_oprank() {
        // I_1 (x) I_2 at order 3: det = n!, slice rank 1
        let x = diag_outer(1, 2, 2, q());
        let cert = certify_oprank_full(&x, &Budget::default()).unwrap().unwrap();
        assert_eq!(cert.lower, 2);
        let slice_witness = is_simple(&x, RankKind::SliceRank).unwrap().unwrap();
        assert!(matches!(slice_witness, SimpleTerm::Slice { direction: 1, .. }));
    }

    #[test]
    fn prank_bound_in_characteristic_p() {
        let t = Tensor::diagonal_identity(4, 4, f(3));
        let cert = certify_prank_bound(&t, &Budget::default()).unwrap().unwrap();
        assert_eq!(cert.lower, 2); // ceil(4 / (3 - 1))
        // det zero: no certificate
        let z = Tensor::zeros(4, 2, f(3));
        assert!(certify_prank_bound(&z, &Budget::default()).unwrap().is_none());
        // characteristic zero is rejected
        let t0 = Tensor::diagonal_identity(4, 2, q());
        assert!(matches!(
            certify_prank_bound(&t0, &Budget::default()),
            Err(RankError::UnsupportedRing { .. })
        ));
        // p = 2 recovers the full bound n
        let t2 = Tensor::diagonal_identity(4, 3, f(2));
        assert_eq!(certify_prank_bound(&t2, &Budget::default()).unwrap().unwrap().lower, 3);
    }

    #[test]
    fn generic_bound_recovers_both_theorems() {
        let t = Tensor::diagonal_identity(4, 4, f(3));
        // k = 2: full bound n
        let c2 = generic_null_bound(&t, 2, RankKind::OddPartitionRank, &Budget::default())
            .unwrap()
            .unwrap();
        assert_eq!(c2.lower, 4);
        // k = p = 3: the characteristic bound
        let c3 = generic_null_bound(&t, 3, RankKind::PartitionRank, &Budget::default())
            .unwrap()
            .unwrap();
        assert_eq!(c3.lower, 2);
        // zero det: no bound
        let z = Tensor::zeros(4, 2, f(3));
        assert!(generic_null_bound(&z, 2, RankKind::OddPartitionRank, &Budget::default())
            .unwrap()
            .is_none());
        // odd order is rejected
        let odd = Tensor::diagonal_identity(3, 2, q());
        assert!(matches!(
            generic_null_bound(&odd, 2, RankKind::OddPartitionRank, &Budget::default()),
            Err(RankError::OddOrder { d: 3 })
        ));
    }

    #[test]
    fn direct_sum_additivity_det_certified() {
        let x = Tensor::diagonal_identity(4, 2, q());
        let cert = oprank_direct_sum_check(&x, &x, &Budget::default()).unwrap();
        assert_eq!(cert.lower, 4);
        let w = cert.upper.unwrap();
        assert_eq!(w.rank, 4);
        // side-0 summand is neutral
        let empty = Tensor::zeros(4, 0, q());
        let cert = oprank_direct_sum_check(&x, &empty, &Budget::default()).unwrap();
        assert_eq!(cert.lower, 2);
        // a nonzero summand with zero det cannot be certified
        let ones = {
            let mut t = Tensor::zeros(4, 2, q());
            for idx in IndexIter::new(4, 2) {
                t = t.set(&idx, q().one()).unwrap();
            }
            t
        };
        assert!(matches!(
            oprank_direct_sum_check(&x, &ones, &Budget::default()),
            Err(RankError::HypothesisNotMet(_))
        ));
    }

    #[test]
    fn rank_table_matches_brute_force_on_samples() {
        let budget = Budget::default();
        for (p, d, n) in [(2u64, 3usize, 2usize), (3, 2, 2)] {
            for kind in [RankKind::SliceRank, RankKind::PartitionRank, RankKind::OddPartitionRank] {
                let table = rank_table(p, d, n, kind, &budget).unwrap();
                let mut rng = SplitMix64::new(0x7AB7E ^ p ^ ((d as u64) << 8));
                for _ in 0..12 {
                    let code = rng.next_below(table.len() as u64) as usize;
                    let t = tensor_of_code(code, p, d, n);
                    let brute = brute_force_rank(&t, kind, 8, &budget).unwrap().unwrap();
                    assert_eq!(
                        table[code] as usize, brute.rank,
                        "p={} d={} n={} {:?} code={}",
                        p, d, n, kind, code
                    );
                }
            }
        }
    }

    #[test]
    fn rank_table_level_one_is_exactly_the_simples() {
        let table = rank_table(2, 2, 2, RankKind::TensorRank, &Budget::default()).unwrap();
        let rank1 = table.iter().filter(|&&r| r == 1).count();
        assert_eq!(rank1, 9); // 3 nonzero vectors x 3 nonzero vectors
    }
}
