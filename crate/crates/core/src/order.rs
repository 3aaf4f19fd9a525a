//! Posets on the coordinate set, order polytopes, and P-echelon forms.
//!
//! A tensor is in P-echelon form for a poset `P` on `[d]` when its support
//! satisfies `i_a <= i_b` for every relation `a <_P b`; equivalently the
//! support lies in the lattice points of the order polytope `O_n(P)`. With
//! a connected Hasse diagram this forces every permutation tuple except
//! the identity one to contribute zero to the hyperdeterminant, so
//! `det(T)` collapses to the product of the diagonal entries.

use std::fmt;

use num_rational::BigRational;
use num_traits::Signed;

use crate::ring::RingValue;
use crate::tensor::{IndexIter, Tensor};
use crate::Budget;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderError {
    CycleDetected,
    PairOutOfRange { pair: (usize, usize), d: usize },
    /// The echelon machinery requires a connected Hasse diagram.
    DisconnectedPoset,
    /// `echelon_det` was called on a tensor that is not in P-echelon form.
    NotEchelon { index: Vec<usize> },
    DimensionMismatch { poset: usize, tensor: usize },
    BudgetExceeded { needed: u64, budget: u64 },
}

impl fmt::Display for OrderError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderError::CycleDetected => write!(f, "cover relations contain a cycle"),
            OrderError::PairOutOfRange { pair, d } => {
                write!(f, "cover pair {:?} out of range for ground set [{}]", pair, d)
            }
            OrderError::DisconnectedPoset => {
                write!(f, "poset Hasse diagram is not connected")
            }
            OrderError::NotEchelon { index } => {
                write!(f, "tensor is not in echelon form: support at {:?}", index)
            }
            OrderError::DimensionMismatch { poset, tensor } => {
                write!(f, "poset on [{}] does not match order-{} tensor", poset, tensor)
            }
            OrderError::BudgetExceeded { needed, budget } => {
                write!(f, "budget exceeded: needs about {} units, limit {}", needed, budget)
            }
        }
    }
}

impl std::error::Error for OrderError {}

/// Partial order on `[d]` given by cover relations, with the transitive
/// closure cached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poset {
    d: usize,
    covers: Vec<(usize, usize)>,
    /// `closure[a-1][b-1]` iff `a <_P b`.
    closure: Vec<Vec<bool>>,
    hasse_connected: bool,
}

impl Poset {
    /// Builds a poset from cover relations `(a, b)` meaning `a <_P b`,
    /// rejecting cyclic input.
    pub fn new(d: usize, covers: Vec<(usize, usize)>) -> Result<Self, OrderError> {
        for &(a, b) in &covers {
            if a < 1 || a > d || b < 1 || b > d || a == b {
                return Err(OrderError::PairOutOfRange { pair: (a, b), d });
            }
        }
        let mut closure = vec![vec![false; d]; d];
        for &(a, b) in &covers {
            closure[a - 1][b - 1] = true;
        }
        // Warshall's transitive closure
        for k in 0..d {
            for i in 0..d {
                if closure[i][k] {
                    let via: Vec<usize> = (0..d).filter(|&j| closure[k][j]).collect();
                    for j in via {
                        closure[i][j] = true;
                    }
                }
            }
        }
        for (i, row) in closure.iter().enumerate() {
            if row[i] {
                return Err(OrderError::CycleDetected);
            }
        }
        let hasse_connected = undirected_connected(d, &covers);
        Ok(Poset { d, covers, closure, hasse_connected })
    }

    /// The chain `1 <_P 2 <_P ... <_P d`.
    pub fn chain(d: usize) -> Self {
        let covers = (1..d).map(|i| (i, i + 1)).collect();
        Poset::new(d, covers).expect("chain is acyclic")
    }

    pub fn ground_size(&self) -> usize {
        self.d
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn hasse_connected(&self) -> bool {
        self.hasse_connected
    }

    /// Whether `a <_P b` in the transitive closure.
    pub fn less(&self, a: usize, b: usize) -> bool {
        a >= 1 && b >= 1 && a <= self.d && b <= self.d && self.closure[a - 1][b - 1]
    }

    /// All closure pairs `(a, b)` with `a <_P b`.
    pub fn relation_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 1..=self.d {
            for b in 1..=self.d {
                if self.closure[a - 1][b - 1] {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

fn undirected_connected(d: usize, edges: &[(usize, usize)]) -> bool {
    if d <= 1 {
        return true;
    }
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut parent: Vec<usize> = (0..d).collect();
    for &(a, b) in edges {
        let ra = find(&mut parent, a - 1);
        let rb = find(&mut parent, b - 1);
        parent[ra] = rb;
    }
    let root = find(&mut parent, 0);
    (1..d).all(|x| find(&mut parent, x) == root)
}

/// Membership of an integer point in the order polytope `O_t(P)`:
/// `0 <= z_i <= t` and `z_a <= z_b` for `a <_P b`.
pub fn order_polytope_contains(poset: &Poset, t: i64, point: &[i64]) -> bool {
    if point.len() != poset.ground_size() {
        return false;
    }
    if point.iter().any(|&z| z < 0 || z > t) {
        return false;
    }
    poset
        .relation_pairs()
        .iter()
        .all(|&(a, b)| point[a - 1] <= point[b - 1])
}

/// Rational-point variant of [`order_polytope_contains`].
pub fn order_polytope_contains_rational(poset: &Poset, t: &BigRational, point: &[BigRational]) -> bool {
    if point.len() != poset.ground_size() {
        return false;
    }
    if point.iter().any(|z| z.is_negative() || z > t) {
        return false;
    }
    poset
        .relation_pairs()
        .iter()
        .all(|&(a, b)| point[a - 1] <= point[b - 1])
}

/// Outcome of an echelon-form test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EchelonCheck {
    Echelon,
    /// A support entry violating some `i_a <= i_b` constraint.
    Violation { index: Vec<usize> },
}

impl EchelonCheck {
    pub fn is_echelon(&self) -> bool {
        matches!(self, EchelonCheck::Echelon)
    }
}

/// Tests whether `t` is in P-echelon form. The poset must have a connected
/// Hasse diagram; the echelon determinant shortcut is wrong without it.
///
/// Only the pairwise constraints `i_a <= i_b` are checked: tensor indices
/// already live in `[1, n]`, and shifting the polytope's `[0, t]` box onto
/// them leaves the binding order constraints unchanged.
pub fn is_echelon_form(t: &Tensor, poset: &Poset) -> Result<EchelonCheck, OrderError> {
    if poset.ground_size() != t.order() {
        return Err(OrderError::DimensionMismatch {
            poset: poset.ground_size(),
            tensor: t.order(),
        });
    }
    if !poset.hasse_connected() {
        return Err(OrderError::DisconnectedPoset);
    }
    let pairs = poset.relation_pairs();
    for (off, idx) in IndexIter::new(t.order(), t.side()).enumerate() {
        if t.entries()[off].is_zero() {
            continue;
        }
        if pairs.iter().any(|&(a, b)| idx[a - 1] > idx[b - 1]) {
            return Ok(EchelonCheck::Violation { index: idx });
        }
    }
    Ok(EchelonCheck::Echelon)
}

/// Hyperdeterminant of a tensor in P-echelon form: the product of the
/// diagonal entries, in O(n) ring multiplications.
pub fn echelon_det(t: &Tensor, poset: &Poset) -> Result<RingValue, OrderError> {
    match is_echelon_form(t, poset)? {
        EchelonCheck::Echelon => {}
        EchelonCheck::Violation { index } => return Err(OrderError::NotEchelon { index }),
    }
    let mut acc = t.spec().one();
    for i in 1..=t.side() {
        acc = acc.mul(t.get(&vec![i; t.order()]).expect("diagonal in bounds"));
    }
    Ok(acc)
}

/// Searches for a connected poset `P` with `t` in P-echelon form.
///
/// Candidate cover sets are drawn from the pairs compatible with the
/// tensor's support and enumerated by increasing size, lexicographically
/// within a size; the first acyclic connected candidate whose closure
/// stays compatible wins. The result is therefore deterministic: the
/// minimal cover set in (size, lex) order.
pub fn find_echelon_poset(t: &Tensor, budget: &Budget) -> Result<Option<Poset>, OrderError> {
    let d = t.order();
    if d > 16 {
        return Err(OrderError::BudgetExceeded { needed: u64::MAX, budget: budget.terms });
    }
    // compatible[a][b]: every support tuple satisfies i_a <= i_b
    let mut compatible = vec![vec![true; d]; d];
    for (off, idx) in IndexIter::new(d, t.side()).enumerate() {
        if t.entries()[off].is_zero() {
            continue;
        }
        for a in 0..d {
            for b in 0..d {
                if a != b && idx[a] > idx[b] {
                    compatible[a][b] = false;
                }
            }
        }
    }
    let universe: Vec<(usize, usize)> = (1..=d)
        .flat_map(|a| (1..=d).map(move |b| (a, b)))
        .filter(|&(a, b)| a != b && compatible[a - 1][b - 1])
        .collect();
    if universe.len() < d.saturating_sub(1) {
        return Ok(None); // too few edges to connect the Hasse diagram
    }
    let subsets = count_subsets_up_to(universe.len());
    if subsets > budget.terms {
        return Err(OrderError::BudgetExceeded { needed: subsets, budget: budget.terms });
    }
    // connectivity needs at least d-1 covers
    for size in d.saturating_sub(1)..=universe.len() {
        let mut comb: Vec<usize> = (0..size).collect();
        loop {
            let covers: Vec<(usize, usize)> = comb.iter().map(|&i| universe[i]).collect();
            if let Ok(poset) = Poset::new(d, covers) {
                if poset.hasse_connected()
                    && poset
                        .relation_pairs()
                        .iter()
                        .all(|&(a, b)| compatible[a - 1][b - 1])
                {
                    return Ok(Some(poset));
                }
            }
            // next combination in lexicographic order
            let mut i = size;
            let mut advanced = false;
            while i > 0 {
                i -= 1;
                if comb[i] < universe.len() - (size - i) {
                    comb[i] += 1;
                    for j in i + 1..size {
                        comb[j] = comb[j - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }
    Ok(None)
}

fn count_subsets_up_to(len: usize) -> u64 {
    if len >= 63 {
        u64::MAX
    } else {
        1u64 << len
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperdet::hyperdet_naive;
    use crate::ring::RingSpec;

    fn q() -> RingSpec {
        RingSpec::Rationals
    }

    #[test]
    fn zigzag_poset_is_valid_and_connected() {
        let p = Poset::new(4, vec![(2, 1), (2, 3), (4, 3)]).unwrap();
        assert!(p.hasse_connected());
        assert!(p.less(2, 1));
        assert!(!p.less(1, 2));
        assert!(!p.less(1, 4));
    }

    #[test]
    fn chain_closure_is_total() {
        let p = Poset::chain(4);
        assert!(p.hasse_connected());
        assert!(p.less(1, 4));
        assert!(!p.less(4, 1));
    }

    #[test]
    fn isolated_vertices_disconnect() {
        let p = Poset::new(4, vec![(1, 2)]).unwrap();
        assert!(!p.hasse_connected());
    }

    #[test]
    fn cycles_are_rejected() {
        assert!(matches!(
            Poset::new(3, vec![(1, 2), (2, 3), (3, 1)]),
            Err(OrderError::CycleDetected)
        ));
        assert!(matches!(
            Poset::new(2, vec![(1, 1)]),
            Err(OrderError::PairOutOfRange { .. })
        ));
    }

    #[test]
    fn polytope_membership() {
        let chain = Poset::chain(2);
        for c in 0..=2 {
            assert!(order_polytope_contains(&chain, 2, &[c, c]));
        }
        assert!(!order_polytope_contains(&chain, 2, &[2, 1]));
        assert!(!order_polytope_contains(&chain, 2, &[0, 3]));
        let zigzag = Poset::new(4, vec![(2, 1), (2, 3), (4, 3)]).unwrap();
        assert!(order_polytope_contains(&zigzag, 3, &[3, 1, 2, 1]));
        assert!(!order_polytope_contains(&zigzag, 3, &[1, 2, 2, 1]));
    }

    #[test]
    fn closure_and_covers_agree_on_membership() {
        // membership is the same whether checked against covers plus
        // transitivity or against the cached closure
        let p = Poset::new(3, vec![(1, 2), (2, 3)]).unwrap();
        let points = [[0, 1, 2], [2, 1, 0], [1, 1, 1], [0, 2, 1]];
        for pt in points {
            let by_closure = order_polytope_contains(&p, 2, &pt);
            let by_covers = pt.iter().all(|&z| (0..=2).contains(&z))
                && pt[0] <= pt[1]
                && pt[1] <= pt[2];
            assert_eq!(by_closure, by_covers);
        }
    }

    #[test]
    fn upper_triangular_matrix_is_chain_echelon() {
        let t = Tensor::new(
            2,
            2,
            q(),
            vec![q().from_i64(1), q().from_i64(5), q().from_i64(0), q().from_i64(3)],
        )
        .unwrap();
        let chain = Poset::chain(2);
        assert!(is_echelon_form(&t, &chain).unwrap().is_echelon());
        assert_eq!(echelon_det(&t, &chain).unwrap(), q().from_i64(3));
        assert_eq!(hyperdet_naive(&t).unwrap(), q().from_i64(3));
    }

    #[test]
    fn diagonal_identity_is_echelon_for_any_connected_poset() {
        let i = Tensor::diagonal_identity(4, 3, q());
        for covers in [vec![(1, 2), (1, 3), (1, 4)], vec![(2, 1), (2, 3), (4, 3)]] {
            let p = Poset::new(4, covers).unwrap();
            assert!(is_echelon_form(&i, &p).unwrap().is_echelon());
            assert!(echelon_det(&i, &p).unwrap().is_one());
        }
    }

    #[test]
    fn violation_reports_the_offending_index() {
        let t = Tensor::zeros(2, 2, q()).set(&[2, 1], q().one()).unwrap();
        let chain = Poset::chain(2);
        match is_echelon_form(&t, &chain).unwrap() {
            EchelonCheck::Violation { index } => assert_eq!(index, vec![2, 1]),
            EchelonCheck::Echelon => panic!("lower entry violates the chain"),
        }
        assert!(matches!(echelon_det(&t, &chain), Err(OrderError::NotEchelon { .. })));
    }

    #[test]
    fn disconnected_poset_is_rejected() {
        let t = Tensor::diagonal_identity(4, 2, q());
        let p = Poset::new(4, vec![(1, 2)]).unwrap();
        assert!(matches!(is_echelon_form(&t, &p), Err(OrderError::DisconnectedPoset)));
    }

    #[test]
    fn find_poset_for_upper_triangular() {
        let t = Tensor::new(
            2,
            2,
            q(),
            vec![q().from_i64(1), q().from_i64(5), q().from_i64(0), q().from_i64(3)],
        )
        .unwrap();
        let p = find_echelon_poset(&t, &Budget::default()).unwrap().unwrap();
        assert_eq!(p.covers(), &[(1, 2)]);
    }

    #[test]
    fn find_poset_for_diagonal_identity_is_lex_minimal() {
        let i = Tensor::diagonal_identity(3, 2, q());
        let p = find_echelon_poset(&i, &Budget::default()).unwrap().unwrap();
        assert_eq!(p.covers(), &[(1, 2), (1, 3)]);
    }

    #[test]
    fn dense_tensor_has_no_echelon_poset() {
        let mut t = Tensor::zeros(2, 2, q());
        for idx in [[1, 1], [1, 2], [2, 1], [2, 2]] {
            t = t.set(&idx, q().one()).unwrap();
        }
        assert!(find_echelon_poset(&t, &Budget::default()).unwrap().is_none());
    }

    #[test]
    fn zigzag_example_support_pattern() {
        // T(i1, i2, i3, i4) = 0 unless i1 >= i2 <= i3 >= i4
        let p = Poset::new(4, vec![(2, 1), (2, 3), (4, 3)]).unwrap();
        let mut t = Tensor::zeros(4, 2, q());
        for idx in IndexIter::new(4, 2) {
            if idx[1] <= idx[0] && idx[1] <= idx[2] && idx[3] <= idx[2] {
                t = t.set(&idx, q().one()).unwrap();
            }
        }
        assert!(is_echelon_form(&t, &p).unwrap().is_echelon());
        assert_eq!(echelon_det(&t, &p).unwrap(), hyperdet_naive(&t).unwrap());
    }
}
