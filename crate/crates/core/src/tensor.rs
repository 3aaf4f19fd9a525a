//! Dense cubical d-tensors and the constructions built from them.
//!
//! A tensor is a function `T : [n]^d -> R` stored densely in row-major
//! lexicographic index order. Public indices are 1-based, matching the
//! usual mathematical convention; the layout contract is
//! `offset(i_1, ..., i_d) = sum_k (i_k - 1) * n^(d-k)`, which keeps golden
//! files portable across implementations.
//!
//! Degenerate shapes are permitted: order `d = 0` (a scalar, one entry)
//! and side `n = 0` (no entries) both arise naturally as empty minors and
//! as the neutral summand of [`Tensor::direct_sum`].

use std::fmt;

use crate::ring::{RingSpec, RingValue};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TensorError {
    ShapeMismatch(String),
    IndexOutOfBounds { index: Vec<usize>, n: usize, d: usize },
    SpecMismatch,
}

impl fmt::Display for TensorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TensorError::ShapeMismatch(msg) => write!(f, "shape mismatch: {}", msg),
            TensorError::IndexOutOfBounds { index, n, d } => {
                write!(f, "index {:?} out of bounds for side {} order {}", index, n, d)
            }
            TensorError::SpecMismatch => write!(f, "tensors live in different rings"),
        }
    }
}

impl std::error::Error for TensorError {}

/// A square subtensor selector: one strictly increasing subset of `[n]`
/// per mode, all of equal cardinality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubtensorSelector {
    index_sets: Vec<Vec<usize>>,
}

impl SubtensorSelector {
    pub fn new(index_sets: Vec<Vec<usize>>, n: usize) -> Result<Self, TensorError> {
        let k = index_sets.first().map_or(0, |s| s.len());
        for set in &index_sets {
            if set.len() != k {
                return Err(TensorError::ShapeMismatch(
                    "selector index sets must have equal cardinality".into(),
                ));
            }
            for w in set.windows(2) {
                if w[0] >= w[1] {
                    return Err(TensorError::ShapeMismatch(
                        "selector index sets must be strictly increasing".into(),
                    ));
                }
            }
            if set.iter().any(|&i| i < 1 || i > n) {
                return Err(TensorError::IndexOutOfBounds {
                    index: set.clone(),
                    n,
                    d: index_sets.len(),
                });
            }
        }
        Ok(SubtensorSelector { index_sets })
    }

    /// The full selector `([n], ..., [n])`.
    pub fn full(d: usize, n: usize) -> Self {
        SubtensorSelector {
            index_sets: vec![(1..=n).collect(); d],
        }
    }

    pub fn index_sets(&self) -> &[Vec<usize>] {
        &self.index_sets
    }

    /// Cardinality shared by all index sets.
    pub fn side(&self) -> usize {
        self.index_sets.first().map_or(0, |s| s.len())
    }
}

/// Dense d-tensor with side `n` over one ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tensor {
    d: usize,
    n: usize,
    spec: RingSpec,
    entries: Vec<RingValue>,
}

/// `n^d` with overflow capping well above any dense-storage scale.
pub(crate) fn pow_len(n: usize, d: usize) -> usize {
    (n as u64).checked_pow(d as u32).map_or(usize::MAX, |v| v as usize)
}

impl Tensor {
    /// Builds a tensor from entries listed in lexicographic index order.
    pub fn new(d: usize, n: usize, spec: RingSpec, entries: Vec<RingValue>) -> Result<Self, TensorError> {
        if entries.len() != pow_len(n, d) {
            return Err(TensorError::ShapeMismatch(format!(
                "expected {} entries for side {} order {}, got {}",
                pow_len(n, d),
                n,
                d,
                entries.len()
            )));
        }
        if entries.iter().any(|e| e.spec() != spec) {
            return Err(TensorError::SpecMismatch);
        }
        Ok(Tensor { d, n, spec, entries })
    }

    /// The all-zero tensor.
    pub fn zeros(d: usize, n: usize, spec: RingSpec) -> Self {
        Tensor {
            d,
            n,
            spec,
            entries: vec![spec.zero(); pow_len(n, d)],
        }
    }

    /// The diagonal identity: 1 at `(i, ..., i)`, 0 elsewhere.
    pub fn diagonal_identity(d: usize, n: usize, spec: RingSpec) -> Self {
        let mut t = Tensor::zeros(d, n, spec);
        for i in 1..=n {
            let off = t.offset_of(&vec![i; d]).expect("diagonal in bounds");
            t.entries[off] = spec.one();
        }
        t
    }

    /// Diagonal tensor with the given diagonal values.
    pub fn diagonal(d: usize, values: &[RingValue], spec: RingSpec) -> Result<Self, TensorError> {
        let n = values.len();
        let mut t = Tensor::zeros(d, n, spec);
        for (i, v) in values.iter().enumerate() {
            if v.spec() != spec {
                return Err(TensorError::SpecMismatch);
            }
            let off = t.offset_of(&vec![i + 1; d]).expect("diagonal in bounds");
            t.entries[off] = v.clone();
        }
        Ok(t)
    }

    pub fn order(&self) -> usize {
        self.d
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn spec(&self) -> RingSpec {
        self.spec
    }

    pub fn entries(&self) -> &[RingValue] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    fn offset_of(&self, index: &[usize]) -> Result<usize, TensorError> {
        if index.len() != self.d || index.iter().any(|&i| i < 1 || i > self.n) {
            return Err(TensorError::IndexOutOfBounds {
                index: index.to_vec(),
                n: self.n,
                d: self.d,
            });
        }
        let mut off = 0;
        for &i in index {
            off = off * self.n + (i - 1);
        }
        Ok(off)
    }

    /// Entry at a 1-based index tuple.
    pub fn get(&self, index: &[usize]) -> Result<&RingValue, TensorError> {
        Ok(&self.entries[self.offset_of(index)?])
    }

    /// Returns a copy with the entry at `index` replaced.
    pub fn set(&self, index: &[usize], value: RingValue) -> Result<Self, TensorError> {
        if value.spec() != self.spec {
            return Err(TensorError::SpecMismatch);
        }
        let off = self.offset_of(index)?;
        let mut out = self.clone();
        out.entries[off] = value;
        Ok(out)
    }

    /// All 1-based index tuples in lexicographic (storage) order.
    pub fn indices(&self) -> IndexIter {
        IndexIter::new(self.d, self.n)
    }

    /// Entrywise sum.
    pub fn add(&self, other: &Self) -> Result<Self, TensorError> {
        self.same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        Ok(Tensor { d: self.d, n: self.n, spec: self.spec, entries })
    }

    /// Entrywise difference.
    pub fn sub(&self, other: &Self) -> Result<Self, TensorError> {
        self.same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.sub(b))
            .collect();
        Ok(Tensor { d: self.d, n: self.n, spec: self.spec, entries })
    }

    /// Scales every entry by `c`.
    pub fn scale(&self, c: &RingValue) -> Result<Self, TensorError> {
        if c.spec() != self.spec {
            return Err(TensorError::SpecMismatch);
        }
        let entries = self.entries.iter().map(|a| a.mul(c)).collect();
        Ok(Tensor { d: self.d, n: self.n, spec: self.spec, entries })
    }

    fn same_shape(&self, other: &Self) -> Result<(), TensorError> {
        if self.spec != other.spec {
            return Err(TensorError::SpecMismatch);
        }
        if self.d != other.d || self.n != other.n {
            return Err(TensorError::ShapeMismatch(format!(
                "({}, {}) vs ({}, {})",
                self.d, self.n, other.d, other.n
            )));
        }
        Ok(())
    }

    /// The slice `T^(k)_layer`: order d-1, obtained by fixing coordinate
    /// `direction` (1-based) to `layer`.
    pub fn slice(&self, direction: usize, layer: usize) -> Result<Self, TensorError> {
        self.check_direction_layer(direction, layer)?;
        let mut out = Tensor::zeros(self.d - 1, self.n, self.spec);
        let mut idx = vec![1usize; self.d];
        for (sub_off, sub_idx) in IndexIter::new(self.d - 1, self.n).enumerate() {
            embed_index(&mut idx, &sub_idx, direction, layer);
            let off = self.offset_of(&idx).expect("embedded index in bounds");
            out.entries[sub_off] = self.entries[off].clone();
        }
        Ok(out)
    }

    /// Replaces the slice in `direction` at `layer` with an order-(d-1)
    /// tensor of the same side.
    pub fn set_slice(&self, direction: usize, layer: usize, slice: &Tensor) -> Result<Self, TensorError> {
        self.check_direction_layer(direction, layer)?;
        if slice.d != self.d - 1 || slice.n != self.n || slice.spec != self.spec {
            return Err(TensorError::ShapeMismatch(
                "slice must have order d-1 and the same side and ring".into(),
            ));
        }
        let mut out = self.clone();
        let mut idx = vec![1usize; self.d];
        for (sub_off, sub_idx) in IndexIter::new(self.d - 1, self.n).enumerate() {
            embed_index(&mut idx, &sub_idx, direction, layer);
            let off = self.offset_of(&idx).expect("embedded index in bounds");
            out.entries[off] = slice.entries[sub_off].clone();
        }
        Ok(out)
    }

    /// Swaps the two parallel slices at `layer_a` and `layer_b` in the
    /// given direction.
    pub fn swap_slices(&self, direction: usize, layer_a: usize, layer_b: usize) -> Result<Self, TensorError> {
        let a = self.slice(direction, layer_a)?;
        let b = self.slice(direction, layer_b)?;
        self.set_slice(direction, layer_a, &b)?.set_slice(direction, layer_b, &a)
    }

    fn check_direction_layer(&self, direction: usize, layer: usize) -> Result<(), TensorError> {
        if self.d == 0 || direction < 1 || direction > self.d || layer < 1 || layer > self.n {
            return Err(TensorError::IndexOutOfBounds {
                index: vec![direction, layer],
                n: self.n,
                d: self.d,
            });
        }
        Ok(())
    }

    /// The square subtensor `T_I`, with indices relabeled order-preservingly.
    pub fn subtensor(&self, sel: &SubtensorSelector) -> Result<Self, TensorError> {
        if sel.index_sets.len() != self.d {
            return Err(TensorError::ShapeMismatch(format!(
                "selector has {} index sets for an order-{} tensor",
                sel.index_sets.len(),
                self.d
            )));
        }
        for set in &sel.index_sets {
            if set.iter().any(|&i| i < 1 || i > self.n) {
                return Err(TensorError::IndexOutOfBounds {
                    index: set.clone(),
                    n: self.n,
                    d: self.d,
                });
            }
        }
        let k = sel.side();
        let mut out = Tensor::zeros(self.d, k, self.spec);
        let mut idx = vec![1usize; self.d];
        for (sub_off, sub_idx) in IndexIter::new(self.d, k).enumerate() {
            for (m, &a) in sub_idx.iter().enumerate() {
                idx[m] = sel.index_sets[m][a - 1];
            }
            let off = self.offset_of(&idx).expect("selected index in bounds");
            out.entries[sub_off] = self.entries[off].clone();
        }
        Ok(out)
    }

    /// Change of basis `(A_1, ..., A_d) . T`, evaluated as d successive
    /// single-mode contractions (cost O(d n^(d+1)) instead of O(n^(2d))).
    pub fn multilinear_product(&self, matrices: &[Tensor]) -> Result<Self, TensorError> {
        if matrices.len() != self.d {
            return Err(TensorError::ShapeMismatch(format!(
                "need {} matrices, got {}",
                self.d,
                matrices.len()
            )));
        }
        for a in matrices {
            if a.d != 2 || a.n != self.n {
                return Err(TensorError::ShapeMismatch(
                    "basis-change factors must be n x n matrices".into(),
                ));
            }
            if a.spec != self.spec {
                return Err(TensorError::SpecMismatch);
            }
        }
        let mut out = self.clone();
        for (mode, a) in matrices.iter().enumerate() {
            out = out.contract_mode(a, mode);
        }
        Ok(out)
    }

    /// Applies the matrix `a` to one 0-based mode:
    /// `R(.., i, ..) = sum_j a(i, j) T(.., j, ..)`.
    fn contract_mode(&self, a: &Tensor, mode: usize) -> Tensor {
        let n = self.n;
        let stride = pow_len(n, self.d - 1 - mode);
        let block = stride * n;
        let mut out = Tensor::zeros(self.d, n, self.spec);
        let mut base_prefix = 0;
        while base_prefix < self.entries.len() {
            for suffix in 0..stride {
                let base = base_prefix + suffix;
                for i in 0..n {
                    let mut acc = self.spec.zero();
                    for j in 0..n {
                        let av = &a.entries[i * n + j];
                        if av.is_zero() {
                            continue;
                        }
                        acc = acc.add(&av.mul(&self.entries[base + j * stride]));
                    }
                    out.entries[base + i * stride] = acc;
                }
            }
            base_prefix += block;
        }
        out
    }

    /// Outer product: `(X ⊗ Y)(i, j) = X(i) Y(j)` with the index blocks
    /// concatenated.
    pub fn outer_product(&self, other: &Self) -> Result<Self, TensorError> {
        if self.n != other.n {
            return Err(TensorError::ShapeMismatch("outer product needs equal sides".into()));
        }
        if self.spec != other.spec {
            return Err(TensorError::SpecMismatch);
        }
        let mut entries = Vec::with_capacity(self.entries.len() * other.entries.len());
        for x in &self.entries {
            for y in &other.entries {
                entries.push(x.mul(y));
            }
        }
        Ok(Tensor {
            d: self.d + other.d,
            n: self.n,
            spec: self.spec,
            entries,
        })
    }

    /// Contraction product: sums the last mode of `self` against the first
    /// mode of `other`. At orders (2, 2) this is the matrix product.
    pub fn contraction_product(&self, other: &Self) -> Result<Self, TensorError> {
        if self.d < 1 || other.d < 1 {
            return Err(TensorError::ShapeMismatch("contraction needs order >= 1".into()));
        }
        if self.n != other.n {
            return Err(TensorError::ShapeMismatch("contraction needs equal sides".into()));
        }
        if self.spec != other.spec {
            return Err(TensorError::SpecMismatch);
        }
        let n = self.n;
        let rows = pow_len(n, self.d - 1);
        let cols = pow_len(n, other.d - 1);
        let mut entries = Vec::with_capacity(rows * cols);
        for ix in 0..rows {
            for jy in 0..cols {
                let mut acc = self.spec.zero();
                for l in 0..n {
                    acc = acc.add(&self.entries[ix * n + l].mul(&other.entries[l * cols + jy]));
                }
                entries.push(acc);
            }
        }
        Ok(Tensor {
            d: self.d + other.d - 2,
            n,
            spec: self.spec,
            entries,
        })
    }

    /// Direct sum: block placement on `[n]` and `[n+1, n+m]`, zero on all
    /// cross blocks. The side-0 tensor is the neutral element.
    pub fn direct_sum(&self, other: &Self) -> Result<Self, TensorError> {
        if self.d != other.d {
            return Err(TensorError::ShapeMismatch("direct sum needs equal orders".into()));
        }
        if self.spec != other.spec {
            return Err(TensorError::SpecMismatch);
        }
        let n = self.n;
        let m = other.n;
        let mut out = Tensor::zeros(self.d, n + m, self.spec);
        let mut idx = vec![1usize; self.d];
        for (off_x, x_idx) in IndexIter::new(self.d, n).enumerate() {
            idx.copy_from_slice(&x_idx);
            let off = out.offset_of(&idx).expect("block index in bounds");
            out.entries[off] = self.entries[off_x].clone();
        }
        for (off_y, y_idx) in IndexIter::new(self.d, m).enumerate() {
            for (t, &i) in idx.iter_mut().zip(y_idx.iter()) {
                *t = i + n;
            }
            let off = out.offset_of(&idx).expect("block index in bounds");
            out.entries[off] = other.entries[off_y].clone();
        }
        Ok(out)
    }

    /// Hat extension: `X̂(i_1, ..., i_d, i_(d+1)) = X(i_1, ..., i_d)` when
    /// `i_1 = i_(d+1)`, zero otherwise. Preserves the hyperdeterminant.
    pub fn hat_extension(&self) -> Self {
        let mut out = Tensor::zeros(self.d + 1, self.n, self.spec);
        for (off, idx) in IndexIter::new(self.d + 1, self.n).enumerate() {
            if idx[0] == idx[self.d] {
                let src = self.offset_of(&idx[..self.d]).expect("prefix in bounds");
                out.entries[off] = self.entries[src].clone();
            }
        }
        out
    }

    /// Coordinate permutation: `T'(i_1, ..., i_d) = T(i_(perm[1]), ..., i_(perm[d]))`
    /// for a 1-based permutation of `[d]`.
    pub fn mode_permute(&self, perm: &[usize]) -> Result<Self, TensorError> {
        if perm.len() != self.d {
            return Err(TensorError::ShapeMismatch("permutation length must equal order".into()));
        }
        let mut seen = vec![false; self.d];
        for &p in perm {
            if p < 1 || p > self.d || seen[p - 1] {
                return Err(TensorError::ShapeMismatch("not a permutation of [d]".into()));
            }
            seen[p - 1] = true;
        }
        let mut out = Tensor::zeros(self.d, self.n, self.spec);
        let mut src = vec![1usize; self.d];
        for (off, idx) in IndexIter::new(self.d, self.n).enumerate() {
            for (m, &p) in perm.iter().enumerate() {
                src[m] = idx[p - 1];
            }
            let src_off = self.offset_of(&src).expect("permuted index in bounds");
            out.entries[off] = self.entries[src_off].clone();
        }
        Ok(out)
    }

    /// Seeded random tensor with documented entry generation, drawn in
    /// lexicographic index order: residues `next_below(m)` for modular
    /// rings, integers in `[-9, 9]` for ℤ, and fractions with numerator in
    /// `[-9, 9]` and denominator in `[1, 9]` for ℚ.
    pub fn random(d: usize, n: usize, spec: RingSpec, rng: &mut SplitMix64) -> Self {
        let entries = (0..pow_len(n, d))
            .map(|_| match spec {
                RingSpec::IntegersMod(m) | RingSpec::PrimeField(m) => {
                    spec.from_i64(rng.next_below(m) as i64)
                }
                RingSpec::Integers => spec.from_i64(rng.next_range_i64(-9, 9)),
                RingSpec::Rationals => {
                    let num = rng.next_range_i64(-9, 9);
                    let den = rng.next_below(9) + 1;
                    spec.parse_value(&format!("{}/{}", num, den)).expect("valid fraction")
                }
            })
            .collect();
        Tensor { d, n, spec, entries }
    }
}

fn embed_index(idx: &mut [usize], sub_idx: &[usize], direction: usize, layer: usize) {
    let mut s = 0;
    for (m, slot) in idx.iter_mut().enumerate() {
        if m == direction - 1 {
            *slot = layer;
        } else {
            *slot = sub_idx[s];
            s += 1;
        }
    }
}

/// Iterator over all 1-based index tuples of `[n]^d` in lexicographic order.
pub struct IndexIter {
    current: Vec<usize>,
    n: usize,
    done: bool,
}

impl IndexIter {
    pub fn new(d: usize, n: usize) -> Self {
        IndexIter {
            current: vec![1; d],
            n,
            done: n == 0 && d > 0,
        }
    }
}

impl Iterator for IndexIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        // odometer increment from the last coordinate
        let mut pos = self.current.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            if self.current[pos] < self.n {
                self.current[pos] += 1;
                for c in &mut self.current[pos + 1..] {
                    *c = 1;
                }
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> RingSpec {
        RingSpec::Rationals
    }

    fn qt(d: usize, n: usize, vals: &[i64]) -> Tensor {
        let entries = vals.iter().map(|&v| q().from_i64(v)).collect();
        Tensor::new(d, n, q(), entries).unwrap()
    }

    #[test]
    fn row_major_layout() {
        let t = qt(2, 2, &[1, 2, 3, 4]);
        assert_eq!(*t.get(&[1, 2]).unwrap(), q().from_i64(2));
        assert_eq!(*t.get(&[2, 1]).unwrap(), q().from_i64(3));
    }

    #[test]
    fn get_set_round_trip() {
        let t = qt(3, 2, &[0; 8]);
        let t2 = t.set(&[2, 1, 2], q().from_i64(7)).unwrap();
        assert_eq!(*t2.get(&[2, 1, 2]).unwrap(), q().from_i64(7));
        assert!(t.get(&[0, 1, 1]).is_err());
        assert!(t.get(&[1, 1, 3]).is_err());
    }

    #[test]
    fn diagonal_identity_entries() {
        let i = Tensor::diagonal_identity(3, 2, q());
        assert!(i.get(&[1, 1, 1]).unwrap().is_one());
        assert!(i.get(&[1, 2, 1]).unwrap().is_zero());
        let i4 = Tensor::diagonal_identity(4, 2, RingSpec::prime_field(3).unwrap());
        let nonzero = i4.entries().iter().filter(|e| !e.is_zero()).count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn slices_partition_the_tensor() {
        let t = qt(2, 3, &[1, 2, 3, 4, 5, 6, 7, 8, 9]);
        let row = t.slice(1, 2).unwrap();
        assert_eq!(row.entries(), qt(1, 3, &[4, 5, 6]).entries());
        // reassembling all slices in any direction reproduces T
        for dir in 1..=2 {
            let mut rebuilt = Tensor::zeros(2, 3, q());
            for layer in 1..=3 {
                rebuilt = rebuilt.set_slice(dir, layer, &t.slice(dir, layer).unwrap()).unwrap();
            }
            assert_eq!(rebuilt, t);
        }
    }

    #[test]
    fn slice_of_diagonal_identity() {
        let s = Tensor::diagonal_identity(3, 2, q()).slice(1, 1).unwrap();
        assert_eq!(s, qt(2, 2, &[1, 0, 0, 0]));
    }

    #[test]
    fn subtensor_full_and_singleton() {
        let t = qt(2, 3, &[1, 2, 3, 4, 5, 6, 7, 8, 9]);
        assert_eq!(t.subtensor(&SubtensorSelector::full(2, 3)).unwrap(), t);
        let single = SubtensorSelector::new(vec![vec![2], vec![3]], 3).unwrap();
        let s = t.subtensor(&single).unwrap();
        assert_eq!(*s.get(&[1, 1]).unwrap(), q().from_i64(6));
    }

    #[test]
    fn selector_validation() {
        assert!(SubtensorSelector::new(vec![vec![1, 2], vec![2]], 3).is_err());
        assert!(SubtensorSelector::new(vec![vec![2, 1]], 3).is_err());
        assert!(SubtensorSelector::new(vec![vec![1, 4]], 3).is_err());
    }

    #[test]
    fn multilinear_identity_is_noop() {
        let t = qt(3, 2, &[1, 2, 3, 4, 5, 6, 7, 8]);
        let id = Tensor::diagonal_identity(2, 2, q());
        let r = t.multilinear_product(&[id.clone(), id.clone(), id]).unwrap();
        assert_eq!(r, t);
    }

    #[test]
    fn multilinear_matches_matrix_congruence() {
        // d = 2: (A, B) . T = A T B^T
        let t = qt(2, 2, &[1, 2, 3, 4]);
        let a = qt(2, 2, &[1, 1, 0, 1]);
        let b = qt(2, 2, &[2, 0, 1, 1]);
        let lhs = t.multilinear_product(&[a.clone(), b.clone()]).unwrap();
        let bt = b.mode_permute(&[2, 1]).unwrap();
        let rhs = a.contraction_product(&t).unwrap().contraction_product(&bt).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn outer_product_replicates_along_new_mode() {
        let x = qt(2, 2, &[1, 2, 3, 4]);
        let ones = qt(1, 2, &[1, 1]);
        let t = x.outer_product(&ones).unwrap();
        for idx in t.indices() {
            assert_eq!(t.get(&idx).unwrap(), x.get(&idx[..2]).unwrap());
        }
    }

    #[test]
    fn contraction_is_matrix_product_at_order_two() {
        let x = qt(2, 2, &[1, 2, 3, 4]);
        let y = qt(2, 2, &[5, 6, 7, 8]);
        let xy = x.contraction_product(&y).unwrap();
        assert_eq!(xy, qt(2, 2, &[19, 22, 43, 50]));
        let id = Tensor::diagonal_identity(2, 2, q());
        assert_eq!(x.contraction_product(&id).unwrap(), x);
    }

    #[test]
    fn direct_sum_blocks() {
        let x = qt(2, 1, &[5]);
        let y = qt(2, 2, &[1, 2, 3, 4]);
        let s = x.direct_sum(&y).unwrap();
        assert_eq!(s, qt(2, 3, &[5, 0, 0, 0, 1, 2, 0, 3, 4]));
        // the side-0 tensor is neutral
        let empty = Tensor::zeros(2, 0, q());
        assert_eq!(y.direct_sum(&empty).unwrap(), y);
        assert_eq!(empty.direct_sum(&y).unwrap(), y);
    }

    #[test]
    fn direct_sum_cross_blocks_are_zero() {
        let x = qt(2, 2, &[1, 1, 1, 1]);
        let y = qt(2, 2, &[2, 2, 2, 2]);
        let s = x.direct_sum(&y).unwrap();
        let mut nonzero = 0;
        for idx in s.indices() {
            let in_x = idx.iter().all(|&i| i <= 2);
            let in_y = idx.iter().all(|&i| i > 2);
            if !in_x && !in_y {
                assert!(s.get(&idx).unwrap().is_zero());
            } else {
                nonzero += 1;
            }
        }
        assert_eq!(nonzero, 4 + 4);
    }

    #[test]
    fn hat_of_vector_is_diagonal_matrix() {
        let v = qt(1, 3, &[4, 5, 6]);
        let hat = v.hat_extension();
        assert_eq!(hat, qt(2, 3, &[4, 0, 0, 0, 5, 0, 0, 0, 6]));
    }

    #[test]
    fn hat_of_diagonal_identity() {
        let i = Tensor::diagonal_identity(3, 2, q());
        assert_eq!(i.hat_extension(), Tensor::diagonal_identity(4, 2, q()));
    }

    #[test]
    fn mode_permute_transpose() {
        let t = qt(2, 2, &[1, 2, 3, 4]);
        assert_eq!(t.mode_permute(&[1, 2]).unwrap(), t);
        assert_eq!(t.mode_permute(&[2, 1]).unwrap(), qt(2, 2, &[1, 3, 2, 4]));
        assert!(t.mode_permute(&[1, 1]).is_err());
    }

    #[test]
    fn tensors_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<Tensor>();
        assert_send_sync::<SubtensorSelector>();
    }

    #[test]
    fn index_iter_lexicographic() {
        let idx: Vec<_> = IndexIter::new(2, 2).collect();
        assert_eq!(idx, vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]);
        assert_eq!(IndexIter::new(0, 3).count(), 1);
        assert_eq!(IndexIter::new(2, 0).count(), 0);
    }
}
