//! Hyperdeterminant engines and the expansion formulas around them.
//!
//! The hyperdeterminant of a d-tensor is
//!
//! ```text
//! det(T) = sum over permutations s_2, ..., s_d of [n] of
//!          sgn(s_2) ... sgn(s_d) * prod_i T(i, s_2(i), ..., s_d(i))
//! ```
//!
//! which coincides with the matrix determinant at d = 2 and stays nonzero
//! (and useful) for odd d as well. Two engines are provided:
//!
//! * [`hyperdet_naive`] sums all `(n!)^(d-1)` permutation tuples directly.
//!   It is deliberately unsophisticated: it anchors everything else.
//! * [`hyperdet_dp`] runs a dynamic program over used-value subsets, one
//!   per permutation slot, processing the first coordinate row by row.
//!   State count is `sum_i binom(n, i)^(d-1)` instead of `(n!)^(d-1)`.
//!
//! The test suites cross-check the engines against each other and against
//! the Laplace and minor-summation expansions on every shape they share.

use std::fmt;

use crate::ring::{RingSpec, RingValue};
use crate::tensor::{pow_len, IndexIter, SubtensorSelector, Tensor};
use crate::Budget;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HyperdetError {
    /// The projected work exceeds the configured budget; carries the
    /// estimate that tripped it.
    BudgetExceeded { needed: u64, budget: u64 },
    /// An identity stated for even order was invoked at odd order.
    OddOrder { d: usize },
    ShapeMismatch(String),
    /// `reduce_repeated_index` was applied to a tensor with support off
    /// the `i_1 = i_2` plane.
    SupportViolation { index: Vec<usize> },
}

impl fmt::Display for HyperdetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HyperdetError::BudgetExceeded { needed, budget } => {
                write!(f, "budget exceeded: needs about {} units, limit {}", needed, budget)
            }
            HyperdetError::OddOrder { d } => {
                write!(f, "identity requires even order, tensor has order {}", d)
            }
            HyperdetError::ShapeMismatch(msg) => write!(f, "shape mismatch: {}", msg),
            HyperdetError::SupportViolation { index } => {
                write!(f, "nonzero entry at {:?} violates the i1 = i2 support condition", index)
            }
        }
    }
}

impl std::error::Error for HyperdetError {}

/// All permutations of `[n]` in lexicographic order, with signs.
fn permutations_with_signs(n: usize) -> Vec<(Vec<usize>, i8)> {
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (1..=n).collect();
    loop {
        out.push((perm.clone(), sign_of(&perm)));
        // next lexicographic permutation
        if n < 2 {
            break;
        }
        let mut i = n - 1;
        while i > 0 && perm[i - 1] >= perm[i] {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        let mut j = n - 1;
        while perm[j] <= perm[i - 1] {
            j -= 1;
        }
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
    out
}

/// Sign by inversion count; fine for the small n used here.
fn sign_of(perm: &[usize]) -> i8 {
    let mut inv = 0usize;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inv += 1;
            }
        }
    }
    if inv.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn factorial_u64(n: usize) -> Option<u64> {
    let mut acc = 1u64;
    for i in 2..=n as u64 {
        acc = acc.checked_mul(i)?;
    }
    Some(acc)
}

fn signed(spec: RingSpec, v: &RingValue, sign: i8) -> RingValue {
    debug_assert_eq!(v.spec(), spec);
    if sign < 0 {
        v.neg()
    } else {
        v.clone()
    }
}

/// Number of permutation tuples `(n!)^(d-1)`, or `None` on overflow.
fn naive_term_count(n: usize, d: usize) -> Option<u64> {
    let f = factorial_u64(n)?;
    let mut acc = 1u64;
    for _ in 1..d {
        acc = acc.checked_mul(f)?;
    }
    Some(acc)
}

/// Direct evaluation of the defining sum, in lexicographic tuple order.
pub fn hyperdet_naive(t: &Tensor) -> Result<RingValue, HyperdetError> {
    hyperdet_naive_budgeted(t, &Budget::default())
}

pub fn hyperdet_naive_budgeted(t: &Tensor, budget: &Budget) -> Result<RingValue, HyperdetError> {
    let n = t.side();
    let d = t.order();
    let spec = t.spec();
    let terms = naive_term_count(n, d).ok_or(HyperdetError::BudgetExceeded {
        needed: u64::MAX,
        budget: budget.terms,
    })?;
    if terms > budget.terms {
        return Err(HyperdetError::BudgetExceeded { needed: terms, budget: budget.terms });
    }
    if d == 0 {
        return Ok(t.entries()[0].clone());
    }
    let perms = permutations_with_signs(n);
    // odometer over the d-1 permutation slots, most significant first
    let slots = d - 1;
    let mut choice = vec![0usize; slots];
    let mut acc = spec.zero();
    let mut index = vec![0usize; d];
    loop {
        let mut sign = 1i8;
        for &c in &choice {
            sign *= perms[c].1;
        }
        let mut prod = spec.one();
        for i in 1..=n {
            index[0] = i;
            for (k, &c) in choice.iter().enumerate() {
                index[k + 1] = perms[c].0[i - 1];
            }
            let mut off = 0usize;
            for &ix in &index {
                off = off * n + (ix - 1);
            }
            prod = prod.mul(&t.entries()[off]);
        }
        acc = acc.add(&signed(spec, &prod, sign));
        // advance the odometer (last slot fastest, giving lexicographic order)
        let mut pos = slots;
        loop {
            if pos == 0 {
                return Ok(acc);
            }
            pos -= 1;
            if choice[pos] + 1 < perms.len() {
                choice[pos] += 1;
                for c in &mut choice[pos + 1..] {
                    *c = 0;
                }
                break;
            }
        }
    }
}

/// Dynamic-programming engine over used-value subsets.
///
/// A state at level `i` records, for each permutation slot `k = 2..d`, the
/// set of values already assigned to `s_k(1..i)`; the accumulated value is
/// the signed sum of all partial products reaching that state. Extending
/// slot `k` by value `j` flips the sign by the parity of `|{used > j}|`,
/// the number of inversions the new position creates.
pub fn hyperdet_dp(t: &Tensor) -> Result<RingValue, HyperdetError> {
    hyperdet_dp_budgeted(t, &Budget::default())
}

pub fn hyperdet_dp_budgeted(t: &Tensor, budget: &Budget) -> Result<RingValue, HyperdetError> {
    let n = t.side();
    let d = t.order();
    let spec = t.spec();
    if d == 0 {
        return Ok(t.entries()[0].clone());
    }
    if d == 1 {
        // single empty permutation tuple: the product of all entries
        let mut acc = spec.one();
        for e in t.entries() {
            acc = acc.mul(e);
        }
        return Ok(acc);
    }
    let slots = d - 1;
    let state_count = dp_state_count(n, slots).ok_or(HyperdetError::BudgetExceeded {
        needed: u64::MAX,
        budget: budget.states,
    })?;
    if state_count > budget.states {
        return Err(HyperdetError::BudgetExceeded { needed: state_count, budget: budget.states });
    }
    if n > 20 {
        // a level's rank lookup table is indexed by mask
        return Err(HyperdetError::BudgetExceeded { needed: u64::MAX, budget: budget.states });
    }

    // Levels are stored densely: a state at level i is one used-value mask
    // of weight i per permutation slot, addressed by the mixed-radix index
    // over per-slot combination ranks.
    let mut rank_of = vec![0u32; 1usize << n];
    let mut cur_combos: Vec<u32> = vec![0]; // weight-0 masks
    let mut level_vals: Vec<RingValue> = vec![spec.one()];
    let mut masks = vec![0u32; slots];
    let mut js = vec![0usize; slots];
    for i in 0..n {
        let next_combos = masks_of_weight(n, i + 1);
        for (r, &mask) in next_combos.iter().enumerate() {
            rank_of[mask as usize] = r as u32;
        }
        let cur_count = cur_combos.len();
        let next_count = next_combos.len();
        let next_size = next_count.pow(slots as u32);
        let mut next_vals = vec![spec.zero(); next_size];
        for (flat, value) in level_vals.iter().enumerate() {
            if value.is_zero() {
                continue;
            }
            let mut rest = flat;
            for k in (0..slots).rev() {
                masks[k] = cur_combos[rest % cur_count];
                rest /= cur_count;
            }
            // odometer over the unused values of every slot
            js.iter_mut().for_each(|j| *j = usize::MAX);
            let mut slot = 0usize;
            'outer: loop {
                if slot == slots {
                    // complete choice: entry offset, sign parity, new index
                    let mut off = i;
                    let mut new_flat = 0usize;
                    let mut parity = 0u32;
                    for (k, &j) in js.iter().enumerate() {
                        off = off * n + j;
                        parity += (masks[k] >> (j + 1)).count_ones();
                        new_flat = new_flat * next_count
                            + rank_of[(masks[k] | (1u32 << j)) as usize] as usize;
                    }
                    let entry = &t.entries()[off];
                    if !entry.is_zero() {
                        let term =
                            signed(spec, &value.mul(entry), if parity.is_multiple_of(2) { 1 } else { -1 });
                        next_vals[new_flat] = next_vals[new_flat].add(&term);
                    }
                    // backtrack to advance the last slot
                    slot -= 1;
                }
                // advance this slot's choice to its next unused value
                let used = masks[slot];
                let start = js[slot].wrapping_add(1);
                let mut found = false;
                for j in start..n {
                    if used >> j & 1 == 0 {
                        js[slot] = j;
                        found = true;
                        break;
                    }
                }
                if found {
                    slot += 1;
                    if slot < slots {
                        js[slot] = usize::MAX;
                    }
                } else {
                    if slot == 0 {
                        break 'outer;
                    }
                    js[slot] = usize::MAX;
                    slot -= 1;
                }
            }
        }
        level_vals = next_vals;
        cur_combos = next_combos;
    }
    // level n has the single all-used state
    Ok(level_vals.swap_remove(0))
}

/// All n-bit masks of the given weight, in increasing numeric order.
fn masks_of_weight(n: usize, w: usize) -> Vec<u32> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == w {
            out.push(mask);
        }
    }
    out
}

/// `sum_i binom(n, i)^slots`, or `None` on overflow.
fn dp_state_count(n: usize, slots: usize) -> Option<u64> {
    let mut total = 0u64;
    for i in 0..=n {
        let mut b = 1u64;
        for j in 0..i {
            b = b.checked_mul((n - j) as u64)?.checked_div((j + 1) as u64)?;
        }
        let mut p = 1u64;
        for _ in 0..slots {
            p = p.checked_mul(b)?;
        }
        total = total.checked_add(p)?;
    }
    Some(total)
}

/// First-slice Laplace expansion (even order): expands along the first
/// coordinate's layer 1, recursing on complements and handing subproblems
/// below the cutoff to the DP engine.
pub fn laplace_expand(t: &Tensor) -> Result<RingValue, HyperdetError> {
    laplace_expand_budgeted(t, &Budget::default())
}

pub fn laplace_expand_budgeted(t: &Tensor, budget: &Budget) -> Result<RingValue, HyperdetError> {
    let d = t.order();
    if d == 0 || !d.is_multiple_of(2) {
        return Err(HyperdetError::OddOrder { d });
    }
    // each recursion level above the cutoff multiplies the subproblem
    // count by m^(d-1)
    let mut estimate = 1u64;
    let mut m = t.side() as u64;
    while m > 2 {
        let mut level = 1u64;
        for _ in 1..d {
            level = level.checked_mul(m).ok_or(HyperdetError::BudgetExceeded {
                needed: u64::MAX,
                budget: budget.terms,
            })?;
        }
        estimate = estimate.checked_mul(level).ok_or(HyperdetError::BudgetExceeded {
            needed: u64::MAX,
            budget: budget.terms,
        })?;
        m -= 1;
    }
    if estimate > budget.terms {
        return Err(HyperdetError::BudgetExceeded { needed: estimate, budget: budget.terms });
    }
    laplace_recurse(t, budget)
}

fn laplace_recurse(t: &Tensor, budget: &Budget) -> Result<RingValue, HyperdetError> {
    let n = t.side();
    let d = t.order();
    let spec = t.spec();
    if n == 0 {
        return Ok(spec.one());
    }
    if n == 1 {
        return Ok(t.entries()[0].clone());
    }
    if n <= 2 {
        return hyperdet_dp_budgeted(t, budget);
    }
    let mut acc = spec.zero();
    let full: Vec<usize> = (1..=n).collect();
    for idx in IndexIter::new(d - 1, n) {
        // entry T(1, i_2, ..., i_d)
        let mut full_idx = Vec::with_capacity(d);
        full_idx.push(1);
        full_idx.extend_from_slice(&idx);
        let entry = t.get(&full_idx).expect("index in bounds");
        if entry.is_zero() {
            continue;
        }
        let mut sets = Vec::with_capacity(d);
        sets.push(full.iter().copied().filter(|&v| v != 1).collect::<Vec<_>>());
        for &i in &idx {
            sets.push(full.iter().copied().filter(|&v| v != i).collect::<Vec<_>>());
        }
        let sel = SubtensorSelector::new(sets, n).expect("complement selector");
        let minor = t.subtensor(&sel).expect("complement minor");
        let sub = laplace_recurse(&minor, budget)?;
        let sign = if (1 + idx.iter().sum::<usize>()) % 2 == 0 { 1 } else { -1 };
        acc = acc.add(&signed(spec, &entry.mul(&sub), sign));
    }
    Ok(acc)
}

/// Sign `epsilon_(I_1, ..., I_d)` from the minor-summation formula: the
/// product over modes of the sign of the permutation that concatenates the
/// sorted set with its sorted complement.
pub fn epsilon_sign(index_sets: &[Vec<usize>], n: usize) -> i8 {
    let mut sign = 1i8;
    for set in index_sets {
        let mut pi: Vec<usize> = set.clone();
        pi.extend((1..=n).filter(|i| !set.contains(i)));
        sign *= sign_of(&pi);
    }
    sign
}

/// One audited term of the minor-summation ledger.
#[derive(Debug, Clone)]
pub struct MinorTerm {
    pub selector: SubtensorSelector,
    pub epsilon: i8,
    pub det_x: RingValue,
    pub det_y: RingValue,
}

/// Result of [`minor_summation`]: the total plus the per-minor ledger.
#[derive(Debug, Clone)]
pub struct MinorSummation {
    pub total: RingValue,
    pub terms: Vec<MinorTerm>,
}

/// Minor-summation expansion of `det(X + Y)` (even order):
/// `sum_k sum_I eps_I det(X_I) det(Y_complement(I))` over all d-tuples of
/// k-subsets, for k in `k_range`. The full range reproduces `det(X + Y)`.
pub fn minor_summation(
    x: &Tensor,
    y: &Tensor,
    k_range: std::ops::RangeInclusive<usize>,
    budget: &Budget,
) -> Result<MinorSummation, HyperdetError> {
    let d = x.order();
    let n = x.side();
    if d == 0 || !d.is_multiple_of(2) {
        return Err(HyperdetError::OddOrder { d });
    }
    if y.order() != d || y.side() != n {
        return Err(HyperdetError::ShapeMismatch("summands must share shape".into()));
    }
    if y.spec() != x.spec() {
        return Err(HyperdetError::ShapeMismatch("summands must share the ring".into()));
    }
    let spec = x.spec();
    let mut count = 0u64;
    for k in k_range.clone() {
        let c = binomial_u64(n, k)
            .and_then(|b| {
                let mut p = 1u64;
                for _ in 0..d {
                    p = p.checked_mul(b)?;
                }
                Some(p)
            })
            .ok_or(HyperdetError::BudgetExceeded { needed: u64::MAX, budget: budget.terms })?;
        count = count
            .checked_add(c)
            .ok_or(HyperdetError::BudgetExceeded { needed: u64::MAX, budget: budget.terms })?;
    }
    if count > budget.terms {
        return Err(HyperdetError::BudgetExceeded { needed: count, budget: budget.terms });
    }

    let mut total = spec.zero();
    let mut terms = Vec::new();
    for k in k_range {
        if k > n {
            continue;
        }
        let subsets = k_subsets(n, k);
        let mut pick = vec![0usize; d];
        loop {
            let sets: Vec<Vec<usize>> = pick.iter().map(|&c| subsets[c].clone()).collect();
            let complements: Vec<Vec<usize>> = sets
                .iter()
                .map(|s| (1..=n).filter(|i| !s.contains(i)).collect())
                .collect();
            let eps = epsilon_sign(&sets, n);
            let sel_x = SubtensorSelector::new(sets, n).expect("valid selector");
            let sel_y = SubtensorSelector::new(complements, n).expect("valid selector");
            let det_x = hyperdet_dp_budgeted(&x.subtensor(&sel_x).expect("minor"), budget)?;
            let det_y = hyperdet_dp_budgeted(&y.subtensor(&sel_y).expect("minor"), budget)?;
            let contrib = signed(spec, &det_x.mul(&det_y), eps);
            total = total.add(&contrib);
            terms.push(MinorTerm { selector: sel_x, epsilon: eps, det_x, det_y });
            // advance selector odometer
            let mut advanced = false;
            let mut pos = d;
            while pos > 0 {
                pos -= 1;
                if pick[pos] + 1 < subsets.len() {
                    pick[pos] += 1;
                    for p in &mut pick[pos + 1..] {
                        *p = 0;
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
    Ok(MinorSummation { total, terms })
}

fn binomial_u64(n: usize, k: usize) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let mut b = 1u64;
    for j in 0..k {
        b = b.checked_mul((n - j) as u64)?.checked_div((j + 1) as u64)?;
    }
    Some(b)
}

/// All k-subsets of `[n]` in lexicographic order.
fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (1..=k).collect();
    loop {
        out.push(cur.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - (k - 1 - i) {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Outcome of a k-null test: either every k-minor vanishes, or a witness
/// selector with nonzero minor hyperdeterminant.
#[derive(Debug, Clone)]
pub enum KNull {
    Null,
    Witness { selector: SubtensorSelector, det: RingValue },
}

impl KNull {
    pub fn is_null(&self) -> bool {
        matches!(self, KNull::Null)
    }
}

/// Tests whether every `k x ... x k` square subtensor of `t` has vanishing
/// hyperdeterminant.
pub fn is_k_null(t: &Tensor, k: usize, budget: &Budget) -> Result<KNull, HyperdetError> {
    let n = t.side();
    let d = t.order();
    if k > n {
        return Ok(KNull::Null);
    }
    let minors = binomial_u64(n, k)
        .and_then(|b| {
            let mut p = 1u64;
            for _ in 0..d {
                p = p.checked_mul(b)?;
            }
            Some(p)
        })
        .ok_or(HyperdetError::BudgetExceeded { needed: u64::MAX, budget: budget.terms })?;
    if minors > budget.terms {
        return Err(HyperdetError::BudgetExceeded { needed: minors, budget: budget.terms });
    }
    let subsets = k_subsets(n, k);
    let mut pick = vec![0usize; d];
    loop {
        let sets: Vec<Vec<usize>> = pick.iter().map(|&c| subsets[c].clone()).collect();
        let sel = SubtensorSelector::new(sets, n).expect("valid selector");
        let det = hyperdet_dp_budgeted(&t.subtensor(&sel).expect("minor"), budget)?;
        if !det.is_zero() {
            return Ok(KNull::Witness { selector: sel, det });
        }
        let mut pos = d;
        loop {
            if pos == 0 {
                return Ok(KNull::Null);
            }
            pos -= 1;
            if pick[pos] + 1 < subsets.len() {
                pick[pos] += 1;
                for p in &mut pick[pos + 1..] {
                    *p = 0;
                }
                break;
            }
        }
    }
}

/// Checks that a k-null tensor is also (k+1)-null by direct enumeration.
/// Vacuously true at `k = n`.
pub fn knull_propagate(t: &Tensor, k: usize, budget: &Budget) -> Result<bool, HyperdetError> {
    if k >= t.side() {
        return Ok(true);
    }
    Ok(is_k_null(t, k + 1, budget)?.is_null())
}

/// Hyperpermanent: the defining sum without signs.
pub fn hyperpermanent(t: &Tensor, budget: &Budget) -> Result<RingValue, HyperdetError> {
    let n = t.side();
    let d = t.order();
    let spec = t.spec();
    let terms = naive_term_count(n, d).ok_or(HyperdetError::BudgetExceeded {
        needed: u64::MAX,
        budget: budget.terms,
    })?;
    if terms > budget.terms {
        return Err(HyperdetError::BudgetExceeded { needed: terms, budget: budget.terms });
    }
    if d == 0 {
        return Ok(t.entries()[0].clone());
    }
    let perms = permutations_with_signs(n);
    let slots = d - 1;
    let mut choice = vec![0usize; slots];
    let mut acc = spec.zero();
    let mut index = vec![0usize; d];
    loop {
        let mut prod = spec.one();
        for i in 1..=n {
            index[0] = i;
            for (k, &c) in choice.iter().enumerate() {
                index[k + 1] = perms[c].0[i - 1];
            }
            let mut off = 0usize;
            for &ix in &index {
                off = off * n + (ix - 1);
            }
            prod = prod.mul(&t.entries()[off]);
        }
        acc = acc.add(&prod);
        let mut pos = slots;
        loop {
            if pos == 0 {
                return Ok(acc);
            }
            pos -= 1;
            if choice[pos] + 1 < perms.len() {
                choice[pos] += 1;
                for c in &mut choice[pos + 1..] {
                    *c = 0;
                }
                break;
            }
        }
    }
}

/// Mixed discriminant of n matrices of side n, computed as the
/// hyperdeterminant of the order-3 stack `T(l, i, j) = A_l(i, j)`.
///
/// The convention matches `D(A_1, ..., A_n) = d^n/dz_1...dz_n det(sum z_l A_l)`
/// with no 1/n! factor; the symbolic-expansion oracle in the test suite
/// pins this down before the identity is relied on.
pub fn mixed_discriminant(matrices: &[Tensor], budget: &Budget) -> Result<RingValue, HyperdetError> {
    let n = matrices.len();
    if n == 0 {
        return Err(HyperdetError::ShapeMismatch("need at least one matrix".into()));
    }
    let spec = matrices[0].spec();
    for a in matrices {
        if a.order() != 2 || a.side() != n {
            return Err(HyperdetError::ShapeMismatch(
                "mixed discriminant needs n matrices of side n".into(),
            ));
        }
        if a.spec() != spec {
            return Err(HyperdetError::ShapeMismatch("matrices must share the ring".into()));
        }
    }
    let mut entries = Vec::with_capacity(pow_len(n, 3));
    for a in matrices {
        entries.extend_from_slice(a.entries());
    }
    let stack = Tensor::new(3, n, spec, entries).expect("stacked shape");
    hyperdet_dp_budgeted(&stack, budget)
}

/// Contracts away a repeated leading index: for `T` supported on
/// `i_1 = i_2`, returns `T'(i_2, ..., i_d) = T(i_2, i_2, i_3, ..., i_d)`,
/// which has the same hyperdeterminant.
pub fn reduce_repeated_index(t: &Tensor) -> Result<Tensor, HyperdetError> {
    let d = t.order();
    let n = t.side();
    if d < 2 {
        return Err(HyperdetError::ShapeMismatch("reduction needs order >= 2".into()));
    }
    for (off, idx) in IndexIter::new(d, n).enumerate() {
        if idx[0] != idx[1] && !t.entries()[off].is_zero() {
            return Err(HyperdetError::SupportViolation { index: idx });
        }
    }
    let mut out = Tensor::zeros(d - 1, n, t.spec());
    for idx in IndexIter::new(d - 1, n) {
        let mut full = Vec::with_capacity(d);
        full.push(idx[0]);
        full.extend_from_slice(&idx);
        let v = t.get(&full).expect("index in bounds").clone();
        out = out.set(&idx, v).expect("index in bounds");
    }
    Ok(out)
}
