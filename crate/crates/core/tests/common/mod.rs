//! Shared helpers and independent oracles for the integration suites.
//!
//! Everything here is deliberately implementation-naive: Gaussian
//! elimination for matrix rank, symbolic coefficient extraction for mixed
//! discriminants, and rejection sampling for random structured inputs.
//! These are the yardsticks the library is measured against, so they avoid
//! sharing code paths with it.

// each test target compiles this module separately and uses its own subset
#![allow(dead_code)]

use std::collections::HashMap;

use hyperdet_core::hyperdet::hyperdet_naive;
use hyperdet_core::order::Poset;
use hyperdet_core::ring::{RingSpec, RingValue};
use hyperdet_core::rng::SplitMix64;
use hyperdet_core::tensor::{IndexIter, Tensor};

/// Random invertible n x n matrix by rejection sampling.
pub fn random_invertible(n: usize, spec: RingSpec, rng: &mut SplitMix64) -> Tensor {
    loop {
        let a = Tensor::random(2, n, spec, rng);
        if !hyperdet_naive(&a).unwrap().is_zero() {
            return a;
        }
    }
}

/// Random tensor with nonzero hyperdeterminant by rejection sampling.
pub fn random_nonsingular(d: usize, n: usize, spec: RingSpec, rng: &mut SplitMix64) -> Tensor {
    loop {
        let t = Tensor::random(d, n, spec, rng);
        if !hyperdet_naive(&t).unwrap().is_zero() {
            return t;
        }
    }
}

/// Random poset on [d] with connected Hasse diagram, by rejection over
/// random cover sets.
pub fn random_connected_poset(d: usize, rng: &mut SplitMix64) -> Poset {
    loop {
        let edges = d - 1 + rng.next_below(d as u64) as usize;
        let covers: Vec<(usize, usize)> = (0..edges)
            .map(|_| {
                let a = rng.next_below(d as u64) as usize + 1;
                let mut b = rng.next_below(d as u64) as usize + 1;
                while b == a {
                    b = rng.next_below(d as u64) as usize + 1;
                }
                (a, b)
            })
            .collect();
        if let Ok(p) = Poset::new(d, covers) {
            if p.hasse_connected() {
                return p;
            }
        }
    }
}

/// Random tensor in P-echelon form: every admissible support position gets
/// a random value; with `nonzero_diagonal` the diagonal entries are
/// resampled away from zero.
pub fn random_echelon_tensor(
    poset: &Poset,
    n: usize,
    spec: RingSpec,
    nonzero_diagonal: bool,
    rng: &mut SplitMix64,
) -> Tensor {
    let d = poset.ground_size();
    let pairs = poset.relation_pairs();
    let mut t = Tensor::zeros(d, n, spec);
    for idx in IndexIter::new(d, n) {
        if pairs.iter().any(|&(a, b)| idx[a - 1] > idx[b - 1]) {
            continue;
        }
        let on_diagonal = idx.iter().all(|&i| i == idx[0]);
        let value = loop {
            let v = Tensor::random(0, 1, spec, rng).entries()[0].clone();
            if !(nonzero_diagonal && on_diagonal && v.is_zero()) {
                break v;
            }
        };
        t = t.set(&idx, value).unwrap();
    }
    t
}

/// Matrix rank by Gaussian elimination over a field.
pub fn matrix_rank_gaussian(t: &Tensor) -> usize {
    assert_eq!(t.order(), 2);
    let n = t.side();
    let _spec = t.spec();
    let mut rows: Vec<Vec<RingValue>> = (1..=n)
        .map(|i| (1..=n).map(|j| t.get(&[i, j]).unwrap().clone()).collect())
        .collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(pivot_row) = (rank..n).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let inv = rows[rank][col].inverse().expect("field pivot");
        let pivot_row = rows[rank].clone();
        #[allow(clippy::needless_range_loop)] // two rows of the grid at once
        for r in 0..n {
            if r != rank && !rows[r][col].is_zero() {
                let factor = rows[r][col].mul(&inv);
                for (c, pv) in pivot_row.iter().enumerate() {
                    let delta = factor.mul(pv);
                    rows[r][c] = rows[r][c].sub(&delta);
                }
            }
        }
        rank += 1;
        if rank == n {
            break;
        }
    }
    rank
}

/// Multivariate polynomial with monomials as exponent vectors, used to
/// expand `det(z_1 A_1 + ... + z_n A_n)` symbolically.
#[derive(Debug, Clone)]
pub struct Poly {
    pub terms: HashMap<Vec<u32>, RingValue>,
    vars: usize,
    spec: RingSpec,
}

impl Poly {
    pub fn zero(vars: usize, spec: RingSpec) -> Self {
        Poly { terms: HashMap::new(), vars, spec }
    }

    pub fn constant(vars: usize, v: RingValue) -> Self {
        let spec = v.spec();
        let mut p = Poly::zero(vars, spec);
        if !v.is_zero() {
            p.terms.insert(vec![0; vars], v);
        }
        p
    }

    /// The monomial `c * z_var`.
    pub fn linear(vars: usize, var: usize, c: RingValue) -> Self {
        let spec = c.spec();
        let mut p = Poly::zero(vars, spec);
        if !c.is_zero() {
            let mut exp = vec![0; vars];
            exp[var] = 1;
            p.terms.insert(exp, c);
        }
        p
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (exp, c) in &other.terms {
            let entry = out
                .terms
                .entry(exp.clone())
                .or_insert_with(|| self.spec.zero());
            *entry = entry.add(c);
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.vars, self.spec);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exp: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let c = ca.mul(cb);
                let entry = out.terms.entry(exp).or_insert_with(|| self.spec.zero());
                *entry = entry.add(&c);
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    pub fn coefficient(&self, exp: &[u32]) -> RingValue {
        self.terms.get(exp).cloned().unwrap_or_else(|| self.spec.zero())
    }
}

/// Independent mixed-discriminant oracle: expands
/// `det(z_1 A_1 + ... + z_n A_n)` over all permutations symbolically and
/// extracts the coefficient of `z_1 z_2 ... z_n`, which equals the n-fold
/// mixed partial derivative.
pub fn symbolic_mixed_discriminant(matrices: &[Tensor]) -> RingValue {
    let n = matrices.len();
    let spec = matrices[0].spec();
    // entries of the symbolic matrix sum
    let entry = |i: usize, j: usize| -> Poly {
        let mut acc = Poly::zero(n, spec);
        for (l, a) in matrices.iter().enumerate() {
            acc = acc.add(&Poly::linear(n, l, a.get(&[i, j]).unwrap().clone()));
        }
        acc
    };
    // permutation expansion of the determinant
    let mut perms: Vec<(Vec<usize>, i64)> = Vec::new();
    fn build(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<(Vec<usize>, i64)>) {
        let n = used.len();
        if cur.len() == n {
            let mut inv = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if cur[i] > cur[j] {
                        inv += 1;
                    }
                }
            }
            out.push((cur.clone(), if inv % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for v in 1..=n {
            if !used[v - 1] {
                used[v - 1] = true;
                cur.push(v);
                build(cur, used, out);
                cur.pop();
                used[v - 1] = false;
            }
        }
    }
    build(&mut Vec::new(), &mut vec![false; n], &mut perms);
    let mut det = Poly::zero(n, spec);
    for (perm, sign) in perms {
        let mut prod = Poly::constant(n, spec.one());
        for (i, &j) in perm.iter().enumerate() {
            prod = prod.mul(&entry(i + 1, j));
        }
        let signed = if sign < 0 {
            let mut neg = Poly::zero(n, spec);
            for (e, c) in &prod.terms {
                neg.terms.insert(e.clone(), c.neg());
            }
            neg
        } else {
            prod
        };
        det = det.add(&signed);
    }
    det.coefficient(&vec![1; n])
}

/// Reads a fixture file from the workspace-root `fixtures/` tree.
pub fn fixture(path: &str) -> String {
    let full = format!("{}/../../fixtures/{}", env!("CARGO_MANIFEST_DIR"), path);
    std::fs::read_to_string(&full).unwrap_or_else(|e| panic!("fixture {}: {}", full, e))
}
