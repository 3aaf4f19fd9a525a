//! Exact hyperdeterminants of cubical d-tensors over commutative rings.
//!
//! The crate is organized around a small exact-arithmetic core:
//!
//! * [`ring`]: scalars over ℚ, ℤ, ℤ/m and 𝔽_p with canonical forms,
//! * [`tensor`]: dense d-way arrays and the constructions used throughout
//!   (slices, subtensors, multilinear/outer/contraction products, direct
//!   sums, hat extension, mode permutation),
//! * [`hyperdet`]: two independent hyperdeterminant engines plus the
//!   Laplace and minor-summation expansions, k-null testing,
//!   hyperpermanents and mixed discriminants,
//! * [`ranks`]: slice / partition / odd-partition / tensor rank machinery:
//!   simplicity tests, decomposition verification, exhaustive oracles at
//!   tiny scale, and hyperdeterminant-based lower-bound certificates,
//! * [`order`]: posets on the coordinate set, order polytopes and
//!   P-echelon forms,
//! * [`capset`]: colored sum-ordered sets in 𝔽_p^n and the counting /
//!   Chernoff machinery bounding their size,
//! * [`io`]: the text file formats for tensors, posets and families,
//! * [`rng`]: the splittable counter-based generator used to make every
//!   randomized fixture reproducible.

pub mod capset;
pub mod hyperdet;
pub mod io;
pub mod order;
pub mod ranks;
pub mod ring;
pub mod rng;
pub mod tensor;

/// Work limits for operations whose cost can explode combinatorially.
///
/// Exceeding a limit yields a typed `BudgetExceeded` error instead of an
/// out-of-memory or a multi-hour run. `terms` caps enumeration counts
/// (permutation tuples, minors, scanned index tuples, search nodes);
/// `states` caps the dynamic-programming state space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub terms: u64,
    pub states: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            terms: 100_000_000,
            states: 1 << 26,
        }
    }
}

impl Budget {
    /// A budget with both limits set to `n`, as configured by the CLI's
    /// `--budget` flag and the `HYPERDET_BUDGET` environment variable.
    pub fn uniform(n: u64) -> Self {
        Budget { terms: n, states: n }
    }
}
