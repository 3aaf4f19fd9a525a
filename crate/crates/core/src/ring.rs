//! Exact commutative-ring scalars over ℚ, ℤ, ℤ/m and 𝔽_p.
//!
//! Every value carries its ring descriptor and is kept in a unique
//! canonical form (reduced fraction with positive denominator, or residue
//! in `[0, m)`), so payload equality coincides with ring-element equality
//! and serialization is bit-exact. There is no floating point anywhere in
//! this module.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Ring descriptor: which commutative ring a value lives in.
///
/// The string grammar used in file headers and on the CLI is
/// `Q | Z | Zmod:<m> | Fp:<p>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RingSpec {
    Rationals,
    Integers,
    /// ℤ/m for m ≥ 2 (m need not be prime).
    IntegersMod(u64),
    /// 𝔽_p for prime p < 2^31.
    PrimeField(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RingError {
    SpecMismatch { left: RingSpec, right: RingSpec },
    NotPrime(u64),
    ModulusTooSmall(u64),
    PrimeTooLarge(u64),
    ParseValue { spec: RingSpec, input: String },
    ParseSpec(String),
    NotInvertible { spec: RingSpec, value: String },
}

impl fmt::Display for RingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingError::SpecMismatch { left, right } => {
                write!(f, "ring mismatch: {} vs {}", left, right)
            }
            RingError::NotPrime(p) => write!(f, "{} is not prime", p),
            RingError::ModulusTooSmall(m) => write!(f, "modulus {} is below 2", m),
            RingError::PrimeTooLarge(p) => write!(f, "prime {} is not below 2^31", p),
            RingError::ParseValue { spec, input } => {
                write!(f, "cannot parse '{}' as a value in {}", input, spec)
            }
            RingError::ParseSpec(s) => write!(f, "cannot parse ring descriptor '{}'", s),
            RingError::NotInvertible { spec, value } => {
                write!(f, "{} is not invertible in {}", value, spec)
            }
        }
    }
}

impl std::error::Error for RingError {}

fn is_prime_u64(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p.is_multiple_of(2) {
        return p == 2;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl RingSpec {
    /// ℤ/m with m ≥ 2.
    pub fn integers_mod(m: u64) -> Result<Self, RingError> {
        if m < 2 {
            return Err(RingError::ModulusTooSmall(m));
        }
        Ok(RingSpec::IntegersMod(m))
    }

    /// 𝔽_p, checking primality by trial division (p < 2^31).
    pub fn prime_field(p: u64) -> Result<Self, RingError> {
        if p >= 1 << 31 {
            return Err(RingError::PrimeTooLarge(p));
        }
        if !is_prime_u64(p) {
            return Err(RingError::NotPrime(p));
        }
        Ok(RingSpec::PrimeField(p))
    }

    /// 0 for ℚ and ℤ, the modulus otherwise.
    pub fn characteristic(&self) -> u64 {
        match self {
            RingSpec::Rationals | RingSpec::Integers => 0,
            RingSpec::IntegersMod(m) => *m,
            RingSpec::PrimeField(p) => *p,
        }
    }

    pub fn modulus(&self) -> Option<u64> {
        match self {
            RingSpec::IntegersMod(m) => Some(*m),
            RingSpec::PrimeField(p) => Some(*p),
            _ => None,
        }
    }

    pub fn is_field(&self) -> bool {
        matches!(self, RingSpec::Rationals | RingSpec::PrimeField(_))
    }

    pub fn zero(&self) -> RingValue {
        self.from_i64(0)
    }

    pub fn one(&self) -> RingValue {
        self.from_i64(1)
    }

    /// Image of `v` under the canonical map ℤ → R.
    pub fn from_i64(&self, v: i64) -> RingValue {
        self.from_bigint(&BigInt::from(v))
    }

    /// Image of an arbitrary-precision integer under ℤ → R.
    pub fn from_bigint(&self, v: &BigInt) -> RingValue {
        let payload = match self {
            RingSpec::Rationals => Payload::Rat(BigRational::from_integer(v.clone())),
            RingSpec::Integers => Payload::Int(v.clone()),
            RingSpec::IntegersMod(m) | RingSpec::PrimeField(m) => {
                Payload::Mod(reduce_bigint(v, *m))
            }
        };
        RingValue { spec: *self, payload }
    }

    /// Image of n! under ℤ → R, built by in-ring multiplication.
    pub fn factorial(&self, n: u64) -> RingValue {
        let mut acc = self.one();
        for i in 2..=n {
            acc = acc.mul(&self.from_i64(i as i64));
        }
        acc
    }

    /// Parses a value in this ring from its canonical (or any equivalent)
    /// string form; the result is canonical.
    pub fn parse_value(&self, s: &str) -> Result<RingValue, RingError> {
        let err = || RingError::ParseValue {
            spec: *self,
            input: s.to_string(),
        };
        match self {
            RingSpec::Rationals => {
                let (num, den) = match s.split_once('/') {
                    Some((a, b)) => (
                        BigInt::from_str(a.trim()).map_err(|_| err())?,
                        BigInt::from_str(b.trim()).map_err(|_| err())?,
                    ),
                    None => (BigInt::from_str(s.trim()).map_err(|_| err())?, BigInt::one()),
                };
                if den.is_zero() {
                    return Err(err());
                }
                Ok(RingValue {
                    spec: *self,
                    payload: Payload::Rat(BigRational::new(num, den)),
                })
            }
            RingSpec::Integers => Ok(RingValue {
                spec: *self,
                payload: Payload::Int(BigInt::from_str(s.trim()).map_err(|_| err())?),
            }),
            RingSpec::IntegersMod(m) | RingSpec::PrimeField(m) => {
                let v = BigInt::from_str(s.trim()).map_err(|_| err())?;
                Ok(RingValue {
                    spec: *self,
                    payload: Payload::Mod(reduce_bigint(&v, *m)),
                })
            }
        }
    }

    /// Parses the descriptor grammar `Q | Z | Zmod:<m> | Fp:<p>`.
    pub fn parse_descriptor(s: &str) -> Result<Self, RingError> {
        let s = s.trim();
        match s {
            "Q" => return Ok(RingSpec::Rationals),
            "Z" => return Ok(RingSpec::Integers),
            _ => {}
        }
        if let Some(m) = s.strip_prefix("Zmod:") {
            let m: u64 = m.parse().map_err(|_| RingError::ParseSpec(s.to_string()))?;
            return RingSpec::integers_mod(m);
        }
        if let Some(p) = s.strip_prefix("Fp:") {
            let p: u64 = p.parse().map_err(|_| RingError::ParseSpec(s.to_string()))?;
            return RingSpec::prime_field(p);
        }
        Err(RingError::ParseSpec(s.to_string()))
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::Rationals => write!(f, "Q"),
            RingSpec::Integers => write!(f, "Z"),
            RingSpec::IntegersMod(m) => write!(f, "Zmod:{}", m),
            RingSpec::PrimeField(p) => write!(f, "Fp:{}", p),
        }
    }
}

fn reduce_bigint(v: &BigInt, m: u64) -> u64 {
    let m_big = BigInt::from(m);
    let r = ((v % &m_big) + &m_big) % &m_big;
    // r is in [0, m), so it fits u64
    let (_, digits) = r.to_u64_digits();
    digits.first().copied().unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Payload {
    Rat(BigRational),
    Int(BigInt),
    Mod(u64),
}

/// An exact scalar tagged with its ring.
///
/// Canonical form is unique, so `==` on values decides ring-element
/// equality. Values are immutable; all operations return fresh values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RingValue {
    spec: RingSpec,
    payload: Payload,
}

impl RingValue {
    pub fn spec(&self) -> RingSpec {
        self.spec
    }

    pub fn is_zero(&self) -> bool {
        match &self.payload {
            Payload::Rat(r) => r.is_zero(),
            Payload::Int(i) => i.is_zero(),
            Payload::Mod(r) => *r == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.payload {
            Payload::Rat(r) => r.is_one(),
            Payload::Int(i) => i.is_one(),
            Payload::Mod(r) => *r == 1,
        }
    }

    fn check_spec(&self, other: &Self) -> Result<(), RingError> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(RingError::SpecMismatch {
                left: self.spec,
                right: other.spec,
            })
        }
    }

    /// Exact sum; errors if the rings differ.
    pub fn checked_add(&self, other: &Self) -> Result<Self, RingError> {
        self.check_spec(other)?;
        Ok(self.add(other))
    }

    /// Exact product; errors if the rings differ.
    pub fn checked_mul(&self, other: &Self) -> Result<Self, RingError> {
        self.check_spec(other)?;
        Ok(self.mul(other))
    }

    /// Exact sum. Panics on a ring mismatch; use [`RingValue::checked_add`]
    /// at boundaries where mixed inputs are possible.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.spec, other.spec, "ring mismatch in add");
        let payload = match (&self.payload, &other.payload) {
            (Payload::Rat(a), Payload::Rat(b)) => Payload::Rat(a + b),
            (Payload::Int(a), Payload::Int(b)) => Payload::Int(a + b),
            (Payload::Mod(a), Payload::Mod(b)) => {
                let m = self.spec.modulus().expect("modular spec");
                Payload::Mod(add_mod(*a, *b, m))
            }
            _ => unreachable!("payload variant matches spec"),
        };
        RingValue { spec: self.spec, payload }
    }

    /// Exact product. Panics on a ring mismatch.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.spec, other.spec, "ring mismatch in mul");
        let payload = match (&self.payload, &other.payload) {
            (Payload::Rat(a), Payload::Rat(b)) => Payload::Rat(a * b),
            (Payload::Int(a), Payload::Int(b)) => Payload::Int(a * b),
            (Payload::Mod(a), Payload::Mod(b)) => {
                let m = self.spec.modulus().expect("modular spec");
                Payload::Mod(mul_mod(*a, *b, m))
            }
            _ => unreachable!("payload variant matches spec"),
        };
        RingValue { spec: self.spec, payload }
    }

    pub fn neg(&self) -> Self {
        let payload = match &self.payload {
            Payload::Rat(a) => Payload::Rat(-a),
            Payload::Int(a) => Payload::Int(-a),
            Payload::Mod(a) => {
                let m = self.spec.modulus().expect("modular spec");
                Payload::Mod(if *a == 0 { 0 } else { m - *a })
            }
        };
        RingValue { spec: self.spec, payload }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Multiplicative inverse, available in the fields ℚ and 𝔽_p only.
    pub fn inverse(&self) -> Result<Self, RingError> {
        let not_invertible = || RingError::NotInvertible {
            spec: self.spec,
            value: self.to_string(),
        };
        match (&self.spec, &self.payload) {
            (RingSpec::Rationals, Payload::Rat(a)) => {
                if a.is_zero() {
                    Err(not_invertible())
                } else {
                    Ok(RingValue {
                        spec: self.spec,
                        payload: Payload::Rat(a.recip()),
                    })
                }
            }
            (RingSpec::PrimeField(p), Payload::Mod(a)) => {
                if *a == 0 {
                    Err(not_invertible())
                } else {
                    Ok(RingValue {
                        spec: self.spec,
                        payload: Payload::Mod(mod_inverse(*a, *p)),
                    })
                }
            }
            _ => Err(not_invertible()),
        }
    }

    /// The canonical residue for modular kinds.
    pub fn residue(&self) -> Option<u64> {
        match &self.payload {
            Payload::Mod(r) => Some(*r),
            _ => None,
        }
    }

    /// The value as an exact rational (embedding ℤ into ℚ); `None` for
    /// modular kinds.
    pub fn to_rational(&self) -> Option<BigRational> {
        match &self.payload {
            Payload::Rat(r) => Some(r.clone()),
            Payload::Int(i) => Some(BigRational::from_integer(i.clone())),
            Payload::Mod(_) => None,
        }
    }
}

impl fmt::Display for RingValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.payload {
            Payload::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else if r.denom().is_negative() {
                    // BigRational keeps denominators positive; guard anyway
                    write!(f, "{}/{}", -r.numer(), -r.denom())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Payload::Int(i) => write!(f, "{}", i),
            Payload::Mod(r) => write!(f, "{}", r),
        }
    }
}

fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Inverse of `a` mod prime `p` by the extended Euclidean algorithm.
fn mod_inverse(a: u64, p: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, p as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1, "inverse of a unit mod a prime");
    (((old_s % p as i128) + p as i128) % p as i128) as u64
}
