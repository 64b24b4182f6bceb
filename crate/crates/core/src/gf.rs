//! Exact arithmetic in GF(p) for primes p < 2^31 and in GF(2^k) for k <= 16.
//!
//! A [`Field`] is an immutable descriptor; elements are plain canonical
//! representatives in `[0, q)` wrapped in [`FieldElement`]. Binary extension
//! fields multiply through log/antilog tables built once at construction and
//! shared behind an `Arc`, so cloning a field is cheap.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

/// Largest supported extension degree for GF(2^k).
pub const MAX_BINARY_DEGREE: u32 = 16;

/// Largest supported prime order (exclusive).
pub const MAX_PRIME_ORDER: u64 = 1 << 31;

/// Default reduction polynomials for GF(2^k), k = 1..=16, as bitmasks
/// including the leading term (Conway polynomials for p = 2).
pub const DEFAULT_POLYNOMIALS: [u32; 17] = [
    0, 0x3, 0x7, 0xB, 0x13, 0x25, 0x5B, 0x83, 0x11D, 0x211, 0x46F, 0x805, 0x10EB, 0x201B, 0x40A9,
    0x8003, 0x1002D,
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime order {0} is outside the supported range [2, 2^31)")]
    PrimeOutOfRange(u64),
    #[error("order {0} is not a prime or a power of two")]
    UnsupportedOrder(u64),
    #[error("extension degree {0} is outside the supported range [1, 16]")]
    DegreeOutOfRange(u32),
    #[error("polynomial {poly:#x} does not have degree {degree}")]
    PolynomialDegree { poly: u32, degree: u32 },
    #[error("polynomial {0:#x} is reducible over GF(2)")]
    ReduciblePolynomial(u32),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("element {value} does not belong to a field of order {order}")]
    ForeignElement { value: u32, order: u32 },
    #[error("cannot parse field descriptor {0:?}: expected \"p:<q>\" or \"2^<k>[:poly-hex]\"")]
    Syntax(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Prime,
    BinaryExtension,
}

/// A canonical field element, `value < q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Wraps a raw representative without range checking. Use
    /// [`Field::element`] when the value comes from outside.
    pub const fn from_raw(value: u32) -> Self {
        FieldElement(value)
    }

    pub const fn value(self) -> u32 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug)]
struct LogTables {
    // exp has 2(q-1) entries so a product of logs never needs a modulo.
    exp: Vec<u32>,
    log: Vec<u32>,
}

#[derive(Debug, Clone)]
enum Repr {
    Prime,
    Binary { poly: u32, tables: Arc<LogTables> },
}

/// Descriptor of GF(q). Immutable and cheap to clone.
#[derive(Debug, Clone)]
pub struct Field {
    characteristic: u32,
    degree: u32,
    order: u32,
    repr: Repr,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.polynomial() == other.polynomial()
    }
}

impl Eq for Field {}

impl Field {
    /// GF(q) for a prime q < 2^31.
    pub fn prime(q: u64) -> Result<Field, GfError> {
        if !(2..MAX_PRIME_ORDER).contains(&q) {
            return Err(GfError::PrimeOutOfRange(q));
        }
        if !is_prime(q) {
            return Err(GfError::NotPrime(q));
        }
        Ok(Field {
            characteristic: q as u32,
            degree: 1,
            order: q as u32,
            repr: Repr::Prime,
        })
    }

    /// GF(2^k) with the default reduction polynomial for `k`.
    pub fn binary(k: u32) -> Result<Field, GfError> {
        if !(1..=MAX_BINARY_DEGREE).contains(&k) {
            return Err(GfError::DegreeOutOfRange(k));
        }
        Field::binary_with_polynomial(k, DEFAULT_POLYNOMIALS[k as usize])
    }

    /// GF(2^k) reduced modulo `poly` (bitmask including the x^k term).
    pub fn binary_with_polynomial(k: u32, poly: u32) -> Result<Field, GfError> {
        if !(1..=MAX_BINARY_DEGREE).contains(&k) {
            return Err(GfError::DegreeOutOfRange(k));
        }
        if poly_degree(poly) != Some(k) {
            return Err(GfError::PolynomialDegree { poly, degree: k });
        }
        if !is_irreducible_gf2(poly) {
            return Err(GfError::ReduciblePolynomial(poly));
        }
        let order = 1u32 << k;
        Ok(Field {
            characteristic: 2,
            degree: k,
            order,
            repr: Repr::Binary {
                poly,
                tables: Arc::new(build_log_tables(k, poly)),
            },
        })
    }

    /// Field of the given order: prime orders give GF(p), powers of two
    /// give GF(2^k) with the default polynomial.
    pub fn with_order(q: u64) -> Result<Field, GfError> {
        if q >= 2 && q.is_power_of_two() {
            return Field::binary(q.trailing_zeros());
        }
        if q >= 2 && is_prime(q) {
            return Field::prime(q);
        }
        Err(GfError::UnsupportedOrder(q))
    }

    pub fn kind(&self) -> FieldKind {
        match self.repr {
            Repr::Prime => FieldKind::Prime,
            Repr::Binary { .. } => FieldKind::BinaryExtension,
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.characteristic
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Reduction polynomial bitmask; `None` for prime fields.
    pub fn polynomial(&self) -> Option<u32> {
        match self.repr {
            Repr::Prime => None,
            Repr::Binary { poly, .. } => Some(poly),
        }
    }

    /// Validates a raw value as an element of this field.
    pub fn element(&self, value: u32) -> Result<FieldElement, GfError> {
        if value < self.order {
            Ok(FieldElement(value))
        } else {
            Err(GfError::ForeignElement {
                value,
                order: self.order,
            })
        }
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        a.0 < self.order
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.order).map(FieldElement)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(self.contains(a) && self.contains(b));
        match self.repr {
            Repr::Binary { .. } => FieldElement(a.0 ^ b.0),
            Repr::Prime => {
                let s = a.0 as u64 + b.0 as u64;
                let p = self.order as u64;
                FieldElement(if s >= p { s - p } else { s } as u32)
            }
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        match self.repr {
            Repr::Binary { .. } => a,
            Repr::Prime if a.0 == 0 => a,
            Repr::Prime => FieldElement(self.order - a.0),
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        debug_assert!(self.contains(a) && self.contains(b));
        match &self.repr {
            Repr::Prime => FieldElement(((a.0 as u64 * b.0 as u64) % self.order as u64) as u32),
            Repr::Binary { tables, .. } => {
                if a.0 == 0 || b.0 == 0 {
                    FieldElement(0)
                } else {
                    let l = tables.log[a.0 as usize] + tables.log[b.0 as usize];
                    FieldElement(tables.exp[l as usize])
                }
            }
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, GfError> {
        if !self.contains(a) {
            return Err(GfError::ForeignElement {
                value: a.0,
                order: self.order,
            });
        }
        if a.0 == 0 {
            return Err(GfError::ZeroInverse);
        }
        Ok(match &self.repr {
            Repr::Prime => FieldElement(mod_inverse(a.0 as u64, self.order as u64) as u32),
            Repr::Binary { tables, .. } => {
                let n = self.order - 1;
                FieldElement(tables.exp[((n - tables.log[a.0 as usize]) % n) as usize])
            }
        })
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn checked_add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, GfError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add(a, b))
    }

    pub fn checked_mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, GfError> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    fn check(&self, a: FieldElement) -> Result<(), GfError> {
        self.element(a.0).map(|_| ())
    }

    /// Uniform draw over all q elements, zero included.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_range(0..self.order))
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.repr {
            Repr::Prime => write!(f, "p:{}", self.order),
            Repr::Binary { poly, .. } if poly == DEFAULT_POLYNOMIALS[self.degree as usize] => {
                write!(f, "2^{}", self.degree)
            }
            Repr::Binary { poly, .. } => write!(f, "2^{}:{:x}", self.degree, poly),
        }
    }
}

impl FromStr for Field {
    type Err = GfError;

    /// Parses `p:<q>` or `2^<k>[:poly-hex]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let syntax = || GfError::Syntax(s.to_string());
        if let Some(q) = s.strip_prefix("p:") {
            let q: u64 = q.parse().map_err(|_| syntax())?;
            return Field::prime(q);
        }
        if let Some(rest) = s.strip_prefix("2^") {
            let (k, poly) = match rest.split_once(':') {
                Some((k, poly)) => (k, Some(poly)),
                None => (rest, None),
            };
            let k: u32 = k.parse().map_err(|_| syntax())?;
            return match poly {
                None => Field::binary(k),
                Some(hex) => {
                    let hex = hex.trim_start_matches("0x").trim_start_matches("0X");
                    let poly = u32::from_str_radix(hex, 16).map_err(|_| syntax())?;
                    Field::binary_with_polynomial(k, poly)
                }
            };
        }
        Err(syntax())
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    let (mut old_r, mut r) = (a as i64, p as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    old_s.rem_euclid(p as i64) as u64
}

fn poly_degree(p: u32) -> Option<u32> {
    (p != 0).then(|| 31 - p.leading_zeros())
}

fn poly_mod_gf2(mut a: u32, b: u32) -> u32 {
    let db = poly_degree(b).expect("nonzero divisor");
    while let Some(da) = poly_degree(a) {
        if da < db {
            break;
        }
        a ^= b << (da - db);
    }
    a
}

/// Trial division by every polynomial of degree 1..=deg/2.
pub(crate) fn is_irreducible_gf2(poly: u32) -> bool {
    let Some(deg) = poly_degree(poly) else {
        return false;
    };
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        for divisor in (1u32 << d)..(1u32 << (d + 1)) {
            if poly_mod_gf2(poly, divisor) == 0 {
                return false;
            }
        }
    }
    true
}

/// Carry-less product reduced modulo `poly`.
fn clmul_reduce(a: u32, b: u32, k: u32, poly: u32) -> u32 {
    let mut acc = 0u32;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & (1 << k) != 0 {
            a ^= poly;
        }
    }
    acc
}

fn build_log_tables(k: u32, poly: u32) -> LogTables {
    let q = 1u32 << k;
    let n = q - 1;
    // x need not be primitive for an irreducible polynomial, so search for a
    // generator of the multiplicative group.
    let generator = (1..q)
        .find(|&g| {
            if n == 1 {
                return true;
            }
            let mut x = 1u32;
            for i in 1..=n {
                x = clmul_reduce(x, g, k, poly);
                if x == 1 {
                    return i == n;
                }
            }
            false
        })
        .expect("multiplicative group of a finite field is cyclic");
    let mut exp = vec![0u32; 2 * n as usize];
    let mut log = vec![0u32; q as usize];
    let mut x = 1u32;
    for i in 0..n {
        exp[i as usize] = x;
        exp[(i + n) as usize] = x;
        log[x as usize] = i;
        x = clmul_reduce(x, generator, k, poly);
    }
    LogTables { exp, log }
}
