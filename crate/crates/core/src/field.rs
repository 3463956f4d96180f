//! Prime-field arithmetic.
//!
//! Coefficients are stored as raw `u32` residues and interpreted through a
//! [`Field`] value that carries the characteristic. Characteristic zero is
//! modelled by a large prime (see [`Field::char_zero_proxy`]).

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Prime used in place of the rationals when characteristic 0 is requested.
pub const CHAR_ZERO_PROXY: u32 = 2_147_483_647;

/// A prime field 𝔽p. `Copy` so it can be threaded everywhere cheaply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Field {
    p: u32,
    char_zero: bool,
}

impl Field {
    /// Builds 𝔽p. `p = 0` selects the characteristic-zero proxy.
    pub fn new(p: u32) -> Result<Self> {
        if p == 0 {
            return Ok(Self::char_zero_proxy());
        }
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not a prime")));
        }
        Ok(Field { p, char_zero: false })
    }

    pub fn f2() -> Self {
        Field { p: 2, char_zero: false }
    }

    pub fn f3() -> Self {
        Field { p: 3, char_zero: false }
    }

    /// Arithmetic modulo a Mersenne prime large enough that no torsion in the
    /// small complexes we handle is visible; labelled as characteristic 0.
    pub fn char_zero_proxy() -> Self {
        Field { p: CHAR_ZERO_PROXY, char_zero: true }
    }

    /// The modulus actually used for arithmetic.
    pub fn modulus(&self) -> u32 {
        self.p
    }

    /// The characteristic as reported to users (0 for the proxy).
    pub fn characteristic(&self) -> u32 {
        if self.char_zero {
            0
        } else {
            self.p
        }
    }

    pub fn is_char_zero(&self) -> bool {
        self.char_zero
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        let p = self.p as u64;
        (if s >= p { s - p } else { s }) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (a as u64 + self.p as u64 - b as u64) as u32
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(&self, mut a: u32, mut e: u64) -> u32 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse; panics on zero, which is always a logic error.
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a % self.p != 0, "inverse of zero in F_{}", self.p);
        self.pow(a, self.p as u64 - 2)
    }

    /// Reduces a signed integer into the field.
    pub fn from_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    /// `(-1)^k` as a field element.
    #[inline]
    pub fn sign(&self, k: usize) -> u32 {
        if k % 2 == 0 {
            1 % self.p
        } else {
            self.neg(1)
        }
    }

    pub fn elem(&self, v: i64) -> FieldElem {
        FieldElem { value: self.from_i64(v), field: *self }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.char_zero {
            write!(f, "Q (proxy F_{})", self.p)
        } else {
            write!(f, "F_{}", self.p)
        }
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n as u64 {
        if n as u64 % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A residue tagged with its field; convenient at API boundaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldElem {
    pub value: u32,
    pub field: Field,
}

impl FieldElem {
    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Self {
        FieldElem { value: self.field.inv(self.value), field: self.field }
    }
}

impl Add for FieldElem {
    type Output = FieldElem;
    fn add(self, o: Self) -> Self {
        debug_assert_eq!(self.field, o.field);
        FieldElem { value: self.field.add(self.value, o.value), field: self.field }
    }
}

impl Sub for FieldElem {
    type Output = FieldElem;
    fn sub(self, o: Self) -> Self {
        debug_assert_eq!(self.field, o.field);
        FieldElem { value: self.field.sub(self.value, o.value), field: self.field }
    }
}

impl Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, o: Self) -> Self {
        debug_assert_eq!(self.field, o.field);
        FieldElem { value: self.field.mul(self.value, o.value), field: self.field }
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> Self {
        FieldElem { value: self.field.neg(self.value), field: self.field }
    }
}

/// Binomial coefficient reduced mod p via Lucas' theorem; negative or
/// out-of-range arguments give 0.
pub fn binomial_mod(n: i64, k: i64, p: u32) -> u32 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let p64 = p as i64;
    let (mut n, mut k) = (n, k);
    let mut acc: u64 = 1;
    while n > 0 || k > 0 {
        let (ni, ki) = (n % p64, k % p64);
        if ki > ni {
            return 0;
        }
        acc = acc * small_binomial(ni as u64, ki as u64, p as u64) % p as u64;
        n /= p64;
        k /= p64;
    }
    acc as u32
}

fn small_binomial(n: u64, k: u64, p: u64) -> u64 {
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num = num * ((n - i) % p) % p;
        den = den * ((i + 1) % p) % p;
    }
    let f = Field { p: p as u32, char_zero: false };
    f.mul(num as u32, f.inv(den as u32)) as u64
}
