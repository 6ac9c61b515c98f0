//! Exact arithmetic in finite fields `F_q`, `q = p^m`.
//!
//! Elements are integer codes: the residue `c_0 + c_1·α + … + c_{m-1}·α^{m-1}`
//! is stored as `Σ c_i · p^i`. Prime fields use plain modular arithmetic;
//! extension fields multiply through log/antilog tables built at validation.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("p = {0} is not prime")]
    NonPrimeP(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{m} exceeds the supported maximum {MAX_ORDER}")]
    FieldTooLarge { p: u32, m: u32 },
    #[error("extension degree {0} requires a modulus polynomial")]
    MissingModulus(u32),
    #[error("a prime field (m = 1) takes no modulus polynomial")]
    UnexpectedModulus,
    #[error("modulus must have {expected} coefficients, found {found}")]
    ModulusLength { expected: usize, found: usize },
    #[error("modulus coefficient {coeff} is not in [0, {p})")]
    ModulusCoefficient { coeff: u32, p: u32 },
    #[error("modulus polynomial is not monic")]
    NonMonicModulus,
    #[error("modulus polynomial is reducible over F_{0}")]
    ReducibleModulus(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("code {code} is not an element of a field of order {q}")]
    OutOfRange { code: u32, q: u32 },
}

/// Parameters of a field before validation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    pub p: u32,
    pub m: u32,
    /// Ascending coefficients of the monic modulus, `m + 1` entries; only for `m > 1`.
    pub modulus: Option<Vec<u32>>,
}

impl FieldSpec {
    pub fn prime(p: u32) -> Self {
        FieldSpec { p, m: 1, modulus: None }
    }

    pub fn extension(p: u32, m: u32, modulus: Vec<u32>) -> Self {
        FieldSpec { p, m, modulus: Some(modulus) }
    }

    /// `p^m`, or `None` on overflow.
    pub fn order(&self) -> Option<u64> {
        (self.p as u64).checked_pow(self.m)
    }
}

/// A field element, stored as its canonical integer code.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(u16);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn code(self) -> u32 {
        self.0 as u32
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Caller guarantees `code < q`.
    #[inline]
    pub(crate) fn from_code(code: u32) -> Elem {
        debug_assert!(code < MAX_ORDER);
        Elem(code as u16)
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug)]
struct Inner {
    p: u32,
    m: u32,
    q: u32,
    modulus: Vec<u32>,
    // Extension fields only: exp has 2(q-1) entries so log sums need no reduction.
    log: Vec<u32>,
    exp: Vec<u16>,
}

/// A validated field. Cheap to clone; immutable and shareable across threads.
#[derive(Debug, Clone)]
pub struct Field(Arc<Inner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.m == other.0.m && self.0.modulus == other.0.modulus)
    }
}

impl Eq for Field {}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Validates `spec` and builds the arithmetic tables.
pub fn validate_field(spec: &FieldSpec) -> Result<Field, GfError> {
    Field::new(spec)
}

impl Field {
    pub fn new(spec: &FieldSpec) -> Result<Field, GfError> {
        let FieldSpec { p, m, ref modulus } = *spec;
        if !is_prime(p) {
            return Err(GfError::NonPrimeP(p));
        }
        if m == 0 {
            return Err(GfError::ZeroDegree);
        }
        let q = match spec.order() {
            Some(q) if q <= MAX_ORDER as u64 => q as u32,
            _ => return Err(GfError::FieldTooLarge { p, m }),
        };
        if m == 1 {
            if modulus.is_some() {
                return Err(GfError::UnexpectedModulus);
            }
            return Ok(Field(Arc::new(Inner { p, m, q, modulus: Vec::new(), log: Vec::new(), exp: Vec::new() })));
        }
        let modulus = modulus.as_ref().ok_or(GfError::MissingModulus(m))?;
        if modulus.len() != m as usize + 1 {
            return Err(GfError::ModulusLength { expected: m as usize + 1, found: modulus.len() });
        }
        if let Some(&coeff) = modulus.iter().find(|&&c| c >= p) {
            return Err(GfError::ModulusCoefficient { coeff, p });
        }
        if modulus[m as usize] != 1 {
            return Err(GfError::NonMonicModulus);
        }
        if !poly::is_irreducible(modulus, p) {
            return Err(GfError::ReducibleModulus(p));
        }

        let slow = SlowExt { p, m, modulus };
        let generator = slow.find_generator(q);
        let order = (q - 1) as usize;
        let mut exp = vec![0u16; 2 * order];
        let mut log = vec![0u32; q as usize];
        let mut acc = 1u32;
        for (k, slot) in exp.iter_mut().take(order).enumerate() {
            *slot = acc as u16;
            log[acc as usize] = k as u32;
            acc = slow.mul(acc, generator);
        }
        debug_assert_eq!(acc, 1);
        for k in order..2 * order {
            exp[k] = exp[k - order];
        }
        Ok(Field(Arc::new(Inner { p, m, q, modulus: modulus.clone(), log, exp })))
    }

    pub fn gf2() -> Field {
        Field::new(&FieldSpec::prime(2)).expect("F_2 is a field")
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.0.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.0.m
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.0.q
    }

    pub fn modulus(&self) -> Option<&[u32]> {
        (self.0.m > 1).then_some(self.0.modulus.as_slice())
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec { p: self.0.p, m: self.0.m, modulus: self.modulus().map(<[u32]>::to_vec) }
    }

    #[inline]
    pub fn is_binary(&self) -> bool {
        self.0.q == 2
    }

    pub fn element(&self, code: u32) -> Result<Elem, GfError> {
        if code < self.0.q {
            Ok(Elem::from_code(code))
        } else {
            Err(GfError::OutOfRange { code, q: self.0.q })
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.0.q).map(Elem::from_code)
    }

    /// The image of an integer under `Z -> F_p ⊆ F_q`.
    pub fn from_int(&self, n: u64) -> Elem {
        Elem::from_code((n % self.0.p as u64) as u32)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let inner = &*self.0;
        if inner.p == 2 {
            return Elem(a.0 ^ b.0);
        }
        if inner.m == 1 {
            let s = a.code() + b.code();
            return Elem::from_code(if s >= inner.p { s - inner.p } else { s });
        }
        let (mut x, mut y) = (a.code(), b.code());
        let (mut out, mut place) = (0u32, 1u32);
        for _ in 0..inner.m {
            out += ((x % inner.p + y % inner.p) % inner.p) * place;
            x /= inner.p;
            y /= inner.p;
            place *= inner.p;
        }
        Elem::from_code(out)
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        let inner = &*self.0;
        if inner.p == 2 {
            return a;
        }
        if inner.m == 1 {
            return if a.0 == 0 { a } else { Elem::from_code(inner.p - a.code()) };
        }
        let mut x = a.code();
        let (mut out, mut place) = (0u32, 1u32);
        for _ in 0..inner.m {
            out += ((inner.p - x % inner.p) % inner.p) * place;
            x /= inner.p;
            place *= inner.p;
        }
        Elem::from_code(out)
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        let inner = &*self.0;
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        if inner.m == 1 {
            return Elem::from_code(((a.code() as u64 * b.code() as u64) % inner.p as u64) as u32);
        }
        Elem(inner.exp[(inner.log[a.0 as usize] + inner.log[b.0 as usize]) as usize])
    }

    pub fn inv(&self, a: Elem) -> Result<Elem, GfError> {
        if a.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        let inner = &*self.0;
        if inner.m == 1 {
            return Ok(self.pow(a, (inner.p - 2) as u64));
        }
        let order = inner.q - 1;
        Ok(Elem(inner.exp[((order - inner.log[a.0 as usize]) % order) as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` with `0^0 = 1`.
    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.is_zero() {
            return Elem::ZERO;
        }
        let inner = &*self.0;
        if inner.m > 1 {
            let order = (inner.q - 1) as u64;
            let k = (inner.log[a.0 as usize] as u64 * (e % order)) % order;
            return Elem(inner.exp[k as usize]);
        }
        let p = inner.p as u64;
        let (mut base, mut e, mut acc) = (a.code() as u64, e, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        Elem::from_code(acc as u32)
    }

    /// `Σ a_i · b_i`.
    pub fn dot(&self, a: &[Elem], b: &[Elem]) -> Elem {
        a.iter().zip(b).fold(Elem::ZERO, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }
}

/// Polynomial multiplication in `F_p[α]/(modulus)` on codes, used only to seed the tables.
struct SlowExt<'a> {
    p: u32,
    m: u32,
    modulus: &'a [u32],
}

impl SlowExt<'_> {
    fn digits(&self, mut code: u32) -> Vec<u32> {
        (0..self.m)
            .map(|_| {
                let d = code % self.p;
                code /= self.p;
                d
            })
            .collect()
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        let (a, b) = (self.digits(a), self.digits(b));
        let prod = poly::mul(&a, &b, self.p);
        let rem = poly::rem(&prod, self.modulus, self.p);
        rem.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    fn pow(&self, mut base: u32, mut e: u64) -> u32 {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn find_generator(&self, q: u32) -> u32 {
        let order = (q - 1) as u64;
        let factors = prime_factors(order);
        (2..q)
            .find(|&g| factors.iter().all(|&r| self.pow(g, order / r) != 1))
            .expect("the multiplicative group of a finite field is cyclic")
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Dense polynomials over `F_p`, ascending coefficients.
mod poly {
    pub(super) fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub(super) fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        trim(out.into_iter().map(|c| c as u32).collect())
    }

    /// Remainder of `a` modulo the monic polynomial `b`.
    pub(super) fn rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let b = trim(b.to_vec());
        debug_assert_eq!(b.last(), Some(&1));
        let mut r = trim(a.to_vec());
        let db = b.len() - 1;
        while r.len() > db {
            let lead = *r.last().unwrap() as u64;
            let shift = r.len() - 1 - db;
            for (k, &c) in b.iter().enumerate() {
                let sub = lead * c as u64 % p as u64;
                r[shift + k] = ((r[shift + k] as u64 + p as u64 - sub) % p as u64) as u32;
            }
            r = trim(r);
        }
        r
    }

    /// Exhaustive search for a monic factor of degree `1..=deg/2`.
    pub(super) fn is_irreducible(modulus: &[u32], p: u32) -> bool {
        let deg = modulus.len() - 1;
        for d in 1..=deg / 2 {
            let count = (p as u64).pow(d as u32);
            for low in 0..count {
                let mut cand = Vec::with_capacity(d + 1);
                let mut rest = low;
                for _ in 0..d {
                    cand.push((rest % p as u64) as u32);
                    rest /= p as u64;
                }
                cand.push(1);
                if rem(modulus, &cand, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}
