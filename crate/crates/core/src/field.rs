//! Exact arithmetic over the rationals, prime fields and small extension fields.
//!
//! Finite fields are handled through [`FiniteField`], which numbers the `p^k`
//! elements `0..p^k` by reading the coefficient vector `[c0, .., c(k-1)]` as a
//! base-`p` integer (`c0` least significant). That numbering is also the
//! enumeration order used by every exhaustive search in the crate.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Largest supported extension degree.
pub const MAX_EXTENSION_DEGREE: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("malformed field descriptor `{0}`")]
    MalformedSpec(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree {0} is not supported (expected 1..={MAX_EXTENSION_DEGREE})")]
    UnsupportedDegree(usize),
    #[error("field of order {0}^{1} is too large")]
    TooLarge(u64, usize),
    #[error("modulus `{0}` is not a monic polynomial of degree {1}")]
    BadModulus(String, usize),
    #[error("modulus `{0}` is reducible over F{1}")]
    ReducibleModulus(String, u64),
    #[error("inversion of zero")]
    DivisionByZero,
    #[error("element {0} does not belong to {1}")]
    ForeignElement(String, String),
    #[error("{0} is infinite")]
    InfiniteField(String),
    #[error("malformed element `{0}`")]
    MalformedElement(String),
    #[error("denominator {0} vanishes in characteristic {1}")]
    DenominatorVanishes(BigInt, u64),
    #[error("operation `{0}` expects {1} operand(s)")]
    Arity(&'static str, usize),
}

pub type Result<T> = std::result::Result<T, FieldError>;

/// An element of one of the supported fields, always in canonical form.
///
/// Rationals are reduced with a positive denominator; residues hold exactly
/// `k` coefficients in `[0, p)`, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldElement {
    Rational(BigRational),
    Residue(Vec<u64>),
}

impl FieldElement {
    /// Builds the canonical rational `numerator / denominator`.
    pub fn rational(numerator: impl Into<BigInt>, denominator: impl Into<BigInt>) -> Result<Self> {
        let d = denominator.into();
        if d.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(FieldElement::Rational(BigRational::new(numerator.into(), d)))
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        FieldElement::Rational(BigRational::from_integer(n.into()))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Rational(q) => q.is_zero(),
            FieldElement::Residue(c) => c.iter().all(|&x| x == 0),
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Rational(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            FieldElement::Residue(c) => {
                let len = c.iter().rposition(|&x| x != 0).map_or(1, |i| i + 1);
                write!(f, "[")?;
                for (i, x) in c.iter().take(len).enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "]")
            }
        }
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Neg,
    Inv,
}

impl FromStr for ArithOp {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "add" => ArithOp::Add,
            "sub" => ArithOp::Sub,
            "mul" => ArithOp::Mul,
            "neg" => ArithOp::Neg,
            "inv" => ArithOp::Inv,
            _ => return Err(FieldError::MalformedSpec(s.to_string())),
        })
    }
}

/// Index-based arithmetic in `F_{p^k}`.
///
/// Elements are `u32` indices; see the module docs for the numbering.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteField {
    p: u64,
    k: usize,
    /// Monic modulus, lowest degree first, length `k + 1`.
    modulus: Vec<u64>,
    order: u64,
}

impl FiniteField {
    fn new(p: u64, modulus: Vec<u64>) -> Self {
        let k = modulus.len() - 1;
        FiniteField { p, k, modulus, order: p.pow(k as u32) }
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn size(&self) -> u32 {
        self.order as u32
    }

    pub fn zero(&self) -> u32 {
        0
    }

    pub fn one(&self) -> u32 {
        1
    }

    fn decode(&self, mut idx: u32) -> [u64; MAX_EXTENSION_DEGREE] {
        let mut c = [0u64; MAX_EXTENSION_DEGREE];
        for slot in c.iter_mut().take(self.k) {
            *slot = u64::from(idx) % self.p;
            idx = (u64::from(idx) / self.p) as u32;
        }
        c
    }

    fn encode(&self, c: &[u64]) -> u32 {
        c.iter().take(self.k).rev().fold(0u64, |acc, &x| acc * self.p + x) as u32
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            return ((u64::from(a) + u64::from(b)) % self.p) as u32;
        }
        let (x, y) = (self.decode(a), self.decode(b));
        let mut z = [0u64; MAX_EXTENSION_DEGREE];
        for i in 0..self.k {
            z[i] = (x[i] + y[i]) % self.p;
        }
        self.encode(&z)
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.k == 1 {
            return ((self.p - u64::from(a)) % self.p) as u32;
        }
        let x = self.decode(a);
        let mut z = [0u64; MAX_EXTENSION_DEGREE];
        for i in 0..self.k {
            z[i] = (self.p - x[i]) % self.p;
        }
        self.encode(&z)
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            return ((u64::from(a) * u64::from(b)) % self.p) as u32;
        }
        let (x, y) = (self.decode(a), self.decode(b));
        let mut prod = [0u64; 2 * MAX_EXTENSION_DEGREE - 1];
        for i in 0..self.k {
            for j in 0..self.k {
                prod[i + j] = (prod[i + j] + x[i] * y[j]) % self.p;
            }
        }
        // reduce using x^k = -(m0 + m1 x + .. + m(k-1) x^(k-1))
        for d in (self.k..2 * self.k - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for i in 0..self.k {
                let sub = c * self.modulus[i] % self.p;
                let slot = &mut prod[d - self.k + i];
                *slot = (*slot + self.p - sub) % self.p;
            }
        }
        self.encode(&prod[..self.k])
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let (mut base, mut acc) = (a, 1u32);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.order - 2))
        }
    }

    pub fn frobenius(&self, a: u32) -> u32 {
        self.pow(a, self.p)
    }

    /// Image of an integer under the unique ring map from the integers.
    pub fn from_bigint(&self, n: &BigInt) -> u32 {
        let r = n.mod_floor(&BigInt::from(self.p));
        r.to_u32().expect("residue fits in u32")
    }

    pub fn from_i64(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    pub fn from_rational(&self, q: &BigRational) -> Result<u32> {
        let d = self.from_bigint(q.denom());
        let inv = self
            .inv(d)
            .ok_or_else(|| FieldError::DenominatorVanishes(q.denom().clone(), self.p))?;
        Ok(self.mul(self.from_bigint(q.numer()), inv))
    }

    pub fn element(&self, idx: u32) -> FieldElement {
        FieldElement::Residue(self.decode(idx)[..self.k].to_vec())
    }

    pub fn index(&self, e: &FieldElement) -> Option<u32> {
        match e {
            FieldElement::Residue(c) if c.len() == self.k && c.iter().all(|&x| x < self.p) => {
                Some(self.encode(c))
            }
            _ => None,
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.size()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Rationals,
    Finite(FiniteField),
}

/// A validated description of one of the supported fields.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldDescriptor {
    repr: Repr,
}

/// Coarse classification of a [`FieldDescriptor`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldKind<'a> {
    Rationals,
    Prime(u64),
    Extension { p: u64, modulus: &'a [u64] },
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn poly_rem(mut a: Vec<u64>, b: &[u64], p: u64) -> Vec<u64> {
    // b is monic
    let db = b.len() - 1;
    while a.len() > db {
        let lead = *a.last().unwrap();
        let shift = a.len() - 1 - db;
        if lead != 0 {
            for (i, &bc) in b.iter().enumerate() {
                let slot = &mut a[shift + i];
                *slot = (*slot + p - lead * bc % p) % p;
            }
        }
        a.pop();
    }
    a
}

/// Monic polynomials of degree `d` over `F_p` in index order.
fn monic_polys(p: u64, d: usize) -> impl Iterator<Item = Vec<u64>> {
    (0..p.pow(d as u32)).map(move |mut idx| {
        let mut c = Vec::with_capacity(d + 1);
        for _ in 0..d {
            c.push(idx % p);
            idx /= p;
        }
        c.push(1);
        c
    })
}

/// Irreducibility of a monic polynomial over `F_p` by trial division.
pub fn is_irreducible(modulus: &[u64], p: u64) -> bool {
    let k = modulus.len() - 1;
    if k == 0 {
        return false;
    }
    (1..=k / 2).all(|d| monic_polys(p, d).all(|f| poly_rem(modulus.to_vec(), &f, p).iter().any(|&c| c != 0)))
}

/// Lexicographically smallest monic irreducible of degree `k` over `F_p`,
/// comparing coefficients from the leading one down.
pub fn canonical_modulus(p: u64, k: usize) -> Vec<u64> {
    monic_polys(p, k)
        .find(|f| is_irreducible(f, p))
        .expect("irreducible polynomials exist in every degree")
}

fn format_poly_x(c: &[u64]) -> String {
    let mut parts = Vec::new();
    for (d, &a) in c.iter().enumerate().rev() {
        if a == 0 {
            continue;
        }
        let mono = match d {
            0 => String::new(),
            1 => "x".to_string(),
            _ => format!("x^{d}"),
        };
        parts.push(match (a, d) {
            (_, 0) => a.to_string(),
            (1, _) => mono,
            _ => format!("{a}*{mono}"),
        });
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join("+")
    }
}

/// Parses `[c0,c1,..]` or a polynomial in `x` such as `x^2+x+1`.
fn parse_poly_x(text: &str, p: u64) -> Option<Vec<u64>> {
    let pm = p as i128;
    let reduce = |v: i128| v.rem_euclid(pm) as u64;
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(inner) = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
        return inner
            .split(',')
            .map(|s| s.parse::<i128>().ok().map(reduce))
            .collect();
    }
    let mut coeffs: Vec<i128> = Vec::new();
    let mut rest = t.as_str();
    if rest.is_empty() {
        return None;
    }
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'+' => (1, &rest[1..]),
            b'-' => (-1, &rest[1..]),
            _ => (1, rest),
        };
        let end = body.find(['+', '-']).unwrap_or(body.len());
        let (term, tail) = body.split_at(end);
        rest = tail;
        let (coef, power) = match term.find('x') {
            None => (term.parse::<i128>().ok()?, 0usize),
            Some(pos) => {
                let c = match term[..pos].trim_end_matches('*') {
                    "" => 1,
                    s => s.parse::<i128>().ok()?,
                };
                let e = match &term[pos + 1..] {
                    "" => 1,
                    s => s.strip_prefix('^')?.parse::<usize>().ok()?,
                };
                (c, e)
            }
        };
        if coeffs.len() <= power {
            coeffs.resize(power + 1, 0);
        }
        coeffs[power] += sign * coef;
    }
    Some(coeffs.into_iter().map(reduce).collect())
}

impl FieldDescriptor {
    pub fn rationals() -> Self {
        FieldDescriptor { repr: Repr::Rationals }
    }

    pub fn prime(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if p > u64::from(u32::MAX) {
            return Err(FieldError::TooLarge(p, 1));
        }
        Ok(FieldDescriptor { repr: Repr::Finite(FiniteField::new(p, vec![0, 1])) })
    }

    /// `F_{p^k}`; the canonical modulus is chosen when `modulus` is `None`.
    pub fn extension(p: u64, k: usize, modulus: Option<Vec<u64>>) -> Result<Self> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if k == 0 || k > MAX_EXTENSION_DEGREE {
            return Err(FieldError::UnsupportedDegree(k));
        }
        if p.checked_pow(k as u32).is_none_or(|q| q > u64::from(u32::MAX)) {
            return Err(FieldError::TooLarge(p, k));
        }
        let modulus = match modulus {
            None => canonical_modulus(p, k),
            Some(mut m) => {
                while m.len() > 1 && m.last() == Some(&0) {
                    m.pop();
                }
                if m.len() != k + 1 || m[k] != 1 {
                    return Err(FieldError::BadModulus(format_poly_x(&m), k));
                }
                if !is_irreducible(&m, p) {
                    return Err(FieldError::ReducibleModulus(format_poly_x(&m), p));
                }
                m
            }
        };
        if k == 1 {
            // a linear modulus only fixes the representation of F_p
            return Self::prime(p);
        }
        Ok(FieldDescriptor { repr: Repr::Finite(FiniteField::new(p, modulus)) })
    }

    /// Parses `Q`, `F<p>`, `F<p>^<k>` or `F<p>^<k>:<modulus>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let malformed = || FieldError::MalformedSpec(spec.to_string());
        let s = spec.trim();
        if s == "Q" {
            return Ok(Self::rationals());
        }
        let body = s.strip_prefix('F').ok_or_else(malformed)?;
        let (head, modulus) = match body.split_once(':') {
            Some((h, m)) => (h, Some(m)),
            None => (body, None),
        };
        let (p_text, k_text) = match head.split_once('^') {
            Some((p, k)) => (p, Some(k)),
            None => (head, None),
        };
        let p: u64 = p_text.parse().map_err(|_| malformed())?;
        match k_text {
            None => {
                if modulus.is_some() {
                    return Err(malformed());
                }
                Self::prime(p)
            }
            Some(k) => {
                let k: usize = k.parse().map_err(|_| malformed())?;
                if !is_prime(p) {
                    return Err(FieldError::NotPrime(p));
                }
                let m = match modulus {
                    None => None,
                    Some(m) => Some(parse_poly_x(m, p).ok_or_else(malformed)?),
                };
                Self::extension(p, k, m)
            }
        }
    }

    /// Canonical descriptor string; `parse(spec())` gives back `self`.
    pub fn spec(&self) -> String {
        match &self.repr {
            Repr::Rationals => "Q".to_string(),
            Repr::Finite(f) if f.k == 1 => format!("F{}", f.p),
            Repr::Finite(f) => format!("F{}^{}:{}", f.p, f.k, format_poly_x(&f.modulus)),
        }
    }

    pub fn kind(&self) -> FieldKind<'_> {
        match &self.repr {
            Repr::Rationals => FieldKind::Rationals,
            Repr::Finite(f) if f.k == 1 => FieldKind::Prime(f.p),
            Repr::Finite(f) => FieldKind::Extension { p: f.p, modulus: &f.modulus },
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.repr, Repr::Finite(_))
    }

    /// 0 for the rationals.
    pub fn characteristic(&self) -> u64 {
        self.as_finite().map_or(0, FiniteField::characteristic)
    }

    pub fn order(&self) -> Option<u64> {
        self.as_finite().map(FiniteField::order)
    }

    pub fn as_finite(&self) -> Option<&FiniteField> {
        match &self.repr {
            Repr::Finite(f) => Some(f),
            Repr::Rationals => None,
        }
    }

    /// The finite view, or `InfiniteField` for the rationals.
    pub fn finite(&self) -> Result<&FiniteField> {
        self.as_finite().ok_or_else(|| FieldError::InfiniteField(self.spec()))
    }

    pub fn zero(&self) -> FieldElement {
        self.from_i64(0)
    }

    pub fn one(&self) -> FieldElement {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> FieldElement {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> FieldElement {
        match &self.repr {
            Repr::Rationals => FieldElement::integer(n.clone()),
            Repr::Finite(f) => f.element(f.from_bigint(n)),
        }
    }

    pub fn from_rational(&self, q: &BigRational) -> Result<FieldElement> {
        match &self.repr {
            Repr::Rationals => Ok(FieldElement::Rational(q.clone())),
            Repr::Finite(f) => Ok(f.element(f.from_rational(q)?)),
        }
    }

    pub fn contains(&self, e: &FieldElement) -> bool {
        match (&self.repr, e) {
            (Repr::Rationals, FieldElement::Rational(q)) => q.denom().is_positive() && q.numer().gcd(q.denom()).is_one(),
            (Repr::Finite(f), e) => f.index(e).is_some(),
            _ => false,
        }
    }

    fn check(&self, e: &FieldElement) -> Result<()> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(FieldError::ForeignElement(e.to_string(), self.spec()))
        }
    }

    /// Re-establishes canonical form; fails for elements of another field kind.
    pub fn canonicalize(&self, e: &FieldElement) -> Result<FieldElement> {
        match (&self.repr, e) {
            (Repr::Rationals, FieldElement::Rational(q)) => {
                FieldElement::rational(q.numer().clone(), q.denom().clone())
            }
            (Repr::Finite(f), FieldElement::Residue(c)) if c.len() <= f.k => {
                let mut v: Vec<u64> = c.iter().map(|&x| x % f.p).collect();
                v.resize(f.k, 0);
                Ok(FieldElement::Residue(v))
            }
            _ => Err(FieldError::ForeignElement(e.to_string(), self.spec())),
        }
    }

    /// Index of an element of a finite field.
    pub fn index_of(&self, e: &FieldElement) -> Result<u32> {
        let f = self.finite()?;
        f.index(e).ok_or_else(|| FieldError::ForeignElement(e.to_string(), self.spec()))
    }

    fn binary(
        &self,
        a: &FieldElement,
        b: &FieldElement,
        q_op: impl Fn(&BigRational, &BigRational) -> BigRational,
        f_op: impl Fn(&FiniteField, u32, u32) -> u32,
    ) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        match (&self.repr, a, b) {
            (Repr::Rationals, FieldElement::Rational(x), FieldElement::Rational(y)) => {
                Ok(FieldElement::Rational(q_op(x, y)))
            }
            (Repr::Finite(f), _, _) => {
                let (x, y) = (f.index(a).unwrap(), f.index(b).unwrap());
                Ok(f.element(f_op(f, x, y)))
            }
            _ => unreachable!("membership checked above"),
        }
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        self.binary(a, b, |x, y| x + y, FiniteField::add)
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        self.binary(a, b, |x, y| x - y, FiniteField::sub)
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        self.binary(a, b, |x, y| x * y, FiniteField::mul)
    }

    pub fn neg(&self, a: &FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        Ok(match (&self.repr, a) {
            (Repr::Rationals, FieldElement::Rational(x)) => FieldElement::Rational(-x),
            (Repr::Finite(f), _) => f.element(f.neg(f.index(a).unwrap())),
            _ => unreachable!(),
        })
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match (&self.repr, a) {
            (Repr::Rationals, FieldElement::Rational(x)) => FieldElement::Rational(x.recip()),
            (Repr::Finite(f), _) => f.element(f.inv(f.index(a).unwrap()).unwrap()),
            _ => unreachable!(),
        })
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        self.mul(a, &self.inv(b)?)
    }

    pub fn pow(&self, a: &FieldElement, e: u32) -> Result<FieldElement> {
        self.check(a)?;
        Ok(match (&self.repr, a) {
            (Repr::Rationals, FieldElement::Rational(x)) => FieldElement::Rational(num_traits::pow(x.clone(), e as usize)),
            (Repr::Finite(f), _) => f.element(f.pow(f.index(a).unwrap(), u64::from(e))),
            _ => unreachable!(),
        })
    }

    /// Dispatches one of the five field operations.
    pub fn arith(&self, op: ArithOp, a: &FieldElement, b: Option<&FieldElement>) -> Result<FieldElement> {
        match (op, b) {
            (ArithOp::Add, Some(b)) => self.add(a, b),
            (ArithOp::Sub, Some(b)) => self.sub(a, b),
            (ArithOp::Mul, Some(b)) => self.mul(a, b),
            (ArithOp::Neg, None) => self.neg(a),
            (ArithOp::Inv, None) => self.inv(a),
            (ArithOp::Add | ArithOp::Sub | ArithOp::Mul, None) => Err(FieldError::Arity("binary", 2)),
            (ArithOp::Neg | ArithOp::Inv, Some(_)) => Err(FieldError::Arity("unary", 1)),
        }
    }

    /// All elements in index order.
    pub fn elements(&self) -> Result<Vec<FieldElement>> {
        let f = self.finite()?;
        Ok(f.elements().map(|i| f.element(i)).collect())
    }

    /// `a^p`.
    pub fn frobenius(&self, a: &FieldElement) -> Result<FieldElement> {
        let f = self.finite()?;
        let i = self.index_of(a)?;
        Ok(f.element(f.frobenius(i)))
    }

    /// Parses a list such as `1, 2` or `[0,1],[1,1]`.
    pub fn parse_element_list(&self, text: &str) -> Result<Vec<FieldElement>> {
        split_list(text).iter().map(|e| self.parse_element(e)).collect()
    }

    /// Parses an element: `[c0,c1,..]`, an integer, or `c/d`.
    pub fn parse_element(&self, text: &str) -> Result<FieldElement> {
        let malformed = || FieldError::MalformedElement(text.to_string());
        let t = text.trim();
        if let Some(inner) = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let f = self.finite().map_err(|_| malformed())?;
            let coeffs: Vec<BigInt> = inner
                .split(',')
                .map(|s| s.trim().parse::<BigInt>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| malformed())?;
            if coeffs.is_empty() || coeffs.len() > f.k {
                return Err(malformed());
            }
            let p = BigInt::from(f.p);
            let mut v: Vec<u64> = coeffs.iter().map(|c| c.mod_floor(&p).to_u64().unwrap()).collect();
            v.resize(f.k, 0);
            return Ok(FieldElement::Residue(v));
        }
        let q = match t.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| malformed())?;
                let d: BigInt = d.trim().parse().map_err(|_| malformed())?;
                if d.is_zero() {
                    return Err(FieldError::DivisionByZero);
                }
                BigRational::new(n, d)
            }
            None => BigRational::from_integer(t.parse().map_err(|_| malformed())?),
        };
        self.from_rational(&q)
    }
}

/// Splits a comma-separated list, leaving commas inside brackets alone.
pub fn split_list(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    out.push(cur);
    out.into_iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

impl FromStr for FieldDescriptor {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self> {
        FieldDescriptor::parse(s)
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec())
    }
}

impl Serialize for FieldDescriptor {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_respect_brackets() {
        assert_eq!(split_list("[0,1], [1,1],2"), vec!["[0,1]", "[1,1]", "2"]);
        let f4 = FieldDescriptor::parse("F2^2").unwrap();
        assert_eq!(f4.parse_element_list("[0,1],1").unwrap().len(), 2);
    }
    use proptest::prelude::*;

    fn f(spec: &str) -> FieldDescriptor {
        FieldDescriptor::parse(spec).unwrap()
    }

    #[test]
    fn make_field_cases() {
        assert_eq!(f("F5").order(), Some(5));
        let f4 = f("F2^2");
        assert_eq!(f4.kind(), FieldKind::Extension { p: 2, modulus: &[1, 1, 1] });
        assert_eq!(f4.spec(), "F2^2:x^2+x+1");
        assert_eq!(FieldDescriptor::parse("F4"), Err(FieldError::NotPrime(4)));
        assert!(matches!(FieldDescriptor::parse("F2^2:x^2+1"), Err(FieldError::ReducibleModulus(..))));
        assert!(matches!(FieldDescriptor::parse("G7"), Err(FieldError::MalformedSpec(_))));
        assert!(matches!(FieldDescriptor::parse("F3^5"), Err(FieldError::UnsupportedDegree(5))));
        assert_eq!(f("F2^2:[1,1,1]"), f4);
        assert_eq!(f(&f("F3^2").spec()), f("F3^2"));
    }

    #[test]
    fn canonical_moduli() {
        // brute-force: the only monic quadratic over F2 without roots
        let roots = |m: &[u64], p: u64| (0..p).any(|x| m.iter().rev().fold(0, |acc, &c| (acc * x + c) % p) == 0);
        let rootless: Vec<_> = monic_polys(2, 2).filter(|m| !roots(m, 2)).collect();
        assert_eq!(rootless, vec![vec![1, 1, 1]]);
        assert_eq!(canonical_modulus(2, 2), vec![1, 1, 1]);
        assert_eq!(canonical_modulus(3, 2), vec![1, 0, 1]);
        assert_eq!(canonical_modulus(2, 3), vec![1, 1, 0, 1]);
        // x^4 + x^2 + 1 = (x^2+x+1)^2 over F2 has no roots yet is reducible
        assert!(!is_irreducible(&[1, 0, 1, 0, 1], 2));
        assert!(is_irreducible(&[1, 1, 0, 0, 1], 2));
    }

    #[test]
    fn arith_cases() {
        let f5 = f("F5");
        assert_eq!(f5.inv(&f5.from_i64(2)).unwrap(), f5.from_i64(3));
        assert_eq!(f5.inv(&f5.zero()), Err(FieldError::DivisionByZero));
        let q = FieldDescriptor::rationals();
        let half = FieldElement::rational(1, 2).unwrap();
        let third = FieldElement::rational(1, 3).unwrap();
        assert_eq!(q.add(&half, &third).unwrap(), FieldElement::rational(5, 6).unwrap());
        let f4 = f("F2^2");
        let xbar = FieldElement::Residue(vec![0, 1]);
        assert_eq!(f4.mul(&xbar, &xbar).unwrap(), FieldElement::Residue(vec![1, 1]));
        assert!(matches!(q.add(&half, &f5.one()), Err(FieldError::ForeignElement(..))));
        assert!(matches!(f4.add(&f5.one(), &f4.one()), Err(FieldError::ForeignElement(..))));
        assert_eq!(f5.arith(ArithOp::Neg, &f5.one(), None).unwrap(), f5.from_i64(4));
    }

    #[test]
    fn enumeration_and_frobenius() {
        let f3 = f("F3");
        assert_eq!(f3.elements().unwrap(), vec![f3.from_i64(0), f3.from_i64(1), f3.from_i64(2)]);
        assert_eq!(f("F2^2").elements().unwrap().len(), 4);
        assert!(matches!(FieldDescriptor::rationals().elements(), Err(FieldError::InfiniteField(_))));
        let f4 = f("F2^2");
        assert_eq!(f4.frobenius(&f4.one()).unwrap(), f4.one());
        assert_eq!(f4.frobenius(&FieldElement::Residue(vec![0, 1])).unwrap(), FieldElement::Residue(vec![1, 1]));
        let f9 = f("F3^2");
        assert_eq!(f9.frobenius(&f9.from_i64(2)).unwrap(), f9.from_i64(2));
        assert!(FieldDescriptor::rationals().frobenius(&FieldElement::integer(1)).is_err());
    }

    #[test]
    fn frobenius_bijective_fixing_prime_field() {
        for spec in ["F2", "F5", "F2^2", "F2^3", "F3^2", "F2^4", "F5^2"] {
            let k = f(spec);
            let ff = k.finite().unwrap();
            let images: std::collections::BTreeSet<u32> = ff.elements().map(|a| ff.frobenius(a)).collect();
            assert_eq!(images.len() as u64, ff.order(), "{spec}");
            let fixed = ff.elements().filter(|&a| ff.frobenius(a) == a).count() as u64;
            assert_eq!(fixed, ff.characteristic(), "{spec}");
        }
    }

    #[test]
    fn element_text() {
        let f4 = f("F2^2");
        assert_eq!(f4.zero().to_string(), "[0]");
        assert_eq!(FieldElement::Residue(vec![0, 1]).to_string(), "[0,1]");
        assert_eq!(f4.parse_element("[0,1]").unwrap(), FieldElement::Residue(vec![0, 1]));
        assert_eq!(f("F7").parse_element("1/2").unwrap(), f("F7").from_i64(4));
        assert_eq!(FieldDescriptor::rationals().parse_element("-6/4").unwrap().to_string(), "-3/2");
        assert!(f4.parse_element("[1,1,1]").is_err());
        assert!(matches!(f("F7").parse_element("1/7"), Err(FieldError::DenominatorVanishes(..))));
    }

    fn descriptors() -> Vec<FieldDescriptor> {
        ["Q", "F2", "F7", "F2^2", "F3^2", "F2^3", "F2^4", "F5^3"].iter().map(|s| f(s)).collect()
    }

    fn element_from_raw(k: &FieldDescriptor, (n, d): (i64, i64)) -> FieldElement {
        match k.as_finite() {
            Some(ff) => ff.element((n.rem_euclid(i64::from(ff.size()))) as u32),
            None => FieldElement::rational(n, d).unwrap(),
        }
    }

    proptest! {
        #[test]
        fn field_axioms(idx in 0usize..8, ra in (-50i64..50, 1i64..20), rb in (-50i64..50, 1i64..20), rc in (-50i64..50, 1i64..20)) {
            let k = &descriptors()[idx];
            let (a, b, c) = (element_from_raw(k, ra), element_from_raw(k, rb), element_from_raw(k, rc));
            prop_assert_eq!(k.add(&k.add(&a, &b)?, &c)?, k.add(&a, &k.add(&b, &c)?)?);
            prop_assert_eq!(k.mul(&k.mul(&a, &b)?, &c)?, k.mul(&a, &k.mul(&b, &c)?)?);
            prop_assert_eq!(k.mul(&a, &k.add(&b, &c)?)?, k.add(&k.mul(&a, &b)?, &k.mul(&a, &c)?)?);
            prop_assert_eq!(k.add(&a, &k.neg(&a)?)?, k.zero());
            if !a.is_zero() {
                prop_assert_eq!(k.mul(&a, &k.inv(&a)?)?, k.one());
            }
            let once = k.canonicalize(&a)?;
            prop_assert_eq!(k.canonicalize(&once)?, once.clone());
            prop_assert_eq!(once, a);
        }
    }
}
