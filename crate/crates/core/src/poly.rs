//! Sparse multivariate polynomials with rational coefficients.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::field::{FieldDescriptor, FieldElement, Result as FieldResult};

/// A power product, variables sorted by name, every exponent at least 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(String, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(name: &str) -> Self {
        Monomial(vec![(name.to_string(), 1)])
    }

    pub fn from_powers<I: IntoIterator<Item = (String, u32)>>(powers: I) -> Self {
        let mut map: BTreeMap<String, u32> = BTreeMap::new();
        for (v, e) in powers {
            *map.entry(v).or_default() += e;
        }
        Monomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn powers(&self) -> &[(String, u32)] {
        &self.0
    }

    pub fn exponent(&self, var: &str) -> u32 {
        self.0.iter().find(|(v, _)| v == var).map_or(0, |&(_, e)| e)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial::from_powers(self.0.iter().chain(other.0.iter()).cloned())
    }
}

/// Graded lexicographic order with variables ranked alphabetically, so `x^2 > x*y > y^2`.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let (mut a, mut b) = (self.0.iter(), other.0.iter());
            loop {
                match (a.next(), b.next()) {
                    (None, None) => return Ordering::Equal,
                    (Some(_), None) => return Ordering::Greater,
                    (None, Some(_)) => return Ordering::Less,
                    (Some((va, ea)), Some((vb, eb))) => match va.cmp(vb) {
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Greater => return Ordering::Less,
                        Ordering::Equal if ea != eb => return ea.cmp(eb),
                        Ordering::Equal => {}
                    },
                }
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, (v, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A polynomial: monomials mapped to non-zero rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Poly::monomial(Monomial::one(), c)
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn var(name: &str) -> Self {
        Poly::monomial(Monomial::var(name), BigRational::one())
    }

    pub fn monomial(m: Monomial, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coefficient(&Monomial::one())
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: &str) -> u32 {
        self.terms.keys().map(|m| m.exponent(var)).max().unwrap_or(0)
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.terms.keys().flat_map(|m| m.0.iter().map(|(v, _)| v.clone())).collect()
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigRational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::int(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Simultaneous substitution of polynomials for variables.
    pub fn substitute(&self, map: &HashMap<String, Poly>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(c.clone());
            for (v, e) in &m.0 {
                let factor = match map.get(v) {
                    Some(p) => p.pow(*e),
                    None => Poly::monomial(Monomial(vec![(v.clone(), *e)]), BigRational::one()),
                };
                term = term.mul(&factor);
            }
            out = out.add(&term);
        }
        out
    }

    pub fn rename(&self, map: &HashMap<String, String>) -> Poly {
        let subst = map.iter().map(|(k, v)| (k.clone(), Poly::var(v))).collect();
        self.substitute(&subst)
    }

    /// Value at a point; variables missing from `point` are an error of the caller.
    pub fn eval(&self, field: &FieldDescriptor, point: &HashMap<String, FieldElement>) -> FieldResult<FieldElement> {
        let mut acc = field.zero();
        for (m, c) in &self.terms {
            let mut term = field.from_rational(c)?;
            for (v, e) in &m.0 {
                let x = point
                    .get(v)
                    .unwrap_or_else(|| panic!("variable {v} missing from evaluation point"));
                term = field.mul(&term, &field.pow(x, *e)?)?;
            }
            acc = field.add(&acc, &term)?;
        }
        Ok(acc)
    }

    /// Splits `self = positive - negative` where both parts have positive coefficients.
    pub fn split_signs(&self) -> (Poly, Poly) {
        let mut pos = Poly::zero();
        let mut neg = Poly::zero();
        for (m, c) in &self.terms {
            if c.is_positive() {
                pos.add_term(m.clone(), c.clone());
            } else {
                neg.add_term(m.clone(), -c);
            }
        }
        (pos, neg)
    }

    /// Coefficients of a univariate polynomial in `var`, lowest degree first.
    pub fn univariate_coefficients(&self, var: &str) -> Option<Vec<BigRational>> {
        if self.variables().iter().any(|v| v != var) {
            return None;
        }
        let mut out = vec![BigRational::zero(); self.degree() as usize + 1];
        for (m, c) in &self.terms {
            out[m.exponent(var) as usize] = c.clone();
        }
        Some(out)
    }

    /// Inverse of [`Poly::univariate_coefficients`].
    pub fn from_coefficients(var: &str, coeffs: &[BigRational]) -> Poly {
        let mut out = Poly::zero();
        for (i, c) in coeffs.iter().enumerate() {
            let m = if i == 0 { Monomial::one() } else { Monomial(vec![(var.to_string(), i as u32)]) };
            out.add_term(m, c.clone());
        }
        out
    }
}

fn fmt_coefficient(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Prints in descending graded order, e.g. `-x^3 + y^2 - x`.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let abs = c.abs();
            match (i, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                f.write_str(&fmt_coefficient(&abs))?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_coefficient(&abs))?;
            }
        }
        Ok(())
    }
}

/// Sparse form: a list of `{"coefficient": "c", "powers": {"x": 2}}`, highest term first.
impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        struct Powers<'a>(&'a Monomial);
        impl Serialize for Powers<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let mut map = serializer.serialize_map(Some(self.0 .0.len()))?;
                for (v, e) in &self.0 .0 {
                    map.serialize_entry(v, e)?;
                }
                map.end()
            }
        }
        struct Entry<'a>(&'a Monomial, &'a BigRational);
        impl Serialize for Entry<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let mut map = serializer.serialize_map(Some(2))?;
                map.serialize_entry("coefficient", &fmt_coefficient(self.1))?;
                map.serialize_entry("powers", &Powers(self.0))?;
                map.end()
            }
        }
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (m, c) in self.terms.iter().rev() {
            seq.serialize_element(&Entry(m, c))?;
        }
        seq.end()
    }
}
