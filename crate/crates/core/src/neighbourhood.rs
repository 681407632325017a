//! Arithmetic maps on finite subsets of a field and the sets they must fix.
//!
//! A map `f: A -> K` is arithmetic when `f(1) = 1` (if `1` is in `A`) and it
//! respects every sum and product whose three members lie in `A`. `A` is a
//! neighbourhood of `r` when every arithmetic map fixes `r`.

use std::collections::HashMap;
use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldDescriptor, FieldElement, FieldError};
use crate::solver::{Atom, Csp, SearchError};

pub const DEFAULT_MAP_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NeighbourhoodError {
    #[error("distinguished element {0} is not in the set")]
    TargetMissing(String),
    #[error("the set is empty")]
    Empty,
    #[error("cannot invert zero")]
    InverseOfZero,
    #[error("neighbourhoods over different fields: {0} and {1}")]
    FieldMismatch(String, String),
    #[error("{0} expects {1} input neighbourhood(s), got {2}")]
    Arity(&'static str, usize, usize),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

pub type Result<T> = std::result::Result<T, NeighbourhoodError>;

/// A finite set `A` of distinct field elements with a distinguished member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Neighbourhood {
    field: FieldDescriptor,
    elements: Vec<FieldElement>,
    target: usize,
}

impl Serialize for Neighbourhood {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Neighbourhood", 3)?;
        st.serialize_field("field", &self.field)?;
        st.serialize_field("elements", &self.elements)?;
        st.serialize_field("target", self.target())?;
        st.end()
    }
}

impl Neighbourhood {
    /// Duplicates are dropped, keeping first occurrences.
    pub fn new(field: FieldDescriptor, elements: Vec<FieldElement>, target: &FieldElement) -> Result<Self> {
        let mut uniq: Vec<FieldElement> = Vec::with_capacity(elements.len());
        for e in elements {
            let e = field.canonicalize(&e)?;
            if !field.contains(&e) {
                return Err(FieldError::ForeignElement(e.to_string(), field.spec()).into());
            }
            if !uniq.contains(&e) {
                uniq.push(e);
            }
        }
        if uniq.is_empty() {
            return Err(NeighbourhoodError::Empty);
        }
        let target = uniq
            .iter()
            .position(|e| e == target)
            .ok_or_else(|| NeighbourhoodError::TargetMissing(target.to_string()))?;
        Ok(Neighbourhood { field, elements: uniq, target })
    }

    pub fn field(&self) -> &FieldDescriptor {
        &self.field
    }

    pub fn elements(&self) -> &[FieldElement] {
        &self.elements
    }

    pub fn target(&self) -> &FieldElement {
        &self.elements[self.target]
    }

    pub fn target_index(&self) -> usize {
        self.target
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, e: &FieldElement) -> bool {
        self.elements.contains(e)
    }

    /// Same set, different distinguished element.
    pub fn with_target(&self, target: &FieldElement) -> Result<Self> {
        Neighbourhood::new(self.field.clone(), self.elements.clone(), target)
    }

    /// The set extended by `extra` (appended, duplicates dropped).
    pub fn superset(&self, extra: &[FieldElement]) -> Result<Self> {
        let mut all = self.elements.clone();
        all.extend(extra.iter().cloned());
        Neighbourhood::new(self.field.clone(), all, self.target())
    }
}

/// Every relation `a_i = 1`, `a_i + a_j = a_k`, `a_i * a_j = a_k` holding in `A`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FactSet {
    pub ones: Vec<usize>,
    pub sums: Vec<(usize, usize, usize)>,
    pub products: Vec<(usize, usize, usize)>,
}

impl FactSet {
    pub fn atoms(&self) -> Vec<Atom> {
        let mut out: Vec<Atom> = self.ones.iter().map(|&i| Atom::One(i)).collect();
        out.extend(self.sums.iter().map(|&(i, j, k)| Atom::Plus(i, j, k)));
        out.extend(self.products.iter().map(|&(i, j, k)| Atom::Times(i, j, k)));
        out
    }

    /// Whether element `i` takes part in any fact.
    pub fn mentions(&self, i: usize) -> bool {
        self.ones.contains(&i)
            || self.sums.iter().chain(&self.products).any(|&(a, b, c)| a == i || b == i || c == i)
    }

    pub fn len(&self) -> usize {
        self.ones.len() + self.sums.len() + self.products.len()
    }

    /// Drops facts that every map obeying the rest satisfies anyway: products
    /// with a factor `1` or `0`, and sums with an addend `0` other than `0 + 0 = 0`.
    pub fn essential(&self, a: &Neighbourhood) -> FactSet {
        let one = a.field.one();
        let is_zero = |i: usize| a.elements[i].is_zero();
        let is_one = |i: usize| a.elements[i] == one;
        FactSet {
            ones: self.ones.clone(),
            sums: self
                .sums
                .iter()
                .copied()
                .filter(|&(i, j, k)| (i == j && j == k) || !(is_zero(i) || is_zero(j)))
                .collect(),
            products: self
                .products
                .iter()
                .copied()
                .filter(|&(i, j, _)| !(is_zero(i) || is_zero(j) || is_one(i) || is_one(j)))
                .collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Scans all ordered pairs of `A`.
pub fn facts(a: &Neighbourhood) -> FactSet {
    let k = &a.field;
    let lookup: HashMap<&FieldElement, usize> = a.elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let one = k.one();
    let mut out = FactSet::default();
    for (i, x) in a.elements.iter().enumerate() {
        if *x == one {
            out.ones.push(i);
        }
    }
    for (i, x) in a.elements.iter().enumerate() {
        for (j, y) in a.elements.iter().enumerate() {
            let s = k.add(x, y).expect("members of the field");
            if let Some(&l) = lookup.get(&s) {
                out.sums.push((i, j, l));
            }
        }
    }
    for (i, x) in a.elements.iter().enumerate() {
        for (j, y) in a.elements.iter().enumerate() {
            let p = k.mul(x, y).expect("members of the field");
            if let Some(&l) = lookup.get(&p) {
                out.products.push((i, j, l));
            }
        }
    }
    out
}

/// A map from the elements of a neighbourhood into its field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArithmeticMap {
    pub pairs: Vec<(FieldElement, FieldElement)>,
}

impl ArithmeticMap {
    pub fn image(&self, x: &FieldElement) -> Option<&FieldElement> {
        self.pairs.iter().find(|(a, _)| a == x).map(|(_, b)| b)
    }

    pub fn is_identity(&self) -> bool {
        self.pairs.iter().all(|(a, b)| a == b)
    }

    /// Checks conditions on one, sums and products directly.
    pub fn is_arithmetic(&self, field: &FieldDescriptor) -> bool {
        let f = |x: &FieldElement| self.image(x);
        let one = field.one();
        if let Some(v) = f(&one) {
            if *v != one {
                return false;
            }
        }
        for (a, fa) in &self.pairs {
            for (b, fb) in &self.pairs {
                if let Some(fs) = f(&field.add(a, b).expect("member")) {
                    if *fs != field.add(fa, fb).expect("member") {
                        return false;
                    }
                }
                if let Some(fp) = f(&field.mul(a, b).expect("member")) {
                    if *fp != field.mul(fa, fb).expect("member") {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn to_map(a: &Neighbourhood, values: &[u32]) -> ArithmeticMap {
    let ff = a.field.as_finite().expect("finite");
    ArithmeticMap { pairs: a.elements.iter().cloned().zip(values.iter().map(|&v| ff.element(v))).collect() }
}

fn csp(a: &Neighbourhood) -> Result<Csp<'_>> {
    Ok(Csp::new(a.field.finite()?, a.len(), facts(a).atoms()))
}

/// All total arithmetic maps `A -> K`, in lexicographic order of images
/// along `A`'s order. Fails once more than `cap` exist.
pub fn enumerate_arithmetic_maps(a: &Neighbourhood, cap: usize) -> Result<Vec<ArithmeticMap>> {
    let sols = csp(a)?.solutions(&[], cap)?;
    Ok(sols.iter().map(|s| to_map(a, s)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "answer", content = "witness", rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No(ArithmeticMap),
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes)
    }
}

/// Exhaustive decision over a finite field; a `No` carries a map moving the target.
pub fn is_neighbourhood(a: &Neighbourhood) -> Result<Verdict> {
    let ff = a.field.finite()?;
    let r = ff.index(a.target()).expect("member");
    let t = a.target;
    let found = csp(a)?.for_each_solution(&[], |s| {
        if s[t] != r {
            ControlFlow::Break(s.to_vec())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(match found {
        Some(s) => Verdict::No(to_map(a, &s)),
        None => Verdict::Yes,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Certificate {
    Certified,
    Unknown,
}

/// Elements whose image is forced to equal themselves by closing `f(1) = 1`,
/// `f(0) = 0` under the sum and product facts.
pub fn pinned_elements(a: &Neighbourhood) -> Vec<bool> {
    let k = &a.field;
    let facts = facts(a);
    let mut pinned = vec![false; a.len()];
    for (i, e) in a.elements.iter().enumerate() {
        if *e == k.one() || e.is_zero() {
            pinned[i] = true;
        }
    }
    let mut changed = true;
    while changed {
        changed = false;
        let mut pin = |i: usize, pinned: &mut Vec<bool>| {
            if !pinned[i] {
                pinned[i] = true;
                changed = true;
            }
        };
        for &(i, j, l) in &facts.sums {
            match (pinned[i], pinned[j], pinned[l]) {
                (true, true, false) => pin(l, &mut pinned),
                (true, false, true) => pin(j, &mut pinned),
                (false, true, true) => pin(i, &mut pinned),
                _ => {}
            }
        }
        for &(i, j, l) in &facts.products {
            let nonzero = |x: usize| !a.elements[x].is_zero();
            match (pinned[i], pinned[j], pinned[l]) {
                (true, true, false) => pin(l, &mut pinned),
                (true, false, true) if nonzero(i) => pin(j, &mut pinned),
                (false, true, true) if nonzero(j) => pin(i, &mut pinned),
                _ => {}
            }
        }
    }
    pinned
}

/// Sound, incomplete check usable over any field, including the rationals.
pub fn certify_by_propagation(a: &Neighbourhood) -> Certificate {
    if pinned_elements(a)[a.target] {
        Certificate::Certified
    } else {
        Certificate::Unknown
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CombineKind {
    Zero,
    One,
    Neg,
    Inv,
    Add,
    Mul,
}

impl std::str::FromStr for CombineKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "zero" => CombineKind::Zero,
            "one" => CombineKind::One,
            "neg" => CombineKind::Neg,
            "inv" => CombineKind::Inv,
            "add" => CombineKind::Add,
            "mul" => CombineKind::Mul,
            _ => return Err(format!("unknown combinator `{s}`")),
        })
    }
}

fn same_field(a: &Neighbourhood, b: &Neighbourhood) -> Result<()> {
    if a.field != b.field {
        return Err(NeighbourhoodError::FieldMismatch(a.field.spec(), b.field.spec()));
    }
    Ok(())
}

fn assemble(field: &FieldDescriptor, new: Vec<FieldElement>, parts: &[&Neighbourhood], target: FieldElement) -> Result<Neighbourhood> {
    let mut all = new;
    for p in parts {
        all.extend(p.elements.iter().cloned());
    }
    Neighbourhood::new(field.clone(), all, &target)
}

/// `{0}`.
pub fn zero(field: &FieldDescriptor) -> Neighbourhood {
    Neighbourhood { field: field.clone(), elements: vec![field.zero()], target: 0 }
}

/// `{1}`.
pub fn one(field: &FieldDescriptor) -> Neighbourhood {
    Neighbourhood { field: field.clone(), elements: vec![field.one()], target: 0 }
}

/// `{0, -r} ∪ A(r)`.
pub fn neg(a: &Neighbourhood) -> Result<Neighbourhood> {
    let k = &a.field;
    let m = k.neg(a.target())?;
    assemble(k, vec![k.zero(), m.clone()], &[a], m)
}

/// `{1, 1/r} ∪ A(r)`.
pub fn inv(a: &Neighbourhood) -> Result<Neighbourhood> {
    let k = &a.field;
    if a.target().is_zero() {
        return Err(NeighbourhoodError::InverseOfZero);
    }
    let i = k.inv(a.target())?;
    assemble(k, vec![k.one(), i.clone()], &[a], i)
}

/// `{r1 + r2} ∪ A(r1) ∪ A(r2)`.
pub fn add(a: &Neighbourhood, b: &Neighbourhood) -> Result<Neighbourhood> {
    same_field(a, b)?;
    let s = a.field.add(a.target(), b.target())?;
    assemble(&a.field, vec![s.clone()], &[a, b], s)
}

/// `{r1 * r2} ∪ A(r1) ∪ A(r2)`.
pub fn mul(a: &Neighbourhood, b: &Neighbourhood) -> Result<Neighbourhood> {
    same_field(a, b)?;
    let p = a.field.mul(a.target(), b.target())?;
    assemble(&a.field, vec![p.clone()], &[a, b], p)
}

pub fn combine(kind: CombineKind, field: &FieldDescriptor, inputs: &[Neighbourhood]) -> Result<Neighbourhood> {
    let want = match kind {
        CombineKind::Zero | CombineKind::One => 0,
        CombineKind::Neg | CombineKind::Inv => 1,
        CombineKind::Add | CombineKind::Mul => 2,
    };
    if inputs.len() != want {
        let name = match kind {
            CombineKind::Zero => "zero",
            CombineKind::One => "one",
            CombineKind::Neg => "neg",
            CombineKind::Inv => "inv",
            CombineKind::Add => "add",
            CombineKind::Mul => "mul",
        };
        return Err(NeighbourhoodError::Arity(name, want, inputs.len()));
    }
    for i in inputs {
        if i.field != *field {
            return Err(NeighbourhoodError::FieldMismatch(field.spec(), i.field.spec()));
        }
    }
    match kind {
        CombineKind::Zero => Ok(zero(field)),
        CombineKind::One => Ok(one(field)),
        CombineKind::Neg => neg(&inputs[0]),
        CombineKind::Inv => inv(&inputs[0]),
        CombineKind::Add => add(&inputs[0], &inputs[1]),
        CombineKind::Mul => mul(&inputs[0], &inputs[1]),
    }
}

// Non-negative integers by doubling from the top bit.
fn natural(n: &BigInt, field: &FieldDescriptor) -> Result<Neighbourhood> {
    if n.is_zero() {
        return Ok(zero(field));
    }
    let unit = one(field);
    let mut acc = one(field);
    let bits = n.bits();
    for b in (0..bits - 1).rev() {
        acc = add(&acc, &acc)?;
        if n.bit(b) {
            acc = add(&acc, &unit)?;
        }
    }
    Ok(acc)
}

fn integer(n: &BigInt, field: &FieldDescriptor) -> Result<Neighbourhood> {
    let base = natural(&n.abs(), field)?;
    if n.is_negative() {
        neg(&base)
    } else {
        Ok(base)
    }
}

/// A neighbourhood of the image of `q` built from the combinators.
pub fn nbhd_rational(q: &BigRational, field: &FieldDescriptor) -> Result<Neighbourhood> {
    let p = field.characteristic();
    if p != 0 && q.denom().is_multiple_of(&BigInt::from(p)) {
        return Err(FieldError::DenominatorVanishes(q.denom().clone(), p).into());
    }
    let num = integer(q.numer(), field)?;
    if q.denom().is_one() {
        return Ok(num);
    }
    let den = inv(&natural(q.denom(), field)?)?;
    if q.numer().is_one() {
        return Ok(den);
    }
    mul(&num, &den)
}

/// Elements fixed by every arithmetic map on the whole field, i.e. by every
/// field endomorphism.
pub fn fixed_subfield(field: &FieldDescriptor, cap: usize) -> Result<Vec<FieldElement>> {
    let elements = field.elements()?;
    let whole = Neighbourhood::new(field.clone(), elements.clone(), &field.one())?;
    let maps = enumerate_arithmetic_maps(&whole, cap)?;
    Ok(elements
        .into_iter()
        .filter(|e| maps.iter().all(|m| m.image(e) == Some(e)))
        .collect())
}
