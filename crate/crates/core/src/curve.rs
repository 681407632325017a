//! Neighbourhoods of symmetric functions of the abscissas of a plane curve.
//!
//! Over a finite field the abscissa set `P = {u : g(u, s) = 0 for some s}` is
//! found by scanning. From `P`, witnesses `z_k` and the coefficient table of `g`
//! a set `T` is assembled that every arithmetic map must fix pointwise on the
//! elementary symmetric values of `P`.

use std::collections::{BTreeSet, HashMap};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldDescriptor, FieldElement, FieldError};
use crate::formula::{Formula, Term, TermError};
use crate::neighbourhood::{enumerate_arithmetic_maps, is_neighbourhood, Neighbourhood, NeighbourhoodError, Verdict};
use crate::poly::Poly;

pub const DEFAULT_T_CAP: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("curve must be a polynomial in x and y, found variable `{0}`")]
    ForeignVariable(String),
    #[error("symmetric function index {k} out of range 1..={n}")]
    IndexOutOfRange { k: usize, n: usize },
    #[error("characteristic {p} must exceed the coefficient bound {m}")]
    CharacteristicTooSmall { p: u64, m: u32 },
    #[error("abscissas are not pairwise distinct")]
    RepeatedAbscissa,
    #[error("set would exceed the cap of {0} elements")]
    CapExceeded(usize),
    #[error("unknown mode `{0}`; expected paper or prefix")]
    UnknownMode(String),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Neighbourhood(#[from] NeighbourhoodError),
}

pub type Result<T> = std::result::Result<T, CurveError>;

fn curve_poly(g: &Term) -> Result<Poly> {
    if let Some(v) = g.vars().into_iter().find(|v| v != "x" && v != "y") {
        return Err(CurveError::ForeignVariable(v));
    }
    Ok(g.to_poly()?)
}

/// Abscissas with their first witness, in field order.
pub fn compute_p(g: &Term, field: &FieldDescriptor) -> Result<Vec<(FieldElement, FieldElement)>> {
    let poly = curve_poly(g)?;
    let elems = field.elements()?;
    let mut out = Vec::new();
    for u in &elems {
        for s in &elems {
            let at = HashMap::from([("x".to_string(), u.clone()), ("y".to_string(), s.clone())]);
            if poly.eval(field, &at)?.is_zero() {
                out.push((u.clone(), s.clone()));
                break;
            }
        }
    }
    Ok(out)
}

/// `h[i][j]` is the coefficient of `x^i y^j`, for `i, j` in `0..=m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientTable {
    pub m: u32,
    pub h: Vec<Vec<BigRational>>,
}

impl CoefficientTable {
    /// Non-zero entries in index order `(i, j)`.
    pub fn nonzero(&self) -> impl Iterator<Item = (u32, u32, &BigRational)> {
        self.h.iter().enumerate().flat_map(|(i, row)| {
            row.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(j, c)| (i as u32, j as u32, c))
        })
    }
}

impl Serialize for CoefficientTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        #[derive(Serialize)]
        struct Entry {
            i: u32,
            j: u32,
            value: String,
        }
        let entries: Vec<Entry> = self.nonzero().map(|(i, j, c)| Entry { i, j, value: c.to_string() }).collect();
        let mut st = s.serialize_struct("CoefficientTable", 2)?;
        st.serialize_field("m", &self.m)?;
        st.serialize_field("nonzero", &entries)?;
        st.end()
    }
}

/// Smallest `m >= 1` bounding every exponent and every numerator and denominator.
pub fn coefficient_table(g: &Term) -> Result<CoefficientTable> {
    let poly = curve_poly(g)?;
    let mut m: u32 = 1;
    let bound = |n: &BigInt| n.abs().to_u32().unwrap_or(u32::MAX);
    for (mono, c) in poly.terms() {
        m = m.max(mono.exponent("x")).max(mono.exponent("y"));
        m = m.max(bound(c.numer())).max(bound(c.denom()));
    }
    let size = m as usize + 1;
    let mut h = vec![vec![BigRational::zero(); size]; size];
    for (mono, c) in poly.terms() {
        h[mono.exponent("x") as usize][mono.exponent("y") as usize] = c.clone();
    }
    Ok(CoefficientTable { m, h })
}

/// `sum of all k-fold products of distinct entries`, by the product recurrence.
pub fn elementary_symmetric(k: usize, values: &[FieldElement], field: &FieldDescriptor) -> Result<FieldElement> {
    let n = values.len();
    if k == 0 || k > n {
        return Err(CurveError::IndexOutOfRange { k, n });
    }
    let mut e = vec![field.zero(); k + 1];
    e[0] = field.one();
    for v in values {
        for j in (1..=k).rev() {
            e[j] = field.add(&e[j], &field.mul(&e[j - 1], v)?)?;
        }
    }
    Ok(e.swap_remove(k))
}

/// The rationals `c/d` with `|c|, |d| <= m`, and zero, as distinct field elements.
pub fn bounded_fractions(m: u32, field: &FieldDescriptor) -> Result<Vec<FieldElement>> {
    let p = field.characteristic();
    if p != 0 && p <= m as u64 {
        return Err(CurveError::CharacteristicTooSmall { p, m });
    }
    let mut out = Ordered::default();
    out.push(field.zero());
    let m = m as i64;
    for c in (-m..=m).filter(|&c| c != 0) {
        for d in (-m..=m).filter(|&d| d != 0) {
            out.push(field.from_rational(&BigRational::new(c.into(), d.into()))?);
        }
    }
    Ok(out.items)
}

/// Insertion-ordered set.
#[derive(Default)]
struct Ordered {
    items: Vec<FieldElement>,
    seen: BTreeSet<FieldElement>,
}

impl Ordered {
    fn push(&mut self, e: FieldElement) -> bool {
        if self.seen.insert(e.clone()) {
            self.items.push(e);
            true
        } else {
            false
        }
    }

    fn extend(&mut self, es: impl IntoIterator<Item = FieldElement>) {
        for e in es {
            self.push(e);
        }
    }
}

/// A curve over a finite field with its abscissas, witnesses and coefficient table.
#[derive(Clone, Debug, Serialize)]
pub struct CurveData {
    pub g: String,
    pub field: FieldDescriptor,
    pub table: CoefficientTable,
    pub abscissas: Vec<FieldElement>,
    pub witnesses: Vec<FieldElement>,
    #[serde(skip)]
    poly: Poly,
}

impl CurveData {
    pub fn new(g: &Term, field: &FieldDescriptor) -> Result<Self> {
        let table = coefficient_table(g)?;
        bounded_fractions(table.m, field)?;
        let (abscissas, witnesses) = compute_p(g, field)?.into_iter().unzip();
        Ok(CurveData { g: g.to_string(), field: field.clone(), table, abscissas, witnesses, poly: curve_poly(g)? })
    }

    /// Uses the given abscissas and witnesses instead of scanning.
    pub fn with_points(g: &Term, field: &FieldDescriptor, points: Vec<(FieldElement, FieldElement)>) -> Result<Self> {
        let mut c = CurveData::new(g, field)?;
        (c.abscissas, c.witnesses) = points.into_iter().unzip();
        Ok(c)
    }

    pub fn n(&self) -> usize {
        self.abscissas.len()
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TMode {
    /// Every non-empty subset sum of the value set.
    #[serde(rename = "paper")]
    SubsetSums,
    /// Prefix sums of each term sequence and each product family; linear size.
    #[default]
    Prefix,
}

impl FromStr for TMode {
    type Err = CurveError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" | "subsets" => Ok(TMode::SubsetSums),
            "prefix" => Ok(TMode::Prefix),
            other => Err(CurveError::UnknownMode(other.to_string())),
        }
    }
}

/// The pieces of `T` and the values it is meant to pin down.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TRecipe {
    pub mode: TMode,
    pub bounded: Vec<FieldElement>,
    /// `products[k - 1]` holds the k-fold products of distinct abscissas, in subset order.
    pub products: Vec<Vec<FieldElement>>,
    pub scaled_terms: Vec<FieldElement>,
    pub sums: Vec<FieldElement>,
    pub differences: Vec<FieldElement>,
    pub inverse_differences: Vec<FieldElement>,
    pub t: Vec<FieldElement>,
    pub targets: Vec<FieldElement>,
}

impl TRecipe {
    pub fn neighbourhood(&self, field: &FieldDescriptor, k: usize) -> Result<Neighbourhood> {
        let n = self.targets.len();
        let target = self.targets.get(k.wrapping_sub(1)).ok_or(CurveError::IndexOutOfRange { k, n })?;
        Ok(Neighbourhood::new(field.clone(), self.t.clone(), target)?)
    }
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn product(field: &FieldDescriptor, xs: impl IntoIterator<Item = FieldElement>) -> Result<FieldElement> {
    xs.into_iter().try_fold(field.one(), |acc, x| Ok(field.mul(&acc, &x)?))
}

pub fn build_t(c: &CurveData, mode: TMode, cap: usize) -> Result<TRecipe> {
    let k = &c.field;
    let n = c.n();
    let distinct: BTreeSet<&FieldElement> = c.abscissas.iter().collect();
    if distinct.len() != n {
        return Err(CurveError::RepeatedAbscissa);
    }
    let bounded = bounded_fractions(c.table.m, k)?;
    let u = &c.abscissas;

    let mut products = Vec::new();
    for size in 1..=n {
        let family: Vec<FieldElement> = k_subsets(n, size)
            .into_iter()
            .map(|s| product(k, s.into_iter().map(|i| u[i].clone())))
            .collect::<Result<_>>()?;
        if family.len() > cap {
            return Err(CurveError::CapExceeded(cap));
        }
        products.push(family);
    }

    // b * u_k^i * z_k^j, and per point the sequence of terms of g
    let m = c.table.m;
    let mut scaled = Ordered::default();
    let mut term_sequences = Vec::new();
    for (uk, zk) in u.iter().zip(&c.witnesses) {
        let mut monomials = Vec::new();
        for i in 0..=m {
            for j in 0..=m {
                let mono = k.mul(&k.pow(uk, i)?, &k.pow(zk, j)?)?;
                for b in &bounded {
                    scaled.push(k.mul(b, &mono)?);
                }
                monomials.push(mono);
            }
        }
        let seq: Vec<FieldElement> = c
            .table
            .nonzero()
            .map(|(i, j, h)| Ok(k.mul(&k.from_rational(h)?, &monomials[(i * (m + 1) + j) as usize])?))
            .collect::<Result<_>>()?;
        term_sequences.push(seq);
    }
    let scaled_terms = scaled.items;

    let mut base = Ordered::default();
    base.extend(scaled_terms.iter().cloned());
    base.extend(products.iter().flatten().cloned());

    let sums = match mode {
        TMode::SubsetSums => {
            if base.items.len() >= usize::BITS as usize || (1usize << base.items.len()) > cap {
                return Err(CurveError::CapExceeded(cap));
            }
            // value subsets: grow the set of reachable sums one summand at a time
            let mut reach = Ordered::default();
            for a in &base.items {
                let mut new = vec![a.clone()];
                for s in &reach.items {
                    new.push(k.add(s, a)?);
                }
                reach.extend(new);
            }
            reach.items
        }
        TMode::Prefix => {
            let mut out = Ordered::default();
            for seq in term_sequences.iter().chain(&products) {
                let mut acc: Option<FieldElement> = None;
                for x in seq {
                    let next = match acc {
                        None => x.clone(),
                        Some(a) => k.add(&a, x)?,
                    };
                    out.push(next.clone());
                    acc = Some(next);
                }
            }
            out.items
        }
    };

    let mut differences = Vec::new();
    let mut inverse_differences = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let d = k.sub(&u[i], &u[j])?;
                inverse_differences.push(k.inv(&d)?);
                differences.push(d);
            }
        }
    }

    let mut t = Ordered::default();
    t.extend(bounded.iter().cloned());
    t.extend(base.items.iter().cloned());
    t.extend(sums.iter().cloned());
    t.extend(differences.iter().cloned());
    t.extend(inverse_differences.iter().cloned());
    if t.items.len() > cap {
        return Err(CurveError::CapExceeded(cap));
    }
    let targets = (1..=n).map(|j| elementary_symmetric(j, u, k)).collect::<Result<_>>()?;
    Ok(TRecipe {
        mode,
        bounded,
        products,
        scaled_terms,
        sums,
        differences,
        inverse_differences,
        t: t.items,
        targets,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TargetVerdict {
    pub k: usize,
    pub target: FieldElement,
    pub verdict: Verdict,
}

/// Which steps of the fixing argument held for every arithmetic map on `T`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Theorem5Report {
    pub mode: TMode,
    pub size: usize,
    pub maps: usize,
    pub targets: Vec<TargetVerdict>,
    pub identity_on_bounded: bool,
    pub abscissas_into_p: bool,
    pub injective_on_abscissas: bool,
    pub permutes_abscissas: bool,
}

impl Theorem5Report {
    pub fn all_hold(&self) -> bool {
        self.targets.iter().all(|t| t.verdict.is_yes())
            && self.identity_on_bounded
            && self.abscissas_into_p
            && self.injective_on_abscissas
            && self.permutes_abscissas
    }
}

pub fn verify_theorem5(c: &CurveData, recipe: &TRecipe, cap: usize) -> Result<Theorem5Report> {
    let field = &c.field;
    let mut targets = Vec::new();
    for (i, target) in recipe.targets.iter().enumerate() {
        let a = recipe.neighbourhood(field, i + 1)?;
        targets.push(TargetVerdict { k: i + 1, target: target.clone(), verdict: is_neighbourhood(&a)? });
    }
    let any = recipe.t.first().cloned().unwrap_or_else(|| field.zero());
    let whole = Neighbourhood::new(field.clone(), recipe.t.clone(), &any)?;
    let maps = enumerate_arithmetic_maps(&whole, cap)?;
    let p: BTreeSet<&FieldElement> = c.abscissas.iter().collect();
    let (mut identity, mut into_p, mut injective, mut permutes) = (true, true, true, true);
    for f in &maps {
        identity &= recipe.bounded.iter().all(|b| f.image(b) == Some(b));
        let images: Vec<&FieldElement> = c.abscissas.iter().map(|u| f.image(u).expect("abscissa in T")).collect();
        into_p &= images.iter().all(|v| p.contains(v));
        let distinct: BTreeSet<&FieldElement> = images.iter().copied().collect();
        injective &= distinct.len() == images.len();
        permutes &= distinct == p;
    }
    Ok(Theorem5Report {
        mode: recipe.mode,
        size: recipe.t.len(),
        maps: maps.len(),
        targets,
        identity_on_bounded: identity,
        abscissas_into_p: into_p,
        injective_on_abscissas: injective,
        permutes_abscissas: permutes,
    })
}

/// `exists u1 s1 ... un sn. (g(u1, s1) = 0 & ... & ui != uj & ... & v = t_k(u1, ..., un))`.
pub fn formula_8(g: &Term, n: usize, k: usize) -> Result<Formula> {
    curve_poly(g)?;
    if k == 0 || k > n {
        return Err(CurveError::IndexOutOfRange { k, n });
    }
    let u = |i: usize| Term::var(&format!("u{i}"));
    let s = |i: usize| format!("s{i}");
    let mut conj = Vec::new();
    for i in 1..=n {
        let map = HashMap::from([("x".to_string(), u(i)), ("y".to_string(), Term::var(&s(i)))]);
        conj.push(Formula::eq(g.substitute(&map), Term::zero()));
    }
    for i in 1..=n {
        for j in i + 1..=n {
            conj.push(Formula::neq(u(i), u(j)));
        }
    }
    let t_k = Term::sum(
        k_subsets(n, k).into_iter().map(|sub| Term::product(sub.into_iter().map(|i| u(i + 1)).collect())).collect(),
    );
    conj.push(Formula::eq(Term::var("v"), t_k));
    let bound: Vec<String> = (1..=n).flat_map(|i| [format!("u{i}"), s(i)]).collect();
    Ok(Formula::exists_all(&bound, Formula::and(conj)))
}
