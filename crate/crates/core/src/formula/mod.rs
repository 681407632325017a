//! First-order formulas in the language of rings.
//!
//! [`Term`] is the syntax of ring terms as written (so `x + 1 + 1` stays a
//! three-element sum); [`Term::to_poly`] gives its polynomial meaning.
//! Predicate applications are opaque symbols interpreted at evaluation time.

mod eval;
mod parse;
mod print;

use std::collections::{BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::poly::{Monomial, Poly};

pub use eval::{definable_set, definable_set_with, evaluate, EvalError, Interpretation};
pub use parse::{parse, parse_term, ParseError};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    /// Non-negative literal; negative numbers are `Neg(Const(..))`.
    Const(BigInt),
    Add(Vec<Term>),
    Neg(Box<Term>),
    Mul(Vec<Term>),
    Div(Box<Term>, Box<Term>),
    Pow(Box<Term>, u32),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("division by the non-constant term `{0}`")]
    NonConstantDivisor(String),
    #[error("division by zero")]
    DivisionByZero,
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn int(n: i64) -> Term {
        Term::big(BigInt::from(n))
    }

    pub fn big(n: BigInt) -> Term {
        if n.is_negative() {
            Term::Neg(Box::new(Term::Const(-n)))
        } else {
            Term::Const(n)
        }
    }

    pub fn zero() -> Term {
        Term::int(0)
    }

    pub fn one() -> Term {
        Term::int(1)
    }

    /// `a + b`, splicing `a` when it already is a sum.
    pub fn add(a: Term, b: Term) -> Term {
        match a {
            Term::Add(mut items) => {
                items.push(b);
                Term::Add(items)
            }
            a => Term::Add(vec![a, b]),
        }
    }

    pub fn sum(items: Vec<Term>) -> Term {
        let mut it = items.into_iter();
        match it.next() {
            None => Term::zero(),
            Some(first) => it.fold(first, Term::add),
        }
    }

    pub fn sub(a: Term, b: Term) -> Term {
        Term::add(a, Term::Neg(Box::new(b)))
    }

    pub fn neg(a: Term) -> Term {
        Term::Neg(Box::new(a))
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(vec![a, b])
    }

    pub fn product(items: Vec<Term>) -> Term {
        match items.len() {
            0 => Term::one(),
            1 => items.into_iter().next().unwrap(),
            _ => Term::Mul(items),
        }
    }

    pub fn pow(a: Term, e: u32) -> Term {
        Term::Pow(Box::new(a), e)
    }

    /// `t + 1 + ... + 1` with `n` literal ones.
    pub fn plus_unary(t: Term, n: usize) -> Term {
        (0..n).fold(t, |acc, _| Term::add(acc, Term::one()))
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::Add(xs) | Term::Mul(xs) => xs.iter().for_each(|x| x.collect_vars(out)),
            Term::Neg(x) | Term::Pow(x, _) => x.collect_vars(out),
            Term::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    fn vars_in_order(&self, seen: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !seen.contains(v) {
                    seen.push(v.clone());
                }
            }
            Term::Const(_) => {}
            Term::Add(xs) | Term::Mul(xs) => xs.iter().for_each(|x| x.vars_in_order(seen)),
            Term::Neg(x) | Term::Pow(x, _) => x.vars_in_order(seen),
            Term::Div(a, b) => {
                a.vars_in_order(seen);
                b.vars_in_order(seen);
            }
        }
    }

    pub fn substitute(&self, map: &HashMap<String, Term>) -> Term {
        match self {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Const(_) => self.clone(),
            Term::Add(xs) => Term::Add(xs.iter().map(|x| x.substitute(map)).collect()),
            Term::Mul(xs) => Term::Mul(xs.iter().map(|x| x.substitute(map)).collect()),
            Term::Neg(x) => Term::Neg(Box::new(x.substitute(map))),
            Term::Pow(x, e) => Term::Pow(Box::new(x.substitute(map)), *e),
            Term::Div(a, b) => Term::Div(Box::new(a.substitute(map)), Box::new(b.substitute(map))),
        }
    }

    /// The polynomial this term denotes. Divisors must be non-zero constants.
    pub fn to_poly(&self) -> Result<Poly, TermError> {
        Ok(match self {
            Term::Var(v) => Poly::var(v),
            Term::Const(c) => Poly::constant(BigRational::from_integer(c.clone())),
            Term::Add(xs) => {
                let mut acc = Poly::zero();
                for x in xs {
                    acc = acc.add(&x.to_poly()?);
                }
                acc
            }
            Term::Mul(xs) => {
                let mut acc = Poly::int(1);
                for x in xs {
                    acc = acc.mul(&x.to_poly()?);
                }
                acc
            }
            Term::Neg(x) => x.to_poly()?.neg(),
            Term::Pow(x, e) => x.to_poly()?.pow(*e),
            Term::Div(a, b) => {
                let d = b.to_poly()?;
                if !d.variables().is_empty() {
                    return Err(TermError::NonConstantDivisor(b.to_string()));
                }
                let c = d.constant_term();
                if c.is_zero() {
                    return Err(TermError::DivisionByZero);
                }
                a.to_poly()?.scale(&c.recip())
            }
        })
    }

    /// Canonical syntax for a polynomial: descending graded order, `c*x^i*y^j`.
    pub fn from_poly(p: &Poly) -> Term {
        let mut items: Vec<Term> = Vec::new();
        for (m, c) in p.terms().rev() {
            let abs = c.abs();
            let mut factors: Vec<Term> = Vec::new();
            if !abs.is_one() || m.is_one() {
                factors.push(if abs.is_integer() {
                    Term::Const(abs.numer().clone())
                } else {
                    Term::Div(Box::new(Term::Const(abs.numer().clone())), Box::new(Term::Const(abs.denom().clone())))
                });
            }
            factors.extend(monomial_factors(m));
            let t = Term::product(factors);
            items.push(if c.is_negative() { Term::neg(t) } else { t });
        }
        match items.len() {
            0 => Term::zero(),
            1 => items.pop().unwrap(),
            _ => Term::Add(items),
        }
    }
}

fn monomial_factors(m: &Monomial) -> Vec<Term> {
    m.powers()
        .iter()
        .map(|(v, e)| if *e == 1 { Term::var(v) } else { Term::pow(Term::var(v), *e) })
        .collect()
}

impl From<&Poly> for Term {
    fn from(p: &Poly) -> Term {
        Term::from_poly(p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Equal(Term, Term),
    Pred(String, Vec<Term>),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    ForAll(String, Box<Formula>),
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Equal(a, b)
    }

    pub fn neq(a: Term, b: Term) -> Formula {
        Formula::not(Formula::Equal(a, b))
    }

    pub fn pred(name: &str, args: Vec<Term>) -> Formula {
        Formula::Pred(name.to_string(), args)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    /// Conjunction; a single conjunct is returned as is.
    pub fn and(items: Vec<Formula>) -> Formula {
        if items.len() == 1 {
            items.into_iter().next().unwrap()
        } else {
            Formula::And(items)
        }
    }

    pub fn or(items: Vec<Formula>) -> Formula {
        if items.len() == 1 {
            items.into_iter().next().unwrap()
        } else {
            Formula::Or(items)
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn exists(v: &str, body: Formula) -> Formula {
        Formula::Exists(v.to_string(), Box::new(body))
    }

    pub fn forall(v: &str, body: Formula) -> Formula {
        Formula::ForAll(v.to_string(), Box::new(body))
    }

    /// `exists v1. exists v2. ... body`, outermost first.
    pub fn exists_all<S: AsRef<str>>(vars: &[S], body: Formula) -> Formula {
        vars.iter().rev().fold(body, |acc, v| Formula::exists(v.as_ref(), acc))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Equal(..) | Formula::Pred(..))
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        let add_term = |t: &Term, bound: &Vec<String>, out: &mut Vec<String>| {
            let mut vs = Vec::new();
            t.vars_in_order(&mut vs);
            for v in vs {
                if !bound.contains(&v) && !out.contains(&v) {
                    out.push(v);
                }
            }
        };
        match self {
            Formula::Equal(a, b) => {
                add_term(a, bound, out);
                add_term(b, bound, out);
            }
            Formula::Pred(_, args) => args.iter().for_each(|t| add_term(t, bound, out)),
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, f) | Formula::ForAll(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Equal(a, b) => {
                out.extend(a.vars());
                out.extend(b.vars());
            }
            Formula::Pred(_, args) => args.iter().for_each(|t| out.extend(t.vars())),
            Formula::Exists(v, _) | Formula::ForAll(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    /// Predicate symbols with their arities.
    pub fn predicates(&self) -> BTreeSet<(String, usize)> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Pred(name, args) = f {
                out.insert((name.clone(), args.len()));
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Equal(..) | Formula::Pred(..) => {}
            Formula::Not(g) | Formula::Exists(_, g) | Formula::ForAll(_, g) => g.visit(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit(f)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        let mut qf = true;
        self.visit(&mut |f| {
            if matches!(f, Formula::Exists(..) | Formula::ForAll(..)) {
                qf = false;
            }
        });
        qf
    }

    /// Rewrites `a -> b` as `~a | b` and `a <-> b` as `(~a | b) & (a | ~b)`.
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::Equal(..) | Formula::Pred(..) => self.clone(),
            Formula::Not(f) => Formula::not(f.desugar()),
            Formula::And(fs) => Formula::And(fs.iter().map(Formula::desugar).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(Formula::desugar).collect()),
            Formula::Implies(a, b) => Formula::Or(vec![Formula::not(a.desugar()), b.desugar()]),
            Formula::Iff(a, b) => {
                let (a, b) = (a.desugar(), b.desugar());
                Formula::And(vec![
                    Formula::Or(vec![Formula::not(a.clone()), b.clone()]),
                    Formula::Or(vec![a, Formula::not(b)]),
                ])
            }
            Formula::Exists(v, f) => Formula::exists(v, f.desugar()),
            Formula::ForAll(v, f) => Formula::forall(v, f.desugar()),
        }
    }

    /// Capture-avoiding substitution of terms for free variables.
    pub fn substitute(&self, map: &HashMap<String, Term>, names: &mut NameSupply) -> Formula {
        match self {
            Formula::Equal(a, b) => Formula::Equal(a.substitute(map), b.substitute(map)),
            Formula::Pred(n, args) => Formula::Pred(n.clone(), args.iter().map(|t| t.substitute(map)).collect()),
            Formula::Not(f) => Formula::not(f.substitute(map, names)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.substitute(map, names)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.substitute(map, names)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.substitute(map, names), b.substitute(map, names)),
            Formula::Iff(a, b) => Formula::iff(a.substitute(map, names), b.substitute(map, names)),
            Formula::Exists(v, f) | Formula::ForAll(v, f) => {
                let mut inner: HashMap<String, Term> = map.clone();
                inner.remove(v);
                let captured = inner.values().any(|t| t.vars().contains(v));
                let (v2, body) = if captured {
                    let fresh = names.fresh(v);
                    inner.insert(v.clone(), Term::var(&fresh));
                    (fresh, f.substitute(&inner, names))
                } else {
                    (v.clone(), f.substitute(&inner, names))
                };
                if matches!(self, Formula::Exists(..)) {
                    Formula::exists(&v2, body)
                } else {
                    Formula::forall(&v2, body)
                }
            }
        }
    }

    /// Renames every bound variable to a fresh name from `names`.
    pub fn rename_bound(&self, names: &mut NameSupply) -> Formula {
        self.rename_bound_in(&HashMap::new(), names)
    }

    fn rename_bound_in(&self, map: &HashMap<String, Term>, names: &mut NameSupply) -> Formula {
        match self {
            Formula::Equal(a, b) => Formula::Equal(a.substitute(map), b.substitute(map)),
            Formula::Pred(n, args) => Formula::Pred(n.clone(), args.iter().map(|t| t.substitute(map)).collect()),
            Formula::Not(f) => Formula::not(f.rename_bound_in(map, names)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.rename_bound_in(map, names)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.rename_bound_in(map, names)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.rename_bound_in(map, names), b.rename_bound_in(map, names)),
            Formula::Iff(a, b) => Formula::iff(a.rename_bound_in(map, names), b.rename_bound_in(map, names)),
            Formula::Exists(v, f) | Formula::ForAll(v, f) => {
                let fresh = names.fresh(v);
                let mut inner = map.clone();
                inner.insert(v.clone(), Term::var(&fresh));
                let body = f.rename_bound_in(&inner, names);
                if matches!(self, Formula::Exists(..)) {
                    Formula::exists(&fresh, body)
                } else {
                    Formula::forall(&fresh, body)
                }
            }
        }
    }
}

/// Fresh variable names that avoid a set of reserved names.
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    used: HashSet<String>,
    counter: usize,
}

impl NameSupply {
    pub fn new<I: IntoIterator<Item = String>>(reserved: I) -> Self {
        NameSupply { used: reserved.into_iter().collect(), counter: 0 }
    }

    pub fn reserve(&mut self, name: &str) {
        self.used.insert(name.to_string());
    }

    pub fn is_used(&self, name: &str) -> bool {
        self.used.contains(name)
    }

    /// `base` itself if unused, otherwise `base1`, `base2`, ...
    pub fn fresh(&mut self, base: &str) -> String {
        let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
        let stem = if stem.is_empty() { base } else { stem };
        let mut candidate = base.to_string();
        let mut i = 1;
        while self.used.contains(&candidate) {
            candidate = format!("{stem}{i}");
            i += 1;
        }
        self.used.insert(candidate.clone());
        candidate
    }

    /// Next `<prefix><n>` from a running counter, skipping reserved names.
    pub fn next_indexed(&mut self, prefix: &str) -> String {
        loop {
            self.counter += 1;
            let candidate = format!("{prefix}{}", self.counter);
            if self.used.insert(candidate.clone()) {
                return candidate;
            }
        }
    }

    pub fn issued(&self) -> usize {
        self.counter
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_variables() {
        let f = parse("exists y. x = y*y & z = 1").unwrap();
        assert_eq!(f.free_vars(), vec!["x".to_string(), "z".to_string()]);
        let g = parse("(exists y. x = y) & y = 0").unwrap();
        assert_eq!(g.free_vars(), vec!["x".to_string(), "y".to_string()]);
    }

    #[test]
    fn poly_roundtrip_through_terms() {
        let t = parse_term("y^2 - x^3 - x + 1/2*x*y").unwrap();
        let p = t.to_poly().unwrap();
        let back = Term::from_poly(&p);
        assert_eq!(back.to_poly().unwrap(), p);
        assert_eq!(back.to_string(), "-x^3 + 1/2*x*y + y^2 - x");
        assert!(matches!(parse_term("x/y").unwrap().to_poly(), Err(TermError::NonConstantDivisor(_))));
        assert_eq!(parse_term("x/(1-1)").unwrap().to_poly(), Err(TermError::DivisionByZero));
    }

    #[test]
    fn substitution_avoids_capture() {
        let f = parse("exists y. x = y*y").unwrap();
        let mut names = NameSupply::new(f.all_vars());
        let map = HashMap::from([("x".to_string(), parse_term("y + 1").unwrap())]);
        let g = f.substitute(&map, &mut names);
        assert_eq!(g.to_string(), "exists y1. y + 1 = y1*y1");
    }

    #[test]
    fn desugaring() {
        let f = parse("x = 0 -> y = 0").unwrap();
        assert_eq!(f.desugar().to_string(), "x != 0 | y = 0");
        let g = parse("x = 0 <-> y = 0").unwrap();
        assert_eq!(g.desugar().to_string(), "(x != 0 | y = 0) & (x = 0 | y != 0)");
    }

    #[test]
    fn unary_sums_stay_literal() {
        let t = Term::plus_unary(Term::var("x"), 3);
        assert_eq!(t.to_string(), "x + 1 + 1 + 1");
        assert_eq!(parse_term("x + 1 + 1 + 1").unwrap(), t);
    }
}
