//! Existential formula to disjunction of three-address constraint systems.
//!
//! Pipeline: desugar, push negations to atoms, hoist existential quantifiers
//! (renaming apart), distribute into DNF, replace each `W != 0` by
//! `W*t - 1 = 0`, then break every polynomial equation into atoms of the
//! shapes `a + b = c`, `a * b = c` and `a = 1`.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldDescriptor, FieldElement, FieldError};
use crate::formula::{Formula, NameSupply, Term, TermError};
use crate::poly::{Monomial, Poly};
use crate::solver::{Atom, Csp, SearchError};

pub const DEFAULT_DNF_CAP: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("universal quantifier over `{0}` is not existential")]
    UniversalQuantifier(String),
    #[error("quantifier over `{0}` inside a quantifier-free position")]
    Quantifier(String),
    #[error("predicate `{0}` cannot be normalized; expand it first")]
    Predicate(String),
    #[error("expected exactly one free variable, found {0:?}")]
    FreeVariables(Vec<String>),
    #[error("disjunctive normal form exceeds {0} literals")]
    DnfTooLarge(usize),
    #[error("non-integer coefficient in `{0}`; only integer polynomials are allowed")]
    NonIntegerCoefficient(String),
    #[error("coefficient {0} is too large to expand")]
    CoefficientTooLarge(BigInt),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

pub type Result<T> = std::result::Result<T, NormalizeError>;

/// An equation or its negation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Literal {
    pub negated: bool,
    pub lhs: Term,
    pub rhs: Term,
}

impl Literal {
    pub fn to_formula(&self) -> Formula {
        let eq = Formula::eq(self.lhs.clone(), self.rhs.clone());
        if self.negated {
            Formula::not(eq)
        } else {
            eq
        }
    }
}

/// A conjunction of atoms over a variable table whose entry 0 is the free variable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstraintSystem {
    pub vars: Vec<String>,
    pub atoms: Vec<Atom>,
}

impl ConstraintSystem {
    pub fn free_var(&self) -> &str {
        &self.vars[0]
    }

    pub fn csp<'a>(&self, field: &'a FieldDescriptor) -> Result<Csp<'a>> {
        Ok(Csp::new(field.finite()?, self.vars.len(), self.atoms.clone()))
    }

    /// Values of the free variable for which the system is satisfiable.
    pub fn projection(&self, field: &FieldDescriptor) -> Result<Vec<FieldElement>> {
        let csp = self.csp(field)?;
        let ff = field.finite()?;
        Ok(ff.elements().filter(|&x| csp.is_satisfiable(&[(0, x)])).map(|x| ff.element(x)).collect())
    }

    /// `exists v1 ... . (a1 & a2 & ...)` over the table's names.
    pub fn to_formula(&self) -> Formula {
        let conj: Vec<Formula> = self
            .atoms
            .iter()
            .map(|a| {
                let v = |i: usize| Term::var(&self.vars[i]);
                match *a {
                    Atom::Plus(i, j, k) => Formula::eq(Term::Add(vec![v(i), v(j)]), v(k)),
                    Atom::Times(i, j, k) => Formula::eq(Term::mul(v(i), v(j)), v(k)),
                    Atom::One(i) => Formula::eq(v(i), Term::one()),
                }
            })
            .collect();
        let body = match conj.len() {
            0 => Formula::eq(Term::zero(), Term::zero()),
            _ => Formula::and(conj),
        };
        let used: Vec<&String> = self.vars[1..]
            .iter()
            .enumerate()
            .filter(|(i, _)| self.atoms.iter().any(|a| a.vars().contains(&(i + 1))))
            .map(|(_, v)| v)
            .collect();
        Formula::exists_all(&used, body)
    }
}

/// Variable accounting for one disjunct.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DisjunctStats {
    pub negations: usize,
    pub vars_before: usize,
    pub vars_after_negations: usize,
    pub vars_total: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalizedFormula {
    pub free_var: String,
    pub disjuncts: Vec<ConstraintSystem>,
    pub stats: Vec<DisjunctStats>,
}

impl NormalizedFormula {
    pub fn negations(&self) -> usize {
        self.stats.iter().map(|s| s.negations).sum()
    }

    pub fn negation_vars(&self) -> usize {
        self.stats.iter().map(|s| s.vars_after_negations - s.vars_before).sum()
    }

    /// Union of the disjuncts' projections, in field order.
    pub fn definable_set(&self, field: &FieldDescriptor) -> Result<Vec<FieldElement>> {
        let ff = field.finite()?;
        let csps = self.disjuncts.iter().map(|d| d.csp(field)).collect::<Result<Vec<_>>>()?;
        Ok(ff
            .elements()
            .filter(|&x| csps.iter().any(|c| c.is_satisfiable(&[(0, x)])))
            .map(|x| ff.element(x))
            .collect())
    }

    pub fn to_formula(&self) -> Formula {
        Formula::or(self.disjuncts.iter().map(ConstraintSystem::to_formula).collect())
    }

    /// Line-oriented listing: variable table, then one atom per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "free: {}", self.free_var);
        let _ = writeln!(out, "disjuncts: {}", self.disjuncts.len());
        for (i, (d, s)) in self.disjuncts.iter().zip(&self.stats).enumerate() {
            let _ = writeln!(
                out,
                "-- disjunct {}: negations {}, fresh vars {}, atomization vars {}",
                i + 1,
                s.negations,
                s.vars_after_negations - s.vars_before,
                s.vars_total - s.vars_after_negations
            );
            let _ = writeln!(out, "vars: {}", d.vars.join(" "));
            for a in &d.atoms {
                let _ = writeln!(out, "{}", a.display(&d.vars));
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// negation normal form, prenex, DNF

/// Negation normal form whose leaves are literals; quantifiers handled by the caller.
enum Nnf {
    Lit(Literal),
    And(Vec<Nnf>),
    Or(Vec<Nnf>),
}

struct Prenexer {
    names: NameSupply,
    prefix: Vec<String>,
    hoist: bool,
}

impl Prenexer {
    fn walk(&mut self, f: &Formula, negated: bool, env: &HashMap<String, Term>) -> Result<Nnf> {
        Ok(match f {
            Formula::Equal(a, b) => Nnf::Lit(Literal { negated, lhs: a.substitute(env), rhs: b.substitute(env) }),
            Formula::Pred(name, _) => return Err(NormalizeError::Predicate(name.clone())),
            Formula::Not(g) => self.walk(g, !negated, env)?,
            Formula::And(gs) | Formula::Or(gs) => {
                let parts = gs.iter().map(|g| self.walk(g, negated, env)).collect::<Result<Vec<_>>>()?;
                if matches!(f, Formula::And(_)) != negated {
                    Nnf::And(parts)
                } else {
                    Nnf::Or(parts)
                }
            }
            Formula::Implies(..) | Formula::Iff(..) => self.walk(&f.desugar(), negated, env)?,
            Formula::Exists(v, g) | Formula::ForAll(v, g) => {
                let existential = matches!(f, Formula::Exists(..)) != negated;
                if !self.hoist {
                    return Err(NormalizeError::Quantifier(v.clone()));
                }
                if !existential {
                    return Err(NormalizeError::UniversalQuantifier(v.clone()));
                }
                let fresh = self.names.fresh(v);
                self.prefix.push(fresh.clone());
                let mut inner = env.clone();
                inner.insert(v.clone(), Term::var(&fresh));
                self.walk(g, negated, &inner)?
            }
        })
    }
}

fn distribute(n: &Nnf, cap: usize) -> Result<Vec<Vec<Literal>>> {
    let out = match n {
        Nnf::Lit(l) => vec![vec![l.clone()]],
        Nnf::Or(parts) => {
            let mut out = Vec::new();
            for p in parts {
                out.extend(distribute(p, cap)?);
            }
            out
        }
        Nnf::And(parts) => {
            let mut acc: Vec<Vec<Literal>> = vec![Vec::new()];
            for p in parts {
                let rhs = distribute(p, cap)?;
                let mut next = Vec::with_capacity(acc.len() * rhs.len());
                let mut size = 0;
                for a in &acc {
                    for b in &rhs {
                        size += a.len() + b.len();
                        if size > cap {
                            return Err(NormalizeError::DnfTooLarge(cap));
                        }
                        next.push(a.iter().chain(b).cloned().collect());
                    }
                }
                acc = next;
            }
            acc
        }
    };
    if out.iter().map(Vec::len).sum::<usize>() > cap {
        return Err(NormalizeError::DnfTooLarge(cap));
    }
    Ok(out)
}

/// Disjunctive normal form of a quantifier-free formula.
pub fn to_dnf(f: &Formula, cap: usize) -> Result<Vec<Vec<Literal>>> {
    let mut p = Prenexer { names: NameSupply::default(), prefix: Vec::new(), hoist: false };
    let nnf = p.walk(f, false, &HashMap::new())?;
    distribute(&nnf, cap)
}

/// Hoists existential quantifiers to the front, renaming bound variables apart.
/// Returns the bound variables outermost first and the quantifier-free matrix.
pub fn prenex(f: &Formula) -> Result<(Vec<String>, Formula)> {
    let mut p = Prenexer { names: NameSupply::new(f.free_vars()), prefix: Vec::new(), hoist: true };
    let nnf = p.walk(f, false, &HashMap::new())?;
    fn back(n: &Nnf) -> Formula {
        match n {
            Nnf::Lit(l) => l.to_formula(),
            Nnf::And(ps) => Formula::and(ps.iter().map(back).collect()),
            Nnf::Or(ps) => Formula::or(ps.iter().map(back).collect()),
        }
    }
    Ok((p.prefix, back(&nnf)))
}

// ---------------------------------------------------------------------------
// negation elimination

fn integral_poly(t: &Term) -> Result<Poly> {
    let p = t.to_poly()?;
    if !p.is_integral() {
        return Err(NormalizeError::NonIntegerCoefficient(t.to_string()));
    }
    Ok(p)
}

/// Replaces each `l != r` by `W*t - 1 = 0` with `W = l - r` and a fresh `t`.
/// Returns the equations in literal order and the fresh names in creation order.
pub fn eliminate_negations(conj: &[Literal], names: &mut NameSupply) -> Result<(Vec<(Term, Term)>, Vec<String>)> {
    let mut eqs = Vec::with_capacity(conj.len());
    let mut fresh = Vec::new();
    for lit in conj {
        if !lit.negated {
            eqs.push((lit.lhs.clone(), lit.rhs.clone()));
            continue;
        }
        let w = integral_poly(&lit.lhs)?.sub(&integral_poly(&lit.rhs)?);
        let t = names.next_indexed("_t");
        let product = match Term::from_poly(&w) {
            Term::Mul(mut fs) => {
                fs.push(Term::var(&t));
                Term::Mul(fs)
            }
            other => Term::mul(other, Term::var(&t)),
        };
        eqs.push((Term::sub(product, Term::one()), Term::zero()));
        fresh.push(t);
    }
    Ok((eqs, fresh))
}

// ---------------------------------------------------------------------------
// atomization

enum Slot {
    Named(String),
    Fresh,
}

struct Atomizer<'a> {
    slots: Vec<Slot>,
    index: HashMap<String, usize>,
    atoms: Vec<Atom>,
    names: &'a mut NameSupply,
    zero: Option<usize>,
    consts: HashMap<u64, usize>,
    monomials: HashMap<Monomial, usize>,
    multiples: HashMap<(usize, u64), usize>,
    sums: HashMap<Vec<(Monomial, u64)>, usize>,
}

impl Atomizer<'_> {
    fn var(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.slots.push(Slot::Named(name.to_string()));
        self.index.insert(name.to_string(), self.slots.len() - 1);
        self.slots.len() - 1
    }

    fn fresh(&mut self) -> usize {
        self.slots.push(Slot::Fresh);
        self.slots.len() - 1
    }

    fn define(&mut self, make: impl FnOnce(usize) -> Atom) -> usize {
        let v = self.fresh();
        self.atoms.push(make(v));
        v
    }

    fn zero(&mut self) -> usize {
        if let Some(z) = self.zero {
            return z;
        }
        let z = self.define(|z| Atom::Plus(z, z, z));
        self.zero = Some(z);
        z
    }

    fn constant(&mut self, c: u64) -> usize {
        if let Some(&v) = self.consts.get(&c) {
            return v;
        }
        let v = if c == 1 {
            self.define(Atom::One)
        } else {
            let prev = self.constant(c - 1);
            let one = self.constant(1);
            self.define(|v| Atom::Plus(prev, one, v))
        };
        self.consts.insert(c, v);
        v
    }

    fn monomial(&mut self, m: &Monomial) -> usize {
        if m.is_one() {
            return self.constant(1);
        }
        if let Some(&v) = self.monomials.get(m) {
            return v;
        }
        let factors: Vec<&str> =
            m.powers().iter().flat_map(|(v, e)| std::iter::repeat(v.as_str()).take(*e as usize)).collect();
        let mut acc = self.var(factors[0]);
        let mut prefix = vec![(factors[0].to_string(), 1u32)];
        for f in &factors[1..] {
            prefix.push((f.to_string(), 1));
            let key = Monomial::from_powers(prefix.clone());
            acc = match self.monomials.get(&key) {
                Some(&v) => v,
                None => {
                    let x = self.var(f);
                    let v = self.define(|v| Atom::Times(acc, x, v));
                    self.monomials.insert(key, v);
                    v
                }
            };
        }
        acc
    }

    fn term(&mut self, m: &Monomial, c: u64) -> usize {
        if m.is_one() {
            return self.constant(c);
        }
        let base = self.monomial(m);
        self.multiple(base, c)
    }

    fn multiple(&mut self, base: usize, c: u64) -> usize {
        if c == 1 {
            return base;
        }
        if let Some(&v) = self.multiples.get(&(base, c)) {
            return v;
        }
        let prev = self.multiple(base, c - 1);
        let v = self.define(|v| Atom::Plus(prev, base, v));
        self.multiples.insert((base, c), v);
        v
    }

    fn sum(&mut self, items: &[(Monomial, u64)]) -> usize {
        let mut acc = self.term(&items[0].0, items[0].1);
        for end in 2..=items.len() {
            let key = items[..end].to_vec();
            acc = match self.sums.get(&key) {
                Some(&v) => v,
                None => {
                    let (m, c) = &items[end - 1];
                    let t = self.term(m, *c);
                    let v = self.define(|v| Atom::Plus(acc, t, v));
                    self.sums.insert(key, v);
                    v
                }
            };
        }
        acc
    }

    /// Makes `value` equal to `target`: renames the freshly defined result
    /// when possible, otherwise adds `value + 0 = target`.
    fn settle(&mut self, value: usize, target: usize, mark: usize) {
        if value == target {
            return;
        }
        let last_defines = |a: &Atom| match *a {
            Atom::Plus(i, j, k) | Atom::Times(i, j, k) => k == value && i != value && j != value,
            Atom::One(i) => i == value,
        };
        if value >= mark && value + 1 == self.slots.len() && self.atoms.last().is_some_and(last_defines) {
            let last = self.atoms.pop().expect("checked");
            self.atoms.push(last.map(|i| if i == value { target } else { i }));
            self.slots.pop();
            let swap = |v: &mut usize| {
                if *v == value {
                    *v = target;
                }
            };
            self.consts.values_mut().for_each(swap);
            self.monomials.values_mut().for_each(swap);
            self.multiples.values_mut().for_each(swap);
            self.sums.values_mut().for_each(swap);
            return;
        }
        let z = self.zero();
        self.atoms.push(Atom::Plus(value, z, target));
    }

    fn equation(&mut self, lhs: &Term, rhs: &Term) -> Result<()> {
        let mut order = Vec::new();
        source_order(lhs, &mut order)?;
        source_order(rhs, &mut order)?;
        let d = integral_poly(lhs)?.sub(&integral_poly(rhs)?);
        let rank = |m: &Monomial| order.iter().position(|o| o == m).unwrap_or(usize::MAX);
        let mut terms: Vec<(&Monomial, &num_rational::BigRational)> = d.terms().collect();
        terms.sort_by_key(|(m, _)| rank(m));
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for (m, c) in terms {
            let n = c.numer().abs();
            let small = n.to_u64().ok_or_else(|| NormalizeError::CoefficientTooLarge(n.clone()))?;
            if c.is_positive() {
                pos.push((m.clone(), small));
            } else {
                neg.push((m.clone(), small));
            }
        }
        let bare = |side: &[(Monomial, u64)]| match side {
            [(m, 1)] if m.degree() == 1 => Some(m.powers()[0].0.clone()),
            _ => None,
        };
        match (pos.is_empty(), neg.is_empty()) {
            (true, true) => {}
            (false, true) | (true, false) => {
                let side = if pos.is_empty() { &neg } else { &pos };
                let s = self.sum(side);
                self.atoms.push(Atom::Plus(s, s, s));
            }
            (false, false) => {
                if let Some(b) = bare(&neg) {
                    let target = self.var(&b);
                    let mark = self.slots.len();
                    let v = self.sum(&pos);
                    self.settle(v, target, mark);
                } else if let Some(a) = bare(&pos) {
                    let target = self.var(&a);
                    let mark = self.slots.len();
                    let v = self.sum(&neg);
                    self.settle(v, target, mark);
                } else {
                    let target = self.sum(&pos);
                    let mark = self.slots.len();
                    let v = self.sum(&neg);
                    self.settle(v, target, mark);
                }
            }
        }
        Ok(())
    }

    fn finish(self) -> ConstraintSystem {
        let names = self.names;
        let vars = self
            .slots
            .into_iter()
            .map(|s| match s {
                Slot::Named(n) => n,
                Slot::Fresh => names.next_indexed("_t"),
            })
            .collect();
        ConstraintSystem { vars, atoms: self.atoms }
    }
}

// Monomials in left-to-right order of the summands they come from.
fn source_order(t: &Term, out: &mut Vec<Monomial>) -> Result<()> {
    match t {
        Term::Add(items) => {
            for i in items {
                source_order(i, out)?;
            }
        }
        Term::Neg(inner) => source_order(inner, out)?,
        _ => {
            for (m, _) in t.to_poly()?.terms() {
                if !out.contains(m) {
                    out.push(m.clone());
                }
            }
        }
    }
    Ok(())
}

/// Breaks polynomial equations into three-address atoms. `vars` seeds the
/// variable table (free variable first); fresh variables are named from
/// `names` in table order once the system is complete.
pub fn atomize(eqs: &[(Term, Term)], vars: &[String], names: &mut NameSupply) -> Result<ConstraintSystem> {
    let mut a = Atomizer {
        slots: Vec::new(),
        index: HashMap::new(),
        atoms: Vec::new(),
        names,
        zero: None,
        consts: HashMap::new(),
        monomials: HashMap::new(),
        multiples: HashMap::new(),
        sums: HashMap::new(),
    };
    for v in vars {
        a.var(v);
    }
    for (l, r) in eqs {
        a.equation(l, r)?;
    }
    Ok(a.finish())
}

// ---------------------------------------------------------------------------
// full pipeline

#[derive(Clone, Copy, Debug)]
pub struct NormalizeOptions {
    pub dnf_cap: usize,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions { dnf_cap: DEFAULT_DNF_CAP }
    }
}

/// Normalizes an existential formula with exactly one free variable.
pub fn normalize(f: &Formula) -> Result<NormalizedFormula> {
    let free = f.free_vars();
    if free.len() != 1 {
        return Err(NormalizeError::FreeVariables(free));
    }
    normalize_for(f, &free[0], NormalizeOptions::default())
}

/// Like [`normalize`] but names the distinguished variable explicitly, so the
/// formula may also have no free variable at all.
pub fn normalize_for(f: &Formula, var: &str, opts: NormalizeOptions) -> Result<NormalizedFormula> {
    let free = f.free_vars();
    if free.iter().any(|v| v != var) {
        return Err(NormalizeError::FreeVariables(free));
    }
    let (bound, matrix) = prenex(f)?;
    let dnf = to_dnf(&matrix, opts.dnf_cap)?;
    let mut names = NameSupply::new(matrix.all_vars().into_iter().chain(bound.iter().cloned()));
    names.reserve(var);
    let mut disjuncts = Vec::new();
    let mut stats = Vec::new();
    for conj in dnf {
        let mut occurring = Vec::new();
        for l in &conj {
            occurring.extend(l.lhs.vars());
            occurring.extend(l.rhs.vars());
        }
        let mut table = vec![var.to_string()];
        table.extend(bound.iter().filter(|b| occurring.contains(b)).cloned());
        let vars_before = table.len();
        let (eqs, fresh) = eliminate_negations(&conj, &mut names)?;
        table.extend(fresh);
        let vars_after_negations = table.len();
        let system = atomize(&eqs, &table, &mut names)?;
        stats.push(DisjunctStats {
            negations: vars_after_negations - vars_before,
            vars_before,
            vars_after_negations,
            vars_total: system.vars.len(),
        });
        disjuncts.push(system);
    }
    Ok(NormalizedFormula { free_var: var.to_string(), disjuncts, stats })
}

/// Every satisfying assignment of `s` over a finite field, in table order.
pub fn solve_system(s: &ConstraintSystem, field: &FieldDescriptor, cap: usize) -> Result<Vec<Vec<FieldElement>>> {
    let csp = s.csp(field)?;
    let ff = field.finite()?;
    Ok(csp.solutions(&[], cap)?.into_iter().map(|sol| sol.into_iter().map(|v| ff.element(v)).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{definable_set, parse, parse_term};

    fn lit(neg: bool, l: &str, r: &str) -> Literal {
        Literal { negated: neg, lhs: parse_term(l).unwrap(), rhs: parse_term(r).unwrap() }
    }

    fn show(s: &ConstraintSystem) -> Vec<String> {
        s.atoms.iter().map(|a| a.display(&s.vars).to_string()).collect()
    }

    fn atomize_one(l: &str, r: &str) -> ConstraintSystem {
        let eq = (parse_term(l).unwrap(), parse_term(r).unwrap());
        let mut names = NameSupply::new(["x".to_string(), "y".to_string(), "z".to_string()]);
        atomize(&[eq], &[], &mut names).unwrap()
    }

    #[test]
    fn worked_example() {
        let s = atomize_one("1 + x + y^2", "0");
        assert_eq!(
            show(&s),
            ["_t1 = 1", "_t1 + x = _t2", "y * y = _t3", "_t2 + _t3 = _t4", "_t4 + _t4 = _t4"]
        );
    }

    #[test]
    fn pass_through_shapes() {
        assert_eq!(show(&atomize_one("x", "0")), ["x + x = x"]);
        assert_eq!(show(&atomize_one("x + y", "z")), ["x + y = z"]);
        assert_eq!(show(&atomize_one("x*y", "z")), ["x * y = z"]);
        assert_eq!(show(&atomize_one("x", "1")), ["x = 1"]);
        assert_eq!(show(&atomize_one("x", "y")), ["_t1 + _t1 = _t1", "x + _t1 = y"]);
    }

    #[test]
    fn constants_and_reuse() {
        let s = atomize_one("x", "3");
        assert_eq!(show(&s), ["_t1 = 1", "_t1 + _t1 = _t2", "_t2 + _t1 = x"]);
        let s = atomize_one("2*x*y + x*y", "0");
        // x*y is built once and reused for both multiples
        assert_eq!(s.atoms.iter().filter(|a| matches!(a, Atom::Times(..))).count(), 1);
    }

    #[test]
    fn dnf_cases() {
        let f = parse("(a = 1 | b = 1) & c = 1").unwrap();
        let d = to_dnf(&f, 100).unwrap();
        assert_eq!(d, vec![vec![lit(false, "a", "1"), lit(false, "c", "1")], vec![lit(false, "b", "1"), lit(false, "c", "1")]]);
        let g = parse("~(a = 1 & b = 1)").unwrap();
        assert_eq!(to_dnf(&g, 100).unwrap(), vec![vec![lit(true, "a", "1")], vec![lit(true, "b", "1")]]);
        let already = parse("a = 1 & b = 1 | c = 1").unwrap();
        assert_eq!(to_dnf(&already, 100).unwrap().len(), 2);
        assert!(matches!(to_dnf(&parse("exists y. y = 1").unwrap(), 100), Err(NormalizeError::Quantifier(_))));
        let wide = parse("(a = 1 | b = 1) & (c = 1 | d = 1) & (e = 1 | f = 1)").unwrap();
        assert_eq!(to_dnf(&wide, 10), Err(NormalizeError::DnfTooLarge(10)));
    }

    #[test]
    fn negation_elimination() {
        let mut names = NameSupply::new(["x".to_string(), "y".to_string()]);
        let (eqs, fresh) = eliminate_negations(&[lit(true, "x", "0")], &mut names).unwrap();
        assert_eq!(fresh, ["_t1"]);
        assert_eq!(Formula::eq(eqs[0].0.clone(), eqs[0].1.clone()).to_string(), "x*_t1 - 1 = 0");
        let (eqs, fresh) = eliminate_negations(&[lit(true, "x", "y")], &mut names).unwrap();
        assert_eq!(fresh, ["_t2"]);
        assert_eq!(Formula::eq(eqs[0].0.clone(), eqs[0].1.clone()).to_string(), "(x - y)*_t2 - 1 = 0");
        let (eqs, fresh) = eliminate_negations(&[lit(false, "x", "y")], &mut names).unwrap();
        assert!(fresh.is_empty());
        assert_eq!(eqs, vec![(Term::var("x"), Term::var("y"))]);
    }

    #[test]
    fn pipeline_examples() {
        let f5 = FieldDescriptor::parse("F5").unwrap();
        let f = parse("exists y. (x = y*y & y != 0)").unwrap();
        let n = normalize(&f).unwrap();
        assert_eq!(n.disjuncts.len(), 1);
        assert_eq!(n.negations(), 1);
        assert_eq!(n.definable_set(&f5).unwrap(), definable_set(&f, &f5, "x").unwrap());
        assert_eq!(n.definable_set(&f5).unwrap(), vec![f5.from_i64(1), f5.from_i64(4)]);

        let one = normalize(&parse("x = 1").unwrap()).unwrap();
        assert_eq!(one.disjuncts[0].atoms, vec![Atom::One(0)]);

        let f3 = FieldDescriptor::parse("F3").unwrap();
        let sq = parse("exists y. x = y*y").unwrap();
        assert_eq!(normalize(&sq).unwrap().definable_set(&f3).unwrap(), vec![f3.from_i64(0), f3.from_i64(1)]);
    }

    #[test]
    fn prenex_renames_apart() {
        let f = parse("(exists y. x = y*y) & (exists y. y + y = x) | exists x1. x1 = x").unwrap();
        let (bound, matrix) = prenex(&f).unwrap();
        assert_eq!(bound, ["y", "y1", "x1"]);
        assert_eq!(matrix.to_string(), "x = y*y & y1 + y1 = x | x1 = x");
        let g = parse("~(forall y. y = x)").unwrap();
        assert_eq!(prenex(&g).unwrap().0, ["y"]);
        assert!(matches!(prenex(&parse("forall y. y = x").unwrap()), Err(NormalizeError::UniversalQuantifier(_))));
        assert!(matches!(prenex(&parse("~(exists y. y = x)").unwrap()), Err(NormalizeError::UniversalQuantifier(_))));
    }

    #[test]
    fn errors() {
        assert!(matches!(normalize(&parse("x = y").unwrap()), Err(NormalizeError::FreeVariables(_))));
        assert!(matches!(normalize(&parse("U(x)").unwrap()), Err(NormalizeError::Predicate(_))));
        assert!(matches!(
            normalize(&parse("1/2*x = 1").unwrap()),
            Err(NormalizeError::NonIntegerCoefficient(_))
        ));
    }

    #[test]
    fn solve_examples() {
        let f5 = FieldDescriptor::parse("F5").unwrap();
        let s = ConstraintSystem { vars: vec!["a".into(), "b".into()], atoms: vec![Atom::One(0), Atom::Plus(0, 0, 1)] };
        assert_eq!(solve_system(&s, &f5, 100).unwrap(), vec![vec![f5.from_i64(1), f5.from_i64(2)]]);
        let q = FieldDescriptor::rationals();
        assert!(matches!(solve_system(&s, &q, 100), Err(NormalizeError::Field(FieldError::InfiniteField(_)))));
    }

    #[test]
    fn text_listing() {
        let n = normalize(&parse("exists y. ~(y=0) & x*y=1").unwrap()).unwrap();
        let text = n.to_text();
        assert!(text.starts_with("free: x\ndisjuncts: 1\n-- disjunct 1: negations 1, fresh vars 1,"), "{text}");
        assert_eq!(n.stats[0].vars_after_negations - n.stats[0].vars_before, 1);
    }
}
