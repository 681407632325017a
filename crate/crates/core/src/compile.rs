//! Neighbourhoods to existential formulas and back, and the one-equation encoder.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldDescriptor, FieldElement, FieldError, FieldKind};
use crate::formula::{definable_set, EvalError, Formula, Term};
use crate::neighbourhood::{facts, is_neighbourhood, FactSet, Neighbourhood, NeighbourhoodError};
use crate::normalize::{normalize_for, NormalizeError, NormalizeOptions};
use crate::poly::Poly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompileError {
    #[error("distinguished element {0} takes part in no relation of the set")]
    NotDefining(String),
    #[error("formula defines {} elements, not exactly one: [{}]", .0.len(), join(.0))]
    NotSingleton(Vec<FieldElement>),
    #[error("no disjunct is satisfiable at the defined element")]
    NoSatisfiableDisjunct,
    #[error("internal: constructed set is not a neighbourhood of {0}")]
    NotNeighbourhood(String),
    #[error("formula must have at most the single free variable `{expected}`, found {found:?}")]
    FreeVariables { expected: String, found: Vec<String> },
    #[error("nothing to combine")]
    NoEquations,
    #[error("polynomial must have degree at least 2, got {0}")]
    DegreeTooSmall(u32),
    #[error("polynomial {0} has a root in {1}")]
    HasRoot(String, String),
    #[error("{0} is not in the prime field")]
    NotPrimeFieldElement(String),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error(transparent)]
    Neighbourhood(#[from] NeighbourhoodError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn join(xs: &[FieldElement]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

pub type Result<T> = std::result::Result<T, CompileError>;

/// Variable name for position `i` of a neighbourhood: the target is `x`,
/// the others `x2`, `x3`, ... in the set's order.
fn element_names(a: &Neighbourhood) -> Vec<String> {
    let mut next = 2;
    (0..a.len())
        .map(|i| {
            if i == a.target_index() {
                "x".to_string()
            } else {
                next += 1;
                format!("x{}", next - 1)
            }
        })
        .collect()
}

fn defining_facts(a: &Neighbourhood) -> Result<FactSet> {
    let fs = facts(a).essential(a);
    if !fs.mentions(a.target_index()) {
        return Err(CompileError::NotDefining(a.target().to_string()));
    }
    Ok(fs)
}

fn quantified(a: &Neighbourhood, fs: &FactSet, names: &[String]) -> Vec<String> {
    (0..a.len()).filter(|&i| i != a.target_index() && fs.mentions(i)).map(|i| names[i].clone()).collect()
}

/// `exists ... . (conjunction of the set's relations)` with free variable `x`.
pub fn neighbourhood_to_formula(a: &Neighbourhood) -> Result<Formula> {
    let fs = defining_facts(a)?;
    let names = element_names(a);
    let v = |i: usize| Term::var(&names[i]);
    let mut conj: Vec<Formula> = fs.ones.iter().map(|&i| Formula::eq(v(i), Term::one())).collect();
    conj.extend(fs.sums.iter().map(|&(i, j, k)| Formula::eq(Term::Add(vec![v(i), v(j)]), v(k))));
    conj.extend(fs.products.iter().map(|&(i, j, k)| Formula::eq(Term::mul(v(i), v(j)), v(k))));
    Ok(Formula::exists_all(&quantified(a, &fs, &names), Formula::and(conj)))
}

/// Result of turning a defining formula into a neighbourhood.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormulaNeighbourhood {
    pub neighbourhood: Neighbourhood,
    /// Index of the disjunct whose witness was used.
    pub disjunct: usize,
    /// Whether that disjunct on its own defines the singleton.
    pub disjunct_defines_alone: bool,
    pub witness: Vec<(String, FieldElement)>,
}

/// Neighbourhood of the unique element defined by `f` over a finite field.
pub fn formula_to_neighbourhood(f: &Formula, field: &FieldDescriptor) -> Result<FormulaNeighbourhood> {
    let free = f.free_vars();
    let var = match free.as_slice() {
        [v] => v.clone(),
        _ => return Err(CompileError::FreeVariables { expected: "x".into(), found: free }),
    };
    let set = definable_set(f, field, &var)?;
    if set.len() != 1 {
        return Err(CompileError::NotSingleton(set));
    }
    let r = set[0].clone();
    let ff = field.finite()?;
    let r_idx = ff.index(&r).expect("member");
    let nf = normalize_for(f, &var, NormalizeOptions::default())?;
    for (d, system) in nf.disjuncts.iter().enumerate() {
        let csp = system.csp(field)?;
        let Some(sol) = csp.first_solution(&[(0, r_idx)]) else {
            continue;
        };
        let mut elements = vec![field.one(), r.clone()];
        let mut witness = Vec::new();
        for (i, name) in system.vars.iter().enumerate().skip(1) {
            if system.atoms.iter().any(|a| a.vars().contains(&i)) {
                let w = ff.element(sol[i]);
                witness.push((name.clone(), w.clone()));
                elements.push(w);
            }
        }
        let neighbourhood = Neighbourhood::new(field.clone(), elements, &r)?;
        if !is_neighbourhood(&neighbourhood)?.is_yes() {
            return Err(CompileError::NotNeighbourhood(r.to_string()));
        }
        let disjunct_defines_alone = system.projection(field)? == set;
        return Ok(FormulaNeighbourhood { neighbourhood, disjunct: d, disjunct_defines_alone, witness });
    }
    Err(CompileError::NoSatisfiableDisjunct)
}

/// A univariate integer polynomial of degree at least 2 without roots in a field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootlessPolynomial {
    /// Lowest degree first; the last entry is non-zero.
    #[serde(serialize_with = "ints_as_strings")]
    pub coefficients: Vec<BigInt>,
    pub field: FieldDescriptor,
}

fn ints_as_strings<S: serde::Serializer>(xs: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(ToString::to_string))
}

impl RootlessPolynomial {
    /// Validates degree and rootlessness (exhaustively, or by the rational root test over Q).
    pub fn new(coefficients: Vec<BigInt>, field: FieldDescriptor) -> Result<Self> {
        let mut coefficients = coefficients;
        while coefficients.last().is_some_and(Zero::is_zero) {
            coefficients.pop();
        }
        let degree = coefficients.len().saturating_sub(1) as u32;
        if degree < 2 {
            return Err(CompileError::DegreeTooSmall(degree));
        }
        let p = RootlessPolynomial { coefficients, field };
        if p.has_root()? {
            return Err(CompileError::HasRoot(p.poly("x").to_string(), p.field.spec()));
        }
        Ok(p)
    }

    pub fn degree(&self) -> u32 {
        self.coefficients.len() as u32 - 1
    }

    pub fn poly(&self, var: &str) -> Poly {
        let cs: Vec<BigRational> = self.coefficients.iter().map(|c| BigRational::from_integer(c.clone())).collect();
        Poly::from_coefficients(var, &cs)
    }

    fn has_root(&self) -> Result<bool> {
        if self.field.is_finite() {
            let p = self.poly("x");
            for e in self.field.elements()? {
                let at = HashMap::from([("x".to_string(), e)]);
                if p.eval(&self.field, &at)?.is_zero() {
                    return Ok(true);
                }
            }
            return Ok(false);
        }
        Ok(rational_roots(&self.coefficients).next().is_some())
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if n.is_multiple_of(&d) {
            out.push(d.clone());
            let e = &n / &d;
            if e != d {
                out.push(e);
            }
        }
        d += 1;
    }
    out
}

/// Rational roots by the rational root test.
fn rational_roots(coeffs: &[BigInt]) -> impl Iterator<Item = BigRational> + '_ {
    let low = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0);
    let zero_root = (low > 0).then(BigRational::zero);
    let c0 = coeffs[low].clone();
    let lead = coeffs.last().cloned().unwrap_or_else(BigInt::one);
    let mut candidates = Vec::new();
    for p in divisors(&c0) {
        for q in divisors(&lead) {
            let r = BigRational::new(p.clone(), q);
            candidates.push(r.clone());
            candidates.push(-r);
        }
    }
    let eval = move |x: &BigRational| {
        coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    };
    zero_root.into_iter().chain(candidates.into_iter().filter(move |r| eval(r).is_zero()))
}

/// First rootless polynomial: smallest degree from 2 up, then coefficient
/// vectors in the same order as field elements. Over Q this is `x^2 + 1`.
pub fn find_rootless(field: &FieldDescriptor) -> Result<RootlessPolynomial> {
    if !field.is_finite() {
        return RootlessPolynomial::new(vec![BigInt::one(), BigInt::zero(), BigInt::one()], field.clone());
    }
    let p = field.characteristic();
    for n in 2u32.. {
        let count = p.pow(n);
        for code in 0..count {
            let mut coeffs: Vec<BigInt> = (0..n).map(|i| BigInt::from((code / p.pow(i)) % p)).collect();
            coeffs.push(BigInt::one());
            if let Ok(r) = RootlessPolynomial::new(coeffs, field.clone()) {
                return Ok(r);
            }
        }
    }
    unreachable!("every finite field has rootless polynomials of some degree")
}

/// `B(x, y) = sum a_i x^i y^(n-i)`.
pub fn homogenize(p: &RootlessPolynomial) -> Result<Poly> {
    let n = p.degree();
    if n < 2 {
        return Err(CompileError::DegreeTooSmall(n));
    }
    let (x, y) = (Poly::var("x"), Poly::var("y"));
    let mut out = Poly::zero();
    for (i, c) in p.coefficients.iter().enumerate() {
        let term = x.pow(i as u32).mul(&y.pow(n - i as u32)).scale(&BigRational::from_integer(c.clone()));
        out = out.add(&term);
    }
    Ok(out)
}

/// Left fold `T <- B(T, next)`; `b` is in the variables `x` and `y`.
pub fn combine_equations(eqs: &[Poly], b: &Poly) -> Result<Poly> {
    let (first, rest) = eqs.split_first().ok_or(CompileError::NoEquations)?;
    let mut acc = first.clone();
    for next in rest {
        let map = HashMap::from([("x".to_string(), acc), ("y".to_string(), next.clone())]);
        acc = b.substitute(&map);
    }
    Ok(acc)
}

/// `exists ... . T = 0` and its pieces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingleEquation {
    pub bound: Vec<String>,
    pub equations: Vec<Poly>,
    pub rootless: RootlessPolynomial,
    pub polynomial: Poly,
}

impl SingleEquation {
    pub fn formula(&self) -> Formula {
        Formula::exists_all(&self.bound, Formula::eq(Term::from_poly(&self.polynomial), Term::zero()))
    }
}

/// The relations of `A` as `x_i + x_j - x_k`, `x_i * x_j - x_k`, `x_i - 1`,
/// merged into one polynomial with the field's rootless form.
pub fn compile_singleton(a: &Neighbourhood) -> Result<SingleEquation> {
    let fs = defining_facts(a)?;
    let names = element_names(a);
    let v = |i: usize| Poly::var(&names[i]);
    let mut equations: Vec<Poly> = Vec::new();
    let mut push = |p: Poly| {
        if !equations.contains(&p) {
            equations.push(p);
        }
    };
    for &i in &fs.ones {
        push(v(i).sub(&Poly::int(1)));
    }
    for &(i, j, k) in &fs.sums {
        push(v(i).add(&v(j)).sub(&v(k)));
    }
    for &(i, j, k) in &fs.products {
        push(v(i).mul(&v(j)).sub(&v(k)));
    }
    let rootless = find_rootless(a.field())?;
    let polynomial = combine_equations(&equations, &homogenize(&rootless)?)?;
    Ok(SingleEquation { bound: quantified(a, &fs, &names), equations, rootless, polynomial })
}

/// `w1*x + w0 = 0` for an element of the prime field.
pub fn prime_field_equation(r: &FieldElement, field: &FieldDescriptor) -> Result<Formula> {
    let (w1, w0) = match field.kind() {
        FieldKind::Rationals => match r {
            FieldElement::Rational(q) => (q.denom().clone(), -q.numer().clone()),
            _ => return Err(FieldError::ForeignElement(r.to_string(), field.spec()).into()),
        },
        _ => {
            let p = field.characteristic();
            let prime = (0..p as i64).map(|c| field.from_i64(c)).position(|e| e == *r);
            match prime {
                Some(c) => (BigInt::one(), BigInt::from((p - c as u64) % p)),
                None => return Err(CompileError::NotPrimeFieldElement(r.to_string())),
            }
        }
    };
    let lhs = Poly::var("x").scale(&BigRational::from_integer(w1)).add(&Poly::constant(BigRational::from_integer(w0)));
    Ok(Formula::eq(Term::from_poly(&lhs), Term::zero()))
}
