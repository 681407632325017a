//! Truth of formulas over finite fields by exhaustive enumeration.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use super::{Formula, Term};
use crate::field::{FieldDescriptor, FieldElement, FieldError, FiniteField};

/// Predicate symbol to the set of argument tuples where it holds.
pub type Interpretation = HashMap<String, HashSet<Vec<FieldElement>>>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("no interpretation for predicate `{0}`")]
    MissingPredicate(String),
    #[error("formula has free variables {found:?}, expected only `{expected}`")]
    FreeVariables { expected: String, found: Vec<String> },
    #[error("division by zero during evaluation")]
    DivisionByZero,
    #[error(transparent)]
    Field(#[from] FieldError),
}

enum CTerm {
    Slot(usize),
    Const(u32),
    Add(Vec<CTerm>),
    Neg(Box<CTerm>),
    Mul(Vec<CTerm>),
    Div(Box<CTerm>, Box<CTerm>),
    Pow(Box<CTerm>, u32),
}

enum CFormula {
    Equal(CTerm, CTerm),
    Pred(usize, Vec<CTerm>),
    Not(Box<CFormula>),
    And(Vec<CFormula>),
    Or(Vec<CFormula>),
    Implies(Box<CFormula>, Box<CFormula>),
    Iff(Box<CFormula>, Box<CFormula>),
    Exists(Box<CFormula>),
    ForAll(Box<CFormula>),
}

struct Compiler<'a> {
    field: &'a FiniteField,
    scope: Vec<String>,
    preds: Vec<String>,
}

impl Compiler<'_> {
    fn term(&self, t: &Term) -> Result<CTerm, EvalError> {
        Ok(match t {
            Term::Var(v) => match self.scope.iter().rposition(|s| s == v) {
                Some(i) => CTerm::Slot(i),
                None => return Err(EvalError::UnboundVariable(v.clone())),
            },
            Term::Const(c) => CTerm::Const(self.field.from_bigint(c)),
            Term::Add(xs) => CTerm::Add(xs.iter().map(|x| self.term(x)).collect::<Result<_, _>>()?),
            Term::Mul(xs) => CTerm::Mul(xs.iter().map(|x| self.term(x)).collect::<Result<_, _>>()?),
            Term::Neg(x) => CTerm::Neg(Box::new(self.term(x)?)),
            Term::Div(a, b) => CTerm::Div(Box::new(self.term(a)?), Box::new(self.term(b)?)),
            Term::Pow(x, e) => CTerm::Pow(Box::new(self.term(x)?), *e),
        })
    }

    fn formula(&mut self, f: &Formula) -> Result<CFormula, EvalError> {
        Ok(match f {
            Formula::Equal(a, b) => CFormula::Equal(self.term(a)?, self.term(b)?),
            Formula::Pred(name, args) => {
                let id = match self.preds.iter().position(|p| p == name) {
                    Some(i) => i,
                    None => {
                        self.preds.push(name.clone());
                        self.preds.len() - 1
                    }
                };
                CFormula::Pred(id, args.iter().map(|t| self.term(t)).collect::<Result<_, _>>()?)
            }
            Formula::Not(g) => CFormula::Not(Box::new(self.formula(g)?)),
            Formula::And(gs) => CFormula::And(gs.iter().map(|g| self.formula(g)).collect::<Result<_, _>>()?),
            Formula::Or(gs) => CFormula::Or(gs.iter().map(|g| self.formula(g)).collect::<Result<_, _>>()?),
            Formula::Implies(a, b) => CFormula::Implies(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            Formula::Iff(a, b) => CFormula::Iff(Box::new(self.formula(a)?), Box::new(self.formula(b)?)),
            Formula::Exists(v, g) | Formula::ForAll(v, g) => {
                self.scope.push(v.clone());
                let body = Box::new(self.formula(g)?);
                self.scope.pop();
                if matches!(f, Formula::Exists(..)) {
                    CFormula::Exists(body)
                } else {
                    CFormula::ForAll(body)
                }
            }
        })
    }
}

struct Machine<'a> {
    field: &'a FiniteField,
    env: Vec<u32>,
    relations: Vec<HashSet<Vec<u32>>>,
}

impl Machine<'_> {
    fn term(&self, t: &CTerm) -> Result<u32, EvalError> {
        let f = self.field;
        Ok(match t {
            CTerm::Slot(i) => self.env[*i],
            CTerm::Const(c) => *c,
            CTerm::Add(xs) => {
                let mut acc = 0;
                for x in xs {
                    acc = f.add(acc, self.term(x)?);
                }
                acc
            }
            CTerm::Mul(xs) => {
                let mut acc = 1;
                for x in xs {
                    acc = f.mul(acc, self.term(x)?);
                }
                acc
            }
            CTerm::Neg(x) => f.neg(self.term(x)?),
            CTerm::Div(a, b) => {
                let d = f.inv(self.term(b)?).ok_or(EvalError::DivisionByZero)?;
                f.mul(self.term(a)?, d)
            }
            CTerm::Pow(x, e) => f.pow(self.term(x)?, u64::from(*e)),
        })
    }

    fn holds(&mut self, c: &CFormula) -> Result<bool, EvalError> {
        Ok(match c {
            CFormula::Equal(a, b) => self.term(a)? == self.term(b)?,
            CFormula::Pred(id, args) => {
                let tuple = args.iter().map(|t| self.term(t)).collect::<Result<Vec<_>, _>>()?;
                self.relations[*id].contains(&tuple)
            }
            CFormula::Not(g) => !self.holds(g)?,
            CFormula::And(gs) => {
                for g in gs {
                    if !self.holds(g)? {
                        return Ok(false);
                    }
                }
                true
            }
            CFormula::Or(gs) => {
                for g in gs {
                    if self.holds(g)? {
                        return Ok(true);
                    }
                }
                false
            }
            CFormula::Implies(a, b) => !self.holds(a)? || self.holds(b)?,
            CFormula::Iff(a, b) => self.holds(a)? == self.holds(b)?,
            CFormula::Exists(g) | CFormula::ForAll(g) => {
                let want = matches!(c, CFormula::Exists(_));
                self.env.push(0);
                let slot = self.env.len() - 1;
                let mut result = !want;
                for v in self.field.elements() {
                    self.env[slot] = v;
                    if self.holds(g)? == want {
                        result = want;
                        break;
                    }
                }
                self.env.pop();
                result
            }
        })
    }
}

/// A formula compiled against a fixed list of free variables.
struct Prepared<'a> {
    machine: Machine<'a>,
    code: CFormula,
}

fn prepare<'a>(
    f: &Formula,
    field: &'a FieldDescriptor,
    free: &[String],
    interp: &Interpretation,
) -> Result<Prepared<'a>, EvalError> {
    let ff = field.finite()?;
    let mut compiler = Compiler { field: ff, scope: free.to_vec(), preds: Vec::new() };
    let code = compiler.formula(f)?;
    let mut relations = Vec::new();
    for name in &compiler.preds {
        let set = interp.get(name).ok_or_else(|| EvalError::MissingPredicate(name.clone()))?;
        let mut rel = HashSet::new();
        for tuple in set {
            rel.insert(tuple.iter().map(|e| field.index_of(e)).collect::<Result<Vec<_>, _>>()?);
        }
        relations.push(rel);
    }
    Ok(Prepared { machine: Machine { field: ff, env: Vec::new(), relations }, code })
}

/// Truth of `f` in the finite field under `assignment` and `interp`.
pub fn evaluate(
    f: &Formula,
    field: &FieldDescriptor,
    assignment: &HashMap<String, FieldElement>,
    interp: &Interpretation,
) -> Result<bool, EvalError> {
    let free = f.free_vars();
    let mut env = Vec::with_capacity(free.len());
    for v in &free {
        let e = assignment.get(v).ok_or_else(|| EvalError::UnboundVariable(v.clone()))?;
        env.push(field.index_of(e)?);
    }
    let mut prepared = prepare(f, field, &free, interp)?;
    prepared.machine.env = env;
    prepared.machine.holds(&prepared.code)
}

/// `{x in K : K |= f(x)}` by brute force; `f` may mention no free variable but `var`.
pub fn definable_set(f: &Formula, field: &FieldDescriptor, var: &str) -> Result<Vec<FieldElement>, EvalError> {
    definable_set_with(f, field, var, &Interpretation::new())
}

pub fn definable_set_with(
    f: &Formula,
    field: &FieldDescriptor,
    var: &str,
    interp: &Interpretation,
) -> Result<Vec<FieldElement>, EvalError> {
    let free = f.free_vars();
    if free.iter().any(|v| v != var) {
        return Err(EvalError::FreeVariables { expected: var.to_string(), found: free });
    }
    let mut prepared = prepare(f, field, &[var.to_string()], interp)?;
    let ff = field.finite()?;
    let mut out = Vec::new();
    for x in ff.elements() {
        prepared.machine.env = vec![x];
        if prepared.machine.holds(&prepared.code)? {
            out.push(ff.element(x));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn k(s: &str) -> FieldDescriptor {
        FieldDescriptor::parse(s).unwrap()
    }

    fn at(field: &FieldDescriptor, var: &str, n: i64) -> HashMap<String, FieldElement> {
        HashMap::from([(var.to_string(), field.from_i64(n))])
    }

    fn ints(field: &FieldDescriptor, xs: &[i64]) -> Vec<FieldElement> {
        xs.iter().map(|&x| field.from_i64(x)).collect()
    }

    #[test]
    fn evaluate_examples() {
        let f5 = k("F5");
        let sq = parse("exists y. x = y*y").unwrap();
        let none = Interpretation::new();
        assert!(evaluate(&sq, &f5, &at(&f5, "x", 4), &none).unwrap());
        assert!(!evaluate(&sq, &f5, &at(&f5, "x", 2), &none).unwrap());
        let m = parse("exists y. 1 + x^4 = y^2").unwrap();
        assert!(evaluate(&m, &f5, &at(&f5, "x", 0), &none).unwrap());
    }

    #[test]
    fn evaluate_errors() {
        let f5 = k("F5");
        let none = Interpretation::new();
        let f = parse("x = y").unwrap();
        assert_eq!(
            evaluate(&f, &f5, &at(&f5, "x", 1), &none),
            Err(EvalError::UnboundVariable("y".into()))
        );
        let g = parse("U(x)").unwrap();
        assert_eq!(evaluate(&g, &f5, &at(&f5, "x", 1), &none), Err(EvalError::MissingPredicate("U".into())));
        let q = FieldDescriptor::rationals();
        assert!(matches!(
            evaluate(&parse("1 = 1").unwrap(), &q, &HashMap::new(), &none),
            Err(EvalError::Field(FieldError::InfiniteField(_)))
        ));
    }

    #[test]
    fn predicates_are_looked_up() {
        let f5 = k("F5");
        let interp: Interpretation =
            HashMap::from([("U".to_string(), [vec![f5.from_i64(2)], vec![f5.from_i64(3)]].into_iter().collect())]);
        let f = parse("exists y. U(y) & x = y + 1").unwrap();
        assert_eq!(definable_set_with(&f, &f5, "x", &interp).unwrap(), ints(&f5, &[3, 4]));
    }

    #[test]
    fn definable_set_examples() {
        let f5 = k("F5");
        let f7 = k("F7");
        let sq = parse("exists y. x = y*y").unwrap();
        // brute force over all 25 pairs
        let oracle: Vec<i64> = (0..5).filter(|x| (0..5).any(|y| (y * y) % 5 == *x)).collect();
        assert_eq!(oracle, vec![0, 1, 4]);
        assert_eq!(definable_set(&sq, &f5, "x").unwrap(), ints(&f5, &oracle));
        assert_eq!(definable_set(&parse("x = 1").unwrap(), &f7, "x").unwrap(), ints(&f7, &[1]));
        let self_inv = parse("exists y. (x*y = 1 & x = y)").unwrap();
        let oracle: Vec<i64> = (0..5).filter(|x| (0..5).any(|y| (x * y) % 5 == 1 && *x == y)).collect();
        assert_eq!(oracle, vec![1, 4]);
        assert_eq!(definable_set(&self_inv, &f5, "x").unwrap(), ints(&f5, &oracle));
        assert!(matches!(
            definable_set(&parse("x = z").unwrap(), &f5, "x"),
            Err(EvalError::FreeVariables { .. })
        ));
    }

    #[test]
    fn extension_field_evaluation() {
        let f4 = k("F2^2");
        // x^2 + x + 1 = 0 has exactly the two non-prime-field roots in F4
        let f = parse("x^2 + x + 1 = 0").unwrap();
        assert_eq!(
            definable_set(&f, &f4, "x").unwrap(),
            vec![FieldElement::Residue(vec![0, 1]), FieldElement::Residue(vec![1, 1])]
        );
    }
}
