//! Seeded random existential formulas for soundness sweeps.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{Formula, Term};

/// Shape limits for generated formulas.
#[derive(Clone, Copy, Debug)]
pub struct RandomShape {
    /// Free plus bound variables.
    pub max_vars: usize,
    pub max_degree: u32,
    pub max_negations: usize,
    pub max_coefficient: i64,
    pub max_literals: usize,
}

impl Default for RandomShape {
    fn default() -> Self {
        RandomShape { max_vars: 3, max_degree: 3, max_negations: 2, max_coefficient: 2, max_literals: 3 }
    }
}

const NAMES: [&str; 4] = ["x", "y", "z", "w"];

pub struct FormulaGenerator {
    rng: ChaCha8Rng,
    shape: RandomShape,
}

impl FormulaGenerator {
    pub fn new(seed: u64, shape: RandomShape) -> Self {
        FormulaGenerator { rng: ChaCha8Rng::seed_from_u64(seed), shape }
    }

    fn coefficient(&mut self) -> i64 {
        let c = self.shape.max_coefficient.max(1);
        loop {
            let k = self.rng.gen_range(-c..=c);
            if k != 0 {
                return k;
            }
        }
    }

    fn monomial(&mut self, vars: &[&str]) -> Term {
        let degree = self.rng.gen_range(0..=self.shape.max_degree);
        let mut factors = Vec::new();
        for _ in 0..degree {
            factors.push(*vars.choose(&mut self.rng).expect("variables"));
        }
        factors.sort();
        let mut items = Vec::new();
        let c = self.coefficient();
        if c.abs() != 1 || factors.is_empty() {
            items.push(Term::int(c.abs()));
        }
        let mut i = 0;
        while i < factors.len() {
            let run = factors[i..].iter().take_while(|&&f| f == factors[i]).count();
            items.push(if run == 1 { Term::var(factors[i]) } else { Term::pow(Term::var(factors[i]), run as u32) });
            i += run;
        }
        let t = Term::product(items);
        if c < 0 {
            Term::neg(t)
        } else {
            t
        }
    }

    fn polynomial(&mut self, vars: &[&str]) -> Term {
        let n = self.rng.gen_range(1..=3);
        let terms = (0..n).map(|_| self.monomial(vars)).collect();
        Term::sum(terms)
    }

    fn literal(&mut self, vars: &[&str], negate: bool) -> Formula {
        let lhs = self.polynomial(vars);
        let rhs = if self.rng.gen_bool(0.3) { self.polynomial(vars) } else { Term::zero() };
        if negate {
            Formula::neq(lhs, rhs)
        } else {
            Formula::eq(lhs, rhs)
        }
    }

    /// An existential formula whose only free variable is `x`.
    pub fn next_formula(&mut self) -> Formula {
        let n_vars = self.rng.gen_range(1..=self.shape.max_vars.clamp(1, NAMES.len()));
        let vars = &NAMES[..n_vars];
        let n_lits = self.rng.gen_range(1..=self.shape.max_literals.max(1));
        let mut negations = self.rng.gen_range(0..=self.shape.max_negations.min(n_lits));
        let mut lits = Vec::new();
        for i in 0..n_lits {
            let negate = negations > 0 && self.rng.gen_bool(((negations as f64) / ((n_lits - i) as f64)).min(1.0));
            if negate {
                negations -= 1;
            }
            lits.push(self.literal(vars, negate));
        }
        // random and/or tree over the literals
        while lits.len() > 1 {
            let i = self.rng.gen_range(0..lits.len() - 1);
            let (a, b) = (lits.remove(i), lits.remove(i));
            lits.insert(i, if self.rng.gen_bool(0.6) { Formula::And(vec![a, b]) } else { Formula::Or(vec![a, b]) });
        }
        let mut body = lits.pop().expect("one literal");
        // x always free: pin it when unused
        if !body.free_vars().iter().any(|v| v == "x") {
            body = Formula::And(vec![body, Formula::eq(Term::var("x"), Term::var("x"))]);
        }
        Formula::exists_all(&vars[1..], body)
    }
}
