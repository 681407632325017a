//! Backtracking search over conjunctions of three-address atoms.
//!
//! The same engine answers two questions: which assignments satisfy a
//! normalized constraint system, and which maps on a finite subset of a field
//! respect its ones, sums and products.

use std::fmt;
use std::ops::ControlFlow;

use serde::Serialize;
use thiserror::Error;

use crate::field::FiniteField;

/// `Plus(i, j, k)` is `v_i + v_j = v_k`, `Times` likewise, `One(i)` is `v_i = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Atom {
    Plus(usize, usize, usize),
    Times(usize, usize, usize),
    One(usize),
}

impl Atom {
    pub fn vars(&self) -> Vec<usize> {
        match *self {
            Atom::Plus(i, j, k) | Atom::Times(i, j, k) => vec![i, j, k],
            Atom::One(i) => vec![i],
        }
    }

    pub fn map(&self, f: impl Fn(usize) -> usize) -> Atom {
        match *self {
            Atom::Plus(i, j, k) => Atom::Plus(f(i), f(j), f(k)),
            Atom::Times(i, j, k) => Atom::Times(f(i), f(j), f(k)),
            Atom::One(i) => Atom::One(f(i)),
        }
    }

    pub fn holds(&self, field: &FiniteField, v: &[u32]) -> bool {
        match *self {
            Atom::Plus(i, j, k) => field.add(v[i], v[j]) == v[k],
            Atom::Times(i, j, k) => field.mul(v[i], v[j]) == v[k],
            Atom::One(i) => v[i] == field.one(),
        }
    }

    /// Renders with the given variable names, e.g. `a + b = c`.
    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Atom, &'a [String]);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let n = self.1;
                match *self.0 {
                    Atom::Plus(i, j, k) => write!(f, "{} + {} = {}", n[i], n[j], n[k]),
                    Atom::Times(i, j, k) => write!(f, "{} * {} = {}", n[i], n[j], n[k]),
                    Atom::One(i) => write!(f, "{} = 1", n[i]),
                }
            }
        }
        D(self, names)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("more than {0} solutions; raise the cap to continue")]
    CapExceeded(usize),
}

/// A constraint problem over `n` variables ranging over a finite field.
pub struct Csp<'a> {
    field: &'a FiniteField,
    n: usize,
    atoms: Vec<Atom>,
    watch: Vec<Vec<usize>>,
}

struct State {
    value: Vec<Option<u32>>,
    trail: Vec<usize>,
}

impl State {
    fn set(&mut self, var: usize, val: u32, queue: &mut Vec<usize>, watch: &[Vec<usize>]) -> bool {
        match self.value[var] {
            Some(old) => old == val,
            None => {
                self.value[var] = Some(val);
                self.trail.push(var);
                queue.extend(watch[var].iter().copied());
                true
            }
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().expect("trail non-empty");
            self.value[v] = None;
        }
    }
}

impl<'a> Csp<'a> {
    pub fn new(field: &'a FiniteField, n: usize, atoms: Vec<Atom>) -> Self {
        let mut watch = vec![Vec::new(); n];
        for (idx, a) in atoms.iter().enumerate() {
            let mut vs = a.vars();
            vs.dedup();
            for v in vs {
                if !watch[v].contains(&idx) {
                    watch[v].push(idx);
                }
            }
        }
        Csp { field, n, atoms, watch }
    }

    pub fn field(&self) -> &FiniteField {
        self.field
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    // Forces values implied by one atom; false on conflict.
    fn propagate_atom(&self, a: Atom, st: &mut State, queue: &mut Vec<usize>) -> bool {
        let f = self.field;
        match a {
            Atom::One(i) => st.set(i, f.one(), queue, &self.watch),
            Atom::Plus(i, j, k) => match (st.value[i], st.value[j], st.value[k]) {
                (Some(x), Some(y), _) => st.set(k, f.add(x, y), queue, &self.watch),
                (Some(x), None, Some(z)) => st.set(j, f.sub(z, x), queue, &self.watch),
                (None, Some(y), Some(z)) => st.set(i, f.sub(z, y), queue, &self.watch),
                _ => true,
            },
            Atom::Times(i, j, k) => {
                let (x, y, z) = (st.value[i], st.value[j], st.value[k]);
                match (x, y, z) {
                    (Some(x), Some(y), _) => st.set(k, f.mul(x, y), queue, &self.watch),
                    (Some(0), None, _) | (None, Some(0), _) => st.set(k, 0, queue, &self.watch),
                    (Some(x), None, Some(z)) => st.set(j, f.mul(z, f.inv(x).expect("non-zero")), queue, &self.watch),
                    (None, Some(y), Some(z)) => st.set(i, f.mul(z, f.inv(y).expect("non-zero")), queue, &self.watch),
                    _ => true,
                }
            }
        }
    }

    fn propagate(&self, st: &mut State, mut queue: Vec<usize>) -> bool {
        while let Some(idx) = queue.pop() {
            if !self.propagate_atom(self.atoms[idx], st, &mut queue) {
                return false;
            }
        }
        true
    }

    /// Visits every solution extending `fixed`, in lexicographic order of the
    /// variable vector. Stops early when `visit` breaks.
    pub fn for_each_solution<B>(
        &self,
        fixed: &[(usize, u32)],
        mut visit: impl FnMut(&[u32]) -> ControlFlow<B>,
    ) -> Option<B> {
        let mut st = State { value: vec![None; self.n], trail: Vec::new() };
        let mut queue: Vec<usize> = (0..self.atoms.len()).collect();
        for &(v, val) in fixed {
            if !st.set(v, val, &mut queue, &self.watch) {
                return None;
            }
        }
        if !self.propagate(&mut st, queue) {
            return None;
        }
        let mut out = vec![0u32; self.n];
        match self.search(0, &mut st, &mut out, &mut visit) {
            ControlFlow::Break(b) => Some(b),
            ControlFlow::Continue(()) => None,
        }
    }

    fn search<B>(
        &self,
        from: usize,
        st: &mut State,
        out: &mut [u32],
        visit: &mut impl FnMut(&[u32]) -> ControlFlow<B>,
    ) -> ControlFlow<B> {
        let Some(var) = (from..self.n).find(|&v| st.value[v].is_none()) else {
            for (o, v) in out.iter_mut().zip(&st.value) {
                *o = v.expect("all assigned");
            }
            debug_assert!(self.atoms.iter().all(|a| a.holds(self.field, out)));
            return visit(out);
        };
        for val in self.field.elements() {
            let mark = st.trail.len();
            let mut queue = Vec::new();
            st.set(var, val, &mut queue, &self.watch);
            if self.propagate(st, queue) {
                self.search(var + 1, st, out, visit)?;
            }
            st.undo_to(mark);
        }
        ControlFlow::Continue(())
    }

    /// All solutions, failing once more than `cap` are found.
    pub fn solutions(&self, fixed: &[(usize, u32)], cap: usize) -> Result<Vec<Vec<u32>>, SearchError> {
        let mut all = Vec::new();
        let overflow = self.for_each_solution(fixed, |s| {
            if all.len() == cap {
                return ControlFlow::Break(());
            }
            all.push(s.to_vec());
            ControlFlow::Continue(())
        });
        match overflow {
            Some(()) => Err(SearchError::CapExceeded(cap)),
            None => Ok(all),
        }
    }

    pub fn first_solution(&self, fixed: &[(usize, u32)]) -> Option<Vec<u32>> {
        self.for_each_solution(fixed, |s| ControlFlow::Break(s.to_vec()))
    }

    pub fn is_satisfiable(&self, fixed: &[(usize, u32)]) -> bool {
        self.first_solution(fixed).is_some()
    }
}
