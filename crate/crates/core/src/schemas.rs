//! Emitters for named formula templates.
//!
//! Abbreviations (`M`, the two orders, `succ`, `accum`) are expanded in place.
//! Every variable an expansion binds is drawn from one name supply per
//! emission, so no expansion can capture a variable of its arguments.
//! Opaque subformulas default to predicate atoms `F(s, t)`, `G(s, t)`, `N(x)`
//! and can be replaced by concrete formulas over those parameter names.

use std::collections::HashMap;

use thiserror::Error;

use crate::formula::{Formula, NameSupply, Term};

pub const SCHEMA_NAMES: [&str; 10] = [
    "robinson",
    "theorem2",
    "pyth_M",
    "lt6",
    "le7",
    "succ",
    "accum",
    "theorem6_def",
    "theorem7_sentence",
    "theorem7_def",
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemaError {
    #[error("unknown schema `{0}`; expected one of {names}", names = SCHEMA_NAMES.join(", "))]
    UnknownSchema(String),
    #[error("schema `{schema}` needs parameter `{param}`")]
    MissingParameter { schema: String, param: &'static str },
    #[error("parameter `{param}` may only mention {expected:?}, found {found:?}")]
    Arity { param: &'static str, expected: Vec<String>, found: Vec<String> },
    #[error("the offset i must be non-zero")]
    ZeroOffset,
    #[error("`{0}` must be quantifier-free")]
    NotQuantifierFree(&'static str),
}

pub type Result<T> = std::result::Result<T, SchemaError>;

/// Inputs for the templates. Unused fields are ignored.
#[derive(Clone, Debug, Default)]
pub struct SchemaParams {
    /// Polynomial in `y` whose root is selected.
    pub root_poly: Option<Term>,
    /// Polynomial in `y` giving `x`.
    pub value_poly: Option<Term>,
    /// Quantifier-free matrix `phi(x, ...)`.
    pub matrix: Option<Formula>,
    /// Stand-in for `F~(s, t)`.
    pub f_graph: Option<Formula>,
    /// Stand-in for `G~(s, t)`.
    pub g_graph: Option<Formula>,
    /// Stand-in for `N(x)`.
    pub naturals: Option<Formula>,
    /// Name of the unary predicate symbol; `U` when absent.
    pub predicate: Option<String>,
    pub offset: Option<i64>,
}

struct Emitter<'p> {
    schema: &'p str,
    params: &'p SchemaParams,
    names: NameSupply,
}

fn v(name: &str) -> Term {
    Term::var(name)
}

fn sq(t: Term) -> Term {
    Term::pow(t, 2)
}

impl<'p> Emitter<'p> {
    fn new(schema: &'p str, params: &'p SchemaParams, reserved: &[&str]) -> Self {
        let mut names = NameSupply::new(reserved.iter().map(|s| s.to_string()));
        let opaque = [&params.matrix, &params.f_graph, &params.g_graph, &params.naturals];
        for f in opaque.into_iter().flatten() {
            f.all_vars().iter().for_each(|n| names.reserve(n));
        }
        Emitter { schema, params, names }
    }

    fn missing(&self, param: &'static str) -> SchemaError {
        SchemaError::MissingParameter { schema: self.schema.to_string(), param }
    }

    fn pred_name(&self) -> &str {
        self.params.predicate.as_deref().unwrap_or("U")
    }

    fn u(&self, t: Term) -> Formula {
        Formula::pred(self.pred_name(), vec![t])
    }

    fn offset(&self) -> Result<usize> {
        match self.params.offset {
            None => Err(self.missing("i")),
            Some(0) => Err(SchemaError::ZeroOffset),
            Some(i) => Ok(i.unsigned_abs() as usize),
        }
    }

    /// A user formula over `formals`, applied to `actuals`; a predicate atom when absent.
    fn opaque(
        &mut self,
        param: &'static str,
        given: &Option<Formula>,
        symbol: &str,
        formals: &[&str],
        actuals: Vec<Term>,
    ) -> Result<Formula> {
        let Some(f) = given else {
            return Ok(Formula::pred(symbol, actuals));
        };
        let free = f.free_vars();
        if free.iter().any(|n| !formals.contains(&n.as_str())) {
            return Err(SchemaError::Arity {
                param,
                expected: formals.iter().map(|s| s.to_string()).collect(),
                found: free,
            });
        }
        let map: HashMap<String, Term> = formals.iter().map(|s| s.to_string()).zip(actuals).collect();
        Ok(f.substitute(&map, &mut self.names))
    }

    // exists y. 1 + a^4 = y^2
    fn squares_form(&mut self, a: Term) -> Formula {
        let y = self.names.fresh("y");
        Formula::exists(&y, Formula::eq(Term::add(Term::one(), Term::pow(a, 4)), sq(v(&y))))
    }

    // a != b & M(a) & M(b) & exists c. (M(c) & a + c^2 = b)
    fn lt6(&mut self, a: Term, b: Term) -> Formula {
        let ma = self.squares_form(a.clone());
        let mb = self.squares_form(b.clone());
        let c = self.names.fresh("c");
        let mc = self.squares_form(v(&c));
        let step = Formula::exists(&c, Formula::and(vec![mc, Formula::eq(Term::add(a.clone(), sq(v(&c))), b.clone())]));
        Formula::and(vec![Formula::neq(a, b), ma, mb, step])
    }

    // exists s. a + s^2 = b
    fn le7(&mut self, a: Term, b: Term) -> Formula {
        let s = self.names.fresh("s");
        Formula::exists(&s, Formula::eq(Term::add(a, sq(v(&s))), b))
    }

    fn lt7(&mut self, a: Term, b: Term) -> Formula {
        let le = self.le7(a.clone(), b.clone());
        Formula::and(vec![le, Formula::neq(a, b)])
    }

    fn succ(&mut self, a: Term, b: Term) -> Formula {
        let lt = self.lt7(a.clone(), b.clone());
        let (ua, ub) = (self.u(a.clone()), self.u(b.clone()));
        let z = self.names.fresh("z");
        let between = Formula::and(vec![self.lt7(a, v(&z)), self.lt7(v(&z), b)]);
        let gap = Formula::forall(&z, Formula::implies(between, Formula::not(self.u(v(&z)))));
        Formula::and(vec![lt, ua, ub, gap])
    }

    fn accum(&mut self, a: Term) -> Formula {
        let eps = self.names.fresh("eps");
        let z = self.names.fresh("z");
        let positive = self.lt7(Term::zero(), v(&eps));
        let near = Formula::and(vec![
            Formula::neq(v(&z), a.clone()),
            self.lt7(a.clone(), Term::add(v(&z), v(&eps))),
            self.lt7(v(&z), Term::add(a, v(&eps))),
            self.u(v(&z)),
        ]);
        Formula::forall(&eps, Formula::implies(positive, Formula::exists(&z, near)))
    }

    fn f_graph(&mut self, s: Term, t: Term) -> Result<Formula> {
        let given = self.params.f_graph.clone();
        self.opaque("F", &given, "F", &["s", "t"], vec![s, t])
    }

    fn g_graph(&mut self, s: Term, t: Term) -> Result<Formula> {
        let given = self.params.g_graph.clone();
        self.opaque("G", &given, "G", &["s", "t"], vec![s, t])
    }

    fn naturals(&mut self, a: Term) -> Result<Formula> {
        let given = self.params.naturals.clone();
        self.opaque("N", &given, "N", &["x"], vec![a])
    }

    fn robinson_parts(&mut self, y: &str) -> Result<(Formula, Formula)> {
        let root = self.params.root_poly.clone().ok_or_else(|| self.missing("U"))?;
        let value = self.params.value_poly.clone().ok_or_else(|| self.missing("V"))?;
        for (param, t) in [("U", &root), ("V", &value)] {
            let found: Vec<String> = t.vars().into_iter().collect();
            if found.iter().any(|n| n != "y") {
                return Err(SchemaError::Arity { param, expected: vec!["y".into()], found });
            }
        }
        let rename = HashMap::from([("y".to_string(), v(y))]);
        Ok((
            Formula::eq(root.substitute(&rename), Term::zero()),
            Formula::eq(v("x"), value.substitute(&rename)),
        ))
    }
}

/// Builds the named template. Output is deterministic for equal parameters.
pub fn emit(schema: &str, params: &SchemaParams) -> Result<Formula> {
    match schema {
        "robinson" => {
            let mut e = Emitter::new(schema, params, &["x"]);
            let y = e.names.fresh("y");
            let (root, value) = e.robinson_parts(&y)?;
            Ok(Formula::exists(&y, Formula::and(vec![root, value])))
        }
        "theorem2" => {
            let mut e = Emitter::new(schema, params, &["x"]);
            let phi = params.matrix.clone().ok_or_else(|| e.missing("phi"))?;
            if !phi.is_quantifier_free() {
                return Err(SchemaError::NotQuantifierFree("phi"));
            }
            let y = e.names.fresh("y");
            let (root, value) = e.robinson_parts(&y)?;
            let mut bound: Vec<String> = phi.free_vars().into_iter().filter(|n| n != "x").collect();
            bound.push(y);
            Ok(Formula::exists_all(&bound, Formula::and(vec![phi, root, value])))
        }
        "pyth_M" => Ok(Emitter::new(schema, params, &["x"]).squares_form(v("x"))),
        "lt6" => Ok(Emitter::new(schema, params, &["a", "b"]).lt6(v("a"), v("b"))),
        "le7" => Ok(Emitter::new(schema, params, &["x", "y"]).le7(v("x"), v("y"))),
        "succ" => Ok(Emitter::new(schema, params, &["x", "y"]).succ(v("x"), v("y"))),
        "accum" => Ok(Emitter::new(schema, params, &["x"]).accum(v("x"))),
        "theorem6_def" => {
            let mut e = Emitter::new(schema, params, &["x", "eps", "z", "s", "u", "v"]);
            let mx = e.squares_form(v("x"));
            let positive = e.lt6(Term::zero(), v("eps"));
            let mut body = vec![
                Formula::neq(v("z"), v("x")),
                e.lt6(v("x"), Term::add(v("z"), v("eps"))),
                e.lt6(v("z"), Term::add(v("x"), v("eps"))),
                e.naturals(v("s"))?,
                e.naturals(v("u"))?,
                e.naturals(v("v"))?,
                e.f_graph(v("s"), v("u"))?,
                e.g_graph(v("s"), v("v"))?,
            ];
            body.push(Formula::eq(Term::mul(v("z"), v("v")), v("u")));
            let inner = Formula::exists_all(&["z", "s", "u", "v"], Formula::and(body));
            Ok(Formula::and(vec![mx, Formula::forall("eps", Formula::implies(positive, inner))]))
        }
        "theorem7_sentence" => {
            // Flat conjunction: U(0), then the four universal clauses in display order.
            let mut e = Emitter::new(schema, params, &["x", "s", "u", "v"]);
            let n = e.offset()?;
            let x = || v("x");
            let shifted = |k: usize| Term::plus_unary(x(), k);

            let start = e.u(Term::zero());

            let nonneg_member = Formula::and(vec![e.le7(Term::zero(), x()), e.u(x())]);
            let next = e.succ(x(), Term::add(x(), Term::one()));
            let closed = Formula::forall("x", Formula::implies(nonneg_member, next));

            let window = Formula::and(vec![e.le7(Term::zero(), shifted(n)), e.lt7(x(), Term::zero())]);
            let mut witness = Vec::new();
            for w in ["s", "u", "v"] {
                witness.push(e.le7(Term::zero(), v(w)));
                witness.push(e.u(v(w)));
            }
            witness.push(e.f_graph(v("s"), v("u"))?);
            witness.push(e.g_graph(v("s"), v("v"))?);
            witness.push(Formula::eq(Term::add(v("u"), Term::mul(x(), v("v"))), Term::zero()));
            let approximants = Formula::forall(
                "x",
                Formula::iff(window, Formula::exists_all(&["s", "u", "v"], Formula::and(witness))),
            );

            let band = Formula::and(vec![e.lt7(Term::zero(), shifted(2 * n)), e.lt7(shifted(n), Term::zero())]);
            let limit = Formula::iff(e.u(x()), e.accum(shifted(n)));
            let limit_point = Formula::forall("x", Formula::implies(band, limit));

            let below = e.le7(shifted(2 * n), Term::zero());
            let empty_below = Formula::forall("x", Formula::implies(below, Formula::not(e.u(x()))));

            Ok(Formula::And(vec![start, closed, approximants, limit_point, empty_below]))
        }
        "theorem7_def" => {
            let e = Emitter::new(schema, params, &["x", "t", "y"]);
            let n = e.offset()?;
            let body = Formula::and(vec![
                Formula::eq(Term::add(v("x"), sq(v("t"))), Term::zero()),
                Formula::eq(v("x"), Term::plus_unary(v("y"), n)),
                e.u(v("y")),
            ]);
            Ok(Formula::exists_all(&["t", "y"], body))
        }
        other => Err(SchemaError::UnknownSchema(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldDescriptor;
    use crate::formula::{definable_set, parse, parse_term};

    fn with_i(i: i64) -> SchemaParams {
        SchemaParams { offset: Some(i), ..Default::default() }
    }

    #[test]
    fn robinson_shape() {
        let p = SchemaParams {
            root_poly: Some(parse_term("y^2 - 2").unwrap()),
            value_poly: Some(parse_term("y").unwrap()),
            ..Default::default()
        };
        assert_eq!(emit("robinson", &p).unwrap().to_string(), "exists y. (y^2 - 2 = 0 & x = y)");
        assert!(matches!(emit("robinson", &SchemaParams::default()), Err(SchemaError::MissingParameter { .. })));
    }

    #[test]
    fn matrix_mentioning_y_gets_a_fresh_root_variable() {
        let p = SchemaParams {
            root_poly: Some(parse_term("y^2 - 2").unwrap()),
            value_poly: Some(parse_term("y").unwrap()),
            matrix: Some(parse("x = y + 1").unwrap()),
            ..Default::default()
        };
        let f = emit("theorem2", &p).unwrap();
        assert_eq!(f.to_string(), "exists y. exists y1. (x = y + 1 & y1^2 - 2 = 0 & x = y1)");
        assert_eq!(f.free_vars(), vec!["x".to_string()]);
    }

    #[test]
    fn squares_form_over_f5() {
        let f = emit("pyth_M", &SchemaParams::default()).unwrap();
        assert_eq!(f.to_string(), "exists y. 1 + x^4 = y^2");
        let f5 = FieldDescriptor::parse("F5").unwrap();
        // oracle: 1 + x^4 is a square mod 5
        let want: Vec<_> = (0..5i64)
            .filter(|x| {
                let r = (1 + x.pow(4)) % 5;
                (0..5i64).any(|y| y * y % 5 == r)
            })
            .map(|x| f5.from_i64(x))
            .collect();
        assert_eq!(definable_set(&f, &f5, "x").unwrap(), want);
        assert_eq!(want, vec![f5.zero()]);
    }

    #[test]
    fn order_abbreviations() {
        assert_eq!(emit("le7", &SchemaParams::default()).unwrap().to_string(), "exists s. x + s^2 = y");
        let lt = emit("lt6", &SchemaParams::default()).unwrap();
        assert_eq!(
            lt.to_string(),
            "a != b & (exists y. 1 + a^4 = y^2) & (exists y1. 1 + b^4 = y1^2) & (exists c. ((exists y2. 1 + c^4 = y2^2) & a + c^2 = b))"
        );
        assert_eq!(lt.free_vars(), vec!["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn expansions_do_not_capture() {
        for name in ["succ", "accum", "theorem6_def", "theorem7_def"] {
            let f = emit(name, &with_i(-1)).unwrap();
            let mut seen = Vec::new();
            f.visit(&mut |g| {
                if let Formula::Exists(b, _) | Formula::ForAll(b, _) = g {
                    seen.push(b.clone());
                }
            });
            let mut dedup = seen.clone();
            dedup.sort();
            dedup.dedup();
            // only `x` is rebound, by design of the sentence
            assert_eq!(dedup.len(), seen.len(), "{name}: {seen:?}");
        }
        let s = emit("succ", &SchemaParams::default()).unwrap();
        assert_eq!(s.free_vars(), vec!["x".to_string(), "y".to_string()]);
    }

    #[test]
    fn sentence_is_closed_with_unary_sums() {
        let f = emit("theorem7_sentence", &with_i(-2)).unwrap();
        assert!(f.free_vars().is_empty());
        let Formula::And(parts) = &f else { panic!("not a conjunction") };
        assert_eq!(parts.len(), 5);
        let text = f.to_string();
        assert!(text.contains("x + 1 + 1 "));
        assert!(text.contains("x + 1 + 1 + 1 + 1 "));
        assert!(!text.contains("x + 1 + 1 + 1 + 1 + 1"));
        assert_eq!(emit("theorem7_sentence", &with_i(0)), Err(SchemaError::ZeroOffset));
    }

    #[test]
    fn definitions_have_one_free_variable() {
        for name in ["theorem6_def", "theorem7_def"] {
            assert_eq!(emit(name, &with_i(-3)).unwrap().free_vars(), vec!["x".to_string()]);
        }
        assert_eq!(
            emit("theorem7_def", &with_i(-2)).unwrap().to_string(),
            "exists t. exists y. (x + t^2 = 0 & x = y + 1 + 1 & U(y))"
        );
    }

    #[test]
    fn opaque_parameters() {
        let p = SchemaParams {
            f_graph: Some(parse("t = s + s").unwrap()),
            naturals: Some(parse("exists z. x = z*z").unwrap()),
            predicate: Some("W".into()),
            offset: Some(-1),
            ..Default::default()
        };
        let f = emit("theorem6_def", &p).unwrap();
        let text = f.to_string();
        assert!(text.contains("u = s + s"), "{text}");
        assert!(text.contains("G(s, v)"), "{text}");
        assert!(!text.contains("N("), "{text}");
        let g = emit("theorem7_def", &p).unwrap();
        assert!(g.to_string().contains("W(y)"));
        let bad = SchemaParams { f_graph: Some(parse("q = 1").unwrap()), ..Default::default() };
        assert!(matches!(emit("theorem6_def", &bad), Err(SchemaError::Arity { .. })));
    }

    #[test]
    fn every_schema_round_trips() {
        let p = SchemaParams {
            root_poly: Some(parse_term("y^2 - 2").unwrap()),
            value_poly: Some(parse_term("y").unwrap()),
            matrix: Some(parse("x*x1 = 1").unwrap()),
            offset: Some(-2),
            ..Default::default()
        };
        for name in SCHEMA_NAMES {
            let f = emit(name, &p).unwrap();
            assert_eq!(parse(&f.to_string()).unwrap(), f, "{name}");
        }
        assert!(matches!(emit("nope", &p), Err(SchemaError::UnknownSchema(_))));
    }
}
