//! Canonical printer. Output parses back to a structurally equal AST.

use std::fmt;

use super::{Formula, Term};

// Term precedence levels: 0 sum, 1 product, 2 unary, 3 power base.
fn term_at(t: &Term, level: u8) -> String {
    let paren = |s: String| format!("({s})");
    match t {
        Term::Var(v) => v.clone(),
        Term::Const(c) => c.to_string(),
        Term::Add(items) => {
            let mut s = String::new();
            for (i, item) in items.iter().enumerate() {
                match (i, item) {
                    (0, _) => s.push_str(&term_at(item, 1)),
                    (_, Term::Neg(inner)) => {
                        s.push_str(" - ");
                        s.push_str(&term_at(inner, 1));
                    }
                    _ => {
                        s.push_str(" + ");
                        s.push_str(&term_at(item, 1));
                    }
                }
            }
            if level == 0 {
                s
            } else {
                paren(s)
            }
        }
        Term::Mul(items) => {
            let parts: Vec<String> = items
                .iter()
                .enumerate()
                .map(|(i, item)| match (i, item) {
                    (_, Term::Mul(_)) => paren(term_at(item, 0)),
                    (0, Term::Div(..)) => term_at(item, 1),
                    (0, _) => term_at(item, 2),
                    (_, Term::Div(..) | Term::Neg(_)) => paren(term_at(item, 0)),
                    _ => term_at(item, 2),
                })
                .collect();
            let s = parts.join("*");
            if level <= 1 {
                s
            } else {
                paren(s)
            }
        }
        Term::Div(a, b) => {
            let lhs = match **a {
                Term::Mul(_) | Term::Div(..) => term_at(a, 1),
                _ => term_at(a, 2),
            };
            let rhs = match **b {
                Term::Var(_) | Term::Const(_) | Term::Pow(..) => term_at(b, 2),
                _ => paren(term_at(b, 0)),
            };
            let s = format!("{lhs}/{rhs}");
            if level <= 1 {
                s
            } else {
                paren(s)
            }
        }
        Term::Neg(inner) => {
            let body = match **inner {
                Term::Var(_) | Term::Const(_) | Term::Pow(..) => term_at(inner, 2),
                _ => paren(term_at(inner, 0)),
            };
            let s = format!("-{body}");
            if level <= 2 {
                s
            } else {
                paren(s)
            }
        }
        Term::Pow(base, e) => {
            let s = format!("{}^{e}", term_at(base, 3));
            if level <= 2 {
                s
            } else {
                paren(s)
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&term_at(self, 0))
    }
}

fn top(f: &Formula) -> String {
    match f {
        Formula::Exists(v, body) => format!("exists {v}. {}", quantifier_body(body)),
        Formula::ForAll(v, body) => format!("forall {v}. {}", quantifier_body(body)),
        _ => disj(f),
    }
}

fn quantifier_body(b: &Formula) -> String {
    match b {
        Formula::Equal(..) | Formula::Pred(..) | Formula::Not(_) | Formula::Exists(..) | Formula::ForAll(..) => top(b),
        _ => format!("({})", top(b)),
    }
}

fn disj(f: &Formula) -> String {
    match f {
        Formula::Or(items) => items
            .iter()
            .map(|g| match g {
                Formula::Or(_) | Formula::Exists(..) | Formula::ForAll(..) => format!("({})", top(g)),
                _ => conj(g),
            })
            .collect::<Vec<_>>()
            .join(" | "),
        _ => conj(f),
    }
}

fn conj(f: &Formula) -> String {
    match f {
        Formula::And(items) => items
            .iter()
            .map(|g| match g {
                Formula::And(_) | Formula::Or(_) | Formula::Exists(..) | Formula::ForAll(..) => {
                    format!("({})", top(g))
                }
                _ => imp(g),
            })
            .collect::<Vec<_>>()
            .join(" & "),
        _ => imp(f),
    }
}

fn imp(f: &Formula) -> String {
    match f {
        Formula::Implies(a, b) => format!("{} -> {}", lit(a), lit(b)),
        Formula::Iff(a, b) => format!("{} <-> {}", lit(a), lit(b)),
        _ => lit(f),
    }
}

fn lit(f: &Formula) -> String {
    match f {
        Formula::Equal(a, b) => format!("{a} = {b}"),
        Formula::Pred(name, args) => {
            let args: Vec<String> = args.iter().map(Term::to_string).collect();
            format!("{name}({})", args.join(", "))
        }
        Formula::Not(inner) => match &**inner {
            Formula::Equal(a, b) => format!("{a} != {b}"),
            g => format!("~{}", lit(g)),
        },
        _ => format!("({})", top(f)),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&top(self))
    }
}
