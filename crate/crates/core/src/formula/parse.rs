use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::{Formula, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub message: String,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    LParen,
    RParen,
    Comma,
    Dot,
    Eq,
    Neq,
    Tilde,
    Amp,
    Bar,
    Arrow,
    DArrow,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Int(n) => return write!(f, "`{n}`"),
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Comma => "`,`",
            Tok::Dot => "`.`",
            Tok::Eq => "`=`",
            Tok::Neq => "`!=`",
            Tok::Tilde => "`~`",
            Tok::Amp => "`&`",
            Tok::Bar => "`|`",
            Tok::Arrow => "`->`",
            Tok::DArrow => "`<->`",
            Tok::Plus => "`+`",
            Tok::Minus => "`-`",
            Tok::Star => "`*`",
            Tok::Slash => "`/`",
            Tok::Caret => "`^`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let err = |m: String| ParseError { message: m, line: l0, column: c0 };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            Tok::Int(s.parse().map_err(|_| err(format!("bad integer `{s}`")))?)
        } else {
            let next = chars.get(i + 1).copied();
            let (tok, len) = match (c, next) {
                ('-', Some('>')) => (Tok::Arrow, 2),
                ('<', Some('-')) if chars.get(i + 2) == Some(&'>') => (Tok::DArrow, 3),
                ('!', Some('=')) => (Tok::Neq, 2),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                (',', _) => (Tok::Comma, 1),
                ('.', _) => (Tok::Dot, 1),
                ('=', _) => (Tok::Eq, 1),
                ('~', _) => (Tok::Tilde, 1),
                ('&', _) => (Tok::Amp, 1),
                ('|', _) => (Tok::Bar, 1),
                ('+', _) => (Tok::Plus, 1),
                ('-', _) => (Tok::Minus, 1),
                ('*', _) => (Tok::Star, 1),
                ('/', _) => (Tok::Slash, 1),
                ('^', _) => (Tok::Caret, 1),
                _ => return Err(err(format!("unknown operator `{c}`"))),
            };
            i += len;
            tok
        };
        col += i - start;
        out.push(Spanned { tok, line: l0, column: c0 });
    }
    out.push(Spanned { tok: Tok::Eof, line, column: col });
    Ok(out)
}

fn is_keyword(s: &str) -> bool {
    s == "exists" || s == "forall"
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: String) -> PResult<T> {
        let s = &self.toks[self.pos];
        Err(ParseError { message, line: s.line, column: s.column })
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {tok}, found {}", self.peek()))
        }
    }

    fn formula(&mut self) -> PResult<Formula> {
        if let Tok::Ident(kw) = self.peek() {
            if is_keyword(kw) {
                return self.quantifier();
            }
        }
        self.disj()
    }

    fn quantifier(&mut self) -> PResult<Formula> {
        let kw = match self.bump() {
            Tok::Ident(k) => k,
            _ => unreachable!(),
        };
        let var = match self.peek().clone() {
            Tok::Ident(v) if !is_keyword(&v) => {
                self.bump();
                v
            }
            other => return self.error(format!("expected a variable after `{kw}`, found {other}")),
        };
        self.expect(Tok::Dot)?;
        let body = self.formula()?;
        Ok(if kw == "exists" { Formula::exists(&var, body) } else { Formula::forall(&var, body) })
    }

    fn disj(&mut self) -> PResult<Formula> {
        let mut items = vec![self.conj()?];
        while *self.peek() == Tok::Bar {
            self.bump();
            items.push(self.conj()?);
        }
        Ok(Formula::or(items))
    }

    fn conj(&mut self) -> PResult<Formula> {
        let mut items = vec![self.imp()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            items.push(self.imp()?);
        }
        Ok(Formula::and(items))
    }

    fn imp(&mut self) -> PResult<Formula> {
        let lhs = self.lit()?;
        match self.peek() {
            Tok::Arrow => {
                self.bump();
                Ok(Formula::implies(lhs, self.lit()?))
            }
            Tok::DArrow => {
                self.bump();
                Ok(Formula::iff(lhs, self.lit()?))
            }
            _ => Ok(lhs),
        }
    }

    fn lit(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.lit()?))
            }
            Tok::Ident(kw) if is_keyword(&kw) => self.quantifier(),
            Tok::LParen => {
                let save = self.pos;
                self.bump();
                let attempt = self.formula().and_then(|f| {
                    self.expect(Tok::RParen)?;
                    Ok(f)
                });
                match attempt {
                    Ok(f) if !continues_term(self.peek()) => Ok(f),
                    Ok(_) => {
                        self.pos = save;
                        self.atom()
                    }
                    Err(first) => {
                        self.pos = save;
                        // report whichever reading got further
                        self.atom().map_err(|second| {
                            if (second.line, second.column) >= (first.line, first.column) {
                                second
                            } else {
                                first
                            }
                        })
                    }
                }
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> PResult<Formula> {
        if let (Tok::Ident(name), Tok::LParen) = (self.peek().clone(), self.peek_at(1)) {
            self.bump();
            self.bump();
            let mut args = vec![self.term()?];
            while *self.peek() == Tok::Comma {
                self.bump();
                args.push(self.term()?);
            }
            self.expect(Tok::RParen)?;
            return Ok(Formula::Pred(name, args));
        }
        let lhs = self.term()?;
        match self.bump() {
            Tok::Eq => Ok(Formula::Equal(lhs, self.term()?)),
            Tok::Neq => Ok(Formula::neq(lhs, self.term()?)),
            other => {
                self.pos -= 1;
                self.error(format!("expected `=` or `!=`, found {other}"))
            }
        }
    }

    fn term(&mut self) -> PResult<Term> {
        let mut items = vec![self.mterm()?];
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    items.push(self.mterm()?);
                }
                Tok::Minus => {
                    self.bump();
                    items.push(Term::neg(self.mterm()?));
                }
                _ => break,
            }
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Term::Add(items) })
    }

    fn mterm(&mut self) -> PResult<Term> {
        let mut acc = self.unary()?;
        let mut open_product = false;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = match acc {
                        Term::Mul(mut xs) if open_product => {
                            xs.push(rhs);
                            Term::Mul(xs)
                        }
                        other => Term::Mul(vec![other, rhs]),
                    };
                    open_product = true;
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.unary()?;
                    acc = Term::Div(Box::new(acc), Box::new(rhs));
                    open_product = false;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> PResult<Term> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Term::neg(self.unary()?));
        }
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            return match self.bump() {
                Tok::Int(n) => match n.to_u32() {
                    Some(e) => Ok(Term::pow(base, e)),
                    None => {
                        self.pos -= 1;
                        self.error(format!("exponent {n} too large"))
                    }
                },
                other => {
                    self.pos -= 1;
                    self.error(format!("expected an exponent, found {other}"))
                }
            };
        }
        Ok(base)
    }

    fn primary(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Term::Const(n))
            }
            Tok::Ident(v) if !is_keyword(&v) => {
                self.bump();
                Ok(Term::Var(v))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            other => self.error(format!("expected a term, found {other}")),
        }
    }
}

fn continues_term(t: &Tok) -> bool {
    matches!(t, Tok::Eq | Tok::Neq | Tok::Plus | Tok::Minus | Tok::Star | Tok::Slash | Tok::Caret)
}

/// Parses a formula.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {}", p.peek()));
    }
    Ok(f)
}

/// Parses a ring term.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected {}", p.peek()));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Term {
        Term::var(s)
    }

    #[test]
    fn parse_examples() {
        assert_eq!(
            parse("exists y. x = y*y").unwrap(),
            Formula::exists("y", Formula::eq(v("x"), Term::Mul(vec![v("y"), v("y")])))
        );
        assert_eq!(
            parse("~(x = 0) & x + y = 1").unwrap(),
            Formula::And(vec![
                Formula::not(Formula::eq(v("x"), Term::int(0))),
                Formula::eq(Term::Add(vec![v("x"), v("y")]), Term::int(1)),
            ])
        );
        assert_eq!(
            parse("exists y. 1 + x^4 = y^2").unwrap(),
            Formula::exists(
                "y",
                Formula::eq(Term::Add(vec![Term::int(1), Term::pow(v("x"), 4)]), Term::pow(v("y"), 2))
            )
        );
        assert_eq!(parse("x != 1").unwrap(), Formula::neq(v("x"), Term::int(1)));
    }

    #[test]
    fn parenthesised_terms_backtrack() {
        let f = parse("(x + 1)*y = 0").unwrap();
        assert_eq!(
            f,
            Formula::eq(Term::Mul(vec![Term::Add(vec![v("x"), Term::int(1)]), v("y")]), Term::int(0))
        );
        let g = parse("((x) = 1)").unwrap();
        assert_eq!(g, Formula::eq(v("x"), Term::int(1)));
    }

    #[test]
    fn predicates_and_connectives() {
        let f = parse("U(x) -> N(x, y + 1) | x = 0").unwrap();
        assert_eq!(
            f,
            Formula::Or(vec![
                Formula::implies(
                    Formula::pred("U", vec![v("x")]),
                    Formula::pred("N", vec![v("x"), Term::Add(vec![v("y"), Term::int(1)])])
                ),
                Formula::eq(v("x"), Term::int(0)),
            ])
        );
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("x = 1 &\n  y $ 2").unwrap_err();
        assert_eq!((e.line, e.column), (2, 5));
        assert!(e.message.contains("unknown operator"));
        let e = parse("exists . x = 1").unwrap_err();
        assert_eq!((e.line, e.column), (1, 8));
        let e = parse("x + = 1").unwrap_err();
        assert!(e.message.contains("expected a term"), "{e}");
        assert!(parse("x = 1 )").is_err());
        assert!(parse("x").is_err());
    }
}
