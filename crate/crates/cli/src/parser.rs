//! Recursive-descent parser for expressions, equations and identity files.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | factor            a '-' directly before a monomial is its sign
//! factor := atom ('^' ['-'] INT)?
//! atom   := INT ['/' INT] | mono | call | '(' expr ')'
//! mono   := ['-'] ['c' INT ['/' INT] '*'] 'q' ['^' (['-'] INT | '(' ['-'] INT ['/' INT] ')')]
//! call   := NAME '(' groups ')'           ';' separates integer and monomial groups
//! ```

use std::fmt;

use heckmort_core::{Coefficient, Exponent, SignedMonomial};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::ast::{Call, Equation, Expr, Node, Pos};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub pos: Pos,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at {}: expected {}, found {}", self.pos, self.expected.join(" or "), self.found)
    }
}

impl std::error::Error for ParseError {}

type PResult<T> = Result<T, ParseError>;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Name(String),
    /// the `c` that introduces a monomial coefficient
    CoeffMark,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Semi,
    EqEq,
    Colon,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Name(s) => write!(f, "`{s}`"),
            Tok::CoeffMark => f.write_str("`c`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::EqEq => f.write_str("`==`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn tokenize(src: &str, first_line: usize) -> PResult<Vec<(Tok, Pos)>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut line, mut col) = (first_line, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let mut advance = |n: usize, i: &mut usize| {
            *i += n;
            col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i);
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            let text: String = chars[start..i].iter().collect();
            out.push((Tok::Int(text.parse().expect("digits")), pos));
            continue;
        }
        if c == 'c' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
            advance(1, &mut i);
            out.push((Tok::CoeffMark, pos));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push((Tok::Name(chars[start..i].iter().collect()), pos));
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            ':' => Tok::Colon,
            '=' if chars.get(i + 1) == Some(&'=') => {
                advance(2, &mut i);
                out.push((Tok::EqEq, pos));
                continue;
            }
            other => {
                return Err(ParseError { pos, expected: vec!["a token".into()], found: format!("`{other}`") });
            }
        };
        advance(1, &mut i);
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(ParseError {
            pos: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(&[what])
        }
    }

    fn int(&mut self) -> PResult<BigInt> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.fail(&["integer"]),
        }
    }

    fn small_int(&mut self) -> PResult<i64> {
        let pos = self.pos();
        let neg = *self.peek() == Tok::Minus;
        if neg {
            self.bump();
        }
        let n = self.int()?;
        let n = if neg { -n } else { n };
        n.to_i64().ok_or(ParseError {
            pos,
            expected: vec!["integer that fits in 64 bits".into()],
            found: n.to_string(),
        })
    }

    /// `INT ['/' INT]`, the `/` only taken when an integer follows it.
    fn rational(&mut self) -> PResult<Coefficient> {
        let n = self.int()?;
        if *self.peek() == Tok::Slash && matches!(self.peek2(), Tok::Int(_)) {
            self.bump();
            let pos = self.pos();
            let d = self.int()?;
            if d.is_zero() {
                return Err(ParseError { pos, expected: vec!["nonzero denominator".into()], found: "`0`".into() });
            }
            return Ok(Coefficient::new(n, d));
        }
        Ok(Coefficient::from_integer(n))
    }

    fn mono_exponent(&mut self) -> PResult<Exponent> {
        if *self.peek() == Tok::LParen {
            self.bump();
            let n = self.small_int()?;
            let mut d = 1;
            if *self.peek() == Tok::Slash {
                self.bump();
                let pos = self.pos();
                d = self.small_int()?;
                if d <= 0 {
                    return Err(ParseError {
                        pos,
                        expected: vec!["positive denominator".into()],
                        found: d.to_string(),
                    });
                }
            }
            self.expect(Tok::RParen, "`)`")?;
            Ok(Exponent::new(n, d))
        } else {
            Ok(Exponent::int(self.small_int()?))
        }
    }

    fn starts_mono(&self) -> bool {
        matches!(self.peek(), Tok::CoeffMark) || matches!(self.peek(), Tok::Name(n) if n == "q")
    }

    /// A monomial literal; `negative` when a `-` was already consumed.
    /// `loose` also accepts an unmarked `3/2*q` coefficient, which is only
    /// unambiguous inside an argument list.
    fn mono(&mut self, negative: bool, loose: bool) -> PResult<SignedMonomial> {
        let mut coeff = Coefficient::from_integer(1.into());
        let marked = *self.peek() == Tok::CoeffMark;
        if marked || (loose && matches!(self.peek(), Tok::Int(_))) {
            if marked {
                self.bump();
            }
            coeff = self.rational()?;
            if !marked && *self.peek() != Tok::Star {
                // a bare constant argument such as the `-1` of `AL(x; q; -1)`
                let pos = self.pos();
                let c = if negative { -coeff } else { coeff };
                return SignedMonomial::new(c, Exponent::ZERO).map_err(|e| ParseError {
                    pos,
                    expected: vec!["nonzero coefficient".into()],
                    found: e.to_string(),
                });
            }
            self.expect(Tok::Star, "`*`")?;
        }
        match self.peek() {
            Tok::Name(n) if n == "q" => {
                self.bump();
            }
            _ => return self.fail(&["`q`"]),
        }
        let exp = if *self.peek() == Tok::Caret {
            self.bump();
            self.mono_exponent()?
        } else {
            Exponent::ONE
        };
        if negative {
            coeff = -coeff;
        }
        let pos = self.pos();
        SignedMonomial::new(coeff, exp).map_err(|e| ParseError {
            pos,
            expected: vec!["nonzero coefficient".into()],
            found: e.to_string(),
        })
    }

    fn arg_mono(&mut self) -> PResult<SignedMonomial> {
        let neg = *self.peek() == Tok::Minus;
        if neg {
            self.bump();
        }
        if !(self.starts_mono() || matches!(self.peek(), Tok::Int(_))) {
            return self.fail(&["monomial"]);
        }
        self.mono(neg, true)
    }

    fn expr(&mut self) -> PResult<Node> {
        let mut lhs = self.term()?;
        loop {
            let make: fn(Box<Node>, Box<Node>) -> Expr = match self.peek() {
                Tok::Plus => Expr::Add,
                Tok::Minus => Expr::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            let start = lhs.pos;
            lhs = Node::new(make(Box::new(lhs), Box::new(rhs)), start);
        }
    }

    fn term(&mut self) -> PResult<Node> {
        let mut lhs = self.unary()?;
        loop {
            let make: fn(Box<Node>, Box<Node>) -> Expr = match self.peek() {
                Tok::Star => Expr::Mul,
                Tok::Slash => Expr::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            let start = lhs.pos;
            lhs = Node::new(make(Box::new(lhs), Box::new(rhs)), start);
        }
    }

    fn unary(&mut self) -> PResult<Node> {
        if *self.peek() == Tok::Minus {
            let pos = self.pos();
            self.bump();
            if self.starts_mono() {
                let m = self.mono(true, false)?;
                return self.power(Node::new(Expr::Mono(m), pos));
            }
            let inner = self.unary()?;
            return Ok(Node::new(Expr::Neg(Box::new(inner)), pos));
        }
        let atom = self.atom()?;
        self.power(atom)
    }

    fn power(&mut self, base: Node) -> PResult<Node> {
        if *self.peek() == Tok::Caret {
            self.bump();
            let k = self.small_int()?;
            let pos = base.pos;
            return Ok(Node::new(Expr::Pow(Box::new(base), k), pos));
        }
        Ok(base)
    }

    fn atom(&mut self) -> PResult<Node> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(_) => Ok(Node::new(Expr::Rational(self.rational()?), pos)),
            Tok::CoeffMark => Ok(Node::new(Expr::Mono(self.mono(false, false)?), pos)),
            Tok::Name(n) if n == "q" => Ok(Node::new(Expr::Mono(self.mono(false, false)?), pos)),
            Tok::Name(n) => {
                self.bump();
                Ok(Node::new(Expr::Call(self.call(&n, pos)?), pos))
            }
            Tok::LParen => {
                self.bump();
                let mut inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                inner.pos = pos;
                Ok(inner)
            }
            _ => self.fail(&["number", "monomial", "function", "`(`"]),
        }
    }

    fn ints<const K: usize>(&mut self) -> PResult<[i64; K]> {
        let mut out = [0; K];
        for (i, slot) in out.iter_mut().enumerate() {
            if i > 0 {
                self.expect(Tok::Comma, "`,`")?;
            }
            *slot = self.small_int()?;
        }
        Ok(out)
    }

    fn monos<const K: usize>(&mut self, sep: Tok, sep_name: &str) -> PResult<[SignedMonomial; K]> {
        let mut out: Vec<SignedMonomial> = Vec::with_capacity(K);
        for i in 0..K {
            if i > 0 {
                self.expect(sep.clone(), sep_name)?;
            }
            out.push(self.arg_mono()?);
        }
        Ok(out.try_into().expect("K monomials"))
    }

    fn call(&mut self, name: &str, pos: Pos) -> PResult<Call> {
        let known = ["J", "Jbar", "Jm", "j", "AL", "f", "gsum", "thetaNP", "guniv", "builtin"];
        if !known.contains(&name) {
            return Err(ParseError { pos, expected: vec!["function name".into()], found: format!("`{name}`") });
        }
        self.expect(Tok::LParen, "`(`")?;
        let call = match name {
            "J" => {
                let [a, m] = self.ints()?;
                Call::J(a, m)
            }
            "Jbar" => {
                let [a, m] = self.ints()?;
                Call::Jbar(a, m)
            }
            "Jm" => {
                let [m] = self.ints()?;
                Call::Jm(m)
            }
            "j" => {
                let [arg, base] = self.monos(Tok::Semi, "`;`")?;
                Call::Theta { arg, base }
            }
            "AL" => {
                let [x, base, z] = self.monos(Tok::Semi, "`;`")?;
                Call::Appell { x, base, z }
            }
            "f" | "gsum" => {
                let [a, b, c] = self.ints()?;
                self.expect(Tok::Semi, "`;`")?;
                let [x, y] = self.monos(Tok::Comma, "`,`")?;
                if name == "f" {
                    Call::F { a, b, c, x, y }
                } else {
                    Call::G { a, b, c, x, y }
                }
            }
            "thetaNP" => {
                let [n, p] = self.ints()?;
                self.expect(Tok::Semi, "`;`")?;
                let [x, y] = self.monos(Tok::Comma, "`,`")?;
                Call::ThetaNp { n, p, x, y }
            }
            "guniv" => {
                let [x, base] = self.monos(Tok::Semi, "`;`")?;
                Call::GUniv { x, base }
            }
            _ => match self.bump() {
                Tok::Name(b) => Call::Builtin(b),
                _ => {
                    self.at -= 1;
                    return self.fail(&["builtin name"]);
                }
            },
        };
        self.expect(Tok::RParen, "`)`")?;
        Ok(call)
    }

    fn finish(&self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.fail(&["end of input"])
        }
    }
}

/// Parses one expression.
pub fn parse_expr(src: &str) -> PResult<Node> {
    let mut p = Parser { toks: tokenize(src, 1)?, at: 0 };
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

fn equation_at(src: &str, line: usize) -> PResult<Equation> {
    let mut p = Parser { toks: tokenize(src, line)?, at: 0 };
    let mut label = None;
    if let (Tok::Name(n), Tok::Colon) = (p.peek().clone(), p.peek2().clone()) {
        label = Some(n);
        p.bump();
        p.bump();
    }
    let lhs = p.expr()?;
    p.expect(Tok::EqEq, "`==`")?;
    let rhs = p.expr()?;
    p.finish()?;
    Ok(Equation { label, lhs, rhs, line })
}

/// Parses `[label:] lhs == rhs`.
pub fn parse_equation(src: &str) -> PResult<Equation> {
    equation_at(src, 1)
}

/// One equation per line; `#` starts a comment and a trailing `\` continues
/// the equation on the next line.
pub fn parse_file(src: &str) -> PResult<Vec<Equation>> {
    let mut out = Vec::new();
    let mut pending = String::new();
    let mut start = 0;
    for (i, raw) in src.lines().enumerate() {
        let text = raw.split('#').next().unwrap_or("");
        if pending.is_empty() {
            start = i + 1;
        }
        if let Some(cont) = text.trim_end().strip_suffix('\\') {
            pending.push_str(cont);
            pending.push('\n');
            continue;
        }
        pending.push_str(text);
        if !pending.trim().is_empty() {
            out.push(equation_at(&pending, start)?);
        }
        pending.clear();
    }
    if !pending.trim().is_empty() {
        out.push(equation_at(&pending, start)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(s: &str) -> SignedMonomial {
        s.parse().unwrap()
    }

    fn bx(e: Expr) -> Box<Node> {
        Box::new(Node::bare(e))
    }

    #[test]
    fn quotient_of_theta_functions() {
        let n = parse_expr("Jbar(3,8) / Jm(2)").unwrap();
        assert_eq!(n.expr, Expr::Div(bx(Expr::Call(Call::Jbar(3, 8))), bx(Expr::Call(Call::Jm(2)))));
    }

    #[test]
    fn equation_with_two_sides() {
        let e = parse_equation("f(1,2,1; q^1, q^1) == gsum(1,2,1; q^1, q^1) + thetaNP(1,1; q^1, q^1)").unwrap();
        let q = mono("q");
        assert_eq!(e.lhs.expr, Expr::Call(Call::F { a: 1, b: 2, c: 1, x: q.clone(), y: q.clone() }));
        let g = Expr::Call(Call::G { a: 1, b: 2, c: 1, x: q.clone(), y: q.clone() });
        let t = Expr::Call(Call::ThetaNp { n: 1, p: 1, x: q.clone(), y: q });
        assert_eq!(e.rhs.expr, Expr::Add(bx(g), bx(t)));
    }

    #[test]
    fn missing_argument_is_located() {
        let err = parse_expr("J(2,)").unwrap_err();
        assert_eq!(err.pos, Pos { line: 1, col: 5 });
        assert_eq!(err.expected, vec!["integer".to_string()]);
        assert_eq!(err.found, "`)`");
    }

    #[test]
    fn monomial_forms() {
        let cases = [
            ("q", "q"),
            ("q^3", "q^3"),
            ("q^-2", "q^-2"),
            ("q^(1/2)", "q^(1/2)"),
            ("-q^(1/2)", "-q^(1/2)"),
            ("c3/2*q^(-3/4)", "3/2*q^(-3/4)"),
            ("-c2*q^1", "-2*q"),
        ];
        for (src, want) in cases {
            assert_eq!(parse_expr(src).unwrap().expr, Expr::Mono(mono(want)), "{src}");
        }
        // argument lists also take an unmarked coefficient
        let n = parse_expr("j(-2*q^(1/3); q^2)").unwrap();
        assert_eq!(n.expr, Expr::Call(Call::Theta { arg: mono("-2*q^(1/3)"), base: mono("q^2") }));
        // and a bare constant
        let n = parse_expr("AL(q^(1/2); q; -1)").unwrap();
        let Expr::Call(Call::Appell { z, .. }) = n.expr else { panic!("not AL") };
        assert_eq!(z, mono("-q^(0)"));
        assert!(parse_expr("AL(q; q; 0)").is_err());
    }

    #[test]
    fn rational_literals_and_division() {
        assert_eq!(parse_expr("2/3").unwrap(), parse_expr("2 / 3").unwrap());
        assert!(matches!(parse_expr("2/3").unwrap().expr, Expr::Rational(_)));
        assert!(matches!(parse_expr("Jm(1)/3").unwrap().expr, Expr::Div(..)));
        assert!(parse_expr("1/0").is_err());
    }

    #[test]
    fn precedence() {
        let e = parse_expr("2 - 2*q^1*guniv(-q^1; q^8) - J(1,2)*Jbar(3,8)/Jm(2)").unwrap();
        let Expr::Sub(a, _) = &e.expr else { panic!("{e:?}") };
        assert!(matches!(a.expr, Expr::Sub(..)));
        let e = parse_expr("-Jm(1)^2").unwrap();
        let Expr::Neg(inner) = &e.expr else { panic!() };
        assert!(matches!(inner.expr, Expr::Pow(_, 2)));
    }

    #[test]
    fn arity_and_names_are_checked() {
        assert!(parse_expr("J(1)").is_err());
        assert!(parse_expr("j(q; q; q)").is_err());
        assert!(parse_expr("f(1,2; q, q)").is_err());
        assert!(parse_expr("frob(1)").is_err());
        assert!(parse_expr("builtin(3)").is_err());
        assert!(parse_expr("Jm(1) Jm(2)").is_err());
    }

    #[test]
    fn files_with_labels_comments_and_continuations() {
        let src = "# header\nfirst: Jm(1) == Jm(1)\n\nJm(2) == \\\n  Jm(2)  # trailing\n";
        let eqs = parse_file(src).unwrap();
        assert_eq!(eqs.len(), 2);
        assert_eq!(eqs[0].label.as_deref(), Some("first"));
        assert_eq!((eqs[0].line, eqs[1].line), (2, 4));
        let err = parse_file("ok: 1 == 1\nbad: J(1,) == 1\n").unwrap_err();
        assert_eq!(err.pos.line, 2);
    }

    mod props {
        use super::*;
        use crate::selftest::random_ast;
        use proptest::prelude::*;
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;

        proptest! {
            #[test]
            fn printed_trees_reparse(seed in any::<u64>(), depth in 0u32..5) {
                let node = random_ast(&mut ChaCha8Rng::seed_from_u64(seed), depth, false);
                let text = node.to_string();
                prop_assert_eq!(parse_expr(&text).unwrap(), node, "{}", text);
            }

            #[test]
            fn padding_punctuation_changes_nothing(seed in any::<u64>()) {
                let node = random_ast(&mut ChaCha8Rng::seed_from_u64(seed), 3, false);
                let text = node.to_string();
                let padded: String = text
                    .chars()
                    .flat_map(|c| if "(),;+*".contains(c) { vec![' ', c, ' '] } else { vec![c] })
                    .collect();
                prop_assert_eq!(parse_expr(&padded).unwrap(), node, "{}", padded);
            }

            #[test]
            fn monomials_round_trip(n in -40i64..40, d in 1i64..9, cn in 1i64..20, cd in 1i64..6, neg: bool) {
                let e = Exponent::new(n, d);
                let c = Coefficient::new(if neg { -cn } else { cn }.into(), cd.into());
                let m = SignedMonomial::new(c, e).unwrap();
                let node = Node::bare(Expr::Mono(m.clone()));
                prop_assert_eq!(parse_expr(&node.to_string()).unwrap(), node);
            }
        }
    }
}
