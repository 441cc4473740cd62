//! Expression trees for the identity language, and their canonical printing.
//!
//! Printing is the inverse of parsing: `parse(print(e)) == e` for every tree,
//! which is also what makes the printed form usable as a cache key.

use std::fmt;

use heckmort_core::{Coefficient, SignedMonomial};
use num_traits::{One, Signed};

/// 1-based line and column of a node's first character.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A node and where it came from. Positions do not take part in equality.
#[derive(Debug, Clone)]
pub struct Node {
    pub expr: Expr,
    pub pos: Pos,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.expr == other.expr
    }
}

impl Eq for Node {}

impl Node {
    pub fn new(expr: Expr, pos: Pos) -> Self {
        Node { expr, pos }
    }

    /// A node without a source position, for trees built in code.
    pub fn bare(expr: Expr) -> Self {
        Node { expr, pos: Pos::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    /// Nonnegative rational literal; signs come from [`Expr::Neg`].
    Rational(Coefficient),
    Mono(SignedMonomial),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Neg(Box<Node>),
    Pow(Box<Node>, i64),
    Call(Call),
}

/// The engine objects, one variant per operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Call {
    J(i64, i64),
    Jbar(i64, i64),
    Jm(i64),
    Theta { arg: SignedMonomial, base: SignedMonomial },
    Appell { x: SignedMonomial, base: SignedMonomial, z: SignedMonomial },
    F { a: i64, b: i64, c: i64, x: SignedMonomial, y: SignedMonomial },
    G { a: i64, b: i64, c: i64, x: SignedMonomial, y: SignedMonomial },
    ThetaNp { n: i64, p: i64, x: SignedMonomial, y: SignedMonomial },
    GUniv { x: SignedMonomial, base: SignedMonomial },
    Builtin(String),
}

/// `lhs == rhs`, optionally labelled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub label: Option<String>,
    pub lhs: Node,
    pub rhs: Node,
    pub line: usize,
}

impl Equation {
    /// The label, or the printed equation when there is none.
    pub fn name(&self) -> String {
        match &self.label {
            Some(l) => l.clone(),
            None => format!("{} == {}", self.lhs, self.rhs),
        }
    }
}

/// Monomials print as `q^(e)`, `c3/2*q^(e)` or with a leading `-`.
pub fn mono_text(m: &SignedMonomial) -> String {
    let c = m.coeff();
    let sign = if c.is_negative() { "-" } else { "" };
    let abs = c.abs();
    if abs.is_one() {
        format!("{sign}q^({})", m.exp())
    } else {
        format!("{sign}c{abs}*q^({})", m.exp())
    }
}

impl Expr {
    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Rational(r) if !r.is_integer() => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, node: &Node, min: u8) -> fmt::Result {
    if node.expr.prec() < min {
        write!(f, "({node})")
    } else {
        write!(f, "{node}")
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.expr {
            Expr::Rational(r) => write!(f, "{r}"),
            Expr::Mono(m) => f.write_str(&mono_text(m)),
            Expr::Add(a, b) => {
                write_at(f, a, 1)?;
                f.write_str(" + ")?;
                write_at(f, b, 2)
            }
            Expr::Sub(a, b) => {
                write_at(f, a, 1)?;
                f.write_str(" - ")?;
                write_at(f, b, 2)
            }
            Expr::Mul(a, b) => {
                write_at(f, a, 2)?;
                f.write_str(" * ")?;
                write_at(f, b, 3)
            }
            Expr::Div(a, b) => {
                write_at(f, a, 2)?;
                f.write_str(" / ")?;
                // `2 / 3` would read back as the literal 2/3
                let rhs = b.to_string();
                if rhs.starts_with(|c: char| c.is_ascii_digit()) {
                    write!(f, "({rhs})")
                } else {
                    write_at(f, b, 3)
                }
            }
            Expr::Neg(a) => {
                f.write_str("-")?;
                // `-q^(1)` and `-c2*q^(1)` are monomial literals
                let inner = a.to_string();
                if a.expr.prec() < 3 || inner.starts_with(['q', 'c', '-']) {
                    write!(f, "({inner})")
                } else {
                    f.write_str(&inner)
                }
            }
            Expr::Pow(a, k) => {
                write_at(f, a, 5)?;
                write!(f, "^{k}")
            }
            Expr::Call(c) => write!(f, "{c}"),
        }
    }
}

impl fmt::Display for Call {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = mono_text;
        match self {
            Call::J(a, m) => write!(f, "J({a}, {m})"),
            Call::Jbar(a, m) => write!(f, "Jbar({a}, {m})"),
            Call::Jm(m) => write!(f, "Jm({m})"),
            Call::Theta { arg, base } => write!(f, "j({}; {})", t(arg), t(base)),
            Call::Appell { x, base, z } => write!(f, "AL({}; {}; {})", t(x), t(base), t(z)),
            Call::F { a, b, c, x, y } => write!(f, "f({a}, {b}, {c}; {}, {})", t(x), t(y)),
            Call::G { a, b, c, x, y } => write!(f, "gsum({a}, {b}, {c}; {}, {})", t(x), t(y)),
            Call::ThetaNp { n, p, x, y } => write!(f, "thetaNP({n}, {p}; {}, {})", t(x), t(y)),
            Call::GUniv { x, base } => write!(f, "guniv({}; {})", t(x), t(base)),
            Call::Builtin(name) => write!(f, "builtin({name})"),
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = &self.label {
            write!(f, "{l}: ")?;
        }
        write!(f, "{} == {}", self.lhs, self.rhs)
    }
}
