//! Evaluation of expression trees to truncated series.

use std::fmt;

use heckmort_core::appell::{appell_m, AppellSpec};
use heckmort_core::eulerian::{builtin_series, g_universal};
use heckmort_core::hecke::{f_abc, HeckeParams};
use heckmort_core::master::{g_abc, theta_np, MasterParams, Specialization};
use heckmort_core::theta::{big_j, theta_j, JVariant, ThetaSpec};
use heckmort_core::{Exponent, QError, QSeries};

use crate::ast::{Call, Expr, Node, Pos};

/// An engine error and the node that raised it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalError {
    pub pos: Pos,
    pub error: QError,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {}: {}", self.pos, self.error)
    }
}

impl std::error::Error for EvalError {}

const ATTEMPTS: usize = 10;

/// Evaluates `node` exactly modulo `q^order`.
///
/// Sub-results are computed at a working horizon that is raised until the
/// final series reaches `order`; this absorbs the precision lost when a
/// factor has negative order or a divisor has positive order.
pub fn evaluate(node: &Node, order: Exponent) -> Result<QSeries, EvalError> {
    let step = Exponent::int(order.ceil().max(8));
    let mut working = order;
    let mut last = EvalError { pos: node.pos, error: QError::InsufficientPrecision };
    for _ in 0..ATTEMPTS {
        match eval_at(node, working) {
            Ok(s) if s.precision() >= order => return Ok(s.truncate(order)),
            Ok(s) => working = working + (order - s.precision()).max(Exponent::ONE) + Exponent::int(2),
            Err(e) if e.error == QError::InsufficientPrecision => {
                last = e;
                working += step;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

fn eval_at(node: &Node, wp: Exponent) -> Result<QSeries, EvalError> {
    let tag = |error: QError| EvalError { pos: node.pos, error };
    Ok(match &node.expr {
        Expr::Rational(r) => QSeries::constant(r.clone(), wp),
        Expr::Mono(m) => QSeries::monomial(m, wp),
        Expr::Add(a, b) => &eval_at(a, wp)? + &eval_at(b, wp)?,
        Expr::Sub(a, b) => &eval_at(a, wp)? - &eval_at(b, wp)?,
        Expr::Mul(a, b) => &eval_at(a, wp)? * &eval_at(b, wp)?,
        Expr::Div(a, b) => eval_at(a, wp)?.div(&eval_at(b, wp)?).map_err(tag)?,
        Expr::Neg(a) => -&eval_at(a, wp)?,
        Expr::Pow(a, k) => eval_at(a, wp)?.powi(*k).map_err(tag)?,
        Expr::Call(c) => call(c, wp).map_err(tag)?,
    })
}

fn call(c: &Call, wp: Exponent) -> heckmort_core::Result<QSeries> {
    match c {
        Call::J(a, m) => big_j(*a, *m, JVariant::Plain, wp),
        Call::Jbar(a, m) => big_j(*a, *m, JVariant::Bar, wp),
        Call::Jm(m) => big_j(0, *m, JVariant::Eta, wp),
        Call::Theta { arg, base } => theta_j(&ThetaSpec::new(arg.clone(), base.clone())?, wp),
        Call::Appell { x, base, z } => appell_m(&AppellSpec::new(x.clone(), base.clone(), z.clone())?, wp),
        Call::F { a, b, c, x, y } => f_abc(HeckeParams::new(*a, *b, *c)?, x, y, wp),
        Call::G { a, b, c, x, y } => g_abc(*a, *b, *c, x, y, wp),
        Call::ThetaNp { n, p, x, y } => {
            theta_np(MasterParams::new(*n, *p)?, &Specialization::new(x.clone(), y.clone()), wp)
        }
        Call::GUniv { x, base } => g_universal(x, base, wp),
        Call::Builtin(name) => builtin_series(name, wp),
    }
}
