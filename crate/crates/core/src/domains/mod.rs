//! Abstract values and the abstract evaluation of expressions and guards.

pub mod bitwise;
mod boolean;
mod int;
mod wrap;

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::absint::AbstractEnv;
use crate::concrete::json_int;
use crate::ir::{BinOp, Expr, ExprType, MachType, SymbolTable, Term};

pub use boolean::BoolInterval;
pub use int::{Bound, IntInterval};
pub use wrap::WrapInterval;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DomainKind {
    Integer,
    Wrapped,
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainKind::Integer => "integer",
            DomainKind::Wrapped => "wrapped",
        })
    }
}

impl FromStr for DomainKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "integer" => Ok(DomainKind::Integer),
            "wrapped" => Ok(DomainKind::Wrapped),
            _ => Err(format!("unknown domain `{s}`")),
        }
    }
}

/// Which domain to use and which precision features to switch on. With
/// `arithmetic` off, `+ - * /` produce the initial value of their type;
/// with `bitwise` off the same holds for `& | ^ ~ << >>` and casts.
/// Comparisons are always evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DomainConfig {
    pub domain: DomainKind,
    pub arithmetic: bool,
    pub bitwise: bool,
    pub widening: bool,
}

impl Default for DomainConfig {
    fn default() -> Self {
        DomainConfig { domain: DomainKind::Integer, arithmetic: false, bitwise: false, widening: false }
    }
}

impl DomainConfig {
    pub fn new(domain: DomainKind) -> Self {
        DomainConfig { domain, ..Default::default() }
    }

    /// Every flag switched on.
    pub fn precise(domain: DomainKind) -> Self {
        DomainConfig { domain, arithmetic: true, bitwise: true, widening: true }
    }

    /// All sixteen combinations.
    pub fn all() -> Vec<DomainConfig> {
        let mut out = Vec::with_capacity(16);
        for domain in [DomainKind::Integer, DomainKind::Wrapped] {
            for bits in 0..8u8 {
                out.push(DomainConfig {
                    domain,
                    arithmetic: bits & 1 != 0,
                    bitwise: bits & 2 != 0,
                    widening: bits & 4 != 0,
                });
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "domain": self.domain.to_string(),
            "arithmetic": self.arithmetic,
            "bitwise": self.bitwise,
            "widening": self.widening,
        })
    }
}

/// A numeric abstract value in one of the two domains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Interval {
    Int(IntInterval),
    Wrap(WrapInterval),
}

macro_rules! both {
    ($a:expr, $b:expr, |$x:ident, $y:ident| $body:expr) => {
        match ($a, $b) {
            (Interval::Int($x), Interval::Int($y)) => Interval::Int($body),
            (Interval::Wrap($x), Interval::Wrap($y)) => Interval::Wrap($body),
            (a, b) => panic!("mixed domains: {a:?} and {b:?}"),
        }
    };
}

macro_rules! each {
    ($a:expr, |$x:ident| $body:expr) => {
        match $a {
            Interval::Int($x) => $body,
            Interval::Wrap($x) => $body,
        }
    };
}

macro_rules! map {
    ($a:expr, |$x:ident| $body:expr) => {
        match $a {
            Interval::Int($x) => Interval::Int($body),
            Interval::Wrap($x) => Interval::Wrap($body),
        }
    };
}

impl Interval {
    /// The value every variable starts with: `(−∞, +∞)` or `⟨0, −1⟩`.
    pub fn init(domain: DomainKind, ty: MachType) -> Self {
        match domain {
            DomainKind::Integer => Interval::Int(IntInterval::top(ty)),
            DomainKind::Wrapped => Interval::Wrap(WrapInterval::full(ty)),
        }
    }

    pub fn bottom(domain: DomainKind, ty: MachType) -> Self {
        match domain {
            DomainKind::Integer => Interval::Int(IntInterval::bottom(ty)),
            DomainKind::Wrapped => Interval::Wrap(WrapInterval::bottom(ty)),
        }
    }

    pub fn constant(domain: DomainKind, ty: MachType, v: i128) -> Self {
        match domain {
            DomainKind::Integer => Interval::Int(IntInterval::constant(ty, v)),
            DomainKind::Wrapped => Interval::Wrap(WrapInterval::constant(ty, v)),
        }
    }

    /// The members of `[lo, hi]` (type order), which must be in range.
    pub fn range(domain: DomainKind, ty: MachType, lo: i128, hi: i128) -> Self {
        match domain {
            DomainKind::Integer => Interval::Int(IntInterval::range(ty, lo, hi)),
            DomainKind::Wrapped if lo <= hi => Interval::Wrap(WrapInterval::from_values(ty, lo, hi)),
            DomainKind::Wrapped => Interval::Wrap(WrapInterval::bottom(ty)),
        }
    }

    pub fn domain(&self) -> DomainKind {
        match self {
            Interval::Int(_) => DomainKind::Integer,
            Interval::Wrap(_) => DomainKind::Wrapped,
        }
    }

    pub fn ty(&self) -> MachType {
        each!(self, |x| x.ty())
    }

    pub fn is_bottom(&self) -> bool {
        each!(self, |x| x.is_bottom())
    }

    /// No representable member, including integer ranges lying wholly
    /// outside the type.
    pub fn is_empty(&self) -> bool {
        match self {
            Interval::Int(x) => x.clamped().is_none(),
            Interval::Wrap(x) => x.is_bottom(),
        }
    }

    pub fn is_init(&self) -> bool {
        *self == Self::init(self.domain(), self.ty())
    }

    pub fn contains(&self, v: i128) -> bool {
        each!(self, |x| x.contains(v))
    }

    /// The only member, if there is exactly one.
    pub fn singleton(&self) -> Option<i128> {
        each!(self, |x| x.singleton())
    }

    /// Least and greatest member in type order.
    pub fn hull(&self) -> Option<(i128, i128)> {
        match self {
            Interval::Int(x) => x.clamped(),
            Interval::Wrap(x) => x.hull(),
        }
    }

    /// End points of a non-wrapping interval; `None` for an infinite bound
    /// or for an arc that wraps.
    pub fn linear_bounds(&self) -> (Option<i128>, Option<i128>) {
        match self {
            Interval::Int(x) => match x.bounds() {
                Some((lo, hi)) => {
                    let fin = |b| if let Bound::Fin(v) = b { Some(v) } else { None };
                    (fin(lo), fin(hi))
                }
                None => (None, None),
            },
            Interval::Wrap(x) => match x.ends() {
                Some((lo, hi)) if lo <= hi && !x.is_full() => (Some(lo), Some(hi)),
                _ => (None, None),
            },
        }
    }

    pub fn leq(&self, other: &Self) -> bool {
        match (self, other) {
            (Interval::Int(a), Interval::Int(b)) => a.leq(b),
            (Interval::Wrap(a), Interval::Wrap(b)) => a.leq(b),
            (a, b) => panic!("mixed domains: {a:?} and {b:?}"),
        }
    }

    pub fn join(&self, other: &Self) -> Self {
        both!(self, other, |a, b| a.join(b))
    }

    pub fn meet(&self, other: &Self) -> Self {
        both!(self, other, |a, b| a.meet(b))
    }

    pub fn widen(old: &Self, new: &Self) -> Self {
        match (old, new) {
            (Interval::Int(a), Interval::Int(b)) => Interval::Int(IntInterval::widen(a, b)),
            (Interval::Wrap(a), Interval::Wrap(b)) => Interval::Wrap(WrapInterval::widen(a, b)),
            (a, b) => panic!("mixed domains: {a:?} and {b:?}"),
        }
    }

    pub fn binary(op: BinOp, a: &Self, b: &Self) -> Self {
        match op {
            BinOp::Add => both!(a, b, |x, y| x.add(y)),
            BinOp::Sub => both!(a, b, |x, y| x.sub(y)),
            BinOp::Mul => both!(a, b, |x, y| x.mul(y)),
            BinOp::Div => both!(a, b, |x, y| x.div(y)),
            BinOp::Shl => both!(a, b, |x, y| x.shl(y)),
            BinOp::Shr => both!(a, b, |x, y| x.shr(y)),
            BinOp::And => both!(a, b, |x, y| x.and(y)),
            BinOp::Or => both!(a, b, |x, y| x.or(y)),
            BinOp::Xor => both!(a, b, |x, y| x.xor(y)),
        }
    }

    pub fn bit_not(&self) -> Self {
        map!(self, |x| x.not())
    }

    pub fn cast(&self, to: MachType) -> Self {
        map!(self, |x| x.cast(to))
    }

    pub fn le(&self, other: &Self) -> BoolInterval {
        match (self, other) {
            (Interval::Int(a), Interval::Int(b)) => a.le(b),
            (Interval::Wrap(a), Interval::Wrap(b)) => a.le(b),
            (a, b) => panic!("mixed domains: {a:?} and {b:?}"),
        }
    }

    /// Truth of the value used as a guard.
    pub fn truth(&self) -> BoolInterval {
        each!(self, |x| x.truth())
    }

    pub fn nonzero(&self) -> Self {
        map!(self, |x| x.nonzero())
    }

    pub fn zero(&self) -> Self {
        self.meet(&Self::constant(self.domain(), self.ty(), 0))
    }

    pub fn at_most(&self, c: i128) -> Self {
        map!(self, |x| x.at_most(c))
    }

    pub fn at_least(&self, c: i128) -> Self {
        map!(self, |x| x.at_least(c))
    }

    /// The integers a truth value may denote, converted to `ty`.
    pub fn from_bool(domain: DomainKind, ty: MachType, b: BoolInterval) -> Self {
        let mut acc = Self::bottom(domain, ty);
        for (v, possible) in [(0, b.can_be_false()), (1, b.can_be_true())] {
            if possible {
                acc = acc.join(&Self::constant(domain, ty, ty.wrap(v)));
            }
        }
        acc
    }

    pub fn to_json(&self) -> Value {
        let (dom, bounds) = match self {
            Interval::Int(x) => {
                let b = |b: Bound| match b {
                    Bound::NegInf => json!("-inf"),
                    Bound::PosInf => json!("+inf"),
                    Bound::Fin(v) => json_int(v),
                };
                ("int", x.bounds().map(|(lo, hi)| (b(lo), b(hi))))
            }
            Interval::Wrap(x) => ("wrap", x.ends().map(|(lo, hi)| (json_int(lo), json_int(hi)))),
        };
        match bounds {
            Some((lo, hi)) => json!({ "dom": dom, "lo": lo, "hi": hi, "bottom": false }),
            None => json!({ "dom": dom, "lo": null, "hi": null, "bottom": true }),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        each!(self, |x| x.fmt(f))
    }
}

/// Result of abstractly evaluating an expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AbsValue {
    Num(Interval),
    Bool(BoolInterval),
}

impl AbsValue {
    pub fn truth(&self) -> BoolInterval {
        match self {
            AbsValue::Num(i) => i.truth(),
            AbsValue::Bool(b) => *b,
        }
    }

    /// The value stored into a variable of type `ty`.
    pub fn to_interval(&self, domain: DomainKind, ty: MachType) -> Interval {
        match self {
            AbsValue::Num(i) if i.ty() == ty => *i,
            AbsValue::Num(i) => i.cast(ty),
            AbsValue::Bool(b) => Interval::from_bool(domain, ty, *b),
        }
    }
}

pub fn term_interval(t: &Term, env: &AbstractEnv, symbols: &SymbolTable) -> Interval {
    match *t {
        Term::Var(v) => env.get(v, symbols),
        Term::Const(c, ty) => {
            if env.is_bottom() {
                Interval::bottom(env.domain(), ty)
            } else {
                Interval::constant(env.domain(), ty, c)
            }
        }
    }
}

/// Abstract value of `e` in `env`.
pub fn eval_abs_expr(e: &Expr, env: &AbstractEnv, symbols: &SymbolTable, config: &DomainConfig) -> AbsValue {
    let domain = env.domain();
    let term = |t: &Term| term_interval(t, env, symbols);
    if env.is_bottom() {
        return match e.result_type(symbols) {
            ExprType::Num(ty) => AbsValue::Num(Interval::bottom(domain, ty)),
            ExprType::Bool => AbsValue::Bool(BoolInterval::Bottom),
        };
    }
    let gated = |enabled: bool, ty: MachType, operands: &[Interval], f: &dyn Fn() -> Interval| {
        if operands.iter().any(|i| i.is_empty()) {
            Interval::bottom(domain, ty)
        } else if !enabled {
            Interval::init(domain, ty)
        } else {
            f()
        }
    };
    match e {
        Expr::Term(t) => AbsValue::Num(term(t)),
        Expr::Binary(op, a, b) => {
            let (x, y) = (term(a), term(b));
            let enabled = if op.is_arithmetic() { config.arithmetic } else { config.bitwise };
            AbsValue::Num(gated(enabled, x.ty(), &[x, y], &|| Interval::binary(*op, &x, &y)))
        }
        Expr::BitNot(a) => {
            let x = term(a);
            AbsValue::Num(gated(config.bitwise, x.ty(), &[x], &|| x.bit_not()))
        }
        Expr::Cast(ty, a) => {
            let x = term(a);
            AbsValue::Num(gated(config.bitwise, *ty, &[x], &|| x.cast(*ty)))
        }
        Expr::Le(a, b) => AbsValue::Bool(term(a).le(&term(b))),
        Expr::LogicAnd(a, b) => AbsValue::Bool(term(a).truth().and(term(b).truth())),
        Expr::Not(a) => AbsValue::Bool(term(a).truth().not()),
    }
}

/// Truth of a guard in `env`.
pub fn eval_cond(e: &Expr, env: &AbstractEnv, symbols: &SymbolTable, config: &DomainConfig) -> BoolInterval {
    eval_abs_expr(e, env, symbols, config).truth()
}

fn restrict_term(t: &Term, env: &mut AbstractEnv, symbols: &SymbolTable, polarity: bool) {
    if let Term::Var(v) = *t {
        let x = env.get(v, symbols);
        env.set(v, if polarity { x.nonzero() } else { x.zero() });
    }
}

/// `a ≤ b` when `polarity` holds, `b < a` otherwise.
fn restrict_le(a: &Term, b: &Term, env: &mut AbstractEnv, symbols: &SymbolTable, polarity: bool) {
    let (x, y) = (term_interval(a, env, symbols), term_interval(b, env, symbols));
    let (Some((xl, xh)), Some((yl, yh))) = (x.hull(), y.hull()) else {
        env.make_bottom();
        return;
    };
    if let Term::Var(v) = *a {
        env.set(v, if polarity { x.at_most(yh) } else { x.at_least(yl + 1) });
    }
    if let Term::Var(w) = *b {
        let y = term_interval(b, env, symbols);
        env.set(w, if polarity { y.at_least(xl) } else { y.at_most(xh - 1) });
    }
}

/// Narrow `env` to the states in which `e` evaluates to `polarity`. Only
/// variables occurring directly in `e` are narrowed; states satisfying the
/// condition are never dropped.
pub fn restrict(
    e: &Expr,
    env: &AbstractEnv,
    polarity: bool,
    symbols: &SymbolTable,
    config: &DomainConfig,
) -> AbstractEnv {
    if env.is_bottom() {
        return env.clone();
    }
    let mut out = env.clone();
    match e {
        Expr::Le(a, b) => restrict_le(a, b, &mut out, symbols, polarity),
        Expr::Term(t) => restrict_term(t, &mut out, symbols, polarity),
        Expr::Not(t) => restrict_term(t, &mut out, symbols, !polarity),
        Expr::LogicAnd(a, b) if polarity => {
            restrict_term(a, &mut out, symbols, true);
            restrict_term(b, &mut out, symbols, true);
        }
        Expr::LogicAnd(a, b) => {
            let mut left = env.clone();
            restrict_term(a, &mut left, symbols, false);
            let mut right = env.clone();
            restrict_term(b, &mut right, symbols, false);
            out = left.join(&right, symbols);
        }
        _ => {}
    }
    if !eval_cond(e, &out, symbols, config).contains(polarity) {
        out.make_bottom();
    }
    out
}
