//! Concrete machine-integer semantics and the program-evaluation oracle.
//!
//! Arithmetic happens at the operand type: unsigned and signed results both
//! wrap modulo `2^w`, division truncates toward zero, right shifts are
//! arithmetic on signed operands and logical on unsigned ones. Boolean
//! operators produce 0 or 1. Division by zero and shift amounts outside
//! `[0, w)` are runtime errors.

mod exhaustive;

use std::fmt;

use serde_json::{json, Map, Value};

use crate::ir::{BinOp, Expr, Program, Stmt, SymbolTable, Term, VarId};

pub use exhaustive::{
    exhaustive_check, explore, input_vars, Counterexample, ExhaustiveError, ExhaustiveOptions,
    ExhaustiveOutcome, Exploration,
};

/// Default per-run step limit.
pub const DEFAULT_STEP_LIMIT: u64 = 1_000_000;

/// A total assignment of in-range values to every declared variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConcreteEnv {
    values: Vec<i128>,
}

impl ConcreteEnv {
    /// Every variable at zero, or at its type minimum when zero is not
    /// representable.
    pub fn zeroed(symbols: &SymbolTable) -> Self {
        let values = symbols
            .decls()
            .iter()
            .map(|d| if d.ty.contains(0) { 0 } else { d.ty.min() })
            .collect();
        ConcreteEnv { values }
    }

    /// Build from values in declaration order; `None` if the count or any
    /// range is wrong.
    pub fn from_values(symbols: &SymbolTable, values: Vec<i128>) -> Option<Self> {
        (values.len() == symbols.len()
            && symbols.ids().all(|v| symbols.ty(v).contains(values[v.index()])))
        .then_some(ConcreteEnv { values })
    }

    pub fn get(&self, v: VarId) -> i128 {
        self.values[v.index()]
    }

    /// Set `v`, reducing `value` into the variable's type.
    pub fn set(&mut self, symbols: &SymbolTable, v: VarId, value: i128) {
        self.values[v.index()] = symbols.ty(v).wrap(value);
    }

    pub fn values(&self) -> &[i128] {
        &self.values
    }

    pub fn to_json(&self, symbols: &SymbolTable) -> Value {
        let mut m = Map::new();
        for v in symbols.ids() {
            m.insert(symbols.name(v).to_string(), json_int(self.get(v)));
        }
        Value::Object(m)
    }

    pub fn display<'a>(&'a self, symbols: &'a SymbolTable) -> impl fmt::Display + 'a {
        EnvDisplay(self, symbols)
    }
}

struct EnvDisplay<'a>(&'a ConcreteEnv, &'a SymbolTable);

impl fmt::Display for EnvDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in self.1.ids() {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{}={}", self.1.name(v), self.0.get(v))?;
        }
        Ok(())
    }
}

pub(crate) fn json_int(v: i128) -> Value {
    if let Ok(x) = i64::try_from(v) {
        json!(x)
    } else if let Ok(x) = u64::try_from(v) {
        json!(x)
    } else {
        json!(v.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuntimeErrorKind {
    DivByZero,
    ShiftOutOfRange,
}

impl fmt::Display for RuntimeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuntimeErrorKind::DivByZero => "div-by-zero",
            RuntimeErrorKind::ShiftOutOfRange => "shift-out-of-range",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunVerdict {
    Safe,
    AssertFail { idx: usize, env: ConcreteEnv },
    StepLimit,
    RuntimeError { kind: RuntimeErrorKind, idx: usize },
}

impl RunVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            RunVerdict::Safe => "safe",
            RunVerdict::AssertFail { .. } => "assert-fail",
            RunVerdict::StepLimit => "step-limit",
            RunVerdict::RuntimeError { .. } => "runtime-error",
        }
    }
}

fn term_value(t: &Term, env: &ConcreteEnv) -> i128 {
    match *t {
        Term::Var(v) => env.get(v),
        Term::Const(c, _) => c,
    }
}

/// Evaluate an expression. Boolean forms yield 0 or 1; a lone term yields
/// its value.
pub fn eval_expr(e: &Expr, env: &ConcreteEnv, symbols: &SymbolTable) -> Result<i128, RuntimeErrorKind> {
    let val = |t: &Term| term_value(t, env);
    Ok(match e {
        Expr::Term(t) => val(t),
        Expr::Le(a, b) => (val(a) <= val(b)) as i128,
        Expr::LogicAnd(a, b) => (val(a) != 0 && val(b) != 0) as i128,
        Expr::Not(a) => (val(a) == 0) as i128,
        Expr::BitNot(a) => a.ty(symbols).wrap(!val(a)),
        Expr::Cast(ty, a) => ty.wrap(val(a)),
        Expr::Binary(op, a, b) => {
            let ty = a.ty(symbols);
            let (x, y) = (val(a), val(b));
            match op {
                BinOp::Add => ty.wrap(x.wrapping_add(y)),
                BinOp::Sub => ty.wrap(x.wrapping_sub(y)),
                BinOp::Mul => ty.wrap(x.wrapping_mul(y)),
                BinOp::Div => {
                    if y == 0 {
                        return Err(RuntimeErrorKind::DivByZero);
                    }
                    ty.wrap(x / y)
                }
                BinOp::Shl | BinOp::Shr => {
                    if y < 0 || y >= ty.width() as i128 {
                        return Err(RuntimeErrorKind::ShiftOutOfRange);
                    }
                    if *op == BinOp::Shl {
                        ty.wrap(((x as u128) << y) as i128)
                    } else {
                        x >> y
                    }
                }
                BinOp::And => x & y,
                BinOp::Or => x | y,
                BinOp::Xor => x ^ y,
            }
        }
    })
}

/// C truthiness of a guard.
pub fn eval_cond(e: &Expr, env: &ConcreteEnv, symbols: &SymbolTable) -> Result<bool, RuntimeErrorKind> {
    eval_expr(e, env, symbols).map(|v| v != 0)
}

/// Effect of one statement on the environment. Only assignments change it;
/// the assigned value is converted to the destination type.
pub fn eval_state(s: &Stmt, mut env: ConcreteEnv, symbols: &SymbolTable) -> Result<ConcreteEnv, RuntimeErrorKind> {
    if let Stmt::Assign(v, e) = s {
        let value = eval_expr(e, &env, symbols)?;
        env.set(symbols, *v, value);
    }
    Ok(env)
}

/// Run `program` from `env`.
pub fn eval(env: ConcreteEnv, program: &Program, step_limit: u64) -> RunVerdict {
    eval_observed(env, program, step_limit, |_, _| {})
}

/// Like [`eval`], calling `observe(pc, env)` on entry to every executed
/// statement.
pub fn eval_observed(
    mut env: ConcreteEnv,
    program: &Program,
    step_limit: u64,
    mut observe: impl FnMut(usize, &ConcreteEnv),
) -> RunVerdict {
    let symbols = program.symbols();
    let mut pc = 1;
    let mut steps = 0u64;
    while pc <= program.len() {
        if steps >= step_limit {
            return RunVerdict::StepLimit;
        }
        steps += 1;
        observe(pc, &env);
        let s = program.stmt(pc);
        match s {
            Stmt::Assume(e) => match eval_cond(e, &env, symbols) {
                Ok(false) => return RunVerdict::Safe,
                Ok(true) => {}
                Err(kind) => return RunVerdict::RuntimeError { kind, idx: pc },
            },
            Stmt::Assert(e) => match eval_cond(e, &env, symbols) {
                Ok(false) => return RunVerdict::AssertFail { idx: pc, env },
                Ok(true) => {}
                Err(kind) => return RunVerdict::RuntimeError { kind, idx: pc },
            },
            _ => {}
        }
        env = match eval_state(s, env, symbols) {
            Ok(env) => env,
            Err(kind) => return RunVerdict::RuntimeError { kind, idx: pc },
        };
        pc += 1;
        if let Stmt::IfGoto(e, l) = s {
            match eval_cond(e, &env, symbols) {
                Ok(true) => pc = program.label_index(l).expect("validated label"),
                Ok(false) => {}
                Err(kind) => return RunVerdict::RuntimeError { kind, idx: pc - 1 },
            }
        }
    }
    RunVerdict::Safe
}
