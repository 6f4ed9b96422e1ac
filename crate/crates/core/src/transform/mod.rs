//! Program rewrites driven by an analysis result, and the per-assertion
//! verdicts it supports.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::absint::{AbstractEnv, DomainMap};
use crate::domains::{eval_abs_expr, eval_cond, term_interval, BoolInterval, DomainConfig, Interval};
use crate::ir::{detect_loops, dominators, BinOp, Expr, IrError, Program, Stmt, SymbolTable, Term, VarId};

/// Whether evaluating `e` in any state of `env` might raise a runtime error.
fn may_fault(e: &Expr, env: &AbstractEnv, symbols: &SymbolTable) -> bool {
    match e {
        Expr::Binary(BinOp::Div, _, d) => term_interval(d, env, symbols).contains(0),
        Expr::Binary(op, a, k) if op.is_shift() => {
            let w = a.ty(symbols).width() as i128;
            term_interval(k, env, symbols).hull().is_none_or(|(lo, hi)| lo < 0 || hi >= w)
        }
        _ => false,
    }
}

fn fold_guard(e: &Expr, env: &AbstractEnv, symbols: &SymbolTable, config: &DomainConfig) -> Option<Expr> {
    let folded = match eval_cond(e, env, symbols, config) {
        BoolInterval::True => Expr::truth(),
        BoolInterval::False => Expr::falsity(),
        _ => return None,
    };
    (folded != *e).then_some(folded)
}

/// Replace every expression whose value is fixed at its statement by that
/// constant. Conditions fold to `1` or `0`. Expressions that might fault are
/// left alone so runtime errors are preserved. Returns the new program and
/// the number of rewritten statements.
pub fn singleton_propagate(program: &Program, pa: &DomainMap, config: &DomainConfig) -> (Program, usize) {
    let symbols = program.symbols();
    let mut folded = 0;
    let stmts = program
        .indices()
        .map(|i| {
            let s = program.stmt(i);
            let Some(env) = pa.get(i).filter(|e| !e.is_bottom()) else { return s.clone() };
            let new = match s {
                Stmt::Assign(v, e) if !may_fault(e, env, symbols) => {
                    let ty = symbols.ty(*v);
                    eval_abs_expr(e, env, symbols, config)
                        .to_interval(env.domain(), ty)
                        .singleton()
                        .map(|c| Expr::Term(Term::Const(c, ty)))
                        .filter(|c| c != e)
                        .map(|c| Stmt::Assign(*v, c))
                }
                Stmt::Assume(e) => fold_guard(e, env, symbols, config).map(Stmt::Assume),
                Stmt::Assert(e) => fold_guard(e, env, symbols, config).map(Stmt::Assert),
                Stmt::IfGoto(e, l) => fold_guard(e, env, symbols, config).map(|e| Stmt::IfGoto(e, l.clone())),
                _ => None,
            };
            match new {
                Some(n) => {
                    folded += 1;
                    n
                }
                None => s.clone(),
            }
        })
        .collect();
    (program.with_stmts(stmts).expect("folding keeps the program well formed"), folded)
}

/// Turn every statement with a Bottom or missing entry state into `skip`.
/// Labels stay. Returns the new program and the number of statements killed.
pub fn remove_dead_code(program: &Program, pa: &DomainMap) -> (Program, usize) {
    let mut killed = 0;
    let stmts = program
        .indices()
        .map(|i| match program.stmt(i) {
            s @ (Stmt::Label(_) | Stmt::Skip) => s.clone(),
            _ if pa.is_reachable(i) => program.stmt(i).clone(),
            _ => {
                killed += 1;
                Stmt::Skip
            }
        })
        .collect();
    (program.with_stmts(stmts).expect("skip is always well formed"), killed)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum InstrumentMode {
    #[default]
    None,
    Loop,
    GuardFull,
    GuardLocal,
    AllFull,
    AllLocal,
}

impl InstrumentMode {
    pub const ALL: [InstrumentMode; 6] = [
        InstrumentMode::None,
        InstrumentMode::Loop,
        InstrumentMode::GuardFull,
        InstrumentMode::GuardLocal,
        InstrumentMode::AllFull,
        InstrumentMode::AllLocal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InstrumentMode::None => "none",
            InstrumentMode::Loop => "loop",
            InstrumentMode::GuardFull => "guard_full",
            InstrumentMode::GuardLocal => "guard_local",
            InstrumentMode::AllFull => "all_full",
            InstrumentMode::AllLocal => "all_local",
        }
    }
}

impl fmt::Display for InstrumentMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InstrumentMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        InstrumentMode::ALL
            .into_iter()
            .find(|m| m.name() == s.replace('-', "_"))
            .ok_or_else(|| format!("unknown instrumentation mode `{s}`"))
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum InstrumentError {
    #[error("loop with back edge from statement {latch} to {head} is not reducible")]
    Irreducible { head: usize, latch: usize },
    #[error(transparent)]
    Ir(#[from] IrError),
}

/// `assume lo <= v` / `assume v <= hi` for the finite, non-trivial bounds of
/// each variable at the entry of statement `idx`.
fn bound_assumes(program: &Program, pa: &DomainMap, idx: usize, vars: &[VarId]) -> Vec<Stmt> {
    let symbols = program.symbols();
    let Some(env) = pa.get(idx).filter(|e| !e.is_bottom()) else { return Vec::new() };
    let mut out = Vec::new();
    for &v in vars {
        let ty = symbols.ty(v);
        let (lo, hi) = env.get(v, symbols).linear_bounds();
        if let Some(lo) = lo.filter(|&lo| lo > ty.min() && lo <= ty.max()) {
            out.push(Stmt::Assume(Expr::Le(Term::Const(lo, ty), Term::Var(v))));
        }
        if let Some(hi) = hi.filter(|&hi| hi < ty.max() && hi >= ty.min()) {
            out.push(Stmt::Assume(Expr::Le(Term::Var(v), Term::Const(hi, ty))));
        }
    }
    out
}

/// Insert interval assumptions taken from `pa`. They hold on every
/// execution, so the instrumented program behaves exactly like the original.
pub fn instrument(program: &Program, pa: &DomainMap, mode: InstrumentMode) -> Result<Program, InstrumentError> {
    let n = program.len();
    let symbols = program.symbols();
    let all_vars: Vec<VarId> = symbols.ids().collect();
    // before[i]: statements to place immediately before statement i.
    let mut before: Vec<Vec<Stmt>> = vec![Vec::new(); n + 2];
    // Anchor at statement i: after it when it is a label, so that jumps to
    // the label also pass through the assumptions.
    let anchor = |i: usize, vars: &[VarId], before: &mut Vec<Vec<Stmt>>| {
        let slot = if matches!(program.stmt(i), Stmt::Label(_)) { i + 1 } else { i };
        let stmts = bound_assumes(program, pa, i, vars);
        before[slot].extend(stmts);
    };
    let local = |i: usize| -> Vec<VarId> {
        let mut vs: Vec<VarId> = program.stmt(i).vars();
        vs.sort();
        vs.dedup();
        vs
    };
    match mode {
        InstrumentMode::None => return Ok(program.clone()),
        InstrumentMode::Loop => {
            let dom = dominators(program);
            for lp in detect_loops(program) {
                if !dom[lp.latch].contains(&lp.head) {
                    return Err(InstrumentError::Irreducible { head: lp.head, latch: lp.latch });
                }
                let assigned: BTreeSet<VarId> = lp
                    .body
                    .iter()
                    .filter_map(|&i| match program.stmt(i) {
                        Stmt::Assign(v, _) => Some(*v),
                        _ => None,
                    })
                    .collect();
                let vars: Vec<VarId> = assigned.into_iter().collect();
                anchor(lp.head, &vars, &mut before);
                let exits: BTreeSet<usize> = lp.exits(program).into_iter().map(|(_, to)| to).collect();
                for to in exits {
                    anchor(to, &vars, &mut before);
                }
            }
        }
        InstrumentMode::GuardFull | InstrumentMode::GuardLocal => {
            for i in program.indices().filter(|&i| program.stmt(i).is_guard()) {
                let vars = if mode == InstrumentMode::GuardFull { all_vars.clone() } else { local(i) };
                anchor(i, &vars, &mut before);
            }
        }
        InstrumentMode::AllFull | InstrumentMode::AllLocal => {
            for i in program.indices() {
                let vars = if mode == InstrumentMode::AllFull { all_vars.clone() } else { local(i) };
                anchor(i, &vars, &mut before);
            }
        }
    }
    let mut stmts = Vec::new();
    for i in 1..=n + 1 {
        let mut block: Vec<Stmt> = Vec::new();
        for s in before[i].drain(..) {
            if !block.contains(&s) {
                block.push(s);
            }
        }
        stmts.extend(block);
        if i <= n {
            stmts.push(program.stmt(i).clone());
        }
    }
    Ok(program.with_stmts(stmts)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Proven,
    Refuted,
    Unknown,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Proven => "proven",
            Verdict::Refuted => "refuted",
            Verdict::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssertVerdict {
    pub stmt: usize,
    pub verdict: Verdict,
    /// Entry intervals of the variables the assertion mentions.
    pub witness: Vec<(VarId, Interval)>,
}

impl AssertVerdict {
    pub fn to_json(&self, symbols: &SymbolTable) -> Value {
        let mut w = Map::new();
        for (v, i) in &self.witness {
            w.insert(symbols.name(*v).to_string(), i.to_json());
        }
        json!({ "stmt": self.stmt, "verdict": self.verdict.name(), "witness": w })
    }
}

/// Classify every assertion. An assertion the analysis never reaches is
/// proven: no execution gets there, so none can violate it.
pub fn assertion_report(program: &Program, pa: &DomainMap, config: &DomainConfig) -> Vec<AssertVerdict> {
    let symbols = program.symbols();
    program
        .indices()
        .filter_map(|i| {
            let Stmt::Assert(e) = program.stmt(i) else { return None };
            let env = pa.state(i);
            let verdict = match eval_cond(e, &env, symbols, config) {
                BoolInterval::True | BoolInterval::Bottom => Verdict::Proven,
                BoolInterval::False => Verdict::Refuted,
                BoolInterval::Maybe => Verdict::Unknown,
            };
            let mut vars = e.vars();
            vars.sort();
            vars.dedup();
            let witness = if env.is_bottom() {
                Vec::new()
            } else {
                vars.into_iter().map(|v| (v, env.get(v, symbols))).collect()
            };
            Some(AssertVerdict { stmt: i, verdict, witness })
        })
        .collect()
}

pub fn report_json(report: &[AssertVerdict], symbols: &SymbolTable) -> Value {
    Value::Array(report.iter().map(|v| v.to_json(symbols)).collect())
}
