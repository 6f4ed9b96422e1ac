//! Brute-force verification by running the program from every initial
//! environment.
//!
//! Variables that are written on every path before they are first read
//! cannot influence a run, so they are pinned at their type minimum instead
//! of being enumerated. Environments are ranked with the variables in name
//! order, the first name most significant and values ascending from the type
//! minimum; the reported counterexample is the lowest-ranked failing one,
//! which is exactly the one a full enumeration would hit first.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use super::{eval, ConcreteEnv, RunVerdict, DEFAULT_STEP_LIMIT};
use crate::ir::{predecessors, reachable, Program, Stmt, VarId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExhaustiveOptions {
    /// Refuse programs declaring any variable wider than this.
    pub width_cap: u8,
    pub step_limit: u64,
    /// Refuse when more than this many environments would have to be run.
    pub budget: u128,
}

impl Default for ExhaustiveOptions {
    fn default() -> Self {
        ExhaustiveOptions { width_cap: 8, step_limit: DEFAULT_STEP_LIMIT, budget: 1 << 24 }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ExhaustiveError {
    #[error("variable `{var}` has width {width}, above the cap of {cap}")]
    WidthExceedsCap { var: String, width: u8, cap: u8 },
    #[error("{required} environments to enumerate, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    /// Initial environment of the failing run.
    pub env: ConcreteEnv,
    /// Index of the assertion that failed.
    pub failed_at: usize,
    /// Position of `env` in the enumeration order.
    pub rank: u128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExhaustiveOutcome {
    AllSafe,
    Counterexample(Counterexample),
    /// No assertion failed, but some run hit the step limit or a runtime
    /// error, so safety is not established.
    Inconclusive { step_limit_runs: u64, runtime_error_runs: u64 },
}

impl ExhaustiveOutcome {
    pub fn to_json(&self, program: &Program) -> Value {
        match self {
            ExhaustiveOutcome::AllSafe => json!({ "verdict": "all-safe" }),
            ExhaustiveOutcome::Counterexample(c) => json!({
                "verdict": "counterexample",
                "env": c.env.to_json(program.symbols()),
                "failed_at": c.failed_at,
            }),
            ExhaustiveOutcome::Inconclusive { step_limit_runs, runtime_error_runs } => json!({
                "verdict": "inconclusive",
                "step_limit_runs": step_limit_runs,
                "runtime_error_runs": runtime_error_runs,
            }),
        }
    }
}

/// Per-assertion results of a full enumeration.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Exploration {
    pub runs: u128,
    pub safe_runs: u64,
    pub step_limit_runs: u64,
    pub runtime_error_runs: u64,
    /// Lowest-ranked failing environment for each assertion that can fail.
    pub failures: BTreeMap<usize, Counterexample>,
}

impl Exploration {
    fn merge(mut self, other: Exploration) -> Exploration {
        self.runs += other.runs;
        self.safe_runs += other.safe_runs;
        self.step_limit_runs += other.step_limit_runs;
        self.runtime_error_runs += other.runtime_error_runs;
        for (idx, c) in other.failures {
            self.record(idx, c);
        }
        self
    }

    fn record(&mut self, idx: usize, c: Counterexample) {
        match self.failures.get(&idx) {
            Some(old) if old.rank <= c.rank => {}
            _ => {
                self.failures.insert(idx, c);
            }
        }
    }

    /// The lowest-ranked failure over all assertions.
    pub fn first_failure(&self) -> Option<&Counterexample> {
        self.failures.values().min_by_key(|c| c.rank)
    }

    pub fn outcome(&self) -> ExhaustiveOutcome {
        if let Some(c) = self.first_failure() {
            ExhaustiveOutcome::Counterexample(c.clone())
        } else if self.step_limit_runs + self.runtime_error_runs > 0 {
            ExhaustiveOutcome::Inconclusive {
                step_limit_runs: self.step_limit_runs,
                runtime_error_runs: self.runtime_error_runs,
            }
        } else {
            ExhaustiveOutcome::AllSafe
        }
    }
}

/// Variables whose initial value may be read: those read somewhere on a path
/// from the entry along which they have not yet been assigned.
pub fn input_vars(program: &Program) -> BTreeSet<VarId> {
    let n = program.len();
    let all: BTreeSet<VarId> = program.symbols().ids().collect();
    let live = reachable(program);
    let preds = predecessors(program);
    // Must-be-assigned sets at statement entry; start from "everything" and
    // shrink to the greatest fixpoint.
    let mut def_in = vec![all; n + 1];
    if n > 0 {
        def_in[1].clear();
    }
    let def_out = |i: usize, d: &BTreeSet<VarId>| {
        let mut out = d.clone();
        if let Stmt::Assign(v, _) = program.stmt(i) {
            out.insert(*v);
        }
        out
    };
    let mut changed = true;
    while changed {
        changed = false;
        for i in 2..=n {
            if !live[i] {
                continue;
            }
            let mut acc: Option<BTreeSet<VarId>> = None;
            for &p in preds[i].iter().filter(|&&p| live[p]) {
                let out = def_out(p, &def_in[p]);
                acc = Some(match acc {
                    None => out,
                    Some(a) => a.intersection(&out).copied().collect(),
                });
            }
            let new = acc.unwrap_or_default();
            if new != def_in[i] {
                def_in[i] = new;
                changed = true;
            }
        }
    }
    let mut inputs = BTreeSet::new();
    for i in program.indices().filter(|&i| live[i]) {
        let read = match program.stmt(i) {
            Stmt::Assign(_, e) => e.vars(),
            s => s.guard().map(|e| e.vars()).unwrap_or_default(),
        };
        inputs.extend(read.into_iter().filter(|v| !def_in[i].contains(v)));
    }
    inputs
}

struct Enumeration {
    base: ConcreteEnv,
    /// Enumerated variables, most significant first.
    digits: Vec<VarId>,
    total: u128,
}

impl Enumeration {
    fn new(program: &Program, opts: &ExhaustiveOptions) -> Result<Self, ExhaustiveError> {
        let symbols = program.symbols();
        let inputs = input_vars(program);
        // Variables written before any read are pinned, so only inputs count
        // against the width cap.
        for &v in &inputs {
            let width = symbols.ty(v).width();
            if width > opts.width_cap {
                return Err(ExhaustiveError::WidthExceedsCap {
                    var: symbols.name(v).to_string(),
                    width,
                    cap: opts.width_cap,
                });
            }
        }
        let digits: Vec<VarId> = symbols.ids_by_name().into_iter().filter(|v| inputs.contains(v)).collect();
        let total = digits
            .iter()
            .try_fold(1u128, |acc, &v| acc.checked_mul(symbols.ty(v).modulus()))
            .unwrap_or(u128::MAX);
        if total > opts.budget {
            return Err(ExhaustiveError::BudgetExceeded { required: total, budget: opts.budget });
        }
        let values = symbols.decls().iter().map(|d| d.ty.min()).collect();
        let base = ConcreteEnv::from_values(symbols, values).expect("minimums are in range");
        Ok(Enumeration { base, digits, total })
    }

    fn env_at(&self, program: &Program, mut rank: u128) -> ConcreteEnv {
        let symbols = program.symbols();
        let mut env = self.base.clone();
        for &v in self.digits.iter().rev() {
            let ty = symbols.ty(v);
            let m = ty.modulus();
            env.set(symbols, v, ty.min() + (rank % m) as i128);
            rank /= m;
        }
        env
    }
}

/// Run every relevant initial environment and collect per-assertion
/// failures.
pub fn explore(program: &Program, opts: &ExhaustiveOptions) -> Result<Exploration, ExhaustiveError> {
    let en = Enumeration::new(program, opts)?;
    let total = u64::try_from(en.total).expect("budget fits in u64");
    let result = (0..total)
        .into_par_iter()
        .fold(Exploration::default, |mut acc, rank| {
            let env = en.env_at(program, rank as u128);
            acc.runs += 1;
            match eval(env.clone(), program, opts.step_limit) {
                RunVerdict::Safe => acc.safe_runs += 1,
                RunVerdict::StepLimit => acc.step_limit_runs += 1,
                RunVerdict::RuntimeError { .. } => acc.runtime_error_runs += 1,
                RunVerdict::AssertFail { idx, .. } => {
                    acc.record(idx, Counterexample { env, failed_at: idx, rank: rank as u128 })
                }
            }
            acc
        })
        .reduce(Exploration::default, Exploration::merge);
    Ok(result)
}

/// Decide safety by enumeration.
pub fn exhaustive_check(program: &Program, opts: &ExhaustiveOptions) -> Result<ExhaustiveOutcome, ExhaustiveError> {
    explore(program, opts).map(|e| e.outcome())
}
