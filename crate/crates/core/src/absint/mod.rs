//! Work-list fixed-point computation of per-statement entry states.

mod env;
mod storage;

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use serde_json::{json, Value};
use thiserror::Error;

use crate::domains::{eval_abs_expr, restrict, DomainConfig, DomainKind, Interval};
use crate::ir::{successors, Program, Stmt, SymbolTable};

pub use env::AbstractEnv;
pub use storage::{StorageMode, StorageStats};
use storage::Store;

/// Default limit on work-list pops.
pub const DEFAULT_ITERATION_CAP: u64 = 10_000_000;

/// Which way control leaves a statement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Edge {
    Fallthrough,
    Taken,
}

/// Exit state of `stmt` along `edge`, given its entry state.
pub fn transform_stmt(
    env: &AbstractEnv,
    stmt: &Stmt,
    edge: Edge,
    symbols: &SymbolTable,
    config: &DomainConfig,
) -> AbstractEnv {
    if env.is_bottom() {
        return env.clone();
    }
    match stmt {
        Stmt::Assign(v, e) => {
            let value = eval_abs_expr(e, env, symbols, config).to_interval(env.domain(), symbols.ty(*v));
            let mut out = env.clone();
            out.set(*v, value);
            out
        }
        Stmt::Assume(e) | Stmt::Assert(e) => restrict(e, env, true, symbols, config),
        Stmt::IfGoto(e, _) => restrict(e, env, edge == Edge::Taken, symbols, config),
        Stmt::Label(_) | Stmt::Skip => env.clone(),
    }
}

/// Entry state of every statement reached by the analysis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainMap {
    domain: DomainKind,
    /// Indexed by statement; slot 0 is unused.
    entries: Vec<Option<AbstractEnv>>,
}

impl DomainMap {
    pub fn domain(&self) -> DomainKind {
        self.domain
    }

    /// Number of statement slots, reached or not.
    pub fn len(&self) -> usize {
        self.entries.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, idx: usize) -> Option<&AbstractEnv> {
        self.entries.get(idx).and_then(|e| e.as_ref())
    }

    /// Entry state; Bottom for statements the analysis never reached.
    pub fn state(&self, idx: usize) -> AbstractEnv {
        self.get(idx).cloned().unwrap_or_else(|| AbstractEnv::bottom(self.domain))
    }

    pub fn is_reachable(&self, idx: usize) -> bool {
        self.get(idx).is_some_and(|e| !e.is_bottom())
    }

    /// Reached statements with their entry states, in program order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &AbstractEnv)> {
        self.entries.iter().enumerate().filter_map(|(i, e)| e.as_ref().map(|e| (i, e)))
    }

    /// Intervals that differ from the initial value, summed over statements.
    pub fn tracked_intervals(&self) -> usize {
        self.iter().map(|(_, e)| e.tracked_len()).sum()
    }

    pub fn to_json(&self, symbols: &SymbolTable) -> Value {
        Value::Array(
            self.iter()
                .map(|(i, e)| json!({ "stmt": i, "env": e.to_json(symbols), "bottom": e.is_bottom() }))
                .collect(),
        )
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Schedule {
    #[default]
    Fifo,
    Lifo,
}

#[derive(Clone, Debug)]
pub struct AnalyzerOptions {
    pub storage: StorageMode,
    pub schedule: Schedule,
    pub iteration_cap: Option<u64>,
    /// Give up once this much wall time has passed.
    pub time_budget: Option<Duration>,
}

impl Default for AnalyzerOptions {
    fn default() -> Self {
        AnalyzerOptions {
            storage: StorageMode::default(),
            schedule: Schedule::Fifo,
            iteration_cap: Some(DEFAULT_ITERATION_CAP),
            time_budget: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AnalysisStats {
    pub pops: u64,
    pub storage: StorageStats,
    /// Distinct state records alive at the end.
    pub live_records: usize,
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub map: DomainMap,
    pub stats: AnalysisStats,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("iteration cap of {cap} work-list pops exceeded")]
    IterationCap { cap: u64 },
    #[error("time budget of {budget:?} exceeded after {pops} work-list pops")]
    Timeout { budget: Duration, pops: u64 },
}

struct WorkList {
    queue: VecDeque<usize>,
    queued: Vec<bool>,
    schedule: Schedule,
}

impl WorkList {
    fn push(&mut self, idx: usize) {
        if !self.queued[idx] {
            self.queued[idx] = true;
            self.queue.push_back(idx);
        }
    }

    fn pop(&mut self) -> Option<usize> {
        let idx = match self.schedule {
            Schedule::Fifo => self.queue.pop_front(),
            Schedule::Lifo => self.queue.pop_back(),
        }?;
        self.queued[idx] = false;
        Some(idx)
    }
}

/// Run the analysis with default options and the given storage mode.
pub fn compute_abs(program: &Program, config: &DomainConfig, mode: StorageMode) -> Result<Analysis, AnalysisError> {
    compute_abs_with(program, config, &AnalyzerOptions { storage: mode, ..Default::default() })
}

pub fn compute_abs_with(
    program: &Program,
    config: &DomainConfig,
    opts: &AnalyzerOptions,
) -> Result<Analysis, AnalysisError> {
    let symbols = program.symbols();
    let n = program.len();
    let start = Instant::now();
    let mut store = Store::new(opts.storage, n + 1, symbols, config.domain);
    let mut work = WorkList { queue: VecDeque::new(), queued: vec![false; n + 1], schedule: opts.schedule };
    let mut pops = 0u64;
    if n > 0 {
        store.put(1, &AbstractEnv::init(config.domain));
        work.push(1);
    }
    while let Some(pc) = work.pop() {
        pops += 1;
        if opts.iteration_cap.is_some_and(|cap| pops > cap) {
            return Err(AnalysisError::IterationCap { cap: opts.iteration_cap.unwrap() });
        }
        if let Some(budget) = opts.time_budget {
            if pops % 1024 == 0 && start.elapsed() > budget {
                return Err(AnalysisError::Timeout { budget, pops });
            }
        }
        let state = store.get(pc).expect("queued statements have a state");
        let stmt = program.stmt(pc);
        let target = match stmt {
            Stmt::IfGoto(_, l) => program.label_index(l),
            _ => None,
        };
        for to in successors(program, pc) {
            let new = match (target == Some(to), to == pc + 1) {
                (true, true) => transform_stmt(&state, stmt, Edge::Taken, symbols, config).join(
                    &transform_stmt(&state, stmt, Edge::Fallthrough, symbols, config),
                    symbols,
                ),
                (true, false) => transform_stmt(&state, stmt, Edge::Taken, symbols, config),
                _ => transform_stmt(&state, stmt, Edge::Fallthrough, symbols, config),
            };
            if new.is_bottom() {
                continue;
            }
            let next = match store.get(to) {
                Some(old) if !old.is_bottom() => {
                    let merged = old.join(&new, symbols);
                    if merged == old {
                        continue;
                    }
                    if config.widening {
                        old.widen(&merged, symbols)
                    } else {
                        merged
                    }
                }
                _ => new,
            };
            store.put(to, &next);
            work.push(to);
        }
    }
    let entries = (0..=n).map(|i| if i == 0 { None } else { store.get(i) }).collect();
    Ok(Analysis {
        map: DomainMap { domain: config.domain, entries },
        stats: AnalysisStats { pops, storage: store.stats(), live_records: store.live_records() },
    })
}

/// Convenience lookup used in tests and examples: the entry interval of a
/// named variable at a statement.
pub fn entry_interval(map: &DomainMap, program: &Program, idx: usize, var: &str) -> Option<Interval> {
    let v = program.var(var)?;
    Some(map.state(idx).get(v, program.symbols()))
}
