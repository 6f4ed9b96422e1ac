//! The batch pipeline behind `goto-interval run`: parse, analyze, rewrite,
//! report, and optionally cross-check every verdict by brute force.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde_json::{json, Map, Value};

use crate::absint::{compute_abs_with, Analysis, AnalyzerOptions, StorageMode, StorageStats, DEFAULT_ITERATION_CAP};
use crate::concrete::{explore, ExhaustiveOptions, DEFAULT_STEP_LIMIT};
use crate::domains::DomainConfig;
use crate::ir::{emit_program, emit_with, parse_program, Program, Stmt};
use crate::transform::{
    assertion_report, instrument, remove_dead_code, report_json, singleton_propagate, AssertVerdict, InstrumentMode,
    Verdict,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_PARSE: u8 = 1;
pub const EXIT_CAP: u8 = 2;
pub const EXIT_DISCREPANCY: u8 = 3;
pub const EXIT_REFUTED: u8 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Emit {
    Annotated,
    Optimized,
    ReportJson,
}

impl FromStr for Emit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "annotated" => Ok(Emit::Annotated),
            "optimized" => Ok(Emit::Optimized),
            "report-json" | "report_json" => Ok(Emit::ReportJson),
            _ => Err(format!("unknown emit target `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OracleMode {
    #[default]
    None,
    Exhaustive,
}

impl FromStr for OracleMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(OracleMode::None),
            "exhaustive" => Ok(OracleMode::Exhaustive),
            _ => Err(format!("unknown oracle `{s}`")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub input: PathBuf,
    pub domain: DomainConfig,
    pub storage: StorageMode,
    pub instrument: InstrumentMode,
    pub optimize: bool,
    pub emit: Vec<Emit>,
    pub oracle: OracleMode,
    pub width_cap: u8,
    pub step_limit: u64,
    pub iteration_cap: u64,
    /// Include wall-clock timings in the JSON report. Off by default so
    /// reports are byte-for-byte reproducible.
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: PathBuf::new(),
            domain: DomainConfig::default(),
            storage: StorageMode::default(),
            instrument: InstrumentMode::None,
            optimize: false,
            emit: vec![Emit::Annotated],
            oracle: OracleMode::None,
            width_cap: 8,
            step_limit: DEFAULT_STEP_LIMIT,
            iteration_cap: DEFAULT_ITERATION_CAP,
            timings: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    pub preprocess: Duration,
    pub analysis: Duration,
    pub pops: u64,
    pub tracked_intervals: usize,
    /// Allocation counters of the same analysis under each storage mode.
    pub memory: Vec<(StorageMode, StorageStats)>,
    pub folded: usize,
    pub killed: usize,
    pub proven: usize,
    pub refuted: usize,
    pub unknown: usize,
}

impl RunStats {
    pub fn to_json(&self, timings: bool) -> Value {
        let mut memory = Map::new();
        for (mode, s) in &self.memory {
            memory.insert(
                mode.name().to_string(),
                json!({ "interval_objects": s.interval_objects, "env_records": s.env_records, "stores": s.stores }),
            );
        }
        let mut v = json!({
            "pops": self.pops,
            "tracked_intervals": self.tracked_intervals,
            "memory": memory,
            "folded": self.folded,
            "killed": self.killed,
            "asserts": { "proven": self.proven, "refuted": self.refuted, "unknown": self.unknown },
        });
        if timings {
            v["timings_ms"] = json!({
                "preprocess": self.preprocess.as_secs_f64() * 1e3,
                "analysis": self.analysis.as_secs_f64() * 1e3,
            });
        }
        v
    }
}

/// Everything a run produced. `stdout` holds the requested artifacts;
/// `diagnostics` are meant for stderr.
#[derive(Clone, Debug, Default)]
pub struct RunOutput {
    pub exit_code: u8,
    pub stdout: String,
    pub diagnostics: Vec<String>,
    pub stats: RunStats,
    pub report: Vec<AssertVerdict>,
    pub discrepancies: Vec<String>,
}

impl RunOutput {
    fn fail(code: u8, msg: String) -> Self {
        RunOutput { exit_code: code, diagnostics: vec![msg], ..Default::default() }
    }
}

struct Displayed<'a>(&'a Program, &'a Analysis, usize);

impl fmt::Display for Displayed<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Displayed(program, analysis, idx) = *self;
        let symbols = program.symbols();
        let env = analysis.map.state(idx);
        if env.is_bottom() {
            return f.write_str("unreachable");
        }
        for (k, v) in symbols.ids().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{} : {}", symbols.name(v), env.get(v, symbols))?;
        }
        Ok(())
    }
}

/// The program with each statement's entry intervals as trailing comments,
/// followed by one line per assertion verdict.
pub fn annotate(program: &Program, analysis: &Analysis, report: &[AssertVerdict]) -> String {
    let mut out = emit_with(program, |i| Some(Displayed(program, analysis, i).to_string()));
    for v in report {
        out.push_str(&format!("# assert at statement {}: {}\n", v.stmt, v.verdict));
    }
    out
}

fn analyze(program: &Program, cfg: &RunConfig, storage: StorageMode) -> Result<Analysis, RunOutput> {
    let opts = AnalyzerOptions { storage, iteration_cap: Some(cfg.iteration_cap), ..Default::default() };
    compute_abs_with(program, &cfg.domain, &opts).map_err(|e| RunOutput::fail(EXIT_CAP, format!("analysis: {e}")))
}

/// Read `cfg.input` and run the pipeline on it.
pub fn run(cfg: &RunConfig) -> RunOutput {
    match std::fs::read_to_string(&cfg.input) {
        Ok(src) => run_source(&cfg.input.display().to_string(), &src, cfg),
        Err(e) => RunOutput::fail(EXIT_PARSE, format!("{}: {e}", cfg.input.display())),
    }
}

pub fn run_source(name: &str, src: &str, cfg: &RunConfig) -> RunOutput {
    match run_inner(name, src, cfg) {
        Ok(out) | Err(out) => out,
    }
}

fn run_inner(name: &str, src: &str, cfg: &RunConfig) -> Result<RunOutput, RunOutput> {
    let t0 = Instant::now();
    let program = parse_program(src).map_err(|e| RunOutput::fail(EXIT_PARSE, format!("{name}:{e}")))?;
    let preprocess = t0.elapsed();
    let t1 = Instant::now();
    let analysis = analyze(&program, cfg, cfg.storage)?;
    let analysis_time = t1.elapsed();
    let report = assertion_report(&program, &analysis.map, &cfg.domain);

    let mut memory = Vec::new();
    for mode in StorageMode::ALL {
        let stats = if mode == cfg.storage { analysis.stats.storage } else { analyze(&program, cfg, mode)?.stats.storage };
        memory.push((mode, stats));
    }

    let mut out = RunOutput::default();
    let mut transformed = program.clone();
    if cfg.optimize {
        let (p, folded) = singleton_propagate(&transformed, &analysis.map, &cfg.domain);
        let (p, killed) = remove_dead_code(&p, &analysis.map);
        transformed = p;
        out.stats.folded = folded;
        out.stats.killed = killed;
    }
    if cfg.instrument != InstrumentMode::None {
        let map = if cfg.optimize { analyze(&transformed, cfg, cfg.storage)?.map } else { analysis.map.clone() };
        transformed = instrument(&transformed, &map, cfg.instrument)
            .map_err(|e| RunOutput::fail(EXIT_PARSE, format!("{name}: instrumentation: {e}")))?;
    }

    for v in &report {
        match v.verdict {
            Verdict::Proven => out.stats.proven += 1,
            Verdict::Refuted => out.stats.refuted += 1,
            Verdict::Unknown => out.stats.unknown += 1,
        }
    }
    out.stats.preprocess = preprocess;
    out.stats.analysis = analysis_time;
    out.stats.pops = analysis.stats.pops;
    out.stats.tracked_intervals = analysis.map.tracked_intervals();
    out.stats.memory = memory;

    let symbols = program.symbols();
    let mut oracle_json = Value::Null;
    let mut found_failure = false;
    if cfg.oracle == OracleMode::Exhaustive {
        let opts = ExhaustiveOptions { width_cap: cfg.width_cap, step_limit: cfg.step_limit, ..Default::default() };
        match explore(&program, &opts) {
            Ok(exploration) => {
                for v in &report {
                    let fails = exploration.failures.contains_key(&v.stmt);
                    match v.verdict {
                        Verdict::Proven if fails => out.discrepancies.push(format!(
                            "assert at statement {} is proven but fails concretely",
                            v.stmt
                        )),
                        Verdict::Refuted if !fails => out.discrepancies.push(format!(
                            "assert at statement {} is refuted but never fails concretely",
                            v.stmt
                        )),
                        _ => {}
                    }
                }
                let outcome = exploration.outcome();
                if let Some(c) = exploration.first_failure() {
                    found_failure = true;
                    out.diagnostics.push(format!(
                        "counterexample: {}",
                        json!({ "verdict": "counterexample", "env": c.env.to_json(symbols), "failed_at": c.failed_at })
                    ));
                }
                let failing: Vec<usize> = exploration.failures.keys().copied().collect();
                oracle_json = json!({
                    "status": "checked",
                    "runs": exploration.runs as u64,
                    "outcome": outcome.to_json(&program),
                    "failing_asserts": failing,
                    "discrepancies": out.discrepancies,
                });
            }
            Err(e) => {
                out.diagnostics.push(format!("oracle skipped: {e}"));
                oracle_json = json!({ "status": "skipped", "reason": e.to_string() });
            }
        }
    }
    for d in &out.discrepancies {
        out.diagnostics.push(format!("discrepancy: {d}"));
    }

    for target in &cfg.emit {
        match target {
            Emit::Annotated => out.stdout.push_str(&annotate(&program, &analysis, &report)),
            Emit::Optimized => out.stdout.push_str(&emit_program(&transformed)),
            Emit::ReportJson => {
                let doc = json!({
                    "schema": 1,
                    "config": {
                        "domain": cfg.domain.to_json(),
                        "storage": cfg.storage.name(),
                        "instrument": cfg.instrument.name(),
                        "optimize": cfg.optimize,
                    },
                    "domain_map": analysis.map.to_json(symbols),
                    "asserts": report_json(&report, symbols),
                    "stats": out.stats.to_json(cfg.timings),
                    "oracle": oracle_json,
                });
                out.stdout.push_str(&serde_json::to_string_pretty(&doc).expect("JSON values serialize"));
                out.stdout.push('\n');
            }
        }
    }

    let refuted = report.iter().any(|v| v.verdict == Verdict::Refuted);
    out.exit_code = if !out.discrepancies.is_empty() {
        EXIT_DISCREPANCY
    } else if refuted || found_failure {
        EXIT_REFUTED
    } else {
        EXIT_OK
    };
    out.report = report;
    Ok(out)
}

/// Number of assertions in a program.
pub fn assert_count(program: &Program) -> usize {
    program.stmts().iter().filter(|s| matches!(s, Stmt::Assert(_))).count()
}
