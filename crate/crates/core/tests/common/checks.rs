//! Whole-system checks shared by the focused test files and the acceptance
//! run. Each returns a [`Tally`] listing every failure it found.

use std::collections::{HashMap, HashSet};
use std::time::Duration;

use goto_interval::absint::{compute_abs, compute_abs_with, AbstractEnv, AnalysisError, AnalyzerOptions, StorageMode};
use goto_interval::cli::{run_source, OracleMode, RunConfig, EXIT_DISCREPANCY};
use goto_interval::concrete::input_vars;
use goto_interval::domains::{eval_abs_expr, AbsValue, Bound, DomainConfig, DomainKind, Interval};
use goto_interval::ir::{emit_program, BinOp, Expr, MachType, Program, SymbolTable, Term, VarId};
use goto_interval::transform::{instrument, remove_dead_code, singleton_propagate, InstrumentMode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::*;

#[derive(Debug, Default)]
pub struct Tally {
    pub checked: u64,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl Tally {
    pub fn merge(mut self, other: Tally) -> Tally {
        self.checked += other.checked;
        self.failures.extend(other.failures);
        self.notes.extend(other.notes);
        self
    }

    /// Notes with repeats removed, in first-seen order.
    pub fn distinct_notes(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.notes.iter().map(String::as_str).filter(|n| seen.insert(*n)).collect()
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        let mut s = format!("{} checks, {} failures", self.checked, self.failures.len());
        for f in self.failures.iter().take(5) {
            s.push_str(&format!("\n    {f}"));
        }
        s
    }
}

/// Membership decided from the interval's bounds alone.
pub fn holds(iv: &Interval, v: i128) -> bool {
    let ty = iv.ty();
    match iv {
        Interval::Int(i) => i.bounds().is_some_and(|(lo, hi)| lo <= Bound::Fin(v) && Bound::Fin(v) <= hi),
        Interval::Wrap(w) => w.patterns().is_some_and(|(s, e)| {
            let mask = (1u64 << ty.width()) - 1;
            let p = (v as u64) & mask;
            (p.wrapping_sub(s) & mask) <= (e.wrapping_sub(s) & mask)
        }),
    }
}

fn abs_holds(r: &AbsValue, v: i128) -> bool {
    match r {
        AbsValue::Num(iv) => holds(iv, v),
        AbsValue::Bool(b) => if v != 0 { b.can_be_true() } else { b.can_be_false() },
    }
}

pub const BIN_OPS: [BinOp; 9] =
    [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Shl, BinOp::Shr, BinOp::And, BinOp::Or, BinOp::Xor];

/// Every two-operand expression shape over `a : ta` and `b : tb`.
fn binary_shapes(ta: MachType, tb: MachType) -> Vec<Expr> {
    let (a, b) = (Term::Var(VarId(0)), Term::Var(VarId(1)));
    let mut out = vec![Expr::LogicAnd(a, b)];
    for op in BIN_OPS {
        if op.is_shift() || ta == tb {
            out.push(Expr::Binary(op, a, b));
        }
    }
    if ta == tb {
        out.push(Expr::Le(a, b));
    }
    out
}

fn sweep_pair(domain: DomainKind, ta: MachType, tb: MachType, tally: &mut Tally) {
    let mut symbols = SymbolTable::new();
    symbols.declare("a", ta).unwrap();
    symbols.declare("b", tb).unwrap();
    let config = DomainConfig::precise(domain);
    let avs: Vec<(Interval, Vec<i128>)> = all_intervals(domain, ta).into_iter().map(|i| (i, members(&i))).collect();
    let bvs: Vec<(Interval, Vec<i128>)> = all_intervals(domain, tb).into_iter().map(|i| (i, members(&i))).collect();
    for e in binary_shapes(ta, tb) {
        // Concrete results for every operand pair, faults as None.
        let table: HashMap<(i128, i128), Option<i128>> = type_values(ta)
            .into_iter()
            .flat_map(|x| type_values(tb).into_iter().map(move |y| (x, y)))
            .map(|(x, y)| ((x, y), ref_expr(&e, &[x, y], &symbols)))
            .collect();
        for (ia, ma) in &avs {
            for (ib, mb) in &bvs {
                let mut env = AbstractEnv::init(domain);
                env.set(VarId(0), *ia);
                env.set(VarId(1), *ib);
                let r = eval_abs_expr(&e, &env, &symbols, &config);
                for &x in ma {
                    for &y in mb {
                        tally.checked += 1;
                        if let Some(v) = table[&(x, y)] {
                            if !abs_holds(&r, v) {
                                tally.failures.push(format!(
                                    "{domain} {e:?} with a={ia} b={ib}: {x},{y} -> {v} escapes {r:?}"
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
}

fn sweep_unary(domain: DomainKind, from: MachType, targets: &[MachType], tally: &mut Tally) {
    let mut symbols = SymbolTable::new();
    symbols.declare("a", from).unwrap();
    let config = DomainConfig::precise(domain);
    let a = Term::Var(VarId(0));
    let mut shapes = vec![Expr::Term(a), Expr::Not(a), Expr::BitNot(a)];
    shapes.extend(targets.iter().map(|&t| Expr::Cast(t, a)));
    for iv in all_intervals(domain, from) {
        let ms = members(&iv);
        let mut env = AbstractEnv::init(domain);
        env.set(VarId(0), iv);
        for e in &shapes {
            let r = eval_abs_expr(e, &env, &symbols, &config);
            for &x in &ms {
                tally.checked += 1;
                let v = ref_expr(e, &[x], &symbols).expect("unary operators do not fault");
                if !abs_holds(&r, v) {
                    tally.failures.push(format!("{domain} {e:?} with a={iv}: {x} -> {v} escapes {r:?}"));
                }
            }
        }
    }
}

/// Every operator on every pair of abstract values at width 4 (shift amounts
/// of either signedness), plus unary operators and casts between all types
/// of width at most 4.
pub fn operator_sweep(domain: DomainKind) -> Tally {
    let w4 = [MachType::signed(4), MachType::unsigned(4)];
    let small = types_up_to(4);
    let mut jobs: Vec<(MachType, MachType)> = vec![];
    for &ta in &w4 {
        for &tb in &w4 {
            jobs.push((ta, tb));
        }
    }
    let binary = jobs
        .into_par_iter()
        .map(|(ta, tb)| {
            let mut t = Tally::default();
            sweep_pair(domain, ta, tb, &mut t);
            t
        })
        .reduce(Tally::default, Tally::merge);
    let unary = small
        .par_iter()
        .map(|&from| {
            let mut t = Tally::default();
            sweep_unary(domain, from, &small, &mut t);
            t
        })
        .reduce(Tally::default, Tally::merge);
    binary.merge(unary)
}

/// Replay random programs concretely and require every visited state to lie
/// inside the analysis result for that statement, under all 16 configs.
pub fn analyzer_fuzz(programs: u64, envs_per_program: usize, seed: u64) -> Tally {
    let configs = DomainConfig::all();
    (0..programs)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k));
            let p = random_program(&mut rng, GenOptions::default());
            let mut states: HashSet<(usize, Vec<i128>)> = HashSet::new();
            for _ in 0..envs_per_program {
                let init = random_values(&mut rng, p.symbols());
                ref_run(&p, init, 2_000, |pc, vals| {
                    states.insert((pc, vals.to_vec()));
                });
            }
            let mut t = Tally::default();
            for cfg in &configs {
                let a = match compute_abs(&p, cfg, StorageMode::default()) {
                    Ok(a) => a,
                    Err(e) => {
                        t.failures.push(format!("program #{k} {cfg:?}: {e}"));
                        continue;
                    }
                };
                for (pc, vals) in &states {
                    t.checked += 1;
                    let env = a.map.state(*pc);
                    let bad = env.is_bottom()
                        || p.symbols().ids().any(|v| !holds(&env.get(v, p.symbols()), vals[v.index()]));
                    if bad {
                        t.failures.push(format!(
                            "program #{k} {cfg:?}: state {vals:?} at {pc} escapes\n{}",
                            emit_program(&p)
                        ));
                        break;
                    }
                }
            }
            t
        })
        .reduce(Tally::default, Tally::merge)
}

/// Run the CLI pipeline with the exhaustive oracle on every corpus program
/// under every config; a discrepancy exit is a failure.
pub fn verdict_gate() -> Tally {
    let mut t = Tally::default();
    let dir = corpus_dir();
    let mut skipped = HashSet::new();
    for (name, _) in corpus() {
        let src = std::fs::read_to_string(dir.join(format!("{name}.goto"))).unwrap();
        for domain in DomainConfig::all() {
            let cfg = RunConfig { domain, oracle: OracleMode::Exhaustive, emit: vec![], ..Default::default() };
            let out = run_source(&name, &src, &cfg);
            t.checked += out.report.len() as u64;
            if out.exit_code == EXIT_DISCREPANCY {
                t.failures.push(format!("{name} {domain:?}: {:?}", out.discrepancies));
            } else if out.exit_code > 4 || out.exit_code == 1 || out.exit_code == 2 {
                t.failures.push(format!("{name} {domain:?}: exit {} {:?}", out.exit_code, out.diagnostics));
            }
            if out.diagnostics.iter().any(|d| d.starts_with("oracle skipped")) {
                skipped.insert(name.clone());
            }
        }
    }
    if !skipped.is_empty() {
        let mut s: Vec<_> = skipped.into_iter().collect();
        s.sort();
        t.notes.push(format!("not enumerable: {}", s.join(", ")));
    }
    t
}

/// The three storage layouts must give identical results, and the shared
/// ones must not allocate more intervals than full copies.
pub fn storage_equivalence() -> Tally {
    let mut t = Tally::default();
    for (name, p) in corpus() {
        for cfg in DomainConfig::all() {
            let runs: Vec<_> = StorageMode::ALL
                .iter()
                .map(|&m| (m, compute_abs(&p, &cfg, m).expect("corpus analyses finish")))
                .collect();
            let (_, full) = runs.iter().find(|(m, _)| *m == StorageMode::FullCopy).unwrap();
            for (m, a) in &runs {
                t.checked += 1;
                if a.map != full.map {
                    t.failures.push(format!("{name} {cfg:?}: {} differs from full_copy", m.name()));
                }
                if a.stats.storage.interval_objects > full.stats.storage.interval_objects {
                    t.failures.push(format!(
                        "{name} {cfg:?}: {} allocates {} intervals, full_copy {}",
                        m.name(),
                        a.stats.storage.interval_objects,
                        full.stats.storage.interval_objects
                    ));
                }
            }
        }
    }
    t
}

/// With widening on, every corpus analysis finishes within
/// `10 · |stmts| · |vars| · max width` pops.
pub fn widening_terminates() -> Tally {
    let mut t = Tally::default();
    for (name, p) in corpus() {
        let bound = 10 * p.len() as u64 * p.symbols().len() as u64 * p.symbols().max_width() as u64;
        for cfg in DomainConfig::all().into_iter().filter(|c| c.widening) {
            t.checked += 1;
            match compute_abs(&p, &cfg, StorageMode::default()) {
                Ok(a) if a.stats.pops <= bound => {}
                Ok(a) => t.failures.push(format!("{name} {cfg:?}: {} pops, bound {bound}", a.stats.pops)),
                Err(e) => t.failures.push(format!("{name} {cfg:?}: {e}")),
            }
        }
    }
    t
}

pub fn counting_loop(bound: u64) -> Program {
    parse_program(&format!(
        "decl x : s32\nx := 0\nL1:\nif {bound} <= x goto L2\nx := x + 1\ngoto L1\nL2:\nassert {bound} <= x\n"
    ))
    .unwrap()
}

/// Outcome of analyzing the counting loop without widening under a wall-time
/// budget: `Err` with the pop count if the budget ran out.
pub fn unwidened_loop(bound: u64, budget: Duration) -> Result<u64, u64> {
    let cfg = DomainConfig { arithmetic: true, ..DomainConfig::new(DomainKind::Integer) };
    let opts = AnalyzerOptions { time_budget: Some(budget), iteration_cap: None, ..Default::default() };
    match compute_abs_with(&counting_loop(bound), &cfg, &opts) {
        Ok(a) => Ok(a.stats.pops),
        Err(AnalysisError::Timeout { pops, .. }) => Err(pops),
        Err(e) => panic!("unexpected {e}"),
    }
}

/// Initial environments for comparing `original` with its variants: every
/// combination of the inputs when there are at most 2^16, otherwise a fixed
/// random sample. Variables no program reads before writing are pinned.
fn comparison_envs(original: &Program, variants: &[&Program]) -> (Vec<Vec<i128>>, bool) {
    let symbols = original.symbols();
    let mut inputs = input_vars(original);
    for v in variants {
        inputs.extend(input_vars(v));
    }
    let pinned: Vec<i128> = symbols
        .ids()
        .map(|v| {
            let ty = symbols.ty(v);
            if ty.contains(0) { 0 } else { type_values(ty)[0] }
        })
        .collect();
    let total = inputs.iter().try_fold(1u128, |acc, &v| acc.checked_mul(symbols.ty(v).modulus()));
    if total.is_some_and(|n| n <= 1 << 16) {
        let mut envs = vec![pinned];
        for &v in &inputs {
            envs = envs
                .into_iter()
                .flat_map(|e| {
                    type_values(symbols.ty(v)).into_iter().map(move |x| {
                        let mut e = e.clone();
                        e[v.index()] = x;
                        e
                    })
                })
                .collect();
        }
        return (envs, true);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5a3f);
    let envs = (0..4096)
        .map(|_| {
            let mut e = pinned.clone();
            let random = random_values(&mut rng, symbols);
            for &v in &inputs {
                e[v.index()] = random[v.index()];
            }
            e
        })
        .collect();
    (envs, false)
}

fn verdict_classes(p: &Program, envs: &[Vec<i128>]) -> Vec<&'static str> {
    envs.iter().map(|e| ref_run(p, e.clone(), 20_000, |_, _| {}).class()).collect()
}

/// Every optimization/instrumentation combination, under every config,
/// leaves the outcome class of every enumerable run unchanged.
pub fn preserves_semantics(programs: &[(String, Program)]) -> Tally {
    programs
        .par_iter()
        .map(|(name, p)| {
            let mut t = Tally::default();
            let mut variants: Vec<(String, Program)> = vec![];
            let mut irreducible = false;
            for cfg in DomainConfig::all() {
                let Ok(a) = compute_abs(p, &cfg, StorageMode::default()) else {
                    t.failures.push(format!("{name} {cfg:?}: analysis failed"));
                    continue;
                };
                for optimize in [false, true] {
                    let (q, map) = if optimize {
                        let (q, _) = singleton_propagate(p, &a.map, &cfg);
                        let (q, _) = remove_dead_code(&q, &a.map);
                        let m = compute_abs(&q, &cfg, StorageMode::default()).expect("re-analysis finishes").map;
                        (q, m)
                    } else {
                        (p.clone(), a.map.clone())
                    };
                    for mode in InstrumentMode::ALL {
                        match instrument(&q, &map, mode) {
                            Ok(r) => variants.push((format!("{cfg:?} optimize={optimize} {}", mode.name()), r)),
                            Err(_) => irreducible = true,
                        }
                    }
                }
            }
            if irreducible {
                t.notes.push(format!("{name}: irreducible, not instrumented"));
            }
            let refs: Vec<&Program> = variants.iter().map(|(_, v)| v).collect();
            let (envs, exhaustive) = comparison_envs(p, &refs);
            if !exhaustive {
                t.notes.push(format!("{name}: sampled"));
            }
            let base = verdict_classes(p, &envs);
            let mut seen: HashMap<String, bool> = HashMap::new();
            for (label, v) in &variants {
                let text = emit_program(v);
                t.checked += envs.len() as u64;
                let same = *seen.entry(text).or_insert_with(|| verdict_classes(v, &envs) == base);
                if !same {
                    t.failures.push(format!("{name} [{label}] changes outcomes:\n{}", emit_program(v)));
                }
            }
            t
        })
        .reduce(Tally::default, Tally::merge)
}

/// Corpus programs plus generated ones, all with inputs of width at most 4.
pub fn preservation_programs(generated: u64, seed: u64) -> Vec<(String, Program)> {
    let mut out: Vec<(String, Program)> = corpus();
    let opts = GenOptions { max_stmts: 30, max_vars: 3, max_width: 4 };
    for k in 0..generated {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k));
        out.push((format!("generated #{k}"), random_program(&mut rng, opts)));
    }
    out
}
