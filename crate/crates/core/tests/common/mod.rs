//! Shared helpers for the integration tests: an arbitrary-precision
//! reference interpreter, enumerators for abstract values, a random program
//! generator and the corpus loader.
#![allow(dead_code)]

pub mod checks;

use std::path::PathBuf;

use goto_interval::domains::{Bound, DomainKind, IntInterval, Interval, WrapInterval};
use goto_interval::ir::{parse_program, BinOp, Expr, MachType, Program, Stmt, SymbolTable, Term, VarId};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

// ---------------------------------------------------------------------------
// Reference semantics on unbounded integers.

fn pow2(k: u32) -> BigInt {
    BigInt::from(1) << k
}

fn to_i128(v: &BigInt) -> i128 {
    i128::try_from(v).expect("reduced values fit in i128")
}

/// Reduce an exact integer into the range of `ty` (two's complement).
pub fn reduce(v: &BigInt, ty: MachType) -> i128 {
    let m = pow2(ty.width() as u32);
    let mut r = ((v % &m) + &m) % &m;
    if ty.is_signed() && r >= pow2(ty.width() as u32 - 1) {
        r -= &m;
    }
    to_i128(&r)
}

fn pattern(v: i128, ty: MachType) -> BigInt {
    let m = pow2(ty.width() as u32);
    ((BigInt::from(v) % &m) + &m) % &m
}

/// `x op y` where `x : tx` and `y : ty_b`, or `None` on a run-time fault.
pub fn ref_binary(op: BinOp, x: i128, tx: MachType, y: i128) -> Option<i128> {
    let (bx, by) = (BigInt::from(x), BigInt::from(y));
    let exact = match op {
        BinOp::Add => bx + by,
        BinOp::Sub => bx - by,
        BinOp::Mul => bx * by,
        BinOp::Div => {
            if y == 0 {
                return None;
            }
            // BigInt division truncates toward zero, like C.
            bx / by
        }
        BinOp::Shl | BinOp::Shr => {
            if y < 0 || y >= tx.width() as i128 {
                return None;
            }
            let d = pow2(y as u32);
            if op == BinOp::Shl {
                bx * d
            } else {
                // Floor division is an arithmetic shift.
                let q = &bx / &d;
                if &q * &d != bx && x < 0 {
                    q - 1
                } else {
                    q
                }
            }
        }
        BinOp::And => pattern(x, tx) & pattern(y, tx),
        BinOp::Or => pattern(x, tx) | pattern(y, tx),
        BinOp::Xor => pattern(x, tx) ^ pattern(y, tx),
    };
    Some(reduce(&exact, tx))
}

fn ref_term(t: &Term, values: &[i128]) -> i128 {
    match *t {
        Term::Var(v) => values[v.index()],
        Term::Const(c, _) => c,
    }
}

/// Value of `e`, with Boolean results as 0/1; `None` on a fault.
pub fn ref_expr(e: &Expr, values: &[i128], symbols: &SymbolTable) -> Option<i128> {
    Some(match e {
        Expr::Term(t) => ref_term(t, values),
        Expr::Binary(op, a, b) => ref_binary(*op, ref_term(a, values), a.ty(symbols), ref_term(b, values))?,
        Expr::Le(a, b) => (ref_term(a, values) <= ref_term(b, values)) as i128,
        Expr::LogicAnd(a, b) => (ref_term(a, values) != 0 && ref_term(b, values) != 0) as i128,
        Expr::Not(t) => (ref_term(t, values) == 0) as i128,
        Expr::BitNot(t) => reduce(&(-BigInt::from(ref_term(t, values)) - 1), t.ty(symbols)),
        Expr::Cast(ty, t) => reduce(&BigInt::from(ref_term(t, values)), *ty),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RefVerdict {
    Safe,
    AssertFail(usize),
    StepLimit,
    Fault(usize),
}

impl RefVerdict {
    /// Coarse outcome used when comparing programs whose statement
    /// numbering differs.
    pub fn class(&self) -> &'static str {
        match self {
            RefVerdict::Safe => "safe",
            RefVerdict::AssertFail(_) => "assert-fail",
            RefVerdict::StepLimit => "step-limit",
            RefVerdict::Fault(_) => "fault",
        }
    }
}

/// Straightforward interpreter over [`ref_expr`]. `observe` sees every
/// statement index and the variable values on entry.
pub fn ref_run(
    program: &Program,
    mut values: Vec<i128>,
    step_limit: u64,
    mut observe: impl FnMut(usize, &[i128]),
) -> RefVerdict {
    let symbols = program.symbols();
    let stmts = program.stmts();
    let mut pc = 1usize;
    let mut steps = 0;
    while pc <= stmts.len() {
        if steps == step_limit {
            return RefVerdict::StepLimit;
        }
        steps += 1;
        observe(pc, &values);
        let mut next = pc + 1;
        match &stmts[pc - 1] {
            Stmt::Assign(v, e) => {
                let Some(r) = ref_expr(e, &values, symbols) else { return RefVerdict::Fault(pc) };
                values[v.index()] = reduce(&BigInt::from(r), symbols.ty(*v));
            }
            Stmt::Assume(e) => match ref_expr(e, &values, symbols) {
                None => return RefVerdict::Fault(pc),
                Some(0) => return RefVerdict::Safe,
                Some(_) => {}
            },
            Stmt::Assert(e) => match ref_expr(e, &values, symbols) {
                None => return RefVerdict::Fault(pc),
                Some(0) => return RefVerdict::AssertFail(pc),
                Some(_) => {}
            },
            Stmt::IfGoto(e, label) => match ref_expr(e, &values, symbols) {
                None => return RefVerdict::Fault(pc),
                Some(0) => {}
                Some(_) => {
                    next = stmts
                        .iter()
                        .position(|s| matches!(s, Stmt::Label(l) if l == label))
                        .expect("labels resolve")
                        + 1
                }
            },
            Stmt::Label(_) | Stmt::Skip => {}
        }
        pc = next;
    }
    RefVerdict::Safe
}

// ---------------------------------------------------------------------------
// Abstract values and their concretizations.

pub fn type_values(ty: MachType) -> Vec<i128> {
    let (lo, hi) = if ty.is_signed() {
        (-(1i128 << (ty.width() - 1)), (1i128 << (ty.width() - 1)) - 1)
    } else {
        (0, (1i128 << ty.width()) - 1)
    };
    (lo..=hi).collect()
}

/// Every integer interval over `ty`, including infinite bounds and Bottom.
pub fn all_int_intervals(ty: MachType) -> Vec<Interval> {
    let vals = type_values(ty);
    let los: Vec<Bound> = std::iter::once(Bound::NegInf).chain(vals.iter().map(|&v| Bound::Fin(v))).collect();
    let his: Vec<Bound> = vals.iter().map(|&v| Bound::Fin(v)).chain(std::iter::once(Bound::PosInf)).collect();
    let mut out = vec![Interval::Int(IntInterval::bottom(ty))];
    for &lo in &los {
        for &hi in &his {
            if lo <= hi {
                out.push(Interval::Int(IntInterval::new(ty, lo, hi)));
            }
        }
    }
    out
}

/// Every arc over `ty` plus Bottom.
pub fn all_wrap_intervals(ty: MachType) -> Vec<Interval> {
    let n = 1u64 << ty.width();
    let mut out = vec![Interval::Wrap(WrapInterval::bottom(ty))];
    for s in 0..n {
        for e in 0..n {
            let iv = Interval::Wrap(WrapInterval::arc(ty, s, e));
            if !out.contains(&iv) {
                out.push(iv);
            }
        }
    }
    out
}

pub fn all_intervals(domain: DomainKind, ty: MachType) -> Vec<Interval> {
    match domain {
        DomainKind::Integer => all_int_intervals(ty),
        DomainKind::Wrapped => all_wrap_intervals(ty),
    }
}

fn from_pattern(p: u64, ty: MachType) -> i128 {
    let w = ty.width() as u32;
    if ty.is_signed() && p >= 1 << (w - 1) {
        p as i128 - (1i128 << w)
    } else {
        p as i128
    }
}

/// The concrete values an interval stands for, computed from its bounds.
pub fn members(iv: &Interval) -> Vec<i128> {
    let ty = iv.ty();
    match iv {
        Interval::Int(i) => {
            let Some((lo, hi)) = i.bounds() else { return vec![] };
            type_values(ty)
                .into_iter()
                .filter(|&v| lo <= Bound::Fin(v) && Bound::Fin(v) <= hi)
                .collect()
        }
        Interval::Wrap(w) => {
            let Some((s, e)) = w.patterns() else { return vec![] };
            let mask = (1u64 << ty.width()) - 1;
            let mut out = vec![];
            let mut p = s;
            loop {
                out.push(from_pattern(p, ty));
                if p == e {
                    break;
                }
                p = (p + 1) & mask;
            }
            out
        }
    }
}

pub fn types_up_to(width: u8) -> Vec<MachType> {
    (1..=width).flat_map(|w| [MachType::signed(w), MachType::unsigned(w)]).collect()
}

// ---------------------------------------------------------------------------
// Random programs.

#[derive(Clone, Copy, Debug)]
pub struct GenOptions {
    pub max_stmts: usize,
    pub max_vars: usize,
    pub max_width: u8,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions { max_stmts: 30, max_vars: 4, max_width: 8 }
    }
}

struct Gen<'a, R> {
    rng: &'a mut R,
    symbols: &'a SymbolTable,
    opts: GenOptions,
}

impl<R: Rng> Gen<'_, R> {
    fn random_type(&mut self) -> MachType {
        let ids: Vec<VarId> = self.symbols.ids().collect();
        self.symbols.ty(*ids.choose(self.rng).unwrap())
    }

    fn constant(&mut self, ty: MachType) -> Term {
        let vals = type_values(ty);
        // Favour small magnitudes and the extremes.
        let v = match self.rng.gen_range(0..4) {
            0 => *vals.first().unwrap(),
            1 => *vals.last().unwrap(),
            _ => vals[self.rng.gen_range(0..vals.len())],
        };
        let v = if self.rng.gen_bool(0.3) && ty.contains(1) { 1 } else { v };
        Term::Const(v, ty)
    }

    fn term(&mut self, ty: MachType) -> Term {
        let vars: Vec<VarId> = self.symbols.ids().filter(|&v| self.symbols.ty(v) == ty).collect();
        if !vars.is_empty() && self.rng.gen_bool(0.7) {
            Term::Var(*vars.choose(self.rng).unwrap())
        } else {
            self.constant(ty)
        }
    }

    fn any_term(&mut self) -> Term {
        let ty = self.random_type();
        self.term(ty)
    }

    fn shift_amount(&mut self, width: u8) -> Term {
        if self.rng.gen_bool(0.5) {
            let ty = MachType::unsigned(4);
            let k = self.rng.gen_range(0..width.min(15) as i128 + 1);
            Term::Const(k, ty)
        } else {
            self.any_term()
        }
    }

    fn condition(&mut self) -> Expr {
        match self.rng.gen_range(0..6) {
            0..=2 => {
                let ty = self.random_type();
                Expr::Le(self.term(ty), self.term(ty))
            }
            3 => Expr::LogicAnd(self.any_term(), self.any_term()),
            4 => Expr::Not(self.any_term()),
            _ => Expr::Term(self.any_term()),
        }
    }

    fn expr(&mut self) -> Expr {
        const OPS: [BinOp; 9] = [
            BinOp::Add,
            BinOp::Sub,
            BinOp::Mul,
            BinOp::Div,
            BinOp::Shl,
            BinOp::Shr,
            BinOp::And,
            BinOp::Or,
            BinOp::Xor,
        ];
        match self.rng.gen_range(0..10) {
            0..=4 => {
                let ty = self.random_type();
                let op = *OPS.choose(self.rng).unwrap();
                let a = self.term(ty);
                let b = if op.is_shift() { self.shift_amount(ty.width()) } else { self.term(ty) };
                Expr::Binary(op, a, b)
            }
            5 => Expr::Term(self.any_term()),
            6 => Expr::BitNot(self.any_term()),
            7 => {
                let w = self.rng.gen_range(1..=self.opts.max_width);
                let to = if self.rng.gen_bool(0.5) { MachType::signed(w) } else { MachType::unsigned(w) };
                Expr::Cast(to, self.any_term())
            }
            _ => self.condition(),
        }
    }
}

/// A random well-formed program. Loops come from backward conditional jumps,
/// so some generated programs do not terminate.
pub fn random_program(rng: &mut impl Rng, opts: GenOptions) -> Program {
    let mut symbols = SymbolTable::new();
    let n_vars = rng.gen_range(1..=opts.max_vars);
    for i in 0..n_vars {
        let w = rng.gen_range(1..=opts.max_width);
        let ty = if rng.gen_bool(0.5) { MachType::signed(w) } else { MachType::unsigned(w) };
        symbols.declare(&format!("v{i}"), ty).unwrap();
    }
    let n = rng.gen_range(1..=opts.max_stmts);
    let n_labels = rng.gen_range(0..=3.min(n));
    let mut slots: Vec<usize> = (0..n).collect();
    slots.shuffle(rng);
    let label_at: Vec<usize> = slots[..n_labels].to_vec();
    let labels: Vec<String> = (0..n_labels).map(|i| format!("L{i}")).collect();

    let mut g = Gen { rng, symbols: &symbols, opts };
    let mut stmts = Vec::with_capacity(n);
    for pos in 0..n {
        if let Some(k) = label_at.iter().position(|&p| p == pos) {
            stmts.push(Stmt::Label(labels[k].clone()));
            continue;
        }
        let roll = g.rng.gen_range(0..20);
        let s = match roll {
            0..=9 => {
                let ids: Vec<VarId> = g.symbols.ids().collect();
                let v = *ids.choose(g.rng).unwrap();
                Stmt::Assign(v, g.expr())
            }
            10 | 11 => Stmt::Assume(g.condition()),
            12..=14 => Stmt::Assert(g.condition()),
            15..=18 if !labels.is_empty() => {
                let l = labels.choose(g.rng).unwrap().clone();
                let guard = if g.rng.gen_bool(0.15) { Expr::truth() } else { g.condition() };
                Stmt::IfGoto(guard, l)
            }
            _ => Stmt::Skip,
        };
        stmts.push(s);
    }
    Program::new(symbols, stmts).expect("generated programs are well formed")
}

pub fn random_values(rng: &mut impl Rng, symbols: &SymbolTable) -> Vec<i128> {
    symbols
        .ids()
        .map(|v| {
            let ty = symbols.ty(v);
            rng.gen_range(ty.min()..=ty.max())
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Corpus.

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

/// Every shipped `.goto` program, sorted by file name.
pub fn corpus() -> Vec<(String, Program)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "goto"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let src = std::fs::read_to_string(&p).unwrap();
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let program = parse_program(&src).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, program)
        })
        .collect()
}

pub fn corpus_program(name: &str) -> Program {
    corpus().into_iter().find(|(n, _)| n == name).unwrap_or_else(|| panic!("no corpus program {name}")).1
}

// ---------------------------------------------------------------------------
// 32-bit reference bounds for `x | y`, scanning from the top bit down.

pub fn ref_min_or_32(mut a: u32, b: u32, mut c: u32, d: u32) -> u32 {
    let mut m: u32 = 1 << 31;
    while m != 0 {
        if !a & c & m != 0 {
            let tmp = (a | m) & m.wrapping_neg();
            if tmp <= b {
                a = tmp;
                break;
            }
        } else if a & !c & m != 0 {
            let tmp = (c | m) & m.wrapping_neg();
            if tmp <= d {
                c = tmp;
                break;
            }
        }
        m >>= 1;
    }
    a | c
}

pub fn ref_max_or_32(a: u32, mut b: u32, c: u32, mut d: u32) -> u32 {
    let mut m: u32 = 1 << 31;
    while m != 0 {
        if b & d & m != 0 {
            let tmp = (b - m) | (m - 1);
            if tmp >= a {
                b = tmp;
                break;
            }
            let tmp = (d - m) | (m - 1);
            if tmp >= c {
                d = tmp;
                break;
            }
        }
        m >>= 1;
    }
    b | d
}

/// A random 32-bit range: half the time anywhere, half the time narrow.
pub fn random_range_32(rng: &mut impl Rng) -> (u32, u32) {
    let a: u32 = rng.gen();
    let span: u32 = if rng.gen_bool(0.5) { rng.gen() } else { rng.gen_range(0..1024) };
    (a, a.saturating_add(span))
}
