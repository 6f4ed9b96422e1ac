//! Control-flow queries over the flat statement list.

use std::collections::{BTreeMap, BTreeSet};

use super::program::{Program, Stmt};

/// The statement list and label map in source order.
pub fn flatten(program: &Program) -> (Vec<Stmt>, BTreeMap<String, usize>) {
    (program.stmts().to_vec(), program.labels().clone())
}

/// Successor indices of statement `idx`. Falling off the end of the program
/// has no successor index.
pub fn successors(program: &Program, idx: usize) -> BTreeSet<usize> {
    let mut next = BTreeSet::new();
    if idx < program.len() {
        next.insert(idx + 1);
    }
    if let Stmt::IfGoto(_, l) = program.stmt(idx) {
        next.insert(program.label_index(l).expect("validated label"));
    }
    next
}

pub fn predecessors(program: &Program) -> Vec<Vec<usize>> {
    let mut preds = vec![Vec::new(); program.len() + 1];
    for i in program.indices() {
        for s in successors(program, i) {
            preds[s].push(i);
        }
    }
    preds
}

/// Reachability from statement 1, indexed by statement (slot 0 unused).
pub fn reachable(program: &Program) -> Vec<bool> {
    let mut seen = vec![false; program.len() + 1];
    if program.is_empty() {
        return seen;
    }
    let mut stack = vec![1];
    seen[1] = true;
    while let Some(i) = stack.pop() {
        for s in successors(program, i) {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
    }
    seen
}

/// Dominator sets, indexed by statement (slot 0 unused). Unreachable
/// statements are dominated by everything.
pub fn dominators(program: &Program) -> Vec<BTreeSet<usize>> {
    let n = program.len();
    let all: BTreeSet<usize> = program.indices().collect();
    let mut dom = vec![all; n + 1];
    dom[0].clear();
    if n == 0 {
        return dom;
    }
    dom[1] = BTreeSet::from([1]);
    let preds = predecessors(program);
    let mut changed = true;
    while changed {
        changed = false;
        for i in 2..=n {
            let mut new: Option<BTreeSet<usize>> = None;
            for &p in &preds[i] {
                new = Some(match new {
                    None => dom[p].clone(),
                    Some(acc) => acc.intersection(&dom[p]).copied().collect(),
                });
            }
            let mut new = new.unwrap_or_else(|| dom[i].clone());
            new.insert(i);
            if new != dom[i] {
                dom[i] = new;
                changed = true;
            }
        }
    }
    dom
}

/// A loop induced by one back edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Loop {
    /// Target of the back edge.
    pub head: usize,
    /// The `IfGoto` that jumps back.
    pub latch: usize,
    /// Statements on some path from `head` to `latch`, both included.
    pub body: BTreeSet<usize>,
}

impl Loop {
    /// Edges leaving the body, as `(from, to)` pairs.
    pub fn exits(&self, program: &Program) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &i in &self.body {
            for s in successors(program, i) {
                if !self.body.contains(&s) {
                    out.push((i, s));
                }
            }
        }
        out
    }
}

/// One entry per back edge, i.e. per `IfGoto` whose target precedes it.
pub fn detect_loops(program: &Program) -> Vec<Loop> {
    let preds = predecessors(program);
    let mut loops = Vec::new();
    for latch in program.indices() {
        let Stmt::IfGoto(_, l) = program.stmt(latch) else {
            continue;
        };
        let head = program.label_index(l).expect("validated label");
        if head >= latch {
            continue;
        }
        // Forward from head, backward from latch; intersect.
        let mut fwd = BTreeSet::from([head]);
        let mut stack = vec![head];
        while let Some(i) = stack.pop() {
            for s in successors(program, i) {
                if fwd.insert(s) {
                    stack.push(s);
                }
            }
        }
        let mut body = BTreeSet::from([head, latch]);
        let mut stack = vec![latch];
        while let Some(i) = stack.pop() {
            if i == head {
                continue;
            }
            for &p in &preds[i] {
                if fwd.contains(&p) && body.insert(p) {
                    stack.push(p);
                }
            }
        }
        loops.push(Loop { head, latch, body });
    }
    loops
}
