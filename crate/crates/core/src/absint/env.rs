use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{Map, Value};

use crate::domains::{DomainKind, Interval};
use crate::ir::{SymbolTable, VarId};

/// A map from variables to intervals. Variables that are absent are at the
/// initial (top) value; a Bottom environment describes no state at all.
///
/// The map sits behind an `Arc`, so cloning is cheap and updates copy only
/// when the map is shared.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbstractEnv {
    domain: DomainKind,
    bottom: bool,
    vars: Arc<BTreeMap<VarId, Interval>>,
}

impl AbstractEnv {
    pub fn init(domain: DomainKind) -> Self {
        AbstractEnv { domain, bottom: false, vars: Arc::new(BTreeMap::new()) }
    }

    pub fn bottom(domain: DomainKind) -> Self {
        AbstractEnv { domain, bottom: true, vars: Arc::new(BTreeMap::new()) }
    }

    pub fn domain(&self) -> DomainKind {
        self.domain
    }

    pub fn is_bottom(&self) -> bool {
        self.bottom
    }

    pub fn make_bottom(&mut self) {
        *self = Self::bottom(self.domain);
    }

    pub fn get(&self, v: VarId, symbols: &SymbolTable) -> Interval {
        let ty = symbols.ty(v);
        if self.bottom {
            return Interval::bottom(self.domain, ty);
        }
        self.vars.get(&v).copied().unwrap_or_else(|| Interval::init(self.domain, ty))
    }

    /// Rebind `v`. An empty interval turns the whole environment into
    /// Bottom; the initial value is represented by absence.
    pub fn set(&mut self, v: VarId, value: Interval) {
        if self.bottom {
            return;
        }
        if value.is_empty() {
            self.make_bottom();
        } else if value.is_init() {
            if self.vars.contains_key(&v) {
                Arc::make_mut(&mut self.vars).remove(&v);
            }
        } else if self.vars.get(&v) != Some(&value) {
            Arc::make_mut(&mut self.vars).insert(v, value);
        }
    }

    /// Variables bound to something other than the initial value.
    pub fn tracked(&self) -> impl Iterator<Item = (VarId, &Interval)> {
        self.vars.iter().map(|(v, i)| (*v, i))
    }

    pub fn tracked_len(&self) -> usize {
        self.vars.len()
    }

    /// Whether both environments use the same underlying map.
    pub fn shares_map_with(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.vars, &other.vars)
    }

    fn combine(&self, other: &Self, symbols: &SymbolTable, f: impl Fn(&Interval, &Interval) -> Interval) -> Self {
        let mut out = self.clone();
        let keys: Vec<VarId> = self.vars.keys().chain(other.vars.keys()).copied().collect();
        for v in keys {
            out.set(v, f(&self.get(v, symbols), &other.get(v, symbols)));
        }
        out
    }

    pub fn join(&self, other: &Self, symbols: &SymbolTable) -> Self {
        if self.bottom {
            return other.clone();
        }
        if other.bottom {
            return self.clone();
        }
        self.combine(other, symbols, Interval::join)
    }

    /// Per-variable widening of `self` (the old state) by `new`.
    pub fn widen(&self, new: &Self, symbols: &SymbolTable) -> Self {
        if self.bottom || new.bottom {
            return new.clone();
        }
        new.combine(self, symbols, |n, o| Interval::widen(o, n))
    }

    /// `self ⊑ other`.
    pub fn leq(&self, other: &Self, symbols: &SymbolTable) -> bool {
        if self.bottom {
            return true;
        }
        if other.bottom {
            return false;
        }
        self.vars.keys().chain(other.vars.keys()).all(|&v| self.get(v, symbols).leq(&other.get(v, symbols)))
    }

    /// `{var: interval}` over every declared variable.
    pub fn to_json(&self, symbols: &SymbolTable) -> Value {
        let mut m = Map::new();
        for v in symbols.ids() {
            m.insert(symbols.name(v).to_string(), self.get(v, symbols).to_json());
        }
        Value::Object(m)
    }
}
