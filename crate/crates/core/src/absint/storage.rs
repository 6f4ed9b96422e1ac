//! Three ways of keeping one abstract state per statement.
//!
//! * `FullCopy` keeps a complete variable-to-interval table for every
//!   statement.
//! * `SharedInterval` keeps the tables but interns the intervals, so equal
//!   intervals across statements are a single object.
//! * `SharedDomainCow` stores whole environments, hash-consed so that
//!   statements with equal states share one record; records are only copied
//!   when an update diverges from the shared version.
//!
//! All three answer queries identically. They differ in how many interval
//! objects they allocate, which the counters in [`StorageStats`] record.

use std::borrow::Borrow;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::absint::AbstractEnv;
use crate::domains::{DomainKind, Interval};
use crate::ir::SymbolTable;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum StorageMode {
    FullCopy,
    SharedInterval,
    #[default]
    SharedDomainCow,
}

impl StorageMode {
    pub const ALL: [StorageMode; 3] = [StorageMode::FullCopy, StorageMode::SharedInterval, StorageMode::SharedDomainCow];

    pub fn name(self) -> &'static str {
        match self {
            StorageMode::FullCopy => "full_copy",
            StorageMode::SharedInterval => "shared_interval",
            StorageMode::SharedDomainCow => "shared_domain_cow",
        }
    }
}

impl fmt::Display for StorageMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StorageMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StorageMode::ALL
            .into_iter()
            .find(|m| m.name() == s.replace('-', "_"))
            .ok_or_else(|| format!("unknown storage mode `{s}`"))
    }
}

/// Allocation counters, cumulative over a whole analysis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StorageStats {
    /// Interval objects created to hold stored states.
    pub interval_objects: u64,
    /// Per-statement tables or shared environment records created.
    pub env_records: u64,
    /// Number of state updates.
    pub stores: u64,
}

struct Table<T> {
    bottom: bool,
    cells: Vec<T>,
}

enum Backing {
    Full(Vec<Option<Table<Interval>>>),
    Interned { tables: Vec<Option<Table<Arc<Interval>>>>, pool: HashSet<Arc<Interval>> },
    Shared { envs: Vec<Option<AbstractEnv>>, pool: HashSet<AbstractEnv> },
}

pub(crate) struct Store<'a> {
    symbols: &'a SymbolTable,
    domain: DomainKind,
    backing: Backing,
    stats: StorageStats,
}

impl<'a> Store<'a> {
    pub fn new(mode: StorageMode, slots: usize, symbols: &'a SymbolTable, domain: DomainKind) -> Self {
        let backing = match mode {
            StorageMode::FullCopy => Backing::Full((0..slots).map(|_| None).collect()),
            StorageMode::SharedInterval => {
                Backing::Interned { tables: (0..slots).map(|_| None).collect(), pool: HashSet::new() }
            }
            StorageMode::SharedDomainCow => Backing::Shared { envs: vec![None; slots], pool: HashSet::new() },
        };
        Store { symbols, domain, backing, stats: StorageStats::default() }
    }

    pub fn stats(&self) -> StorageStats {
        self.stats
    }

    pub fn put(&mut self, idx: usize, env: &AbstractEnv) {
        let symbols = self.symbols;
        self.stats.stores += 1;
        self.stats.env_records += 1;
        match &mut self.backing {
            Backing::Full(tables) => {
                let cells: Vec<Interval> = symbols.ids().map(|v| env.get(v, symbols)).collect();
                self.stats.interval_objects += cells.len() as u64;
                tables[idx] = Some(Table { bottom: env.is_bottom(), cells });
            }
            Backing::Interned { tables, pool } => {
                let mut cells = Vec::with_capacity(symbols.len());
                for v in symbols.ids() {
                    let iv = env.get(v, symbols);
                    let obj = match pool.get(&iv) {
                        Some(obj) => Arc::clone(obj),
                        None => {
                            let obj = Arc::new(iv);
                            pool.insert(Arc::clone(&obj));
                            self.stats.interval_objects += 1;
                            obj
                        }
                    };
                    cells.push(obj);
                }
                tables[idx] = Some(Table { bottom: env.is_bottom(), cells });
            }
            Backing::Shared { envs, pool } => {
                let rec = match pool.get(env) {
                    Some(rec) => {
                        self.stats.env_records -= 1;
                        rec.clone()
                    }
                    None => {
                        pool.insert(env.clone());
                        self.stats.interval_objects += env.tracked_len() as u64;
                        env.clone()
                    }
                };
                envs[idx] = Some(rec);
            }
        }
    }

    fn rebuild<T: Borrow<Interval>>(&self, t: &Table<T>) -> AbstractEnv {
        if t.bottom {
            return AbstractEnv::bottom(self.domain);
        }
        let mut env = AbstractEnv::init(self.domain);
        for (v, iv) in self.symbols.ids().zip(&t.cells) {
            env.set(v, *iv.borrow());
        }
        env
    }

    pub fn get(&self, idx: usize) -> Option<AbstractEnv> {
        match &self.backing {
            Backing::Full(tables) => tables[idx].as_ref().map(|t| self.rebuild(t)),
            Backing::Interned { tables, .. } => tables[idx].as_ref().map(|t| self.rebuild(t)),
            Backing::Shared { envs, .. } => envs[idx].clone(),
        }
    }

    /// Number of distinct shared records currently referenced; equals the
    /// number of stored statements for the table-based modes.
    pub fn live_records(&self) -> usize {
        match &self.backing {
            Backing::Full(t) => t.iter().flatten().count(),
            Backing::Interned { tables, .. } => tables.iter().flatten().count(),
            Backing::Shared { envs, .. } => {
                let mut seen: Vec<&AbstractEnv> = Vec::new();
                for e in envs.iter().flatten() {
                    if !seen.iter().any(|s| s.shares_map_with(e) && s.is_bottom() == e.is_bottom()) {
                        seen.push(e);
                    }
                }
                seen.len()
            }
        }
    }
}
