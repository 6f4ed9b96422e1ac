//! Compare allocation counters of the three state-storage strategies on a
//! long-running loop. All three produce the same result.

use goto_interval::absint::{compute_abs, StorageMode};
use goto_interval::domains::{DomainConfig, DomainKind};
use goto_interval::ir::parse_program;

fn main() -> anyhow::Result<()> {
    let program = parse_program(include_str!("../corpus/fig1_1000.goto"))?;
    let cfg = DomainConfig { arithmetic: true, ..DomainConfig::new(DomainKind::Integer) };
    let mut maps = vec![];
    println!("{:<18} {:>8} {:>16} {:>12} {:>8}", "mode", "pops", "interval objects", "env records", "stores");
    for mode in StorageMode::ALL {
        let a = compute_abs(&program, &cfg, mode)?;
        let s = a.stats.storage;
        println!("{:<18} {:>8} {:>16} {:>12} {:>8}", mode.name(), a.stats.pops, s.interval_objects, s.env_records, s.stores);
        maps.push(a.map);
    }
    let symbols = program.symbols();
    let same = maps.windows(2).all(|w| w[0].to_json(symbols) == w[1].to_json(symbols));
    println!("identical results: {same}");
    Ok(())
}
