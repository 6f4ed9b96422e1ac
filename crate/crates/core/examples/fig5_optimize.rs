//! Fold an assertion that the analysis proves constant, then drop code no
//! execution reaches.

use goto_interval::absint::{compute_abs, StorageMode};
use goto_interval::domains::{DomainConfig, DomainKind};
use goto_interval::ir::{emit_program, parse_program};
use goto_interval::transform::{remove_dead_code, singleton_propagate};

fn main() -> anyhow::Result<()> {
    let cfg = DomainConfig::precise(DomainKind::Integer);

    let fig5 = parse_program(include_str!("../corpus/fig5.goto"))?;
    let analysis = compute_abs(&fig5, &cfg, StorageMode::default())?;
    let (folded, count) = singleton_propagate(&fig5, &analysis.map, &cfg);
    println!("-- fig5: {count} expression(s) folded\n{}", emit_program(&folded));

    let dead = parse_program(include_str!("../corpus/dead.goto"))?;
    let analysis = compute_abs(&dead, &cfg, StorageMode::default())?;
    let (pruned, killed) = remove_dead_code(&dead, &analysis.map);
    println!("-- dead: {killed} statement(s) replaced by skip\n{}", emit_program(&pruned));
    Ok(())
}
