//! Insert the computed intervals back into the program as `assume`
//! statements, in each placement mode.

use goto_interval::absint::{compute_abs, StorageMode};
use goto_interval::domains::{DomainConfig, DomainKind};
use goto_interval::ir::{emit_program, parse_program};
use goto_interval::transform::{instrument, InstrumentMode};

fn main() -> anyhow::Result<()> {
    let program = parse_program(include_str!("../corpus/nested.goto"))?;
    let cfg = DomainConfig::precise(DomainKind::Integer);
    let analysis = compute_abs(&program, &cfg, StorageMode::default())?;
    for mode in InstrumentMode::ALL {
        let out = instrument(&program, &analysis.map, mode)?;
        println!("== {mode} ({} statements)\n{}", out.len(), emit_program(&out));
    }
    Ok(())
}
