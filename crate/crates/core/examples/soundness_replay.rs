//! Replay concrete runs and check every visited state lies inside the
//! interval the analysis computed for that statement.

use goto_interval::absint::{compute_abs, StorageMode};
use goto_interval::concrete::{eval_observed, ConcreteEnv};
use goto_interval::domains::DomainConfig;
use goto_interval::ir::parse_program;

fn main() -> anyhow::Result<()> {
    let program = parse_program(include_str!("../corpus/shift.goto"))?;
    let symbols = program.symbols();
    let vars: Vec<_> = symbols.ids().collect();
    let (x, k) = (program.var("x").expect("declared"), program.var("k").expect("declared"));

    for cfg in DomainConfig::all() {
        let analysis = compute_abs(&program, &cfg, StorageMode::default())?;
        let (mut states, mut escapes) = (0u64, 0u64);
        for (xv, kv) in (0..=255).flat_map(|a| (0..=255).map(move |b| (a, b))) {
            let mut env = ConcreteEnv::zeroed(symbols);
            env.set(symbols, x, xv);
            env.set(symbols, k, kv);
            eval_observed(env, &program, 10_000, |idx, state| {
                states += 1;
                let abs = analysis.map.state(idx);
                escapes += vars.iter().any(|&v| !abs.get(v, symbols).contains(state.get(v))) as u64;
            });
        }
        println!("{:<60} {states:>7} states, {escapes} outside", cfg.to_json().to_string());
    }
    Ok(())
}
