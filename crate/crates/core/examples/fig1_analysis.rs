//! Analyze the counting loop and print the interval of `x` at every
//! statement, with and without widening. Widening fires at every merge
//! where a state grows, so with it on the guard refinement is lost and the
//! counter overflows to the full range; the assertion is still proven.

use goto_interval::absint::{compute_abs, StorageMode};
use goto_interval::domains::{DomainConfig, DomainKind};
use goto_interval::ir::{emit_stmt, parse_program};
use goto_interval::transform::assertion_report;

const SOURCE: &str = include_str!("../corpus/fig1.goto");

fn main() -> anyhow::Result<()> {
    let program = parse_program(SOURCE)?;
    let symbols = program.symbols();
    let x = program.var("x").expect("declared");

    for widening in [false, true] {
        let cfg = DomainConfig { arithmetic: true, widening, ..DomainConfig::new(DomainKind::Integer) };
        let analysis = compute_abs(&program, &cfg, StorageMode::default())?;
        println!("widening {widening}: {} work-list pops", analysis.stats.pops);
        for i in program.indices() {
            let x_here = analysis.map.state(i).get(x, symbols);
            println!("  {i:>2}  {:<24} x : {x_here}", emit_stmt(program.stmt(i), symbols));
        }
        for v in assertion_report(&program, &analysis.map, &cfg) {
            println!("  assert at {}: {}", v.stmt, v.verdict);
        }
    }
    Ok(())
}
