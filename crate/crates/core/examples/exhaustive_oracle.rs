//! Run a small program on every possible input and report the first
//! counterexample, next to what the analysis concluded.

use goto_interval::absint::{compute_abs, StorageMode};
use goto_interval::concrete::{exhaustive_check, ExhaustiveOptions, ExhaustiveOutcome};
use goto_interval::domains::{DomainConfig, DomainKind};
use goto_interval::ir::parse_program;
use goto_interval::transform::assertion_report;

fn main() -> anyhow::Result<()> {
    for (name, source) in [
        ("wrap", include_str!("../corpus/wrap.goto")),
        ("xor_swap", include_str!("../corpus/xor_swap.goto")),
        ("mask", include_str!("../corpus/mask.goto")),
    ] {
        let program = parse_program(source)?;
        let cfg = DomainConfig::precise(DomainKind::Wrapped);
        let analysis = compute_abs(&program, &cfg, StorageMode::default())?;
        let verdicts: Vec<String> = assertion_report(&program, &analysis.map, &cfg)
            .iter()
            .map(|v| format!("{}@{}", v.verdict, v.stmt))
            .collect();
        let outcome = exhaustive_check(&program, &ExhaustiveOptions::default())?;
        let concrete = match outcome {
            ExhaustiveOutcome::AllSafe => "every input is safe".to_string(),
            ExhaustiveOutcome::Counterexample(c) => {
                let symbols = program.symbols();
                let env: Vec<String> =
                    symbols.ids().map(|v| format!("{}={}", symbols.name(v), c.env.get(v))).collect();
                format!("assert {} fails for {}", c.failed_at, env.join(", "))
            }
            other => format!("{other:?}"),
        };
        println!("{name:<9} analysis [{}]; enumeration: {concrete}", verdicts.join(" "));
    }
    Ok(())
}
