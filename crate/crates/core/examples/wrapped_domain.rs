//! The same overflow seen through both domains. The integer domain treats
//! overflow as a jump to the full range; the wrapped domain keeps the arc
//! that crosses the wrap point.

use goto_interval::domains::{DomainKind, Interval};
use goto_interval::ir::{BinOp, MachType};

fn main() {
    let s4 = MachType::signed(4);
    let u8 = MachType::unsigned(8);
    let cases = [
        ("s4: [5, 7] + [1, 1]", s4, (5, 7), (1, 1), BinOp::Add),
        ("s4: [-8, -7] - [1, 2]", s4, (-8, -7), (1, 2), BinOp::Sub),
        ("u8: [250, 255] + [0, 10]", u8, (250, 255), (0, 10), BinOp::Add),
        ("u8: [16, 20] * [16, 16]", u8, (16, 20), (16, 16), BinOp::Mul),
    ];
    for (label, ty, (a, b), (c, d), op) in cases {
        println!("{label}");
        for domain in [DomainKind::Integer, DomainKind::Wrapped] {
            let x = Interval::range(domain, ty, a, b);
            let y = Interval::range(domain, ty, c, d);
            println!("  {domain:<8} {}", Interval::binary(op, &x, &y));
        }
    }
}
