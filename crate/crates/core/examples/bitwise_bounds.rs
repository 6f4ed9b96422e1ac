//! Tight bounds for `x | y` and `x & y` over ranges, checked against brute
//! force on a few examples.

use goto_interval::domains::bitwise::{and_bounds, or_bounds, xor_bounds};

fn brute(a: u64, b: u64, c: u64, d: u64, f: impl Fn(u64, u64) -> u64) -> (u64, u64) {
    let mut out = (u64::MAX, 0);
    for x in a..=b {
        for y in c..=d {
            out = (out.0.min(f(x, y)), out.1.max(f(x, y)));
        }
    }
    out
}

fn main() {
    let mask = 0xff;
    for (a, b, c, d) in [(4, 6, 1, 2), (16, 31, 3, 5), (0, 200, 128, 128), (9, 9, 6, 6)] {
        println!("x in [{a}, {b}], y in [{c}, {d}]");
        println!("  or  {:?}  brute {:?}", or_bounds(a, b, c, d), brute(a, b, c, d, |x, y| x | y));
        println!("  and {:?}  brute {:?}", and_bounds(a, b, c, d, mask), brute(a, b, c, d, |x, y| x & y));
        println!("  xor {:?}  brute {:?} (sound, may be wider)", xor_bounds(a, b, c, d, mask), brute(a, b, c, d, |x, y| x ^ y));
    }
}
