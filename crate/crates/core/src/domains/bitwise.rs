//! Range bounds for bitwise operators on unsigned bit patterns.
//!
//! Given `x ∈ [a, b]` and `y ∈ [c, d]` (unsigned order, all values below
//! `2^w`), these compute the tightest range containing `x | y`, and sound
//! ranges for `&` and `^`. The OR scans run from the least significant
//! candidate bit upwards and only visit bits that matter, so they work for any
//! width up to 64 without knowing it.

/// Largest value of the form `(x | lsb) & -lsb` not above `y`, over the set
/// bits `lsb` of `m` taken from the lowest one upwards; `x` if none fits.
pub fn best_or(x: u64, y: u64, mut m: u64) -> u64 {
    let mut best = x;
    while m != 0 {
        let lsb = m & m.wrapping_neg();
        let tmp = (x | lsb) & lsb.wrapping_neg();
        if tmp > y {
            break;
        }
        best = tmp;
        m &= m - 1;
    }
    best
}

pub fn min_or(a: u64, b: u64, c: u64, d: u64) -> u64 {
    let best_a = best_or(a, b, !a & c);
    let best_c = best_or(c, d, a & !c);
    (best_a | c).min(a | best_c)
}

pub fn max_or(a: u64, b: u64, c: u64, d: u64) -> u64 {
    let mut e = 0;
    let mut m = b & d;
    while m != 0 {
        let lsb = m & m.wrapping_neg();
        let tmp_b = (b - lsb) | (lsb - 1);
        let tmp_d = (d - lsb) | (lsb - 1);
        if tmp_b < a && tmp_d < c {
            break;
        }
        e |= lsb - 1;
        m &= m - 1;
    }
    b | d | e
}

/// `x & y = ~(~x | ~y)`; complementing reverses each range.
pub fn min_and(a: u64, b: u64, c: u64, d: u64, mask: u64) -> u64 {
    !max_or(!b & mask, !a & mask, !d & mask, !c & mask) & mask
}

pub fn max_and(a: u64, b: u64, c: u64, d: u64, mask: u64) -> u64 {
    !min_or(!b & mask, !a & mask, !d & mask, !c & mask) & mask
}

/// Bounds of `x ^ y` through `(x & ~y) | (~x & y)`. Sound, not always tight.
pub fn xor_bounds(a: u64, b: u64, c: u64, d: u64, mask: u64) -> (u64, u64) {
    let (nc, nd) = (!d & mask, !c & mask);
    let (na, nb) = (!b & mask, !a & mask);
    let (p_lo, p_hi) = (min_and(a, b, nc, nd, mask), max_and(a, b, nc, nd, mask));
    let (q_lo, q_hi) = (min_and(na, nb, c, d, mask), max_and(na, nb, c, d, mask));
    (min_or(p_lo, p_hi, q_lo, q_hi), max_or(p_lo, p_hi, q_lo, q_hi))
}

pub fn or_bounds(a: u64, b: u64, c: u64, d: u64) -> (u64, u64) {
    (min_or(a, b, c, d), max_or(a, b, c, d))
}

pub fn and_bounds(a: u64, b: u64, c: u64, d: u64, mask: u64) -> (u64, u64) {
    (min_and(a, b, c, d, mask), max_and(a, b, c, d, mask))
}
