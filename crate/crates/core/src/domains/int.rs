//! The integer interval domain: ranges over integers extended with ±∞.
//!
//! Operators first clamp their operands to the operand type's range, which
//! loses nothing because every concrete value lies inside it. The
//! resulting range is exact over the integers. If it leaves the type, the
//! concrete operation wraps, so the result becomes the full type range.

use std::fmt;

use super::bitwise;
use super::boolean::BoolInterval;
use crate::ir::MachType;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bound {
    NegInf,
    Fin(i128),
    PosInf,
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => f.write_str("-inf"),
            Bound::Fin(v) => write!(f, "{v}"),
            Bound::PosInf => f.write_str("+inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IntInterval {
    ty: MachType,
    bounds: Option<(Bound, Bound)>,
}

impl IntInterval {
    /// `(−∞, +∞)`, the initial value of every variable.
    pub fn top(ty: MachType) -> Self {
        IntInterval { ty, bounds: Some((Bound::NegInf, Bound::PosInf)) }
    }

    pub fn bottom(ty: MachType) -> Self {
        IntInterval { ty, bounds: None }
    }

    pub fn new(ty: MachType, lo: Bound, hi: Bound) -> Self {
        let ok = lo <= hi && lo != Bound::PosInf && hi != Bound::NegInf;
        IntInterval { ty, bounds: ok.then_some((lo, hi)) }
    }

    pub fn range(ty: MachType, lo: i128, hi: i128) -> Self {
        Self::new(ty, Bound::Fin(lo), Bound::Fin(hi))
    }

    pub fn constant(ty: MachType, v: i128) -> Self {
        Self::range(ty, v, v)
    }

    /// `[min_ty, max_ty]`.
    pub fn full(ty: MachType) -> Self {
        Self::range(ty, ty.min(), ty.max())
    }

    pub fn ty(&self) -> MachType {
        self.ty
    }

    pub fn bounds(&self) -> Option<(Bound, Bound)> {
        self.bounds
    }

    pub fn is_bottom(&self) -> bool {
        self.bounds.is_none()
    }

    pub fn is_top(&self) -> bool {
        self.bounds == Some((Bound::NegInf, Bound::PosInf))
    }

    /// The members that are representable in the type, as a finite range.
    pub fn clamped(&self) -> Option<(i128, i128)> {
        let (lo, hi) = self.bounds?;
        let lo = match lo {
            Bound::Fin(v) => v.max(self.ty.min()),
            _ => self.ty.min(),
        };
        let hi = match hi {
            Bound::Fin(v) => v.min(self.ty.max()),
            _ => self.ty.max(),
        };
        (lo <= hi).then_some((lo, hi))
    }

    pub fn contains(&self, v: i128) -> bool {
        self.bounds.is_some_and(|(lo, hi)| lo <= Bound::Fin(v) && Bound::Fin(v) <= hi)
    }

    pub fn singleton(&self) -> Option<i128> {
        self.clamped().and_then(|(lo, hi)| (lo == hi).then_some(lo))
    }

    /// `self ⊑ other`.
    pub fn leq(&self, other: &Self) -> bool {
        match (self.bounds, other.bounds) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some((l0, u0)), Some((l1, u1))) => l1 <= l0 && u0 <= u1,
        }
    }

    pub fn join(&self, other: &Self) -> Self {
        match (self.bounds, other.bounds) {
            (None, _) => *other,
            (_, None) => *self,
            (Some((l0, u0)), Some((l1, u1))) => Self::new(self.ty, l0.min(l1), u0.max(u1)),
        }
    }

    pub fn meet(&self, other: &Self) -> Self {
        match (self.bounds, other.bounds) {
            (Some((l0, u0)), Some((l1, u1))) => Self::new(self.ty, l0.max(l1), u0.min(u1)),
            _ => Self::bottom(self.ty),
        }
    }

    /// Extrapolation of `old` by `new`: a bound that moved outward jumps to
    /// infinity, otherwise `new` is kept.
    pub fn widen(old: &Self, new: &Self) -> Self {
        let (Some((lp, up)), Some((ln, un))) = (old.bounds, new.bounds) else {
            return *new;
        };
        match (ln < lp, un > up) {
            (true, true) => Self::top(new.ty),
            (true, false) => Self::new(new.ty, Bound::NegInf, un),
            (false, true) => Self::new(new.ty, ln, Bound::PosInf),
            (false, false) => *new,
        }
    }

    /// Bring an exact integer range back into `ty`.
    fn fit(ty: MachType, lo: i128, hi: i128) -> Self {
        if ty.contains(lo) && ty.contains(hi) {
            Self::range(ty, lo, hi)
        } else {
            Self::full(ty)
        }
    }

    fn hull(ty: MachType, vals: impl IntoIterator<Item = Option<i128>>) -> Self {
        let mut lo = i128::MAX;
        let mut hi = i128::MIN;
        for v in vals {
            let Some(v) = v else { return Self::full(ty) };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Self::fit(ty, lo, hi)
    }

    fn both(&self, other: &Self) -> Option<((i128, i128), (i128, i128))> {
        Some((self.clamped()?, other.clamped()?))
    }

    pub fn add(&self, other: &Self) -> Self {
        let Some(((a, b), (c, d))) = self.both(other) else { return Self::bottom(self.ty) };
        Self::hull(self.ty, [a.checked_add(c), b.checked_add(d)])
    }

    pub fn sub(&self, other: &Self) -> Self {
        let Some(((a, b), (c, d))) = self.both(other) else { return Self::bottom(self.ty) };
        Self::hull(self.ty, [a.checked_sub(d), b.checked_sub(c)])
    }

    pub fn mul(&self, other: &Self) -> Self {
        let Some(((a, b), (c, d))) = self.both(other) else { return Self::bottom(self.ty) };
        Self::hull(self.ty, [a.checked_mul(c), a.checked_mul(d), b.checked_mul(c), b.checked_mul(d)])
    }

    /// Truncating division. A divisor range containing zero gives top.
    pub fn div(&self, other: &Self) -> Self {
        let Some(((a, b), (c, d))) = self.both(other) else { return Self::bottom(self.ty) };
        if c <= 0 && 0 <= d {
            return Self::top(self.ty);
        }
        Self::hull(self.ty, [a / c, a / d, b / c, b / d].map(Some))
    }

    /// Shift amounts that do not fault, i.e. those in `[0, w)`.
    fn shift_amounts(&self, amount: &Self) -> Option<(u32, u32)> {
        let (c, d) = amount.clamped()?;
        let lo = c.max(0);
        let hi = d.min(self.ty.width() as i128 - 1);
        (lo <= hi).then_some((lo as u32, hi as u32))
    }

    pub fn shl(&self, amount: &Self) -> Self {
        let (Some((a, b)), Some((k0, k1))) = (self.clamped(), self.shift_amounts(amount)) else {
            return Self::bottom(self.ty);
        };
        // v << k is monotone in v for each k, and the extremes over k sit at
        // the extreme amounts.
        Self::hull(
            self.ty,
            [k0, k1].into_iter().flat_map(|k| [a.checked_mul(1 << k), b.checked_mul(1 << k)]),
        )
    }

    pub fn shr(&self, amount: &Self) -> Self {
        let (Some((a, b)), Some((k0, k1))) = (self.clamped(), self.shift_amounts(amount)) else {
            return Self::bottom(self.ty);
        };
        Self::hull(self.ty, [a >> k0, a >> k1, b >> k0, b >> k1].map(Some))
    }

    /// Sign-homogeneous sub-ranges, on which value order and pattern order
    /// agree.
    fn sign_pieces(&self) -> Vec<(i128, i128)> {
        let Some((a, b)) = self.clamped() else { return Vec::new() };
        let mut out = Vec::with_capacity(2);
        if a < 0 {
            out.push((a, b.min(-1)));
        }
        if b >= 0 {
            out.push((a.max(0), b));
        }
        out
    }

    fn bitwise(&self, other: &Self, f: impl Fn(u64, u64, u64, u64, u64) -> (u64, u64)) -> Self {
        let ty = self.ty;
        let mut acc = Self::bottom(ty);
        for (a, b) in self.sign_pieces() {
            for &(c, d) in &other.sign_pieces() {
                let p = |v| ty.to_pattern(v);
                let (lo, hi) = f(p(a), p(b), p(c), p(d), ty.mask());
                let (lo, hi) = (ty.from_pattern(lo), ty.from_pattern(hi));
                let piece = if lo <= hi { Self::range(ty, lo, hi) } else { Self::full(ty) };
                acc = acc.join(&piece);
            }
        }
        acc
    }

    pub fn and(&self, other: &Self) -> Self {
        self.bitwise(other, bitwise::and_bounds)
    }

    pub fn or(&self, other: &Self) -> Self {
        self.bitwise(other, |a, b, c, d, _| bitwise::or_bounds(a, b, c, d))
    }

    pub fn xor(&self, other: &Self) -> Self {
        self.bitwise(other, bitwise::xor_bounds)
    }

    pub fn not(&self) -> Self {
        let Some((a, b)) = self.clamped() else { return Self::bottom(self.ty) };
        if self.ty.is_signed() {
            Self::range(self.ty, -b - 1, -a - 1)
        } else {
            Self::range(self.ty, self.ty.max() - b, self.ty.max() - a)
        }
    }

    /// Conversion to `to`: exact when the source range fits, or when it maps
    /// onto one unbroken stretch of `to`; otherwise the full range of `to`.
    pub fn cast(&self, to: MachType) -> Self {
        let Some((a, b)) = self.clamped() else { return Self::bottom(to) };
        if to.contains(a) && to.contains(b) {
            return Self::range(to, a, b);
        }
        let (wa, wb) = (to.wrap(a), to.wrap(b));
        if ((b - a) as u128) < to.modulus() && wa <= wb {
            Self::range(to, wa, wb)
        } else {
            Self::full(to)
        }
    }

    pub fn le(&self, other: &Self) -> BoolInterval {
        let Some(((a, b), (c, d))) = self.both(other) else { return BoolInterval::Bottom };
        BoolInterval::from_possibilities(a <= d, b > c)
    }

    /// Truth value of the term as a guard (nonzero means true).
    pub fn truth(&self) -> BoolInterval {
        let Some((a, b)) = self.clamped() else { return BoolInterval::Bottom };
        BoolInterval::from_possibilities(!(a == 0 && b == 0), a <= 0 && 0 <= b)
    }

    /// Members that are nonzero.
    pub fn nonzero(&self) -> Self {
        match self.clamped() {
            None => Self::bottom(self.ty),
            Some((0, 0)) => Self::bottom(self.ty),
            Some((0, b)) => Self::range(self.ty, 1, b),
            Some((a, 0)) => Self::range(self.ty, a, -1),
            Some(_) => *self,
        }
    }

    /// `self ⊓ (−∞, c]`.
    pub fn at_most(&self, c: i128) -> Self {
        if c < self.ty.min() {
            return Self::bottom(self.ty);
        }
        self.meet(&Self::new(self.ty, Bound::NegInf, Bound::Fin(c)))
    }

    /// `self ⊓ [c, +∞)`.
    pub fn at_least(&self, c: i128) -> Self {
        if c > self.ty.max() {
            return Self::bottom(self.ty);
        }
        self.meet(&Self::new(self.ty, Bound::Fin(c), Bound::PosInf))
    }
}

impl fmt::Display for IntInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bounds {
            None => f.write_str("bottom"),
            Some((lo, hi)) => write!(f, "[{lo}, {hi}]"),
        }
    }
}
