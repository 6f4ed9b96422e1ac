//! The wrapped interval domain: arcs on the ring of `w`-bit patterns.
//!
//! `⟨s, e⟩` holds every pattern met walking clockwise (upwards, modulo
//! `2^w`) from `s` to `e`. That is the same set regardless of whether the
//! type is signed; only the decimal rendering of the end points differs.
//! Operators that are not translation-invariant cut their operands at a pole
//! (the wrap point of the order they need) into ordinary ranges, compute
//! exactly over the integers, and wrap the result back onto the ring.

use std::fmt;

use super::bitwise;
use super::boolean::BoolInterval;
use crate::ir::MachType;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WrapInterval {
    ty: MachType,
    /// `None` is Bottom. A full ring is always stored as `(0, mask)`.
    arc: Option<(u64, u64)>,
}

impl WrapInterval {
    pub fn bottom(ty: MachType) -> Self {
        WrapInterval { ty, arc: None }
    }

    /// `⟨0, −1⟩`.
    pub fn full(ty: MachType) -> Self {
        WrapInterval { ty, arc: Some((0, ty.mask())) }
    }

    /// The arc from pattern `start` clockwise to pattern `end`.
    pub fn arc(ty: MachType, start: u64, end: u64) -> Self {
        let m = ty.mask();
        let (start, end) = (start & m, end & m);
        if end.wrapping_sub(start) & m == m {
            Self::full(ty)
        } else {
            WrapInterval { ty, arc: Some((start, end)) }
        }
    }

    /// The arc from value `lo` clockwise to value `hi`.
    pub fn from_values(ty: MachType, lo: i128, hi: i128) -> Self {
        Self::arc(ty, ty.to_pattern(lo), ty.to_pattern(hi))
    }

    pub fn constant(ty: MachType, v: i128) -> Self {
        Self::from_values(ty, v, v)
    }

    /// Image of the exact integer range `[lo, hi]` under reduction modulo
    /// `2^w`.
    pub fn from_range(ty: MachType, lo: i128, hi: i128) -> Self {
        debug_assert!(lo <= hi);
        match hi.checked_sub(lo) {
            Some(span) if (span as u128) < ty.modulus() => Self::from_values(ty, lo, hi),
            _ => Self::full(ty),
        }
    }

    pub fn ty(&self) -> MachType {
        self.ty
    }

    pub fn is_bottom(&self) -> bool {
        self.arc.is_none()
    }

    pub fn is_full(&self) -> bool {
        self.cardinality() == self.ty.modulus()
    }

    /// Start and end patterns.
    pub fn patterns(&self) -> Option<(u64, u64)> {
        self.arc
    }

    /// Start and end as values of the type.
    pub fn ends(&self) -> Option<(i128, i128)> {
        self.arc.map(|(s, e)| (self.ty.from_pattern(s), self.ty.from_pattern(e)))
    }

    pub fn cardinality(&self) -> u128 {
        match self.arc {
            None => 0,
            Some((s, e)) => (e.wrapping_sub(s) & self.ty.mask()) as u128 + 1,
        }
    }

    fn offset(&self, from: u64, p: u64) -> u128 {
        (p.wrapping_sub(from) & self.ty.mask()) as u128
    }

    pub fn contains(&self, v: i128) -> bool {
        match self.arc {
            None => false,
            Some((s, _)) => self.offset(s, self.ty.to_pattern(v)) < self.cardinality(),
        }
    }

    pub fn singleton(&self) -> Option<i128> {
        (self.cardinality() == 1).then(|| self.ends().unwrap().0)
    }

    /// `self ⊑ other`: every member of `self` is a member of `other`.
    pub fn leq(&self, other: &Self) -> bool {
        match (self.arc, other.arc) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some((s, _)), Some((t, _))) => {
                other.is_full() || self.offset(t, s) + self.cardinality() <= other.cardinality()
            }
        }
    }

    /// Smallest single arc covering both. Among equally small covers the one
    /// with the smallest start pattern is chosen.
    pub fn join(&self, other: &Self) -> Self {
        if self.leq(other) {
            return *other;
        }
        if other.leq(self) {
            return *self;
        }
        let ((s0, e0), (s1, e1)) = (self.arc.unwrap(), other.arc.unwrap());
        [Self::arc(self.ty, s0, e1), Self::arc(self.ty, s1, e0)]
            .into_iter()
            .filter(|c| self.leq(c) && other.leq(c))
            .min_by_key(|c| (c.cardinality(), c.arc.unwrap().0))
            .unwrap_or_else(|| Self::full(self.ty))
    }

    /// Smallest single arc covering the intersection, which may itself be two
    /// separate arcs.
    pub fn meet(&self, other: &Self) -> Self {
        let ty = self.ty;
        let mut segs: Vec<(u64, u64)> = Vec::new();
        for (a, b) in self.pattern_pieces() {
            for &(c, d) in &other.pattern_pieces() {
                let (lo, hi) = (a.max(c), b.min(d));
                if lo <= hi {
                    segs.push((lo, hi));
                }
            }
        }
        segs.sort_unstable();
        let mut merged: Vec<(u64, u64)> = Vec::new();
        for (lo, hi) in segs {
            match merged.last_mut() {
                Some(last) if lo <= last.1.saturating_add(1) => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        if merged.len() > 1 && merged[0].0 == 0 && merged.last().unwrap().1 == ty.mask() {
            let (lo, _) = merged.pop().unwrap();
            merged[0].0 = lo;
        }
        merged
            .into_iter()
            .map(|(s, e)| Self::arc(ty, s, e))
            .fold(Self::bottom(ty), |acc, a| acc.join(&a))
    }

    /// Grow a changing arc by at least its own size on every side that moved,
    /// so that any increasing chain saturates after at most `w + 1` steps.
    pub fn widen(old: &Self, new: &Self) -> Self {
        if old.is_bottom() || new.leq(old) {
            return if old.is_bottom() { *new } else { *old };
        }
        let m = old.join(new);
        if m.is_full() {
            return m;
        }
        let ((os, oe), (ms, me)) = (old.arc.unwrap(), m.arc.unwrap());
        let grow = old.cardinality();
        let ccw = m.offset(ms, os) > 0;
        let cw = m.offset(oe, me) > 0;
        let card = m.cardinality() + grow * (ccw as u128 + cw as u128);
        if card >= old.ty.modulus() {
            return Self::full(old.ty);
        }
        let start = if ccw { ms.wrapping_sub(grow as u64) } else { ms };
        let end = if cw { me.wrapping_add(grow as u64) } else { me };
        Self::arc(old.ty, start, end)
    }

    /// Split into ranges that do not pass the wrap point of the chosen
    /// order, expressed as values of that order.
    fn pieces(&self, signed: bool) -> Vec<(i128, i128)> {
        let Some((s, e)) = self.arc else { return Vec::new() };
        let w = self.ty.width();
        let view = MachType::new(signed, w).unwrap();
        if self.is_full() {
            return vec![(view.min(), view.max())];
        }
        let (lo, hi) = (view.from_pattern(s), view.from_pattern(e));
        if lo <= hi {
            vec![(lo, hi)]
        } else {
            vec![(lo, view.max()), (view.min(), hi)]
        }
    }

    /// Pieces in the type's own value order.
    fn value_pieces(&self) -> Vec<(i128, i128)> {
        self.pieces(self.ty.is_signed())
    }

    fn pattern_pieces(&self) -> Vec<(u64, u64)> {
        self.pieces(false).into_iter().map(|(a, b)| (a as u64, b as u64)).collect()
    }

    fn join_all(ty: MachType, parts: impl IntoIterator<Item = Self>) -> Self {
        parts.into_iter().fold(Self::bottom(ty), |acc, p| acc.join(&p))
    }

    fn either_bottom(&self, other: &Self) -> bool {
        self.is_bottom() || other.is_bottom()
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.either_bottom(other) {
            return Self::bottom(self.ty);
        }
        if self.cardinality() + other.cardinality() > self.ty.modulus() {
            return Self::full(self.ty);
        }
        let ((a, b), (c, d)) = (self.arc.unwrap(), other.arc.unwrap());
        Self::arc(self.ty, a.wrapping_add(c), b.wrapping_add(d))
    }

    pub fn sub(&self, other: &Self) -> Self {
        if self.either_bottom(other) {
            return Self::bottom(self.ty);
        }
        if self.cardinality() + other.cardinality() > self.ty.modulus() {
            return Self::full(self.ty);
        }
        let ((a, b), (c, d)) = (self.arc.unwrap(), other.arc.unwrap());
        Self::arc(self.ty, a.wrapping_sub(d), b.wrapping_sub(c))
    }

    fn mul_in(&self, other: &Self, signed: bool) -> Self {
        let ty = self.ty;
        let mut parts = Vec::new();
        for (a, b) in self.pieces(signed) {
            for &(c, d) in &other.pieces(signed) {
                let corners = [a.checked_mul(c), a.checked_mul(d), b.checked_mul(c), b.checked_mul(d)];
                parts.push(match corners.into_iter().collect::<Option<Vec<_>>>() {
                    Some(v) => Self::from_range(ty, *v.iter().min().unwrap(), *v.iter().max().unwrap()),
                    None => Self::full(ty),
                });
            }
        }
        Self::join_all(ty, parts)
    }

    /// Products are computed under both the unsigned and the signed reading
    /// of the operands; each is sound on its own, so their meet is too.
    pub fn mul(&self, other: &Self) -> Self {
        self.mul_in(other, false).meet(&self.mul_in(other, true))
    }

    /// Truncating division in the type's own order; faulting zero divisors
    /// are left out.
    pub fn div(&self, other: &Self) -> Self {
        let ty = self.ty;
        let mut divisors = Vec::new();
        for (c, d) in other.value_pieces() {
            if c < 0 {
                divisors.push((c, d.min(-1)));
            }
            if d > 0 {
                divisors.push((c.max(1), d));
            }
        }
        let mut parts = Vec::new();
        for (a, b) in self.value_pieces() {
            for &(c, d) in &divisors {
                let q = [a / c, a / d, b / c, b / d];
                parts.push(Self::from_range(ty, *q.iter().min().unwrap(), *q.iter().max().unwrap()));
            }
        }
        Self::join_all(ty, parts)
    }

    fn bitwise(&self, other: &Self, f: impl Fn(u64, u64, u64, u64, u64) -> (u64, u64)) -> Self {
        let ty = self.ty;
        let mut parts = Vec::new();
        for (a, b) in self.pattern_pieces() {
            for &(c, d) in &other.pattern_pieces() {
                let (lo, hi) = f(a, b, c, d, ty.mask());
                parts.push(Self::arc(ty, lo, hi));
            }
        }
        Self::join_all(ty, parts)
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

    /// Complement reverses the ring, so it maps arcs to arcs exactly.
    pub fn not(&self) -> Self {
        match self.arc {
            None => *self,
            Some(_) if self.is_full() => *self,
            Some((s, e)) => Self::arc(self.ty, !e, !s),
        }
    }

    pub fn cast(&self, to: MachType) -> Self {
        Self::join_all(to, self.value_pieces().into_iter().map(|(a, b)| Self::from_range(to, a, b)))
    }

    /// Shift amounts in `[0, w)` that `amount` may take.
    fn shift_amounts(&self, amount: &Self) -> Vec<u32> {
        let at = amount.ty;
        (0..self.ty.width() as u32)
            .filter(|&k| at.contains(k as i128) && amount.contains(k as i128))
            .collect()
    }

    pub fn shl(&self, amount: &Self) -> Self {
        let ty = self.ty;
        let mut parts = Vec::new();
        for k in self.shift_amounts(amount) {
            for (a, b) in self.pieces(false) {
                parts.push(Self::from_range(ty, a << k, b << k));
            }
        }
        Self::join_all(ty, parts)
    }

    pub fn shr(&self, amount: &Self) -> Self {
        let ty = self.ty;
        let mut parts = Vec::new();
        for k in self.shift_amounts(amount) {
            for (a, b) in self.value_pieces() {
                parts.push(Self::from_range(ty, a >> k, b >> k));
            }
        }
        Self::join_all(ty, parts)
    }

    /// Least and greatest member in the type's own order.
    pub fn hull(&self) -> Option<(i128, i128)> {
        let p = self.value_pieces();
        Some((p.iter().map(|x| x.0).min()?, p.iter().map(|x| x.1).max()?))
    }

    pub fn le(&self, other: &Self) -> BoolInterval {
        let (Some((a, b)), Some((c, d))) = (self.hull(), other.hull()) else {
            return BoolInterval::Bottom;
        };
        BoolInterval::from_possibilities(a <= d, b > c)
    }

    pub fn truth(&self) -> BoolInterval {
        if self.is_bottom() {
            return BoolInterval::Bottom;
        }
        BoolInterval::from_possibilities(self.singleton() != Some(0), self.contains(0))
    }

    /// `self ⊓ ⟨1, −1⟩`.
    pub fn nonzero(&self) -> Self {
        self.meet(&Self::arc(self.ty, 1, self.ty.mask()))
    }

    pub fn at_most(&self, c: i128) -> Self {
        if c < self.ty.min() {
            return Self::bottom(self.ty);
        }
        self.meet(&Self::from_values(self.ty, self.ty.min(), c.min(self.ty.max())))
    }

    pub fn at_least(&self, c: i128) -> Self {
        if c > self.ty.max() {
            return Self::bottom(self.ty);
        }
        self.meet(&Self::from_values(self.ty, c.max(self.ty.min()), self.ty.max()))
    }
}

impl fmt::Display for WrapInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ends() {
            None => f.write_str("bottom"),
            Some((lo, hi)) => write!(f, "<{lo}, {hi}>"),
        }
    }
}
