use std::fmt;

/// Three-valued truth: `[0,0]`, `[1,1]`, `[0,1]`, plus Bottom for guards
/// evaluated in unreachable states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoolInterval {
    Bottom,
    False,
    True,
    Maybe,
}

impl BoolInterval {
    pub fn from_bool(b: bool) -> Self {
        if b {
            BoolInterval::True
        } else {
            BoolInterval::False
        }
    }

    /// From "some member is true" / "some member is false".
    pub fn from_possibilities(can_true: bool, can_false: bool) -> Self {
        match (can_true, can_false) {
            (true, true) => BoolInterval::Maybe,
            (true, false) => BoolInterval::True,
            (false, true) => BoolInterval::False,
            (false, false) => BoolInterval::Bottom,
        }
    }

    pub fn can_be_true(self) -> bool {
        matches!(self, BoolInterval::True | BoolInterval::Maybe)
    }

    pub fn can_be_false(self) -> bool {
        matches!(self, BoolInterval::False | BoolInterval::Maybe)
    }

    pub fn contains(self, b: bool) -> bool {
        if b {
            self.can_be_true()
        } else {
            self.can_be_false()
        }
    }

    pub fn not(self) -> Self {
        Self::from_possibilities(self.can_be_false(), self.can_be_true())
    }

    pub fn and(self, other: Self) -> Self {
        if self == BoolInterval::Bottom || other == BoolInterval::Bottom {
            return BoolInterval::Bottom;
        }
        Self::from_possibilities(
            self.can_be_true() && other.can_be_true(),
            self.can_be_false() || other.can_be_false(),
        )
    }

    pub fn join(self, other: Self) -> Self {
        Self::from_possibilities(
            self.can_be_true() || other.can_be_true(),
            self.can_be_false() || other.can_be_false(),
        )
    }

    pub fn meet(self, other: Self) -> Self {
        Self::from_possibilities(
            self.can_be_true() && other.can_be_true(),
            self.can_be_false() && other.can_be_false(),
        )
    }

    /// `(lo, hi)` as integers, `None` for Bottom.
    pub fn bounds(self) -> Option<(i128, i128)> {
        match self {
            BoolInterval::Bottom => None,
            BoolInterval::False => Some((0, 0)),
            BoolInterval::True => Some((1, 1)),
            BoolInterval::Maybe => Some((0, 1)),
        }
    }
}

impl fmt::Display for BoolInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bounds() {
            None => f.write_str("bottom"),
            Some((lo, hi)) => write!(f, "[{lo}, {hi}]"),
        }
    }
}
