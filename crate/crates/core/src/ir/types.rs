use std::fmt;
use std::str::FromStr;

/// A machine integer type: signedness plus a bit width in `1..=64`.
///
/// Concrete values are carried as `i128` so that every signed and unsigned
/// 64-bit value fits, and products of two in-range values never lose their
/// sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MachType {
    signed: bool,
    width: u8,
}

impl MachType {
    pub const MAX_WIDTH: u8 = 64;
    /// Default type of literals with no typed partner.
    pub const S32: MachType = MachType { signed: true, width: 32 };
    pub const S64: MachType = MachType { signed: true, width: 64 };
    pub const U64: MachType = MachType { signed: false, width: 64 };

    pub fn new(signed: bool, width: u8) -> Option<Self> {
        (1..=Self::MAX_WIDTH)
            .contains(&width)
            .then_some(MachType { signed, width })
    }

    pub fn signed(width: u8) -> Self {
        Self::new(true, width).expect("width out of range")
    }

    pub fn unsigned(width: u8) -> Self {
        Self::new(false, width).expect("width out of range")
    }

    pub fn is_signed(self) -> bool {
        self.signed
    }

    pub fn width(self) -> u8 {
        self.width
    }

    /// Number of representable values, `2^w`.
    pub fn modulus(self) -> u128 {
        1u128 << self.width
    }

    /// All-ones pattern of the type's width.
    pub fn mask(self) -> u64 {
        if self.width == 64 {
            u64::MAX
        } else {
            (1u64 << self.width) - 1
        }
    }

    pub fn min(self) -> i128 {
        if self.signed {
            -(1i128 << (self.width - 1))
        } else {
            0
        }
    }

    pub fn max(self) -> i128 {
        if self.signed {
            (1i128 << (self.width - 1)) - 1
        } else {
            (1i128 << self.width) - 1
        }
    }

    pub fn contains(self, v: i128) -> bool {
        self.min() <= v && v <= self.max()
    }

    /// Reduce an arbitrary integer into the type's range modulo `2^w`
    /// (two's-complement reinterpretation for signed types).
    pub fn wrap(self, v: i128) -> i128 {
        self.from_pattern((v as u128 as u64) & self.mask())
    }

    /// Bit pattern of an in-range value.
    pub fn to_pattern(self, v: i128) -> u64 {
        (v as u64) & self.mask()
    }

    /// Value denoted by a `w`-bit pattern.
    pub fn from_pattern(self, p: u64) -> i128 {
        let p = p & self.mask();
        if self.signed && (p >> (self.width - 1)) & 1 == 1 {
            p as i128 - (1i128 << self.width)
        } else {
            p as i128
        }
    }

    /// Iterate every value of the type in increasing order. Only sensible
    /// for small widths.
    pub fn values(self) -> impl Iterator<Item = i128> {
        self.min()..=self.max()
    }
}

impl fmt::Display for MachType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.signed { 's' } else { 'u' }, self.width)
    }
}

impl FromStr for MachType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let signed = match s.as_bytes().first() {
            Some(b's') => true,
            Some(b'u') => false,
            _ => return Err(format!("invalid type `{s}`")),
        };
        let width: u8 = s[1..]
            .parse()
            .map_err(|_| format!("invalid type width in `{s}`"))?;
        MachType::new(signed, width).ok_or_else(|| format!("type width must be in 1..=64, got `{s}`"))
    }
}
