//! Bits and short bit strings.
//!
//! Every input, output, tape and message handled by the simulator is a
//! short string of bits. [`Symbol`] packs up to 16 of them, first component
//! in the most significant position, so that the derived numeric order is
//! the lexicographic order on components.

use std::fmt;
use std::ops::{BitAnd, BitXor, Not};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bit(bool);

impl Bit {
    pub const ZERO: Bit = Bit(false);
    pub const ONE: Bit = Bit(true);

    pub const fn from_bool(b: bool) -> Self {
        Bit(b)
    }

    /// Panics unless `v` is 0 or 1.
    pub fn from_u8(v: u8) -> Self {
        match v {
            0 => Bit::ZERO,
            1 => Bit::ONE,
            _ => panic!("bit value {v} is not 0 or 1"),
        }
    }

    pub const fn as_bool(self) -> bool {
        self.0
    }

    pub const fn as_u8(self) -> u8 {
        self.0 as u8
    }

    pub const fn as_usize(self) -> usize {
        self.0 as usize
    }

    pub fn both() -> [Bit; 2] {
        [Bit::ZERO, Bit::ONE]
    }
}

impl BitXor for Bit {
    type Output = Bit;
    fn bitxor(self, rhs: Bit) -> Bit {
        Bit(self.0 ^ rhs.0)
    }
}

impl BitAnd for Bit {
    type Output = Bit;
    fn bitand(self, rhs: Bit) -> Bit {
        Bit(self.0 & rhs.0)
    }
}

impl Not for Bit {
    type Output = Bit;
    fn not(self) -> Bit {
        Bit(!self.0)
    }
}

impl From<bool> for Bit {
    fn from(b: bool) -> Self {
        Bit(b)
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

impl Serialize for Bit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.as_u8())
    }
}

impl<'de> Deserialize<'de> for Bit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(Bit::ZERO),
            1 => Ok(Bit::ONE),
            v => Err(serde::de::Error::custom(format!("bit out of range: {v}"))),
        }
    }
}

/// Maximum number of components in a [`Symbol`].
pub const MAX_SYMBOL_LEN: u8 = 16;

/// A fixed-length string of bits. The empty string is the null symbol.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Symbol {
    len: u8,
    bits: u16,
}

impl Symbol {
    pub const NULL: Symbol = Symbol { len: 0, bits: 0 };

    pub fn bit(b: Bit) -> Self {
        Symbol {
            len: 1,
            bits: b.as_u8() as u16,
        }
    }

    pub fn pair(first: Bit, second: Bit) -> Self {
        Symbol::from_bits(&[first, second])
    }

    pub fn from_bits(bits: &[Bit]) -> Self {
        assert!(bits.len() <= MAX_SYMBOL_LEN as usize, "symbol too long");
        let packed = bits
            .iter()
            .fold(0u16, |acc, b| (acc << 1) | b.as_u8() as u16);
        Symbol {
            len: bits.len() as u8,
            bits: packed,
        }
    }

    /// Symbol of length `len` whose components spell `index` in binary.
    pub fn from_index(len: u8, index: usize) -> Self {
        assert!(len <= MAX_SYMBOL_LEN, "symbol too long");
        assert!(index < (1usize << len), "index {index} needs more than {len} bits");
        Symbol {
            len,
            bits: index as u16,
        }
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(self) -> usize {
        self.len as usize
    }

    pub fn is_null(self) -> bool {
        self.len == 0
    }

    pub fn index(self) -> usize {
        self.bits as usize
    }

    /// Component `i`, counted from the left.
    pub fn get(self, i: usize) -> Bit {
        assert!(i < self.len(), "component {i} of a {}-bit symbol", self.len);
        Bit::from_bool((self.bits >> (self.len as usize - 1 - i)) & 1 == 1)
    }

    pub fn iter(self) -> impl Iterator<Item = Bit> {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn to_bits(self) -> Vec<Bit> {
        self.iter().collect()
    }

    pub fn concat(self, other: Symbol) -> Symbol {
        assert!(self.len + other.len <= MAX_SYMBOL_LEN, "symbol too long");
        Symbol {
            len: self.len + other.len,
            bits: (self.bits << other.len) | other.bits,
        }
    }

    pub fn with_flipped(self, i: usize) -> Symbol {
        assert!(i < self.len());
        Symbol {
            len: self.len,
            bits: self.bits ^ (1 << (self.len as usize - 1 - i)),
        }
    }

    /// All symbols of the given length in canonical order.
    pub fn all(len: u8) -> impl Iterator<Item = Symbol> {
        (0..(1usize << len)).map(move |i| Symbol::from_index(len, i))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_null() {
            return f.write_str("-");
        }
        for b in self.iter() {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symbol({self})")
    }
}

impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s == "-" || s.is_empty() || s == "null" {
            return Ok(Symbol::NULL);
        }
        if s.len() > MAX_SYMBOL_LEN as usize {
            return Err(Error::BadSymbol(s.to_string()));
        }
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(Bit::ZERO),
                '1' => Ok(Bit::ONE),
                _ => Err(Error::BadSymbol(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Symbol::from_bits(&bits))
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_null() {
            s.serialize_none()
        } else {
            s.collect_str(self)
        }
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Option::<String>::deserialize(d)? {
            None => Ok(Symbol::NULL),
            Some(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}
