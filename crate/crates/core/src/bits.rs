//! Short classical bit strings: measurement outcomes and channel messages.

use std::fmt;
use std::str::FromStr;

use crate::error::SimError;
use crate::statevec::MAX_QUBITS;

/// A bit string of length `1..=12`.
///
/// Character `i` of the textual form is bit `i`; the first character is the
/// most significant bit of [`Bits::value`]. `"10"` therefore has value 2.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Bits {
    value: u32,
    len: u8,
}

impl Bits {
    pub fn new(value: u32, len: usize) -> Result<Self, SimError> {
        if len == 0 || len > MAX_QUBITS {
            return Err(SimError::InvalidInput(format!(
                "bit string length {len} outside 1..={MAX_QUBITS}"
            )));
        }
        if value >> len != 0 {
            return Err(SimError::InvalidInput(format!(
                "value {value} does not fit in {len} bits"
            )));
        }
        Ok(Self {
            value,
            len: len as u8,
        })
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn len(self) -> usize {
        self.len as usize
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    /// Bit at textual position `i` (0 = leftmost).
    pub fn bit(self, i: usize) -> bool {
        assert!(i < self.len(), "bit index {i} out of range");
        (self.value >> (self.len() - 1 - i)) & 1 == 1
    }

    pub fn iter(self) -> impl Iterator<Item = bool> {
        (0..self.len()).map(move |i| self.bit(i))
    }

    /// Bitwise XOR with a mask of equal length.
    pub fn xor(self, mask: Bits) -> Bits {
        assert_eq!(self.len, mask.len, "xor of bit strings of unequal length");
        Bits {
            value: self.value ^ mask.value,
            len: self.len,
        }
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self, SimError> {
        let value = bits.iter().fold(0u32, |acc, &b| (acc << 1) | u32::from(b));
        Self::new(value, bits.len())
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bits {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(SimError::InvalidInput(format!(
                    "bit string {s:?} contains {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_bools(&bits)
    }
}
