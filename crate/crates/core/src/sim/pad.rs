use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};

/// Index in `[1 : modulus]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PadIndex {
    value: u64,
    modulus: u64,
}

impl PadIndex {
    pub fn new(value: u64, modulus: u64) -> Result<Self> {
        if modulus == 0 || value == 0 || value > modulus {
            return usage(format!("pad index {value} outside [1 : {modulus}]"));
        }
        Ok(Self { value, modulus })
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }
}

/// `(m + k) mod M`, with `0` mapped to `M`.
pub fn one_time_pad(m: PadIndex, k: PadIndex) -> Result<PadIndex> {
    if m.modulus != k.modulus {
        return usage(format!("pad moduli differ: {} vs {}", m.modulus, k.modulus));
    }
    let r = ((m.value as u128 + k.value as u128) % m.modulus as u128) as u64;
    Ok(PadIndex { value: if r == 0 { m.modulus } else { r }, modulus: m.modulus })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pad(m: u64, k: u64, modulus: u64) -> u64 {
        one_time_pad(PadIndex::new(m, modulus).unwrap(), PadIndex::new(k, modulus).unwrap()).unwrap().value()
    }

    #[test]
    fn examples() {
        assert_eq!(pad(3, 8, 8), 3);
        assert_eq!(pad(7, 3, 8), 2);
        assert_eq!(pad(5, 3, 8), 8);
        assert_eq!(pad(u64::MAX, u64::MAX, u64::MAX), u64::MAX);
    }

    #[test]
    fn rejects() {
        assert!(PadIndex::new(0, 8).is_err());
        assert!(PadIndex::new(9, 8).is_err());
        assert!(PadIndex::new(1, 0).is_err());
        let a = PadIndex::new(1, 8).unwrap();
        let b = PadIndex::new(1, 4).unwrap();
        assert!(one_time_pad(a, b).is_err());
    }
}
