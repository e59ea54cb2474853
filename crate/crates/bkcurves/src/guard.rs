//! Enumeration guard: a configurable cap on the size of fields the
//! library will exhaustively enumerate.

use num_bigint::BigUint;

/// Caps `p^n` for every operation that enumerates field elements or
/// rational points. Construction of a [`crate::FieldCtx`] itself is not
/// guarded; only enumerative use is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guard {
    /// Enumerations are refused when `p^n > 2^max_field_log2`.
    pub max_field_log2: u32,
}

impl Default for Guard {
    fn default() -> Self {
        Guard { max_field_log2: 26 }
    }
}

/// Error raised when a guarded operation would exceed the cap.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("field of size {p}^{n} exceeds the enumeration guard 2^{max_log2}")]
pub struct GuardExceeded {
    pub p: u64,
    pub n: u32,
    pub max_log2: u32,
}

impl Guard {
    pub fn new(max_field_log2: u32) -> Self {
        Guard { max_field_log2 }
    }

    /// Check that `p^n` is within the cap.
    pub fn check(&self, p: u64, n: u32) -> Result<(), GuardExceeded> {
        let size = BigUint::from(p).pow(n);
        if size.bits() > u64::from(self.max_field_log2) + 1 {
            return Err(GuardExceeded { p, n, max_log2: self.max_field_log2 });
        }
        // bits() == max+1 still allows exactly 2^max
        if size > (BigUint::from(1u8) << self.max_field_log2) {
            return Err(GuardExceeded { p, n, max_log2: self.max_field_log2 });
        }
        Ok(())
    }

    /// Whether `p^n` is within the cap.
    pub fn allows(&self, p: u64, n: u32) -> bool {
        self.check(p, n).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_cap_is_2_26() {
        let g = Guard::default();
        assert!(g.allows(3, 9)); // 19683
        assert!(g.allows(2, 26));
        assert!(!g.allows(3, 17)); // 129 million
        assert!(!g.allows(2, 27));
    }

    #[test]
    fn tight_cap() {
        let g = Guard::new(10);
        assert!(g.allows(3, 6)); // 729
        assert!(!g.allows(3, 7)); // 2187 > 1024
    }
}
