//! Zero-classification policy for floating-point geometry.
//!
//! An order-`k` Gram-type determinant scales like the `k`-th power of its
//! entries, so comparisons against zero are normalized by `max(1, m^k)`
//! where `m` is the largest absolute entry of the matrix.

use serde::{Deserialize, Serialize};

pub const DEFAULT_REL_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    pub rel_eps: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            rel_eps: DEFAULT_REL_EPS,
        }
    }
}

impl TolerancePolicy {
    /// Panics if `rel_eps` is not a positive finite number.
    pub fn new(rel_eps: f64) -> Self {
        assert!(
            rel_eps.is_finite() && rel_eps > 0.0,
            "rel_eps must be positive, got {rel_eps}"
        );
        Self { rel_eps }
    }

    pub fn scale(max_entry: f64, order: usize) -> f64 {
        let order = i32::try_from(order).unwrap_or(i32::MAX);
        max_entry.abs().powi(order).max(1.0)
    }

    /// Absolute threshold for an order-`order` quantity whose largest input entry is `max_entry`.
    pub fn threshold(&self, max_entry: f64, order: usize) -> f64 {
        self.rel_eps * Self::scale(max_entry, order)
    }

    pub fn is_zero(&self, value: f64, max_entry: f64, order: usize) -> bool {
        value.abs() <= self.threshold(max_entry, order)
    }

    pub fn sign(&self, value: f64, max_entry: f64, order: usize) -> Sign {
        if self.is_zero(value, max_entry, order) {
            Sign::Zero
        } else if value > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_never_drops_below_one() {
        assert_eq!(TolerancePolicy::scale(0.1, 3), 1.0);
        assert_eq!(TolerancePolicy::scale(10.0, 2), 100.0);
        assert_eq!(TolerancePolicy::scale(-2.0, 3), 8.0);
    }

    #[test]
    fn classification_scales_with_order() {
        let tol = TolerancePolicy::default();
        // 1e-6 is small relative to 1e4^2 = 1e8 but not relative to 1.
        assert!(tol.is_zero(1e-2, 1e4, 2));
        assert!(!tol.is_zero(1e-2, 1.0, 2));
        assert_eq!(tol.sign(-1.0, 1.0, 1), Sign::Negative);
        assert_eq!(tol.sign(1e-12, 1.0, 1), Sign::Zero);
    }

    #[test]
    #[should_panic]
    fn rejects_nonpositive_eps() {
        TolerancePolicy::new(0.0);
    }
}
