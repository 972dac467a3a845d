//! Exact comparisons of welfare products.
//!
//! Products of small integer values are compared in `u128`; if either side
//! overflows, the comparison falls back to log space with a `1e-9` slack.

use std::cmp::Ordering;

const LOG_SLACK: f64 = 1e-9;

/// Product of a list of non-negative integer factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Product {
    Exact(u128),
    /// Natural log of a positive product too large for `u128`.
    Log(f64),
}

impl Product {
    pub fn of<T: Copy + Into<u64>>(factors: &[T]) -> Self {
        let mut acc: u128 = 1;
        for &f in factors {
            let f: u64 = f.into();
            if f == 0 {
                return Product::Exact(0);
            }
            match acc.checked_mul(u128::from(f)) {
                Some(next) => acc = next,
                None => {
                    return Product::Log(factors.iter().map(|&f| (f.into() as f64).ln()).sum());
                }
            }
        }
        Product::Exact(acc)
    }

    pub fn is_zero(self) -> bool {
        self == Product::Exact(0)
    }

    fn ln(self) -> f64 {
        match self {
            Product::Exact(0) => f64::NEG_INFINITY,
            Product::Exact(v) => (v as f64).ln(),
            Product::Log(l) => l,
        }
    }

    /// Total order; exact when both sides fit.
    pub fn compare(self, other: Product) -> Ordering {
        match (self, other) {
            (Product::Exact(a), Product::Exact(b)) => a.cmp(&b),
            (a, b) => a.ln().total_cmp(&b.ln()),
        }
    }

    /// `self >= other`, with log-space slack when inexact.
    pub fn ge(self, other: Product) -> bool {
        match (self, other) {
            (Product::Exact(a), Product::Exact(b)) => a >= b,
            (_, Product::Exact(0)) => true,
            (Product::Exact(0), _) => false,
            (a, b) => a.ln() >= b.ln() - LOG_SLACK,
        }
    }
}

/// `∏ lhs >= ∏ rhs`.
pub fn product_ge(lhs: &[u64], rhs: &[u64]) -> bool {
    Product::of(lhs).ge(Product::of(rhs))
}

/// `sw · (3 + 2√2) >= opt`, decided without floating point.
///
/// Equivalent to `opt - 3·sw <= 2√2·sw`, which after squaring the
/// non-negative sides reads `(opt - 3·sw)² <= 8·sw²`.
pub fn sw_within_3_plus_2sqrt2(sw: u64, opt: u64) -> bool {
    let (sw, opt) = (u128::from(sw), u128::from(opt));
    if opt <= 3 * sw {
        return true;
    }
    let gap = opt - 3 * sw;
    gap * gap <= 8 * sw * sw
}

/// `(num/den) · value` compared against `threshold` exactly: `value·den >= num·threshold`.
pub fn scaled_ge(value: u64, num: u64, den: u64, threshold: u64) -> bool {
    u128::from(value) * u128::from(den) >= u128::from(num) * u128::from(threshold)
}
