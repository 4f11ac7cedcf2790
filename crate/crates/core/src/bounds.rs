//! Real-valued bounds compared against integer set sizes.
//!
//! A set size `s` meets a lower bound `b` iff `s >= ceil(b - TOL)`, and
//! meets an upper bound iff `s <= floor(b + TOL)`, so that values such as
//! `1000^(1/3)` evaluate to the integer they denote.

pub const TOL: f64 = 1e-9;

pub fn pow(mu: usize, exponent: f64) -> f64 {
    (mu as f64).powf(exponent)
}

/// Smallest integer not below `x` (up to `TOL`), clamped at zero.
pub fn ceil_tol(x: f64) -> usize {
    (x - TOL).ceil().max(0.0) as usize
}

/// Largest integer not above `x` (up to `TOL`), clamped at zero.
pub fn floor_tol(x: f64) -> usize {
    (x + TOL).floor().max(0.0) as usize
}

pub fn at_least(size: usize, bound: f64) -> bool {
    size as f64 >= (bound - TOL).ceil()
}

pub fn at_most(size: usize, bound: f64) -> bool {
    size as f64 <= (bound + TOL).floor()
}

/// `ceil(μ / 7)`, at least 1.
pub fn seventh(mu: usize) -> usize {
    mu.div_ceil(7).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_absorbs_float_noise() {
        assert_eq!(ceil_tol(pow(1000, 1.0 / 3.0)), 10);
        assert_eq!(floor_tol(pow(1000, 1.0 / 3.0)), 10);
        assert!(at_least(10, pow(1000, 1.0 / 3.0)));
        assert!(at_most(10, pow(1000, 1.0 / 3.0)));
        assert!(!at_least(4, 4.2));
        assert!(at_most(4, 4.9));
        assert_eq!(ceil_tol(-3.0), 0);
    }

    #[test]
    fn seventh_degenerate() {
        assert_eq!(seventh(0), 1);
        assert_eq!(seventh(6), 1);
        assert_eq!(seventh(7), 1);
        assert_eq!(seventh(8), 2);
        assert_eq!(seventh(70), 10);
    }
}
