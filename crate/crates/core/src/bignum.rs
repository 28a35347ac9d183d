//! Lossless-enough conversions from arbitrary-precision counts to f64.
//!
//! Pebble counts grow past any float range, so ratios are formed from the top
//! 54 bits of numerator and denominator plus an exact power-of-two rescale.
//! Relative error is a few ulps regardless of magnitude.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// `num/den` as f64. Returns 0.0 for a zero numerator; ratios below the f64
/// subnormal range underflow to 0.0.
pub fn big_ratio_f64(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    debug_assert!(!den.is_zero());
    let nb = num.bits();
    let db = den.bits();
    let ns = nb.saturating_sub(54);
    let ds = db.saturating_sub(54);
    let nm = (num >> ns).to_u64().expect("54-bit mantissa") as f64;
    let dm = (den >> ds).to_u64().expect("54-bit mantissa") as f64;
    (nm / dm) * 2f64.powi((ns as i64 - ds as i64) as i32)
}

/// Scales a row of exact counts to a unit-L2 f64 vector.
pub fn normalized_unit_l2(row: &[BigUint]) -> Vec<f64> {
    let max = match row.iter().max() {
        Some(m) if !m.is_zero() => m,
        _ => return vec![0.0; row.len()],
    };
    let mut vals: Vec<f64> = row.iter().map(|c| big_ratio_f64(c, max)).collect();
    let norm = vals.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in &mut vals {
        *v /= norm;
    }
    vals
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ratio_exact() {
        let a = BigUint::from(10u32);
        let b = BigUint::from(30u32);
        assert!((big_ratio_f64(&a, &b) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn huge_operands() {
        let a = BigUint::from(7u32).pow(900);
        let b = BigUint::from(7u32).pow(900) * BigUint::from(3u32);
        assert!((big_ratio_f64(&a, &b) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn tiny_ratio_keeps_precision() {
        // 1 / 2^400: far below what a direct to_f64 division of scaled
        // integers would keep, still fine here.
        let a = BigUint::from(1u32);
        let b = BigUint::from(1u32) << 400;
        let r = big_ratio_f64(&a, &b);
        assert!((r - 2f64.powi(-400)).abs() < 1e-136);
    }

    #[test]
    fn normalization_is_unit() {
        let row: Vec<BigUint> = [3u32, 4, 12].iter().map(|&x| BigUint::from(x)).collect();
        let v = normalized_unit_l2(&row);
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
        assert!((v[0] / v[1] - 0.75).abs() < 1e-12);
    }
}
