use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Two-sided exact binomial test with success chance 1/2:
/// `min(1, 2 * sum_{i=uc1..n} C(n, i) / 2^n)` where `n = uc1 + uc2`.
///
/// By symmetry the tail equals `sum_{j=0..uc2} C(n, j)`, so only `uc2 + 1`
/// terms are summed. Callers pass `uc1 >= uc2`; the arguments are swapped
/// otherwise.
pub fn binomial_p_value(uc1: u64, uc2: u64) -> f64 {
    let (hi, lo) = if uc1 >= uc2 { (uc1, uc2) } else { (uc2, uc1) };
    let n = hi + lo;
    if n == 0 {
        return 1.0;
    }
    if hi == lo {
        // The two tails overlap and cover everything.
        return 1.0;
    }
    let mut term = BigUint::one();
    let mut tail = BigUint::one();
    for j in 1..=lo {
        term = term * (n - j + 1) / j;
        tail += &term;
    }
    // 2 * tail / 2^n, with the division carried out on a scaled integer so
    // large n does not overflow f64 before the ratio is taken.
    let numerator = tail << 1u32;
    ratio(&numerator, n).min(1.0)
}

/// `x / 2^shift` as f64 without intermediate overflow.
fn ratio(x: &BigUint, shift: u64) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let bits = x.bits();
    // Keep the top 64 bits; the rest only affects rounding beyond f64 precision.
    let drop = bits.saturating_sub(64);
    let top = (x >> drop).to_u64().expect("fits") as f64;
    let exp = drop as i64 - shift as i64;
    let exp = exp.clamp(-4000, 4000) as i32;
    // Two steps so a subnormal result is not flushed to zero early.
    top * 2f64.powi(exp / 2) * 2f64.powi(exp - exp / 2)
}
