//! Exact textual rendering of rationals.
//!
//! A reduced fraction whose denominator has no prime factors other than 2
//! and 5 has a finite decimal expansion and is printed that way (`85.5`).
//! Anything else is printed as `p/q` rather than rounded.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn render(value: &BigRational) -> String {
    let numer = value.numer();
    let denom = value.denom();
    if denom.is_one() {
        return numer.to_string();
    }

    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut rest = denom.clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    while rest.is_multiple_of(&two) {
        rest /= &two;
        twos += 1;
    }
    while rest.is_multiple_of(&five) {
        rest /= &five;
        fives += 1;
    }
    if !rest.is_one() {
        return format!("{numer}/{denom}");
    }

    let digits = twos.max(fives);
    let scaled = (numer.abs() * BigInt::from(10).pow(digits)) / denom;
    let scale = BigInt::from(10).pow(digits);
    let (int_part, frac_part) = scaled.div_rem(&scale);
    let mut frac = frac_part.to_string();
    while frac.len() < digits as usize {
        frac.insert(0, '0');
    }
    let frac = frac.trim_end_matches('0');
    let sign = if numer.is_negative() { "-" } else { "" };
    if frac.is_empty() || frac_part.is_zero() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac}")
    }
}
