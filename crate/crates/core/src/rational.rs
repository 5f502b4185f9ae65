//! Exact rational arithmetic helpers.
//!
//! All cone algebra runs over arbitrary-precision rationals; floating point
//! appears only at the membership boundary. `num-rational` already keeps
//! values reduced with a positive denominator, which is exactly the
//! representation the cone code needs.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar used throughout the cone and LP code.
pub type Rat = BigRational;

pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub fn rat_zero() -> Rat {
    Rat::zero()
}

/// Exact conversion: every finite f64 is a dyadic rational.
pub fn rat_from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

/// Dyadic rounding: round(x * 2^bits) / 2^bits. Used when a caller wants a
/// rational of bounded size rather than the exact 53-bit mantissa value.
pub fn rat_dyadic(x: f64, bits: u32) -> Option<Rat> {
    if !x.is_finite() {
        return None;
    }
    let scale = (x * (2f64.powi(bits as i32))).round();
    let num = Rat::from_float(scale)?;
    Some(num / Rat::from_integer(BigInt::from(1u64) << bits))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Divide an integer vector by the gcd of its entries (sign preserved).
/// Returns false when the vector is identically zero.
pub fn normalize_int_vec(coeffs: &mut [BigInt]) -> bool {
    let mut g = BigInt::zero();
    for c in coeffs.iter() {
        g = g.gcd(c);
    }
    if g.is_zero() {
        return false;
    }
    if !g.is_one() {
        for c in coeffs.iter_mut() {
            *c = &*c / &g;
        }
    }
    true
}

/// Clear denominators of a rational vector into the smallest integer vector
/// with the same direction (sign preserved, entries coprime).
pub fn rationals_to_int_vec(coeffs: &[Rat]) -> Option<Vec<BigInt>> {
    let mut lcm = BigInt::from(1);
    for c in coeffs {
        lcm = lcm.lcm(c.denom());
    }
    let mut out: Vec<BigInt> = coeffs
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();
    if normalize_int_vec(&mut out) {
        Some(out)
    } else {
        None
    }
}

/// L1 norm of an integer vector as f64, for relative-violation reporting.
pub fn int_vec_l1(coeffs: &[BigInt]) -> f64 {
    coeffs
        .iter()
        .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
        .sum()
}
