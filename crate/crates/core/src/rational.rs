//! Exact rational thresholds.
//!
//! Configuration values arrive as `f64`; every comparison between an edge
//! count and a threshold such as `(1 - eps) * alpha * p` is done on exact
//! rationals so that boundary cases never depend on rounding.

use num_rational::Ratio;

pub type Rational = Ratio<i128>;

const MAX_DENOMINATOR: i128 = 1_000_000;

/// Best rational approximation of `x` with denominator at most 10^6.
///
/// Decimal inputs with up to six fractional digits are represented exactly.
pub fn rational(x: f64) -> Rational {
    assert!(x.is_finite(), "non-finite parameter {x}");
    if x < 0.0 {
        return -rational(-x);
    }
    if x == 0.0 {
        return Rational::from_integer(0);
    }
    // Exact binary value n / d of x.
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let mut mant = (bits & ((1u64 << 52) - 1)) as i128;
    let shift = if exp == 0 {
        1 - 1075
    } else {
        mant |= 1 << 52;
        exp - 1075
    };
    if shift >= 0 {
        return Rational::from_integer(mant << shift.min(60));
    }
    let mut down = -shift;
    if down > 110 {
        mant >>= (down - 110).min(127);
        down = 110;
    }
    let (mut n, mut d) = (mant, 1i128 << down);
    let exact = Rational::new(n, d);
    if *exact.denom() <= MAX_DENOMINATOR {
        return exact;
    }
    // Limit the denominator via continued-fraction convergents.
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    loop {
        let a = n / d;
        let q2 = q0 + a * q1;
        if q2 > MAX_DENOMINATOR {
            break;
        }
        let p2 = p0 + a * p1;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let rem = n - a * d;
        n = d;
        d = rem;
        if d == 0 {
            break;
        }
    }
    let k = (MAX_DENOMINATOR - q0) / q1;
    let semi = Rational::new(p0 + k * p1, q0 + k * q1);
    let conv = Rational::new(p1, q1);
    if (to_f64(conv) - x).abs() <= (to_f64(semi) - x).abs() {
        conv
    } else {
        semi
    }
}

/// `ceil(x * n)` computed exactly on the rational form of `x`.
pub fn ceil_mul(x: f64, n: usize) -> usize {
    let v = rational(x) * Rational::from_integer(n as i128);
    v.ceil().to_integer().max(0) as usize
}

/// `ceil(r)` for a non-negative rational.
pub fn ceil_of(r: Rational) -> usize {
    r.ceil().to_integer().max(0) as usize
}

/// `floor(r)` for a non-negative rational.
pub fn floor_of(r: Rational) -> usize {
    r.floor().to_integer().max(0) as usize
}

/// Lower-regularity threshold `(1 - eps) * p` as an exact rational.
pub fn lower_threshold(eps: f64, p: f64) -> Rational {
    (Rational::from_integer(1) - rational(eps)) * rational(p)
}

/// True iff `edges / pairs < threshold`, exactly.
pub fn below(edges: u64, pairs: u64, threshold: Rational) -> bool {
    Rational::from_integer(edges as i128) < threshold * Rational::from_integer(pairs as i128)
}

pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_are_exact() {
        assert_eq!(rational(0.3), Rational::new(3, 10));
        assert_eq!(rational(0.35), Rational::new(7, 20));
        assert_eq!(rational(0.25), Rational::new(1, 4));
        assert_eq!(rational(1.0), Rational::from_integer(1));
        assert_eq!(rational(1.0 / 3.0), Rational::new(1, 3));
        assert_eq!(rational(2.5), Rational::new(5, 2));
    }

    #[test]
    fn irrational_close() {
        let x = 6.0 / 200f64.sqrt();
        assert!((to_f64(rational(x)) - x).abs() < 1e-9);
    }

    #[test]
    fn ceil_is_exact_at_boundaries() {
        // 0.3 * 10 is 3.0000000000000004 in floating point.
        assert_eq!(ceil_mul(0.3, 10), 3);
        assert_eq!(ceil_mul(0.25, 8), 2);
        assert_eq!(ceil_mul(0.25, 9), 3);
    }

    #[test]
    fn below_is_strict() {
        let t = lower_threshold(0.25, 1.0);
        assert!(!below(3, 4, t));
        assert!(below(2, 4, t));
    }
}
