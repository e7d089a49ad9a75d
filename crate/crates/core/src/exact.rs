//! Exact integer/rational arithmetic for the audit comparisons.
//!
//! Every bound checked in this crate is either a rational (compared exactly)
//! or a rational times a power of a transcendental constant. The constants
//! are carried as [`RatInterval`]s: certified rational enclosures with
//! directed rounding, so a comparison against an interval endpoint is a
//! mathematically valid statement about the true value.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `n!`
pub fn factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 2..=n {
        acc *= i;
    }
    acc
}

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Falling factorial `(n)_k = n (n-1) ... (n-k+1)`, zero when `k > n`.
pub fn falling(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
    }
    acc
}

pub fn big_to_rational(x: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

pub fn rational_of(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// A certified enclosure `lo <= x <= hi` of a nonnegative real.
///
/// Arithmetic on intervals is exact rational arithmetic on the endpoints;
/// widths only ever come from the seeded constants, never from rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(!lo.is_negative() && lo <= hi);
        Self { lo, hi }
    }

    /// Degenerate interval holding an exactly known value.
    pub fn exact(x: BigRational) -> Self {
        Self {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn from_integer(x: BigUint) -> Self {
        Self::exact(big_to_rational(x))
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(&self.lo * &other.lo, &self.hi * &other.hi)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        debug_assert!(!c.is_negative());
        Self::new(&self.lo * c, &self.hi * c)
    }

    pub fn pow(&self, k: u32) -> Self {
        Self::new(pow_rational(&self.lo, k), pow_rational(&self.hi, k))
    }

    /// True when `x <= lo`, i.e. `x` is certainly at most the enclosed value.
    pub fn certainly_at_least(&self, x: &BigRational) -> bool {
        *x <= self.lo
    }

    /// True when `x <= hi`; the negation certifies a strict violation
    /// `x >` enclosed value.
    pub fn possibly_at_least(&self, x: &BigRational) -> bool {
        *x <= self.hi
    }

    pub fn to_f64(&self) -> f64 {
        self.hi.to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }
}

/// Certifies `|a - b| < tol` for enclosed reals; conservative, so a wide
/// enclosure can fail the check but never wrongly pass it.
pub fn certainly_within(a: &RatInterval, b: &RatInterval, tol: &BigRational) -> bool {
    &a.hi - &b.lo < *tol && &b.hi - &a.lo < *tol
}

pub fn pow_rational(x: &BigRational, k: u32) -> BigRational {
    let mut acc = BigRational::one();
    let mut base = x.clone();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        k >>= 1;
    }
    acc
}

/// Decimal digits kept when enclosing irrational constants and roots.
pub const ROOT_DIGITS: u32 = 40;

/// Euler's constant `e` enclosed to 40 significant digits.
pub fn euler_interval() -> RatInterval {
    // 2.718281828459045235360287471352662497757|2...
    let num: BigUint = "2718281828459045235360287471352662497757"
        .parse()
        .unwrap();
    let den = BigUint::from(10u32).pow(39);
    RatInterval::new(
        BigRational::new(num.clone().into(), den.clone().into()),
        BigRational::new((num + BigUint::one()).into(), den.into()),
    )
}

/// Enclosure of the real `r`-th root of a nonnegative rational, one unit wide
/// in the last of `digits` decimal places.
pub fn nth_root_interval(x: &BigRational, r: u32, digits: u32) -> RatInterval {
    assert!(r >= 1 && !x.is_negative());
    let scale = BigUint::from(10u32).pow(digits);
    // floor(x * scale^r), then its integer r-th root t satisfies
    // t <= root(x)*scale < t + 1.
    let scaled = x.numer().to_biguint().unwrap() * scale.pow(r)
        / x.denom().to_biguint().unwrap();
    let t = scaled.nth_root(r);
    RatInterval::new(
        BigRational::new(t.clone().into(), BigInt::from(scale.clone())),
        BigRational::new((t + BigUint::one()).into(), BigInt::from(scale)),
    )
}

/// Enclosure of the square root of an enclosed nonnegative real.
pub fn sqrt_interval(x: &RatInterval, digits: u32) -> RatInterval {
    RatInterval::new(
        nth_root_interval(&x.lo, 2, digits).lo,
        nth_root_interval(&x.hi, 2, digits).hi,
    )
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    // At the boundaries the exact interval endpoint is the boundary itself;
    // keep it there instead of a float ulp inside.
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

/// Sample mean and (population-denominator n) standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorial_binomial_falling() {
        assert_eq!(factorial(0), BigUint::one());
        assert_eq!(factorial(6), BigUint::from(720u32));
        assert_eq!(binomial(14, 7), BigUint::from(3432u32));
        assert_eq!(binomial(5, 9), BigUint::zero());
        assert_eq!(falling(7, 3), BigUint::from(210u32));
        assert_eq!(falling(3, 7), BigUint::zero());
        // Pascal cross-check on a block of the triangle.
        for n in 1..25u64 {
            for k in 1..n {
                assert_eq!(
                    binomial(n, k),
                    binomial(n - 1, k - 1) + binomial(n - 1, k)
                );
            }
        }
    }

    #[test]
    fn euler_enclosure_is_tight() {
        let e = euler_interval();
        assert!(e.lo < e.hi);
        let w = e.width();
        assert_eq!(w, BigRational::new(1.into(), BigInt::from(BigUint::from(10u32).pow(39))));
        let f = e.to_f64();
        assert!((f - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn nth_root_brackets_the_root() {
        // 14th root of 2/720, the spread constant at n = 7.
        let x = rational_of(2, 720);
        let iv = nth_root_interval(&x, 14, 40);
        assert!(iv.lo < iv.hi);
        let f = iv.to_f64();
        let expect = (2.0f64 / 720.0).powf(1.0 / 14.0);
        assert!((f - expect).abs() < 1e-12);
        // The enclosure really brackets: lo^14 <= x <= hi^14.
        assert!(pow_rational(&iv.lo, 14) <= x);
        assert!(pow_rational(&iv.hi, 14) >= x);
    }

    #[test]
    fn sqrt_of_perfect_square_is_tight() {
        let four = RatInterval::exact(BigRational::from_integer(4.into()));
        let s = sqrt_interval(&four, 30);
        assert!(s.lo <= BigRational::from_integer(2.into()));
        assert!(s.hi >= BigRational::from_integer(2.into()));
        assert!(s.width() <= rational_of(2, 1_000_000));
    }

    #[test]
    fn wilson_basics() {
        let (lo, hi) = wilson_interval(50, 100, 1.96);
        assert!(lo < 0.5 && 0.5 < hi);
        assert!(lo > 0.39 && hi < 0.61);
        let (lo0, _) = wilson_interval(0, 100, 1.96);
        assert_eq!(lo0, 0.0);
        let (_, hi1) = wilson_interval(100, 100, 1.96);
        assert_eq!(hi1, 1.0);
    }
}
