//! Exact arithmetic helpers: rationals and quadratic surds `a + b*sqrt(r)`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(int(n), int(d))
}

pub fn rat_int<T: Into<BigInt>>(n: T) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn pow_u(base: u64, exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

pub fn rpow(base: &BigRational, exp: u32) -> BigRational {
    num_traits::pow(base.clone(), exp as usize)
}

pub fn ceil_int(x: &BigRational) -> BigInt {
    x.ceil().to_integer()
}

pub fn floor_int(x: &BigRational) -> BigInt {
    x.floor().to_integer()
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Smallest rational of the form `m / 2^bits` that is `>= sqrt(x)`.
pub fn sqrt_upper(x: &BigRational, bits: u32) -> BigRational {
    assert!(!x.is_negative(), "square root of a negative number");
    let scale = BigInt::one() << (2 * bits as usize);
    // ceil(x * 4^bits)
    let scaled = ceil_int(&(x * BigRational::from_integer(scale)));
    let mut r = scaled.sqrt();
    if &r * &r < scaled {
        r += 1;
    }
    BigRational::new(r, BigInt::one() << bits as usize)
}

/// Largest rational of the form `m / 2^bits` that is `<= sqrt(x)`.
pub fn sqrt_lower(x: &BigRational, bits: u32) -> BigRational {
    assert!(!x.is_negative(), "square root of a negative number");
    let scale = BigInt::one() << (2 * bits as usize);
    let scaled = floor_int(&(x * BigRational::from_integer(scale)));
    BigRational::new(scaled.sqrt(), BigInt::one() << bits as usize)
}

/// Exact rational square root, if `x` is the square of a rational.
pub fn sqrt_exact(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let (n, d) = (x.numer(), x.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| BigRational::new(rn, rd))
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// An element `a + b*sqrt(r)` of the real quadratic field `Q(sqrt(r))`,
/// `r` a positive non-square integer.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadSurd {
    #[serde(with = "rational_str")]
    pub a: BigRational,
    #[serde(with = "rational_str")]
    pub b: BigRational,
    pub r: u64,
}

impl QuadSurd {
    pub fn new(a: BigRational, b: BigRational, r: u64) -> Self {
        debug_assert!(r.sqrt() * r.sqrt() != r, "radicand must be a non-square");
        QuadSurd { a, b, r }
    }

    pub fn rational(a: BigRational, r: u64) -> Self {
        QuadSurd::new(a, BigRational::zero(), r)
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Sign of `a + b*sqrt(r)`, decided by comparing `a^2` with `r*b^2`.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        if sa == sb || sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let rb2 = &self.b * &self.b * rat_int(self.r);
        // |a| vs |b| sqrt(r): the larger magnitude decides
        match a2.cmp(&rb2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.a) + to_f64(&self.b) * (self.r as f64).sqrt()
    }

    fn check(&self, other: &QuadSurd) {
        assert_eq!(self.r, other.r, "mixing different quadratic fields");
    }
}

impl std::ops::Add for &QuadSurd {
    type Output = QuadSurd;
    fn add(self, o: &QuadSurd) -> QuadSurd {
        self.check(o);
        QuadSurd::new(&self.a + &o.a, &self.b + &o.b, self.r)
    }
}

impl std::ops::Sub for &QuadSurd {
    type Output = QuadSurd;
    fn sub(self, o: &QuadSurd) -> QuadSurd {
        self.check(o);
        QuadSurd::new(&self.a - &o.a, &self.b - &o.b, self.r)
    }
}

impl std::ops::Mul for &QuadSurd {
    type Output = QuadSurd;
    fn mul(self, o: &QuadSurd) -> QuadSurd {
        self.check(o);
        let r = rat_int(self.r);
        QuadSurd::new(
            &self.a * &o.a + &self.b * &o.b * r,
            &self.a * &o.b + &self.b * &o.a,
            self.r,
        )
    }
}

impl PartialOrd for QuadSurd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadSurd {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.r)
        }
    }
}

/// Serializes big integers as decimal strings.
pub mod bigint_str {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

/// Serializes rationals as `"n/d"` strings.
pub mod rational_str {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}
