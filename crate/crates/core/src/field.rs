//! Coefficient fields.
//!
//! Everything downstream is generic over [`Field`]. Two implementations are
//! provided: arbitrary-precision rationals ([`Rat`], the default and the only
//! final arbiter for resultant values) and a word-sized prime field
//! ([`Fp`], used as a fast probabilistic cross-check).

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact field scalar.
///
/// Methods take references because rational arithmetic is not `Copy`;
/// implementations must be exact (no floating point anywhere).
pub trait Field:
    Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;
    fn from_i64(n: i64) -> Self;

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.mul(&i))
    }

    fn from_fraction(num: i64, den: i64) -> Self {
        Self::from_i64(num)
            .div(&Self::from_i64(den))
            .expect("zero denominator")
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// Tag naming the field in serialized artifacts, e.g. `"Q"` or `"Fp:p"`.
    fn tag() -> String;

    /// Canonical decimal encoding used in JSON artifacts.
    fn encode(&self) -> String;

    /// Inverse of [`Field::encode`].
    fn decode(s: &str) -> Result<Self, String>;
}

/// Arbitrary-precision rational, always kept in lowest terms with positive
/// denominator (the underlying representation normalizes on construction).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Rat(pub BigRational);

impl Rat {
    pub fn from_int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Numerator/denominator as strings (denominator positive).
    pub fn parts(&self) -> (String, String) {
        (self.0.numer().to_string(), self.0.denom().to_string())
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Field for Rat {
    fn zero() -> Self {
        Rat(BigRational::zero())
    }

    fn one() -> Self {
        Rat(BigRational::one())
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn add(&self, other: &Self) -> Self {
        Rat(&self.0 + &other.0)
    }

    fn sub(&self, other: &Self) -> Self {
        Rat(&self.0 - &other.0)
    }

    fn mul(&self, other: &Self) -> Self {
        if self.0.is_zero() || other.0.is_zero() {
            return Self::zero();
        }
        Rat(&self.0 * &other.0)
    }

    fn neg(&self) -> Self {
        Rat(-&self.0)
    }

    fn inv(&self) -> Option<Self> {
        if self.0.is_zero() {
            None
        } else {
            Some(Rat(self.0.recip()))
        }
    }

    fn from_i64(n: i64) -> Self {
        Rat::from_int(n)
    }

    fn tag() -> String {
        "Q".to_string()
    }

    fn encode(&self) -> String {
        self.to_string()
    }

    fn decode(s: &str) -> Result<Self, String> {
        let parse_int = |t: &str| -> Result<BigInt, String> {
            t.trim()
                .parse::<BigInt>()
                .map_err(|e| format!("bad integer {t:?}: {e}"))
        };
        match s.split_once('/') {
            Some((n, d)) => {
                let den = parse_int(d)?;
                if den.is_zero() {
                    return Err("zero denominator".to_string());
                }
                Ok(Rat(BigRational::new(parse_int(n)?, den)))
            }
            None => Ok(Rat(BigRational::from_integer(parse_int(s)?))),
        }
    }
}

/// Sign of a rational, used when pinning determinant normalizations.
pub fn rat_sign(r: &Rat) -> i32 {
    if r.0.is_zero() {
        0
    } else if r.0.is_positive() {
        1
    } else {
        -1
    }
}

/// Default prime modulus: the Mersenne prime `2^31 - 1`. Any modulus above
/// `2^20` keeps the collision probability of a random specialization low.
pub const DEFAULT_PRIME: u64 = (1 << 31) - 1;

/// Prime field of order `P`. Elements are canonical residues in `[0, P)`.
/// `P` must be prime and small enough that `P^2` fits in `u64`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Fp<const P: u64>(pub u64);

pub type FpDefault = Fp<DEFAULT_PRIME>;

impl<const P: u64> Fp<P> {
    pub fn new(n: u64) -> Self {
        Fp(n % P)
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp::<P>(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = Fp((acc.0 * base.0) % P);
            }
            base = Fp((base.0 * base.0) % P);
            e >>= 1;
        }
        acc
    }
}

impl<const P: u64> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Field for Fp<P> {
    fn zero() -> Self {
        Fp(0)
    }

    fn one() -> Self {
        Fp(1 % P)
    }

    fn is_zero(&self) -> bool {
        self.0 == 0
    }

    fn add(&self, other: &Self) -> Self {
        Fp((self.0 + other.0) % P)
    }

    fn sub(&self, other: &Self) -> Self {
        Fp((self.0 + P - other.0) % P)
    }

    fn mul(&self, other: &Self) -> Self {
        Fp((self.0 * other.0) % P)
    }

    fn neg(&self) -> Self {
        Fp((P - self.0) % P)
    }

    fn inv(&self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(self.pow(P - 2))
        }
    }

    fn from_i64(n: i64) -> Self {
        let p = P as i64;
        Fp(n.rem_euclid(p) as u64)
    }

    fn tag() -> String {
        format!("Fp:{P}")
    }

    fn encode(&self) -> String {
        self.0.to_string()
    }

    fn decode(s: &str) -> Result<Self, String> {
        s.trim()
            .parse::<u64>()
            .map(Fp::new)
            .map_err(|e| format!("bad residue {s:?}: {e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_arithmetic_is_exact() {
        let third = Rat::new(1, 3);
        let sixth = Rat::new(1, 6);
        assert_eq!(third.add(&sixth), Rat::new(1, 2));
        assert_eq!(third.sub(&third), Rat::zero());
        assert_eq!(third.mul(&Rat::from_int(3)), Rat::one());
        assert_eq!(third.inv().unwrap(), Rat::from_int(3));
        assert!(Rat::zero().inv().is_none());
    }

    #[test]
    fn rational_normalizes_to_lowest_terms() {
        assert_eq!(Rat::new(2, 4), Rat::new(1, 2));
        assert_eq!(Rat::new(1, -2), Rat::new(-1, 2));
        assert_eq!(Rat::new(-3, -6).encode(), "1/2");
    }

    #[test]
    fn rational_encoding_round_trips() {
        for r in [Rat::zero(), Rat::from_int(-7), Rat::new(22, 7), Rat::new(-5, 3)] {
            assert_eq!(Rat::decode(&r.encode()).unwrap(), r);
        }
        assert!(Rat::decode("1/0").is_err());
        assert!(Rat::decode("x").is_err());
    }

    #[test]
    fn prime_field_inverses() {
        type F = FpDefault;
        for n in [1i64, 2, 17, -5, 1 << 20] {
            let x = F::from_i64(n);
            let inv = x.inv().unwrap();
            assert!(x.mul(&inv).is_one());
        }
        assert!(F::zero().inv().is_none());
        assert_eq!(F::from_i64(-1).add(&F::one()), F::zero());
    }

    #[test]
    fn field_tags_distinguish_backends() {
        assert_eq!(Rat::tag(), "Q");
        assert_eq!(FpDefault::tag(), format!("Fp:{DEFAULT_PRIME}"));
    }
}
