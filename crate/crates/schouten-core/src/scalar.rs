//! Exact scalars: arbitrary-precision rationals and Gaussian rationals.

use alloc::string::String;
use alloc::string::ToString;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// An exact scalar: either a rational or a Gaussian rational `re + im*i`.
///
/// Values are kept canonical so that structural equality is value equality:
/// `BigRational` is always reduced with a positive denominator, and the
/// `Gaussian` variant is only used when the imaginary part is nonzero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Gaussian { re: BigRational, im: BigRational },
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rational(BigRational::one())
    }

    pub fn from_int(v: i64) -> Self {
        Scalar::Rational(BigRational::from_integer(BigInt::from(v)))
    }

    /// `num/den` as an exact rational. `den` must be nonzero.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        Scalar::Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn imaginary_unit() -> Self {
        Scalar::from_parts(BigRational::zero(), BigRational::one())
    }

    /// Build from real and imaginary parts, normalizing the representation.
    pub fn from_parts(re: BigRational, im: BigRational) -> Self {
        if im.is_zero() {
            Scalar::Rational(re)
        } else {
            Scalar::Gaussian { re, im }
        }
    }

    pub fn re(&self) -> BigRational {
        match self {
            Scalar::Rational(r) => r.clone(),
            Scalar::Gaussian { re, .. } => re.clone(),
        }
    }

    pub fn im(&self) -> BigRational {
        match self {
            Scalar::Rational(_) => BigRational::zero(),
            Scalar::Gaussian { im, .. } => im.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            // canonical form: Gaussian implies im != 0
            Scalar::Gaussian { .. } => false,
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Scalar::Rational(r) if r.is_one())
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Scalar::Rational(_))
    }

    /// Real part as a rational `Scalar`.
    pub fn re_scalar(&self) -> Scalar {
        Scalar::Rational(self.re())
    }

    /// Imaginary part as a rational `Scalar`.
    pub fn im_scalar(&self) -> Scalar {
        Scalar::Rational(self.im())
    }

    /// The value as an `i64` when it is an integer-valued rational in range.
    pub fn as_integer(&self) -> Option<i64> {
        match self {
            Scalar::Rational(r) if r.denom().is_one() => i64::try_from(r.to_integer()).ok(),
            _ => None,
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            Scalar::Rational(r) => Scalar::Rational(r.clone()),
            Scalar::Gaussian { re, im } => Scalar::Gaussian {
                re: re.clone(),
                im: -im.clone(),
            },
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r.clone()),
            Scalar::Gaussian { re, im } => Scalar::Gaussian {
                re: -re.clone(),
                im: -im.clone(),
            },
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            _ => Scalar::from_parts(self.re() + other.re(), self.im() + other.im()),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            _ => {
                let (a, b) = (self.re(), self.im());
                let (c, d) = (other.re(), other.im());
                Scalar::from_parts(&a * &c - &b * &d, &a * &d + &b * &c)
            }
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        match self {
            Scalar::Rational(r) => Some(Scalar::Rational(r.recip())),
            Scalar::Gaussian { re, im } => {
                let norm = re * re + im * im;
                Some(Scalar::from_parts(re / &norm, -im / &norm))
            }
        }
    }

    /// Exact division. Panics on division by zero; callers check pivots first.
    pub fn div(&self, other: &Scalar) -> Scalar {
        self.mul(&other.inv().expect("scalar division by zero"))
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Display-order sign: negative rationals, and Gaussian values whose
    /// leading (real, then imaginary) part is negative.
    pub fn is_display_negative(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_negative(),
            Scalar::Gaussian { re, im } => {
                if re.is_zero() {
                    im.is_negative()
                } else {
                    re.is_negative()
                }
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn imag(f: &mut fmt::Formatter<'_>, im: &BigRational, lead_sign: bool) -> fmt::Result {
            let mag = im.abs();
            let sign = if im.is_negative() {
                "-"
            } else if lead_sign {
                "+"
            } else {
                ""
            };
            if mag.is_one() {
                write!(f, "{sign}i")
            } else {
                write!(f, "{sign}{mag}i")
            }
        }
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Gaussian { re, im } => {
                if re.is_zero() {
                    imag(f, im, false)
                } else {
                    write!(f, "{re}")?;
                    imag(f, im, true)
                }
            }
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let bad = || Error::ScalarParse(s.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        Ok(BigRational::new(num, den))
    } else {
        let n = BigInt::from_str(s.trim()).map_err(|_| bad())?;
        Ok(BigRational::from_integer(n))
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Parses `"3"`, `"-3/4"`, `"i"`, `"-2i"`, `"1/2+5/3i"`, `"3-i"`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::ScalarParse(String::new()));
        }
        // Split into at most two signed parts; the sign at position 0 belongs
        // to the first part.
        let mut split = None;
        for (idx, ch) in s.char_indices().skip(1) {
            if (ch == '+' || ch == '-') && !matches!(&s[idx - 1..idx], "/" | "+" | "-") {
                split = Some(idx);
                break;
            }
        }
        let (first, second) = match split {
            Some(idx) => (&s[..idx], Some(&s[idx..])),
            None => (s, None),
        };
        let mut re = BigRational::zero();
        let mut im = BigRational::zero();
        for part in [Some(first), second].into_iter().flatten() {
            let part = part.trim();
            if let Some(body) = part.strip_suffix(['i', 'I']) {
                let body = body.trim();
                let val = match body {
                    "" | "+" => BigRational::one(),
                    "-" => -BigRational::one(),
                    _ => parse_rational(body)?,
                };
                if !im.is_zero() {
                    return Err(Error::ScalarParse(s.to_string()));
                }
                im = val;
            } else {
                if !re.is_zero() {
                    return Err(Error::ScalarParse(s.to_string()));
                }
                re = parse_rational(part)?;
            }
        }
        Ok(Scalar::from_parts(re, im))
    }
}
