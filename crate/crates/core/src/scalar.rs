//! Gaussian rational scalars.
//!
//! A [`Scalar`] is an element of Q(i): a pair of arbitrary-precision
//! rationals for the real and imaginary parts. The type is the coefficient
//! field for every algebra in the workbench, so all arithmetic is exact and
//! total except division by zero, which panics like integer division does.
//!
//! Scalars cross the JSON boundary as strings such as `"3/4"`, `"-1+1/2*i"`
//! or `"i"`. The grammar is `re`, `im*i`, or `re+im*i` (also `re-im*i`),
//! where each part is an integer or `p/q` fraction. Whitespace is ignored
//! and denominators are normalized positive.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use crate::Error;

pub type Rat = BigRational;

/// An exact complex number with rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar {
    pub re: Rat,
    pub im: Rat,
}

impl Scalar {
    pub fn new(re: Rat, im: Rat) -> Self {
        Scalar { re, im }
    }

    pub fn zero() -> Self {
        Scalar::new(Rat::zero(), Rat::zero())
    }

    pub fn one() -> Self {
        Scalar::new(Rat::one(), Rat::zero())
    }

    pub fn i() -> Self {
        Scalar::new(Rat::zero(), Rat::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::new(Rat::from_integer(BigInt::from(n)), Rat::zero())
    }

    /// `p/q` as a real scalar. Panics if `q == 0`.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        Scalar::new(
            Rat::new(BigInt::from(p), BigInt::from(q)),
            Rat::zero(),
        )
    }

    pub fn from_rat(re: Rat) -> Self {
        Scalar::new(re, Rat::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        Scalar::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|^2 = z * conj(z)`, a nonnegative rational.
    pub fn abs_sq(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse. Panics on zero, mirroring rational division.
    pub fn inv(&self) -> Self {
        let n = self.abs_sq();
        assert!(!n.is_zero(), "division by zero scalar");
        Scalar::new(&self.re / &n, -&self.im / &n)
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl<'a> Add<&'a Scalar> for Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar::new(self.re + &rhs.re, self.im + &rhs.im)
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

impl<'a> AddAssign<&'a Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        Scalar::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl SubAssign for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        self.re -= rhs.re;
        self.im -= rhs.im;
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl<'a, 'b> Mul<&'b Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl MulAssign for Scalar {
    fn mul_assign(&mut self, rhs: Scalar) {
        *self = &*self * &rhs;
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        self * rhs.inv()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::new(-self.re, -self.im)
    }
}

fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rat(&self.re));
        }
        let im_part = |r: &Rat| -> String {
            if r.is_one() {
                "i".to_string()
            } else if (-r).is_one() {
                "-i".to_string()
            } else {
                format!("{}*i", fmt_rat(r))
            }
        };
        if self.re.is_zero() {
            return write!(f, "{}", im_part(&self.im));
        }
        if self.im.is_negative() {
            write!(f, "{}-{}", fmt_rat(&self.re), im_part(&-self.im.clone()))
        } else {
            write!(f, "{}+{}", fmt_rat(&self.re), im_part(&self.im))
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_rat(s: &str) -> Result<Rat, Error> {
    let err = || Error::Scalar(format!("bad rational '{s}'"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.parse().map_err(|_| err())?;
            let q: BigInt = q.parse().map_err(|_| err())?;
            if q.is_zero() {
                return Err(Error::Scalar(format!("zero denominator in '{s}'")));
            }
            Ok(Rat::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| err())?;
            Ok(Rat::from_integer(p))
        }
    }
}

/// One term of the scalar grammar: a rational, optionally tagged `*i` or a
/// bare `i` / `-i`. Returns (value, is_imaginary).
fn parse_term(s: &str) -> Result<(Rat, bool), Error> {
    if s == "i" {
        return Ok((Rat::one(), true));
    }
    if s == "-i" || s == "+i" {
        let sign = if s.starts_with('-') { -Rat::one() } else { Rat::one() };
        return Ok((sign, true));
    }
    if let Some(body) = s.strip_suffix("*i").or_else(|| s.strip_suffix("i")) {
        return Ok((parse_rat(body)?, true));
    }
    Ok((parse_rat(s)?, false))
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self, Error> {
        let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Scalar("empty scalar".into()));
        }
        // Split at the last top-level +/- that is not a leading sign and not
        // part of an exponent (exponents never occur, so only sign handling
        // matters here).
        let bytes = compact.as_bytes();
        let mut split_at = None;
        for (k, &b) in bytes.iter().enumerate().skip(1) {
            if (b == b'+' || b == b'-') && bytes[k - 1] != b'/' && bytes[k - 1] != b'*' {
                split_at = Some(k);
            }
        }
        let (first, second) = match split_at {
            Some(k) => (&compact[..k], &compact[k..]),
            None => (compact.as_str(), ""),
        };
        let (v1, imag1) = parse_term(first)?;
        if second.is_empty() {
            return Ok(if imag1 {
                Scalar::new(Rat::zero(), v1)
            } else {
                Scalar::new(v1, Rat::zero())
            });
        }
        let (v2, imag2) = parse_term(second)?;
        if imag1 == imag2 {
            return Err(Error::Scalar(format!(
                "scalar '{input}' repeats the {} part",
                if imag1 { "imaginary" } else { "real" }
            )));
        }
        let (re, im) = if imag1 { (v2, v1) } else { (v1, v2) };
        Ok(Scalar::new(re, im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(text: &str) -> Scalar {
        text.parse().unwrap()
    }

    #[test]
    fn parses_reals_and_fractions() {
        assert_eq!(s("3"), Scalar::from_int(3));
        assert_eq!(s("-3/4"), Scalar::from_ratio(-3, 4));
        assert_eq!(s("3/-4"), Scalar::from_ratio(-3, 4));
        assert_eq!(s(" 1 / 2 "), Scalar::from_ratio(1, 2));
    }

    #[test]
    fn parses_imaginary_forms() {
        assert_eq!(s("i"), Scalar::i());
        assert_eq!(s("-i"), -Scalar::i());
        assert_eq!(s("2*i"), Scalar::from_int(2) * Scalar::i());
        assert_eq!(s("-1/2*i"), Scalar::from_ratio(-1, 2) * Scalar::i());
        assert_eq!(
            s("1/2+1/3*i"),
            Scalar::new(Rat::new(1.into(), 2.into()), Rat::new(1.into(), 3.into()))
        );
        assert_eq!(s("1-i"), Scalar::new(Rat::one(), -Rat::one()));
        assert_eq!(s("i+1"), Scalar::new(Rat::one(), Rat::one()));
    }

    #[test]
    fn rejects_malformed_text() {
        assert!("".parse::<Scalar>().is_err());
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("1+2".parse::<Scalar>().is_err());
        assert!("i+i".parse::<Scalar>().is_err());
        assert!("x".parse::<Scalar>().is_err());
        assert!("1+".parse::<Scalar>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for text in ["0", "1", "-1", "i", "-i", "1/2", "3+2*i", "-1/2-1/3*i", "5*i"] {
            let v = s(text);
            assert_eq!(s(&v.to_string()), v, "round trip through '{text}'");
        }
    }

    #[test]
    fn field_operations() {
        let z = s("1/2+1/3*i");
        let w = s("-2+i");
        assert_eq!(z.clone() + w.clone() - w.clone(), z);
        assert_eq!((z.clone() * w.clone()) / w, z);
        assert_eq!(z.clone() * z.inv(), Scalar::one());
        assert_eq!(z.conj().conj(), z);
        assert_eq!((z.clone() * z.conj()).re, z.abs_sq());
    }

    proptest! {
        #[test]
        fn mul_commutes_and_conj_is_multiplicative(
            a in -20i64..20, b in 1i64..9, c in -20i64..20, d in 1i64..9,
            e in -20i64..20, f in 1i64..9, g in -20i64..20, h in 1i64..9,
        ) {
            let z = Scalar::new(Rat::new(a.into(), b.into()), Rat::new(c.into(), d.into()));
            let w = Scalar::new(Rat::new(e.into(), f.into()), Rat::new(g.into(), h.into()));
            prop_assert_eq!(&z * &w, &w * &z);
            prop_assert_eq!((&z * &w).conj(), &z.conj() * &w.conj());
        }

        #[test]
        fn display_parse_round_trip(
            a in -99i64..99, b in 1i64..40, c in -99i64..99, d in 1i64..40,
        ) {
            let z = Scalar::new(Rat::new(a.into(), b.into()), Rat::new(c.into(), d.into()));
            let back: Scalar = z.to_string().parse().unwrap();
            prop_assert_eq!(back, z);
        }
    }
}
