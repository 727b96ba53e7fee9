use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{NevError, Result};

/// Exact complex number `re + i·im` with rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn zero() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn i() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn from_int(v: i64) -> Self {
        GaussianRational {
            re: BigRational::from_integer(BigInt::from(v)),
            im: BigRational::zero(),
        }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussianRational {
            re: BigRational::from_integer(BigInt::from(re)),
            im: BigRational::from_integer(BigInt::from(im)),
        }
    }

    /// `num/den` as a real Gaussian rational.
    pub fn ratio(num: i64, den: i64) -> Self {
        GaussianRational {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn from_real(re: BigRational) -> Self {
        GaussianRational {
            re,
            im: BigRational::zero(),
        }
    }

    /// Exact conversion of a finite double pair.
    pub fn from_f64(re: f64, im: f64) -> Result<Self> {
        let conv = |x: f64| {
            BigRational::from_float(x)
                .ok_or_else(|| NevError::Usage(format!("non-finite coefficient {x}")))
        };
        Ok(GaussianRational {
            re: conv(re)?,
            im: conv(im)?,
        })
    }

    pub fn from_c64(z: Complex64) -> Result<Self> {
        Self::from_f64(z.re, z.im)
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

    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// `|z|²`, exact.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(NevError::Numeric("division by exact zero".into()));
        }
        let n = self.norm_sqr();
        Ok(GaussianRational {
            re: &self.re / &n,
            im: -(&self.im / &n),
        })
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        if k < 0 {
            return self.inv()?.pow(-k);
        }
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Parse `"p/q"` or `"p"` pairs.
    pub fn parse(re: &str, im: &str) -> Result<Self> {
        Ok(GaussianRational {
            re: parse_rational(re)?,
            im: parse_rational(im)?,
        })
    }
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // very large numerators/denominators: compare bit lengths
    let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
    let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
    if n.is_finite() && d.is_finite() {
        n / d
    } else {
        let shift = r.numer().bits() as i64 - r.denom().bits() as i64;
        let sign = if r.is_negative() { -1.0 } else { 1.0 };
        sign * 2f64.powi(shift.clamp(-1100, 1100) as i32)
    }
}

/// Parse a decimal-free rational `"p/q"` or integer `"p"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || NevError::Parse(format!("invalid rational literal {s:?} (expected \"p/q\")"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(NevError::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "({}-{}i)", self.re, -self.im.clone())
                } else {
                    write!(f, "({}+{}i)", self.re, self.im)
                }
            }
        }
    }
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [format_rational(&self.re), format_rational(&self.im)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [re, im] = <[RationalLiteral; 2]>::deserialize(d)?;
        Ok(GaussianRational {
            re: re.to_rational().map_err(serde::de::Error::custom)?,
            im: im.to_rational().map_err(serde::de::Error::custom)?,
        })
    }
}

/// A rational given either as a `"p/q"` string or as a JSON number (converted exactly).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalLiteral {
    Text(String),
    Integer(i64),
    Float(f64),
}

impl RationalLiteral {
    pub fn to_rational(&self) -> Result<BigRational> {
        match self {
            RationalLiteral::Text(s) => parse_rational(s),
            RationalLiteral::Integer(i) => Ok(BigRational::from_integer(BigInt::from(*i))),
            RationalLiteral::Float(x) => BigRational::from_float(*x)
                .ok_or_else(|| NevError::Parse(format!("non-finite number {x}"))),
        }
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussianRational::from_real(&self.re * &o.re);
        }
        GaussianRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl<'a> Div<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    /// Panics on exact zero divisor; use [`GaussianRational::inv`] to handle that case.
    fn div(self, o: &GaussianRational) -> GaussianRational {
        if o.im.is_zero() {
            return GaussianRational {
                re: &self.re / &o.re,
                im: &self.im / &o.re,
            };
        }
        self * &o.inv().expect("division by zero Gaussian rational")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, o: GaussianRational) -> GaussianRational {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, o: &GaussianRational) -> GaussianRational {
                (&self).$m(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -self.clone()
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, o: &GaussianRational) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, o: &GaussianRational) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, o: &GaussianRational) {
        *self = &*self * o;
    }
}
