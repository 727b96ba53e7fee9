use std::fmt;

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gaussian::GaussianRational;
use super::gcd::gcd_inner;
use super::poly::Polynomial;
use crate::error::{usage, NevError, Result};

/// Reduced quotient of polynomials with lex-leading denominator coefficient 1.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if num.nvars() != den.nvars() {
            return usage("numerator and denominator in different rings");
        }
        if den.is_zero() {
            return usage("rational function with zero denominator");
        }
        if num.is_zero() {
            return Ok(RationalFunction {
                den: Polynomial::one(num.nvars()),
                num,
            });
        }
        let g = gcd_inner(&num, &den);
        let (mut n, mut d) = if g.is_constant() {
            (num, den)
        } else {
            (
                num.div_exact(&g)?.expect("gcd divides"),
                den.div_exact(&g)?.expect("gcd divides"),
            )
        };
        let lc = d.leading().unwrap().1.clone();
        if !lc.is_one() {
            let inv = lc.inv()?;
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        Ok(RationalFunction { num: n, den: d })
    }

    pub fn from_poly(p: Polynomial) -> Self {
        let n = p.nvars();
        RationalFunction {
            num: p,
            den: Polynomial::one(n),
        }
    }

    pub fn constant(nvars: usize, c: GaussianRational) -> Self {
        Self::from_poly(Polynomial::constant(nvars, c))
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn as_constant(&self) -> Option<GaussianRational> {
        if self.den.is_constant() {
            self.num.as_constant()
        } else {
            None
        }
    }

    /// Henrici's sum: with `g = gcd(b, d)` only `g` can share a factor with
    /// the new numerator.
    pub fn add(&self, o: &RationalFunction) -> Result<RationalFunction> {
        self.num.check_same(&o.num)?;
        if self.is_zero() {
            return Ok(o.clone());
        }
        if o.is_zero() {
            return Ok(self.clone());
        }
        let g = gcd_inner(&self.den, &o.den);
        if g.is_constant() {
            return Ok(Self::normalized(
                &(&self.num * &o.den) + &(&o.num * &self.den),
                &self.den * &o.den,
            ));
        }
        let b = divide(&self.den, &g);
        let d = divide(&o.den, &g);
        let t = &(&self.num * &d) + &(&o.num * &b);
        if t.is_zero() {
            return Ok(Self::from_poly(t));
        }
        let h = gcd_inner(&t, &g);
        Ok(Self::normalized(divide(&t, &h), &b * &divide(&o.den, &h)))
    }

    pub fn sub(&self, o: &RationalFunction) -> Result<RationalFunction> {
        self.add(&o.neg())
    }

    /// Henrici's product: cancel across the two fractions only.
    pub fn mul(&self, o: &RationalFunction) -> Result<RationalFunction> {
        self.num.check_same(&o.num)?;
        if self.is_zero() || o.is_zero() {
            return Ok(Self::from_poly(Polynomial::zero(self.nvars())));
        }
        let g1 = gcd_inner(&self.num, &o.den);
        let g2 = gcd_inner(&o.num, &self.den);
        Ok(Self::normalized(
            &divide(&self.num, &g1) * &divide(&o.num, &g2),
            &divide(&self.den, &g2) * &divide(&o.den, &g1),
        ))
    }

    /// Coprime `num/den`, scaled so the denominator's leading coefficient is 1.
    fn normalized(num: Polynomial, den: Polynomial) -> RationalFunction {
        let lc = den.leading().expect("nonzero denominator").1.clone();
        if lc.is_one() {
            return RationalFunction { num, den };
        }
        let inv = lc.inv().expect("nonzero leading coefficient");
        RationalFunction {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn div(&self, o: &RationalFunction) -> Result<RationalFunction> {
        if o.is_zero() {
            return Err(NevError::Usage(
                "division by the zero rational function".into(),
            ));
        }
        RationalFunction::new(self.num.checked_mul(&o.den)?, self.den.checked_mul(&o.num)?)
    }

    pub fn neg(&self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> RationalFunction {
        RationalFunction::new(self.num.scale(c), self.den.clone()).expect("valid")
    }

    pub fn pow(&self, k: i32) -> Result<RationalFunction> {
        if k >= 0 {
            Ok(RationalFunction {
                num: self.num.pow(k as u32),
                den: self.den.pow(k as u32),
            })
        } else {
            if self.is_zero() {
                return usage("negative power of zero");
            }
            RationalFunction::new(self.den.pow((-k) as u32), self.num.pow((-k) as u32))
        }
    }

    pub fn scale_vars(&self, q: &[GaussianRational]) -> RationalFunction {
        RationalFunction::new(self.num.scale_vars(q), self.den.scale_vars(q)).expect("valid")
    }

    pub fn eval_c64(&self, z: &[Complex64]) -> Complex64 {
        self.num.eval_c64(z) / self.den.eval_c64(z)
    }

    pub fn eval_exact(&self, z: &[GaussianRational]) -> Result<GaussianRational> {
        let d = self.den.eval_exact(z);
        if d.is_zero() {
            return Err(NevError::Numeric("evaluation at a pole".into()));
        }
        Ok(&self.num.eval_exact(z) / &d)
    }
}

fn divide(a: &Polynomial, d: &Polynomial) -> Polynomial {
    a.div_exact(d).expect("same ring").expect("gcd divides")
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            let c = self.den.as_constant().unwrap();
            if c.is_one() {
                return write!(f, "{}", self.num);
            }
        }
        write!(f, "({})/({})", self.num, self.den)
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({self})")
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RationalJson {
    num: Polynomial,
    den: Polynomial,
}

impl<'de> Deserialize<'de> for RationalFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RationalJson::deserialize(d)?;
        RationalFunction::new(raw.num, raw.den).map_err(serde::de::Error::custom)
    }
}
