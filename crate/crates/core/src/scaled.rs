//! Complex numbers carried as `mant · e^exp` so that infinite products and
//! large determinants evaluate without overflow.

use num::complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledComplex {
    pub mant: Complex64,
    pub exp: f64,
}

impl ScaledComplex {
    pub const ZERO: ScaledComplex = ScaledComplex {
        mant: Complex64 { re: 0.0, im: 0.0 },
        exp: 0.0,
    };

    pub const ONE: ScaledComplex = ScaledComplex {
        mant: Complex64 { re: 1.0, im: 0.0 },
        exp: 0.0,
    };

    pub fn from_c64(z: Complex64) -> Self {
        ScaledComplex { mant: z, exp: 0.0 }.normalized()
    }

    /// `e^{log_abs + i·arg}`.
    pub fn from_polar_log(log_abs: f64, arg: f64) -> Self {
        ScaledComplex {
            mant: Complex64::from_polar(1.0, arg),
            exp: log_abs,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.re == 0.0 && self.mant.im == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.mant.re.is_finite() && self.mant.im.is_finite() && self.exp.is_finite()
    }

    fn normalized(self) -> Self {
        let n = self.mant.norm();
        if n == 0.0 || !n.is_finite() {
            return self;
        }
        let l = n.ln();
        ScaledComplex {
            mant: self.mant / n,
            exp: self.exp + l,
        }
    }

    /// `log|z|`; `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.exp + self.mant.norm().ln()
        }
    }

    pub fn arg(&self) -> f64 {
        self.mant.arg()
    }

    /// Plain complex value; may overflow to infinity or underflow to zero.
    pub fn to_c64(&self) -> Complex64 {
        if self.is_zero() {
            return self.mant;
        }
        self.mant * self.exp.exp()
    }

    pub fn mul(self, o: ScaledComplex) -> Self {
        ScaledComplex {
            mant: self.mant * o.mant,
            exp: self.exp + o.exp,
        }
        .normalized()
    }

    pub fn mul_c64(self, z: Complex64) -> Self {
        self.mul(ScaledComplex::from_c64(z))
    }

    pub fn div(self, o: ScaledComplex) -> Self {
        ScaledComplex {
            mant: self.mant / o.mant,
            exp: self.exp - o.exp,
        }
        .normalized()
    }

    pub fn powi(self, k: i32) -> Self {
        if k == 0 {
            return ScaledComplex::ONE;
        }
        ScaledComplex {
            mant: self.mant.powi(k),
            exp: self.exp * k as f64,
        }
        .normalized()
    }

    pub fn neg(self) -> Self {
        ScaledComplex {
            mant: -self.mant,
            exp: self.exp,
        }
    }

    pub fn add(self, o: ScaledComplex) -> Self {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        let e = self.exp.max(o.exp);
        let a = self.mant * (self.exp - e).exp();
        let b = o.mant * (o.exp - e).exp();
        ScaledComplex {
            mant: a + b,
            exp: e,
        }
        .normalized()
    }

    pub fn sub(self, o: ScaledComplex) -> Self {
        self.add(o.neg())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn huge_products_stay_finite() {
        let mut acc = ScaledComplex::ONE;
        for _ in 0..400 {
            acc = acc.mul_c64(Complex64::new(1e10, 0.0));
        }
        assert!((acc.ln_abs() - 4000.0 * 10f64.ln()).abs() < 1e-9);
        assert!(acc.to_c64().re.is_infinite());
    }

    #[test]
    fn addition_aligns_exponents() {
        let a = ScaledComplex::from_polar_log(1000.0, 0.0);
        let s = a.add(a);
        assert!((s.ln_abs() - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert!(a.sub(a).is_zero());
    }
}
