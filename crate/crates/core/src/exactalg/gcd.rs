//! Multivariate gcd by recursive content / primitive part with a primitive
//! pseudo-remainder sequence in the main variable.

use super::gaussian::GaussianRational;
use super::poly::{MultiIndex, Polynomial};
use crate::error::{usage, Result};

/// Greatest common divisor, normalised so its lex-leading coefficient is 1.
pub fn poly_gcd(a: &Polynomial, b: &Polynomial) -> Result<Polynomial> {
    if a.nvars() != b.nvars() {
        return usage("gcd of polynomials in different rings");
    }
    if a.is_zero() && b.is_zero() {
        return usage("gcd of two zero polynomials is undefined");
    }
    Ok(gcd_inner(a, b))
}

/// gcd of a list of polynomials, skipping zeros. Errors when all are zero.
pub fn poly_gcd_many(ps: &[Polynomial]) -> Result<Polynomial> {
    let mut it = ps.iter().filter(|p| !p.is_zero());
    let first = match it.next() {
        Some(p) => p.monic(),
        None => return usage("gcd of an all-zero list"),
    };
    let mut g = first;
    for p in it {
        if g.is_constant() {
            break;
        }
        g = gcd_inner(&g, p);
    }
    Ok(g)
}

fn main_var(a: &Polynomial, b: &Polynomial) -> Option<usize> {
    (0..a.nvars())
        .rev()
        .find(|&v| a.involves(v) || b.involves(v))
}

pub(crate) fn gcd_inner(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let n = a.nvars();
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Polynomial::one(n);
    }
    let v = match main_var(a, b) {
        Some(v) => v,
        None => return Polynomial::one(n),
    };
    let ca = content(a, v);
    let cb = content(b, v);
    let pa = divide(a, &ca);
    let pb = divide(b, &cb);
    let c = gcd_inner(&ca, &cb);
    if (0..n).any(|u| u != v && (pa.involves(u) || pb.involves(u)))
        && specialized_coprime(&pa, &pb, v)
    {
        return c.monic();
    }
    let g = prs(pa, pb, v);
    (&c * &g).monic()
}

/// Sufficient test for `gcd(a, b) = 1` of polynomials primitive in `z_v`:
/// substitute values for the other variables that keep both leading
/// coefficients nonzero and check the univariate images are coprime.
fn specialized_coprime(a: &Polynomial, b: &Polynomial, v: usize) -> bool {
    let n = a.nvars();
    let (ca, cb) = (a.coeffs_in(v), b.coeffs_in(v));
    for trial in 0..3i64 {
        let point: Vec<GaussianRational> = (0..n)
            .map(|u| {
                GaussianRational::from_ints(3 + 4 * u as i64 + 7 * trial, 1 + 2 * trial - u as i64)
            })
            .collect();
        let image = |cs: &[Polynomial]| -> Polynomial {
            Polynomial::from_terms(
                1,
                cs.iter()
                    .enumerate()
                    .map(|(k, c)| (vec![k as u32], c.eval_exact(&point))),
            )
            .expect("univariate image")
        };
        if ca.last().unwrap().eval_exact(&point).is_zero()
            || cb.last().unwrap().eval_exact(&point).is_zero()
        {
            continue;
        }
        return gcd_inner(&image(&ca), &image(&cb)).is_constant();
    }
    false
}

fn divide(a: &Polynomial, d: &Polynomial) -> Polynomial {
    a.div_exact(d)
        .expect("same ring")
        .expect("content divides its polynomial")
}

/// gcd of the coefficients of `p` viewed as a polynomial in `z_v`.
pub fn content(p: &Polynomial, v: usize) -> Polynomial {
    let mut g: Option<Polynomial> = None;
    for c in p.coeffs_in(v).into_iter().filter(|c| !c.is_zero()) {
        g = Some(match g {
            None => c.monic(),
            Some(g) if g.is_constant() => return g,
            Some(g) => gcd_inner(&g, &c),
        });
    }
    g.unwrap_or_else(|| Polynomial::one(p.nvars()))
}

pub fn primitive_part(p: &Polynomial, v: usize) -> Polynomial {
    if p.is_zero() {
        return p.clone();
    }
    divide(p, &content(p, v))
}

/// Pseudo-remainder of `a` by `b` in `z_v`, without the final power of the
/// leading coefficient (only its primitive part is ever used).
pub fn pseudo_remainder(a: &Polynomial, b: &Polynomial, v: usize) -> Polynomial {
    let db = b.degree_in(v);
    let bc = b.coeffs_in(v);
    let lcb = bc[db as usize].clone();
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let lcr = r.coeffs_in(v)[dr as usize].clone();
        let mut e = MultiIndex::zeros(a.nvars());
        e.0[v] = dr - db;
        let t = (&lcr * b).shift(&e);
        r = &(&lcb * &r) - &t;
    }
    r
}

fn prs(a: Polynomial, b: Polynomial, v: usize) -> Polynomial {
    let n = a.nvars();
    let (mut r0, mut r1) = if a.degree_in(v) >= b.degree_in(v) {
        (a, b)
    } else {
        (b, a)
    };
    loop {
        if r1.is_zero() {
            return primitive_part(&r0, v).monic();
        }
        if r1.degree_in(v) == 0 {
            return Polynomial::one(n);
        }
        let r = pseudo_remainder(&r0, &r1, v);
        r0 = r1;
        // scalars are units: normalizing keeps coefficient growth in check
        r1 = primitive_part(&r, v).monic();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::GaussianRational;

    fn z(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }
    fn c(n: usize, v: i64) -> Polynomial {
        Polynomial::constant(n, GaussianRational::from_int(v))
    }

    #[test]
    fn difference_of_squares() {
        let a = &(&z(1, 0) * &z(1, 0)) - &c(1, 1);
        let b = &z(1, 0) - &c(1, 1);
        assert_eq!(poly_gcd(&a, &b).unwrap(), b);
    }

    #[test]
    fn monomial_gcd() {
        let a = &z(2, 0) * &z(2, 1);
        assert_eq!(poly_gcd(&a, &z(2, 0)).unwrap(), z(2, 0));
    }

    #[test]
    fn coprime_linear_forms() {
        let a = &z(2, 0) + &z(2, 1);
        let b = &z(2, 0) - &z(2, 1);
        let g = poly_gcd(&a, &b).unwrap();
        assert_eq!(g, Polynomial::one(2));
        // independent check: neither divides the other
        assert!(a.div_exact(&b).unwrap().is_none());
        assert!(b.div_exact(&a).unwrap().is_none());
    }

    #[test]
    fn both_zero_is_usage_error() {
        assert!(poly_gcd(&Polynomial::zero(2), &Polynomial::zero(2)).is_err());
    }

    #[test]
    fn nested_common_factor() {
        // (z1 z2 + 1)(z1 - z2^2) and (z1 z2 + 1)(z2 + 3)
        let f = &(&z(2, 0) * &z(2, 1)) + &c(2, 1);
        let a = &f * &(&z(2, 0) - &(&z(2, 1) * &z(2, 1)));
        let b = &f * &(&z(2, 1) + &c(2, 3));
        assert_eq!(poly_gcd(&a, &b).unwrap(), f.monic());
    }

    #[test]
    fn gaussian_coefficients() {
        let i = GaussianRational::i();
        let zi = &z(1, 0) - &Polynomial::constant(1, i.clone());
        let zmi = &z(1, 0) + &Polynomial::constant(1, i);
        let a = &zi * &zmi; // z^2 + 1
        assert_eq!(poly_gcd(&a, &zi).unwrap(), zi);
    }
}
