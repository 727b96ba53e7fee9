use super::*;
use crate::exactalg::{GaussianRational, Polynomial, RationalFunction};
use crate::funcspace::{ProjectiveMap, QPochhammerSpec, SliceFunction};
use crate::nevcore::{QuadratureSpec, RadialGrid};
use crate::NevError;

fn g(v: i64) -> GaussianRational {
    GaussianRational::from_int(v)
}

fn z(m: usize, i: usize) -> Polynomial {
    Polynomial::var(m, i)
}

fn sf(p: Polynomial) -> SliceFunction {
    p.into()
}

fn q1(v: i64) -> QShift {
    QShift::from_ints(&[v]).unwrap()
}

fn quad() -> QuadratureSpec {
    QuadratureSpec::new(8, 256, 5).unwrap()
}

#[test]
fn qscale_examples() {
    let h = sf(&z(2, 0) * &z(2, 1));
    let s = qscale(&h, &QShift::from_ints(&[2, 3]).unwrap(), 1).unwrap();
    assert_eq!(s, sf((&z(2, 0) * &z(2, 1)).scale(&g(6))));
    assert_eq!(
        qscale(&h, &QShift::from_ints(&[2, 3]).unwrap(), 0).unwrap(),
        h
    );
    let inv = |p: Polynomial| -> SliceFunction {
        RationalFunction::new(Polynomial::one(1), p).unwrap().into()
    };
    let h = inv(Polynomial::univariate_ints(&[-1, 1]));
    assert_eq!(
        qscale(&h, &q1(2), 2).unwrap(),
        inv(Polynomial::univariate_ints(&[-1, 4]))
    );
    assert!(qscale(&h, &QShift::from_ints(&[2, 2]).unwrap(), 1).is_err());
}

#[test]
fn shift_composition() {
    let h = sf(&(&z(2, 0) * &z(2, 0)) + &z(2, 1));
    let q = QShift::from_ints(&[2, -3]).unwrap();
    let twice = qscale(&qscale(&h, &q, 1).unwrap(), &q, 1).unwrap();
    assert_eq!(twice, qscale(&h, &q, 2).unwrap());
}

#[test]
fn casorati_two_by_two() {
    // det [[1, z], [1, qz]] = (q − 1) z
    let c = casorati(&[sf(Polynomial::one(1)), sf(z(1, 0))], &q1(5)).unwrap();
    assert_eq!(c, sf(z(1, 0).scale(&g(4))));
}

#[test]
fn casorati_vandermonde() {
    for n in 1..=5usize {
        for q in [2i64, -3] {
            let cols: Vec<SliceFunction> = (0..=n as u32).map(|k| sf(z(1, 0).pow(k))).collect();
            let c = casorati(&cols, &q1(q)).unwrap();
            // oracle: z^{n(n+1)/2} ∏_{i<j} (q^j − q^i)
            let mut coeff = g(1);
            for j in 0..=n as u32 {
                for i in 0..j {
                    coeff = coeff * (g(q.pow(j)) - g(q.pow(i)));
                }
            }
            let want = z(1, 0).pow((n * (n + 1) / 2) as u32).scale(&coeff);
            assert_eq!(c, sf(want), "n={n} q={q}");
        }
    }
}

#[test]
fn casorati_dependent_columns() {
    let f = sf(&z(1, 0) + &Polynomial::one(1));
    let c = casorati(
        &[
            f.clone(),
            sf(f.as_polynomial().unwrap().scale(&g(2))),
            sf(z(1, 0).pow(3)),
        ],
        &q1(2),
    )
    .unwrap();
    assert!(c.is_exact_zero());
}

#[test]
fn cofactor_and_bareiss_agree() {
    let cols: Vec<RationalFunction> = vec![
        RationalFunction::from_poly(Polynomial::one(2)),
        RationalFunction::from_poly(z(2, 0)),
        RationalFunction::new(z(2, 1), &z(2, 0) + &Polynomial::one(2)).unwrap(),
        RationalFunction::from_poly(&z(2, 0) * &z(2, 1)),
    ];
    let (a, b) = casorati_both_routes(&cols, &QShift::from_ints(&[2, 3]).unwrap()).unwrap();
    assert_eq!(a, b);
    assert!(!a.is_zero());
}

#[test]
fn monomial_casorati_examples() {
    let f = ProjectiveMap::from_polys(vec![Polynomial::one(1), z(1, 0)]).unwrap();
    let q = q1(3);
    assert_eq!(
        casorati_monomials(&f, 1, &q, MONOMIAL_CAP).unwrap(),
        casorati(f.components(), &q).unwrap()
    );
    let sq = casorati_monomials(&f, 2, &q, MONOMIAL_CAP).unwrap();
    assert!(!sq.is_exact_zero());

    let f2 = ProjectiveMap::from_polys(vec![Polynomial::one(2), z(2, 0), z(2, 1)]).unwrap();
    let qd = QShift::from_ints(&[2, 2]).unwrap();
    assert!(casorati_monomials(&f2, 1, &qd, MONOMIAL_CAP)
        .unwrap()
        .is_exact_zero());
    assert!(matches!(
        casorati_monomials(&f2, 20, &qd, MONOMIAL_CAP),
        Err(NevError::Size(_))
    ));
}

#[test]
fn linear_nondegeneracy_examples() {
    let t = NumericTest::default();
    let f = ProjectiveMap::from_polys(vec![Polynomial::one(1), z(1, 0)]).unwrap();
    assert!(linear_nondegeneracy(&f, &q1(2), t)
        .unwrap()
        .is_nondegenerate());
    let f = ProjectiveMap::from_polys(vec![z(1, 0), z(1, 0).scale(&g(2))]).unwrap();
    assert_eq!(
        linear_nondegeneracy(&f, &q1(2), t).unwrap().verdict,
        Degeneracy::Degenerate
    );
    let ratio = RationalFunction::new(z(2, 0), z(2, 1)).unwrap();
    let f = ProjectiveMap::new(vec![SliceFunction::constant(2, 1), ratio.into()], true).unwrap();
    let qd = QShift::from_ints(&[2, 2]).unwrap();
    assert_eq!(
        linear_nondegeneracy(&f, &qd, t).unwrap().verdict,
        Degeneracy::Degenerate
    );
}

#[test]
fn algebraic_nondegeneracy_examples() {
    let t = NumericTest::default();
    let f = ProjectiveMap::from_polys(vec![Polynomial::one(1), z(1, 0)]).unwrap();
    assert!(algebraic_nondegeneracy(&f, 2, &q1(2), t)
        .unwrap()
        .is_nondegenerate());
    let f2 = ProjectiveMap::from_polys(vec![Polynomial::one(2), z(2, 0), z(2, 1)]).unwrap();
    let qd = QShift::from_ints(&[2, 2]).unwrap();
    assert_eq!(
        algebraic_nondegeneracy(&f2, 2, &qd, t).unwrap().verdict,
        Degeneracy::Degenerate
    );
    let p1: SliceFunction = QPochhammerSpec::on_variable(2, 0, 0.5).unwrap().into();
    let p2: SliceFunction = QPochhammerSpec::on_variable(2, 1, 1.0 / 3.0)
        .unwrap()
        .into();
    let f3 = ProjectiveMap::new(vec![SliceFunction::constant(2, 1), p1, p2], true).unwrap();
    let rep = algebraic_nondegeneracy(&f3, 2, &qd, t).unwrap();
    assert!(!rep.symbolic);
    assert_eq!(rep.samples, 8);
    assert!(rep.is_nondegenerate(), "{rep:?}");
}

#[test]
fn numeric_path_flags_dependent_columns() {
    let p: SliceFunction = QPochhammerSpec::on_variable(1, 0, 0.5).unwrap().into();
    let twice = SliceFunction::product(vec![SliceFunction::constant(1, 2), p.clone()]).unwrap();
    let rep = decide_casorati(&[p, twice], &q1(2), NumericTest::default()).unwrap();
    assert_eq!(rep.verdict, Degeneracy::LikelyDegenerate);
}

#[test]
fn q_periodic_examples() {
    let qd = QShift::from_ints(&[2, 2]).unwrap();
    let r = RationalFunction::new(z(2, 0), z(2, 1)).unwrap();
    assert!(q_periodic_test(&r.into(), &qd).unwrap());
    assert!(!q_periodic_test(&sf(z(1, 0)), &q1(2)).unwrap());
    let r = RationalFunction::new(z(2, 0).pow(3), &z(2, 1).pow(2) * &z(2, 0)).unwrap();
    assert!(q_periodic_test(&r.into(), &qd).unwrap());
    let p: SliceFunction = QPochhammerSpec::on_variable(1, 0, 0.5).unwrap().into();
    assert!(matches!(
        q_periodic_test(&p, &q1(2)),
        Err(NevError::Unsupported(_))
    ));
}

#[test]
fn ldl_ratio_of_identity() {
    let grid = RadialGrid::new(vec![1e2, 1e3, 1e4]).unwrap();
    let rep = ldl_ratio(&sf(z(1, 0)), &q1(2), &grid, &quad(), false).unwrap();
    for row in &rep.rows {
        let want = 2f64.ln() / row.r.ln();
        assert!((row.ratio.unwrap() - want).abs() < 1e-9 * want);
    }
    assert!(matches!(
        ldl_ratio(
            &SliceFunction::constant(1, 3),
            &q1(2),
            &grid,
            &quad(),
            false
        ),
        Err(NevError::Hypothesis(_))
    ));
}

#[test]
fn ldl_guard_on_non_diagonal_q() {
    let h = sf(&z(2, 0) + &z(2, 1));
    let grid = RadialGrid::new(vec![10.0, 100.0]).unwrap();
    let q = QShift::from_ints(&[2, 3]).unwrap();
    assert!(matches!(
        ldl_ratio(&h, &q, &grid, &quad(), false),
        Err(NevError::Hypothesis(_))
    ));
    let rep = ldl_ratio(&h, &q, &grid, &quad(), true).unwrap();
    assert!(rep.exploratory);
}

#[test]
fn shift_counting_closed_forms() {
    let grid = RadialGrid::new(vec![10.0, 1e2, 1e4]).unwrap();
    let h: SliceFunction =
        RationalFunction::new(Polynomial::one(1), Polynomial::univariate_ints(&[-1, 1]))
            .unwrap()
            .into();
    let rep = shift_counting_ratio(&h, &q1(2), &grid, &quad()).unwrap();
    for row in &rep.rows {
        // poles at 1/2 and 1 both count as log r from the base radius 1
        assert!((row.ratio.unwrap() - 1.0).abs() < 1e-12);
    }
    let p: SliceFunction = QPochhammerSpec::on_variable(1, 0, 0.5).unwrap().into();
    let recip = SliceFunction::power(p, -1).unwrap();
    let rep = shift_counting_ratio(&recip, &q1(2), &grid, &quad()).unwrap();
    for row in &rep.rows {
        // poles of h(2z) are those of h plus one at 1/2: N(r, h(2z)) = N(r, h) + log r
        assert!((row.numerator - row.denominator - row.r.ln()).abs() < 1e-9);
    }
}
