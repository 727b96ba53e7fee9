use num::complex::Complex64;

use super::*;
use crate::exactalg::{GaussianRational, Polynomial, RationalFunction};
use crate::funcspace::{HomogeneousForm, ProjectiveMap, QPochhammerSpec, SliceFunction};
use crate::nevcore::{fmt_residual, QuadratureSpec, RadialGrid};
use crate::qops::QShift;
use crate::NevError;

fn z(m: usize, i: usize) -> Polynomial {
    Polynomial::var(m, i)
}

fn one_z() -> ProjectiveMap {
    ProjectiveMap::from_polys(vec![Polynomial::one(1), z(1, 0)]).unwrap()
}

fn hp(c: &[i64]) -> HomogeneousForm {
    HomogeneousForm::hyperplane_ints(c).unwrap()
}

fn three_lines() -> Vec<HomogeneousForm> {
    vec![hp(&[1, 0]), hp(&[0, 1]), hp(&[1, 1])]
}

fn q1(v: i64) -> QShift {
    QShift::from_ints(&[v]).unwrap()
}

fn grid() -> RadialGrid {
    RadialGrid::spaced(10.0, 1e4, 13, true).unwrap()
}

fn quad() -> QuadratureSpec {
    QuadratureSpec::new(8, 512, 0).unwrap()
}

fn opts() -> SmtOptions {
    SmtOptions::default()
}

#[test]
fn cartan_closed_form() {
    let rep =
        verify_cartan_smt(&one_z(), &three_lines(), &q1(2), &grid(), &quad(), &opts()).unwrap();
    for row in &rep.rows {
        // T = ½log(1+r²) − ½log 2, Σ N_j = 2 log r, N(1/C) = log r
        let want = 0.5 * 2f64.ln() - 0.5 * (1.0 + 1.0 / (row.r * row.r)).ln();
        assert!(
            (row.margin - want).abs() < 1e-6,
            "r={} {} {}",
            row.r,
            row.margin,
            want
        );
        assert_eq!(row.margin, row.rhs - row.lhs);
    }
    assert_eq!(rep.verdict, Verdict::Pass, "{:?}", rep.hypotheses);
    assert!(rep.trend.unwrap().abs() < 1e-3);
    assert_eq!(rep.terms.len(), 4);
}

#[test]
fn cartan_vacuous_case() {
    let hs = vec![hp(&[1, 0]), hp(&[0, 1])];
    let rep = verify_cartan_smt(&one_z(), &hs, &q1(2), &grid(), &quad(), &opts()).unwrap();
    assert!(rep.rows.iter().all(|r| r.lhs == 0.0));
    assert_eq!(rep.terms.len(), 3);
}

#[test]
fn cartan_degenerate_map() {
    let f = ProjectiveMap::new(
        vec![
            z(1, 0).into(),
            z(1, 0).scale(&GaussianRational::from_int(2)).into(),
        ],
        false,
    )
    .unwrap();
    let rep = verify_cartan_smt(&f, &three_lines(), &q1(2), &grid(), &quad(), &opts()).unwrap();
    assert_eq!(rep.verdict, Verdict::ReportOnly);
    assert!(
        rep.hypotheses
            .iter()
            .any(|h| h.status == HypothesisStatus::Failed
                && h.detail == "Casoratian identically zero")
    );
    assert_eq!(rep.rows.len(), grid().len());
}

#[test]
fn cartan_rejects_non_hyperplanes() {
    let conic = HomogeneousForm::from_poly(&z(2, 0) * &z(2, 1)).unwrap();
    assert!(matches!(
        verify_cartan_smt(&one_z(), &[conic], &q1(2), &grid(), &quad(), &opts()),
        Err(NevError::Usage(_))
    ));
}

/// `max_K Σ λ` for `f = [1, u]` and the three lines, from the closed forms.
fn weil_max_closed(u: Complex64) -> f64 {
    let n2 = (1.0 + u.norm_sqr()).ln() / 2.0;
    let l0 = n2;
    let l1 = n2 - u.norm().ln();
    let l2 = n2 + 0.5 * 2f64.ln() - (1.0 + u).norm().ln();
    (l0 + l1).max(l0 + l2).max(l1 + l2)
}

#[test]
fn hsmt_matches_closed_form_weil_values() {
    let g = RadialGrid::new(vec![10.0, 100.0, 1000.0]).unwrap();
    let rep = verify_hsmt_weil(&one_z(), &three_lines(), &q1(2), &g, &quad(), &opts()).unwrap();
    for row in &rep.rows {
        // independent midpoint rule on a finer circle
        let k = 20000;
        let mean: f64 = (0..k)
            .map(|j| {
                let th = std::f64::consts::TAU * (j as f64 + 0.5) / k as f64;
                weil_max_closed(Complex64::from_polar(row.r, th))
            })
            .sum::<f64>()
            / k as f64;
        assert!(
            (row.lhs - mean).abs() < 1e-3,
            "r={} {} {}",
            row.r,
            row.lhs,
            mean
        );
    }
    let m = rep.margins();
    let spread =
        m.iter().cloned().fold(f64::MIN, f64::max) - m.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 0.1, "{m:?}");
}

#[test]
fn weil_mean_agrees_with_proximity() {
    let g = RadialGrid::new(vec![3.0, 30.0, 300.0]).unwrap();
    let h = hp(&[1, 1]);
    let a = weil_proximity(&one_z(), &h, &g, &quad()).unwrap();
    let b = fmt_residual(&one_z(), &h, &g, &quad()).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x.value - y.proximity).abs() < 1e-9);
    }
    let f = ProjectiveMap::from_polys(vec![Polynomial::one(2), z(2, 0), z(2, 1)]).unwrap();
    let h = HomogeneousForm::hyperplane_ints(&[1, 2, -1]).unwrap();
    let a = weil_proximity(&f, &h, &g, &quad()).unwrap();
    let b = fmt_residual(&f, &h, &g, &quad()).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x.value - y.proximity).abs() < 1e-9);
    }
}

#[test]
fn hypersurface_reduces_to_hyperplanes() {
    let a = verify_cartan_smt(&one_z(), &three_lines(), &q1(2), &grid(), &quad(), &opts()).unwrap();
    let b = verify_hypersurface_smt(
        &one_z(),
        &three_lines(),
        &q1(2),
        1,
        &grid(),
        &quad(),
        &opts(),
    )
    .unwrap();
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert!(
            (x.margin - y.margin).abs() <= 2.0 * x.err.max(1e-12),
            "{x:?} {y:?}"
        );
    }
    assert_eq!(b.verdict, Verdict::Pass);
}

#[test]
fn hypersurface_vacuous_and_alpha_guard() {
    let hs = vec![hp(&[1, 0]), hp(&[0, 1])];
    let b = verify_hypersurface_smt(&one_z(), &hs, &q1(2), 2, &grid(), &quad(), &opts()).unwrap();
    assert!(b.rows.iter().all(|r| r.lhs == 0.0));
    let conics: Vec<HomogeneousForm> = [[1, 0, 0], [0, 0, 1], [1, 1, 1]]
        .iter()
        .map(|c| {
            let p = Polynomial::from_terms(
                2,
                [
                    (vec![2, 0], GaussianRational::from_int(c[0])),
                    (vec![1, 1], GaussianRational::from_int(c[1])),
                    (vec![0, 2], GaussianRational::from_int(c[2])),
                ],
            )
            .unwrap();
            HomogeneousForm::from_poly(p).unwrap()
        })
        .collect();
    let g = RadialGrid::new(vec![10.0, 100.0]).unwrap();
    let rep = verify_hypersurface_smt(&one_z(), &conics, &q1(2), 3, &g, &quad(), &opts()).unwrap();
    assert_eq!(rep.verdict, Verdict::ReportOnly);
    assert!(rep
        .hypotheses
        .iter()
        .any(|h| h.name == "alpha divisible by d" && h.status == HypothesisStatus::Failed));
}

#[test]
fn gundersen_hayman_closed_form() {
    let rep =
        gundersen_hayman_identity(&one_z(), &three_lines(), &q1(2), &grid(), &quad()).unwrap();
    for row in &rep.rows {
        // L = (1 + z)/(q − 1): one zero at −1
        assert!((row.lhs - row.r.ln()).abs() < 1e-9);
        assert!((row.rhs - row.r.ln()).abs() < 1e-9);
    }
    assert!(rep.variation < 1e-9);
    let empty = gundersen_hayman_identity(&one_z(), &[], &q1(2), &grid(), &quad()).unwrap();
    assert!(empty.rows.iter().all(|r| r.residual.abs() < 1e-9));
    let scaled = vec![hp(&[3, 0]), hp(&[0, -5]), hp(&[7, 7])];
    let s = gundersen_hayman_identity(&one_z(), &scaled, &q1(2), &grid(), &quad()).unwrap();
    for (a, b) in s.rows.iter().zip(&rep.rows) {
        assert!((a.residual - b.residual).abs() < 1e-9);
    }
}

#[test]
fn forward_invariance_examples() {
    assert!(forward_invariance_check(&z(1, 0), &q1(5)).unwrap());
    let g = &z(1, 0) - &Polynomial::one(1);
    assert!(!forward_invariance_check(&g, &q1(2)).unwrap());
    let g = &(&z(2, 0) * &z(2, 0)) - &z(2, 1);
    assert!(forward_invariance_check(&g, &QShift::from_ints(&[2, 4]).unwrap()).unwrap());
    assert!(forward_invariance_check(&Polynomial::zero(1), &q1(2)).is_err());
}

#[test]
fn partition_examples() {
    let two = GaussianRational::from_int(2);
    let comps: Vec<SliceFunction> = vec![
        Polynomial::one(1).into(),
        z(1, 0).into(),
        z(1, 0).scale(&two).into(),
    ];
    let p = partition_by_q_ratio(&comps, &q1(2)).unwrap();
    assert_eq!(p.classes, vec![vec![0], vec![1, 2]]);
    assert_eq!(p.l, 2);
    let comps: Vec<SliceFunction> = vec![z(2, 0).into(), z(2, 1).into()];
    let p = partition_by_q_ratio(&comps, &QShift::from_ints(&[2, 2]).unwrap()).unwrap();
    assert_eq!(p.classes, vec![vec![0, 1]]);
    let p = partition_by_q_ratio(&comps, &QShift::from_ints(&[2, 3]).unwrap()).unwrap();
    assert_eq!(p.classes, vec![vec![0], vec![1]]);
    let poch: SliceFunction = QPochhammerSpec::on_variable(1, 0, 0.5).unwrap().into();
    assert!(matches!(
        partition_by_q_ratio(&[poch, z(1, 0).into()], &q1(2)),
        Err(NevError::Unsupported(_))
    ));
}

#[test]
fn picard_examples() {
    let f = ProjectiveMap::from_polys(vec![Polynomial::one(1), z(1, 0).pow(3)]).unwrap();
    let rep = picard_check(&f, &three_lines(), &q1(2)).unwrap();
    assert_eq!(rep.invariant, vec![true, true, false]);
    assert_eq!(rep.failed, vec![2]);
    assert_eq!(rep.verdict, Verdict::ReportOnly);

    let c = ProjectiveMap::from_polys(vec![
        Polynomial::one(1),
        Polynomial::constant(1, GaussianRational::from_int(2)),
    ])
    .unwrap();
    let rep = picard_check(&c, &three_lines(), &q1(2)).unwrap();
    assert_eq!(rep.q_invariant_map, Some(true));
    assert_eq!(rep.verdict, Verdict::Pass);

    let f = ProjectiveMap::from_polys(vec![z(2, 0), z(2, 1)]).unwrap();
    let hs = vec![hp(&[1, 0]), hp(&[0, 1]), hp(&[1, -1])];
    let rep = picard_check(&f, &hs, &QShift::from_ints(&[2, 2]).unwrap()).unwrap();
    assert!(rep.failed.is_empty());
    assert_eq!(rep.q_invariant_map, Some(true));
    assert_eq!(rep.dimension_bound, Some(0));
    assert_eq!(rep.observed_dimension, 0);
    assert_eq!(rep.partition.l, 1);
    assert_eq!(rep.verdict, Verdict::Pass);
}

fn w_at(q: Option<i64>, e: u32) -> QDiffFactor {
    match q {
        Some(v) => QDiffFactor::shifted(q1(v), e),
        None => QDiffFactor::plain(e),
    }
}

fn term(c: i64, f: Vec<QDiffFactor>) -> QDiffTerm {
    QDiffTerm {
        coeff: SliceFunction::constant(1, c),
        factors: f,
    }
}

#[test]
fn qdiff_evaluation() {
    let w: SliceFunction = z(1, 0).into();
    let p = QDiffPolynomial::new(1, vec![term(1, vec![w_at(None, 1), w_at(Some(2), 1)])]).unwrap();
    assert_eq!(p.total_degree(), 2);
    let two = GaussianRational::from_int(2);
    assert_eq!(
        eval_qdiff_polynomial(&p, &w).unwrap(),
        SliceFunction::from(z(1, 0).pow(2).scale(&two))
    );
    assert!(eval_qdiff_polynomial(&QDiffPolynomial::zero(1), &w)
        .unwrap()
        .is_exact_zero());
    let g = QDiffPolynomial::new(
        1,
        vec![
            term(1, vec![w_at(Some(2), 1)]),
            term(-1, vec![w_at(None, 1)]),
        ],
    )
    .unwrap();
    assert_eq!(eval_qdiff_polynomial(&g, &w).unwrap(), w);
    let poch: SliceFunction = QPochhammerSpec::on_variable(1, 0, 0.5).unwrap().into();
    let u = Complex64::new(0.3, 0.7);
    let v = eval_qdiff_at(&p, &poch, &[u]).unwrap();
    let want = poch.eval_c64(&[u]) * poch.eval_c64(&[u * 2.0]);
    assert!((v - want).norm() < 1e-12 * want.norm());
}

#[test]
fn clunie_negative_control() {
    let w: SliceFunction = z(1, 0).into();
    let u = QDiffPolynomial::new(1, vec![term(1, vec![w_at(None, 1)])]).unwrap();
    let p = QDiffPolynomial::new(1, vec![term(1, vec![w_at(Some(2), 1)])]).unwrap();
    let q = QDiffPolynomial::new(1, vec![term(1, vec![w_at(None, 1), w_at(Some(2), 1)])]).unwrap();
    let rep = clunie_check(&u, &p, &q, &w, &grid(), &quad()).unwrap();
    assert_eq!(rep.identity, IdentityCheck::Symbolic);
    assert_eq!(rep.verdict, Verdict::ReportOnly);
    assert_eq!((rep.deg_u, rep.deg_q), (1, 2));
    // U·P ≠ Q is a usage error
    assert!(matches!(
        clunie_check(&u, &p, &u, &w, &grid(), &quad()),
        Err(NevError::Usage(_))
    ));
}

#[test]
fn clunie_small_coefficient() {
    let w: SliceFunction = QPochhammerSpec::on_variable(1, 0, 0.5).unwrap().into();
    let c: SliceFunction =
        RationalFunction::new(Polynomial::one(1), Polynomial::univariate_ints(&[-3, 1]))
            .unwrap()
            .into();
    let u = QDiffPolynomial::new(1, vec![term(1, vec![w_at(None, 1)])]).unwrap();
    let p = QDiffPolynomial::new(
        1,
        vec![QDiffTerm {
            coeff: c.clone(),
            factors: vec![],
        }],
    )
    .unwrap();
    let q = QDiffPolynomial::new(
        1,
        vec![QDiffTerm {
            coeff: c,
            factors: vec![w_at(None, 1)],
        }],
    )
    .unwrap();
    let rep = clunie_check(&u, &p, &q, &w, &grid(), &quad()).unwrap();
    assert_eq!(rep.identity, IdentityCheck::Numeric);
    assert_eq!(rep.verdict, Verdict::Pass, "{:?}", rep.hypotheses);
    let last = rep.rows.last().unwrap().ratio.unwrap();
    assert!(last < 1e-6);
    let zero = QDiffPolynomial::zero(1);
    let rep = clunie_check(&u, &zero, &zero, &w, &grid(), &quad()).unwrap();
    assert!(rep.rows.iter().all(|r| r.ratio == Some(0.0)));
}

fn product_g() -> QDiffPolynomial {
    QDiffPolynomial::new(1, vec![term(1, vec![w_at(Some(2), 1), w_at(None, 1)])]).unwrap()
}

#[test]
fn tumura_controls_are_report_only() {
    let p: SliceFunction = QPochhammerSpec::on_variable(1, 0, 0.5).unwrap().into();
    let recip = SliceFunction::power(p.clone(), -1).unwrap();
    for f in [p, recip] {
        let rep = tumura_clunie_ratio(&product_g(), &f, &grid(), &quad(), TUMURA_FLOOR).unwrap();
        assert_eq!(rep.verdict, Verdict::ReportOnly);
        assert!(rep.floor_check.is_none());
        assert!(rep
            .hypotheses
            .iter()
            .any(|h| h.name.starts_with("N(r,1/f)") && h.status == HypothesisStatus::Failed));
    }
}

#[test]
fn tumura_range_valid_case_runs_floor_check() {
    // a huge constant factor keeps the zero count small against T on the grid
    let big = Polynomial::constant(
        1,
        GaussianRational::from_real(num::BigRational::from_integer(
            num::BigInt::from(10).pow(300),
        )),
    );
    let p: SliceFunction = QPochhammerSpec::on_variable(1, 0, 0.5).unwrap().into();
    let f = SliceFunction::product(vec![big.into(), p]).unwrap();
    let g = RadialGrid::spaced(10.0, 1e3, 7, true).unwrap();
    let rep = tumura_clunie_ratio(&product_g(), &f, &g, &quad(), TUMURA_FLOOR).unwrap();
    assert!(
        rep.floor_check.is_some(),
        "{:?} {:?}",
        rep.hypothesis_ratio,
        rep.hypotheses
    );
    assert_eq!(rep.verdict, Verdict::ReportOnly);
}
