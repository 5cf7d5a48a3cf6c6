use std::collections::BTreeMap;

use invpde::conformal::{
    build_element, build_word, conformal_traces, conformal_traces_at, embed, generate_conformal_pde, metric_defect, moebius_act, project,
    GradedGenerator, MinkowskiVector, MoebiusElement,
};
use invpde::euclidean::random_rotation;
use invpde::expr::{Evaluator, RatExpr, VarId};
use invpde::harness::{run_invariance_suite, sample_jet_from, trial_rng};
use invpde::invariant::{Family, InvariantPoly};
use invpde::jet::JetPoint2;
use invpde::series::Mat;
use invpde::Rational;
use proptest::prelude::*;
use rand::Rng;

fn q(p: i64, d: i64) -> Rational {
    Rational::new(p.into(), d.into())
}

fn rat() -> impl Strategy<Value = Rational> {
    (-7i64..=7, 1i64..=5).prop_map(|(p, d)| q(p, d))
}

fn fiber_jet(rng: &mut impl Rng, n: usize) -> JetPoint2 {
    let mut d2u = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = rng.gen_range(-1.0..=1.0);
            d2u[(i, j)] = v;
            d2u[(j, i)] = v;
        }
    }
    JetPoint2::new(0.0, vec![0.0; n], vec![0.0; n], d2u).unwrap()
}

/// Rotations of `R^3` with rational entries from a Pythagorean quadruple.
fn rational_rotation() -> Mat<Rational> {
    Mat::from_rows(vec![
        vec![q(1, 3), q(-2, 3), q(2, 3)],
        vec![q(2, 3), q(-1, 3), q(-2, 3)],
        vec![q(2, 3), q(2, 3), q(1, 3)],
    ])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rational_generators_preserve_eta_exactly(
        a in prop::collection::vec(rat(), 3),
        b in prop::collection::vec(rat(), 3),
        dil in (1i64..=9, 1i64..=9),
        t in rat(),
    ) {
        let gens = [
            GradedGenerator::GMinus(a),
            GradedGenerator::Rotation(rational_rotation()),
            GradedGenerator::Dilation(q(dil.0, dil.1)),
            GradedGenerator::GPlus(b),
            GradedGenerator::AE0(t),
        ];
        for g in &gens {
            prop_assert_eq!(metric_defect(build_element(2, g).unwrap().matrix(), 2), 0.0);
        }
        prop_assert_eq!(metric_defect(build_word(2, &gens).unwrap().matrix(), 2), 0.0);
    }

    #[test]
    fn embedding_lands_on_the_cone(u in rat(), x in prop::collection::vec(rat(), 3)) {
        let v = embed(u.clone(), &x);
        prop_assert_eq!(v.inner(&v), q(0, 1));
        prop_assert_eq!(project(&v).unwrap(), (u, x));
    }
}

#[test]
fn floating_words_preserve_eta() {
    for t in 0..500 {
        let n = 1 + t % 3;
        let m = MoebiusElement::random_near_identity(n, &mut trial_rng(77, t), 0.3);
        assert!(metric_defect(m.matrix(), n) <= 1e-12);
    }
}

#[test]
fn a_e0_translates_the_fiber_along_the_metric() {
    for trial in 0..200 {
        let mut rng = trial_rng(5, trial);
        let n = 1 + trial % 3;
        let p = fiber_jet(&mut rng, n);
        let t = rng.gen_range(-0.5..=0.5);
        let out = moebius_act(&build_element(n, &GradedGenerator::AE0(t)).unwrap(), &p).unwrap();
        let expected = &p.d2u - &Mat::identity(n).scale(&t);
        assert!((&out.d2u - &expected).max_abs() <= 1e-10, "trial {trial}");
        assert!(out.du.iter().chain(&out.x).all(|c| c.abs() <= 1e-15) && out.u.abs() <= 1e-15);
    }
}

#[test]
fn tangential_g_plus_acts_trivially_on_the_fiber() {
    for trial in 0..200 {
        let mut rng = trial_rng(6, trial);
        let n = 1 + trial % 3;
        let p = fiber_jet(&mut rng, n);
        let mut xi = vec![0.0; n + 1];
        for c in &mut xi[1..] {
            *c = rng.gen_range(-0.5..=0.5);
        }
        let out = moebius_act(&build_element(n, &GradedGenerator::GPlus(xi)).unwrap(), &p).unwrap();
        assert!(out.max_abs_diff(&p) <= 1e-10, "trial {trial}");
    }
}

#[test]
fn rotations_conjugate_the_second_fundamental_form() {
    let mut rng = trial_rng(8, 0);
    for _ in 0..50 {
        let n = 3;
        let b = random_rotation(n, &mut rng, 1.0);
        let mut full = Mat::identity(n + 1);
        for i in 0..n {
            for j in 0..n {
                full[(i + 1, j + 1)] = b[(i, j)];
            }
        }
        let p = fiber_jet(&mut rng, n);
        let out = moebius_act(&build_element(n, &GradedGenerator::Rotation(full)).unwrap(), &p).unwrap();
        assert!((&out.d2u - &(&(&b * &p.d2u) * &b.transpose())).max_abs() <= 1e-12);
    }
}

#[test]
fn weight_zero_ratios_are_invariant() {
    for n in [2, 3] {
        let r = run_invariance_suite(Family::Conformal, n, 500, 1e-7, 2024).unwrap();
        assert_eq!(r.failures, 0, "{r:?}");
    }
}

#[test]
fn traceless_traces_scale_by_one_factor() {
    for t in 0..200 {
        let mut rng = trial_rng(31, t);
        let p = sample_jet_from(&mut rng, 3, 0.5);
        let m = MoebiusElement::random_near_identity(3, &mut rng, 0.3);
        let Ok(img) = moebius_act(&m, &p) else { continue };
        let (a, b) = (conformal_traces_at(&p), conformal_traces_at(&img));
        if a[0] < 1e-6 {
            continue;
        }
        let c = (b[0] / a[0]).sqrt();
        assert!(c > 0.0);
        assert!((b[1] - c.powi(3) * a[1]).abs() <= 1e-7 * c.powi(3) * a[0].powf(1.5), "trial {t}");
    }
}

fn exact_jet(du: &[Rational], d2u: Vec<Vec<Rational>>) -> JetPoint2<Rational> {
    let n = du.len();
    JetPoint2::new(q(0, 1), vec![q(0, 1); n], du.to_vec(), Mat::from_rows(d2u)).unwrap()
}

#[test]
fn zero_sets_are_preserved() {
    let z = q(0, 1);
    // du = (3/2, 3) has w = 7/2; d2u = c w g is umbilic
    let du = [q(3, 2), q(3, 1)];
    let w = q(7, 2);
    let g = |i: usize, j: usize| if i == j { q(1, 1) } else { z.clone() } + du[i].clone() * du[j].clone();
    let umbilic2 = exact_jet(&du, (0..2).map(|i| (0..2).map(|j| q(2, 5) * w.clone() * g(i, j)).collect()).collect());
    // eigenvalues (1, −1, 0) shifted: τ°_3 = 0 with τ°_2 ≠ 0
    let shifted3 = exact_jet(
        &[z.clone(), z.clone(), z.clone()],
        vec![vec![q(3, 2), z.clone(), z.clone()], vec![z.clone(), q(-1, 2), z.clone()], vec![z.clone(), z.clone(), q(1, 2)]],
    );
    let cases = [
        (2, InvariantPoly::symbol(Family::Conformal, 2), umbilic2),
        (3, InvariantPoly::symbol(Family::Conformal, 3), shifted3),
    ];
    for (n, f, p) in cases {
        let pde = generate_conformal_pde(&f, n).unwrap();
        let num = Evaluator::new(&pde.numerator);
        let form = Evaluator::new(&pde.form);
        let exact: BTreeMap<VarId, RatExpr> = (1..=n)
            .map(|i| (VarId::du(i), RatExpr::constant(n, p.du[i - 1].clone())))
            .chain((1..=n).flat_map(|i| (i..=n).map(move |j| (i, j))).map(|(i, j)| {
                (VarId::d2u(i, j), RatExpr::constant(n, p.d2u[(i - 1, j - 1)].clone()))
            }))
            .collect();
        assert!(pde.numerator.substitute(&exact).unwrap().is_zero(), "n = {n}");
        let pf = p.to_f64();
        assert!(num.eval(&|v| pf.value(v)).unwrap().abs() <= 1e-12);
        for t in 0..100 {
            let m = MoebiusElement::random_near_identity(n, &mut trial_rng(90 + n as u64, t), 0.3);
            let Ok(img) = moebius_act(&m, &pf) else { continue };
            let r = form.eval(&|v| img.value(v)).unwrap().abs();
            assert!(r <= 1e-8, "n = {n}, trial {t}: {r:e}");
        }
    }
}

#[test]
fn chart_boundary_is_reported() {
    // exchanges p and q up to sign, sending the origin to infinity
    let n = 1;
    let mut m = Mat::<f64>::zeros(4, 4);
    m[(0, 3)] = 1.0;
    m[(3, 0)] = 1.0;
    m[(1, 1)] = -1.0;
    m[(2, 2)] = 1.0;
    let inversion = MoebiusElement::new(m).unwrap();
    assert_eq!(moebius_act(&inversion, &JetPoint2::zero(1)), Err(invpde::Error::ChartBoundary));
    let v = inversion.apply(&MinkowskiVector::basis(n, 0));
    assert_eq!(project(&v), Err(invpde::Error::ChartBoundary));
}

#[test]
fn n2_traceless_trace_identities() {
    use invpde::euclidean::power_traces;
    use invpde::expr::Expr;
    let n = 2;
    let t2 = conformal_traces(n).unwrap().remove(0);
    let flat: BTreeMap<VarId, RatExpr> = [(VarId::du(1), RatExpr::zero(n)), (VarId::du(2), RatExpr::zero(n))].into();
    let u = |i, j| Expr::var(VarId::d2u(i, j));
    let expected = Expr::rational(1, 2) * (u(1, 1) - u(2, 2)).pow(2) + Expr::int(2) * u(1, 2).pow(2);
    assert_eq!(t2.substitute(&flat).unwrap(), expected.to_rat(n).unwrap());
    // −½ τ°_2 = K − H² with H = τ_1/2, K = ½(τ_1² − τ_2)
    let tau = power_traces(n);
    let h = tau[0].scale(&q(1, 2));
    let k = (&(&tau[0] * &tau[0]) - &tau[1]).scale(&q(1, 2));
    assert_eq!(t2.scale(&q(-1, 2)), &k - &(&h * &h));
}
