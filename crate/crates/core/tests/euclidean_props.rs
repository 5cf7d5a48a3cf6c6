use invpde::euclidean::{
    euclidean_act, metric_data, power_traces, power_traces_at, shape_operator_at, EuclideanMotion,
};
use invpde::expr::{Expr, VarId};
use invpde::harness::{sample_jet, sample_jet_from, trial_rng, Surface};
use invpde::Error;

#[test]
fn metric_inverse_is_exact_through_n4() {
    for n in 1..=4 {
        let m = metric_data(n);
        assert!(m.g.matmul(&m.ginv).is_identity(), "n = {n}");
    }
}

#[test]
fn mean_curvature_trace_matches_the_classical_display() {
    let n = 2;
    let du = |i: usize| Expr::var(VarId::du(i));
    let d = Expr::int(1) + du(1).pow(2) + du(2).pow(2);
    let mut sum = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            let kron = if i == j { d.clone() } else { Expr::int(0) };
            sum.push((kron - du(i) * du(j)) * Expr::var(VarId::d2u(i, j)));
        }
    }
    // det g^{3/2} = det g · w
    let display = Expr::Sum(sum) / (d * Expr::var(VarId::w()));
    assert_eq!(display.to_rat(n).unwrap(), power_traces(n)[0]);
}

#[test]
fn action_is_a_group_action() {
    let mut checked = 0;
    for t in 0..300 {
        let mut rng = trial_rng(21, t);
        let n = 1 + t % 3;
        let p = sample_jet_from(&mut rng, n, 1.0);
        let m1 = EuclideanMotion::random(n, &mut rng, 0.6, 1.0);
        let m2 = EuclideanMotion::random(n, &mut rng, 0.6, 1.0);
        let (Ok(a), Ok(direct)) = (euclidean_act(&m1, &p), euclidean_act(&m2.compose(&m1), &p)) else {
            continue;
        };
        let Ok(b) = euclidean_act(&m2, &a) else { continue };
        assert!(b.max_abs_diff(&direct) <= 1e-9, "trial {t}: {}", b.max_abs_diff(&direct));
        checked += 1;
    }
    assert!(checked > 250);
}

#[test]
fn all_power_traces_are_invariant() {
    for n in 1..=3 {
        let mut admissible = 0;
        for t in 0..1000 {
            let mut rng = trial_rng(1_000 + n as u64, t);
            let p = sample_jet_from(&mut rng, n, 1.0);
            let m = EuclideanMotion::random(n, &mut rng, 1.0, 1.0);
            let Ok(img) = euclidean_act(&m, &p) else { continue };
            admissible += 1;
            for (a, b) in power_traces_at(&p).iter().zip(power_traces_at(&img)) {
                assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "n = {n}, trial {t}: {a} vs {b}");
            }
        }
        assert!(admissible >= 950, "n = {n}: only {admissible} admissible");
    }
}

#[test]
fn symbolic_and_matrix_traces_agree() {
    for n in 1..=3 {
        let exprs = power_traces(n);
        for seed in 0..50 {
            let p = sample_jet(n, seed, 1.0);
            for (e, direct) in exprs.iter().zip(power_traces_at(&p)) {
                let v = e.eval_f64(&|v| p.value(v)).unwrap();
                assert!((v - direct).abs() <= 1e-12 * (1.0 + direct.abs()), "n = {n}: {v} vs {direct}");
            }
        }
    }
}

#[test]
fn spheres_are_umbilic() {
    for r in [0.5, 1.0, 3.0] {
        let s = Surface::sphere(r).unwrap();
        for x in s.sample_points(2, 25, 5) {
            let a = shape_operator_at(&s.jet_at(&x).unwrap());
            let h = a.trace() / 2.0;
            let k = a.determinant();
            assert!((h * h - k).abs() <= 1e-10, "r = {r}");
            assert!((h - 1.0 / r).abs() <= 1e-12);
        }
    }
}

#[test]
fn vertical_images_are_rejected() {
    let p = sample_jet(1, 3, 0.0);
    let quarter = EuclideanMotion::planar(std::f64::consts::FRAC_PI_2);
    assert_eq!(euclidean_act(&quarter, &p), Err(Error::NonAdmissible));
}

#[test]
fn shape_operator_matrix_identity() {
    let n = 2;
    let m = metric_data(n);
    let a = m.ginv.matmul(&m.beta);
    let back = m.g.matmul(&a);
    let diff = back.sub(&m.beta);
    assert!(diff.is_zero());
}
