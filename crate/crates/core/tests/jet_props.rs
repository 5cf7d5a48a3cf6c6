use std::collections::BTreeMap;

use invpde::expr::{Expr, RatExpr, VarId};
use invpde::jet::{contact_forms, fiber_translate, rational_jet, total_derivative, JetPoint2};
use invpde::series::Mat;
use invpde::{Error, Rational};
use proptest::prelude::*;

const N: usize = 2;

fn q(p: i64, d: i64) -> Rational {
    Rational::new(p.into(), d.into())
}

fn rat() -> impl Strategy<Value = Rational> {
    (-5i64..=5, 1i64..=3).prop_map(|(p, d)| q(p, d))
}

/// Random expressions of jet order at most one.
fn low_order() -> impl Strategy<Value = RatExpr> {
    let vars = vec![VarId::u(), VarId::x(1), VarId::x(2), VarId::du(1), VarId::du(2), VarId::w()];
    let leaf = prop_oneof![
        (-3i64..=3).prop_map(Expr::int),
        prop::sample::select(vars).prop_map(Expr::var),
    ];
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Expr::Sum),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(Expr::Product),
            inner.prop_map(|b| b.pow(2)),
        ]
    })
    .prop_map(|e| e.to_rat(N).unwrap())
}

fn sym(n: usize) -> impl Strategy<Value = Mat<Rational>> {
    prop::collection::vec(rat(), n * (n + 1) / 2).prop_map(move |tri| {
        let mut m = Mat::zeros(n, n);
        let mut k = 0;
        for i in 0..n {
            for j in 0..=i {
                m[(i, j)] = tri[k].clone();
                m[(j, i)] = tri[k].clone();
                k += 1;
            }
        }
        m
    })
}

fn jet() -> impl Strategy<Value = JetPoint2<Rational>> {
    (rat(), prop::collection::vec(rat(), N), prop::collection::vec(rat(), N), sym(N))
        .prop_map(|(u, x, du, d2u)| JetPoint2::new(u, x, du, d2u).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn leibniz_rule(a in low_order(), b in low_order(), i in 1usize..=N) {
        let lhs = total_derivative(&(&a * &b), i, 2).unwrap();
        let rhs = &(&total_derivative(&a, i, 2).unwrap() * &b) + &(&a * &total_derivative(&b, i, 2).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn truncated_derivatives_commute(e in low_order()) {
        let d = |e: &RatExpr, i: usize, order: usize| total_derivative(e, i, order).unwrap();
        prop_assert_eq!(d(&d(&e, 2, 2), 1, 3), d(&d(&e, 1, 2), 2, 3));
    }

    #[test]
    fn contact_forms_vanish_on_lifted_graphs(c0 in rat(), c1 in prop::collection::vec(rat(), N), c2 in sym(N)) {
        let x = |i: usize| RatExpr::var(N, VarId::x(i + 1));
        let k = |c: &Rational| RatExpr::constant(N, c.clone());
        let mut f = k(&c0);
        for i in 0..N {
            f = &f + &(&k(&c1[i]) * &x(i));
            for j in 0..N {
                f = &f + &(&k(&(c2[(i, j)].clone() / q(2, 1))) * &(&x(i) * &x(j)));
            }
        }
        let fx = |i: usize| f.partial(VarId::x(i + 1));
        let mut lift = BTreeMap::new();
        lift.insert(VarId::u(), f.clone());
        for i in 0..N {
            lift.insert(VarId::du(i + 1), fx(i));
            for j in 0..N {
                lift.insert(VarId::d2u(i + 1, j + 1), fx(i).partial(VarId::x(j + 1)));
            }
        }
        for j in 0..N {
            let mut tangent = BTreeMap::new();
            for v in [VarId::u(), VarId::du(1), VarId::du(2)] {
                tangent.insert(v, lift[&v].partial(VarId::x(j + 1)));
            }
            for i in 0..N {
                tangent.insert(VarId::x(i + 1), RatExpr::int(N, i64::from(i == j)));
            }
            for form in contact_forms(N) {
                let along: BTreeMap<VarId, RatExpr> =
                    form.coefficients.iter().map(|(v, c)| (*v, c.substitute(&lift).unwrap())).collect();
                let pulled = invpde::jet::ContactForm { level: form.level, coefficients: along };
                prop_assert!(pulled.contract(&tangent).is_zero());
            }
        }
    }

    #[test]
    fn fiber_action_is_free_and_transitive(p in jet(), v in sym(N), w in sym(N), target in sym(N)) {
        let vw = &v + &w;
        prop_assert_eq!(fiber_translate(&p, &vw).unwrap(), fiber_translate(&fiber_translate(&p, &v).unwrap(), &w).unwrap());
        let moved = fiber_translate(&p, &v).unwrap();
        prop_assert_eq!(&moved.d2u - &p.d2u, v.clone());
        if moved == p {
            prop_assert_eq!(v.max_abs(), 0.0);
        }
        let goal = JetPoint2 { d2u: target.clone(), ..p.clone() };
        prop_assert_eq!(fiber_translate(&p, &(&target - &p.d2u)).unwrap(), goal);
    }
}

#[test]
fn fiber_translation_rejects_asymmetric_shifts() {
    let p = rational_jet(q(0, 1), vec![q(0, 1); 2], vec![q(1, 1), q(2, 1)], vec![vec![q(0, 1); 2]; 2]).unwrap();
    let v = Mat::from_rows(vec![vec![q(0, 1), q(1, 1)], vec![q(0, 1), q(0, 1)]]);
    assert_eq!(fiber_translate(&p, &v), Err(Error::NotSymmetric));
}

#[test]
fn order_overflow_is_reported() {
    let e = RatExpr::var(N, VarId::d2u(1, 2));
    assert_eq!(total_derivative(&e, 1, 2), Err(Error::OrderOverflow { order: 2, found: 2 }));
}
