mod common;

use common::*;
use hypercone::polyform::{elesym_eval, elesym_grad};
use hypercone::{Monomial, PolynomialForm};
use proptest::prelude::*;

fn vec_in(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, n)
}

fn mono(exponents: &[u32], coefficient: f64) -> Monomial {
    Monomial { exponents: exponents.to_vec(), coefficient }
}

/// x1^2 x2 − 3 x1 x2 x3 + 0.5 x3^3 + 2 x2^2 x3
fn cubic() -> PolynomialForm {
    PolynomialForm::sparse(
        3,
        vec![mono(&[2, 1, 0], 1.0), mono(&[1, 1, 1], -3.0), mono(&[0, 0, 3], 0.5), mono(&[0, 2, 1], 2.0)],
    )
    .unwrap()
}

fn cubic_by_hand(x: &[f64]) -> f64 {
    x[0] * x[0] * x[1] - 3.0 * x[0] * x[1] * x[2] + 0.5 * x[2].powi(3) + 2.0 * x[1] * x[1] * x[2]
}

fn forms() -> Vec<PolynomialForm> {
    vec![
        cubic(),
        PolynomialForm::elesym(3, 2).unwrap(),
        PolynomialForm::coordinate_product(3).unwrap(),
        fixture_poly(),
        fixture_poly().expand().unwrap(),
    ]
}

#[test]
fn sparse_evaluation_matches_hand_expansion() {
    let p = cubic();
    let mut r = rng(1);
    for _ in 0..50 {
        let x = normal_vec(&mut r, 3);
        assert!(rel_err(p.eval(&x).unwrap(), cubic_by_hand(&x)) < 1e-13);
        let fd = fd_grad(cubic_by_hand, &x, 1e-6);
        let g = p.grad(&x).unwrap();
        assert!(inf_dist(&g, &fd) < 1e-6 * (1.0 + norm(&fd)));
    }
}

#[test]
fn linear_factors_match_their_expansion() {
    let p = fixture_poly();
    let q = p.expand().unwrap();
    assert_eq!(q.degree(), 4);
    let mut r = rng(2);
    for _ in 0..50 {
        let x = normal_vec(&mut r, 3);
        let e = normal_vec(&mut r, 3);
        assert!((p.eval(&x).unwrap() - q.eval(&x).unwrap()).abs() < 1e-11);
        assert!(inf_dist(&p.grad(&x).unwrap(), &q.grad(&x).unwrap()) < 1e-10);
        let a = p.restriction_coeffs(&e, &x).unwrap();
        let b = q.restriction_coeffs(&e, &x).unwrap();
        let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        assert!(inf_dist(&a, &b) < 1e-10 * scale, "{a:?} vs {b:?}");
        for i in 0..4 {
            let ga = p.restriction_coeff_grad(&e, &x, i).unwrap();
            let gb = q.restriction_coeff_grad(&e, &x, i).unwrap();
            assert!(inf_dist(&ga, &gb) < 1e-9 * scale);
        }
    }
}

#[test]
fn restriction_coefficients_of_elesym_match_sparse_path() {
    for (n, k) in [(5, 3), (6, 6), (7, 2)] {
        let p = PolynomialForm::elesym(n, k).unwrap();
        let q = p.expand().unwrap();
        let mut r = rng(3 + n as u64);
        for _ in 0..20 {
            let x = normal_vec(&mut r, n);
            let e = vec![1.0; n];
            let a = p.restriction_coeffs(&e, &x).unwrap();
            let b = q.restriction_coeffs(&e, &x).unwrap();
            let scale = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            assert!(inf_dist(&a, &b) < 1e-10 * scale);
        }
    }
}

#[test]
fn restriction_coefficients_evaluate_the_line() {
    let mut r = rng(4);
    for p in forms() {
        for _ in 0..20 {
            let x = normal_vec(&mut r, 3);
            let e = normal_vec(&mut r, 3);
            let c = p.restriction_coeffs(&e, &x).unwrap();
            assert_eq!(c.len(), p.degree() + 1);
            for t in [-1.5, 0.3, 2.0] {
                let line: Vec<f64> = x.iter().zip(&e).map(|(a, b)| a + t * b).collect();
                let direct = p.eval(&line).unwrap();
                let poly: f64 = c.iter().rev().fold(0.0, |acc, ci| acc * t + ci);
                assert!((direct - poly).abs() < 1e-9 * (1.0 + direct.abs()));
            }
        }
    }
}

#[test]
fn dir_deriv_of_product_is_elementary_symmetric() {
    let p = PolynomialForm::coordinate_product(4).unwrap();
    let e = vec![1.0; 4];
    let mut r = rng(5);
    for _ in 0..20 {
        let x = normal_vec(&mut r, 4);
        let c = p.dir_deriv_coeffs(&e, &x).unwrap();
        for i in 0..=4 {
            // p^{(i)} = i! σ_{4-i}
            let want = (1..=i).product::<usize>() as f64 * brute_elesym(&x, 4 - i);
            assert!((c.derivative(i) - want).abs() < 1e-11 * (1.0 + want.abs()));
        }
    }
}

#[test]
fn grad_dir_deriv_matches_finite_differences() {
    let p = cubic();
    let e = [0.3, -1.0, 2.0];
    let mut r = rng(6);
    for _ in 0..20 {
        let x = normal_vec(&mut r, 3);
        for i in 0..3 {
            let g = p.grad_dir_deriv(&e, &x, i).unwrap();
            let fd = fd_grad(|y| p.dir_deriv_coeffs(&e, y).unwrap().derivative(i), &x, 1e-5);
            assert!(inf_dist(&g, &fd) < 1e-6 * (1.0 + norm(&fd)), "order {i}: {g:?} vs {fd:?}");
        }
    }
}

#[test]
fn elesym_against_subset_enumeration() {
    let mut r = rng(7);
    for n in 1..=10 {
        for k in 0..=n {
            let x = normal_vec(&mut r, n);
            let want = brute_elesym(&x, k);
            let scale = brute_elesym(&x.iter().map(|v| v.abs()).collect::<Vec<_>>(), k);
            assert!((elesym_eval(n, k, &x).unwrap() - want).abs() <= 1e-13 * scale.max(1.0));
            let g = elesym_grad(n, k, &x).unwrap();
            let fd = fd_grad(|y| brute_elesym(y, k), &x, 1e-6);
            assert!(inf_dist(&g, &fd) < 1e-6 * (1.0 + norm(&fd)));
        }
    }
}

#[test]
fn elesym_at_ones_is_binomial() {
    for n in 0..=30 {
        let ones = vec![1.0; n];
        for k in 0..=n {
            assert_eq!(elesym_eval(n, k, &ones).unwrap(), choose(n, k) as f64);
        }
    }
    assert_eq!(elesym_eval(30, 15, &vec![1.0; 30]).unwrap(), 155_117_520.0);
}

#[test]
fn constructors_reject_bad_input() {
    assert!(PolynomialForm::sparse(2, vec![mono(&[2, 0], 1.0), mono(&[1, 0], 1.0)]).is_err());
    assert!(PolynomialForm::sparse(2, vec![mono(&[1, 1], 1.0), mono(&[1, 1], 2.0)]).is_err());
    assert!(PolynomialForm::sparse(2, vec![mono(&[1, 1, 0], 1.0)]).is_err());
    assert!(PolynomialForm::sparse(2, vec![]).is_err());
    assert!(PolynomialForm::elesym(3, 4).is_err());
    assert!(PolynomialForm::elesym(3, 0).is_err());
    assert!(PolynomialForm::linear_factors(vec![vec![1.0, 2.0], vec![1.0]]).is_err());
    assert!(cubic().eval(&[1.0, 2.0]).is_err());
    assert!(elesym_eval(3, 4, &[1.0, 1.0, 1.0]).is_err());
}

#[test]
fn json_shapes() {
    let p = PolynomialForm::from_json(r#"{"n": 2, "d": 2, "monomials": [{"exp": [1, 1], "coef": 1.0}]}"#).unwrap();
    assert_eq!(p.eval(&[2.0, 3.0]).unwrap(), 6.0);
    let q = PolynomialForm::from_json(r#"{"elesym": {"n": 4, "k": 2}}"#).unwrap();
    assert_eq!(q.eval(&[1.0; 4]).unwrap(), 6.0);
    let f = PolynomialForm::from_json(r#"{"factors": [[1, 0], [0, 1]]}"#).unwrap();
    assert_eq!(f.eval(&[2.0, 5.0]).unwrap(), 10.0);
    for form in [p, q, f, cubic()] {
        assert_eq!(PolynomialForm::from_json(&form.to_json()).unwrap(), form);
    }
    assert!(PolynomialForm::from_json(r#"{"n": 2, "d": 3, "monomials": [{"exp": [1, 1], "coef": 1.0}]}"#).is_err());
}

proptest! {
    #[test]
    fn homogeneity(x in vec_in(3), a in -2.0f64..2.0) {
        for p in forms() {
            let d = p.degree() as i32;
            let ax: Vec<f64> = x.iter().map(|v| a * v).collect();
            let lhs = p.eval(&ax).unwrap();
            let rhs = a.powi(d) * p.eval(&x).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn euler_identity(x in vec_in(3)) {
        for p in forms() {
            let g = p.grad(&x).unwrap();
            let lhs = dot(&g, &x);
            let rhs = p.degree() as f64 * p.eval(&x).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn coefficient_ends_are_values(x in vec_in(3), e in vec_in(3)) {
        for p in forms() {
            let c = p.restriction_coeffs(&e, &x).unwrap();
            let px = p.eval(&x).unwrap();
            let pe = p.eval(&e).unwrap();
            prop_assert!((c[0] - px).abs() <= 1e-10 * (1.0 + px.abs()));
            prop_assert!((c[p.degree()] - pe).abs() <= 1e-10 * (1.0 + pe.abs()));
        }
    }

    #[test]
    fn elesym_is_symmetric(x in vec_in(6), k in 1usize..=6, shift in 0usize..6) {
        let mut y = x.clone();
        y.rotate_left(shift);
        let a = elesym_eval(6, k, &x).unwrap();
        let b = elesym_eval(6, k, &y).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }
}
