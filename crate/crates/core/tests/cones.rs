mod common;

use common::*;
use hypercone::cones::{derivative_relaxation, p_norm};
use hypercone::{
    ConeOracle, ConeSpec, Error, HyperbolicForm, HyperbolicityCone, IsometricForm, Orthant, PCone,
    PolynomialForm,
};
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;

fn hyperbolic(poly: PolynomialForm, e: Vec<f64>) -> HyperbolicityCone {
    HyperbolicityCone::from_poly(poly, e).unwrap()
}

fn hyperbolic_orthant(n: usize) -> HyperbolicityCone {
    hyperbolic(PolynomialForm::coordinate_product(n).unwrap(), vec![1.0; n])
}

/// Random boundary point and a random unit vector of the cone.
fn boundary_and_member(cone: &dyn ConeOracle, r: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let n = cone.dim();
    let e = cone.interior_point().to_vec();
    let x = normal_vec(r, n);
    let l = cone.lambda_min(&x).unwrap();
    let z: Vec<f64> = x.iter().zip(&e).map(|(a, b)| a - l * b).collect();
    let y = normal_vec(r, n);
    let ly = cone.lambda_min(&y).unwrap();
    let a = normal_vec(r, 1)[0].abs();
    let w: Vec<f64> = y.iter().zip(&e).map(|(v, b)| v + (a - ly) * b).collect();
    let wn = norm(&w);
    (z, w.iter().map(|v| v / wn).collect())
}

fn oracles() -> Vec<Box<dyn ConeOracle>> {
    vec![
        Box::new(HyperbolicityCone::new(fixture_form()).unwrap()),
        Box::new(derivative_relaxation(6, 3).unwrap()),
        Box::new(derivative_relaxation(10, 1).unwrap()),
        Box::new(hyperbolic_orthant(4)),
        Box::new(hyperbolic(PolynomialForm::elesym(5, 2).unwrap().expand().unwrap(), vec![1.0; 5])),
        Box::new(PCone::new(1.5, 6).unwrap()),
        Box::new(PCone::new(3.0, 6).unwrap()),
        Box::new(Orthant::new(7).unwrap()),
    ]
}

#[test]
fn conjugate_vectors_are_complementary_and_dual_feasible() {
    let mut r = rng(31);
    for cone in oracles() {
        for _ in 0..100 {
            let (z, w) = boundary_and_member(cone.as_ref(), &mut r);
            let s = cone.conjugate_vector(&z).unwrap();
            assert!((norm(&s) - 1.0).abs() < 1e-12, "{}", cone.label());
            assert!(
                dot(&s, &z).abs() <= 1e-8 * norm(&s) * norm(&z),
                "{}: <s,z> = {:e}",
                cone.label(),
                dot(&s, &z)
            );
            assert!(dot(&s, &w) >= -1e-8, "{}: <s,w> = {:e}", cone.label(), dot(&s, &w));
            assert!(dot(&s, cone.interior_point()) > 0.0);
            if let Some(d) = cone.dual_lambda_min(&s) {
                assert!(d >= -1e-8, "{}: dual lambda_min {d:e}", cone.label());
            }
        }
    }
}

#[test]
fn conjugates_at_multiple_zero_eigenvalues() {
    let cone = derivative_relaxation(6, 2).unwrap();
    let mut r = rng(32);
    for _ in 0..50 {
        // two equal smallest coordinates give a double zero eigenvalue of σ_{6,4}
        let mut x = normal_vec(&mut r, 6);
        x[1] = x[0];
        let l = cone.lambda_min(&x).unwrap();
        let z: Vec<f64> = x.iter().map(|v| v - l).collect();
        let detail = cone.conjugate_detail(&z).unwrap();
        assert!(dot(&detail.vector, &z).abs() <= 1e-8 * norm(&z));
        let (_, w) = boundary_and_member(&cone, &mut r);
        assert!(dot(&detail.vector, &w) >= -1e-8);
    }
}

#[test]
fn lambda_min_shift_and_membership() {
    let mut r = rng(33);
    for cone in oracles() {
        let e = cone.interior_point().to_vec();
        let minus_e: Vec<f64> = e.iter().map(|v| -v).collect();
        assert!((cone.lambda_min(&minus_e).unwrap() + 1.0).abs() < 1e-12, "{}", cone.label());
        assert!((cone.lambda_min(&e).unwrap() - 1.0).abs() < 1e-12);
        for _ in 0..20 {
            let x = normal_vec(&mut r, cone.dim());
            let t = 3.0 * normal_vec(&mut r, 1)[0];
            let l = cone.lambda_min(&x).unwrap();
            let shifted: Vec<f64> = x.iter().zip(&e).map(|(a, b)| a - t * b).collect();
            let ls = cone.lambda_min(&shifted).unwrap();
            assert!((ls - (l - t)).abs() <= 1e-8 * (1.0 + t.abs() + l.abs()), "{}", cone.label());
        }
    }
}

#[test]
fn derivative_relaxations_are_nested() {
    let n = 7;
    let mut r = rng(34);
    for _ in 0..50 {
        let x = normal_vec(&mut r, n);
        let mins: Vec<f64> =
            (0..n).map(|k| derivative_relaxation(n, k).unwrap().lambda_min(&x).unwrap()).collect();
        // Λ_0 ⊆ Λ_1 ⊆ ... so lambda_min grows with the relaxation order
        for w in mins.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "{mins:?}");
        }
        let smallest = x.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((mins[0] - smallest).abs() < 1e-9);
    }
    assert!(derivative_relaxation(4, 4).is_err());
}

#[test]
fn pcone_examples() {
    let p2 = PCone::new(2.0, 2).unwrap();
    assert!(p2.lambda_min(&[5.0, 3.0, 4.0]).unwrap().abs() < 1e-14);
    let s = p2.conjugate_vector(&[5.0, 3.0, 4.0]).unwrap();
    let want: Vec<f64> = [5.0, -3.0, -4.0].iter().map(|v| v / 50f64.sqrt()).collect();
    assert!(inf_dist(&s, &want) < 1e-14);

    let p3 = PCone::new(3.0, 2).unwrap();
    assert!((p3.lambda_min(&[0.0, 1.0, 1.0]).unwrap() + 2f64.powf(1.0 / 3.0)).abs() < 1e-14);
    let z = [2f64.powf(1.0 / 3.0), 1.0, 1.0];
    let s = p3.conjugate_vector(&z).unwrap();
    let raw = [2f64.powf(2.0 / 3.0), -1.0, -1.0];
    let want: Vec<f64> = raw.iter().map(|v| v / norm(&raw)).collect();
    assert!(inf_dist(&s, &want) < 1e-12);
    assert!(p3.dual_lambda_min(&s).unwrap().abs() < 1e-12);

    assert_eq!(p3.conjugate_vector(&[0.0; 3]).unwrap(), vec![1.0, 0.0, 0.0]);
    assert!(matches!(p3.conjugate_vector(&[2.0, 1.0, 1.0]), Err(Error::NotOnBoundary { .. })));
    assert!((p3.q() - 1.5).abs() < 1e-15);
    assert!(PCone::new(1.0, 2).is_err());
    assert!(PCone::new(2.0, 0).is_err());
    assert!((p_norm(&[3.0, -4.0], 2.0) - 5.0).abs() < 1e-15);
    assert!((p_norm(&[1e200, 1e200], 2.0) - 2f64.sqrt() * 1e200).abs() < 1e186);
}

#[test]
fn orthant_examples() {
    let o = Orthant::new(3).unwrap();
    assert_eq!(o.lambda_min(&[2.0, -1.0, 3.0]).unwrap(), -1.0);
    assert_eq!(o.conjugate_vector(&[0.0, 1.0, 2.0]).unwrap(), vec![1.0, 0.0, 0.0]);
    assert_eq!(o.conjugate_vector(&[2.0, 0.0, 0.0]).unwrap(), vec![0.0, 1.0, 0.0]);
    assert!(o.conjugate_vector(&[1.0, 1.0, 1.0]).is_err());
    assert_eq!(o.closed_form_projection(&[3.0, -1.0, 2.0]).unwrap(), vec![3.0, 0.0, 2.0]);

    let h = hyperbolic_orthant(3);
    let s = h.conjugate_vector(&[0.0, 1.0, 2.0]).unwrap();
    assert!(inf_dist(&s, &[1.0, 0.0, 0.0]) < 1e-12);
    let detail = h.conjugate_detail(&[0.0, 0.0, 3.0]).unwrap();
    let h2 = 0.5f64.sqrt();
    assert!(inf_dist(&detail.vector, &[h2, h2, 0.0]) < 1e-12);
    assert_eq!(detail.multiplicity, 2);
    assert!(matches!(h.conjugate_vector(&[1.0, 1.0, 1.0]), Err(Error::NotOnBoundary { .. })));
}

#[test]
fn fixture_boundary_conjugate() {
    let cone = HyperbolicityCone::new(fixture_form()).unwrap();
    // on the facet x1 + x2 + x3 = 0 only; the conjugate is the facet normal
    let s = cone.conjugate_vector(&[-1.0, -0.5, 1.5]).unwrap();
    let want = [1.0 / 3f64.sqrt(); 3];
    assert!(inf_dist(&s, &want) < 1e-10, "{s:?}");
}

#[test]
fn isometric_projection_examples() {
    let iso = IsometricForm::assume_isometric(
        HyperbolicForm::new(PolynomialForm::coordinate_product(3).unwrap(), vec![1.0; 3]).unwrap(),
    );
    let p = iso.project(&[3.0, -1.0, 2.0]).unwrap();
    assert!(inf_dist(&p, &[3.0, 0.0, 2.0]) < 1e-12);
    assert!(inf_dist(&iso.project(&[-1.0, -1.0, -1.0]).unwrap(), &[0.0; 3]) < 1e-15);
    assert_eq!(iso.project(&[0.5, 1.0, 2.0]).unwrap(), vec![0.5, 1.0, 2.0]);
    assert!((iso.dist(&[3.0, -1.0, 2.0]).unwrap() - 1.0).abs() < 1e-12);
    assert!(matches!(iso.project(&[2.0, 2.0, -1.0]), Err(Error::RepeatedEigenvalues { .. })));

    let iso2 = IsometricForm::assume_isometric(
        HyperbolicForm::new(PolynomialForm::coordinate_product(2).unwrap(), vec![1.0; 2]).unwrap(),
    );
    assert!((iso2.dist(&[-3.0, 4.0]).unwrap() - 3.0).abs() < 1e-12);

    let mut r = rng(35);
    for _ in 0..50 {
        let x = normal_vec(&mut r, 3);
        let want: Vec<f64> = x.iter().map(|v| v.max(0.0)).collect();
        assert!(inf_dist(&iso.project(&x).unwrap(), &want) < 1e-10);
        assert!((iso.dist(&x).unwrap() - dist(&x, &want)).abs() < 1e-10);
    }
}

#[test]
fn cone_spec_json() {
    let s = ConeSpec::from_json(r#"{"kind": "pcone", "p": 3, "n": 2}"#).unwrap();
    assert_eq!(s, ConeSpec::Pcone { p: 3.0, n: 2 });
    assert_eq!(s.dim(), 3);
    assert!(s.hyperbolic_form().unwrap().is_none());
    let o = ConeSpec::from_json(r#"{"kind": "orthant", "n": 4}"#).unwrap().build().unwrap();
    assert_eq!(o.dim(), 4);
    let d = ConeSpec::from_json(r#"{"kind": "derivative_orthant", "n": 5, "k": 1}"#).unwrap();
    let form = d.hyperbolic_form().unwrap().unwrap();
    assert_eq!(form.degree(), 4);
    let h = ConeSpec::from_json(
        r#"{"kind": "hyperbolicity", "poly": {"elesym": {"n": 3, "k": 2}}, "e": [1, 1, 1]}"#,
    )
    .unwrap();
    let cone = h.build().unwrap();
    assert!((cone.lambda_min(&[1.0, 1.0, 1.0]).unwrap() - 1.0).abs() < 1e-12);
    let back: ConeSpec = serde_json::from_str(&serde_json::to_string(&h).unwrap()).unwrap();
    assert_eq!(back, h);
    assert!(ConeSpec::from_json(r#"{"kind": "simplex", "n": 3}"#).is_err());
    assert!(ConeSpec::from_json(r#"{"kind": "pcone", "p": 0.5, "n": 2}"#).unwrap().build().is_err());
}

proptest! {
    #[test]
    fn pcone_boundary_conjugates(tail in prop::collection::vec(-5.0f64..5.0, 5), pi in 0usize..3) {
        let p = [1.3, 2.0, 4.0][pi];
        let cone = PCone::new(p, 5).unwrap();
        let mut z = vec![p_norm(&tail, p)];
        z.extend(&tail);
        prop_assume!(z[0] > 1e-3);
        let s = cone.conjugate_vector(&z).unwrap();
        prop_assert!(dot(&s, &z).abs() <= 1e-8 * norm(&z));
        prop_assert!(cone.dual_lambda_min(&s).unwrap() >= -1e-10);
    }
}
