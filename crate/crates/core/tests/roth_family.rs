use std::collections::BTreeMap;

use dml_core::arith::rational::{int, rat, Rational};
use dml_core::index::MultihomogPolynomial;
use dml_core::roth::{
    check_hypothesis_ratios, check_roth_instance, feasible_family_forms, feasible_family_theta, RothInstance,
    Verdict, FEASIBLE_FAMILY_MULTIDEGREE,
};
use dml_core::{Field, FieldElement};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;

use common::{oracle_index, Poly};

fn random_family_poly(rng: &mut ChaCha8Rng) -> Poly {
    loop {
        let mut poly = Poly::new();
        for i in 0..=FEASIBLE_FAMILY_MULTIDEGREE[0] {
            for j in 0..=FEASIBLE_FAMILY_MULTIDEGREE[1] {
                let c = rng.gen_range(-9..=9);
                if c != 0 {
                    poly.insert(vec![i, j], int(c));
                }
            }
        }
        if !poly.is_empty() {
            return poly;
        }
    }
}

fn library(poly: &Poly) -> MultihomogPolynomial {
    let map: BTreeMap<Vec<u32>, FieldElement> =
        poly.iter().map(|(k, c)| (k.clone(), FieldElement::rational(c.clone()))).collect();
    MultihomogPolynomial::from_map(FEASIBLE_FAMILY_MULTIDEGREE.to_vec(), Field::Rationals, map).unwrap()
}

#[test]
fn family_constants_match_their_definition() {
    let forms = feasible_family_forms();
    // N_1 = ceil(e^52) has 23 digits, N_2 = ceil(e^360) has 157
    let n1 = -forms[0].c2().a().clone();
    let n2 = -forms[1].c2().a().clone();
    assert_eq!(n1.numer().to_string().len(), 23);
    assert_eq!(n2.numer().to_string().len(), 157);
    assert_eq!(n1.numer().to_string(), "38310080007165768493036");
    let ratios = check_hypothesis_ratios(2, &FEASIBLE_FAMILY_MULTIDEGREE, &feasible_family_theta()).unwrap();
    assert_eq!(ratios, vec![true]);
}

#[test]
fn feasible_family_hundred_random_polynomials() {
    let forms = feasible_family_forms();
    let pts: Vec<[Rational; 2]> = forms.iter().map(|l| [-l.c2().a().clone(), int(1)]).collect();
    let ws = vec![[int(0), int(1)], [int(0), int(1)]];
    let theta = feasible_family_theta();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for case in 0..100 {
        let poly = random_family_poly(&mut rng);
        let inst = RothInstance::new(theta.clone(), library(&poly), forms.clone()).unwrap();
        let rep = check_roth_instance(&inst, 128).unwrap();
        assert_eq!(rep.hypotheses, Verdict::Holds, "case {case}");
        assert!(rep.height_ok.iter().all(|c| c.verdict == Verdict::Holds));
        let expected = oracle_index(&poly, &FEASIBLE_FAMILY_MULTIDEGREE, &pts, &ws);
        assert_eq!(rep.conclusion_index.value, expected, "case {case}");
        assert!(rep.conclusion_holds && expected < theta);
    }
}

#[test]
fn too_small_heights_fail_the_hypothesis() {
    let forms = vec![
        dml_core::heights::BinaryLinearForm::from_ints(1, -3).unwrap(),
        dml_core::heights::BinaryLinearForm::from_ints(1, -5).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let poly = random_family_poly(&mut rng);
    let inst = RothInstance::new(feasible_family_theta(), library(&poly), forms).unwrap();
    let rep = check_roth_instance(&inst, 128).unwrap();
    assert_eq!(rep.hypotheses, Verdict::Fails);
}

#[test]
fn theta_outside_range_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let poly = library(&random_family_poly(&mut rng));
    assert!(RothInstance::new(Rational::zero(), poly.clone(), feasible_family_forms()).is_err());
    assert!(RothInstance::new(rat(121, 10), poly, feasible_family_forms()).is_err());
}
