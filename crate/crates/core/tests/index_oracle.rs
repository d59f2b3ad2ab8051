use dml_core::arith::rational::{int, Rational};
use dml_core::heights::{BinaryLinearForm, ProjectivePoint};
use dml_core::index::{index, index_with_complements};
use dml_core::FieldElement;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;

use common::{oracle_index, points, random_case, random_complement, to_library};

fn rp(p: [i64; 2]) -> [Rational; 2] {
    [int(p[0]), int(p[1])]
}

#[test]
fn basis_rewrite_matches_taylor_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut positive = 0;
    for case in 0..500 {
        let c = random_case(&mut rng);
        let ws: Vec<[i64; 2]> = c.pts.iter().map(|&p| random_complement(&mut rng, p)).collect();
        let pr: Vec<[Rational; 2]> = c.pts.iter().map(|&p| rp(p)).collect();
        let wr: Vec<[Rational; 2]> = ws.iter().map(|&w| rp(w)).collect();
        let expected = oracle_index(&c.poly, &c.r, &pr, &wr);
        let got = index(&to_library(&c.poly, &c.r), &points(&c.pts)).unwrap();
        assert_eq!(got.value, expected, "case {case}: r = {:?}, x = {:?}, P = {:?}", c.r, c.pts, c.poly);
        if !expected.is_zero() {
            positive += 1;
        }
    }
    assert!(positive > 100, "only {positive} cases with positive index");
}

#[test]
fn index_lies_in_range_and_ignores_scaling() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let c = random_case(&mut rng);
        let p = to_library(&c.poly, &c.r);
        let x = points(&c.pts);
        let i = index(&p, &x).unwrap().value;
        assert!(i >= Rational::zero() && i <= int(c.r.len() as i64));
        let lambda = FieldElement::rational(Rational::new(rng.gen_range(1..9).into(), rng.gen_range(1..9).into()));
        assert_eq!(index(&p.scale(&lambda).unwrap(), &x).unwrap().value, i);
        // rescaling the points does not move them projectively
        let scaled: Vec<ProjectivePoint> = c.pts.iter().map(|p| ProjectivePoint::from_ints(&[3 * p[0], 3 * p[1]]).unwrap()).collect();
        assert_eq!(index(&p, &scaled).unwrap().value, i);
    }
}

#[test]
fn index_independent_of_complement() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let c = random_case(&mut rng);
        let p = to_library(&c.poly, &c.r);
        let x = points(&c.pts);
        let base = index(&p, &x).unwrap();
        let comps: Vec<BinaryLinearForm> = c
            .pts
            .iter()
            .map(|&pt| loop {
                let (a, b) = (rng.gen_range(-4..=4), rng.gen_range(-4..=4));
                if a * pt[0] + b * pt[1] != 0 {
                    break BinaryLinearForm::from_ints(a, b).unwrap();
                }
            })
            .collect();
        assert_eq!(index_with_complements(&p, &x, &comps).unwrap(), base);
    }
}
